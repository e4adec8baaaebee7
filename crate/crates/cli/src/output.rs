//! CSV and JSON writers. CSV uses `,`, `\n`, `.` and 17 significant digits
//! so that identical runs produce identical bytes.

use std::io::{self, Write};

use serde::Serialize;

use knudsen_core::{Counts, ProblemResult, SweepRow};

pub fn write_profile<W: Write>(mut out: W, res: &ProblemResult) -> io::Result<()> {
    let kind = res.config.kind;
    writeln!(out, "{},{}", kind.axis_name(), kind.defect_name())?;
    for (x, d) in &res.profile {
        writeln!(out, "{x:.16e},{d:.16e}")?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(mut out: W, rows: &[SweepRow], with_error: bool) -> io::Result<()> {
    if with_error {
        writeln!(out, "M,coefficient,log2_error")?;
    } else {
        writeln!(out, "M,coefficient")?;
    }
    for r in rows {
        match r.log2_error.filter(|_| with_error) {
            Some(e) => writeln!(out, "{},{:.16e},{e:.16e}", r.order, r.coefficient)?,
            None => writeln!(out, "{},{:.16e}", r.order, r.coefficient)?,
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CountsJson {
    pub m: usize,
    pub n: usize,
    pub p1: usize,
    pub p2: usize,
    pub r1: usize,
    pub r2: usize,
    pub n_plus: usize,
}

impl From<Counts> for CountsJson {
    fn from(c: Counts) -> Self {
        Self {
            m: c.m,
            n: c.n,
            p1: c.p1,
            p2: c.p2,
            r1: c.r1,
            r2: c.r2,
            n_plus: c.n_plus,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub problem: &'static str,
    pub model: &'static str,
    pub prandtl: f64,
    pub order: u32,
    pub chi: f64,
    pub bc: &'static str,
    pub coefficient_name: &'static str,
    pub coefficient_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_t: Option<f64>,
    pub counts: CountsJson,
}

impl Summary {
    pub fn new(res: &ProblemResult) -> Self {
        let cfg = &res.config;
        Self {
            problem: cfg.kind.name(),
            model: cfg.model.name(),
            prandtl: cfg.model.prandtl(),
            order: cfg.order,
            chi: cfg.chi,
            bc: cfg.bc.name(),
            coefficient_name: res.coefficient_name,
            coefficient_value: res.coefficient,
            eta_t: res.extra.map(|(_, v)| v),
            counts: res.counts.into(),
        }
    }
}

/// Coefficient lines for standard output, six decimals.
pub fn summary_lines(res: &ProblemResult) -> Vec<String> {
    let mut lines = vec![format!("{} = {:.6}", res.coefficient_name, res.coefficient)];
    if let Some((name, value)) = res.extra {
        lines.push(format!("{name} = {value:.6}"));
    }
    lines
}
