//! Drivers for the three classical Knudsen-layer problems in three
//! dimensions: Kramers' viscous slip, thermal slip and temperature jump.
//!
//! A [`PreparedProblem`] holds the assembled system and its decomposition so
//! that runs differing only in `chi`, drive or wall condition reuse them.

use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::{assemble_system, CollisionModel, MomentSystem};
use crate::boundary::{build_bc, solve_boundary, BcKind, BoundarySolution, BoundarySpec};
use crate::error::{invalid, Error, Result};
use crate::halfspace::{decompose, Counts, Decomposition};
use crate::index::{build_index_set, IndexSet, MultiIndex};
use crate::linalg::Vector;

/// Viscosity `mu` used to normalize Kramers' problem.
pub const MU: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Default number of profile samples.
pub const DEFAULT_SAMPLES: usize = 200;

/// Decay factor of the slowest mode at the default end of the profile.
pub const PROFILE_DECAY: f64 = 1e-8;

/// Absolute tolerance, relative to the largest state entry, for the
/// algebraic relations the solution must satisfy identically.
pub const CONSERVATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Kramers,
    ThermalSlip,
    TemperatureJump,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::Kramers,
        ProblemKind::ThermalSlip,
        ProblemKind::TemperatureJump,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Kramers => "kramers",
            ProblemKind::ThermalSlip => "thermal-slip",
            ProblemKind::TemperatureJump => "temperature-jump",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Generators of the reduced index set.
    pub fn generators(&self) -> Vec<MultiIndex> {
        let raw: [[u32; 3]; 3] = match self {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => [[1, 0, 0], [3, 0, 0], [1, 0, 2]],
            ProblemKind::TemperatureJump => [[0, 0, 0], [2, 0, 0], [0, 0, 2]],
        };
        raw.iter().map(|c| MultiIndex::new(c.to_vec()).expect("static index")).collect()
    }

    pub fn index_set(&self, order: u32) -> Result<IndexSet> {
        if order < 3 {
            return Err(invalid(format!("moment order must be at least 3, got {order}")));
        }
        build_index_set(&self.generators(), order, 3)
    }

    /// `(p1, p2, r1, r2)` the drivers are built around.
    pub fn expected_counts(&self) -> (usize, usize, usize, usize) {
        match self {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => (1, 0, 1, 0),
            ProblemKind::TemperatureJump => (2, 1, 1, 0),
        }
    }

    pub fn coefficient_name(&self) -> &'static str {
        match self {
            ProblemKind::Kramers => "eta",
            ProblemKind::ThermalSlip => "pr_eta_t",
            ProblemKind::TemperatureJump => "zeta",
        }
    }

    pub fn axis_name(&self) -> &'static str {
        match self {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => "mu_y",
            ProblemKind::TemperatureJump => "lambda_y",
        }
    }

    pub fn defect_name(&self) -> &'static str {
        match self {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => "u_d",
            ProblemKind::TemperatureJump => "theta_d",
        }
    }
}

/// Thermal conductivity `lambda = sqrt(2) / (2 Pr)`.
pub fn conductivity(prandtl: f64) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 / prandtl
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub order: u32,
    pub model: CollisionModel,
    pub chi: f64,
    /// `sigma_12,B`, `q_1,B` or `q_2,B` depending on the problem.
    pub drive: f64,
    pub bc: BcKind,
    pub samples: usize,
    /// End of the profile in scaled units (`mu y` or `lambda y`).
    pub y_max: Option<f64>,
}

impl ProblemConfig {
    pub fn new(kind: ProblemKind, order: u32, model: CollisionModel) -> Self {
        Self {
            kind,
            order,
            model,
            chi: 1.0,
            drive: -1.0,
            bc: BcKind::NewMaxwell,
            samples: DEFAULT_SAMPLES,
            y_max: None,
        }
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn with_bc(mut self, bc: BcKind) -> Self {
        self.bc = bc;
        self
    }

    pub fn with_drive(mut self, drive: f64) -> Self {
        self.drive = drive;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.order < 3 {
            return Err(invalid(format!("moment order must be at least 3, got {}", self.order)));
        }
        if !(self.drive.is_finite() && self.drive != 0.0) {
            return Err(invalid("drive must be finite and non-zero"));
        }
        if self.samples < 2 {
            return Err(invalid("profile needs at least 2 samples"));
        }
        if let Some(y) = self.y_max {
            if !(y.is_finite() && y > 0.0) {
                return Err(invalid(format!("y_max must be positive, got {y}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ProblemResult {
    pub config: ProblemConfig,
    pub coefficient_name: &'static str,
    pub coefficient: f64,
    /// Thermal slip also reports the bare `eta_t`.
    pub extra: Option<(&'static str, f64)>,
    /// `(scaled y, defect)` pairs.
    pub profile: Vec<(f64, f64)>,
    pub solution: BoundarySolution,
    pub counts: Counts,
}

/// Assembled system and decomposition for one problem, order and model.
#[derive(Clone, Debug)]
pub struct PreparedProblem {
    kind: ProblemKind,
    order: u32,
    model: CollisionModel,
    system: MomentSystem,
    dec: Arc<Decomposition>,
}

impl PreparedProblem {
    pub fn new(kind: ProblemKind, order: u32, model: CollisionModel) -> Result<Self> {
        let set = kind.index_set(order)?;
        let system = assemble_system(&set, model)?;
        let dec = decompose(&system)?;
        let c = dec.counts;
        if (c.p1, c.p2, c.r1, c.r2) != kind.expected_counts() {
            return Err(Error::Configuration(format!(
                "{} at M = {order}: (p1, p2, r1, r2) = ({}, {}, {}, {}), expected {:?}",
                kind.name(),
                c.p1,
                c.p2,
                c.r1,
                c.r2,
                kind.expected_counts()
            )));
        }
        Ok(Self {
            kind,
            order,
            model,
            system,
            dec: Arc::new(dec),
        })
    }

    pub fn for_config(cfg: &ProblemConfig) -> Result<Self> {
        Self::new(cfg.kind, cfg.order, cfg.model)
    }

    pub fn system(&self) -> &MomentSystem {
        &self.system
    }

    pub fn decomposition(&self) -> &Arc<Decomposition> {
        &self.dec
    }

    fn pos(&self, c: [u32; 3]) -> usize {
        let idx = MultiIndex::new(c.to_vec()).expect("static index");
        self.system
            .index_set()
            .position(&idx)
            .unwrap_or_else(|| panic!("index {idx} missing from the problem set"))
    }

    fn odd_pos(&self, c: [u32; 3]) -> usize {
        self.pos(c) - self.system.m()
    }

    fn boundary_data(&self, drive: f64) -> (Vector, Vector) {
        let mut f_e = Vector::zeros(self.system.m());
        let mut f_o = Vector::zeros(self.system.n());
        let s3 = 3f64.sqrt();
        match self.kind {
            ProblemKind::Kramers => f_o[self.odd_pos([1, 1, 0])] = drive,
            ProblemKind::ThermalSlip => {
                f_e[self.pos([3, 0, 0])] = s3 * drive;
                f_e[self.pos([1, 2, 0])] = drive;
                f_e[self.pos([1, 0, 2])] = drive;
            }
            ProblemKind::TemperatureJump => {
                f_o[self.odd_pos([2, 1, 0])] = drive;
                f_o[self.odd_pos([0, 1, 2])] = drive;
                f_o[self.odd_pos([0, 3, 0])] = s3 * drive;
            }
        }
        (f_e, f_o)
    }

    /// Relations that must hold at every `y`; returns the largest violation.
    pub fn conservation_defect(&self, w: &Vector) -> f64 {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let at = |c| w[self.pos(c)];
        let terms = match self.kind {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => vec![
                at([1, 1, 0]),
                at([1, 0, 0]) + s2 * at([1, 2, 0]),
            ],
            ProblemKind::TemperatureJump => vec![
                at([0, 1, 0]),
                at([0, 0, 0]) + s2 * at([0, 2, 0]),
                s3 * at([0, 3, 0]) + at([2, 1, 0]) + at([0, 1, 2]),
            ],
        };
        terms.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    fn axis_scale(&self) -> f64 {
        match self.kind {
            ProblemKind::Kramers | ProblemKind::ThermalSlip => MU,
            ProblemKind::TemperatureJump => conductivity(self.model.prandtl()),
        }
    }

    fn defect(&self, w: &Vector, drive: f64) -> f64 {
        let s2 = 2f64.sqrt();
        let lambda = conductivity(self.model.prandtl());
        match self.kind {
            ProblemKind::Kramers => MU * (-s2 * w[self.pos([1, 2, 0])]) / drive,
            ProblemKind::ThermalSlip => 0.5 * lambda * (-s2 * w[self.pos([1, 2, 0])]) / drive,
            ProblemKind::TemperatureJump => {
                let sum: f64 = [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
                    .into_iter()
                    .map(|c| w[self.pos(c)])
                    .sum();
                let theta = s2 * sum / 3.0;
                lambda / s2 * theta / drive
            }
        }
    }

    /// Solves the boundary problem and extracts coefficient and profile.
    pub fn solve(&self, cfg: &ProblemConfig) -> Result<ProblemResult> {
        cfg.validate()?;
        if cfg.kind != self.kind || cfg.order != self.order || cfg.model != self.model {
            return Err(invalid("configuration does not match the prepared problem"));
        }
        let (f_e, f_o) = self.boundary_data(cfg.drive);
        let spec = BoundarySpec::new(cfg.chi, f_e, f_o, cfg.bc);
        let bsys = build_bc(&self.system, &self.dec, &spec)?;
        let solution = solve_boundary(&bsys)?;

        let pr = self.model.prandtl();
        let q = cfg.drive;
        let (coefficient, extra) = match self.kind {
            ProblemKind::Kramers => {
                let u1 = solution.f_e[self.pos([1, 0, 0])];
                (-MU * u1 / q, None)
            }
            ProblemKind::ThermalSlip => {
                let u1 = solution.f_e[self.pos([1, 0, 0])];
                let eta_t = -0.5 * conductivity(pr) * u1 / q;
                (pr * eta_t, Some(("eta_t", eta_t)))
            }
            ProblemKind::TemperatureJump => {
                let theta = 2f64.sqrt() * solution.f_e[self.pos([2, 0, 0])];
                (-conductivity(pr) / 2f64.sqrt() * theta / q, None)
            }
        };

        let scale = self.axis_scale();
        let x_max = cfg
            .y_max
            .unwrap_or_else(|| scale * self.dec.lambda_max() * (1.0 / PROFILE_DECAY).ln());
        let mut profile = Vec::with_capacity(cfg.samples);
        for i in 0..cfg.samples {
            let x = x_max * i as f64 / (cfg.samples - 1) as f64;
            let w = solution.layer.evaluate(x / scale)?;
            let bound = CONSERVATION_TOL * w.amax().max(1.0);
            let defect = self.conservation_defect(&w);
            if defect > bound {
                return Err(Error::Inconsistency(format!(
                    "conserved quantity violated by {defect:.3e} at scaled y = {x}"
                )));
            }
            profile.push((x, self.defect(&w, q)));
        }

        Ok(ProblemResult {
            config: *cfg,
            coefficient_name: self.kind.coefficient_name(),
            coefficient,
            extra,
            profile,
            solution,
            counts: self.dec.counts,
        })
    }
}

pub fn run(cfg: &ProblemConfig) -> Result<ProblemResult> {
    PreparedProblem::for_config(cfg)?.solve(cfg)
}

fn run_kind(cfg: &ProblemConfig, kind: ProblemKind) -> Result<ProblemResult> {
    if cfg.kind != kind {
        return Err(invalid(format!(
            "expected a {} configuration, got {}",
            kind.name(),
            cfg.kind.name()
        )));
    }
    run(cfg)
}

pub fn run_kramers(cfg: &ProblemConfig) -> Result<ProblemResult> {
    run_kind(cfg, ProblemKind::Kramers)
}

pub fn run_thermal_slip(cfg: &ProblemConfig) -> Result<ProblemResult> {
    run_kind(cfg, ProblemKind::ThermalSlip)
}

pub fn run_temperature_jump(cfg: &ProblemConfig) -> Result<ProblemResult> {
    run_kind(cfg, ProblemKind::TemperatureJump)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub order: u32,
    pub coefficient: f64,
    /// `log2 |coefficient - reference|`
    pub log2_error: Option<f64>,
}

/// Runs `cfg` at every order in parallel; rows come back in input order.
pub fn sweep_orders(
    cfg: &ProblemConfig,
    orders: &[u32],
    reference: Option<f64>,
) -> Result<Vec<SweepRow>> {
    if orders.is_empty() {
        return Err(invalid("sweep needs at least one order"));
    }
    orders
        .par_iter()
        .map(|&order| {
            let c = ProblemConfig { order, ..*cfg };
            let res = PreparedProblem::for_config(&c)?.solve(&c)?;
            Ok(SweepRow {
                order,
                coefficient: res.coefficient,
                log2_error: reference.map(|r| (res.coefficient - r).abs().log2()),
            })
        })
        .collect()
}

/// Least-squares slope of `log2_error` against `log2(order)`.
pub fn fit_log2_slope(rows: &[SweepRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            r.log2_error
                .filter(|e| e.is_finite())
                .map(|e| ((r.order as f64).log2(), e))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SH: CollisionModel = CollisionModel::Shakhov {
        prandtl: 2.0 / 3.0,
    };

    #[test]
    fn names_round_trip() {
        for k in ProblemKind::ALL {
            assert_eq!(ProblemKind::from_name(k.name()), Some(k));
        }
        assert_eq!(ProblemKind::from_name("couette"), None);
    }

    #[test]
    fn low_order_rejected() {
        let cfg = ProblemConfig::new(ProblemKind::Kramers, 2, CollisionModel::Bgk);
        assert!(matches!(run(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_drive_rejected() {
        let cfg = ProblemConfig::new(ProblemKind::Kramers, 4, CollisionModel::Bgk).with_drive(0.0);
        assert!(matches!(run(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn wrong_kind_rejected() {
        let cfg = ProblemConfig::new(ProblemKind::Kramers, 4, CollisionModel::Bgk);
        assert!(run_temperature_jump(&cfg).is_err());
        assert!(run_kramers(&cfg).is_ok());
    }

    #[test]
    fn temperature_jump_low_order() {
        let cfg = ProblemConfig::new(ProblemKind::TemperatureJump, 3, CollisionModel::Bgk);
        let res = run(&cfg).unwrap();
        assert!((res.coefficient - 1.12868).abs() < 2e-5, "{}", res.coefficient);
    }

    #[test]
    fn coefficients_are_drive_invariant() {
        for kind in ProblemKind::ALL {
            let base = ProblemConfig::new(kind, 9, SH).with_chi(0.6);
            let a = run(&base).unwrap();
            let b = run(&base.with_drive(3.5)).unwrap();
            assert!((a.coefficient - b.coefficient).abs() < 1e-12 * a.coefficient.abs());
            for (p, q) in a.profile.iter().zip(&b.profile) {
                assert!((p.1 - q.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_shape_and_decay() {
        for kind in ProblemKind::ALL {
            let res = run(&ProblemConfig::new(kind, 10, CollisionModel::Bgk)).unwrap();
            assert_eq!(res.profile.len(), DEFAULT_SAMPLES);
            assert_eq!(res.profile[0].0, 0.0);
            let first = res.profile[0].1.abs();
            let last = res.profile.last().unwrap().1.abs();
            assert!(first > 0.0);
            assert!(last < 1e-7 * first.max(1.0), "{kind:?}: {last:e}");
        }
    }

    #[test]
    fn explicit_ymax_sets_axis() {
        let mut cfg = ProblemConfig::new(ProblemKind::Kramers, 6, CollisionModel::Bgk);
        cfg.y_max = Some(3.0);
        cfg.samples = 7;
        let res = run(&cfg).unwrap();
        assert_eq!(res.profile.len(), 7);
        assert!((res.profile[6].0 - 3.0).abs() < 1e-15);
        assert!((res.profile[3].0 - 1.5).abs() < 1e-15);
    }

    #[test]
    fn thermal_slip_reports_both_values() {
        let res = run(&ProblemConfig::new(ProblemKind::ThermalSlip, 12, SH).with_chi(0.1)).unwrap();
        let (name, eta_t) = res.extra.unwrap();
        assert_eq!(name, "eta_t");
        assert!((res.coefficient - 2.0 / 3.0 * eta_t).abs() < 1e-15);
    }

    #[test]
    fn prepared_problem_reused_across_chi() {
        let prep = PreparedProblem::new(ProblemKind::Kramers, 12, CollisionModel::Bgk).unwrap();
        let mut last = f64::INFINITY;
        for chi in [0.1, 0.5, 1.0] {
            let cfg = ProblemConfig::new(ProblemKind::Kramers, 12, CollisionModel::Bgk).with_chi(chi);
            let eta = prep.solve(&cfg).unwrap().coefficient;
            assert!(eta < last);
            last = eta;
        }
        let other = ProblemConfig::new(ProblemKind::Kramers, 13, CollisionModel::Bgk);
        assert!(prep.solve(&other).is_err());
    }

    #[test]
    fn sweep_rows_in_order() {
        let cfg = ProblemConfig::new(ProblemKind::Kramers, 4, CollisionModel::Bgk);
        let rows = sweep_orders(&cfg, &[8, 4, 6], Some(1.01619)).unwrap();
        assert_eq!(rows.iter().map(|r| r.order).collect::<Vec<_>>(), vec![8, 4, 6]);
        assert!(rows.iter().all(|r| r.log2_error.is_some()));
        let single = sweep_orders(&cfg, &[4], None).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].log2_error.is_none());
        assert!(sweep_orders(&cfg, &[], None).is_err());
    }

    #[test]
    fn slope_fit_exact_line() {
        let rows: Vec<SweepRow> = [4u32, 8, 16, 32]
            .iter()
            .map(|&m| SweepRow {
                order: m,
                coefficient: 0.0,
                log2_error: Some(3.0 - (m as f64).log2()),
            })
            .collect();
        assert!((fit_log2_slope(&rows).unwrap() + 1.0).abs() < 1e-14);
        assert!(fit_log2_slope(&rows[..1]).is_none());
    }
}
