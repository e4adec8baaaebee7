//! `knudsen` command-line driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 ill-posed
//! boundary condition or data outside its range, 4 numerical inconsistency.

mod args;
mod manifest;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use knudsen_core::{sweep_orders, Error, ProblemConfig, ProblemKind};

use args::{parse_orders, Cli, Command, ReplayArgs, RunArgs, SweepArgs};
use manifest::{redirect, Recorded, RunManifest};

enum Failure {
    Io(String),
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::InvalidArgument(_) | Error::Parse(_) => 2,
                Error::IllPosedBoundary(_) | Error::InconsistentData { .. } => 3,
                Error::Assembly { .. }
                | Error::Inconsistency(_)
                | Error::UnsupportedConfiguration(_)
                | Error::Configuration(_)
                | Error::Accuracy(_) => 4,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    fill(&mut out).and_then(|_| out.flush()).map_err(io_err(path))
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let (model, warning) = args.common.collision_model();
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let cfg = ProblemConfig {
        kind: ProblemKind::from(args.common.problem),
        order: args.order,
        model,
        chi: args.common.chi,
        drive: args.common.drive,
        bc: args.common.bc.into(),
        samples: args.samples,
        y_max: args.ymax,
    };
    let res = knudsen_core::run(&cfg)?;
    for line in output::summary_lines(&res) {
        println!("{line}");
    }
    let mut outputs = Vec::new();
    if let Some(path) = &args.profile {
        write_file(path, |out| output::write_profile(out, &res))?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.json {
        let summary = output::Summary::new(&res);
        write_file(path, |out| {
            serde_json::to_writer_pretty(&mut *out, &summary).map_err(io::Error::other)?;
            writeln!(out)
        })?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.manifest {
        RunManifest::new(Recorded::Run(args.clone()), outputs)
            .write(path)
            .map_err(io_err(path))?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let orders = parse_orders(&args.orders).map_err(Failure::Usage)?;
    let (model, warning) = args.common.collision_model();
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let mut cfg = ProblemConfig::new(ProblemKind::from(args.common.problem), orders[0], model)
        .with_chi(args.common.chi)
        .with_bc(args.common.bc.into())
        .with_drive(args.common.drive);
    // Sweeps report coefficients only.
    cfg.samples = 2;
    let rows = sweep_orders(&cfg, &orders, args.reference)?;
    let with_error = args.reference.is_some();
    let mut outputs: Vec<PathBuf> = Vec::new();
    match &args.output {
        Some(path) => {
            write_file(path, |out| output::write_sweep(out, &rows, with_error))?;
            outputs.push(path.clone());
        }
        None => {
            let stdout = io::stdout();
            output::write_sweep(stdout.lock(), &rows, with_error)
                .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
        }
    }
    if let Some(path) = &args.manifest {
        RunManifest::new(Recorded::Sweep(args.clone()), outputs)
            .write(path)
            .map_err(io_err(path))?;
    }
    Ok(())
}

fn cmd_replay(args: &ReplayArgs) -> Result<(), Failure> {
    let manifest = RunManifest::read(&args.manifest).map_err(Failure::Usage)?;
    let mut recorded = manifest.recorded;
    if let Some(dir) = &args.out_dir {
        redirect(&mut recorded, dir);
    }
    match recorded {
        Recorded::Run(run) => cmd_run(&run),
        Recorded::Sweep(sweep) => cmd_sweep(&sweep),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Replay(a) => cmd_replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
