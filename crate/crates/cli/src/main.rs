//! `mdmult`: multiplier norms, tree witnesses, coupling checks and the
//! acceptance suite from the command line.
//!
//! Every command writes one JSON `RunReport` (schema in `schema/run_report.schema.json`)
//! to `--out` or stdout. Exit codes: 0 success, 1 a check failed, 2 invalid
//! input, 3 a solver ended without a certificate.

mod couple;
mod inputs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdmult::constructions::sphere_bound;
use mdmult::linalg::SchurEngine;
use mdmult::suite::{run_suite, Check, Mode, SuiteConfig, CRITERIA};
use mdmult::{
    a_norm, b_norm, haagerup_family, m2_norm, tail_bound, tree_witness, FreeBall,
    SolveOptions,
};
use serde_json::{json, Value};

use crate::inputs::{parse_carrier, AnyCarrier};
use crate::report::{CliError, CliResult, InputDigest, RunReport, EXIT_FAILED};

#[derive(Parser)]
#[command(name = "mdmult", version, about = "Certified M_d-multiplier norm bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Relative tolerance of the conic solvers.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Iteration cap of the conic solvers.
    #[arg(long, default_value_t = 50_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in the report (breaks byte-determinism).
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tolerance: self.tol,
            max_iterations: self.max_iterations,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a function on a group or truncated carrier.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        /// cyclic:n, dihedral:n, sym:n, alt:n, freeball:k,R, window:N or a table file.
        #[arg(long)]
        group: String,
        /// Function file.
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Tree factorization of the radial multiplier φ_n on a free-group ball.
    Tree {
        #[arg(short = 'g', long, default_value_t = 2)]
        gens: usize,
        #[arg(short = 'R', long)]
        radius: usize,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd', default_value_t = 2)]
        d: usize,
        #[arg(short = 'r', long, default_value_t = 1)]
        acting_radius: usize,
        /// Haagerup parameters t for the kernel e^{-t|x|}.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0, 2.0])]
        t: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Induction and its invariants on a finite coupling.
    Couple {
        /// Coupling description file.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        file: Option<PathBuf>,
        /// subgroup:Λ,Γ, e.g. subgroup:sym3,alt3.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum)]
        action: couple::Action,
        /// Function file (on Λ for induce and witness, on Γ for dual and lattice).
        #[arg(long = "fn")]
        function: Option<PathBuf>,
        #[arg(short = 'd', default_value_t = 2)]
        d: usize,
        /// Random inputs per invariant.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance criteria.
    VerifyAll {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        /// Comma-separated criterion ids (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// Replace the Schur engine by a max-entry stub; the suite must fail.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    M2,
    B,
    A,
}

pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
}

/// Largest of the values; NaN wins so that it can never pass a check.
pub fn worst<const N: usize>(xs: [f64; N]) -> f64 {
    xs.into_iter()
        .fold(f64::NEG_INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let common = match &cli.command {
        Command::Norm { common, .. }
        | Command::Tree { common, .. }
        | Command::Couple { common, .. }
        | Command::VerifyAll { common, .. } => common.clone(),
    };
    let start = Instant::now();
    let mut digest = InputDigest::default();
    let outcome = common
        .solve_options()
        .validate()
        .map_err(CliError::from)
        .and_then(|()| dispatch(&cli.command, &common, &mut digest));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code);
        }
    };
    for c in outcome.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: measured {:e}, limit {:e}", c.name, c.measured, c.limit);
    }
    let passed = outcome.checks.iter().all(|c| c.passed)
        && outcome.results.get("passed").and_then(Value::as_bool).unwrap_or(true);
    let report = RunReport {
        command,
        inputs_digest: digest.finish(),
        seed: common.seed,
        tolerance: common.tol,
        passed,
        results: outcome.results,
        checks: outcome.checks,
        wall_time_ms: common.timing.then(|| start.elapsed().as_millis() as u64),
    };
    let text = report.to_json();
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(report::EXIT_INVALID);
            }
        }
        None => print!("{text}"),
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn dispatch(command: &Command, common: &Common, digest: &mut InputDigest) -> CliResult<Outcome> {
    let opts = common.solve_options();
    match command {
        Command::Norm {
            kind,
            group,
            function,
            ..
        } => {
            let carrier = parse_carrier(group, digest)?;
            let phi = carrier.load_function(function, digest)?;
            norm(*kind, &carrier, &phi, &opts)
        }
        Command::Tree {
            gens,
            radius,
            n,
            d,
            acting_radius,
            t,
            ..
        } => tree(*gens, *radius, *n, *d, *acting_radius, t),
        Command::Couple {
            file,
            preset,
            action,
            function,
            d,
            samples,
            ..
        } => {
            let lc = match (file, preset) {
                (Some(path), _) => inputs::file_coupling(path, digest)?,
                (None, Some(p)) => inputs::preset_coupling(p, digest)?,
                (None, None) => return Err(CliError::invalid("give --file or --preset")),
            };
            let args = couple::CoupleArgs {
                action: *action,
                function: function.clone(),
                d: *d,
                samples: *samples as usize,
                seed: common.seed,
                opts,
            };
            couple::run(&lc, &args, digest)
        }
        Command::VerifyAll {
            quick,
            criteria,
            inject_fault,
            ..
        } => verify_all(*quick, criteria, *inject_fault, common),
    }
}

fn norm(kind: NormKind, carrier: &AnyCarrier, phi: &mdmult::GroupFunction, opts: &SolveOptions) -> CliResult<Outcome> {
    let label = carrier.label();
    let results = match kind {
        NormKind::M2 => {
            let r = match carrier {
                AnyCarrier::Finite(g) => m2_norm(phi, g, opts)?,
                AnyCarrier::Ball(b) => m2_norm(phi, b, opts)?,
                AnyCarrier::Window(w) => m2_norm(phi, w, opts)?,
            };
            json!({
                "kind": "m2",
                "carrier": label,
                "value": r.upper_value().unwrap_or(r.lower.value),
                "report": r,
            })
        }
        NormKind::B | NormKind::A => {
            let g = carrier
                .finite()
                .ok_or_else(|| CliError::invalid("b and a norms need a finite group"))?;
            if matches!(kind, NormKind::B) {
                let c = mdmult::norms::b_norm_certificate(phi, g, opts)?;
                json!({
                    "kind": "b",
                    "carrier": label,
                    "value": c.value,
                    "lower": c.lower,
                    "upper": c.upper,
                    "residual": c.residual,
                    "iterations": c.iterations,
                })
            } else {
                let a = a_norm(phi, g, opts)?;
                let pairs = |v: &[mdmult::Complex<f64>]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
                json!({
                    "kind": "a",
                    "carrier": label,
                    "value": a.value,
                    "b_norm": b_norm(phi, g, opts)?,
                    "residual": a.residual,
                    "search_value": a.search_value,
                    "u": pairs(&a.u),
                    "v": pairs(&a.v),
                })
            }
        }
    };
    Ok(Outcome {
        results,
        checks: Vec::new(),
    })
}

fn tree(gens: usize, radius: usize, n: usize, d: usize, r: usize, ts: &[f64]) -> CliResult<Outcome> {
    let ball = FreeBall::new(gens, radius)?;
    let fam = tree_witness::<f64>(&ball, n, d, r)?;
    let root = ((n + 1) as f64).sqrt();
    let mut checks = vec![
        Check::at_most("factorization residual", fam.verification.residual, 1e-12, fam.verification.tuples),
        Check::at_most(
            "max ||ξ_1||, ||ξ_d|| minus sqrt(n+1)",
            worst([fam.norms.outer_max - root, fam.norms.inner_max - root]),
            1e-12,
            1,
        ),
    ];
    if let (Some(lo), Some(hi)) = (fam.norms.middle_min, fam.norms.middle_max) {
        checks.push(Check::at_most("middle norms minus 1", worst([(hi - 1.0).abs(), (lo - 1.0).abs()]), 1e-12, 1));
    }
    checks.push(Check::at_most("witness bound minus (n+1)", fam.bound() - (n + 1) as f64, 1e-12, 1));
    let sphere = if n >= 1 {
        let s = sphere_bound::<f64>(&ball, n, d, r)?;
        checks.push(Check::at_most("sphere bound minus 2n", s - (2 * n) as f64, 1e-12, 1));
        Some(s)
    } else {
        None
    };
    let mut haagerup = Vec::new();
    for &t in ts {
        let h = haagerup_family::<f64>(&ball, n, t)?;
        checks.push(Check::holds(format!("ρ_t positive definite at t = {t}"), usize::from(!h.rho_pd), 1));
        let increases = (0..=n).filter(|&k| tail_bound(k + 1, t) >= tail_bound(k, t)).count();
        checks.push(Check::holds(format!("tail bound decreasing at t = {t}"), increases, n + 1));
        haagerup.push(json!({ "t": t, "tail": h.tail, "rho_pd": h.rho_pd }));
    }
    let results = json!({
        "gens": gens,
        "radius": radius,
        "n": n,
        "d": d,
        "acting_radius": r,
        "space_dims": fam.space_dims(),
        "norms": fam.norms,
        "verification": fam.verification,
        "consistency_residual": fam.consistency_residual,
        "bound": fam.bound(),
        "sphere_bound": sphere,
        "haagerup": haagerup,
    });
    Ok(Outcome { results, checks })
}

fn verify_all(quick: bool, criteria: &[u8], inject_fault: bool, common: &Common) -> CliResult<Outcome> {
    let cfg = SuiteConfig {
        mode: if quick { Mode::Quick } else { Mode::Full },
        seed: common.seed,
        engine: if inject_fault {
            SchurEngine::MaxEntryStub
        } else {
            SchurEngine::Admm
        },
        timing: common.timing,
    };
    let ids: Vec<u8> = if criteria.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        criteria.to_vec()
    };
    let report = run_suite(&cfg, &ids);
    for c in &report.criteria {
        eprintln!("{}", c.summary_line());
    }
    Ok(Outcome {
        results: serde_json::to_value(&report)?,
        checks: Vec::new(),
    })
}
