use std::path::PathBuf;

use clap::ValueEnum;
use mdmult::norms::{pairing, verify_factorization, TupleSource};
use mdmult::sample::{random_function, random_matrix, random_nonnegative, random_pd_function, rng};
use mdmult::suite::Check;
use mdmult::{
    coefficient_witness, induce, induce_dual, induce_witness, is_pd_function, koopman_check,
    lattice_induce, m2_norm, GroupFunction, SolveOptions,
};
use serde_json::{json, Value};

use crate::inputs::{load_function, LoadedCoupling};
use crate::report::{CliError, CliResult, InputDigest};
use crate::{worst, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Action {
    Induce,
    Dual,
    Witness,
    Koopman,
    Lattice,
}

pub struct CoupleArgs {
    pub action: Action,
    pub function: Option<PathBuf>,
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub opts: SolveOptions,
}

pub fn run(lc: &LoadedCoupling, args: &CoupleArgs, digest: &mut InputDigest) -> CliResult<Outcome> {
    let cs = &lc.space;
    let mut results = json!({
        "coupling": cs.label(),
        "points": cs.points(),
        "gamma": cs.gamma().label(),
        "lambda": cs.lambda().label(),
    });
    let (extra, checks) = match args.action {
        Action::Induce => run_induce(lc, args, digest)?,
        Action::Dual => run_dual(lc, args, digest)?,
        Action::Witness => run_witness(lc, args, digest)?,
        Action::Koopman => run_koopman(lc, args)?,
        Action::Lattice => run_lattice(lc, args, digest)?,
    };
    if let (Some(map), Value::Object(extra)) = (results.as_object_mut(), extra) {
        map.extend(extra);
    }
    Ok(Outcome { results, checks })
}

fn upper(phi: &GroupFunction, g: &mdmult::FiniteGroup, opts: &SolveOptions) -> CliResult<f64> {
    Ok(m2_norm(phi, g, opts)?.upper_value().unwrap_or(f64::NAN))
}

fn run_induce(lc: &LoadedCoupling, args: &CoupleArgs, digest: &mut InputDigest) -> CliResult<(Value, Vec<Check>)> {
    let cs = &lc.space;
    let (lambda, gamma) = (cs.lambda(), cs.gamma());
    let mut r = rng(args.seed);
    let given = args
        .function
        .as_ref()
        .map(|p| load_function(lambda, p, digest))
        .transpose()?;
    let mut extra = json!({});
    if let Some(phi) = &given {
        let hat = induce(cs, phi)?;
        extra = json!({
            "phi_hat": hat.to_file(gamma),
            "m2_phi": upper(phi, lambda, &args.opts)?,
            "m2_phi_hat": upper(&hat, gamma, &args.opts)?,
        });
    }
    let mut phis: Vec<GroupFunction> = given.into_iter().collect();
    phis.extend((0..args.samples).map(|_| random_function(lambda, &mut r)));
    let mut growth = f64::NEG_INFINITY;
    for phi in &phis {
        let hat = induce(cs, phi)?;
        growth = worst([growth, upper(&hat, gamma, &args.opts)? - upper(phi, lambda, &args.opts)?]);
    }
    let all: Vec<usize> = gamma.elements().collect();
    let (mut not_pd, mut at_identity) = (0, 0.0);
    for _ in 0..args.samples {
        let phi = random_pd_function(lambda, &mut r);
        let hat = induce(cs, &phi)?;
        if !is_pd_function(&hat, gamma, &all)? {
            not_pd += 1;
        }
        at_identity = worst([at_identity, (hat.get(gamma.identity()) - phi.get(lambda.identity())).norm()]);
    }
    let ones = induce(cs, &GroupFunction::ones(lambda))?;
    let unit = ones.max_abs_diff(&GroupFunction::ones(gamma))?;
    Ok((
        extra,
        vec![
            Check::at_most("m2 of induced minus m2 of input", growth, 1e-6, phis.len()),
            Check::at_most("induce(1) minus 1", unit, 1e-12, 1),
            Check::holds("induced positive definite functions stay positive definite", not_pd, args.samples),
            Check::at_most("value at identity preserved", at_identity, 1e-12, args.samples),
        ],
    ))
}

fn run_dual(lc: &LoadedCoupling, args: &CoupleArgs, digest: &mut InputDigest) -> CliResult<(Value, Vec<Check>)> {
    let cs = &lc.space;
    let (lambda, gamma) = (cs.lambda(), cs.gamma());
    let mut r = rng(args.seed);
    let mut extra = json!({});
    if let Some(p) = &args.function {
        let f = load_function(gamma, p, digest)?;
        extra = json!({ "dual": induce_dual(cs, &f)?.to_file(lambda) });
    }
    let (mut l1, mut adjoint) = (0.0, 0.0);
    for _ in 0..args.samples {
        let f = random_nonnegative(gamma, &mut r);
        let g = induce_dual(cs, &f)?;
        l1 = worst([l1, (g.l1_norm() - f.l1_norm()).abs() / f.l1_norm().max(1.0)]);
        let phi = random_function(lambda, &mut r);
        let h = random_function(gamma, &mut r);
        let lhs = pairing(&induce(cs, &phi)?, &h)?;
        let rhs = pairing(&phi, &induce_dual(cs, &h)?)?;
        adjoint = worst([adjoint, (lhs - rhs).norm() / lhs.norm().max(1.0)]);
    }
    Ok((
        extra,
        vec![
            Check::at_most("l1 norm of dual image minus l1 norm (f >= 0)", l1, 1e-12, args.samples),
            Check::at_most("<induce(phi), f> minus <phi, dual(f)>", adjoint, 1e-12, args.samples),
        ],
    ))
}

fn run_witness(lc: &LoadedCoupling, args: &CoupleArgs, digest: &mut InputDigest) -> CliResult<(Value, Vec<Check>)> {
    let cs = &lc.space;
    let (lambda, gamma) = (cs.lambda(), cs.gamma());
    let d = args.d;
    let mut r = rng(args.seed);
    let given = args
        .function
        .as_ref()
        .map(|p| load_function(lambda, p, digest))
        .transpose()?;
    let mut phis: Vec<GroupFunction> = given.iter().cloned().collect();
    phis.extend((0..args.samples).map(|_| random_pd_function(lambda, &mut r)));
    let tuples = TupleSource::auto(gamma.order(), d, 200_000, args.seed);
    let (mut residual, mut excess) = (0.0, f64::NEG_INFINITY);
    let mut extra = json!({ "d": d });
    for (i, phi) in phis.iter().enumerate() {
        let w = coefficient_witness(lambda, phi, d, &args.opts)?;
        let hat_w = induce_witness(cs, phi, &w, d)?;
        let v = verify_factorization(&induce(cs, phi)?, &hat_w, gamma, &tuples, 1e-9)?;
        residual = worst([residual, v.residual]);
        excess = worst([excess, v.bound - w.bound()?]);
        if i == 0 && given.is_some() {
            extra = json!({
                "d": d,
                "witness_bound": w.bound()?,
                "induced_bound": v.bound,
                "induced_dims": hat_w.dims(),
                "residual": v.residual,
            });
        }
    }
    Ok((
        extra,
        vec![
            Check::at_most("induced witness residual", residual, 1e-9, phis.len()),
            Check::at_most("induced bound minus input bound", excess, 1e-6, phis.len()),
        ],
    ))
}

fn run_koopman(lc: &LoadedCoupling, args: &CoupleArgs) -> CliResult<(Value, Vec<Check>)> {
    let cs = &lc.space;
    let n = cs.lambda().order();
    let report = koopman_check(cs)?;
    let mut r = rng(args.seed);
    let (mut residual, mut norms) = (0.0, 0.0);
    for _ in 0..args.samples {
        let xi = random_matrix(n, 1, &mut r);
        let eta = random_matrix(n, 1, &mut r);
        let t = mdmult::coupling::koopman_transport(cs, xi.as_slice(), eta.as_slice())?;
        let scale = (t.xi_norm * t.eta_norm).max(1.0);
        residual = worst([residual, t.residual / scale]);
        norms = worst([norms, t.norm_defect / scale]);
    }
    let tol = report.tolerance;
    let checks = vec![
        Check::at_most("koopman unitarity defect", report.unitarity_defect, tol, 1),
        Check::at_most("koopman intertwining defect", report.intertwining_defect, tol, 1),
        Check::at_most("transported coefficient residual", residual, tol, args.samples),
        Check::at_most("transported norm defect", norms, tol, args.samples),
    ];
    Ok((json!({ "koopman": report }), checks))
}

fn run_lattice(lc: &LoadedCoupling, args: &CoupleArgs, digest: &mut InputDigest) -> CliResult<(Value, Vec<Check>)> {
    let (g, sub) = lc
        .subgroup
        .as_ref()
        .ok_or_else(|| CliError::invalid("the lattice action needs a subgroup:Λ,Γ preset"))?;
    let omega = sub.left_transversal(g);
    let lcs = mdmult::coupling::lattice_coupling::<f64>(g, sub, &omega)?;
    let mut r = rng(args.seed);
    let given = args
        .function
        .as_ref()
        .map(|p| load_function(&sub.group, p, digest))
        .transpose()?;
    let mut extra = json!({ "transversal": omega });
    if let Some(phi) = &given {
        extra["phi_tilde"] = json!(lattice_induce(g, sub, &omega, phi)?.to_file(g));
    }
    let mut phis: Vec<GroupFunction> = given.into_iter().collect();
    phis.extend((0..args.samples).map(|_| random_function(&sub.group, &mut r)));
    let mut gap = 0.0;
    for phi in &phis {
        let direct = lattice_induce(g, sub, &omega, phi)?;
        gap = worst([gap, direct.max_abs_diff(&induce(&lcs, phi)?)?]);
    }
    Ok((
        extra,
        vec![Check::at_most("lattice induction minus coupling induction", gap, 1e-12, phis.len())],
    ))
}
