//! Group presets, table files, function files and coupling descriptions.
//!
//! Group table file: `{"order": n, "table": [row-major products], "label"?: ".."}`.
//! Function file: `{"group_ref"?: "..", "values": [[re, im], ..] | {"element": [re, im]}}`.
//! Coupling file: `{"label"?, "weights", "gamma", "gamma_action", "lambda",
//! "lambda_action", "p", "q"}`, with `gamma`/`lambda` a preset string or a table.

use std::path::Path;

use mdmult::group::{Carrier, FunctionFile, GroupTableFile};
use mdmult::{CouplingSpace, FiniteGroup, FreeBall, GroupFunction, IntegerWindow, Subgroup};

use crate::report::{CliError, CliResult, InputDigest};

pub fn read(path: &Path, digest: &mut InputDigest) -> CliResult<Vec<u8>> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    digest.add(&path.display().to_string(), &bytes);
    Ok(bytes)
}

/// `sym3` → `sym:3`; names that already carry a colon pass through.
pub fn normalize_preset(spec: &str) -> String {
    let s = spec.trim();
    if s.contains(':') {
        return s.to_string();
    }
    match s.find(|c: char| c.is_ascii_digit()) {
        Some(i) if i > 0 => format!("{}:{}", &s[..i], &s[i..]),
        _ => s.to_string(),
    }
}

fn parse_pair(rest: &str, what: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::invalid(format!("{what} expects two integers k,R, got '{rest}'"));
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub enum AnyCarrier {
    Finite(FiniteGroup),
    Ball(FreeBall),
    Window(IntegerWindow),
}

impl AnyCarrier {
    pub fn finite(&self) -> Option<&FiniteGroup> {
        match self {
            AnyCarrier::Finite(g) => Some(g),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AnyCarrier::Finite(g) => g.tag().to_string(),
            AnyCarrier::Ball(b) => b.tag().to_string(),
            AnyCarrier::Window(w) => w.tag().to_string(),
        }
    }

    pub fn load_function(&self, path: &Path, digest: &mut InputDigest) -> CliResult<GroupFunction> {
        match self {
            AnyCarrier::Finite(g) => load_function(g, path, digest),
            AnyCarrier::Ball(b) => load_function(b, path, digest),
            AnyCarrier::Window(w) => load_function(w, path, digest),
        }
    }
}

/// A preset (`cyclic:n`, `dihedral:n`, `sym:n`, `alt:n`, `freeball:k,R`,
/// `window:N`) or the path of a group table file.
pub fn parse_carrier(spec: &str, digest: &mut InputDigest) -> CliResult<AnyCarrier> {
    let path = Path::new(spec);
    if path.is_file() {
        let table: GroupTableFile = serde_json::from_slice(&read(path, digest)?)?;
        return Ok(AnyCarrier::Finite(FiniteGroup::from_file(&table)?));
    }
    digest.add("group", spec.as_bytes());
    let spec = normalize_preset(spec);
    if let Some(rest) = spec.strip_prefix("freeball:") {
        let (k, r) = parse_pair(rest, "freeball")?;
        return Ok(AnyCarrier::Ball(FreeBall::new(k, r)?));
    }
    if let Some(rest) = spec.strip_prefix("window:") {
        let n = rest
            .trim()
            .parse()
            .map_err(|_| CliError::invalid(format!("window expects a halfwidth, got '{rest}'")))?;
        return Ok(AnyCarrier::Window(IntegerWindow::new(n)?));
    }
    Ok(AnyCarrier::Finite(FiniteGroup::from_preset(&spec)?))
}

pub fn load_function(carrier: &impl Carrier, path: &Path, digest: &mut InputDigest) -> CliResult<GroupFunction> {
    let file: FunctionFile = serde_json::from_slice(&read(path, digest)?)?;
    if let Some(r) = &file.group_ref {
        let expected = carrier.tag().to_string();
        if normalize_preset(r) != expected {
            return Err(CliError::invalid(format!(
                "function file is for '{r}', but the carrier is '{expected}'"
            )));
        }
    }
    Ok(GroupFunction::from_file(carrier, &file)?)
}

/// A coupling together with the subgroup data when it came from a preset.
pub struct LoadedCoupling {
    pub space: CouplingSpace,
    pub subgroup: Option<(FiniteGroup, Subgroup)>,
}

/// `subgroup:Λ,Γ`: Λ a group preset and Γ a subgroup spec inside it
/// (`alt3`, `cyclic2`, `trivial`, `gens:i,j`, or Λ itself).
pub fn preset_coupling(spec: &str, digest: &mut InputDigest) -> CliResult<LoadedCoupling> {
    digest.add("preset", spec.as_bytes());
    let rest = spec
        .strip_prefix("subgroup:")
        .ok_or_else(|| CliError::invalid(format!("unknown coupling preset '{spec}'")))?;
    let (big, small) = rest
        .split_once(',')
        .ok_or_else(|| CliError::invalid(format!("preset '{spec}' needs the form subgroup:Λ,Γ")))?;
    let lambda = FiniteGroup::from_preset(&normalize_preset(big))?;
    let sub = lambda.subgroup_from_spec(&normalize_preset(small))?;
    let space = mdmult::subgroup_coupling(&lambda, &sub)?;
    Ok(LoadedCoupling {
        space,
        subgroup: Some((lambda, sub)),
    })
}

pub fn file_coupling(path: &Path, digest: &mut InputDigest) -> CliResult<LoadedCoupling> {
    let file: mdmult::coupling::CouplingFile = serde_json::from_slice(&read(path, digest)?)?;
    Ok(LoadedCoupling {
        space: file.build()?,
        subgroup: None,
    })
}
