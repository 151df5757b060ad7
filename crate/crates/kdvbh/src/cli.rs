//! Subcommand bodies. Each returns the rendered report and whether every
//! check passed; argument parsing lives in the binary.

use std::collections::BTreeSet;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use kdvbh_core::cohomeng::{Engine, Target};
use kdvbh_core::kdvpencil::{corrupted_d2, Pencil};
use kdvbh_core::linwin::{OperatorMatrix, SliceBasis};
use kdvbh_core::algebra::DiffPoly;

use crate::acceptance::Battery;
use crate::config::{Command, RunConfig};
use crate::pages::{pages_report, spectral};
use crate::report::{CohomJson, Envelope, SuiteJson};
use crate::verify;

/// Options that only some subcommands read.
#[derive(Clone, Debug, Default)]
pub struct Extras {
    /// Replace `D₂` by a non-differential (negative control for `verify`).
    pub corrupt_d2: bool,
    /// Groups for `bh`; empty means all.
    pub targets: Vec<Target>,
    /// Operator for `matrix`: `D1`, `D2`, `Dlambda` or `dtot`.
    pub operator: String,
}

pub struct Outcome {
    pub rendered: String,
    pub passed: bool,
}

pub fn execute(cfg: &RunConfig, extras: &Extras) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    match cfg.command {
        Command::Verify => cmd_verify(cfg, extras),
        Command::Pages => cmd_pages(cfg),
        Command::Bh => cmd_bh(cfg, extras),
        Command::Acceptance => cmd_acceptance(cfg),
        Command::Matrix => cmd_matrix(cfg, extras),
    }
}

fn finish<T: Serialize>(cfg: &RunConfig, failures: Vec<String>, body: T, text: impl FnOnce(&T) -> String) -> Outcome {
    let env = Envelope::new(cfg.command.name(), failures, body);
    Outcome { rendered: env.render(cfg.format, text), passed: env.passed() }
}

#[derive(Serialize)]
struct VerifyBody {
    max_d: u32,
    window: String,
    suites: Vec<SuiteJson>,
}

pub fn cmd_verify(cfg: &RunConfig, extras: &Extras) -> anyhow::Result<Outcome> {
    let pencil = if extras.corrupt_d2 { Pencil::new().with_d2(corrupted_d2()) } else { Pencil::new() };
    let w = *cfg.ladder.last().expect("validated ladder");
    let suites = verify::run_all(&pencil, cfg.max_d, w);
    let failures = suites.iter().filter(|s| !s.passed()).map(|s| s.name.to_string()).collect();
    let body = VerifyBody { max_d: cfg.max_d, window: w.to_string(), suites: suites.iter().map(SuiteJson::from).collect() };
    Ok(finish(cfg, failures, body, |b| {
        b.suites.iter().map(|s| format!("{} {} ({} checks)\n", s.status, s.name, s.checks)).collect()
    }))
}

pub fn cmd_pages(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let ks: Option<BTreeSet<i64>> =
        (!cfg.bidegrees.is_empty()).then(|| cfg.bidegrees.iter().map(|b| b.d as i64 - b.p as i64).collect());
    let ss = spectral(&Pencil::new(), cfg.max_d, cfg.max_n(), 2, ks.as_ref())?;
    let report = pages_report(&ss, &cfg.ladder, ks.is_none())?;
    let failures = report.failures();
    Ok(finish(cfg, failures, report, |r| r.text()))
}

#[derive(Serialize)]
struct BhBody {
    reports: Vec<CohomJson>,
}

pub fn cmd_bh(cfg: &RunConfig, extras: &Extras) -> anyhow::Result<Outcome> {
    let targets: Vec<Target> = if extras.targets.is_empty() { Target::ALL.to_vec() } else { extras.targets.clone() };
    let cells: Vec<_> = targets.iter().flat_map(|&t| cfg.bidegree_list().into_iter().map(move |b| (t, b))).collect();
    let engine = Engine::new();
    let mut reports = cells
        .into_par_iter()
        .map(|(t, b)| engine.report(t, b, &cfg.ladder).map(|r| (t, CohomJson::from(&r))))
        .collect::<kdvbh_core::Result<Vec<_>>>()?;
    reports.sort_by_key(|(t, r)| (*t, r.p, r.d));
    let reports: Vec<CohomJson> = reports.into_iter().map(|(_, r)| r).collect();
    let failures = reports
        .iter()
        .flat_map(|r| r.oracle_crosschecks.iter().filter(|c| c.status != "pass").map(move |c| format!("{} ({},{}) {}", r.target, r.p, r.d, c.name)))
        .collect();
    Ok(finish(cfg, failures, BhBody { reports }, |b| b.reports.iter().map(CohomJson::text).collect()))
}

#[derive(Serialize)]
struct CriterionJson {
    id: u8,
    name: &'static str,
    status: &'static str,
    scope: String,
    mismatches: Vec<String>,
}

#[derive(Serialize)]
struct AcceptanceBody {
    criteria: Vec<CriterionJson>,
}

pub fn cmd_acceptance(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let battery = Battery { max_d: cfg.max_d, ..Battery::default() };
    let results = battery.run_all();
    let failures = results.iter().filter(|c| !c.passed()).map(|c| format!("criterion {} {}", c.id, c.name)).collect();
    let lines: String = results.iter().map(|c| format!("{c}\n")).collect();
    let criteria = results
        .into_iter()
        .map(|c| CriterionJson {
            id: c.id,
            name: c.name,
            status: if c.passed() { "pass" } else { "fail" },
            scope: c.scope.clone(),
            mismatches: c.mismatches,
        })
        .collect();
    Ok(finish(cfg, failures, AcceptanceBody { criteria }, |_| lines))
}

#[derive(Serialize)]
struct MatrixBody {
    operator: String,
    matrices: Vec<MatrixJson>,
}

#[derive(Serialize)]
struct MatrixJson {
    p: u32,
    d: u32,
    window: String,
    rows: usize,
    cols: usize,
    rank: usize,
    domain: Vec<String>,
    codomain: Vec<String>,
    triplets: String,
}

/// Exports the operator on each selected slice at the last window of the
/// ladder, as `row col value` triplets.
pub fn cmd_matrix(cfg: &RunConfig, extras: &Extras) -> anyhow::Result<Outcome> {
    let pencil = Pencil::new();
    let op = extras.operator.as_str();
    let apply = |a: &DiffPoly| -> DiffPoly {
        match op {
            "D1" => pencil.d1.apply(a),
            "D2" => pencil.d2.apply(a),
            "Dlambda" => pencil.d_lambda.apply(a),
            _ => a.dtot(),
        }
    };
    let shift = match op {
        "D1" | "D2" | "Dlambda" => (1, 1),
        "dtot" => (0, 1),
        other => bail!(crate::config::ConfigError(format!("unknown operator `{other}` (D1, D2, Dlambda, dtot)"))),
    };
    let w = *cfg.ladder.last().expect("validated ladder");
    let mut matrices = Vec::new();
    for b in cfg.bidegree_list() {
        let dom = SliceBasis::enumerate(b, w);
        let target = kdvbh_core::algebra::Bidegree::new(b.p + shift.0, b.d + shift.1);
        let cod = SliceBasis::enumerate(target, kdvbh_core::linwin::Window::new(w.n, w.l + 1));
        let m = OperatorMatrix::assemble(apply, dom, cod).with_context(|| format!("{op} on ({},{}) at {w}", b.p, b.d))?;
        matrices.push(MatrixJson {
            p: b.p,
            d: b.d,
            window: w.to_string(),
            rows: m.codomain.len(),
            cols: m.domain.len(),
            rank: m.rank(),
            domain: m.domain.monomials().iter().map(|x| x.to_string()).collect(),
            codomain: m.codomain.monomials().iter().map(|x| x.to_string()).collect(),
            triplets: m.triplet_text(),
        });
    }
    Ok(finish(cfg, Vec::new(), MatrixBody { operator: op.to_string(), matrices }, |b| {
        b.matrices.iter().map(|m| format!("# {} ({},{}) at {} rank {}\n{}", b.operator, m.p, m.d, m.window, m.rank, m.triplets)).collect()
    }))
}
