//! Spectral-sequence tables for the KdV subcomplexes.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use kdvbh_core::cohomeng::{KdvSpectral, SliceRun};
use kdvbh_core::kdvpencil::Pencil;
use kdvbh_core::linwin::Window;
use kdvbh_core::specseq::Page;

use crate::report::{Crosscheck, WindowKey};

/// The pieces `(k, m)` with `m ≤ nmax`, computed in parallel; `ks` restricts
/// the subcomplexes.
pub fn spectral(pencil: &Pencil, dmax: u32, nmax: u32, pages: i64, ks: Option<&BTreeSet<i64>>) -> kdvbh_core::Result<KdvSpectral> {
    let cells: Vec<(i64, u32)> =
        KdvSpectral::cells(dmax, nmax).into_iter().filter(|(k, _)| ks.is_none_or(|s| s.contains(k))).collect();
    let runs = cells
        .into_par_iter()
        .map(|(k, m)| KdvSpectral::run(pencil, k, m, dmax, pages))
        .collect::<kdvbh_core::Result<Vec<_>>>()?;
    Ok(KdvSpectral::from_runs(dmax, nmax, runs))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EntryDim {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PageTable {
    pub r: i64,
    pub entries: Vec<EntryDim>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SliceTable {
    pub k: i64,
    pub weight: u32,
    /// `dim` of each standard degree, from the bottom of the slice.
    pub degrees: Vec<(i64, usize)>,
    pub pages: Vec<PageTable>,
    pub collapse: Option<i64>,
    pub converges: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WindowTable {
    #[serde(flatten)]
    pub window: WindowKey,
    pub pages: Vec<PageTable>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PagesReport {
    pub max_d: u32,
    pub slices: Vec<SliceTable>,
    pub windows: Vec<WindowTable>,
    pub oracle_crosschecks: Vec<Crosscheck>,
}

impl PagesReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.oracle_crosschecks.iter().filter(|c| c.status != "pass").map(|c| c.name.clone()).collect();
        for s in &self.slices {
            if !s.converges {
                out.push(format!("convergence k={} m={}", s.k, s.weight));
            }
        }
        out
    }
}

fn page_table(run: &SliceRun, page: &Page) -> PageTable {
    let top = run.slice.slice.trusted_top();
    let entries = page
        .entries
        .iter()
        .filter(|((p, q), e)| p + q <= top && e.dim() > 0)
        .map(|(&(p, q), e)| EntryDim { p, q, dim: e.dim() })
        .collect();
    PageTable { r: page.r, entries }
}

/// Tables for `E_0, E_1, E_2`, collapse indices, and the closed-form
/// cross-checks (only when every subcomplex is present).
pub fn pages_report(ks: &KdvSpectral, ladder: &[Window], complete: bool) -> kdvbh_core::Result<PagesReport> {
    let slices = ks
        .runs
        .iter()
        .map(|run| {
            let c = &run.slice.slice;
            SliceTable {
                k: run.slice.k,
                weight: run.slice.weight,
                degrees: (c.bottom()..=c.trusted_top()).map(|n| (n, c.dim(n))).collect(),
                pages: run.pages.iter().take(3).map(|pg| page_table(run, pg)).collect(),
                collapse: run.collapse,
                converges: run.convergence.converges(),
            }
        })
        .collect();
    let windows = ladder
        .iter()
        .map(|&w| WindowTable {
            window: WindowKey::from(w),
            pages: (0..=2)
                .map(|r| PageTable {
                    r,
                    entries: ks.nonzero_positions(Some(r), w).into_iter().map(|((p, q), dim)| EntryDim { p, q, dim }).collect(),
                })
                .collect(),
        })
        .collect();
    let mut checks = Vec::new();
    if complete {
        let d = ks.dmax as i64;
        for &w in ladder.iter().filter(|w| w.n <= ks.nmax) {
            let mut bad = Vec::new();
            for p in 0..=d {
                for q in 0..=d - p {
                    let (engine, closed) = ks.e1_crosscheck(p as u32, q as u32, w);
                    if engine != closed {
                        bad.push(format!("({p},{q}) {engine}/{closed}"));
                    }
                }
            }
            checks.push(Crosscheck::new(format!("E1_dims_vs_closed_form@{w}"), bad.is_empty()));
        }
        for p in 1..=d as u32 {
            for q in 2..=(d as u32).saturating_sub(p) {
                let c = ks.d1_crosscheck(p, q)?;
                checks.push(Crosscheck::new(format!("d1_vs_closed_form({p},{q})"), c.passed()));
            }
        }
        let (max, all) = ks.collapse();
        checks.push(Crosscheck::new("collapse_at_2".into(), all && max == Some(2)));
    }
    Ok(PagesReport { max_d: ks.dmax, slices, windows, oracle_crosschecks: checks })
}

impl PagesReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for w in &self.windows {
            s += &format!("window {}:{}\n", w.window.n, w.window.l);
            for pg in &w.pages {
                let cells: Vec<String> = pg.entries.iter().map(|e| format!("({},{})={}", e.p, e.q, e.dim)).collect();
                s += &format!("  E{}: {}\n", pg.r, cells.join(" "));
            }
        }
        for t in &self.slices {
            let collapse = t.collapse.map_or("none".to_string(), |c| c.to_string());
            s += &format!("slice k={} m={}: collapse {} converges {}\n", t.k, t.weight, collapse, t.converges);
        }
        for c in &self.oracle_crosschecks {
            s += &format!("{} {}\n", c.status, c.name);
        }
        s
    }
}
