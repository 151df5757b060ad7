//! Serializable reports and the JSON envelope.

use serde::Serialize;

use kdvbh_core::cohomeng::CohomReport;
use kdvbh_core::linwin::Window;

use crate::config::Format;
use crate::verify::SuiteResult;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct WindowKey {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: u32,
}

impl From<Window> for WindowKey {
    fn from(w: Window) -> Self {
        WindowKey { n: w.n, l: w.l }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Crosscheck {
    pub name: String,
    pub status: &'static str,
}

impl Crosscheck {
    pub fn new(name: String, passed: bool) -> Self {
        Crosscheck { name, status: if passed { "pass" } else { "fail" } }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WindowDimJson {
    #[serde(flatten)]
    pub window: WindowKey,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CohomJson {
    pub target: &'static str,
    pub p: u32,
    pub d: u32,
    pub windows: Vec<WindowDimJson>,
    pub stabilization: String,
    pub model_notes: Vec<String>,
    pub oracle_crosschecks: Vec<Crosscheck>,
}

impl From<&CohomReport> for CohomJson {
    fn from(r: &CohomReport) -> Self {
        let mut windows: Vec<WindowDimJson> =
            r.windows.iter().map(|w| WindowDimJson { window: w.window.into(), dim: w.dim }).collect();
        windows.sort_by_key(|w| w.window);
        CohomJson {
            target: r.target.name(),
            p: r.bidegree.p,
            d: r.bidegree.d,
            windows,
            stabilization: r.stabilization.to_string(),
            model_notes: r.model_notes.clone(),
            oracle_crosschecks: r.oracle_crosschecks.iter().map(|c| Crosscheck::new(c.name.clone(), c.passed)).collect(),
        }
    }
}

impl CohomJson {
    pub fn text(&self) -> String {
        let dims: Vec<String> = self.windows.iter().map(|w| format!("{}:{}={}", w.window.n, w.window.l, w.dim)).collect();
        let mut s = format!("{} ({},{}): {} [{}]\n", self.target, self.p, self.d, dims.join(" "), self.stabilization);
        for n in &self.model_notes {
            s += &format!("  note: {n}\n");
        }
        for c in &self.oracle_crosschecks {
            s += &format!("  {} {}\n", c.status, c.name);
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteJson {
    pub name: &'static str,
    pub status: &'static str,
    pub checks: usize,
    pub slices: Vec<String>,
    pub failures: Vec<String>,
}

impl From<&SuiteResult> for SuiteJson {
    fn from(s: &SuiteResult) -> Self {
        SuiteJson {
            name: s.name,
            status: if s.passed() { "pass" } else { "fail" },
            checks: s.checks,
            slices: s.slices.clone(),
            failures: s.failures.clone(),
        }
    }
}

/// Top-level output of every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub failures: Vec<String>,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, failures: Vec<String>, body: T) -> Self {
        Envelope { schema: SCHEMA, command, failures, body }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// JSON, or `text` followed by a failure summary.
    pub fn render(&self, format: Format, text: impl FnOnce(&T) -> String) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = text(&self.body);
                if self.failures.is_empty() {
                    s += "all checks passed\n";
                } else {
                    for f in &self.failures {
                        s += &format!("FAILED {f}\n");
                    }
                }
                s
            }
        }
    }
}
