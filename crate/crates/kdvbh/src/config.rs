//! Run configuration shared by the subcommands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kdvbh_core::algebra::Bidegree;
use kdvbh_core::linwin::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Pages,
    Bh,
    Acceptance,
    Matrix,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Pages => "pages",
            Command::Bh => "bh",
            Command::Acceptance => "acceptance",
            Command::Matrix => "matrix",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(ConfigError(format!("unknown format `{s}` (expected json or text)"))),
        }
    }
}

/// A rejected flag value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub max_d: u32,
    pub ladder: Vec<Window>,
    /// Empty means every bidegree with `d ≤ max_d`.
    pub bidegrees: Vec<Bidegree>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_MAX_D: u32 = 6;

/// `N = 2..5` at `L = 2`, then `L = 3, 4` at `N = 5`.
pub fn default_ladder() -> Vec<Window> {
    [(2, 2), (3, 2), (4, 2), (5, 2), (5, 3), (5, 4)].into_iter().map(|(n, l)| Window::new(n, l)).collect()
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            max_d: DEFAULT_MAX_D,
            ladder: default_ladder(),
            bidegrees: Vec::new(),
            out: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_ladder(&self.ladder)?;
        if let Some(b) = self.bidegrees.iter().find(|b| b.d > self.max_d) {
            return Err(ConfigError(format!("bidegree ({},{}) exceeds --max-d {}", b.p, b.d, self.max_d)));
        }
        Ok(())
    }

    /// The selected bidegrees, or all of them up to `max_d`, sorted.
    pub fn bidegree_list(&self) -> Vec<Bidegree> {
        let mut out = if self.bidegrees.is_empty() { all_bidegrees(self.max_d) } else { self.bidegrees.clone() };
        out.sort_by_key(|b| (b.p, b.d));
        out.dedup();
        out
    }

    pub fn max_n(&self) -> u32 {
        self.ladder.iter().map(|w| w.n).max().unwrap_or(0)
    }
}

/// Every `(p, d)` with `d ≤ max_d` that admits a monomial: `p` distinct odd
/// jets need standard degree at least `p(p−1)/2`.
pub fn all_bidegrees(max_d: u32) -> Vec<Bidegree> {
    let mut out = Vec::new();
    for p in 0..=max_d + 1 {
        for d in 0..=max_d {
            if p * p.saturating_sub(1) / 2 <= d {
                out.push(Bidegree::new(p, d));
            }
        }
    }
    out
}

pub fn check_ladder(ladder: &[Window]) -> Result<(), ConfigError> {
    if ladder.is_empty() {
        return Err(ConfigError("empty window ladder".into()));
    }
    for pair in ladder.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(a.n <= b.n && a.l <= b.l && a != b) {
            return Err(ConfigError(format!("window ladder not increasing at {a} -> {b}")));
        }
    }
    Ok(())
}

/// `N1:L1,N2:L2,...`
pub fn parse_windows(s: &str) -> Result<Vec<Window>, ConfigError> {
    let ladder = s
        .split(',')
        .map(|item| {
            let (n, l) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| ConfigError(format!("window `{item}` is not N:L")))?;
            Ok(Window::new(parse_u32(n, "N")?, parse_u32(l, "L")?))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    check_ladder(&ladder)?;
    Ok(ladder)
}

/// `p,d`
pub fn parse_bidegree(s: &str) -> Result<Bidegree, ConfigError> {
    let (p, d) = s.split_once(',').ok_or_else(|| ConfigError(format!("bidegree `{s}` is not p,d")))?;
    Ok(Bidegree::new(parse_u32(p, "p")?, parse_u32(d, "d")?))
}

fn parse_u32(s: &str, what: &str) -> Result<u32, ConfigError> {
    s.trim().parse().map_err(|_| ConfigError(format!("{what} = `{s}` is not a nonnegative integer")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_and_bidegrees() {
        assert_eq!(parse_windows("2:1,3:1").unwrap(), vec![Window::new(2, 1), Window::new(3, 1)]);
        assert!(parse_windows("3:1,2:1").is_err());
        assert!(parse_windows("3:1,3:1").is_err());
        assert!(parse_windows("3").is_err());
        assert_eq!(parse_bidegree("2,1").unwrap(), Bidegree::new(2, 1));
        assert!(parse_bidegree("2;1").is_err());
        assert!(parse_bidegree("-1,1").is_err());
    }

    #[test]
    fn bidegree_range() {
        let all = all_bidegrees(1);
        assert_eq!(all, vec![Bidegree::new(0, 0), Bidegree::new(0, 1), Bidegree::new(1, 0), Bidegree::new(1, 1), Bidegree::new(2, 1)]);
        assert!(all_bidegrees(6).contains(&Bidegree::new(4, 6)));
        assert!(!all_bidegrees(6).contains(&Bidegree::new(5, 6)));
    }
}
