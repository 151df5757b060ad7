use alloc::string::String;

use crate::algebra::{Bidegree, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unrecognised factor `{0}`")]
    BadFactor(String),
    #[error("odd variable raised to a power in `{0}`")]
    OddPower(String),
    #[error("malformed coefficient `{0}`")]
    BadCoefficient(String),
    #[error("`{0}` is not a single canonical monomial")]
    NotAMonomial(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("expected a bivector (super degree 2), got super degree {0}")]
    NotBivector(u32),
    #[error("polynomial is not bihomogeneous")]
    Inhomogeneous,
    #[error("monomial {0} lies outside the window")]
    OutsideWindow(Monomial),
    #[error("window overflow: image monomial {0} is not in the codomain slice")]
    WindowOverflow(Monomial),
    #[error("maps are not composable: codomain {0} vs domain {1}")]
    NotComposable(Bidegree, Bidegree),
    #[error("composite of consecutive maps is nonzero")]
    NotADifferential,
    #[error("jet of order {found} exceeds the allowed order {max}")]
    OrderTooHigh { found: u32, max: u32 },
    #[error("{0} is not in the first-page representative space")]
    NotInPageSpace(Monomial),
    #[error("operator U is singular on {0}: the homotopy is undefined at (p,q)=(1,2)")]
    USingular(Monomial),
    #[error("the homotopy is not defined at (p,q)=({0},{1})")]
    HomotopyExcluded(u32, u32),
    #[error("subcomplex index d-p = {0} is below -1; all such complexes vanish")]
    SubcomplexOutOfRange(i64),
    #[error("(p,d)={0} is one of the exceptional bidegrees (0,0),(1,0),(1,1),(2,1); compute it directly")]
    ExceptionalBidegree(Bidegree),
    #[error("filtered complex is malformed: {0}")]
    BadFiltration(String),
    #[error("window ladder is not strictly increasing")]
    LadderNotIncreasing,
}

pub type Result<T> = core::result::Result<T, Error>;
