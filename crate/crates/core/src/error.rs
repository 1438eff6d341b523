use thiserror::Error;

/// Errors raised by the geometric and numerical operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate triple: two of the points coincide")]
    DegenerateTriple,
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("disks do not have disjoint closures (inversive distance {0})")]
    DisksNotDisjoint(f64),
    #[error("ratio must be positive, got {0}")]
    NonpositiveRatio(f64),
    #[error("modulus must be positive, got {0}")]
    NonpositiveDelta(f64),
    #[error("ring does not separate the arc endpoints")]
    NotSeparating,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("need at least two disks, got {0}")]
    TooFewDisks(usize),
    #[error("need at least two bridges, got {0}")]
    TooFewBridges(usize),
    #[error("no bridge admits a disjoint bridge of another type")]
    NoBridge,
    #[error("arcs of label {0} cover the slicing circle")]
    SingleTypeDominates(usize),
    #[error("thickness factor must exceed 1, got {0}")]
    BadK(f64),
    #[error("group is elementary: {0}")]
    ElementaryGroup(String),
    #[error("frame is not in the renormalized frame bundle")]
    NotInRF,
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
