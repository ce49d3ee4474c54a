use braid::BraidError;
use monopole::{MonopoleError, NewtonLogEntry};
use serde_json::{json, Value};
use topology::TopologyError;
use transport::TransportError;
use vortexfield::VortexError;
use zlattice::LatticeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("Newton did not converge for eps = {eps} after {iterations} steps")]
    NewtonNotConverged { eps: f64, iterations: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Vortex(#[from] VortexError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Monopole(#[from] MonopoleError),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn lattice_code(e: &LatticeError) -> &'static str {
    match e {
        LatticeError::Shape(_) => "Shape",
        LatticeError::NonIsolatedFixedSet => "NonIsolatedFixedSet",
        LatticeError::Parse(_) => "Parse",
    }
}

fn topology_code(e: &TopologyError) -> &'static str {
    match e {
        TopologyError::NotSymplectic => "NotSymplectic",
        TopologyError::WrongSize { .. } => "WrongSize",
        TopologyError::GenusTooSmall => "GenusTooSmall",
        TopologyError::InfiniteFamily { .. } => "InfiniteFamily",
        TopologyError::NonIsolatedFixedSet => "NonIsolatedFixedSet",
        TopologyError::DegreeTooSmall { .. } => "DegreeTooSmall",
        TopologyError::RankTooSmall => "RankTooSmall",
        TopologyError::Serialize(_) => "Serialize",
        TopologyError::Lattice(e) => lattice_code(e),
    }
}

fn braid_code(e: &BraidError) -> &'static str {
    match e {
        BraidError::EndpointMismatch { .. } => "EndpointMismatch",
        BraidError::DiagonalCollision { .. } => "DiagonalCollision",
        BraidError::InvalidStrand(_) => "InvalidStrand",
        BraidError::TargetsExceedRank { .. } => "TargetsExceedRank",
        BraidError::UnrealizableClass(_) => "UnrealizableClass",
        BraidError::NonIsolatedFixedSet => "NonIsolatedFixedSet",
        BraidError::ConstructionFailed(_) => "ConstructionFailed",
        BraidError::Parse(_) => "Parse",
        BraidError::Topology(e) => topology_code(e),
        BraidError::Lattice(e) => lattice_code(e),
    }
}

fn vortex_code(e: &VortexError) -> &'static str {
    match e {
        VortexError::InvalidCurve(_) => "InvalidCurve",
        VortexError::InvalidField(_) => "InvalidField",
        VortexError::HolonomyMismatch { .. } => "HolonomyMismatch",
        VortexError::NoHolomorphicSection { .. } => "NoHolomorphicSection",
        VortexError::CoincidentHolonomies { .. } => "CoincidentHolonomies",
        VortexError::NonPositiveTau { .. } => "NonPositiveTau",
        VortexError::NonConvergence { .. } => "NonConvergence",
        VortexError::InvalidFamily(_) => "InvalidFamily",
        VortexError::ClosednessViolated { .. } => "ClosednessViolated",
        VortexError::Io(_) => "Io",
    }
}

fn transport_code(e: &TransportError) -> &'static str {
    match e {
        TransportError::SingularOperator { .. } => "SingularOperator",
        TransportError::TrackingLoss { .. } => "TrackingLoss",
        TransportError::AmbiguousMatch { .. } => "AmbiguousMatch",
        TransportError::Unmatched { .. } => "Unmatched",
        TransportError::InvalidInput(_) => "InvalidInput",
        TransportError::Vortex(e) => vortex_code(e),
    }
}

fn monopole_code(e: &MonopoleError) -> &'static str {
    match e {
        MonopoleError::PeriodicityMismatch(_) => "PeriodicityMismatch",
        MonopoleError::LinearSolveFailure { .. } => "LinearSolveFailure",
        MonopoleError::Divergence { .. } => "Divergence",
        MonopoleError::InvalidInput(_) => "InvalidInput",
        MonopoleError::Transport(e) => transport_code(e),
        MonopoleError::Vortex(e) => vortex_code(e),
    }
}

/// Codes reported with exit status 2; everything else is a validation error.
const NUMERICAL: [&str; 8] = [
    "NonConvergence",
    "SingularOperator",
    "TrackingLoss",
    "AmbiguousMatch",
    "Unmatched",
    "LinearSolveFailure",
    "Divergence",
    "NewtonNotConverged",
];

impl CliError {
    /// Name of the innermost error variant.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Config(_) => "Config",
            CliError::Io(_) => "Io",
            CliError::NewtonNotConverged { .. } => "NewtonNotConverged",
            CliError::Lattice(e) => lattice_code(e),
            CliError::Topology(e) => topology_code(e),
            CliError::Braid(e) => braid_code(e),
            CliError::Vortex(e) => vortex_code(e),
            CliError::Transport(e) => transport_code(e),
            CliError::Monopole(e) => monopole_code(e),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if NUMERICAL.contains(&self.code()) {
            2
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Monopole(MonopoleError::Divergence { log, .. }) = self {
            v["log"] = Value::Array(log.iter().map(log_entry).collect());
        }
        v
    }
}

pub fn log_entry(e: &NewtonLogEntry) -> Value {
    json!({
        "k": e.k,
        "residual_0_2_eps": e.residual_0_2_eps,
        "increment_1_2_eps": e.increment_1_2_eps,
        "linear_iterations": e.linear_iterations,
    })
}

pub type Result<T> = std::result::Result<T, CliError>;
