//! Error type shared across the crate.

/// Errors reported by model construction, analysis, and the solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Model parameters violate their admissibility constraints.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    /// A state vector is non-finite, negative, or exceeds the population cap.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// A control vector lies outside the admissible box.
    #[error("control out of bounds: {0}")]
    ControlOutOfBounds(String),
    /// Cost weights violate their sign constraints.
    #[error("invalid cost weights: {0}")]
    InvalidWeights(String),
    /// A time grid could not be constructed.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// Solver settings violate their admissibility constraints.
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    /// A trajectory does not have one value per grid node.
    #[error("trajectory has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    /// Two trajectories that must share a grid do not.
    #[error("trajectories are defined on different grids")]
    GridMismatch,
    /// A stability classification was requested where the classification
    /// theorem's hypotheses do not hold.
    #[error("stability hypotheses not met: {0}")]
    HypothesisViolation(String),
    /// Integration produced a non-finite value.
    #[error("non-finite value at grid node {node}")]
    NonFiniteState { node: usize },
    /// Integration drove a compartment below the round-off tolerance.
    #[error("negativity breach at grid node {node}: {component} = {value:e}")]
    NegativityBreach {
        node: usize,
        component: &'static str,
        value: f64,
    },
    /// A scenario identifier was not recognized.
    #[error("unknown scenario `{0}` (expected S1, S2, or S3)")]
    UnknownScenario(String),
    /// A sweep knob was not recognized.
    #[error("unknown sweep knob `{0}` (expected c1, c2, or xi)")]
    UnknownKnob(String),
}

pub type Result<T> = std::result::Result<T, Error>;
