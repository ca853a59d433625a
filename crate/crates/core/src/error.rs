use thiserror::Error;

/// Errors raised by the pricing engine and its oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpreadError {
    #[error("gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("complex log branch jump between adjacent lattice points (row {row}, column {col}); refine the lattice")]
    Branch { row: usize, col: usize },

    #[error("inadmissible contour shift: {0}")]
    Contour(String),

    #[error("imaginary residue {residue:e} exceeds tolerance at panel index ({row}, {col})")]
    Residue { residue: f64, row: usize, col: usize },

    #[error("analytic greek {greek} is not supported for the {model} model; use finite differences")]
    UnsupportedGreek { greek: String, model: String },

    #[error("strike {strike} lies outside the sampled diagonal range [{lo}, {hi}]")]
    Extrapolation { strike: f64, lo: f64, hi: f64 },

    #[error("grid of {requested} complex values exceeds the budget of {budget}")]
    MemoryBudget { requested: u128, budget: u128 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl SpreadError {
    /// True for errors caused by bad inputs rather than numerical trouble.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            SpreadError::InvalidParameter(_)
                | SpreadError::UnsupportedGreek { .. }
                | SpreadError::MemoryBudget { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SpreadError>;
