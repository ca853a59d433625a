// Validation compares as `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_math;
pub mod error;
pub mod fft;
pub mod lattice;
pub mod models;
pub mod payoff;
pub mod quadrature;
pub mod pricer;
pub mod oracles;

pub use error::{Result, SpreadError};
pub use lattice::Lattice;
pub use models::{CharModel, GbmBasketParams, GbmParams, Greek, Model, SvParams, VgParams};
pub use payoff::{EpsilonShift2, EpsilonShiftM};
pub use pricer::{BasketPanel, GreekPanel, OffNode, PricePanel, PricePath};
