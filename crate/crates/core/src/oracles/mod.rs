//! Independent reference prices: one-dimensional quadrature under GBM,
//! Monte Carlo for every model, and the log-price error objective.

mod benchmark;
mod err;
mod mc;

pub use benchmark::gbm_benchmark;
pub use err::{err_objective, panel_prices, standard_grid, ErrReport, ErrRow, GRID_CENTER};
pub use mc::{mc_basket_prices, mc_char_fn, mc_price, mc_prices, McConfig, McResult};
