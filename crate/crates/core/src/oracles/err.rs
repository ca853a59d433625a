use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::models::CharModel;
use crate::payoff::EpsilonShift2;
use crate::pricer::price_panel;

/// Panel centre that puts every point of [`standard_grid`] on a node when
/// `u_bar` is a multiple of 10.
pub const GRID_CENTER: [f64; 2] = [0.3 * PI, 0.1 * PI];

/// Log-spots `(i pi / 10, -pi / 5 + j pi / 10)` for `i, j = 1..6`, strike 1,
/// row-major in `i`.
pub fn standard_grid() -> Vec<[f64; 2]> {
    let mut g = Vec::with_capacity(36);
    for i in 1..=6 {
        for j in 1..=6 {
            g.push([i as f64 * PI / 10.0, -PI / 5.0 + j as f64 * PI / 10.0]);
        }
    }
    g
}

/// Unit-strike prices at log-spots `points`, read off one panel.
pub fn panel_prices<M: CharModel + ?Sized>(
    model: &M,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    points: &[[f64; 2]],
) -> Result<Vec<f64>> {
    let panel = price_panel(model, lattice, eps, GRID_CENTER)?;
    points.iter().map(|x| Ok(panel.unit_price(*x)?.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrRow {
    pub s10: f64,
    pub s20: f64,
    pub model: f64,
    pub benchmark: f64,
}

/// Mean absolute log deviation between model and benchmark prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrReport {
    pub err: f64,
    pub rows: Vec<ErrRow>,
}

impl ErrReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| SpreadError::Domain(format!("csv: {e}"));
        w.write_record(["s10", "s20", "model", "benchmark"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([r.s10, r.s20, r.model, r.benchmark].map(|v| format!("{v:?}")))
                .map_err(io)?;
        }
        w.flush().map_err(|e| SpreadError::Domain(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `(1/n) sum |log M_i - log B_i|` over matched points given as log-spots.
pub fn err_objective(points: &[[f64; 2]], model: &[f64], benchmark: &[f64]) -> Result<ErrReport> {
    if points.len() != model.len() || points.len() != benchmark.len() || points.is_empty() {
        return Err(SpreadError::InvalidParameter(format!(
            "err objective needs matched lists, got {} points, {} model and {} benchmark prices",
            points.len(),
            model.len(),
            benchmark.len()
        )));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut total = 0.0;
    for ((x, &m), &b) in points.iter().zip(model).zip(benchmark) {
        let (s10, s20) = (x[0].exp(), x[1].exp());
        if !(m > 0.0 && b > 0.0) {
            return Err(SpreadError::Domain(format!(
                "non-positive price at S10 = {s10}, S20 = {s20} (model {m}, benchmark {b})"
            )));
        }
        total += (m.ln() - b.ln()).abs();
        rows.push(ErrRow {
            s10,
            s20,
            model: m,
            benchmark: b,
        });
    }
    Ok(ErrReport {
        err: total / points.len() as f64,
        rows,
    })
}
