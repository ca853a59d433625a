use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::payoff::EpsilonShift2;

/// Fraction of `x_bar` around the centre where prices are trusted.
pub const DEFAULT_TRUST: f64 = 0.5;
/// Negative prices above `-NEG_CLIP` are round-off and clipped to zero.
pub const NEG_CLIP: f64 = 1e-10;
/// Relative imaginary residue above which extraction fails.
pub const RESIDUE_FAIL: f64 = 1e-6;
/// Largest damping amplification `e^{|eps| |x|}` tolerated inside the trust
/// region; beyond it FFT round-off swamps the price.
pub const MAX_AMPLIFICATION: f64 = 1e8;
/// Offset from a node, in units of `eta_star`, still treated as on the node.
const NODE_TOL: f64 = 1e-12;

/// How a price was read off a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricePath {
    /// The spot pair was a lattice node.
    Node,
    /// A panel was built centred on the spot pair.
    Reanchored,
    /// Tensor cubic interpolation between nodes.
    Bicubic,
    /// Polynomial fit along the panel diagonal.
    Diagonal,
}

impl PricePath {
    pub fn label(&self) -> &'static str {
        match self {
            PricePath::Node => "node",
            PricePath::Reanchored => "reanchored",
            PricePath::Bicubic => "bicubic",
            PricePath::Diagonal => "diagonal",
        }
    }
}

/// Off-node lookups on an existing panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffNode {
    /// Build a new panel centred on the requested point.
    #[default]
    Reanchor,
    Bicubic,
}

/// `N x N` unit-strike prices over absolute log-prices `center + x(l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePanel {
    pub values: Vec<f64>,
    pub lattice: Lattice,
    pub eps: EpsilonShift2,
    pub center: [f64; 2],
    pub model: String,
    pub maturity: f64,
    pub rate: f64,
    pub trust: f64,
    /// `max |Im| / (1 + max |Re|)` inside the trust region, with the
    /// unpaired boundary frequencies removed from `Im`.
    pub max_residue: f64,
}

impl PricePanel {
    /// Real part of the inverted grid, with residue checks and clipping
    /// restricted to the trust region.
    pub(crate) fn extract(
        raw: Vec<Complex64>,
        paired_im: &[f64],
        lattice: Lattice,
        eps: EpsilonShift2,
        center: [f64; 2],
        meta: (&str, f64, f64),
        clip: bool,
    ) -> Result<Self> {
        let n = lattice.n();
        let mut panel = PricePanel {
            values: Vec::with_capacity(n * n),
            lattice,
            eps,
            center,
            model: meta.0.to_string(),
            rate: meta.1,
            maturity: meta.2,
            trust: DEFAULT_TRUST,
            max_residue: 0.0,
        };
        let (lo, hi) = panel.trusted_range();
        let (mut max_re, mut worst) = (0.0f64, (0.0, 0, 0));
        for (flat, v) in raw.into_iter().enumerate() {
            let (l1, l2) = (flat / n, flat % n);
            let inside = (lo..=hi).contains(&l1) && (lo..=hi).contains(&l2);
            let mut re = v.re;
            if inside {
                max_re = max_re.max(v.re.abs());
                if paired_im[flat].abs() > worst.0 {
                    worst = (paired_im[flat].abs(), l1, l2);
                }
                if clip && re < 0.0 && re > -NEG_CLIP {
                    re = 0.0;
                }
            }
            panel.values.push(re);
        }
        panel.max_residue = worst.0 / (1.0 + max_re);
        if panel.max_residue > RESIDUE_FAIL {
            return Err(SpreadError::Residue {
                residue: panel.max_residue,
                row: worst.1,
                col: worst.2,
            });
        }
        Ok(panel)
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn value(&self, l1: usize, l2: usize) -> f64 {
        self.values[l1 * self.n() + l2]
    }

    /// Absolute log-prices of node `(l1, l2)`.
    pub fn log_spot(&self, l1: usize, l2: usize) -> [f64; 2] {
        [
            self.center[0] + self.lattice.x(l1),
            self.center[1] + self.lattice.x(l2),
        ]
    }

    /// Largest trusted distance from the centre in each log-price.
    pub fn trusted_half_width(&self) -> f64 {
        trusted_half_width(self.trust, &self.lattice, &self.eps.as_array())
    }

    /// Inclusive node index range, per axis, inside the trust region.
    pub fn trusted_range(&self) -> (usize, usize) {
        let half = (self.trusted_half_width() / self.lattice.eta_star() + 1e-9).floor() as usize;
        let mid = self.n() / 2;
        (mid.saturating_sub(half), (mid + half).min(self.n() - 1))
    }

    fn check_trusted(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let limit = self.trusted_half_width();
        let rel = [x[0] - self.center[0], x[1] - self.center[1]];
        if rel.iter().any(|r| !(r.abs() <= limit)) {
            return Err(SpreadError::Range(format!(
                "log-moneyness ({}, {}) is more than {limit} from the panel centre ({}, {})",
                x[0], x[1], self.center[0], self.center[1]
            )));
        }
        Ok([self.lattice.x_index(rel[0]), self.lattice.x_index(rel[1])])
    }

    /// Unit-strike price at absolute log-prices `x`, on a node or by bicubic
    /// interpolation.
    pub fn unit_price(&self, x: [f64; 2]) -> Result<(f64, PricePath)> {
        let idx = self.check_trusted(x)?;
        let near = [idx[0].round(), idx[1].round()];
        if (idx[0] - near[0]).abs() <= NODE_TOL && (idx[1] - near[1]).abs() <= NODE_TOL {
            return Ok((self.value(near[0] as usize, near[1] as usize), PricePath::Node));
        }
        Ok((self.bicubic(idx), PricePath::Bicubic))
    }

    /// `Spr(S; K) = K * panel(log(S / K))`.
    pub fn price_at(&self, s1: f64, s2: f64, k: f64) -> Result<(f64, PricePath)> {
        check_spots(s1, s2, k)?;
        let (v, path) = self.unit_price([(s1 / k).ln(), (s2 / k).ln()])?;
        Ok((k * v, path))
    }

    // Four-point Lagrange in each direction.
    fn bicubic(&self, idx: [f64; 2]) -> f64 {
        let base = [idx[0].floor() as usize - 1, idx[1].floor() as usize - 1];
        let w = [
            cubic_weights(idx[0] - idx[0].floor()),
            cubic_weights(idx[1] - idx[1].floor()),
        ];
        let mut acc = 0.0;
        for (i, wi) in w[0].iter().enumerate() {
            for (j, wj) in w[1].iter().enumerate() {
                acc += wi * wj * self.value(base[0] + i, base[1] + j);
            }
        }
        acc
    }

    /// Prices for several strikes at one spot pair by a local polynomial fit
    /// of `K * panel` along the diagonal through the spot pair.
    ///
    /// The spot pair must sit on the diagonal: `log(S1 / S2)` has to match
    /// `center[0] - center[1]` up to a whole number of lattice steps along
    /// the diagonal offset.
    pub fn interpolate_strikes(&self, s1: f64, s2: f64, strikes: &[f64], degree: usize) -> Result<Vec<f64>> {
        if degree == 0 {
            return Err(SpreadError::InvalidParameter("degree must be positive".into()));
        }
        check_spots(s1, s2, 1.0)?;
        let es = self.lattice.eta_star();
        let (x1, x2) = (s1.ln(), s2.ln());
        // Node index offset between the two axes.
        let off = ((x1 - self.center[0]) - (x2 - self.center[1])) / es;
        if (off - off.round()).abs() > 1e-9 {
            return Err(SpreadError::InvalidParameter(format!(
                "spots ({s1}, {s2}) do not share a panel diagonal"
            )));
        }
        let off = off.round() as i64;
        let (lo, hi) = self.trusted_range();
        // Diagonal nodes (l1, l1 - off), ordered by increasing strike.
        let mut nodes: Vec<(f64, f64)> = Vec::new();
        for l1 in (lo..=hi).rev() {
            let l2 = l1 as i64 - off;
            if l2 < lo as i64 || l2 > hi as i64 {
                continue;
            }
            let k = (x1 - self.center[0] - self.lattice.x(l1)).exp();
            nodes.push((k, k * self.value(l1, l2 as usize)));
        }
        if nodes.len() < degree + 1 {
            return Err(SpreadError::InvalidParameter(format!(
                "diagonal has {} trusted nodes, degree {degree} needs {}",
                nodes.len(),
                degree + 1
            )));
        }
        let (kmin, kmax) = (nodes[0].0, nodes[nodes.len() - 1].0);
        strikes
            .iter()
            .map(|&k| {
                if !(k >= kmin * (1.0 - 1e-12) && k <= kmax * (1.0 + 1e-12)) {
                    return Err(SpreadError::Extrapolation {
                        strike: k,
                        lo: kmin,
                        hi: kmax,
                    });
                }
                // Window of degree + 1 nodes nearest to k in log-strike.
                let pos = nodes.partition_point(|n| n.0 < k);
                let start = pos
                    .saturating_sub(degree.div_ceil(2))
                    .min(nodes.len() - degree - 1);
                let window = &nodes[start..start + degree + 1];
                Ok(lagrange(window, k))
            })
            .collect()
    }

    /// CSV with absolute log-prices of asset 2 across the header and of
    /// asset 1 down the first column.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let n = self.n();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x1\\x2".to_string()];
        header.extend((0..n).map(|l| fmt(self.center[1] + self.lattice.x(l))));
        w.write_record(&header).map_err(io_err)?;
        for l1 in 0..n {
            let mut row = vec![fmt(self.center[0] + self.lattice.x(l1))];
            row.extend((0..n).map(|l2| fmt(self.value(l1, l2))));
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| SpreadError::InvalidParameter(e.to_string()))
    }

    /// Values from a CSV written by [`PricePanel::write_csv`], row-major.
    pub fn read_csv_values<R: std::io::Read>(input: R) -> Result<Vec<f64>> {
        let mut r = csv::Reader::from_reader(input);
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io_err)?;
            for field in rec.iter().skip(1) {
                values.push(field.parse::<f64>().map_err(|e| {
                    SpreadError::InvalidParameter(format!("bad number '{field}': {e}"))
                })?);
            }
        }
        Ok(values)
    }

    /// Little-endian dump: magic, dimension count, `n`, `eta`, shifts,
    /// centre, rate, maturity, then the row-major values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(8 + 4 + 8 * (8 + self.values.len()));
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&2u32.to_le_bytes());
        b.extend_from_slice(&(self.n() as u64).to_le_bytes());
        for v in [
            self.lattice.eta(),
            self.eps.eps1,
            self.eps.eps2,
            self.center[0],
            self.center[1],
            self.rate,
            self.maturity,
        ] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |what: &str| SpreadError::InvalidParameter(format!("panel dump: {what}"));
        if bytes.len() < 76 || &bytes[..8] != MAGIC {
            return Err(bad("missing header"));
        }
        let dims = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if dims != 2 {
            return Err(bad("expected two dimensions"));
        }
        let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let f = |i: usize| f64::from_le_bytes(bytes[20 + 8 * i..28 + 8 * i].try_into().unwrap());
        let body = &bytes[76..];
        if body.len() != 8 * n * n {
            return Err(bad("truncated values"));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(PricePanel {
            values,
            lattice: Lattice::from_spacing(n, f(0))?,
            eps: EpsilonShift2 {
                eps1: f(1),
                eps2: f(2),
            },
            center: [f(3), f(4)],
            model: String::new(),
            rate: f(5),
            maturity: f(6),
            trust: DEFAULT_TRUST,
            max_residue: 0.0,
        })
    }
}

pub(crate) fn trusted_half_width(trust: f64, lattice: &Lattice, shifts: &[f64]) -> f64 {
    let total: f64 = shifts.iter().map(|e| e.abs()).sum();
    (trust * lattice.x_bar()).min(MAX_AMPLIFICATION.ln() / total)
}

const MAGIC: &[u8; 8] = b"SPRDFFT1";

fn io_err(e: csv::Error) -> SpreadError {
    SpreadError::InvalidParameter(format!("csv: {e}"))
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn check_spots(s1: f64, s2: f64, k: f64) -> Result<()> {
    for (name, v) in [("S1", s1), ("S2", s2), ("K", k)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(SpreadError::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    Ok(())
}

fn cubic_weights(t: f64) -> [f64; 4] {
    // Nodes at -1, 0, 1, 2.
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

fn lagrange(nodes: &[(f64, f64)], x: f64) -> f64 {
    if let Some(hit) = nodes.iter().find(|n| n.0 == x) {
        return hit.1;
    }
    let mut acc = 0.0;
    for (i, (xi, yi)) in nodes.iter().enumerate() {
        let mut w = 1.0;
        for (j, (xj, _)) in nodes.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += w * yi;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_weights_reproduce_cubics() {
        for t in [0.0, 0.25, 0.5, 0.9] {
            let w = cubic_weights(t);
            let f = |x: f64| 2.0 * x * x * x - x * x + 3.0 * x - 1.0;
            let got: f64 = w.iter().zip([-1.0, 0.0, 1.0, 2.0]).map(|(w, x)| w * f(x)).sum();
            assert!((got - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn lagrange_is_exact_on_polynomials() {
        let nodes: Vec<(f64, f64)> = (0..9).map(|i| {
            let x = 1.0 + 0.1 * i as f64;
            (x, x.powi(8) - 3.0 * x)
        }).collect();
        let x = 1.234;
        assert!((lagrange(&nodes, x) - (x.powi(8) - 3.0 * x)).abs() < 1e-11);
    }
}
