use std::time::Instant;

use spread_fft::oracles::{err_objective, gbm_benchmark, mc_basket_prices, mc_prices, panel_prices, standard_grid};
use spread_fft::pricer::{fd_greek_gbm, greek_panel_for, price_at, price_basket_panel, price_panel, price_strikes};
use spread_fft::{Greek, Lattice, Model, Result, SpreadError};

use crate::config::{reference_model, Method, RunConfig};
use crate::output::{Cell, Table};

pub fn price(cfg: &RunConfig) -> Result<Table> {
    let lattice = cfg.lattice()?;
    let [s1, s2] = cfg.spots;
    let (fft, path) = match cfg.price.method {
        Method::Direct => (
            cfg.strikes
                .iter()
                .map(|&k| price_at(&cfg.model, s1, s2, k, &lattice, &cfg.eps))
                .collect::<Result<Vec<_>>>()?,
            "node",
        ),
        Method::Interp => (
            price_strikes(&cfg.model, s1, s2, &cfg.strikes, &lattice, &cfg.eps, cfg.price.degree)?,
            "diagonal-fit",
        ),
    };
    let mut cols = vec!["s1", "s2", "k", "price", "path"];
    let sim = if cfg.price.mc {
        cols.extend(["mc_price", "mc_std_error"]);
        Some(mc_prices(&cfg.model, s1, s2, &cfg.strikes, &cfg.mc_config())?)
    } else {
        None
    };
    let mut t = Table::new(&cols);
    for (i, (&k, &v)) in cfg.strikes.iter().zip(&fft).enumerate() {
        let mut row: Vec<Cell> = vec![s1.into(), s2.into(), k.into(), v.into(), path.into()];
        if let Some(m) = &sim {
            row.extend([m[i].price.into(), m[i].std_error.into()]);
        }
        t.push(row);
    }
    Ok(t)
}

/// FFT and finite-difference rows per strike, one column per Greek.
pub fn greeks(cfg: &RunConfig) -> Result<Table> {
    let lattice = cfg.lattice()?;
    let [s1, s2] = cfg.spots;
    let mut cols = vec!["k", "method"];
    cols.extend(Greek::ALL.iter().map(|g| g.label()));
    let mut t = Table::new(&cols);
    for &k in &cfg.strikes {
        let center = [(s1 / k).ln(), (s2 / k).ln()];
        let mut fft: Vec<Cell> = vec![k.into(), "fft".into()];
        for g in Greek::ALL {
            fft.push(greek_panel_for(&cfg.model, &lattice, &cfg.eps, g, center)?.at(s1, s2, k)?.into());
        }
        let p = cfg.model.as_gbm().ok_or_else(|| SpreadError::UnsupportedGreek {
            greek: "finite difference".into(),
            model: model_name(&cfg.model).into(),
        })?;
        let mut fd: Vec<Cell> = vec![k.into(), "fd".into()];
        for g in Greek::ALL {
            fd.push(fd_greek_gbm(p, g, cfg.spots, k, &lattice, &cfg.eps, cfg.greeks.fd_rel)?.into());
        }
        t.push(fft);
        t.push(fd);
    }
    Ok(t)
}

fn model_name(m: &Model) -> &'static str {
    use spread_fft::CharModel;
    m.name()
}

/// Err over the standard grid for every `(N, u_bar)` cell. Cells where the
/// objective is undefined keep an empty `err` and the reason in `note`.
pub fn err_study(cfg: &RunConfig) -> Result<Table> {
    let grid = standard_grid();
    let (bench, source) = match cfg.model.as_gbm() {
        Some(p) => (
            grid.iter()
                .map(|x| gbm_benchmark(p, x[0].exp(), x[1].exp(), 1.0))
                .collect::<Result<Vec<_>>>()?,
            "quadrature",
        ),
        None => {
            let mc = cfg.mc_config();
            let mut v = Vec::with_capacity(grid.len());
            for x in &grid {
                v.push(mc_prices(&cfg.model, x[0].exp(), x[1].exp(), &[1.0], &mc)?[0].price);
            }
            (v, "monte-carlo")
        }
    };
    let mut t = Table::new(&["model", "N", "u_bar", "err", "benchmark", "note"]);
    for &u_bar in &cfg.err_study.u_bar {
        for &n in &cfg.err_study.n {
            let lattice = Lattice::new(n, u_bar)?;
            let cell = panel_prices(&cfg.model, &lattice, &cfg.eps, &grid)
                .and_then(|m| err_objective(&grid, &m, &bench));
            let (err, note) = match cell {
                Ok(r) => (r.err, String::new()),
                Err(e @ SpreadError::Domain(_)) => (f64::NAN, e.to_string()),
                Err(e) => return Err(e),
            };
            t.push(vec![
                model_name(&cfg.model).into(),
                n.into(),
                u_bar.into(),
                if err.is_nan() { "".into() } else { err.into() },
                source.into(),
                note.into(),
            ]);
        }
    }
    Ok(t)
}

/// Median and minimum wall time of one panel per `(model, N)`.
pub fn bench(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["model", "N", "u_bar", "reps", "median_s", "min_s"]);
    for name in &cfg.bench.models {
        let model = if name.eq_ignore_ascii_case(model_name(&cfg.model)) {
            cfg.model.clone()
        } else {
            reference_model(name)?
        };
        for &n in &cfg.bench.n {
            let lattice = Lattice::new(n, cfg.lattice.u_bar)?;
            let mut times = Vec::with_capacity(cfg.bench.reps);
            for _ in 0..cfg.bench.reps {
                let start = Instant::now();
                price_panel(&model, &lattice, &cfg.eps, [0.0, 0.0])?;
                times.push(start.elapsed().as_secs_f64());
            }
            times.sort_by(f64::total_cmp);
            t.push(vec![
                model_name(&model).into(),
                n.into(),
                cfg.lattice.u_bar.into(),
                cfg.bench.reps.into(),
                times[times.len() / 2].into(),
                times[0].into(),
            ]);
        }
    }
    Ok(t)
}

pub fn basket(cfg: &RunConfig) -> Result<Table> {
    let lattice = cfg.lattice()?;
    let b = &cfg.basket;
    let eps = cfg.basket_eps()?;
    let mut cols = vec!["k", "price"];
    let sim = if b.mc {
        cols.extend(["mc_price", "mc_std_error"]);
        Some(mc_basket_prices(&b.model, &b.spots, &cfg.strikes, &cfg.mc_config())?)
    } else {
        None
    };
    let mut t = Table::new(&cols);
    for (i, &k) in cfg.strikes.iter().enumerate() {
        let center: Vec<f64> = b.spots.iter().map(|s| (s / k).ln()).collect();
        let v = k * price_basket_panel(&b.model, &lattice, &eps, &center)?.center_value();
        let mut row: Vec<Cell> = vec![k.into(), v.into()];
        if let Some(m) = &sim {
            row.extend([m[i].price.into(), m[i].std_error.into()]);
        }
        t.push(row);
    }
    Ok(t)
}
