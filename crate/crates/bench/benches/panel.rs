use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spread_fft::oracles::{mc_price, McConfig};
use spread_fft::pricer::{greek_at, price_basket_panel, price_panel};
use spread_fft::{EpsilonShift2, EpsilonShiftM, GbmBasketParams, GbmParams, Greek, Lattice, Model, SvParams, VgParams};

fn panels(c: &mut Criterion) {
    let eps = EpsilonShift2::default();
    let models = [
        Model::Gbm(GbmParams::reference()),
        Model::Sv(SvParams::reference()),
        Model::Vg(VgParams::reference()),
    ];
    let mut g = c.benchmark_group("panel");
    g.sample_size(10);
    for n in [256, 1024, 2048] {
        let lattice = Lattice::new(n, 40.0).unwrap();
        for m in &models {
            let name = match m {
                Model::Gbm(_) => "gbm",
                Model::Sv(_) => "sv",
                Model::Vg(_) => "vg",
            };
            g.bench_with_input(BenchmarkId::new(name, n), &lattice, |b, l| {
                b.iter(|| price_panel(m, l, &eps, [0.0, 0.0]).unwrap())
            });
        }
    }
    g.finish();
}

fn greeks(c: &mut Criterion) {
    let p = GbmParams::reference();
    let lattice = Lattice::new(1024, 40.0).unwrap();
    let eps = EpsilonShift2::default();
    c.bench_function("vega1_n1024", |b| {
        b.iter(|| greek_at(&p, Greek::Vega1, 100.0, 96.0, 4.0, &lattice, &eps).unwrap())
    });
}

fn basket(c: &mut Criterion) {
    let b3 = GbmBasketParams::uniform(0.1, 1.0, vec![0.2, 0.1, 0.1], 0.5, vec![0.0; 3]);
    let eps = EpsilonShiftM::new(vec![1.0, 1.0], -4.0).unwrap();
    let lattice = Lattice::new(128, 40.0).unwrap();
    let x = [200f64.ln(), 96f64.ln(), 96f64.ln()];
    let mut g = c.benchmark_group("basket");
    g.sample_size(10);
    g.bench_function("m2_n128", |b| {
        b.iter(|| price_basket_panel(&b3, &lattice, &eps, &x).unwrap())
    });
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let m = Model::Vg(VgParams::reference());
    let cfg = McConfig {
        n_paths: 100_000,
        ..McConfig::default()
    };
    let mut g = c.benchmark_group("mc");
    g.sample_size(10);
    g.bench_function("vg_1e5", |b| b.iter(|| mc_price(&m, 100.0, 96.0, 2.0, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, panels, greeks, basket, monte_carlo);
criterion_main!(benches);
