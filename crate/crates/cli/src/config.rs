use serde::{Deserialize, Serialize};
use spread_fft::oracles::McConfig;
use spread_fft::{
    CharModel, EpsilonShift2, EpsilonShiftM, GbmBasketParams, GbmParams, Lattice, Model, Result, SpreadError,
    SvParams, VgParams,
};

/// Everything a run needs, after the config file and flags are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: Model,
    pub lattice: LatticeConfig,
    pub eps: EpsilonShift2,
    pub spots: [f64; 2],
    pub strikes: Vec<f64>,
    pub seed: u64,
    pub price: PriceOptions,
    pub mc: McOptions,
    pub greeks: GreekOptions,
    pub err_study: ErrStudyOptions,
    pub bench: BenchOptions,
    pub basket: BasketOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Gbm(GbmParams::reference()),
            lattice: LatticeConfig::default(),
            eps: EpsilonShift2::default(),
            spots: [100.0, 96.0],
            strikes: Vec::new(),
            seed: 1,
            price: PriceOptions::default(),
            mc: McOptions::default(),
            greeks: GreekOptions::default(),
            err_study: ErrStudyOptions::default(),
            bench: BenchOptions::default(),
            basket: BasketOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub u_bar: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig { n: 256, u_bar: 40.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// One panel per strike, read at its centre node.
    Direct,
    /// One panel for all strikes, polynomial fit along the diagonal.
    Interp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriceOptions {
    pub method: Method,
    pub degree: usize,
    /// Add a Monte Carlo column next to each FFT price.
    pub mc: bool,
}

impl Default for PriceOptions {
    fn default() -> Self {
        PriceOptions {
            method: Method::Direct,
            degree: 8,
            mc: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McOptions {
    pub n_paths: u64,
    pub n_steps: usize,
    pub antithetic: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        let d = McConfig::default();
        McOptions {
            n_paths: d.n_paths,
            n_steps: d.n_steps,
            antithetic: d.antithetic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreekOptions {
    /// Relative bump for the finite-difference row.
    pub fd_rel: f64,
}

impl Default for GreekOptions {
    fn default() -> Self {
        GreekOptions { fd_rel: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrStudyOptions {
    #[serde(rename = "N", alias = "n")]
    pub n: Vec<usize>,
    pub u_bar: Vec<f64>,
}

impl Default for ErrStudyOptions {
    fn default() -> Self {
        ErrStudyOptions {
            n: vec![64, 128, 256, 512, 1024],
            u_bar: vec![20.0, 40.0, 80.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchOptions {
    pub models: Vec<String>,
    #[serde(rename = "N", alias = "n")]
    pub n: Vec<usize>,
    pub reps: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            models: vec!["gbm".into(), "sv".into(), "vg".into()],
            n: vec![64, 256, 1024, 2048],
            reps: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasketOptions {
    pub model: GbmBasketParams,
    /// Long asset first.
    pub spots: Vec<f64>,
    pub eps: Vec<f64>,
    pub eps_tilde: f64,
    pub mc: bool,
}

impl Default for BasketOptions {
    fn default() -> Self {
        BasketOptions {
            model: GbmBasketParams::uniform(0.1, 1.0, vec![0.2, 0.1, 0.1], 0.5, vec![0.0; 3]),
            spots: vec![200.0, 96.0, 96.0],
            eps: vec![1.0, 1.0],
            eps_tilde: -4.0,
            mc: false,
        }
    }
}

/// Reference parameters for a model named on the command line.
pub fn reference_model(name: &str) -> Result<Model> {
    match name.to_ascii_lowercase().as_str() {
        "gbm" => Ok(Model::Gbm(GbmParams::reference())),
        "sv" => Ok(Model::Sv(SvParams::reference())),
        "vg" => Ok(Model::Vg(VgParams::reference())),
        other => Err(SpreadError::InvalidParameter(format!(
            "unknown model '{other}' (expected gbm, sv or vg)"
        ))),
    }
}

fn invalid(msg: impl Into<String>) -> SpreadError {
    SpreadError::InvalidParameter(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config file: {e}")))
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.n, self.lattice.u_bar)
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            n_paths: self.mc.n_paths,
            n_steps: self.mc.n_steps,
            seed: self.seed,
            antithetic: self.mc.antithetic,
        }
    }

    pub fn basket_eps(&self) -> Result<EpsilonShiftM> {
        EpsilonShiftM::new(self.basket.eps.clone(), self.basket.eps_tilde)
    }

    fn check_strikes(&self) -> Result<()> {
        if self.strikes.is_empty() {
            return Err(invalid("no strikes"));
        }
        if let Some(k) = self.strikes.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(invalid(format!("strike {k} must be positive")));
        }
        Ok(())
    }

    fn check_model(&self) -> Result<()> {
        self.model.validate()?;
        self.eps.validate()?;
        self.model.check_contour(&self.eps)?;
        if self.spots.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(invalid("spots must be positive"));
        }
        Ok(())
    }

    pub fn validate_price(&self) -> Result<()> {
        self.check_model()?;
        self.lattice()?;
        self.check_strikes()?;
        if self.price.mc {
            self.mc_config().validate()?;
        }
        Ok(())
    }

    pub fn validate_greeks(&self) -> Result<()> {
        self.validate_price()?;
        if !(self.greeks.fd_rel > 0.0 && self.greeks.fd_rel.is_finite()) {
            return Err(invalid(format!(
                "finite-difference displacement {} must be positive",
                self.greeks.fd_rel
            )));
        }
        Ok(())
    }

    pub fn validate_err_study(&self) -> Result<()> {
        self.check_model()?;
        if self.err_study.n.is_empty() || self.err_study.u_bar.is_empty() {
            return Err(invalid("err-study needs at least one N and one u_bar"));
        }
        for &n in &self.err_study.n {
            for &u in &self.err_study.u_bar {
                Lattice::new(n, u)?;
            }
        }
        if self.model.as_gbm().is_none() {
            self.mc_config().validate()?;
        }
        Ok(())
    }

    pub fn validate_bench(&self) -> Result<()> {
        if self.bench.reps == 0 {
            return Err(invalid("bench needs at least one repetition"));
        }
        if self.bench.models.is_empty() || self.bench.n.is_empty() {
            return Err(invalid("bench needs at least one model and one N"));
        }
        for m in &self.bench.models {
            reference_model(m)?;
        }
        for &n in &self.bench.n {
            Lattice::new(n, self.lattice.u_bar)?;
        }
        self.eps.validate()
    }

    pub fn validate_basket(&self) -> Result<()> {
        let b = &self.basket;
        b.model.validate()?;
        self.basket_eps()?;
        self.lattice()?;
        self.check_strikes()?;
        if b.spots.len() != b.model.dim() || b.spots.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(invalid(format!("basket needs {} positive spots", b.model.dim())));
        }
        if b.eps.len() + 1 != b.model.dim() {
            return Err(invalid(format!(
                "basket has {} short legs but {} shifts",
                b.model.dim() - 1,
                b.eps.len()
            )));
        }
        if b.mc {
            self.mc_config().validate()?;
        }
        Ok(())
    }
}
