//! Precoding schemes behind a common trait, looked up by name at runtime.
//!
//! A [`Scheme`] turns one channel realization ([`TrialContext`]) and an
//! interference budget into a [`SchemeResult`]. The hybrid analog/digital
//! scheme lives in [`adpc`]; comparison schemes live in
//! [`crate::baselines`]. [`SchemeRegistry::builtin`] registers all of them.

pub mod adpc;

use std::sync::Arc;

use crate::channel::{trial_rng, ChannelModel, PRIMARY_STREAM};
use crate::config::HybridConfig;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub use adpc::{design_adpc, Adpc, PrecodingSolution};

/// Everything a scheme may look at for one Monte-Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub config: HybridConfig,
    /// H_k, each N_r×N_t.
    pub channels: Vec<ComplexMatrix>,
    /// G_0, N_r0×N_t.
    pub primary: ComplexMatrix,
    pub master_seed: u64,
    pub trial: u64,
}

impl TrialContext {
    /// Draws the K secondary channels and the primary channel of one trial.
    /// User `k` always uses RNG stream `k`, so user channels are shared
    /// between sweep points that differ only in the number of users.
    pub fn draw(
        config: &HybridConfig,
        model: ChannelModel,
        master_seed: u64,
        trial: u64,
    ) -> Result<Self> {
        let draw_one = |stream: u64, n_rx: usize| {
            let mut rng = trial_rng(master_seed, trial, stream);
            model.draw(
                &mut rng,
                n_rx,
                config.n_tx,
                config.paths,
                config.path_gain_var,
                config.spacing_ratio,
            )
        };
        let channels = (0..config.users)
            .map(|k| draw_one(k as u64, config.n_rx))
            .collect::<Result<Vec<_>>>()?;
        let primary = draw_one(PRIMARY_STREAM, config.n_rx_primary)?;
        Ok(Self {
            config: config.clone(),
            channels,
            primary,
            master_seed,
            trial,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme_id: String,
    /// bits/s/Hz.
    pub sum_rate: f64,
    /// Linear interference power at the primary user.
    pub total_interference: f64,
    pub feasible: bool,
    pub discard_reason: Option<String>,
    /// A per-stream power cap was reached, so the budget may not bind.
    pub cap_active: bool,
}

impl SchemeResult {
    pub fn discarded(scheme_id: &str, reason: impl Into<String>) -> Self {
        Self {
            scheme_id: scheme_id.to_string(),
            sum_rate: 0.0,
            total_interference: 0.0,
            feasible: false,
            discard_reason: Some(reason.into()),
            cap_active: false,
        }
    }
}

pub trait Scheme: Send + Sync {
    /// Registry name, also written to the CSV `scheme` column.
    fn id(&self) -> &'static str;

    /// Scheme-specific configuration checks beyond [`HybridConfig::validate`].
    fn validate(&self, config: &HybridConfig) -> Result<()>;

    /// Runs the scheme on one channel realization with budget `i_th` (linear).
    fn run(&self, ctx: &TrialContext, i_th: f64) -> Result<SchemeResult>;
}

#[derive(Clone, Default)]
pub struct SchemeRegistry {
    entries: Vec<Arc<dyn Scheme>>,
}

impl std::fmt::Debug for SchemeRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl SchemeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The hybrid scheme plus the three comparison schemes.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Adpc));
        r.register(Arc::new(crate::baselines::FullDigitalBd));
        r.register(Arc::new(crate::baselines::RightSingular));
        r.register(Arc::new(crate::baselines::Blind));
        r
    }

    /// Adds a scheme, replacing any existing one with the same id.
    pub fn register(&mut self, scheme: Arc<dyn Scheme>) {
        self.entries.retain(|s| s.id() != scheme.id());
        self.entries.push(scheme);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Scheme>> {
        self.entries.iter().find(|s| s.id() == name).cloned()
    }

    pub fn resolve(&self, names: &[String]) -> Result<Vec<Arc<dyn Scheme>>> {
        names
            .iter()
            .map(|n| self.get(n).ok_or_else(|| Error::UnknownScheme(n.clone())))
            .collect()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.id()).collect()
    }
}

/// Looks a built-in scheme up by name.
pub fn scheme_by_name(name: &str) -> Result<Arc<dyn Scheme>> {
    SchemeRegistry::builtin()
        .get(name)
        .ok_or_else(|| Error::UnknownScheme(name.to_string()))
}
