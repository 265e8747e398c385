//! Hybrid analog/digital precoding and combining.
//!
//! Pipeline per trial: DFT-codebook combiner selection at every user,
//! phase-aligned analog precoder at the base station, block diagonalization
//! of the resulting baseband channels, then interference-constrained power
//! allocation over the K·D streams.

use crate::analog::{build_analog_precoder, build_codebook, select_analog_combiner};
use crate::config::HybridConfig;
use crate::digital::{bd_design, effective_channels, BdSolution, EffectiveChannelSet};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::power::{interference_gains, optimal_power_allocation, StreamGains};

use super::{Scheme, SchemeResult, TrialContext};

/// Every matrix produced by one hybrid design.
#[derive(Debug, Clone)]
pub struct PrecodingSolution {
    /// F, N_t×K·M_r with entries of magnitude 1/√N_t.
    pub analog_precoder: ComplexMatrix,
    /// W_k, each N_r×M_r.
    pub analog_combiners: Vec<ComplexMatrix>,
    pub combiner_indices: Vec<Vec<usize>>,
    pub effective: EffectiveChannelSet,
    pub digital: BdSolution,
    /// γ_{k,d} toward the primary user.
    pub gamma: Vec<Vec<f64>>,
}

impl PrecodingSolution {
    /// σ² scaled by the noise variance, paired with γ.
    pub fn stream_gains(&self, noise_var: f64) -> Result<StreamGains> {
        let sigma_sq = self
            .digital
            .sigma_sq()
            .into_iter()
            .map(|row| row.into_iter().map(|s| s / noise_var).collect())
            .collect();
        StreamGains::new(sigma_sq, self.gamma.clone())
    }
}

pub fn design_adpc(
    config: &HybridConfig,
    channels: &[ComplexMatrix],
    primary: &ComplexMatrix,
) -> Result<PrecodingSolution> {
    if channels.len() != config.users {
        return Err(Error::InvalidDimension(format!(
            "{} channels for {} users",
            channels.len(),
            config.users
        )));
    }
    let codebook = build_codebook(config.n_rx, config.spacing_ratio)?;
    let mut combiners = Vec::with_capacity(channels.len());
    let mut indices = Vec::with_capacity(channels.len());
    for h in channels {
        let sel = select_analog_combiner(h, config.rf_rx, &codebook)?;
        combiners.push(sel.combiner);
        indices.push(sel.chosen_indices);
    }
    let f = build_analog_precoder(&combiners, channels)?;
    let effective = effective_channels(channels, &f, &combiners)?;
    let digital = bd_design(&effective, config.streams)?;
    let gamma = interference_gains(&digital.precoders, &f, primary)?;
    Ok(PrecodingSolution {
        analog_precoder: f,
        analog_combiners: combiners,
        combiner_indices: indices,
        effective,
        digital,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Adpc;

impl Scheme for Adpc {
    fn id(&self) -> &'static str {
        "adpc"
    }

    fn validate(&self, config: &HybridConfig) -> Result<()> {
        config.validate_hybrid()
    }

    fn run(&self, ctx: &TrialContext, i_th: f64) -> Result<SchemeResult> {
        let cfg = &ctx.config;
        let sol = design_adpc(cfg, &ctx.channels, &ctx.primary)?;
        let alloc = optimal_power_allocation(&sol.stream_gains(cfg.noise_var)?, i_th, cfg.power_cap)?;
        Ok(SchemeResult {
            scheme_id: self.id().to_string(),
            sum_rate: alloc.sum_rate,
            total_interference: alloc.total_interference,
            feasible: true,
            discard_reason: None,
            cap_active: alloc.cap_active,
        })
    }
}
