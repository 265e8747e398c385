//! Comparison schemes.
//!
//! Minimal reference designs to place the hybrid scheme against:
//!
//! - `fd_bd`: block diagonalization run directly on the raw N_r×N_t channels
//!   with one RF chain per antenna (no analog stage), using the whole
//!   interference null space of each user, then the same
//!   interference-constrained power allocation.
//! - `right_singular`: each user is served along the top right singular
//!   vectors of its own channel. Inter-user interference is not nulled and
//!   power allocation ignores it; rates are then evaluated with SINR.
//! - `blind`: random constant-modulus precoders with no channel knowledge,
//!   equal power per stream scaled so the primary user sees exactly the
//!   budget, matched-filter combining and SINR rates.
//!
//! The non-nulling schemes compute `log2(1 + S/(N_0 + I))` per stream,
//! treating residual interference as Gaussian noise.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{trial_rng, BLIND_PRECODER_STREAM};
use crate::config::HybridConfig;
use crate::digital::{bd_design, EffectiveChannelSet};
use crate::error::{Error, Result};
use crate::linalg::{identity, svd, ComplexMatrix};
use crate::power::{interference_gains, optimal_power_allocation, StreamGains};
use crate::scheme::{Scheme, SchemeResult, TrialContext};

fn result(id: &str, sum_rate: f64, total_interference: f64, cap_active: bool) -> SchemeResult {
    SchemeResult {
        scheme_id: id.to_string(),
        sum_rate,
        total_interference,
        feasible: true,
        discard_reason: None,
        cap_active,
    }
}

fn scaled(values: Vec<Vec<f64>>, noise_var: f64) -> Vec<Vec<f64>> {
    values
        .into_iter()
        .map(|row| row.into_iter().map(|v| v / noise_var).collect())
        .collect()
}

/// Block diagonalization on the raw channels, `F = I`, `W_k = I`.
pub fn full_digital_bd(
    channels: &[ComplexMatrix],
    primary: &ComplexMatrix,
    streams: usize,
    i_th: f64,
    noise_var: f64,
    power_cap: f64,
) -> Result<SchemeResult> {
    let eff = EffectiveChannelSet::new(channels.to_vec())?;
    let sol = bd_design(&eff, streams)?;
    let gamma = interference_gains(&sol.precoders, &identity(eff.rf_tx(), eff.rf_tx()), primary)?;
    let gains = StreamGains::new(scaled(sol.sigma_sq(), noise_var), gamma)?;
    let alloc = optimal_power_allocation(&gains, i_th, power_cap)?;
    Ok(result("fd_bd", alloc.sum_rate, alloc.total_interference, alloc.cap_active))
}

/// Per-stream rate `log2(1 + P|u^H H v|² / (N_0 + Σ_other P'|u^H H v'|²))`.
///
/// `precoders[k]` holds user k's unit-norm stream directions (N_t×D),
/// `combiners[k]` its receive vectors (N_r×D), `powers[k][d]` the stream powers.
/// Every stream except the one being decoded counts as interference.
pub fn sinr_sum_rate(
    channels: &[ComplexMatrix],
    precoders: &[ComplexMatrix],
    combiners: &[ComplexMatrix],
    powers: &[Vec<f64>],
    noise_var: f64,
) -> f64 {
    let mut total = 0.0;
    for (k, h) in channels.iter().enumerate() {
        // Row (d), column (j, e): u_{k,d}^H H_k v_{j,e}.
        let projected: Vec<ComplexMatrix> = precoders
            .iter()
            .map(|v| combiners[k].adjoint() * h * v)
            .collect();
        for d in 0..combiners[k].ncols() {
            let mut signal = 0.0;
            let mut interference = 0.0;
            for (j, block) in projected.iter().enumerate() {
                for e in 0..block.ncols() {
                    let p = powers[j][e] * block[(d, e)].norm_sqr();
                    if j == k && e == d {
                        signal = p;
                    } else {
                        interference += p;
                    }
                }
            }
            total += (1.0 + signal / (noise_var + interference)).log2();
        }
    }
    total
}

/// Top-D singular directions of each user's own channel, ignoring other users.
pub fn right_singular_precoding(
    channels: &[ComplexMatrix],
    primary: &ComplexMatrix,
    streams: usize,
    i_th: f64,
    noise_var: f64,
    power_cap: f64,
) -> Result<SchemeResult> {
    let mut precoders = Vec::with_capacity(channels.len());
    let mut combiners = Vec::with_capacity(channels.len());
    let mut sigma_sq = Vec::with_capacity(channels.len());
    for h in channels {
        if streams == 0 || streams > h.nrows().min(h.ncols()) {
            return Err(Error::InvalidDimension(format!(
                "need 1 ≤ D ≤ min(N_r, N_t), got D = {streams} for a {}x{} channel",
                h.nrows(),
                h.ncols()
            )));
        }
        let dec = svd(h)?;
        precoders.push(dec.v.columns(0, streams).into_owned());
        combiners.push(dec.u.columns(0, streams).into_owned());
        sigma_sq.push(
            dec.singular_values[..streams]
                .iter()
                .map(|s| s * s / noise_var)
                .collect(),
        );
    }
    let n_tx = channels.first().map_or(0, |h| h.ncols());
    let gamma = interference_gains(&precoders, &identity(n_tx, n_tx), primary)?;
    let alloc = optimal_power_allocation(&StreamGains::new(sigma_sq, gamma)?, i_th, power_cap)?;
    let rate = sinr_sum_rate(channels, &precoders, &combiners, &alloc.powers, noise_var);
    Ok(result(
        "right_singular",
        rate,
        alloc.total_interference,
        alloc.cap_active,
    ))
}

/// Random phase-only precoder, N_t×(K·D), entries `e^{jφ}/√N_t`.
pub fn random_phase_precoder<R: Rng + ?Sized>(rng: &mut R, n_tx: usize, columns: usize) -> ComplexMatrix {
    let scale = 1.0 / (n_tx as f64).sqrt();
    // Column-major fill order is part of the determinism contract.
    ComplexMatrix::from_fn(n_tx, columns, |_, _| {
        Complex64::from_polar(scale, rng.random_range(0.0..2.0 * std::f64::consts::PI))
    })
}

/// Uncoordinated transmission with equal power per stream.
pub fn blind_transmission<R: Rng + ?Sized>(
    channels: &[ComplexMatrix],
    primary: &ComplexMatrix,
    streams: usize,
    i_th: f64,
    noise_var: f64,
    power_cap: f64,
    rng: &mut R,
) -> Result<SchemeResult> {
    let users = channels.len();
    let n_tx = primary.ncols();
    if channels.iter().any(|h| h.ncols() != n_tx) {
        return Err(Error::InvalidDimension(
            "secondary and primary channels disagree on N_t".into(),
        ));
    }
    let all = random_phase_precoder(rng, n_tx, users * streams);
    let precoders: Vec<ComplexMatrix> = (0..users)
        .map(|k| all.columns(k * streams, streams).into_owned())
        .collect();
    let gamma = interference_gains(&precoders, &identity(n_tx, n_tx), primary)?;
    let gamma_total: f64 = gamma.iter().flatten().sum();
    let (power, cap_active) = if gamma_total > 0.0 {
        let p = i_th / gamma_total;
        if p > power_cap {
            (power_cap, true)
        } else {
            (p, false)
        }
    } else {
        (power_cap, true)
    };
    let powers = vec![vec![power; streams]; users];
    // Matched filter per stream: u = H_k f / ‖H_k f‖.
    let combiners: Vec<ComplexMatrix> = channels
        .iter()
        .zip(&precoders)
        .map(|(h, f)| {
            let mut u = h * f;
            for mut col in u.column_iter_mut() {
                let n = col.norm();
                if n > 0.0 {
                    col /= Complex64::new(n, 0.0);
                }
            }
            u
        })
        .collect();
    let rate = sinr_sum_rate(channels, &precoders, &combiners, &powers, noise_var);
    let total = crate::power::total_interference(&powers, &gamma);
    Ok(result("blind", rate, total, cap_active))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FullDigitalBd;

impl Scheme for FullDigitalBd {
    fn id(&self) -> &'static str {
        "fd_bd"
    }

    fn validate(&self, config: &HybridConfig) -> Result<()> {
        config.validate()?;
        if config.total_streams() > config.n_tx {
            return Err(Error::Constraint(format!(
                "K·D ≤ N_t fails for fd_bd: K·D = {}, N_t = {}",
                config.total_streams(),
                config.n_tx
            )));
        }
        Ok(())
    }

    fn run(&self, ctx: &TrialContext, i_th: f64) -> Result<SchemeResult> {
        let c = &ctx.config;
        full_digital_bd(&ctx.channels, &ctx.primary, c.streams, i_th, c.noise_var, c.power_cap)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RightSingular;

impl Scheme for RightSingular {
    fn id(&self) -> &'static str {
        "right_singular"
    }

    fn validate(&self, config: &HybridConfig) -> Result<()> {
        config.validate()
    }

    fn run(&self, ctx: &TrialContext, i_th: f64) -> Result<SchemeResult> {
        let c = &ctx.config;
        right_singular_precoding(&ctx.channels, &ctx.primary, c.streams, i_th, c.noise_var, c.power_cap)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Blind;

impl Scheme for Blind {
    fn id(&self) -> &'static str {
        "blind"
    }

    fn validate(&self, config: &HybridConfig) -> Result<()> {
        config.validate()
    }

    fn run(&self, ctx: &TrialContext, i_th: f64) -> Result<SchemeResult> {
        let c = &ctx.config;
        let mut rng = trial_rng(ctx.master_seed, ctx.trial, BLIND_PRECODER_STREAM);
        blind_transmission(
            &ctx.channels,
            &ctx.primary,
            c.streams,
            i_th,
            c.noise_var,
            c.power_cap,
            &mut rng,
        )
    }
}
