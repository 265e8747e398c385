//! Channel generation: ULA steering vectors, the sparse geometric mmWave
//! model and i.i.d. Rayleigh fading.
//!
//! All randomness flows through explicit RNG handles. [`trial_rng`] derives
//! an independent ChaCha stream from `(master_seed, trial, stream)` so that a
//! trial draws identical channels no matter which thread runs it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Stream id of the base-station → primary-user channel.
pub const PRIMARY_STREAM: u64 = u64::MAX;
/// Stream id of the random precoder used by blind transmission.
pub const BLIND_PRECODER_STREAM: u64 = u64::MAX - 1;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable 64-bit mix of `(master_seed, trial, stream)`.
pub fn trial_seed(master_seed: u64, trial: u64, stream: u64) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ splitmix64(trial ^ 0x5851_f42d_4c95_7f2d));
    splitmix64(h ^ splitmix64(stream ^ 0x1405_7b7e_f767_814f))
}

pub fn trial_rng(master_seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial, stream))
}

/// Sample from CN(0, var): real and imaginary parts each N(0, var/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// One realization of the path parameters of a geometric channel.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricChannelDraw {
    pub gains: Vec<Complex64>,
    /// Angles of arrival, radians in [0, 2π).
    pub aoa: Vec<f64>,
    /// Angles of departure, radians in [0, 2π).
    pub aod: Vec<f64>,
}

impl GeometricChannelDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, paths: usize, path_gain_var: f64) -> Self {
        let mut gains = Vec::with_capacity(paths);
        let mut aoa = Vec::with_capacity(paths);
        let mut aod = Vec::with_capacity(paths);
        for _ in 0..paths {
            gains.push(complex_gaussian(rng, path_gain_var));
            aoa.push(rng.random_range(0.0..2.0 * PI));
            aod.push(rng.random_range(0.0..2.0 * PI));
        }
        Self { gains, aoa, aod }
    }

    pub fn paths(&self) -> usize {
        self.gains.len()
    }
}

/// ULA response `exp(j·2π·d·m·sin(angle))/√n`, m = 0..n-1, as an n×1 matrix.
pub fn steering_vector(angle: f64, n: usize, spacing_ratio: f64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("steering vector needs n ≥ 1".into()));
    }
    if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spacing ratio must be > 0 (got {spacing_ratio})"
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * spacing_ratio * angle.sin();
    Ok(DMatrix::from_fn(n, 1, |m, _| {
        Complex64::from_polar(scale, step * m as f64)
    }))
}

/// `√(n_tx·n_rx/L)·Σ_l α_l a_r(θ_l) a_t(φ_l)^H`, an n_rx×n_tx matrix.
pub fn generate_mmwave_channel(
    draw: &GeometricChannelDraw,
    n_tx: usize,
    n_rx: usize,
    spacing_ratio: f64,
) -> Result<ComplexMatrix> {
    let paths = draw.paths();
    if paths == 0 {
        return Err(Error::InvalidParameter(
            "geometric channel needs at least one path".into(),
        ));
    }
    if draw.aoa.len() != paths || draw.aod.len() != paths {
        return Err(Error::InvalidParameter(
            "path gain and angle counts differ".into(),
        ));
    }
    let scale = ((n_tx * n_rx) as f64 / paths as f64).sqrt();
    let mut h = crate::linalg::zeros(n_rx, n_tx);
    for l in 0..paths {
        let ar = steering_vector(draw.aoa[l], n_rx, spacing_ratio)?;
        let at = steering_vector(draw.aod[l], n_tx, spacing_ratio)?;
        let g = draw.gains[l] * scale;
        for j in 0..n_tx {
            let t = at[(j, 0)].conj() * g;
            for i in 0..n_rx {
                h[(i, j)] += ar[(i, 0)] * t;
            }
        }
    }
    Ok(h)
}

/// i.i.d. CN(0, 1) entries.
pub fn generate_rayleigh_channel<R: Rng + ?Sized>(
    n_rx: usize,
    n_tx: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if n_rx == 0 || n_tx == 0 {
        return Err(Error::InvalidDimension(format!(
            "Rayleigh channel needs positive dimensions (got {n_rx}x{n_tx})"
        )));
    }
    // Column-major fill order is part of the determinism contract.
    Ok(DMatrix::from_fn(n_rx, n_tx, |_, _| complex_gaussian(rng, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    Geometric,
    Rayleigh,
}

impl ChannelModel {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Geometric => "geometric",
            ChannelModel::Rayleigh => "rayleigh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "geometric" | "mmwave" => Some(ChannelModel::Geometric),
            "rayleigh" => Some(ChannelModel::Rayleigh),
            _ => None,
        }
    }

    /// Draws one n_rx×n_tx channel from `rng`.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n_rx: usize,
        n_tx: usize,
        paths: usize,
        path_gain_var: f64,
        spacing_ratio: f64,
    ) -> Result<ComplexMatrix> {
        match self {
            ChannelModel::Geometric => {
                let draw = GeometricChannelDraw::sample(rng, paths, path_gain_var);
                generate_mmwave_channel(&draw, n_tx, n_rx, spacing_ratio)
            }
            ChannelModel::Rayleigh => generate_rayleigh_channel(n_rx, n_tx, rng),
        }
    }
}
