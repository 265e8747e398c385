//! Interference-constrained power allocation.
//!
//! Maximizes `Σ log2(1 + P_{k,d} σ²_{k,d})` subject to the interference
//! budget `Σ P_{k,d} γ_{k,d} ≤ I_th` at the primary user. The optimum is a
//! water-filling form `P = max(0, 1/(λγ) − 1/σ²)`; the multiplier λ is found
//! by bisection on the total interference, which is continuous and strictly
//! decreasing in λ over the active region. Once the active set is known, λ is
//! recomputed in closed form so the budget is met to rounding.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Streams with σ² below this are excluded from allocation.
pub const MIN_SIGMA_SQ: f64 = 1e-12;
/// Relative bracket width at which λ bisection stops.
const LAMBDA_REL_TOL: f64 = 1e-10;

/// Per-stream channel gains σ² and interference gains γ, indexed `[user][stream]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamGains {
    pub sigma_sq: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
}

impl StreamGains {
    pub fn new(sigma_sq: Vec<Vec<f64>>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        if sigma_sq.len() != gamma.len()
            || sigma_sq.iter().zip(&gamma).any(|(s, g)| s.len() != g.len())
        {
            return Err(Error::InvalidDimension(
                "sigma_sq and gamma shapes differ".into(),
            ));
        }
        let all = sigma_sq.iter().chain(&gamma).flatten();
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite stream gain".into()));
        }
        if sigma_sq.iter().chain(&gamma).flatten().any(|&x| x < 0.0) {
            return Err(Error::InvalidInput("negative stream gain".into()));
        }
        Ok(Self { sigma_sq, gamma })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<Vec<f64>>,
    /// Interference multiplier; 0 when the budget does not bind.
    pub lambda: f64,
    pub total_interference: f64,
    pub sum_rate: f64,
    /// Some stream was clipped at the per-stream cap.
    pub cap_active: bool,
}

/// `γ_{k,d} = [B_k^H F^H G_0^H G_0 F B_k]_{d,d} = ‖G_0 F b_{k,d}‖²`.
pub fn interference_gains(
    precoders: &[ComplexMatrix],
    analog: &ComplexMatrix,
    primary: &ComplexMatrix,
) -> Result<Vec<Vec<f64>>> {
    if primary.ncols() != analog.nrows() {
        return Err(Error::InvalidDimension(format!(
            "G_0 has {} columns but F has {} rows",
            primary.ncols(),
            analog.nrows()
        )));
    }
    let through = primary * analog;
    precoders
        .iter()
        .map(|b| {
            if b.nrows() != analog.ncols() {
                return Err(Error::InvalidDimension(format!(
                    "precoder has {} rows but F has {} columns",
                    b.nrows(),
                    analog.ncols()
                )));
            }
            let y = &through * b;
            Ok(y.column_iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().max(0.0))
                .collect())
        })
        .collect()
}

/// `Σ_k Σ_d log2(1 + P_{k,d} σ²_{k,d})`.
pub fn sum_rate(powers: &[Vec<f64>], sigma_sq: &[Vec<f64>]) -> Result<f64> {
    check_shape(powers, sigma_sq)?;
    let mut total = 0.0;
    for (p, s) in powers.iter().flatten().zip(sigma_sq.iter().flatten()) {
        if *p < 0.0 || p.is_nan() {
            return Err(Error::InvalidInput(format!("negative power {p}")));
        }
        total += (1.0 + p * s).log2();
    }
    Ok(total)
}

/// `Σ_k Σ_d P_{k,d} γ_{k,d}`.
pub fn total_interference(powers: &[Vec<f64>], gamma: &[Vec<f64>]) -> f64 {
    powers
        .iter()
        .flatten()
        .zip(gamma.iter().flatten())
        .map(|(p, g)| p * g)
        .sum()
}

fn check_shape(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<()> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return Err(Error::InvalidDimension("array shapes differ".into()));
    }
    Ok(())
}

/// One stream's power at multiplier `lambda`.
fn stream_power(sigma_sq: f64, gamma: f64, lambda: f64, cap: f64) -> f64 {
    if sigma_sq < MIN_SIGMA_SQ {
        return 0.0;
    }
    if gamma <= 0.0 {
        return cap;
    }
    if lambda >= sigma_sq / gamma {
        return 0.0;
    }
    (1.0 / (lambda * gamma) - 1.0 / sigma_sq).clamp(0.0, cap)
}

struct Flat {
    sigma_sq: Vec<f64>,
    gamma: Vec<f64>,
}

impl Flat {
    fn powers(&self, lambda: f64, cap: f64) -> Vec<f64> {
        self.sigma_sq
            .iter()
            .zip(&self.gamma)
            .map(|(&s, &g)| stream_power(s, g, lambda, cap))
            .collect()
    }

    fn interference(&self, lambda: f64, cap: f64) -> f64 {
        self.powers(lambda, cap)
            .iter()
            .zip(&self.gamma)
            .map(|(p, g)| p * g)
            .sum()
    }
}

fn unflatten(flat: &[f64], like: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut it = flat.iter().copied();
    like.iter()
        .map(|row| row.iter().map(|_| it.next().unwrap()).collect())
        .collect()
}

/// Optimal allocation under the interference budget `i_th` (linear units)
/// with a per-stream cap `power_cap`.
pub fn optimal_power_allocation(
    gains: &StreamGains,
    i_th: f64,
    power_cap: f64,
) -> Result<PowerAllocation> {
    if !i_th.is_finite() || i_th < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "interference threshold must be finite and ≥ 0 (got {i_th})"
        )));
    }
    if power_cap.is_nan() || power_cap <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "power cap must be > 0 (got {power_cap})"
        )));
    }
    let flat = Flat {
        sigma_sq: gains.sigma_sq.iter().flatten().copied().collect(),
        gamma: gains.gamma.iter().flatten().copied().collect(),
    };
    if !flat.sigma_sq.iter().any(|&s| s >= MIN_SIGMA_SQ) {
        return Err(Error::InvalidInput(
            "no stream has a usable channel gain".into(),
        ));
    }
    let finish = |powers: Vec<f64>, lambda: f64, cap_active: bool| -> Result<PowerAllocation> {
        let powers = unflatten(&powers, &gains.sigma_sq);
        Ok(PowerAllocation {
            total_interference: total_interference(&powers, &gains.gamma),
            sum_rate: sum_rate(&powers, &gains.sigma_sq)?,
            powers,
            lambda,
            cap_active,
        })
    };

    if i_th == 0.0 {
        return finish(vec![0.0; flat.sigma_sq.len()], f64::INFINITY, false);
    }

    // Budget never binds: every admitted stream sits at the cap.
    let at_cap = flat.interference(0.0, power_cap);
    if at_cap <= i_th {
        return finish(flat.powers(0.0, power_cap), 0.0, true);
    }

    // Above `hi` every stream with γ > 0 is off.
    let hi0 = flat
        .sigma_sq
        .iter()
        .zip(&flat.gamma)
        .filter(|&(&s, &g)| s >= MIN_SIGMA_SQ && g > 0.0)
        .map(|(&s, &g)| s / g)
        .fold(0.0, f64::max);
    let mut hi = hi0;
    let mut lo = hi0;
    while flat.interference(lo, power_cap) <= i_th {
        lo *= 0.5;
    }
    // Bisect in log λ: interference(lo) > i_th ≥ interference(hi).
    while hi - lo > LAMBDA_REL_TOL * hi {
        let mid = (lo * hi).sqrt();
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        if flat.interference(mid, power_cap) > i_th {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = hi;
    let mut powers = flat.powers(lambda, power_cap);
    let mut cap_active = powers.iter().any(|&p| p >= power_cap);

    // Closed form on the active set, accepted only if it keeps the same set.
    if !cap_active {
        let active: Vec<usize> = (0..powers.len()).filter(|&i| powers[i] > 0.0).collect();
        if !active.is_empty() {
            let offset: f64 = active
                .iter()
                .map(|&i| flat.gamma[i] / flat.sigma_sq[i])
                .sum();
            let exact = active.len() as f64 / (i_th + offset);
            let candidate = flat.powers(exact, power_cap);
            let same_set = candidate
                .iter()
                .enumerate()
                .all(|(i, &p)| (p > 0.0) == active.contains(&i));
            if same_set && candidate.iter().all(|&p| p < power_cap) {
                lambda = exact;
                powers = candidate;
            }
        }
        cap_active = powers.iter().any(|&p| p >= power_cap);
    }
    finish(powers, lambda, cap_active)
}
