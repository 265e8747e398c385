//! Baseband block diagonalization.
//!
//! Each user's precoder lives in the null space of every other user's
//! effective channel, which removes inter-user interference after combining.
//! Inside that null space an SVD of the user's own projected channel yields
//! the precoder `B_k`, the combiner `T_k` and the per-stream gains `σ_{k,d}`.

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, full_right_singular, stack_rows, svd, ComplexMatrix};

/// Relative singular-value threshold for the null-space and stream-rank checks.
pub const RANK_TOL: f64 = 1e-8;

/// Per-user baseband channels `H̃_k = W_k^H H_k F`, each M_r×M_t.
#[derive(Debug, Clone)]
pub struct EffectiveChannelSet {
    pub per_user: Vec<ComplexMatrix>,
}

impl EffectiveChannelSet {
    pub fn new(per_user: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = per_user.first() else {
            return Err(Error::InvalidDimension("no users".into()));
        };
        let shape = first.shape();
        if per_user.iter().any(|h| h.shape() != shape) {
            return Err(Error::InvalidDimension(
                "effective channels must share one shape".into(),
            ));
        }
        Ok(Self { per_user })
    }

    pub fn users(&self) -> usize {
        self.per_user.len()
    }

    pub fn rf_rx(&self) -> usize {
        self.per_user[0].nrows()
    }

    pub fn rf_tx(&self) -> usize {
        self.per_user[0].ncols()
    }

    /// All users' channels stacked into a K·M_r×M_t matrix.
    pub fn stacked(&self) -> ComplexMatrix {
        let refs: Vec<&ComplexMatrix> = self.per_user.iter().collect();
        stack_rows(&refs, self.rf_tx()).expect("shapes checked at construction")
    }
}

#[derive(Debug, Clone)]
pub struct BdSolution {
    /// B_k, each M_t×D with orthonormal columns.
    pub precoders: Vec<ComplexMatrix>,
    /// T_k, each M_r×D with orthonormal columns.
    pub combiners: Vec<ComplexMatrix>,
    /// σ_{k,d}, descending in d.
    pub singular_values: Vec<Vec<f64>>,
    /// V̄_k⁽⁰⁾, each M_t×(M_t − rank H̄_k), at least M_r columns.
    pub null_bases: Vec<ComplexMatrix>,
}

impl BdSolution {
    pub fn sigma_sq(&self) -> Vec<Vec<f64>> {
        self.singular_values
            .iter()
            .map(|s| s.iter().map(|x| x * x).collect())
            .collect()
    }
}

/// `W_k^H H_k F` for every user.
pub fn effective_channels(
    channels: &[ComplexMatrix],
    precoder: &ComplexMatrix,
    combiners: &[ComplexMatrix],
) -> Result<EffectiveChannelSet> {
    if channels.len() != combiners.len() {
        return Err(Error::InvalidDimension(format!(
            "{} channels but {} combiners",
            channels.len(),
            combiners.len()
        )));
    }
    let mut per_user = Vec::with_capacity(channels.len());
    for (k, (h, w)) in channels.iter().zip(combiners).enumerate() {
        if w.nrows() != h.nrows() || h.ncols() != precoder.nrows() {
            return Err(Error::InvalidDimension(format!(
                "user {k}: W is {}x{}, H is {}x{}, F is {}x{}",
                w.nrows(),
                w.ncols(),
                h.nrows(),
                h.ncols(),
                precoder.nrows(),
                precoder.ncols()
            )));
        }
        per_user.push(w.adjoint() * h * precoder);
    }
    EffectiveChannelSet::new(per_user)
}

/// Rows of every other user's effective channel, in ascending user order.
/// Returns a 0×M_t matrix when there is a single user.
pub fn stack_interference(k: usize, eff: &EffectiveChannelSet) -> Result<ComplexMatrix> {
    if k >= eff.users() {
        return Err(Error::InvalidParameter(format!(
            "user index {k} out of range for {} users",
            eff.users()
        )));
    }
    let others: Vec<&ComplexMatrix> = eff
        .per_user
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, h)| h)
        .collect();
    stack_rows(&others, eff.rf_tx())
}

/// Orthonormal basis of the interference null space for user `k`, with at
/// least M_r columns.
///
/// With a single user nothing needs nulling; the basis is then the top M_r
/// right singular vectors of the user's own channel, which reduces the
/// design to plain SVD precoding even when M_t > M_r.
fn null_basis(k: usize, eff: &EffectiveChannelSet) -> Result<ComplexMatrix> {
    let m_t = eff.rf_tx();
    let m_r = eff.rf_rx();
    if m_r > m_t {
        return Err(Error::InvalidDimension(format!(
            "M_r = {m_r} exceeds M_t = {m_t}"
        )));
    }
    if eff.users() == 1 {
        return Ok(svd(&eff.per_user[k])?.v);
    }
    let stack = stack_interference(k, eff)?;
    let (sv, v) = full_right_singular(&stack)?;
    let tol = RANK_TOL * sv[0];
    let rank = sv.iter().filter(|&&s| s > tol).count();
    // Need at least an M_r-dimensional null space; keep all of it when larger.
    if rank > m_t - m_r {
        return Err(Error::RankDeficient {
            user: k,
            rank,
            needed: m_t - m_r,
        });
    }
    Ok(v.columns(rank, m_t - rank).into_owned())
}

pub fn bd_design(eff: &EffectiveChannelSet, streams: usize) -> Result<BdSolution> {
    let m_r = eff.rf_rx();
    if streams == 0 || streams > m_r {
        return Err(Error::InvalidDimension(format!(
            "need 1 ≤ D ≤ M_r, got D = {streams}, M_r = {m_r}"
        )));
    }
    let users = eff.users();
    let mut sol = BdSolution {
        precoders: Vec::with_capacity(users),
        combiners: Vec::with_capacity(users),
        singular_values: Vec::with_capacity(users),
        null_bases: Vec::with_capacity(users),
    };
    for k in 0..users {
        let basis = null_basis(k, eff)?;
        let own = &eff.per_user[k];
        let projected = own * &basis;
        let dec = svd(&projected)?;
        let tol = RANK_TOL * frobenius_norm(own);
        let rank = dec.singular_values.iter().filter(|&&s| s > tol).count();
        if rank < streams {
            return Err(Error::RankDeficient {
                user: k,
                rank,
                needed: streams,
            });
        }
        sol.precoders.push(&basis * dec.v.columns(0, streams));
        sol.combiners.push(dec.u.columns(0, streams).into_owned());
        sol.singular_values
            .push(dec.singular_values[..streams].to_vec());
        sol.null_bases.push(basis);
    }
    Ok(sol)
}

/// Largest `‖T_j^H H̃_j B_k‖_F / (‖H̃_j‖_F ‖B_k‖_F)` over j ≠ k.
pub fn max_relative_leakage(eff: &EffectiveChannelSet, sol: &BdSolution) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, h) in eff.per_user.iter().enumerate() {
        let hn = frobenius_norm(h);
        for (k, b) in sol.precoders.iter().enumerate() {
            if j == k {
                continue;
            }
            let denom = hn * frobenius_norm(b);
            if denom == 0.0 {
                continue;
            }
            let leak = frobenius_norm(&(sol.combiners[j].adjoint() * h * b));
            worst = worst.max(leak / denom);
        }
    }
    worst
}
