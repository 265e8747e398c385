//! RF-domain processing: the DFT combiner codebook, per-user combiner
//! selection, and the phase-aligned analog precoder.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{stack_rows, ComplexMatrix};

/// The `n` vectors `a(ζ^i) = [1, e^{jζ^i}, …, e^{j(n-1)ζ^i}]ᵀ/√n` with
/// `ζ^i = 2π i / n` (0-based `i`). They are the columns of the unitary DFT.
#[derive(Debug, Clone)]
pub struct Codebook {
    /// n×n matrix whose i-th column is `a(ζ^i)`.
    pub vectors: ComplexMatrix,
    pub grid_angles: Vec<f64>,
    pub spacing_ratio: f64,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.grid_angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_angles.is_empty()
    }

    pub fn vector(&self, i: usize) -> ComplexMatrix {
        self.vectors.columns(i, 1).into_owned()
    }

    /// Physical angle of arrival in [-π/2, π/2] whose ULA response equals
    /// codebook entry `i`, if one exists for this spacing.
    pub fn physical_angle(&self, i: usize) -> Option<f64> {
        let mut zeta = self.grid_angles[i];
        if zeta > PI {
            zeta -= 2.0 * PI;
        }
        let s = zeta / (2.0 * PI * self.spacing_ratio);
        (s.abs() <= 1.0).then(|| s.asin())
    }
}

pub fn build_codebook(n_rx: usize, spacing_ratio: f64) -> Result<Codebook> {
    if n_rx == 0 {
        return Err(Error::InvalidDimension("codebook needs n_rx ≥ 1".into()));
    }
    let n = n_rx as f64;
    let grid_angles: Vec<f64> = (0..n_rx).map(|i| 2.0 * PI * i as f64 / n).collect();
    let scale = 1.0 / n.sqrt();
    // Reduce m·i mod n before forming the phase so large codebooks stay exact.
    let vectors = DMatrix::from_fn(n_rx, n_rx, |m, i| {
        let k = (m * i) % n_rx;
        Complex64::from_polar(scale, 2.0 * PI * k as f64 / n)
    });
    Ok(Codebook {
        vectors,
        grid_angles,
        spacing_ratio,
    })
}

#[derive(Debug, Clone)]
pub struct CombinerSelection {
    /// N_r×M_r, columns ordered by descending score.
    pub combiner: ComplexMatrix,
    pub chosen_indices: Vec<usize>,
    /// Score of every codebook entry, indexed by codebook position.
    pub scores: Vec<f64>,
}

/// `Σ_j |a(ζ^i)^H h_j|²` for every codebook entry `i`, `h_j` the columns of `channel`.
pub fn codebook_scores(channel: &ComplexMatrix, codebook: &Codebook) -> Result<Vec<f64>> {
    if channel.nrows() != codebook.len() {
        return Err(Error::InvalidDimension(format!(
            "channel has {} rows but the codebook has {} entries",
            channel.nrows(),
            codebook.len()
        )));
    }
    let projected = codebook.vectors.adjoint() * channel;
    Ok(projected
        .row_iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum())
        .collect())
}

/// Sum of `scores[i]` over `indices`, accumulated in ascending index order so
/// that equal sets always produce bit-identical totals.
pub fn selection_objective(scores: &[f64], indices: &[usize]) -> f64 {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.iter().map(|&i| scores[i]).sum()
}

/// Picks the `m_rx` codebook vectors with the largest captured channel energy.
/// The objective is separable across columns, so the top-`m_rx` scores are
/// the exact optimum over all subsets. Ties go to the lower codebook index.
pub fn select_analog_combiner(
    channel: &ComplexMatrix,
    m_rx: usize,
    codebook: &Codebook,
) -> Result<CombinerSelection> {
    if m_rx == 0 || m_rx > codebook.len() {
        return Err(Error::InvalidDimension(format!(
            "need 1 ≤ M_r ≤ N_r, got M_r = {m_rx}, N_r = {}",
            codebook.len()
        )));
    }
    let scores = codebook_scores(channel, codebook)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m_rx);
    let combiner = DMatrix::from_fn(codebook.len(), m_rx, |r, c| {
        codebook.vectors[(r, order[c])]
    });
    Ok(CombinerSelection {
        combiner,
        chosen_indices: order,
        scores,
    })
}

/// The stacked matrix `[W_1^H H_1; …; W_K^H H_K]` (K·M_r × N_t).
pub fn stacked_combined_channel(
    combiners: &[ComplexMatrix],
    channels: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    if combiners.len() != channels.len() || channels.is_empty() {
        return Err(Error::InvalidDimension(format!(
            "{} combiners for {} channels",
            combiners.len(),
            channels.len()
        )));
    }
    let n_tx = channels[0].ncols();
    let n_rx = channels[0].nrows();
    let mut blocks = Vec::with_capacity(channels.len());
    for (w, h) in combiners.iter().zip(channels) {
        if h.shape() != (n_rx, n_tx) || w.nrows() != n_rx {
            return Err(Error::InvalidDimension(format!(
                "combiner {}x{} does not fit channel {}x{}",
                w.nrows(),
                w.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        blocks.push(w.adjoint() * h);
    }
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    stack_rows(&refs, n_tx)
}

/// Phase-aligned analog precoder: `[F]_{i,j} = e^{-j∠h̆_{j,i}}/√N_t` where
/// `h̆` is the stacked combined channel. Zero entries get phase 0.
pub fn build_analog_precoder(
    combiners: &[ComplexMatrix],
    channels: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let stacked = stacked_combined_channel(combiners, channels)?;
    Ok(phase_align(&stacked))
}

/// `F` built from an already-stacked combined channel.
pub fn phase_align(stacked: &ComplexMatrix) -> ComplexMatrix {
    let n_tx = stacked.ncols();
    let scale = 1.0 / (n_tx as f64).sqrt();
    DMatrix::from_fn(n_tx, stacked.nrows(), |i, j| {
        let h = stacked[(j, i)];
        let phase = if h.re == 0.0 && h.im == 0.0 { 0.0 } else { h.arg() };
        Complex64::from_polar(scale, -phase)
    })
}
