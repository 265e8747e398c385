//! System dimensions and physical parameters shared by every stage.

use crate::error::{Error, Result};

/// Default per-stream power cap (linear), only reached by streams that leak
/// no interference toward the primary user.
pub const DEFAULT_POWER_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    /// Antennas at the cognitive base station.
    pub n_tx: usize,
    /// Antennas per secondary user.
    pub n_rx: usize,
    /// Antennas at the primary user.
    pub n_rx_primary: usize,
    /// RF chains at the base station.
    pub rf_tx: usize,
    /// RF chains per secondary user.
    pub rf_rx: usize,
    pub users: usize,
    /// Data streams per user.
    pub streams: usize,
    /// Propagation paths per user (geometric channel).
    pub paths: usize,
    pub path_gain_var: f64,
    /// Antenna spacing over wavelength.
    pub spacing_ratio: f64,
    pub noise_var: f64,
    pub power_cap: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self::small_hybrid()
    }
}

impl HybridConfig {
    /// 4×32 hybrid system: N_r=4, N_t=32, K=8, M_r=2, M_t=16, D=2, L=3.
    pub fn small_hybrid() -> Self {
        Self {
            n_tx: 32,
            n_rx: 4,
            n_rx_primary: 4,
            rf_tx: 16,
            rf_rx: 2,
            users: 8,
            streams: 2,
            paths: 3,
            path_gain_var: 1.0,
            spacing_ratio: 0.5,
            noise_var: 1.0,
            power_cap: DEFAULT_POWER_CAP,
        }
    }

    /// 16×128 hybrid system: N_r=16, N_t=128, K=8, M_r=2, M_t=16, D=2, L=3.
    pub fn large_hybrid() -> Self {
        Self {
            n_tx: 128,
            n_rx: 16,
            n_rx_primary: 16,
            ..Self::small_hybrid()
        }
    }

    /// Same dimensions with one RF chain per antenna on both ends.
    pub fn fully_digital(&self) -> Self {
        Self {
            rf_tx: self.n_tx,
            rf_rx: self.n_rx,
            ..self.clone()
        }
    }

    /// Structural checks common to every scheme.
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_tx", self.n_tx),
            ("n_rx", self.n_rx),
            ("n_rx_primary", self.n_rx_primary),
            ("rf_tx", self.rf_tx),
            ("rf_rx", self.rf_rx),
            ("users", self.users),
            ("streams", self.streams),
            ("paths", self.paths),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Constraint(format!("{name} must be at least 1")));
            }
        }
        let positive = [
            ("path_gain_var", self.path_gain_var),
            ("spacing_ratio", self.spacing_ratio),
            ("noise_var", self.noise_var),
            ("power_cap", self.power_cap),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Constraint(format!(
                    "{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        let kd = self.users * self.streams;
        if !(kd <= self.rf_tx && self.rf_tx <= self.n_tx) {
            return Err(Error::Constraint(format!(
                "KD ≤ M_t ≤ N_t fails: K·D = {kd}, M_t = {}, N_t = {}",
                self.rf_tx, self.n_tx
            )));
        }
        if !(self.streams <= self.rf_rx && self.rf_rx <= self.n_rx) {
            return Err(Error::Constraint(format!(
                "D ≤ M_r ≤ N_r fails: D = {}, M_r = {}, N_r = {}",
                self.streams, self.rf_rx, self.n_rx
            )));
        }
        if self.paths > self.n_rx {
            return Err(Error::Constraint(format!(
                "L_k ≤ N_r fails: L_k = {}, N_r = {}",
                self.paths, self.n_rx
            )));
        }
        Ok(())
    }

    /// Checks for the hybrid scheme, whose analog precoder has one RF chain
    /// per user receive chain.
    pub fn validate_hybrid(&self) -> Result<()> {
        self.validate()?;
        if self.rf_tx != self.users * self.rf_rx {
            return Err(Error::Constraint(format!(
                "M_t = K·M_r fails: M_t = {}, K·M_r = {}",
                self.rf_tx,
                self.users * self.rf_rx
            )));
        }
        Ok(())
    }

    pub fn total_streams(&self) -> usize {
        self.users * self.streams
    }
}
