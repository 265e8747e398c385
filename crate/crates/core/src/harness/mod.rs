//! Seeded Monte-Carlo sweeps over the interference threshold and the number
//! of users, with CSV and SVG output.
//!
//! A [`SweepSpec`] (usually read with [`load_config`]) expands to a list of
//! [`SweepPoint`]s. Every (point, trial) pair is an independent work unit:
//! it draws one channel realization from the trial seed and runs each
//! requested scheme on it. Rows are merged in (point, trial, scheme) order,
//! so the output does not depend on the number of worker threads.

mod config_file;
mod output;
mod plot;

use std::sync::Arc;

use rayon::prelude::*;

use crate::channel::ChannelModel;
use crate::config::HybridConfig;
use crate::error::{Error, Result};
use crate::scheme::{Scheme, SchemeRegistry, TrialContext};

pub use config_file::{load_config, load_config_file, RfChains};
pub use output::{write_aggregates, write_csv, write_rows, AGGREGATE_HEADER, ROW_HEADER};
pub use plot::{axis_range, emit_plot, render_svg};

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Base system; `users` and `rf_tx` are replaced per point when
    /// `k_values` is set.
    pub config: HybridConfig,
    pub rf_tx: RfChains,
    pub channel_model: ChannelModel,
    pub schemes: Vec<String>,
    pub i_th_db: Vec<f64>,
    pub k_values: Option<Vec<usize>>,
    pub trials: u64,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn new(config: HybridConfig) -> Self {
        Self {
            rf_tx: RfChains::Fixed(config.rf_tx),
            config,
            channel_model: ChannelModel::Geometric,
            schemes: SchemeRegistry::builtin()
                .names()
                .into_iter()
                .map(String::from)
                .collect(),
            i_th_db: (0..=6).map(|i| 2.0 * i as f64).collect(),
            k_values: None,
            trials: 200,
            master_seed: 0,
        }
    }

    pub fn k_list(&self) -> Vec<usize> {
        self.k_values
            .clone()
            .unwrap_or_else(|| vec![self.config.users])
    }

    /// Sweep points, K-major then I_th.
    pub fn points(&self) -> Vec<SweepPoint> {
        self.k_list()
            .into_iter()
            .flat_map(|k| self.i_th_db.iter().map(move |&db| SweepPoint { i_th_db: db, k }))
            .collect()
    }

    /// System configuration at `k` users.
    pub fn config_for(&self, k: usize) -> HybridConfig {
        let mut cfg = self.config.clone();
        cfg.users = k;
        cfg.rf_tx = self.rf_tx.resolve(&cfg);
        cfg
    }

    pub fn resolve_schemes(&self, registry: &SchemeRegistry) -> Result<Vec<Arc<dyn Scheme>>> {
        registry.resolve(&self.schemes)
    }

    /// Checks the sweep itself and every scheme at every K.
    pub fn validate(&self, registry: &SchemeRegistry) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Constraint("trials ≥ 1 fails: trials = 0".into()));
        }
        if self.i_th_db.is_empty() {
            return Err(Error::Constraint("i_th_db must list at least one threshold".into()));
        }
        if let Some(db) = self.i_th_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::Constraint(format!("i_th_db values must be finite (got {db})")));
        }
        if matches!(&self.k_values, Some(ks) if ks.is_empty()) {
            return Err(Error::Constraint("k_values must list at least one K when given".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Constraint("schemes must name at least one scheme".into()));
        }
        let schemes = self.resolve_schemes(registry)?;
        for k in self.k_list() {
            let cfg = self.config_for(k);
            for s in &schemes {
                s.validate(&cfg).map_err(|e| match e {
                    Error::Constraint(msg) if self.k_values.is_some() => {
                        Error::Constraint(format!("{msg} (scheme {}, K = {k})", s.id()))
                    }
                    Error::Constraint(msg) => Error::Constraint(format!("{msg} (scheme {})", s.id())),
                    other => other,
                })?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub i_th_db: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme_id: String,
    pub i_th_db: f64,
    pub k: usize,
    pub trial: u64,
    pub sum_rate: f64,
    pub total_interference: f64,
    pub feasible: bool,
    pub discard_reason: Option<String>,
    /// Not written to CSV; lets callers tell a slack budget from a binding one.
    pub cap_active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub scheme_id: String,
    pub i_th_db: f64,
    pub k: usize,
    pub trials_used: usize,
    pub trials_discarded: usize,
    /// NaN when every trial was discarded.
    pub mean_sum_rate: f64,
    /// Sample standard deviation over √n; zero for a single trial.
    pub stderr_sum_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<Aggregate>,
}

/// One row per scheme for a single (point, trial). Scheme failures become
/// discarded rows; nothing escapes.
pub fn run_trial(
    spec: &SweepSpec,
    schemes: &[Arc<dyn Scheme>],
    point: SweepPoint,
    trial: u64,
) -> Vec<SweepRow> {
    let cfg = spec.config_for(point.k);
    let row = |id: &str, r: std::result::Result<crate::SchemeResult, String>| match r {
        Ok(res) => SweepRow {
            scheme_id: id.to_string(),
            i_th_db: point.i_th_db,
            k: point.k,
            trial,
            sum_rate: res.sum_rate,
            total_interference: res.total_interference,
            feasible: res.feasible,
            discard_reason: res.discard_reason,
            cap_active: res.cap_active,
        },
        Err(reason) => SweepRow {
            scheme_id: id.to_string(),
            i_th_db: point.i_th_db,
            k: point.k,
            trial,
            sum_rate: 0.0,
            total_interference: 0.0,
            feasible: false,
            discard_reason: Some(reason),
            cap_active: false,
        },
    };
    let ctx = match TrialContext::draw(&cfg, spec.channel_model, spec.master_seed, trial) {
        Ok(c) => c,
        Err(e) => {
            return schemes
                .iter()
                .map(|s| row(s.id(), Err(e.to_string())))
                .collect()
        }
    };
    let i_th = db_to_linear(point.i_th_db);
    schemes
        .iter()
        .map(|s| row(s.id(), s.run(&ctx, i_th).map_err(|e| e.to_string())))
        .collect()
}

/// Runs every (point, trial) on `threads` workers (`0` = rayon default).
pub fn run_sweep(spec: &SweepSpec, registry: &SchemeRegistry, threads: usize) -> Result<SweepOutput> {
    spec.validate(registry)?;
    let schemes = spec.resolve_schemes(registry)?;
    let points = spec.points();
    let units: Vec<(SweepPoint, u64)> = points
        .iter()
        .flat_map(|&p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let per_unit: Vec<Vec<SweepRow>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(p, t)| run_trial(spec, &schemes, p, t))
            .collect()
    });
    let rows: Vec<SweepRow> = per_unit.into_iter().flatten().collect();
    let aggregates = aggregate(&rows, &points, &spec.schemes);
    Ok(SweepOutput { rows, aggregates })
}

/// Per (point, scheme) statistics over feasible rows, in point order then
/// the given scheme order.
pub fn aggregate(rows: &[SweepRow], points: &[SweepPoint], schemes: &[String]) -> Vec<Aggregate> {
    let mut out = Vec::with_capacity(points.len() * schemes.len());
    for p in points {
        for s in schemes {
            let matching = rows
                .iter()
                .filter(|r| &r.scheme_id == s && r.k == p.k && r.i_th_db == p.i_th_db);
            let mut used = Vec::new();
            let mut discarded = 0;
            for r in matching {
                if r.feasible {
                    used.push(r.sum_rate);
                } else {
                    discarded += 1;
                }
            }
            let (mean, stderr) = mean_stderr(&used);
            out.push(Aggregate {
                scheme_id: s.clone(),
                i_th_db: p.i_th_db,
                k: p.k,
                trials_used: used.len(),
                trials_discarded: discarded,
                mean_sum_rate: mean,
                stderr_sum_rate: stderr,
            });
        }
    }
    out
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
