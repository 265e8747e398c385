//! Flat `key = value` sweep configuration.
//!
//! ```text
//! # desk-scale preset
//! preset = small
//! trials = 200
//! i_th_db = 0, 2, 4, 6, 8, 10, 12
//! schemes = adpc, right_singular, blind
//! ```
//!
//! Keys may appear in any order; `preset` is applied first and every other
//! key overrides it. `rf_tx` accepts `auto` (K·M_r, re-derived per K) and
//! `full` (N_t); `rf_rx` accepts `full` (N_r).

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::channel::ChannelModel;
use crate::config::HybridConfig;
use crate::error::{Error, Result};
use crate::scheme::SchemeRegistry;

use super::SweepSpec;

/// How the base-station RF chain count is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfChains {
    Fixed(usize),
    /// `K·M_r`.
    PerUser,
    /// `N_t`.
    Full,
}

impl RfChains {
    pub fn resolve(&self, cfg: &HybridConfig) -> usize {
        match *self {
            RfChains::Fixed(n) => n,
            RfChains::PerUser => cfg.users * cfg.rf_rx,
            RfChains::Full => cfg.n_tx,
        }
    }
}

const KEYS: &[&str] = &[
    "preset",
    "n_tx",
    "n_rx",
    "n_rx_primary",
    "rf_tx",
    "rf_rx",
    "users",
    "streams",
    "paths",
    "path_gain_var",
    "spacing_ratio",
    "noise_var",
    "power_cap",
    "channel_model",
    "schemes",
    "i_th_db",
    "k_values",
    "trials",
    "master_seed",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn parse_scalar<T: FromStr>(e: &Entry, key: &str, what: &str) -> Result<T> {
    e.value.parse().map_err(|_| Error::Parse {
        line: e.line,
        msg: format!("`{key}` expects {what}, got `{}`", e.value),
    })
}

fn parse_list<T: FromStr>(e: &Entry, key: &str, what: &str) -> Result<Vec<T>> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse().map_err(|_| Error::Parse {
                line: e.line,
                msg: format!("`{key}` expects a comma-separated list of {what}, bad item `{item}`"),
            })
        })
        .collect()
}

/// Parses and validates a sweep configuration document.
pub fn load_config(text: &str) -> Result<SweepSpec> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if let Some(prev) = entries.get(key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}` (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                value: value.trim(),
            },
        );
    }

    let mut cfg = match entries.get("preset") {
        None => HybridConfig::small_hybrid(),
        Some(e) => match e.value {
            "small" => HybridConfig::small_hybrid(),
            "large" => HybridConfig::large_hybrid(),
            other => {
                return Err(Error::Parse {
                    line: e.line,
                    msg: format!("unknown preset `{other}` (expected small or large)"),
                })
            }
        },
    };
    let mut spec = SweepSpec::new(cfg.clone());

    let usize_fields: [(&str, &mut usize); 6] = [
        ("n_tx", &mut cfg.n_tx),
        ("n_rx", &mut cfg.n_rx),
        ("users", &mut cfg.users),
        ("streams", &mut cfg.streams),
        ("paths", &mut cfg.paths),
        ("n_rx_primary", &mut cfg.n_rx_primary),
    ];
    for (key, slot) in usize_fields {
        if let Some(e) = entries.get(key) {
            *slot = parse_scalar(e, key, "a nonnegative integer")?;
        }
    }
    // A larger receive array without an explicit primary size keeps them equal.
    if entries.contains_key("n_rx") && !entries.contains_key("n_rx_primary") {
        cfg.n_rx_primary = cfg.n_rx;
    }
    let f64_fields: [(&str, &mut f64); 4] = [
        ("path_gain_var", &mut cfg.path_gain_var),
        ("spacing_ratio", &mut cfg.spacing_ratio),
        ("noise_var", &mut cfg.noise_var),
        ("power_cap", &mut cfg.power_cap),
    ];
    for (key, slot) in f64_fields {
        if let Some(e) = entries.get(key) {
            *slot = parse_scalar(e, key, "a number")?;
        }
    }
    if let Some(e) = entries.get("rf_rx") {
        cfg.rf_rx = match e.value {
            "full" => cfg.n_rx,
            _ => parse_scalar(e, "rf_rx", "an integer or `full`")?,
        };
    }
    spec.rf_tx = match entries.get("rf_tx") {
        Some(e) => match e.value {
            "auto" => RfChains::PerUser,
            "full" => RfChains::Full,
            _ => RfChains::Fixed(parse_scalar(e, "rf_tx", "an integer, `auto` or `full`")?),
        },
        None => RfChains::Fixed(cfg.rf_tx),
    };
    cfg.rf_tx = spec.rf_tx.resolve(&cfg);
    spec.config = cfg;

    if let Some(e) = entries.get("channel_model") {
        spec.channel_model = ChannelModel::parse(e.value).ok_or_else(|| Error::Parse {
            line: e.line,
            msg: format!("unknown channel model `{}` (expected geometric or rayleigh)", e.value),
        })?;
    }
    if let Some(e) = entries.get("schemes") {
        let names: Vec<String> = parse_list(e, "schemes", "scheme names")?;
        let registry = SchemeRegistry::builtin();
        if let Some(bad) = names.iter().find(|n| registry.get(n).is_none()) {
            return Err(Error::Parse {
                line: e.line,
                msg: format!(
                    "unknown scheme `{bad}` (available: {})",
                    registry.names().join(", ")
                ),
            });
        }
        spec.schemes = names;
    }
    if let Some(e) = entries.get("i_th_db") {
        spec.i_th_db = parse_list(e, "i_th_db", "numbers")?;
    }
    if let Some(e) = entries.get("k_values") {
        spec.k_values = Some(parse_list(e, "k_values", "integers")?);
    }
    if let Some(e) = entries.get("trials") {
        spec.trials = parse_scalar(e, "trials", "a positive integer")?;
    }
    if let Some(e) = entries.get("master_seed") {
        spec.master_seed = parse_scalar(e, "master_seed", "an unsigned 64-bit integer")?;
    }

    spec.validate(&SchemeRegistry::builtin())?;
    Ok(spec)
}

pub fn load_config_file(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_config(&text)
}
