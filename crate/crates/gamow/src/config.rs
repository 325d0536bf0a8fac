//! Flat key = value configuration.
//!
//! Holds the numeric tuning constants of the method dispatcher, most of them
//! produced by the `calibrate` subcommand: per-integral coefficients of the
//! cancellation-prediction models and of the asymptotic error bounds. A file
//! named on the command line wins over one named in `GAMOW_CONFIG`, which wins
//! over the built-in defaults. Files list only the keys they override.

use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;
use std::path::Path;

/// Environment variable naming a configuration file to load when no explicit
/// path is given.
pub const CONFIG_ENV: &str = "GAMOW_CONFIG";

// Defaults measured on the calibration grid (z chosen per integral so the
// series diagnostics span reliable through untrusted). cd_a/cd_b are the
// intercept and slope of the cancellation model, asym_c the worst-case
// coefficient of the asymptotic error bound, zstar the tolerance-1e-6
// crossover recorded for reference.
const DEFAULTS: &[(&str, f64)] = &[
    ("series_cd_limit", 12.0),
    ("quadrature_safety", 100.0),
    ("cal_i1_nu0_cd_a", -1.28),
    ("cal_i1_nu0_cd_b", 2.61),
    ("cal_i1_nu0_asym_c", 0.2),
    ("cal_i1_nu0_zstar", 26.0),
    ("cal_i1_nu1_cd_a", -1.51),
    ("cal_i1_nu1_cd_b", 2.61),
    ("cal_i1_nu1_asym_c", 1.2),
    ("cal_i1_nu1_zstar", 26.0),
    ("cal_i1_nu2_cd_a", -1.78),
    ("cal_i1_nu2_cd_b", 2.61),
    ("cal_i1_nu2_asym_c", 3.0),
    ("cal_i1_nu2_zstar", 26.0),
    ("cal_i2_nu0_cd_a", 0.3),
    ("cal_i2_nu0_cd_b", 1.74),
    ("cal_i2_nu0_asym_c", 1.3),
    ("cal_i2_nu0_zstar", 12.0),
    ("cal_i2_nu1_cd_a", 0.3),
    ("cal_i2_nu1_cd_b", 1.74),
    ("cal_i2_nu1_asym_c", 2.1),
    ("cal_i2_nu1_zstar", 12.0),
    ("cal_i2_nu2_cd_a", 0.3),
    ("cal_i2_nu2_cd_b", 1.74),
    ("cal_i2_nu2_asym_c", 3.2),
    ("cal_i2_nu2_zstar", 12.0),
    ("cal_i3_nu0_cd_a", -1.0),
    ("cal_i3_nu0_cd_b", 0.87),
    ("cal_i3_nu0_asym_c", 0.8),
    ("cal_i3_nu0_zstar", 26.0),
    ("cal_i3_nu1_cd_a", -1.0),
    ("cal_i3_nu1_cd_b", 0.87),
    ("cal_i3_nu1_asym_c", 2.0),
    ("cal_i3_nu1_zstar", 26.0),
    ("cal_i3_nu2_cd_a", -1.0),
    ("cal_i3_nu2_cd_b", 0.87),
    ("cal_i3_nu2_asym_c", 5.0),
    ("cal_i3_nu2_zstar", 26.0),
    ("cal_i4_nu0_cd_a", -1.28),
    ("cal_i4_nu0_cd_b", 2.61),
    ("cal_i4_nu0_asym_c", 0.6),
    ("cal_i4_nu0_zstar", 26.0),
    ("cal_i4_nu1_cd_a", -1.51),
    ("cal_i4_nu1_cd_b", 2.61),
    ("cal_i4_nu1_asym_c", 1.6),
    ("cal_i4_nu1_zstar", 26.0),
    ("cal_i4_nu2_cd_a", -1.78),
    ("cal_i4_nu2_cd_b", 2.61),
    ("cal_i4_nu2_asym_c", 4.0),
    ("cal_i4_nu2_zstar", 26.0),
];

#[derive(Clone, Debug)]
pub struct Config {
    values: BTreeMap<String, f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            values: DEFAULTS
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

impl Config {
    /// Defaults overlaid with `path` if given, else with the file named by
    /// GAMOW_CONFIG if set, else used as-is.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let mut cfg = Config::default();
        let chosen: Option<std::path::PathBuf> = match path {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).map(Into::into),
        };
        if let Some(p) = chosen {
            cfg.merge_file(&p)?;
        }
        Ok(cfg)
    }

    /// Parses `key = value` lines into this config. Blank lines and lines
    /// starting with '#' are skipped; anything else malformed is an error.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!(
                    "{}:{}: expected key = value, got {line:?}",
                    path.display(),
                    i + 1
                ))
            })?;
            let v: f64 = value.trim().parse().map_err(|_| {
                Error::invalid(format!(
                    "{}:{}: {value:?} is not a number",
                    path.display(),
                    i + 1
                ))
            })?;
            self.values.insert(key.trim().to_string(), v);
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Calibration constant for one integral kind and order; orders beyond
    /// the calibrated range reuse the highest calibrated one.
    pub fn calibration(&self, kind: &str, nu: u32, field: &str) -> f64 {
        let nu = nu.min(2);
        let key = format!("cal_{kind}_nu{nu}_{field}");
        self.get(&key)
            .unwrap_or_else(|| panic!("missing built-in default for {key}"))
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }

    /// Writes every key = value pair, sorted, one per line.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v:.17e}\n"));
        }
        std::fs::write(path, out)
            .map_err(|e| Error::invalid(format!("cannot write config {}: {e}", path.display())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }
}
