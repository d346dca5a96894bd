use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mps::TruncationPolicy;
use crate::pauli::PauliString;
use crate::temporal::AuxMode;

/// Flat `key = value` pairs; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(Error::Parse { line: k + 1, msg: format!("expected `key = value`, got {line:?}") })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_key_values(&std::fs::read_to_string(path)?)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value {value:?} for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {value:?} for `{key}`"))),
    }
}

/// Settings shared by every experiment.
pub trait ExperimentConfig: Sized + Clone {
    fn set(&mut self, key: &str, value: &str) -> Result<()>;
    fn entries(&self) -> Vec<(&'static str, String)>;
    fn validate(&self) -> Result<()>;

    fn apply(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in kv {
            self.set(k, v)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TDopedConfig {
    pub n: usize,
    pub m_layers: usize,
    pub depth_d: usize,
    pub chi: usize,
    pub svd_cutoff: f64,
    pub realizations: usize,
    pub seed: u64,
    /// Pauli literal; empty means `Z` on qubit `n/2`.
    pub observable: String,
    pub run_baseline: bool,
    pub run_temporal: bool,
    pub aux_mode: AuxMode,
}

impl Default for TDopedConfig {
    fn default() -> Self {
        TDopedConfig {
            n: 16,
            m_layers: 10,
            depth_d: 1,
            chi: 64,
            svd_cutoff: TruncationPolicy::DEFAULT_CUTOFF,
            realizations: 20,
            seed: 1,
            observable: String::new(),
            run_baseline: false,
            run_temporal: false,
            aux_mode: AuxMode::Folded,
        }
    }
}

impl TDopedConfig {
    pub fn observable(&self) -> Result<PauliString> {
        if self.observable.is_empty() {
            return PauliString::single(self.n, self.n / 2, crate::pauli::PauliIndex::Z);
        }
        let p: PauliString = self.observable.parse()?;
        if p.num_qubits() != self.n {
            return Err(Error::Config(format!("observable has {} qubits, expected {}", p.num_qubits(), self.n)));
        }
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        Ok(p)
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { chi_max: self.chi, svd_cutoff: self.svd_cutoff, renormalize: true }
    }
}

impl ExperimentConfig for TDopedConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "m_layers" | "m" => self.m_layers = parse(key, value)?,
            "depth_d" | "d" => self.depth_d = parse(key, value)?,
            "chi" => self.chi = parse(key, value)?,
            "svd_cutoff" => self.svd_cutoff = parse(key, value)?,
            "realizations" => self.realizations = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "observable" => self.observable = value.to_string(),
            "run_baseline" | "baseline" => self.run_baseline = parse_bool(key, value)?,
            "run_temporal" | "temporal" => self.run_temporal = parse_bool(key, value)?,
            "aux_mode" => self.aux_mode = value.parse()?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("m_layers", self.m_layers.to_string()),
            ("depth_d", self.depth_d.to_string()),
            ("chi", self.chi.to_string()),
            ("svd_cutoff", format!("{:e}", self.svd_cutoff)),
            ("realizations", self.realizations.to_string()),
            ("seed", self.seed.to_string()),
            ("observable", self.observable().map(|p| p.to_string()).unwrap_or_default()),
            ("run_baseline", self.run_baseline.to_string()),
            ("run_temporal", self.run_temporal.to_string()),
            ("aux_mode", self.aux_mode.to_string()),
        ]
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config("n must be >= 2".into()));
        }
        for (k, v) in [("depth_d", self.depth_d), ("chi", self.chi), ("realizations", self.realizations)] {
            if v == 0 {
                return Err(Error::Config(format!("{k} must be >= 1")));
            }
        }
        TruncationPolicy::new(self.chi, self.svd_cutoff, true)?;
        self.observable().map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloquetConfig {
    pub n: usize,
    pub epsilon: f64,
    pub periods: usize,
    pub chi: usize,
    pub svd_cutoff: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for FloquetConfig {
    fn default() -> Self {
        FloquetConfig {
            n: 12,
            epsilon: 0.1,
            periods: 15,
            chi: 128,
            svd_cutoff: TruncationPolicy::DEFAULT_CUTOFF,
            realizations: 50,
            seed: 1,
        }
    }
}

impl FloquetConfig {
    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { chi_max: self.chi, svd_cutoff: self.svd_cutoff, renormalize: true }
    }
}

impl ExperimentConfig for FloquetConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "periods" => self.periods = parse(key, value)?,
            "chi" => self.chi = parse(key, value)?,
            "svd_cutoff" => self.svd_cutoff = parse(key, value)?,
            "realizations" => self.realizations = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("epsilon", format!("{:e}", self.epsilon)),
            ("periods", self.periods.to_string()),
            ("chi", self.chi.to_string()),
            ("svd_cutoff", format!("{:e}", self.svd_cutoff)),
            ("realizations", self.realizations.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon must lie in [0, pi/2], got {}", self.epsilon)));
        }
        for (k, v) in [("periods", self.periods), ("chi", self.chi), ("realizations", self.realizations)] {
            if v == 0 {
                return Err(Error::Config(format!("{k} must be >= 1")));
            }
        }
        TruncationPolicy::new(self.chi, self.svd_cutoff, true).map(|_| ())
    }
}
