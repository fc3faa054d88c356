use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lif::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// One-step estimates versus leakage.
    Fig1,
    /// Iterative reconstruction traces.
    FigIter,
    /// Time-quantization sweep.
    Quant,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::FigIter => "figiter",
            ExperimentKind::Quant => "quant",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(ExperimentKind::Fig1),
            "figiter" => Ok(ExperimentKind::FigIter),
            "quant" => Ok(ExperimentKind::Quant),
            other => Err(Error::Config(format!(
                "unknown experiment {other:?} (fig1, figiter, quant)"
            ))),
        }
    }
}

/// Experiment settings. Stored as a flat key/value TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Period in Nyquist periods, odd.
    pub period: usize,
    /// Evaluation ensemble size.
    pub ensemble: usize,
    /// Wiener training ensemble size.
    pub training: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub polarities: Vec<Polarity>,
    /// Target spikes per Nyquist period.
    pub density: f64,
    /// Second, denser arm of the iteration experiment.
    pub dense_density: f64,
    /// Nyquist samples are drawn uniformly in `[-amplitude, amplitude]`.
    pub amplitude: f64,
    pub offset_unipolar: f64,
    pub offset_bipolar: f64,
    pub iterations: usize,
    /// Time resolutions of the quantization sweep, in bits per Nyquist period.
    pub bits: Vec<u32>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: Option<ExperimentKind>,
    period: Option<usize>,
    ensemble: Option<usize>,
    training: Option<usize>,
    seed: Option<u64>,
    alphas: Option<Vec<f64>>,
    polarities: Option<Vec<Polarity>>,
    density: Option<f64>,
    dense_density: Option<f64>,
    amplitude: Option<f64>,
    offset_unipolar: Option<f64>,
    offset_bipolar: Option<f64>,
    iterations: Option<usize>,
    bits: Option<Vec<u32>>,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            period: 61,
            ensemble: 100,
            training: 1000,
            seed: 1,
            alphas: vec![0.03, 0.1, 0.2, 0.5, 1.0, 1.5],
            polarities: vec![Polarity::Unipolar, Polarity::Bipolar],
            density: 1.5,
            dense_density: 2.0,
            amplitude: 0.7,
            offset_unipolar: 1.0,
            offset_bipolar: 0.0,
            iterations: 0,
            bits: Vec::new(),
        };
        match kind {
            ExperimentKind::Fig1 => base,
            ExperimentKind::FigIter => Self {
                alphas: vec![0.03, 1.5],
                iterations: 300,
                ..base
            },
            ExperimentKind::Quant => Self {
                alphas: vec![0.03],
                polarities: vec![Polarity::Unipolar],
                density: 2.0,
                iterations: 300,
                bits: (4..=10).collect(),
                ..base
            },
        }
    }

    /// Parses a TOML document over the defaults of its experiment. `kind`
    /// supplies the experiment when the document has none, and must agree with
    /// it otherwise.
    pub fn from_toml_str(s: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let f: ConfigFile = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let kind = match (f.experiment, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for {a} but {b} was requested")));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("config does not name an experiment".into())),
        };
        let d = Self::defaults(kind);
        let cfg = Self {
            experiment: kind,
            period: f.period.unwrap_or(d.period),
            ensemble: f.ensemble.unwrap_or(d.ensemble),
            training: f.training.unwrap_or(d.training),
            seed: f.seed.unwrap_or(d.seed),
            alphas: f.alphas.unwrap_or(d.alphas),
            polarities: f.polarities.unwrap_or(d.polarities),
            density: f.density.unwrap_or(d.density),
            dense_density: f.dense_density.unwrap_or(d.dense_density),
            amplitude: f.amplitude.unwrap_or(d.amplitude),
            offset_unipolar: f.offset_unipolar.unwrap_or(d.offset_unipolar),
            offset_bipolar: f.offset_bipolar.unwrap_or(d.offset_bipolar),
            iterations: f.iterations.unwrap_or(d.iterations),
            bits: f.bits.unwrap_or(d.bits),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, kind: Option<ExperimentKind>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?, kind)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn offset_for(&self, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Unipolar => self.offset_unipolar,
            Polarity::Bipolar => self.offset_bipolar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.period == 0 || self.period % 2 == 0 {
            return bad(format!("period must be odd, got {}", self.period));
        }
        if self.ensemble == 0 {
            return bad("ensemble must be >= 1".into());
        }
        if self.experiment != ExperimentKind::Quant && self.training == 0 {
            return bad("training must be >= 1".into());
        }
        for (name, v) in [
            ("density", self.density),
            ("dense_density", self.dense_density),
            ("amplitude", self.amplitude),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return bad(format!(
                "alphas must be a non-empty list of values > 0, got {:?}",
                self.alphas
            ));
        }
        if self.polarities.is_empty() {
            return bad("polarities must not be empty".into());
        }
        if !(self.offset_unipolar > 0.0) {
            return bad(format!("offset_unipolar must be > 0, got {}", self.offset_unipolar));
        }
        if self.experiment == ExperimentKind::Quant
            && (self.bits.is_empty() || self.bits.iter().any(|&b| b == 0 || b > 40))
        {
            return bad(format!("bits must be a non-empty list in 1..=40, got {:?}", self.bits));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::from_toml_str("experiment = \"fig1\"\nseed = 9\nalphas = [0.5]\n", None).unwrap();
        assert_eq!(c.period, 61);
        assert_eq!(c.seed, 9);
        assert_eq!(c.alphas, vec![0.5]);
        let q = ExperimentConfig::from_toml_str("", Some(ExperimentKind::Quant)).unwrap();
        assert_eq!(q.bits, (4..=10).collect::<Vec<_>>());
        assert_eq!(q.density, 2.0);
        let back = ExperimentConfig::from_toml_str(&q.to_toml().unwrap(), None).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(ExperimentConfig::from_toml_str("", None).is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"fig1\"\nperiod = 60\n", None).is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"fig1\"\nunknown = 1\n", None).is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"fig1\"", Some(ExperimentKind::Quant)).is_err());
        assert!(ExperimentConfig::from_toml_str("density = 0.0", Some(ExperimentKind::Fig1)).is_err());
        assert!("fig2".parse::<ExperimentKind>().is_err());
    }
}
