use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use freqgate::gates::{parse_target, TransferMatrix};
use freqgate::modulator::{Convention, MixerSpec, Mzm, MzmPoint, NestedMzm, ParamPath, RfDrive, DEFAULT_N_MAX, MAX_BETA, N_MAX_RANGE};
use freqgate::optimizer::GaConfig;
use freqgate::oracle::OracleConfig;
use freqgate::sensitivity::MzmParameter;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Target gate: a name such as `"C4"` or `"X"`, or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Name(String),
    Matrix(MatrixLiteral),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixLiteral {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleCheckConfig {
    pub trials: usize,
    pub beta_max: f64,
    pub seed: u64,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            beta_max: 2.0,
            seed: 0,
        }
    }
}

/// Three-tone MZM operating point (harmonics 1, 2, 3 on each arm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MzmBase {
    pub upper_beta: [f64; 3],
    pub upper_phi: [f64; 3],
    pub lower_beta: [f64; 3],
    pub lower_phi: [f64; 3],
    pub bias: f64,
}

impl Default for MzmBase {
    fn default() -> Self {
        Self {
            upper_beta: [0.5; 3],
            upper_phi: [0.3, 0.7, 1.1],
            lower_beta: [0.5; 3],
            lower_phi: [0.2, 0.9, 1.5],
            bias: 0.4,
        }
    }
}

impl MzmBase {
    pub fn to_mzm(&self) -> anyhow::Result<Mzm> {
        let upper = RfDrive::three_tone(self.upper_beta, self.upper_phi)?;
        let lower = RfDrive::three_tone(self.lower_beta, self.lower_phi)?;
        Ok(Mzm::new(upper, lower, self.bias)?)
    }

    pub fn to_point(&self) -> anyhow::Result<MzmPoint> {
        Ok(MzmPoint::from_mzm(&self.to_mzm()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    /// `bias`, `betaK` or `phiK` with `K` in 1..=6.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    pub base: MzmBase,
    /// Points with `|A₂|` below this are flagged.
    pub threshold: f64,
    pub requests: Vec<SweepRequest>,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        let request = |parameter: &str, start, stop| SweepRequest {
            parameter: parameter.into(),
            start,
            stop,
            points: 301,
        };
        Self {
            base: MzmBase::default(),
            threshold: 1e-3,
            requests: vec![
                request("bias", 0.0, std::f64::consts::TAU),
                request("beta5", 0.05, 3.0),
                request("phi1", 0.0, std::f64::consts::TAU),
                request("phi2", 0.0, std::f64::consts::TAU),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixerKind {
    PhaseModulator,
    Mzm,
    NestedMzm,
}

/// Generic finite-difference sweep of one mixer parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSweepConfig {
    pub mixer: MixerKind,
    /// Tone indices, tone phases and biases in flattened order; each drive
    /// has harmonics 1, 2, 3.
    pub beta: Vec<f64>,
    pub phi: Vec<f64>,
    pub bias: Vec<f64>,
    /// `beta:K`, `phi:K` or `bias:K` with zero-based `K`.
    pub parameter: String,
    /// Bin whose magnitude is differentiated; omit for the truncated `A₂`.
    pub bin: Option<i64>,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub h: f64,
}

impl Default for FdSweepConfig {
    fn default() -> Self {
        Self {
            mixer: MixerKind::Mzm,
            beta: vec![0.5; 6],
            phi: vec![0.3, 0.7, 1.1, 0.2, 0.9, 1.5],
            bias: vec![0.4],
            parameter: "bias:0".into(),
            bin: Some(1),
            start: 0.0,
            stop: std::f64::consts::TAU,
            points: 201,
            h: 1e-6,
        }
    }
}

impl FdSweepConfig {
    pub fn path(&self) -> anyhow::Result<ParamPath> {
        Ok(self.parameter.parse()?)
    }

    pub fn build_mixer(&self) -> anyhow::Result<MixerSpec> {
        let (drives, biases) = match self.mixer {
            MixerKind::PhaseModulator => (1, 0),
            MixerKind::Mzm => (2, 1),
            MixerKind::NestedMzm => (4, 3),
        };
        ensure!(
            self.beta.len() == 3 * drives && self.phi.len() == 3 * drives,
            "sweep: {:?} needs {} beta and phi values",
            self.mixer,
            3 * drives
        );
        ensure!(self.bias.len() == biases, "sweep: {:?} needs {biases} bias values", self.mixer);
        let drive = |d: usize| {
            let k = 3 * d;
            RfDrive::three_tone(
                [self.beta[k], self.beta[k + 1], self.beta[k + 2]],
                [self.phi[k], self.phi[k + 1], self.phi[k + 2]],
            )
        };
        Ok(match self.mixer {
            MixerKind::PhaseModulator => MixerSpec::PhaseModulator(drive(0)?),
            MixerKind::Mzm => MixerSpec::Mzm(Mzm::new(drive(0)?, drive(1)?, self.bias[0])?),
            MixerKind::NestedMzm => MixerSpec::NestedMzm(NestedMzm::new(
                Mzm::new(drive(0)?, drive(1)?, self.bias[0])?,
                Mzm::new(drive(2)?, drive(3)?, self.bias[1])?,
                self.bias[2],
            )?),
        })
    }
}

fn default_n_max() -> u32 {
    DEFAULT_N_MAX
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("run")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: TargetSpec,
    /// Required with a named target; must match a matrix literal.
    pub dim: Option<usize>,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub oracle_check: OracleCheckConfig,
    #[serde(default)]
    pub sensitivity: SensitivityConfig,
    #[serde(default)]
    pub sweep: FdSweepConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that can be checked without running a command.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.target()?;
        self.ga.validate()?;
        self.oracle.validate()?;
        ensure!(
            N_MAX_RANGE.contains(&self.n_max),
            "n_max must lie in [{}, {}], got {}",
            N_MAX_RANGE.start(),
            N_MAX_RANGE.end(),
            self.n_max
        );
        ensure!(
            self.oracle_check.beta_max.is_finite() && (0.0..=3.0).contains(&self.oracle_check.beta_max),
            "oracle_check.beta_max must lie in [0, 3]"
        );
        self.sensitivity.base.to_mzm()?;
        ensure!(self.sensitivity.threshold >= 0.0, "sensitivity.threshold must be >= 0");
        for r in &self.sensitivity.requests {
            let which = r.parameter.parse::<MzmParameter>()?;
            if which.is_beta() {
                ensure!(
                    [r.start, r.stop].iter().all(|v| (0.0..=MAX_BETA).contains(v)),
                    "sensitivity request {} must stay within [0, {MAX_BETA}]",
                    r.parameter
                );
            }
            ensure!(r.points >= 1, "sensitivity request {} needs at least one point", r.parameter);
            ensure!(r.start.is_finite() && r.stop.is_finite(), "sensitivity request range must be finite");
        }
        self.sweep.build_mixer()?.parameter(self.sweep.path()?)?;
        ensure!(self.sweep.points >= 1, "sweep.points must be >= 1");
        ensure!(self.sweep.start.is_finite() && self.sweep.stop.is_finite(), "sweep range must be finite");
        ensure!((1e-9..=1e-3).contains(&self.sweep.h), "sweep.h must lie in [1e-9, 1e-3]");
        Ok(())
    }

    pub fn target(&self) -> anyhow::Result<TransferMatrix> {
        match &self.target {
            TargetSpec::Name(name) => {
                let Some(dim) = self.dim.or_else(|| implied_dim(name)) else {
                    bail!("`dim` is required for target `{name}`");
                };
                Ok(parse_target(name, dim)?)
            }
            TargetSpec::Matrix(m) => {
                ensure!(m.re.len() == m.im.len(), "target re and im must have the same shape");
                let rows = m
                    .re
                    .iter()
                    .zip(&m.im)
                    .map(|(re, im)| {
                        ensure!(re.len() == im.len(), "target re and im must have the same shape");
                        Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
                    })
                    .collect::<anyhow::Result<Vec<Vec<Complex64>>>>()?;
                let t = TransferMatrix::from_rows(rows)?;
                if let Some(dim) = self.dim {
                    ensure!(dim == t.dim(), "dim = {dim} does not match the {0}x{0} target", t.dim());
                }
                Ok(t)
            }
        }
    }
}

/// `C4`-style names carry their dimension.
fn implied_dim(name: &str) -> Option<usize> {
    name.strip_prefix(['C', 'c'])?.parse().ok()
}
