//! Electro-optic mixers acting on frequency-bin spectral envelopes.
//!
//! A phase modulator driven by `m(t) = Σ_j β_j cos(h_j t + φ_j)` multiplies the
//! optical envelope by `exp(i m(t))`. By Jacobi–Anger each tone contributes
//! `Σ_n i^n J_n(β_j) e^{i n φ_j}` at offset `n·h_j`, and the full response is
//! the convolution of the per-tone kernels. Offsets are in units of the free
//! spectral range; the carrier sits at offset 0.

mod analytic;
mod envelope;

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::specfun;

pub use analytic::{analytic_coefficients, AnalyticTerm, Arm, FourierCoefficients, MzmPoint, COEFFICIENT_TERMS, PREFACTOR};
pub(crate) use analytic::coefficient;
pub use envelope::{SpectralEnvelope, PRUNE_THRESHOLD};

/// Largest modulation index a tone may carry.
pub const MAX_BETA: f64 = 3.0;
/// Truncation order used when none is given.
pub const DEFAULT_N_MAX: u32 = 16;
/// Allowed range for the per-index truncation order.
pub const N_MAX_RANGE: std::ops::RangeInclusive<u32> = 1..=40;

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Truncation order suggested for a drive whose largest index is `beta_max`.
pub fn suggested_n_max(beta_max: f64) -> u32 {
    (beta_max.ceil() as u32 + 12).clamp(*N_MAX_RANGE.start(), *N_MAX_RANGE.end())
}

pub(crate) fn check_n_max(n_max: u32) -> Result<()> {
    if !N_MAX_RANGE.contains(&n_max) {
        return Err(invalid("n_max", format!("must lie in [1, 40], got {n_max}")));
    }
    Ok(())
}

/// Phase convention for the tone phases handed to a mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Phases are those of the physical cosine drive.
    #[default]
    ExactCosine,
    /// Phases follow the sine form whose Bessel series carries no `i^n`
    /// factors. Converted to cosine phases by subtracting `π/2`.
    Sine,
}

impl Convention {
    pub fn physical_phase(self, phi: f64) -> f64 {
        match self {
            Convention::ExactCosine => phi,
            Convention::Sine => wrap_phase(phi - FRAC_PI_2),
        }
    }
}

/// One RF tone at an integer multiple of the free spectral range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfTone {
    harmonic: u32,
    beta: f64,
    phi: f64,
}

impl RfTone {
    pub fn new(harmonic: u32, beta: f64, phi: f64) -> Result<Self> {
        if harmonic == 0 {
            return Err(invalid("harmonic", "must be >= 1"));
        }
        if !beta.is_finite() || !(0.0..=MAX_BETA).contains(&beta) {
            return Err(invalid("beta", format!("must lie in [0, {MAX_BETA}], got {beta}")));
        }
        if !phi.is_finite() {
            return Err(invalid("phi", format!("must be finite, got {phi}")));
        }
        Ok(Self {
            harmonic,
            beta,
            phi: wrap_phase(phi),
        })
    }

    pub fn harmonic(&self) -> u32 {
        self.harmonic
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Phase in `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Single-tone kernel `i^n J_n(β) e^{i n φ}` for `n` in `-n_max..=n_max`,
    /// indexed by `n + n_max`.
    fn kernel(&self, n_max: u32) -> Result<Vec<Complex64>> {
        let n_max = n_max as usize;
        let bessel = specfun::bessel_j_table(n_max, self.beta)?;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        // i e^{iφ} raised to the n-th power
        let step = Complex64::from_polar(1.0, self.phi + FRAC_PI_2);
        let mut rot = Complex64::new(1.0, 0.0);
        for (n, &j) in bessel.iter().enumerate() {
            let positive = rot * j;
            out[n_max + n] = positive;
            if n > 0 {
                // J_{-n} = (-1)^n J_n and (i e^{iφ})^{-n} = conj(rot) for |rot| = 1
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                out[n_max - n] = rot.conj() * (sign * j);
            }
            rot *= step;
        }
        Ok(out)
    }
}

/// Multi-tone RF drive for one phase-modulator arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RfDrive {
    tones: Vec<RfTone>,
}

impl RfDrive {
    pub fn new(tones: Vec<RfTone>) -> Result<Self> {
        for pair in tones.windows(2) {
            if pair[1].harmonic <= pair[0].harmonic {
                return Err(invalid("tones", "harmonics must be strictly increasing"));
            }
        }
        Ok(Self { tones })
    }

    /// Three-tone drive on harmonics 1, 2, 3.
    pub fn three_tone(betas: [f64; 3], phis: [f64; 3]) -> Result<Self> {
        let tones = (0..3)
            .map(|k| RfTone::new(k as u32 + 1, betas[k], phis[k]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(tones)
    }

    /// Three-tone drive with every index zero.
    pub fn silent() -> Self {
        Self::three_tone([0.0; 3], [0.0; 3]).expect("zero drive is valid")
    }

    pub fn tones(&self) -> &[RfTone] {
        &self.tones
    }

    pub fn beta_max(&self) -> f64 {
        self.tones.iter().map(|t| t.beta).fold(0.0, f64::max)
    }

    /// Largest offset reachable at truncation `n_max`.
    pub fn reach(&self, n_max: u32) -> i64 {
        self.tones.iter().map(|t| t.harmonic as i64).sum::<i64>() * n_max as i64
    }

    /// Power discarded by truncating every tone at `n_max`, i.e.
    /// `1 - Π_j Σ_{|n|<=n_max} J_n(β_j)^2`.
    pub fn truncation_residual(&self, n_max: u32) -> Result<f64> {
        check_n_max(n_max)?;
        let mut kept = 1.0;
        for tone in &self.tones {
            let t = specfun::bessel_j_table(n_max as usize, tone.beta)?;
            let p = t[0] * t[0] + 2.0 * t[1..].iter().map(|v| v * v).sum::<f64>();
            kept *= p;
        }
        Ok((1.0 - kept).max(0.0))
    }

    pub(crate) fn with_convention(&self, convention: Convention) -> Self {
        let tones = self
            .tones
            .iter()
            .map(|t| RfTone {
                phi: convention.physical_phase(t.phi),
                ..*t
            })
            .collect();
        Self { tones }
    }

    /// Response to a unit carrier at offset 0, as a dense buffer.
    pub(crate) fn response(&self, n_max: u32) -> Result<DenseSpectrum> {
        let mut acc = DenseSpectrum::unit();
        for tone in &self.tones {
            if tone.beta == 0.0 {
                continue;
            }
            let kernel = tone.kernel(n_max)?;
            acc = acc.convolve_strided(&kernel, n_max as i64, tone.harmonic as i64);
        }
        Ok(acc)
    }
}

/// Two phase-modulator arms recombined with a bias phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mzm {
    pub upper: RfDrive,
    pub lower: RfDrive,
    pub bias: f64,
}

impl Mzm {
    pub fn new(upper: RfDrive, lower: RfDrive, bias: f64) -> Result<Self> {
        if !bias.is_finite() {
            return Err(invalid("bias", "must be finite"));
        }
        Ok(Self {
            upper,
            lower,
            bias: wrap_phase(bias),
        })
    }

    pub fn silent(bias: f64) -> Self {
        Self::new(RfDrive::silent(), RfDrive::silent(), bias).expect("finite bias")
    }

    fn response(&self, n_max: u32) -> Result<DenseSpectrum> {
        let upper = self.upper.response(n_max)?;
        let lower = self.lower.response(n_max)?;
        Ok(DenseSpectrum::interfere(&upper, &lower, self.bias))
    }
}

/// Two MZMs inside an outer interferometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedMzm {
    pub inner_a: Mzm,
    pub inner_b: Mzm,
    /// Outer bias; not part of the optimizer genome.
    pub outer_bias: f64,
}

impl NestedMzm {
    pub fn new(inner_a: Mzm, inner_b: Mzm, outer_bias: f64) -> Result<Self> {
        if !outer_bias.is_finite() {
            return Err(invalid("outer_bias", "must be finite"));
        }
        Ok(Self {
            inner_a,
            inner_b,
            outer_bias: wrap_phase(outer_bias),
        })
    }

    fn response(&self, n_max: u32) -> Result<DenseSpectrum> {
        let a = self.inner_a.response(n_max)?;
        let b = self.inner_b.response(n_max)?;
        Ok(DenseSpectrum::interfere(&a, &b, self.outer_bias))
    }
}

/// Mixer topologies available to a processor branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MixerSpec {
    PhaseModulator(RfDrive),
    Mzm(Mzm),
    NestedMzm(NestedMzm),
}

impl MixerSpec {
    /// Same mixer with every tone phase mapped to the physical cosine phase.
    pub fn to_physical(&self, convention: Convention) -> MixerSpec {
        if convention == Convention::ExactCosine {
            return self.clone();
        }
        let mzm = |m: &Mzm| Mzm {
            upper: m.upper.with_convention(convention),
            lower: m.lower.with_convention(convention),
            bias: m.bias,
        };
        match self {
            MixerSpec::PhaseModulator(d) => MixerSpec::PhaseModulator(d.with_convention(convention)),
            MixerSpec::Mzm(m) => MixerSpec::Mzm(mzm(m)),
            MixerSpec::NestedMzm(n) => MixerSpec::NestedMzm(NestedMzm {
                inner_a: mzm(&n.inner_a),
                inner_b: mzm(&n.inner_b),
                outer_bias: n.outer_bias,
            }),
        }
    }

    /// Every drive in the mixer, in flattening order (upper before lower,
    /// inner A before inner B).
    pub fn drives(&self) -> Vec<&RfDrive> {
        match self {
            MixerSpec::PhaseModulator(d) => vec![d],
            MixerSpec::Mzm(m) => vec![&m.upper, &m.lower],
            MixerSpec::NestedMzm(n) => vec![
                &n.inner_a.upper,
                &n.inner_a.lower,
                &n.inner_b.upper,
                &n.inner_b.lower,
            ],
        }
    }

    /// Largest offset the mixer can reach at truncation `n_max`.
    pub fn reach(&self, n_max: u32) -> i64 {
        self.drives().iter().map(|d| d.reach(n_max)).max().unwrap_or(0)
    }

    pub(crate) fn response(&self, n_max: u32) -> Result<DenseSpectrum> {
        check_n_max(n_max)?;
        match self {
            MixerSpec::PhaseModulator(d) => d.response(n_max),
            MixerSpec::Mzm(m) => m.response(n_max),
            MixerSpec::NestedMzm(n) => n.response(n_max),
        }
    }

    /// Output envelope for a unit carrier at offset 0.
    pub fn unit_response(&self, n_max: u32) -> Result<SpectralEnvelope> {
        Ok(self.response(n_max)?.into_envelope(n_max))
    }

    /// Applies the mixer to an arbitrary input envelope.
    pub fn apply(&self, input: &SpectralEnvelope, n_max: u32) -> Result<SpectralEnvelope> {
        let response = self.response(n_max)?;
        Ok(input.convolve(&response, n_max))
    }

    /// Random three-tone mixer of the given topology with indices in
    /// `[0, beta_max]`, uniform phases and uniform biases.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, topology: Topology, beta_max: f64) -> MixerSpec {
        let drive = |rng: &mut R| {
            let betas = [(); 3].map(|_| rng.random_range(0.0..=beta_max));
            let phis = [(); 3].map(|_| rng.random_range(0.0..TAU));
            RfDrive::three_tone(betas, phis).expect("sampled within bounds")
        };
        let mzm = |rng: &mut R| {
            let upper = drive(rng);
            let lower = drive(rng);
            Mzm::new(upper, lower, rng.random_range(0.0..TAU)).expect("finite bias")
        };
        match topology {
            Topology::PhaseModulator => MixerSpec::PhaseModulator(drive(rng)),
            Topology::Mzm => MixerSpec::Mzm(mzm(rng)),
            Topology::NestedMzm => {
                let a = mzm(rng);
                let b = mzm(rng);
                let outer = rng.random_range(0.0..TAU);
                MixerSpec::NestedMzm(NestedMzm::new(a, b, outer).expect("finite bias"))
            }
        }
    }
}

/// Address of one scalar parameter of a mixer. Tone indices run over the
/// drives in [`MixerSpec::drives`] order and each drive's tones in order;
/// bias indices run over the MZM bias, or inner A, inner B and outer bias of
/// a nested MZM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamPath {
    Beta(usize),
    Phi(usize),
    Bias(usize),
}

impl std::str::FromStr for ParamPath {
    type Err = crate::Error;

    /// Parses `beta:K`, `phi:K` or `bias:K` with zero-based `K`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, index) = s
            .split_once(':')
            .ok_or_else(|| invalid("parameter", format!("expected kind:index, got `{s}`")))?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| invalid("parameter", format!("bad index in `{s}`")))?;
        match kind.trim() {
            "beta" => Ok(ParamPath::Beta(index)),
            "phi" => Ok(ParamPath::Phi(index)),
            "bias" => Ok(ParamPath::Bias(index)),
            other => Err(invalid("parameter", format!("unknown parameter kind `{other}`"))),
        }
    }
}

impl MixerSpec {
    fn biases(&self) -> Vec<f64> {
        match self {
            MixerSpec::PhaseModulator(_) => vec![],
            MixerSpec::Mzm(m) => vec![m.bias],
            MixerSpec::NestedMzm(n) => vec![n.inner_a.bias, n.inner_b.bias, n.outer_bias],
        }
    }

    fn tone_at(&self, index: usize) -> Result<RfTone> {
        self.drives()
            .into_iter()
            .flat_map(|d| d.tones.iter().copied())
            .nth(index)
            .ok_or_else(|| invalid("parameter", format!("tone index {index} out of range")))
    }

    pub fn parameter(&self, path: ParamPath) -> Result<f64> {
        match path {
            ParamPath::Beta(k) => Ok(self.tone_at(k)?.beta),
            ParamPath::Phi(k) => Ok(self.tone_at(k)?.phi),
            ParamPath::Bias(k) => self
                .biases()
                .get(k)
                .copied()
                .ok_or_else(|| invalid("parameter", format!("bias index {k} out of range"))),
        }
    }

    /// Copy of the mixer with one parameter replaced; the new value is
    /// validated like any other tone or bias.
    pub fn with_parameter(&self, path: ParamPath, value: f64) -> Result<MixerSpec> {
        self.parameter(path)?;
        let mut out = self.clone();
        match path {
            ParamPath::Beta(k) | ParamPath::Phi(k) => {
                let mut seen = 0;
                let drives: Vec<&mut RfDrive> = match &mut out {
                    MixerSpec::PhaseModulator(d) => vec![d],
                    MixerSpec::Mzm(m) => vec![&mut m.upper, &mut m.lower],
                    MixerSpec::NestedMzm(n) => vec![
                        &mut n.inner_a.upper,
                        &mut n.inner_a.lower,
                        &mut n.inner_b.upper,
                        &mut n.inner_b.lower,
                    ],
                };
                for drive in drives {
                    if k < seen + drive.tones.len() {
                        let t = drive.tones[k - seen];
                        drive.tones[k - seen] = match path {
                            ParamPath::Beta(_) => RfTone::new(t.harmonic, value, t.phi)?,
                            _ => RfTone::new(t.harmonic, t.beta, value)?,
                        };
                        break;
                    }
                    seen += drive.tones.len();
                }
            }
            ParamPath::Bias(k) => {
                if !value.is_finite() {
                    return Err(invalid("bias", "must be finite"));
                }
                let v = wrap_phase(value);
                match (&mut out, k) {
                    (MixerSpec::Mzm(m), 0) => m.bias = v,
                    (MixerSpec::NestedMzm(n), 0) => n.inner_a.bias = v,
                    (MixerSpec::NestedMzm(n), 1) => n.inner_b.bias = v,
                    (MixerSpec::NestedMzm(n), 2) => n.outer_bias = v,
                    _ => unreachable!("index checked above"),
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    PhaseModulator,
    Mzm,
    NestedMzm,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::PhaseModulator, Topology::Mzm, Topology::NestedMzm];
}

/// Phase-modulator output for `input`.
pub fn modulate_phase(input: &SpectralEnvelope, drive: &RfDrive, n_max: u32) -> Result<SpectralEnvelope> {
    check_n_max(n_max)?;
    Ok(input.convolve(&drive.response(n_max)?, n_max))
}

/// MZM output `½(upper + e^{i·bias} lower)` for `input`.
pub fn modulate_mzm(
    input: &SpectralEnvelope,
    upper: &RfDrive,
    lower: &RfDrive,
    bias: f64,
    n_max: u32,
) -> Result<SpectralEnvelope> {
    let mzm = Mzm::new(upper.clone(), lower.clone(), bias)?;
    MixerSpec::Mzm(mzm).apply(input, n_max)
}

/// Nested-MZM output `½(inner_a + e^{i·outer_bias} inner_b)` for `input`.
pub fn modulate_nested(input: &SpectralEnvelope, spec: &NestedMzm, n_max: u32) -> Result<SpectralEnvelope> {
    MixerSpec::NestedMzm(spec.clone()).apply(input, n_max)
}

/// Contiguous spectrum buffer: `data[k]` holds the amplitude at offset
/// `min_offset + k`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DenseSpectrum {
    pub(crate) min_offset: i64,
    pub(crate) data: Vec<Complex64>,
}

impl DenseSpectrum {
    fn unit() -> Self {
        Self {
            min_offset: 0,
            data: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub(crate) fn get(&self, offset: i64) -> Complex64 {
        let k = offset - self.min_offset;
        if k < 0 || k as usize >= self.data.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.data[k as usize]
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, &a)| (self.min_offset + k as i64, a))
    }

    /// Convolves with a kernel whose entry `n + half` sits at offset `n·stride`.
    fn convolve_strided(&self, kernel: &[Complex64], half: i64, stride: i64) -> Self {
        let reach = half * stride;
        let len = self.data.len() + 2 * reach as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (i, &a) in self.data.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, &w) in kernel.iter().enumerate() {
                out[i + k * stride as usize] += a * w;
            }
        }
        Self {
            min_offset: self.min_offset - reach,
            data: out,
        }
    }

    /// `½(first + e^{i·phase} second)`.
    fn interfere(first: &Self, second: &Self, phase: f64) -> Self {
        let lo = first.min_offset.min(second.min_offset);
        let hi = (first.min_offset + first.data.len() as i64).max(second.min_offset + second.data.len() as i64);
        let rot = Complex64::from_polar(1.0, phase);
        let data = (lo..hi)
            .map(|o| 0.5 * (first.get(o) + rot * second.get(o)))
            .collect();
        Self { min_offset: lo, data }
    }

    pub(crate) fn into_envelope(self, n_max: u32) -> SpectralEnvelope {
        SpectralEnvelope::from_dense(self.iter(), n_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_spectrum, OracleConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit() -> SpectralEnvelope {
        SpectralEnvelope::unit(DEFAULT_N_MAX)
    }

    fn oracle_error(spec: &MixerSpec, n_max: u32) -> f64 {
        let exact = spec.unit_response(n_max).unwrap();
        let cfg = OracleConfig {
            max_offset: 6 * n_max,
            ..OracleConfig::default()
        };
        let oracle = oracle_spectrum(spec, &cfg).unwrap();
        exact.max_abs_diff(&oracle)
    }

    #[test]
    fn zero_drive_is_identity() {
        let out = modulate_phase(&unit(), &RfDrive::silent(), 5).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.get(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_tone_magnitudes_are_bessel() {
        let drive = RfDrive::new(vec![RfTone::new(1, 1.5, 0.0).unwrap()]).unwrap();
        let out = modulate_phase(&unit(), &drive, 20).unwrap();
        for n in -5..=5 {
            let j = specfun::bessel_j(n, 1.5).unwrap().abs();
            assert!((out.get(n as i64).norm() - j).abs() < 1e-14);
        }
        assert!(oracle_error(&MixerSpec::PhaseModulator(drive), 20) < 1e-9);
    }

    #[test]
    fn three_tone_matches_oracle() {
        let drive = RfDrive::three_tone([0.8, 0.5, 0.3], [0.2, 1.1, 2.0]).unwrap();
        assert!(oracle_error(&MixerSpec::PhaseModulator(drive), 12) < 1e-9);
    }

    #[test]
    fn mzm_constructive_and_destructive() {
        let s = RfDrive::silent();
        let on = modulate_mzm(&unit(), &s, &s, 0.0, 16).unwrap();
        assert!((on.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let off = modulate_mzm(&unit(), &s, &s, PI, 16).unwrap();
        assert!(off.iter().all(|(_, a)| a.norm() < 1e-15));
    }

    #[test]
    fn mzm_matches_oracle() {
        let upper = RfDrive::three_tone([0.6, 0.0, 0.0], [0.0; 3]).unwrap();
        let lower = RfDrive::three_tone([0.0, 0.6, 0.0], [0.0; 3]).unwrap();
        let spec = MixerSpec::Mzm(Mzm::new(upper, lower, PI / 3.0).unwrap());
        assert!(oracle_error(&spec, 16) < 1e-9);
    }

    #[test]
    fn nested_identity_and_extinction() {
        let n = NestedMzm::new(Mzm::silent(0.0), Mzm::silent(0.0), 0.0).unwrap();
        let out = modulate_nested(&unit(), &n, 16).unwrap();
        assert!((out.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let n = NestedMzm::new(Mzm::silent(PI), Mzm::silent(PI), 0.0).unwrap();
        let out = modulate_nested(&unit(), &n, 16).unwrap();
        assert!(out.iter().all(|(_, a)| a.norm() < 1e-15));
    }

    #[test]
    fn nested_random_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = MixerSpec::random(&mut rng, Topology::NestedMzm, 2.0);
        assert!(oracle_error(&spec, 16) < 1e-9);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(RfTone::new(0, 0.1, 0.0).is_err());
        assert!(RfTone::new(1, 3.1, 0.0).is_err());
        assert!(RfTone::new(1, -0.1, 0.0).is_err());
        assert!(RfTone::new(1, f64::NAN, 0.0).is_err());
        let t = RfTone::new(2, 0.1, 0.0).unwrap();
        assert!(RfDrive::new(vec![t, t]).is_err());
        assert!(modulate_phase(&unit(), &RfDrive::silent(), 0).is_err());
        assert!(modulate_phase(&unit(), &RfDrive::silent(), 41).is_err());
    }

    #[test]
    fn phase_is_normalized() {
        let t = RfTone::new(1, 0.1, -0.5).unwrap();
        assert!((t.phi() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(wrap_phase(-1e-18), 0.0);
        assert_eq!(wrap_phase(TAU), 0.0);
    }

    #[test]
    fn truncation_residual_shrinks() {
        let d = RfDrive::three_tone([2.0, 2.0, 2.0], [0.0; 3]).unwrap();
        let coarse = d.truncation_residual(2).unwrap();
        let fine = d.truncation_residual(20).unwrap();
        assert!(coarse > 1e-3);
        assert!(fine < 1e-14);
    }

    #[test]
    fn sine_convention_removes_i_factors() {
        // exp(iβ sin(t + φ)) = Σ J_n(β) e^{in(t+φ)}
        let drive = RfDrive::new(vec![RfTone::new(1, 0.9, 0.4).unwrap()]).unwrap();
        let spec = MixerSpec::PhaseModulator(drive).to_physical(Convention::Sine);
        let out = spec.unit_response(20).unwrap();
        for n in -4i32..=4 {
            let want = Complex64::from_polar(specfun::bessel_j(n, 0.9).unwrap(), n as f64 * 0.4);
            assert!((out.get(n as i64) - want).norm() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn parameter_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = MixerSpec::random(&mut rng, Topology::NestedMzm, 1.0);
        let drives = spec.drives();
        assert_eq!(spec.parameter(ParamPath::Beta(4)).unwrap(), drives[1].tones()[1].beta());
        assert_eq!(spec.parameter(ParamPath::Phi(11)).unwrap(), drives[3].tones()[2].phi());
        let moved = spec.with_parameter(ParamPath::Beta(7), 0.25).unwrap();
        assert_eq!(moved.parameter(ParamPath::Beta(7)).unwrap(), 0.25);
        assert_eq!(moved.parameter(ParamPath::Beta(6)).unwrap(), spec.parameter(ParamPath::Beta(6)).unwrap());
        let moved = spec.with_parameter(ParamPath::Bias(2), -0.5).unwrap();
        assert!((moved.parameter(ParamPath::Bias(2)).unwrap() - (TAU - 0.5)).abs() < 1e-15);
        assert!(spec.parameter(ParamPath::Beta(12)).is_err());
        assert!(spec.parameter(ParamPath::Bias(3)).is_err());
        assert!(spec.with_parameter(ParamPath::Beta(0), 4.0).is_err());
        assert_eq!("phi:3".parse::<ParamPath>().unwrap(), ParamPath::Phi(3));
        assert!("gain:1".parse::<ParamPath>().is_err());
        assert!("beta".parse::<ParamPath>().is_err());
    }

    #[test]
    fn suggested_order() {
        assert_eq!(suggested_n_max(0.3), 13);
        assert_eq!(suggested_n_max(3.0), 15);
    }
}
