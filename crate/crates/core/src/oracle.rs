//! Brute-force ground truth for mixer spectra.
//!
//! The complex envelope is sampled over one period of the fundamental drive
//! frequency and each bin is extracted as
//! `A_b = (1/K) Σ_k E(t_k) e^{-i b t_k}`, which is exact for band-limited
//! periodic envelopes once `K` exceeds the occupied bandwidth.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::modulator::{MixerSpec, Mzm, RfDrive, SpectralEnvelope, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Time samples over one period; a power of two, at least 4096.
    pub samples_per_period: usize,
    /// Bins with `|b| <= max_offset` are extracted.
    pub max_offset: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            samples_per_period: 16384,
            max_offset: 96,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.samples_per_period;
        if k < 4096 || !k.is_power_of_two() {
            return Err(invalid(
                "samples_per_period",
                format!("must be a power of two >= 4096, got {k}"),
            ));
        }
        if 2 * self.max_offset as usize >= k {
            return Err(invalid("max_offset", "extraction band exceeds the sample count"));
        }
        Ok(())
    }
}

fn drive_phase(drive: &RfDrive, t: f64) -> f64 {
    drive
        .tones()
        .iter()
        .map(|tone| tone.beta() * (tone.harmonic() as f64 * t + tone.phi()).cos())
        .sum()
}

fn arm_field(drive: &RfDrive, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, drive_phase(drive, t))
}

fn mzm_field(m: &Mzm, t: f64) -> Complex64 {
    0.5 * (arm_field(&m.upper, t) + Complex64::from_polar(1.0, m.bias) * arm_field(&m.lower, t))
}

/// Output envelope of `spec` at time `t` for a unit carrier input.
pub fn time_domain_field(spec: &MixerSpec, t: f64) -> Complex64 {
    match spec {
        MixerSpec::PhaseModulator(d) => arm_field(d, t),
        MixerSpec::Mzm(m) => mzm_field(m, t),
        MixerSpec::NestedMzm(n) => {
            0.5 * (mzm_field(&n.inner_a, t)
                + Complex64::from_polar(1.0, n.outer_bias) * mzm_field(&n.inner_b, t))
        }
    }
}

/// Bin amplitudes of `spec` extracted from time samples.
pub fn oracle_spectrum(spec: &MixerSpec, config: &OracleConfig) -> Result<SpectralEnvelope> {
    config.validate()?;
    let k = config.samples_per_period;
    let mut samples: Vec<Complex64> = (0..k)
        .map(|i| time_domain_field(spec, TAU * i as f64 / k as f64))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(k);
    fft.process(&mut samples);
    let scale = 1.0 / k as f64;
    let band = config.max_offset as i64;
    let bins = (-band..=band).map(|b| {
        let idx = b.rem_euclid(k as i64) as usize;
        (b, samples[idx] * scale)
    });
    Ok(SpectralEnvelope::from_dense(bins, config.max_offset.div_ceil(6)))
}

/// Largest per-bin difference between the analytic and sampled spectra over
/// `trials` seeded random specs of every topology with indices up to
/// `beta_max`.
pub fn random_check(trials: usize, beta_max: f64, seed: u64, n_max: u32, config: &OracleConfig) -> Result<f64> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        for topology in Topology::ALL {
            let spec = MixerSpec::random(&mut rng, topology, beta_max);
            let fast = spec.unit_response(n_max)?;
            worst = worst.max(fast.max_abs_diff(&oracle_spectrum(&spec, config)?));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulator::RfTone;
    use crate::specfun::bessel_j;
    use std::f64::consts::PI;

    #[test]
    fn silent_phase_modulator() {
        let spec = MixerSpec::PhaseModulator(RfDrive::silent());
        let out = oracle_spectrum(&spec, &OracleConfig::default()).unwrap();
        assert!((out.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(out.iter().filter(|(b, _)| *b != 0).all(|(_, a)| a.norm() < 1e-14));
    }

    #[test]
    fn single_tone_is_bessel() {
        let drive = RfDrive::new(vec![RfTone::new(1, 1.5, 0.0).unwrap()]).unwrap();
        let out = oracle_spectrum(&MixerSpec::PhaseModulator(drive), &OracleConfig::default()).unwrap();
        for n in -10..=10 {
            let j = bessel_j(n, 1.5).unwrap().abs();
            assert!((out.get(n as i64).norm() - j).abs() < 1e-10);
        }
    }

    #[test]
    fn extinguished_mzm() {
        let spec = MixerSpec::Mzm(Mzm::silent(PI));
        let out = oracle_spectrum(&spec, &OracleConfig::default()).unwrap();
        assert!(out.iter().all(|(_, a)| a.norm() < 1e-14));
    }

    #[test]
    fn doubling_samples_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for topology in Topology::ALL {
            let spec = MixerSpec::random(&mut rng, topology, 2.0);
            let coarse = oracle_spectrum(&spec, &OracleConfig::default()).unwrap();
            let fine = oracle_spectrum(
                &spec,
                &OracleConfig {
                    samples_per_period: 32768,
                    ..OracleConfig::default()
                },
            )
            .unwrap();
            assert!(coarse.max_abs_diff(&fine) < 1e-12);
        }
    }

    #[test]
    fn phase_modulator_power_is_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let spec = MixerSpec::random(&mut rng, Topology::PhaseModulator, 2.0);
            let p = oracle_spectrum(&spec, &OracleConfig::default()).unwrap().power();
            assert!((p - 1.0).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let spec = MixerSpec::PhaseModulator(RfDrive::silent());
        for k in [1024, 5000] {
            let cfg = OracleConfig {
                samples_per_period: k,
                ..OracleConfig::default()
            };
            assert!(oracle_spectrum(&spec, &cfg).is_err());
        }
    }

    #[test]
    fn random_check_passes_and_detects_truncation() {
        let cfg = OracleConfig::default();
        assert!(random_check(0, 2.0, 1, 16, &cfg).unwrap() == 0.0);
        assert!(random_check(5, 0.0, 1, 16, &cfg).unwrap() < 1e-14);
        assert!(random_check(5, 2.0, 1, 16, &cfg).unwrap() < 1e-9);
        assert!(random_check(5, 2.0, 1, 2, &cfg).unwrap() > 1e-9);
    }
}
