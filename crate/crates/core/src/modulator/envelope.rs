use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DenseSpectrum;
use crate::error::{invalid, Result};

/// Amplitudes with magnitude below this are dropped from envelopes.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

const MAGNITUDE_SLACK: f64 = 1e-9;

/// Sparse complex amplitudes keyed by integer bin offset from the reference
/// carrier, in field units where the input carrier is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEnvelope {
    amplitudes: BTreeMap<i64, Complex64>,
    truncation_order: u32,
}

impl SpectralEnvelope {
    /// Unit carrier at offset 0.
    pub fn unit(truncation_order: u32) -> Self {
        Self::single(0, Complex64::new(1.0, 0.0), truncation_order)
    }

    pub fn single(offset: i64, amplitude: Complex64, truncation_order: u32) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(offset, amplitude);
        Self {
            amplitudes,
            truncation_order,
        }
    }

    /// Builds an envelope, rejecting non-finite amplitudes or magnitudes
    /// above one.
    pub fn new(amplitudes: BTreeMap<i64, Complex64>, truncation_order: u32) -> Result<Self> {
        for (&offset, a) in &amplitudes {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(invalid("amplitudes", format!("non-finite amplitude at offset {offset}")));
            }
            if a.norm() > 1.0 + MAGNITUDE_SLACK {
                return Err(invalid(
                    "amplitudes",
                    format!("|a| = {} exceeds 1 at offset {offset}", a.norm()),
                ));
            }
        }
        let amplitudes = amplitudes
            .into_iter()
            .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD)
            .collect();
        Ok(Self {
            amplitudes,
            truncation_order,
        })
    }

    pub(crate) fn from_dense(
        iter: impl Iterator<Item = (i64, Complex64)>,
        truncation_order: u32,
    ) -> Self {
        let amplitudes = iter.filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD).collect();
        Self {
            amplitudes,
            truncation_order,
        }
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    /// Amplitude at `offset`, zero when absent.
    pub fn get(&self, offset: i64) -> Complex64 {
        self.amplitudes
            .get(&offset)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored `(offset, amplitude)` pairs in ascending offset order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&o, &a)| (o, a))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn power(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest `|a_b - b_b|` over the union of stored offsets.
    pub fn max_abs_diff(&self, other: &SpectralEnvelope) -> f64 {
        let mine = self.iter().map(|(o, a)| (a - other.get(o)).norm());
        let theirs = other
            .iter()
            .filter(|(o, _)| !self.amplitudes.contains_key(o))
            .map(|(_, a)| a.norm());
        mine.chain(theirs).fold(0.0, f64::max)
    }

    pub(crate) fn convolve(&self, response: &DenseSpectrum, truncation_order: u32) -> Self {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (b, a) in self.iter() {
            for (o, r) in response.iter() {
                *out.entry(b + o).or_insert(Complex64::new(0.0, 0.0)) += a * r;
            }
        }
        Self::from_dense(out.into_iter(), truncation_order)
    }
}
