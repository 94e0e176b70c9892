//! Truncated closed-form MZM coefficients for the carrier and the first three
//! upper sidebands.
//!
//! Each coefficient is `¼ Σ w · Π J_{n_t}(β_t) · cos(Σ c_t φ_t + c_b Δφ)` over a
//! fixed list of terms. The tables below are transcribed term by term and use
//! the sine-phase convention (no `i^n` factors), with `E_0 = 1`.

use serde::{Deserialize, Serialize};

use super::{Mzm, RfDrive};
use crate::error::{invalid, Result};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Upper,
    Lower,
}

/// One product term of a truncated coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTerm {
    pub weight: f64,
    pub arm: Arm,
    /// Bessel order applied to each of the arm's three tones.
    pub orders: [u8; 3],
    /// Integer multipliers of the arm's three tone phases.
    pub phases: [i8; 3],
    /// Multiplier of the bias phase (0 or 1).
    pub bias: i8,
}

const fn up(weight: f64, orders: [u8; 3], phases: [i8; 3]) -> AnalyticTerm {
    AnalyticTerm {
        weight,
        arm: Arm::Upper,
        orders,
        phases,
        bias: 0,
    }
}

const fn lo(weight: f64, orders: [u8; 3], phases: [i8; 3]) -> AnalyticTerm {
    AnalyticTerm {
        weight,
        arm: Arm::Lower,
        orders,
        phases,
        bias: 1,
    }
}

const CARRIER: &[AnalyticTerm] = &[
    up(1.0, [0, 0, 0], [0, 0, 0]),
    up(2.0, [1, 2, 1], [1, -2, 1]),
    lo(1.0, [0, 0, 0], [0, 0, 0]),
    lo(1.0, [1, 2, 1], [-1, 2, -1]),
    lo(1.0, [1, 2, 1], [1, -2, 1]),
];

const FIRST_SIDEBAND: &[AnalyticTerm] = &[
    up(-1.0, [2, 3, 1], [-2, 3, -1]),
    up(-1.0, [1, 1, 0], [-1, 1, 0]),
    up(-1.0, [0, 1, 1], [0, -1, 1]),
    up(-1.0, [1, 3, 2], [1, -3, 2]),
    lo(-1.0, [1, 1, 0], [-1, 1, 0]),
    lo(-1.0, [2, 3, 1], [-2, 3, -1]),
    lo(-1.0, [0, 1, 1], [0, -1, 1]),
    lo(-1.0, [1, 3, 2], [1, -3, 2]),
];

const SECOND_SIDEBAND: &[AnalyticTerm] = &[
    up(1.0, [4, 6, 2], [-4, 6, -2]),
    up(1.0, [2, 2, 0], [-2, 2, 0]),
    up(1.0, [0, 2, 2], [0, -2, 2]),
    lo(1.0, [2, 2, 0], [-2, 2, 0]),
    lo(-1.0, [1, 0, 1], [-1, 0, 1]),
    lo(1.0, [0, 2, 2], [0, -2, 2]),
];

const THIRD_SIDEBAND: &[AnalyticTerm] = &[
    up(-1.0, [4, 5, 1], [-4, 5, -1]),
    up(-1.0, [3, 3, 0], [-3, 3, 0]),
    up(1.0, [2, 1, 1], [-2, 1, 1]),
    up(1.0, [1, 1, 2], [-1, -1, 2]),
    lo(-1.0, [3, 3, 0], [-3, 3, 0]),
    lo(1.0, [2, 1, 1], [-2, 1, 1]),
    lo(1.0, [1, 1, 2], [-1, -1, 2]),
    lo(-1.0, [0, 3, 3], [0, -3, 3]),
];

/// Term tables for bins 0, 1, 2 and 3.
pub const COEFFICIENT_TERMS: [&[AnalyticTerm]; 4] =
    [CARRIER, FIRST_SIDEBAND, SECOND_SIDEBAND, THIRD_SIDEBAND];

/// Overall prefactor `E_0 / 4`.
pub const PREFACTOR: f64 = 0.25;

/// Operating point of a three-tone MZM: `beta[0..3]`/`phi[0..3]` drive the
/// upper arm, `beta[3..6]`/`phi[3..6]` the lower arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzmPoint {
    pub beta: [f64; 6],
    pub phi: [f64; 6],
    pub bias: f64,
}

impl MzmPoint {
    pub fn from_drives(upper: &RfDrive, lower: &RfDrive, bias: f64) -> Result<Self> {
        let mut beta = [0.0; 6];
        let mut phi = [0.0; 6];
        for (slot, drive) in [upper, lower].into_iter().enumerate() {
            let harmonics: Vec<u32> = drive.tones().iter().map(|t| t.harmonic()).collect();
            if harmonics != [1, 2, 3] {
                return Err(invalid("drive", "truncated coefficients need harmonics {1, 2, 3}"));
            }
            for (k, tone) in drive.tones().iter().enumerate() {
                beta[3 * slot + k] = tone.beta();
                phi[3 * slot + k] = tone.phi();
            }
        }
        Ok(Self { beta, phi, bias })
    }

    pub fn from_mzm(mzm: &Mzm) -> Result<Self> {
        Self::from_drives(&mzm.upper, &mzm.lower, mzm.bias)
    }

    pub fn to_mzm(&self) -> Result<Mzm> {
        let drive = |o: usize| {
            RfDrive::three_tone(
                [self.beta[o], self.beta[o + 1], self.beta[o + 2]],
                [self.phi[o], self.phi[o + 1], self.phi[o + 2]],
            )
        };
        Mzm::new(drive(0)?, drive(3)?, self.bias)
    }

    pub(crate) fn arm_offset(arm: Arm) -> usize {
        match arm {
            Arm::Upper => 0,
            Arm::Lower => 3,
        }
    }
}

impl AnalyticTerm {
    pub(crate) fn angle(&self, p: &MzmPoint) -> f64 {
        let base = MzmPoint::arm_offset(self.arm);
        let tones: f64 = (0..3).map(|t| self.phases[t] as f64 * p.phi[base + t]).sum();
        tones + self.bias as f64 * p.bias
    }

    pub(crate) fn bessel_product(&self, p: &MzmPoint) -> Result<f64> {
        let base = MzmPoint::arm_offset(self.arm);
        let mut prod = 1.0;
        for t in 0..3 {
            prod *= specfun::bessel_j(self.orders[t] as i32, p.beta[base + t])?;
        }
        Ok(prod)
    }

    pub(crate) fn value(&self, p: &MzmPoint) -> Result<f64> {
        Ok(self.weight * self.bessel_product(p)? * self.angle(p).cos())
    }
}

/// Signed real amplitudes of the carrier and first three sidebands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients(pub [f64; 4]);

impl FourierCoefficients {
    pub fn carrier(&self) -> f64 {
        self.0[0]
    }

    pub fn first_sideband(&self) -> f64 {
        self.0[1]
    }
}

pub(crate) fn coefficient(bin: usize, p: &MzmPoint) -> Result<f64> {
    let mut sum = 0.0;
    for term in COEFFICIENT_TERMS[bin] {
        sum += term.value(p)?;
    }
    Ok(PREFACTOR * sum)
}

pub(crate) fn coefficients_at(p: &MzmPoint) -> Result<FourierCoefficients> {
    let mut out = [0.0; 4];
    for (bin, slot) in out.iter_mut().enumerate() {
        *slot = coefficient(bin, p)?;
    }
    Ok(FourierCoefficients(out))
}

/// Truncated closed-form coefficients for bins 0..=3 of an MZM whose drives
/// use harmonics 1, 2 and 3. Phases are read in the sine-phase convention.
pub fn analytic_coefficients(upper: &RfDrive, lower: &RfDrive, bias: f64) -> Result<FourierCoefficients> {
    if !bias.is_finite() {
        return Err(invalid("bias", "must be finite"));
    }
    coefficients_at(&MzmPoint::from_drives(upper, lower, bias)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_drive_carrier() {
        let s = RfDrive::silent();
        let c = analytic_coefficients(&s, &s, 0.0).unwrap();
        assert_eq!(c.0, [0.5, 0.0, 0.0, 0.0]);
        let c = analytic_coefficients(&s, &s, PI).unwrap();
        assert!(c.carrier().abs() < 1e-16);
    }

    #[test]
    fn rejects_other_harmonics() {
        let d = RfDrive::new(vec![super::super::RfTone::new(1, 0.1, 0.0).unwrap()]).unwrap();
        assert!(analytic_coefficients(&d, &RfDrive::silent(), 0.0).is_err());
    }

    /// Every transcribed term corresponds to an index triple `(n, m, k)` of the
    /// arm's Bessel expansion with `J_{-n} = (-1)^n J_n` absorbed into the
    /// sign; the phase multipliers are the indices and the orders are their
    /// magnitudes.
    #[test]
    fn terms_are_consistent_bessel_products() {
        for (bin, terms) in COEFFICIENT_TERMS.iter().enumerate() {
            for term in *terms {
                let idx = term.phases.map(|c| c as i32);
                for t in 0..3 {
                    assert_eq!(term.orders[t] as i32, idx[t].abs(), "bin {bin} term {term:?}");
                }
                let neg_odd = idx.iter().filter(|&&n| n < 0 && n % 2 != 0).count();
                let sign = if neg_odd % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(term.weight.signum(), sign, "bin {bin} term {term:?}");
                // the listed triples share n + m + k = 0 and land on `bin`
                assert_eq!(idx.iter().sum::<i32>(), 0);
                assert_eq!(idx[0] + 2 * idx[1] + 3 * idx[2], bin as i32);
            }
        }
    }
}
