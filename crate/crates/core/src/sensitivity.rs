//! Normalized-Jacobian sensitivity of the truncated first-sideband
//! coefficient `A₂` of a three-tone MZM.
//!
//! Phase-like parameters use `S = (1/A₂) ∂A₂/∂p`; modulation indices use
//! `S = (β/A₂) ∂A₂/∂β`. Derivatives are taken term by term on the
//! coefficient tables, with `J'_n = (J_{n-1} - J_{n+1}) / 2`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modulator::{coefficient, wrap_phase, MixerSpec, MzmPoint, ParamPath, COEFFICIENT_TERMS, PREFACTOR, MAX_BETA};
use crate::specfun::{bessel_j, bessel_j_derivative};

const FIRST_SIDEBAND_BIN: usize = 1;

/// `|A₂|` at or below this is reported as near-singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Parameter of a three-tone MZM, numbered as `β₁..β₆` and `φ₁..φ₆`
/// (upper arm first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MzmParameter {
    Bias,
    Beta(usize),
    Phi(usize),
}

impl MzmParameter {
    fn slot(index: usize) -> Result<usize> {
        if !(1..=6).contains(&index) {
            return Err(invalid("parameter", format!("tone index must be 1..=6, got {index}")));
        }
        Ok(index - 1)
    }

    pub fn is_beta(&self) -> bool {
        matches!(self, MzmParameter::Beta(_))
    }

    /// Matching address in a [`MixerSpec::Mzm`].
    pub fn path(&self) -> Result<ParamPath> {
        Ok(match *self {
            MzmParameter::Bias => ParamPath::Bias(0),
            MzmParameter::Beta(k) => ParamPath::Beta(Self::slot(k)?),
            MzmParameter::Phi(k) => ParamPath::Phi(Self::slot(k)?),
        })
    }

    pub fn get(&self, p: &MzmPoint) -> Result<f64> {
        Ok(match *self {
            MzmParameter::Bias => p.bias,
            MzmParameter::Beta(k) => p.beta[Self::slot(k)?],
            MzmParameter::Phi(k) => p.phi[Self::slot(k)?],
        })
    }

    /// Copy of `p` with this parameter set to `value`; phases are wrapped
    /// into `[0, 2π)`.
    pub fn set(&self, p: &MzmPoint, value: f64) -> Result<MzmPoint> {
        if !value.is_finite() {
            return Err(invalid("value", "must be finite"));
        }
        let mut out = *p;
        match *self {
            MzmParameter::Bias => out.bias = wrap_phase(value),
            MzmParameter::Phi(k) => out.phi[Self::slot(k)?] = wrap_phase(value),
            MzmParameter::Beta(k) => {
                if !(0.0..=MAX_BETA).contains(&value) {
                    return Err(invalid("beta", format!("must lie in [0, {MAX_BETA}], got {value}")));
                }
                out.beta[Self::slot(k)?] = value;
            }
        }
        Ok(out)
    }
}

impl FromStr for MzmParameter {
    type Err = Error;

    /// Accepts `bias` (or `delta_phi`), `betaK` and `phiK` for K in 1..=6.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "bias" || s == "delta_phi" {
            return Ok(MzmParameter::Bias);
        }
        let parse = |rest: &str| -> Result<usize> {
            let k: usize = rest
                .parse()
                .map_err(|_| invalid("parameter", format!("unknown parameter `{s}`")))?;
            MzmParameter::slot(k).map(|_| k)
        };
        if let Some(rest) = s.strip_prefix("beta") {
            return Ok(MzmParameter::Beta(parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("phi") {
            return Ok(MzmParameter::Phi(parse(rest)?));
        }
        Err(invalid("parameter", format!("unknown parameter `{s}`")))
    }
}

impl fmt::Display for MzmParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MzmParameter::Bias => f.write_str("bias"),
            MzmParameter::Beta(k) => write!(f, "beta{k}"),
            MzmParameter::Phi(k) => write!(f, "phi{k}"),
        }
    }
}

/// A sensitivity value with the `A₂` it was normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityValue {
    pub value: f64,
    pub amplitude: f64,
    pub near_singular: bool,
}

/// Truncated first-sideband coefficient `A₂`.
pub fn first_sideband(p: &MzmPoint) -> Result<f64> {
    coefficient(FIRST_SIDEBAND_BIN, p)
}

/// `∂A₂/∂p` by term-wise differentiation.
pub fn first_sideband_derivative(p: &MzmPoint, which: MzmParameter) -> Result<f64> {
    let mut sum = 0.0;
    for term in COEFFICIENT_TERMS[FIRST_SIDEBAND_BIN] {
        let base = MzmPoint::arm_offset(term.arm);
        let local = |k: usize| -> Option<usize> {
            let slot = MzmParameter::slot(k).ok()?;
            (base..base + 3).contains(&slot).then(|| slot - base)
        };
        let angle = term.angle(p);
        sum += match which {
            MzmParameter::Bias => -term.weight * term.bessel_product(p)? * angle.sin() * term.bias as f64,
            MzmParameter::Phi(k) => match local(k) {
                Some(t) => -term.weight * term.bessel_product(p)? * angle.sin() * term.phases[t] as f64,
                None => 0.0,
            },
            MzmParameter::Beta(k) => match local(k) {
                Some(t) => {
                    let mut prod = 1.0;
                    for s in 0..3 {
                        let order = term.orders[s] as i32;
                        let beta = p.beta[base + s];
                        prod *= if s == t {
                            bessel_j_derivative(order, beta)?
                        } else {
                            bessel_j(order, beta)?
                        };
                    }
                    term.weight * prod * angle.cos()
                }
                None => 0.0,
            },
        };
    }
    Ok(PREFACTOR * sum)
}

fn normalized(p: &MzmPoint, which: MzmParameter) -> Result<SensitivityValue> {
    let a = first_sideband(p)?;
    let mut s = first_sideband_derivative(p, which)? / a;
    if let MzmParameter::Beta(_) = which {
        s *= which.get(p)?;
    }
    Ok(SensitivityValue {
        value: s,
        amplitude: a,
        near_singular: a.abs() <= SINGULAR_THRESHOLD,
    })
}

/// `(1/A₂) ∂A₂/∂p` for the bias or a tone phase, evaluated with the
/// parameter set to `value`.
pub fn sensitivity_phase(p: &MzmPoint, which: MzmParameter, value: f64) -> Result<SensitivityValue> {
    if which.is_beta() {
        return Err(invalid("which", "use sensitivity_beta for modulation indices"));
    }
    normalized(&which.set(p, value)?, which)
}

/// `(β/A₂) ∂A₂/∂β` for modulation index `k` (1..=6) set to `value`.
pub fn sensitivity_beta(p: &MzmPoint, k: usize, value: f64) -> Result<SensitivityValue> {
    let which = MzmParameter::Beta(k);
    normalized(&which.set(p, value)?, which)
}

/// Closed-form sensitivities for `Δφ`, `β₅`, `φ₁` and `φ₂`, transcribed
/// verbatim. `None` for other parameters.
pub fn closed_form(p: &MzmPoint, which: MzmParameter) -> Result<Option<f64>> {
    let j = |n: i32, k: usize| bessel_j(n, p.beta[k - 1]);
    let ph = |k: usize| p.phi[k - 1];
    let d = p.bias;
    let (j0, j1, j2, j3, j4) = (0, 1, 2, 3, 4);

    let a1 = 2.0 * ph(1) - 3.0 * ph(2) + ph(3);
    let a2 = ph(1) - 3.0 * ph(2) + 2.0 * ph(3);
    let a3 = ph(1) - ph(2);
    let a4 = ph(2) - ph(3);
    let b1 = d - 2.0 * ph(4) + 3.0 * ph(5) - ph(6);
    let b2 = d + ph(4) - 3.0 * ph(5) + 2.0 * ph(6);
    let b3 = d - ph(4) + ph(5);
    let b4 = d - ph(5) + ph(6);

    let denominator = j(j2, 1)? * j(j3, 2)? * j(j1, 3)? * a1.cos()
        + j(j1, 1)? * j(j3, 2)? * j(j2, 3)? * a2.cos()
        + j(j1, 1)? * j(j1, 2)? * j(j0, 3)? * a3.cos()
        + j(j0, 1)? * j(j1, 2)? * j(j1, 3)? * a4.cos()
        + j(j2, 4)? * j(j3, 5)? * j(j1, 6)? * b1.cos()
        + j(j1, 4)? * j(j3, 5)? * j(j2, 6)? * b2.cos()
        + j(j1, 4)? * j(j1, 5)? * j(j0, 6)? * b3.cos()
        + j(j0, 4)? * j(j1, 5)? * j(j1, 6)? * b4.cos();

    let value = match which {
        MzmParameter::Bias => {
            let num = j(j1, 6)? * (j(j2, 4)? * j(j3, 5)? * b1.sin() + j(j0, 4)? * j(j1, 5)? * b4.sin())
                + j(j1, 4)? * j(j3, 5)? * j(j2, 6)? * b2.sin()
                + j(j1, 4)? * j(j1, 5)? * j(j0, 6)? * b3.sin();
            -num / denominator
        }
        MzmParameter::Beta(5) => {
            let beta5 = p.beta[4];
            let hi = j(j2, 5)? - j(j4, 5)?;
            let lo = j(j0, 5)? - j(j2, 5)?;
            let num = j(j2, 4)? * hi * j(j1, 6)? * b1.cos()
                + j(j1, 4)? * hi * j(j2, 6)? * b2.cos()
                + j(j1, 4)? * lo * j(j0, 6)? * b3.cos()
                + j(j0, 4)? * lo * j(j1, 6)? * b4.cos();
            beta5 * num / (2.0 * denominator)
        }
        MzmParameter::Phi(1) => {
            let num = j(j3, 2)? * (2.0 * j(j2, 1)? * j(j1, 3)? * a1.sin() + j(j1, 1)? * j(j2, 3)? * a2.sin())
                + j(j1, 1)? * j(j1, 2)? * j(j0, 3)? * a3.sin();
            -num / denominator
        }
        MzmParameter::Phi(2) => {
            let num = 3.0 * j(j3, 2)? * (j(j2, 1)? * j(j1, 3)? * a1.sin() + j(j1, 1)? * j(j2, 3)? * a2.sin())
                + j(j1, 1)? * j(j1, 2)? * j(j0, 3)? * a3.sin()
                - j(j0, 1)? * j(j1, 2)? * j(j1, 3)? * a4.sin();
            num / denominator
        }
        _ => return Ok(None),
    };
    Ok(Some(value))
}

/// What a finite-difference sensitivity differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Truncated `A₂` of a three-tone MZM (signed real).
    FirstSidebandAnalytic,
    /// `|A_b|` of the exact mixer spectrum at offset `b`.
    BinMagnitude(i64),
}

/// Central-difference normalized sensitivity of `observable` to the mixer
/// parameter at `path`. Modulation indices get the `β` multiplier.
pub fn sensitivity_fd(
    mixer: &MixerSpec,
    path: ParamPath,
    observable: Observable,
    h: f64,
    n_max: u32,
) -> Result<SensitivityValue> {
    if !(1e-9..=1e-3).contains(&h) {
        return Err(invalid("h", format!("step must lie in [1e-9, 1e-3], got {h}")));
    }
    let eval = |m: &MixerSpec| -> Result<f64> {
        match observable {
            Observable::FirstSidebandAnalytic => match m {
                MixerSpec::Mzm(mzm) => first_sideband(&MzmPoint::from_mzm(mzm)?),
                _ => Err(Error::UnsupportedMixer("truncated A₂ needs a single MZM".into())),
            },
            Observable::BinMagnitude(b) => Ok(m.unit_response(n_max)?.get(b).norm()),
        }
    };
    let base = mixer.parameter(path)?;
    let f0 = eval(mixer)?;
    let near_singular = f0.abs() <= SINGULAR_THRESHOLD;
    let is_beta = matches!(path, ParamPath::Beta(_));
    if is_beta && base == 0.0 {
        return Ok(SensitivityValue {
            value: 0.0,
            amplitude: f0,
            near_singular,
        });
    }
    let plus = eval(&mixer.with_parameter(path, base + h)?)?;
    let minus = eval(&mixer.with_parameter(path, base - h)?)?;
    let derivative = (plus - minus) / (2.0 * h);
    let scale = if is_beta { base } else { 1.0 };
    Ok(SensitivityValue {
        value: scale * derivative / f0,
        amplitude: f0,
        near_singular,
    })
}

/// Sensitivity sampled over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub parameter: MzmParameter,
    pub values: Vec<f64>,
    pub sensitivities: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// Grid points with `|A₂|` below the curve threshold.
    pub near_singular: Vec<bool>,
    /// Zeros of `A₂` located by bisection between sign changes.
    pub poles: Vec<f64>,
}

impl SensitivityCurve {
    /// Two-column text: parameter value and sensitivity. Poles and flagged
    /// points are listed as `#` comments.
    pub fn to_columns(&self) -> String {
        let mut s = format!("# {} S\n", self.parameter);
        for pole in &self.poles {
            s.push_str(&format!("# pole {pole:?}\n"));
        }
        for ((v, sv), flag) in self.values.iter().zip(&self.sensitivities).zip(&self.near_singular) {
            if *flag {
                s.push_str(&format!("# near-singular {v:?}\n"));
            }
            s.push_str(&format!("{v:?} {sv:?}\n"));
        }
        s
    }
}

fn bisect_zero(p: &MzmPoint, which: MzmParameter, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f = |x: f64| -> Result<f64> { first_sideband(&which.set(p, x)?) };
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evaluates the sensitivity to `which` at every grid value; points with
/// `|A₂| < threshold` are flagged and sign changes of `A₂` are bisected.
pub fn sweep(p: &MzmPoint, which: MzmParameter, values: &[f64], threshold: f64) -> Result<SensitivityCurve> {
    let points = values
        .par_iter()
        .map(|&v| normalized(&which.set(p, v)?, which))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes: Vec<f64> = points.iter().map(|s| s.amplitude).collect();
    let mut poles = Vec::new();
    for k in 1..values.len() {
        let (a, b) = (amplitudes[k - 1], amplitudes[k]);
        if a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0) {
            poles.push(bisect_zero(p, which, values[k - 1], values[k])?);
        } else if b == 0.0 {
            poles.push(values[k]);
        }
    }
    Ok(SensitivityCurve {
        parameter: which,
        values: values.to_vec(),
        sensitivities: points.iter().map(|s| s.value).collect(),
        near_singular: amplitudes.iter().map(|a| a.abs() < threshold).collect(),
        amplitudes,
        poles,
    })
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulator::{Mzm, RfDrive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn reference_point() -> MzmPoint {
        MzmPoint {
            beta: [0.5, 0.6, 0.4, 0.7, 0.5, 0.3],
            phi: [0.3, 0.8, 1.7, 0.2, 0.9, 1.5],
            bias: 0.4,
        }
    }

    fn zero_phase_point(beta: [f64; 6]) -> MzmPoint {
        MzmPoint {
            beta,
            phi: [0.0; 6],
            bias: 0.0,
        }
    }

    /// Central difference of A₂ itself, independent of the term-wise path.
    fn fd_oracle(p: &MzmPoint, which: MzmParameter, h: f64) -> f64 {
        let x = which.get(p).unwrap();
        let nudge = |v: f64| {
            let mut q = *p;
            match which {
                MzmParameter::Bias => q.bias = v,
                MzmParameter::Beta(k) => q.beta[k - 1] = v,
                MzmParameter::Phi(k) => q.phi[k - 1] = v,
            }
            first_sideband(&q).unwrap()
        };
        let d = (nudge(x + h) - nudge(x - h)) / (2.0 * h);
        let a = first_sideband(p).unwrap();
        if which.is_beta() {
            x * d / a
        } else {
            d / a
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn zero_phases_give_zero_phase_sensitivity() {
        let p = zero_phase_point([0.7, 0.4, 0.9, 0.3, 1.2, 0.6]);
        for which in [MzmParameter::Bias, MzmParameter::Phi(1), MzmParameter::Phi(2)] {
            assert_eq!(sensitivity_phase(&p, which, 0.0).unwrap().value, 0.0);
            assert_eq!(closed_form(&p, which).unwrap().unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_beta5_gives_zero() {
        let p = reference_point();
        assert_eq!(sensitivity_beta(&p, 5, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn reference_point_matches_fd() {
        let p = reference_point();
        let mut q = p;
        q.phi[1] = 0.7;
        let s = sensitivity_phase(&p, MzmParameter::Phi(2), 0.7).unwrap();
        let fd = fd_oracle(&q, MzmParameter::Phi(2), 1e-6);
        assert!(rel(s.value, fd) < 1e-5, "{} {fd}", s.value);
        let mut q = p;
        q.beta[4] = 0.5;
        let s = sensitivity_beta(&p, 5, 0.5).unwrap();
        assert!(rel(s.value, fd_oracle(&q, MzmParameter::Beta(5), 1e-6)) < 1e-5);
    }

    #[test]
    fn termwise_matches_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = MzmPoint {
                beta: [(); 6].map(|_| rng.random_range(0.05..2.0)),
                phi: [(); 6].map(|_| rng.random_range(0.0..TAU)),
                bias: rng.random_range(0.0..TAU),
            };
            if first_sideband(&p).unwrap().abs() < 1e-3 {
                continue;
            }
            for which in [MzmParameter::Bias, MzmParameter::Beta(5), MzmParameter::Phi(1), MzmParameter::Phi(2)] {
                let termwise = normalized(&p, which).unwrap().value;
                let closed = closed_form(&p, which).unwrap().unwrap();
                assert!(
                    (termwise - closed).abs() <= 1e-10 * termwise.abs().max(1.0),
                    "{which}: {termwise} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn all_parameters_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 100 {
            let p = MzmPoint {
                beta: [(); 6].map(|_| rng.random_range(0.05..1.0)),
                phi: [(); 6].map(|_| rng.random_range(0.0..TAU)),
                bias: rng.random_range(0.0..TAU),
            };
            if first_sideband(&p).unwrap().abs() <= 1e-3 {
                continue;
            }
            checked += 1;
            let mut params = vec![MzmParameter::Bias];
            params.extend((1..=6).map(MzmParameter::Beta));
            params.extend((1..=6).map(MzmParameter::Phi));
            for which in params {
                let s = normalized(&p, which).unwrap().value;
                let fd = fd_oracle(&p, which, 1e-6);
                assert!(
                    (s - fd).abs() <= 1e-5 * s.abs().max(fd.abs()).max(1e-3),
                    "{which}: {s} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn periodic_in_phase() {
        let p = reference_point();
        for which in [MzmParameter::Bias, MzmParameter::Phi(1), MzmParameter::Phi(2)] {
            let a = sensitivity_phase(&p, which, 0.0).unwrap();
            let b = sensitivity_phase(&p, which, TAU).unwrap();
            assert_eq!(a, b);
            let a = sensitivity_phase(&p, which, 1.3).unwrap().value;
            let b = sensitivity_phase(&p, which, 1.3 + TAU).unwrap().value;
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn fd_on_bins() {
        let mixer = MixerSpec::Mzm(Mzm::silent(0.0));
        let s = sensitivity_fd(&mixer, ParamPath::Bias(0), Observable::BinMagnitude(0), 1e-6, 16).unwrap();
        assert!(s.value.abs() < 1e-9);
        assert!(sensitivity_fd(&mixer, ParamPath::Bias(0), Observable::BinMagnitude(0), 1e-2, 16).is_err());
        let pm = MixerSpec::PhaseModulator(RfDrive::silent());
        assert!(matches!(
            sensitivity_fd(&pm, ParamPath::Phi(0), Observable::FirstSidebandAnalytic, 1e-6, 16),
            Err(Error::UnsupportedMixer(_))
        ));
    }

    #[test]
    fn fd_converges_quadratically() {
        let p = reference_point();
        let upper = RfDrive::three_tone([0.5, 0.6, 0.4], [0.3, 0.8, 1.7]).unwrap();
        let lower = RfDrive::three_tone([0.7, 0.5, 0.3], [0.2, 0.9, 1.5]).unwrap();
        let mixer = MixerSpec::Mzm(Mzm::new(upper, lower, p.bias).unwrap());
        let s = |h| {
            sensitivity_fd(&mixer, ParamPath::Phi(0), Observable::FirstSidebandAnalytic, h, 16)
                .unwrap()
                .value
        };
        let d1 = (s(1e-4) - s(5e-5)).abs();
        let d2 = (s(5e-5) - s(2.5e-5)).abs();
        // halving h shrinks the O(h^2) error by four
        assert!(d2 < d1 / 3.0, "{d1} {d2}");
    }

    #[test]
    fn parses_parameters() {
        assert_eq!("beta5".parse::<MzmParameter>().unwrap(), MzmParameter::Beta(5));
        assert_eq!("phi1".parse::<MzmParameter>().unwrap(), MzmParameter::Phi(1));
        assert_eq!("delta_phi".parse::<MzmParameter>().unwrap(), MzmParameter::Bias);
        assert!("phi7".parse::<MzmParameter>().is_err());
        assert!("gamma1".parse::<MzmParameter>().is_err());
        assert_eq!(MzmParameter::Beta(5).to_string(), "beta5");
    }

    #[test]
    fn beta_sweep_locates_poles() {
        let p = reference_point();
        let grid = linspace(0.05, 3.0, 300);
        let curve = sweep(&p, MzmParameter::Beta(5), &grid, 1e-6).unwrap();
        for pole in &curve.poles {
            let a = first_sideband(&MzmParameter::Beta(5).set(&p, *pole).unwrap()).unwrap();
            assert!(a.abs() < 1e-12, "A₂({pole}) = {a}");
        }
        for (s, a) in curve.sensitivities.iter().zip(&curve.amplitudes) {
            if a.abs() > 1e-6 {
                assert!(s.is_finite());
            }
        }
        assert_eq!(curve.values.len(), curve.sensitivities.len());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, TAU, 5);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], TAU);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
