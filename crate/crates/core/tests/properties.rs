use std::collections::BTreeMap;
use std::f64::consts::TAU;

use freqgate::gates::chrestenson;
use freqgate::modulator::{
    modulate_phase, wrap_phase, MixerSpec, Mzm, NestedMzm, RfDrive, RfTone, SpectralEnvelope,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn drive(max_beta: f64) -> impl Strategy<Value = RfDrive> {
    (
        prop::array::uniform3(0.0..=max_beta),
        prop::array::uniform3(0.0..TAU),
    )
        .prop_map(|(b, p)| RfDrive::three_tone(b, p).unwrap())
}

fn mzm(max_beta: f64) -> impl Strategy<Value = Mzm> {
    (drive(max_beta), drive(max_beta), 0.0..TAU).prop_map(|(u, l, bias)| Mzm::new(u, l, bias).unwrap())
}

fn envelope() -> impl Strategy<Value = SpectralEnvelope> {
    prop::collection::btree_map(-4i64..=4, (-0.3f64..0.3, -0.3f64..0.3), 1..5).prop_map(|m| {
        let amps: BTreeMap<i64, Complex64> = m.into_iter().map(|(k, (re, im))| (k, Complex64::new(re, im))).collect();
        SpectralEnvelope::new(amps, 16).unwrap()
    })
}

fn add(a: &SpectralEnvelope, b: &SpectralEnvelope, scale: Complex64) -> BTreeMap<i64, Complex64> {
    let mut out: BTreeMap<i64, Complex64> = a.iter().collect();
    for (k, v) in b.iter() {
        *out.entry(k).or_default() += scale * v;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_modulator_conserves_power(d in drive(2.0)) {
        let out = modulate_phase(&SpectralEnvelope::unit(20), &d, 20).unwrap();
        prop_assert!((out.power() - 1.0).abs() < 1e-12, "power {}", out.power());
    }

    #[test]
    fn mzm_is_passive(m in mzm(2.0)) {
        let out = MixerSpec::Mzm(m).unit_response(20).unwrap();
        prop_assert!(out.power() <= 1.0 + 1e-9);
    }

    #[test]
    fn nested_is_passive(a in mzm(2.0), b in mzm(2.0), outer in 0.0..TAU) {
        let spec = MixerSpec::NestedMzm(NestedMzm::new(a, b, outer).unwrap());
        prop_assert!(spec.unit_response(20).unwrap().power() <= 1.0 + 1e-9);
    }

    #[test]
    fn mixers_are_linear(m in mzm(1.5), x in envelope(), y in envelope(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let s = Complex64::new(re, im) * 0.5;
        let spec = MixerSpec::Mzm(m);
        let combined = SpectralEnvelope::new(add(&x, &y, s), 16).unwrap();
        let lhs = spec.apply(&combined, 16).unwrap();
        let rhs = add(&spec.apply(&x, 16).unwrap(), &spec.apply(&y, 16).unwrap(), s);
        for (k, v) in rhs {
            prop_assert!((lhs.get(k) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn single_tone_phase_covariance(beta in 0.0f64..2.0, phi in 0.0..TAU, shift in 0.0..TAU) {
        let a = RfDrive::new(vec![RfTone::new(1, beta, phi).unwrap()]).unwrap();
        let b = RfDrive::new(vec![RfTone::new(1, beta, phi + shift).unwrap()]).unwrap();
        let ea = MixerSpec::PhaseModulator(a).unit_response(16).unwrap();
        let eb = MixerSpec::PhaseModulator(b).unit_response(16).unwrap();
        for n in -16i64..=16 {
            let rotated = ea.get(n) * Complex64::from_polar(1.0, n as f64 * shift);
            prop_assert!((eb.get(n) - rotated).norm() < 1e-12);
        }
    }

    #[test]
    fn wrapped_phase_in_range(phi in -1e3f64..1e3) {
        let w = wrap_phase(phi);
        prop_assert!((0.0..TAU).contains(&w));
        let turns = (phi - w) / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn chrestenson_unitary(dim in 2usize..=16) {
        prop_assert!(chrestenson(dim).unwrap().unitarity_error() < 1e-12);
    }
}
