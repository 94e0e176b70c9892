//! Parallel mixer bank: a demultiplexer routes input bin `j` to its own mixer,
//! the mixer output is weighted, and the multiplexer recombines everything.
//! Branch `j` therefore fills column `j` of the transfer matrix, and the
//! in-band window of that branch is offsets `-j ..= D-1-j` from its input
//! color.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gates::TransferMatrix;
use crate::modulator::{check_n_max, Convention, MixerSpec, SpectralEnvelope};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub input_bin: usize,
    pub mixer: MixerSpec,
    /// Final weight and phase; `|w| <= 1`.
    pub output_weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessorConfig {
    dim: usize,
    branches: Vec<BranchConfig>,
    n_max: u32,
    convention: Convention,
}

impl ProcessorConfig {
    /// Validates and orders the branches by input bin.
    pub fn new(dim: usize, mut branches: Vec<BranchConfig>, n_max: u32, convention: Convention) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("dim", format!("must be >= 2, got {dim}")));
        }
        check_n_max(n_max)?;
        if branches.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: branches.len(),
            });
        }
        branches.sort_by_key(|b| b.input_bin);
        for (j, b) in branches.iter().enumerate() {
            if b.input_bin != j {
                return Err(invalid("branches", "need exactly one branch per input bin 0..D"));
            }
            let w = b.output_weight;
            if !w.re.is_finite() || !w.im.is_finite() || w.norm() > 1.0 + 1e-12 {
                return Err(invalid("output_weight", format!("branch {j}: |w| must be <= 1")));
            }
        }
        Ok(Self {
            dim,
            branches,
            n_max,
            convention,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[BranchConfig] {
        &self.branches
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Weighted output envelope of branch `j` for a unit input.
    pub fn branch_spectrum(&self, j: usize) -> Result<SpectralEnvelope> {
        let b = self.branches.get(j).ok_or(Error::DimensionMismatch {
            expected: self.dim,
            actual: j,
        })?;
        let response = b.mixer.to_physical(self.convention).response(self.n_max)?;
        let w = b.output_weight;
        Ok(SpectralEnvelope::from_dense(
            response.iter().map(|(o, a)| (o, w * a)),
            self.n_max,
        ))
    }
}

/// Relative offsets landing on absolute bins `0..D` for input bin `j`.
pub fn column_window(dim: usize, j: usize) -> Result<Vec<i64>> {
    if j >= dim {
        return Err(invalid("j", format!("input bin {j} outside 0..{dim}")));
    }
    let j = j as i64;
    Ok((0..dim as i64).map(|i| i - j).collect())
}

/// In-band amplitudes and leakage of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchColumn {
    pub column: Vec<Complex64>,
    pub leakage: f64,
}

/// Column `j` of the transfer matrix realized by `mixer` and `weight`.
pub fn branch_column(
    mixer: &MixerSpec,
    weight: Complex64,
    j: usize,
    dim: usize,
    n_max: u32,
    convention: Convention,
) -> Result<BranchColumn> {
    column_window(dim, j)?;
    let response = mixer.to_physical(convention).response(n_max)?;
    let lo = -(j as i64);
    let hi = (dim - 1 - j) as i64;
    let column = (lo..=hi).map(|o| weight * response.get(o)).collect();
    let leakage = response
        .iter()
        .filter(|(o, _)| *o < lo || *o > hi)
        .map(|(_, a)| (weight * a).norm_sqr())
        .sum();
    Ok(BranchColumn { column, leakage })
}

/// `Σ_i |target_i - column_i|^2 + leakage` for a single branch.
pub fn branch_cost(target_column: &[Complex64], branch: &BranchColumn) -> f64 {
    let c_in: f64 = target_column
        .iter()
        .zip(&branch.column)
        .map(|(t, v)| (t - v).norm_sqr())
        .sum();
    c_in + branch.leakage
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub matrix: TransferMatrix,
    pub leakage_per_branch: Vec<f64>,
    pub cost_in: f64,
    pub cost_out: f64,
    pub cost_total: f64,
    pub fidelity: f64,
}

/// Assembles the transfer matrix and scores it against `target`.
pub fn evaluate(config: &ProcessorConfig, target: &TransferMatrix) -> Result<EvaluationResult> {
    if target.dim() != config.dim {
        return Err(Error::DimensionMismatch {
            expected: config.dim,
            actual: target.dim(),
        });
    }
    let columns = config
        .branches
        .par_iter()
        .map(|b| {
            branch_column(
                &b.mixer,
                b.output_weight,
                b.input_bin,
                config.dim,
                config.n_max,
                config.convention,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = TransferMatrix::zeros(config.dim)?;
    for (j, c) in columns.iter().enumerate() {
        matrix.set_column(j, &c.column);
    }
    let leakage_per_branch: Vec<f64> = columns.iter().map(|c| c.leakage).collect();
    let cost_in = target.distance_sqr(&matrix)?;
    let cost_out: f64 = leakage_per_branch.iter().sum();
    let fidelity = fidelity(target, &matrix)?;
    Ok(EvaluationResult {
        matrix,
        leakage_per_branch,
        cost_in,
        cost_out,
        cost_total: cost_in + cost_out,
        fidelity,
    })
}

/// `|tr(target† T)|^2 / (D ‖T‖_F^2)`, zero for a zero matrix.
pub fn fidelity(target: &TransferMatrix, t: &TransferMatrix) -> Result<f64> {
    target.check_dim(t.dim())?;
    let norm = t.frobenius_norm_sqr();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let overlap = target.adjoint().matmul(t)?.trace();
    Ok(overlap.norm_sqr() / (t.dim() as f64 * norm))
}

pub fn apply_state(matrix: &TransferMatrix, state: &[Complex64]) -> Result<Vec<Complex64>> {
    matrix.check_dim(state.len())?;
    let d = matrix.dim();
    Ok((0..d)
        .map(|i| (0..d).map(|j| matrix[(i, j)] * state[j]).sum())
        .collect())
}

/// Best complex rescaling `s` of `t` toward `target` and the residual
/// `‖target - s t‖_F`.
pub fn scale_optimal_distance(t: &TransferMatrix, target: &TransferMatrix) -> Result<(Complex64, f64)> {
    t.check_dim(target.dim())?;
    let norm = t.frobenius_norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let s = t.adjoint().matmul(target)?.trace() / norm;
    let residual = target.distance_sqr(&t.scaled(s))?;
    Ok((s, residual.max(0.0).sqrt()))
}

/// In-band row of a branch: relative offset, absolute bin and amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InBandEntry {
    pub offset: i64,
    pub bin: usize,
    pub magnitude: f64,
    pub phase: f64,
}

pub fn in_band_table(matrix: &TransferMatrix, j: usize) -> Result<Vec<InBandEntry>> {
    let window = column_window(matrix.dim(), j)?;
    Ok(window
        .into_iter()
        .enumerate()
        .map(|(bin, offset)| {
            let a = matrix[(bin, j)];
            InBandEntry {
                offset,
                bin,
                magnitude: a.norm(),
                phase: a.arg(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::chrestenson;
    use crate::modulator::{Mzm, NestedMzm, RfDrive, Topology};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn silent_nested() -> MixerSpec {
        MixerSpec::NestedMzm(NestedMzm::new(Mzm::silent(0.0), Mzm::silent(0.0), 0.0).unwrap())
    }

    fn silent_config(dim: usize) -> ProcessorConfig {
        let branches = (0..dim)
            .map(|j| BranchConfig {
                input_bin: j,
                mixer: silent_nested(),
                output_weight: one(),
            })
            .collect();
        ProcessorConfig::new(dim, branches, 16, Convention::ExactCosine).unwrap()
    }

    fn random_config(seed: u64, dim: usize) -> ProcessorConfig {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let branches = (0..dim)
            .map(|j| BranchConfig {
                input_bin: j,
                mixer: MixerSpec::random(&mut rng, Topology::NestedMzm, 1.5),
                output_weight: Complex64::from_polar(0.9, 0.3 * j as f64),
            })
            .collect();
        ProcessorConfig::new(dim, branches, 16, Convention::ExactCosine).unwrap()
    }

    #[test]
    fn zero_drive_gives_identity() {
        let c4 = chrestenson(4).unwrap();
        let r = evaluate(&silent_config(4), &c4).unwrap();
        let id = TransferMatrix::identity(4).unwrap();
        assert!(r.matrix.max_abs_diff(&id).unwrap() < 1e-15);
        assert!(r.leakage_per_branch.iter().all(|&l| l == 0.0));
        let baseline = c4.distance_sqr(&id).unwrap();
        assert!((r.cost_in - baseline).abs() < 1e-15);
        assert_eq!(r.cost_total, r.cost_in + r.cost_out);
    }

    #[test]
    fn self_target() {
        let cfg = random_config(3, 4);
        let t = evaluate(&cfg, &chrestenson(4).unwrap()).unwrap().matrix;
        let r = evaluate(&cfg, &t).unwrap();
        assert_eq!(r.cost_in, 0.0);
        let n = t.frobenius_norm_sqr();
        assert!((r.fidelity - n / 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_cost() {
        let c4 = chrestenson(4).unwrap();
        let z = TransferMatrix::zeros(4).unwrap();
        assert!((c4.distance_sqr(&z).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(fidelity(&c4, &z).unwrap(), 0.0);
        assert_eq!(scale_optimal_distance(&z, &c4), Err(Error::ZeroMatrix));
    }

    #[test]
    fn windows() {
        assert_eq!(column_window(4, 0).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(column_window(4, 1).unwrap(), vec![-1, 0, 1, 2]);
        assert_eq!(column_window(4, 2).unwrap(), vec![-2, -1, 0, 1]);
        assert_eq!(column_window(4, 3).unwrap(), vec![-3, -2, -1, 0]);
        assert!(column_window(4, 4).is_err());
        for d in 2..10 {
            for j in 0..d {
                let w = column_window(d, j).unwrap();
                assert_eq!(w.len(), d);
                assert!(w.contains(&0));
            }
        }
    }

    #[test]
    fn state_application() {
        let c4 = chrestenson(4).unwrap();
        let mut e0 = vec![Complex64::new(0.0, 0.0); 4];
        e0[0] = one();
        let out = apply_state(&c4, &e0).unwrap();
        assert!(out.iter().all(|v| (v - Complex64::new(0.5, 0.0)).norm() < 1e-15));
        let mut e1 = vec![Complex64::new(0.0, 0.0); 4];
        e1[1] = one();
        let out = apply_state(&c4, &e1).unwrap();
        let want = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)];
        for (v, w) in out.iter().zip(want) {
            assert!((v - Complex64::new(w.0, w.1)).norm() < 1e-15);
        }
        let v = vec![Complex64::new(0.3, -0.1), one(), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.5)];
        assert_eq!(apply_state(&TransferMatrix::identity(4).unwrap(), &v).unwrap(), v);
        assert!(apply_state(&c4, &v[..3]).is_err());
    }

    #[test]
    fn scale_optimal_cases() {
        let c4 = chrestenson(4).unwrap();
        let (s, d) = scale_optimal_distance(&c4, &c4).unwrap();
        assert!((s - one()).norm() < 1e-14 && d < 1e-7);
        let (s, d) = scale_optimal_distance(&c4.scaled(Complex64::new(0.5, 0.0)), &c4).unwrap();
        assert!((s - Complex64::new(2.0, 0.0)).norm() < 1e-14 && d < 1e-7);
        // trace(C4) = (1 + i - ... ) summed by hand from the literal rows: 1/2 (1 + i + 1 + i)
        let trace = Complex64::new(1.0, 1.0);
        let want = (4.0 - trace.norm_sqr() / 4.0_f64).sqrt();
        let (_, d) = scale_optimal_distance(&TransferMatrix::identity(4).unwrap(), &c4).unwrap();
        assert!((d - want).abs() < 1e-14);
    }

    #[test]
    fn column_independence() {
        let cfg = random_config(9, 4);
        let target = chrestenson(4).unwrap();
        let base = evaluate(&cfg, &target).unwrap();
        let mut branches = cfg.branches().to_vec();
        branches[2].mixer = MixerSpec::random(&mut ChaCha8Rng::seed_from_u64(99), Topology::NestedMzm, 1.5);
        let changed = ProcessorConfig::new(4, branches, 16, Convention::ExactCosine).unwrap();
        let r = evaluate(&changed, &target).unwrap();
        for j in 0..4 {
            let same = base.matrix.column(j) == r.matrix.column(j);
            assert_eq!(same, j != 2, "column {j}");
            assert_eq!(base.leakage_per_branch[j] == r.leakage_per_branch[j], j != 2);
        }
    }

    #[test]
    fn passive_branches() {
        for seed in 0..20 {
            let cfg = random_config(seed, 4);
            let r = evaluate(&cfg, &chrestenson(4).unwrap()).unwrap();
            for j in 0..4 {
                let w = cfg.branches()[j].output_weight.norm_sqr();
                let inband: f64 = r.matrix.column(j).iter().map(|v| v.norm_sqr()).sum();
                assert!((inband + r.leakage_per_branch[j]) / w <= 1.0 + 1e-9);
            }
            assert!(r.cost_in >= 0.0 && r.cost_out >= 0.0);
            assert!((0.0..=1.0 + 1e-12).contains(&r.fidelity));
        }
    }

    #[test]
    fn deterministic() {
        let cfg = random_config(4, 5);
        let t = chrestenson(5).unwrap();
        assert_eq!(evaluate(&cfg, &t).unwrap(), evaluate(&cfg, &t).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let b = |j| BranchConfig {
            input_bin: j,
            mixer: MixerSpec::PhaseModulator(RfDrive::silent()),
            output_weight: one(),
        };
        assert!(ProcessorConfig::new(3, vec![b(0), b(1)], 16, Convention::ExactCosine).is_err());
        assert!(ProcessorConfig::new(2, vec![b(0), b(0)], 16, Convention::ExactCosine).is_err());
        let mut heavy = b(1);
        heavy.output_weight = Complex64::new(1.5, 0.0);
        assert!(ProcessorConfig::new(2, vec![b(0), heavy], 16, Convention::ExactCosine).is_err());
        let cfg = ProcessorConfig::new(2, vec![b(1), b(0)], 16, Convention::ExactCosine).unwrap();
        assert!(evaluate(&cfg, &chrestenson(4).unwrap()).is_err());
    }

    #[test]
    fn in_band_rows_follow_window() {
        let c4 = chrestenson(4).unwrap();
        let rows = in_band_table(&c4, 1).unwrap();
        let offsets: Vec<i64> = rows.iter().map(|r| r.offset).collect();
        assert_eq!(offsets, vec![-1, 0, 1, 2]);
        assert!(rows.iter().all(|r| (r.magnitude - 0.5).abs() < 1e-15));
    }
}
