//! Genetic search over nested-MZM drive parameters.
//!
//! Columns of the transfer matrix are independent, so each branch is
//! optimized on its own cost `Σ_i |t_ij - T_ij|^2 + leakage_j`. Each branch
//! genome has 26 genes: 12 modulation indices, 12 tone phases and the two
//! inner bias phases.
//!
//! Every random draw comes from a ChaCha stream keyed by
//! `(seed, branch, generation, individual)`, so results do not depend on how
//! many worker threads evaluate a generation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::TransferMatrix;
use crate::modulator::{check_n_max, wrap_phase, Convention, MixerSpec, Mzm, NestedMzm, RfDrive, MAX_BETA};
use crate::processor::{branch_column, branch_cost, evaluate, BranchConfig, EvaluationResult, ProcessorConfig};

/// Genes per branch.
pub const GENES_PER_BRANCH: usize = 26;
const BETAS: std::ops::Range<usize> = 0..12;
const PHIS: std::ops::Range<usize> = 12..24;
const BIASES: std::ops::Range<usize> = 24..26;

fn gene_range(index: usize) -> f64 {
    if BETAS.contains(&index) {
        MAX_BETA
    } else {
        TAU
    }
}

/// Flat genome for a whole processor, laid out branch after branch as
/// `[betas; 12][phis; 12][biases; 2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome(Vec<f64>);

impl Genome {
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if genes.is_empty() || !genes.len().is_multiple_of(GENES_PER_BRANCH) {
            return Err(Error::InvalidParameter {
                name: "genome",
                reason: format!("length must be a positive multiple of {GENES_PER_BRANCH}, got {}", genes.len()),
            });
        }
        for (i, &g) in genes.iter().enumerate() {
            let k = i % GENES_PER_BRANCH;
            if !g.is_finite() || g < 0.0 || g > gene_range(k) || (!BETAS.contains(&k) && g >= TAU) {
                return Err(Error::InvalidParameter {
                    name: "genome",
                    reason: format!("gene {i} = {g} out of bounds"),
                });
            }
        }
        Ok(Self(genes))
    }

    /// All-zero genome: every branch passes its carrier unchanged.
    pub fn zeros(branches: usize) -> Self {
        Self(vec![0.0; GENES_PER_BRANCH * branches])
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn branch_count(&self) -> usize {
        self.0.len() / GENES_PER_BRANCH
    }

    pub fn branch(&self, j: usize) -> &[f64] {
        &self.0[j * GENES_PER_BRANCH..(j + 1) * GENES_PER_BRANCH]
    }

    /// Processor with one nested MZM per branch and unit output weights.
    pub fn to_processor(&self, n_max: u32, convention: Convention) -> Result<ProcessorConfig> {
        let dim = self.branch_count();
        let branches = (0..dim)
            .map(|j| {
                Ok(BranchConfig {
                    input_bin: j,
                    mixer: MixerSpec::NestedMzm(genes_to_nested(self.branch(j))?),
                    output_weight: Complex64::new(1.0, 0.0),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProcessorConfig::new(dim, branches, n_max, convention)
    }
}

/// Nested MZM encoded by one branch's 26 genes. Drives are ordered inner-A
/// upper, inner-A lower, inner-B upper, inner-B lower; the outer bias is 0.
pub fn genes_to_nested(genes: &[f64]) -> Result<NestedMzm> {
    if genes.len() != GENES_PER_BRANCH {
        return Err(Error::DimensionMismatch {
            expected: GENES_PER_BRANCH,
            actual: genes.len(),
        });
    }
    let drive = |d: usize| {
        let b = &genes[BETAS][3 * d..3 * d + 3];
        let p = &genes[PHIS][3 * d..3 * d + 3];
        RfDrive::three_tone([b[0], b[1], b[2]], [p[0], p[1], p[2]])
    };
    let inner_a = Mzm::new(drive(0)?, drive(1)?, genes[BIASES.start])?;
    let inner_b = Mzm::new(drive(2)?, drive(3)?, genes[BIASES.start + 1])?;
    NestedMzm::new(inner_a, inner_b, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Gaussian mutation width as a fraction of each gene's range.
    pub mutation_sigma: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub tournament_size: usize,
    pub seed: u64,
    /// Inject the all-zero genome into the initial population.
    pub seed_zero_genome: bool,
    /// Generations between best-genome snapshots in the trace.
    pub snapshot_interval: usize,
    /// Worker threads; 0 uses the ambient pool. Does not affect results.
    pub workers: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 200,
            generations: 1000,
            crossover_rate: 0.8,
            mutation_sigma: 0.05,
            mutation_rate: 0.1,
            elitism: 2,
            tournament_size: 3,
            seed: 0,
            seed_zero_genome: true,
            snapshot_interval: 100,
            workers: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidGaConfig(m));
        if self.elitism < 1 {
            return fail("elitism must be >= 1".into());
        }
        if self.population < 2 * self.elitism {
            return fail(format!(
                "population {} must be at least twice elitism {}",
                self.population, self.elitism
            ));
        }
        if self.generations < 1 {
            return fail("generations must be >= 1".into());
        }
        if self.tournament_size < 1 {
            return fail("tournament_size must be >= 1".into());
        }
        for (name, v) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !self.mutation_sigma.is_finite() || self.mutation_sigma < 0.0 {
            return fail(format!("mutation_sigma must be >= 0, got {}", self.mutation_sigma));
        }
        if self.snapshot_interval < 1 {
            return fail("snapshot_interval must be >= 1".into());
        }
        Ok(())
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.workers == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidGaConfig(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Per-generation statistics of one branch run. Index 0 is the initial
/// population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTrace {
    pub best: Vec<f64>,
    pub mean: Vec<f64>,
    pub snapshot_interval: usize,
    /// `(generation, best genes)` every `snapshot_interval` generations and
    /// at the final generation.
    pub snapshots: Vec<(usize, Vec<f64>)>,
}

impl CostTrace {
    pub fn is_non_increasing(&self) -> bool {
        self.best.windows(2).all(|w| w[1] <= w[0])
    }

    /// One line per generation: `generation,best,mean`.
    pub fn to_log(&self) -> String {
        let mut s = String::from("generation,best,mean\n");
        for (g, (b, m)) in self.best.iter().zip(&self.mean).enumerate() {
            s.push_str(&format!("{g},{b:?},{m:?}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchResult {
    pub branch: usize,
    pub genes: Vec<f64>,
    pub cost: f64,
    pub trace: CostTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub genome: Genome,
    pub config: ProcessorConfig,
    pub evaluation: EvaluationResult,
    pub branches: Vec<BranchResult>,
}

fn stream(seed: u64, branch: usize, generation: usize, individual: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(branch as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(generation as u64).to_le_bytes());
    key[24..].copy_from_slice(&(individual as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn random_genes(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..GENES_PER_BRANCH)
        .map(|k| {
            if BETAS.contains(&k) {
                rng.random_range(0.0..=MAX_BETA)
            } else {
                rng.random_range(0.0..TAU)
            }
        })
        .collect()
}

fn reflect_beta(x: f64) -> f64 {
    let mut v = x;
    if v < 0.0 {
        v = -v;
    }
    if v > MAX_BETA {
        v = 2.0 * MAX_BETA - v;
    }
    v.clamp(0.0, MAX_BETA)
}

struct BranchProblem<'a> {
    branch: usize,
    dim: usize,
    target: &'a [Complex64],
    n_max: u32,
    convention: Convention,
}

impl BranchProblem<'_> {
    fn cost(&self, genes: &[f64]) -> Result<f64> {
        let mixer = MixerSpec::NestedMzm(genes_to_nested(genes)?);
        let col = branch_column(
            &mixer,
            Complex64::new(1.0, 0.0),
            self.branch,
            self.dim,
            self.n_max,
            self.convention,
        )?;
        Ok(branch_cost(self.target, &col))
    }

    fn costs(&self, population: &[Vec<f64>]) -> Result<Vec<f64>> {
        population.par_iter().map(|g| self.cost(g)).collect()
    }
}

fn tournament(rng: &mut ChaCha8Rng, costs: &[f64], size: usize) -> usize {
    let mut best = rng.random_range(0..costs.len());
    for _ in 1..size {
        let c = rng.random_range(0..costs.len());
        if costs[c] < costs[best] || (costs[c] == costs[best] && c < best) {
            best = c;
        }
    }
    best
}

fn breed(rng: &mut ChaCha8Rng, population: &[Vec<f64>], costs: &[f64], ga: &GaConfig) -> Vec<f64> {
    let a = tournament(rng, costs, ga.tournament_size);
    let b = tournament(rng, costs, ga.tournament_size);
    let mut child = population[a].clone();
    if rng.random::<f64>() < ga.crossover_rate {
        for (k, gene) in child.iter_mut().enumerate() {
            if rng.random::<bool>() {
                *gene = population[b][k];
            }
        }
    }
    for (k, gene) in child.iter_mut().enumerate() {
        if rng.random::<f64>() < ga.mutation_rate {
            let sigma = ga.mutation_sigma * gene_range(k);
            let step = if sigma > 0.0 {
                Normal::new(0.0, sigma).expect("positive sigma").sample(rng)
            } else {
                0.0
            };
            *gene = if BETAS.contains(&k) {
                reflect_beta(*gene + step)
            } else {
                wrap_phase(*gene + step)
            };
        }
    }
    child
}

fn ranked(costs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    order
}

/// Optimizes the nested MZM of branch `j` toward `target_column`.
pub fn optimize_branch(
    j: usize,
    target_column: &[Complex64],
    ga: &GaConfig,
    n_max: u32,
    convention: Convention,
) -> Result<BranchResult> {
    ga.validate()?;
    check_n_max(n_max)?;
    let dim = target_column.len();
    if j >= dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: j,
        });
    }
    let problem = BranchProblem {
        branch: j,
        dim,
        target: target_column,
        n_max,
        convention,
    };
    ga.run(|| run_branch(&problem, ga))?
}

fn run_branch(problem: &BranchProblem<'_>, ga: &GaConfig) -> Result<BranchResult> {
    let j = problem.branch;
    let mut population: Vec<Vec<f64>> = (0..ga.population)
        .into_par_iter()
        .map(|i| {
            if i == 0 && ga.seed_zero_genome {
                vec![0.0; GENES_PER_BRANCH]
            } else {
                random_genes(&mut stream(ga.seed, j, 0, i))
            }
        })
        .collect();
    let mut costs = problem.costs(&population)?;

    let mut trace = CostTrace {
        best: Vec::with_capacity(ga.generations + 1),
        mean: Vec::with_capacity(ga.generations + 1),
        snapshot_interval: ga.snapshot_interval,
        snapshots: Vec::new(),
    };
    let record = |generation: usize, population: &[Vec<f64>], costs: &[f64], trace: &mut CostTrace| {
        let best = ranked(costs)[0];
        trace.best.push(costs[best]);
        trace.mean.push(costs.iter().sum::<f64>() / costs.len() as f64);
        if generation.is_multiple_of(ga.snapshot_interval) || generation == ga.generations {
            trace.snapshots.push((generation, population[best].clone()));
        }
    };
    record(0, &population, &costs, &mut trace);

    for generation in 1..=ga.generations {
        let order = ranked(&costs);
        let elites: Vec<usize> = order[..ga.elitism].to_vec();
        let children: Vec<Vec<f64>> = (ga.elitism..ga.population)
            .into_par_iter()
            .map(|i| breed(&mut stream(ga.seed, j, generation, i), &population, &costs, ga))
            .collect();
        let child_costs = problem.costs(&children)?;

        let mut next = Vec::with_capacity(ga.population);
        let mut next_costs = Vec::with_capacity(ga.population);
        for &e in &elites {
            next.push(population[e].clone());
            next_costs.push(costs[e]);
        }
        next.extend(children);
        next_costs.extend(child_costs);
        population = next;
        costs = next_costs;
        record(generation, &population, &costs, &mut trace);
    }

    let best = ranked(&costs)[0];
    Ok(BranchResult {
        branch: j,
        genes: population[best].clone(),
        cost: costs[best],
        trace,
    })
}

/// Optimizes every branch against the matching column of `target` and
/// assembles the resulting processor.
pub fn optimize_gate(target: &TransferMatrix, ga: &GaConfig, n_max: u32, convention: Convention) -> Result<GateResult> {
    ga.validate()?;
    check_n_max(n_max)?;
    let dim = target.dim();
    let mut branches = Vec::with_capacity(dim);
    for j in 0..dim {
        let column = target.column(j);
        branches.push(optimize_branch(j, &column, ga, n_max, convention)?);
    }
    let genes: Vec<f64> = branches.iter().flat_map(|b| b.genes.iter().copied()).collect();
    let genome = Genome::new(genes)?;
    let config = genome.to_processor(n_max, convention)?;
    let evaluation = evaluate(&config, target)?;
    Ok(GateResult {
        genome,
        config,
        evaluation,
        branches,
    })
}
