use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use freqgate::gates::TransferMatrix;
use freqgate::optimizer::{optimize_gate, Genome, GENES_PER_BRANCH};
use freqgate::oracle::random_check;
use freqgate::processor::{evaluate as evaluate_processor, in_band_table, scale_optimal_distance, EvaluationResult, InBandEntry, ProcessorConfig};
use freqgate::sensitivity::{linspace, sensitivity_fd, sweep as sweep_curve, MzmParameter, Observable};
use serde::Serialize;

use crate::config::RunConfig;
use crate::{Common, Failure};

const ORACLE_TOLERANCE: f64 = 1e-9;

type CmdResult = Result<(), Failure>;

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let mut cfg = RunConfig::load(&common.config).map_err(Failure::Config)?;
    if let Some(seed) = common.seed {
        cfg.ga.seed = seed;
        cfg.oracle_check.seed = seed;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, out))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Runtime)
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Runtime)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

#[derive(Serialize)]
struct Report<'a> {
    evaluation: &'a EvaluationResult,
    /// Complex rescaling that best maps the matrix onto the target.
    scale: Option<[f64; 2]>,
    scale_optimal_distance: Option<f64>,
    /// `cost_total` of the all-zero genome.
    baseline_cost_total: f64,
    in_band: Vec<Vec<InBandEntry>>,
    /// Largest over smallest in-band magnitude of each branch.
    spread_ratio: Vec<Option<f64>>,
}

fn write_outputs(
    dir: &Path,
    config: &ProcessorConfig,
    evaluation: &EvaluationResult,
    target: &TransferMatrix,
    quiet: bool,
) -> CmdResult {
    let zero = Genome::zeros(target.dim())
        .to_processor(config.n_max(), config.convention())
        .map_err(runtime)?;
    let baseline = evaluate_processor(&zero, target).map_err(runtime)?;
    let scaled = scale_optimal_distance(&evaluation.matrix, target).ok();
    let in_band = (0..target.dim())
        .map(|j| in_band_table(&evaluation.matrix, j))
        .collect::<freqgate::Result<Vec<_>>>()
        .map_err(runtime)?;
    let spread_ratio = in_band
        .iter()
        .map(|rows| {
            let max = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
            let min = rows.iter().map(|r| r.magnitude).fold(f64::INFINITY, f64::min);
            (min > 0.0).then(|| max / min)
        })
        .collect();
    let report = Report {
        evaluation,
        scale: scaled.map(|(s, _)| [s.re, s.im]),
        scale_optimal_distance: scaled.map(|(_, d)| d),
        baseline_cost_total: baseline.cost_total,
        in_band,
        spread_ratio,
    };
    let json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    write(&dir.join("report.json"), format!("{json}\n"))?;

    for j in 0..target.dim() {
        let spectrum = config.branch_spectrum(j).map_err(runtime)?;
        let mut csv = String::from("bin,magnitude,phase_radians\n");
        for (offset, a) in spectrum.iter() {
            csv.push_str(&format!("{},{:?},{:?}\n", j as i64 + offset, a.norm(), a.arg()));
        }
        write(&dir.join(format!("spectrum_branch{j}.csv")), csv)?;
    }

    if !quiet {
        println!(
            "cost_total {:.6e} (cost_in {:.6e}, cost_out {:.6e}), fidelity {:.6}, baseline {:.6e}",
            evaluation.cost_total, evaluation.cost_in, evaluation.cost_out, evaluation.fidelity, baseline.cost_total
        );
        if let Some(d) = report.scale_optimal_distance {
            println!("scale-optimal distance {d:.6e}");
        }
        println!("wrote {}", dir.display());
    }
    Ok(())
}

pub fn synthesize(common: &Common) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let target = cfg.target().map_err(Failure::Config)?;
    create_dir(&dir)?;
    let snapshot = dir.join("config.toml");
    if same_file(&snapshot, &common.config) {
        return Err(Failure::Config(anyhow!(
            "output directory would overwrite the input config {}",
            common.config.display()
        )));
    }
    write(&snapshot, toml::to_string(&cfg).map_err(runtime)?)?;

    if !common.quiet {
        println!(
            "optimizing {} branches: population {}, {} generations, seed {}",
            target.dim(),
            cfg.ga.population,
            cfg.ga.generations,
            cfg.ga.seed
        );
    }
    let result = optimize_gate(&target, &cfg.ga, cfg.n_max, cfg.convention).map_err(runtime)?;
    for b in &result.branches {
        write(&dir.join(format!("trace_branch{}.log", b.branch)), b.trace.to_log())?;
        if !common.quiet {
            println!("branch {}: cost {:.6e}", b.branch, b.cost);
        }
    }
    let genome: String = result.genome.genes().iter().map(|g| format!("{g:?}\n")).collect();
    write(&dir.join("genome.txt"), genome)?;
    write_outputs(&dir, &result.config, &result.evaluation, &target, common.quiet)
}

fn read_genome(path: &Path, dim: usize) -> anyhow::Result<Genome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let genes = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| l.parse::<f64>().with_context(|| format!("gene {i}: `{l}` is not a number")))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    anyhow::ensure!(
        genes.len() == GENES_PER_BRANCH * dim,
        "genome has {} genes, expected {} for dimension {dim}",
        genes.len(),
        GENES_PER_BRANCH * dim
    );
    Ok(Genome::new(genes)?)
}

pub fn evaluate(common: &Common, genome_path: &Path) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let target = cfg.target().map_err(Failure::Config)?;
    let genome = read_genome(genome_path, target.dim()).map_err(Failure::Config)?;
    let config = genome.to_processor(cfg.n_max, cfg.convention).map_err(runtime)?;
    let evaluation = evaluate_processor(&config, &target).map_err(runtime)?;
    create_dir(&dir)?;
    write_outputs(&dir, &config, &evaluation, &target, common.quiet)
}

pub fn sensitivity(common: &Common) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let point = cfg.sensitivity.base.to_point().map_err(Failure::Config)?;
    create_dir(&dir)?;
    for request in &cfg.sensitivity.requests {
        let which: MzmParameter = request.parameter.parse().map_err(|e: freqgate::Error| Failure::Config(e.into()))?;
        let values = linspace(request.start, request.stop, request.points);
        let curve = sweep_curve(&point, which, &values, cfg.sensitivity.threshold).map_err(runtime)?;
        let path = dir.join(format!("sensitivity_{which}.dat"));
        write(&path, curve.to_columns())?;
        if !common.quiet {
            let flagged = curve.near_singular.iter().filter(|&&f| f).count();
            println!(
                "{which}: {} points, {flagged} near-singular, poles {:?} -> {}",
                values.len(),
                curve.poles,
                path.display()
            );
        }
    }
    Ok(())
}

pub fn oracle_check(common: &Common) -> CmdResult {
    let (cfg, _) = load(common)?;
    let check = &cfg.oracle_check;
    let worst = random_check(check.trials, check.beta_max, check.seed, cfg.n_max, &cfg.oracle).map_err(runtime)?;
    if !common.quiet {
        println!(
            "max bin error {worst:.3e} over {} specs (beta <= {}, n_max = {}, seed {})",
            3 * check.trials,
            check.beta_max,
            cfg.n_max,
            check.seed
        );
    }
    if worst < ORACLE_TOLERANCE {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!("max bin error {worst:.3e} >= {ORACLE_TOLERANCE:e}")))
    }
}

pub fn sweep(common: &Common) -> CmdResult {
    let (cfg, dir) = load(common)?;
    let s = &cfg.sweep;
    let mixer = s.build_mixer().map_err(Failure::Config)?;
    let path = s.path().map_err(Failure::Config)?;
    let observable = s.bin.map_or(Observable::FirstSidebandAnalytic, Observable::BinMagnitude);
    let mut text = format!("# {} S observable={observable:?} h={:?}\n", s.parameter, s.h);
    let mut flagged = 0;
    for v in linspace(s.start, s.stop, s.points) {
        let m = mixer.with_parameter(path, v).map_err(runtime)?;
        let value = sensitivity_fd(&m, path, observable, s.h, cfg.n_max).map_err(runtime)?;
        if value.near_singular {
            flagged += 1;
            text.push_str(&format!("# near-singular {v:?}\n"));
        }
        text.push_str(&format!("{v:?} {:?}\n", value.value));
    }
    create_dir(&dir)?;
    let out = dir.join(format!("sweep_{}.dat", s.parameter.replace(':', "")));
    write(&out, text)?;
    if !common.quiet {
        println!("{}: {} points, {flagged} near-singular -> {}", s.parameter, s.points, out.display());
    }
    Ok(())
}
