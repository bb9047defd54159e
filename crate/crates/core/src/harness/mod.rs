//! Experiment orchestration: parameter sweeps over generated instances, every
//! algorithm on every instance, re-scoring, statistics and report emission.

mod report;
mod stats;

pub use report::{emit_report, ReportFormat, PLOT_CHECKPOINTS};
pub use stats::{
    average_ranks, mean, std_dev, wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMethod,
    EXACT_LIMIT,
};

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{solve, Algorithm, SolverConfig, TracePoint};
use crate::instance::{
    generate_instance, CapacityMode, GeneratorParams, Instance, InstanceError, JobDistribution, JobSplit,
    ModelKind, ProfessionMode,
};
use crate::objective::Evaluator;

/// Significance level for the report's comparison marks.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Migrants,
    Localities,
    Jobs,
    Professions,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Migrants => "migrants",
            SweepVariable::Localities => "localities",
            SweepVariable::Jobs => "jobs",
            SweepVariable::Professions => "professions",
        }
    }

    /// Table header symbol.
    pub fn symbol(self) -> &'static str {
        match self {
            SweepVariable::Migrants => "|V|",
            SweepVariable::Localities => "|L|",
            SweepVariable::Jobs => "|J|",
            SweepVariable::Professions => "|Π|",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "migrants" => Ok(SweepVariable::Migrants),
            "localities" => Ok(SweepVariable::Localities),
            "jobs" => Ok(SweepVariable::Jobs),
            "professions" => Ok(SweepVariable::Professions),
            _ => Err(format!(
                "unknown sweep variable `{s}` (expected migrants, localities, jobs or professions)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Full-size settings: |V| up to 200 and 1,000 in-run samples.
    Paper,
    /// Workstation-sized: |V| ≤ 30, |L| ≤ 5 and 100 in-run samples.
    Desk,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            _ => Err(format!("unknown scale `{s}` (expected paper or desk)")),
        }
    }
}

/// A one-dimensional parameter sweep with replicated random instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<usize>,
    /// Fixed parameters; the swept field and the seed are overwritten per instance.
    pub base: GeneratorParams,
    pub replicates: usize,
    pub run_seed: u64,
    /// Monte-Carlo samples per in-run evaluation.
    pub samples: usize,
    /// Monte-Carlo samples for the final re-score.
    pub rescore_samples: usize,
    /// Evaluation budget is `budget_factor · |V|² · |L|`.
    pub budget_factor: u64,
}

impl SweepSpec {
    pub fn preset(variable: SweepVariable, scale: Scale, model: ModelKind, run_seed: u64) -> Self {
        let paper = scale == Scale::Paper;
        let mut base = if paper {
            GeneratorParams::new(model, 100, 10, 100, 2, 0)
        } else {
            GeneratorParams::new(model, 30, 5, 30, 2, 0)
        };
        let values: Vec<usize> = match (variable, paper) {
            (SweepVariable::Migrants, true) => (100..=200).step_by(20).collect(),
            (SweepVariable::Migrants, false) => vec![20, 30],
            (SweepVariable::Localities, true) => (16..=30).step_by(2).collect(),
            (SweepVariable::Localities, false) => vec![3, 4, 5],
            (SweepVariable::Jobs, true) => vec![60, 70, 80, 90, 110, 120, 130, 140],
            (SweepVariable::Jobs, false) => vec![18, 21, 24, 27, 33, 36, 39, 42],
            (SweepVariable::Professions, true) => (5..=30).step_by(5).collect(),
            (SweepVariable::Professions, false) => vec![2, 4, 6, 8, 10],
        };
        let per_locality = base.migrants / base.localities;
        match variable {
            SweepVariable::Migrants => {}
            SweepVariable::Localities => {
                base.job_distribution = JobDistribution::RandomAtLeastOnePerLocality;
            }
            SweepVariable::Jobs => {
                let half = base.migrants / 2;
                base.job_split = JobSplit::Explicit(vec![half, half]);
                base.job_distribution = JobDistribution::RandomAtLeastOnePerLocality;
                base.capacity = CapacityMode::Fixed(per_locality);
            }
            SweepVariable::Professions => {
                base.profession_mode = ProfessionMode::RandomAtLeastOne;
                base.job_split = JobSplit::MatchMigrants;
                base.job_distribution = JobDistribution::FixedPerLocality(per_locality);
                base.capacity = CapacityMode::Fixed(per_locality);
            }
        }
        SweepSpec {
            variable,
            values,
            base,
            replicates: 10,
            run_seed,
            samples: if paper { 1000 } else { 100 },
            rescore_samples: if paper { 10_000 } else { 1000 },
            budget_factor: 100,
        }
    }

    pub fn model(&self) -> ModelKind {
        self.base.model
    }

    /// Generator parameters for one swept value, without the seed.
    pub fn params_for(&self, value: usize) -> Result<GeneratorParams, HarnessError> {
        let mut p = self.base.clone();
        match self.variable {
            SweepVariable::Migrants => {
                p.migrants = value;
                p.jobs = value;
            }
            SweepVariable::Localities => p.localities = value,
            SweepVariable::Jobs => {
                // the second profession keeps its job count; the first takes the rest
                let fixed = match &p.job_split {
                    JobSplit::Explicit(c) if c.len() == 2 => c[1],
                    _ => p.jobs / 2,
                };
                if value <= fixed {
                    return Err(HarnessError::InvalidSpec(format!(
                        "total jobs {value} must exceed the fixed profession's {fixed}"
                    )));
                }
                p.professions = 2;
                p.jobs = value;
                p.job_split = JobSplit::Explicit(vec![value - fixed, fixed]);
            }
            SweepVariable::Professions => p.professions = value,
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidSpec(msg.into()));
        if self.values.is_empty() {
            return bad("value list is empty");
        }
        if self.replicates == 0 {
            return bad("replicate count must be positive");
        }
        if self.samples == 0 || self.rescore_samples == 0 {
            return bad("sample counts must be positive");
        }
        if self.budget_factor == 0 {
            return bad("budget factor must be positive");
        }
        for &v in &self.values {
            self.params_for(v)?;
        }
        Ok(())
    }
}

/// Experiment-wide solver options; the budget and seed are set per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub algorithms: Vec<Algorithm>,
    /// Algorithm the others are tested against; defaults to GSEMO-SR when
    /// present, else the last algorithm.
    pub reference: Option<Algorithm>,
    /// Template for hyper-parameters such as `p_m` or the population size.
    pub solver: SolverConfig,
    /// Record wall-clock time per cell. Reports with timings are not
    /// byte-reproducible.
    pub timing: bool,
}

impl RunOptions {
    pub fn new(algorithms: Vec<Algorithm>) -> Self {
        RunOptions {
            algorithms,
            reference: None,
            solver: SolverConfig::new(Algorithm::GsemoSr, 1, 0),
            timing: false,
        }
    }

    fn reference(&self) -> Algorithm {
        self.reference.unwrap_or_else(|| {
            if self.algorithms.contains(&Algorithm::GsemoSr) {
                Algorithm::GsemoSr
            } else {
                *self.algorithms.last().expect("non-empty algorithm list")
            }
        })
    }
}

/// Outcome of one (setting, replicate, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub sweep_value: usize,
    pub replicate: usize,
    pub algorithm: Algorithm,
    pub budget: u64,
    /// Re-scored objective of the returned assignment.
    pub final_f: f64,
    pub f_hat_in_run: f64,
    pub evaluations: u64,
    pub wall_ms: Option<u64>,
    pub assignment: Vec<(usize, usize)>,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub sweep_value: usize,
    pub replicate: usize,
    pub algorithm: Algorithm,
    pub message: String,
}

/// Per (setting, algorithm) statistics. Fields are `None` when some replicate failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub sweep_value: usize,
    pub algorithm: Algorithm,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Final values by replicate.
    pub values: Vec<f64>,
    pub wilcoxon_p_vs_ref: Option<f64>,
    /// 1 is best; ties share the average rank.
    pub rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub sweep_var: SweepVariable,
    pub model: ModelKind,
    pub run_seed: u64,
    pub replicates: usize,
    pub samples: usize,
    pub rescore_samples: usize,
    pub values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub reference: Algorithm,
    /// Ordered by setting, replicate, then algorithm.
    pub cells: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
    pub aggregates: Vec<AggregateRow>,
    /// Mean rank per algorithm over settings with complete results.
    pub average_ranks: Vec<(Algorithm, Option<f64>)>,
}

impl ExperimentReport {
    pub fn aggregate(&self, value: usize, algorithm: Algorithm) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|r| r.sweep_value == value && r.algorithm == algorithm)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports serialize");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seed that is a pure function of `root` and `parts`.
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(root), |h, &p| splitmix64(h ^ p))
}

/// Stable code for a name, so seeds do not depend on enum order.
fn name_code(name: &str) -> u64 {
    name.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01B3))
}

#[derive(Debug, Clone, Copy)]
enum Stream {
    Instance,
    Solver,
    Evaluator,
    Rescore,
}

impl SweepSpec {
    fn seed(&self, stream: Stream, value: usize, replicate: usize, algorithm: Option<Algorithm>) -> u64 {
        let tag = match stream {
            Stream::Instance => "instance",
            Stream::Solver => "solver",
            Stream::Evaluator => "evaluator",
            Stream::Rescore => "rescore",
        };
        let mut parts = vec![
            name_code(tag),
            name_code(self.model().as_str()),
            name_code(self.variable.as_str()),
            value as u64,
            replicate as u64,
        ];
        if let Some(a) = algorithm {
            parts.push(name_code(a.as_str()));
        }
        derive_seed(self.run_seed, &parts)
    }

    /// Instance for one (setting, replicate), shared by all algorithms.
    pub fn instance(&self, value: usize, replicate: usize) -> Result<Instance, HarnessError> {
        let mut p = self.params_for(value)?;
        p.seed = self.seed(Stream::Instance, value, replicate, None);
        Ok(generate_instance(&p)?)
    }

    /// Budget for an instance: `budget_factor · |V|² · |L|`.
    pub fn budget(&self, instance: &Instance) -> u64 {
        let v = instance.num_migrants() as u64;
        self.budget_factor * v * v * instance.num_localities() as u64
    }
}

type CellOutcome = Result<CellRecord, CellFailure>;

fn run_cell(
    spec: &SweepSpec,
    options: &RunOptions,
    instance: &Instance,
    value: usize,
    replicate: usize,
    algorithm: Algorithm,
) -> CellOutcome {
    let fail = |message: String| CellFailure { sweep_value: value, replicate, algorithm, message };
    let started = Instant::now();
    let budget = spec.budget(instance);
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let mut config = options.solver.clone();
        config.algorithm = algorithm;
        config.budget = budget;
        config.seed = spec.seed(Stream::Solver, value, replicate, Some(algorithm));
        let mut evaluator =
            Evaluator::monte_carlo(spec.samples, spec.seed(Stream::Evaluator, value, replicate, Some(algorithm)));
        let result = solve(instance, &mut evaluator, &config).map_err(|e| e.to_string())?;
        let mut rescore =
            Evaluator::monte_carlo(spec.rescore_samples, spec.seed(Stream::Rescore, value, replicate, None));
        let final_f = rescore.estimate(instance, &result.best).map_err(|e| e.to_string())?;
        Ok::<_, String>((result, final_f))
    }));
    let (result, final_f) = match outcome {
        Ok(Ok(done)) => done,
        Ok(Err(message)) => return Err(fail(message)),
        Err(panic) => {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "solver panicked".into());
            return Err(fail(format!("panic: {message}")));
        }
    };
    Ok(CellRecord {
        sweep_value: value,
        replicate,
        algorithm,
        budget,
        final_f,
        f_hat_in_run: result.best_f1_in_run,
        evaluations: result.evaluations_used,
        wall_ms: options.timing.then(|| started.elapsed().as_millis() as u64),
        assignment: result.best.pairs().collect(),
        trace: result.trace,
    })
}

/// Runs every algorithm on every replicate instance of every setting and
/// aggregates the results. Cells run on the current rayon pool; the report does
/// not depend on the number of workers.
pub fn run_experiment(spec: &SweepSpec, options: &RunOptions) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    if options.algorithms.is_empty() {
        return Err(HarnessError::InvalidSpec("no algorithms given".into()));
    }
    let reference = options.reference();
    if !options.algorithms.contains(&reference) {
        return Err(HarnessError::InvalidSpec(format!(
            "reference algorithm {reference} is not among the algorithms run"
        )));
    }

    let mut instances = Vec::new();
    for &value in &spec.values {
        for replicate in 0..spec.replicates {
            instances.push((value, replicate, spec.instance(value, replicate)?));
        }
    }
    let keys: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| options.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let outcomes: Vec<CellOutcome> = keys
        .par_iter()
        .map(|&(i, algorithm)| {
            let (value, replicate, ref instance) = instances[i];
            run_cell(spec, options, instance, value, replicate, algorithm)
        })
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(c) => cells.push(c),
            Err(f) => failures.push(f),
        }
    }
    let (aggregates, average_ranks) = aggregate(spec, &options.algorithms, reference, &cells);
    Ok(ExperimentReport {
        sweep_var: spec.variable,
        model: spec.model(),
        run_seed: spec.run_seed,
        replicates: spec.replicates,
        samples: spec.samples,
        rescore_samples: spec.rescore_samples,
        values: spec.values.clone(),
        algorithms: options.algorithms.clone(),
        reference,
        cells,
        failures,
        aggregates,
        average_ranks,
    })
}

fn aggregate(
    spec: &SweepSpec,
    algorithms: &[Algorithm],
    reference: Algorithm,
    cells: &[CellRecord],
) -> (Vec<AggregateRow>, Vec<(Algorithm, Option<f64>)>) {
    let mut rows = Vec::new();
    let mut rank_sums = vec![0.0; algorithms.len()];
    let mut ranked_settings = 0usize;
    for &value in &spec.values {
        let finals = |a: Algorithm| -> Option<Vec<f64>> {
            let v: Vec<f64> = cells
                .iter()
                .filter(|c| c.sweep_value == value && c.algorithm == a)
                .map(|c| c.final_f)
                .collect();
            (v.len() == spec.replicates).then_some(v)
        };
        let per_alg: Vec<Option<Vec<f64>>> = algorithms.iter().map(|&a| finals(a)).collect();
        let ref_values = finals(reference);
        let means: Vec<Option<f64>> = per_alg.iter().map(|v| v.as_deref().map(mean)).collect();
        let ranks: Option<Vec<f64>> = means.iter().copied().collect::<Option<Vec<f64>>>().map(|m| {
            // rank 1 for the largest mean
            let neg: Vec<f64> = m.iter().map(|x| -x).collect();
            average_ranks(&neg)
        });
        if let Some(r) = &ranks {
            ranked_settings += 1;
            for (s, x) in rank_sums.iter_mut().zip(r) {
                *s += x;
            }
        }
        for (k, &a) in algorithms.iter().enumerate() {
            let values = per_alg[k].clone();
            let p = match (&values, &ref_values) {
                (Some(v), Some(r)) if a != reference => Some(wilcoxon_signed_rank(r, v)),
                _ => None,
            };
            rows.push(AggregateRow {
                sweep_value: value,
                algorithm: a,
                mean: means[k],
                std: values.as_deref().map(std_dev),
                values: values.unwrap_or_default(),
                wilcoxon_p_vs_ref: p,
                rank: ranks.as_ref().map(|r| r[k]),
            });
        }
    }
    let avg = algorithms
        .iter()
        .zip(&rank_sums)
        .map(|(&a, &s)| (a, (ranked_settings > 0).then(|| s / ranked_settings as f64)))
        .collect();
    (rows, avg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec(model: ModelKind, replicates: usize) -> SweepSpec {
        let mut spec = SweepSpec::preset(SweepVariable::Migrants, Scale::Desk, model, 7);
        spec.values = vec![4, 6];
        spec.base.localities = 2;
        spec.replicates = replicates;
        spec.samples = 10;
        spec.rescore_samples = 50;
        spec.budget_factor = 2;
        spec
    }

    #[test]
    fn presets_are_valid() {
        for var in [
            SweepVariable::Migrants,
            SweepVariable::Localities,
            SweepVariable::Jobs,
            SweepVariable::Professions,
        ] {
            for scale in [Scale::Paper, Scale::Desk] {
                let spec = SweepSpec::preset(var, scale, ModelKind::Coordination, 1);
                spec.validate().unwrap();
                for &v in &spec.values {
                    let inst = spec.instance(v, 0).unwrap();
                    let p = spec.params_for(v).unwrap();
                    assert_eq!(inst.num_migrants(), p.migrants);
                    let jobs: usize = inst.localities().iter().map(|l| l.total_jobs()).sum();
                    assert_eq!(jobs, p.jobs, "{var} = {v}");
                }
            }
        }
    }

    #[test]
    fn desk_migrant_preset_matches_the_protocol() {
        let spec = SweepSpec::preset(SweepVariable::Migrants, Scale::Desk, ModelKind::Interview, 1);
        assert_eq!(spec.values, vec![20, 30]);
        assert_eq!((spec.samples, spec.rescore_samples, spec.replicates), (100, 1000, 10));
        let inst = spec.instance(30, 3).unwrap();
        assert_eq!(inst.num_localities(), 5);
        assert_eq!(inst.num_professions(), 2);
        assert_eq!(spec.budget(&inst), 100 * 30 * 30 * 5);
    }

    #[test]
    fn jobs_sweep_varies_one_profession() {
        let spec = SweepSpec::preset(SweepVariable::Jobs, Scale::Paper, ModelKind::Interview, 1);
        let p = spec.params_for(60).unwrap();
        assert_eq!(p.job_split, JobSplit::Explicit(vec![10, 50]));
        let p = spec.params_for(140).unwrap();
        assert_eq!(p.job_split, JobSplit::Explicit(vec![90, 50]));
        assert!(spec.params_for(50).is_err());
    }

    #[test]
    fn seeds_are_pure_and_independent_of_algorithm_set() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        let spec = tiny_spec(ModelKind::Interview, 2);
        let one = run_experiment(&spec, &RunOptions::new(vec![Algorithm::Greedy])).unwrap();
        let two = run_experiment(&spec, &RunOptions::new(vec![Algorithm::Additive, Algorithm::Greedy])).unwrap();
        let greedy_cells: Vec<_> = two.cells.iter().filter(|c| c.algorithm == Algorithm::Greedy).cloned().collect();
        assert_eq!(one.cells, greedy_cells);
    }

    #[test]
    fn single_cell_report() {
        let mut spec = tiny_spec(ModelKind::Coordination, 1);
        spec.values = vec![4];
        let report = run_experiment(&spec, &RunOptions::new(vec![Algorithm::Greedy])).unwrap();
        assert_eq!(report.cells.len(), 1);
        let row = &report.aggregates[0];
        assert_eq!(row.std, Some(0.0));
        assert_eq!(row.mean, Some(report.cells[0].final_f));
        assert_eq!(row.rank, Some(1.0));
    }

    #[test]
    fn reports_are_identical_across_pool_sizes() {
        let spec = tiny_spec(ModelKind::Interview, 3);
        let options = RunOptions::new(vec![Algorithm::Additive, Algorithm::Greedy, Algorithm::GsemoSr]);
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_experiment(&spec, &options).unwrap()).to_json()
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn failures_are_captured_per_cell() {
        let spec = tiny_spec(ModelKind::Interview, 2);
        let mut options = RunOptions::new(vec![Algorithm::Greedy, Algorithm::Nsga2Pop100]);
        options.reference = Some(Algorithm::Greedy);
        options.solver.population_size = Some(1);
        let report = run_experiment(&spec, &options).unwrap();
        assert_eq!(report.failures.len(), 4);
        assert!(report.failures.iter().all(|f| f.algorithm == Algorithm::Nsga2Pop100));
        assert!(report.failures[0].message.contains("population size"));
        assert_eq!(report.cells.len(), 4);
        let row = report.aggregate(4, Algorithm::Nsga2Pop100).unwrap();
        assert_eq!((row.mean, row.rank), (None, None));
        assert!(report.aggregate(4, Algorithm::Greedy).unwrap().mean.is_some());
        assert_eq!(report.average_ranks[0].1, None);
    }
}
