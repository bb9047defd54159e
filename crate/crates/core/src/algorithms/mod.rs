//! Solvers. Each consumes an [`Evaluator`] and an evaluation budget and returns
//! the best feasible assignment it found.

mod additive;
mod greedy;
mod gsemo;
mod moead;
mod nsga2;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::objective::{Evaluator, ObjectiveError};
use crate::solution::Assignment;

pub use additive::max_weight_assignment;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("budget of {budget} evaluations is below the {needed} required")]
    BudgetExhausted { needed: u64, budget: u64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Additive,
    Greedy,
    Gsemo,
    GsemoSr,
    /// GSEMO-SR without the repair pass.
    GsemoS,
    /// GSEMO-SR without matrix-swap mutation.
    GsemoR,
    #[serde(rename = "nsga2-100")]
    Nsga2Pop100,
    #[serde(rename = "nsga2-2r")]
    Nsga2Pop2r,
    Moead,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Additive,
        Algorithm::Greedy,
        Algorithm::Gsemo,
        Algorithm::GsemoSr,
        Algorithm::GsemoS,
        Algorithm::GsemoR,
        Algorithm::Nsga2Pop100,
        Algorithm::Nsga2Pop2r,
        Algorithm::Moead,
    ];

    /// Command-line and file name.
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Additive => "additive",
            Algorithm::Greedy => "greedy",
            Algorithm::Gsemo => "gsemo",
            Algorithm::GsemoSr => "gsemo-sr",
            Algorithm::GsemoS => "gsemo-s",
            Algorithm::GsemoR => "gsemo-r",
            Algorithm::Nsga2Pop100 => "nsga2-100",
            Algorithm::Nsga2Pop2r => "nsga2-2r",
            Algorithm::Moead => "moead",
        }
    }

    /// Name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Additive => "Additive",
            Algorithm::Greedy => "Greedy",
            Algorithm::Gsemo => "MR-GSEMO",
            Algorithm::GsemoSr => "MR-GSEMO-SR",
            Algorithm::GsemoS => "MR-GSEMO-S",
            Algorithm::GsemoR => "MR-GSEMO-R",
            Algorithm::Nsga2Pop100 => "MR-NSGA-II-100",
            Algorithm::Nsga2Pop2r => "MR-NSGA-II-2r",
            Algorithm::Moead => "MR-MOEA/D",
        }
    }

    fn uses_crossover(self) -> bool {
        matches!(self, Algorithm::Nsga2Pop100 | Algorithm::Nsga2Pop2r | Algorithm::Moead)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.as_str()).collect();
                format!("unknown algorithm `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Maximum number of objective evaluations.
    pub budget: u64,
    pub seed: u64,
    /// Probability that GSEMO-SR uses bit-wise rather than matrix-swap mutation.
    pub p_m: f64,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// `None` selects the algorithm default: 100, or `2 (r + 1)` for
    /// NSGA-II-2r where `r` is the total capacity.
    pub population_size: Option<usize>,
    /// MOEA/D neighborhood size.
    pub neighborhood_size: usize,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, budget: u64, seed: u64) -> Self {
        SolverConfig {
            algorithm,
            budget,
            seed,
            p_m: 0.5,
            crossover_prob: 0.9,
            mutation_prob: 1.0,
            population_size: None,
            neighborhood_size: 20,
        }
    }

    /// The population size used on `instance`.
    pub fn effective_population(&self, instance: &Instance) -> usize {
        self.population_size.unwrap_or(match self.algorithm {
            Algorithm::Nsga2Pop2r => 2 * (instance.total_capacity() + 1),
            _ => 100,
        })
    }

    pub fn validate(&self, instance: &Instance) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidConfig(msg));
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        for (name, p) in [
            ("p_m", self.p_m),
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.algorithm.uses_crossover() {
            let n = self.effective_population(instance);
            if n < 2 {
                return bad(format!("population size must be at least 2, got {n}"));
            }
            if self.algorithm == Algorithm::Moead
                && (self.neighborhood_size < 2 || self.neighborhood_size > n)
            {
                return bad(format!(
                    "neighborhood size must lie in [2, {n}], got {}",
                    self.neighborhood_size
                ));
            }
        }
        Ok(())
    }
}

/// Best-so-far value after a given number of evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub best: Assignment,
    /// The estimate of `best` that was used to select it.
    pub best_f1_in_run: f64,
    pub evaluations_used: u64,
    /// Points where the best-so-far estimate improved, in evaluation order.
    pub trace: Vec<TracePoint>,
}

/// Runs the configured algorithm. Evaluations are counted on `evaluator`
/// relative to its count on entry.
pub fn solve(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    config.validate(instance)?;
    let result = match config.algorithm {
        Algorithm::Additive => additive::additive(instance, evaluator, config),
        Algorithm::Greedy => greedy::greedy(instance, evaluator, config),
        Algorithm::Gsemo => gsemo::gsemo(instance, evaluator, config, gsemo::Variation::BITWISE),
        Algorithm::GsemoSr => gsemo::gsemo(
            instance,
            evaluator,
            config,
            gsemo::Variation { bitwise_prob: config.p_m, repair: true },
        ),
        Algorithm::GsemoS => gsemo::gsemo(
            instance,
            evaluator,
            config,
            gsemo::Variation { bitwise_prob: config.p_m, repair: false },
        ),
        Algorithm::GsemoR => gsemo::gsemo(
            instance,
            evaluator,
            config,
            gsemo::Variation { bitwise_prob: 1.0, repair: true },
        ),
        Algorithm::Nsga2Pop100 | Algorithm::Nsga2Pop2r => nsga2::nsga2(instance, evaluator, config),
        Algorithm::Moead => moead::moead(instance, evaluator, config),
    }?;
    debug_assert!(result.evaluations_used <= config.budget);
    Ok(result)
}

/// Ordering used to pick the best feasible solution: larger `f1` first, then
/// fewer selected pairs, then the lexicographically lowest encoding.
fn better(a: &Assignment, fa: f64, b: &Assignment, fb: f64) -> bool {
    match fa.partial_cmp(&fb) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => match a.count_ones().cmp(&b.count_ones()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a < b,
        },
    }
}

/// Returns the best feasible candidate and its value, or `None` when no
/// candidate is feasible. Infeasible candidates are recognized by the
/// `f1 < 0` sentinel.
pub fn select_best_feasible<'a, I>(candidates: I) -> Option<(&'a Assignment, f64)>
where
    I: IntoIterator<Item = (&'a Assignment, f64)>,
{
    let mut best: Option<(&Assignment, f64)> = None;
    for (a, f) in candidates {
        if f < 0.0 {
            continue;
        }
        match best {
            Some((b, fb)) if !better(a, f, b, fb) => {}
            _ => best = Some((a, f)),
        }
    }
    best
}

/// Best-so-far feasible solution together with the anytime trace.
#[derive(Debug)]
struct BestSoFar {
    best: Assignment,
    f1: f64,
    trace: Vec<TracePoint>,
}

impl BestSoFar {
    /// Starts from the empty assignment, whose value is zero by definition.
    fn new(instance: &Instance) -> Self {
        BestSoFar {
            best: Assignment::empty_for(instance),
            f1: 0.0,
            trace: vec![TracePoint { evaluations: 0, best_f1: 0.0 }],
        }
    }

    fn offer(&mut self, a: &Assignment, f1: f64, evaluations: u64) {
        if f1 >= 0.0 && better(a, f1, &self.best, self.f1) {
            if f1 > self.f1 {
                self.trace.push(TracePoint { evaluations, best_f1: f1 });
            }
            self.best = a.clone();
            self.f1 = f1;
        }
    }

    fn finish(self, evaluations_used: u64) -> SolverResult {
        SolverResult {
            best: self.best,
            best_f1_in_run: self.f1,
            evaluations_used,
            trace: self.trace,
        }
    }
}

/// Visits migrants in random order and assigns each, with probability 1/2, to a
/// uniformly chosen locality that still has spare capacity.
pub fn random_feasible<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Assignment {
    let mut a = Assignment::empty_for(instance);
    let mut order: Vec<usize> = (0..instance.num_migrants()).collect();
    order.shuffle(rng);
    let mut load = vec![0usize; instance.num_localities()];
    let mut open: Vec<usize> = Vec::with_capacity(instance.num_localities());
    for v in order {
        if !rng.gen_bool(0.5) {
            continue;
        }
        open.clear();
        open.extend((0..instance.num_localities()).filter(|&l| load[l] < instance.capacity(l)));
        if let Some(&l) = open.choose(rng) {
            a.set(v, l, true);
            load[l] += 1;
        }
    }
    a
}
