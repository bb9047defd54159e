use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, InstanceError, Locality, Migrant, ModelKind};

/// How migrants receive professions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfessionMode {
    /// Contiguous blocks of ⌈|V|/|Π|⌉ or ⌊|V|/|Π|⌋ migrants per profession.
    EvenSplit,
    /// Uniformly random, with every profession held by at least one migrant.
    RandomAtLeastOne,
}

/// How many jobs each profession gets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobSplit {
    /// |J|/|Π| each, remainder to the lowest profession ids.
    Even,
    /// Exactly as many jobs of a profession as migrants holding it.
    MatchMigrants,
    /// Explicit per-profession counts; must sum to |J|.
    Explicit(Vec<usize>),
}

/// How jobs are spread over localities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobDistribution {
    /// ⌊|J|/|L|⌋ per locality, remainder one each to the lowest locality ids.
    EqualPerLocality,
    /// One job per locality, the rest to uniformly random localities.
    RandomAtLeastOnePerLocality,
    /// Exactly this many jobs per locality; requires |J| = k·|L|.
    FixedPerLocality(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// cap_l = job_l.
    EqualToJobs,
    /// Every locality gets the same fixed capacity.
    Fixed(usize),
}

/// Parameters for the synthetic instance generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub model: ModelKind,
    pub migrants: usize,
    pub localities: usize,
    pub jobs: usize,
    pub professions: usize,
    pub profession_mode: ProfessionMode,
    pub job_split: JobSplit,
    pub job_distribution: JobDistribution,
    pub capacity: CapacityMode,
    pub seed: u64,
}

impl GeneratorParams {
    /// Even professions, even job split, equal jobs per locality, capacity equal to jobs.
    pub fn new(
        model: ModelKind,
        migrants: usize,
        localities: usize,
        jobs: usize,
        professions: usize,
        seed: u64,
    ) -> Self {
        GeneratorParams {
            model,
            migrants,
            localities,
            jobs,
            professions,
            profession_mode: ProfessionMode::EvenSplit,
            job_split: JobSplit::Even,
            job_distribution: JobDistribution::EqualPerLocality,
            capacity: CapacityMode::EqualToJobs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let bad = |msg: String| Err(InstanceError::Params(msg));
        if self.migrants == 0 || self.localities == 0 || self.jobs == 0 || self.professions == 0 {
            return bad("migrants, localities, jobs and professions must all be positive".into());
        }
        if self.profession_mode == ProfessionMode::RandomAtLeastOne && self.migrants < self.professions {
            return bad(format!(
                "cannot give each of {} professions a migrant with only {} migrants",
                self.professions, self.migrants
            ));
        }
        match &self.job_split {
            JobSplit::Even => {}
            JobSplit::MatchMigrants => {
                if self.jobs != self.migrants {
                    return bad(format!(
                        "matching jobs to migrant professions needs jobs == migrants ({} != {})",
                        self.jobs, self.migrants
                    ));
                }
            }
            JobSplit::Explicit(counts) => {
                if counts.len() != self.professions {
                    return bad(format!(
                        "{} per-profession job counts given for {} professions",
                        counts.len(),
                        self.professions
                    ));
                }
                let total: usize = counts.iter().sum();
                if total != self.jobs {
                    return bad(format!("per-profession job counts sum to {total}, not {}", self.jobs));
                }
            }
        }
        match self.job_distribution {
            JobDistribution::EqualPerLocality => {}
            JobDistribution::RandomAtLeastOnePerLocality => {
                if self.jobs < self.localities {
                    return bad(format!(
                        "{} jobs cannot cover {} localities with at least one each",
                        self.jobs, self.localities
                    ));
                }
            }
            JobDistribution::FixedPerLocality(k) => {
                if k * self.localities != self.jobs {
                    return bad(format!(
                        "{k} jobs per locality over {} localities needs {} jobs, got {}",
                        self.localities,
                        k * self.localities,
                        self.jobs
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Splits `total` into `parts` near-equal shares, remainder to the lowest indices.
fn even_shares(total: usize, parts: usize) -> Vec<usize> {
    let base = total / parts;
    let extra = total % parts;
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

/// Generates a synthetic instance. The result is a pure function of `params`.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, InstanceError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let nv = params.migrants;
    let nl = params.localities;
    let np = params.professions;

    let professions: Vec<usize> = match params.profession_mode {
        ProfessionMode::EvenSplit => even_shares(nv, np)
            .into_iter()
            .enumerate()
            .flat_map(|(p, count)| std::iter::repeat_n(p, count))
            .collect(),
        ProfessionMode::RandomAtLeastOne => {
            let mut order: Vec<usize> = (0..nv).collect();
            order.shuffle(&mut rng);
            let mut prof = vec![0; nv];
            for (slot, &v) in order.iter().enumerate() {
                prof[v] = if slot < np { slot } else { rng.gen_range(0..np) };
            }
            prof
        }
    };

    let jobs_per_profession = match &params.job_split {
        JobSplit::Even => even_shares(params.jobs, np),
        JobSplit::MatchMigrants => {
            let mut counts = vec![0; np];
            for &p in &professions {
                counts[p] += 1;
            }
            counts
        }
        JobSplit::Explicit(counts) => counts.clone(),
    };

    // Multiset of job professions, dealt to localities in shuffled order.
    let mut job_pool: Vec<usize> = jobs_per_profession
        .iter()
        .enumerate()
        .flat_map(|(p, &count)| std::iter::repeat_n(p, count))
        .collect();
    job_pool.shuffle(&mut rng);

    let jobs_per_locality = match params.job_distribution {
        JobDistribution::EqualPerLocality => even_shares(params.jobs, nl),
        JobDistribution::FixedPerLocality(k) => vec![k; nl],
        JobDistribution::RandomAtLeastOnePerLocality => {
            let mut counts = vec![1; nl];
            for _ in nl..params.jobs {
                counts[rng.gen_range(0..nl)] += 1;
            }
            counts
        }
    };

    let mut localities = Vec::with_capacity(nl);
    let mut dealt = job_pool.into_iter();
    for (id, &count) in jobs_per_locality.iter().enumerate() {
        let mut by_prof = vec![0; np];
        for p in dealt.by_ref().take(count) {
            by_prof[p] += 1;
        }
        let total: usize = by_prof.iter().sum();
        let capacity = match params.capacity {
            CapacityMode::EqualToJobs => total,
            CapacityMode::Fixed(c) => c,
        };
        localities.push(Locality {
            id,
            capacity,
            jobs_by_profession: by_prof,
        });
    }

    let probs: Vec<Vec<f64>> = match params.model {
        ModelKind::Interview => (0..nv)
            .map(|_| (0..nl).map(|_| rng.gen::<f64>()).collect())
            .collect(),
        ModelKind::Coordination => professions
            .iter()
            .map(|&own| {
                let p = rng.gen::<f64>();
                (0..np).map(|q| if q == own { p } else { 0.0 }).collect()
            })
            .collect(),
    };

    let migrants = professions
        .into_iter()
        .enumerate()
        .map(|(id, profession)| Migrant { id, profession })
        .collect();
    Instance::new(params.model, np, migrants, localities, probs)
}
