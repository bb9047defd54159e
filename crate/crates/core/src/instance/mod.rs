//! Problem instances: migrants with professions, localities with per-profession
//! job counts and capacities, and the matching-probability matrix of the chosen
//! employment model.
//!
//! An [`Instance`] is immutable once constructed and validated; it can be shared
//! read-only across worker threads.

mod generator;
mod io;

pub use generator::{
    generate_instance, CapacityMode, GeneratorParams, JobDistribution, JobSplit, ProfessionMode,
};
pub use io::{parse_instance, serialize_instance};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors raised while building, generating or reading an instance.
#[derive(Debug, Error)]
pub enum InstanceError {
    /// The document does not match the instance schema (missing or mistyped field).
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    /// The document parsed but violates an instance invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Generator parameters are inconsistent.
    #[error("invalid generator parameters: {0}")]
    Params(String),
}

/// Which employment model the matching probabilities belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Sequential interviews per (locality, profession); probabilities are migrant x locality.
    Interview,
    /// Maximum matching between migrants and local jobs; probabilities are migrant x profession.
    Coordination,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Interview => "interview",
            ModelKind::Coordination => "coordination",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "interview" => Ok(ModelKind::Interview),
            "coordination" => Ok(ModelKind::Coordination),
            other => Err(format!("unknown model `{other}` (expected interview|coordination)")),
        }
    }
}

/// A migrant and the profession it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Migrant {
    pub id: usize,
    pub profession: usize,
}

/// A locality: how many migrants it accepts and how many jobs of each profession it offers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Locality {
    pub id: usize,
    pub capacity: usize,
    pub jobs_by_profession: Vec<usize>,
}

impl Locality {
    /// Total number of jobs over all professions.
    pub fn total_jobs(&self) -> usize {
        self.jobs_by_profession.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    model: ModelKind,
    num_professions: usize,
    migrants: Vec<Migrant>,
    localities: Vec<Locality>,
    /// Row-major; rows are migrants, columns are localities (interview) or
    /// professions (coordination).
    probs: Vec<f64>,
}

impl Instance {
    /// Builds an instance from its parts and checks every invariant.
    ///
    /// `probs` must hold one row per migrant; each row has one entry per locality
    /// for [`ModelKind::Interview`] and one per profession for
    /// [`ModelKind::Coordination`].
    pub fn new(
        model: ModelKind,
        num_professions: usize,
        migrants: Vec<Migrant>,
        localities: Vec<Locality>,
        probs: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        let invalid = |msg: String| Err(InstanceError::Validation(msg));
        if num_professions == 0 {
            return invalid("num_professions must be positive".into());
        }
        if migrants.is_empty() || localities.is_empty() {
            return invalid("need at least one migrant and one locality".into());
        }
        for (i, m) in migrants.iter().enumerate() {
            if m.id != i {
                return invalid(format!("migrants[{i}]: id {} is not dense (expected {i})", m.id));
            }
            if m.profession >= num_professions {
                return invalid(format!(
                    "migrants[{i}]: profession {} out of range 0..{num_professions}",
                    m.profession
                ));
            }
        }
        for (i, l) in localities.iter().enumerate() {
            if l.id != i {
                return invalid(format!("localities[{i}]: id {} is not dense (expected {i})", l.id));
            }
            if l.jobs_by_profession.len() != num_professions {
                return invalid(format!(
                    "localities[{i}]: jobs_by_profession has {} entries, expected {num_professions}",
                    l.jobs_by_profession.len()
                ));
            }
        }
        let cols = match model {
            ModelKind::Interview => localities.len(),
            ModelKind::Coordination => num_professions,
        };
        if probs.len() != migrants.len() {
            return invalid(format!(
                "probs has {} rows, expected one per migrant ({})",
                probs.len(),
                migrants.len()
            ));
        }
        let mut flat = Vec::with_capacity(migrants.len() * cols);
        for (i, row) in probs.iter().enumerate() {
            if row.len() != cols {
                return invalid(format!(
                    "probs[{i}] has {} columns, expected {cols} for the {model} model",
                    row.len()
                ));
            }
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("probability out of range at probs[{i}][{j}]: {p}"));
                }
                flat.push(p);
            }
        }
        Ok(Instance {
            model,
            num_professions,
            migrants,
            localities,
            probs: flat,
        })
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn num_migrants(&self) -> usize {
        self.migrants.len()
    }

    pub fn num_localities(&self) -> usize {
        self.localities.len()
    }

    pub fn num_professions(&self) -> usize {
        self.num_professions
    }

    /// Number of migrant-locality pairs, `|V|·|L|`.
    pub fn num_pairs(&self) -> usize {
        self.migrants.len() * self.localities.len()
    }

    pub fn migrants(&self) -> &[Migrant] {
        &self.migrants
    }

    pub fn localities(&self) -> &[Locality] {
        &self.localities
    }

    pub fn profession_of(&self, migrant: usize) -> usize {
        self.migrants[migrant].profession
    }

    pub fn capacity(&self, locality: usize) -> usize {
        self.localities[locality].capacity
    }

    pub fn jobs(&self, locality: usize, profession: usize) -> usize {
        self.localities[locality].jobs_by_profession[profession]
    }

    /// Sum of all locality capacities; the size of the largest feasible pair set
    /// whenever there are at least that many migrants.
    pub fn total_capacity(&self) -> usize {
        self.localities.iter().map(|l| l.capacity).sum()
    }

    /// Number of columns of the probability matrix.
    pub fn prob_columns(&self) -> usize {
        match self.model {
            ModelKind::Interview => self.localities.len(),
            ModelKind::Coordination => self.num_professions,
        }
    }

    /// One row of the probability matrix.
    pub fn prob_row(&self, migrant: usize) -> &[f64] {
        let cols = self.prob_columns();
        &self.probs[migrant * cols..(migrant + 1) * cols]
    }

    /// Interview model: probability that `migrant` matches one job at `locality`.
    pub fn interview_prob(&self, migrant: usize, locality: usize) -> f64 {
        debug_assert_eq!(self.model, ModelKind::Interview);
        self.probs[migrant * self.localities.len() + locality]
    }

    /// Coordination model: probability of an edge between `migrant` and a job of `profession`.
    pub fn coordination_prob(&self, migrant: usize, profession: usize) -> f64 {
        debug_assert_eq!(self.model, ModelKind::Coordination);
        self.probs[migrant * self.num_professions + profession]
    }

    /// The probability matrix as nested rows.
    pub fn prob_rows(&self) -> Vec<Vec<f64>> {
        self.probs
            .chunks(self.prob_columns())
            .map(|r| r.to_vec())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(probs: Vec<Vec<f64>>, model: ModelKind) -> Result<Instance, InstanceError> {
        Instance::new(
            model,
            1,
            vec![Migrant { id: 0, profession: 0 }, Migrant { id: 1, profession: 0 }],
            vec![Locality {
                id: 0,
                capacity: 2,
                jobs_by_profession: vec![2],
            }],
            probs,
        )
    }

    #[test]
    fn accepts_valid_instance() {
        let inst = tiny(vec![vec![0.25], vec![1.0]], ModelKind::Interview).unwrap();
        assert_eq!(inst.num_pairs(), 2);
        assert_eq!(inst.interview_prob(1, 0), 1.0);
        assert_eq!(inst.total_capacity(), 2);
    }

    #[test]
    fn rejects_probability_above_one() {
        let err = tiny(vec![vec![1.5], vec![0.0]], ModelKind::Interview).unwrap_err();
        assert!(err.to_string().contains("probability out of range"), "{err}");
    }

    #[test]
    fn rejects_nan_probability() {
        let err = tiny(vec![vec![f64::NAN], vec![0.0]], ModelKind::Interview).unwrap_err();
        assert!(err.to_string().contains("probability out of range"));
    }

    #[test]
    fn rejects_wrong_matrix_shape() {
        let err = tiny(vec![vec![0.5, 0.5], vec![0.0, 0.1]], ModelKind::Coordination).unwrap_err();
        assert!(matches!(err, InstanceError::Validation(_)));
    }

    #[test]
    fn rejects_sparse_ids() {
        let err = Instance::new(
            ModelKind::Interview,
            1,
            vec![Migrant { id: 3, profession: 0 }],
            vec![Locality {
                id: 0,
                capacity: 1,
                jobs_by_profession: vec![1],
            }],
            vec![vec![0.5]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not dense"));
    }
}
