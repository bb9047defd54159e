//! JSON instance files.
//!
//! ```json
//! {
//!   "model": "interview",
//!   "num_professions": 2,
//!   "migrants": [{"id": 0, "profession": 0}, ...],
//!   "localities": [{"id": 0, "capacity": 3, "jobs_by_profession": [2, 1]}, ...],
//!   "probs": [[0.12, 0.9], ...]
//! }
//! ```
//!
//! `probs` is dense and row-major: one row per migrant, one column per locality
//! (interview) or per profession (coordination). Floats are written in shortest
//! round-trip form, so `parse_instance(serialize_instance(i)) == i` exactly.

use serde::{Deserialize, Serialize};

use super::{Instance, InstanceError, Locality, Migrant, ModelKind};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    model: ModelKind,
    num_professions: usize,
    migrants: Vec<Migrant>,
    localities: Vec<Locality>,
    probs: Vec<Vec<f64>>,
}

pub fn parse_instance(text: &[u8]) -> Result<Instance, InstanceError> {
    let file: InstanceFile = serde_json::from_slice(text)?;
    Instance::new(
        file.model,
        file.num_professions,
        file.migrants,
        file.localities,
        file.probs,
    )
}

pub fn serialize_instance(instance: &Instance) -> Vec<u8> {
    let file = InstanceFile {
        model: instance.model(),
        num_professions: instance.num_professions(),
        migrants: instance.migrants().to_vec(),
        localities: instance.localities().to_vec(),
        probs: instance.prob_rows(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("instance serialization cannot fail");
    out.push(b'\n');
    out
}
