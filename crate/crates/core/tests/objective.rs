mod common;

use common::{coordination_oracle, feasible_assignments, interview_oracle, oracle, random_tiny};
use resettle::instance::{Instance, Locality, Migrant, ModelKind};
use resettle::objective::{exact_objective, Evaluator};
use resettle::solution::Assignment;

fn single_locality(model: ModelKind, jobs: usize, probs: &[f64]) -> Instance {
    let migrants = (0..probs.len()).map(|id| Migrant { id, profession: 0 }).collect();
    let localities = vec![Locality { id: 0, capacity: probs.len(), jobs_by_profession: vec![jobs] }];
    let rows = probs.iter().map(|&p| vec![p]).collect();
    Instance::new(model, 1, migrants, localities, rows).unwrap()
}

fn everyone(inst: &Instance) -> Assignment {
    let pairs: Vec<_> = (0..inst.num_migrants()).map(|v| (v, 0)).collect();
    Assignment::from_pairs(inst.num_migrants(), 1, &pairs)
}

#[test]
fn interview_worked_examples() {
    // one job, two applicants at p = 0.5: 0.5 + 0.5 * 0.5
    let inst = single_locality(ModelKind::Interview, 1, &[0.5, 0.5]);
    let a = everyone(&inst);
    assert!((interview_oracle(&inst, &a) - 0.75).abs() < 1e-12);
    assert!((exact_objective(&inst, &a).unwrap() - 0.75).abs() < 1e-12);

    // two jobs, one applicant: 1 - 0.5^2
    let inst = single_locality(ModelKind::Interview, 2, &[0.5]);
    let a = everyone(&inst);
    assert!((exact_objective(&inst, &a).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn coordination_two_by_two_half() {
    let inst = single_locality(ModelKind::Coordination, 2, &[0.5, 0.5]);
    let a = everyone(&inst);
    // 16 equally likely graphs: 1 empty, 4 single edges, 2 perfect matchings
    // among the 6 two-edge graphs, and all denser graphs hold a perfect matching.
    let by_hand = (0.0 + 4.0 * 1.0 + 2.0 * 2.0 + 4.0 * 1.0 + 4.0 * 2.0 + 1.0 * 2.0) / 16.0;
    assert_eq!(by_hand, 1.375);
    assert!((coordination_oracle(&inst, &a) - by_hand).abs() < 1e-12);
    assert!((exact_objective(&inst, &a).unwrap() - by_hand).abs() < 1e-12);
}

#[test]
fn exact_objective_agrees_with_reference_oracle() {
    for model in [ModelKind::Interview, ModelKind::Coordination] {
        for seed in 0..40 {
            let inst = random_tiny(model, 4, 2, seed);
            for a in feasible_assignments(&inst) {
                let want = oracle(&inst, &a);
                let got = exact_objective(&inst, &a).unwrap();
                assert!((got - want).abs() < 1e-9, "{model} seed {seed} {a}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn monte_carlo_is_close_to_exact() {
    for model in [ModelKind::Interview, ModelKind::Coordination] {
        for seed in 0..5 {
            let inst = random_tiny(model, 4, 2, 100 + seed);
            let all = feasible_assignments(&inst);
            let a = all.iter().max_by_key(|a| a.count_ones()).unwrap();
            let exact = exact_objective(&inst, a).unwrap();
            let est = Evaluator::monte_carlo(20_000, seed).estimate_with_error(&inst, a).unwrap();
            assert!(
                (est.mean - exact).abs() <= 5.0 * est.std_error + 1e-12,
                "{model} seed {seed}: {} vs {exact} (se {})",
                est.mean,
                est.std_error
            );
        }
    }
}
