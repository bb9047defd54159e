use serde::{Deserialize, Serialize};

/// Bi-objective value of a solution; both coordinates are maximized.
///
/// `f1` is the estimated number of employed migrants, or exactly `-1` for an
/// infeasible solution. `f2` is the number of unselected pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub f1: f64,
    pub f2: usize,
}

/// f1 value carried by every infeasible solution.
pub const INFEASIBLE_F1: f64 = -1.0;

impl ObjectivePair {
    pub fn new(f1: f64, f2: usize) -> Self {
        ObjectivePair { f1, f2 }
    }

    pub fn infeasible(f2: usize) -> Self {
        ObjectivePair { f1: INFEASIBLE_F1, f2 }
    }

    pub fn is_feasible(&self) -> bool {
        self.f1 != INFEASIBLE_F1
    }

    /// `self ⪰ other`: at least as good in both objectives.
    pub fn weakly_dominates(&self, other: &ObjectivePair) -> bool {
        self.f1 >= other.f1 && self.f2 >= other.f2
    }

    /// `self ≻ other`: weakly dominates and strictly better in one objective.
    pub fn dominates(&self, other: &ObjectivePair) -> bool {
        self.weakly_dominates(other) && (self.f1 > other.f1 || self.f2 > other.f2)
    }
}

/// Outcome of comparing two objective vectors.
///
/// Weak dominance is the union of strict dominance and equality, so it is
/// exposed through [`Dominance::first_weakly_dominates`] and
/// [`Dominance::second_weakly_dominates`] rather than separate variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    FirstDominates,
    SecondDominates,
    Equal,
    Incomparable,
}

impl Dominance {
    pub fn first_weakly_dominates(self) -> bool {
        matches!(self, Dominance::FirstDominates | Dominance::Equal)
    }

    pub fn second_weakly_dominates(self) -> bool {
        matches!(self, Dominance::SecondDominates | Dominance::Equal)
    }

    /// The relation seen from the other side.
    pub fn reversed(self) -> Self {
        match self {
            Dominance::FirstDominates => Dominance::SecondDominates,
            Dominance::SecondDominates => Dominance::FirstDominates,
            other => other,
        }
    }
}

pub fn compare(p: &ObjectivePair, q: &ObjectivePair) -> Dominance {
    match (p.weakly_dominates(q), q.weakly_dominates(p)) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        (false, false) => Dominance::Incomparable,
    }
}
