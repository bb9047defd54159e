//! Solution encoding, matroid feasibility, variation operators and Pareto dominance.
//!
//! An [`Assignment`] is a bit vector of length `n = |V|·|L|`; bit `i·|L| + j`
//! (zero-based) selects the pair (migrant `i`, locality `j`). The same bits read as a
//! `|V| x |L|` matrix give one row per migrant and one column per locality.

mod dominance;
mod operators;

pub use dominance::{compare, Dominance, ObjectivePair};
pub use operators::{
    bitwise_mutation, crossover_at, matrix_swap_mutation, one_point_crossover, repair, SwapAxis,
};

use std::fmt;

use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    migrants: usize,
    localities: usize,
    bits: Vec<bool>,
}

impl Assignment {
    /// The all-zero assignment (no pair selected).
    pub fn empty(migrants: usize, localities: usize) -> Self {
        Assignment {
            migrants,
            localities,
            bits: vec![false; migrants * localities],
        }
    }

    pub fn empty_for(instance: &Instance) -> Self {
        Self::empty(instance.num_migrants(), instance.num_localities())
    }

    pub fn from_bits(migrants: usize, localities: usize, bits: Vec<bool>) -> Self {
        assert_eq!(
            bits.len(),
            migrants * localities,
            "bit vector length must equal |V|·|L|"
        );
        Assignment {
            migrants,
            localities,
            bits,
        }
    }

    pub fn from_pairs(migrants: usize, localities: usize, pairs: &[(usize, usize)]) -> Self {
        let mut a = Self::empty(migrants, localities);
        for &(v, l) in pairs {
            a.set(v, l, true);
        }
        a
    }

    /// Number of bits, `n`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn num_migrants(&self) -> usize {
        self.migrants
    }

    pub fn num_localities(&self) -> usize {
        self.localities
    }

    pub fn index(&self, migrant: usize, locality: usize) -> usize {
        debug_assert!(migrant < self.migrants && locality < self.localities);
        migrant * self.localities + locality
    }

    /// Inverse of [`Assignment::index`].
    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.localities, index % self.localities)
    }

    pub fn get(&self, migrant: usize, locality: usize) -> bool {
        self.bits[self.index(migrant, locality)]
    }

    pub fn set(&mut self, migrant: usize, locality: usize, value: bool) {
        let i = self.index(migrant, locality);
        self.bits[i] = value;
    }

    pub fn bit(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set_bit(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index] = !self.bits[index];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `|x|`, the number of selected pairs.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `|x|_0`, the number of unselected pairs.
    pub fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    pub fn row(&self, migrant: usize) -> &[bool] {
        &self.bits[migrant * self.localities..(migrant + 1) * self.localities]
    }

    pub fn row_sum(&self, migrant: usize) -> usize {
        self.row(migrant).iter().filter(|&&b| b).count()
    }

    pub fn column_sum(&self, locality: usize) -> usize {
        (0..self.migrants).filter(|&v| self.get(v, locality)).count()
    }

    /// Selected pairs in lexicographic (migrant, locality) order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / self.localities, i % self.localities))
    }

    /// True when every selected pair of `self` is also selected in `other`.
    pub fn is_subset_of(&self, other: &Assignment) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for l in 0..self.localities {
            self.bits.swap(i * self.localities + l, j * self.localities + l);
        }
    }

    pub fn swap_columns(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for v in 0..self.migrants {
            let row = v * self.localities;
            self.bits.swap(row + i, row + j);
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (v, l)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({v}, {l})")?;
        }
        f.write_str("]")
    }
}

/// Whether `a` satisfies both partition matroids: at most one locality per migrant
/// and at most `cap_l` migrants at every locality.
///
/// Panics if `a` is not sized for `instance`.
pub fn is_feasible(instance: &Instance, a: &Assignment) -> bool {
    assert!(
        a.num_migrants() == instance.num_migrants() && a.num_localities() == instance.num_localities(),
        "assignment shape {}x{} does not match instance {}x{}",
        a.num_migrants(),
        a.num_localities(),
        instance.num_migrants(),
        instance.num_localities()
    );
    let mut column = vec![0usize; a.num_localities()];
    for v in 0..a.num_migrants() {
        let mut in_row = 0;
        for (l, &b) in a.row(v).iter().enumerate() {
            if b {
                in_row += 1;
                column[l] += 1;
            }
        }
        if in_row > 1 {
            return false;
        }
    }
    column
        .iter()
        .enumerate()
        .all(|(l, &c)| c <= instance.capacity(l))
}
