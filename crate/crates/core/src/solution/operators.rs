//! Variation operators. Every operator returns a new assignment and leaves its
//! parents untouched.

use rand::seq::SliceRandom;
use rand::Rng;

use super::Assignment;
use crate::instance::Instance;

/// Flips every bit independently with probability `1/n`.
pub fn bitwise_mutation<R: Rng + ?Sized>(parent: &Assignment, rng: &mut R) -> Assignment {
    let mut child = parent.clone();
    let n = child.len();
    if n == 0 {
        return child;
    }
    let rate = 1.0 / n as f64;
    for i in 0..n {
        if rng.gen_bool(rate) {
            child.flip(i);
        }
    }
    child
}

/// Exchanges the bits after the `cut`-th bit (one-based) of `a` and `b`.
/// `cut == n` returns copies of the parents.
pub fn crossover_at(a: &Assignment, b: &Assignment, cut: usize) -> (Assignment, Assignment) {
    assert_eq!(a.len(), b.len(), "crossover parents must have equal length");
    assert!(cut <= a.len(), "cut point {cut} beyond length {}", a.len());
    let mut x = a.clone();
    let mut y = b.clone();
    for i in cut..a.len() {
        x.set_bit(i, b.bit(i));
        y.set_bit(i, a.bit(i));
    }
    (x, y)
}

/// One-point crossover with the cut drawn uniformly from `{1, ..., n}`.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &Assignment,
    b: &Assignment,
    rng: &mut R,
) -> (Assignment, Assignment) {
    assert_eq!(a.len(), b.len(), "crossover parents must have equal length");
    if a.is_empty() {
        return (a.clone(), b.clone());
    }
    let cut = rng.gen_range(1..=a.len());
    crossover_at(a, b, cut)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapAxis {
    Rows,
    Columns,
}

/// Swaps two rows or two columns of the solution matrix. The two indices are
/// drawn uniformly with replacement, so a self-swap (no change) is possible.
pub fn matrix_swap_mutation<R: Rng + ?Sized>(
    parent: &Assignment,
    rng: &mut R,
    axis: SwapAxis,
) -> Assignment {
    let mut child = parent.clone();
    match axis {
        SwapAxis::Rows => {
            let m = child.num_migrants();
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m);
            child.swap_rows(i, j);
        }
        SwapAxis::Columns => {
            let m = child.num_localities();
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m);
            child.swap_columns(i, j);
        }
    }
    child
}

/// Clears uniformly chosen excess 1-bits, rows first, then columns against
/// capacities. The output is feasible, bitwise at most the input, and equal to
/// the input when the input is already feasible.
pub fn repair<R: Rng + ?Sized>(instance: &Instance, a: &Assignment, rng: &mut R) -> Assignment {
    let mut out = a.clone();
    let mut ones: Vec<usize> = Vec::new();
    for v in 0..out.num_migrants() {
        ones.clear();
        ones.extend((0..out.num_localities()).filter(|&l| out.get(v, l)).map(|l| out.index(v, l)));
        if ones.len() > 1 {
            let excess = ones.len() - 1;
            let (chosen, _) = ones.partial_shuffle(rng, excess);
            for &i in chosen.iter() {
                out.set_bit(i, false);
            }
        }
    }
    for l in 0..out.num_localities() {
        ones.clear();
        ones.extend((0..out.num_migrants()).filter(|&v| out.get(v, l)).map(|v| out.index(v, l)));
        let cap = instance.capacity(l);
        if ones.len() > cap {
            let excess = ones.len() - cap;
            let (chosen, _) = ones.partial_shuffle(rng, excess);
            for &i in chosen.iter() {
                out.set_bit(i, false);
            }
        }
    }
    out
}
