//! Summary statistics and the Wilcoxon signed-rank test.

use statrs::distribution::{ContinuousCDF, Normal};

/// Largest number of non-zero differences for which the exact null
/// distribution is used in [`WilcoxonMethod::Auto`] mode.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    /// Exact for up to [`EXACT_LIMIT`] non-zero differences, normal otherwise.
    Auto,
    Exact,
    /// Normal approximation with tie and continuity correction.
    Normal,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by `n`).
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// One-based ranks in ascending order of `xs`, ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided p-value of the Wilcoxon signed-rank test on paired samples.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> f64 {
    wilcoxon_signed_rank_with(a, b, WilcoxonMethod::Auto)
}

pub fn wilcoxon_signed_rank_with(a: &[f64], b: &[f64], method: WilcoxonMethod) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    assert!(!a.is_empty(), "paired samples must be non-empty");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return 1.0;
    }
    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let exact = match method {
        WilcoxonMethod::Auto => diffs.len() <= EXACT_LIMIT,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    if exact {
        exact_p(&diffs, &ranks)
    } else {
        normal_p(&diffs, &ranks)
    }
}

/// Exact null distribution of `T+` over all `2^n` sign assignments. Average
/// ranks are multiples of 1/2, so sums are tracked in half-rank units.
fn exact_p(diffs: &[f64], ranks: &[f64]) -> f64 {
    let halves: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = halves.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &h in &halves {
        for s in (h..=total).rev() {
            counts[s] += counts[s - h];
        }
    }
    let observed: usize = diffs.iter().zip(&halves).filter(|(d, _)| **d > 0.0).map(|(_, h)| h).sum();
    // |2 T+ - total| in half-rank units is the distance from the null mean
    let dist = |s: usize| (2 * s).abs_diff(total);
    let threshold = dist(observed);
    let extreme: u64 = (0..=total).filter(|&s| dist(s) >= threshold).map(|s| counts[s]).sum();
    let all = 2f64.powi(diffs.len() as i32);
    (extreme as f64 / all).min(1.0)
}

fn normal_p(diffs: &[f64], ranks: &[f64]) -> f64 {
    let n = diffs.len() as f64;
    let t_plus: f64 = diffs.iter().zip(ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let mu = n * (n + 1.0) / 4.0;
    let mut var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        var -= (t * t * t - t) / 48.0;
    }
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((t_plus - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct enumeration of all sign flips, independent of the counting DP.
    fn enumerate_p(diffs: &[f64]) -> f64 {
        let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
        let ranks = average_ranks(&abs);
        let n = diffs.len();
        let mu = ranks.iter().sum::<f64>() / 2.0;
        let t_obs: f64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| ranks[i]).sum();
        let mut extreme = 0;
        for mask in 0u32..(1 << n) {
            let t: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if (t - mu).abs() >= (t_obs - mu).abs() - 1e-9 {
                extreme += 1;
            }
        }
        extreme as f64 / (1u64 << n) as f64
    }

    #[test]
    fn identical_samples_give_one() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(wilcoxon_signed_rank(&a, &a), 1.0);
    }

    #[test]
    fn all_positive_examples() {
        let b = [0.0; 6];
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(wilcoxon_signed_rank(&a, &b), 0.03125);
        assert_eq!(wilcoxon_signed_rank(&a[..5], &b[..5]), 0.0625);
        // the sign of the shift does not matter
        assert_eq!(wilcoxon_signed_rank(&b, &a), 0.03125);
    }

    #[test]
    fn zeros_are_dropped() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let b = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 7.0];
        assert_eq!(wilcoxon_signed_rank(&a, &b), 0.03125);
    }

    #[test]
    fn exact_matches_direct_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            // coarse values force tied ranks
            let diffs: Vec<f64> = (0..n)
                .map(|_| (rng.gen_range(-4i32..=4) as f64) * 0.5)
                .filter(|d| *d != 0.0)
                .collect();
            if diffs.is_empty() {
                continue;
            }
            let zeros = vec![0.0; diffs.len()];
            let p = wilcoxon_signed_rank_with(&diffs, &zeros, WilcoxonMethod::Exact);
            assert!((p - enumerate_p(&diffs)).abs() < 1e-12, "{diffs:?}");
        }
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(std_dev(&[5.0]), 0.0);
        assert!((std_dev(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
