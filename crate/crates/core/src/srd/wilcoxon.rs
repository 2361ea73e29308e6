use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{fractional_ranks, SrdError};

/// Fewer nonzero differences than this give `p = 1`.
pub const MIN_PAIRS: usize = 5;
/// Largest number of nonzero differences handled by the exact null.
pub const EXACT_MAX_PAIRS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
    TooFewPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub p_value: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Nonzero differences used.
    pub pairs: usize,
    pub method: WilcoxonMethod,
}

/// Two-sided Wilcoxon matched-pair signed-rank test.
///
/// Zero differences are dropped. Absolute differences get fractional ranks
/// and `W = min(W+, W-)`. Up to [`EXACT_MAX_PAIRS`] pairs the p-value is
/// `2 P(W+ <= W)` under the exact sign-flip null of the observed (possibly
/// tied) ranks; above that a tie-corrected normal approximation with
/// continuity correction is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, SrdError> {
    if a.len() != b.len() {
        return Err(SrdError::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let k = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = fractional_ranks(&abs, 0.0);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();

    let (p_value, method) = if k < MIN_PAIRS {
        (1.0, WilcoxonMethod::TooFewPairs)
    } else if k <= EXACT_MAX_PAIRS {
        (exact_p(&ranks, w_plus.min(w_minus)), WilcoxonMethod::Exact)
    } else {
        (
            normal_p(&ranks, w_plus.min(w_minus)),
            WilcoxonMethod::Normal,
        )
    };
    Ok(WilcoxonResult {
        p_value,
        w_plus,
        w_minus,
        pairs: k,
        method,
    })
}

/// Counts sign assignments by their doubled positive-rank sum.
fn exact_p(ranks: &[f64], w: f64) -> f64 {
    let r2: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = r2.iter().sum();
    let mut ways = vec![0u64; total + 1];
    ways[0] = 1;
    let mut reach = 0;
    for &r in &r2 {
        for s in (0..=reach).rev() {
            if ways[s] > 0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * w).round() as usize;
    let tail: u64 = ways[..=limit.min(total)].iter().sum();
    let p = 2.0 * tail as f64 / (1u64 << ranks.len()) as f64;
    p.min(1.0)
}

fn normal_p(ranks: &[f64], w: f64) -> f64 {
    let k = ranks.len() as f64;
    let mean = k * (k + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = k * (k + 1.0) * (2.0 * k + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std = Normal::standard();
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerate all 2^k sign patterns directly.
    fn brute_force_p(ranks: &[f64], w: f64) -> f64 {
        let k = ranks.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << k) {
            let s: f64 = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ranks[i])
                .sum();
            if s <= w + 1e-9 {
                hits += 1;
            }
        }
        (2.0 * hits as f64 / (1u64 << k) as f64).min(1.0)
    }

    #[test]
    fn identical_vectors() {
        let a = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let r = wilcoxon_signed_rank(&a, &a).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.pairs, 0);
        assert_eq!(r.method, WilcoxonMethod::TooFewPairs);
    }

    #[test]
    fn eight_positive_differences() {
        let a: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let b = vec![0.0; 8];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.p_value, 2.0 / 256.0);
        assert_eq!(r.w_minus, 0.0);
        assert_eq!(r.w_plus, 36.0);
        let swapped = wilcoxon_signed_rank(&b, &a).unwrap();
        assert_eq!(swapped.p_value, r.p_value);
    }

    #[test]
    fn dp_matches_enumeration_with_ties() {
        let cases: [&[f64]; 4] = [
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[1.5, 1.5, 3.0, 4.5, 4.5, 6.0],
            &[2.0, 2.0, 2.0, 4.0, 5.0, 6.5, 6.5, 8.0, 9.0],
            &[
                1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0,
            ],
        ];
        for ranks in cases {
            let total: f64 = ranks.iter().sum();
            let mut w = 0.0;
            while w <= total / 2.0 {
                assert!((exact_p(ranks, w) - brute_force_p(ranks, w)).abs() < 1e-15);
                w += 0.5;
            }
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]),
            Err(SrdError::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn normal_regime_is_close_to_exact_at_boundary() {
        // 26 pairs: compare the normal p to the exact p for the same ranks
        let a: Vec<f64> = (1..=26)
            .map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 })
            .collect();
        let b = vec![0.0; 26];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        let ranks: Vec<f64> = (1..=26).map(|i| i as f64).collect();
        let exact = exact_p(&ranks, r.w_plus.min(r.w_minus));
        assert!(
            (r.p_value - exact).abs() < 0.01,
            "{} vs {}",
            r.p_value,
            exact
        );
    }
}
