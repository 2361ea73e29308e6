//! Comparison of ranks with random numbers (CRRN).
//!
//! The null distribution is the SRD between a uniformly random permutation of
//! `1..=n` and the (possibly tied) reference ranking. It is computed exactly
//! by enumerating all permutations for `n <= 9`, approximated by a normal law
//! with mean `(n^2 - 1) / 3` and variance `(n + 1)(2n^2 + 7) / 45` for tie-free
//! references with `n > 13`, and sampled by Monte Carlo otherwise.
//!
//! SRD values are multiples of 1/2, so discrete distributions are stored as
//! histograms over twice the SRD.

use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{has_ties, max_distance, SrdError, SrdResult};
use crate::io::sig6;
use crate::rng::{derive_seed, stream_rng};

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const MIN_MC_SAMPLES: usize = 10_000;
const EXACT_MAX_N: usize = 9;
const NORMAL_MIN_N: usize = 14;
const MC_CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullRegime {
    Exact,
    MonteCarlo,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NullDistribution {
    /// `counts[k]` = number of outcomes with SRD = k / 2.
    Discrete {
        counts: Vec<u64>,
        total: u64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
}

fn doubled(ranks: &[f64]) -> Vec<i64> {
    ranks.iter().map(|r| (2.0 * r).round() as i64).collect()
}

fn doubled_distance(perm: &[i64], reference2: &[i64]) -> usize {
    perm.iter()
        .zip(reference2)
        .map(|(p, r)| (2 * p - r).unsigned_abs() as usize)
        .sum()
}

impl NullDistribution {
    /// Enumerate all `n!` permutations (Heap's algorithm).
    pub fn exact(reference_ranks: &[f64]) -> Self {
        let n = reference_ranks.len();
        let r2 = doubled(reference_ranks);
        let mut counts = vec![0u64; n * n + 2];
        let mut perm: Vec<i64> = (1..=n as i64).collect();
        let mut c = vec![0usize; n];
        counts[doubled_distance(&perm, &r2)] += 1;
        let mut total = 1u64;
        let mut i = 1;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                counts[doubled_distance(&perm, &r2)] += 1;
                total += 1;
                c[i] += 1;
                i = 1;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        NullDistribution::Discrete { counts, total }
    }

    /// `samples` uniform random permutations. Chunk `c` draws from stream `c`
    /// of `seed`, and chunk histograms are added, so the result does not
    /// depend on scheduling.
    pub fn monte_carlo(reference_ranks: &[f64], samples: usize, seed: u64) -> Self {
        let n = reference_ranks.len();
        let r2 = doubled(reference_ranks);
        let chunks = samples.div_ceil(MC_CHUNK);
        let counts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, c as u64);
                let k = MC_CHUNK.min(samples - c * MC_CHUNK);
                let mut hist = vec![0u64; n * n + 2];
                let mut perm: Vec<i64> = (1..=n as i64).collect();
                for _ in 0..k {
                    perm.shuffle(&mut rng);
                    hist[doubled_distance(&perm, &r2)] += 1;
                }
                hist
            })
            .reduce(
                || vec![0u64; n * n + 2],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        NullDistribution::Discrete {
            counts,
            total: samples as u64,
        }
    }

    pub fn normal(n: usize) -> Self {
        let nf = n as f64;
        NullDistribution::Normal {
            mean: (nf * nf - 1.0) / 3.0,
            sd: ((nf + 1.0) * (2.0 * nf * nf + 7.0) / 45.0).sqrt(),
        }
    }

    /// Pick the regime for this reference ranking.
    pub fn for_reference(
        reference_ranks: &[f64],
        mc_samples: usize,
        seed: u64,
    ) -> (Self, NullRegime) {
        let n = reference_ranks.len();
        if n <= EXACT_MAX_N {
            (Self::exact(reference_ranks), NullRegime::Exact)
        } else if n >= NORMAL_MIN_N && !has_ties(reference_ranks) {
            (Self::normal(n), NullRegime::Normal)
        } else {
            (
                Self::monte_carlo(reference_ranks, mc_samples, seed),
                NullRegime::MonteCarlo,
            )
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            NullDistribution::Discrete { counts, total } => {
                let s: u128 = counts
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| k as u128 * c as u128)
                    .sum();
                s as f64 / 2.0 / *total as f64
            }
            NullDistribution::Normal { mean, .. } => *mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            NullDistribution::Discrete { counts, total } => {
                // exact integer moments of the doubled statistic
                let (s1, s2) = counts
                    .iter()
                    .enumerate()
                    .fold((0u128, 0u128), |(a, b), (k, &c)| {
                        let k = k as u128;
                        (a + k * c as u128, b + k * k * c as u128)
                    });
                let t = *total as u128;
                // Var(X/2) = (t*s2 - s1^2) / (4 t^2)
                let num = t * s2 - s1 * s1;
                num as f64 / (4.0 * (t * t) as f64)
            }
            NullDistribution::Normal { sd, .. } => sd * sd,
        }
    }

    /// Smallest SRD value `v` with `P(X <= v) >= num / den`.
    pub fn quantile(&self, num: u64, den: u64) -> f64 {
        match self {
            NullDistribution::Discrete { counts, total } => {
                let mut cum = 0u128;
                for (k, &c) in counts.iter().enumerate() {
                    cum += c as u128;
                    if c > 0 && cum * den as u128 >= num as u128 * *total as u128 {
                        return k as f64 / 2.0;
                    }
                }
                (counts.len() - 1) as f64 / 2.0
            }
            NullDistribution::Normal { mean, sd } => Normal::new(*mean, *sd)
                .expect("sd > 0")
                .inverse_cdf(num as f64 / den as f64),
        }
    }

    /// `P(X < srd)`.
    pub fn prob_below(&self, srd: f64) -> f64 {
        match self {
            NullDistribution::Discrete { counts, total } => {
                let k = (2.0 * srd).round().max(0.0) as usize;
                let below: u64 = counts.iter().take(k.min(counts.len())).sum();
                below as f64 / *total as f64
            }
            NullDistribution::Normal { mean, sd } => {
                Normal::new(*mean, *sd).expect("sd > 0").cdf(srd)
            }
        }
    }

    /// `P(X <= srd)`.
    pub fn prob_at_or_below(&self, srd: f64) -> f64 {
        match self {
            NullDistribution::Discrete { counts, total } => {
                let k = (2.0 * srd).round().max(0.0) as usize;
                let upto: u64 = counts.iter().take((k + 1).min(counts.len())).sum();
                upto as f64 / *total as f64
            }
            NullDistribution::Normal { .. } => self.prob_below(srd),
        }
    }

    /// `(srd, P(X <= srd))` on the support (discrete) or on a 201-point grid
    /// over `[0, max]` (normal).
    pub fn cdf_points(&self, max: u64) -> Vec<(f64, f64)> {
        match self {
            NullDistribution::Discrete { counts, total } => {
                let mut cum = 0u64;
                counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(k, &c)| {
                        cum += c;
                        (k as f64 / 2.0, cum as f64 / *total as f64)
                    })
                    .collect()
            }
            NullDistribution::Normal { .. } => (0..=200)
                .map(|i| {
                    let x = max as f64 * i as f64 / 200.0;
                    (x, self.prob_at_or_below(x))
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Closer to the reference than 95% of random rankings.
    #[serde(rename = "below-5%")]
    Better,
    #[serde(rename = "random-zone")]
    Random,
    /// Farther than 95% of random rankings: reverse order.
    #[serde(rename = "above-95%")]
    Reversed,
}

/// Normalized SRD at the 5% (XX1), 50% and 95% (XX19) points of the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullQuantiles {
    pub xx1: f64,
    pub median: f64,
    pub xx19: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrrnColumn {
    pub column: String,
    pub nsrd: f64,
    /// `P(null < observed)`.
    pub percentile: f64,
    /// `P(null <= observed)`.
    pub p_at_or_below: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crrn {
    pub regime: NullRegime,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mc_samples: Option<usize>,
    /// In SRD units.
    pub null_mean: f64,
    pub null_variance: f64,
    pub quantiles: NullQuantiles,
    pub columns: Vec<CrrnColumn>,
    /// `(nsrd, cdf)` pairs.
    pub cdf: Vec<(f64, f64)>,
}

impl Crrn {
    /// `nsrd,cdf` CSV of the null distribution.
    pub fn write_cdf_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "nsrd,cdf")?;
        for (x, p) in &self.cdf {
            writeln!(w, "{},{}", sig6(*x), sig6(*p))?;
        }
        Ok(())
    }
}

fn verdict(percentile: f64) -> Verdict {
    if percentile < 0.05 {
        Verdict::Better
    } else if percentile >= 0.95 {
        Verdict::Reversed
    } else {
        Verdict::Random
    }
}

/// Attach the permutation test to `result`.
pub fn crrn(mut result: SrdResult, mc_samples: usize, seed: u64) -> Result<SrdResult, SrdError> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(SrdError::TooFewMcSamples(mc_samples));
    }
    if result.n < 2 {
        return Err(SrdError::TooFewRows {
            min: 2,
            found: result.n,
        });
    }
    let maxd = max_distance(result.n) as f64;
    let (null, regime) = NullDistribution::for_reference(
        &result.reference_ranks,
        mc_samples,
        derive_seed(seed, "crrn"),
    );
    let quantiles = NullQuantiles {
        xx1: null.quantile(5, 100) / maxd,
        median: null.quantile(50, 100) / maxd,
        xx19: null.quantile(95, 100) / maxd,
    };
    let columns = result
        .columns
        .iter()
        .zip(&result.srd)
        .map(|(c, &s)| {
            let percentile = null.prob_below(s);
            CrrnColumn {
                column: c.clone(),
                nsrd: s / maxd,
                percentile,
                p_at_or_below: null.prob_at_or_below(s),
                verdict: verdict(percentile),
            }
        })
        .collect();
    let cdf = null
        .cdf_points(max_distance(result.n))
        .into_iter()
        .map(|(x, p)| (x / maxd, p))
        .collect();
    result.crrn = Some(Crrn {
        regime,
        mc_samples: (regime == NullRegime::MonteCarlo).then_some(mc_samples),
        null_mean: null.mean(),
        null_variance: null.variance(),
        quantiles,
        columns,
        cdf,
    });
    Ok(result)
}
