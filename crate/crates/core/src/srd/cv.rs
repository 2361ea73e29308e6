use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{srd, wilcoxon_signed_rank, ScoreMatrix, SrdError, WilcoxonResult};
use crate::rng::{derive_seed, stream_rng};

/// Significance level of the pairwise Wilcoxon tests.
pub const CV_ALPHA: f64 = 0.05;
const LEAVE_ONE_OUT_MAX_ROWS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvColumnStats {
    pub column: String,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// One position in the median ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvGroupEntry {
    pub column: String,
    pub median: f64,
    /// Not significantly different from the next entry.
    pub similar_to_next: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: usize,
    pub leave_one_out: bool,
    pub columns: Vec<String>,
    /// Rows left out in each fold.
    pub left_out: Vec<Vec<usize>>,
    /// `folds x solutions` normalized SRD values.
    pub fold_srd: Vec<Vec<f64>>,
    pub stats: Vec<CvColumnStats>,
    /// Symmetric matrix of two-sided p-values; diagonal is 1.
    pub wilcoxon_p: Vec<Vec<f64>>,
    pub tests: Vec<Vec<Option<WilcoxonResult>>>,
    /// Columns ordered by median normalized SRD.
    pub groups: Vec<CvGroupEntry>,
}

impl CvResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// p-value between two named columns.
    pub fn p_between(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.wilcoxon_p[self.column_index(a)?][self.column_index(b)?])
    }

    /// True when the Wilcoxon test does not separate the two columns.
    pub fn similar(&self, a: &str, b: &str) -> Option<bool> {
        self.p_between(a, b).map(|p| p >= CV_ALPHA)
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(xs: &[f64], q: f64) -> f64 {
    let pos = q * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (xs[hi] - xs[lo]) * (pos - lo as f64)
}

/// Cross-validate SRD.
///
/// With at most 7 rows each row is left out once. Otherwise `folds` folds
/// each leave out `ceil(n / folds)` rows drawn uniformly without replacement,
/// independently per fold. Normalized SRD is recomputed on the retained rows,
/// and every pair of solutions is compared with the Wilcoxon test on the
/// paired fold values.
pub fn cross_validate(
    m: &ScoreMatrix,
    folds: usize,
    seed: u64,
    eps_reference: f64,
    eps_solutions: f64,
) -> Result<CvResult, SrdError> {
    let n = m.rows();
    if n < 4 {
        return Err(SrdError::TooFewRows { min: 4, found: n });
    }
    let leave_one_out = n <= LEAVE_ONE_OUT_MAX_ROWS;
    let left_out: Vec<Vec<usize>> = if leave_one_out {
        (0..n).map(|i| vec![i]).collect()
    } else {
        if folds < 2 {
            return Err(SrdError::TooFewFolds(folds));
        }
        if folds > n {
            return Err(SrdError::TooManyFolds { folds, rows: n });
        }
        let k = n.div_ceil(folds);
        let key = derive_seed(seed, "cv");
        (0..folds)
            .map(|f| {
                let mut rng = stream_rng(key, f as u64);
                let mut rows = sample(&mut rng, n, k).into_vec();
                rows.sort_unstable();
                rows
            })
            .collect()
    };

    let fold_srd = left_out
        .iter()
        .map(|out| {
            let keep: Vec<usize> = (0..n).filter(|i| !out.contains(i)).collect();
            Ok(srd(&m.select_rows(&keep)?, eps_reference, eps_solutions).nsrd)
        })
        .collect::<Result<Vec<_>, SrdError>>()?;

    let columns: Vec<String> = m
        .solution_columns()
        .iter()
        .map(|&j| m.column_ids[j].clone())
        .collect();
    let s = columns.len();
    let series: Vec<Vec<f64>> = (0..s)
        .map(|j| fold_srd.iter().map(|f| f[j]).collect())
        .collect();

    let stats: Vec<CvColumnStats> = series
        .iter()
        .zip(&columns)
        .map(|(xs, c)| {
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            CvColumnStats {
                column: c.clone(),
                median: quantile_sorted(&sorted, 0.5),
                q1: quantile_sorted(&sorted, 0.25),
                q3: quantile_sorted(&sorted, 0.75),
                min: sorted[0],
                max: sorted[sorted.len() - 1],
            }
        })
        .collect();

    let mut wilcoxon_p = vec![vec![1.0; s]; s];
    let mut tests = vec![vec![None; s]; s];
    for a in 0..s {
        for b in a + 1..s {
            let r = wilcoxon_signed_rank(&series[a], &series[b])?;
            wilcoxon_p[a][b] = r.p_value;
            wilcoxon_p[b][a] = r.p_value;
            tests[a][b] = Some(r);
            tests[b][a] = Some(r);
        }
    }

    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| stats[a].median.total_cmp(&stats[b].median).then(a.cmp(&b)));
    let groups = order
        .iter()
        .enumerate()
        .map(|(pos, &j)| CvGroupEntry {
            column: columns[j].clone(),
            median: stats[j].median,
            similar_to_next: order
                .get(pos + 1)
                .is_some_and(|&next| wilcoxon_p[j][next] >= CV_ALPHA),
        })
        .collect();

    Ok(CvResult {
        folds: left_out.len(),
        leave_one_out,
        columns,
        left_out,
        fold_srd,
        stats,
        wilcoxon_p,
        tests,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, dup: bool) -> ScoreMatrix {
        let values = (0..n)
            .map(|i| {
                let x = i as f64;
                let a = (x * 7.3).sin();
                let b = if dup { a } else { (x * 1.9).cos() };
                vec![a, b, x + 0.3 * (x * 3.1).sin()]
            })
            .collect();
        ScoreMatrix::new(
            (0..n).map(|i| format!("S{i}")).collect(),
            vec!["a".into(), "b".into(), "ref".into()],
            values,
            2,
        )
        .unwrap()
    }

    #[test]
    fn small_matrices_use_leave_one_out() {
        let r = cross_validate(&matrix(6, false), 3, 1, 0.0, 0.0).unwrap();
        assert!(r.leave_one_out);
        assert_eq!(r.folds, 6);
        assert_eq!(r.left_out, (0..6).map(|i| vec![i]).collect::<Vec<_>>());
        // folds is not consulted for leave-one-out
        assert!(cross_validate(&matrix(6, false), 50, 1, 0.0, 0.0).is_ok());
    }

    #[test]
    fn fold_sizes_and_validation() {
        let m = matrix(21, false);
        let r = cross_validate(&m, 8, 42, 0.0, 0.0).unwrap();
        assert!(!r.leave_one_out);
        assert_eq!(r.folds, 8);
        for out in &r.left_out {
            assert_eq!(out.len(), 3);
            assert!(out.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(r.fold_srd.len(), 8);
        assert!(matches!(
            cross_validate(&m, 22, 1, 0.0, 0.0),
            Err(SrdError::TooManyFolds {
                folds: 22,
                rows: 21
            })
        ));
        assert!(matches!(
            cross_validate(&m, 1, 1, 0.0, 0.0),
            Err(SrdError::TooFewFolds(1))
        ));
        assert!(matches!(
            cross_validate(&matrix(3, false), 2, 1, 0.0, 0.0),
            Err(SrdError::TooFewRows { .. })
        ));
    }

    #[test]
    fn identical_columns_are_indistinguishable() {
        let r = cross_validate(&matrix(12, true), 4, 9, 0.0, 0.0).unwrap();
        assert_eq!(r.p_between("a", "b"), Some(1.0));
        assert_eq!(r.similar("a", "b"), Some(true));
        assert_eq!(
            r.fold_srd.iter().map(|f| f[0]).collect::<Vec<_>>(),
            r.fold_srd.iter().map(|f| f[1]).collect::<Vec<_>>()
        );
    }

    #[test]
    fn same_seed_same_folds() {
        let m = matrix(21, false);
        let a = cross_validate(&m, 8, 5, 0.0, 0.0).unwrap();
        let b = cross_validate(&m, 8, 5, 0.0, 0.0).unwrap();
        assert_eq!(a, b);
        let c = cross_validate(&m, 8, 6, 0.0, 0.0).unwrap();
        assert_ne!(a.left_out, c.left_out);
    }

    #[test]
    fn p_matrix_is_symmetric_and_groups_sorted() {
        let r = cross_validate(&matrix(21, false), 8, 3, 0.0, 0.0).unwrap();
        for i in 0..2 {
            assert_eq!(r.wilcoxon_p[i][i], 1.0);
            for j in 0..2 {
                assert_eq!(r.wilcoxon_p[i][j], r.wilcoxon_p[j][i]);
            }
        }
        assert!(r.groups.windows(2).all(|w| w[0].median <= w[1].median));
        assert!(!r.groups.last().unwrap().similar_to_next);
    }

    #[test]
    fn quartiles() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_eq!(quantile_sorted(&xs, 0.25), 2.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0], 0.5), 1.5);
    }
}
