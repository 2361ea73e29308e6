//! Sum of Ranking Differences.
//!
//! Input is a [`ScoreMatrix`]: rows are the compared objects (node sets),
//! columns are solutions (influence measures) plus one reference column
//! (simulated spread). Each column is replaced by its fractional ranks; the
//! SRD of a solution is the L1 distance between its ranks and the reference
//! ranks, normalized by the largest possible distance `floor(n^2 / 2)`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::io::{csv_field, sig6, split_csv_line};

mod crrn;
mod cv;
mod ranks;
mod wilcoxon;

pub use crrn::{
    crrn, Crrn, CrrnColumn, NullDistribution, NullQuantiles, NullRegime, Verdict,
    DEFAULT_MC_SAMPLES, MIN_MC_SAMPLES,
};
pub use cv::{cross_validate, CvColumnStats, CvGroupEntry, CvResult, CV_ALPHA};
pub use ranks::{fractional_ranks, has_ties};
pub use wilcoxon::{
    wilcoxon_signed_rank, WilcoxonMethod, WilcoxonResult, EXACT_MAX_PAIRS, MIN_PAIRS,
};

#[derive(Debug, Error)]
pub enum SrdError {
    #[error("need at least {min} rows, found {found}")]
    TooFewRows { min: usize, found: usize },
    #[error("score matrix has no solution columns")]
    NoSolutionColumns,
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("reference column `{0}` not found")]
    BadReference(String),
    #[error("matrix line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("Monte Carlo sample count {0} is below the minimum of {MIN_MC_SAMPLES}")]
    TooFewMcSamples(usize),
    #[error("{folds} folds requested for {rows} rows")]
    TooManyFolds { folds: usize, rows: usize },
    #[error("at least 2 folds are required, got {0}")]
    TooFewFolds(usize),
}

/// Which column of a matrix file holds the reference values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceColumn {
    Last,
    First,
    /// Column header.
    Name(String),
    /// 0-based index among value columns.
    Index(usize),
}

impl std::str::FromStr for ReferenceColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "last" => ReferenceColumn::Last,
            "first" => ReferenceColumn::First,
            _ => match s.parse() {
                Ok(i) => ReferenceColumn::Index(i),
                Err(_) => ReferenceColumn::Name(s.to_string()),
            },
        })
    }
}

/// Rows x columns of finite scores with one designated reference column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub row_ids: Vec<String>,
    pub column_ids: Vec<String>,
    /// Row-major.
    pub values: Vec<Vec<f64>>,
    pub reference: usize,
}

impl ScoreMatrix {
    pub fn new(
        row_ids: Vec<String>,
        column_ids: Vec<String>,
        values: Vec<Vec<f64>>,
        reference: usize,
    ) -> Result<Self, SrdError> {
        let n = row_ids.len();
        if n < 2 {
            return Err(SrdError::TooFewRows { min: 2, found: n });
        }
        if column_ids.len() < 2 {
            return Err(SrdError::NoSolutionColumns);
        }
        if reference >= column_ids.len() {
            return Err(SrdError::BadReference(reference.to_string()));
        }
        if values.len() != n {
            return Err(SrdError::LengthMismatch(values.len(), n));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != column_ids.len() {
                return Err(SrdError::LengthMismatch(row.len(), column_ids.len()));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(SrdError::NonFinite { row: i, column: j });
            }
        }
        Ok(ScoreMatrix {
            row_ids,
            column_ids,
            values,
            reference,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn columns(&self) -> usize {
        self.column_ids.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    /// Indices of all non-reference columns, in order.
    pub fn solution_columns(&self) -> Vec<usize> {
        (0..self.columns())
            .filter(|&j| j != self.reference)
            .collect()
    }

    /// Sub-matrix of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, SrdError> {
        ScoreMatrix::new(
            rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            self.column_ids.clone(),
            rows.iter().map(|&i| self.values[i].clone()).collect(),
            self.reference,
        )
    }

    /// Parse CSV: header row of column ids (first cell labels the row-id
    /// column), then one row per object with its id first.
    pub fn parse_csv(text: &str, reference: &ReferenceColumn) -> Result<Self, SrdError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or(SrdError::Csv {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let header = split_csv_line(header);
        let column_ids: Vec<String> = header[1..].iter().map(|s| s.trim().to_string()).collect();
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines {
            let fields = split_csv_line(line);
            if fields.len() != header.len() {
                return Err(SrdError::Csv {
                    line: lineno + 1,
                    msg: format!("expected {} fields, found {}", header.len(), fields.len()),
                });
            }
            row_ids.push(fields[0].trim().to_string());
            let row = fields[1..]
                .iter()
                .map(|f| {
                    let t = f.trim().trim_end_matches('%');
                    t.parse::<f64>().map_err(|_| SrdError::Csv {
                        line: lineno + 1,
                        msg: format!("`{f}` is not a number"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            values.push(row);
        }
        let m = column_ids.len();
        let reference = match reference {
            ReferenceColumn::Last if m > 0 => m - 1,
            ReferenceColumn::First if m > 0 => 0,
            ReferenceColumn::Index(i) if *i < m => *i,
            ReferenceColumn::Name(name) => column_ids
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| SrdError::BadReference(name.clone()))?,
            other => return Err(SrdError::BadReference(format!("{other:?}"))),
        };
        ScoreMatrix::new(row_ids, column_ids, values, reference)
    }

    pub fn load_csv(path: impl AsRef<Path>, reference: &ReferenceColumn) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse_csv(&text, reference)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "id")?;
        for c in &self.column_ids {
            write!(w, ",{}", csv_field(c))?;
        }
        writeln!(w)?;
        for (id, row) in self.row_ids.iter().zip(&self.values) {
            write!(w, "{}", csv_field(id))?;
            for v in row {
                write!(w, ",{}", sig6(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Per-column fractional ranks, same shape as the score matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingMatrix {
    pub row_ids: Vec<String>,
    pub column_ids: Vec<String>,
    /// Row-major.
    pub ranks: Vec<Vec<f64>>,
}

impl RankingMatrix {
    /// Rank every column; the reference column uses `eps_reference`, all
    /// others `eps_solutions`.
    pub fn from_scores(m: &ScoreMatrix, eps_reference: f64, eps_solutions: f64) -> Self {
        let cols: Vec<Vec<f64>> = (0..m.columns())
            .map(|j| {
                let eps = if j == m.reference {
                    eps_reference
                } else {
                    eps_solutions
                };
                fractional_ranks(&m.column(j), eps)
            })
            .collect();
        let ranks = (0..m.rows())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        RankingMatrix {
            row_ids: m.row_ids.clone(),
            column_ids: m.column_ids.clone(),
            ranks,
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.ranks.iter().map(|r| r[j]).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "id")?;
        for c in &self.column_ids {
            write!(w, ",{}", csv_field(c))?;
        }
        writeln!(w)?;
        for (id, row) in self.row_ids.iter().zip(&self.ranks) {
            write!(w, "{}", csv_field(id))?;
            for v in row {
                write!(w, ",{}", sig6(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `floor(n^2 / 2)`, the largest L1 distance between two permutations of
/// `1..=n` (attained by reversal).
pub fn max_distance(n: usize) -> u64 {
    (n as u64 * n as u64) / 2
}

/// L1 distance between two rank vectors.
pub fn rank_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrdResult {
    pub n: usize,
    pub reference: String,
    /// Solution column ids, matrix order.
    pub columns: Vec<String>,
    pub srd: Vec<f64>,
    pub nsrd: Vec<f64>,
    pub max_distance: u64,
    pub reference_ranks: Vec<f64>,
    pub ranking: RankingMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub crrn: Option<Crrn>,
}

impl SrdResult {
    pub fn srd_of(&self, column: &str) -> Option<f64> {
        self.columns
            .iter()
            .position(|c| c == column)
            .map(|i| self.srd[i])
    }

    /// Fractional rank of each solution by SRD (1 = closest to the reference).
    pub fn solution_ranks(&self) -> Vec<f64> {
        fractional_ranks(&self.srd, 0.0)
    }
}

/// SRD and normalized SRD of every solution column.
pub fn srd(m: &ScoreMatrix, eps_reference: f64, eps_solutions: f64) -> SrdResult {
    let ranking = RankingMatrix::from_scores(m, eps_reference, eps_solutions);
    let reference_ranks = ranking.column(m.reference);
    let maxd = max_distance(m.rows());
    let sols = m.solution_columns();
    let srd: Vec<f64> = sols
        .iter()
        .map(|&j| rank_distance(&ranking.column(j), &reference_ranks))
        .collect();
    let nsrd = srd.iter().map(|s| s / maxd as f64).collect();
    SrdResult {
        n: m.rows(),
        reference: m.column_ids[m.reference].clone(),
        columns: sols.iter().map(|&j| m.column_ids[j].clone()).collect(),
        srd,
        nsrd,
        max_distance: maxd,
        reference_ranks,
        ranking,
        crrn: None,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn table2() -> ScoreMatrix {
        ScoreMatrix::new(
            (1..=5).map(|i| format!("Prop{i}")).collect(),
            vec!["Solution 1".into(), "Solution 2".into(), "Ref".into()],
            vec![
                vec![0.37, 0.65, 0.49],
                vec![0.51, 0.14, 0.34],
                vec![0.82, 0.88, 1.0],
                vec![0.93, 0.65, 0.84],
                vec![0.88, 0.65, 0.84],
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn max_distance_values() {
        assert_eq!(max_distance(2), 2);
        assert_eq!(max_distance(5), 12);
        assert_eq!(max_distance(21), 220);
    }

    #[test]
    fn worked_example() {
        let r = srd(&table2(), 0.0, 0.0);
        assert_eq!(r.srd, [6.0, 2.0]);
        assert_eq!(r.nsrd[0], 0.5);
        assert!((r.nsrd[1] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.reference_ranks, [2.0, 1.0, 5.0, 3.5, 3.5]);
        assert_eq!(r.ranking.column(1), [3.0, 1.0, 5.0, 3.0, 3.0]);
    }

    #[test]
    fn identical_column_scores_zero() {
        let mut m = table2();
        for row in &mut m.values {
            row[0] = row[2];
        }
        assert_eq!(srd(&m, 0.0, 0.0).srd[0], 0.0);
    }

    #[test]
    fn matrix_validation() {
        assert!(matches!(
            ScoreMatrix::new(
                vec!["a".into()],
                vec!["x".into(), "r".into()],
                vec![vec![1.0, 2.0]],
                1
            ),
            Err(SrdError::TooFewRows { .. })
        ));
        assert!(matches!(
            ScoreMatrix::new(
                vec!["a".into(), "b".into()],
                vec!["x".into(), "r".into()],
                vec![vec![1.0, f64::NAN], vec![1.0, 2.0]],
                1
            ),
            Err(SrdError::NonFinite { row: 0, column: 1 })
        ));
    }

    #[test]
    fn csv_round_trip_and_reference_selection() {
        let m = table2();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = ScoreMatrix::parse_csv(&text, &ReferenceColumn::Last).unwrap();
        assert_eq!(back, m);
        let by_name = ScoreMatrix::parse_csv(&text, &"Ref".parse().unwrap()).unwrap();
        assert_eq!(by_name.reference, 2);
        let first = ScoreMatrix::parse_csv(&text, &ReferenceColumn::First).unwrap();
        assert_eq!(first.reference, 0);
        assert!(ScoreMatrix::parse_csv(&text, &"nope".parse().unwrap()).is_err());
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            ScoreMatrix::parse_csv("id,a,r\nx,1\n", &ReferenceColumn::Last),
            Err(SrdError::Csv { line: 2, .. })
        ));
        assert!(matches!(
            ScoreMatrix::parse_csv("id,a,r\nx,1,zz\ny,1,2\n", &ReferenceColumn::Last),
            Err(SrdError::Csv { line: 2, .. })
        ));
        // percent signs are accepted
        let m =
            ScoreMatrix::parse_csv("id,a,r\nx,1,3.2%\ny,2,3.1%\n", &ReferenceColumn::Last).unwrap();
        assert_eq!(m.values[0][1], 3.2);
    }
}
