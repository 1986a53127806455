//! Statistical tables over the eight-color palette.
//!
//! Everything is derived from [`distance_matrix`]: the column-stochastic
//! normalization, its column and row statistics, the column- and row-wise
//! z-scores and their normal probabilities. Statistics use the population
//! convention (divide by 8).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::palette::{distance_matrix, Matrix8, PaletteColor, PALETTE_SIZE};

const N: f64 = PALETTE_SIZE as f64;

/// How z-scores are turned into probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfMode {
    /// Continuous Φ, absolute error well under 1e-7.
    #[default]
    Precision,
    /// z rounded half away from zero to two decimals before Φ, the way a
    /// printed statistical table is read.
    PaperParity,
}

impl FromStr for CdfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precision" => Ok(CdfMode::Precision),
            "paper_parity" | "paper-parity" | "parity" => Ok(CdfMode::PaperParity),
            _ => Err(Error::invalid(
                "cdf mode",
                format!("{s:?} (expected precision or paper_parity)"),
            )),
        }
    }
}

impl fmt::Display for CdfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CdfMode::Precision => "precision",
            CdfMode::PaperParity => "paper_parity",
        })
    }
}

/// Table consulted for the probability of a color pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilitySource {
    /// Column-normalized distance; zero on the diagonal.
    #[default]
    ColStochastic,
    /// Φ of the column-wise z-scores.
    ProbCol,
    /// Φ of the row-wise z-scores.
    ProbRow,
}

impl FromStr for ProbabilitySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "col_stochastic" => Ok(ProbabilitySource::ColStochastic),
            "prob_col" => Ok(ProbabilitySource::ProbCol),
            "prob_row" => Ok(ProbabilitySource::ProbRow),
            _ => Err(Error::invalid(
                "probability source",
                format!("{s:?} (expected col_stochastic, prob_col or prob_row)"),
            )),
        }
    }
}

impl fmt::Display for ProbabilitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbabilitySource::ColStochastic => "col_stochastic",
            ProbabilitySource::ProbCol => "prob_col",
            ProbabilitySource::ProbRow => "prob_row",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub variance: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowStats {
    pub sum: f64,
    pub mean: f64,
    pub variance: f64,
    pub stddev: f64,
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64) {
    let sum: f64 = values.clone().sum();
    let mean = sum / N;
    let variance = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / N;
    (sum, mean, variance)
}

fn column(m: &Matrix8, j: usize) -> impl Iterator<Item = f64> + Clone + '_ {
    m.iter().map(move |row| row[j])
}

/// Divides each column by its sum so that every column sums to one.
pub fn column_normalize(d: &Matrix8) -> Result<Matrix8> {
    let mut out = *d;
    for j in 0..PALETTE_SIZE {
        let sum: f64 = column(d, j).sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::Degenerate {
                what: "column",
                index: j,
                reason: "non-positive sum",
            });
        }
        for row in out.iter_mut() {
            row[j] /= sum;
        }
    }
    Ok(out)
}

pub fn column_stats(m: &Matrix8) -> [ColumnStats; PALETTE_SIZE] {
    std::array::from_fn(|j| {
        let (_, mean, variance) = moments(column(m, j));
        ColumnStats {
            mean,
            variance,
            stddev: variance.sqrt(),
        }
    })
}

pub fn row_stats(m: &Matrix8) -> [RowStats; PALETTE_SIZE] {
    std::array::from_fn(|i| {
        let (sum, mean, variance) = moments(m[i].iter().copied());
        RowStats {
            sum,
            mean,
            variance,
            stddev: variance.sqrt(),
        }
    })
}

/// Standardizes each column with its own mean and population stddev.
pub fn z_score_columns(m: &Matrix8) -> Result<Matrix8> {
    let stats = column_stats(m);
    let mut z = *m;
    for (j, s) in stats.iter().enumerate() {
        if s.stddev.is_nan() || s.stddev <= 0.0 {
            return Err(Error::Degenerate {
                what: "column",
                index: j,
                reason: "zero standard deviation",
            });
        }
        for row in z.iter_mut() {
            row[j] = (row[j] - s.mean) / s.stddev;
        }
    }
    Ok(z)
}

/// Standardizes each row with its own mean and population stddev.
pub fn z_score_rows(m: &Matrix8) -> Result<Matrix8> {
    let stats = row_stats(m);
    let mut z = *m;
    for (i, s) in stats.iter().enumerate() {
        if s.stddev.is_nan() || s.stddev <= 0.0 {
            return Err(Error::Degenerate {
                what: "row",
                index: i,
                reason: "zero standard deviation",
            });
        }
        for v in z[i].iter_mut() {
            *v = (*v - s.mean) / s.stddev;
        }
    }
    Ok(z)
}

/// Standard normal CDF under the chosen lookup mode.
pub fn normal_cdf(z: f64, mode: CdfMode) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::NonFinite {
            name: "z",
            value: z,
        });
    }
    let z = match mode {
        CdfMode::Precision => z,
        CdfMode::PaperParity => (z * 100.0).round() / 100.0,
    };
    Ok(normal::phi(z))
}

fn cdf_matrix(z: &Matrix8, mode: CdfMode) -> Result<Matrix8> {
    let mut p = [[0.0; PALETTE_SIZE]; PALETTE_SIZE];
    for (prow, zrow) in p.iter_mut().zip(z) {
        for (pv, &zv) in prow.iter_mut().zip(zrow) {
            *pv = normal_cdf(zv, mode)?;
        }
    }
    Ok(p)
}

/// Every table derived from the distance matrix, computed once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticTables {
    pub mode: CdfMode,
    pub distance: Matrix8,
    pub col_stochastic: Matrix8,
    pub col_stats: [ColumnStats; PALETTE_SIZE],
    pub z_col: Matrix8,
    pub prob_col: Matrix8,
    pub row_stats: [RowStats; PALETTE_SIZE],
    pub z_row: Matrix8,
    pub prob_row: Matrix8,
}

impl StochasticTables {
    pub fn build(mode: CdfMode) -> Result<Self> {
        Self::from_distance(distance_matrix(), mode)
    }

    pub fn from_distance(distance: Matrix8, mode: CdfMode) -> Result<Self> {
        let col_stochastic = column_normalize(&distance)?;
        let col_stats = column_stats(&col_stochastic);
        let z_col = z_score_columns(&col_stochastic)?;
        let prob_col = cdf_matrix(&z_col, mode)?;
        let row_stats = row_stats(&col_stochastic);
        let z_row = z_score_rows(&col_stochastic)?;
        let prob_row = cdf_matrix(&z_row, mode)?;
        Ok(StochasticTables {
            mode,
            distance,
            col_stochastic,
            col_stats,
            z_col,
            prob_col,
            row_stats,
            z_row,
            prob_row,
        })
    }

    /// Shared tables for the palette distance matrix.
    pub fn shared(mode: CdfMode) -> &'static StochasticTables {
        static PRECISION: OnceLock<StochasticTables> = OnceLock::new();
        static PARITY: OnceLock<StochasticTables> = OnceLock::new();
        let cell = match mode {
            CdfMode::Precision => &PRECISION,
            CdfMode::PaperParity => &PARITY,
        };
        cell.get_or_init(|| {
            StochasticTables::build(mode).expect("palette distance matrix is non-degenerate")
        })
    }

    pub fn table(&self, source: ProbabilitySource) -> &Matrix8 {
        match source {
            ProbabilitySource::ColStochastic => &self.col_stochastic,
            ProbabilitySource::ProbCol => &self.prob_col,
            ProbabilitySource::ProbRow => &self.prob_row,
        }
    }

    /// Probability for the pair `(a, b)`; `a` selects the row.
    #[inline]
    pub fn pair_probability(
        &self,
        a: PaletteColor,
        b: PaletteColor,
        source: ProbabilitySource,
    ) -> f64 {
        self.table(source)[a.index()][b.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PaletteColor::*;

    fn tables() -> &'static StochasticTables {
        StochasticTables::shared(CdfMode::Precision)
    }

    fn parity() -> &'static StochasticTables {
        StochasticTables::shared(CdfMode::PaperParity)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn column_normalize_examples() {
        let c = &tables().col_stochastic;
        assert!(close(c[Blue.index()][Black.index()], 0.5 / 14.0, 1e-15));
        assert!(close(c[Blue.index()][Black.index()], 0.035714, 1e-6));
        assert!(close(c[Black.index()][Blue.index()], 0.029412, 1e-6));
        for j in 0..PALETTE_SIZE {
            let s: f64 = c.iter().map(|r| r[j]).sum();
            assert!(close(s, 1.0, 1e-12));
        }
    }

    #[test]
    fn column_normalize_rejects_zero_column() {
        let mut d = distance_matrix();
        for row in d.iter_mut() {
            row[3] = 0.0;
        }
        assert!(matches!(
            column_normalize(&d),
            Err(Error::Degenerate {
                what: "column",
                index: 3,
                ..
            })
        ));
    }

    #[test]
    fn column_stats_examples() {
        let s = &tables().col_stats;
        assert!(close(s[Black.index()].mean, 0.125, 1e-15));
        assert!(close(s[Black.index()].variance, 0.006696, 1e-6));
        assert!(close(s[White.index()].stddev, 0.054281, 1e-6));
    }

    #[test]
    fn z_col_examples() {
        let z = &tables().z_col;
        assert!(close(z[Black.index()][Black.index()], -1.52753, 1e-5));
        assert!(close(z[Yellow.index()][Black.index()], 1.091089, 1e-5));
        for j in 0..PALETTE_SIZE {
            let mean: f64 = z.iter().map(|r| r[j]).sum::<f64>() / N;
            assert!(mean.abs() <= 1e-12);
        }
    }

    #[test]
    fn z_scores_reject_constant_lines() {
        let m = [[0.25; PALETTE_SIZE]; PALETTE_SIZE];
        assert!(matches!(
            z_score_columns(&m),
            Err(Error::Degenerate {
                what: "column",
                index: 0,
                ..
            })
        ));
        assert!(matches!(
            z_score_rows(&m),
            Err(Error::Degenerate {
                what: "row",
                index: 0,
                ..
            })
        ));
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(normal_cdf(0.0, CdfMode::Precision).unwrap(), 0.5);
        assert_eq!(normal_cdf(0.0, CdfMode::PaperParity).unwrap(), 0.5);
        assert!(close(
            normal_cdf(-1.23391, CdfMode::PaperParity).unwrap(),
            0.1093,
            1e-4
        ));
        // rounds to -1.61
        assert!(close(
            normal_cdf(-1.61357, CdfMode::PaperParity).unwrap(),
            0.0537,
            1e-4
        ));
    }

    #[test]
    fn parity_mode_rounds_half_away_from_zero() {
        let p = normal_cdf(-1.52753, CdfMode::PaperParity).unwrap();
        assert_eq!(p, normal::phi(-1.53));
        assert_eq!(
            normal_cdf(1.118, CdfMode::PaperParity).unwrap(),
            normal::phi(1.12)
        );
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(matches!(
            normal_cdf(f64::NAN, CdfMode::Precision),
            Err(Error::NonFinite { .. })
        ));
        assert!(normal_cdf(f64::INFINITY, CdfMode::PaperParity).is_err());
    }

    #[test]
    fn row_stats_examples() {
        let r = &tables().row_stats;
        assert!(close(r[Black.index()].sum, 0.501509, 1e-6));
        assert!(close(r[Black.index()].variance, 0.00104, 1e-5));
        assert!(close(r[White.index()].mean, 0.193656, 1e-6));
    }

    #[test]
    fn row_probability_examples() {
        let p = &parity().prob_row;
        assert!(close(p[Black.index()][Black.index()], 0.0262, 1e-3));
        assert!(close(p[Black.index()][Blue.index()], 0.1515, 1e-3));
        assert!(close(p[Blue.index()][Black.index()], 0.1314, 1e-3));
    }

    #[test]
    fn pair_probability_examples() {
        let t = tables();
        let src = ProbabilitySource::ColStochastic;
        assert!(close(t.pair_probability(Black, White, src), 0.1, 1e-15));
        assert!(close(t.pair_probability(Black, Blue, src), 0.029412, 1e-6));
        for c in PaletteColor::ALL {
            assert_eq!(t.pair_probability(c, c, src), 0.0);
        }
    }

    #[test]
    fn probabilities_strictly_inside_unit_interval() {
        for t in [tables(), parity()] {
            for m in [&t.prob_col, &t.prob_row] {
                assert!(m.iter().flatten().all(|&p| p > 0.0 && p < 1.0));
            }
        }
    }

    #[test]
    fn row_z_scores_standardized() {
        let z = &tables().z_row;
        for row in z {
            let (_, mean, var) = moments(row.iter().copied());
            assert!(mean.abs() <= 1e-12);
            assert!((var - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn parse_modes_and_sources() {
        assert_eq!(
            "paper_parity".parse::<CdfMode>().unwrap(),
            CdfMode::PaperParity
        );
        assert_eq!(
            "prob-row".parse::<ProbabilitySource>().unwrap(),
            ProbabilitySource::ProbRow
        );
        assert!("nope".parse::<ProbabilitySource>().is_err());
    }
}
