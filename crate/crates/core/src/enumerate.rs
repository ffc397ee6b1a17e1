//! Exact brute-force oracle over all k^n words of a finite ensemble:
//! entrywise expectations, expected max-abs entry, growth-rate fits, and
//! the maximum-possible-entry probe G(n).
//!
//! Everything here enumerates the full word tree by depth-first search
//! with prefix sharing (O(k^n) multiplies, O(n) memory), so results are
//! exact up to floating point and serve as the reference the spectral
//! and Monte Carlo modules are checked against. Weighted sums over up to
//! 2^20 words use compensated summation to keep the low digits honest.

use serde::{Deserialize, Serialize};

use crate::ensemble::MatrixEnsemble;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Maximum number of leaf words an enumeration may visit by default.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 20;

/// Expected max-abs entry per word length, with two independent rate
/// extractors: consecutive ratios and a least-squares fit on the log
/// series over its upper half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    /// `E(1..=n_max)`: expected max-abs entry of a random product.
    pub values: Vec<f64>,
    /// `E(n)/E(n-1)` for `n = 2..=n_max`; one shorter than `values`.
    pub ratios: Vec<f64>,
    /// Exponentiated least-squares slope of `ln E(n)` over the tail.
    pub fitted_rate: f64,
}

/// Maximum possible entry over all words of one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntryProbe {
    /// `G(n)`: max over words of the product's max-abs entry.
    pub g: f64,
    /// Matrix indices of one word attaining `G(n)`.
    pub witness: Vec<usize>,
    /// `G(n)^(1/n)`: a lower estimate of the joint spectral radius, not
    /// a certified JSR computation.
    pub jsr_lower_estimate: f64,
}

/// Neumaier variant of compensated summation.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_budget(e: &MatrixEnsemble, n: usize, budget: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("word length n must be >= 1".into()));
    }
    let needed = (e.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            length: n,
            budget,
        });
    }
    Ok(())
}

/// Depth-first walk of the word tree to depth `n_max`, visiting every
/// node (word prefix) once with its weight and product matrix.
fn dfs_words(
    e: &MatrixEnsemble,
    n_max: usize,
    visit: &mut impl FnMut(usize, f64, &Matrix, &[usize]),
) -> Result<()> {
    fn rec(
        e: &MatrixEnsemble,
        n_max: usize,
        depth: usize,
        weight: f64,
        product: &Matrix,
        word: &mut Vec<usize>,
        visit: &mut impl FnMut(usize, f64, &Matrix, &[usize]),
    ) -> Result<()> {
        if depth == n_max {
            return Ok(());
        }
        for (idx, (m, &p)) in e.matrices().iter().zip(e.probs()).enumerate() {
            let next = product.multiply(m)?;
            word.push(idx);
            visit(depth + 1, weight * p, &next, word);
            rec(e, n_max, depth + 1, weight * p, &next, word, visit)?;
            word.pop();
        }
        Ok(())
    }
    let mut word = Vec::with_capacity(n_max);
    rec(
        e,
        n_max,
        0,
        1.0,
        &Matrix::identity(e.dim()),
        &mut word,
        visit,
    )
}

/// Entrywise expectation of the length-`n` random product, by direct
/// enumeration. Independence makes this equal `expectation_matrix(e)^n`;
/// the two routes cross-check each other.
pub fn exact_entry_expectation(e: &MatrixEnsemble, n: usize, budget: u64) -> Result<Matrix> {
    check_budget(e, n, budget)?;
    let d = e.dim();
    let mut acc = vec![CompensatedSum::default(); d * d];
    dfs_words(e, n, &mut |depth, weight, product, _| {
        if depth == n {
            for (slot, &v) in acc.iter_mut().zip(product.entries()) {
                slot.add(weight * v);
            }
        }
    })?;
    Matrix::new(d, acc.iter().map(CompensatedSum::value).collect())
}

/// `E[max-abs entry]` of the length-`n` random product. Note this is the
/// expectation of the max, which dominates the max entry of the
/// expectation matrix power.
pub fn expected_max_entry(e: &MatrixEnsemble, n: usize, budget: u64) -> Result<f64> {
    check_budget(e, n, budget)?;
    let mut acc = CompensatedSum::default();
    dfs_words(e, n, &mut |depth, weight, product, _| {
        if depth == n {
            acc.add(weight * product.max_abs_entry());
        }
    })?;
    Ok(acc.value())
}

/// `E(1..=n_max)` from one shared walk of the word tree, plus the two
/// growth-rate extractors.
pub fn growth_series(e: &MatrixEnsemble, n_max: usize, budget: u64) -> Result<GrowthSeries> {
    check_budget(e, n_max, budget)?;
    let mut acc = vec![CompensatedSum::default(); n_max];
    dfs_words(e, n_max, &mut |depth, weight, product, _| {
        acc[depth - 1].add(weight * product.max_abs_entry());
    })?;
    let values: Vec<f64> = acc.iter().map(CompensatedSum::value).collect();
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(GrowthSeries {
        fitted_rate: fit_tail_rate(&values),
        values,
        ratios,
    })
}

/// Exponentiated least-squares slope of `ln E(n)` over the upper half of
/// the series (at least two points when available).
fn fit_tail_rate(values: &[f64]) -> f64 {
    let n_max = values.len();
    if n_max == 1 {
        return values[0];
    }
    let start = (n_max / 2 + 1).min(n_max - 1);
    let points: Vec<(f64, f64)> = (start..=n_max)
        .map(|n| (n as f64, values[n - 1].ln()))
        .collect();
    let len = points.len() as f64;
    let x_mean = points.iter().map(|(x, _)| x).sum::<f64>() / len;
    let y_mean = points.iter().map(|(_, y)| y).sum::<f64>() / len;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - x_mean).powi(2)).sum();
    (sxy / sxx).exp()
}

/// `G(n)` with one witness word: the largest possible entry (in absolute
/// value) over every product of `n` factors from the ensemble.
pub fn max_entry_probe(e: &MatrixEnsemble, n: usize, budget: u64) -> Result<MaxEntryProbe> {
    check_budget(e, n, budget)?;
    let mut g = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    dfs_words(e, n, &mut |depth, _, product, word| {
        if depth == n {
            let m = product.max_abs_entry();
            if m > g {
                g = m;
                witness = word.to_vec();
            }
        }
    })?;
    Ok(MaxEntryProbe {
        g,
        witness,
        jsr_lower_estimate: g.powf(1.0 / n as f64),
    })
}
