//! Weighted finite matrix families: the i.i.d. ensembles whose random
//! products the rest of the crate analyzes.
//!
//! An ensemble is a list of same-dimension matrices with strictly positive
//! selection probabilities summing to one. The expectation matrix
//! `M = sum_i p_i A_i` is the object the spectral bound is computed from;
//! [`check_applicability`] reports which sufficient hypotheses it meets.
//! The builtin families cover the standard worked examples from the
//! literature (shear pairs, the Pollicott and Jurga test cases, the
//! one-parameter family with dominant eigenvalue `t + 1.5`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_small, spectrum_is_distinct_real, Matrix, EIGEN_GAP_TOL};

/// Probabilities must sum to 1 within this absolute tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Entry tolerance when matching a loaded ensemble against a builtin shape.
const RECOGNIZE_TOL: f64 = 1e-12;

/// Finite weighted family of square matrices, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEnsemble {
    matrices: Vec<Matrix>,
    probs: Vec<f64>,
    label: String,
}

impl MatrixEnsemble {
    /// Validates dimensions and probabilities; probabilities must be
    /// strictly positive and sum to 1 within [`PROB_SUM_TOL`]. Inputs are
    /// never normalized silently; see [`MatrixEnsemble::normalized`].
    pub fn new(matrices: Vec<Matrix>, probs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidEnsemble(
                "ensemble needs at least one matrix".into(),
            ));
        }
        if matrices.len() != probs.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} matrices but {} probabilities",
                matrices.len(),
                probs.len()
            )));
        }
        let dim = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidEnsemble(
                "matrices must share one dimension".into(),
            ));
        }
        if probs
            .iter()
            .any(|p| !p.is_finite() || *p <= 0.0 || *p > 1.0)
        {
            return Err(Error::InvalidEnsemble(
                "probabilities must lie in (0, 1]".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            matrices,
            probs,
            label: label.into(),
        })
    }

    /// Rescales the probabilities to sum to exactly 1. Only for explicit
    /// opt-in; construction rejects unnormalized inputs.
    pub fn normalized(
        matrices: Vec<Matrix>,
        weights: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidEnsemble(
                "weights must be strictly positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        let probs = weights.iter().map(|w| w / total).collect();
        Self::new(matrices, probs, label)
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Loads the JSON schema
    /// `{"dim": d, "matrices": [[row-major reals], ...], "probs": [reals]}`.
    /// The file stem becomes the ensemble label.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let raw: EnsembleJson = serde_json::from_str(&text)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        raw.into_ensemble(label)
    }
}

/// Serde mirror of the on-disk ensemble schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub dim: usize,
    pub matrices: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl EnsembleJson {
    pub fn into_ensemble(self, label: impl Into<String>) -> Result<MatrixEnsemble> {
        let matrices = self
            .matrices
            .into_iter()
            .map(|entries| {
                if entries.len() != self.dim * self.dim {
                    return Err(Error::InvalidEnsemble(format!(
                        "matrix needs {} entries for dim {}, got {}",
                        self.dim * self.dim,
                        self.dim,
                        entries.len()
                    )));
                }
                Matrix::new(self.dim, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixEnsemble::new(matrices, self.probs, label)
    }

    pub fn from_ensemble(e: &MatrixEnsemble) -> Self {
        Self {
            dim: e.dim(),
            matrices: e.matrices().iter().map(|m| m.entries().to_vec()).collect(),
            probs: e.probs().to_vec(),
        }
    }
}

/// Which sufficient hypotheses the expectation matrix satisfies.
///
/// `theorem2_ok` (entrywise positive expectation) certifies `log mu` as an
/// almost-sure upper bound. `theorem1_ok` is the weaker growth-rate route:
/// positive expectation, or a full set of distinct real eigenvalues with a
/// strictly positive dominant one. `distinct_real` is `None` when the
/// spectrum is unavailable (`dim > 4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applicability {
    pub expectation_positive: bool,
    pub distinct_real: Option<bool>,
    pub theorem1_ok: bool,
    pub theorem2_ok: bool,
}

/// `sum_i p_i A_i`, the one-step expectation of the random factor.
pub fn expectation_matrix(e: &MatrixEnsemble) -> Matrix {
    let mut acc = Matrix::zeros(e.dim());
    for (m, &p) in e.matrices().iter().zip(e.probs()) {
        // finite inputs with probs in (0,1] cannot overflow the sum
        acc = acc
            .add(&m.scale(p).expect("scaling by a probability"))
            .expect("expectation sum");
    }
    acc
}

/// Evaluates the theorem hypotheses on the expectation matrix.
pub fn check_applicability(e: &MatrixEnsemble) -> Applicability {
    let m = expectation_matrix(e);
    let expectation_positive = m.is_positive();
    let (distinct_real, has_positive_dominant) = if m.dim() <= 4 {
        match eigenvalues_small(&m) {
            Ok(eigs) => {
                let distinct = spectrum_is_distinct_real(&eigs, EIGEN_GAP_TOL);
                let positive = eigs
                    .iter()
                    .any(|z| z.im.abs() <= EIGEN_GAP_TOL && z.re > 0.0);
                (Some(distinct), positive)
            }
            Err(_) => (None, false),
        }
    } else {
        (None, false)
    };
    let theorem1_ok =
        expectation_positive || (distinct_real == Some(true) && has_positive_dominant);
    Applicability {
        expectation_positive,
        distinct_real,
        theorem1_ok,
        theorem2_ok: expectation_positive,
    }
}

/// The worked-example families, with their defining parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinFamily {
    /// Shear pair `A(k) = [[1,k],[0,1]]` w.p. `p`, `B(m) = [[1,0],[m,1]]`
    /// w.p. `1-p`.
    AkBm { k: f64, m: f64, p: f64 },
    /// `[[2,1],[1,1]]` and `[[3,1],[2,1]]`, equal weights.
    Pollicott,
    /// `[[3,1],[1,3]]` and `[[5,2],[2,5]]`, equal weights.
    Jurga,
    /// `[[1+t,1],[t,1]]` and `[[1,t],[1,1+t]]`, equal weights; `t > 0`.
    /// Expectation matrix has dominant eigenvalue `t + 1.5`.
    Pollicott2 { t: f64 },
    /// `[[1,-1],[0,1]]` and `[[1,2],[2,1]]`, equal weights: a negative
    /// entry in one factor, but a positive expectation matrix.
    Example6,
}

impl BuiltinFamily {
    /// Looks up a family by CLI name and parameter map. `ak_bm` needs
    /// `k` and `m` (with optional `p`, default 1/2); `pollicott2_series`
    /// needs `t > 0`; the rest take no parameters.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let require = |key: &str| -> Result<f64> {
            params.get(key).copied().ok_or_else(|| Error::InvalidParam {
                name: key.into(),
                reason: format!("required by family '{name}'"),
            })
        };
        match name {
            "ak_bm" => {
                let k = require("k")?;
                let m = require("m")?;
                let p = params.get("p").copied().unwrap_or(0.5);
                Self::validate_ak_bm(k, m, p)?;
                Ok(Self::AkBm { k, m, p })
            }
            "pollicott" => Ok(Self::Pollicott),
            "jurga" => Ok(Self::Jurga),
            "pollicott2_series" => {
                let t = require("t")?;
                if !(t > 0.0) {
                    return Err(Error::InvalidParam {
                        name: "t".into(),
                        reason: "must be > 0".into(),
                    });
                }
                Ok(Self::Pollicott2 { t })
            }
            "example6" => Ok(Self::Example6),
            other => Err(Error::UnknownFamily(other.into())),
        }
    }

    fn validate_ak_bm(k: f64, m: f64, p: f64) -> Result<()> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParam {
                name: "k".into(),
                reason: "must be finite and > 0".into(),
            });
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParam {
                name: "m".into(),
                reason: "must be finite and > 0".into(),
            });
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParam {
                name: "p".into(),
                reason: "must lie in (0, 1)".into(),
            });
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Self::AkBm { k, m, p } => format!("ak_bm(k={k},m={m},p={p})"),
            Self::Pollicott => "pollicott".into(),
            Self::Jurga => "jurga".into(),
            Self::Pollicott2 { t } => format!("pollicott2_series(t={t})"),
            Self::Example6 => "example6".into(),
        }
    }

    pub fn build(&self) -> MatrixEnsemble {
        let half = vec![0.5, 0.5];
        let (matrices, probs) = match *self {
            Self::AkBm { k, m, p } => (vec![shear_upper(k), shear_lower(m)], vec![p, 1.0 - p]),
            Self::Pollicott => (
                vec![
                    Matrix::new(2, vec![2.0, 1.0, 1.0, 1.0]).unwrap(),
                    Matrix::new(2, vec![3.0, 1.0, 2.0, 1.0]).unwrap(),
                ],
                half,
            ),
            Self::Jurga => (
                vec![
                    Matrix::new(2, vec![3.0, 1.0, 1.0, 3.0]).unwrap(),
                    Matrix::new(2, vec![5.0, 2.0, 2.0, 5.0]).unwrap(),
                ],
                half,
            ),
            Self::Pollicott2 { t } => (
                vec![
                    Matrix::new(2, vec![1.0 + t, 1.0, t, 1.0]).unwrap(),
                    Matrix::new(2, vec![1.0, t, 1.0, 1.0 + t]).unwrap(),
                ],
                half,
            ),
            Self::Example6 => (
                vec![
                    Matrix::new(2, vec![1.0, -1.0, 0.0, 1.0]).unwrap(),
                    Matrix::new(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap(),
                ],
                half,
            ),
        };
        MatrixEnsemble::new(matrices, probs, self.label())
            .expect("builtin families are valid by construction")
    }
}

/// `A(k) = [[1,k],[0,1]]`.
pub fn shear_upper(k: f64) -> Matrix {
    Matrix::new(2, vec![1.0, k, 0.0, 1.0]).unwrap()
}

/// `B(m) = [[1,0],[m,1]]`.
pub fn shear_lower(m: f64) -> Matrix {
    Matrix::new(2, vec![1.0, 0.0, m, 1.0]).unwrap()
}

/// Convenience wrapper: `builtin_family("ak_bm", {k: 1, m: 1})`.
pub fn builtin_family(name: &str, params: &BTreeMap<String, f64>) -> Result<MatrixEnsemble> {
    Ok(BuiltinFamily::from_name(name, params)?.build())
}

fn matches_matrix(m: &Matrix, entries: &[f64]) -> bool {
    m.entries()
        .iter()
        .zip(entries)
        .all(|(a, b)| (a - b).abs() <= RECOGNIZE_TOL)
}

fn matches_shear_pair(a: &Matrix, b: &Matrix) -> Option<(f64, f64)> {
    // A(k) shape: [[1,k],[0,1]] with k > 0; B(m) shape: [[1,0],[m,1]]
    let is_upper = (a.get(0, 0) - 1.0).abs() <= RECOGNIZE_TOL
        && (a.get(1, 1) - 1.0).abs() <= RECOGNIZE_TOL
        && a.get(1, 0).abs() <= RECOGNIZE_TOL
        && a.get(0, 1) > 0.0;
    let is_lower = (b.get(0, 0) - 1.0).abs() <= RECOGNIZE_TOL
        && (b.get(1, 1) - 1.0).abs() <= RECOGNIZE_TOL
        && b.get(0, 1).abs() <= RECOGNIZE_TOL
        && b.get(1, 0) > 0.0;
    (is_upper && is_lower).then(|| (a.get(0, 1), b.get(1, 0)))
}

/// Matches an arbitrary ensemble against the builtin shapes, so ensembles
/// loaded from files still get family-specific comparisons. Matching is
/// exact up to 1e-12 and considers both matrix orders.
pub fn recognize(e: &MatrixEnsemble) -> Option<BuiltinFamily> {
    if e.dim() != 2 || e.len() != 2 {
        return None;
    }
    let (a, b) = (&e.matrices()[0], &e.matrices()[1]);
    let (pa, pb) = (e.probs()[0], e.probs()[1]);
    let equal_probs = (pa - 0.5).abs() <= RECOGNIZE_TOL && (pb - 0.5).abs() <= RECOGNIZE_TOL;

    let fixed: [(&[f64], &[f64], BuiltinFamily); 3] = [
        (
            &[2.0, 1.0, 1.0, 1.0],
            &[3.0, 1.0, 2.0, 1.0],
            BuiltinFamily::Pollicott,
        ),
        (
            &[3.0, 1.0, 1.0, 3.0],
            &[5.0, 2.0, 2.0, 5.0],
            BuiltinFamily::Jurga,
        ),
        (
            &[1.0, -1.0, 0.0, 1.0],
            &[1.0, 2.0, 2.0, 1.0],
            BuiltinFamily::Example6,
        ),
    ];
    if equal_probs {
        for (first, second, family) in fixed {
            if (matches_matrix(a, first) && matches_matrix(b, second))
                || (matches_matrix(a, second) && matches_matrix(b, first))
            {
                return Some(family);
            }
        }
        // pollicott2_series: [[1+t,1],[t,1]] and [[1,t],[1,1+t]]
        for (x, y) in [(a, b), (b, a)] {
            let t = x.get(1, 0);
            if t > 0.0
                && matches_matrix(x, &[1.0 + t, 1.0, t, 1.0])
                && matches_matrix(y, &[1.0, t, 1.0, 1.0 + t])
            {
                return Some(BuiltinFamily::Pollicott2 { t });
            }
        }
    }
    for ((x, y), (px, _)) in [((a, b), (pa, pb)), ((b, a), (pb, pa))] {
        if let Some((k, m)) = matches_shear_pair(x, y) {
            return Some(BuiltinFamily::AkBm { k, m, p: px });
        }
    }
    None
}
