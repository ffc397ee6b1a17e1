//! The spectral upper bound `log mu` on the maximal Lyapunov exponent,
//! the Sturman comparison bound for shear pairs, and frozen literature
//! reference values.
//!
//! All bounds are in nats. Reference values are stored constants with a
//! provenance note; they are never recomputed here, so comparison tables
//! cannot silently present literature numbers as this crate's output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensemble::{
    check_applicability, expectation_matrix, recognize, Applicability, BuiltinFamily,
    MatrixEnsemble,
};
use crate::error::{Error, Result};
use crate::linalg::{
    dominant_eigen_closed, dominant_eigen_power, SpectralResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
    EIGEN_GAP_TOL,
};

/// Sturman's corollary constant, stored as the literal literature value.
pub const STURMAN_C: f64 = 1.0157;

/// Two bounds within this margin are reported as a tie.
const TIE_TOL: f64 = 1e-12;

/// A literature constant with its origin spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub value: f64,
    pub provenance: String,
}

/// Which side of a comparison gives the smaller (tighter) value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundWinner {
    Ours,
    Reference,
    Tie,
}

/// One named comparison value and whether it beats `log_mu_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub value: f64,
    pub tighter: BoundWinner,
}

/// The bound for one ensemble, with everything needed to audit it.
///
/// `extrapolated_beyond_theorem2` marks bounds computed from a
/// non-positive expectation matrix with distinct real eigenvalues: the
/// weaker hypothesis gives the growth rate of expectations, but the
/// almost-sure guarantee is only proven for positive expectation
/// matrices, so such bounds carry a warning instead of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ensemble_id: String,
    pub mu: f64,
    pub log_mu_bound: f64,
    pub sturman_bound: Option<f64>,
    pub reference_values: BTreeMap<String, ReferenceValue>,
    pub comparisons: Vec<Comparison>,
    pub applicability: Applicability,
    pub extrapolated_beyond_theorem2: bool,
}

/// Sturman's upper bound for the shear ensemble with parameters `k`, `m`
/// and equal probabilities:
/// `(1/4) [c + ln(sqrt(km) + 1/sqrt(km)) + (1/2) ln(1 + km)]`.
/// Depends on `k`, `m` only through the product `km`.
pub fn sturman_bound(k: f64, m: f64) -> Result<f64> {
    for (name, v) in [("k", k), ("m", m)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParam {
                name: name.into(),
                reason: "must be finite and > 0".into(),
            });
        }
    }
    let km = k * m;
    let s = km.sqrt();
    Ok(0.25 * (STURMAN_C + (s + 1.0 / s).ln() + 0.5 * (1.0 + km).ln()))
}

/// Frozen table of literature values used in comparisons, keyed by label.
pub fn reference_constants() -> BTreeMap<String, ReferenceValue> {
    let entry = |value: f64, provenance: &str| ReferenceValue {
        value,
        provenance: provenance.into(),
    };
    let mut table = BTreeMap::new();
    table.insert(
        "pollicott_actual".into(),
        entry(
            1.1433,
            "Pollicott's approximation of the actual exponent; stored literature constant, not computed here",
        ),
    );
    table.insert(
        "jurga_bound".into(),
        entry(
            1.66,
            "Jurga's upper bound; stored literature constant, not computed here",
        ),
    );
    for (t, value) in [
        ("2", 1.2509),
        ("1", 0.915),
        ("0.5", 0.6936),
        ("0.4", 0.6468),
        ("0.3", 0.5872),
        ("0.2", 0.529),
        ("0.1", 0.4),
    ] {
        table.insert(
            format!("pollicott2_t{t}"),
            entry(
                value,
                "Pollicott-series upper bound; stored literature constant, not computed here",
            ),
        );
    }
    table
}

/// Dominant eigenvalue of the expectation matrix by the route the
/// applicability flags allow. Positive expectation uses power iteration;
/// the distinct-real fallback uses the closed-form spectrum and must not
/// have its spectral radius on a negative eigenvalue.
fn dominant_mu(e: &MatrixEnsemble, app: &Applicability) -> Result<(SpectralResult, bool)> {
    let m = expectation_matrix(e);
    if app.theorem2_ok {
        let res = dominant_eigen_power(&m, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        if !res.converged {
            return Err(Error::NonConvergence {
                max_iter: res.iterations,
                residual: res.residual,
            });
        }
        return Ok((res, false));
    }
    if app.theorem1_ok {
        let res = dominant_eigen_closed(&m)?;
        if let Some(eigs) = &res.all_eigenvalues {
            let rho = eigs
                .iter()
                .map(|(re, im)| (re * re + im * im).sqrt())
                .fold(0.0f64, f64::max);
            if res.mu < rho - EIGEN_GAP_TOL {
                return Err(Error::HypothesisNotMet(format!(
                    "the spectral radius {rho:.6} of the expectation matrix is attained by a \
                     non-positive eigenvalue; the largest positive eigenvalue {:.6} does not \
                     control the growth rate",
                    res.mu
                )));
            }
        }
        return Ok((res, true));
    }
    let reason = match app.distinct_real {
        Some(false) => {
            "expectation matrix is not entrywise positive and its eigenvalues are not \
             distinct real numbers"
        }
        None => {
            "expectation matrix is not entrywise positive and its spectrum is unavailable \
             for the distinct-real fallback (dim > 4)"
        }
        Some(true) => "expectation matrix has no strictly positive real eigenvalue",
    };
    Err(Error::HypothesisNotMet(reason.into()))
}

fn matching_references(family: Option<&BuiltinFamily>) -> BTreeMap<String, ReferenceValue> {
    let table = reference_constants();
    let mut out = BTreeMap::new();
    let mut take = |key: String| {
        if let Some(v) = table.get(&key) {
            out.insert(key, v.clone());
        }
    };
    match family {
        Some(BuiltinFamily::Pollicott) => take("pollicott_actual".into()),
        Some(BuiltinFamily::Jurga) => take("jurga_bound".into()),
        Some(BuiltinFamily::Pollicott2 { t }) => take(format!("pollicott2_t{t}")),
        _ => {}
    }
    out
}

/// Computes `log mu` for the ensemble, refusing with the failed
/// hypothesis when neither sufficient condition holds.
///
/// Caveat: the inequality `lambda <= log mu` is established for
/// nonnegative factors. An ensemble with signed entries and positive
/// expectation matrix is still reported under the same rule, but
/// entry cancellation can push the true exponent above `log mu`;
/// cross-check such bounds by simulation before relying on them.
pub fn lyapunov_upper_bound(e: &MatrixEnsemble) -> Result<BoundReport> {
    let app = check_applicability(e);
    let (spectral, extrapolated) = dominant_mu(e, &app)?;
    let family = recognize(e);
    let sturman = match &family {
        Some(BuiltinFamily::AkBm { k, m, p }) if (p - 0.5).abs() <= 1e-12 => {
            Some(sturman_bound(*k, *m)?)
        }
        _ => None,
    };
    Ok(BoundReport {
        ensemble_id: e.label().to_string(),
        mu: spectral.mu,
        log_mu_bound: spectral.mu.ln(),
        sturman_bound: sturman,
        reference_values: matching_references(family.as_ref()),
        comparisons: Vec::new(),
        applicability: app,
        extrapolated_beyond_theorem2: extrapolated,
    })
}

fn winner(ours: f64, theirs: f64) -> BoundWinner {
    if (ours - theirs).abs() <= TIE_TOL {
        BoundWinner::Tie
    } else if ours < theirs {
        BoundWinner::Ours
    } else {
        BoundWinner::Reference
    }
}

/// [`lyapunov_upper_bound`] plus a winner annotation for every available
/// comparison value (smaller bound = tighter).
pub fn compare(e: &MatrixEnsemble) -> Result<BoundReport> {
    let mut report = lyapunov_upper_bound(e)?;
    let ours = report.log_mu_bound;
    let mut comparisons = Vec::new();
    if let Some(s) = report.sturman_bound {
        comparisons.push(Comparison {
            label: "sturman".into(),
            value: s,
            tighter: winner(ours, s),
        });
    }
    for (label, reference) in &report.reference_values {
        comparisons.push(Comparison {
            label: label.clone(),
            value: reference.value,
            tighter: winner(ours, reference.value),
        });
    }
    report.comparisons = comparisons;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::shear_upper;
    use crate::linalg::Matrix;
    use approx::assert_abs_diff_eq;

    fn family(f: BuiltinFamily) -> MatrixEnsemble {
        f.build()
    }

    #[test]
    fn bound_for_unit_shear_pair() {
        let report = lyapunov_upper_bound(&family(BuiltinFamily::AkBm {
            k: 1.0,
            m: 1.0,
            p: 0.5,
        }))
        .unwrap();
        assert_abs_diff_eq!(report.mu, 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(report.log_mu_bound, 1.5f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(report.log_mu_bound, 0.405, epsilon = 1e-3);
        assert!(report.sturman_bound.is_some());
        assert!(!report.extrapolated_beyond_theorem2);
        assert!(report.applicability.theorem2_ok);
    }

    #[test]
    fn bound_for_pollicott() {
        let report = lyapunov_upper_bound(&family(BuiltinFamily::Pollicott)).unwrap();
        let mu = (7.0 + 33.0f64.sqrt()) / 4.0;
        assert_abs_diff_eq!(report.mu, mu, epsilon = 1e-10);
        assert_abs_diff_eq!(report.log_mu_bound, 1.159, epsilon = 1e-3);
        assert!(report.sturman_bound.is_none());
        assert_eq!(report.reference_values.len(), 1);
        assert!(report.reference_values.contains_key("pollicott_actual"));
    }

    #[test]
    fn bound_for_example6() {
        let report = lyapunov_upper_bound(&family(BuiltinFamily::Example6)).unwrap();
        assert_abs_diff_eq!(report.mu, 1.0 + 0.5f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(report.log_mu_bound, 0.535, epsilon = 1e-3);
        // expectation matrix is positive, so no warning despite the
        // negative entry in one factor
        assert!(!report.extrapolated_beyond_theorem2);
    }

    #[test]
    fn bound_for_pollicott2_half() {
        let report = lyapunov_upper_bound(&family(BuiltinFamily::Pollicott2 { t: 0.5 })).unwrap();
        assert_abs_diff_eq!(report.mu, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.log_mu_bound, 0.6931, epsilon = 1e-3);
    }

    #[test]
    fn sturman_golden_values() {
        assert_abs_diff_eq!(sturman_bound(1.0, 1.0).unwrap(), 0.514, epsilon = 1e-3);
        assert_abs_diff_eq!(sturman_bound(2.0, 2.0).unwrap(), 0.684, epsilon = 1e-3);
    }

    #[test]
    fn sturman_depends_only_on_product() {
        let a = sturman_bound(4.0, 0.25).unwrap();
        let b = sturman_bound(1.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            sturman_bound(3.0, 5.0).unwrap(),
            sturman_bound(5.0, 3.0).unwrap()
        );
    }

    #[test]
    fn sturman_rejects_non_positive_args() {
        assert!(sturman_bound(0.0, 1.0).is_err());
        assert!(sturman_bound(1.0, -2.0).is_err());
        assert!(sturman_bound(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sturman_asymptote_for_large_km() {
        let k: f64 = 1e6;
        let asymptote = STURMAN_C / 4.0 + 0.5 * k.ln();
        assert_abs_diff_eq!(sturman_bound(k, k).unwrap(), asymptote, epsilon = 1e-3);
    }

    #[test]
    fn reference_table_lookups() {
        let table = reference_constants();
        assert_eq!(table["jurga_bound"].value, 1.66);
        assert_eq!(table["pollicott2_t0.4"].value, 0.6468);
        assert_eq!(table["pollicott_actual"].value, 1.1433);
        assert!(!table.contains_key("unknown_label"));
        assert!(table
            .values()
            .all(|r| r.provenance.contains("not computed here")));
    }

    #[test]
    fn compare_unit_shear_ours_tighter() {
        let report = compare(&family(BuiltinFamily::AkBm {
            k: 1.0,
            m: 1.0,
            p: 0.5,
        }))
        .unwrap();
        let sturman = report
            .comparisons
            .iter()
            .find(|c| c.label == "sturman")
            .unwrap();
        assert_abs_diff_eq!(sturman.value, 0.514, epsilon = 1e-3);
        assert_eq!(sturman.tighter, BoundWinner::Ours);
    }

    #[test]
    fn compare_double_shear_sturman_tighter() {
        let report = compare(&family(BuiltinFamily::AkBm {
            k: 2.0,
            m: 2.0,
            p: 0.5,
        }))
        .unwrap();
        assert_abs_diff_eq!(report.log_mu_bound, 2.0f64.ln(), epsilon = 1e-10);
        let sturman = report
            .comparisons
            .iter()
            .find(|c| c.label == "sturman")
            .unwrap();
        assert_eq!(sturman.tighter, BoundWinner::Reference);
    }

    #[test]
    fn compare_pollicott2_series_winners() {
        // reference series values win except at t = 0.4 and t = 0.5
        let expectations = [
            (2.0, BoundWinner::Reference),
            (1.0, BoundWinner::Reference),
            (0.5, BoundWinner::Ours),
            (0.4, BoundWinner::Ours),
            (0.3, BoundWinner::Reference),
            (0.2, BoundWinner::Reference),
            (0.1, BoundWinner::Reference),
        ];
        for (t, expected) in expectations {
            let report = compare(&family(BuiltinFamily::Pollicott2 { t })).unwrap();
            assert_eq!(report.comparisons.len(), 1, "t = {t}");
            assert_eq!(report.comparisons[0].tighter, expected, "t = {t}");
        }
    }

    #[test]
    fn compare_jurga_reference_tighter() {
        // ln 5.5 ~ 1.7047 loses to the 1.66 literature bound
        let report = compare(&family(BuiltinFamily::Jurga)).unwrap();
        assert_abs_diff_eq!(report.log_mu_bound, 5.5f64.ln(), epsilon = 1e-10);
        assert_eq!(report.comparisons[0].label, "jurga_bound");
        assert_eq!(report.comparisons[0].tighter, BoundWinner::Reference);
    }

    #[test]
    fn crossover_between_unit_and_double_shear() {
        let diff_at = |k: f64| {
            let ours = (1.0 + k / 2.0).ln();
            ours - sturman_bound(k, k).unwrap()
        };
        assert!(diff_at(1.0) < 0.0);
        assert!(diff_at(2.0) > 0.0);
    }

    #[test]
    fn refusal_names_failed_hypothesis() {
        let a = shear_upper(1.0);
        let neg = a.scale(-1.0).unwrap();
        let e = MatrixEnsemble::new(vec![a, neg], vec![0.5, 0.5], "cancel").unwrap();
        match lyapunov_upper_bound(&e) {
            Err(Error::HypothesisNotMet(msg)) => {
                assert!(msg.contains("not entrywise positive"));
            }
            other => panic!("expected hypothesis refusal, got {other:?}"),
        }
    }

    #[test]
    fn distinct_real_route_sets_warning_flag() {
        let a = Matrix::new(2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let e = MatrixEnsemble::new(vec![a], vec![1.0], "diag").unwrap();
        let report = lyapunov_upper_bound(&e).unwrap();
        assert!(report.extrapolated_beyond_theorem2);
        assert_abs_diff_eq!(report.log_mu_bound, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn refusal_when_spectral_radius_is_negative() {
        // eigenvalues {1, -3}: a positive eigenvalue exists but the
        // spectral radius sits on the negative one
        let a = Matrix::new(2, vec![1.0, 0.0, 0.0, -3.0]).unwrap();
        let e = MatrixEnsemble::new(vec![a], vec![1.0], "neg-dominant").unwrap();
        assert!(matches!(
            lyapunov_upper_bound(&e),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn report_serializes_to_json() {
        let report = compare(&family(BuiltinFamily::Pollicott)).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
