//! Dense small-matrix arithmetic, norms, and eigenvalue solvers.
//!
//! Matrices are square, row-major `f64`. Spectra come from two independent
//! routes so results can cross-check each other: exact characteristic
//! polynomial roots (quadratic/cubic/quartic formulas, `dim <= 4`) and
//! max-norm power iteration for strictly positive matrices of any
//! dimension, where a simple dominant eigenvalue is guaranteed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute residual tolerance for the eigenvalue solvers.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap for power iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Imaginary-part and pairwise-gap tolerance for the distinct-real test.
pub const EIGEN_GAP_TOL: f64 = 1e-9;

/// Dense square matrix with row-major storage: `entries[i * dim + j]`.
///
/// Immutable after construction; all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dim must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("rows must form a square matrix".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.entries[i * d + j];
            }
        }
        Self {
            dim: d,
            entries: out,
        }
    }

    /// Standard matrix product. Overflow to non-finite entries is an error
    /// so callers know to rescale.
    pub fn multiply(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Matrix {
            dim: d,
            entries: out,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries: Vec<f64> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Matrix {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> Result<Matrix> {
        let entries: Vec<f64> = self.entries.iter().map(|v| v * factor).collect();
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Matrix {
            dim: self.dim,
            entries,
        })
    }

    /// `self^n` by repeated multiplication (`n = 0` gives the identity).
    pub fn power(&self, n: usize) -> Result<Matrix> {
        let mut out = Matrix::identity(self.dim);
        for _ in 0..n {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// Largest absolute entry; 0 only for the zero matrix.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `dim * max_abs_entry`: the max norm scaled to be submultiplicative.
    pub fn scaled_max_norm(&self) -> f64 {
        self.dim as f64 * self.max_abs_entry()
    }

    /// Sum of all entries (entrywise L1 for nonnegative matrices).
    pub fn entry_sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|v| *v > 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|v| *v >= 0.0)
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.entries[i * d + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

/// Which route produced a [`SpectralResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    PowerIteration,
    ClosedForm,
}

/// Dominant-eigenvalue result with enough context to audit it.
///
/// `distinct_real` is `None` when the full spectrum is unavailable
/// (`dim > 4`, where the closed forms do not apply).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub mu: f64,
    /// Eigenvector normalized to unit max-norm (extremal entry +1).
    pub eigenvector: Vec<f64>,
    /// Max-norm of `M v - mu v` for the reported pair.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: EigenMethod,
    /// Full spectrum as (re, im) pairs when `dim <= 4`.
    pub all_eigenvalues: Option<Vec<(f64, f64)>>,
    pub distinct_real: Option<bool>,
}

/// All eigenvalues real (|Im| <= tol) and pairwise separated by more than tol.
pub fn spectrum_is_distinct_real(eigenvalues: &[Complex64], tol: f64) -> bool {
    if eigenvalues.iter().any(|z| z.im.abs() > tol) {
        return false;
    }
    for (i, a) in eigenvalues.iter().enumerate() {
        for b in &eigenvalues[i + 1..] {
            if (a.re - b.re).abs() <= tol {
                return false;
            }
        }
    }
    true
}

fn spectrum_summary(m: &Matrix) -> (Option<Vec<(f64, f64)>>, Option<bool>) {
    if m.dim() <= 4 {
        match eigenvalues_small(m) {
            Ok(eigs) => {
                let distinct = spectrum_is_distinct_real(&eigs, EIGEN_GAP_TOL);
                (
                    Some(eigs.iter().map(|z| (z.re, z.im)).collect()),
                    Some(distinct),
                )
            }
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    }
}

/// Max-norm power iteration for the Perron-Frobenius eigenvalue of a
/// strictly positive matrix.
///
/// The iterate is renormalized by its extremal entry every step, so the
/// scale factor converges to mu and the vector stays entrywise positive.
/// A result with `converged == false` is returned (not an error) when the
/// residual is still above `tol` after `max_iter` steps; callers must
/// check the flag.
pub fn dominant_eigen_power(m: &Matrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if !m.is_positive() {
        return Err(Error::NotPositive {
            op: "power iteration",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam {
            name: "tol".into(),
            reason: "must be > 0".into(),
        });
    }
    let d = m.dim();
    let mut v = vec![1.0; d];
    let mut mu = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=max_iter {
        iterations = it;
        let w = m.apply(&v);
        // extremal entry, signed; positive here since v stays positive
        let mut ext = 0.0f64;
        for &x in &w {
            if x.abs() > ext.abs() {
                ext = x;
            }
        }
        mu = ext;
        residual = w
            .iter()
            .zip(&v)
            .fold(0.0f64, |acc, (wi, vi)| acc.max((wi - mu * vi).abs()));
        if residual <= tol {
            converged = true;
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / mu;
        }
    }

    let (all_eigenvalues, distinct_real) = spectrum_summary(m);
    Ok(SpectralResult {
        mu,
        eigenvector: v,
        residual,
        iterations,
        converged,
        method: EigenMethod::PowerIteration,
        all_eigenvalues,
        distinct_real,
    })
}

/// Full spectrum of a `dim <= 4` matrix from the characteristic polynomial.
///
/// Coefficients come from principal-minor sums; roots from the closed
/// quadratic/cubic/quartic formulas, then polished with a few Newton steps.
/// Returned sorted by descending real part (ties by imaginary part).
pub fn eigenvalues_small(m: &Matrix) -> Result<Vec<Complex64>> {
    let d = m.dim();
    if d > 4 {
        return Err(Error::UnsupportedDimension { dim: d });
    }
    // monic characteristic polynomial coefficients, highest degree first:
    // lambda^d - e1 lambda^(d-1) + e2 lambda^(d-2) - ...
    let mut coeffs = vec![1.0];
    for k in 1..=d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign * principal_minor_sum(m, k));
    }
    let mut roots = match d {
        1 => vec![Complex64::new(m.get(0, 0), 0.0)],
        2 => roots_quadratic(coeffs[1], coeffs[2]),
        3 => roots_cubic(coeffs[1], coeffs[2], coeffs[3]),
        4 => roots_quartic(coeffs[1], coeffs[2], coeffs[3], coeffs[4]),
        _ => unreachable!(),
    };
    polish_roots(&coeffs, &mut roots);
    roots.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    Ok(roots)
}

/// Dominant eigenvalue of a `dim <= 4` matrix via the closed-form spectrum:
/// the largest strictly positive real eigenvalue, with an eigenvector
/// extracted by Gaussian elimination on `M - mu I`.
///
/// This is the route for matrices with distinct real eigenvalues that are
/// not entrywise positive; it errors when no positive real eigenvalue
/// exists.
pub fn dominant_eigen_closed(m: &Matrix) -> Result<SpectralResult> {
    let eigs = eigenvalues_small(m)?;
    let distinct = spectrum_is_distinct_real(&eigs, EIGEN_GAP_TOL);
    let mu = eigs
        .iter()
        .filter(|z| z.im.abs() <= EIGEN_GAP_TOL && z.re > 0.0)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !mu.is_finite() {
        return Err(Error::HypothesisNotMet(
            "the expectation matrix has no strictly positive real eigenvalue".into(),
        ));
    }
    let eigenvector = null_vector_of_shift(m, mu);
    let residual = {
        let w = m.apply(&eigenvector);
        w.iter()
            .zip(&eigenvector)
            .fold(0.0f64, |acc, (wi, vi)| acc.max((wi - mu * vi).abs()))
    };
    Ok(SpectralResult {
        mu,
        eigenvector,
        residual,
        iterations: 0,
        converged: residual <= DEFAULT_TOL.max(1e-12 * m.max_abs_entry().max(1.0)),
        method: EigenMethod::ClosedForm,
        all_eigenvalues: Some(eigs.iter().map(|z| (z.re, z.im)).collect()),
        distinct_real: Some(distinct),
    })
}

/// Sum of all k x k principal minors of `m`.
fn principal_minor_sum(m: &Matrix, k: usize) -> f64 {
    let d = m.dim();
    let mut total = 0.0;
    let mut subset = Vec::with_capacity(k);
    fn rec(m: &Matrix, k: usize, start: usize, subset: &mut Vec<usize>, total: &mut f64) {
        if subset.len() == k {
            *total += principal_minor(m, subset);
            return;
        }
        for i in start..m.dim() {
            subset.push(i);
            rec(m, k, i + 1, subset, total);
            subset.pop();
        }
    }
    rec(m, k, 0, &mut subset, &mut total);
    let _ = d;
    total
}

fn principal_minor(m: &Matrix, idx: &[usize]) -> f64 {
    let k = idx.len();
    let sub: Vec<f64> = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| m.get(i, j)))
        .collect();
    det_small(k, &sub)
}

fn det_small(n: usize, a: &[f64]) -> f64 {
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            // Laplace expansion along the first row; n <= 4 so this is cheap.
            let mut det = 0.0;
            for col in 0..n {
                let minor: Vec<f64> = (1..n)
                    .flat_map(|i| (0..n).filter(|&j| j != col).map(move |j| a[i * n + j]))
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * a[col] * det_small(n - 1, &minor);
            }
            det
        }
    }
}

/// Roots of x^2 + b x + c over the complex numbers.
fn roots_quadratic(b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation: compute the large-magnitude root first
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            // b == 0 and disc == 0 (or c == 0 with b == 0)
            let r = (-b + s) / 2.0;
            vec![Complex64::new(r, 0.0), Complex64::new(-b - r, 0.0)]
        } else {
            vec![Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
        }
    } else {
        let re = -b / 2.0;
        let im = (-disc).sqrt() / 2.0;
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Roots of x^3 + a x^2 + b x + c.
fn roots_cubic(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    // depressed cubic y^3 + p y + q with x = y - a/3
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;

    let ys: Vec<Complex64> = if disc > 0.0 {
        // one real root, complex pair
        let s = disc.sqrt();
        let t1 = -q / 2.0 + s;
        let t2 = -q / 2.0 - s;
        let big = if t1.abs() >= t2.abs() { t1 } else { t2 };
        let u = big.cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let real = u + v;
        let half = -real / 2.0;
        let imag = 3.0f64.sqrt() / 2.0 * (u - v);
        vec![
            Complex64::new(real, 0.0),
            Complex64::new(half, imag),
            Complex64::new(half, -imag),
        ]
    } else if p == 0.0 {
        // disc <= 0 with p = 0 forces q = 0: triple root
        vec![Complex64::new(0.0, 0.0); 3]
    } else {
        // three real roots (trigonometric form, p < 0 here)
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        (0..3)
            .map(|k| {
                let angle = (theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0;
                Complex64::new(2.0 * r * angle.cos(), 0.0)
            })
            .collect()
    };
    ys.into_iter().map(|y| y - shift).collect()
}

/// Roots of x^4 + a x^3 + b x^2 + c x + d (Ferrari's method).
fn roots_quartic(a: f64, b: f64, c: f64, d: f64) -> Vec<Complex64> {
    // depressed quartic y^4 + p y^2 + q y + r with x = y - a/4
    let shift = a / 4.0;
    let p = b - 3.0 * a * a / 8.0;
    let q = c - a * b / 2.0 + a * a * a / 8.0;
    let r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;

    let scale = 1.0f64.max(p.abs()).max(r.abs());
    let ys: Vec<Complex64> = if q.abs() <= 1e-14 * scale {
        // biquadratic: z^2 + p z + r with y = +-sqrt(z)
        roots_quadratic(p, r)
            .into_iter()
            .flat_map(|z| {
                let s = z.sqrt();
                [s, -s]
            })
            .collect()
    } else {
        // resolvent cubic 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0;
        // it has a real root m > 0 because the value at m = 0 is -q^2 < 0.
        let res = roots_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
        let m = res
            .iter()
            .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) && z.re > 0.0)
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let m = if m.is_finite() {
            m
        } else {
            // roundoff pushed the root to ~0; take the largest real part
            res.iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max)
                .max(1e-300)
        };
        let s = (2.0 * m).sqrt();
        let t = q / (2.0 * s);
        let mut out = roots_quadratic(-s, p / 2.0 + m + t);
        out.extend(roots_quadratic(s, p / 2.0 + m - t));
        out
    };
    ys.into_iter().map(|y| y - shift).collect()
}

/// A few Newton steps on the monic characteristic polynomial to tighten
/// each closed-form root toward machine precision.
fn polish_roots(coeffs: &[f64], roots: &mut [Complex64]) {
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    for root in roots.iter_mut() {
        let mut z = *root;
        let (mut best_val, _) = eval(z);
        let mut best = z;
        for _ in 0..4 {
            let (pv, dv) = eval(z);
            if dv.norm() < 1e-300 {
                break;
            }
            z -= pv / dv;
            let (nv, _) = eval(z);
            if nv.norm() < best_val.norm() {
                best_val = nv;
                best = z;
            } else {
                break;
            }
        }
        // snap near-real roots onto the real axis
        if best.im.abs() <= 1e-13 * (1.0 + best.re.abs()) {
            best.im = 0.0;
        }
        *root = best;
    }
}

/// Null vector of `M - mu I` by Gauss-Jordan elimination, for eigenvector
/// extraction at a known eigenvalue. The column with the weakest pivot is
/// treated as free. Returned with unit max-norm (extremal entry +1).
fn null_vector_of_shift(m: &Matrix, mu: f64) -> Vec<f64> {
    let n = m.dim();
    let base: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m.get(i, j) - if i == j { mu } else { 0.0 })
                .collect()
        })
        .collect();

    // pass 1: pivot magnitude per column under partial pivoting
    let free = {
        let mut w = base.clone();
        let mut row = 0;
        let mut sizes = vec![0.0f64; n];
        for col in 0..n {
            let Some((best, val)) = (row..n)
                .map(|r| (r, w[r][col].abs()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            else {
                break;
            };
            sizes[col] = val;
            if val == 0.0 {
                continue;
            }
            w.swap(row, best);
            let piv = w[row][col];
            for r in 0..n {
                if r != row {
                    let f = w[r][col] / piv;
                    if f != 0.0 {
                        for j in 0..n {
                            w[r][j] -= f * w[row][j];
                        }
                    }
                }
            }
            row += 1;
        }
        sizes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    };

    // pass 2: eliminate on the remaining columns, solve with v[free] = 1
    let mut w = base;
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        if col == free || row >= n {
            continue;
        }
        let (best, val) = (row..n)
            .map(|r| (r, w[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if val == 0.0 {
            continue;
        }
        w.swap(row, best);
        let piv = w[row][col];
        for j in 0..n {
            w[row][j] /= piv;
        }
        for r in 0..n {
            if r != row {
                let f = w[r][col];
                if f != 0.0 {
                    for j in 0..n {
                        w[r][j] -= f * w[row][j];
                    }
                }
            }
        }
        pivot_row_of_col[col] = Some(row);
        row += 1;
    }
    let mut v = vec![0.0; n];
    v[free] = 1.0;
    for col in 0..n {
        if let Some(pr) = pivot_row_of_col[col] {
            v[col] = -w[pr][free];
        }
    }
    // normalize so the extremal entry is exactly +1
    let mut ext = 0.0f64;
    for &x in &v {
        if x.abs() > ext.abs() {
            ext = x;
        }
    }
    if ext != 0.0 {
        for x in v.iter_mut() {
            *x /= ext;
        }
    }
    v
}
