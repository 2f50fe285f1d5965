//! Symmetric tridiagonal spectral engine.
//!
//! Eigenvalues are located by bisection on the Sturm count and polished with
//! one Newton step on the characteristic recurrence. Eigenvectors come from
//! the three-term recurrence, which for a Jacobi matrix reproduces the
//! orthogonal polynomials `(P_0(x), ..., P_{N-1}(x))`.

use crate::error::{Error, Result};
use crate::model::C64;

/// Residual threshold (relative to `max(1, scale)`) for accepting `x` as an
/// eigenvalue in [`eigvec_by_recurrence`].
pub const EIGVEC_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Precondition("matrix must be at least 1x1".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch {
                what: "offdiag length vs diag length - 1",
                left: offdiag.len(),
                right: diag.len() - 1,
            });
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidCoefficients("diagonal must be finite".into()));
        }
        if offdiag.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidCoefficients(
                "off-diagonal entries must be finite and strictly positive".into(),
            ));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Largest entry magnitude.
    pub fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Leading `k x k` principal section.
    pub fn leading_section(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(Error::Precondition(format!(
                "section size {k} outside 1..={}",
                self.dim()
            )));
        }
        Ok(Self {
            diag: self.diag[..k].to_vec(),
            offdiag: self.offdiag[..k - 1].to_vec(),
        })
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `(T - x I) v`.
    pub fn apply_shifted(&self, x: f64, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = (self.diag[i] - x) * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Number of eigenvalues strictly less than `x`.
///
/// Zero pivots are replaced by `+eps * scale`, which places an exact
/// eigenvalue at `x` on the "not less" side.
pub fn sturm_count(m: &TridiagMatrix, x: f64) -> usize {
    let guard = f64::EPSILON * m.scale().max(f64::MIN_POSITIVE);
    let mut count = 0;
    let mut pivot = 0.0;
    for i in 0..m.dim() {
        pivot = if i == 0 {
            m.diag[0] - x
        } else {
            let b = m.offdiag[i - 1];
            (m.diag[i] - x) - b * b / pivot
        };
        if pivot == 0.0 {
            pivot = guard;
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order, each bracketed to width `tol`.
pub fn eigenvalues(m: &TridiagMatrix, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Precondition("bisection tolerance must be positive".into()));
    }
    let n = m.dim();
    let (glo, ghi) = m.gershgorin_bounds();
    let pad = f64::EPSILON * m.scale().max(1.0) * n as f64;
    let (glo, ghi) = (glo - pad - tol, ghi + pad + tol);

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // The k-th eigenvalue lies where the count steps from k to k + 1.
        let mut lo = out.last().copied().unwrap_or(glo).max(glo);
        let mut hi = ghi;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(m, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        out.push(newton_polish(m, mid, lo, hi));
    }
    Ok(out)
}

fn newton_polish(m: &TridiagMatrix, x: f64, lo: f64, hi: f64) -> f64 {
    let (p, dp) = characteristic_with_derivative(m, x);
    if dp == 0.0 || !p.is_finite() || !dp.is_finite() {
        return x;
    }
    let next = x - p / dp;
    if next >= lo && next <= hi {
        next
    } else {
        x
    }
}

/// `det(T - x I)` and its derivative, both divided by a common positive
/// factor to avoid overflow (the Newton ratio is unaffected).
fn characteristic_with_derivative(m: &TridiagMatrix, x: f64) -> (f64, f64) {
    let (mut p_prev, mut dp_prev) = (1.0_f64, 0.0_f64);
    let (mut p, mut dp) = (m.diag[0] - x, -1.0_f64);
    for i in 1..m.dim() {
        let b2 = m.offdiag[i - 1] * m.offdiag[i - 1];
        let d = m.diag[i] - x;
        let p_next = d * p - b2 * p_prev;
        let dp_next = -p + d * dp - b2 * dp_prev;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
        let big = p.abs().max(dp.abs());
        if big > 1e100 {
            p /= big;
            dp /= big;
            p_prev /= big;
            dp_prev /= big;
        }
    }
    (p, dp)
}

/// Unnormalized eigenvector `(P_0(x), ..., P_{N-1}(x))` from the recurrence.
pub fn eigvec_by_recurrence(m: &TridiagMatrix, x: f64) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut v = Vec::with_capacity(n);
    v.push(1.0);
    for i in 0..n - 1 {
        let prev = if i > 0 { m.offdiag[i - 1] * v[i - 1] } else { 0.0 };
        v.push(((x - m.diag[i]) * v[i] - prev) / m.offdiag[i]);
    }
    let last = n - 1;
    let prev = if n > 1 { m.offdiag[last - 1] * v[last - 1] } else { 0.0 };
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let residual = (prev + (m.diag[last] - x) * v[last]).abs() / norm;
    if !(residual <= EIGVEC_RESIDUAL_TOL * m.scale().max(1.0)) {
        return Err(Error::NotEigenvalue { x, residual });
    }
    Ok(v)
}

/// Solves `(T - shift I) y = rhs` by Gaussian elimination with partial
/// pivoting on the band (LAPACK `gtsv` layout).
pub fn solve_shifted(m: &TridiagMatrix, shift: C64, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = m.dim();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            what: "right-hand side vs matrix dimension",
            left: rhs.len(),
            right: n,
        });
    }
    let singular = || Error::SingularSolve {
        re: shift.re,
        im: shift.im,
    };
    let mut d: Vec<C64> = m.diag.iter().map(|&q| C64::new(q, 0.0) - shift).collect();
    let mut du: Vec<C64> = m.offdiag.iter().map(|&b| C64::new(b, 0.0)).collect();
    let mut dl = du.clone();
    let mut b = rhs.to_vec();

    for i in 0..n.saturating_sub(1) {
        if d[i].norm() >= dl[i].norm() {
            if d[i].norm() == 0.0 {
                return Err(singular());
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
            dl[i] = C64::new(0.0, 0.0);
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if d[n - 1].norm() == 0.0 {
        return Err(singular());
    }

    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
    if b.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(singular());
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(d: &[f64], e: &[f64]) -> TridiagMatrix {
        TridiagMatrix::new(d.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn sturm_count_examples() {
        let m = mat(&[0.0, 0.0], &[1.0]);
        assert_eq!(sturm_count(&m, 2.0), 2);
        assert_eq!(sturm_count(&m, 0.0), 1);
        assert_eq!(sturm_count(&m, -2.0), 0);
        let m3 = mat(&[0.0; 3], &[1.0, 1.0]);
        assert_eq!(sturm_count(&m3, 0.0), 1);
    }

    #[test]
    fn sturm_count_at_exact_eigenvalue_counts_strictly_less() {
        let m = mat(&[0.0], &[]);
        assert_eq!(sturm_count(&m, 0.0), 0);
        let m = mat(&[0.0, 0.0], &[1.0]);
        assert_eq!(sturm_count(&m, 1.0), 1);
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = eigenvalues(&mat(&[0.0, 0.0], &[1.0]), 1e-14).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-13 && (ev[1] - 1.0).abs() < 1e-13);

        let s2 = 2.0_f64.sqrt();
        let ev = eigenvalues(&mat(&[0.0; 3], &[1.0, 1.0]), 1e-14).unwrap();
        for (got, want) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }

        let ev = eigenvalues(&mat(&[0.0; 4], &[0.5; 3]), 1e-14).unwrap();
        let pi = std::f64::consts::PI;
        let want = [4.0, 3.0, 2.0, 1.0].map(|j: f64| (j * pi / 5.0).cos());
        for (got, want) in ev.iter().zip(want) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_rejects_nonpositive_tol() {
        assert!(eigenvalues(&mat(&[0.0], &[]), 0.0).is_err());
    }

    #[test]
    fn one_by_one() {
        assert_eq!(eigenvalues(&mat(&[3.5], &[]), 1e-12).unwrap(), vec![3.5]);
        assert_eq!(eigvec_by_recurrence(&mat(&[3.5], &[]), 3.5).unwrap(), vec![1.0]);
    }

    #[test]
    fn recurrence_eigenvectors() {
        let m = mat(&[0.0, 0.0], &[1.0]);
        assert_eq!(eigvec_by_recurrence(&m, 1.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(eigvec_by_recurrence(&m, -1.0).unwrap(), vec![1.0, -1.0]);
        let s2 = 2.0_f64.sqrt();
        let v = eigvec_by_recurrence(&mat(&[0.0; 3], &[1.0, 1.0]), s2).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - s2).abs() < 1e-15);
        assert!((v[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_rejects_non_eigenvalue() {
        let m = mat(&[0.0, 0.0], &[1.0]);
        assert!(matches!(
            eigvec_by_recurrence(&m, 0.5),
            Err(Error::NotEigenvalue { .. })
        ));
    }

    #[test]
    fn rejects_nonpositive_offdiag() {
        assert!(TridiagMatrix::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(TridiagMatrix::new(vec![0.0, 0.0], vec![-1.0]).is_err());
        assert!(TridiagMatrix::new(vec![0.0, 0.0], vec![]).is_err());
    }

    #[test]
    fn shifted_solve_matches_multiplication() {
        let m = mat(&[0.3, -1.0, 2.0, 0.5], &[1.0, 0.25, 2.0]);
        let shift = C64::new(0.7, 0.4);
        let rhs: Vec<C64> = (0..4).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let y = solve_shifted(&m, shift, &rhs).unwrap();
        for i in 0..4 {
            let mut s = (C64::new(m.diag[i], 0.0) - shift) * y[i];
            if i > 0 {
                s += m.offdiag[i - 1] * y[i - 1];
            }
            if i + 1 < 4 {
                s += m.offdiag[i] * y[i + 1];
            }
            assert!((s - rhs[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn shifted_solve_detects_exact_singularity() {
        let m = mat(&[0.0], &[]);
        assert!(matches!(
            solve_shifted(&m, C64::new(0.0, 0.0), &[C64::new(1.0, 0.0)]),
            Err(Error::SingularSolve { .. })
        ));
    }
}
