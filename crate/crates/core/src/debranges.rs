//! de Branges structure of the model spaces.
//!
//! The structure function is built from the reproducing kernel and a non-real
//! anchor `w0`:
//!
//! ```text
//! e(z) = i sqrt(pi / (k(w0, w0) Im w0)) (conj(w0) - z) K(w0, z)
//! ```
//!
//! where `K(w0, z) = k(z, w0)` is the kernel function representing evaluation
//! at `w0`, entire in `z`. The functions `a`, `b` with `e = a + i b` are real on
//! the real line, and the extension family is described by
//! `s_t = -sin(t) a + cos(t) b`, `t in [0, pi)`.
//!
//! The formula presumes a space closed under `f*(z) = conj f(conj z)`; for the
//! Paley-Wiener model use the centred gauge.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jacobi::JacobiModel;
use crate::model::{transform, SamplingModel, StateVector, C64};

/// Width to which zeros of `s_t` are refined.
pub const ZERO_TOL: f64 = 1e-10;

pub struct StructureFunction<'a, M: SamplingModel + ?Sized> {
    model: &'a M,
    w0: C64,
    factor: C64,
}

impl<'a, M: SamplingModel + ?Sized> StructureFunction<'a, M> {
    pub fn new(model: &'a M, w0: C64) -> Result<Self> {
        if w0.im == 0.0 || !w0.re.is_finite() || !w0.im.is_finite() {
            return Err(Error::InvalidAnchor(format!("w0 = {w0} must be non-real")));
        }
        let kww = model.kernel(w0, w0).re;
        if !(kww > 0.0) {
            return Err(Error::InvalidAnchor(format!("k(w0, w0) = {kww} is not positive")));
        }
        let factor = C64::new(0.0, 1.0) * C64::new(PI / (kww * w0.im), 0.0).sqrt();
        Ok(Self { model, w0, factor })
    }

    /// Anchored at `w0 = i`.
    pub fn with_default_anchor(model: &'a M) -> Result<Self> {
        Self::new(model, C64::new(0.0, 1.0))
    }

    pub fn anchor(&self) -> C64 {
        self.w0
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.factor * (self.w0.conj() - z) * self.model.kernel(z, self.w0)
    }

    /// `e*(z) = conj(e(conj z))`.
    pub fn eval_star(&self, z: C64) -> C64 {
        self.eval(z.conj()).conj()
    }

    pub fn ab_split(&self, z: C64) -> AbPair {
        let e = self.eval(z);
        let es = self.eval_star(z);
        AbPair {
            a_val: (e + es) / 2.0,
            b_val: (e - es) / C64::new(0.0, 2.0),
        }
    }

    /// `s_t(z) = -sin(t) a(z) + cos(t) b(z)`.
    pub fn st_eval(&self, t: f64, z: C64) -> C64 {
        let ab = self.ab_split(z);
        -t.sin() * ab.a_val + t.cos() * ab.b_val
    }

    /// Real zeros of `s_t` in `[lo, hi]` located by sign changes on a scan
    /// grid of spacing at most `max_step`, then bisected to [`ZERO_TOL`].
    pub fn st_zeros(&self, t: f64, lo: f64, hi: f64, max_step: f64) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::Precondition(format!("empty interval [{lo}, {hi}]")));
        }
        if !(max_step > 0.0) {
            return Err(Error::Precondition("scan step must be positive".into()));
        }
        let s = |x: f64| self.st_eval(t, C64::new(x, 0.0)).re;
        let steps = ((hi - lo) / max_step).ceil().max(1.0) as usize;
        let xs: Vec<f64> = (0..=steps)
            .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| s(x)).collect();
        let mut zeros = Vec::new();
        for i in 0..steps {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let (mut fa, fb) = (vals[i], vals[i + 1]);
            if fa == 0.0 {
                zeros.push(a);
                continue;
            }
            if i + 1 == steps && fb == 0.0 {
                zeros.push(b);
                continue;
            }
            if fa.signum() == fb.signum() {
                continue;
            }
            while b - a > ZERO_TOL {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = s(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        Ok(zeros)
    }
}

/// Values of `a(z)` and `b(z)` with `e = a + i b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbPair {
    pub a_val: C64,
    pub b_val: C64,
}

impl AbPair {
    pub fn reassemble(&self) -> C64 {
        self.a_val + C64::new(0.0, 1.0) * self.b_val
    }
}

/// Counts of grid points where `|e(z)| > |e(conj z)|`, split by half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceScan {
    pub upper_dominant: usize,
    pub upper_total: usize,
    pub lower_dominant: usize,
    pub lower_total: usize,
}

/// Empirical scan of which half-plane `e` dominates its reflection in.
pub fn dominance_scan<M: SamplingModel + ?Sized>(
    sf: &StructureFunction<'_, M>,
    grid: &[C64],
) -> DominanceScan {
    let mut scan = DominanceScan {
        upper_dominant: 0,
        upper_total: 0,
        lower_dominant: 0,
        lower_total: 0,
    };
    for &z in grid {
        let wins = sf.eval(z).norm() > sf.eval(z.conj()).norm();
        if z.im > 0.0 {
            scan.upper_total += 1;
            scan.upper_dominant += wins as usize;
        } else if z.im < 0.0 {
            scan.lower_total += 1;
            scan.lower_dominant += wins as usize;
        }
    }
    scan
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeReport {
    pub in_space: bool,
    /// `||(J - conj w) h|| / ||(J - w) h||`.
    pub norm_ratio: f64,
}

/// Checks that `f = (z - w) h_hat` and `g = (z - conj w) h_hat` have equal norms.
///
/// `h` must have zero top coefficient so that both products stay inside the
/// order-`N` space; multiplication by `z` acts as the truncated Jacobi matrix.
pub fn axiom_blaschke_check(model: &JacobiModel, h: &StateVector, w: C64) -> Result<BlaschkeReport> {
    if w.im == 0.0 {
        return Err(Error::Precondition("w must be non-real".into()));
    }
    if h.basis() != model.basis() {
        return Err(Error::BasisMismatch {
            expected: model.basis(),
            found: h.basis(),
        });
    }
    let n = model.order();
    if h.coeffs()[n - 1] != C64::new(0.0, 0.0) {
        return Err(Error::DegreeOverflow);
    }
    let f = shifted_product(model, h, w);
    let g = shifted_product(model, h, w.conj());
    let nf = f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let ng = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(BlaschkeReport {
        in_space: true,
        norm_ratio: ng / nf,
    })
}

/// Coefficients of `(z - w) h_hat(z)`, i.e. `(J_N - w) h`.
fn shifted_product(model: &JacobiModel, h: &StateVector, w: C64) -> Vec<C64> {
    let n = model.order();
    let b = model.coeffs().b();
    let q = model.coeffs().q();
    let c = h.coeffs();
    (0..n)
        .map(|i| {
            let mut s = (q[i] - w) * c[i];
            if i > 0 {
                s += b[i - 1] * c[i - 1];
            }
            if i + 1 < n {
                s += b[i] * c[i + 1];
            }
            s
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarReport {
    /// `max |transform(phi*, z) - conj(transform(phi, conj z))|` over the grid.
    pub max_deviation: f64,
    /// `| ||phi*|| - ||phi|| |`.
    pub norm_difference: f64,
}

/// Verifies `f*(z) = conj f(conj z)` is the transform of the conjugate state.
pub fn axiom_star_check(model: &JacobiModel, phi: &StateVector, grid: &[C64]) -> Result<StarReport> {
    let star = phi.conj();
    let mut max_deviation = 0.0_f64;
    for &z in grid {
        let lhs = transform(model, &star, z)?;
        let rhs = transform(model, phi, z.conj())?.conj();
        max_deviation = max_deviation.max((lhs - rhs).norm());
    }
    Ok(StarReport {
        max_deviation,
        norm_difference: (star.norm() - phi.norm()).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationBoundReport {
    pub value: f64,
    /// `sqrt(k(w, w)) * ||phi||`.
    pub bound: f64,
    pub holds: bool,
}

impl EvaluationBoundReport {
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            0.0
        } else {
            self.value / self.bound
        }
    }
}

/// Cauchy-Schwarz bound `|phi_hat(w)| <= sqrt(k(w, w)) ||phi||`.
pub fn evaluation_bound_check<M: SamplingModel + ?Sized>(
    model: &M,
    phi: &StateVector,
    w: C64,
) -> Result<EvaluationBoundReport> {
    let value = transform(model, phi, w)?.norm();
    let bound = model.kernel(w, w).re.max(0.0).sqrt() * phi.norm();
    Ok(EvaluationBoundReport {
        value,
        bound,
        holds: value <= bound + 1e-10,
    })
}
