//! Jacobi model: orthogonal polynomials of the first kind, Christoffel-Darboux
//! kernels and the boundary-angle family of finite truncations.
//!
//! The truncation of order `N` with boundary angle `tau` is the `N x N`
//! Jacobi matrix whose last diagonal entry is shifted by `tan(tau)`. Its
//! spectrum is the zero set of
//!
//! ```text
//! beta_tau(x) = cos(tau) b_N P_N(x) - sin(tau) P_{N-1}(x)
//! ```
//!
//! and `tau = pi/2` is the decoupled case: the last row separates and one
//! eigenvalue leaves to infinity, leaving the `N - 1` zeros of `P_{N-1}`.
//! This family stands in for the self-adjoint extensions of the infinite
//! operator; the sampling formulas hold with equality on it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    BasisTag, ExtensionParameter, KernelVectorSpec, SamplingModel, SamplingSet, StateVector, C64,
};
use crate::tridiag::{self, TridiagMatrix};

/// Magnitude above which recurrences fold a common factor into `log_scale`.
const RESCALE_LIMIT: f64 = 1e150;

/// `|z - w|` below `CONFLUENT_TOL * (1 + |z|)` switches the Christoffel-Darboux
/// quotient to its derivative form.
pub const CONFLUENT_TOL: f64 = 1e-8;

/// Up to `NEAR_TOL * (1 + |z|)` the quotient loses digits to cancellation in
/// its numerator, so the kernel is summed directly instead.
pub const NEAR_TOL: f64 = 1e-2;

/// Placed angles this close to `pi/2` are snapped to the decoupled case. Just
/// off `pi/2` the extension has an eigenvalue near `b_N / cos(tau)`, whose
/// kernel norm overflows, and `x*` is a zero of `P_{N-1}` to rounding anyway.
pub const DECOUPLED_SNAP: f64 = 1e-10;

/// Named coefficient generators accepted in model files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientRule {
    /// `b_k = 1`, `q_k = 0`.
    Free,
    /// `b_k = 1/2`, `q_k = 0` (Chebyshev polynomials of the second kind).
    Chebyshev,
    /// `b_k = (k + 1)^p` with `k` the 0-based index, `q_k = 0`.
    Power(f64),
}

impl FromStr for CoefficientRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "free" => Ok(Self::Free),
            "chebyshev" => Ok(Self::Chebyshev),
            other => match other.strip_prefix("power:") {
                Some(p) => p
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|p| p.is_finite())
                    .map(Self::Power)
                    .ok_or_else(|| Error::InvalidCoefficients(format!("bad power rule {other:?}"))),
                None => Err(Error::InvalidCoefficients(format!("unknown rule {other:?}"))),
            },
        }
    }
}

/// Off-diagonal `b_1, b_2, ...` and diagonal `q_1, q_2, ...`, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    b: Vec<f64>,
    q: Vec<f64>,
}

impl JacobiCoefficients {
    pub fn new(b: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if b.len() != q.len() {
            return Err(Error::LengthMismatch {
                what: "b vs q",
                left: b.len(),
                right: q.len(),
            });
        }
        if b.is_empty() {
            return Err(Error::InvalidCoefficients("need at least one b_k".into()));
        }
        if let Some(k) = b.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidCoefficients(format!(
                "b_{} = {} is not a positive finite number",
                k + 1,
                b[k]
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients("q must be finite".into()));
        }
        Ok(Self { b, q })
    }

    pub fn from_rule(rule: CoefficientRule, len: usize) -> Result<Self> {
        let b = (0..len)
            .map(|k| match rule {
                CoefficientRule::Free => 1.0,
                CoefficientRule::Chebyshev => 0.5,
                CoefficientRule::Power(p) => ((k + 1) as f64).powf(p),
            })
            .collect();
        Self::new(b, vec![0.0; len])
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Number of `(b_k, q_k)` pairs available.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    fn require(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Precondition("truncation order N must be >= 1".into()));
        }
        if self.b.len() < n {
            return Err(Error::LengthMismatch {
                what: "available coefficients vs truncation order",
                left: self.b.len(),
                right: n,
            });
        }
        Ok(())
    }
}

/// Boundary angle `tau` in `[0, pi)` labelling a truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAngle {
    tau: f64,
}

impl BoundaryAngle {
    pub fn new(tau: f64) -> Result<Self> {
        if !(0.0..PI).contains(&tau) {
            return Err(Error::Precondition(format!("tau = {tau} outside [0, pi)")));
        }
        Ok(Self { tau })
    }

    /// Folds any finite angle into `[0, pi)`.
    pub fn folded(tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::Precondition("tau must be finite".into()));
        }
        let mut t = tau.rem_euclid(PI) + 0.0;
        if t >= PI {
            t = 0.0;
        }
        Self::new(t)
    }

    pub fn decoupled() -> Self {
        Self { tau: FRAC_PI_2 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_decoupled(&self) -> bool {
        self.tau == FRAC_PI_2
    }
}

/// `P_0(z), ..., P_N(z)`, stored divided by `exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPolyEval {
    pub values: Vec<C64>,
    pub log_scale: f64,
}

impl OrthoPolyEval {
    /// True value `P_k(z)`; may overflow when `log_scale` is large.
    pub fn value(&self, k: usize) -> C64 {
        self.values[k] * self.log_scale.exp()
    }

    pub fn unscaled(&self) -> Vec<C64> {
        let s = self.log_scale.exp();
        self.values.iter().map(|v| v * s).collect()
    }
}

/// Runs the three-term recurrence up to degree `upto`.
fn recurrence(c: &JacobiCoefficients, upto: usize, z: C64) -> OrthoPolyEval {
    let mut values = Vec::with_capacity(upto + 1);
    let mut log_scale = 0.0;
    values.push(C64::new(1.0, 0.0));
    for k in 0..upto {
        let prev = if k > 0 { values[k - 1] * c.b[k - 1] } else { C64::new(0.0, 0.0) };
        let next = ((z - c.q[k]) * values[k] - prev) / c.b[k];
        values.push(next);
        let big = next.norm().max(values[k].norm());
        if big > RESCALE_LIMIT {
            for v in values.iter_mut() {
                *v /= big;
            }
            log_scale += big.ln();
        }
    }
    OrthoPolyEval { values, log_scale }
}

/// Orthogonal polynomials of the first kind `P_0 .. P_N` at `z`.
pub fn eval_ortho_polys(c: &JacobiCoefficients, n: usize, z: C64) -> Result<OrthoPolyEval> {
    c.require(n)?;
    Ok(recurrence(c, n, z))
}

/// `P_{N-1}, P_N` with first and second derivatives, all sharing one scale.
struct TopPolys {
    p: [C64; 2],
    dp: [C64; 2],
    d2p: [C64; 2],
    log_scale: f64,
}

fn top_polys_with_derivatives(c: &JacobiCoefficients, n: usize, z: C64) -> TopPolys {
    let zero = C64::new(0.0, 0.0);
    // (value, first, second) at degrees k-1 and k.
    let mut prev = [zero; 3];
    let mut cur = [C64::new(1.0, 0.0), zero, zero];
    let mut log_scale = 0.0;
    for k in 0..n {
        let bp = if k > 0 { c.b[k - 1] } else { 0.0 };
        let shift = z - c.q[k];
        let next = [
            (shift * cur[0] - bp * prev[0]) / c.b[k],
            (shift * cur[1] + cur[0] - bp * prev[1]) / c.b[k],
            (shift * cur[2] + 2.0 * cur[1] - bp * prev[2]) / c.b[k],
        ];
        prev = cur;
        cur = next;
        let big = cur.iter().chain(&prev).fold(0.0_f64, |m, v| m.max(v.norm()));
        if big > RESCALE_LIMIT {
            for v in cur.iter_mut().chain(prev.iter_mut()) {
                *v /= big;
            }
            log_scale += big.ln();
        }
    }
    TopPolys {
        p: [prev[0], cur[0]],
        dp: [prev[1], cur[1]],
        d2p: [prev[2], cur[2]],
        log_scale,
    }
}

/// Christoffel-Darboux kernel `K_N(z, w) = sum_{k<N} P_k(z) P_k(w)`.
///
/// This is the bilinear form; the sesquilinear reproducing kernel of the
/// model is `K_N(z, conj(w))`.
pub fn cd_kernel(c: &JacobiCoefficients, n: usize, z: C64, w: C64) -> Result<C64> {
    c.require(n)?;
    let bn = c.b[n - 1];
    let delta = w - z;
    if delta.norm() < CONFLUENT_TOL * (1.0 + z.norm()) {
        let t = top_polys_with_derivatives(c, n, z);
        let [pm, pn] = t.p;
        let [dpm, dpn] = t.dp;
        let [d2pm, d2pn] = t.d2p;
        let main = pm * dpn - pn * dpm;
        let correction = 0.5 * delta * (pm * d2pn - pn * d2pm);
        return Ok(bn * (main + correction) * (2.0 * t.log_scale).exp());
    }
    let pz = recurrence(c, n, z);
    let pw = recurrence(c, n, w);
    if delta.norm() < NEAR_TOL * (1.0 + z.norm()) {
        let sum: C64 = pz.values[..n].iter().zip(&pw.values[..n]).map(|(a, b)| a * b).sum();
        return Ok(sum * (pz.log_scale + pw.log_scale).exp());
    }
    let num = pz.values[n] * pw.values[n - 1] - pz.values[n - 1] * pw.values[n];
    Ok(bn * num / (z - w) * (pz.log_scale + pw.log_scale).exp())
}

/// The order-`N` Jacobi model with its boundary-angle extension family.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiModel {
    coeffs: JacobiCoefficients,
    n: usize,
}

impl JacobiModel {
    pub fn new(coeffs: JacobiCoefficients, n: usize) -> Result<Self> {
        coeffs.require(n)?;
        Ok(Self { coeffs, n })
    }

    pub fn coeffs(&self) -> &JacobiCoefficients {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Plain `N x N` truncation `J_N`.
    pub fn truncation(&self) -> TridiagMatrix {
        TridiagMatrix::new(
            self.coeffs.q[..self.n].to_vec(),
            self.coeffs.b[..self.n - 1].to_vec(),
        )
        .expect("coefficients validated on construction")
    }

    /// Truncation with last diagonal entry shifted by `tan(tau)`.
    pub fn extension_matrix(&self, angle: BoundaryAngle) -> Result<TridiagMatrix> {
        if angle.is_decoupled() {
            return Err(Error::Precondition(
                "decoupled angle has no N x N extension matrix".into(),
            ));
        }
        let mut diag = self.coeffs.q[..self.n].to_vec();
        diag[self.n - 1] += angle.tau().tan();
        TridiagMatrix::new(diag, self.coeffs.b[..self.n - 1].to_vec())
    }

    /// Unit vector along `pi(z0)`, which spans the defect space at `z0`.
    pub fn defect_spec(&self, z0: C64) -> Result<KernelVectorSpec> {
        let vals = recurrence(&self.coeffs, self.n - 1, z0).values;
        let norm = vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        KernelVectorSpec::new(z0, vals.iter().map(|v| v / norm).collect())
    }
}

impl SamplingModel for JacobiModel {
    fn basis(&self) -> BasisTag {
        BasisTag::Jacobi { dim: self.n }
    }

    fn transformed_basis(&self, z: C64) -> Vec<C64> {
        recurrence(&self.coeffs, self.n - 1, z).unscaled()
    }

    fn kernel(&self, z: C64, w: C64) -> C64 {
        cd_kernel(&self.coeffs, self.n, z, w.conj()).expect("order validated on construction")
    }

    fn sampling_set(&self, ext: &ExtensionParameter) -> Result<SamplingSet> {
        match ext {
            ExtensionParameter::Boundary(angle) => sampling_set(&self.coeffs, self.n, *angle),
            other => Err(Error::Precondition(format!(
                "Jacobi model needs a boundary angle, got {other:?}"
            ))),
        }
    }

    fn gauge(&self) -> Option<StateVector> {
        Some(StateVector::basis_vector(self.basis(), 0))
    }
}

/// Spectrum of the order-`N` truncation with boundary angle `tau`.
pub fn sampling_set(c: &JacobiCoefficients, n: usize, angle: BoundaryAngle) -> Result<SamplingSet> {
    let model = JacobiModel::new(c.clone(), n)?;
    let points = if angle.is_decoupled() {
        if n == 1 {
            Vec::new()
        } else {
            let m = model.truncation().leading_section(n - 1)?;
            spectrum(&m)?
        }
    } else {
        spectrum(&model.extension_matrix(angle)?)?
    };
    let kernel_norms = points
        .iter()
        .map(|&x| {
            let x = C64::new(x, 0.0);
            cd_kernel(c, n, x, x).map(|k| k.re)
        })
        .collect::<Result<Vec<_>>>()?;
    SamplingSet::new(points, kernel_norms, ExtensionParameter::Boundary(angle))
}

fn spectrum(m: &TridiagMatrix) -> Result<Vec<f64>> {
    tridiag::eigenvalues(m, 4.0 * f64::EPSILON * m.scale().max(1.0))
}

/// Boundary angle whose spectrum contains `x_star`.
pub fn place_sampling_point(c: &JacobiCoefficients, n: usize, x_star: f64) -> Result<BoundaryAngle> {
    c.require(n)?;
    if !x_star.is_finite() {
        return Err(Error::Precondition("x* must be finite".into()));
    }
    let p = recurrence(c, n, C64::new(x_star, 0.0));
    let tau = (c.b[n - 1] * p.values[n].re).atan2(p.values[n - 1].re);
    let angle = BoundaryAngle::folded(tau)?;
    if (angle.tau() - FRAC_PI_2).abs() < DECOUPLED_SNAP {
        return Ok(BoundaryAngle::decoupled());
    }
    Ok(angle)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCircleReport {
    pub converged: bool,
    /// Truncation indices `K` at which `S_K` was recorded.
    pub checkpoints: Vec<usize>,
    /// `S_K = sum_{k<=K} |P_k(z)|^2`; may be `inf` for divergent cases.
    pub partial_sums: Vec<f64>,
    /// `(S_{K_max} - S_{K_max/2}) / S_{K_max}`.
    pub relative_increment: f64,
}

/// Numerical check of `sum_k |P_k(z)|^2 < inf` (the limit-circle case).
pub fn limit_circle_diagnostic(
    c: &JacobiCoefficients,
    z: C64,
    k_max: usize,
    tol: f64,
) -> Result<LimitCircleReport> {
    if k_max < 8 {
        return Err(Error::Precondition("K_max must be at least 8".into()));
    }
    c.require(k_max)?;
    let checkpoints = vec![k_max / 4, k_max / 2, k_max];

    // Sums are kept in units of exp(2 * log_scale).
    let mut log_scale = 0.0;
    let mut sum = 1.0;
    let mut snaps = Vec::with_capacity(3);
    let (mut prev, mut cur) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    for k in 0..k_max {
        let bp = if k > 0 { c.b[k - 1] } else { 0.0 };
        let next = ((z - c.q[k]) * cur - bp * prev) / c.b[k];
        prev = cur;
        cur = next;
        let big = cur.norm().max(prev.norm());
        if big > RESCALE_LIMIT {
            cur /= big;
            prev /= big;
            let s2 = big * big;
            sum /= s2;
            for s in snaps.iter_mut() {
                *s /= s2;
            }
            log_scale += big.ln();
        }
        sum += cur.norm_sqr();
        if checkpoints.contains(&(k + 1)) {
            snaps.push(sum);
        }
    }
    let relative_increment = (snaps[2] - snaps[1]) / snaps[2];
    let factor = (2.0 * log_scale).exp();
    Ok(LimitCircleReport {
        converged: relative_increment < tol,
        checkpoints,
        partial_sums: snaps.iter().map(|s| s * factor).collect(),
        relative_increment,
    })
}

/// `xi(z) = psi(conj z) / <delta_1, psi(conj z)>` with
/// `psi(z) = psi0 + (z - z0)(T_tau - z)^{-1} psi0`, the resolvent taken in the
/// truncation with boundary angle `angle`.
pub fn build_xi_from_psi(
    model: &JacobiModel,
    spec: &KernelVectorSpec,
    angle: BoundaryAngle,
    z: C64,
) -> Result<StateVector> {
    if spec.psi0().len() != model.order() {
        return Err(Error::LengthMismatch {
            what: "psi0 vs model order",
            left: spec.psi0().len(),
            right: model.order(),
        });
    }
    let t = model.extension_matrix(angle)?;
    let zb = z.conj();
    let y = tridiag::solve_shifted(&t, zb, spec.psi0())?;
    let psi: Vec<C64> = spec
        .psi0()
        .iter()
        .zip(&y)
        .map(|(p0, yk)| p0 + (zb - spec.z0()) * yk)
        .collect();
    let denom = psi[0];
    let size = psi.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if !(denom.norm() > f64::EPSILON * size) {
        return Err(Error::GaugeSingular { re: z.re, im: z.im });
    }
    StateVector::new(psi.iter().map(|v| v / denom).collect(), model.basis())
}
