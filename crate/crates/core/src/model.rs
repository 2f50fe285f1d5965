//! The model contract shared by every concrete operator.
//!
//! A model fixes a reference orthonormal basis `{e_k}` of the underlying
//! Hilbert space and exposes the transformed basis functions
//! `tau_k(z) = <xi(z), e_k>`, so that an element `phi = sum_k c_k e_k` is
//! carried onto the function `phi_hat(z) = sum_k tau_k(z) c_k`. The kernel
//! vector `xi(z)` itself therefore has coefficients `conj(tau_k(z))`.
//!
//! Inner products are antilinear in the first argument throughout. The
//! reproducing kernel is `k(z, w) = <xi(z), xi(w)>`, analytic in `z` and
//! antianalytic in `w`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jacobi::BoundaryAngle;
use crate::pw::PhaseParameter;

pub type C64 = Complex64;

/// Identifies the reference basis a coefficient vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisTag {
    /// `delta_1, ..., delta_N` of a Jacobi truncation.
    Jacobi { dim: usize },
    /// Eigenbasis `e^{-i lambda_k t}/sqrt(a)`, `|k| <= cutoff`, of the phase-0
    /// extension of `i d/dt` on `(0, a)`.
    PaleyWiener { length: f64, cutoff: usize },
}

impl BasisTag {
    pub fn dimension(&self) -> usize {
        match *self {
            BasisTag::Jacobi { dim } => dim,
            BasisTag::PaleyWiener { cutoff, .. } => 2 * cutoff + 1,
        }
    }
}

/// Label of a self-adjoint extension (or its finite surrogate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtensionParameter {
    Boundary(BoundaryAngle),
    Phase(PhaseParameter),
}

/// Coefficients of an element of the model space in its reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    coeffs: Vec<C64>,
    basis: BasisTag,
}

impl StateVector {
    pub fn new(coeffs: Vec<C64>, basis: BasisTag) -> Result<Self> {
        if coeffs.len() != basis.dimension() {
            return Err(Error::LengthMismatch {
                what: "state coefficients vs basis dimension",
                left: coeffs.len(),
                right: basis.dimension(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidCoefficients(
                "state coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs, basis })
    }

    pub fn zeros(basis: BasisTag) -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0); basis.dimension()],
            basis,
        }
    }

    /// The `k`-th reference basis vector (0-based).
    pub fn basis_vector(basis: BasisTag, k: usize) -> Self {
        let mut s = Self::zeros(basis);
        s.coeffs[k] = C64::new(1.0, 0.0);
        s
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = sum_k conj(self_k) other_k`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_basis(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            basis: self.basis,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            basis: self.basis,
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            basis: self.basis,
        })
    }

    fn check_same_basis(&self, other: &StateVector) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: other.basis,
            });
        }
        Ok(())
    }
}

/// Spectrum of one extension together with the kernel norms `k(x_n, x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSet {
    points: Vec<f64>,
    kernel_norms: Vec<f64>,
    weights: Vec<f64>,
    extension: ExtensionParameter,
}

impl SamplingSet {
    pub fn new(
        points: Vec<f64>,
        kernel_norms: Vec<f64>,
        extension: ExtensionParameter,
    ) -> Result<Self> {
        if points.len() != kernel_norms.len() {
            return Err(Error::LengthMismatch {
                what: "sampling points vs kernel norms",
                left: points.len(),
                right: kernel_norms.len(),
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("sampling points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "sampling points must be strictly increasing".into(),
            ));
        }
        if kernel_norms.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
            return Err(Error::Precondition(
                "kernel norms must be finite and positive".into(),
            ));
        }
        let weights = kernel_norms.iter().map(|k| 1.0 / k).collect();
        Ok(Self {
            points,
            kernel_norms,
            weights,
            extension,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kernel_norms(&self) -> &[f64] {
        &self.kernel_norms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn extension(&self) -> ExtensionParameter {
        self.extension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices in series summation order: ascending `|x_n|`, ties toward `-inf`.
    pub fn summation_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&i, &j| {
            let (a, b) = (self.points[i], self.points[j]);
            a.abs().total_cmp(&b.abs()).then(a.total_cmp(&b))
        });
        idx
    }

    /// Index of the point that coincides with real `z`, if any.
    pub fn node_index(&self, z: C64) -> Option<usize> {
        if z.im != 0.0 {
            return None;
        }
        self.points
            .iter()
            .position(|&x| (z.re - x).abs() <= NODE_TOL * (1.0 + x.abs()))
    }

    /// Orthogonal spectral measure with jumps `1/k(x_n, x_n)`.
    pub fn spectral_measure(&self) -> DiscreteSpectralMeasure {
        DiscreteSpectralMeasure {
            atoms: self.points.clone(),
            jumps: self.weights.clone(),
        }
    }
}

/// Relative distance under which an evaluation point is treated as a node.
pub(crate) const NODE_TOL: f64 = 8.0 * f64::EPSILON;

/// Atoms and jumps of a discrete orthogonal spectral function.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectralMeasure {
    atoms: Vec<f64>,
    jumps: Vec<f64>,
}

impl DiscreteSpectralMeasure {
    pub fn new(atoms: Vec<f64>, jumps: Vec<f64>) -> Result<Self> {
        if atoms.len() != jumps.len() {
            return Err(Error::LengthMismatch {
                what: "measure atoms vs jumps",
                left: atoms.len(),
                right: jumps.len(),
            });
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "measure atoms must be strictly increasing".into(),
            ));
        }
        if jumps.iter().any(|j| !(*j > 0.0)) {
            return Err(Error::Precondition("measure jumps must be positive".into()));
        }
        Ok(Self { atoms, jumps })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }
}

/// Seed data for constructing `xi` through the defect family
/// `psi(z) = (A - z0)(A - z)^{-1} psi0`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVectorSpec {
    z0: C64,
    psi0: Vec<C64>,
}

impl KernelVectorSpec {
    pub fn new(z0: C64, psi0: Vec<C64>) -> Result<Self> {
        if z0.im == 0.0 {
            return Err(Error::Precondition("z0 must be non-real".into()));
        }
        let norm: f64 = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Precondition("psi0 must be nonzero".into()));
        }
        Ok(Self { z0, psi0 })
    }

    pub fn z0(&self) -> C64 {
        self.z0
    }

    pub fn psi0(&self) -> &[C64] {
        &self.psi0
    }
}

/// The contract every concrete model implements.
pub trait SamplingModel: Sync {
    fn basis(&self) -> BasisTag;

    /// `tau_k(z)` for every reference basis index, ascending.
    fn transformed_basis(&self, z: C64) -> Vec<C64>;

    /// `k(z, w) = <xi(z), xi(w)>` of the full model space.
    fn kernel(&self, z: C64, w: C64) -> C64;

    /// Spectrum and kernel norms of the extension labelled by `ext`.
    fn sampling_set(&self, ext: &ExtensionParameter) -> Result<SamplingSet>;

    /// Coefficients of the gauge `mu`, when an explicit entire gauge is known.
    fn gauge(&self) -> Option<StateVector>;

    /// Points where the transform is undefined (`S_mu`). Empty for the
    /// shipped models.
    fn is_gauge_singular(&self, _z: C64) -> bool {
        false
    }

    fn dimension(&self) -> usize {
        self.basis().dimension()
    }

    /// `xi(w)` expressed in the reference basis.
    fn kernel_state(&self, w: C64) -> StateVector {
        let coeffs = self.transformed_basis(w).into_iter().map(|t| t.conj()).collect();
        StateVector {
            coeffs,
            basis: self.basis(),
        }
    }
}

fn check_domain<M: SamplingModel + ?Sized>(model: &M, z: C64) -> Result<()> {
    if model.is_gauge_singular(z) {
        return Err(Error::GaugeSingular { re: z.re, im: z.im });
    }
    Ok(())
}

/// `phi_hat(z) = <xi(z), phi>`, summed in ascending basis order.
pub fn transform<M: SamplingModel + ?Sized>(model: &M, phi: &StateVector, z: C64) -> Result<C64> {
    if phi.basis() != model.basis() {
        return Err(Error::BasisMismatch {
            expected: model.basis(),
            found: phi.basis(),
        });
    }
    check_domain(model, z)?;
    Ok(model
        .transformed_basis(z)
        .iter()
        .zip(phi.coeffs())
        .fold(C64::new(0.0, 0.0), |acc, (t, c)| acc + t * c))
}

pub fn kernel<M: SamplingModel + ?Sized>(model: &M, z: C64, w: C64) -> Result<C64> {
    check_domain(model, z)?;
    check_domain(model, w)?;
    Ok(model.kernel(z, w))
}

/// `sum_n jump_n conj(phi_hat(x_n)) eta_hat(x_n)`.
pub fn parseval_inner<M: SamplingModel + ?Sized>(
    model: &M,
    phi: &StateVector,
    eta: &StateVector,
    measure: &DiscreteSpectralMeasure,
) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (&x, &jump) in measure.atoms().iter().zip(measure.jumps()) {
        let z = C64::new(x, 0.0);
        acc += jump * transform(model, phi, z)?.conj() * transform(model, eta, z)?;
    }
    Ok(acc)
}
