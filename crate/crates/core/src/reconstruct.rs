//! Kernel-form and Lagrange-form sampling series.
//!
//! Both series are summed over the sampling set in ascending `|x_n|` order
//! (ties toward `-inf`), so a truncated sum always keeps the nodes nearest the
//! origin. Evaluating at a node returns the stored sample.

use crate::error::{Error, Result};
use crate::model::{transform, ExtensionParameter, SamplingModel, SamplingSet, StateVector, C64};

/// Relative central-difference step for `G'(x_n)`.
pub const DIFF_STEP: f64 = 1e-6;

/// `|G'(x_n)|` below this fraction of the local difference-quotient scale
/// `(|G(x_n + h)| + |G(x_n - h)|) / 2h` is treated as a degenerate node.
pub const DEGENERATE_NODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    set: SamplingSet,
    values: Vec<C64>,
}

impl SampledSignal {
    pub fn new(set: SamplingSet, values: Vec<C64>) -> Result<Self> {
        if set.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "sampling points vs sample values",
                left: set.len(),
                right: values.len(),
            });
        }
        Ok(Self { set, values })
    }

    /// Samples `phi_hat` on every point of `set`.
    pub fn from_state<M: SamplingModel + ?Sized>(
        model: &M,
        phi: &StateVector,
        set: SamplingSet,
    ) -> Result<Self> {
        let values = set
            .points()
            .iter()
            .map(|&x| transform(model, phi, C64::new(x, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(set, values)
    }

    pub fn set(&self) -> &SamplingSet {
        &self.set
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

fn check_terms(set: &SamplingSet, terms: usize) -> Result<()> {
    if terms > set.len() {
        return Err(Error::Precondition(format!(
            "{terms} terms requested but only {} samples available",
            set.len()
        )));
    }
    Ok(())
}

/// `sum_n k(z, x_n) / k(x_n, x_n) * f(x_n)` over the first `terms` nodes.
pub fn kernel_series<M: SamplingModel + ?Sized>(
    model: &M,
    signal: &SampledSignal,
    z: C64,
    terms: usize,
) -> Result<C64> {
    let set = signal.set();
    check_terms(set, terms)?;
    if let Some(i) = set.node_index(z) {
        return Ok(signal.values[i]);
    }
    let mut acc = C64::new(0.0, 0.0);
    for &i in set.summation_order().iter().take(terms) {
        let x = C64::new(set.points()[i], 0.0);
        acc += model.kernel(z, x) * set.weights()[i] * signal.values[i];
    }
    Ok(acc)
}

/// `G(z) = (z - x_k) k(z, x_k) / k(x_k, x_k)`, normalized so `G'(x_k) = 1`.
#[derive(Debug, Clone, Copy)]
pub struct LagrangeGenerator<'a, M: SamplingModel + ?Sized> {
    model: &'a M,
    set: &'a SamplingSet,
    anchor_index: usize,
}

impl<'a, M: SamplingModel + ?Sized> LagrangeGenerator<'a, M> {
    pub fn new(model: &'a M, set: &'a SamplingSet, anchor_index: usize) -> Result<Self> {
        if anchor_index >= set.len() {
            return Err(Error::Precondition(format!(
                "anchor index {anchor_index} outside a set of {} points",
                set.len()
            )));
        }
        Ok(Self {
            model,
            set,
            anchor_index,
        })
    }

    /// Anchored at the first node in summation order.
    pub fn nearest_origin(model: &'a M, set: &'a SamplingSet) -> Result<Self> {
        let first = set
            .summation_order()
            .first()
            .copied()
            .ok_or_else(|| Error::Precondition("empty sampling set".into()))?;
        Self::new(model, set, first)
    }

    pub fn anchor(&self) -> f64 {
        self.set.points()[self.anchor_index]
    }

    pub fn anchor_index(&self) -> usize {
        self.anchor_index
    }

    pub fn eval(&self, z: C64) -> C64 {
        let xk = self.anchor();
        let norm = self.set.kernel_norms()[self.anchor_index];
        (z - xk) * self.model.kernel(z, C64::new(xk, 0.0)) / norm
    }

    /// Five-point central difference on the step `h = DIFF_STEP * (1 + |x|)`.
    ///
    /// The two-point quotient carries an `h^2 G'''/6` error that reaches 1e-9
    /// relative once two nodes sit within 1e-2 of each other.
    pub fn derivative(&self, x: f64) -> C64 {
        self.derivative_with_scale(x).0
    }

    /// The difference quotient and `(|G(x+h)| + |G(x-h)|) / 2h`, which it
    /// matches up to rounding when `x` is a simple zero.
    fn derivative_with_scale(&self, x: f64) -> (C64, f64) {
        let h = DIFF_STEP * (1.0 + x.abs());
        let g = |t: f64| self.eval(C64::new(x + t, 0.0));
        let (up, down) = (g(h), g(-h));
        let d = (8.0 * (up - down) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h);
        (d, (up.norm() + down.norm()) / (2.0 * h))
    }
}

/// `sum_n G(z) / ((z - x_n) G'(x_n)) * f(x_n)` over the first `terms` nodes.
pub fn lagrange_series<M: SamplingModel + ?Sized>(
    gen: &LagrangeGenerator<'_, M>,
    signal: &SampledSignal,
    z: C64,
    terms: usize,
) -> Result<C64> {
    let set = signal.set();
    if set != gen.set {
        return Err(Error::Precondition(
            "signal and generator use different sampling sets".into(),
        ));
    }
    check_terms(set, terms)?;
    if let Some(i) = set.node_index(z) {
        return Ok(signal.values[i]);
    }
    let order = set.summation_order();
    let used = &order[..terms];
    let gz = gen.eval(z);
    let mut acc = C64::new(0.0, 0.0);
    for &i in used {
        let x = set.points()[i];
        let (d, scale) = gen.derivative_with_scale(x);
        if !(d.norm() > DEGENERATE_NODE_TOL * scale) {
            return Err(Error::DegenerateNode {
                x,
                derivative: d.norm(),
            });
        }
        acc += gz / ((z - x) * d) * signal.values[i];
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub z: C64,
    pub terms: usize,
    pub exact: C64,
    pub kernel: C64,
    pub lagrange: C64,
    pub err_kernel: f64,
    pub err_lagrange: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub rows: Vec<ReportRow>,
}

impl ReconstructionReport {
    pub fn max_err_kernel(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.err_kernel))
    }

    pub fn max_err_lagrange(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.err_lagrange))
    }

    /// Largest kernel-series error among rows with the given term count.
    pub fn max_err_at(&self, terms: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.terms == terms)
            .fold(0.0, |m, r| m.max(r.err_kernel))
    }
}

/// Reconstructs `phi_hat` from the samples on `ext`'s spectrum and tabulates
/// the absolute errors of both series on `grid` for each term count.
pub fn reconstruction_report<M: SamplingModel + ?Sized>(
    model: &M,
    phi: &StateVector,
    ext: &ExtensionParameter,
    grid: &[C64],
    schedule: &[usize],
) -> Result<ReconstructionReport> {
    let set = model.sampling_set(ext)?;
    reconstruction_report_on(model, phi, set, grid, schedule)
}

/// As [`reconstruction_report`] with an explicit sampling set.
pub fn reconstruction_report_on<M: SamplingModel + ?Sized>(
    model: &M,
    phi: &StateVector,
    set: SamplingSet,
    grid: &[C64],
    schedule: &[usize],
) -> Result<ReconstructionReport> {
    if schedule.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("term schedule must be nondecreasing".into()));
    }
    let signal = SampledSignal::from_state(model, phi, set)?;
    let gen = LagrangeGenerator::nearest_origin(model, signal.set())?;
    let mut rows = Vec::with_capacity(grid.len() * schedule.len());
    for &z in grid {
        let exact = transform(model, phi, z)?;
        for &terms in schedule {
            let kernel = kernel_series(model, &signal, z, terms)?;
            let lagrange = lagrange_series(&gen, &signal, z, terms)?;
            rows.push(ReportRow {
                z,
                terms,
                exact,
                kernel,
                lagrange,
                err_kernel: (kernel - exact).norm(),
                err_lagrange: (lagrange - exact).norm(),
            });
        }
    }
    Ok(ReconstructionReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{BoundaryAngle, CoefficientRule, JacobiCoefficients, JacobiModel};
    use crate::pw::{PhaseParameter, PwConfig, PwModel};
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn free2() -> (JacobiModel, SamplingSet) {
        let m = JacobiModel::new(JacobiCoefficients::from_rule(CoefficientRule::Free, 2).unwrap(), 2)
            .unwrap();
        let set = m
            .sampling_set(&ExtensionParameter::Boundary(BoundaryAngle::new(0.0).unwrap()))
            .unwrap();
        (m, set)
    }

    #[test]
    fn kernel_series_free_examples() {
        let (m, set) = free2();
        for (phi, f) in [
            ([1.0, 0.0], Box::new(|_z: C64| c(1.0, 0.0)) as Box<dyn Fn(C64) -> C64>),
            ([0.0, 1.0], Box::new(|z: C64| z)),
        ] {
            let phi = StateVector::new(vec![c(phi[0], 0.0), c(phi[1], 0.0)], m.basis()).unwrap();
            let sig = SampledSignal::from_state(&m, &phi, set.clone()).unwrap();
            for z in [c(0.3, 0.0), c(-2.0, 1.5), c(4.0, -0.2)] {
                let got = kernel_series(&m, &sig, z, 2).unwrap();
                assert!((got - f(z)).norm() < 1e-14, "{z}: {got}");
            }
        }
    }

    #[test]
    fn zero_terms_and_too_many_terms() {
        let (m, set) = free2();
        let phi = StateVector::basis_vector(m.basis(), 0);
        let sig = SampledSignal::from_state(&m, &phi, set).unwrap();
        assert_eq!(kernel_series(&m, &sig, c(0.4, 0.1), 0).unwrap(), c(0.0, 0.0));
        assert!(kernel_series(&m, &sig, c(0.4, 0.1), 3).is_err());
    }

    #[test]
    fn generator_free_two() {
        let (m, set) = free2();
        // anchor x_k = 1 is index 1
        let g = LagrangeGenerator::new(&m, &set, 1).unwrap();
        for z in [c(0.2, 0.0), c(-1.3, 0.7), c(3.0, 2.0)] {
            let want = (z * z - 1.0) / 2.0;
            assert!((g.eval(z) - want).norm() < 1e-14);
        }
        assert!(g.eval(c(-1.0, 0.0)).norm() < 1e-15);
        assert!((g.derivative(1.0) - c(1.0, 0.0)).norm() < 1e-9);
        assert!(LagrangeGenerator::new(&m, &set, 2).is_err());
    }

    #[test]
    fn lagrange_free_two() {
        let (m, set) = free2();
        let phi = StateVector::basis_vector(m.basis(), 1);
        let sig = SampledSignal::from_state(&m, &phi, set.clone()).unwrap();
        let g = LagrangeGenerator::nearest_origin(&m, &set).unwrap();
        let z = c(0.3, 0.0);
        let lag = lagrange_series(&g, &sig, z, 2).unwrap();
        let ker = kernel_series(&m, &sig, z, 2).unwrap();
        assert!((lag - c(0.3, 0.0)).norm() < 1e-9);
        assert!((lag - ker).norm() < 1e-9);
        // node pass-through
        assert_eq!(lagrange_series(&g, &sig, c(1.0, 0.0), 2).unwrap(), sig.values()[1]);
        assert_eq!(kernel_series(&m, &sig, c(-1.0, 0.0), 2).unwrap(), sig.values()[0]);
    }

    #[test]
    fn pw_generator_is_scaled_exponential() {
        let cfg = PwConfig::new(TAU, 2).unwrap();
        let m = PwModel::new(cfg, 3);
        let set = m
            .sampling_set(&ExtensionParameter::Phase(PhaseParameter::new(0.0).unwrap()))
            .unwrap();
        let g = LagrangeGenerator::nearest_origin(&m, &set).unwrap();
        assert_eq!(g.anchor(), 0.0);
        for z in [c(0.25, 0.0), c(-0.6, 0.3)] {
            let want = ((C64::new(0.0, TAU) * z).exp() - 1.0) / C64::new(0.0, TAU);
            assert!((g.eval(z) - want).norm() < 1e-14);
        }
        for n in -3..=3 {
            assert!(g.eval(c(n as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn pw_one_mode_lagrange_matches_transform() {
        let cfg = PwConfig::new(TAU, 1).unwrap();
        let m = PwModel::new(cfg, 1);
        let phi = m.state_from_modes(&[(1, c(1.0, 0.0))]).unwrap();
        let set = m
            .sampling_set(&ExtensionParameter::Phase(PhaseParameter::new(0.0).unwrap()))
            .unwrap();
        let sig = SampledSignal::from_state(&m, &phi, set.clone()).unwrap();
        let g = LagrangeGenerator::nearest_origin(&m, &set).unwrap();
        let z = c(0.25, 0.0);
        let want = transform(&m, &phi, z).unwrap();
        assert!((lagrange_series(&g, &sig, z, 3).unwrap() - want).norm() < 1e-9);
        assert!((kernel_series(&m, &sig, z, 3).unwrap() - want).norm() < 1e-13);
    }

    #[test]
    fn report_examples() {
        let (m, _) = free2();
        let ext = ExtensionParameter::Boundary(BoundaryAngle::new(0.4).unwrap());
        let grid = [c(0.1, 0.2), c(-3.0, 1.0), c(2.0, 0.0)];
        let phi = StateVector::new(vec![c(0.3, -1.0), c(2.0, 0.5)], m.basis()).unwrap();
        let r = reconstruction_report(&m, &phi, &ext, &grid, &[1, 2]).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.max_err_at(2) < 1e-12);
        let lag_full = r.rows.iter().filter(|r| r.terms == 2).fold(0.0_f64, |m, r| m.max(r.err_lagrange));
        assert!(lag_full < 1e-8);

        let zero = StateVector::zeros(m.basis());
        let r = reconstruction_report(&m, &zero, &ext, &grid, &[2]).unwrap();
        assert_eq!(r.max_err_kernel(), 0.0);
        assert_eq!(r.max_err_lagrange(), 0.0);

        assert!(reconstruction_report(&m, &phi, &ext, &grid, &[2, 1]).is_err());
    }

    #[test]
    fn report_pw_reference_phase_is_exact() {
        let cfg = PwConfig::new(TAU, 3).unwrap();
        let m = PwModel::new(cfg, 4);
        let phi = m
            .state_from_modes(&[(-3, c(1.0, 0.0)), (0, c(0.5, 0.5)), (2, c(-0.25, 0.0))])
            .unwrap();
        let ext = ExtensionParameter::Phase(PhaseParameter::new(0.0).unwrap());
        let grid: Vec<C64> = (0..9).map(|i| c(-2.0 + 0.45 * i as f64, 0.0)).collect();
        let r = reconstruction_report(&m, &phi, &ext, &grid, &[9]).unwrap();
        assert!(r.max_err_kernel() < 1e-10);

        let ext = ExtensionParameter::Phase(PhaseParameter::new(PI).unwrap());
        let r = reconstruction_report(&m, &phi, &ext, &grid, &[9]).unwrap();
        assert!(r.max_err_kernel() > 1e-6, "cross-phase truncation should be visible");
    }
}
