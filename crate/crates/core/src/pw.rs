//! Paley-Wiener model: the operator `i d/dt` on `(0, a)` with boundary-phase
//! extensions.
//!
//! Conventions: eigenfunctions of the phase-`theta` extension are
//! `e^{-i lambda t}/sqrt(a)` with `lambda_n = (2 pi n - theta)/a`. The
//! coefficient basis is the phase-0 eigenbasis, `lambda_k = 2 pi k / a`,
//! `|k| <= K`, stored at index `k + K`.
//!
//! With the left gauge the transform is `phi_hat(z) = int_0^a e^{izt} f(t) dt`.
//! The centred gauge multiplies every transform by `e^{-iaz/2}`; it gives the
//! same sampling sets and norms but a space closed under `f*(z) = conj f(conj z)`,
//! which is what the de Branges structure function needs.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{BasisTag, ExtensionParameter, SamplingModel, SamplingSet, StateVector, C64};

/// Below this `|u|` the phase integral switches to its Taylor series.
pub const SERIES_SWITCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwGauge {
    /// `phi_hat(z) = int_0^a e^{izt} f(t) dt`.
    Left,
    /// `phi_hat(z) = int_0^a e^{iz(t - a/2)} f(t) dt`.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwConfig {
    a: f64,
    cutoff: usize,
    gauge: PwGauge,
}

impl PwConfig {
    pub fn new(a: f64, cutoff: usize) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Precondition(format!("interval length {a} must be positive")));
        }
        Ok(Self {
            a,
            cutoff,
            gauge: PwGauge::Left,
        })
    }

    pub fn with_gauge(mut self, gauge: PwGauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn length(&self) -> f64 {
        self.a
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn gauge(&self) -> PwGauge {
        self.gauge
    }

    pub fn basis(&self) -> BasisTag {
        BasisTag::PaleyWiener {
            length: self.a,
            cutoff: self.cutoff,
        }
    }

    /// Reference eigenvalue `2 pi k / a`.
    pub fn reference_point(&self, k: i64) -> f64 {
        TAU * k as f64 / self.a
    }

    /// Mode number of basis index `j`.
    pub fn mode(&self, j: usize) -> i64 {
        j as i64 - self.cutoff as i64
    }

    /// Basis index of mode `k`, if within the cutoff.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let j = k + self.cutoff as i64;
        (0..=2 * self.cutoff as i64).contains(&j).then_some(j as usize)
    }

    fn gauge_factor(&self, z: C64) -> C64 {
        match self.gauge {
            PwGauge::Left => C64::new(1.0, 0.0),
            PwGauge::Centered => (C64::new(0.0, -0.5 * self.a) * z).exp(),
        }
    }
}

/// Phase label `theta` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParameter {
    theta: f64,
}

impl PhaseParameter {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::Precondition(format!("theta = {theta} outside [0, 2 pi)")));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `e^{w} - 1` without cancellation for small `|w|`.
fn exp_m1(w: C64) -> C64 {
    let (x, y) = (w.re, w.im);
    let half = (0.5 * y).sin();
    C64::new(
        x.exp_m1() * y.cos() - 2.0 * half * half,
        x.exp() * y.sin(),
    )
}

/// `int_0^a e^{iut} dt = (e^{iua} - 1)/(iu)`.
pub fn phase_integral(u: C64, a: f64) -> C64 {
    if u.norm() < SERIES_SWITCH {
        let x = C64::new(0.0, a) * u;
        return a * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
    }
    exp_m1(C64::new(0.0, a) * u) / (C64::new(0.0, 1.0) * u)
}

/// Sampling set of the phase-`theta` extension over `n = -window ..= window`.
pub fn pw_sampling_points(cfg: &PwConfig, phase: PhaseParameter, window: usize) -> Result<SamplingSet> {
    let w = window as i64;
    let points = (-w..=w)
        .map(|n| (TAU * n as f64 - phase.theta()) / cfg.a)
        .collect::<Vec<_>>();
    let norms = vec![cfg.a; points.len()];
    SamplingSet::new(points, norms, ExtensionParameter::Phase(phase))
}

/// `tau_k(z) = <xi(z), e_k>` for the reference mode `k`.
pub fn basis_function(cfg: &PwConfig, k: i64, z: C64) -> C64 {
    phase_integral(z - cfg.reference_point(k), cfg.a) / cfg.a.sqrt() * cfg.gauge_factor(z)
}

pub fn pw_transform(cfg: &PwConfig, state: &StateVector, z: C64) -> Result<C64> {
    crate::model::transform(&PwModel::new(*cfg, 0), state, z)
}

/// Closed-form reproducing kernel `k(z, w) = <xi(z), xi(w)>`.
pub fn pw_kernel(cfg: &PwConfig, z: C64, w: C64) -> C64 {
    phase_integral(z - w.conj(), cfg.a) * cfg.gauge_factor(z) * cfg.gauge_factor(w).conj()
}

/// `pw_transform(state, x_n)` over the set's points.
pub fn pw_sample(cfg: &PwConfig, state: &StateVector, set: &SamplingSet) -> Result<Vec<C64>> {
    set.points()
        .iter()
        .map(|&x| pw_transform(cfg, state, C64::new(x, 0.0)))
        .collect()
}

/// The model with a default sampling window used by [`SamplingModel::sampling_set`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwModel {
    cfg: PwConfig,
    window: usize,
}

impl PwModel {
    pub fn new(cfg: PwConfig, window: usize) -> Self {
        Self { cfg, window }
    }

    pub fn config(&self) -> &PwConfig {
        &self.cfg
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// State from `(k, c_k)` mode pairs; repeated modes accumulate.
    pub fn state_from_modes(&self, modes: &[(i64, C64)]) -> Result<StateVector> {
        let mut s = StateVector::zeros(self.cfg.basis());
        let mut coeffs = s.coeffs().to_vec();
        for &(k, c) in modes {
            let j = self.cfg.index_of(k).ok_or_else(|| {
                Error::Precondition(format!("mode {k} exceeds cutoff {}", self.cfg.cutoff))
            })?;
            coeffs[j] += c;
        }
        s = StateVector::new(coeffs, self.cfg.basis())?;
        Ok(s)
    }
}

impl SamplingModel for PwModel {
    fn basis(&self) -> BasisTag {
        self.cfg.basis()
    }

    fn transformed_basis(&self, z: C64) -> Vec<C64> {
        let k = self.cfg.cutoff as i64;
        (-k..=k).map(|m| basis_function(&self.cfg, m, z)).collect()
    }

    fn kernel(&self, z: C64, w: C64) -> C64 {
        pw_kernel(&self.cfg, z, w)
    }

    fn sampling_set(&self, ext: &ExtensionParameter) -> Result<SamplingSet> {
        match ext {
            ExtensionParameter::Phase(p) => pw_sampling_points(&self.cfg, *p, self.window),
            other => Err(Error::Precondition(format!(
                "Paley-Wiener model needs a phase, got {other:?}"
            ))),
        }
    }

    /// The entire gauge of this model is not known explicitly.
    fn gauge(&self) -> Option<StateVector> {
        None
    }
}

/// `e^{-i lambda a}` for an extension eigenvalue; equals `e^{i theta}` under
/// the `(2 pi n - theta)/a` convention.
pub fn boundary_phase(cfg: &PwConfig, lambda: f64) -> C64 {
    C64::new(0.0, -lambda * cfg.a).exp()
}

/// Default window large enough to cover the coefficient cutoff.
pub fn default_window(cfg: &PwConfig) -> usize {
    cfg.cutoff.max(1)
}
