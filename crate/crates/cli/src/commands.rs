use std::fmt::Write as _;
use std::fs;

use kramer_core::jacobi::{place_sampling_point, sampling_set, BoundaryAngle, JacobiModel};
use kramer_core::pw::{default_window, PhaseParameter, PwModel};
use kramer_core::reconstruct::{
    kernel_series, reconstruction_report_on, ReconstructionReport, SampledSignal,
};
use kramer_core::rng::CheckRng;
use kramer_core::verify::{run_suite, transform_scale, CheckOutcome, VerifyConfig};
use kramer_core::{
    parseval_inner, transform, ExtensionParameter, SamplingModel, SamplingSet, StateVector,
};

use crate::input::{self, ModelSpec};
use crate::{ExtensionArgs, Failure, OutArgs, PlaceArgs, PointsArgs, ReconstructArgs, VerifyArgs};

/// 17 significant digits, enough to read every double back exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &OutArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn boundary(ext: &ExtensionArgs) -> Result<ExtensionParameter, Failure> {
    if ext.theta.is_some() || ext.window.is_some() {
        return Err(Failure::input("--theta and --window apply to Paley-Wiener models".into()));
    }
    Ok(ExtensionParameter::Boundary(BoundaryAngle::new(ext.tau.unwrap_or(0.0))?))
}

fn phase(ext: &ExtensionArgs) -> Result<ExtensionParameter, Failure> {
    if ext.tau.is_some() {
        return Err(Failure::input("--tau applies to Jacobi models".into()));
    }
    Ok(ExtensionParameter::Phase(PhaseParameter::new(ext.theta.unwrap_or(0.0))?))
}

fn points_csv(set: &SamplingSet) -> String {
    let mut s = String::from("index,x,kernel_norm,weight\n");
    for (i, ((x, k), w)) in set.points().iter().zip(set.kernel_norms()).zip(set.weights()).enumerate() {
        let _ = writeln!(s, "{i},{},{},{}", num(*x), num(*k), num(*w));
    }
    s
}

pub fn points(args: &PointsArgs) -> Result<u8, Failure> {
    let set = match input::read_model(&args.model.model, args.model.n)? {
        ModelSpec::Jacobi(c) => {
            let m = input::jacobi_model(&c, args.model.n)?;
            m.sampling_set(&boundary(&args.ext)?)?
        }
        ModelSpec::Pw { a, cutoff, gauge } => {
            let cutoff = cutoff.unwrap_or(0);
            let m = input::pw_model(a, cutoff, gauge, 0)?;
            let window = args.ext.window.unwrap_or_else(|| default_window(m.config()));
            input::pw_model(a, cutoff, gauge, window)?.sampling_set(&phase(&args.ext)?)?
        }
    };
    emit(&args.out, &points_csv(&set))?;
    Ok(0)
}

fn report_csv(report: &ReconstructionReport) -> String {
    let mut s = String::from(
        "z_re,z_im,f_true_re,f_true_im,f_kernel_re,f_kernel_im,f_lagrange_re,f_lagrange_im,err_kernel,err_lagrange\n",
    );
    for r in &report.rows {
        let cols = [
            r.z.re,
            r.z.im,
            r.exact.re,
            r.exact.im,
            r.kernel.re,
            r.kernel.im,
            r.lagrange.re,
            r.lagrange.im,
            r.err_kernel,
            r.err_lagrange,
        ];
        let line: Vec<String> = cols.iter().map(|&v| num(v)).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    s
}

fn run_report<M: SamplingModel>(
    model: &M,
    phi: &StateVector,
    ext: ExtensionParameter,
    args: &ReconstructArgs,
) -> Result<ReconstructionReport, Failure> {
    let grid = input::parse_grid(&args.grid)?;
    let set = match &args.points {
        Some(path) => input::read_points(path, ext)?,
        None => model.sampling_set(&ext)?,
    };
    if set.is_empty() {
        return Err(Failure::input("the sampling set is empty".into()));
    }
    let terms = args.terms.unwrap_or(set.len());
    Ok(reconstruction_report_on(model, phi, set, &grid, &[terms])?)
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<u8, Failure> {
    let report = match input::read_model(&args.model.model, args.model.n)? {
        ModelSpec::Jacobi(c) => {
            let m = input::jacobi_model(&c, args.model.n)?;
            let phi = input::read_jacobi_state(&args.state, &m)?;
            run_report(&m, &phi, boundary(&args.ext)?, args)?
        }
        ModelSpec::Pw { a, cutoff, gauge } => {
            let state = input::read_pw_state(&args.state)?;
            if state.a != a {
                return Err(Failure::input(format!(
                    "state interval length {} differs from the model's {a}",
                    state.a
                )));
            }
            let cutoff = cutoff.unwrap_or(state.max_mode());
            if state.max_mode() > cutoff {
                return Err(Failure::input(format!(
                    "state mode {} exceeds the model cutoff {cutoff}",
                    state.max_mode()
                )));
            }
            let base = input::pw_model(a, cutoff, gauge, 0)?;
            let window = args.ext.window.unwrap_or_else(|| default_window(base.config()));
            let m = input::pw_model(a, cutoff, gauge, window)?;
            let phi = m.state_from_modes(&state.modes)?;
            run_report(&m, &phi, phase(&args.ext)?, args)?
        }
    };
    emit(&args.out, &report_csv(&report))?;
    Ok(0)
}

pub fn place(args: &PlaceArgs) -> Result<u8, Failure> {
    let c = match input::read_model(&args.model.model, args.model.n)? {
        ModelSpec::Jacobi(c) => c,
        ModelSpec::Pw { .. } => {
            return Err(Failure::input("place needs a Jacobi model".into()));
        }
    };
    let n = input::jacobi_model(&c, args.model.n)?.order();
    let angle = place_sampling_point(&c, n, args.x_star)?;
    let set = sampling_set(&c, n, angle)?;
    let gap = set
        .points()
        .iter()
        .map(|x| (x - args.x_star).abs())
        .fold(f64::INFINITY, f64::min);
    if !(gap <= 1e-8 * (1.0 + args.x_star.abs())) {
        return Err(Failure::internal(format!(
            "placed spectrum misses x* = {} by {gap:e}",
            args.x_star
        )));
    }
    let body = serde_json::json!({ "tau": angle.tau(), "points": set.points() });
    let text = serde_json::to_string_pretty(&body)
        .map_err(|e| Failure::internal(e.to_string()))?;
    emit(&args.out, &format!("{text}\n"))?;
    Ok(0)
}

/// Full-term exactness of a user Jacobi model on random states.
fn jacobi_model_group(m: &JacobiModel, ext: ExtensionParameter, rng: &mut CheckRng) -> Result<f64, Failure> {
    let set = m.sampling_set(&ext)?;
    let terms = set.len();
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let phi = StateVector::new(rng.complex_vec(m.order(), 1.0), m.basis())?;
        let signal = SampledSignal::from_state(m, &phi, set.clone())?;
        for _ in 0..20 {
            let z = rng.in_disc(5.0);
            let err = (kernel_series(m, &signal, z, terms)? - transform(m, &phi, z)?).norm();
            worst = worst.max(err / transform_scale(m, &phi, z));
        }
    }
    Ok(worst)
}

/// Discrete Parseval identity on the phase-0 lattice of a user PW model.
fn pw_model_group(m: &PwModel, rng: &mut CheckRng) -> Result<f64, Failure> {
    let set = m.sampling_set(&ExtensionParameter::Phase(PhaseParameter::new(0.0)?))?;
    let measure = set.spectral_measure();
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let phi = StateVector::new(rng.complex_vec(m.dimension(), 1.0), m.basis())?;
        let eta = StateVector::new(rng.complex_vec(m.dimension(), 1.0), m.basis())?;
        let lhs = parseval_inner(m, &phi, &eta, &measure)?;
        worst = worst.max((lhs - phi.inner(&eta)?).norm() / (phi.norm() * eta.norm()));
    }
    Ok(worst)
}

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(Failure::input(format!("--tol must be positive, got {t}")));
        }
    }
    let mut extra = None;
    if let Some(path) = &args.model {
        let mut rng = CheckRng::new(args.seed);
        extra = Some(match input::read_model(path, args.n)? {
            ModelSpec::Jacobi(c) => {
                let m = input::jacobi_model(&c, args.n)?;
                let ext = ExtensionParameter::Boundary(BoundaryAngle::new(args.tau.unwrap_or(0.0))?);
                ("model_exactness", jacobi_model_group(&m, ext, &mut rng)?, 1e-9)
            }
            ModelSpec::Pw { a, cutoff, gauge } => {
                let k = cutoff.unwrap_or(4);
                let m = input::pw_model(a, k, gauge, k)?;
                ("model_parseval", pw_model_group(&m, &mut rng)?, 1e-12)
            }
        });
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        tol_override: args.tol,
    };
    let mut report = run_suite(&cfg)?;
    if let Some((name, max_err, tol)) = extra {
        let tol = args.tol.unwrap_or(tol);
        report.outcomes.push(CheckOutcome {
            name,
            max_err,
            tol,
            passed: max_err.is_finite() && max_err < tol,
        });
    }
    emit(&args.out, &format!("{report}\n"))?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 2.0_f64.sqrt() * 1e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
