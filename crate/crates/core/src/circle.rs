//! Spectral laboratory on the circle: the wave function e^{i alpha phi} for
//! general alpha, evolved under H = p^2.
//!
//! For non-integer alpha the initial state is discontinuous at phi = 0 and
//! is not an energy eigenstate, so its density drifts in time, while the
//! flow-variable pair rho = 1/(2 pi), v = alpha is an exact stationary
//! solution for every alpha. The evolution is an exact phase rotation of the
//! Fourier modes; there is no time stepper and hence no time-discretization
//! error.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec;

/// Truncated Fourier representation of a state on S^1.
///
/// `coeffs[idx]` is c_n for n = idx - n_max, n in [-n_max, n_max]. The
/// squared coefficients sum to at most 1; the deficit is the truncation
/// tail, available via [`CircleState::tail_mass`].
#[derive(Debug, Clone)]
pub struct CircleState {
    pub alpha: f64,
    pub n_max: usize,
    pub coeffs: Vec<Complex64>,
    pub nphi: usize,
}

/// Density samples on the uniform angle grid phi_k = 2 pi k / nphi.
#[derive(Debug, Clone)]
pub struct CircleDensity {
    pub nphi: usize,
    pub values: Vec<f64>,
}

/// Relative L2 drift of the density away from its initial profile.
#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub times: Vec<f64>,
    pub drift: Vec<f64>,
    pub max_drift: f64,
}

/// Residuals of the stationary flow-variable solution rho = 1/(2 pi),
/// v = alpha, evaluated with discrete periodic operators.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StationaryCheck {
    pub continuity_residual: f64,
    pub bohm_residual: f64,
}

impl CircleState {
    /// Truncation deficit 1 - sum |c_n|^2, clamped at zero.
    pub fn tail_mass(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (1.0 - s).max(0.0)
    }

    pub fn with_nphi(mut self, nphi: usize) -> Self {
        self.nphi = nphi.max(16);
        self
    }
}

/// Projects e^{i alpha phi} onto the modes n in [-N, N].
///
/// c_n = (e^{2 pi i (alpha - n)} - 1) / (2 pi i (alpha - n)), evaluated in
/// the numerically stable form sin(pi alpha) e^{i pi alpha} / (pi (alpha-n)).
/// An exact integer alpha is a momentum eigenstate and gets the exact
/// Kronecker coefficients.
pub fn fourier_project(alpha: f64, n_max: usize) -> Result<CircleState> {
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!(
            "mode cutoff must be at least 8, got {n_max}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    let m = 2 * n_max + 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
    if alpha == alpha.round() {
        let a = alpha.round() as i64;
        if a.unsigned_abs() as usize <= n_max {
            coeffs[(a + n_max as i64) as usize] = Complex64::new(1.0, 0.0);
        }
        // an eigenstate beyond the cutoff leaves all coefficients zero;
        // tail_mass then reports the full unit deficit
    } else {
        let prefactor = Complex64::from_polar(1.0, PI * alpha) * (PI * alpha).sin();
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let n = idx as f64 - n_max as f64;
            *c = prefactor / (PI * (alpha - n));
        }
    }
    Ok(CircleState {
        alpha,
        n_max,
        coeffs,
        nphi: 4 * n_max + 2,
    })
}

/// Density |psi(phi, t)|^2 with psi(phi, t) = sum c_n e^{i n phi - i n^2 t}.
///
/// Direct mode summation in a fixed order per angle point; deterministic.
pub fn evolve_density(state: &CircleState, t: f64) -> CircleDensity {
    let nphi = state.nphi;
    let n_max = state.n_max as f64;
    let coeffs = &state.coeffs;
    let mut values = vec![0.0; nphi];
    exec::fill_indexed_parallel(&mut values, |k| {
        let phi = TAU * k as f64 / nphi as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in coeffs.iter().enumerate() {
            let n = idx as f64 - n_max;
            let phase = n * phi - n * n * t;
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc.norm_sqr()
    });
    CircleDensity { nphi, values }
}

/// Relative L2 drift of the density at each requested time.
///
/// The time list must contain t = 0 so the report is anchored to the
/// initial profile.
pub fn density_drift(state: &CircleState, times: &[f64]) -> Result<DriftReport> {
    if !times.contains(&0.0) {
        return Err(Error::InvalidParameter(
            "drift times must include t = 0".into(),
        ));
    }
    let rho0 = evolve_density(state, 0.0);
    let norm0: f64 = rho0.values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut drift = Vec::with_capacity(times.len());
    for &t in times {
        let rho = evolve_density(state, t);
        let d: f64 = rho
            .values
            .iter()
            .zip(&rho0.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        drift.push(d / norm0);
    }
    let max_drift = drift.iter().cloned().fold(0.0f64, f64::max);
    Ok(DriftReport {
        times: times.to_vec(),
        drift,
        max_drift,
    })
}

/// Verifies on a discrete periodic grid that rho = 1/(2 pi), v = alpha is
/// stationary: d_phi(rho v) = 0 and, with S = alpha phi - alpha^2 t / 2,
/// E = alpha^2 / 2 = v^2 / 2 + Q with Q = 0.
pub fn flow_stationary_check(alpha: f64) -> StationaryCheck {
    const NPHI: usize = 256;
    let rho = vec![1.0 / TAU; NPHI];
    let v = vec![alpha; NPHI];
    let dphi = TAU / NPHI as f64;

    // periodic centered difference of the probability current
    let current: Vec<f64> = rho.iter().zip(&v).map(|(r, w)| r * w).collect();
    let mut continuity: f64 = 0.0;
    for k in 0..NPHI {
        let prev = current[(k + NPHI - 1) % NPHI];
        let next = current[(k + 1) % NPHI];
        continuity = continuity.max(((next - prev) / (2.0 * dphi)).abs());
    }

    // Q from the discrete flow variables of a constant density
    let mut q_max: f64 = 0.0;
    for k in 0..NPHI {
        let prev = rho[(k + NPHI - 1) % NPHI];
        let next = rho[(k + 1) % NPHI];
        let c = rho[k];
        let lap = ((next - c) + (prev - c)) / (dphi * dphi);
        let u = 0.5 * (next.ln() - prev.ln()) / (2.0 * dphi);
        q_max = q_max.max((-0.25 * lap / c + 0.5 * u * u).abs());
    }

    let energy = 0.5 * alpha * alpha;
    let mut bohm: f64 = 0.0;
    for &w in &v {
        bohm = bohm.max((energy - 0.5 * w * w - q_max).abs());
    }

    StationaryCheck {
        continuity_residual: continuity,
        bohm_residual: bohm,
    }
}
