//! Conversions between the wave function and the flow variables
//! (rho, theta, v, u, Q), plus residuals of the stationary equations.
//!
//! Units: hbar = 1, mass = 1 throughout. The phase is kept wrapped in
//! (-pi, pi]; velocities come from wrapped phase differences across two grid
//! steps, exact while the true phase change per step stays below pi/2. A
//! global unwrap would be ill-defined around vortices.

use crate::angle::wrap_phase_diff;
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{ComplexField2D, FieldStats, ScalarField2D, VectorField2D};
use crate::ops;

/// The Madelung bundle for one wave field.
///
/// `theta` is masked wherever `rho <= eps_rho`; the derived fields carry the
/// same mask widened by their stencil footprint.
#[derive(Debug, Clone)]
pub struct FlowFields {
    pub rho: ScalarField2D,
    pub theta: ScalarField2D,
    pub v: Option<VectorField2D>,
    pub u: Option<VectorField2D>,
    pub q: Option<ScalarField2D>,
    pub eps_rho: f64,
}

/// Residuals of the stationary continuity and Bohm equations.
#[derive(Debug, Clone)]
pub struct StationaryResidualReport {
    /// d_i (rho v^i), zero for any stationary flow.
    pub continuity_residual: ScalarField2D,
    /// E - |v|^2 / 2 - V - Q.
    pub bohm_residual: ScalarField2D,
    pub energy: f64,
    pub continuity_stats: Option<FieldStats>,
    pub bohm_stats: Option<FieldStats>,
}

/// Density floor that masks only genuine node neighbourhoods: 1e-12 max(rho).
pub fn default_eps_rho(rho: &ScalarField2D) -> f64 {
    1e-12 * rho.max_value().max(0.0)
}

/// Splits psi into rho = |psi|^2 and the wrapped phase.
pub fn polar_decompose(psi: &ComplexField2D, eps_rho: f64) -> FlowFields {
    let grid = *psi.grid();
    let n = grid.len();
    let (re, im) = (psi.re(), psi.im());
    let mut rho = vec![0.0; n];
    exec::fill_indexed_parallel(&mut rho, |k| re[k] * re[k] + im[k] * im[k]);
    let mask: Vec<bool> = rho.iter().map(|&r| r > eps_rho).collect();
    let mut theta = vec![0.0; n];
    exec::fill_indexed_parallel(&mut theta, |k| {
        if mask[k] {
            // atan2 yields [-pi, pi]; fold the closed lower end onto +pi
            let t = im[k].atan2(re[k]);
            if t <= -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                t
            }
        } else {
            0.0
        }
    });
    FlowFields {
        rho: ScalarField2D::from_parts(grid, rho, vec![true; n]),
        theta: ScalarField2D::from_parts(grid, theta, mask),
        v: None,
        u: None,
        q: None,
        eps_rho,
    }
}

/// Rebuilds psi = sqrt(rho) e^{i theta}; masked-phase points map to 0.
pub fn polar_compose(rho: &ScalarField2D, theta: &ScalarField2D) -> Result<ComplexField2D> {
    if rho.grid() != theta.grid() {
        return Err(Error::GridMismatch);
    }
    for (k, (&r, &ok)) in rho.values().iter().zip(rho.mask()).enumerate() {
        if ok && r < 0.0 {
            return Err(Error::NegativeDensity { value: r, index: k });
        }
    }
    let grid = *rho.grid();
    let n = grid.len();
    let (rv, rm) = (rho.values(), rho.mask());
    let (tv, tm) = (theta.values(), theta.mask());
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    exec::fill_indexed_parallel(&mut re, |k| {
        if rm[k] && tm[k] {
            rv[k].sqrt() * tv[k].cos()
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut im, |k| {
        if rm[k] && tm[k] {
            rv[k].sqrt() * tv[k].sin()
        } else {
            0.0
        }
    });
    ComplexField2D::new(grid, re, im)
}

/// Fills v, u and Q from rho and theta.
///
/// v_x = wrap(theta_{i+1,j} - theta_{i-1,j}) / (2 dx) and analogously in y;
/// u = grad(ln rho) / 2 by centered differences; Q = |u|^2/2 - lap(rho)/(4 rho).
/// Everything is masked on the boundary ring and wherever rho <= eps_rho at
/// the point or at a stencil neighbour.
pub fn kinematic_fields(flow: FlowFields) -> FlowFields {
    let grid = *flow.rho.grid();
    let nx = grid.nx();
    let n = grid.len();
    let rho = flow.rho.values();
    let theta = flow.theta.values();
    let eps = flow.eps_rho;

    let ok: Vec<bool> = (0..n)
        .map(|k| flow.theta.mask()[k] && flow.rho.mask()[k] && rho[k] > eps)
        .collect();
    let mut mask = vec![false; n];
    for j in 1..grid.ny() - 1 {
        for i in 1..nx - 1 {
            let k = grid.idx(i, j);
            mask[k] = ok[k] && ok[k - 1] && ok[k + 1] && ok[k - nx] && ok[k + nx];
        }
    }

    let inv_2dx = 0.5 / grid.dx();
    let inv_2dy = 0.5 / grid.dy();
    let mut vx = vec![0.0; n];
    let mut vy = vec![0.0; n];
    exec::fill_indexed_parallel(&mut vx, |k| {
        if mask[k] {
            wrap_phase_diff(theta[k + 1] - theta[k - 1]) * inv_2dx
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut vy, |k| {
        if mask[k] {
            wrap_phase_diff(theta[k + nx] - theta[k - nx]) * inv_2dy
        } else {
            0.0
        }
    });

    let mut ux = vec![0.0; n];
    let mut uy = vec![0.0; n];
    exec::fill_indexed_parallel(&mut ux, |k| {
        if mask[k] {
            0.5 * (rho[k + 1].ln() - rho[k - 1].ln()) * inv_2dx
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut uy, |k| {
        if mask[k] {
            0.5 * (rho[k + nx].ln() - rho[k - nx].ln()) * inv_2dy
        } else {
            0.0
        }
    });

    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    let inv_dy2 = 1.0 / (grid.dy() * grid.dy());
    let mut q = vec![0.0; n];
    exec::fill_indexed_parallel(&mut q, |k| {
        if !mask[k] {
            return 0.0;
        }
        let c = rho[k];
        let lap = ((rho[k + 1] - c) + (rho[k - 1] - c)) * inv_dx2
            + ((rho[k + nx] - c) + (rho[k - nx] - c)) * inv_dy2;
        -0.25 * lap / c + 0.5 * (ux[k] * ux[k] + uy[k] * uy[k])
    });

    FlowFields {
        v: Some(VectorField2D::from_parts(grid, vx, vy, mask.clone())),
        u: Some(VectorField2D::from_parts(grid, ux, uy, mask.clone())),
        q: Some(ScalarField2D::from_parts(grid, q, mask)),
        ..flow
    }
}

/// The other route to the quantum potential: Q = -lap(sqrt rho)/(2 sqrt rho).
///
/// Kept independent of [`kinematic_fields`] so the two discrete forms can be
/// checked against each other.
pub fn q_from_sqrt_form(rho: &ScalarField2D, eps_rho: f64) -> ScalarField2D {
    let grid = *rho.grid();
    let n = grid.len();
    let pos: Vec<bool> = rho
        .values()
        .iter()
        .zip(rho.mask())
        .map(|(&r, &ok)| ok && r > eps_rho)
        .collect();
    let mut sqrt_rho = vec![0.0; n];
    exec::fill_indexed_parallel(&mut sqrt_rho, |k| if pos[k] { rho.values()[k].sqrt() } else { 0.0 });
    let sqrt_field = ScalarField2D::from_parts(grid, sqrt_rho, pos);
    let lap = ops::laplacian(&sqrt_field);
    let mut q = vec![0.0; n];
    let mask = lap.mask().to_vec();
    exec::fill_indexed_parallel(&mut q, |k| {
        if mask[k] {
            -0.5 * lap.values()[k] / sqrt_field.values()[k]
        } else {
            0.0
        }
    });
    ScalarField2D::from_parts(grid, q, mask)
}

/// Residuals of the stationary equations for a given potential and energy E.
pub fn stationary_residuals(
    flow: &FlowFields,
    potential: &ScalarField2D,
    energy: f64,
) -> Result<StationaryResidualReport> {
    let v = flow.v.as_ref().ok_or(Error::MissingKinematicFields)?;
    let q = flow.q.as_ref().ok_or(Error::MissingKinematicFields)?;
    if potential.grid() != flow.rho.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *flow.rho.grid();
    let n = grid.len();
    let rho = flow.rho.values();

    // continuity: div(rho v)
    let mut jx = vec![0.0; n];
    let mut jy = vec![0.0; n];
    exec::fill_indexed_parallel(&mut jx, |k| rho[k] * v.vx()[k]);
    exec::fill_indexed_parallel(&mut jy, |k| rho[k] * v.vy()[k]);
    let current = VectorField2D::from_parts(grid, jx, jy, v.mask().to_vec());
    let continuity = ops::divergence(&current);

    // Bohm: E - |v|^2/2 - V - Q, on points where v and Q are valid
    let mut bohm = vec![0.0; n];
    let mut bmask = vec![false; n];
    for (k, slot) in bmask.iter_mut().enumerate() {
        *slot = v.mask()[k] && q.mask()[k] && potential.mask()[k];
    }
    exec::fill_indexed_parallel(&mut bohm, |k| {
        if !bmask[k] {
            return 0.0;
        }
        let (vx, vy) = (v.vx()[k], v.vy()[k]);
        energy - 0.5 * (vx * vx + vy * vy) - potential.values()[k] - q.values()[k]
    });
    let bohm_field = ScalarField2D::from_parts(grid, bohm, bmask);

    Ok(StationaryResidualReport {
        continuity_stats: continuity.interior_stats(),
        bohm_stats: bohm_field.interior_stats(),
        continuity_residual: continuity,
        bohm_residual: bohm_field,
        energy,
    })
}
