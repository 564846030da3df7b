//! Node (vortex) detection, winding numbers, circulation, and the
//! regularity classification of nodes by their radial density exponent.
//!
//! A node of psi carries the phase winding m of the quantization condition;
//! on a grid it shows up as a plaquette whose four wrapped edge differences
//! sum to 2 pi m. Per-plaquette winding is reliable while the true phase
//! change per edge stays below pi, i.e. for |m| <= 2 inside a cell and
//! |m| <= 3 for a zero sitting exactly on a grid point (handled by an
//! 8-point ring). Higher multiplicities need [`loop_winding`] on a dense
//! loop.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_phase_diff;
use crate::error::{Error, Result};
use crate::field::{ComplexField2D, ScalarField2D, VectorField2D};
use crate::loops::{line_integral, Loop};

/// Regularity class of the density Laplacian at a node.
///
/// With rho ~ r^{2 alpha} near the node, lap(rho) ~ r^{2 alpha - 2}:
/// alpha < 1 diverges, alpha > 1 vanishes, and only alpha = 1 leaves the
/// Laplacian finite and positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regularity {
    FinitePositive,
    Vanishing,
    Divergent,
    Indeterminate,
}

/// Per-node record: location, winding, and regularity diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeReport {
    /// Plaquette index (i, j) of the cell owning the node.
    pub cell: (usize, usize),
    /// Refined (x, y) estimate of the zero.
    pub position: (f64, f64),
    pub winding: i32,
    pub regularity: Option<Regularity>,
    pub alpha_fit: Option<f64>,
    pub fit_residual: Option<f64>,
    /// 5-point Laplacian of rho at the grid point nearest the node;
    /// meaningful for the FinitePositive class.
    pub delta_rho_estimate: Option<f64>,
    /// False when the bilinear zero-crossing refinement failed and the cell
    /// centre was used instead.
    pub position_refined: bool,
}

/// Tolerances for the radial-exponent classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityConfig {
    /// Half-width of the FinitePositive band around alpha = 1.
    pub delta: f64,
    /// Inner fit radius in units of the grid spacing.
    pub fit_rmin: f64,
    /// Outer fit radius in units of the grid spacing.
    pub fit_rmax: f64,
    /// Minimum number of annulus samples for a usable fit.
    pub min_samples: usize,
    /// RMS log-log fit residual above which the node is Indeterminate.
    pub max_fit_residual: f64,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        RegularityConfig {
            delta: 0.1,
            fit_rmin: 2.0,
            fit_rmax: 10.0,
            min_samples: 16,
            max_fit_residual: 0.25,
        }
    }
}

/// Outcome of the radial exponent fit around one centre.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityAssessment {
    pub class: Regularity,
    pub alpha_fit: Option<f64>,
    pub fit_residual: Option<f64>,
    pub delta_rho_estimate: Option<f64>,
    pub samples_used: usize,
}

/// Scans every plaquette for non-zero phase winding.
///
/// Exact zeros of psi on grid points are handled separately: the plaquettes
/// touching such a point have an undefined corner phase, so the winding is
/// taken around the 8-point ring of neighbours instead and the node is
/// reported at the grid point itself. Node order is deterministic
/// (row-major by cell).
pub fn detect_nodes(psi: &ComplexField2D) -> Vec<NodeReport> {
    let grid = *psi.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let n = grid.len();
    let (re, im) = (psi.re(), psi.im());

    let mut theta = vec![0.0; n];
    let mut is_zero = vec![false; n];
    for k in 0..n {
        if re[k] == 0.0 && im[k] == 0.0 {
            is_zero[k] = true;
        } else {
            theta[k] = im[k].atan2(re[k]);
        }
    }

    // Antisymmetric even at the +-pi tie, so an edge shared by two
    // plaquettes always cancels in their sum. A zero can sit exactly on an
    // edge (a real field changing sign along a grid line); plain wrapping
    // would then count it in both neighbouring plaquettes.
    let edge = |ka: usize, kb: usize| -> f64 {
        let w = wrap_phase_diff(theta[kb] - theta[ka]);
        if w == std::f64::consts::PI && kb < ka {
            -w
        } else {
            w
        }
    };

    let mut nodes = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let k00 = grid.idx(i, j);
            let (k10, k01, k11) = (k00 + 1, k00 + nx, k00 + nx + 1);
            if is_zero[k00] || is_zero[k10] || is_zero[k01] || is_zero[k11] {
                continue;
            }
            let w = edge(k00, k10) + edge(k10, k11) + edge(k11, k01) + edge(k01, k00);
            let m = (w / std::f64::consts::TAU).round() as i32;
            if m != 0 {
                let (position, refined) = refine_node_position(psi, i, j);
                nodes.push(NodeReport {
                    cell: (i, j),
                    position,
                    winding: m,
                    regularity: None,
                    alpha_fit: None,
                    fit_residual: None,
                    delta_rho_estimate: None,
                    position_refined: refined,
                });
            }
        }
    }

    // exact zeros on grid points: wind around the 8-neighbour ring
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = grid.idx(i, j);
            if !is_zero[k] {
                continue;
            }
            let ring = [
                (i + 1, j),
                (i + 1, j + 1),
                (i, j + 1),
                (i - 1, j + 1),
                (i - 1, j),
                (i - 1, j - 1),
                (i, j - 1),
                (i + 1, j - 1),
            ];
            if ring.iter().any(|&(a, b)| is_zero[grid.idx(a, b)]) {
                continue; // clustered exact zeros are not resolvable at grid scale
            }
            let mut w = 0.0;
            for e in 0..8 {
                let (a0, b0) = ring[e];
                let (a1, b1) = ring[(e + 1) % 8];
                w += edge(grid.idx(a0, b0), grid.idx(a1, b1));
            }
            let m = (w / std::f64::consts::TAU).round() as i32;
            if m != 0 {
                nodes.push(NodeReport {
                    cell: (i, j),
                    position: grid.pos(i, j),
                    winding: m,
                    regularity: None,
                    alpha_fit: None,
                    fit_residual: None,
                    delta_rho_estimate: None,
                    position_refined: true,
                });
            }
        }
    }

    nodes.sort_by_key(|nr| (nr.cell.1, nr.cell.0));
    nodes
}

/// Intersects the bilinear zero curves of re and im inside cell (i, j).
///
/// Inside the cell re(s,t) = a + b s + c t + d s t and similarly im; solving
/// both for zero reduces to a quadratic in s. Falls back to the cell centre
/// (flagged) when no intersection lies inside.
fn refine_node_position(psi: &ComplexField2D, i: usize, j: usize) -> ((f64, f64), bool) {
    let grid = psi.grid();
    let k00 = grid.idx(i, j);
    let (k10, k01, k11) = (k00 + 1, k00 + grid.nx(), k00 + grid.nx() + 1);
    let (re, im) = (psi.re(), psi.im());

    let a = re[k00];
    let b = re[k10] - re[k00];
    let c = re[k01] - re[k00];
    let d = re[k11] - re[k10] - re[k01] + re[k00];
    let e = im[k00];
    let f = im[k10] - im[k00];
    let g = im[k01] - im[k00];
    let h = im[k11] - im[k10] - im[k01] + im[k00];

    let scale = [a, b, c, d, e, f, g, h]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let qa = f * d - h * b;
    let qb = e * d + f * c - g * b - h * a;
    let qc = e * c - g * a;

    let mut roots = Vec::new();
    if qa.abs() <= 1e-14 * scale * scale {
        if qb.abs() > 1e-14 * scale * scale {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair
            let q = -0.5 * (qb + qb.signum() * sq);
            roots.push(q / qa);
            if q != 0.0 {
                roots.push(qc / q);
            }
        }
    }

    let slack = 1e-6;
    let mut best: Option<(f64, f64, f64)> = None;
    for &s in &roots {
        if !(s.is_finite() && (-slack..=1.0 + slack).contains(&s)) {
            continue;
        }
        let den_re = c + d * s;
        let den_im = g + h * s;
        let t = if den_re.abs() >= den_im.abs() {
            if den_re == 0.0 {
                continue;
            }
            -(a + b * s) / den_re
        } else {
            -(e + f * s) / den_im
        };
        if !(t.is_finite() && (-slack..=1.0 + slack).contains(&t)) {
            continue;
        }
        let r_re = a + b * s + c * t + d * s * t;
        let r_im = e + f * s + g * t + h * s * t;
        let resid = r_re.hypot(r_im);
        if best.map(|(_, _, r)| resid < r).unwrap_or(true) {
            best = Some((s, t, resid));
        }
    }

    match best {
        Some((s, t, resid)) if resid <= 1e-6 * scale => {
            let x = grid.x(i) + s.clamp(0.0, 1.0) * grid.dx();
            let y = grid.y(j) + t.clamp(0.0, 1.0) * grid.dy();
            ((x, y), true)
        }
        _ => {
            let x = grid.x(i) + 0.5 * grid.dx();
            let y = grid.y(j) + 0.5 * grid.dy();
            ((x, y), false)
        }
    }
}

/// Winding number of psi around a loop, from bilinear complex interpolation.
///
/// The accumulated phase of a closed sampled chain is an exact multiple of
/// 2 pi up to round-off; a fractional part beyond the guard band signals an
/// undersampled loop (or one passing too close to a node).
pub fn loop_winding(psi: &ComplexField2D, lp: &Loop) -> Result<i32> {
    const GUARD: f64 = 0.05;
    let samples = lp.densify(psi.grid())?;
    let mut args = Vec::with_capacity(samples.len());
    for p in &samples {
        let z = psi.sample_bilinear(p[0], p[1])?;
        if z.norm_sqr() == 0.0 {
            return Err(Error::ZeroOnPath { x: p[0], y: p[1] });
        }
        args.push(z.im.atan2(z.re));
    }
    let mut total = 0.0;
    for w in args.windows(2) {
        total += wrap_phase_diff(w[1] - w[0]);
    }
    let turns = total / std::f64::consts::TAU;
    let nearest = turns.round();
    if (turns - nearest).abs() > GUARD {
        return Err(Error::NonIntegerWinding {
            value: turns,
            tolerance: GUARD,
        });
    }
    Ok(nearest as i32)
}

/// Raw circulation of a velocity field over a loop, in units of 2 pi.
///
/// No integer rounding: for non-potential (subquantum) flows this is a real
/// number strictly between the quantized values.
pub fn circulation(v: &VectorField2D, lp: &Loop) -> Result<f64> {
    Ok(line_integral(v, lp)? / std::f64::consts::TAU)
}

/// Fits the radial density exponent around `center` and classifies it.
///
/// Least squares of log(binned mean rho) against log(binned mean r) over the
/// annulus [fit_rmin, fit_rmax] (in units of the larger grid spacing); the
/// slope is 2 alpha.
pub fn assess_regularity(
    rho: &ScalarField2D,
    center: (f64, f64),
    cfg: &RegularityConfig,
) -> RegularityAssessment {
    let grid = rho.grid();
    let h = grid.dx().max(grid.dy());
    let rmin = cfg.fit_rmin * h;
    let rmax = cfg.fit_rmax * h;

    let mut samples: Vec<(f64, f64)> = Vec::new();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let k = grid.idx(i, j);
            if !rho.mask()[k] || rho.values()[k] <= 0.0 {
                continue;
            }
            let (x, y) = grid.pos(i, j);
            let r = (x - center.0).hypot(y - center.1);
            if (rmin..=rmax).contains(&r) {
                samples.push((r, rho.values()[k]));
            }
        }
    }
    let samples_used = samples.len();
    if samples_used < cfg.min_samples {
        return RegularityAssessment {
            class: Regularity::Indeterminate,
            alpha_fit: None,
            fit_residual: None,
            delta_rho_estimate: None,
            samples_used,
        };
    }

    let nbins = (((rmax - rmin) / h).round() as usize).max(4);
    let width = (rmax - rmin) / nbins as f64;
    let mut sum_r = vec![0.0; nbins];
    let mut sum_v = vec![0.0; nbins];
    let mut count = vec![0usize; nbins];
    for &(r, v) in &samples {
        let b = (((r - rmin) / width) as usize).min(nbins - 1);
        sum_r[b] += r;
        sum_v[b] += v;
        count[b] += 1;
    }
    let pts: Vec<(f64, f64)> = (0..nbins)
        .filter(|&b| count[b] > 0)
        .map(|b| {
            let nb = count[b] as f64;
            ((sum_r[b] / nb).ln(), (sum_v[b] / nb).ln())
        })
        .collect();
    if pts.len() < 3 {
        return RegularityAssessment {
            class: Regularity::Indeterminate,
            alpha_fit: None,
            fit_residual: None,
            delta_rho_estimate: None,
            samples_used,
        };
    }

    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + icpt);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();

    let alpha = slope / 2.0;
    let class = if rms > cfg.max_fit_residual {
        Regularity::Indeterminate
    } else if alpha < 1.0 - cfg.delta {
        Regularity::Divergent
    } else if alpha > 1.0 + cfg.delta {
        Regularity::Vanishing
    } else {
        Regularity::FinitePositive
    };

    let delta_rho_estimate = (class == Regularity::FinitePositive)
        .then(|| laplacian_at_nearest(rho, center))
        .flatten();

    RegularityAssessment {
        class,
        alpha_fit: Some(alpha),
        fit_residual: Some(rms),
        delta_rho_estimate,
        samples_used,
    }
}

fn laplacian_at_nearest(rho: &ScalarField2D, center: (f64, f64)) -> Option<f64> {
    let grid = rho.grid();
    let (i, j) = grid.nearest(center.0, center.1);
    let i = i.clamp(1, grid.nx() - 2);
    let j = j.clamp(1, grid.ny() - 2);
    let k = grid.idx(i, j);
    let nx = grid.nx();
    let m = rho.mask();
    if !(m[k] && m[k - 1] && m[k + 1] && m[k - nx] && m[k + nx]) {
        return None;
    }
    let v = rho.values();
    let c = v[k];
    Some(
        ((v[k + 1] - c) + (v[k - 1] - c)) / (grid.dx() * grid.dx())
            + ((v[k + nx] - c) + (v[k - nx] - c)) / (grid.dy() * grid.dy()),
    )
}

/// Fills the regularity fields of a node record from the density field.
pub fn classify_regularity(
    rho: &ScalarField2D,
    node: &NodeReport,
    cfg: &RegularityConfig,
) -> NodeReport {
    let a = assess_regularity(rho, node.position, cfg);
    NodeReport {
        regularity: Some(a.class),
        alpha_fit: a.alpha_fit,
        fit_residual: a.fit_residual,
        delta_rho_estimate: a.delta_rho_estimate,
        ..node.clone()
    }
}

/// Result of dividing the winding factor out of a wave field.
#[derive(Debug, Clone)]
pub struct FactorOut {
    pub field: ComplexField2D,
    /// |psi~|^2 at the grid point nearest the node.
    pub rho_at_node: f64,
    /// Whether the factored density is strictly positive at the node.
    pub rho_positive: bool,
}

/// Divides psi by (x' + i y')^m (conjugate factor for m < 0), centred on the
/// node, removing its winding.
///
/// Grid points that coincide with the node exactly are filled from the mean
/// of their factored neighbours. Verifies that the residual winding around
/// the node vanishes (skipped when the check loop would leave the grid).
pub fn factor_out(psi: &ComplexField2D, node: &NodeReport) -> Result<FactorOut> {
    let m = node.winding;
    if m == 0 {
        return Err(Error::NoNode);
    }
    let grid = *psi.grid();
    let n = grid.len();
    let (cx, cy) = node.position;

    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let mut on_node = Vec::new();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let k = grid.idx(i, j);
            let (x, y) = grid.pos(i, j);
            let w = Complex64::new(x - cx, y - cy);
            if w.norm_sqr() == 0.0 {
                on_node.push(k);
                continue;
            }
            let factor = if m > 0 { w.powi(m) } else { w.conj().powi(-m) };
            let z = psi.at(k) / factor;
            re[k] = z.re;
            im[k] = z.im;
        }
    }
    for &k in &on_node {
        let (i, j) = grid.ij(k);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut cnt = 0;
        for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (a, b) = (i as i64 + di, j as i64 + dj);
            if a >= 0 && b >= 0 && (a as usize) < grid.nx() && (b as usize) < grid.ny() {
                let kk = grid.idx(a as usize, b as usize);
                if !on_node.contains(&kk) {
                    acc += Complex64::new(re[kk], im[kk]);
                    cnt += 1;
                }
            }
        }
        if cnt > 0 {
            let z = acc / cnt as f64;
            re[k] = z.re;
            im[k] = z.im;
        }
    }

    let field = ComplexField2D::new(grid, re, im)?;

    let radius = 3.0 * grid.dx().max(grid.dy());
    let fits = cx - radius > grid.x0()
        && cx + radius < grid.x_max()
        && cy - radius > grid.y0()
        && cy + radius < grid.y_max();
    if fits {
        let check = Loop::circle((cx, cy), radius, 64)?;
        let residual = loop_winding(&field, &check)?;
        if residual != 0 {
            return Err(Error::ResidualWinding {
                residual,
                removed: m,
            });
        }
    }

    let (i, j) = grid.nearest(cx, cy);
    let rho_at_node = field.get(i, j).norm_sqr();
    Ok(FactorOut {
        field,
        rho_at_node,
        rho_positive: rho_at_node > 0.0,
    })
}

/// Exponent pair of the r^{2 beta} ansatz for the factored density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaExponents {
    /// beta = 0: the bounded, non-zero density.
    pub admissible: f64,
    /// beta = -2|alpha|: unbounded, rejected.
    pub rejected: f64,
}

/// Roots of beta (beta + 2 |alpha|) = 0.
pub fn beta_exponents(alpha: f64) -> BetaExponents {
    BetaExponents {
        admissible: 0.0,
        rejected: -2.0 * alpha.abs(),
    }
}
