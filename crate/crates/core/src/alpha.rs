//! The rotationally invariant solution family rho = r^{2|alpha|},
//! S = alpha * phi, its energy balance, and the subquantum core
//! regularizations (velocity cutoff, density shift, curl penalty).
//!
//! Analytic fields are generated from closed forms, never by numerical
//! differentiation, so the finite-difference operators can be tested against
//! them instead of with them.

use serde::{Deserialize, Serialize};

use crate::angle::wrap_angle;
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{ScalarField2D, VectorField2D};
use crate::flow::FlowFields;
use crate::grid::Grid2D;
use crate::ops;
use crate::vortex::{assess_regularity, RegularityAssessment, RegularityConfig};

/// Functional form of the curl penalty energy density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PenaltyForm {
    /// U = lambda * rho * omega^2.
    #[default]
    RhoOmegaSquared,
}

/// Parameters of one family member plus its regularization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaModel {
    /// Winding parameter alpha.
    pub alpha: f64,
    /// Core radius of the velocity regularization.
    #[serde(default = "default_r0")]
    pub r0: f64,
    /// Constant density shift.
    #[serde(default)]
    pub rho0: f64,
    /// Penalty coefficient.
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub penalty_form: PenaltyForm,
}

fn default_r0() -> f64 {
    1.0
}

impl AlphaModel {
    pub fn new(alpha: f64) -> Self {
        AlphaModel {
            alpha,
            r0: 1.0,
            rho0: 0.0,
            lambda: 0.0,
            penalty_form: PenaltyForm::RhoOmegaSquared,
        }
    }
}

/// Annulus over which residual statistics are taken.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Annulus {
    pub center: (f64, f64),
    pub rmin: f64,
    pub rmax: f64,
}

impl Annulus {
    pub fn centered(rmin: f64, rmax: f64) -> Self {
        Annulus {
            center: (0.0, 0.0),
            rmin,
            rmax,
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let r = (x - self.center.0).hypot(y - self.center.1);
        (self.rmin..=self.rmax).contains(&r)
    }
}

/// Residual of the energy-density balance rho v^2/2 + rho u^2/2 (+U)
/// = lap(rho)/4.
#[derive(Debug, Clone)]
pub struct BalanceReport {
    pub residual: ScalarField2D,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub count: usize,
    pub annulus: Option<Annulus>,
}

/// Closed-form flow bundle of the family member: rho = r^{2|alpha|},
/// theta = wrap(alpha phi), tangential v and radial u of magnitude
/// |alpha| / r, Q = -alpha^2 / (2 r^2). The origin point (r = 0), where the
/// angle is undefined, is masked.
pub fn alpha_fields(model: &AlphaModel, grid: &Grid2D) -> FlowFields {
    let a = model.alpha;
    let aa = a.abs();
    let n = grid.len();
    let g = *grid;

    let coords: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let (i, j) = g.ij(k);
            g.pos(i, j)
        })
        .collect();

    let mut rho = vec![0.0; n];
    exec::fill_indexed_parallel(&mut rho, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if aa == 0.0 {
            1.0
        } else {
            r2.powf(aa)
        }
    });

    let off_origin: Vec<bool> = coords
        .iter()
        .map(|&(x, y)| x * x + y * y > 0.0)
        .collect();

    let mut theta = vec![0.0; n];
    exec::fill_indexed_parallel(&mut theta, |k| {
        if off_origin[k] {
            let (x, y) = coords[k];
            wrap_angle(a * y.atan2(x))
        } else {
            0.0
        }
    });

    let mut vx = vec![0.0; n];
    let mut vy = vec![0.0; n];
    let mut ux = vec![0.0; n];
    let mut uy = vec![0.0; n];
    let mut q = vec![0.0; n];
    exec::fill_indexed_parallel(&mut vx, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if off_origin[k] {
            -a * y / r2
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut vy, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if off_origin[k] {
            a * x / r2
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut ux, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if off_origin[k] {
            aa * x / r2
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut uy, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if off_origin[k] {
            aa * y / r2
        } else {
            0.0
        }
    });
    exec::fill_indexed_parallel(&mut q, |k| {
        let (x, y) = coords[k];
        let r2 = x * x + y * y;
        if off_origin[k] {
            -0.5 * a * a / r2
        } else {
            0.0
        }
    });

    FlowFields {
        rho: ScalarField2D::from_parts(g, rho, vec![true; n]),
        theta: ScalarField2D::from_parts(g, theta, off_origin.clone()),
        v: Some(VectorField2D::from_parts(g, vx, vy, off_origin.clone())),
        u: Some(VectorField2D::from_parts(g, ux, uy, off_origin.clone())),
        q: Some(ScalarField2D::from_parts(g, q, off_origin)),
        eps_rho: 0.0,
    }
}

/// Evaluates the balance residual rho v^2/2 + rho u^2/2 (+ U) - lap(rho)/4.
///
/// The Laplacian always comes from the 5-point stencil. With a model whose
/// lambda is positive, the penalty U = lambda rho omega^2 enters, with omega
/// taken from the discrete curl of the flow's velocity.
pub fn balance_residual(
    flow: &FlowFields,
    model: Option<&AlphaModel>,
    annulus: Option<Annulus>,
) -> Result<BalanceReport> {
    let v = flow.v.as_ref().ok_or(Error::MissingKinematicFields)?;
    let u = flow.u.as_ref().ok_or(Error::MissingKinematicFields)?;
    let grid = *flow.rho.grid();
    let n = grid.len();
    let rho = flow.rho.values();

    let lap = ops::laplacian(&flow.rho);
    let penalty = match model {
        Some(m) if m.lambda > 0.0 => {
            let omega = ops::curl2d(v);
            Some((m.lambda, omega))
        }
        _ => None,
    };

    let mut mask = vec![false; n];
    for (k, slot) in mask.iter_mut().enumerate() {
        *slot = lap.mask()[k] && v.mask()[k] && u.mask()[k];
        if let Some((_, omega)) = &penalty {
            *slot = *slot && omega.mask()[k];
        }
    }

    let mut res = vec![0.0; n];
    exec::fill_indexed_parallel(&mut res, |k| {
        if !mask[k] {
            return 0.0;
        }
        let ke = 0.5 * rho[k] * (v.vx()[k] * v.vx()[k] + v.vy()[k] * v.vy()[k])
            + 0.5 * rho[k] * (u.vx()[k] * u.vx()[k] + u.vy()[k] * u.vy()[k]);
        let pen = penalty
            .as_ref()
            .map(|(lambda, omega)| {
                let w = omega.values()[k];
                lambda * rho[k] * w * w
            })
            .unwrap_or(0.0);
        ke + pen - 0.25 * lap.values()[k]
    });
    let residual = ScalarField2D::from_parts(grid, res, mask);

    let stats = match annulus {
        Some(ann) => residual.stats_where(|x, y| ann.contains(x, y)),
        None => residual.interior_stats(),
    };
    let stats = stats.ok_or_else(|| Error::EmptyRegion("the balance residual".into()))?;

    Ok(BalanceReport {
        residual,
        max_abs: stats.max_abs,
        mean_abs: stats.mean_abs,
        count: stats.count,
        annulus,
    })
}

/// Regularized velocity v~ = v r^2 / (r0^2 + r^2) and the closed-form curl
/// omega = 2 alpha r0^2 / (r^2 + r0^2)^2.
///
/// v~ is defined everywhere, vanishes at the origin, and approaches v as
/// r grows; its curl is maximal at the core centre.
pub fn regularize_flow(
    model: &AlphaModel,
    grid: &Grid2D,
) -> Result<(VectorField2D, ScalarField2D)> {
    if !(model.r0 > 0.0 && model.r0.is_finite()) {
        return Err(Error::DegenerateModel(format!(
            "regularization needs r0 > 0, got {}",
            model.r0
        )));
    }
    let a = model.alpha;
    let r02 = model.r0 * model.r0;
    let g = *grid;
    let n = g.len();

    let mut vx = vec![0.0; n];
    let mut vy = vec![0.0; n];
    let mut omega = vec![0.0; n];
    exec::fill_indexed_parallel(&mut vx, |k| {
        let (i, j) = g.ij(k);
        let (x, y) = g.pos(i, j);
        -a * y / (r02 + x * x + y * y)
    });
    exec::fill_indexed_parallel(&mut vy, |k| {
        let (i, j) = g.ij(k);
        let (x, y) = g.pos(i, j);
        a * x / (r02 + x * x + y * y)
    });
    exec::fill_indexed_parallel(&mut omega, |k| {
        let (i, j) = g.ij(k);
        let (x, y) = g.pos(i, j);
        let d = r02 + x * x + y * y;
        2.0 * a * r02 / (d * d)
    });

    Ok((
        VectorField2D::from_parts(g, vx, vy, vec![true; n]),
        ScalarField2D::from_parts(g, omega, vec![true; n]),
    ))
}

/// Constant density shift rho -> rho + rho0; the discrete Laplacian is
/// unchanged exactly because the stencil annihilates constants.
pub fn shift_density(rho: &ScalarField2D, rho0: f64) -> Result<ScalarField2D> {
    if !(rho0 >= 0.0 && rho0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "density shift must be non-negative, got {rho0}"
        )));
    }
    let grid = *rho.grid();
    let vals = rho.values();
    let mask = rho.mask().to_vec();
    let mut out = vec![0.0; grid.len()];
    exec::fill_indexed_parallel(&mut out, |k| if mask[k] { vals[k] + rho0 } else { 0.0 });
    Ok(ScalarField2D::from_parts(grid, out, mask))
}

/// The modified balance evaluated at the core centre, where the velocity
/// terms vanish and only the penalty survives: required lap(rho~)(0)
/// = 4 U(rho~(0), omega(0)) = 4 lambda rho~(0) (2 alpha / r0^2)^2.
///
/// Strictly positive for any admissible model, which is the whole point:
/// a penalized, regularized core forces lap(rho) > 0 at the node.
pub fn penalty_balance_at_core(model: &AlphaModel, rho_tilde_0: f64) -> Result<f64> {
    if model.alpha == 0.0 {
        return Err(Error::DegenerateModel("alpha = 0 carries no vortex".into()));
    }
    if model.lambda <= 0.0 {
        return Err(Error::DegenerateModel(format!(
            "penalty needs lambda > 0, got {}",
            model.lambda
        )));
    }
    let r0_ok = model.r0 > 0.0 && model.r0.is_finite();
    if !r0_ok {
        return Err(Error::DegenerateModel(format!(
            "penalty needs r0 > 0, got {}",
            model.r0
        )));
    }
    if !(rho_tilde_0 > 0.0 && rho_tilde_0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "core density must be positive, got {rho_tilde_0}"
        )));
    }
    let omega0 = 2.0 * model.alpha / (model.r0 * model.r0);
    let PenaltyForm::RhoOmegaSquared = model.penalty_form;
    Ok(4.0 * model.lambda * rho_tilde_0 * omega0 * omega0)
}

/// One row of an alpha scan: the classification plus balance statistics for
/// a single family member.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaScanRow {
    pub alpha: f64,
    pub assessment: RegularityAssessment,
    pub balance_max_abs: f64,
    pub balance_mean_abs: f64,
}

/// Classifies a list of family members on a common grid and collects the
/// closed-form balance residual statistics on the given annulus.
pub fn alpha_scan(
    alphas: &[f64],
    grid: &Grid2D,
    cfg: &RegularityConfig,
    annulus: Annulus,
) -> Result<Vec<AlphaScanRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            let flow = alpha_fields(&AlphaModel::new(alpha), grid);
            let assessment = assess_regularity(&flow.rho, (0.0, 0.0), cfg);
            let balance = balance_residual(&flow, None, Some(annulus))?;
            Ok(AlphaScanRow {
                alpha,
                assessment,
                balance_max_abs: balance.max_abs,
                balance_mean_abs: balance.mean_abs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::polar_compose;
    use crate::grid::Grid2D;
    use crate::loops::Loop;
    use crate::vortex::{circulation, Regularity};
    use num_complex::Complex64;

    fn square(n: usize, half: f64) -> Grid2D {
        Grid2D::centered_square(n, half).unwrap()
    }

    #[test]
    fn family_values_at_unit_radius() {
        // half extent 2 puts (1, 0) exactly on a grid point
        let flow = alpha_fields(&AlphaModel::new(1.0), &square(257, 2.0));
        let g = flow.rho.grid();
        let (i, j) = g.nearest(1.0, 0.0);
        assert!((flow.rho.get(i, j) - 1.0).abs() < 1e-12);
        let (vx, vy) = flow.v.as_ref().unwrap().get(i, j);
        assert!((vx.hypot(vy) - 1.0).abs() < 1e-12);
        let (ux, uy) = flow.u.as_ref().unwrap().get(i, j);
        assert!((ux.hypot(uy) - 1.0).abs() < 1e-12);
        assert!((flow.q.as_ref().unwrap().get(i, j) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn alpha_zero_is_vacuum() {
        let flow = alpha_fields(&AlphaModel::new(0.0), &square(33, 1.0));
        for k in 0..flow.rho.grid().len() {
            assert_eq!(flow.rho.values()[k], 1.0);
        }
        let v = flow.v.as_ref().unwrap();
        assert!(v.vx().iter().chain(v.vy()).all(|&c| c == 0.0));
    }

    #[test]
    fn alpha_one_composes_to_x_plus_iy() {
        let g = square(65, 1.0);
        let flow = alpha_fields(&AlphaModel::new(1.0), &g);
        let psi = polar_compose(&flow.rho, &flow.theta).unwrap();
        for j in 0..65 {
            for i in 0..65 {
                let (x, y) = g.pos(i, j);
                let want = Complex64::new(x, y);
                let got = psi.get(i, j);
                assert!(
                    (got - want).norm() <= 1e-12 * want.norm().max(1e-12),
                    "({x},{y}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn closed_form_balance_is_second_order_off_alpha_one() {
        let ann = Annulus::centered(0.2, 1.0);
        for alpha in [0.5, 2.0] {
            let run = |n: usize| {
                let flow = alpha_fields(&AlphaModel::new(alpha), &square(n, 1.0));
                balance_residual(&flow, None, Some(ann)).unwrap().max_abs
            };
            let (m1, m2) = (run(257), run(513));
            assert!(m1 < 5e-3, "alpha={alpha}: max {m1}");
            let ratio = m1 / m2;
            assert!((3.4..=4.6).contains(&ratio), "alpha={alpha}: ratio {ratio}");
        }
    }

    #[test]
    fn alpha_one_balance_is_exact_for_the_stencil() {
        // rho = r^2 is quadratic, so the 5-point Laplacian is exact and the
        // closed-form kinetic terms match it to round-off
        let flow = alpha_fields(&AlphaModel::new(1.0), &square(257, 1.0));
        let rep = balance_residual(&flow, None, Some(Annulus::centered(0.2, 1.0))).unwrap();
        assert!(rep.max_abs < 1e-10, "max {}", rep.max_abs);
    }

    #[test]
    fn plane_wave_balance_reports_the_energy_density() {
        // rho = 1, v = (k, 0), u = 0: residual is k^2/2 everywhere
        let g = square(33, 1.0);
        let k_wave = 2.0;
        let flow = FlowFields {
            rho: ScalarField2D::constant(g, 1.0).unwrap(),
            theta: ScalarField2D::constant(g, 0.0).unwrap(),
            v: Some(VectorField2D::from_fn(g, |_, _| (k_wave, 0.0)).unwrap()),
            u: Some(VectorField2D::from_fn(g, |_, _| (0.0, 0.0)).unwrap()),
            q: Some(ScalarField2D::constant(g, 0.0).unwrap()),
            eps_rho: 0.0,
        };
        let rep = balance_residual(&flow, None, None).unwrap();
        let expect = 0.5 * k_wave * k_wave;
        assert!((rep.max_abs - expect).abs() < 1e-12);
        assert!((rep.mean_abs - expect).abs() < 1e-12);
    }

    #[test]
    fn density_shift_breaks_the_quantum_balance() {
        // shifting rho while keeping v, u of the unshifted family leaves a
        // finite residual: the motivation for the penalty term
        let g = square(257, 1.0);
        let flow = alpha_fields(&AlphaModel::new(1.0), &g);
        let shifted = FlowFields {
            rho: shift_density(&flow.rho, 0.5).unwrap(),
            ..flow
        };
        let rep = balance_residual(&shifted, None, Some(Annulus::centered(0.2, 1.0))).unwrap();
        // analytic residual: rho0 * (v^2 + u^2)/2 = rho0 / r^2 for alpha = 1
        assert!(rep.max_abs > 0.5 * 0.5 / 1.0, "max {}", rep.max_abs);
    }

    #[test]
    fn regularized_velocity_and_curl_values() {
        let model = AlphaModel::new(1.0);
        let g = square(257, 2.0);
        let (v, omega) = regularize_flow(&model, &g).unwrap();
        let (i0, j0) = g.nearest(0.0, 0.0);
        let (vx, vy) = v.get(i0, j0);
        assert_eq!((vx, vy), (0.0, 0.0));
        assert!((omega.get(i0, j0) - 2.0).abs() < 1e-12);
        let (i1, j1) = g.nearest(1.0, 0.0);
        assert!((omega.get(i1, j1) - 0.5).abs() < 1e-12);
        let (vx1, vy1) = v.get(i1, j1);
        assert!((vx1.hypot(vy1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn discrete_curl_matches_closed_form_within_one_percent() {
        let model = AlphaModel::new(1.0);
        let g = square(257, 2.2);
        let (v, omega) = regularize_flow(&model, &g).unwrap();
        let num = ops::curl2d(&v);
        let mut worst = 0.0f64;
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let (x, y) = g.pos(i, j);
                let r = x.hypot(y);
                if !(0.1..=2.0).contains(&r) || !num.is_valid(i, j) {
                    continue;
                }
                worst = worst.max((num.get(i, j) - omega.get(i, j)).abs() / omega.get(i, j));
            }
        }
        assert!(worst < 0.01, "worst rel err {worst}");
    }

    #[test]
    fn regularized_circulation_is_non_integer() {
        let model = AlphaModel::new(1.0);
        let g = square(513, 2.5);
        let (v, _) = regularize_flow(&model, &g).unwrap();
        let lp = Loop::circle((0.0, 0.0), 1.0, 256).unwrap();
        let c = circulation(&v, &lp).unwrap();
        assert!((c - 0.5).abs() < 1e-2, "c={c}");
        assert!((c - c.round()).abs() > 0.05);
    }

    #[test]
    fn shifted_laplacian_identical_to_unshifted() {
        let g = Grid2D::new(9, 9, -4.0, -4.0, 1.0, 1.0).unwrap();
        let rho = ScalarField2D::from_fn(g, |x, y| (x * x + y * y) / 3.0).unwrap();
        let base = ops::laplacian(&rho);
        for c in [0.1, 1.0, 10.0] {
            let shifted = ops::laplacian(&shift_density(&rho, c).unwrap());
            let mut worst = 0.0f64;
            for k in 0..g.len() {
                if base.mask()[k] {
                    worst = worst.max((shifted.values()[k] - base.values()[k]).abs());
                }
            }
            assert!(worst <= 1e-14, "c={c}: {worst}");
        }
    }

    #[test]
    fn shift_keeps_minimum_location_and_tames_u() {
        let g = square(257, 1.0);
        let rho = ScalarField2D::from_fn(g, |x, y| x * x + y * y).unwrap();
        let shifted = shift_density(&rho, 0.1).unwrap();
        let argmin = |f: &ScalarField2D| {
            (0..g.len())
                .min_by(|&a, &b| f.values()[a].partial_cmp(&f.values()[b]).unwrap())
                .unwrap()
        };
        assert_eq!(argmin(&rho), argmin(&shifted));
        // |u~| = r / (r^2 + rho0) stays finite where u diverged
        let r = 0.01;
        let expect: f64 = r / (r * r + 0.1);
        assert!((expect - 0.0999).abs() < 1e-3);
    }

    #[test]
    fn penalty_core_value_and_scaling() {
        let mut model = AlphaModel::new(1.0);
        model.lambda = 1.0;
        let v = penalty_balance_at_core(&model, 0.1).unwrap();
        assert!((v - 1.6).abs() < 1e-12, "v={v}");
        model.lambda = 2.0;
        let v2 = penalty_balance_at_core(&model, 0.1).unwrap();
        assert!((v2 - 2.0 * v).abs() < 1e-12);
    }

    #[test]
    fn penalty_rejects_degenerate_models() {
        let mut m = AlphaModel::new(0.0);
        m.lambda = 1.0;
        assert!(matches!(
            penalty_balance_at_core(&m, 0.1),
            Err(Error::DegenerateModel(_))
        ));
        let m2 = AlphaModel::new(1.0); // lambda = 0
        assert!(matches!(
            penalty_balance_at_core(&m2, 0.1),
            Err(Error::DegenerateModel(_))
        ));
        let mut m3 = AlphaModel::new(1.0);
        m3.lambda = 1.0;
        assert!(penalty_balance_at_core(&m3, -0.1).is_err());
    }

    #[test]
    fn scan_reproduces_the_selector() {
        let rows = alpha_scan(
            &[0.5, 1.0, 1.5, 2.0],
            &square(257, 1.0),
            &RegularityConfig::default(),
            Annulus::centered(0.2, 1.0),
        )
        .unwrap();
        let classes: Vec<_> = rows.iter().map(|r| r.assessment.class).collect();
        assert_eq!(
            classes,
            vec![
                Regularity::Divergent,
                Regularity::FinitePositive,
                Regularity::Vanishing,
                Regularity::Vanishing,
            ]
        );
    }

    #[test]
    fn regularization_limits() {
        // |v~| / |v| = r^2/(r0^2+r^2) climbs towards 1; omega peaks at r=0
        let model = AlphaModel::new(1.0);
        let g = square(257, 3.0);
        let (v, omega) = regularize_flow(&model, &g).unwrap();
        let flow = alpha_fields(&model, &g);
        let vfull = flow.v.as_ref().unwrap();
        let mut prev = 0.0;
        for r in [0.5, 1.0, 2.0, 2.9] {
            let (i, j) = g.nearest(r, 0.0);
            let (ax, ay) = v.get(i, j);
            let (bx, by) = vfull.get(i, j);
            let ratio = ax.hypot(ay) / bx.hypot(by);
            assert!(ratio > prev && ratio < 1.0, "r={r} ratio={ratio}");
            prev = ratio;
        }
        let peak = omega
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let (i0, j0) = g.nearest(0.0, 0.0);
        assert_eq!(peak, omega.get(i0, j0));
    }
}
