//! Deterministic generators of test wave fields: vortex products, the
//! rotationally invariant family, plane waves, Gaussians, and the split
//! double zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField2D;
use crate::grid::Grid2D;

/// A zero of the vortex product with its multiplicity (negative winds the
/// conjugate way).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VortexZero {
    pub position: [f64; 2],
    pub multiplicity: i32,
}

/// Smooth non-vanishing envelope multiplying a vortex product.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Envelope {
    /// exp(-|q|^2 / (2 width^2))
    Gaussian { width: f64 },
    /// exp(kx * x + ky * y)
    Exponential { kx: f64, ky: f64 },
}

impl Envelope {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Envelope::Gaussian { width } => (-(x * x + y * y) / (2.0 * width * width)).exp(),
            Envelope::Exponential { kx, ky } => (kx * x + ky * y).exp(),
        }
    }
}

/// What to generate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SynthKind {
    /// psi = prod_k (z - z_k)^{m_k} * g(z)
    VortexProduct {
        zeros: Vec<VortexZero>,
        #[serde(default)]
        envelope: Option<Envelope>,
    },
    /// psi = r^{|alpha|} e^{i alpha phi}; multivalued for non-integer alpha,
    /// sampled on the atan2 branch.
    AlphaFamily { alpha: f64 },
    /// psi = e^{i k . q}
    PlaneWave { k: [f64; 2] },
    /// real positive psi = exp(-|q - c|^2 / (2 width^2))
    Gaussian { center: [f64; 2], width: f64 },
    /// psi = z^2 - epsilon^2: two simple zeros at (+-epsilon, 0)
    SplitDoubleZero { epsilon: f64 },
}

/// Full generator specification. Identical specs (seed included) produce
/// bitwise-identical fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub grid: Grid2D,
    /// Reserved for kinds with randomized placement; the current kinds are
    /// fully deterministic and ignore it.
    #[serde(default)]
    pub seed: u64,
    /// When set, zeros that would land exactly on a grid node are relocated
    /// by half a cell (with a warning) so the sampled density stays positive.
    #[serde(default)]
    pub avoid_node_zeros: bool,
}

/// Generated field plus any generation warnings.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub field: ComplexField2D,
    pub warnings: Vec<String>,
}

fn on_grid_node(grid: &Grid2D, x: f64, y: f64) -> bool {
    let tol = 1e-9;
    let fi = (x - grid.x0()) / grid.dx();
    let fj = (y - grid.y0()) / grid.dy();
    (fi - fi.round()).abs() < tol
        && (fj - fj.round()).abs() < tol
        && (0.0..=(grid.nx() - 1) as f64 + tol).contains(&fi)
        && (0.0..=(grid.ny() - 1) as f64 + tol).contains(&fj)
}

fn check_interior(grid: &Grid2D, x: f64, y: f64, what: &str) -> Result<()> {
    if !grid.contains_strict(x, y) {
        return Err(Error::InvalidParameter(format!(
            "{what} ({x}, {y}) must lie strictly inside the grid box"
        )));
    }
    Ok(())
}

/// Evaluates the spec on its grid.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    let grid = spec.grid;
    let mut warnings = Vec::new();

    let field = match &spec.kind {
        SynthKind::VortexProduct { zeros, envelope } => {
            let mut placed = Vec::with_capacity(zeros.len());
            for z in zeros {
                let (mut x, mut y) = (z.position[0], z.position[1]);
                check_interior(&grid, x, y, "vortex zero")?;
                if on_grid_node(&grid, x, y) {
                    if spec.avoid_node_zeros {
                        x += 0.5 * grid.dx();
                        y += 0.5 * grid.dy();
                        check_interior(&grid, x, y, "relocated vortex zero")?;
                        warnings.push(format!(
                            "zero at ({}, {}) coincides with a grid node; relocated to ({x}, {y})",
                            z.position[0], z.position[1]
                        ));
                    } else {
                        warnings.push(format!(
                            "zero at ({}, {}) sits exactly on a grid node; the sampled density \
                             vanishes there",
                            z.position[0], z.position[1]
                        ));
                    }
                }
                placed.push(VortexZero {
                    position: [x, y],
                    multiplicity: z.multiplicity,
                });
            }
            let env = *envelope;
            ComplexField2D::from_fn(grid, move |x, y| {
                let mut acc = Complex64::new(1.0, 0.0);
                for z in &placed {
                    let w = Complex64::new(x - z.position[0], y - z.position[1]);
                    let m = z.multiplicity;
                    acc *= if m >= 0 { w.powi(m) } else { w.conj().powi(-m) };
                }
                if let Some(e) = env {
                    acc *= e.eval(x, y);
                }
                acc
            })?
        }
        SynthKind::AlphaFamily { alpha } => {
            let a = *alpha;
            if !a.is_finite() {
                return Err(Error::InvalidParameter("alpha must be finite".into()));
            }
            ComplexField2D::from_fn(grid, move |x, y| {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    return Complex64::new(if a == 0.0 { 1.0 } else { 0.0 }, 0.0);
                }
                let modulus = r2.powf(a.abs() / 2.0);
                Complex64::from_polar(modulus, a * y.atan2(x))
            })?
        }
        SynthKind::PlaneWave { k } => {
            let (kx, ky) = (k[0], k[1]);
            ComplexField2D::from_fn(grid, move |x, y| {
                Complex64::from_polar(1.0, kx * x + ky * y)
            })?
        }
        SynthKind::Gaussian { center, width } => {
            let width_ok = *width > 0.0 && width.is_finite();
            if !width_ok {
                return Err(Error::InvalidParameter(format!(
                    "gaussian width must be positive, got {width}"
                )));
            }
            let (cx, cy, w2) = (center[0], center[1], 2.0 * width * width);
            ComplexField2D::from_fn(grid, move |x, y| {
                let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                Complex64::new((-d2 / w2).exp(), 0.0)
            })?
        }
        SynthKind::SplitDoubleZero { epsilon } => {
            let e = *epsilon;
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "epsilon must be positive, got {e}"
                )));
            }
            check_interior(&grid, e, 0.0, "split zero")?;
            check_interior(&grid, -e, 0.0, "split zero")?;
            for x in [e, -e] {
                if on_grid_node(&grid, x, 0.0) {
                    warnings.push(format!(
                        "split zero at ({x}, 0) sits exactly on a grid node"
                    ));
                }
            }
            ComplexField2D::from_fn(grid, move |x, y| {
                let z = Complex64::new(x, y);
                z * z - Complex64::new(e * e, 0.0)
            })?
        }
    };

    Ok(SynthOutput { field, warnings })
}
