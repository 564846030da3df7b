//! Closed polyline loops and line integrals of vector fields along them.

use crate::error::{Error, Result};
use crate::field::VectorField2D;
use crate::grid::Grid2D;

/// A closed polyline. The last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    vertices: Vec<[f64; 2]>,
    sampling_density: f64,
}

pub const DEFAULT_SAMPLING_DENSITY: f64 = 4.0;

impl Loop {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateLoop(vertices.len()));
        }
        for v in &vertices {
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::InvalidParameter(
                    "loop vertices must be finite".into(),
                ));
            }
        }
        Ok(Loop {
            vertices,
            sampling_density: DEFAULT_SAMPLING_DENSITY,
        })
    }

    /// Regular polygon approximation of a circle.
    pub fn circle(center: (f64, f64), radius: f64, n_vertices: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        let n = n_vertices.max(3);
        let vertices = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                [center.0 + radius * a.cos(), center.1 + radius * a.sin()]
            })
            .collect();
        Loop::new(vertices)
    }

    /// Sets the number of interpolation samples per grid cell of arc length.
    pub fn with_sampling_density(mut self, density: f64) -> Result<Self> {
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sampling density must be positive, got {density}"
            )));
        }
        self.sampling_density = density;
        Ok(self)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn sampling_density(&self) -> f64 {
        self.sampling_density
    }

    /// Densified sample chain, closed: first point repeated at the end.
    ///
    /// Each edge gets `ceil(len / min(dx, dy) * density)` sub-segments.
    /// Fails if any sample leaves the strict interior of the grid box.
    pub(crate) fn densify(&self, grid: &Grid2D) -> Result<Vec<[f64; 2]>> {
        let h = grid.dx().min(grid.dy());
        let m = self.vertices.len();
        let mut samples = Vec::new();
        for e in 0..m {
            let p0 = self.vertices[e];
            let p1 = self.vertices[(e + 1) % m];
            let len = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
            let n = ((len / h * self.sampling_density).ceil() as usize).max(1);
            for q in 0..n {
                let f = q as f64 / n as f64;
                let p = [p0[0] + (p1[0] - p0[0]) * f, p0[1] + (p1[1] - p0[1]) * f];
                if !grid.contains_strict(p[0], p[1]) {
                    return Err(Error::LoopOutsideGrid { x: p[0], y: p[1] });
                }
                samples.push(p);
            }
        }
        samples.push(self.vertices[0]);
        Ok(samples)
    }
}

/// Trapezoid line integral of `v . dq` along the densified loop.
///
/// The vector field is interpolated bilinearly; the potential behind it is
/// never interpolated directly, so phase-wrap hazards cannot enter here.
pub fn line_integral(v: &VectorField2D, lp: &Loop) -> Result<f64> {
    let samples = lp.densify(v.grid())?;
    let mut vals = Vec::with_capacity(samples.len());
    let mut offenders = Vec::new();
    let mut offender_count = 0usize;
    for p in &samples {
        match v.sample_bilinear(p[0], p[1]) {
            Ok(val) => vals.push(val),
            Err(Error::MaskedPath { .. }) => {
                offender_count += 1;
                if offenders.len() < 8 {
                    offenders.push((p[0], p[1]));
                }
                vals.push((0.0, 0.0));
            }
            Err(e) => return Err(e),
        }
    }
    if offender_count > 0 {
        return Err(Error::MaskedPath {
            count: offender_count,
            samples: offenders,
        });
    }
    let mut total = 0.0;
    for w in samples.windows(2).zip(vals.windows(2)) {
        let ([p0, p1], [v0, v1]) = w else { unreachable!() };
        let dqx = p1[0] - p0[0];
        let dqy = p1[1] - p0[1];
        total += 0.5 * ((v0.0 + v1.0) * dqx + (v0.1 + v1.1) * dqy);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField2D;
    use crate::grid::Grid2D;
    use std::f64::consts::TAU;

    fn grid257() -> Grid2D {
        Grid2D::centered_square(257, 1.0).unwrap()
    }

    #[test]
    fn winding_field_gives_two_pi() {
        let v = VectorField2D::from_fn(grid257(), |x, y| {
            let r2 = x * x + y * y;
            if r2 == 0.0 {
                (0.0, 0.0)
            } else {
                (-y / r2, x / r2)
            }
        })
        .unwrap();
        let lp = Loop::circle((0.0, 0.0), 0.9, 256)
            .unwrap()
            .with_sampling_density(8.0)
            .unwrap();
        let total = line_integral(&v, &lp).unwrap();
        assert!(
            (total - TAU).abs() / TAU < 1e-3,
            "total={total}, rel err {}",
            (total - TAU).abs() / TAU
        );
    }

    #[test]
    fn constant_field_integrates_to_zero() {
        let v = VectorField2D::from_fn(grid257(), |_, _| (0.7, -1.3)).unwrap();
        let lp = Loop::new(vec![[-0.5, -0.4], [0.6, -0.2], [0.3, 0.6], [-0.4, 0.5]]).unwrap();
        let total = line_integral(&v, &lp).unwrap();
        assert!(total.abs() < 1e-12, "total={total}");
    }

    #[test]
    fn regularized_vortex_circulation_radius_two() {
        // |v~| = r / (r0^2 + r^2) tangential, r0 = 1: integral over circle R
        // is 2 pi R^2 / (1 + R^2) = 2 pi * 0.8 at R = 2.
        let g = Grid2D::centered_square(257, 2.5).unwrap();
        let v = VectorField2D::from_fn(g, |x, y| {
            let d = 1.0 + x * x + y * y;
            (-y / d, x / d)
        })
        .unwrap();
        let lp = Loop::circle((0.0, 0.0), 2.0, 256)
            .unwrap()
            .with_sampling_density(8.0)
            .unwrap();
        let total = line_integral(&v, &lp).unwrap();
        let expected = TAU * 0.8;
        assert!(
            (total - expected).abs() / expected < 5e-3,
            "total={total} expected={expected}"
        );
    }

    #[test]
    fn chord_split_is_additive() {
        // quad split along the diagonal A-C: the chord is traversed once in
        // each direction with identical sample counts, so it cancels.
        let v = VectorField2D::from_fn(grid257(), |x, y| (x * y, x - y * y)).unwrap();
        let (a, b, c, d) = ([-0.6, -0.5], [0.6, -0.45], [0.55, 0.5], [-0.4, 0.52]);
        let full = Loop::new(vec![a, b, c, d]).unwrap();
        let tri1 = Loop::new(vec![a, b, c]).unwrap();
        let tri2 = Loop::new(vec![a, c, d]).unwrap();
        let whole = line_integral(&v, &full).unwrap();
        let split = line_integral(&v, &tri1).unwrap() + line_integral(&v, &tri2).unwrap();
        assert!(
            (whole - split).abs() <= 1e-10 * whole.abs().max(1.0),
            "{whole} vs {split}"
        );
    }

    #[test]
    fn masked_path_reports_offenders() {
        let g = Grid2D::new(9, 9, -1.0, -1.0, 0.25, 0.25).unwrap();
        let mut mask = vec![true; 81];
        mask[g.idx(4, 4)] = false;
        let v =
            VectorField2D::with_mask(g, vec![1.0; 81], vec![0.0; 81], mask).unwrap();
        let lp = Loop::new(vec![[-0.5, -0.1], [0.5, -0.1], [0.0, 0.12]]).unwrap();
        match line_integral(&v, &lp) {
            Err(Error::MaskedPath { count, samples }) => {
                assert!(count > 0 && !samples.is_empty());
            }
            other => panic!("expected masked-path error, got {other:?}"),
        }
    }

    #[test]
    fn loop_outside_grid_is_rejected() {
        let v = VectorField2D::from_fn(grid257(), |_, _| (1.0, 0.0)).unwrap();
        let lp = Loop::new(vec![[-0.5, -0.5], [1.5, 0.0], [0.0, 0.5]]).unwrap();
        assert!(matches!(
            line_integral(&v, &lp),
            Err(Error::LoopOutsideGrid { .. })
        ));
    }
}
