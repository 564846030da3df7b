//! Scalar, complex and vector fields on a uniform grid.
//!
//! All constructors reject non-finite entries: the formulas this crate
//! studies blow up exactly where naive evaluation produces infinities, and
//! those points must surface as explicit masks, never as array contents.
//! Masked slots carry no value; they are normalised to 0.0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

fn check_len(grid: &Grid2D, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

fn check_finite(values: &[f64], mask: Option<&[bool]>) -> Result<()> {
    for (k, v) in values.iter().enumerate() {
        let masked_out = mask.map(|m| !m[k]).unwrap_or(false);
        if !masked_out && !v.is_finite() {
            return Err(Error::NonFinite { index: k });
        }
    }
    Ok(())
}

fn zero_masked(values: &mut [f64], mask: &[bool]) {
    for (v, &ok) in values.iter_mut().zip(mask) {
        if !ok {
            *v = 0.0;
        }
    }
}

/// Summary statistics of the absolute value over a point subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub count: usize,
}

fn stats_from(iter: impl Iterator<Item = f64>) -> Option<FieldStats> {
    let mut max_abs = 0.0f64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for v in iter {
        let a = v.abs();
        max_abs = max_abs.max(a);
        sum += a;
        count += 1;
    }
    (count > 0).then(|| FieldStats {
        max_abs,
        mean_abs: sum / count as f64,
        count,
    })
}

/// A real scalar field with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: Grid2D,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarField2D {
    /// Fully valid field from raw values.
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite(&values, None)?;
        let mask = vec![true; values.len()];
        Ok(ScalarField2D { grid, values, mask })
    }

    /// Field with an explicit validity mask; masked slots are zeroed.
    pub fn with_mask(grid: Grid2D, mut values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_len(&grid, mask.len())?;
        check_finite(&values, Some(&mask))?;
        zero_masked(&mut values, &mask);
        Ok(ScalarField2D { grid, values, mask })
    }

    /// Skips the finiteness scan; callers guarantee masked slots are zeroed.
    pub(crate) fn from_parts(grid: Grid2D, values: Vec<f64>, mask: Vec<bool>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert_eq!(mask.len(), grid.len());
        debug_assert!(values
            .iter()
            .zip(&mask)
            .all(|(v, &ok)| if ok { v.is_finite() } else { *v == 0.0 }));
        ScalarField2D { grid, values, mask }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                values[grid.idx(i, j)] = f(grid.x(i), grid.y(j));
            }
        }
        ScalarField2D::new(grid, values)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Result<Self> {
        ScalarField2D::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[self.grid.idx(i, j)]
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &ok)| ok)
            .map(|(v, _)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Stats over valid points selected by a position predicate.
    pub fn stats_where(&self, pred: impl Fn(f64, f64) -> bool) -> Option<FieldStats> {
        stats_from((0..self.grid.len()).filter_map(|k| {
            let (i, j) = self.grid.ij(k);
            let (x, y) = self.grid.pos(i, j);
            (self.mask[k] && pred(x, y)).then(|| self.values[k])
        }))
    }

    /// Stats over valid points with `rmin <= |q - center| <= rmax`.
    pub fn annulus_stats(&self, center: (f64, f64), rmin: f64, rmax: f64) -> Option<FieldStats> {
        self.stats_where(|x, y| {
            let r = (x - center.0).hypot(y - center.1);
            (rmin..=rmax).contains(&r)
        })
    }

    pub fn interior_stats(&self) -> Option<FieldStats> {
        stats_from((0..self.grid.len()).filter_map(|k| {
            let (i, j) = self.grid.ij(k);
            (self.mask[k] && !self.grid.is_boundary(i, j)).then(|| self.values[k])
        }))
    }

    /// Bilinear interpolation; fails outside the box or on a masked corner.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Result<f64> {
        let (i, j, s, t) = sample_cell(&self.grid, x, y)?;
        let k = self.grid.idx(i, j);
        let (k10, k01, k11) = (k + 1, k + self.grid.nx(), k + self.grid.nx() + 1);
        if !(self.mask[k] && self.mask[k10] && self.mask[k01] && self.mask[k11]) {
            return Err(Error::MaskedPath {
                count: 1,
                samples: vec![(x, y)],
            });
        }
        Ok(bilinear(
            self.values[k],
            self.values[k10],
            self.values[k01],
            self.values[k11],
            s,
            t,
        ))
    }
}

/// A complex field stored as split real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: Grid2D,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexField2D {
    pub fn new(grid: Grid2D, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        check_len(&grid, re.len())?;
        check_len(&grid, im.len())?;
        check_finite(&re, None)?;
        check_finite(&im, None)?;
        Ok(ComplexField2D { grid, re, im })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut re = vec![0.0; grid.len()];
        let mut im = vec![0.0; grid.len()];
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let z = f(grid.x(i), grid.y(j));
                let k = grid.idx(i, j);
                re[k] = z.re;
                im[k] = z.im;
            }
        }
        ComplexField2D::new(grid, re, im)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = self.grid.idx(i, j);
        Complex64::new(self.re[k], self.im[k])
    }

    #[inline]
    pub fn at(&self, k: usize) -> Complex64 {
        Complex64::new(self.re[k], self.im[k])
    }

    /// Bilinear interpolation of re and im separately (never of the phase).
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Result<Complex64> {
        let (i, j, s, t) = sample_cell(&self.grid, x, y)?;
        let k = self.grid.idx(i, j);
        let (k10, k01, k11) = (k + 1, k + self.grid.nx(), k + self.grid.nx() + 1);
        let re = bilinear(self.re[k], self.re[k10], self.re[k01], self.re[k11], s, t);
        let im = bilinear(self.im[k], self.im[k10], self.im[k01], self.im[k11], s, t);
        Ok(Complex64::new(re, im))
    }
}

/// A 2-vector field with a shared validity mask for both components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2D {
    grid: Grid2D,
    vx: Vec<f64>,
    vy: Vec<f64>,
    mask: Vec<bool>,
}

impl VectorField2D {
    pub fn new(grid: Grid2D, vx: Vec<f64>, vy: Vec<f64>) -> Result<Self> {
        let mask = vec![true; grid.len()];
        VectorField2D::with_mask(grid, vx, vy, mask)
    }

    pub fn with_mask(
        grid: Grid2D,
        mut vx: Vec<f64>,
        mut vy: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self> {
        check_len(&grid, vx.len())?;
        check_len(&grid, vy.len())?;
        check_len(&grid, mask.len())?;
        check_finite(&vx, Some(&mask))?;
        check_finite(&vy, Some(&mask))?;
        zero_masked(&mut vx, &mask);
        zero_masked(&mut vy, &mask);
        Ok(VectorField2D { grid, vx, vy, mask })
    }

    pub(crate) fn from_parts(grid: Grid2D, vx: Vec<f64>, vy: Vec<f64>, mask: Vec<bool>) -> Self {
        debug_assert_eq!(vx.len(), grid.len());
        debug_assert_eq!(vy.len(), grid.len());
        debug_assert_eq!(mask.len(), grid.len());
        VectorField2D { grid, vx, vy, mask }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> (f64, f64)) -> Result<Self> {
        let mut vx = vec![0.0; grid.len()];
        let mut vy = vec![0.0; grid.len()];
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let k = grid.idx(i, j);
                let (a, b) = f(grid.x(i), grid.y(j));
                vx[k] = a;
                vy[k] = b;
            }
        }
        VectorField2D::new(grid, vx, vy)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn vx(&self) -> &[f64] {
        &self.vx
    }

    pub fn vy(&self) -> &[f64] {
        &self.vy
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.grid.idx(i, j);
        (self.vx[k], self.vy[k])
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[self.grid.idx(i, j)]
    }

    /// Bilinear interpolation of both components.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (i, j, s, t) = sample_cell(&self.grid, x, y)?;
        let k = self.grid.idx(i, j);
        let (k10, k01, k11) = (k + 1, k + self.grid.nx(), k + self.grid.nx() + 1);
        if !(self.mask[k] && self.mask[k10] && self.mask[k01] && self.mask[k11]) {
            return Err(Error::MaskedPath {
                count: 1,
                samples: vec![(x, y)],
            });
        }
        Ok((
            bilinear(self.vx[k], self.vx[k10], self.vx[k01], self.vx[k11], s, t),
            bilinear(self.vy[k], self.vy[k10], self.vy[k01], self.vy[k11], s, t),
        ))
    }
}

#[inline]
fn bilinear(f00: f64, f10: f64, f01: f64, f11: f64, s: f64, t: f64) -> f64 {
    f00 * (1.0 - s) * (1.0 - t) + f10 * s * (1.0 - t) + f01 * (1.0 - s) * t + f11 * s * t
}

fn sample_cell(grid: &Grid2D, x: f64, y: f64) -> Result<(usize, usize, f64, f64)> {
    if !(x >= grid.x0() && x <= grid.x_max() && y >= grid.y0() && y <= grid.y_max()) {
        return Err(Error::SampleOutsideGrid { x, y });
    }
    let (i, j, s, t) = grid.cell_of(x, y);
    Ok((i, j, s, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(5, 5, 0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_wrong_length_and_nonfinite() {
        assert!(matches!(
            ScalarField2D::new(grid(), vec![0.0; 7]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut v = vec![0.0; 25];
        v[13] = f64::INFINITY;
        assert!(matches!(
            ScalarField2D::new(grid(), v),
            Err(Error::NonFinite { index: 13 })
        ));
    }

    #[test]
    fn masked_slots_may_be_nonfinite_on_input_and_are_zeroed() {
        let mut v = vec![1.0; 25];
        v[3] = f64::NAN;
        let mut m = vec![true; 25];
        m[3] = false;
        let f = ScalarField2D::with_mask(grid(), v, m).unwrap();
        assert_eq!(f.values()[3], 0.0);
        assert!(!f.mask()[3]);
    }

    #[test]
    fn bilinear_is_exact_on_bilinear_functions() {
        let f = ScalarField2D::from_fn(grid(), |x, y| 2.0 + 3.0 * x - y + 0.5 * x * y).unwrap();
        for &(x, y) in &[(0.3, 0.7), (1.5, 2.25), (3.9, 0.1)] {
            let exact = 2.0 + 3.0 * x - y + 0.5 * x * y;
            assert!((f.sample_bilinear(x, y).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn sampling_respects_masks_and_bounds() {
        let mut m = vec![true; 25];
        m[grid().idx(2, 2)] = false;
        let f = ScalarField2D::with_mask(grid(), vec![1.0; 25], m).unwrap();
        assert!(f.sample_bilinear(2.5, 2.5).is_err());
        assert!(f.sample_bilinear(0.5, 0.5).is_ok());
        assert!(matches!(
            f.sample_bilinear(-0.1, 0.5),
            Err(Error::SampleOutsideGrid { .. })
        ));
    }

    #[test]
    fn complex_sampling_interpolates_parts() {
        let f = ComplexField2D::from_fn(grid(), Complex64::new).unwrap();
        let z = f.sample_bilinear(1.25, 3.5).unwrap();
        assert!((z.re - 1.25).abs() < 1e-14 && (z.im - 3.5).abs() < 1e-14);
    }

    #[test]
    fn annulus_stats_counts_points() {
        let f = ScalarField2D::from_fn(grid(), |_, _| 2.0).unwrap();
        let s = f.annulus_stats((2.0, 2.0), 0.5, 1.2).unwrap();
        assert_eq!(s.count, 4); // the four axis neighbours of the centre
        assert_eq!(s.max_abs, 2.0);
        assert_eq!(s.mean_abs, 2.0);
    }
}
