//! Uniform rectangular grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform rectangular grid.
///
/// Point (i, j) sits at (x0 + i*dx, y0 + j*dy). Flat storage is row-major
/// with the x index fastest: `k = j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid2D", into = "RawGrid2D")]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawGrid2D {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
}

impl TryFrom<RawGrid2D> for Grid2D {
    type Error = Error;

    fn try_from(raw: RawGrid2D) -> Result<Self> {
        Grid2D::new(raw.nx, raw.ny, raw.x0, raw.y0, raw.dx, raw.dy)
    }
}

impl From<Grid2D> for RawGrid2D {
    fn from(g: Grid2D) -> Self {
        RawGrid2D {
            nx: g.nx,
            ny: g.ny,
            x0: g.x0,
            y0: g.y0,
            dx: g.dx,
            dy: g.dy,
        }
    }
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, dx: f64, dy: f64) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite())
            || !x0.is_finite()
            || !y0.is_finite()
        {
            return Err(Error::InvalidSpacing { dx, dy });
        }
        Ok(Grid2D {
            nx,
            ny,
            x0,
            y0,
            dx,
            dy,
        })
    }

    /// Square grid of `n` points per side covering [-half, half]^2.
    pub fn centered_square(n: usize, half_extent: f64) -> Result<Self> {
        if half_extent <= 0.0 || !half_extent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half_extent must be positive, got {half_extent}"
            )));
        }
        if n < 3 {
            return Err(Error::GridTooSmall { nx: n, ny: n });
        }
        let h = 2.0 * half_extent / (n - 1) as f64;
        Grid2D::new(n, n, -half_extent, -half_extent, h, h)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest coordinate covered along x.
    pub fn x_max(&self) -> f64 {
        self.x0 + (self.nx - 1) as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + (self.ny - 1) as f64 * self.dy
    }

    /// Flat index of point (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Inverse of [`Grid2D::idx`].
    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    #[inline]
    pub fn pos(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x(i), self.y(j))
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Strictly inside the bounding box (boundary lines excluded).
    pub fn contains_strict(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x_max() && y > self.y0 && y < self.y_max()
    }

    /// Cell containing (x, y) plus local coordinates (s, t) in [0, 1].
    ///
    /// The returned cell index is clamped to the last interior cell so points
    /// on the far edges still resolve.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize, f64, f64) {
        let fi = ((x - self.x0) / self.dx).floor();
        let fj = ((y - self.y0) / self.dy).floor();
        let i = (fi.max(0.0) as usize).min(self.nx - 2);
        let j = (fj.max(0.0) as usize).min(self.ny - 2);
        let s = (x - self.x(i)) / self.dx;
        let t = (y - self.y(j)) / self.dy;
        (i, j, s, t)
    }

    /// Grid point closest to (x, y).
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let i = ((x - self.x0) / self.dx).round().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = ((y - self.y0) / self.dy).round().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }
}
