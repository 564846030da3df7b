//! Radial binning of scalar fields into plot-ready CSV profiles.

use std::io::Write;

use flowlab_core::error::{Error, Result};
use flowlab_core::field::ScalarField2D;

/// One radial bin: centre radius plus the value statistics inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBin {
    pub r: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Bins valid points by distance from `center` into `nbins` equal-width
/// bins spanning the largest circle inscribed in the grid box, so no bin is
/// partially covered. Empty bins are skipped.
pub fn radial_profile(
    field: &ScalarField2D,
    center: (f64, f64),
    nbins: usize,
) -> Result<Vec<RadialBin>> {
    let grid = field.grid();
    if !grid.contains_strict(center.0, center.1) {
        return Err(Error::InvalidParameter(format!(
            "profile centre ({}, {}) must lie inside the grid",
            center.0, center.1
        )));
    }
    if nbins == 0 {
        return Err(Error::InvalidParameter("profile needs at least one bin".into()));
    }
    let rmax = (center.0 - grid.x0())
        .min(grid.x_max() - center.0)
        .min(center.1 - grid.y0())
        .min(grid.y_max() - center.1);
    let width = rmax / nbins as f64;

    let mut sum = vec![0.0f64; nbins];
    let mut count = vec![0usize; nbins];
    let mut min = vec![f64::INFINITY; nbins];
    let mut max = vec![f64::NEG_INFINITY; nbins];
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if !field.is_valid(i, j) {
                continue;
            }
            let (x, y) = grid.pos(i, j);
            let r = (x - center.0).hypot(y - center.1);
            if r > rmax {
                continue;
            }
            let b = ((r / width) as usize).min(nbins - 1);
            let v = field.get(i, j);
            sum[b] += v;
            count[b] += 1;
            min[b] = min[b].min(v);
            max[b] = max[b].max(v);
        }
    }

    Ok((0..nbins)
        .filter(|&b| count[b] > 0)
        .map(|b| RadialBin {
            r: (b as f64 + 0.5) * width,
            mean: sum[b] / count[b] as f64,
            min: min[b],
            max: max[b],
        })
        .collect())
}

/// Writes `r,mean,min,max` rows.
pub fn write_profile_csv(mut w: impl Write, bins: &[RadialBin]) -> Result<()> {
    writeln!(w, "r,mean,min,max")?;
    for b in bins {
        writeln!(w, "{},{},{},{}", b.r, b.mean, b.min, b.max)?;
    }
    Ok(())
}
