//! JSON field-file formats.
//!
//! Complex fields: `{"grid": {...}, "re": [...], "im": [...]}`; scalar
//! fields: `{"grid": {...}, "values": [...]}` with an optional `"mask"`
//! array; vector fields carry `"vx"`, `"vy"` and `"mask"`. Arrays are
//! row-major with the x index fastest. Non-finite tokens are rejected both
//! by the JSON grammar and by field construction.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::Result;
use crate::field::{ComplexField2D, ScalarField2D, VectorField2D};
use crate::flow::FlowFields;
use crate::grid::Grid2D;
use crate::loops::Loop;

#[derive(Serialize, Deserialize)]
struct ComplexFieldFile {
    grid: Grid2D,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScalarFieldFile {
    grid: Grid2D,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct VectorFieldFile {
    grid: Grid2D,
    vx: Vec<f64>,
    vy: Vec<f64>,
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct FlowBundleFile {
    eps_rho: f64,
    rho: ScalarFieldFile,
    theta: ScalarFieldFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<VectorFieldFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<VectorFieldFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<ScalarFieldFile>,
}

#[derive(Serialize, Deserialize)]
struct LoopFile {
    vertices: Vec<[f64; 2]>,
    #[serde(default = "default_density")]
    sampling_density: f64,
}

fn default_density() -> f64 {
    crate::loops::DEFAULT_SAMPLING_DENSITY
}

fn scalar_to_file(f: &ScalarField2D) -> ScalarFieldFile {
    let all_valid = f.mask().iter().all(|&b| b);
    ScalarFieldFile {
        grid: *f.grid(),
        values: f.values().to_vec(),
        mask: (!all_valid).then(|| f.mask().to_vec()),
    }
}

fn scalar_from_file(file: ScalarFieldFile) -> Result<ScalarField2D> {
    match file.mask {
        Some(mask) => ScalarField2D::with_mask(file.grid, file.values, mask),
        None => ScalarField2D::new(file.grid, file.values),
    }
}

fn vector_to_file(f: &VectorField2D) -> VectorFieldFile {
    VectorFieldFile {
        grid: *f.grid(),
        vx: f.vx().to_vec(),
        vy: f.vy().to_vec(),
        mask: f.mask().to_vec(),
    }
}

fn vector_from_file(file: VectorFieldFile) -> Result<VectorField2D> {
    VectorField2D::with_mask(file.grid, file.vx, file.vy, file.mask)
}

pub fn read_complex_field(reader: impl Read) -> Result<ComplexField2D> {
    let file: ComplexFieldFile = serde_json::from_reader(reader)?;
    ComplexField2D::new(file.grid, file.re, file.im)
}

pub fn write_complex_field(writer: impl Write, field: &ComplexField2D) -> Result<()> {
    let file = ComplexFieldFile {
        grid: *field.grid(),
        re: field.re().to_vec(),
        im: field.im().to_vec(),
    };
    serde_json::to_writer(writer, &file)?;
    Ok(())
}

pub fn read_scalar_field(reader: impl Read) -> Result<ScalarField2D> {
    scalar_from_file(serde_json::from_reader(reader)?)
}

pub fn write_scalar_field(writer: impl Write, field: &ScalarField2D) -> Result<()> {
    serde_json::to_writer(writer, &scalar_to_file(field))?;
    Ok(())
}

/// Reads a JSON array of loop objects.
pub fn read_loops(reader: impl Read) -> Result<Vec<Loop>> {
    let files: Vec<LoopFile> = serde_json::from_reader(reader)?;
    files
        .into_iter()
        .map(|f| Loop::new(f.vertices)?.with_sampling_density(f.sampling_density))
        .collect()
}

pub fn write_loops(writer: impl Write, loops: &[Loop]) -> Result<()> {
    let files: Vec<LoopFile> = loops
        .iter()
        .map(|l| LoopFile {
            vertices: l.vertices().to_vec(),
            sampling_density: l.sampling_density(),
        })
        .collect();
    serde_json::to_writer(writer, &files)?;
    Ok(())
}

/// Serializes a flow bundle as a JSON object of named fields.
pub fn write_flow_bundle(writer: impl Write, flow: &FlowFields) -> Result<()> {
    let file = FlowBundleFile {
        eps_rho: flow.eps_rho,
        rho: scalar_to_file(&flow.rho),
        theta: scalar_to_file(&flow.theta),
        v: flow.v.as_ref().map(vector_to_file),
        u: flow.u.as_ref().map(vector_to_file),
        q: flow.q.as_ref().map(scalar_to_file),
    };
    serde_json::to_writer(writer, &file)?;
    Ok(())
}

pub fn read_flow_bundle(reader: impl Read) -> Result<FlowFields> {
    let file: FlowBundleFile = serde_json::from_reader(reader)?;
    Ok(FlowFields {
        rho: scalar_from_file(file.rho)?,
        theta: scalar_from_file(file.theta)?,
        v: file.v.map(vector_from_file).transpose()?,
        u: file.u.map(vector_from_file).transpose()?,
        q: file.q.map(scalar_from_file).transpose()?,
        eps_rho: file.eps_rho,
    })
}
