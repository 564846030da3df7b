//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use sha2::{Digest, Sha256};

use flowlab_core::alpha::{
    alpha_scan, penalty_balance_at_core, regularize_flow, AlphaModel, Annulus,
};
use flowlab_core::circle::{density_drift, flow_stationary_check, fourier_project};
use flowlab_core::error::Error as CoreError;
use flowlab_core::flow::{default_eps_rho, kinematic_fields, polar_decompose};
use flowlab_core::grid::Grid2D;
use flowlab_core::vortex::{
    circulation, classify_regularity, detect_nodes, loop_winding, Regularity, RegularityConfig,
};
use flowlab_core::{io as fio, ops};

use crate::args::*;
use crate::profile::{radial_profile, write_profile_csv};
use crate::report::*;

/// Reads a whole input, with '-' meaning standard input.
fn read_input(path: &str) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        std::io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut buf))
            .with_context(|| format!("reading {path}"))?;
    }
    Ok(buf)
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_output(out: &Option<PathBuf>, payload: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            w.write_all(payload)?;
            w.flush()?;
        }
        None => {
            std::io::stdout().write_all(payload)?;
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(out: &Option<PathBuf>, report: &T) -> anyhow::Result<()> {
    let mut payload = serde_json::to_vec_pretty(report)?;
    payload.push(b'\n');
    write_output(out, &payload)
}

fn write_csv(path: &Path, bins: &[crate::profile::RadialBin]) -> anyhow::Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    write_profile_csv(&mut w, bins)?;
    w.flush()?;
    Ok(())
}

fn pair(values: &[f64]) -> (f64, f64) {
    (values[0], values[1])
}

/// Numerical conditions of the data, as opposed to malformed input. Inside
/// analyze the per-loop ones degrade to warnings; anywhere else they map to
/// exit code 3.
fn is_numerical(err: &CoreError) -> bool {
    matches!(
        err,
        CoreError::NonIntegerWinding { .. }
            | CoreError::ZeroOnPath { .. }
            | CoreError::MaskedPath { .. }
            | CoreError::ResidualWinding { .. }
            | CoreError::EmptyRegion(_)
    )
}

pub fn analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let field_bytes = read_input(&args.field)?;
    let psi = fio::read_complex_field(field_bytes.as_slice())?;
    let mut warnings = Vec::new();

    let flow0 = polar_decompose(&psi, 0.0);
    let eps_rho = args.eps_rho.unwrap_or_else(|| default_eps_rho(&flow0.rho));
    let flow = kinematic_fields(polar_decompose(&psi, eps_rho));

    let cfg = RegularityConfig {
        delta: args.delta,
        ..Default::default()
    };
    let nodes: Vec<_> = detect_nodes(&psi)
        .iter()
        .map(|n| classify_regularity(&flow.rho, n, &cfg))
        .collect();
    for n in &nodes {
        if matches!(n.regularity, Some(Regularity::Indeterminate)) {
            warnings.push(format!(
                "node at ({}, {}) has an indeterminate regularity fit",
                n.position.0, n.position.1
            ));
        }
        if !n.position_refined {
            warnings.push(format!(
                "node in cell {:?} used the cell centre (zero-curve refinement failed)",
                n.cell
            ));
        }
    }

    let (loop_results, loops_digest) = match &args.loops {
        Some(path) => {
            let bytes = read_input(path)?;
            let loops = fio::read_loops(bytes.as_slice())?;
            let mut results = Vec::new();
            for (index, lp) in loops.iter().enumerate() {
                let winding = loop_winding(&psi, lp);
                let circ = circulation(flow.v.as_ref().expect("kinematics computed"), lp);
                match (winding, circ) {
                    (Ok(w), Ok(c)) => results.push(LoopResult {
                        index,
                        winding: Some(w),
                        circulation: Some(c),
                        error: None,
                    }),
                    (w, c) => {
                        // numerical trouble on one loop degrades to a warning;
                        // anything else (e.g. a loop outside the grid) is a
                        // malformed request and aborts
                        let err = w.err().or_else(|| c.err()).expect("one side failed");
                        if !is_numerical(&err) {
                            return Err(err.into());
                        }
                        warnings.push(format!("loop {index}: {err}"));
                        results.push(LoopResult {
                            index,
                            winding: None,
                            circulation: None,
                            error: Some(err.to_string()),
                        });
                    }
                }
            }
            (results, Some(digest(&bytes)))
        }
        None => (Vec::new(), None),
    };

    let balance = flowlab_core::alpha::balance_residual(&flow, None, None)?;

    let report = AnalyzeReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "analyze",
        input: AnalyzeInput {
            field_digest: digest(&field_bytes),
            loops_digest,
        },
        parameters: AnalyzeParams {
            eps_rho,
            regularity: cfg,
        },
        grid: *psi.grid(),
        nodes,
        regularity_summary: RegularitySummary::default(),
        loops: loop_results,
        balance: BalanceStats {
            max_abs: balance.max_abs,
            mean_abs: balance.mean_abs,
            count: balance.count,
        },
        warnings,
    };
    let report = AnalyzeReport {
        regularity_summary: RegularitySummary::tally(&report.nodes),
        ..report
    };

    if let Some(path) = &args.flow_out {
        let mut w = BufWriter::new(File::create(path)?);
        fio::write_flow_bundle(&mut w, &flow)?;
        w.flush()?;
    }
    if let Some(path) = &args.rho_profile {
        let center = pair(&args.profile_center);
        let bins = radial_profile(&flow.rho, center, args.profile_bins)?;
        write_csv(path, &bins)?;
    }

    write_json(&args.out, &report)
}

pub fn run_alpha_scan(args: &AlphaScanArgs) -> anyhow::Result<()> {
    let grid = Grid2D::centered_square(args.grid_n, args.half_extent)?;
    let cfg = RegularityConfig {
        delta: args.delta,
        ..Default::default()
    };
    let (rmin, rmax) = pair(&args.annulus);
    let annulus = Annulus::centered(rmin, rmax);
    let rows = alpha_scan(&args.alphas, &grid, &cfg, annulus)?;
    let report = AlphaScanReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "alpha-scan",
        parameters: AlphaScanParams {
            alphas: args.alphas.clone(),
            grid_n: args.grid_n,
            half_extent: args.half_extent,
            annulus: (rmin, rmax),
            regularity: cfg,
        },
        rows: rows
            .into_iter()
            .map(|r| AlphaScanRowOut {
                alpha: r.alpha,
                class: r.assessment.class,
                alpha_fit: r.assessment.alpha_fit,
                fit_residual: r.assessment.fit_residual,
                delta_rho_estimate: r.assessment.delta_rho_estimate,
                balance_max_abs: r.balance_max_abs,
                balance_mean_abs: r.balance_mean_abs,
            })
            .collect(),
        warnings: Vec::new(),
    };
    write_json(&args.out, &report)
}

pub fn regularize(args: &RegularizeArgs) -> anyhow::Result<()> {
    let model: AlphaModel = serde_json::from_slice(&read_input(&args.model)?)
        .map_err(CoreError::from)?;
    let grid = Grid2D::centered_square(args.grid_n, args.half_extent)?;
    let (v, omega) = regularize_flow(&model, &grid)?;
    let mut warnings = Vec::new();

    let num = ops::curl2d(&v);
    let (ann_lo, ann_hi) = pair(&args.curl_annulus);
    let mut max_rel_err = 0.0f64;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if !num.is_valid(i, j) {
                continue;
            }
            let (x, y) = grid.pos(i, j);
            let r = x.hypot(y);
            if (ann_lo..=ann_hi).contains(&r) && omega.get(i, j) != 0.0 {
                max_rel_err =
                    max_rel_err.max((num.get(i, j) - omega.get(i, j)).abs() / omega.get(i, j).abs());
            }
        }
    }

    let mut circulations = Vec::new();
    for &radius in &args.radii {
        let lp = flowlab_core::loops::Loop::circle((0.0, 0.0), radius, 256)?;
        let value = circulation(&v, &lp)?;
        let expected = model.alpha * radius * radius / (model.r0 * model.r0 + radius * radius);
        let rel_err = if expected != 0.0 {
            (value - expected).abs() / expected.abs()
        } else {
            value.abs()
        };
        circulations.push(CirculationRow {
            radius,
            value,
            expected,
            rel_err,
        });
    }

    // penalty balance at the core: rho~(0) = rho(0) + rho0 = rho0 for the
    // family, so it needs a positive shift and an active penalty
    let (penalty_core, penalty_skipped) = if model.lambda > 0.0 && model.alpha != 0.0 {
        if model.rho0 > 0.0 {
            (Some(penalty_balance_at_core(&model, model.rho0)?), None)
        } else {
            (
                None,
                Some("rho0 = 0 leaves no core density; set a positive shift".to_string()),
            )
        }
    } else {
        (
            None,
            Some("penalty inactive (needs lambda > 0 and alpha != 0)".to_string()),
        )
    };
    if let Some(reason) = &penalty_skipped {
        warnings.push(format!("penalty balance skipped: {reason}"));
    }

    if let Some(path) = &args.omega_profile {
        let bins = radial_profile(&num, (0.0, 0.0), args.profile_bins)?;
        write_csv(path, &bins)?;
    }

    let (i0, j0) = grid.nearest(0.0, 0.0);
    let report = RegularizeReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "regularize",
        model,
        parameters: RegularizeParams {
            grid_n: args.grid_n,
            half_extent: args.half_extent,
            radii: args.radii.clone(),
            curl_annulus: (ann_lo, ann_hi),
        },
        omega_at_zero: omega.get(i0, j0),
        curl_comparison: CurlComparison {
            annulus: (ann_lo, ann_hi),
            max_rel_err,
        },
        circulations,
        penalty_core,
        penalty_skipped,
        warnings,
    };
    write_json(&args.out, &report)
}

pub fn smolin(args: &SmolinArgs) -> anyhow::Result<()> {
    let mut runs = Vec::new();
    let mut nphi_used = 0;
    for &alpha in &args.alpha {
        let mut state = fourier_project(alpha, args.modes)?;
        if let Some(nphi) = args.nphi {
            state = state.with_nphi(nphi);
        }
        nphi_used = state.nphi;
        let drift = density_drift(&state, &args.times)?;
        runs.push(SmolinRun {
            alpha,
            times: drift.times,
            drift: drift.drift,
            max_drift: drift.max_drift,
            tail_mass: state.tail_mass(),
            stationary_check: flow_stationary_check(alpha),
        });
    }
    let report = SmolinReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: "smolin",
        parameters: SmolinParams {
            alphas: args.alpha.clone(),
            times: args.times.clone(),
            modes: args.modes,
            nphi: nphi_used,
        },
        runs,
        warnings: Vec::new(),
    };
    write_json(&args.out, &report)
}

pub fn synth(args: &SynthArgs) -> anyhow::Result<()> {
    let spec: flowlab_core::synth::SynthSpec =
        serde_json::from_slice(&read_input(&args.spec)?).map_err(CoreError::from)?;
    let out = flowlab_core::synth::generate(&spec)?;
    if !out.warnings.is_empty() {
        // the field file schema has no warnings slot; surface them on stderr
        let payload = serde_json::json!({ "warnings": out.warnings });
        eprintln!("{payload}");
    }
    let mut payload = Vec::new();
    fio::write_complex_field(&mut payload, &out.field)?;
    payload.push(b'\n');
    write_output(&args.out, &payload)
}

/// Maps an error chain onto the exit-code contract: 2 for malformed input,
/// 3 for numerical failures.
pub fn classify_exit(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        if is_numerical(core) {
            return 3;
        }
        return 2;
    }
    2
}
