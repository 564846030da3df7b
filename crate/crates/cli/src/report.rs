//! Report payloads. Field order is fixed and no timestamps enter, so the
//! same inputs and flags always produce byte-identical reports.

use serde::Serialize;

use flowlab_core::vortex::{NodeReport, Regularity, RegularityConfig};

pub const TOOL_NAME: &str = "flowlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: AnalyzeInput,
    pub parameters: AnalyzeParams,
    pub grid: flowlab_core::grid::Grid2D,
    pub nodes: Vec<NodeReport>,
    pub regularity_summary: RegularitySummary,
    pub loops: Vec<LoopResult>,
    pub balance: BalanceStats,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct AnalyzeInput {
    pub field_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loops_digest: Option<String>,
}

#[derive(Serialize)]
pub struct AnalyzeParams {
    pub eps_rho: f64,
    pub regularity: RegularityConfig,
}

#[derive(Serialize, Default)]
pub struct RegularitySummary {
    pub finite_positive: usize,
    pub vanishing: usize,
    pub divergent: usize,
    pub indeterminate: usize,
}

impl RegularitySummary {
    pub fn tally(nodes: &[NodeReport]) -> Self {
        let mut s = RegularitySummary::default();
        for n in nodes {
            match n.regularity {
                Some(Regularity::FinitePositive) => s.finite_positive += 1,
                Some(Regularity::Vanishing) => s.vanishing += 1,
                Some(Regularity::Divergent) => s.divergent += 1,
                Some(Regularity::Indeterminate) | None => s.indeterminate += 1,
            }
        }
        s
    }
}

#[derive(Serialize)]
pub struct LoopResult {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circulation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct BalanceStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub count: usize,
}

#[derive(Serialize)]
pub struct AlphaScanReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: AlphaScanParams,
    pub rows: Vec<AlphaScanRowOut>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct AlphaScanParams {
    pub alphas: Vec<f64>,
    pub grid_n: usize,
    pub half_extent: f64,
    pub annulus: (f64, f64),
    pub regularity: RegularityConfig,
}

#[derive(Serialize)]
pub struct AlphaScanRowOut {
    pub alpha: f64,
    pub class: Regularity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_fit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_rho_estimate: Option<f64>,
    pub balance_max_abs: f64,
    pub balance_mean_abs: f64,
}

#[derive(Serialize)]
pub struct RegularizeReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub model: flowlab_core::alpha::AlphaModel,
    pub parameters: RegularizeParams,
    pub omega_at_zero: f64,
    pub curl_comparison: CurlComparison,
    pub circulations: Vec<CirculationRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_core: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_skipped: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct RegularizeParams {
    pub grid_n: usize,
    pub half_extent: f64,
    pub radii: Vec<f64>,
    pub curl_annulus: (f64, f64),
}

#[derive(Serialize)]
pub struct CurlComparison {
    pub annulus: (f64, f64),
    pub max_rel_err: f64,
}

#[derive(Serialize)]
pub struct CirculationRow {
    pub radius: f64,
    pub value: f64,
    pub expected: f64,
    pub rel_err: f64,
}

#[derive(Serialize)]
pub struct SmolinReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: SmolinParams,
    pub runs: Vec<SmolinRun>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct SmolinParams {
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
    pub modes: usize,
    pub nphi: usize,
}

#[derive(Serialize)]
pub struct SmolinRun {
    pub alpha: f64,
    pub times: Vec<f64>,
    pub drift: Vec<f64>,
    pub max_drift: f64,
    pub tail_mass: f64,
    pub stationary_check: flowlab_core::circle::StationaryCheck,
}
