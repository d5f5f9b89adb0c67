//! Analysis and solve reports.
//!
//! Everything except `timings_ms` is a deterministic function of the input
//! file and the flags.

use std::fmt::Write as _;

use conecommit::commitment::{CheatDiagnostics, CheatReport};
use conecommit::{ConeSolution, Residuals};
use serde::Serialize;

pub const REPORT_VERSION: &str = "conecommit-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolSummary {
    pub system: String,
    pub n: usize,
    pub quantum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Results {
    pub alpha: f64,
    pub pb_primal: f64,
    pub pb_dual: f64,
    pub pb_dual_solver: f64,
    pub alice_value: f64,
    pub alice_mode: String,
    pub alice_exact: Option<f64>,
    pub product: f64,
    pub bound: f64,
    pub product_bound_check: bool,
    pub dual_optimal_x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEntry {
    pub name: String,
    pub status: OracleStatus,
    pub reference: Option<f64>,
    pub computed: f64,
    pub difference: Option<f64>,
    pub tolerance: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl From<Residuals> for ResidualEntry {
    fn from(r: Residuals) -> Self {
        Self {
            primal: r.primal,
            dual: r.dual,
            gap: r.gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsEntry {
    pub primal_residuals: ResidualEntry,
    pub primal_iterations: usize,
    pub dual_residuals: ResidualEntry,
    pub dual_iterations: usize,
    pub exact_residuals: Option<ResidualEntry>,
    pub duality_gap: f64,
    pub dual_raw_infeasibility: f64,
    pub dual_repair_shift: f64,
    pub dual_feasibility: f64,
    pub min_accept_on_dilation: f64,
    pub chi_normalization: f64,
    pub chi_marginal: f64,
    pub steering_residual: f64,
    pub steering_unitarity: f64,
    pub choice_spread: f64,
    pub product_dilations: usize,
    pub chi_value: f64,
}

impl From<&CheatDiagnostics> for DiagnosticsEntry {
    fn from(d: &CheatDiagnostics) -> Self {
        Self {
            primal_residuals: d.primal_residuals.into(),
            primal_iterations: d.primal_iterations,
            dual_residuals: d.dual_residuals.into(),
            dual_iterations: d.dual_iterations,
            exact_residuals: d.exact_residuals.map(Into::into),
            duality_gap: d.duality_gap,
            dual_raw_infeasibility: d.dual_raw_infeasibility,
            dual_repair_shift: d.dual_repair_shift,
            dual_feasibility: d.dual_feasibility,
            min_accept_on_dilation: d.alice.min_accept_on_dilation,
            chi_normalization: d.alice.chi_normalization,
            chi_marginal: d.alice.chi_marginal,
            steering_residual: d.alice.steering_residual,
            steering_unitarity: d.alice.steering_unitarity,
            choice_spread: d.alice.choice_spread,
            product_dilations: d.alice.product_dilations,
            chi_value: d.alice.chi_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub solver_tol: f64,
    pub max_iter: usize,
    pub bound_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Timings {
    pub load: f64,
    pub analysis: f64,
    pub oracles: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub version: String,
    pub protocol: Option<ProtocolSummary>,
    pub status: String,
    pub exit_code: u8,
    pub failure: Option<Failure>,
    pub results: Option<Results>,
    pub checks: Vec<CheckEntry>,
    pub oracles: Vec<OracleEntry>,
    pub diagnostics: Option<DiagnosticsEntry>,
    pub tolerances: Tolerances,
    pub timings_ms: Timings,
}

impl AnalysisReport {
    pub fn new(tolerances: Tolerances) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            protocol: None,
            status: "fail".into(),
            exit_code: 0,
            failure: None,
            results: None,
            checks: Vec::new(),
            oracles: Vec::new(),
            diagnostics: None,
            tolerances,
            timings_ms: Timings::default(),
        }
    }

    pub fn record(&mut self, r: &CheatReport) {
        self.results = Some(Results {
            alpha: r.alpha,
            pb_primal: r.pb_primal,
            pb_dual: r.pb_dual,
            pb_dual_solver: r.pb_dual_solver,
            alice_value: r.alice_value,
            alice_mode: r.alice_mode.label().into(),
            alice_exact: r.alice_exact,
            product: r.product,
            bound: r.alpha / r.n as f64,
            product_bound_check: r.product_bound_check,
            dual_optimal_x: r.dual_optimal_x.0.clone(),
        });
        self.checks = r
            .checks
            .iter()
            .map(|c| CheckEntry {
                name: c.name.into(),
                passed: c.passed,
                value: c.value,
                threshold: c.threshold,
            })
            .collect();
        self.diagnostics = Some((&r.diagnostics).into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "status: {} (exit {})", self.status, self.exit_code);
        if let Some(p) = &self.protocol {
            let _ = writeln!(out, "protocol: {}, n = {}", p.system, p.n);
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(out, "failure: {}: {}", f.kind, f.message);
        }
        if let Some(r) = &self.results {
            let _ = writeln!(out, "alpha          = {}", r.alpha);
            let _ = writeln!(out, "P_B (primal)   = {}", r.pb_primal);
            let _ = writeln!(out, "P_B (dual)     = {}", r.pb_dual);
            let _ = writeln!(out, "P_A (alice)    = {} [{}]", r.alice_value, r.alice_mode);
            if let Some(e) = r.alice_exact {
                let _ = writeln!(out, "P_A (exact)    = {e}");
            }
            let _ = writeln!(out, "P_A * P_B      = {}", r.product);
            let _ = writeln!(out, "alpha / n      = {}", r.bound);
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks:");
            for c in &self.checks {
                let tag = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  [{tag}] {:<24} value {:e} (threshold {:e})",
                    c.name, c.value, c.threshold
                );
            }
        }
        if !self.oracles.is_empty() {
            let _ = writeln!(out, "oracles:");
            for o in &self.oracles {
                let tag = match o.status {
                    OracleStatus::Pass => "pass",
                    OracleStatus::Fail => "FAIL",
                    OracleStatus::Skipped => "skip",
                };
                match o.reference {
                    Some(r) => {
                        let _ = writeln!(
                            out,
                            "  [{tag}] {:<24} reference {r} computed {}",
                            o.name, o.computed
                        );
                    }
                    None => {
                        let _ = writeln!(
                            out,
                            "  [{tag}] {:<24} {}",
                            o.name,
                            o.note.as_deref().unwrap_or("")
                        );
                    }
                }
            }
        }
        let t = &self.timings_ms;
        let _ = writeln!(
            out,
            "timings (ms): load {:.1}, analysis {:.1}, oracles {:.1}, total {:.1}",
            t.load, t.analysis, t.oracles, t.total
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub version: String,
    pub status: String,
    pub primal_value: f64,
    pub dual_value: f64,
    pub residuals: ResidualEntry,
    pub iterations: usize,
    pub slater_point_found: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub timings_ms: f64,
}

impl SolveReport {
    pub fn new(sol: &ConeSolution, slater: bool, elapsed_ms: f64) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            status: sol.status.to_string(),
            primal_value: sol.primal_value,
            dual_value: sol.dual_value,
            residuals: sol.residuals.into(),
            iterations: sol.iterations,
            slater_point_found: slater,
            x: sol.x.0.clone(),
            y: sol.y.clone(),
            timings_ms: elapsed_ms,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let r = &self.residuals;
        format!(
            "status: {}\nprimal value = {}\ndual value   = {}\nresiduals: primal {:e}, dual {:e}, gap {:e}\niterations: {}\nslater point: {}\ntime (ms): {:.1}\n",
            self.status,
            self.primal_value,
            self.dual_value,
            r.primal,
            r.dual,
            r.gap,
            self.iterations,
            if self.slater_point_found { "found" } else { "not found" },
            self.timings_ms
        )
    }
}
