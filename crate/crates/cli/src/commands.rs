//! The `analyze`, `generate` and `solve` subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use conecommit::commitment::presets::Preset;
use conecommit::commitment::{
    alice_exact_program, bob_dual_program, bob_primal_program, verify_tradeoff, AnalysisOptions,
    CheatReport, ICProtocol, BOUND_TOL,
};
use conecommit::coneprog::{check_slater, solve as solve_program};
use conecommit::gpt::gbit_system;
use conecommit::oracles::{
    exhaustive_gbit_discrimination, helstrom, lp_vertex_enumeration, GBIT_RESOLUTION,
};
use conecommit::{ConeSpec, Error, SolveStatus, SolverOptions};

use crate::files::{LoadError, ProgramFile, ProtocolFile};
use crate::report::{
    AnalysisReport, Failure, OracleEntry, OracleStatus, ProtocolSummary, SolveReport, Tolerances,
};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;
pub const EXIT_CHECK_FAILED: u8 = 5;
pub const EXIT_INAPPLICABLE: u8 = 6;

/// Agreement required between an oracle and the conic solver.
pub const ORACLE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

/// Result of one command: exit code, standard output and a diagnostic line
/// for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_PASS,
            stdout,
            stderr: None,
        }
    }

    fn fail(code: u8, message: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: Some(message),
        }
    }
}

/// Exit code and failure kind for a library error.
pub fn classify(e: &Error) -> (u8, &'static str) {
    match e {
        Error::InvalidProtocol(_) => (EXIT_INVALID, "invalid_protocol"),
        Error::ImpossibilityInapplicable(_) => (EXIT_INAPPLICABLE, "impossibility_inapplicable"),
        Error::SolverFailure { .. } | Error::NumericalFailure { .. } => {
            (EXIT_SOLVER, "solver_failure")
        }
        Error::DimensionMismatch { .. }
        | Error::ContractViolation(_)
        | Error::UnsupportedTheory(_)
        | Error::UnsupportedCombination(_) => (EXIT_INVALID, "invalid_protocol"),
        Error::UnsupportedScale(_) => (EXIT_SOLVER, "solver_failure"),
    }
}

fn classify_load(e: &LoadError) -> (u8, &'static str) {
    match e {
        LoadError::Parse(_) => (EXIT_PARSE, "parse"),
        LoadError::Invalid(e) => classify(e),
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    pub solver: SolverOptions,
    pub oracle: bool,
    pub report: ReportFormat,
    pub dump_programs: Option<PathBuf>,
    pub exact: bool,
}

impl AnalyzeArgs {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            solver: SolverOptions::default(),
            oracle: false,
            report: ReportFormat::Text,
            dump_programs: None,
            exact: true,
        }
    }
}

/// Loads, analyzes and reports on a protocol file.
pub fn analyze_report(args: &AnalyzeArgs) -> AnalysisReport {
    let start = Instant::now();
    let mut report = AnalysisReport::new(Tolerances {
        solver_tol: args.solver.tol,
        max_iter: args.solver.max_iter,
        bound_tol: BOUND_TOL,
    });
    let fail = |report: &mut AnalysisReport, code: u8, kind: &str, message: String| {
        report.status = "error".into();
        report.exit_code = code;
        report.failure = Some(Failure {
            kind: kind.into(),
            message,
        });
    };

    let loaded = fs::read_to_string(&args.path)
        .map_err(|e| (EXIT_IO, "io", format!("{}: {e}", args.path.display())))
        .and_then(|text| {
            ProtocolFile::from_json(&text)
                .and_then(|f| f.to_protocol())
                .map_err(|e| {
                    let (code, kind) = classify_load(&e);
                    (code, kind, e.to_string())
                })
        });
    report.timings_ms.load = ms_since(start);
    let protocol = match loaded {
        Ok(p) => p,
        Err((code, kind, msg)) => {
            fail(&mut report, code, kind, msg);
            report.timings_ms.total = ms_since(start);
            return report;
        }
    };
    report.protocol = Some(ProtocolSummary {
        system: protocol.system_ab.label.clone(),
        n: protocol.n,
        quantum: protocol.is_quantum(),
    });

    if let Some(dir) = &args.dump_programs {
        if let Err((code, kind, msg)) = dump_programs(&protocol, dir) {
            fail(&mut report, code, kind, msg);
            report.timings_ms.total = ms_since(start);
            return report;
        }
    }

    let t = Instant::now();
    let opts = AnalysisOptions {
        solver: args.solver,
        exact: args.exact,
    };
    let analysis = verify_tradeoff(&protocol, &opts);
    report.timings_ms.analysis = ms_since(t);
    let cheat = match analysis {
        Ok(r) => r,
        Err(e) => {
            let (code, kind) = classify(&e);
            fail(&mut report, code, kind, e.to_string());
            report.timings_ms.total = ms_since(start);
            return report;
        }
    };
    report.record(&cheat);

    if args.oracle {
        let t = Instant::now();
        report.oracles = run_oracles(&protocol, &cheat);
        report.timings_ms.oracles = ms_since(t);
    }

    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .chain(
            report
                .oracles
                .iter()
                .filter(|o| o.status == OracleStatus::Fail)
                .map(|o| format!("oracle:{}", o.name)),
        )
        .collect();
    if failed.is_empty() {
        report.status = "pass".into();
        report.exit_code = EXIT_PASS;
    } else {
        report.status = "fail".into();
        report.exit_code = EXIT_CHECK_FAILED;
        report.failure = Some(Failure {
            kind: "check_failed".into(),
            message: format!("failed checks: {}", failed.join(", ")),
        });
    }
    report.timings_ms.total = ms_since(start);
    report
}

pub fn analyze(args: &AnalyzeArgs) -> Outcome {
    let report = analyze_report(args);
    let stdout = match args.report {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    Outcome {
        code: report.exit_code,
        stdout,
        stderr: report
            .failure
            .as_ref()
            .map(|f| format!("{}: {}", f.kind, f.message)),
    }
}

fn dump_programs(p: &ICProtocol, dir: &Path) -> Result<(), (u8, &'static str, String)> {
    let lib = |e: Error| {
        let (code, kind) = classify(&e);
        (code, kind, e.to_string())
    };
    let io = |e: std::io::Error| (EXIT_IO, "io", format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut programs = vec![
        ("bob_primal.json", bob_primal_program(p).map_err(lib)?.0),
        ("bob_dual.json", bob_dual_program(p).map_err(lib)?),
    ];
    if p.is_quantum() {
        programs.push(("alice_exact.json", alice_exact_program(p).map_err(lib)?));
    }
    for (name, program) in programs {
        fs::write(
            dir.join(name),
            ProgramFile::from_program(&program).to_json(),
        )
        .map_err(io)?;
    }
    Ok(())
}

fn compare(name: &str, reference: f64, computed: f64, tolerance: f64, note: String) -> OracleEntry {
    let difference = (reference - computed).abs();
    OracleEntry {
        name: name.into(),
        status: if difference <= tolerance {
            OracleStatus::Pass
        } else {
            OracleStatus::Fail
        },
        reference: Some(reference),
        computed,
        difference: Some(difference),
        tolerance,
        note: Some(note),
    }
}

fn skipped(name: &str, computed: f64, note: String) -> OracleEntry {
    OracleEntry {
        name: name.into(),
        status: OracleStatus::Skipped,
        reference: None,
        computed,
        difference: None,
        tolerance: 0.0,
        note: Some(note),
    }
}

fn errored(name: &str, computed: f64, e: Error) -> OracleEntry {
    OracleEntry {
        name: name.into(),
        status: OracleStatus::Fail,
        reference: None,
        computed,
        difference: None,
        tolerance: 0.0,
        note: Some(e.to_string()),
    }
}

/// Independent cross-checks of Bob's optimal value.
pub fn run_oracles(p: &ICProtocol, r: &CheatReport) -> Vec<OracleEntry> {
    let b = p.system_b();
    let mut out = Vec::new();
    let rho = match p.bob_states() {
        Ok(rho) => rho,
        Err(e) => return vec![errored("bob_states", r.pb_dual, e)],
    };

    if let Some(shape) = b.matrix_shape() {
        if p.n == 2 && p.is_quantum() {
            let (m0, m1) = (shape.to_matrix(&rho[0]), shape.to_matrix(&rho[1]));
            out.push(match helstrom(&m0, &m1) {
                Ok(o) => compare("helstrom", o.value, r.pb_dual, ORACLE_TOL, o.method),
                Err(e) => errored("helstrom", r.pb_dual, e),
            });
        } else {
            out.push(skipped(
                "helstrom",
                r.pb_dual,
                "needs two commitments on a quantum system".into(),
            ));
        }
    }

    if matches!(
        b.effect_cone,
        ConeSpec::Orthant { .. } | ConeSpec::PolyhedralV { .. } | ConeSpec::PolyhedralH { .. }
    ) {
        let entry = bob_primal_program(p).and_then(|(program, _)| lp_vertex_enumeration(&program));
        out.push(match entry {
            Ok(o) => compare(
                "lp_vertex_enumeration",
                o.value,
                r.pb_primal,
                ORACLE_TOL,
                o.method,
            ),
            Err(e @ Error::UnsupportedScale(_)) => {
                skipped("lp_vertex_enumeration", r.pb_primal, e.to_string())
            }
            Err(e) => errored("lp_vertex_enumeration", r.pb_primal, e),
        });
    }

    if b.state_cone == gbit_system().state_cone {
        out.push(
            match exhaustive_gbit_discrimination(&rho, GBIT_RESOLUTION) {
                Ok(o) => {
                    // The grid value is a lower bound within `slack` of the optimum.
                    let lower = o.value;
                    let ok = r.pb_dual >= lower - ORACLE_TOL
                        && r.pb_dual <= lower + o.slack + ORACLE_TOL;
                    OracleEntry {
                        name: "gbit_grid".into(),
                        status: if ok {
                            OracleStatus::Pass
                        } else {
                            OracleStatus::Fail
                        },
                        reference: Some(lower),
                        computed: r.pb_dual,
                        difference: Some((r.pb_dual - lower).abs()),
                        tolerance: o.slack + ORACLE_TOL,
                        note: Some(o.method),
                    }
                }
                Err(e) => errored("gbit_grid", r.pb_dual, e),
            },
        );
    }
    out
}

/// Writes a preset protocol file; prints it when `out` is `None`.
pub fn generate(
    preset: &str,
    n: Option<usize>,
    dim_a: Option<usize>,
    dim_b: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> Outcome {
    let preset = match Preset::from_name(preset, n, dim_a, dim_b, seed) {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_PARSE, format!("parse: {e}")),
    };
    let file = match ProtocolFile::from_preset(preset) {
        Ok(f) => f,
        Err(e) => {
            let (code, kind) = classify(&e);
            return Outcome::fail(code, format!("{kind}: {e}"));
        }
    };
    let text = file.to_json();
    match out {
        None => Outcome::ok(text),
        Some(path) => match fs::write(path, text) {
            Ok(()) => Outcome::ok(String::new()),
            Err(e) => Outcome::fail(EXIT_IO, format!("io: {}: {e}", path.display())),
        },
    }
}

/// Solves a standalone cone program file.
pub fn solve_report(path: &Path, solver: &SolverOptions) -> Result<SolveReport, Outcome> {
    let start = Instant::now();
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_IO, format!("io: {}: {e}", path.display())))?;
    let program = ProgramFile::from_json(&text)
        .and_then(|f| f.to_program())
        .map_err(|e| {
            let (code, kind) = classify_load(&e);
            Outcome::fail(code, format!("{kind}: {e}"))
        })?;
    let slater = check_slater(&program).is_some();
    let sol = solve_program(&program, solver).map_err(|e| {
        let (code, kind) = classify(&e);
        Outcome::fail(code, format!("{kind}: {e}"))
    })?;
    Ok(SolveReport::new(&sol, slater, ms_since(start)))
}

pub fn solve(path: &Path, solver: &SolverOptions, format: ReportFormat) -> Outcome {
    match solve_report(path, solver) {
        Err(o) => o,
        Ok(report) => {
            let stdout = match format {
                ReportFormat::Text => report.to_text(),
                ReportFormat::Json => report.to_json(),
            };
            if report.status == SolveStatus::Optimal.to_string() {
                Outcome::ok(stdout)
            } else {
                Outcome {
                    code: EXIT_SOLVER,
                    stdout,
                    stderr: Some(format!("solver_failure: status {}", report.status)),
                }
            }
        }
    }
}
