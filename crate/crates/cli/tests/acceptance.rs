//! Acceptance suite: one pass/fail line per criterion; exits nonzero if any fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use conecommit::commitment::presets::{self, Preset};
use conecommit::commitment::{
    alice_strategy, bob_cheat_dual, bob_cheat_primal, verify_tradeoff, AnalysisOptions,
    CheatReport, ICProtocol,
};
use conecommit::coneprog::solve;
use conecommit::gpt::{validate_system, Theory, ValidationOptions};
use conecommit::linalg::{self, CMatrix, Keep};
use conecommit::oracles::{
    exhaustive_gbit_discrimination, helstrom, lp_vertex_enumeration, GBIT_RESOLUTION,
};
use conecommit::purify::{purify, purify_bipartite, uhlmann_unitary};
use conecommit::{
    CompositionRule, ConeProgram, ConeSpec, ConeVector, Sense, SolveStatus, SolverOptions,
};
use conecommit_cli::commands::{analyze_report, AnalyzeArgs, EXIT_INAPPLICABLE};
use conecommit_cli::files::ProtocolFile;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn analyze(p: &ICProtocol, exact: bool) -> Result<CheatReport, String> {
    let opts = AnalysisOptions {
        solver: SolverOptions::default(),
        exact,
    };
    verify_tradeoff(p, &opts).map_err(|e| e.to_string())
}

/// Random protocols with factor dims in {2, 3} and n in {2, 3}.
fn random_battery(count: u64) -> Result<Vec<ICProtocol>, String> {
    (0..count)
        .map(|seed| {
            let (da, db, n) = (2 + seed % 2, 2 + (seed / 2) % 2, 2 + (seed / 4) % 2);
            presets::random_quantum(seed, da as usize, db as usize, n as usize)
                .map_err(|e| format!("seed {seed}: {e}"))
        })
        .collect()
}

fn strong_duality() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (seed, p) in random_battery(50)?.iter().enumerate() {
        let r = analyze(p, false).map_err(|e| format!("seed {seed}: {e}"))?;
        let gap = (r.pb_primal - r.pb_dual).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-5, || {
            format!("seed {seed}: |primal - dual| = {gap:e}")
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("50 protocols, worst gap {worst:.2e}, {secs:.1} s"))
}

fn helstrom_anchor() -> Outcome {
    let p = presets::qubit_helstrom().map_err(|e| e.to_string())?;
    let r = analyze(&p, false)?;
    let shape = p
        .system_b()
        .matrix_shape()
        .ok_or("B is not a matrix system")?;
    let rho = p.bob_states().map_err(|e| e.to_string())?;
    let oracle = helstrom(&shape.to_matrix(&rho[0]), &shape.to_matrix(&rho[1]))
        .map_err(|e| e.to_string())?;
    let closed = 0.5 + SQRT_2 / 4.0;
    ensure((oracle.value - closed).abs() <= 1e-12, || {
        format!("oracle {} differs from closed form {closed}", oracle.value)
    })?;
    let diff = (r.pb_dual - closed).abs();
    ensure(diff <= 1e-5, || {
        format!("pb_dual {} vs {closed}", r.pb_dual)
    })?;
    Ok(format!("pb_dual {} (|diff| {diff:.2e})", r.pb_dual))
}

fn tradeoff() -> Outcome {
    let mut battery = random_battery(20)?;
    for n in 2..=3 {
        battery.push(presets::identical(n, 2).map_err(|e| e.to_string())?);
        battery.push(presets::classical_orthogonal(n).map_err(|e| e.to_string())?);
    }
    battery.push(presets::bb84_style().map_err(|e| e.to_string())?);
    let mut worst = f64::INFINITY;
    for (i, p) in battery.iter().enumerate() {
        let r = analyze(p, false)?;
        let bound = r.alpha / r.n as f64;
        let margin = r.alice_value * r.pb_dual - bound;
        worst = worst.min(margin);
        ensure(margin >= -1e-6, || {
            format!("protocol {i}: product below bound by {margin:e}")
        })?;
    }
    for n in 2..=4 {
        let r = analyze(&presets::identical(n, 2).map_err(|e| e.to_string())?, false)?;
        let tight = (r.product - r.alpha / n as f64).abs();
        ensure(tight <= 1e-6, || {
            format!("identical n={n}: product off alpha/n by {tight:e}")
        })?;
    }
    Ok(format!(
        "{} protocols, worst margin {worst:.2e}; identical states tight",
        battery.len()
    ))
}

fn perfect_cheating() -> Outcome {
    let mut lines = Vec::new();
    for (name, p) in [
        ("bb84_style", presets::bb84_style()),
        ("identical(3)", presets::identical(3, 3)),
    ] {
        let p = p.map_err(|e| e.to_string())?;
        let r = analyze(&p, false)?;
        let n = r.n as f64;
        ensure((r.alpha - 1.0).abs() <= 1e-9, || {
            format!("{name}: alpha {}", r.alpha)
        })?;
        ensure((r.pb_dual - 1.0 / n).abs() <= 1e-6, || {
            format!("{name}: pb_dual {} vs {}", r.pb_dual, 1.0 / n)
        })?;
        ensure(r.alice_value >= 1.0 - 1e-5, || {
            format!("{name}: alice {}", r.alice_value)
        })?;
        lines.push(format!("{name} alice {:.8}", r.alice_value));
    }
    Ok(lines.join(", "))
}

fn quantum_battery() -> Result<Vec<ICProtocol>, String> {
    let mut b = random_battery(12)?;
    for p in [
        presets::qubit_helstrom(),
        presets::bb84_style(),
        presets::identical(2, 2),
        presets::identical(3, 2),
        presets::orthogonal_on_b(2),
    ] {
        b.push(p.map_err(|e| e.to_string())?);
    }
    Ok(b)
}

fn steering() -> Outcome {
    let mut worst_steer: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    let battery = quantum_battery()?;
    for (i, p) in battery.iter().enumerate() {
        let dual = bob_cheat_dual(p, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let s = alice_strategy(p, &dual.x).map_err(|e| e.to_string())?;
        let global = purify_bipartite(&s.chi_list[0]).map_err(|e| e.to_string())?;
        let shape_ab = p.system_ab.matrix_shape().ok_or("not a matrix system")?;
        let shape_b = p.system_b().matrix_shape().ok_or("not a matrix system")?;
        let (da, db) = (p.system_a().matrix_shape().unwrap().n, shape_b.n);
        let x = shape_b.to_matrix(&s.x_normalized);
        ensure(s.steering.len() == p.n, || {
            format!("protocol {i}: {} maps", s.steering.len())
        })?;
        for (j, map) in s.steering.iter().enumerate() {
            let chi = shape_ab.to_matrix(&s.chi_list[map.target].vec);
            let got = map.apply(&global).map_err(|e| e.to_string())?;
            let steer = linalg::frobenius(&(&got - &chi));
            let marginal = linalg::frobenius(&(linalg::partial_trace(&chi, da, db, Keep::B) - &x));
            worst_steer = worst_steer.max(steer);
            worst_marginal = worst_marginal.max(marginal);
            ensure(steer <= 1e-8, || {
                format!("protocol {i}, map {j}: residual {steer:e}")
            })?;
            ensure(marginal <= 1e-8, || {
                format!("protocol {i}, chi {j}: marginal {marginal:e}")
            })?;
        }
    }
    Ok(format!(
        "{} protocols, steering {worst_steer:.2e}, marginal {worst_marginal:.2e}",
        battery.len()
    ))
}

fn sandwich() -> Outcome {
    let battery = quantum_battery()?;
    let mut worst = f64::INFINITY;
    for (i, p) in battery.iter().enumerate() {
        let r = analyze(p, true)?;
        let exact = r
            .alice_exact
            .ok_or_else(|| format!("protocol {i}: no exact value"))?;
        let margin = exact - r.alice_value;
        worst = worst.min(margin);
        ensure(margin >= -1e-6, || {
            format!("protocol {i}: alice {} > exact {exact}", r.alice_value)
        })?;
    }
    Ok(format!(
        "{} protocols, worst margin {worst:.2e}",
        battery.len()
    ))
}

fn random_lp(rng: &mut ChaCha8Rng) -> conecommit::Result<ConeProgram> {
    let k = rng.random_range(2..=6);
    let m = rng.random_range(1..=3.min(k));
    let mut phi = DMatrix::from_fn(m, k, |_, _| StandardNormal.sample(rng));
    for j in 0..k {
        phi[(0, j)] = rng.random_range(0.2..1.5);
    }
    let x0: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let b = &phi * nalgebra::DVector::from_vec(x0);
    let c: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
    let sense = if rng.random_bool(0.5) {
        Sense::Sup
    } else {
        Sense::Inf
    };
    ConeProgram::new(
        phi,
        ConeVector(b.as_slice().to_vec()),
        ConeVector(c),
        ConeSpec::orthant(k),
        sense,
    )
}

fn gbit_protocol(rng: &mut ChaCha8Rng, n: usize) -> conecommit::Result<ICProtocol> {
    let sys = presets::bipartite(
        Theory::Classical,
        n,
        Theory::Gbit,
        3,
        Some(CompositionRule::Min),
    )?;
    let basis = |j: usize| {
        (0..n)
            .map(|i| if i == j { 1.0 } else { 0.0 })
            .collect::<Vec<_>>()
    };
    let states = (0..n)
        .map(|j| {
            let rho = [
                1.0,
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ];
            ConeVector(linalg::kron_vec(&basis(j), &rho))
        })
        .collect();
    let effects = (0..n)
        .map(|j| ConeVector(linalg::kron_vec(&basis(j), &[1.0, 0.0, 0.0])))
        .collect();
    ICProtocol::new(sys, states, effects)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_lp: f64 = 0.0;
    for i in 0..100 {
        let lp = random_lp(&mut rng).map_err(|e| format!("lp {i}: {e}"))?;
        let sol = solve(&lp, &SolverOptions::default()).map_err(|e| format!("lp {i}: {e}"))?;
        ensure(sol.status == SolveStatus::Optimal, || {
            format!("lp {i}: status {}", sol.status)
        })?;
        let oracle = lp_vertex_enumeration(&lp).map_err(|e| format!("lp {i}: {e}"))?;
        let diff = (sol.primal_value - oracle.value).abs();
        worst_lp = worst_lp.max(diff);
        ensure(diff <= 1e-5, || {
            format!(
                "lp {i}: solver {} vs oracle {}",
                sol.primal_value, oracle.value
            )
        })?;
    }
    let mut worst_gbit: f64 = 0.0;
    for i in 0..20 {
        let n = 2 + i % 2;
        let p = gbit_protocol(&mut rng, n).map_err(|e| format!("gbit {i}: {e}"))?;
        let pb = bob_cheat_primal(&p, &SolverOptions::default())
            .map_err(|e| format!("gbit {i}: {e}"))?
            .value;
        let rho = p.bob_states().map_err(|e| e.to_string())?;
        let o = exhaustive_gbit_discrimination(&rho, GBIT_RESOLUTION).map_err(|e| e.to_string())?;
        let (lo, hi) = (o.value - 1e-5, o.value + o.slack + 1e-5);
        worst_gbit = worst_gbit.max((pb - o.value).abs());
        ensure(pb >= lo && pb <= hi, || {
            format!("gbit {i}: solver {pb} outside [{lo}, {hi}]")
        })?;
    }
    Ok(format!(
        "100 LPs (worst {worst_lp:.2e}), 20 gbit instances (worst {worst_gbit:.2e})"
    ))
}

fn gpt_axioms() -> Outcome {
    let opts = ValidationOptions::default();
    let mut checked = 0;
    for name in Preset::NAMES {
        let p = Preset::from_name(name, None, None, None, 0)
            .and_then(Preset::build)
            .map_err(|e| format!("{name}: {e}"))?;
        for sys in [p.system_ab.as_ref(), p.system_a(), p.system_b()] {
            let report = validate_system(sys, &opts);
            let restricted = name == "restricted_quantum" && sys.label == p.system_b().label;
            if restricted {
                ensure(!report.no_restriction(), || {
                    format!("{name}: {} passes no-restriction", sys.label)
                })?;
            } else {
                ensure(report.passed(), || {
                    format!("{name}: {} fails {:?}", sys.label, report.failures())
                })?;
            }
            checked += 1;
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("restricted.json");
    let file =
        ProtocolFile::from_preset(Preset::RestrictedQuantum { n: 2 }).map_err(|e| e.to_string())?;
    std::fs::write(&path, file.to_json()).map_err(|e| e.to_string())?;
    let report = analyze_report(&AnalyzeArgs::new(&path));
    ensure(report.exit_code == EXIT_INAPPLICABLE, || {
        format!("analyze exit {}", report.exit_code)
    })?;
    Ok(format!(
        "{checked} systems validated; restricted system exits {EXIT_INAPPLICABLE}"
    ))
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m);
    m / tr
}

fn purification_roundtrips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut worst_marginal, mut worst_unitary): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let n = 2 + i % 3;
        let rho = random_density(&mut rng, n);
        let sys = std::sync::Arc::new(conecommit::gpt::quantum_system(n));
        let state = sys
            .state(ConeVector::from_hermitian(&rho))
            .map_err(|e| e.to_string())?;
        let p = purify(&state).map_err(|e| e.to_string())?;
        let k = p.purifier_dim;
        let marginal = linalg::partial_trace(&linalg::outer(&p.amplitudes), k, n, Keep::B);
        let err = linalg::frobenius(&(&marginal - &rho));
        worst_marginal = worst_marginal.max(err);
        ensure(err <= 1e-10, || {
            format!("density {i}: marginal error {err:e}")
        })?;

        let u = CMatrix::from_fn(k, k, |_, _| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .qr()
        .q();
        let g = p.amplitude_matrix();
        let h = &u * &g;
        let w = uhlmann_unitary(&g, &h).map_err(|e| e.to_string())?;
        let rec = linalg::frobenius(&(&w * &g - &h));
        worst_unitary = worst_unitary.max(rec);
        ensure(rec <= 1e-8, || {
            format!("density {i}: recovery residual {rec:e}")
        })?;
    }
    Ok(format!(
        "100 densities, marginal {worst_marginal:.2e}, recovery {worst_unitary:.2e}"
    ))
}

fn strip_timings(json: &str) -> Result<serde_json::Value, String> {
    let mut v: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    v.as_object_mut()
        .ok_or("report is not an object")?
        .remove("timings_ms");
    Ok(v)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut count = 0;
    for preset in [
        Preset::RandomQuantum {
            seed: 7,
            dim_a: 2,
            dim_b: 2,
            n: 2,
        },
        Preset::QubitHelstrom,
        Preset::GbitPair,
    ] {
        let a = ProtocolFile::from_preset(preset)
            .map_err(|e| e.to_string())?
            .to_json();
        let b = ProtocolFile::from_preset(preset)
            .map_err(|e| e.to_string())?
            .to_json();
        ensure(a == b, || format!("{preset:?}: generated files differ"))?;
        let path = dir.path().join(format!("p{count}.json"));
        std::fs::write(&path, &a).map_err(|e| e.to_string())?;
        let mut args = AnalyzeArgs::new(&path);
        args.oracle = true;
        let r1 = strip_timings(&analyze_report(&args).to_json())?;
        let r2 = strip_timings(&analyze_report(&args).to_json())?;
        ensure(r1 == r2, || format!("{preset:?}: reports differ"))?;
        let s1 = serde_json::to_string(&r1).map_err(|e| e.to_string())?;
        let s2 = serde_json::to_string(&r2).map_err(|e| e.to_string())?;
        ensure(s1 == s2, || {
            format!("{preset:?}: serialized reports differ")
        })?;
        count += 1;
    }
    Ok(format!(
        "{count} inputs analyzed twice with identical reports"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("strong duality", strong_duality),
        ("helstrom anchor", helstrom_anchor),
        ("trade-off bound", tradeoff),
        ("perfect cheating", perfect_cheating),
        ("steering correctness", steering),
        ("sandwich", sandwich),
        ("oracle equivalence", oracle_equivalence),
        ("gpt axioms", gpt_axioms),
        ("purification roundtrips", purification_roundtrips),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
