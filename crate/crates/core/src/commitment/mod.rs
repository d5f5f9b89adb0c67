//! Integer-commitment protocols: Bob's optimal cheating programs, Alice's
//! purification-based cheating strategy, and the product trade-off check.

pub mod presets;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::coneprog::{solve, ConeProgram, ConeSolution, Residuals, Sense, SolverOptions};
use crate::cones::{ConeSpec, ConeVector};
use crate::error::{check_dim, Error, Result};
use crate::gpt::{validate_system, GptState, GptSystem, ValidationOptions};
use crate::linalg::{self, Keep};
use crate::purify::{dilate, product_dilation, purify_bipartite, steering_transform, SteeringMap};

/// Honest acceptance must exceed one half by at least this much.
pub const ALPHA_MARGIN: f64 = 1e-9;
/// Tolerance on state normalization and effect validity in protocol input.
pub const INPUT_TOL: f64 = 1e-8;
/// Slack allowed in `alice_value * pb_dual >= alpha / n`.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ICProtocol {
    pub n: usize,
    pub system_ab: Arc<GptSystem>,
    pub committed_states: Vec<GptState>,
    /// Accept effects; the matching reject effect is `u - e`.
    pub accept_effects: Vec<ConeVector>,
}

impl ICProtocol {
    pub fn new(
        system_ab: GptSystem,
        states: Vec<ConeVector>,
        accept_effects: Vec<ConeVector>,
    ) -> Result<Self> {
        let n = states.len();
        if n < 2 {
            return Err(Error::InvalidProtocol(format!(
                "need at least 2 committable values, got {n}"
            )));
        }
        if accept_effects.len() != n {
            return Err(Error::InvalidProtocol(format!(
                "{n} committed states but {} accept effects",
                accept_effects.len()
            )));
        }
        if system_ab.composite.is_none() {
            return Err(Error::InvalidProtocol(format!(
                "{} is not a bipartite system",
                system_ab.label
            )));
        }
        let sys = Arc::new(system_ab);
        let d = sys.dim();
        let mut committed_states = Vec::with_capacity(n);
        for (j, s) in states.into_iter().enumerate() {
            check_dim(d, s.len())?;
            let state = GptState::new(sys.clone(), s).map_err(|_| {
                Error::InvalidProtocol(format!("committed state {j} is not in the state cone"))
            })?;
            if (state.normalization() - 1.0).abs() > INPUT_TOL {
                return Err(Error::InvalidProtocol(format!(
                    "committed state {j} has normalization {}",
                    state.normalization()
                )));
            }
            committed_states.push(state);
        }
        for (j, e) in accept_effects.iter().enumerate() {
            check_dim(d, e.len())?;
            let reject = sys.unit_effect.sub(e);
            if !sys.effect_cone.contains(e, INPUT_TOL)?
                || !sys.effect_cone.contains(&reject, INPUT_TOL)?
            {
                return Err(Error::InvalidProtocol(format!(
                    "accept effect {j} does not define a valid measurement"
                )));
            }
        }
        let p = Self {
            n,
            system_ab: sys,
            committed_states,
            accept_effects,
        };
        honest_alpha(&p)?;
        Ok(p)
    }

    pub fn system_b(&self) -> &GptSystem {
        self.system_ab
            .factors()
            .expect("protocol systems are bipartite")
            .1
    }

    pub fn system_a(&self) -> &GptSystem {
        self.system_ab
            .factors()
            .expect("protocol systems are bipartite")
            .0
    }

    /// Bob's reduced states `rho^j`.
    pub fn bob_states(&self) -> Result<Vec<ConeVector>> {
        self.committed_states
            .iter()
            .map(|s| self.system_ab.marginal_vector(&s.vec, Keep::B))
            .collect()
    }

    pub fn is_quantum(&self) -> bool {
        self.system_ab.is_quantum()
    }
}

/// `min_j e^j[s^j]`, required to exceed one half.
pub fn honest_alpha(p: &ICProtocol) -> Result<f64> {
    let alpha = p
        .committed_states
        .iter()
        .zip(&p.accept_effects)
        .map(|(s, e)| e.dot(&s.vec))
        .fold(f64::INFINITY, f64::min);
    if alpha < 0.5 + ALPHA_MARGIN {
        return Err(Error::InvalidProtocol(format!(
            "honest acceptance {alpha} does not exceed 1/2"
        )));
    }
    Ok(alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BobPrimal {
    pub program: ConeProgram,
    pub solution: ConeSolution,
    /// Guessing uniformly at random: every `M^j = u_B / n`.
    pub slater_point: ConeVector,
    pub value: f64,
}

/// `sup (1/n) sum_j <M^j, rho^j>` over `M^j` in `E_B` with `sum_j M^j = u_B`.
pub fn bob_primal_program(p: &ICProtocol) -> Result<(ConeProgram, ConeVector)> {
    let b = p.system_b();
    let d = b.dim();
    let n = p.n;
    let rho = p.bob_states()?;
    let phi = DMatrix::from_fn(d, n * d, |i, k| if k % d == i { 1.0 } else { 0.0 });
    let c = ConeVector(
        rho.iter()
            .flat_map(|r| r.scaled(1.0 / n as f64).0)
            .collect(),
    );
    let cone = ConeSpec::product(vec![b.effect_cone.clone(); n]);
    let program = ConeProgram::new(phi, b.unit_effect.clone(), c, cone, Sense::Sup)?;
    let slater = ConeVector(
        (0..n)
            .flat_map(|_| b.unit_effect.scaled(1.0 / n as f64).0)
            .collect(),
    );
    Ok((program, slater))
}

pub fn bob_cheat_primal(p: &ICProtocol, opts: &SolverOptions) -> Result<BobPrimal> {
    let (program, slater_point) = bob_primal_program(p)?;
    let solution = solve(&program, opts)?.require_optimal()?;
    let value = solution.primal_value;
    Ok(BobPrimal {
        program,
        solution,
        slater_point,
        value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BobDual {
    pub program: ConeProgram,
    pub solution: ConeSolution,
    /// Value reported by the solver.
    pub solver_value: f64,
    /// Minimizer after moving it into the feasible set.
    pub x: ConeVector,
    /// `u_B[x]` for the repaired minimizer.
    pub value: f64,
    /// Worst distance of `x - rho^j / n` from `K_B` before the repair.
    pub raw_infeasibility: f64,
    /// Step taken along the interior direction by the repair.
    pub repair_shift: f64,
}

/// `min u_B[x]` subject to `x - rho^j / n` in `K_B`, written over slack
/// variables `y_j = x - rho^j / n` plus a pinned scalar carrying the constant
/// `u_B[rho^1] / n`, so the optimal value is `P_B` itself.
pub fn bob_dual_program(p: &ICProtocol) -> Result<ConeProgram> {
    let b = p.system_b();
    let d = b.dim();
    let n = p.n;
    let nf = n as f64;
    let rho = p.bob_states()?;
    let vars = n * d + 1;
    let rows = (n - 1) * d + 1;
    let mut phi = DMatrix::zeros(rows, vars);
    let mut rhs = vec![0.0; rows];
    for j in 1..n {
        for i in 0..d {
            let r = (j - 1) * d + i;
            phi[(r, i)] = 1.0;
            phi[(r, j * d + i)] = -1.0;
            rhs[r] = (rho[j].0[i] - rho[0].0[i]) / nf;
        }
    }
    phi[(rows - 1, vars - 1)] = 1.0;
    rhs[rows - 1] = 1.0;
    let mut c = vec![0.0; vars];
    c[..d].copy_from_slice(b.unit_effect.coords());
    c[vars - 1] = b.unit_effect.dot(&rho[0]) / nf;
    let mut factors = vec![b.state_cone.clone(); n];
    factors.push(ConeSpec::orthant(1));
    ConeProgram::new(
        phi,
        ConeVector(rhs),
        ConeVector(c),
        ConeSpec::product(factors),
        Sense::Inf,
    )
}

/// Fails with [`Error::ImpossibilityInapplicable`] when Bob's system has
/// restricted effects.
pub fn require_no_restriction(b: &GptSystem) -> Result<()> {
    let report = validate_system(b, &ValidationOptions::default());
    if !report.no_restriction() {
        return Err(Error::ImpossibilityInapplicable(format!(
            "{} has effects strictly inside the dual of its state cone",
            b.label
        )));
    }
    Ok(())
}

pub fn bob_cheat_dual(p: &ICProtocol, opts: &SolverOptions) -> Result<BobDual> {
    let b = p.system_b();
    require_no_restriction(b)?;
    let program = bob_dual_program(p)?;
    let solution = solve(&program, opts)?.require_optimal()?;
    let (d, n) = (b.dim(), p.n);
    let nf = n as f64;
    let rho = p.bob_states()?;
    let mut x = ConeVector::zeros(d);
    for (j, r) in rho.iter().enumerate() {
        let y = ConeVector(solution.x.0[j * d..(j + 1) * d].to_vec());
        x = x.add(&y.add(&r.scaled(1.0 / nf)));
    }
    let x = x.scaled(1.0 / nf);

    let mut raw_infeasibility: f64 = 0.0;
    let mut repair_shift: f64 = 0.0;
    let dir = b.state_cone.interior_point()?;
    for r in &rho {
        let slack = x.sub(&r.scaled(1.0 / nf));
        raw_infeasibility = raw_infeasibility.max(b.state_cone.distance(&slack)?);
        repair_shift = repair_shift.max(b.state_cone.shift_into(&slack, &dir)?);
    }
    let x = x.add(&dir.scaled(repair_shift));
    let value = b.unit_effect.dot(&x);
    Ok(BobDual {
        solver_value: solution.primal_value,
        program,
        solution,
        x,
        value,
        raw_infeasibility,
        repair_shift,
    })
}

/// How Alice's value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliceMode {
    /// Steering maps were built and checked.
    Constructive,
    /// Non-quantum theory: `alpha / (n u_B[x])` from the purification postulate.
    PostulateAssumed,
}

impl AliceMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Constructive => "constructive",
            Self::PostulateAssumed => "postulate-assumed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AliceDiagnostics {
    /// `min_j e^j[t^j]`.
    pub min_accept_on_dilation: f64,
    /// `max_j |u[chi^j] - 1|`.
    pub chi_normalization: f64,
    /// `max_j` distance of the B-marginal of `chi^j` from `x'`.
    pub chi_marginal: f64,
    /// `max_j` Frobenius distance of the steered state from `chi^j`.
    pub steering_residual: f64,
    pub steering_unitarity: f64,
    /// Largest change of the achieved value when another `chi^k` is purified.
    pub choice_spread: f64,
    /// Number of dilations that fell back to a product with a fixed state on A.
    pub product_dilations: usize,
    /// `(1/n) sum_j e^j[chi^j]`, also recorded when the value is postulate-assumed.
    pub chi_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AliceStrategy {
    pub x_normalized: ConeVector,
    pub pb: f64,
    pub chi_list: Vec<GptState>,
    pub alice_value: f64,
    pub mode: AliceMode,
    /// Steering maps from the purification of `chi^1`, one per target.
    pub steering: Vec<SteeringMap>,
    pub diagnostics: AliceDiagnostics,
}

/// Builds `chi^j = (s^j + t^j) / (n u_B[x])` from a feasible point `x` of
/// Bob's dual program, and the maps steering between them.
pub fn alice_strategy(p: &ICProtocol, dual_x: &ConeVector) -> Result<AliceStrategy> {
    let (a, b) = (p.system_a(), p.system_b());
    check_dim(b.dim(), dual_x.len())?;
    let pb = b.unit_effect.dot(dual_x);
    if pb <= 0.0 {
        return Err(Error::ContractViolation(format!(
            "u_B[x] = {pb} is not positive"
        )));
    }
    let n = p.n;
    let nf = n as f64;
    let x_normalized = dual_x.scaled(1.0 / pb);
    let rho = p.bob_states()?;
    let quantum = p.is_quantum();
    let b_arc = Arc::new(b.clone());
    let mut diag = AliceDiagnostics {
        min_accept_on_dilation: f64::INFINITY,
        ..Default::default()
    };

    let mut chi_list = Vec::with_capacity(n);
    for (j, r) in rho.iter().enumerate() {
        let r_vec = dual_x.scaled(nf).sub(r);
        let r_state = GptState::new(b_arc.clone(), r_vec)
            .map_err(|_| Error::ContractViolation(format!("n x - rho^{j} is not in K_B")))?;
        let t = if quantum {
            match dilate(&r_state, a) {
                Ok(t) => t,
                Err(Error::ContractViolation(_)) => {
                    diag.product_dilations += 1;
                    product_dilation(&r_state, a)?
                }
                Err(e) => return Err(e),
            }
        } else {
            diag.product_dilations += 1;
            generic_product_dilation(p, &r_state)?
        };
        diag.min_accept_on_dilation = diag
            .min_accept_on_dilation
            .min(p.accept_effects[j].dot(&t.vec));
        let chi_vec = p.committed_states[j]
            .vec
            .add(&t.vec)
            .scaled(1.0 / (nf * pb));
        let chi = GptState {
            system: p.system_ab.clone(),
            vec: chi_vec,
        };
        diag.chi_normalization = diag
            .chi_normalization
            .max((chi.normalization() - 1.0).abs());
        let marg = p.system_ab.marginal_vector(&chi.vec, Keep::B)?;
        diag.chi_marginal = diag.chi_marginal.max(marg.sub(&x_normalized).norm());
        chi_list.push(chi);
    }
    diag.chi_value = chi_value(p, &chi_list);

    if !quantum {
        return Ok(AliceStrategy {
            x_normalized,
            pb,
            alice_value: honest_alpha(p)? / (nf * pb),
            chi_list,
            mode: AliceMode::PostulateAssumed,
            steering: Vec::new(),
            diagnostics: diag,
        });
    }

    let shape = p.system_ab.matrix_shape().expect("quantum composite");
    let mut steering = Vec::new();
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let global = purify_bipartite(&chi_list[k])?;
        let mut value = 0.0;
        for (j, chi) in chi_list.iter().enumerate() {
            let map = steering_transform(&global, chi, j)?;
            let steered = map.apply(&global)?;
            let steered_vec = shape.to_vector(&steered);
            value += p.accept_effects[j].dot(&steered_vec) / nf;
            if k == 0 {
                let residual = linalg::frobenius(&(steered - shape.to_matrix(&chi.vec)));
                diag.steering_residual = diag.steering_residual.max(residual);
                diag.steering_unitarity = diag.steering_unitarity.max(map.unitarity_defect());
                steering.push(map);
            }
        }
        values.push(value);
    }
    let alice_value = values[0];
    diag.choice_spread = values
        .iter()
        .map(|v| (v - alice_value).abs())
        .fold(0.0, f64::max);
    Ok(AliceStrategy {
        x_normalized,
        pb,
        chi_list,
        alice_value,
        mode: AliceMode::Constructive,
        steering,
        diagnostics: diag,
    })
}

fn chi_value(p: &ICProtocol, chi_list: &[GptState]) -> f64 {
    chi_list
        .iter()
        .zip(&p.accept_effects)
        .map(|(c, e)| e.dot(&c.vec))
        .sum::<f64>()
        / p.n as f64
}

/// `sigma_A (x) r` with `sigma_A` the normalized interior point of `K_A`.
fn generic_product_dilation(p: &ICProtocol, r: &GptState) -> Result<GptState> {
    let a = p.system_a();
    let ip = a.state_cone.interior_point()?;
    let sigma = ip.scaled(1.0 / a.unit_effect.dot(&ip));
    let vec = p.system_ab.product_vector(&sigma, &r.vec)?;
    Ok(GptState {
        system: p.system_ab.clone(),
        vec,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AliceExact {
    pub program: ConeProgram,
    pub solution: ConeSolution,
    pub value: f64,
}

/// Optimal cheating value for Alice over all extensions `chi^j` of a common
/// B-marginal `sigma` (quantum systems only).
pub fn alice_exact_program(p: &ICProtocol) -> Result<ConeProgram> {
    if !p.is_quantum() {
        return Err(Error::UnsupportedTheory(format!(
            "exact cheating for Alice is only available for quantum systems, not {}",
            p.system_ab.label
        )));
    }
    let b = p.system_b();
    let (dab, db, n) = (p.system_ab.dim(), b.dim(), p.n);
    // columns of the marginal map applied to the coordinate basis
    let mut tr_a = DMatrix::zeros(db, dab);
    for k in 0..dab {
        let mut e = ConeVector::zeros(dab);
        e.0[k] = 1.0;
        let m = p.system_ab.marginal_vector(&e, Keep::B)?;
        tr_a.column_mut(k).copy_from_slice(m.coords());
    }
    let vars = n * dab + db;
    let rows = n * db + 1;
    let mut phi = DMatrix::zeros(rows, vars);
    for j in 0..n {
        phi.view_mut((j * db, j * dab), (db, dab)).copy_from(&tr_a);
        for i in 0..db {
            phi[(j * db + i, n * dab + i)] = -1.0;
        }
    }
    for i in 0..db {
        phi[(rows - 1, n * dab + i)] = b.unit_effect.0[i];
    }
    let mut rhs = vec![0.0; rows];
    rhs[rows - 1] = 1.0;
    let mut c: Vec<f64> = p
        .accept_effects
        .iter()
        .flat_map(|e| e.scaled(1.0 / n as f64).0)
        .collect();
    c.extend(std::iter::repeat_n(0.0, db));
    let mut factors = vec![p.system_ab.state_cone.clone(); n];
    factors.push(b.state_cone.clone());
    ConeProgram::new(
        phi,
        ConeVector(rhs),
        ConeVector(c),
        ConeSpec::product(factors),
        Sense::Sup,
    )
}

pub fn alice_exact_quantum(p: &ICProtocol, opts: &SolverOptions) -> Result<AliceExact> {
    let program = alice_exact_program(p)?;
    let solution = solve(&program, opts)?.require_optimal()?;
    Ok(AliceExact {
        value: solution.primal_value,
        program,
        solution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    /// Solve the exact program for Alice when the theory is quantum.
    pub exact: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            exact: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheatDiagnostics {
    pub primal_residuals: Residuals,
    pub primal_iterations: usize,
    pub dual_residuals: Residuals,
    pub dual_iterations: usize,
    pub exact_residuals: Option<Residuals>,
    pub duality_gap: f64,
    pub dual_raw_infeasibility: f64,
    pub dual_repair_shift: f64,
    /// Worst distance of `x - rho^j / n` from `K_B` after the repair.
    pub dual_feasibility: f64,
    pub alice: AliceDiagnostics,
}

/// Named pass/fail outcome recorded in a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

pub const CHECK_PRODUCT_BOUND: &str = "product_bound";

#[derive(Debug, Clone, PartialEq)]
pub struct CheatReport {
    pub n: usize,
    pub alpha: f64,
    pub pb_primal: f64,
    pub pb_dual: f64,
    pub pb_dual_solver: f64,
    pub dual_optimal_x: ConeVector,
    pub alice_value: f64,
    pub alice_mode: AliceMode,
    pub alice_exact: Option<f64>,
    pub product: f64,
    pub product_bound_check: bool,
    pub checks: Vec<Check>,
    pub diagnostics: CheatDiagnostics,
}

impl CheatReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

/// Runs the full analysis of one protocol.
pub fn verify_tradeoff(p: &ICProtocol, opts: &AnalysisOptions) -> Result<CheatReport> {
    let alpha = honest_alpha(p)?;
    let nf = p.n as f64;
    let primal = bob_cheat_primal(p, &opts.solver)?;
    let dual = bob_cheat_dual(p, &opts.solver)?;
    let alice = alice_strategy(p, &dual.x)?;
    let exact = if opts.exact && p.is_quantum() {
        Some(alice_exact_quantum(p, &opts.solver)?)
    } else {
        None
    };

    let b = p.system_b();
    let rho = p.bob_states()?;
    let mut dual_feasibility: f64 = 0.0;
    for r in &rho {
        dual_feasibility =
            dual_feasibility.max(b.state_cone.distance(&dual.x.sub(&r.scaled(1.0 / nf)))?);
    }

    let product = alice.alice_value * dual.value;
    let bound = alpha / nf;
    let product_bound_check = product >= bound - BOUND_TOL;
    let gap = (primal.value - dual.value).abs();
    let ad = &alice.diagnostics;
    let mut checks = vec![
        Check {
            name: CHECK_PRODUCT_BOUND,
            passed: product_bound_check,
            value: product - bound,
            threshold: -BOUND_TOL,
        },
        Check {
            name: "strong_duality",
            passed: gap <= 1e-5,
            value: gap,
            threshold: 1e-5,
        },
        Check {
            name: "dual_feasibility",
            passed: dual_feasibility <= 1e-8,
            value: dual_feasibility,
            threshold: 1e-8,
        },
        Check {
            name: "dilation_nonnegativity",
            passed: ad.min_accept_on_dilation >= -1e-10,
            value: ad.min_accept_on_dilation,
            threshold: -1e-10,
        },
        Check {
            name: "chi_normalization",
            passed: ad.chi_normalization <= 1e-8,
            value: ad.chi_normalization,
            threshold: 1e-8,
        },
        Check {
            name: "chi_marginal",
            passed: ad.chi_marginal <= 1e-8,
            value: ad.chi_marginal,
            threshold: 1e-8,
        },
        Check {
            name: "alice_lower_bound",
            passed: alice.alice_value >= alpha / (nf * dual.value) - 1e-8,
            value: alice.alice_value - alpha / (nf * dual.value),
            threshold: -1e-8,
        },
    ];
    if alice.mode == AliceMode::Constructive {
        checks.push(Check {
            name: "steering_residual",
            passed: ad.steering_residual <= 1e-8,
            value: ad.steering_residual,
            threshold: 1e-8,
        });
        checks.push(Check {
            name: "choice_invariance",
            passed: ad.choice_spread <= 1e-8,
            value: ad.choice_spread,
            threshold: 1e-8,
        });
    }
    if let Some(ex) = &exact {
        checks.push(Check {
            name: "sandwich",
            passed: alice.alice_value <= ex.value + 1e-6 && ex.value <= 1.0 + 1e-6,
            value: alice.alice_value - ex.value,
            threshold: 1e-6,
        });
    }

    Ok(CheatReport {
        n: p.n,
        alpha,
        pb_primal: primal.value,
        pb_dual: dual.value,
        pb_dual_solver: dual.solver_value,
        dual_optimal_x: dual.x.clone(),
        alice_value: alice.alice_value,
        alice_mode: alice.mode,
        alice_exact: exact.as_ref().map(|e| e.value),
        product,
        product_bound_check,
        checks,
        diagnostics: CheatDiagnostics {
            primal_residuals: primal.solution.residuals,
            primal_iterations: primal.solution.iterations,
            dual_residuals: dual.solution.residuals,
            dual_iterations: dual.solution.iterations,
            exact_residuals: exact.as_ref().map(|e| e.solution.residuals),
            duality_gap: gap,
            dual_raw_infeasibility: dual.raw_infeasibility,
            dual_repair_shift: dual.repair_shift,
            dual_feasibility,
            alice: alice.diagnostics,
        },
    })
}
