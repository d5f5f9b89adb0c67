//! GPT systems: a state cone, an effect cone and a unit effect.
//!
//! Effects are always stored in vector form, so evaluating an effect on a
//! state is a dot product.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{
    tensor_compose, tensor_vectors, CompositionRule, ConeSpec, ConeVector, DEFAULT_TOL,
};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Keep};

/// Tolerance for measurement completeness and normalization.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GptSystem {
    pub label: String,
    pub state_cone: ConeSpec,
    pub effect_cone: ConeSpec,
    pub unit_effect: ConeVector,
    pub composite: Option<Composite>,
}

/// Factor metadata of a composite `A (x) B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Composite {
    pub a: Box<GptSystem>,
    pub b: Box<GptSystem>,
    pub rule: CompositionRule,
}

/// Matrix layout of a PSD system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixShape {
    pub n: usize,
    pub real: bool,
}

impl MatrixShape {
    pub fn to_matrix(&self, v: &ConeVector) -> linalg::CMatrix {
        if self.real {
            linalg::to_complex(&linalg::unvectorize_symmetric(v.coords(), self.n))
        } else {
            linalg::unvectorize_hermitian(v.coords(), self.n)
        }
    }

    pub fn to_vector(&self, m: &linalg::CMatrix) -> ConeVector {
        if self.real {
            ConeVector::from_symmetric(&linalg::real_part(m))
        } else {
            ConeVector::from_hermitian(m)
        }
    }
}

impl GptSystem {
    pub fn dim(&self) -> usize {
        self.state_cone.ambient_dim()
    }

    /// Matrix layout when the state cone is a PSD cone.
    pub fn matrix_shape(&self) -> Option<MatrixShape> {
        match self.state_cone {
            ConeSpec::PsdComplex { n } => Some(MatrixShape { n, real: false }),
            ConeSpec::PsdReal { n } => Some(MatrixShape { n, real: true }),
            _ => None,
        }
    }

    /// Quantum or real-quantum: PSD states, and quantum composition all the way down.
    pub fn is_quantum(&self) -> bool {
        self.matrix_shape().is_some()
            && self.composite.as_ref().is_none_or(|c| {
                c.a.matrix_shape().is_some()
                    && c.b.matrix_shape().is_some()
                    && c.rule == CompositionRule::Quantum
            })
    }

    pub fn factors(&self) -> Result<(&GptSystem, &GptSystem)> {
        self.composite
            .as_ref()
            .map(|c| (c.a.as_ref(), c.b.as_ref()))
            .ok_or_else(|| {
                Error::ContractViolation(format!("{} is not a composite system", self.label))
            })
    }

    /// Same system with its effects restricted to multiples of the unit.
    pub fn with_trivial_effects(&self) -> Result<GptSystem> {
        let mut sys = self.clone();
        sys.effect_cone = ConeSpec::polyhedral_v(vec![self.unit_effect.0.clone()])?;
        sys.label = format!("{} [trivial effects]", self.label);
        Ok(sys)
    }

    /// Replaces the B factor metadata of a composite (cones of the composite
    /// itself are left alone).
    pub fn with_factor_b(&self, b: GptSystem) -> Result<GptSystem> {
        let (_, old) = self.factors()?;
        check_dim(old.dim(), b.dim())?;
        let mut sys = self.clone();
        if let Some(c) = sys.composite.as_mut() {
            *c.b = b;
        }
        Ok(sys)
    }

    pub fn state(self: &Arc<Self>, vec: ConeVector) -> Result<GptState> {
        GptState::new(self.clone(), vec)
    }

    /// `v` evaluated by the unit effect on the discarded factor.
    pub fn marginal_vector(&self, v: &ConeVector, keep: Keep) -> Result<ConeVector> {
        check_dim(self.dim(), v.len())?;
        let c = self.composite.as_ref().ok_or_else(|| {
            Error::ContractViolation(format!("marginal of a non-composite system {}", self.label))
        })?;
        if let (Some(sa), Some(sb), CompositionRule::Quantum) =
            (c.a.matrix_shape(), c.b.matrix_shape(), c.rule)
        {
            let shape = self
                .matrix_shape()
                .expect("quantum composite has PSD states");
            let m = shape.to_matrix(v);
            let reduced = linalg::partial_trace(&m, sa.n, sb.n, keep);
            return Ok(match keep {
                Keep::A => sa.to_vector(&reduced),
                Keep::B => sb.to_vector(&reduced),
            });
        }
        // kron layout: v[i * db + j]
        let (da, db) = (c.a.dim(), c.b.dim());
        let (ua, ub) = (c.a.unit_effect.coords(), c.b.unit_effect.coords());
        let x = v.coords();
        Ok(ConeVector(match keep {
            Keep::A => (0..da)
                .map(|i| linalg::dot(&x[i * db..(i + 1) * db], ub))
                .collect(),
            Keep::B => (0..db)
                .map(|j| (0..da).map(|i| x[i * db + j] * ua[i]).sum())
                .collect(),
        }))
    }

    /// `a (x) b` in this composite's coordinates.
    pub fn product_vector(&self, a: &ConeVector, b: &ConeVector) -> Result<ConeVector> {
        let c = self.composite.as_ref().ok_or_else(|| {
            Error::ContractViolation(format!(
                "product vector on a non-composite system {}",
                self.label
            ))
        })?;
        tensor_vectors(&c.a.state_cone, &c.b.state_cone, c.rule, a, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GptState {
    pub system: Arc<GptSystem>,
    pub vec: ConeVector,
}

impl GptState {
    /// Checks membership in the state cone (default tolerance).
    pub fn new(system: Arc<GptSystem>, vec: ConeVector) -> Result<Self> {
        check_dim(system.dim(), vec.len())?;
        if !system.state_cone.contains(&vec, DEFAULT_TOL)? {
            return Err(Error::ContractViolation(format!(
                "vector is not in the state cone of {}",
                system.label
            )));
        }
        Ok(Self { system, vec })
    }

    pub fn normalization(&self) -> f64 {
        self.system.unit_effect.dot(&self.vec)
    }

    pub fn is_physical(&self) -> bool {
        (self.normalization() - 1.0).abs() <= DEFAULT_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GptMeasurement {
    pub system: Arc<GptSystem>,
    pub effects: Vec<ConeVector>,
}

impl GptMeasurement {
    /// Each effect must lie in the effect cone and the effects must sum to
    /// the unit effect within [`NORMALIZATION_TOL`].
    pub fn new(system: Arc<GptSystem>, effects: Vec<ConeVector>) -> Result<Self> {
        let mut total = ConeVector::zeros(system.dim());
        for e in &effects {
            check_dim(system.dim(), e.len())?;
            if !system.effect_cone.contains(e, DEFAULT_TOL)? {
                return Err(Error::ContractViolation(format!(
                    "effect outside the effect cone of {}",
                    system.label
                )));
            }
            total = total.add(e);
        }
        let defect = total.sub(&system.unit_effect).norm();
        if defect > NORMALIZATION_TOL {
            return Err(Error::ContractViolation(format!(
                "effects sum to the unit only within {defect:.3e}"
            )));
        }
        Ok(Self { system, effects })
    }

    pub fn probabilities(&self, s: &GptState) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| evaluate(e, s)).collect()
    }
}

/// Outcome probability `e[s]`.
pub fn evaluate(e: &ConeVector, s: &GptState) -> Result<f64> {
    check_dim(s.vec.len(), e.len())?;
    Ok(e.dot(&s.vec))
}

/// Reduced state on one factor of a composite.
pub fn marginal(s: &GptState, keep: Keep) -> Result<GptState> {
    let (a, b) = s.system.factors()?;
    let factor = match keep {
        Keep::A => a,
        Keep::B => b,
    };
    let vec = s.system.marginal_vector(&s.vec, keep)?;
    Ok(GptState {
        system: Arc::new(factor.clone()),
        vec,
    })
}

/// Composite system `A (x) B`. Effects compose under the dual rule, and the
/// unit is `u_A (x) u_B`.
pub fn compose(a: &GptSystem, b: &GptSystem, rule: CompositionRule) -> Result<GptSystem> {
    let state_cone = tensor_compose(&a.state_cone, &b.state_cone, rule)?;
    let effect_cone = tensor_compose(&a.effect_cone, &b.effect_cone, rule.dual())?;
    let unit_effect = tensor_vectors(
        &a.effect_cone,
        &b.effect_cone,
        rule,
        &a.unit_effect,
        &b.unit_effect,
    )?;
    let sys = GptSystem {
        label: format!("{} (x) {}", a.label, b.label),
        state_cone,
        effect_cone,
        unit_effect,
        composite: Some(Composite {
            a: Box::new(a.clone()),
            b: Box::new(b.clone()),
            rule,
        }),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..8 {
        let (s, t) = (
            a.state_cone.sample(&mut rng)?,
            b.state_cone.sample(&mut rng)?,
        );
        let (e, f) = (
            a.effect_cone.sample(&mut rng)?,
            b.effect_cone.sample(&mut rng)?,
        );
        let st = sys.product_vector(&s, &t)?;
        let ef = tensor_vectors(&a.effect_cone, &b.effect_cone, rule, &e, &f)?;
        let err = (ef.dot(&st) - e.dot(&s) * f.dot(&t)).abs();
        if err > 1e-10 {
            return Err(Error::NumericalFailure {
                what: "product evaluation".into(),
                residual: err,
            });
        }
    }
    Ok(sys)
}

pub fn quantum_system(d: usize) -> GptSystem {
    let cone = ConeSpec::psd_complex(d);
    GptSystem {
        label: format!("quantum({d})"),
        unit_effect: cone.interior_point().expect("psd interior point"),
        state_cone: cone.clone(),
        effect_cone: cone,
        composite: None,
    }
}

pub fn real_quantum_system(d: usize) -> GptSystem {
    let cone = ConeSpec::psd_real(d);
    GptSystem {
        label: format!("real_quantum({d})"),
        unit_effect: cone.interior_point().expect("psd interior point"),
        state_cone: cone.clone(),
        effect_cone: cone,
        composite: None,
    }
}

pub fn classical_system(d: usize) -> GptSystem {
    let cone = ConeSpec::orthant(d);
    GptSystem {
        label: format!("classical({d})"),
        unit_effect: ConeVector(vec![1.0; d]),
        state_cone: cone.clone(),
        effect_cone: cone,
        composite: None,
    }
}

/// Square state space: extremal states `(1, +-1, +-1)`, unit `(1, 0, 0)`.
pub fn gbit_system() -> GptSystem {
    let state_cone = ConeSpec::polyhedral_v(vec![
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, -1.0],
        vec![1.0, -1.0, 1.0],
        vec![1.0, -1.0, -1.0],
    ])
    .expect("square generators");
    let effect_gens = state_cone
        .dual_cone()
        .and_then(|d| d.generators())
        .expect("double description of the square cone");
    GptSystem {
        label: "gbit".into(),
        state_cone,
        effect_cone: ConeSpec::polyhedral_v(effect_gens).expect("square effects"),
        unit_effect: ConeVector(vec![1.0, 0.0, 0.0]),
        composite: None,
    }
}

/// Named single-system theories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theory {
    Quantum,
    RealQuantum,
    Classical,
    Gbit,
}

impl Theory {
    /// System of the given Hilbert-space (quantum) or ambient (classical) dimension.
    pub fn system(self, d: usize) -> Result<GptSystem> {
        if d == 0 {
            return Err(Error::ContractViolation(
                "system dimension must be positive".into(),
            ));
        }
        match self {
            Self::Quantum => Ok(quantum_system(d)),
            Self::RealQuantum => Ok(real_quantum_system(d)),
            Self::Classical => Ok(classical_system(d)),
            Self::Gbit if d == 3 => Ok(gbit_system()),
            Self::Gbit => Err(Error::ContractViolation(format!(
                "a gbit has dimension 3, not {d}"
            ))),
        }
    }

    pub fn default_rule(self) -> CompositionRule {
        match self {
            Self::Quantum | Self::RealQuantum => CompositionRule::Quantum,
            Self::Classical | Self::Gbit => CompositionRule::Min,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Quantum => "quantum",
            Self::RealQuantum => "real_quantum",
            Self::Classical => "classical",
            Self::Gbit => "gbit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation seen (0 when none).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub label: String,
    pub checks: Vec<CheckOutcome>,
    /// Some element of the dual of the state cone is not an allowed effect.
    pub restricted_effects: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn no_restriction(&self) -> bool {
        self.check(CHECK_NO_RESTRICTION).is_some_and(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

pub const CHECK_DIMENSIONS: &str = "dimensions_equal";
pub const CHECK_UNIT_INTERIOR: &str = "unit_interior";
pub const CHECK_UNIT_POSITIVE: &str = "unit_positive_on_states";
pub const CHECK_EFFECTS_IN_DUAL: &str = "effects_in_dual_of_states";
pub const CHECK_STATES_IN_DUAL: &str = "states_in_dual_of_effects";
pub const CHECK_NO_RESTRICTION: &str = "no_restriction";

/// Sample-based check of the system axioms.
pub fn validate_system(sys: &GptSystem, opts: &ValidationOptions) -> ValidationReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tol = opts.tol;

    let dims_ok = sys.state_cone.ambient_dim() == sys.effect_cone.ambient_dim()
        && sys.unit_effect.len() == sys.state_cone.ambient_dim();
    checks.push(CheckOutcome {
        name: CHECK_DIMENSIONS,
        passed: dims_ok,
        worst: 0.0,
    });
    if !dims_ok {
        return ValidationReport {
            label: sys.label.clone(),
            checks,
            restricted_effects: false,
        };
    }

    let margin = 1e-9 * sys.unit_effect.norm().max(1.0);
    let interior = sys
        .effect_cone
        .is_interior(&sys.unit_effect, margin)
        .unwrap_or(false);
    checks.push(CheckOutcome {
        name: CHECK_UNIT_INTERIOR,
        passed: interior,
        worst: 0.0,
    });

    // Worst violation over samples drawn from `from` of membership in `into`.
    let mut worst_outside =
        |from: &ConeSpec, into: &Option<ConeSpec>, pairwise: &ConeSpec| -> f64 {
            let mut worst: f64 = 0.0;
            for _ in 0..opts.samples {
                let Ok(x) = from.sample(&mut rng) else {
                    return f64::INFINITY;
                };
                let d = match into {
                    Some(cone) => cone.distance(&x).unwrap_or(f64::INFINITY),
                    None => {
                        // no dual representation available: test against samples
                        let mut inner_rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
                        (0..opts.samples)
                            .filter_map(|_| pairwise.sample(&mut inner_rng).ok())
                            .map(|y| (-x.dot(&y)).max(0.0))
                            .fold(0.0, f64::max)
                    }
                };
                worst = worst.max(d);
            }
            worst
        };

    let dual_states = sys.state_cone.dual_cone().ok();
    let dual_effects = sys.effect_cone.dual_cone().ok();

    let mut positive_worst: f64 = 0.0;
    {
        let mut r = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
        for _ in 0..opts.samples {
            if let Ok(s) = sys.state_cone.sample(&mut r) {
                if s.norm() > 0.0 {
                    positive_worst = positive_worst.max(tol - sys.unit_effect.dot(&s));
                }
            }
        }
    }
    checks.push(CheckOutcome {
        name: CHECK_UNIT_POSITIVE,
        passed: positive_worst <= 0.0,
        worst: positive_worst.max(0.0),
    });

    let w = worst_outside(&sys.effect_cone, &dual_states, &sys.state_cone);
    checks.push(CheckOutcome {
        name: CHECK_EFFECTS_IN_DUAL,
        passed: w <= tol,
        worst: w,
    });
    let w = worst_outside(&sys.state_cone, &dual_effects, &sys.effect_cone);
    checks.push(CheckOutcome {
        name: CHECK_STATES_IN_DUAL,
        passed: w <= tol,
        worst: w,
    });

    let nr = match (&dual_states, &dual_effects) {
        (Some(ds), Some(de)) => {
            let effects = Some(sys.effect_cone.clone());
            let states = Some(sys.state_cone.clone());
            worst_outside(ds, &effects, &sys.effect_cone).max(worst_outside(
                de,
                &states,
                &sys.state_cone,
            ))
        }
        _ => f64::INFINITY,
    };
    checks.push(CheckOutcome {
        name: CHECK_NO_RESTRICTION,
        passed: nr <= tol,
        worst: nr,
    });

    ValidationReport {
        label: sys.label.clone(),
        checks,
        restricted_effects: nr > tol,
    }
}
