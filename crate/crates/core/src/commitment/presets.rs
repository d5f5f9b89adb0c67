//! Protocol presets.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ICProtocol;
use crate::cones::{CompositionRule, ConeVector};
use crate::error::{Error, Result};
use crate::gpt::{compose, GptSystem, Theory};
use crate::linalg::{self, CMatrix, CVector};

/// Bipartite system `A (x) B`; `rule` defaults to the theory's own rule
/// (quantum composition for quantum factors, minimal otherwise).
pub fn bipartite(
    theory_a: Theory,
    dim_a: usize,
    theory_b: Theory,
    dim_b: usize,
    rule: Option<CompositionRule>,
) -> Result<GptSystem> {
    let a = theory_a.system(dim_a)?;
    let b = theory_b.system(dim_b)?;
    compose(&a, &b, rule.unwrap_or(theory_b.default_rule()))
}

fn ket(amps: &[f64]) -> CVector {
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    CVector::from_iterator(
        amps.len(),
        amps.iter().map(|&a| Complex64::new(a / norm, 0.0)),
    )
}

fn pure(amps: &[f64]) -> ConeVector {
    ConeVector::from_hermitian(&linalg::outer(&ket(amps)))
}

fn basis(d: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[j] = 1.0;
    v
}

/// Every value is committed as the same maximally entangled state on `d x d`.
pub fn identical(n: usize, d: usize) -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, d, Theory::Quantum, d, None)?;
    let mut amps = vec![0.0; d * d];
    for i in 0..d {
        amps[i * d + i] = 1.0;
    }
    let s = pure(&amps);
    ICProtocol::new(sys, vec![s.clone(); n], vec![s; n])
}

/// `s^j = e_j (x) e_j` on classical systems; Bob can read `j` directly.
pub fn classical_orthogonal(n: usize) -> Result<ICProtocol> {
    let sys = bipartite(Theory::Classical, n, Theory::Classical, n, None)?;
    let vecs: Vec<ConeVector> = (0..n)
        .map(|j| ConeVector(linalg::kron_vec(&basis(n, j), &basis(n, j))))
        .collect();
    ICProtocol::new(sys, vecs.clone(), vecs)
}

/// `s^j = |j><j| (x) |psi_j><psi_j|` with `psi_0 = |0>`, `psi_1 = |+>`.
pub fn qubit_helstrom() -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, 2, Theory::Quantum, 2, None)?;
    let states = vec![pure(&[1.0, 0.0, 0.0, 0.0]), pure(&[0.0, 0.0, 1.0, 1.0])];
    ICProtocol::new(sys, states.clone(), states)
}

/// Two maximally entangled states whose B-marginals are both `I/2`.
pub fn bb84_style() -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, 2, Theory::Quantum, 2, None)?;
    let h = FRAC_1_SQRT_2;
    // (|0+> + |1->)/sqrt(2)
    let s1 = pure(&[h, h, h, -h]);
    let states = vec![pure(&[1.0, 0.0, 0.0, 1.0]), s1];
    ICProtocol::new(sys, states.clone(), states)
}

/// Random low-rank commitments with noisy support-projector effects
/// `(1 - eta) P_j + (eta / 2) I`.
pub fn random_quantum(seed: u64, dim_a: usize, dim_b: usize, n: usize) -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, dim_a, Theory::Quantum, dim_b, None)?;
    let d = dim_a * dim_b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(n);
    let mut effects = Vec::with_capacity(n);
    for _ in 0..n {
        let rank = rng.random_range(1..=2.min(d));
        let g = CMatrix::from_fn(d, rank, |_, _| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        });
        let m = &g * g.adjoint();
        let rho = &m / linalg::trace(&m);
        let (vals, vecs) = linalg::hermitian_eigen(&rho, false);
        let support = linalg::rank(&vals);
        let v = vecs.columns(0, support);
        let proj = v * v.adjoint();
        let eta: f64 = rng.random_range(0.0..=0.5);
        let e = proj * Complex64::new(1.0 - eta, 0.0)
            + CMatrix::identity(d, d) * Complex64::new(eta / 2.0, 0.0);
        states.push(ConeVector::from_hermitian(&rho));
        effects.push(ConeVector::from_hermitian(&e));
    }
    ICProtocol::new(sys, states, effects)
}

/// Classical label on A, gbit on B with `rho^0 = (1, 1, 0)` and `rho^1 = (1, 0, 1)`.
pub fn gbit_pair() -> Result<ICProtocol> {
    let sys = bipartite(
        Theory::Classical,
        2,
        Theory::Gbit,
        3,
        Some(CompositionRule::Min),
    )?;
    let rho = [vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]];
    let unit_b = [1.0, 0.0, 0.0];
    let states = (0..2)
        .map(|j| ConeVector(linalg::kron_vec(&basis(2, j), &rho[j])))
        .collect();
    let effects = (0..2)
        .map(|j| ConeVector(linalg::kron_vec(&basis(2, j), &unit_b)))
        .collect();
    ICProtocol::new(sys, states, effects)
}

/// Quantum `|j>|j>` commitments where Bob may only apply trivial effects.
pub fn restricted_quantum(n: usize) -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, n, Theory::Quantum, n, None)?;
    let b = sys.factors()?.1.with_trivial_effects()?;
    let sys = sys.with_factor_b(b)?;
    let states: Vec<ConeVector> = (0..n)
        .map(|j| pure(&linalg::kron_vec(&basis(n, j), &basis(n, j))))
        .collect();
    ICProtocol::new(sys, states.clone(), states)
}

/// Orthogonal pure commitments held entirely by Bob (A is one-dimensional).
pub fn orthogonal_on_b(n: usize) -> Result<ICProtocol> {
    let sys = bipartite(Theory::Quantum, 1, Theory::Quantum, n, None)?;
    let states: Vec<ConeVector> = (0..n).map(|j| pure(&basis(n, j))).collect();
    ICProtocol::new(sys, states.clone(), states)
}

/// Named preset with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Identical {
        n: usize,
        d: usize,
    },
    ClassicalOrthogonal {
        n: usize,
    },
    QubitHelstrom,
    Bb84Style,
    RandomQuantum {
        seed: u64,
        dim_a: usize,
        dim_b: usize,
        n: usize,
    },
    GbitPair,
    RestrictedQuantum {
        n: usize,
    },
}

impl Preset {
    pub const NAMES: [&'static str; 7] = [
        "identical",
        "classical_orthogonal",
        "qubit_helstrom",
        "bb84_style",
        "random_quantum",
        "gbit_pair",
        "restricted_quantum",
    ];

    /// Preset by name; `n`, dims and seed fall back to small defaults.
    pub fn from_name(
        name: &str,
        n: Option<usize>,
        dim_a: Option<usize>,
        dim_b: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        Ok(match name {
            "identical" => Self::Identical {
                n: n.unwrap_or(2),
                d: dim_a.or(dim_b).unwrap_or(2),
            },
            "classical_orthogonal" => Self::ClassicalOrthogonal { n: n.unwrap_or(2) },
            "qubit_helstrom" => Self::QubitHelstrom,
            "bb84_style" => Self::Bb84Style,
            "random_quantum" => Self::RandomQuantum {
                seed,
                dim_a: dim_a.unwrap_or(2),
                dim_b: dim_b.unwrap_or(2),
                n: n.unwrap_or(2),
            },
            "gbit_pair" => Self::GbitPair,
            "restricted_quantum" => Self::RestrictedQuantum { n: n.unwrap_or(2) },
            other => {
                return Err(Error::ContractViolation(format!(
                    "unknown preset {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn build(self) -> Result<ICProtocol> {
        match self {
            Self::Identical { n, d } => identical(n, d),
            Self::ClassicalOrthogonal { n } => classical_orthogonal(n),
            Self::QubitHelstrom => qubit_helstrom(),
            Self::Bb84Style => bb84_style(),
            Self::RandomQuantum {
                seed,
                dim_a,
                dim_b,
                n,
            } => random_quantum(seed, dim_a, dim_b, n),
            Self::GbitPair => gbit_pair(),
            Self::RestrictedQuantum { n } => restricted_quantum(n),
        }
    }
}
