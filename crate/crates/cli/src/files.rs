//! On-disk formats for protocols and cone programs.
//!
//! Both are JSON. Structs serialize their fields in declaration order,
//! so writing the same value twice gives the same bytes.

use conecommit::commitment::presets::{bipartite, Preset};
use conecommit::commitment::{honest_alpha, ICProtocol};
use conecommit::gpt::{GptSystem, MatrixShape, Theory};
use conecommit::linalg::CMatrix;
use conecommit::{CompositionRule, ConeProgram, ConeSpec, ConeVector, Error, Sense};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: &str = "conecommit-protocol/1";
pub const PROGRAM_VERSION: &str = "conecommit-program/1";

/// Declared alpha must agree with the computed one this closely.
pub const ALPHA_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;

/// Why a file could not be turned into a protocol or program.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadError {
    /// Malformed JSON, wrong shapes or unknown fields.
    Parse(String),
    /// Well-formed input describing an invalid protocol.
    Invalid(Error),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Parse(msg) => write!(f, "{msg}"),
            Self::Invalid(e) => write!(f, "{e}"),
        }
    }
}

fn parse_err(msg: impl Into<String>) -> LoadError {
    LoadError::Parse(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectSet {
    #[default]
    Full,
    /// Only multiples of the unit effect.
    Trivial,
}

impl EffectSet {
    fn is_full(&self) -> bool {
        *self == Self::Full
    }
}

/// A state or effect: a row-major matrix for quantum-type composites, a flat
/// coordinate vector otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Matrix {
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub version: String,
    /// Theory of B, and of A unless `theory_a` is given.
    pub theory: Theory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory_a: Option<Theory>,
    pub dim_a: usize,
    pub dim_b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<CompositionRule>,
    #[serde(default, skip_serializing_if = "EffectSet::is_full")]
    pub b_effects: EffectSet,
    pub n: usize,
    pub states: Vec<Entry>,
    pub accept_effects: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl ProtocolFile {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("protocol files serialize");
        s.push('\n');
        s
    }

    pub fn theory_a(&self) -> Theory {
        self.theory_a.unwrap_or(self.theory)
    }

    pub fn system(&self) -> Result<GptSystem, LoadError> {
        let sys = bipartite(
            self.theory_a(),
            self.dim_a,
            self.theory,
            self.dim_b,
            self.rule,
        )
        .map_err(LoadError::Invalid)?;
        match self.b_effects {
            EffectSet::Full => Ok(sys),
            EffectSet::Trivial => {
                let b = sys
                    .factors()
                    .and_then(|(_, b)| b.with_trivial_effects())
                    .map_err(LoadError::Invalid)?;
                sys.with_factor_b(b).map_err(LoadError::Invalid)
            }
        }
    }

    pub fn to_protocol(&self) -> Result<ICProtocol, LoadError> {
        if self.version != PROTOCOL_VERSION {
            return Err(parse_err(format!(
                "version: expected {PROTOCOL_VERSION:?}, found {:?}",
                self.version
            )));
        }
        if self.states.len() != self.n {
            return Err(parse_err(format!(
                "states: expected {} entries, found {}",
                self.n,
                self.states.len()
            )));
        }
        if self.accept_effects.len() != self.n {
            return Err(parse_err(format!(
                "accept_effects: expected {} entries, found {}",
                self.n,
                self.accept_effects.len()
            )));
        }
        if let Some(a) = self.alpha {
            if a <= 0.5 {
                return Err(LoadError::Invalid(Error::InvalidProtocol(format!(
                    "declared alpha {a} does not exceed 1/2"
                ))));
            }
        }
        let sys = self.system()?;
        let decode = |field: &str, entries: &[Entry]| -> Result<Vec<ConeVector>, LoadError> {
            entries
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    decode_entry(&sys, e).map_err(|err| prefix(err, &format!("{field}[{j}]")))
                })
                .collect()
        };
        let states = decode("states", &self.states)?;
        let effects = decode("accept_effects", &self.accept_effects)?;
        let p = ICProtocol::new(sys, states, effects).map_err(LoadError::Invalid)?;
        if let Some(declared) = self.alpha {
            let alpha = honest_alpha(&p).map_err(LoadError::Invalid)?;
            if (declared - alpha).abs() > ALPHA_TOL {
                return Err(LoadError::Invalid(Error::InvalidProtocol(format!(
                    "declared alpha {declared} differs from computed {alpha}"
                ))));
            }
        }
        Ok(p)
    }

    /// File describing a preset protocol.
    pub fn from_preset(preset: Preset) -> conecommit::Result<Self> {
        let p = preset.build()?;
        let (theory, theory_a, dim_a, dim_b, rule, b_effects) = match preset {
            Preset::Identical { d, .. } => (Theory::Quantum, None, d, d, None, EffectSet::Full),
            Preset::ClassicalOrthogonal { n } => {
                (Theory::Classical, None, n, n, None, EffectSet::Full)
            }
            Preset::QubitHelstrom | Preset::Bb84Style => {
                (Theory::Quantum, None, 2, 2, None, EffectSet::Full)
            }
            Preset::RandomQuantum { dim_a, dim_b, .. } => {
                (Theory::Quantum, None, dim_a, dim_b, None, EffectSet::Full)
            }
            Preset::GbitPair => (
                Theory::Gbit,
                Some(Theory::Classical),
                2,
                3,
                Some(CompositionRule::Min),
                EffectSet::Full,
            ),
            Preset::RestrictedQuantum { n } => {
                (Theory::Quantum, None, n, n, None, EffectSet::Trivial)
            }
        };
        let shape = p.system_ab.matrix_shape();
        let encode = |v: &ConeVector| encode_entry(shape, v);
        Ok(Self {
            version: PROTOCOL_VERSION.into(),
            theory,
            theory_a,
            dim_a,
            dim_b,
            rule,
            b_effects,
            n: p.n,
            states: p.committed_states.iter().map(|s| encode(&s.vec)).collect(),
            accept_effects: p.accept_effects.iter().map(encode).collect(),
            alpha: Some(honest_alpha(&p)?),
        })
    }
}

fn prefix(err: LoadError, field: &str) -> LoadError {
    match err {
        LoadError::Parse(m) => LoadError::Parse(format!("{field}: {m}")),
        LoadError::Invalid(Error::InvalidProtocol(m)) => {
            LoadError::Invalid(Error::InvalidProtocol(format!("{field}: {m}")))
        }
        other => other,
    }
}

fn encode_entry(shape: Option<MatrixShape>, v: &ConeVector) -> Entry {
    match shape {
        Some(shape) => {
            let m = shape.to_matrix(v);
            let n = shape.n;
            let re = (0..n * n).map(|k| m[(k / n, k % n)].re).collect();
            let im = (!shape.real).then(|| (0..n * n).map(|k| m[(k / n, k % n)].im).collect());
            Entry::Matrix { re, im }
        }
        None => Entry::Vector(v.0.clone()),
    }
}

fn decode_entry(sys: &GptSystem, e: &Entry) -> Result<ConeVector, LoadError> {
    match (sys.matrix_shape(), e) {
        (Some(shape), Entry::Matrix { re, im }) => {
            let n = shape.n;
            if re.len() != n * n {
                return Err(parse_err(format!(
                    "re: expected {} entries, found {}",
                    n * n,
                    re.len()
                )));
            }
            let im = match (im, shape.real) {
                (Some(im), false) if im.len() == n * n => im.clone(),
                (Some(im), false) => {
                    return Err(parse_err(format!(
                        "im: expected {} entries, found {}",
                        n * n,
                        im.len()
                    )))
                }
                (None, false) => return Err(parse_err("im: missing for a complex quantum system")),
                (Some(_), true) => {
                    return Err(parse_err("im: not allowed for a real quantum system"))
                }
                (None, true) => vec![0.0; n * n],
            };
            let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i * n + j], im[i * n + j]));
            let asym = (&m - m.adjoint()).norm();
            if asym > HERMITIAN_TOL * m.norm().max(1.0) {
                return Err(LoadError::Invalid(Error::InvalidProtocol(format!(
                    "matrix is not Hermitian (defect {asym:.3e})"
                ))));
            }
            Ok(shape.to_vector(&m))
        }
        (None, Entry::Vector(v)) if v.len() == sys.dim() => Ok(ConeVector(v.clone())),
        (None, Entry::Vector(v)) => Err(parse_err(format!(
            "expected {} coordinates, found {}",
            sys.dim(),
            v.len()
        ))),
        (Some(_), Entry::Vector(_)) => Err(parse_err(
            "expected a matrix {re, im} for a quantum-type system",
        )),
        (None, Entry::Matrix { .. }) => Err(parse_err(
            "expected a coordinate array for a non-quantum system",
        )),
    }
}

/// `sense` optimum of `<c, x>` subject to `phi x = b`, `x` in `cone`, with
/// `phi` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    pub version: String,
    pub sense: Sense,
    pub cone: ConeSpec,
    pub rows: usize,
    pub cols: usize,
    pub phi: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ProgramFile {
    pub fn from_program(p: &ConeProgram) -> Self {
        let (rows, cols) = p.phi.shape();
        Self {
            version: PROGRAM_VERSION.into(),
            sense: p.sense,
            cone: p.cone.clone(),
            rows,
            cols,
            phi: (0..rows * cols)
                .map(|k| p.phi[(k / cols, k % cols)])
                .collect(),
            b: p.b.0.clone(),
            c: p.c.0.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("program files serialize");
        s.push('\n');
        s
    }

    pub fn to_program(&self) -> Result<ConeProgram, LoadError> {
        if self.version != PROGRAM_VERSION {
            return Err(parse_err(format!(
                "version: expected {PROGRAM_VERSION:?}, found {:?}",
                self.version
            )));
        }
        if self.phi.len() != self.rows * self.cols {
            return Err(parse_err(format!(
                "phi: expected {} entries, found {}",
                self.rows * self.cols,
                self.phi.len()
            )));
        }
        let phi = DMatrix::from_row_slice(self.rows, self.cols, &self.phi);
        ConeProgram::new(
            phi,
            ConeVector(self.b.clone()),
            ConeVector(self.c.clone()),
            self.cone.clone(),
            self.sense,
        )
        .map_err(|e| parse_err(e.to_string()))
    }
}
