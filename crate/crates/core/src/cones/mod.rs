//! Closed convex cones in finite-dimensional real inner-product spaces.
//!
//! Every cone lives in `R^ambient_dim` with the standard dot product. PSD
//! cones use the orthonormal coordinates from [`crate::linalg`], so the dot
//! product of two coordinate vectors is the trace inner product of the
//! matrices they represent.

mod dd;
mod nnls;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, CMatrix};

pub use dd::{MAX_DIM as DD_MAX_DIM, MAX_RAYS as DD_MAX_RAYS};

/// Default membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A point of `R^ambient_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConeVector(pub Vec<f64>);

impl ConeVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &ConeVector) -> f64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn scaled(&self, s: f64) -> ConeVector {
        ConeVector(linalg::scale(&self.0, s))
    }

    pub fn add(&self, other: &ConeVector) -> ConeVector {
        ConeVector(linalg::add(&self.0, &other.0))
    }

    pub fn sub(&self, other: &ConeVector) -> ConeVector {
        ConeVector(linalg::sub(&self.0, &other.0))
    }

    /// Coordinates of a Hermitian matrix.
    pub fn from_hermitian(m: &CMatrix) -> Self {
        Self(linalg::vectorize_hermitian(m))
    }

    /// Coordinates of a real symmetric matrix.
    pub fn from_symmetric(m: &DMatrix<f64>) -> Self {
        Self(linalg::vectorize_symmetric(m))
    }

    pub(crate) fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl From<Vec<f64>> for ConeVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// How two cones are combined into the cone of a composite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionRule {
    /// Generated by products of generators (separable composite).
    Min,
    /// Dual of the min composite of the dual cones.
    Max,
    /// PSD cone on the tensor-product Hilbert space.
    Quantum,
}

impl CompositionRule {
    /// Rule used for the effect cones when states compose under `self`.
    pub fn dual(self) -> Self {
        match self {
            Self::Min => Self::Max,
            Self::Max => Self::Min,
            Self::Quantum => Self::Quantum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    /// Nonnegative orthant of `R^dim`.
    Orthant {
        dim: usize,
    },
    /// Real symmetric PSD `n x n` matrices.
    PsdReal {
        n: usize,
    },
    /// Complex Hermitian PSD `n x n` matrices.
    PsdComplex {
        n: usize,
    },
    /// Conic hull of the generators. An empty list is the zero cone.
    PolyhedralV {
        dim: usize,
        generators: Vec<Vec<f64>>,
    },
    /// `{x : h . x >= 0}` for every listed covector `h`.
    PolyhedralH {
        dim: usize,
        inequalities: Vec<Vec<f64>>,
    },
    Product {
        factors: Vec<ConeSpec>,
    },
}

impl ConeSpec {
    pub fn orthant(dim: usize) -> Self {
        Self::Orthant { dim }
    }

    pub fn psd_real(n: usize) -> Self {
        Self::PsdReal { n }
    }

    pub fn psd_complex(n: usize) -> Self {
        Self::PsdComplex { n }
    }

    pub fn polyhedral_v(generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = generators.first().map_or(0, Vec::len);
        Self::polyhedral_v_in(dim, generators)
    }

    pub fn polyhedral_v_in(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        let cone = Self::PolyhedralV { dim, generators };
        cone.validate()?;
        Ok(cone)
    }

    pub fn polyhedral_h(dim: usize, inequalities: Vec<Vec<f64>>) -> Result<Self> {
        let cone = Self::PolyhedralH { dim, inequalities };
        cone.validate()?;
        Ok(cone)
    }

    pub fn product(factors: Vec<ConeSpec>) -> Self {
        Self::Product { factors }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Orthant { dim } => *dim,
            Self::PsdReal { n } => linalg::symmetric_dim(*n),
            Self::PsdComplex { n } => linalg::hermitian_dim(*n),
            Self::PolyhedralV { dim, .. } | Self::PolyhedralH { dim, .. } => *dim,
            Self::Product { factors } => factors.iter().map(Self::ambient_dim).sum(),
        }
    }

    /// Checks the structural invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        let rows = match self {
            Self::Orthant { dim } if *dim == 0 => {
                return Err(Error::ContractViolation(
                    "orthant dimension must be positive".into(),
                ))
            }
            Self::PsdReal { n } | Self::PsdComplex { n } if *n == 0 => {
                return Err(Error::ContractViolation(
                    "matrix size must be positive".into(),
                ))
            }
            Self::PolyhedralV { generators, .. } => generators,
            Self::PolyhedralH { inequalities, .. } => inequalities,
            Self::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::ContractViolation("product of zero cones".into()));
                }
                return factors.iter().try_for_each(Self::validate);
            }
            _ => return Ok(()),
        };
        let dim = self.ambient_dim();
        if dim == 0 {
            return Err(Error::ContractViolation(
                "polyhedral dimension must be positive".into(),
            ));
        }
        for r in rows {
            check_dim(dim, r.len())?;
            if linalg::norm(r) == 0.0 || r.iter().any(|x| !x.is_finite()) {
                return Err(Error::ContractViolation(
                    "polyhedral generators and inequalities must be finite and nonzero".into(),
                ));
            }
        }
        Ok(())
    }

    fn check(&self, v: &ConeVector) -> Result<()> {
        check_dim(self.ambient_dim(), v.len())
    }

    /// Euclidean nearest point of the cone.
    pub fn project(&self, v: &ConeVector) -> Result<ConeVector> {
        self.check(v)?;
        let c = v.coords();
        Ok(ConeVector(match self {
            Self::Orthant { .. } => c.iter().map(|x| x.max(0.0)).collect(),
            Self::PsdReal { n } => project_psd_real(c, *n),
            Self::PsdComplex { n } => project_psd_complex(c, *n),
            Self::PolyhedralV { generators, .. } => project_generated(generators, c)?,
            Self::PolyhedralH { inequalities, .. } => {
                // Moreau: P_K(v) = v + P_{K*}(-v), and K* is generated by the rows.
                let neg: Vec<f64> = c.iter().map(|x| -x).collect();
                linalg::add(c, &project_generated(inequalities, &neg)?)
            }
            Self::Product { factors } => {
                let mut out = Vec::with_capacity(c.len());
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    out.extend(f.project(&ConeVector(c[offset..offset + d].to_vec()))?.0);
                    offset += d;
                }
                out
            }
        }))
    }

    /// Euclidean distance from `v` to the cone.
    pub fn distance(&self, v: &ConeVector) -> Result<f64> {
        Ok(v.sub(&self.project(v)?).norm())
    }

    pub fn contains(&self, v: &ConeVector, tol: f64) -> Result<bool> {
        Ok(self.distance(v)? <= tol)
    }

    pub fn dual_cone(&self) -> Result<ConeSpec> {
        Ok(match self {
            Self::Orthant { .. } | Self::PsdReal { .. } | Self::PsdComplex { .. } => self.clone(),
            Self::PolyhedralV { dim, generators } => {
                dd::check_scale(*dim, generators.len())?;
                Self::PolyhedralH {
                    dim: *dim,
                    inequalities: generators.clone(),
                }
            }
            Self::PolyhedralH { dim, inequalities } => {
                dd::check_scale(*dim, inequalities.len())?;
                Self::PolyhedralV {
                    dim: *dim,
                    generators: irredundant(inequalities)?,
                }
            }
            Self::Product { factors } => Self::Product {
                factors: factors.iter().map(Self::dual_cone).collect::<Result<_>>()?,
            },
        })
    }

    /// Generators of a finitely generated cone; H-cones go through double
    /// description. Errors for PSD kinds.
    pub fn generators(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::Orthant { dim } => Ok((0..*dim)
                .map(|i| {
                    let mut e = vec![0.0; *dim];
                    e[i] = 1.0;
                    e
                })
                .collect()),
            Self::PolyhedralV { generators, .. } => Ok(generators.clone()),
            Self::PolyhedralH { dim, inequalities } => dd::generators_of(inequalities, *dim),
            _ => Err(Error::UnsupportedCombination(format!(
                "{} is not finitely generated",
                self.kind_name()
            ))),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Orthant { .. } => "orthant",
            Self::PsdReal { .. } => "psd_real",
            Self::PsdComplex { .. } => "psd_complex",
            Self::PolyhedralV { .. } => "polyhedral_v",
            Self::PolyhedralH { .. } => "polyhedral_h",
            Self::Product { .. } => "product",
        }
    }

    pub fn is_psd(&self) -> bool {
        matches!(self, Self::PsdReal { .. } | Self::PsdComplex { .. })
    }

    /// A canonical strictly interior point.
    pub fn interior_point(&self) -> Result<ConeVector> {
        Ok(match self {
            Self::Orthant { dim } => ConeVector(vec![1.0; *dim]),
            Self::PsdReal { n } => ConeVector::from_symmetric(&DMatrix::identity(*n, *n)),
            Self::PsdComplex { n } => ConeVector::from_hermitian(&CMatrix::identity(*n, *n)),
            Self::PolyhedralV { dim, generators } => {
                let mut mean = vec![0.0; *dim];
                for g in generators {
                    mean = linalg::add(&mean, g);
                }
                let k = generators.len().max(1) as f64;
                ConeVector(linalg::scale(&mean, 1.0 / k))
            }
            Self::PolyhedralH { dim, inequalities } => {
                ConeVector(analytic_center(inequalities, *dim)?)
            }
            Self::Product { factors } => ConeVector(
                factors
                    .iter()
                    .map(Self::interior_point)
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flat_map(|v| v.0)
                    .collect(),
            ),
        })
    }

    /// Whether the closed ball of radius `margin` around `v` lies in the cone.
    /// Exact for every kind except V-cones, which are probed along the
    /// coordinate axes.
    pub fn is_interior(&self, v: &ConeVector, margin: f64) -> Result<bool> {
        self.check(v)?;
        let c = v.coords();
        Ok(match self {
            Self::Orthant { .. } => c.iter().all(|&x| x > margin),
            Self::PsdReal { n } => {
                let m = linalg::unvectorize_symmetric(c, *n);
                SymmetricEigen::new(m).eigenvalues.min() > margin
            }
            Self::PsdComplex { n } => min_eigenvalue_hermitian(c, *n) > margin,
            Self::PolyhedralH { inequalities, .. } => inequalities
                .iter()
                .all(|h| linalg::dot(h, c) / linalg::norm(h) > margin),
            Self::PolyhedralV { .. } => {
                for k in 0..c.len() {
                    for sign in [1.0, -1.0] {
                        let mut p = c.to_vec();
                        p[k] += sign * margin;
                        if !self.contains(&ConeVector(p), 1e-12)? {
                            return Ok(false);
                        }
                    }
                }
                true
            }
            Self::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    if !f.is_interior(&ConeVector(c[offset..offset + d].to_vec()), margin)? {
                        return Ok(false);
                    }
                    offset += d;
                }
                true
            }
        })
    }

    /// Smallest `t >= 0` with `v + t * dir` in the cone, for `dir` interior.
    pub fn shift_into(&self, v: &ConeVector, dir: &ConeVector) -> Result<f64> {
        self.check(v)?;
        self.check(dir)?;
        match self {
            Self::Orthant { .. } => Ok(v
                .coords()
                .iter()
                .zip(dir.coords())
                .filter(|(_, &d)| d > 0.0)
                .map(|(&x, &d)| -x / d)
                .fold(0.0, f64::max)),
            Self::PolyhedralH { inequalities, .. } => Ok(inequalities
                .iter()
                .filter_map(|h| {
                    let hd = linalg::dot(h, dir.coords());
                    (hd > 0.0).then(|| -linalg::dot(h, v.coords()) / hd)
                })
                .fold(0.0, f64::max)),
            Self::PsdComplex { n } | Self::PsdReal { n } if is_identity_direction(dir) => {
                let scale = dir.coords()[0] / (*n as f64).sqrt();
                let lmin = match self {
                    Self::PsdComplex { .. } => min_eigenvalue_hermitian(v.coords(), *n),
                    _ => SymmetricEigen::new(linalg::unvectorize_symmetric(v.coords(), *n))
                        .eigenvalues
                        .min(),
                };
                Ok((-lmin / scale).max(0.0))
            }
            Self::Product { factors } => {
                let mut t: f64 = 0.0;
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let sub = |x: &ConeVector| ConeVector(x.coords()[offset..offset + d].to_vec());
                    t = t.max(f.shift_into(&sub(v), &sub(dir))?);
                    offset += d;
                }
                Ok(t)
            }
            _ => self.bisect_shift(v, dir),
        }
    }

    fn bisect_shift(&self, v: &ConeVector, dir: &ConeVector) -> Result<f64> {
        let inside = |t: f64| self.contains(&v.add(&dir.scaled(t)), 1e-13);
        if inside(0.0)? {
            return Ok(0.0);
        }
        let mut hi = 1e-12;
        while !inside(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NumericalFailure {
                    what: "shift into cone".into(),
                    residual: self.distance(v)?,
                });
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Draws a point of the cone, boundary points included, with unit norm
    /// (or zero for the zero cone).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ConeVector> {
        let raw = match self {
            Self::Orthant { dim } => (0..*dim)
                .map(|_| {
                    let x: f64 = StandardNormal.sample(rng);
                    if rng.random_bool(0.2) {
                        0.0
                    } else {
                        x.abs()
                    }
                })
                .collect(),
            Self::PsdReal { n } => {
                let k = rng.random_range(1..=*n);
                let g = DMatrix::<f64>::from_fn(*n, k, |_, _| StandardNormal.sample(rng));
                linalg::vectorize_symmetric(&(&g * g.transpose()))
            }
            Self::PsdComplex { n } => {
                let k = rng.random_range(1..=*n);
                let g = CMatrix::from_fn(*n, k, |_, _| {
                    num_complex::Complex64::new(
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                    )
                });
                linalg::vectorize_hermitian(&(&g * g.adjoint()))
            }
            Self::PolyhedralV { .. } | Self::PolyhedralH { .. } => {
                let gens = self.generators()?;
                let mut v = vec![0.0; self.ambient_dim()];
                if gens.is_empty() {
                    return Ok(ConeVector(v));
                }
                let forced = rng.random_range(0..gens.len());
                for (i, g) in gens.iter().enumerate() {
                    let w: f64 = if i == forced || rng.random_bool(0.5) {
                        Exp1.sample(rng)
                    } else {
                        0.0
                    };
                    v = linalg::add(&v, &linalg::scale(g, w));
                }
                v
            }
            Self::Product { factors } => {
                let mut v = Vec::new();
                for f in factors {
                    v.extend(f.sample(rng)?.0);
                }
                v
            }
        };
        let n = linalg::norm(&raw);
        Ok(ConeVector(if n > 0.0 {
            linalg::scale(&raw, 1.0 / n)
        } else {
            raw
        }))
    }
}

/// Positive multiple of the identity in PSD coordinates.
fn is_identity_direction(dir: &ConeVector) -> bool {
    let c = dir.coords();
    c[0] > 0.0 && c[1..].iter().all(|x| x.abs() <= 1e-15 * c[0])
}

fn min_eigenvalue_hermitian(c: &[f64], n: usize) -> f64 {
    let m = linalg::unvectorize_hermitian(c, n);
    SymmetricEigen::new(m).eigenvalues.min()
}

fn project_psd_real(c: &[f64], n: usize) -> Vec<f64> {
    let m = linalg::unvectorize_symmetric(c, n);
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.min() >= 0.0 {
        return c.to_vec();
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let p = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    linalg::vectorize_symmetric(&p)
}

fn project_psd_complex(c: &[f64], n: usize) -> Vec<f64> {
    let m = linalg::unvectorize_hermitian(c, n);
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.min() >= 0.0 {
        return c.to_vec();
    }
    let clipped = eig
        .eigenvalues
        .map(|l| num_complex::Complex64::new(l.max(0.0), 0.0));
    let p = &eig.eigenvectors * CMatrix::from_diagonal(&clipped) * eig.eigenvectors.adjoint();
    linalg::vectorize_hermitian(&p)
}

fn generator_matrix(gens: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, gens.len(), |r, c| gens[c][r] / linalg::norm(&gens[c]))
}

fn project_generated(gens: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
    let dim = v.len();
    if gens.is_empty() {
        return Ok(vec![0.0; dim]);
    }
    let g = generator_matrix(gens, dim);
    let w = nnls::nnls(&g, &DVector::from_column_slice(v))?;
    Ok((g * w).iter().copied().collect())
}

/// Drops generators that lie in the cone of the remaining ones.
fn irredundant(gens: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut keep: Vec<Vec<f64>> = gens.to_vec();
    let mut i = 0;
    while i < keep.len() {
        let others: Vec<Vec<f64>> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &keep[i];
        let unit = linalg::scale(g, 1.0 / linalg::norm(g));
        let p = project_generated(&others, &unit)?;
        if linalg::norm(&linalg::sub(&p, &unit)) < 1e-10 {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(keep)
}

/// Maximizer of `sum log(h_i . x / |h_i|) - |x|^2 / 2` by damped Newton.
fn analytic_center(ineqs: &[Vec<f64>], dim: usize) -> Result<Vec<f64>> {
    let fail = |residual| Error::NumericalFailure {
        what: "analytic center".into(),
        residual,
    };
    let hs: Vec<Vec<f64>> = ineqs
        .iter()
        .map(|h| linalg::scale(h, 1.0 / linalg::norm(h)))
        .collect();
    let gens = dd::generators_of(ineqs, dim)?;
    let mut x = vec![0.0; dim];
    for g in &gens {
        x = linalg::add(&x, g);
    }
    let slack = |x: &[f64]| hs.iter().map(|h| linalg::dot(h, x)).collect::<Vec<_>>();
    if slack(&x).iter().any(|&s| s <= 1e-12) {
        return Err(fail(
            slack(&x).iter().copied().fold(f64::INFINITY, f64::min),
        ));
    }
    let objective = |x: &[f64]| -> f64 {
        slack(x).iter().map(|s| s.ln()).sum::<f64>() - 0.5 * linalg::dot(x, x)
    };
    for _ in 0..200 {
        let s = slack(&x);
        let mut grad = DVector::from_fn(dim, |i, _| -x[i]);
        let mut hess = -DMatrix::<f64>::identity(dim, dim);
        for (h, si) in hs.iter().zip(&s) {
            let hv = DVector::from_column_slice(h);
            grad += &hv / *si;
            hess -= &hv * hv.transpose() / (si * si);
        }
        if grad.norm() < 1e-12 {
            return Ok(x);
        }
        let step = (-hess)
            .cholesky()
            .ok_or_else(|| fail(grad.norm()))?
            .solve(&grad);
        let f0 = objective(&x);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            if slack(&cand).iter().all(|&v| v > 0.0)
                && objective(&cand) >= f0 + 1e-4 * t * grad.dot(&step)
            {
                x = cand;
                break;
            }
            t *= 0.5;
            if t < 1e-14 {
                return Ok(x);
            }
        }
    }
    Ok(x)
}

/// Composite cone of two factors.
pub fn tensor_compose(ka: &ConeSpec, kb: &ConeSpec, rule: CompositionRule) -> Result<ConeSpec> {
    if let ConeSpec::Orthant { dim: 1 } = ka {
        return Ok(kb.clone());
    }
    if let ConeSpec::Orthant { dim: 1 } = kb {
        return Ok(ka.clone());
    }
    match rule {
        CompositionRule::Quantum => match (ka, kb) {
            (ConeSpec::PsdComplex { n: a }, ConeSpec::PsdComplex { n: b }) => {
                Ok(ConeSpec::psd_complex(a * b))
            }
            (ConeSpec::PsdReal { n: a }, ConeSpec::PsdReal { n: b }) => {
                Ok(ConeSpec::psd_real(a * b))
            }
            _ => Err(Error::ContractViolation(format!(
                "quantum composition needs two PSD cones of the same field, got {} and {}",
                ka.kind_name(),
                kb.kind_name()
            ))),
        },
        _ if ka.is_psd()
            || kb.is_psd()
            || matches!(ka, ConeSpec::Product { .. })
            || matches!(kb, ConeSpec::Product { .. }) =>
        {
            Err(Error::UnsupportedCombination(format!(
                "{rule:?} composition needs polyhedral factors, got {} and {}",
                ka.kind_name(),
                kb.kind_name()
            )))
        }
        _ => {
            if let (ConeSpec::Orthant { dim: a }, ConeSpec::Orthant { dim: b }) = (ka, kb) {
                // simplicial cones: min and max composites coincide
                return Ok(ConeSpec::orthant(a * b));
            }
            match rule {
                CompositionRule::Min => {
                    let ga = ka.generators()?;
                    let gb = kb.generators()?;
                    let dim = ka.ambient_dim() * kb.ambient_dim();
                    let mut gens = Vec::with_capacity(ga.len() * gb.len());
                    for a in &ga {
                        for b in &gb {
                            gens.push(linalg::kron_vec(a, b));
                        }
                    }
                    ConeSpec::polyhedral_v_in(dim, gens)
                }
                _ => tensor_compose(&ka.dual_cone()?, &kb.dual_cone()?, CompositionRule::Min)?
                    .dual_cone(),
            }
        }
    }
}

/// The vector `a (x) b` in the coordinates of `tensor_compose(ka, kb, rule)`.
pub fn tensor_vectors(
    ka: &ConeSpec,
    kb: &ConeSpec,
    rule: CompositionRule,
    a: &ConeVector,
    b: &ConeVector,
) -> Result<ConeVector> {
    check_dim(ka.ambient_dim(), a.len())?;
    check_dim(kb.ambient_dim(), b.len())?;
    match (ka, kb, rule) {
        (
            ConeSpec::PsdComplex { n: na },
            ConeSpec::PsdComplex { n: nb },
            CompositionRule::Quantum,
        ) => {
            let ma = linalg::unvectorize_hermitian(a.coords(), *na);
            let mb = linalg::unvectorize_hermitian(b.coords(), *nb);
            Ok(ConeVector::from_hermitian(&linalg::kron(&ma, &mb)))
        }
        (ConeSpec::PsdReal { n: na }, ConeSpec::PsdReal { n: nb }, CompositionRule::Quantum) => {
            let ma = linalg::to_complex(&linalg::unvectorize_symmetric(a.coords(), *na));
            let mb = linalg::to_complex(&linalg::unvectorize_symmetric(b.coords(), *nb));
            Ok(ConeVector::from_symmetric(&linalg::real_part(
                &linalg::kron(&ma, &mb),
            )))
        }
        _ => Ok(ConeVector(linalg::kron_vec(a.coords(), b.coords()))),
    }
}

#[cfg(test)]
mod tests;
