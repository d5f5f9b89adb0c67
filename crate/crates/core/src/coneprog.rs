//! Cone programs `sup { <c, x> : phi(x) = b, x in K }`, their duals, and a
//! first-order solver.
//!
//! The solver is ADMM over the splitting `x = z`, where `x` is kept on the
//! affine set `{phi(x) = b}` (projection through a precomputed pseudoinverse)
//! and `z` in the cone (projection oracle). At every iterate the scaled
//! multiplier gives an exact element `s = -rho * u` of the dual cone, from
//! which `y` is recovered by least squares.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::{ConeSpec, ConeVector};
use crate::error::{check_dim, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Sup,
    Inf,
}

impl Sense {
    pub fn flipped(self) -> Self {
        match self {
            Self::Sup => Self::Inf,
            Self::Inf => Self::Sup,
        }
    }
}

/// The data `(phi, b, c, K)` with the direction of optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeProgram {
    /// `dim W x dim V`.
    pub phi: DMatrix<f64>,
    pub b: ConeVector,
    pub c: ConeVector,
    pub cone: ConeSpec,
    pub sense: Sense,
}

impl ConeProgram {
    pub fn new(
        phi: DMatrix<f64>,
        b: ConeVector,
        c: ConeVector,
        cone: ConeSpec,
        sense: Sense,
    ) -> Result<Self> {
        let p = Self {
            phi,
            b,
            c,
            cone,
            sense,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.cone.validate()?;
        check_dim(self.cone.ambient_dim(), self.phi.ncols())?;
        check_dim(self.phi.ncols(), self.c.len())?;
        check_dim(self.phi.nrows(), self.b.len())?;
        Ok(())
    }

    pub fn num_constraints(&self) -> usize {
        self.phi.nrows()
    }

    pub fn num_variables(&self) -> usize {
        self.phi.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    /// Best-effort: the affine system is inconsistent, or the iterates
    /// diverge along a fixed direction (primal or dual infeasibility).
    InfeasibleDetected,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::MaxIterations => "max_iterations",
            Self::InfeasibleDetected => "infeasible_detected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    /// `|phi(x) - b|`
    pub primal: f64,
    /// `|phi*(y) - c - s|` (sup form) or `|c - phi*(y) - s|` (inf form)
    pub dual: f64,
    /// `|<c, x> - <b, y>|`
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

impl fmt::Display for Residuals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "primal {:.3e}, dual {:.3e}, gap {:.3e}",
            self.primal, self.dual, self.gap
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeSolution {
    pub x: ConeVector,
    pub y: Vec<f64>,
    pub s: ConeVector,
    pub primal_value: f64,
    pub dual_value: f64,
    pub status: SolveStatus,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl ConeSolution {
    /// Turns anything but `Optimal` into a [`Error::SolverFailure`].
    pub fn require_optimal(self) -> Result<Self> {
        if self.status == SolveStatus::Optimal {
            Ok(self)
        } else {
            Err(Error::SolverFailure {
                status: self.status.to_string(),
                residuals: self.residuals.to_string(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// The dual program, written over `(y+, y-, s)` in
/// `Orthant(m) x Orthant(m) x K*` with `y = y+ - y-`.
///
/// For a sup-form primal the result is `inf { <b, y> : phi*(y) - s = c }`;
/// for an inf-form primal it is `sup { <b, y> : phi*(y) + s = c }`.
pub fn dualize(p: &ConeProgram) -> Result<ConeProgram> {
    p.validate()?;
    let m = p.num_constraints();
    let n = p.num_variables();
    let dual_cone = p.cone.dual_cone()?;
    let at = p.phi.transpose();
    let slack_sign = match p.sense {
        Sense::Sup => -1.0,
        Sense::Inf => 1.0,
    };
    let width = 2 * m + n;
    let mut phi = DMatrix::zeros(n, width);
    if m > 0 {
        phi.view_mut((0, 0), (n, m)).copy_from(&at);
        phi.view_mut((0, m), (n, m)).copy_from(&(-&at));
    }
    phi.view_mut((0, 2 * m), (n, n))
        .copy_from(&(DMatrix::<f64>::identity(n, n) * slack_sign));

    let mut c = Vec::with_capacity(width);
    c.extend_from_slice(p.b.coords());
    c.extend(p.b.coords().iter().map(|x| -x));
    c.extend(std::iter::repeat_n(0.0, n));

    let mut factors = Vec::new();
    if m > 0 {
        factors.push(ConeSpec::orthant(m));
        factors.push(ConeSpec::orthant(m));
    }
    factors.push(dual_cone);
    ConeProgram::new(
        phi,
        p.c.clone(),
        ConeVector(c),
        ConeSpec::product(factors),
        p.sense.flipped(),
    )
}

/// Strictly interior feasible point, if the built-in construction finds one.
///
/// The construction projects the cone's canonical interior point (and a few
/// rescalings of it) onto the affine set and keeps the first result that is
/// strictly interior.
pub fn check_slater(p: &ConeProgram) -> Option<ConeVector> {
    p.validate().ok()?;
    let affine = AffineProjector::new(&p.phi, &p.b);
    if !affine.consistent {
        return None;
    }
    let seed = p.cone.interior_point().ok()?;
    for scale in [1.0, 0.1, 10.0, 100.0] {
        let x = affine.project(&(seed.to_dvector() * scale));
        let residual = (&p.phi * &x - DVector::from_column_slice(p.b.coords())).norm();
        if residual > 1e-9 * (1.0 + p.b.norm()) {
            continue;
        }
        let v = ConeVector(x.iter().copied().collect());
        let margin = 1e-9 * v.norm().max(1.0);
        if p.cone.is_interior(&v, margin).unwrap_or(false) {
            return Some(v);
        }
    }
    None
}

struct AffineProjector {
    a: DMatrix<f64>,
    pinv: DMatrix<f64>,
    b: DVector<f64>,
    consistent: bool,
}

impl AffineProjector {
    fn new(a: &DMatrix<f64>, b: &ConeVector) -> Self {
        let (m, n) = a.shape();
        let b = DVector::from_column_slice(b.coords());
        if m == 0 {
            return Self {
                a: a.clone(),
                pinv: DMatrix::zeros(n, 0),
                b,
                consistent: true,
            };
        }
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let cut = 1e-12 * smax.max(1.0) * (m.max(n) as f64);
        let pinv = svd
            .pseudo_inverse(cut)
            .unwrap_or_else(|_| DMatrix::zeros(n, m));
        let fitted = a * (&pinv * &b);
        let consistent = (fitted - &b).norm() <= 1e-9 * (1.0 + b.norm());
        Self {
            a: a.clone(),
            pinv,
            b,
            consistent,
        }
    }

    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.a.nrows() == 0 {
            return v.clone();
        }
        v - &self.pinv * (&self.a * v - &self.b)
    }
}

fn project_cone(cone: &ConeSpec, v: &DVector<f64>) -> Result<DVector<f64>> {
    let p = cone.project(&ConeVector(v.iter().copied().collect()))?;
    Ok(DVector::from_vec(p.0))
}

struct Certificate {
    y: DVector<f64>,
    s: DVector<f64>,
    primal_value: f64,
    dual_value: f64,
    residuals: Residuals,
}

/// Solves `p`; the returned status says whether the residuals met `tol`.
/// Errors are reserved for malformed programs and projection failures.
pub fn solve(p: &ConeProgram, opts: &SolverOptions) -> Result<ConeSolution> {
    p.validate()?;
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::ContractViolation(
            "solver tolerance must be positive".into(),
        ));
    }
    let n = p.num_variables();
    let m = p.num_constraints();
    let sign = match p.sense {
        Sense::Sup => 1.0,
        Sense::Inf => -1.0,
    };
    // internally always maximize <c, x>
    let c = DVector::from_column_slice(p.c.coords()) * sign;
    let b = DVector::from_column_slice(p.b.coords());
    let affine = AffineProjector::new(&p.phi, &p.b);

    let certify = |z: &DVector<f64>, u: &DVector<f64>, rho: f64| -> Certificate {
        let s = -u * rho;
        let cs = &c + &s;
        let y = if m > 0 {
            affine.pinv.transpose() * &cs
        } else {
            DVector::zeros(0)
        };
        let primal = (&p.phi * z - &b).norm();
        let dual = (p.phi.transpose() * &y - &cs).norm();
        let primal_value = c.dot(z);
        let dual_value = b.dot(&y);
        Certificate {
            residuals: Residuals {
                primal,
                dual,
                gap: (primal_value - dual_value).abs(),
            },
            y,
            s,
            primal_value,
            dual_value,
        }
    };

    let finish =
        |z: DVector<f64>, cert: Certificate, status: SolveStatus, iterations: usize| ConeSolution {
            x: ConeVector(z.iter().copied().collect()),
            y: cert.y.iter().map(|v| v * sign).collect(),
            s: ConeVector(cert.s.iter().copied().collect()),
            primal_value: cert.primal_value * sign,
            dual_value: cert.dual_value * sign,
            status,
            residuals: cert.residuals,
            iterations,
        };

    let mut z = DVector::zeros(n);
    let mut u = DVector::zeros(n);
    if !affine.consistent {
        let cert = certify(&z, &u, 1.0);
        return Ok(finish(z, cert, SolveStatus::InfeasibleDetected, 0));
    }

    const RELAX: f64 = 1.6;
    const ADAPT_EVERY: usize = 50;
    const ADAPT_UNTIL: usize = 20_000;
    const CHECK_EVERY: usize = 10;
    const DIVERGENCE_EVERY: usize = 1_000;
    let mut rho = 1.0;
    let mut last_rho_change = 0usize;
    let mut trend: Option<(DVector<f64>, DVector<f64>, usize)> = None;
    let mut prev_steps: Option<(DVector<f64>, DVector<f64>)> = None;

    for k in 1..=opts.max_iter {
        let z_prev = z.clone();
        let x = affine.project(&(&z - &u + &c / rho));
        let xr = &x * RELAX + &z * (1.0 - RELAX);
        z = project_cone(&p.cone, &(&xr + &u))?;
        u += &xr - &z;

        if k % CHECK_EVERY == 0 || k == opts.max_iter {
            let cert = certify(&z, &u, rho);
            debug_assert!(
                cert.primal_value
                    <= cert.dual_value
                        + cert.residuals.dual * z.norm()
                        + cert.residuals.primal * cert.y.norm()
                        + 1e-8 * (1.0 + cert.primal_value.abs() + cert.dual_value.abs()),
                "weak duality violated at iteration {k}"
            );
            if cert.residuals.max() <= opts.tol {
                return Ok(finish(z, cert, SolveStatus::Optimal, k));
            }
            if k == opts.max_iter {
                return Ok(finish(z, cert, SolveStatus::MaxIterations, k));
            }
        }

        if k % ADAPT_EVERY == 0 && k <= ADAPT_UNTIL {
            let r_prim = (&x - &z).norm();
            let r_dual = rho * (&z - &z_prev).norm();
            if r_prim > 10.0 * r_dual && rho < 1e6 {
                rho *= 2.0;
                u /= 2.0;
                last_rho_change = k;
            } else if r_dual > 10.0 * r_prim && rho > 1e-6 {
                rho /= 2.0;
                u *= 2.0;
                last_rho_change = k;
            }
        }

        if k % DIVERGENCE_EVERY == 0 {
            let lambda = &u * rho;
            if let Some((z_old, l_old, k_old)) = &trend {
                if *k_old >= last_rho_change {
                    let steps = (k - k_old) as f64;
                    let dz = (&z - z_old) / steps;
                    let dl = (&lambda - l_old) / steps;
                    if let Some((pz, pl)) = &prev_steps {
                        if steady(&dz, pz) || steady(&dl, pl) {
                            let cert = certify(&z, &u, rho);
                            return Ok(finish(z, cert, SolveStatus::InfeasibleDetected, k));
                        }
                    }
                    prev_steps = Some((dz, dl));
                } else {
                    prev_steps = None;
                }
            }
            trend = Some((z.clone(), lambda, k));
        }
    }
    unreachable!("loop returns at max_iter")
}

/// A per-iteration drift that is nonnegligible and unchanged between two
/// windows.
fn steady(step: &DVector<f64>, prev: &DVector<f64>) -> bool {
    let a = step.norm();
    let b = prev.norm();
    a > 1e-6 && (a - b).abs() <= 1e-4 * a && (step - prev).norm() <= 1e-4 * a
}
