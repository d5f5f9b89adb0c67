//! Brute-force and closed-form reference values for small instances.
//!
//! These deliberately avoid the cone solver and the nalgebra decompositions
//! it relies on: eigenvalues come from a plain Jacobi iteration and linear
//! systems from Gaussian elimination.

use itertools::Itertools;

use crate::coneprog::{ConeProgram, Sense};
use crate::cones::{ConeSpec, ConeVector};
use crate::error::{check_dim, Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Largest number of cone generators the LP oracle enumerates over.
pub const LP_MAX_VARS: usize = 12;
pub const LP_MAX_CONSTRAINTS: usize = 24;
/// Default grid step for the gbit search.
pub const GBIT_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Two-outcome measurement, as matrices.
    Measurement(Vec<CMatrix>),
    /// Optimal point of a linear program.
    Vertex(Vec<f64>),
    /// Gbit measurement with effects along the extremal rays, and the
    /// value guessed on each outcome.
    GbitMeasurement {
        effects: Vec<Vec<f64>>,
        guesses: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub witness: Option<Witness>,
    pub method: String,
    /// Amount by which the true optimum may exceed `value`.
    pub slack: f64,
}

/// Cyclic Jacobi eigenvalue iteration on a real symmetric matrix, stored
/// row-major. Returns eigenvalues and eigenvectors (as columns, row-major).
fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Optimal probability of telling `rho0` from `rho1` (equal priors):
/// `1/2 + ||rho0 - rho1||_1 / 4`, with the projector onto the positive part
/// of `rho0 - rho1` as witness.
pub fn helstrom(rho0: &CMatrix, rho1: &CMatrix) -> Result<OracleResult> {
    check_dim(rho0.nrows(), rho1.nrows())?;
    check_dim(rho0.ncols(), rho1.ncols())?;
    check_dim(rho0.nrows(), rho0.ncols())?;
    let n = rho0.nrows();
    let delta = rho0 - rho1;
    // real embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue
    let m = 2 * n;
    let mut emb = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = delta[(i, j)];
            emb[i * m + j] = z.re;
            emb[(i + n) * m + j + n] = z.re;
            emb[i * m + j + n] = -z.im;
            emb[(i + n) * m + j] = z.im;
        }
    }
    let (vals, vecs) = jacobi_eigen(emb, m);
    let trace_norm = vals.iter().map(|l| l.abs()).sum::<f64>() / 2.0;
    let mut q = vec![0.0; m * m];
    for (k, &l) in vals.iter().enumerate() {
        if l > 1e-14 {
            for i in 0..m {
                for j in 0..m {
                    q[i * m + j] += vecs[i * m + k] * vecs[j * m + k];
                }
            }
        }
    }
    let p = CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(q[i * m + j], q[(i + n) * m + j])
    });
    let rest = CMatrix::identity(n, n) - &p;
    Ok(OracleResult {
        value: 0.5 + trace_norm / 4.0,
        witness: Some(Witness::Measurement(vec![p, rest])),
        method: "helstrom".into(),
        slack: 0.0,
    })
}

/// Solves `a x = b` for square `a` (row-major) by Gaussian elimination
/// with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() <= 1e-10 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    Some(x)
}

/// Row-reduces `[a | b]` (`rows x cols`) and returns an independent subset
/// of the equations, or an error when they are inconsistent.
fn independent_rows(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let cols = a.first().map_or(0, |r| r.len());
    let scale = a
        .iter()
        .flatten()
        .chain(b)
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let mut kept_a: Vec<Vec<f64>> = Vec::new();
    let mut kept_b: Vec<f64> = Vec::new();
    // reduced copies of the kept rows, with their pivot columns
    let mut reduced: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    for (row, &rhs) in a.iter().zip(b) {
        let mut r = row.clone();
        let mut v = rhs;
        for (red, red_b, piv) in &reduced {
            let f = r[*piv] / red[*piv];
            if f != 0.0 {
                for k in 0..cols {
                    r[k] -= f * red[k];
                }
                v -= f * red_b;
            }
        }
        match (0..cols).max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs())) {
            Some(piv) if r[piv].abs() > 1e-10 * scale => {
                reduced.push((r, v, piv));
                kept_a.push(row.clone());
                kept_b.push(rhs);
            }
            _ if v.abs() > 1e-9 * scale => {
                return Err(Error::ContractViolation(
                    "linear program has inconsistent equality constraints".into(),
                ))
            }
            _ => {}
        }
    }
    Ok((kept_a, kept_b))
}

/// Generators of a polyhedral cone (lineality included as opposite pairs).
fn cone_generators(cone: &ConeSpec) -> Result<Vec<Vec<f64>>> {
    match cone {
        ConeSpec::Orthant { .. } | ConeSpec::PolyhedralV { .. } | ConeSpec::PolyhedralH { .. } => {
            cone.generators()
        }
        ConeSpec::Product { factors } => {
            let total = cone.ambient_dim();
            let mut out = Vec::new();
            let mut offset = 0;
            for f in factors {
                for g in cone_generators(f)? {
                    let mut v = vec![0.0; total];
                    v[offset..offset + g.len()].copy_from_slice(&g);
                    out.push(v);
                }
                offset += f.ambient_dim();
            }
            Ok(out)
        }
        other => Err(Error::UnsupportedCombination(format!(
            "vertex enumeration needs a polyhedral cone, not {}",
            other.kind_name()
        ))),
    }
}

/// Exact optimum of a linear cone program by enumerating every basic
/// feasible solution of its generator form `x = G lambda`, `lambda >= 0`.
pub fn lp_vertex_enumeration(p: &ConeProgram) -> Result<OracleResult> {
    p.validate()?;
    let gens = cone_generators(&p.cone)?;
    let nv = gens.len();
    let m = p.num_constraints();
    if nv > LP_MAX_VARS || m > LP_MAX_CONSTRAINTS {
        return Err(Error::UnsupportedScale(format!(
            "vertex enumeration handles at most {LP_MAX_VARS} generators and {LP_MAX_CONSTRAINTS} constraints, got {nv} and {m}"
        )));
    }
    let sign = match p.sense {
        Sense::Sup => 1.0,
        Sense::Inf => -1.0,
    };
    let dim = p.num_variables();
    // constraint matrix and objective in lambda coordinates
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            gens.iter()
                .map(|g| (0..dim).map(|k| p.phi[(i, k)] * g[k]).sum())
                .collect()
        })
        .collect();
    let obj: Vec<f64> = gens
        .iter()
        .map(|g| sign * g.iter().zip(p.c.coords()).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    let (rows, rhs) = independent_rows(&a, p.b.coords())?;
    let r = rows.len();

    let basic_solutions = |rows: &[Vec<f64>], rhs: &[f64]| -> Vec<Vec<f64>> {
        let r = rows.len();
        let mut out = Vec::new();
        for basis in (0..nv).combinations(r) {
            let sq: Vec<f64> = rows
                .iter()
                .flat_map(|row| basis.iter().map(move |&k| row[k]))
                .collect();
            if let Some(sol) = solve_square(sq, rhs.to_vec(), r) {
                if sol.iter().all(|&v| v >= -1e-10) {
                    let mut lam = vec![0.0; nv];
                    for (&k, v) in basis.iter().zip(sol) {
                        lam[k] = v.max(0.0);
                    }
                    out.push(lam);
                }
            }
        }
        out
    };

    // extreme rays of {d >= 0 : A d = 0}, normalized by sum(d) = 1
    let mut ray_rows = rows.clone();
    ray_rows.push(vec![1.0; nv]);
    let mut ray_rhs = vec![0.0; r];
    ray_rhs.push(1.0);
    if let Ok((ray_rows, ray_rhs)) = independent_rows(&ray_rows, &ray_rhs) {
        for d in basic_solutions(&ray_rows, &ray_rhs) {
            let gain: f64 = d.iter().zip(&obj).map(|(x, y)| x * y).sum();
            if gain > 1e-9 {
                return Err(Error::ContractViolation(
                    "linear program is unbounded".into(),
                ));
            }
        }
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for lam in basic_solutions(&rows, &rhs) {
        let v: f64 = lam.iter().zip(&obj).map(|(x, y)| x * y).sum();
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, lam));
        }
    }
    let (v, lam) =
        best.ok_or_else(|| Error::ContractViolation("linear program is infeasible".into()))?;
    let x: Vec<f64> = (0..dim)
        .map(|k| gens.iter().zip(&lam).map(|(g, l)| g[k] * l).sum())
        .collect();
    Ok(OracleResult {
        value: sign * v,
        witness: Some(Witness::Vertex(x)),
        method: "vertex_enumeration".into(),
        slack: 0.0,
    })
}

/// Extremal effects of the square gbit, up to scale.
const GBIT_RAYS: [[f64; 3]; 4] = [
    [1.0, 1.0, 0.0],
    [1.0, -1.0, 0.0],
    [1.0, 0.0, 1.0],
    [1.0, 0.0, -1.0],
];

/// Lower bound on Bob's guessing probability for gbit states `rho^j`
/// (uniform prior) by grid search over measurements refined to the four
/// extremal effect directions. With weights `w = (t/2, t/2, (1-t)/2, (1-t)/2)`
/// summing the rays to the unit, each outcome is assigned its best guess.
/// The reported slack is the grid step.
pub fn exhaustive_gbit_discrimination(
    states: &[ConeVector],
    resolution: f64,
) -> Result<OracleResult> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::ContractViolation(format!(
            "grid resolution {resolution} outside (0, 1]"
        )));
    }
    for s in states {
        check_dim(3, s.len())?;
    }
    let n = states.len() as f64;
    let steps = (1.0 / resolution).ceil() as usize;
    let mut best: Option<(f64, [f64; 4], Vec<usize>)> = None;
    for i in 0..=steps {
        let t = (i as f64 * resolution).min(1.0);
        let w = [t / 2.0, t / 2.0, (1.0 - t) / 2.0, (1.0 - t) / 2.0];
        let mut value = 0.0;
        let mut guesses = Vec::with_capacity(4);
        for (k, ray) in GBIT_RAYS.iter().enumerate() {
            let (j, score) = states
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    (
                        j,
                        ray.iter().zip(s.coords()).map(|(a, b)| a * b).sum::<f64>(),
                    )
                })
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
            value += w[k] * score / n;
            guesses.push(j);
        }
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, w, guesses));
        }
    }
    let (value, w, guesses) = best.expect("grid has at least one point");
    let effects = GBIT_RAYS
        .iter()
        .zip(w)
        .map(|(r, wk)| r.iter().map(|x| x * wk).collect())
        .collect();
    Ok(OracleResult {
        value,
        witness: Some(Witness::GbitMeasurement { effects, guesses }),
        method: "gbit_grid".into(),
        slack: resolution,
    })
}
