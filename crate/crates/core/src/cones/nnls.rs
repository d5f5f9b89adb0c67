//! Nonnegative least squares by the Lawson-Hanson active-set method.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) const MAX_ITER: usize = 10_000;
pub(crate) const RESIDUAL_TOL: f64 = 1e-9;

/// Solves `min ||G w - v||` over `w >= 0`, where the columns of `g` are the
/// generators. Returns the weights.
pub(crate) fn nnls(g: &DMatrix<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    let k = g.ncols();
    let mut w = DVector::zeros(k);
    if k == 0 {
        return Ok(w);
    }
    let scale = 1.0 + g.norm() * v.norm();
    let tol = 1e-13 * scale;
    let mut passive = vec![false; k];
    let mut iters = 0usize;

    loop {
        let grad = g.transpose() * (v - g * &w);
        let candidate = (0..k)
            .filter(|&i| !passive[i])
            .max_by(|&a, &b| grad[a].total_cmp(&grad[b]));
        let Some(j) = candidate.filter(|&j| grad[j] > tol) else {
            break;
        };
        passive[j] = true;

        loop {
            iters += 1;
            if iters > MAX_ITER {
                return Err(Error::NumericalFailure {
                    what: "nnls projection".into(),
                    residual: kkt_residual(g, v, &w),
                });
            }
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let z = solve_passive(g, v, &idx);
            if idx.iter().zip(z.iter()).all(|(_, &zi)| zi > 0.0) {
                for (&i, &zi) in idx.iter().zip(z.iter()) {
                    w[i] = zi;
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (&i, &zi) in idx.iter().zip(z.iter()) {
                if zi <= 0.0 {
                    let denom = w[i] - zi;
                    if denom > 0.0 {
                        step = step.min(w[i] / denom);
                    }
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            for (&i, &zi) in idx.iter().zip(z.iter()) {
                w[i] += step * (zi - w[i]);
            }
            for &i in &idx {
                if w[i] <= 1e-15 * scale {
                    w[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    let res = kkt_residual(g, v, &w);
    if res > RESIDUAL_TOL * scale {
        return Err(Error::NumericalFailure {
            what: "nnls projection".into(),
            residual: res,
        });
    }
    Ok(w)
}

fn solve_passive(g: &DMatrix<f64>, v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    let sub = DMatrix::from_fn(g.nrows(), idx.len(), |r, c| g[(r, idx[c])]);
    let svd = sub.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    svd.solve(v, eps)
        .unwrap_or_else(|_| DVector::zeros(idx.len()))
}

/// Worst violation of the NNLS optimality conditions.
fn kkt_residual(g: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let grad = g.transpose() * (v - g * w);
    grad.iter()
        .zip(w.iter())
        .map(|(&gi, &wi)| if wi > 0.0 { gi.abs() } else { gi.max(0.0) })
        .fold(0.0, f64::max)
}
