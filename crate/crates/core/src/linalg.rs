//! Dense helpers shared by the cone, GPT and purification modules.
//!
//! Hermitian `n x n` matrices are stored as real coordinate vectors of length
//! `n^2` in a fixed orthonormal basis (trace inner product), ordered as:
//!
//! 1. `n` diagonal matrices: `I/sqrt(n)` followed by the generalized Gell-Mann
//!    diagonals `(E_00 + ... + E_{k-1,k-1} - k E_kk) / sqrt(k(k+1))`,
//! 2. symmetric off-diagonal pairs `(E_ij + E_ji)/sqrt(2)`, `i < j` lexicographic,
//! 3. antisymmetric off-diagonal pairs `(-i E_ij + i E_ji)/sqrt(2)`, same order.
//!
//! Real symmetric matrices use blocks 1 and 2 only (`n(n+1)/2` coordinates),
//! so a real matrix has the same leading coordinates in either space.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero when counting rank.
pub const RANK_TOL: f64 = 1e-12;

pub fn hermitian_dim(n: usize) -> usize {
    n * n
}

pub fn symmetric_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Inverse of [`hermitian_dim`], if `dim` is a perfect square.
pub fn hermitian_side(dim: usize) -> Option<usize> {
    let n = (dim as f64).sqrt().round() as usize;
    (n * n == dim).then_some(n)
}

fn diag_to_coords(d: &[f64], out: &mut [f64]) {
    let n = d.len();
    out[0] = d.iter().sum::<f64>() / (n as f64).sqrt();
    let mut prefix = 0.0;
    for k in 1..n {
        prefix += d[k - 1];
        let kf = k as f64;
        out[k] = (prefix - kf * d[k]) / (kf * (kf + 1.0)).sqrt();
    }
}

fn coords_to_diag(c: &[f64], n: usize) -> Vec<f64> {
    let mut d = vec![c[0] / (n as f64).sqrt(); n];
    for k in 1..n {
        let kf = k as f64;
        let norm = (kf * (kf + 1.0)).sqrt();
        for di in d.iter_mut().take(k) {
            *di += c[k] / norm;
        }
        d[k] -= kf * c[k] / norm;
    }
    d
}

/// Coordinates of a Hermitian matrix (only the Hermitian part is read).
pub fn vectorize_hermitian(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out = vec![0.0; n * n];
    let d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    diag_to_coords(&d, &mut out[..n]);
    let pairs = n * (n - 1) / 2;
    let mut p = 0;
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            // average with the mirrored entry so non-Hermitian noise cancels
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[n + p] = s2 * z.re;
            out[n + pairs + p] = -s2 * z.im;
            p += 1;
        }
    }
    out
}

pub fn unvectorize_hermitian(c: &[f64], n: usize) -> CMatrix {
    assert_eq!(c.len(), n * n, "hermitian coordinate length");
    let mut m = CMatrix::zeros(n, n);
    let d = coords_to_diag(&c[..n], n);
    for (i, di) in d.into_iter().enumerate() {
        m[(i, i)] = Complex64::new(di, 0.0);
    }
    let pairs = n * (n - 1) / 2;
    let mut p = 0;
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(c[n + p] / s2, -c[n + pairs + p] / s2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            p += 1;
        }
    }
    m
}

pub fn vectorize_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = vec![0.0; symmetric_dim(n)];
    let d: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    diag_to_coords(&d, &mut out[..n]);
    let s2 = std::f64::consts::SQRT_2;
    let mut p = n;
    for i in 0..n {
        for j in i + 1..n {
            out[p] = s2 * 0.5 * (m[(i, j)] + m[(j, i)]);
            p += 1;
        }
    }
    out
}

pub fn unvectorize_symmetric(c: &[f64], n: usize) -> DMatrix<f64> {
    assert_eq!(c.len(), symmetric_dim(n), "symmetric coordinate length");
    let mut m = DMatrix::zeros(n, n);
    for (i, di) in coords_to_diag(&c[..n], n).into_iter().enumerate() {
        m[(i, i)] = di;
    }
    let s2 = std::f64::consts::SQRT_2;
    let mut p = n;
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = c[p] / s2;
            m[(j, i)] = c[p] / s2;
            p += 1;
        }
    }
    m
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Real part, used when a matrix is known to be real up to rounding.
pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// Which tensor factor to keep when discarding the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `C^da (x) C^db`.
pub fn partial_trace(m: &CMatrix, da: usize, db: usize, keep: Keep) -> CMatrix {
    assert_eq!(m.nrows(), da * db, "partial trace dimension");
    match keep {
        Keep::A => CMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Keep::B => CMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    }
}

/// Eigendecomposition of a Hermitian matrix with a deterministic layout:
/// eigenvalues descending, ties broken by lexicographic comparison of the
/// eigenvector entries, and each eigenvector rotated so its first
/// non-negligible entry is real positive.
///
/// With `real = true` the matrix is treated as real symmetric and the
/// eigenvectors are real.
pub fn hermitian_eigen(m: &CMatrix, real: bool) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let (vals, vecs): (Vec<f64>, CMatrix) = if real {
        let r = real_part(m);
        let sym = (&r + r.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        (
            eig.eigenvalues.iter().copied().collect(),
            to_complex(&eig.eigenvectors),
        )
    } else {
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut cols: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v: CVector = vecs.column(k).into_owned();
            if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
                let phase = first / first.norm();
                v /= phase;
            }
            (vals[k], v)
        })
        .collect();
    cols.sort_by(|(la, va), (lb, vb)| {
        if (la - lb).abs() > 1e-12 * (1.0 + la.abs().max(lb.abs())) {
            return lb.partial_cmp(la).unwrap_or(std::cmp::Ordering::Equal);
        }
        for (x, y) in va.iter().zip(vb.iter()) {
            let ord =
                x.re.partial_cmp(&y.re)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal));
            if ord != std::cmp::Ordering::Equal && (x - y).norm() > 1e-12 {
                return ord.reverse();
            }
        }
        std::cmp::Ordering::Equal
    });

    let values = cols.iter().map(|(l, _)| *l).collect();
    let mut out = CMatrix::zeros(n, n);
    for (k, (_, v)) in cols.into_iter().enumerate() {
        out.set_column(k, &v);
    }
    (values, out)
}

pub fn rank(eigenvalues: &[f64]) -> usize {
    eigenvalues.iter().filter(|&&l| l > RANK_TOL).count()
}

/// Outer product `|v><v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}
