//! Double description: generators of `{x : h_i . x >= 0}`.
//!
//! Lineality is tracked explicitly so the routine accepts cones that are not
//! pointed. Adjacency uses the combinatorial test on zero sets, which are
//! stored as bitmasks (hence the 64-inequality cap).

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

pub const MAX_DIM: usize = 10;
pub const MAX_RAYS: usize = 64;

const EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
struct Ray {
    v: Vec<f64>,
    zero: u64,
}

pub(crate) fn check_scale(dim: usize, count: usize) -> Result<()> {
    if dim > MAX_DIM || count > MAX_RAYS {
        return Err(Error::UnsupportedScale(format!(
            "double description limited to dimension {MAX_DIM} and {MAX_RAYS} rays, got dimension {dim} with {count}"
        )));
    }
    Ok(())
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Unit-length generators (extreme rays, then `+l` and `-l` for a lineality
/// basis) of the cone `{x : h . x >= 0 for every h in ineqs}` in `R^dim`.
pub(crate) fn generators_of(ineqs: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    check_scale(dim, ineqs.len())?;
    let mut lineality: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: u64 = 0;

    for (i, h) in ineqs.iter().enumerate() {
        let h = normalized(h);
        let bit = 1u64 << i;
        let pivot = lineality
            .iter()
            .enumerate()
            .map(|(k, l)| (k, dot(&h, l)))
            .filter(|(_, hv)| hv.abs() > EPS)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));

        if let Some((k, _)) = pivot {
            let mut l0 = lineality.remove(k);
            if dot(&h, &l0) < 0.0 {
                l0.iter_mut().for_each(|x| *x = -*x);
            }
            let hl0 = dot(&h, &l0);
            for l in lineality.iter_mut() {
                let c = dot(&h, l) / hl0;
                axpy(-c, &l0, l);
            }
            for r in rays.iter_mut() {
                let c = dot(&h, &r.v) / hl0;
                axpy(-c, &l0, &mut r.v);
                r.v = normalized(&r.v);
                r.zero |= bit;
            }
            rays.push(Ray {
                v: normalized(&l0),
                zero: processed,
            });
        } else {
            let vals: Vec<f64> = rays.iter().map(|r| dot(&h, &r.v)).collect();
            let mut next: Vec<Ray> = Vec::new();
            for (r, &val) in rays.iter().zip(&vals) {
                if val > EPS {
                    next.push(r.clone());
                } else if val >= -EPS {
                    next.push(Ray {
                        v: r.v.clone(),
                        zero: r.zero | bit,
                    });
                }
            }
            for (p, &vp) in rays.iter().zip(&vals) {
                if vp <= EPS {
                    continue;
                }
                for (q, &vq) in rays.iter().zip(&vals) {
                    if vq >= -EPS {
                        continue;
                    }
                    let common = p.zero & q.zero;
                    let blocked = rays.iter().any(|r| {
                        !std::ptr::eq(r, p) && !std::ptr::eq(r, q) && (r.zero & common) == common
                    });
                    if blocked {
                        continue;
                    }
                    let mut v: Vec<f64> = q.v.iter().map(|x| x * vp).collect();
                    axpy(-vq, &p.v, &mut v);
                    let nv = norm(&v);
                    if nv > EPS {
                        next.push(Ray {
                            v: v.iter().map(|x| x / nv).collect(),
                            zero: common | bit,
                        });
                    }
                }
            }
            rays = next;
        }
        processed |= bit;
    }

    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rays {
        if !out
            .iter()
            .any(|o| norm(&crate::linalg::sub(o, &r.v)) < 1e-9)
        {
            out.push(r.v);
        }
    }
    for l in lineality {
        let l = normalized(&l);
        out.push(l.iter().map(|x| -x).collect());
        out.push(l);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains_dir(gens: &[Vec<f64>], v: &[f64]) -> bool {
        let v = normalized(v);
        gens.iter().any(|g| norm(&crate::linalg::sub(g, &v)) < 1e-8)
    }

    #[test]
    fn quadrant() {
        let gens = generators_of(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
        assert_eq!(gens.len(), 2);
        assert!(contains_dir(&gens, &[1.0, 0.0]));
        assert!(contains_dir(&gens, &[0.0, 1.0]));
    }

    #[test]
    fn half_plane_has_lineality() {
        let gens = generators_of(&[vec![0.0, 1.0]], 2).unwrap();
        assert!(contains_dir(&gens, &[0.0, 1.0]));
        assert!(contains_dir(&gens, &[1.0, 0.0]));
        assert!(contains_dir(&gens, &[-1.0, 0.0]));
    }

    #[test]
    fn square_cone_dual() {
        // dual of the cone over the square with vertices (1, +-1, +-1)
        let square = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, -1.0, 1.0],
            vec![1.0, -1.0, -1.0],
        ];
        let gens = generators_of(&square, 3).unwrap();
        assert_eq!(gens.len(), 4);
        for expected in [
            [1.0, 1.0, 0.0],
            [1.0, -1.0, 0.0],
            [1.0, 0.0, 1.0],
            [1.0, 0.0, -1.0],
        ] {
            assert!(contains_dir(&gens, &expected), "missing {expected:?}");
        }
    }

    #[test]
    fn redundant_inequalities_are_harmless() {
        let gens = generators_of(
            &[
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
                vec![2.0, 1.0],
            ],
            2,
        )
        .unwrap();
        assert_eq!(gens.len(), 2);
    }

    #[test]
    fn empty_interior_is_zero_cone() {
        let gens = generators_of(&[vec![1.0], vec![-1.0]], 1).unwrap();
        assert!(gens.is_empty());
    }

    #[test]
    fn scale_limit() {
        let many = vec![vec![1.0; 11]; 3];
        assert!(matches!(
            generators_of(&many, 11),
            Err(Error::UnsupportedScale(_))
        ));
    }
}
