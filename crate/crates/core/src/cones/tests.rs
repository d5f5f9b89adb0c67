use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;

fn v(c: &[f64]) -> ConeVector {
    ConeVector(c.to_vec())
}

fn herm_diag(d: &[f64]) -> ConeVector {
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d.len(),
        d.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    ConeVector::from_hermitian(&m)
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> ConeVector {
    ConeVector((0..dim).map(|_| StandardNormal.sample(rng)).collect())
}

fn gbit_states() -> ConeSpec {
    ConeSpec::polyhedral_v(vec![
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, -1.0],
        vec![1.0, -1.0, 1.0],
        vec![1.0, -1.0, -1.0],
    ])
    .unwrap()
}

fn sample_kinds() -> Vec<ConeSpec> {
    vec![
        ConeSpec::orthant(4),
        ConeSpec::psd_real(3),
        ConeSpec::psd_complex(2),
        ConeSpec::psd_complex(3),
        gbit_states(),
        gbit_states().dual_cone().unwrap(),
        ConeSpec::product(vec![ConeSpec::orthant(2), ConeSpec::psd_complex(2)]),
    ]
}

#[test]
fn contains_examples() {
    assert!(ConeSpec::orthant(2)
        .contains(&v(&[1.0, 0.0]), 1e-8)
        .unwrap());
    assert!(!ConeSpec::psd_complex(2)
        .contains(&herm_diag(&[1.0, -0.5]), 1e-8)
        .unwrap());
    let k = ConeSpec::polyhedral_v(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    assert!(k.contains(&v(&[2.0, 1.0]), 1e-8).unwrap());
    assert!(!k.contains(&v(&[1.0, 2.0]), 1e-8).unwrap());
}

#[test]
fn dimension_mismatch_is_reported() {
    let err = ConeSpec::orthant(3).contains(&v(&[1.0]), 1e-8).unwrap_err();
    assert_eq!(
        err,
        Error::DimensionMismatch {
            expected: 3,
            found: 1
        }
    );
}

#[test]
fn project_examples() {
    assert_eq!(
        ConeSpec::orthant(3).project(&v(&[1.0, -2.0, 0.0])).unwrap(),
        v(&[1.0, 0.0, 0.0])
    );

    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let p = ConeSpec::psd_real(2)
        .project(&ConeVector::from_symmetric(&x))
        .unwrap();
    let expected = ConeVector::from_symmetric(&DMatrix::from_element(2, 2, 0.5));
    assert!(p.sub(&expected).norm() < 1e-14);
}

#[test]
fn projection_is_idempotent_and_nonexpansive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for cone in sample_kinds() {
        let d = cone.ambient_dim();
        for _ in 0..1000 {
            let a = gaussian(&mut rng, d);
            let b = gaussian(&mut rng, d);
            let pa = cone.project(&a).unwrap();
            let pb = cone.project(&b).unwrap();
            let ppa = cone.project(&pa).unwrap();
            assert!(
                ppa.sub(&pa).norm() < 1e-9,
                "{} not idempotent",
                cone.kind_name()
            );
            assert!(
                pa.sub(&pb).norm() <= a.sub(&b).norm() + 1e-9,
                "{} expands distances",
                cone.kind_name()
            );
        }
    }
}

#[test]
fn members_project_to_themselves() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for cone in sample_kinds() {
        for _ in 0..50 {
            let s = cone.sample(&mut rng).unwrap();
            assert!(
                cone.project(&s).unwrap().sub(&s).norm() < 1e-9,
                "{}",
                cone.kind_name()
            );
        }
    }
}

#[test]
fn self_dual_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for cone in [
        ConeSpec::orthant(4),
        ConeSpec::psd_complex(3),
        ConeSpec::psd_real(2),
    ] {
        let dual = cone.dual_cone().unwrap();
        assert_eq!(dual, cone);
        for _ in 0..200 {
            let x = gaussian(&mut rng, cone.ambient_dim());
            assert_eq!(
                dual.contains(&x, 1e-8).unwrap(),
                cone.contains(&x, 1e-8).unwrap()
            );
        }
    }
}

#[test]
fn moreau_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for cone in sample_kinds() {
        let dual = cone.dual_cone().unwrap();
        for _ in 0..200 {
            let x = gaussian(&mut rng, cone.ambient_dim());
            let p = cone.project(&x).unwrap();
            let q = dual.project(&x.scaled(-1.0)).unwrap();
            assert!(x.sub(&p.sub(&q)).norm() < 1e-8, "{}", cone.kind_name());
            assert!(p.dot(&q).abs() < 1e-8);
        }
    }
}

#[test]
fn dual_of_quadrant_generators() {
    let k = ConeSpec::polyhedral_v(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let d = k.dual_cone().unwrap();
    assert!(d.contains(&v(&[1.0, 1.0]), 1e-8).unwrap());
    assert!(!d.contains(&v(&[-1.0, 1.0]), 1e-8).unwrap());
}

#[test]
fn double_dual_matches_original() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let k = ConeSpec::polyhedral_v(vec![
        vec![1.0, 0.2, 0.1],
        vec![0.3, 1.0, 0.0],
        vec![0.2, 0.1, 1.0],
        vec![1.0, 1.0, 1.0],
    ])
    .unwrap();
    let dd = k.dual_cone().unwrap().dual_cone().unwrap();
    for _ in 0..300 {
        let x = gaussian(&mut rng, 3);
        assert_eq!(
            dd.contains(&x, 1e-8).unwrap(),
            k.contains(&x, 1e-8).unwrap()
        );
    }
}

/// Brute-force extreme rays of `{h : g . h >= 0 for all g}` in R^3: each ray
/// is normal to two generators.
fn brute_dual_rays_3d(gens: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let (a, b) = (&gens[i], &gens[j]);
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            if n < 1e-9 {
                continue;
            }
            for s in [1.0, -1.0] {
                let h: Vec<f64> = c.iter().map(|x| s * x / n).collect();
                if gens.iter().all(|g| linalg::dot(g, &h) >= -1e-10)
                    && !rays
                        .iter()
                        .any(|r| linalg::norm(&linalg::sub(r, &h)) < 1e-8)
                {
                    rays.push(h);
                }
            }
        }
    }
    rays
}

#[test]
fn double_description_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for trial in 0..100 {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let count = rng.random_range(dim..=6);
        // generators in the positive half-space keep the cone pointed, and at
        // least `dim` of them make it full-dimensional (so the dual is pointed)
        let gens: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let mut g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                g[0] = g[0].abs() + 0.5;
                g
            })
            .collect();
        let k = ConeSpec::polyhedral_v(gens.clone()).unwrap();
        let dual_gens = k.dual_cone().unwrap().generators().unwrap();
        for h in &dual_gens {
            for g in &gens {
                assert!(linalg::dot(h, g) >= -1e-10);
            }
        }
        if dim == 3 {
            let brute = brute_dual_rays_3d(&gens);
            assert_eq!(brute.len(), dual_gens.len(), "trial {trial}");
            for b in &brute {
                assert!(dual_gens
                    .iter()
                    .any(|h| linalg::norm(&linalg::sub(h, b)) < 1e-7));
            }
        }
    }
}

#[test]
fn double_description_scale_limit() {
    let gens: Vec<Vec<f64>> = (0..65).map(|i| vec![1.0, i as f64, 0.0]).collect();
    let k = ConeSpec::polyhedral_v(gens).unwrap();
    assert!(matches!(k.dual_cone(), Err(Error::UnsupportedScale(_))));
    let wide = ConeSpec::polyhedral_h(11, vec![vec![1.0; 11]]).unwrap();
    assert!(matches!(wide.generators(), Err(Error::UnsupportedScale(_))));
}

#[test]
fn interior_point_examples() {
    assert_eq!(
        ConeSpec::orthant(3).interior_point().unwrap(),
        v(&[1.0, 1.0, 1.0])
    );
    assert_eq!(
        ConeSpec::psd_complex(2).interior_point().unwrap(),
        ConeVector::from_hermitian(&CMatrix::identity(2, 2))
    );
    let k = ConeSpec::polyhedral_v(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    assert_eq!(k.interior_point().unwrap(), v(&[1.0, 0.5]));
}

#[test]
fn interior_points_are_strictly_interior() {
    let eps = 1e-4;
    for cone in sample_kinds() {
        let p = cone.interior_point().unwrap();
        for k in 0..p.len() {
            for s in [eps, -eps] {
                let mut q = p.clone();
                q.0[k] += s;
                assert!(
                    cone.project(&q).unwrap().sub(&q).norm() < 1e-12,
                    "{}",
                    cone.kind_name()
                );
            }
        }
        assert!(cone.is_interior(&p, 1e-6).unwrap());
    }
}

#[test]
fn analytic_center_of_h_cone() {
    let k = ConeSpec::polyhedral_h(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let c = k.interior_point().unwrap();
    // maximizer of log x + log y - |x|^2/2 is (1, 1)
    assert!((c.0[0] - 1.0).abs() < 1e-9 && (c.0[1] - 1.0).abs() < 1e-9);
    let flat = ConeSpec::polyhedral_h(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    assert!(matches!(
        flat.interior_point(),
        Err(Error::NumericalFailure { .. })
    ));
}

#[test]
fn shift_into_cone() {
    let k = ConeSpec::psd_complex(2);
    let x = herm_diag(&[1.0, -0.25]);
    let t = k.shift_into(&x, &k.interior_point().unwrap()).unwrap();
    assert!((t - 0.25).abs() < 1e-12);
    let gb = gbit_states();
    let outside = v(&[1.0, 1.5, 0.0]);
    let t = gb
        .shift_into(&outside, &gb.interior_point().unwrap())
        .unwrap();
    let shifted = outside.add(&gb.interior_point().unwrap().scaled(t));
    assert!(gb.contains(&shifted, 1e-10).unwrap());
    assert!(!gb
        .contains(
            &outside.add(&gb.interior_point().unwrap().scaled(t * 0.99)),
            1e-10
        )
        .unwrap());
}

#[test]
fn classical_composite_is_classical() {
    let k = tensor_compose(
        &ConeSpec::orthant(2),
        &ConeSpec::orthant(2),
        CompositionRule::Min,
    )
    .unwrap();
    assert_eq!(k, ConeSpec::orthant(4));
    let k = tensor_compose(
        &ConeSpec::orthant(2),
        &ConeSpec::orthant(3),
        CompositionRule::Max,
    )
    .unwrap();
    assert_eq!(k, ConeSpec::orthant(6));
}

#[test]
fn quantum_composite() {
    let k = tensor_compose(
        &ConeSpec::psd_complex(2),
        &ConeSpec::psd_complex(2),
        CompositionRule::Quantum,
    )
    .unwrap();
    assert_eq!(k, ConeSpec::psd_complex(4));
    let err = tensor_compose(
        &ConeSpec::psd_complex(2),
        &ConeSpec::psd_real(2),
        CompositionRule::Quantum,
    );
    assert!(matches!(err, Err(Error::ContractViolation(_))));
    let err = tensor_compose(
        &ConeSpec::psd_complex(2),
        &ConeSpec::orthant(2),
        CompositionRule::Min,
    );
    assert!(matches!(err, Err(Error::UnsupportedCombination(_))));
}

/// Popescu-Rohrlich correlations on two gbits: maximally mixed marginals,
/// correlation matrix [[1, 1], [1, -1]].
fn pr_box() -> ConeVector {
    let s = [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, -1.0]];
    ConeVector(s.iter().flatten().copied().collect())
}

#[test]
fn gbit_max_composite_exceeds_min() {
    let g = gbit_states();
    let min = tensor_compose(&g, &g, CompositionRule::Min).unwrap();
    let max = tensor_compose(&g, &g, CompositionRule::Max).unwrap();
    let pr = pr_box();
    assert!(max.contains(&pr, 1e-8).unwrap());
    assert!(!min.contains(&pr, 1e-8).unwrap());
    // product states live in both
    let s = v(&[1.0, 0.3, -0.2]);
    let t = v(&[1.0, -1.0, 0.5]);
    let st = tensor_vectors(&g, &g, CompositionRule::Min, &s, &t).unwrap();
    assert!(min.contains(&st, 1e-8).unwrap() && max.contains(&st, 1e-8).unwrap());
}

#[test]
fn product_evaluation_is_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cases = [
        (
            ConeSpec::psd_complex(2),
            ConeSpec::psd_complex(3),
            CompositionRule::Quantum,
        ),
        (
            ConeSpec::psd_real(2),
            ConeSpec::psd_real(2),
            CompositionRule::Quantum,
        ),
        (
            ConeSpec::orthant(2),
            ConeSpec::orthant(3),
            CompositionRule::Min,
        ),
        (gbit_states(), gbit_states(), CompositionRule::Max),
    ];
    for (ka, kb, rule) in cases {
        let composite = tensor_compose(&ka, &kb, rule).unwrap();
        let (ea, eb) = (ka.dual_cone().unwrap(), kb.dual_cone().unwrap());
        for _ in 0..100 {
            let (s, t) = (ka.sample(&mut rng).unwrap(), kb.sample(&mut rng).unwrap());
            let (e, f) = (ea.sample(&mut rng).unwrap(), eb.sample(&mut rng).unwrap());
            let st = tensor_vectors(&ka, &kb, rule, &s, &t).unwrap();
            let ef = tensor_vectors(&ka, &kb, rule, &e, &f).unwrap();
            assert_eq!(st.len(), composite.ambient_dim());
            assert!((ef.dot(&st) - e.dot(&s) * f.dot(&t)).abs() <= 1e-10);
            assert!(composite.contains(&st, 1e-8).unwrap());
        }
    }
}
