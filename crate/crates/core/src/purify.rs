//! Purifications, dilations and steering for quantum-type systems.
//!
//! A bipartite pure state on `P (x) S` is held as a `dim_p x dim_s` amplitude
//! matrix `Psi` with `psi[p * dim_s + s] = Psi[(p, s)]`. The reduced state on
//! `S` is then `Psi^T conj(Psi)` and the one on `P` is `Psi Psi^dagger`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cones::{CompositionRule, ConeVector, DEFAULT_TOL};
use crate::error::{check_dim, Error, Result};
use crate::gpt::{compose, quantum_system, real_quantum_system, GptState, GptSystem, MatrixShape};
use crate::linalg::{self, CMatrix, CVector, Keep};

/// Singular values below this are treated as zero by the steering construction.
const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    /// Rank-one state on `purifier (x) system`.
    pub state: GptState,
    pub purified_marginal: GptState,
    /// Rank of the purified state.
    pub purifying_dim: usize,
    /// Layout size of the purifying factor (at least `purifying_dim`, at least 1).
    pub purifier_dim: usize,
    pub amplitudes: CVector,
}

impl Purification {
    pub fn system_dim(&self) -> usize {
        self.amplitudes.len() / self.purifier_dim
    }

    pub fn amplitude_matrix(&self) -> CMatrix {
        let ds = self.system_dim();
        CMatrix::from_fn(self.purifier_dim, ds, |p, s| self.amplitudes[p * ds + s])
    }

    /// Squared norm of the amplitude vector, equal to the trace of the purified state.
    pub fn weight(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    fn from_amplitudes(
        amplitudes: CVector,
        purifier_dim: usize,
        purifying_dim: usize,
        system: &GptSystem,
        real: bool,
    ) -> Result<Self> {
        let purifier = if real {
            real_quantum_system(purifier_dim)
        } else {
            quantum_system(purifier_dim)
        };
        let joint = Arc::new(compose(&purifier, system, CompositionRule::Quantum)?);
        let shape = joint.matrix_shape().expect("quantum composite");
        let vec = shape.to_vector(&linalg::outer(&amplitudes));
        let marginal_vec = joint.marginal_vector(&vec, Keep::B)?;
        let state = GptState { system: joint, vec };
        let purified_marginal = GptState {
            system: Arc::new(system.clone()),
            vec: marginal_vec,
        };
        Ok(Self {
            state,
            purified_marginal,
            purifying_dim,
            purifier_dim,
            amplitudes,
        })
    }
}

fn quantum_shape(sys: &GptSystem) -> Result<MatrixShape> {
    match sys.matrix_shape() {
        Some(shape) if sys.is_quantum() => Ok(shape),
        _ => Err(Error::UnsupportedTheory(format!(
            "purification is only constructed for quantum-type systems, not {}",
            sys.label
        ))),
    }
}

/// Spectral purification `sum_i sqrt(l_i) |i> (x) |v_i>`.
pub fn purify(rho: &GptState) -> Result<Purification> {
    let shape = quantum_shape(&rho.system)?;
    let m = shape.to_matrix(&rho.vec);
    let (vals, vecs) = linalg::hermitian_eigen(&m, shape.real);
    if vals.last().is_some_and(|&l| l < -DEFAULT_TOL) {
        return Err(Error::ContractViolation(
            "cannot purify a matrix with negative eigenvalues".into(),
        ));
    }
    let rank = linalg::rank(&vals);
    let k = rank.max(1);
    let n = shape.n;
    let mut amps = CVector::zeros(k * n);
    for i in 0..rank {
        let w = vals[i].sqrt();
        for s in 0..n {
            amps[i * n + s] = vecs[(s, i)] * w;
        }
    }
    Purification::from_amplitudes(amps, k, rank, &rho.system, shape.real)
}

/// Purification of `r` with the purifier embedded in `a`.
pub fn dilate(r: &GptState, a: &GptSystem) -> Result<GptState> {
    let shape = quantum_shape(&r.system)?;
    let sa = quantum_shape(a)?;
    let p = purify(r)?;
    if p.purifying_dim > sa.n {
        return Err(Error::ContractViolation(format!(
            "dilation needs a factor of dimension at least {}, have {}",
            p.purifying_dim, sa.n
        )));
    }
    let mut amps = CVector::zeros(sa.n * shape.n);
    amps.rows_mut(0, p.amplitudes.len())
        .copy_from(&p.amplitudes);
    let joint = Arc::new(compose(a, &r.system, CompositionRule::Quantum)?);
    let vec = joint
        .matrix_shape()
        .expect("quantum composite")
        .to_vector(&linalg::outer(&amps));
    Ok(GptState { system: joint, vec })
}

/// Product dilation `|0><0| (x) r`, valid for any factor size.
pub fn product_dilation(r: &GptState, a: &GptSystem) -> Result<GptState> {
    let joint = Arc::new(compose(a, &r.system, CompositionRule::Quantum)?);
    let mut sigma = ConeVector::zeros(a.dim());
    let sa = quantum_shape(a)?;
    let mut m = CMatrix::zeros(sa.n, sa.n);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    sigma.0.copy_from_slice(sa.to_vector(&m).coords());
    let vec = joint.product_vector(&sigma, &r.vec)?;
    Ok(GptState { system: joint, vec })
}

/// Unitary `U` on the purifier with `U g = h`, for amplitude matrices with
/// `g^dagger g = h^dagger h`. The part of `U` off the support of `g` is an
/// orthonormal completion in Gram-Schmidt order over the standard basis.
pub fn uhlmann_unitary(g: &CMatrix, h: &CMatrix) -> Result<CMatrix> {
    if g.shape() != h.shape() {
        return Err(Error::ContractViolation(format!(
            "purification shapes differ: {:?} vs {:?}",
            g.shape(),
            h.shape()
        )));
    }
    let gram = g.adjoint() * g - h.adjoint() * h;
    let scale = linalg::frobenius(&(g.adjoint() * g)).max(1.0);
    let mismatch = linalg::frobenius(&gram);
    if mismatch > 1e-8 * scale {
        return Err(Error::ContractViolation(format!(
            "states purify different marginals (difference {mismatch:.3e})"
        )));
    }
    let dim = g.nrows();
    let svd = g.clone().svd(true, true);
    let w = svd.u.as_ref().expect("svd u");
    let v_t = svd.v_t.as_ref().expect("svd v_t");
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma <= SINGULAR_TOL {
            continue;
        }
        src.push(w.column(i).into_owned());
        let vi = v_t.row(i).adjoint();
        dst.push(h * vi / Complex64::new(sigma, 0.0));
    }
    let src = complete_basis(src, dim);
    let dst = complete_basis(dst, dim);
    let mut u = CMatrix::zeros(dim, dim);
    for (s, d) in src.iter().zip(&dst) {
        u += d * s.adjoint();
    }
    Ok(u)
}

/// Orthonormalizes `vecs` in order and extends them to a basis of `C^dim`.
fn complete_basis(vecs: Vec<CVector>, dim: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(dim);
    let candidates = vecs.into_iter().chain((0..dim).map(|i| {
        let mut e = CVector::zeros(dim);
        e[i] = Complex64::new(1.0, 0.0);
        e
    }));
    for mut v in candidates {
        if basis.len() == dim {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    basis
}

/// Unitary on `A (x) C` turning a held purification into one of a chosen target.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMap {
    pub target: usize,
    pub unitary: CMatrix,
    pub dim_a: usize,
    /// Ancilla size the map acts on; the held purification is padded up to it.
    pub dim_c: usize,
    pub dim_b: usize,
}

impl SteeringMap {
    /// Applies the map to the held purification and discards the ancilla,
    /// returning the resulting density matrix on `A (x) B`.
    pub fn apply(&self, global: &Purification) -> Result<CMatrix> {
        let g = regroup_padded(global, self.dim_a, self.dim_c)?;
        check_dim(self.dim_b, g.ncols())?;
        let steered = &self.unitary * g;
        let (da, dc, db) = (self.dim_a, self.dim_c, self.dim_b);
        Ok(CMatrix::from_fn(da * db, da * db, |r, s| {
            let (a, b) = (r / db, r % db);
            let (a2, b2) = (s / db, s % db);
            (0..dc)
                .map(|c| steered[(a * dc + c, b)] * steered[(a2 * dc + c, b2)].conj())
                .sum()
        }))
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.unitary.nrows();
        linalg::frobenius(&(self.unitary.adjoint() * &self.unitary - CMatrix::identity(n, n)))
    }
}

/// Amplitudes of a purification whose purifier is `A (x) C`, with `C` padded
/// to `dim_c`, as a `(dim_a * dim_c) x dim_b` matrix.
fn regroup_padded(global: &Purification, dim_a: usize, dim_c: usize) -> Result<CMatrix> {
    if !global.purifier_dim.is_multiple_of(dim_a) {
        return Err(Error::ContractViolation(format!(
            "purifier of dimension {} does not factor through A of dimension {dim_a}",
            global.purifier_dim
        )));
    }
    let held_c = global.purifier_dim / dim_a;
    if held_c > dim_c {
        return Err(Error::ContractViolation(format!(
            "ancilla of dimension {held_c} exceeds {dim_c}"
        )));
    }
    let g = global.amplitude_matrix();
    let mut out = CMatrix::zeros(dim_a * dim_c, g.ncols());
    for a in 0..dim_a {
        for c in 0..held_c {
            out.row_mut(a * dim_c + c).copy_from(&g.row(a * held_c + c));
        }
    }
    Ok(out)
}

/// Purification of a state on `A (x) B`, regrouped so that the purifier is
/// `A (x) C` and the purified system is `B`.
pub fn purify_bipartite(chi: &GptState) -> Result<Purification> {
    let (a, b) = chi.system.factors()?;
    let da = quantum_shape(a)?.n;
    let shape_b = quantum_shape(b)?;
    let db = shape_b.n;
    let p = purify(chi)?;
    let dc = p.purifier_dim;
    let amps = CVector::from_fn(da * dc * db, |i, _| {
        let (row, bb) = (i / db, i % db);
        let (aa, c) = (row / dc, row % dc);
        p.amplitudes[c * da * db + aa * db + bb]
    });
    Purification::from_amplitudes(amps, da * dc, p.purifying_dim, b, shape_b.real)
}

/// Steering map taking `global` (a purification of the B-marginal on
/// `(A (x) C) (x) B`) to the mixed state `target` on `A (x) B`.
pub fn steering_transform(
    global: &Purification,
    target: &GptState,
    index: usize,
) -> Result<SteeringMap> {
    let (a, b) = target.system.factors()?;
    let da = quantum_shape(a)?.n;
    let shape_b = quantum_shape(b)?;
    let db = shape_b.n;
    check_dim(db, global.system_dim())?;

    let held = shape_b.to_matrix(&global.purified_marginal.vec);
    let wanted = linalg::partial_trace(
        &target
            .system
            .matrix_shape()
            .expect("quantum")
            .to_matrix(&target.vec),
        da,
        db,
        Keep::B,
    );
    let diff = linalg::frobenius(&(&held - &wanted));
    if diff > 1e-8 * linalg::frobenius(&held).max(1.0) {
        return Err(Error::ContractViolation(format!(
            "target marginal differs from the held marginal by {diff:.3e}"
        )));
    }

    let tp = purify_bipartite(target)?;
    let dim_c = (global.purifier_dim / da).max(tp.purifier_dim / da);
    let g = regroup_padded(global, da, dim_c)?;
    let h = regroup_padded(&tp, da, dim_c)?;
    let unitary = uhlmann_unitary(&g, &h)?;
    Ok(SteeringMap {
        target: index,
        unitary,
        dim_a: da,
        dim_c,
        dim_b: db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt::marginal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(r, cols, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        })
    }

    fn random_density(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
        let g = gaussian(rng, n, rank);
        let m = &g * g.adjoint();
        let tr = linalg::trace(&m);
        m / tr
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        gaussian(rng, n, n).qr().q()
    }

    fn qstate(n: usize, m: &CMatrix) -> GptState {
        GptState::new(Arc::new(quantum_system(n)), ConeVector::from_hermitian(m)).unwrap()
    }

    fn bipartite(da: usize, db: usize, m: &CMatrix) -> GptState {
        let sys = compose(
            &quantum_system(da),
            &quantum_system(db),
            CompositionRule::Quantum,
        )
        .unwrap();
        GptState::new(Arc::new(sys), ConeVector::from_hermitian(m)).unwrap()
    }

    #[test]
    fn pure_input_gives_product() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0);
        let p = purify(&qstate(2, &m)).unwrap();
        assert_eq!(p.purifying_dim, 1);
        assert_eq!(p.amplitudes.len(), 2);
        assert!((p.amplitudes[0] - c(1.0)).norm() < 1e-14);
        assert!(p.amplitudes[1].norm() < 1e-14);
    }

    #[test]
    fn maximally_mixed_gives_bell_state() {
        let m = CMatrix::identity(2, 2) * c(0.5);
        let p = purify(&qstate(2, &m)).unwrap();
        assert_eq!(p.purifying_dim, 2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = p.amplitude_matrix();
        // isometric up to scale, so g g^dagger = I/2
        assert!(linalg::frobenius(&(&g * g.adjoint() - CMatrix::identity(2, 2) * c(0.5))) < 1e-14);
        assert!((g[(0, 0)].norm() - h).abs() + g[(0, 1)].norm() < 1e-14);
        assert!(
            p.purified_marginal
                .vec
                .sub(&ConeVector::from_hermitian(&m))
                .norm()
                < 1e-14
        );
    }

    #[test]
    fn subnormalized_weight() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.5);
        let p = purify(&qstate(2, &m)).unwrap();
        assert!((p.weight() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let rank = rng.random_range(1..=n);
            let rho = random_density(&mut rng, n, rank);
            let p = purify(&qstate(n, &rho)).unwrap();
            assert_eq!(p.purifying_dim, rank);
            let back = marginal(&p.state, Keep::B).unwrap();
            let err =
                linalg::frobenius(&(linalg::unvectorize_hermitian(back.vec.coords(), n) - &rho));
            assert!(err <= 1e-10, "{err}");
            assert!(p
                .state
                .system
                .state_cone
                .contains(&p.state.vec, 1e-8)
                .unwrap());
        }
    }

    #[test]
    fn real_purification() {
        let rho = nalgebra::DMatrix::from_row_slice(2, 2, &[0.7, 0.2, 0.2, 0.3]);
        let s = GptState::new(
            Arc::new(real_quantum_system(2)),
            ConeVector::from_symmetric(&rho),
        )
        .unwrap();
        let p = purify(&s).unwrap();
        assert!(p.amplitudes.iter().all(|z| z.im == 0.0));
        let back = marginal(&p.state, Keep::B).unwrap();
        assert!(back.vec.sub(&s.vec).norm() < 1e-12);
    }

    #[test]
    fn non_quantum_rejected() {
        let g = Arc::new(crate::gpt::gbit_system());
        let s = GptState::new(g.clone(), ConeVector(vec![1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(purify(&s), Err(Error::UnsupportedTheory(_))));
        let q = GptState::new(
            Arc::new(quantum_system(2)),
            ConeVector::from_hermitian(&CMatrix::identity(2, 2)),
        )
        .unwrap();
        assert!(matches!(dilate(&q, &g), Err(Error::UnsupportedTheory(_))));
    }

    #[test]
    fn dilation_examples() {
        let a = quantum_system(2);
        let zero = qstate(2, &CMatrix::zeros(2, 2));
        let t = dilate(&zero, &a).unwrap();
        assert!(t.vec.norm() < 1e-15);

        let half = CMatrix::identity(2, 2) * c(0.5);
        let t = dilate(&qstate(2, &half), &a).unwrap();
        let b = marginal(&t, Keep::B).unwrap();
        assert!(b.vec.sub(&ConeVector::from_hermitian(&half)).norm() < 1e-10);
        assert!(t.system.state_cone.contains(&t.vec, 1e-8).unwrap());

        let too_small = dilate(&qstate(3, &(CMatrix::identity(3, 3) * c(1.0 / 3.0))), &a);
        assert!(matches!(too_small, Err(Error::ContractViolation(_))));
    }

    #[test]
    fn dilations_are_states_with_the_right_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let db = rng.random_range(2..=3);
            let da = rng.random_range(db..=4);
            let scale: f64 = rng.random_range(0.0..1.0);
            let rank = rng.random_range(1..=db);
            let r = random_density(&mut rng, db, rank) * c(scale);
            let a = quantum_system(da);
            for t in [
                dilate(&qstate(db, &r), &a).unwrap(),
                product_dilation(&qstate(db, &r), &a).unwrap(),
            ] {
                assert!(t.system.state_cone.contains(&t.vec, 1e-8).unwrap());
                let back = marginal(&t, Keep::B).unwrap();
                assert!(back.vec.sub(&ConeVector::from_hermitian(&r)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn uhlmann_recovers_basis_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let rho = random_density(&mut rng, n, n);
            let p = purify(&qstate(n, &rho)).unwrap();
            let g = p.amplitude_matrix();
            let v = random_unitary(&mut rng, g.nrows());
            let h = &v * &g;
            let u = uhlmann_unitary(&g, &h).unwrap();
            assert!(linalg::frobenius(&(&u * &g - &h)) <= 1e-8);
            assert!(linalg::frobenius(&(&u - &v)) <= 1e-8);
        }
    }

    #[test]
    fn uhlmann_bell_basis_change() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = CMatrix::identity(2, 2) * c(h);
        let phase = Complex64::from_polar(1.0, 0.3);
        let v = CMatrix::from_row_slice(2, 2, &[c(0.0), phase, c(1.0), c(0.0)]);
        let u = uhlmann_unitary(&g, &(&v * &g)).unwrap();
        assert!(linalg::frobenius(&(u - v)) < 1e-12);
    }

    #[test]
    fn uhlmann_rejects_different_marginals() {
        let g = CMatrix::identity(2, 2);
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = c(1.0);
        assert!(matches!(
            uhlmann_unitary(&g, &h),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn steering_to_self_is_identity() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]);
        let chi = bipartite(2, 2, &linalg::outer(&psi));
        let global = purify_bipartite(&chi).unwrap();
        let map = steering_transform(&global, &chi, 0).unwrap();
        assert!(linalg::frobenius(&(&map.unitary - CMatrix::identity(2, 2))) < 1e-12);
        let out = map.apply(&global).unwrap();
        assert!(linalg::frobenius(&(out - linalg::outer(&psi))) < 1e-12);
    }

    #[test]
    fn steering_between_random_extensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..30 {
            let (da, db) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let d = da * db;
            // two states on A (x) B sharing the B marginal: apply channels on A
            let rank = rng.random_range(1..=d);
            let base = random_density(&mut rng, d, rank);
            let u1 = random_unitary(&mut rng, da);
            let lift = linalg::kron(&u1, &CMatrix::identity(db, db));
            let mixed = {
                let flipped = &lift * &base * lift.adjoint();
                (&base + flipped) * c(0.5)
            };
            let chi1 = bipartite(da, db, &base);
            let chi2 = bipartite(da, db, &mixed);
            let global = purify_bipartite(&chi1).unwrap();
            for (j, target) in [&chi1, &chi2].into_iter().enumerate() {
                let map = steering_transform(&global, target, j).unwrap();
                assert!(map.unitarity_defect() < 1e-10);
                let out = map.apply(&global).unwrap();
                let want = linalg::unvectorize_hermitian(target.vec.coords(), d);
                assert!(linalg::frobenius(&(out - want)) <= 1e-8);
            }
        }
    }

    #[test]
    fn steering_rejects_mismatched_marginals() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0);
        let mut other = CMatrix::zeros(4, 4);
        other[(1, 1)] = c(1.0);
        let global = purify_bipartite(&bipartite(2, 2, &m)).unwrap();
        let err = steering_transform(&global, &bipartite(2, 2, &other), 1);
        assert!(matches!(err, Err(Error::ContractViolation(_))));
    }
}
