//! Fixtures shared by the benchmarks.

use conecommit::commitment::presets;
use conecommit::commitment::{bob_primal_program, ICProtocol};
use conecommit::{ConeProgram, ConeSpec, ConeVector};

/// Deterministic non-member vector of the given dimension.
pub fn probe(dim: usize) -> ConeVector {
    ConeVector(
        (0..dim)
            .map(|i| ((i * 7 + 3) % 11) as f64 / 5.0 - 1.0)
            .collect(),
    )
}

pub fn projection_cones() -> Vec<(&'static str, ConeSpec)> {
    vec![
        ("orthant_16", ConeSpec::orthant(16)),
        ("psd_complex_4", ConeSpec::psd_complex(4)),
        ("psd_complex_9", ConeSpec::psd_complex(9)),
        (
            "polyhedral_h_3",
            ConeSpec::polyhedral_h(
                3,
                vec![
                    vec![1.0, 1.0, 0.0],
                    vec![1.0, -1.0, 0.0],
                    vec![1.0, 0.0, 1.0],
                ],
            )
            .expect("valid cone"),
        ),
    ]
}

/// Random quantum protocol on `d x d` with `n` commitments.
pub fn protocol(d: usize, n: usize) -> ICProtocol {
    presets::random_quantum(7, d, d, n).expect("valid preset")
}

pub fn bob_program(d: usize, n: usize) -> ConeProgram {
    bob_primal_program(&protocol(d, n))
        .expect("valid program")
        .0
}
