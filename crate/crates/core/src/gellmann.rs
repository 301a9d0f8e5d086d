//! Generalized Gell-Mann generators of SU(4).
//!
//! Fifteen Hermitian traceless 4x4 matrices normalized to
//! tr(sigma_i sigma_j) = 2 delta_ij, in the standard graded ordering: the
//! su(2)-block triple (sym/antisym on rows 1,2 plus the first diagonal
//! generator), the remaining off-diagonal pairs in (1,3), (2,3), (1,4),
//! (2,4), (3,4) order with the two diagonal generators interleaved at
//! positions 8 and 15.

use crate::linalg::{C64, ComplexMatrix};

/// sigma_i for i in 1..=15.
pub fn generator(i: usize) -> ComplexMatrix {
    match i {
        1 => symmetric(0, 1),
        2 => antisymmetric(0, 1),
        3 => ComplexMatrix::diag_real(&[1.0, -1.0, 0.0, 0.0]),
        4 => symmetric(0, 2),
        5 => antisymmetric(0, 2),
        6 => symmetric(1, 2),
        7 => antisymmetric(1, 2),
        8 => {
            let s = 1.0 / 3.0f64.sqrt();
            ComplexMatrix::diag_real(&[s, s, -2.0 * s, 0.0])
        }
        9 => symmetric(0, 3),
        10 => antisymmetric(0, 3),
        11 => symmetric(1, 3),
        12 => antisymmetric(1, 3),
        13 => symmetric(2, 3),
        14 => antisymmetric(2, 3),
        15 => {
            let s = 1.0 / 6.0f64.sqrt();
            ComplexMatrix::diag_real(&[s, s, s, -3.0 * s])
        }
        _ => panic!("generator index must be 1..=15"),
    }
}

pub fn all_generators() -> Vec<ComplexMatrix> {
    (1..=15).map(generator).collect()
}

/// E_jk + E_kj
fn symmetric(j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(j, k)] = C64::new(1.0, 0.0);
    m[(k, j)] = C64::new(1.0, 0.0);
    m
}

/// -i E_jk + i E_kj
fn antisymmetric(j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(j, k)] = C64::new(0.0, -1.0);
    m[(k, j)] = C64::new(0.0, 1.0);
    m
}
