//! Euler-angle parametrization of SU(4) and the two-node entangling unitary.
//!
//! A group element is the ordered product of fifteen factors
//! exp(i sigma_g alpha_k) over the generator sequence
//! (3, 2, 3, 5, 3, 10, 3, 2, 3, 5, 3, 2, 3, 8, 15), with box bounds on the
//! angles chosen so the group is covered without naive overcounting. Every
//! factor is either a diagonal phase or a plane rotation, so the
//! exponentials are closed-form.

use crate::error::{Error, Result};
use crate::gellmann;
use crate::linalg::{C64, ComplexMatrix, ONE};
use crate::states::embed_two_qubit;

/// Generator index for each of the fifteen Euler factors.
pub const GENERATOR_SEQUENCE: [usize; 15] = [3, 2, 3, 5, 3, 10, 3, 2, 3, 5, 3, 2, 3, 8, 15];

/// Upper bounds of the fifteen angles (all lower bounds are 0).
pub fn angle_upper_bounds() -> [f64; 15] {
    use std::f64::consts::PI;
    let mut b = [0.0; 15];
    for (i, slot) in b.iter_mut().enumerate() {
        *slot = match i + 1 {
            1 | 3 | 5 | 7 | 9 | 11 | 13 => PI,
            2 | 4 | 6 | 8 | 10 | 12 => PI / 2.0,
            14 => PI / 3.0f64.sqrt(),
            15 => PI / 6.0f64.sqrt(),
            _ => unreachable!(),
        };
    }
    b
}

fn check_bounds(alpha: &[f64; 15]) -> Result<()> {
    let upper = angle_upper_bounds();
    for (i, (&a, &u)) in alpha.iter().zip(upper.iter()).enumerate() {
        if !(0.0..=u + 1e-12).contains(&a) {
            return Err(Error::AngleOutOfBounds {
                index: i + 1,
                value: a,
                lower: 0.0,
                upper: u,
            });
        }
    }
    Ok(())
}

/// exp(i sigma_g alpha) for the generators appearing in the factor sequence.
fn exp_factor(g: usize, alpha: f64) -> ComplexMatrix {
    let phase = |x: f64| C64::new(0.0, x).exp();
    match g {
        3 => {
            let mut m = ComplexMatrix::identity(4);
            m[(0, 0)] = phase(alpha);
            m[(1, 1)] = phase(-alpha);
            m
        }
        8 => {
            let s = 1.0 / 3.0f64.sqrt();
            let mut m = ComplexMatrix::identity(4);
            m[(0, 0)] = phase(s * alpha);
            m[(1, 1)] = phase(s * alpha);
            m[(2, 2)] = phase(-2.0 * s * alpha);
            m
        }
        15 => {
            let s = 1.0 / 6.0f64.sqrt();
            let mut m = ComplexMatrix::identity(4);
            m[(0, 0)] = phase(s * alpha);
            m[(1, 1)] = phase(s * alpha);
            m[(2, 2)] = phase(s * alpha);
            m[(3, 3)] = phase(-3.0 * s * alpha);
            m
        }
        // Antisymmetric generators exponentiate to real plane rotations:
        // exp(i a A_{jk}) = I + (cos a - 1)(E_jj + E_kk) + sin a (E_jk - E_kj).
        2 | 5 | 10 => {
            let (j, k) = match g {
                2 => (0, 1),
                5 => (0, 2),
                _ => (0, 3),
            };
            let mut m = ComplexMatrix::identity(4);
            m[(j, j)] = C64::new(alpha.cos(), 0.0);
            m[(k, k)] = C64::new(alpha.cos(), 0.0);
            m[(j, k)] = C64::new(alpha.sin(), 0.0);
            m[(k, j)] = C64::new(-alpha.sin(), 0.0);
            m
        }
        _ => panic!("generator {g} is not part of the Euler sequence"),
    }
}

/// The SU(4) element U(alpha) for in-bounds angles.
pub fn su4_unitary(alpha: &[f64; 15]) -> Result<ComplexMatrix> {
    check_bounds(alpha)?;
    Ok(su4_unitary_unchecked(alpha))
}

pub(crate) fn su4_unitary_unchecked(alpha: &[f64; 15]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    for (k, &g) in GENERATOR_SEQUENCE.iter().enumerate() {
        u = u.mul(&exp_factor(g, alpha[k]));
    }
    u
}

/// U(alpha) together with all fifteen partial derivatives dU/d alpha_k,
/// computed from prefix/suffix products; each derivative inserts
/// i sigma_{g_k} at the factor position.
pub(crate) fn su4_unitary_with_derivatives(
    alpha: &[f64; 15],
) -> (ComplexMatrix, Vec<ComplexMatrix>) {
    let factors: Vec<ComplexMatrix> = GENERATOR_SEQUENCE
        .iter()
        .zip(alpha.iter())
        .map(|(&g, &a)| exp_factor(g, a))
        .collect();

    // prefix[k] = F_1 ... F_k, suffix[k] = F_{k+1} ... F_15.
    let mut prefix = Vec::with_capacity(16);
    prefix.push(ComplexMatrix::identity(4));
    for f in &factors {
        let last = prefix.last().unwrap();
        prefix.push(last.mul(f));
    }
    let mut suffix = vec![ComplexMatrix::identity(4); 16];
    for k in (0..15).rev() {
        suffix[k] = factors[k].mul(&suffix[k + 1]);
    }

    let u = prefix[15].clone();
    let i_unit = C64::new(0.0, 1.0);
    let derivatives = (0..15)
        .map(|k| {
            let gen = gellmann::generator(GENERATOR_SEQUENCE[k]);
            prefix[k].mul(&gen.scale(i_unit)).mul(&suffix[k])
        })
        .collect();
    (u, derivatives)
}

/// V(alpha_AB) = U^{A1,A2}(alpha_A) (x) U^{B1,B2}(alpha_B) as a 16x16
/// operator in the global (A1, B1, A2, B2) qubit order.
pub fn pair_unitary_from_halves(u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> ComplexMatrix {
    embed_two_qubit(u_a, 0, 2).mul(&embed_two_qubit(u_b, 1, 3))
}

/// Determinant of a 4x4 complex matrix by cofactor expansion; used to check
/// that Euler products stay special unitary.
pub fn det4(m: &ComplexMatrix) -> C64 {
    assert_eq!(m.dim(), 4);
    let minor3 = |r: [usize; 3], c: [usize; 3]| -> C64 {
        m[(r[0], c[0])] * (m[(r[1], c[1])] * m[(r[2], c[2])] - m[(r[1], c[2])] * m[(r[2], c[1])])
            - m[(r[0], c[1])]
                * (m[(r[1], c[0])] * m[(r[2], c[2])] - m[(r[1], c[2])] * m[(r[2], c[0])])
            + m[(r[0], c[2])]
                * (m[(r[1], c[0])] * m[(r[2], c[1])] - m[(r[1], c[1])] * m[(r[2], c[0])])
    };
    let rows = [1, 2, 3];
    let mut det = C64::new(0.0, 0.0);
    let mut sign = ONE;
    for col in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
        det += sign * m[(0, col)] * minor3(rows, [cols[0], cols[1], cols[2]]);
        sign = -sign;
    }
    det
}
