//! Two-qubit state types and the 16x16 machinery for pairs of pairs.
//!
//! Conventions used throughout the crate:
//!
//! * The computational basis of one pair is ordered |00>, |01>, |10>, |11>.
//! * The Bell basis is |1> = (|01>-|10>)/sqrt2, |2> = (|01>+|10>)/sqrt2,
//!   |3> = (|00>-|11>)/sqrt2, |4> = (|00>+|11>)/sqrt2.
//! * A [`PairState`] lives on two pairs with global qubit order
//!   (A1, B1, A2, B2); qubit A1 is the most significant bit of the 16-dim
//!   index. Node A owns qubits (A1, A2), node B owns (B1, B2).

use crate::eig::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, ONE, ZERO};

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Probabilities below this are treated as an impossible measurement branch.
pub const DEGENERATE_PROB_TOL: f64 = 1e-14;

/// Pauli matrices and friends, 2x2.
pub mod qubit {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(
            2,
            &[ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
        )
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, &[ONE, ZERO, ZERO, -ONE])
    }
}

/// The unitary whose columns are the Bell states |1>..|4> expressed in the
/// computational basis; conjugation by it converts between the two views.
pub fn bell_basis_unitary() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = ComplexMatrix::zeros(4);
    // |1> = (|01> - |10>)/sqrt2
    q[(1, 0)] = C64::new(s, 0.0);
    q[(2, 0)] = C64::new(-s, 0.0);
    // |2> = (|01> + |10>)/sqrt2
    q[(1, 1)] = C64::new(s, 0.0);
    q[(2, 1)] = C64::new(s, 0.0);
    // |3> = (|00> - |11>)/sqrt2
    q[(0, 2)] = C64::new(s, 0.0);
    q[(3, 2)] = C64::new(-s, 0.0);
    // |4> = (|00> + |11>)/sqrt2
    q[(0, 3)] = C64::new(s, 0.0);
    q[(3, 3)] = C64::new(s, 0.0);
    q
}

/// Bell state |k> (k in 1..=4) as a computational-basis vector.
pub fn bell_state_vector(k: usize) -> [C64; 4] {
    assert!((1..=4).contains(&k), "Bell index must be 1..=4");
    let q = bell_basis_unitary();
    [q[(0, k - 1)], q[(1, k - 1)], q[(2, k - 1)], q[(3, k - 1)]]
}

/// Converts a Bell-basis coefficient table r_ij into the computational-basis
/// matrix sum_ij r_ij |i><j|.
pub fn bell_table_to_computational(r: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(r.dim(), 4);
    let q = bell_basis_unitary();
    q.mul(r).mul(&q.adjoint())
}

/// Extracts the Bell-basis coefficient table from a computational-basis matrix.
pub fn computational_to_bell_table(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.dim(), 4);
    let q = bell_basis_unitary();
    q.adjoint().mul(m).mul(&q)
}

/// A validated two-qubit density matrix in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positive semidefiniteness.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: mat.dim(),
            });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let dev = mat.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let eigs = hermitian_eigenvalues(&mat)?;
        let min = *eigs.last().unwrap();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mat })
    }

    /// Construction without the eigenvalue check, for callers that guarantee
    /// positivity structurally (Bell-diagonal data, measured reductions of
    /// valid states, ...). Trace and Hermiticity are still debug-asserted.
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-8);
        debug_assert!(mat.hermiticity_deviation() < 1e-8);
        Self { mat }
    }

    /// Builds the state sum_ij r_ij |i><j| from Bell-basis coefficients.
    pub fn from_bell_table(r: &ComplexMatrix) -> Result<Self> {
        let trace = r.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let dev = r.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Self::new(bell_table_to_computational(r))
    }

    /// Bell-diagonal state with the given coefficients (must sum to 1).
    pub fn bell_diagonal(r: [f64; 4]) -> Result<Self> {
        if r.iter().any(|&x| x < -PSD_TOL) {
            return Err(Error::NotPositive {
                min_eigenvalue: r.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: sum });
        }
        let table = ComplexMatrix::diag_real(&[r[0].max(0.0), r[1].max(0.0), r[2].max(0.0), r[3].max(0.0)]);
        Ok(Self::new_unchecked(bell_table_to_computational(&table)))
    }

    /// Werner state r1 |1><1| + (1-r1)/3 (I - |1><1|).
    pub fn werner(r1: f64) -> Result<Self> {
        let rest = (1.0 - r1) / 3.0;
        Self::bell_diagonal([r1, rest, rest, rest])
    }

    /// Projector onto the Bell state |k>, k in 1..=4.
    pub fn bell_state(k: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::projector(&bell_state_vector(k)))
    }

    pub fn maximally_mixed() -> Self {
        Self::new_unchecked(ComplexMatrix::identity(4).scale_real(0.25))
    }

    /// Pure state |v><v| (v is normalized).
    pub fn from_pure(v: &[C64; 4]) -> Self {
        Self::new_unchecked(ComplexMatrix::projector(v))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// The Bell-basis coefficient table r with rho = sum r_ij |i><j|.
    pub fn bell_table(&self) -> ComplexMatrix {
        computational_to_bell_table(&self.mat)
    }

    /// Diagonal Bell coefficients (r_1, r_2, r_3, r_4).
    pub fn bell_diagonal_coefficients(&self) -> [f64; 4] {
        let t = self.bell_table();
        [t[(0, 0)].re, t[(1, 1)].re, t[(2, 2)].re, t[(3, 3)].re]
    }

    /// Overlap <k| rho |k> with the Bell state |k>, k in 1..=4.
    pub fn bell_overlap(&self, k: usize) -> f64 {
        let v = bell_state_vector(k);
        let mut acc = ZERO;
        for r in 0..4 {
            for c in 0..4 {
                acc += v[r].conj() * self.mat[(r, c)] * v[c];
            }
        }
        acc.re
    }

    /// Conjugation rho -> U rho U^dag by a 4x4 unitary.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        Self::new_unchecked(u.mul(&self.mat).mul(&u.adjoint()))
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product_re(&self.mat)
    }
}

/// A projective measurement outcome on the second pair: the probability and,
/// unless the branch is degenerate, the collapsed first-pair state.
#[derive(Debug, Clone)]
pub struct MeasureOutcome {
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

/// Measurement projector P_k = I_{A1,B1} (x) |mn><mn|_{A2,B2} with
/// k = 1..=4 enumerating (m, n) = (0,0), (0,1), (1,0), (1,1).
#[derive(Debug, Clone)]
pub struct MeasurementProjector {
    pub k: usize,
    pub mat: ComplexMatrix,
}

impl MeasurementProjector {
    pub fn new(k: usize) -> Self {
        assert!((1..=4).contains(&k));
        let mut mat = ComplexMatrix::zeros(16);
        for first in 0..4 {
            let idx = first * 4 + (k - 1);
            mat[(idx, idx)] = ONE;
        }
        Self { k, mat }
    }

    pub fn outcome_bits(k: usize) -> (usize, usize) {
        ((k - 1) >> 1, (k - 1) & 1)
    }
}

/// Density matrix of two identical pairs, 16x16, qubit order (A1, B1, A2, B2).
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    mat: ComplexMatrix,
}

impl PairState {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                got: mat.dim(),
            });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let dev = mat.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let eigs = hermitian_eigenvalues(&mat)?;
        let min = *eigs.last().unwrap();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mat })
    }

    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.dim(), 16);
        Self { mat }
    }

    /// varrho = a (x) b on pairs (A1,B1) and (A2,B2).
    pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self::new_unchecked(a.matrix().kron(b.matrix()))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Trace over the second pair (A2, B2).
    pub fn partial_trace_second_pair(&self) -> DensityMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.mat[(i * 4 + k, j * 4 + k)];
                }
                out[(i, j)] = acc;
            }
        }
        DensityMatrix::new_unchecked(out)
    }

    /// Projective sigma_z (x) sigma_z measurement of the pair (A2, B2).
    ///
    /// Returns the probability tr(P_k rho) and, when that probability is not
    /// degenerate, the normalized collapsed state of the remaining pair.
    pub fn measure_and_collapse(&self, k: usize) -> MeasureOutcome {
        assert!((1..=4).contains(&k));
        let col = k - 1;
        let mut prob = 0.0;
        for i in 0..4 {
            prob += self.mat[(i * 4 + col, i * 4 + col)].re;
        }
        if prob < DEGENERATE_PROB_TOL {
            return MeasureOutcome {
                probability: prob.max(0.0),
                state: None,
            };
        }
        let block = ComplexMatrix::from_fn(4, |i, j| self.mat[(i * 4 + col, j * 4 + col)] / prob);
        MeasureOutcome {
            probability: prob,
            state: Some(DensityMatrix::new_unchecked(block.hermitian_part())),
        }
    }

    /// rho -> U rho U^dag with a full 16x16 unitary.
    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Self {
        Self::new_unchecked(u.mul(&self.mat).mul(&u.adjoint()))
    }

    /// Applies a (not necessarily trace-preserving) operator Pi as
    /// rho -> Pi rho Pi^dag / tr(Pi rho Pi^dag), returning the acceptance
    /// probability tr(Pi rho Pi^dag). Degenerate acceptance is an error.
    pub fn apply_filter(&self, pi: &ComplexMatrix) -> Result<(Self, f64)> {
        let filtered = pi.mul(&self.mat).mul(&pi.adjoint());
        let acc = filtered.trace().re;
        if acc < DEGENERATE_PROB_TOL {
            return Err(Error::DegenerateInput { value: acc });
        }
        Ok((
            Self::new_unchecked(filtered.scale_real(1.0 / acc).hermitian_part()),
            acc,
        ))
    }
}

/// Embeds a single-qubit operator onto qubit `q` (0..=3, order A1,B1,A2,B2)
/// of the 16-dimensional pair space.
pub fn embed_single_qubit(op: &ComplexMatrix, q: usize) -> ComplexMatrix {
    assert_eq!(op.dim(), 2);
    assert!(q < 4);
    let shift = 3 - q;
    ComplexMatrix::from_fn(16, |r, c| {
        let (rb, cb) = ((r >> shift) & 1, (c >> shift) & 1);
        if (r & !(1 << shift)) == (c & !(1 << shift)) {
            op[(rb, cb)]
        } else {
            ZERO
        }
    })
}

/// Embeds a two-qubit operator onto qubits (qa, qb) of the pair space; the
/// operator's first tensor factor acts on `qa`, the second on `qb`.
pub fn embed_two_qubit(op: &ComplexMatrix, qa: usize, qb: usize) -> ComplexMatrix {
    assert_eq!(op.dim(), 4);
    assert!(qa < 4 && qb < 4 && qa != qb);
    let (sa, sb) = (3 - qa, 3 - qb);
    let mask = !((1usize << sa) | (1usize << sb)) & 0xf;
    ComplexMatrix::from_fn(16, |r, c| {
        if r & mask != c & mask {
            return ZERO;
        }
        let ri = ((r >> sa) & 1) * 2 + ((r >> sb) & 1);
        let ci = ((c >> sa) & 1) * 2 + ((c >> sb) & 1);
        op[(ri, ci)]
    })
}

/// CNOT on one pair of qubits, control first, target second, in the 2-qubit
/// basis |ct>.
pub fn cnot_gate() -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(4);
    g[(0, 0)] = ONE;
    g[(1, 1)] = ONE;
    g[(2, 3)] = ONE;
    g[(3, 2)] = ONE;
    g
}

/// The bilateral CNOT U^{A1->A2} (x) U^{B1->B2} as a 16x16 operator.
pub fn bilateral_cnot() -> ComplexMatrix {
    let g = cnot_gate();
    embed_two_qubit(&g, 0, 2).mul(&embed_two_qubit(&g, 1, 3))
}
