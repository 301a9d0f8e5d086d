//! The four fixed recurrence purification protocols.
//!
//! Each protocol consumes two identical copies of a two-qubit state, applies
//! local entangling operations in the nodes, measures the second pair and
//! postselects. Every protocol exists here twice: as the closed-form
//! nonlinear map on Bell-basis coefficients (the fast path used for
//! statistics) and as an explicit 16x16 circuit simulation
//! ([`circuit_oracle`]) that the closed forms are tested against.
//!
//! * Bennett: twirl to Werner form, bilateral CNOT, keep coincident
//!   outcomes. Operates on the singlet weight r1 alone; the twirl at the
//!   start of each round closes the family, so step results are reported as
//!   Werner states.
//! * Deutsch: twirl to Bell-diagonal form once, then iterate the map on the
//!   four diagonal weights, keeping coincident outcomes.
//! * MFI: a rank-2 projector (|1><1| + |3><3|) acting in each node replaces
//!   the CNOT; all four measurement outcomes are kept after local
//!   corrections. Success probability is the projector acceptance D/2 (see
//!   [`MFI_OUTCOME_PROBABILITY`] for the measurement bookkeeping).
//! * CNOT: the Deutsch circuit without any twirl, keeping only the (1,1)
//!   outcome; works on arbitrary states.

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, ONE, ZERO};
use crate::metrics::concurrence;
use crate::states::{
    bilateral_cnot, embed_single_qubit, embed_two_qubit, qubit, DensityMatrix, PairState,
    DEGENERATE_PROB_TOL,
};
use serde::Serialize;

/// The four protocols evaluated by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProtocolKind {
    Bennett,
    Deutsch,
    Mfi,
    Cnot,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Bennett,
        ProtocolKind::Deutsch,
        ProtocolKind::Mfi,
        ProtocolKind::Cnot,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Bennett => "bennett",
            ProtocolKind::Deutsch => "deutsch",
            ProtocolKind::Mfi => "mfi",
            ProtocolKind::Cnot => "cnot",
        }
    }

    /// Stable fixed points toward which conditioned trajectories converge.
    pub fn attractors(&self) -> &'static [Attractor] {
        match self {
            ProtocolKind::Bennett => &[Attractor::Bell1],
            ProtocolKind::Deutsch => &[Attractor::Bell4, Attractor::Bell2],
            ProtocolKind::Mfi => &[Attractor::Bell1, Attractor::Bell2],
            ProtocolKind::Cnot => &[Attractor::Bell4, Attractor::Bell2],
        }
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bennett" => Ok(ProtocolKind::Bennett),
            "deutsch" => Ok(ProtocolKind::Deutsch),
            "mfi" => Ok(ProtocolKind::Mfi),
            "cnot" => Ok(ProtocolKind::Cnot),
            other => Err(Error::InvalidParameter(format!(
                "unknown protocol '{other}'"
            ))),
        }
    }
}

/// Bell state a conditioned trajectory converges to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Attractor {
    Bell1,
    Bell2,
    Bell4,
}

impl Attractor {
    pub fn bell_index(&self) -> usize {
        match self {
            Attractor::Bell1 => 1,
            Attractor::Bell2 => 2,
            Attractor::Bell4 => 4,
        }
    }
}

/// Output of one protocol round.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: DensityMatrix,
    pub success_probability: f64,
}

/// The MFI protocol accepts with probability D/2 and then keeps any of the
/// four equiprobable measurement outcomes; each outcome occurs with this
/// probability. Trajectory statistics report the analytical D/2 alone.
pub const MFI_OUTCOME_PROBABILITY: f64 = 0.25;

/// The fixed single-qubit rotations u_1..u_4 entering the twirl.
pub fn u_matrix(j: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match j {
        // (I + i sx)/sqrt2
        1 => ComplexMatrix::from_row_major(
            2,
            &[
                C64::new(s, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, s),
                C64::new(s, 0.0),
            ],
        ),
        // (I - i sy)/sqrt2
        2 => ComplexMatrix::from_row_major(
            2,
            &[
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
            ],
        ),
        // i|0><0| + |1><1|
        3 => ComplexMatrix::from_row_major(2, &[C64::new(0.0, 1.0), ZERO, ZERO, ONE]),
        4 => ComplexMatrix::identity(2),
        _ => panic!("u index must be 1..=4"),
    }
}

/// v_n = (i|0><0| + |1><1|) sx^n, the outcome-dependent correction of the
/// MFI protocol.
pub fn v_matrix(n: usize) -> ComplexMatrix {
    let mut m = u_matrix(3);
    for _ in 0..(n % 2) {
        m = m.mul(&qubit::pauli_x());
    }
    m
}

/// K_j = u_j (x) u_j acting on one pair.
pub fn k_matrix(j: usize) -> ComplexMatrix {
    let u = u_matrix(j);
    u.kron(&u)
}

/// Random-rotation (twirling) average mapping any state to the Werner state
/// with the same singlet weight r1.
pub fn twirl_to_werner(rho: &DensityMatrix) -> DensityMatrix {
    let diagonalized = bell_diagonalize(rho);
    let mut acc = ComplexMatrix::zeros(4);
    for j in 1..=3 {
        let k = k_matrix(j);
        acc = acc.add(&k.adjoint().mul(diagonalized.matrix()).mul(&k));
    }
    DensityMatrix::new_unchecked(acc.scale_real(1.0 / 3.0).hermitian_part())
}

/// Twirl onto the Bell-diagonal family, keeping the diagonal coefficients.
pub fn bell_diagonalize(rho: &DensityMatrix) -> DensityMatrix {
    let mut acc = ComplexMatrix::zeros(4);
    for i in 1..=4 {
        let kk = k_matrix(i).mul(&k_matrix(i));
        acc = acc.add(&kk.adjoint().mul(rho.matrix()).mul(&kk));
    }
    DensityMatrix::new_unchecked(acc.scale_real(0.25).hermitian_part())
}

/// One Bennett round on the Werner parameter: returns (r1', success).
pub fn bennett_step(r1: f64) -> (f64, f64) {
    let denom = 5.0 - 4.0 * r1 + 8.0 * r1 * r1;
    let next = (1.0 - 2.0 * r1 + 10.0 * r1 * r1) / denom;
    (next, denom / 9.0)
}

/// One Deutsch round on Bell-diagonal weights: returns (r', success).
pub fn deutsch_step(r: [f64; 4]) -> ([f64; 4], f64) {
    let c = (r[0] + r[3]).powi(2) + (r[1] + r[2]).powi(2);
    assert!(
        c > DEGENERATE_PROB_TOL,
        "Deutsch normalization vanished; input weights {r:?} are not a distribution"
    );
    let next = [
        2.0 * r[1] * r[2] / c,
        (r[1] * r[1] + r[2] * r[2]) / c,
        2.0 * r[0] * r[3] / c,
        (r[0] * r[0] + r[3] * r[3]) / c,
    ];
    (next, c)
}

/// Bell coefficient access helpers (1-based, as in the map definitions).
struct Table(ComplexMatrix);

impl Table {
    fn r(&self, i: usize) -> f64 {
        self.0[(i - 1, i - 1)].re
    }
    fn c(&self, i: usize, j: usize) -> C64 {
        self.0[(i - 1, j - 1)]
    }
}

/// One MFI round via the closed-form map on Bell coefficients.
pub fn mfi_step(rho: &DensityMatrix) -> Result<StepResult> {
    let t = Table(rho.bell_table());
    let d = (t.r(1) + t.r(3)).powi(2) + (t.r(2) + t.r(4)).powi(2)
        - (t.c(1, 3) + t.c(3, 1)).norm_sqr()
        - (t.c(2, 4) + t.c(4, 2)).norm_sqr();
    if d < DEGENERATE_PROB_TOL {
        return Err(Error::DegenerateInput { value: d });
    }

    let mut out = ComplexMatrix::zeros(4);
    let sq = |z: C64| z * z;
    out[(0, 0)] = C64::new(
        (t.r(1).powi(2) + t.r(3).powi(2) - (sq(t.c(1, 3)) + sq(t.c(3, 1))).re) / d,
        0.0,
    );
    out[(1, 1)] = C64::new(
        (t.r(2).powi(2) + t.r(4).powi(2) - (sq(t.c(2, 4)) + sq(t.c(4, 2))).re) / d,
        0.0,
    );
    out[(2, 2)] = C64::new(2.0 * (t.r(2) * t.r(4) - t.c(2, 4).norm_sqr()) / d, 0.0);
    out[(3, 3)] = C64::new(2.0 * (t.r(1) * t.r(3) - t.c(1, 3).norm_sqr()) / d, 0.0);
    let r12 = (sq(t.c(1, 2)) + sq(t.c(3, 4)) - sq(t.c(1, 4)) - sq(t.c(3, 2))) / d;
    let r34 = 2.0 * (t.c(2, 1) * t.c(4, 3) - t.c(2, 3) * t.c(4, 1)) / d;
    out[(0, 1)] = r12;
    out[(1, 0)] = r12.conj();
    out[(2, 3)] = r34;
    out[(3, 2)] = r34.conj();

    Ok(StepResult {
        state: DensityMatrix::from_bell_table(&out)?,
        success_probability: d / 2.0,
    })
}

/// Measurement branch kept by the CNOT-based protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnotBranch {
    /// Keep (m, n) = (1, 1); the standard choice with the widest conditions.
    BothOnes,
    /// Keep (m, n) = (0, 0); purification conditions are more restrictive.
    BothZeros,
}

/// One CNOT-protocol round via the closed-form map (keeps the (1,1) branch).
pub fn cnot_step(rho: &DensityMatrix) -> Result<StepResult> {
    let t = Table(rho.bell_table());
    let e = (t.r(1) + t.r(4)).powi(2) + (t.r(2) + t.r(3)).powi(2)
        + (sq_re(t.c(1, 4) - t.c(4, 1)))
        + (sq_re(t.c(2, 3) - t.c(3, 2)));
    if e < DEGENERATE_PROB_TOL {
        return Err(Error::DegenerateInput { value: e });
    }

    let sq = |z: C64| z * z;
    let mut out = ComplexMatrix::zeros(4);
    out[(0, 0)] = C64::new(2.0 * (t.r(2) * t.r(3) - t.c(2, 3).norm_sqr()) / e, 0.0);
    out[(1, 1)] = C64::new(
        (t.r(2).powi(2) + t.r(3).powi(2) + (sq(t.c(2, 3)) + sq(t.c(3, 2))).re) / e,
        0.0,
    );
    out[(2, 2)] = C64::new(2.0 * (t.r(1) * t.r(4) - t.c(1, 4).norm_sqr()) / e, 0.0);
    out[(3, 3)] = C64::new(
        (t.r(1).powi(2) + t.r(4).powi(2) + (sq(t.c(1, 4)) + sq(t.c(4, 1))).re) / e,
        0.0,
    );
    let r13 = 2.0 * (t.c(2, 4) * t.c(3, 1) - t.c(2, 1) * t.c(3, 4)) / e;
    let r24 = (sq(t.c(2, 1)) + sq(t.c(3, 1)) + sq(t.c(2, 4)) + sq(t.c(3, 4))) / e;
    out[(0, 2)] = r13;
    out[(2, 0)] = r13.conj();
    out[(1, 3)] = r24;
    out[(3, 1)] = r24.conj();

    Ok(StepResult {
        state: DensityMatrix::from_bell_table(&out)?,
        success_probability: e / 2.0,
    })
}

/// Real part of z^2 for a purely imaginary difference (used in E).
fn sq_re(z: C64) -> f64 {
    (z * z).re
}

/// One CNOT-protocol round keeping the (0, 0) branch instead, simulated at
/// circuit level (no closed form is used for this branch).
pub fn cnot_step_keep_zeros(rho: &DensityMatrix) -> Result<StepResult> {
    cnot_circuit(rho, CnotBranch::BothZeros)
}

/// Purification conditions of the (0, 0) CNOT branch; strictly more
/// restrictive than the (1, 1) conditions.
pub fn cnot_keep_zeros_purifiable(rho: &DensityMatrix) -> Option<Attractor> {
    let t = Table(rho.bell_table());
    let cond1 = (2.0 * t.r(1) - 1.0) * (1.0 - 2.0 * t.r(4))
        > (2.0 * t.c(2, 3).im).powi(2) + (2.0 * t.c(1, 4).re).powi(2);
    if cond1 {
        return Some(Attractor::Bell4);
    }
    let cond2 = (2.0 * t.r(2) - 1.0) * (1.0 - 2.0 * t.r(3))
        > (2.0 * t.c(1, 4).im).powi(2) + (2.0 * t.c(2, 3).re).powi(2);
    if cond2 {
        return Some(Attractor::Bell2);
    }
    None
}

/// Classifies a state by the attractor its trajectory converges to under
/// the given protocol, or `None` when the protocol destroys it.
///
/// Bennett judges the twirled state and Deutsch the Bell-diagonalized one,
/// matching the preprocessing those protocols start with; both twirls
/// preserve exactly the coefficients the conditions read, so the input's
/// Bell table is used directly.
pub fn purifiable(kind: ProtocolKind, rho: &DensityMatrix) -> Option<Attractor> {
    let t = Table(rho.bell_table());
    match kind {
        ProtocolKind::Bennett => (2.0 * t.r(1) - 1.0 > 0.0).then_some(Attractor::Bell1),
        ProtocolKind::Deutsch => {
            if (2.0 * t.r(1) - 1.0) * (1.0 - 2.0 * t.r(4)) > 0.0 {
                Some(Attractor::Bell4)
            } else if (2.0 * t.r(2) - 1.0) * (1.0 - 2.0 * t.r(3)) > 0.0 {
                Some(Attractor::Bell2)
            } else {
                None
            }
        }
        ProtocolKind::Mfi => {
            if (2.0 * t.r(1) - 1.0) * (1.0 - 2.0 * t.r(3))
                > -(2.0 * t.c(1, 3).im).powi(2) - (2.0 * t.c(2, 4).re).powi(2)
            {
                Some(Attractor::Bell1)
            } else if (2.0 * t.r(2) - 1.0) * (1.0 - 2.0 * t.r(4))
                > -(2.0 * t.c(2, 4).im).powi(2) - (2.0 * t.c(1, 3).re).powi(2)
            {
                Some(Attractor::Bell2)
            } else {
                None
            }
        }
        ProtocolKind::Cnot => {
            if (2.0 * t.r(1) - 1.0) * (1.0 - 2.0 * t.r(4))
                > -(2.0 * t.c(2, 3).im).powi(2) - (2.0 * t.c(1, 4).re).powi(2)
            {
                Some(Attractor::Bell4)
            } else if (2.0 * t.r(2) - 1.0) * (1.0 - 2.0 * t.r(3))
                > -(2.0 * t.c(1, 4).im).powi(2) - (2.0 * t.c(2, 3).re).powi(2)
            {
                Some(Attractor::Bell2)
            } else {
                None
            }
        }
    }
}

/// Reference implementation: builds rho (x) rho, applies the protocol's
/// unitaries / projector as explicit 16x16 operators, measures the second
/// pair, postselects and applies the final corrections.
///
/// For Bennett the returned state is the Werner closure of the circuit
/// output (the twirl opening the next round is folded in), which is the
/// family the closed-form map acts on; composition of rounds is unchanged
/// because the twirl is idempotent.
pub fn circuit_oracle(kind: ProtocolKind, rho: &DensityMatrix) -> Result<StepResult> {
    match kind {
        ProtocolKind::Bennett => {
            let werner = twirl_to_werner(rho);
            let pair = PairState::tensor(&werner, &werner);
            // sigma_y on A1 and A2, bilateral CNOT.
            let y_a = embed_single_qubit(&qubit::pauli_y(), 0)
                .mul(&embed_single_qubit(&qubit::pauli_y(), 2));
            let evolved = pair.apply_unitary(&bilateral_cnot().mul(&y_a));
            let (aggregated, p_total) = aggregate_outcomes(&evolved, &[1, 4])?;
            // Final sigma_y on A1 of the kept pair.
            let y = qubit::pauli_y().kron(&qubit::identity());
            let corrected = aggregated.conjugate(&y);
            Ok(StepResult {
                state: twirl_to_werner(&corrected),
                success_probability: p_total,
            })
        }
        ProtocolKind::Deutsch => {
            let diag = bell_diagonalize(rho);
            let pair = PairState::tensor(&diag, &diag);
            let evolved = pair.apply_unitary(&bilateral_cnot().mul(&deutsch_rotation()));
            let (state, p_total) = aggregate_outcomes(&evolved, &[1, 4])?;
            Ok(StepResult {
                state,
                success_probability: p_total,
            })
        }
        ProtocolKind::Mfi => {
            let pair = PairState::tensor(rho, rho);
            let m = mfi_projector_4x4();
            let pi = embed_two_qubit(&m, 0, 2).mul(&embed_two_qubit(&m, 1, 3));
            let (filtered, acceptance) = pair.apply_filter(&pi)?;
            // All four outcomes are kept; each gets its own local correction
            // v_m on A1 and v_{n+1} on B1 before the results are pooled.
            let mut pooled = ComplexMatrix::zeros(4);
            let mut p_total = 0.0;
            for k in 1..=4 {
                let out = filtered.measure_and_collapse(k);
                let Some(state) = out.state else { continue };
                let (m_bit, n_bit) = crate::states::MeasurementProjector::outcome_bits(k);
                let correction = v_matrix(m_bit).kron(&v_matrix(n_bit + 1));
                let rotated = state.conjugate(&correction);
                pooled = pooled.add(&rotated.matrix().scale_real(out.probability));
                p_total += out.probability;
            }
            if p_total < DEGENERATE_PROB_TOL {
                return Err(Error::DegenerateInput { value: p_total });
            }
            let state = DensityMatrix::new_unchecked(
                pooled.scale_real(1.0 / p_total).hermitian_part(),
            );
            Ok(StepResult {
                state,
                success_probability: acceptance,
            })
        }
        ProtocolKind::Cnot => cnot_circuit(rho, CnotBranch::BothOnes),
    }
}

/// u1^dag on A1, A2 and u1 on B1, B2 (opening rotation of the Deutsch and
/// CNOT protocols).
fn deutsch_rotation() -> ComplexMatrix {
    let u1 = u_matrix(1);
    let u1d = u1.adjoint();
    embed_single_qubit(&u1d, 0)
        .mul(&embed_single_qubit(&u1, 1))
        .mul(&embed_single_qubit(&u1d, 2))
        .mul(&embed_single_qubit(&u1, 3))
}

fn cnot_circuit(rho: &DensityMatrix, branch: CnotBranch) -> Result<StepResult> {
    let pair = PairState::tensor(rho, rho);
    let evolved = pair.apply_unitary(&bilateral_cnot().mul(&deutsch_rotation()));
    let k = match branch {
        CnotBranch::BothOnes => 4,
        CnotBranch::BothZeros => 1,
    };
    let out = evolved.measure_and_collapse(k);
    let state = out.state.ok_or(Error::DegenerateOutcome {
        outcome: k,
        probability: out.probability,
    })?;
    Ok(StepResult {
        state,
        success_probability: out.probability,
    })
}

/// |1><1| + |3><3| on one node's qubit pair, in the computational basis.
pub fn mfi_projector_4x4() -> ComplexMatrix {
    DensityMatrix::bell_state(1)
        .matrix()
        .add(DensityMatrix::bell_state(3).matrix())
}

/// Pools the listed measurement outcomes into the conditional output state
/// and the total kept probability.
fn aggregate_outcomes(pair: &PairState, kept: &[usize]) -> Result<(DensityMatrix, f64)> {
    let mut pooled = ComplexMatrix::zeros(4);
    let mut p_total = 0.0;
    for &k in kept {
        let out = pair.measure_and_collapse(k);
        if let Some(state) = out.state {
            pooled = pooled.add(&state.matrix().scale_real(out.probability));
            p_total += out.probability;
        }
    }
    if p_total < DEGENERATE_PROB_TOL {
        return Err(Error::DegenerateInput { value: p_total });
    }
    Ok((
        DensityMatrix::new_unchecked(pooled.scale_real(1.0 / p_total).hermitian_part()),
        p_total,
    ))
}

/// One trajectory point: concurrence after the round and the round's
/// success probability, already gated by the zero-concurrence convention.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub concurrence: f64,
    pub success_probability: f64,
}

/// Applies the closed-form map of `kind` for `n` rounds.
///
/// The Bennett and Deutsch preprocessings run once before round 1. A round
/// whose output concurrence is zero freezes the trajectory: concurrence and
/// success probability are pinned to 0 from then on and the map is no longer
/// applied (states with zero concurrence cannot be revived by local
/// operations). A degenerate map normalization freezes the same way.
pub fn iterate(kind: ProtocolKind, rho: &DensityMatrix, n: usize) -> Result<Vec<StepResult>> {
    Ok(iterate_with_concurrence(kind, rho, n)?
        .into_iter()
        .map(|(step, _)| step)
        .collect())
}

/// Like [`iterate`] but keeps each round's output concurrence alongside.
pub fn iterate_with_concurrence(
    kind: ProtocolKind,
    rho: &DensityMatrix,
    n: usize,
) -> Result<Vec<(StepResult, f64)>> {
    let mut results = Vec::with_capacity(n);
    let mut frozen = false;

    match kind {
        ProtocolKind::Bennett => {
            let mut r1 = rho.bell_overlap(1);
            let mut state = DensityMatrix::werner(r1.clamp(0.0, 1.0))?;
            for _ in 0..n {
                if !frozen {
                    let (next, p) = bennett_step(r1);
                    r1 = next;
                    state = DensityMatrix::werner(r1.clamp(0.0, 1.0))?;
                    let c = (2.0 * r1 - 1.0).max(0.0);
                    if c > 0.0 {
                        results.push((
                            StepResult {
                                state: state.clone(),
                                success_probability: p,
                            },
                            c,
                        ));
                        continue;
                    }
                    frozen = true;
                }
                results.push((
                    StepResult {
                        state: state.clone(),
                        success_probability: 0.0,
                    },
                    0.0,
                ));
            }
        }
        ProtocolKind::Deutsch => {
            let mut r = rho.bell_diagonal_coefficients();
            for x in r.iter_mut() {
                *x = x.max(0.0);
            }
            let mut state = DensityMatrix::bell_diagonal(normalized4(r))?;
            for _ in 0..n {
                if !frozen {
                    let (next, p) = deutsch_step(r);
                    r = next;
                    state = DensityMatrix::bell_diagonal(normalized4(r))?;
                    let c = (2.0 * r.iter().cloned().fold(0.0, f64::max) - 1.0).max(0.0);
                    if c > 0.0 {
                        results.push((
                            StepResult {
                                state: state.clone(),
                                success_probability: p,
                            },
                            c,
                        ));
                        continue;
                    }
                    frozen = true;
                }
                results.push((
                    StepResult {
                        state: state.clone(),
                        success_probability: 0.0,
                    },
                    0.0,
                ));
            }
        }
        ProtocolKind::Mfi | ProtocolKind::Cnot => {
            let step_fn = match kind {
                ProtocolKind::Mfi => mfi_step,
                _ => cnot_step,
            };
            let mut state = rho.clone();
            for _ in 0..n {
                if !frozen {
                    match step_fn(&state) {
                        Ok(step) => {
                            let c = concurrence(&step.state)?;
                            state = step.state.clone();
                            if c > 0.0 {
                                results.push((step, c));
                                continue;
                            }
                            frozen = true;
                        }
                        Err(Error::DegenerateInput { .. }) => {
                            frozen = true;
                        }
                        Err(e) => return Err(e),
                    }
                }
                results.push((
                    StepResult {
                        state: state.clone(),
                        success_probability: 0.0,
                    },
                    0.0,
                ));
            }
        }
    }
    Ok(results)
}

/// Concurrence/success trajectory of `n` rounds (cheaper companion of
/// [`iterate`] for statistics pipelines).
pub fn trajectory(
    kind: ProtocolKind,
    rho: &DensityMatrix,
    n: usize,
) -> Result<Vec<TrajectoryPoint>> {
    Ok(iterate_with_concurrence(kind, rho, n)?
        .into_iter()
        .map(|(step, c)| TrajectoryPoint {
            concurrence: c,
            success_probability: if c > 0.0 {
                step.success_probability
            } else {
                0.0
            },
        })
        .collect())
}

fn normalized4(mut r: [f64; 4]) -> [f64; 4] {
    let s: f64 = r.iter().sum();
    for x in r.iter_mut() {
        *x /= s;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_states(n: usize, seed: u64) -> Vec<DensityMatrix> {
        crate::sampler::sample_states(crate::sampler::ChainConfig {
            seed,
            burn_in: 300,
            thinning: 1,
            n_samples: n,
        })
        .unwrap()
        .map(|s| s.unwrap())
        .collect()
    }

    fn section_iid_example(c: f64) -> DensityMatrix {
        // r2 = c, r1 = r4 = (1-c)/2, r14 = i(1-c)/2.
        let mut table = ComplexMatrix::zeros(4);
        table[(1, 1)] = C64::new(c, 0.0);
        table[(0, 0)] = C64::new((1.0 - c) / 2.0, 0.0);
        table[(3, 3)] = C64::new((1.0 - c) / 2.0, 0.0);
        table[(0, 3)] = C64::new(0.0, (1.0 - c) / 2.0);
        table[(3, 0)] = C64::new(0.0, -(1.0 - c) / 2.0);
        DensityMatrix::from_bell_table(&table).unwrap()
    }

    #[test]
    fn local_unitaries_are_unitary() {
        for j in 1..=4 {
            assert!(u_matrix(j).is_unitary(1e-12), "u_{j} not unitary");
            assert!(k_matrix(j).is_unitary(1e-12), "K_{j} not unitary");
        }
        for n in 0..=2 {
            assert!(v_matrix(n).is_unitary(1e-12), "v_{n} not unitary");
        }
    }

    #[test]
    fn twirl_fixes_werner_states() {
        for r1 in [0.0, 0.3, 0.75, 1.0] {
            let w = DensityMatrix::werner(r1).unwrap();
            let t = twirl_to_werner(&w);
            assert!(
                t.matrix().max_abs_diff(w.matrix()) < 1e-12,
                "Werner {r1} moved under twirling"
            );
        }
        let singlet = DensityMatrix::bell_state(1);
        assert!(twirl_to_werner(&singlet).matrix().max_abs_diff(singlet.matrix()) < 1e-12);
    }

    #[test]
    fn twirl_outputs_werner_form_with_preserved_singlet_weight() {
        for (i, rho) in uniform_states(50, 301).iter().enumerate() {
            let r1_in = rho.bell_overlap(1);
            let t = twirl_to_werner(rho);
            let table = t.bell_table();
            assert_abs_diff_eq!(table[(0, 0)].re, r1_in, epsilon = 1e-10);
            // Off-diagonals vanish and the rest of the diagonal is uniform.
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(
                            table[(r, c)].norm() < 1e-10,
                            "state {i}: off-diagonal ({r},{c}) = {}",
                            table[(r, c)]
                        );
                    }
                }
            }
            let rest = (1.0 - r1_in) / 3.0;
            for d in 1..4 {
                assert_abs_diff_eq!(table[(d, d)].re, rest, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn twirl_matches_explicit_twelve_term_sum() {
        // Direct evaluation of the double-rotation average, term by term.
        for rho in uniform_states(20, 302) {
            let mut acc = ComplexMatrix::zeros(4);
            for j in 1..=3 {
                for i in 1..=4 {
                    let ki = k_matrix(i);
                    let kj = k_matrix(j);
                    let inner = ki
                        .adjoint()
                        .mul(&ki.adjoint())
                        .mul(rho.matrix())
                        .mul(&ki)
                        .mul(&ki);
                    acc = acc.add(&kj.adjoint().mul(&inner).mul(&kj));
                }
            }
            let oracle = acc.scale_real(1.0 / 12.0);
            assert!(twirl_to_werner(&rho).matrix().max_abs_diff(&oracle) < 1e-12);
        }
    }

    #[test]
    fn bell_diagonalize_preserves_diagonal() {
        let mixed = DensityMatrix::maximally_mixed();
        assert!(bell_diagonalize(&mixed).matrix().max_abs_diff(mixed.matrix()) < 1e-12);

        let bd = DensityMatrix::bell_diagonal([0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(bell_diagonalize(&bd).matrix().max_abs_diff(bd.matrix()) < 1e-12);

        for rho in uniform_states(50, 303) {
            let want = rho.bell_diagonal_coefficients();
            let out = bell_diagonalize(&rho);
            let table = out.bell_table();
            for (i, w) in want.iter().enumerate() {
                assert_abs_diff_eq!(table[(i, i)].re, *w, epsilon = 1e-10);
            }
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(table[(r, c)].norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn bennett_map_fixed_points_and_values() {
        let (r, p) = bennett_step(1.0);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);

        let (r, p) = bennett_step(0.5);
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 5.0 / 9.0, epsilon = 1e-15);

        let (r, p) = bennett_step(0.7);
        assert_abs_diff_eq!(r, 4.5 / 6.12, epsilon = 1e-14);
        assert_abs_diff_eq!(p, 0.68, epsilon = 1e-14);
    }

    #[test]
    fn deutsch_map_examples() {
        let (r, p) = deutsch_step([0.0, 0.0, 0.0, 1.0]);
        assert_eq!(r, [0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);

        // |1> maps to |4> in a single round.
        let (r, p) = deutsch_step([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r, [0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);

        let (r, p) = deutsch_step([0.6, 0.2, 0.1, 0.1]);
        assert_abs_diff_eq!(p, 0.58, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0], 0.04 / 0.58, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 0.05 / 0.58, epsilon = 1e-14);
        assert_abs_diff_eq!(r[2], 0.12 / 0.58, epsilon = 1e-14);
        assert_abs_diff_eq!(r[3], 0.37 / 0.58, epsilon = 1e-14);
        let total: f64 = r.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mfi_map_examples() {
        let singlet = DensityMatrix::bell_state(1);
        let out = mfi_step(&singlet).unwrap();
        assert!(out.state.matrix().max_abs_diff(singlet.matrix()) < 1e-12);
        assert_abs_diff_eq!(out.success_probability, 0.5, epsilon = 1e-14);

        let mixed = DensityMatrix::maximally_mixed();
        let out = mfi_step(&mixed).unwrap();
        assert_abs_diff_eq!(out.success_probability, 0.25, epsilon = 1e-14);
        let table = out.state.bell_table();
        for i in 0..4 {
            assert_abs_diff_eq!(table[(i, i)].re, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn cnot_map_reduces_to_deutsch_on_bell_diagonal_states() {
        let bd = DensityMatrix::bell_diagonal([0.6, 0.2, 0.1, 0.1]).unwrap();
        let out = cnot_step(&bd).unwrap();
        assert_abs_diff_eq!(out.success_probability, 0.29, epsilon = 1e-14); // E/2
        let (want, _) = deutsch_step([0.6, 0.2, 0.1, 0.1]);
        let got = out.state.bell_diagonal_coefficients();
        for (g, w) in got.iter().zip(want.iter()) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn cnot_one_step_purification_example() {
        for c in [0.5, 0.8, 1.0] {
            let rho = section_iid_example(c);
            let out = cnot_step(&rho).unwrap();
            let bell2 = DensityMatrix::bell_state(2);
            assert!(
                out.state.matrix().max_abs_diff(bell2.matrix()) < 1e-12,
                "c = {c}: output is not |2><2|"
            );
            assert_abs_diff_eq!(out.success_probability, c * c / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn protocol_fixed_points_exact() {
        let b1 = DensityMatrix::bell_state(1);
        let b2 = DensityMatrix::bell_state(2);
        let b4 = DensityMatrix::bell_state(4);

        // Bennett on the singlet (r1 = 1).
        let (r, p) = bennett_step(1.0);
        assert!((r - 1.0).abs() < 1e-12 && (p - 1.0).abs() < 1e-12);
        // MFI fixes |1><1|.
        let out = mfi_step(&b1).unwrap();
        assert!(out.state.matrix().max_abs_diff(b1.matrix()) < 1e-12);
        // Deutsch and CNOT fix |2><2| and |4><4|.
        for state in [&b2, &b4] {
            let r_in = state.bell_diagonal_coefficients();
            let (r_out, _) = deutsch_step(r_in);
            for (a, b) in r_out.iter().zip(r_in.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
            let out = cnot_step(state).unwrap();
            assert!(out.state.matrix().max_abs_diff(state.matrix()) < 1e-12);
        }
    }

    #[test]
    fn mfi_second_round_form_is_preserved() {
        for rho in uniform_states(30, 304) {
            let Ok(first) = mfi_step(&rho) else { continue };
            let t1 = first.state.bell_table();
            for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                assert!(t1[(i, j)].norm() < 1e-12, "first round left r_({i},{j})");
            }
            let Ok(second) = mfi_step(&first.state) else {
                continue;
            };
            let t2 = second.state.bell_table();
            for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                assert!(t2[(i, j)].norm() < 1e-12, "second round broke the form");
            }
        }
    }

    #[test]
    fn circuit_matches_closed_form_bennett() {
        for rho in uniform_states(60, 305) {
            let oracle = circuit_oracle(ProtocolKind::Bennett, &rho).unwrap();
            let r1 = rho.bell_overlap(1);
            let (r1_next, p) = bennett_step(r1);
            let closed = DensityMatrix::werner(r1_next.clamp(0.0, 1.0)).unwrap();
            assert!(
                oracle.state.matrix().max_abs_diff(closed.matrix()) < 1e-10,
                "state mismatch"
            );
            assert_abs_diff_eq!(oracle.success_probability, p, epsilon = 1e-10);
        }
    }

    #[test]
    fn circuit_matches_closed_form_deutsch() {
        for rho in uniform_states(60, 306) {
            let oracle = circuit_oracle(ProtocolKind::Deutsch, &rho).unwrap();
            let mut r = rho.bell_diagonal_coefficients();
            for x in r.iter_mut() {
                *x = x.max(0.0);
            }
            let (r_next, p) = deutsch_step(r);
            let closed = DensityMatrix::bell_diagonal(r_next).unwrap();
            assert!(oracle.state.matrix().max_abs_diff(closed.matrix()) < 1e-10);
            assert_abs_diff_eq!(oracle.success_probability, p, epsilon = 1e-10);
        }
    }

    #[test]
    fn circuit_matches_closed_form_mfi() {
        for rho in uniform_states(60, 307) {
            let (Ok(oracle), Ok(closed)) =
                (circuit_oracle(ProtocolKind::Mfi, &rho), mfi_step(&rho))
            else {
                continue;
            };
            assert!(
                oracle.state.matrix().max_abs_diff(closed.state.matrix()) < 1e-10,
                "MFI circuit deviates from the map"
            );
            assert_abs_diff_eq!(
                oracle.success_probability,
                closed.success_probability,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn circuit_matches_closed_form_cnot() {
        for rho in uniform_states(60, 308) {
            let (Ok(oracle), Ok(closed)) =
                (circuit_oracle(ProtocolKind::Cnot, &rho), cnot_step(&rho))
            else {
                continue;
            };
            assert!(oracle.state.matrix().max_abs_diff(closed.state.matrix()) < 1e-10);
            assert_abs_diff_eq!(
                oracle.success_probability,
                closed.success_probability,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn circuit_special_cases() {
        // CNOT circuit reproduces the one-step purification family.
        let rho = section_iid_example(0.5);
        let out = circuit_oracle(ProtocolKind::Cnot, &rho).unwrap();
        let bell2 = DensityMatrix::bell_state(2);
        assert!(out.state.matrix().max_abs_diff(bell2.matrix()) < 1e-10);
        assert_abs_diff_eq!(out.success_probability, 0.125, epsilon = 1e-12);

        // MFI circuit fixes |1><1|.
        let singlet = DensityMatrix::bell_state(1);
        let out = circuit_oracle(ProtocolKind::Mfi, &singlet).unwrap();
        assert!(out.state.matrix().max_abs_diff(singlet.matrix()) < 1e-10);
    }

    #[test]
    fn purifiable_classification_examples() {
        let werner06 = DensityMatrix::werner(0.6).unwrap();
        assert_eq!(
            purifiable(ProtocolKind::Bennett, &werner06),
            Some(Attractor::Bell1)
        );
        let mixed = DensityMatrix::maximally_mixed();
        for kind in ProtocolKind::ALL {
            assert_eq!(purifiable(kind, &mixed), None);
        }
        // A state dominated by |2> goes to |2> under Deutsch, MFI and CNOT.
        let b2ish = DensityMatrix::bell_diagonal([0.1, 0.7, 0.1, 0.1]).unwrap();
        assert_eq!(
            purifiable(ProtocolKind::Deutsch, &b2ish),
            Some(Attractor::Bell2)
        );
        assert_eq!(purifiable(ProtocolKind::Mfi, &b2ish), Some(Attractor::Bell2));
        assert_eq!(purifiable(ProtocolKind::Cnot, &b2ish), Some(Attractor::Bell2));
    }

    #[test]
    fn keep_zeros_conditions_are_more_restrictive() {
        let mut keep_ones = 0usize;
        let mut keep_zeros = 0usize;
        for rho in uniform_states(400, 309) {
            if purifiable(ProtocolKind::Cnot, &rho).is_some() {
                keep_ones += 1;
            }
            if cnot_keep_zeros_purifiable(&rho).is_some() {
                keep_zeros += 1;
                // The restrictive condition implies the standard one.
                assert!(purifiable(ProtocolKind::Cnot, &rho).is_some());
            }
        }
        assert!(keep_zeros < keep_ones, "{keep_zeros} !< {keep_ones}");
    }

    #[test]
    fn keep_zeros_branch_purifies_conditioned_states() {
        // Conditioned states survive the restrictive branch and its
        // iteration drives them toward a Bell state.
        // Entangled Bell-diagonal states satisfy the restrictive conditions
        // (their right-hand sides vanish); uniform states rarely do.
        let mut rng = ChaCha8Rng::seed_from_u64(310);
        let mut conditioned: Vec<DensityMatrix> = Vec::new();
        use rand::Rng;
        while conditioned.len() < 25 {
            let lead = rng.random_range(0.55..0.95);
            let mut rest = [0.0f64; 3];
            for x in rest.iter_mut() {
                *x = rng.random_range(0.0..1.0);
            }
            let norm: f64 = rest.iter().sum::<f64>() / (1.0 - lead);
            let r = [lead, rest[0] / norm, rest[1] / norm, rest[2] / norm];
            let rho = DensityMatrix::bell_diagonal(r).unwrap();
            if cnot_keep_zeros_purifiable(&rho).is_some() {
                conditioned.push(rho);
            }
        }
        let mut checked = 0;
        for rho in &conditioned {
            let mut state = rho.clone();
            for _ in 0..30 {
                state = cnot_step_keep_zeros(&state).unwrap().state;
                assert!(concurrence(&state).unwrap() > 0.0);
            }
            assert!(
                concurrence(&state).unwrap() > 0.9,
                "keep-zeros iteration failed to purify a conditioned state"
            );
            checked += 1;
        }
        assert!(checked > 0, "no conditioned states found");
    }

    #[test]
    fn monotone_concurrence_under_conditions() {
        // Bennett's scalar map climbs monotonically above the r1 = 1/2
        // threshold. The other protocols' conditions guarantee asymptotic
        // purification; a general input can dip for a round or two before
        // the state enters the reduced coefficient family, from where the
        // maps climb to a Bell state. The binding checks are therefore
        // survival plus convergence, and late-round monotonicity.
        let states = uniform_states(2000, 311);
        let mut counts = [0usize; 4];
        for rho in &states {
            if purifiable(ProtocolKind::Bennett, rho).is_some() {
                let r1 = rho.bell_overlap(1);
                let before = (2.0 * r1 - 1.0).max(0.0);
                let (r1_next, _) = bennett_step(r1);
                let after = (2.0 * r1_next - 1.0).max(0.0);
                assert!(after >= before - 1e-9);
                counts[0] += 1;
            }
            for (slot, kind) in [
                (1usize, ProtocolKind::Deutsch),
                (2, ProtocolKind::Mfi),
                (3, ProtocolKind::Cnot),
            ] {
                if purifiable(kind, rho).is_none() {
                    continue;
                }
                let points = trajectory(kind, rho, 35).unwrap();
                assert!(
                    points.iter().all(|p| p.concurrence > 0.0),
                    "{kind:?}: conditioned state died"
                );
                assert!(
                    points.last().unwrap().concurrence > 0.99,
                    "{kind:?}: conditioned state failed to approach a Bell state"
                );
                // Once the state is inside the reduced family the map climbs.
                let tail: Vec<f64> = points.iter().skip(2).map(|p| p.concurrence).collect();
                for w in tail.windows(2) {
                    assert!(w[1] >= w[0] - 1e-6, "{kind:?}: late-round dip {w:?}");
                }
                counts[slot] += 1;
            }
        }
        assert!(counts.iter().all(|&c| c > 0), "conditions never hit: {counts:?}");
    }

    #[test]
    fn iterate_bennett_werner_sequence() {
        let rho = DensityMatrix::werner(0.6).unwrap();
        let steps = iterate(ProtocolKind::Bennett, &rho, 3).unwrap();
        let mut r1 = 0.6;
        let mut previous = r1;
        for step in &steps {
            let (next, p) = bennett_step(r1);
            r1 = next;
            assert_abs_diff_eq!(step.state.bell_overlap(1), r1, epsilon = 1e-10);
            assert_abs_diff_eq!(step.success_probability, p, epsilon = 1e-12);
            assert!(r1 > previous, "sequence not strictly increasing");
            previous = r1;
        }
    }

    #[test]
    fn iterate_cnot_on_bell4_is_constant() {
        let b4 = DensityMatrix::bell_state(4);
        let steps = iterate(ProtocolKind::Cnot, &b4, 5).unwrap();
        for step in steps {
            assert!(step.state.matrix().max_abs_diff(b4.matrix()) < 1e-12);
            assert_abs_diff_eq!(step.success_probability, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn iterate_separable_input_is_frozen_zero() {
        let mixed = DensityMatrix::maximally_mixed();
        for kind in ProtocolKind::ALL {
            let points = trajectory(kind, &mixed, 4).unwrap();
            for p in points {
                assert_eq!(p.concurrence, 0.0);
                assert_eq!(p.success_probability, 0.0);
            }
        }
    }

    #[test]
    fn iterate_outputs_are_valid_states() {
        for rho in uniform_states(20, 312) {
            for kind in ProtocolKind::ALL {
                for step in iterate(kind, &rho, 4).unwrap() {
                    let m = step.state.matrix();
                    assert!((m.trace().re - 1.0).abs() < 1e-10);
                    assert!(m.hermiticity_deviation() < 1e-9);
                    let eigs = crate::eig::hermitian_eigenvalues(m).unwrap();
                    assert!(*eigs.last().unwrap() > -1e-9);
                }
            }
        }
    }

    #[test]
    fn protocol_kind_parsing_and_names() {
        for kind in ProtocolKind::ALL {
            assert_eq!(kind.name().parse::<ProtocolKind>().unwrap(), kind);
        }
        assert!("breeding".parse::<ProtocolKind>().is_err());
    }
}
