//! Variational purification rounds: the parametrized entangling operation,
//! measurement policies, the average-concurrence cost and its gradient.
//!
//! One round takes rho to the conditional state of pair (A1, B1) after
//!
//! 1. applying Pi to rho (x) rho — either the optimized two-node unitary
//!    V(alpha_AB) or, in a first entanglement-destroying round, the fixed
//!    pair filter M2 (x) M2 with M2 = I - |2><2| (see [`special_projector`]) —
//! 2. measuring (A2, B2) in the computational basis and keeping the outcome
//!    selected by the measurement policy.
//!
//! The cost of a sample is 1 minus its mean output concurrence. Its gradient
//! with respect to the 30 Euler angles is assembled analytically: factor
//! derivatives of the Euler product, a rank-structured sweep through the
//! 16x16 conjugation, and first-order eigenvalue perturbation through the
//! concurrence (see [`crate::metrics::concurrence_gradient_kernel`]).

use crate::error::{Error, Result};
use crate::euler::{
    angle_upper_bounds, pair_unitary_from_halves, su4_unitary_unchecked,
    su4_unitary_with_derivatives,
};
use crate::linalg::{pairwise_sum, ComplexMatrix, ZERO};
use crate::metrics::{concurrence, concurrence_gradient_kernel};
use crate::protocols::StepResult;
use crate::states::{embed_two_qubit, DensityMatrix, PairState, DEGENERATE_PROB_TOL};
use rayon::prelude::*;
use serde::Serialize;

/// Which of the four (A2, B2) measurement outcomes a round keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasurementPolicy {
    /// Keep the outcome with the largest output concurrence (ties go to the
    /// lowest outcome index).
    Greedy,
    /// Always keep outcome k (1..=4).
    FixedOutcome(usize),
}

impl MeasurementPolicy {
    pub fn name(&self) -> String {
        match self {
            MeasurementPolicy::Greedy => "greedy".to_string(),
            MeasurementPolicy::FixedOutcome(k) => format!("fixed:{k}"),
        }
    }
}

impl std::str::FromStr for MeasurementPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if lower == "greedy" {
            return Ok(MeasurementPolicy::Greedy);
        }
        if let Some(k) = lower.strip_prefix("fixed:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad outcome in '{s}'")))?;
            if (1..=4).contains(&k) {
                return Ok(MeasurementPolicy::FixedOutcome(k));
            }
        }
        Err(Error::InvalidParameter(format!(
            "policy must be 'greedy' or 'fixed:k' with k in 1..=4, got '{s}'"
        )))
    }
}

/// The entangling operation a round applies before the measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum RoundOperation {
    /// M2 (x) M2 with M2 = I - |2><2| filtering each shared pair; only ever
    /// used in round 1.
    SpecialProjector,
    OptimizedUnitary(EulerAngles),
}

/// Per-round operation descriptor plus the measurement policy.
#[derive(Debug, Clone)]
pub struct RoundPlan {
    pub operation: RoundOperation,
    pub policy: MeasurementPolicy,
}

/// The 30 box-bounded Euler angles (alpha_A, alpha_B) of V(alpha_AB).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerAngles {
    alpha: Vec<f64>,
}

impl EulerAngles {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != 30 {
            return Err(Error::DimensionMismatch {
                expected: 30,
                got: alpha.len(),
            });
        }
        let (lower, upper) = bounds30();
        for (i, &a) in alpha.iter().enumerate() {
            if a < lower[i] - 1e-12 || a > upper[i] + 1e-12 {
                return Err(Error::AngleOutOfBounds {
                    index: i,
                    value: a,
                    lower: lower[i],
                    upper: upper[i],
                });
            }
        }
        Ok(Self { alpha })
    }

    pub fn zeros() -> Self {
        Self {
            alpha: vec![0.0; 30],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn half_a(&self) -> [f64; 15] {
        self.alpha[..15].try_into().unwrap()
    }

    pub fn half_b(&self) -> [f64; 15] {
        self.alpha[15..].try_into().unwrap()
    }
}

/// Box bounds of the 30-dimensional angle vector (two copies of the
/// 15-angle bounds).
pub fn bounds30() -> (Vec<f64>, Vec<f64>) {
    let upper15 = angle_upper_bounds();
    let mut upper = Vec::with_capacity(30);
    upper.extend_from_slice(&upper15);
    upper.extend_from_slice(&upper15);
    (vec![0.0; 30], upper)
}

/// V(alpha_AB) as a 16x16 operator.
pub fn pair_unitary(angles: &EulerAngles) -> ComplexMatrix {
    let u_a = su4_unitary_unchecked(&angles.half_a());
    let u_b = su4_unitary_unchecked(&angles.half_b());
    pair_unitary_from_halves(&u_a, &u_b)
}

/// The first-round projector Pi = M2 (x) M2 with M2 = I - |2><2| filtering
/// each shared pair, i.e. M2 acts on (A1, B1) and on (A2, B2).
///
/// This filter works across the channel (it is not a local node operation,
/// which is why it has no known physical implementation) and both destroys
/// and redistributes entanglement: states dominated by |2> are suppressed
/// or annihilated outright, while the surviving population gains weight on
/// the other Bell components.
pub fn special_projector() -> ComplexMatrix {
    let bell2 = DensityMatrix::bell_state(2);
    let m2 = ComplexMatrix::identity(4).sub(bell2.matrix());
    embed_two_qubit(&m2, 0, 1).mul(&embed_two_qubit(&m2, 2, 3))
}

/// All four outcome branches of one round applied to a prepared pair state.
struct OutcomeSet {
    probabilities: [f64; 4],
    states: [Option<DensityMatrix>; 4],
}

fn measure_all(pair: &PairState) -> OutcomeSet {
    let mut probabilities = [0.0; 4];
    let mut states: [Option<DensityMatrix>; 4] = [None, None, None, None];
    for k in 1..=4 {
        let out = pair.measure_and_collapse(k);
        probabilities[k - 1] = out.probability;
        states[k - 1] = out.state;
    }
    OutcomeSet {
        probabilities,
        states,
    }
}

/// Chooses the outcome for a policy; returns (k, state, outcome probability).
fn select_outcome(
    outcomes: &OutcomeSet,
    policy: MeasurementPolicy,
) -> Result<(usize, DensityMatrix, f64)> {
    match policy {
        MeasurementPolicy::FixedOutcome(k) => match &outcomes.states[k - 1] {
            Some(state) => Ok((k, state.clone(), outcomes.probabilities[k - 1])),
            None => Err(Error::DegenerateOutcome {
                outcome: k,
                probability: outcomes.probabilities[k - 1],
            }),
        },
        MeasurementPolicy::Greedy => {
            let mut best: Option<(usize, f64)> = None;
            for k in 1..=4 {
                if let Some(state) = &outcomes.states[k - 1] {
                    let c = concurrence(state)?;
                    let better = match best {
                        None => true,
                        Some((_, best_c)) => c > best_c,
                    };
                    if better {
                        best = Some((k, c));
                    }
                }
            }
            let (k, _) = best.ok_or(Error::DegenerateOutcome {
                outcome: 0,
                probability: 0.0,
            })?;
            Ok((
                k,
                outcomes.states[k - 1].clone().unwrap(),
                outcomes.probabilities[k - 1],
            ))
        }
    }
}

/// One variational round on a single state.
///
/// The reported success probability is the kept outcome's probability,
/// multiplied by the projector acceptance when the round uses the special
/// projector.
pub fn variational_step(rho: &DensityMatrix, plan: &RoundPlan) -> Result<StepResult> {
    variational_step_pair(&PairState::tensor(rho, rho), plan)
}

/// Same as [`variational_step`] for a caller-prepared pair state.
pub fn variational_step_pair(pair: &PairState, plan: &RoundPlan) -> Result<StepResult> {
    let (prepared, acceptance) = match &plan.operation {
        RoundOperation::SpecialProjector => pair.apply_filter(&special_projector())?,
        RoundOperation::OptimizedUnitary(angles) => {
            (pair.apply_unitary(&pair_unitary(angles)), 1.0)
        }
    };
    let outcomes = measure_all(&prepared);
    let (_, state, probability) = select_outcome(&outcomes, plan.policy)?;
    Ok(StepResult {
        state,
        success_probability: probability * acceptance,
    })
}

/// Per-state outcome choice for a frozen-policy cost/gradient evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Outcome(usize),
    /// The state contributes concurrence 0 (annihilated branch).
    Degenerate,
}

/// Evaluates the policy at the given angles and freezes the outcome choice
/// for every sample state.
pub fn select_outcomes(
    angles: &EulerAngles,
    sample: &[DensityMatrix],
    policy: MeasurementPolicy,
) -> Result<Vec<Selection>> {
    let v = pair_unitary(angles);
    sample
        .par_iter()
        .map(|rho| {
            let pair = PairState::tensor(rho, rho).apply_unitary(&v);
            let outcomes = measure_all(&pair);
            match select_outcome(&outcomes, policy) {
                Ok((k, _, _)) => Ok(Selection::Outcome(k)),
                Err(Error::DegenerateOutcome { .. }) => Ok(Selection::Degenerate),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Average cost 1 - mean output concurrence under a frozen outcome
/// selection. Degenerate entries contribute concurrence 0.
pub fn cost_with_selection(
    angles: &EulerAngles,
    sample: &[DensityMatrix],
    selection: &[Selection],
) -> Result<f64> {
    assert_eq!(sample.len(), selection.len());
    let v = pair_unitary(angles);
    let concurrences: Vec<f64> = sample
        .par_iter()
        .zip(selection.par_iter())
        .map(|(rho, sel)| {
            let Selection::Outcome(k) = sel else {
                return Ok(0.0);
            };
            let pair = PairState::tensor(rho, rho).apply_unitary(&v);
            match pair.measure_and_collapse(*k).state {
                Some(state) => concurrence(&state),
                None => Ok(0.0),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(1.0 - pairwise_sum(&concurrences) / sample.len() as f64)
}

/// Average cost with the policy evaluated at these angles; returns the cost
/// and the number of degenerate (skipped) states.
pub fn cost(
    angles: &EulerAngles,
    sample: &[DensityMatrix],
    policy: MeasurementPolicy,
) -> Result<(f64, usize)> {
    let selection = select_outcomes(angles, sample, policy)?;
    let degenerate = selection
        .iter()
        .filter(|s| matches!(s, Selection::Degenerate))
        .count();
    Ok((cost_with_selection(angles, sample, &selection)?, degenerate))
}

/// Gradient of the average cost under a frozen outcome selection.
pub fn gradient_with_selection(
    angles: &EulerAngles,
    sample: &[DensityMatrix],
    selection: &[Selection],
) -> Result<Vec<f64>> {
    assert_eq!(sample.len(), selection.len());
    let alpha_a = angles.half_a();
    let alpha_b = angles.half_b();
    let (u_a, du_a) = su4_unitary_with_derivatives(&alpha_a);
    let (u_b, du_b) = su4_unitary_with_derivatives(&alpha_b);
    let v = pair_unitary_from_halves(&u_a, &u_b);

    // dV for each of the 30 angles: embed the factor derivative on its node.
    let embed_b = embed_two_qubit(&u_b, 1, 3);
    let embed_a = embed_two_qubit(&u_a, 0, 2);
    let mut dv: Vec<ComplexMatrix> = Vec::with_capacity(30);
    for d in &du_a {
        dv.push(embed_two_qubit(d, 0, 2).mul(&embed_b));
    }
    for d in &du_b {
        dv.push(embed_a.mul(&embed_two_qubit(d, 1, 3)));
    }

    let per_state: Vec<Vec<f64>> = sample
        .par_iter()
        .zip(selection.par_iter())
        .map(|(rho, sel)| {
            let Selection::Outcome(k) = sel else {
                return Ok(vec![0.0; 30]);
            };
            state_concurrence_gradient(rho, *k, &v, &dv)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    // d cost = -(1/N) sum_j dC_j, reduced column by column in fixed order.
    let n = sample.len() as f64;
    let mut grad = vec![0.0; 30];
    let mut column = vec![0.0; sample.len()];
    for (i, g) in grad.iter_mut().enumerate() {
        for (j, row) in per_state.iter().enumerate() {
            column[j] = row[i];
        }
        *g = -pairwise_sum(&column) / n;
    }
    Ok(grad)
}

/// Gradient of the average cost with the policy evaluated at these angles
/// (the outcome choice is frozen at the evaluation point, which is the
/// subgradient convention everywhere the argmax is not strict).
pub fn gradient(
    angles: &EulerAngles,
    sample: &[DensityMatrix],
    policy: MeasurementPolicy,
) -> Result<Vec<f64>> {
    let selection = select_outcomes(angles, sample, policy)?;
    gradient_with_selection(angles, sample, &selection)
}

/// d C(rho_k) / d alpha_i for all 30 angles, for one sample state and a
/// fixed kept outcome k.
fn state_concurrence_gradient(
    rho: &DensityMatrix,
    k: usize,
    v: &ComplexMatrix,
    dv: &[ComplexMatrix],
) -> Result<Vec<f64>> {
    let pair = PairState::tensor(rho, rho);
    let w = pair.matrix().mul(&v.adjoint()); // W = varrho V^dag
    let sigma = v.mul(&w); // V varrho V^dag

    // Outcome block: entries sigma[(i*4 + k-1, j*4 + k-1)].
    let col = k - 1;
    let mut norm = 0.0;
    for i in 0..4 {
        norm += sigma[(i * 4 + col, i * 4 + col)].re;
    }
    if norm < DEGENERATE_PROB_TOL {
        return Ok(vec![0.0; 30]);
    }
    let rho_k = DensityMatrix::new_unchecked(
        ComplexMatrix::from_fn(4, |i, j| sigma[(i * 4 + col, j * 4 + col)] / norm)
            .hermitian_part(),
    );

    let Some(kernel) = concurrence_gradient_kernel(&rho_k)? else {
        return Ok(vec![0.0; 30]);
    };
    let kernel_dot_rho = kernel.trace_product(rho_k.matrix());

    let mut grad = vec![0.0; 30];
    for (i, dvi) in dv.iter().enumerate() {
        // Block of dSigma = dV W + (dV W)^dag at the kept outcome.
        let mut dblock = ComplexMatrix::zeros(4);
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                let dv_row = dvi.row(r * 4 + col);
                for m in 0..16 {
                    let a = dv_row[m];
                    if a != ZERO {
                        acc += a * w[(m, c * 4 + col)];
                    }
                }
                dblock[(r, c)] = acc;
            }
        }
        // dSigma block = B + B^dag; trace gives dN.
        let full = dblock.add(&dblock.adjoint());
        let dnorm = full.trace().re;
        // d rho_k = (dT - rho_k dN)/N; dC = Re tr(K d rho_k).
        let tr_k_dt = kernel.trace_product(&full);
        grad[i] = ((tr_k_dt - kernel_dot_rho * dnorm) / norm).re;
    }
    Ok(grad)
}

/// Serialized record of one optimized round.
#[derive(Debug, Clone, Serialize)]
pub struct AngleRecord {
    pub round: usize,
    pub alpha_a: Vec<f64>,
    pub alpha_b: Vec<f64>,
    pub cost: f64,
    pub policy: String,
}

impl AngleRecord {
    pub fn new(round: usize, angles: &EulerAngles, cost: f64, policy: MeasurementPolicy) -> Self {
        Self {
            round,
            alpha_a: angles.half_a().to_vec(),
            alpha_b: angles.half_b().to_vec(),
            cost,
            policy: policy.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for _ in 0..3 {
            let vec: Vec<C64> = (0..4)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            m = m.add(&ComplexMatrix::projector(&vec).scale_real(1.0 / 3.0));
        }
        DensityMatrix::new(m).unwrap()
    }

    fn random_angles30(rng: &mut ChaCha8Rng) -> EulerAngles {
        let (_, upper) = bounds30();
        EulerAngles::new(upper.iter().map(|&u| rng.random_range(0.0..u)).collect()).unwrap()
    }

    #[test]
    fn angle_bounds_enforced() {
        let (_, upper) = bounds30();
        assert!(EulerAngles::new(upper.clone()).is_ok());
        let mut bad = upper;
        bad[16] += 0.1;
        assert!(EulerAngles::new(bad).is_err());
        assert!(EulerAngles::new(vec![0.0; 29]).is_err());
    }

    #[test]
    fn identity_round_with_fixed_outcome_is_transparent() {
        let mm = DensityMatrix::maximally_mixed();
        let plan = RoundPlan {
            operation: RoundOperation::OptimizedUnitary(EulerAngles::zeros()),
            policy: MeasurementPolicy::FixedOutcome(1),
        };
        let out = variational_step(&mm, &plan).unwrap();
        assert_abs_diff_eq!(out.success_probability, 0.25, epsilon = 1e-12);
        assert!(out.state.matrix().max_abs_diff(mm.matrix()) < 1e-12);

        // Any state passes through unchanged at alpha = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let rho = random_density(&mut rng);
            let out = variational_step(&rho, &plan);
            if let Ok(out) = out {
                assert!(out.state.matrix().max_abs_diff(rho.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn special_projector_is_a_projector() {
        let pi = special_projector();
        assert!(pi.mul(&pi).max_abs_diff(&pi) < 1e-13);
        assert!(pi.hermiticity_deviation() < 1e-13);
    }

    #[test]
    fn m2_annihilates_bell2_on_one_node_pair() {
        let bell2 = DensityMatrix::bell_state(2);
        let m2 = ComplexMatrix::identity(4).sub(bell2.matrix());
        let product = m2.mul(bell2.matrix());
        assert!(product.max_abs() < 1e-14);
    }

    #[test]
    fn degenerate_projector_input_detected() {
        // |2><2| is the kernel of the pair filter, so two shared copies of
        // it cannot pass the first round.
        let bell2 = DensityMatrix::bell_state(2);
        let plan = RoundPlan {
            operation: RoundOperation::SpecialProjector,
            policy: MeasurementPolicy::FixedOutcome(1),
        };
        assert!(matches!(
            variational_step(&bell2, &plan),
            Err(Error::DegenerateInput { .. })
        ));
    }

    #[test]
    fn greedy_matches_explicit_branch_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let rho = random_density(&mut rng);
            let angles = random_angles30(&mut rng);
            let plan = RoundPlan {
                operation: RoundOperation::OptimizedUnitary(angles.clone()),
                policy: MeasurementPolicy::Greedy,
            };
            let out = variational_step(&rho, &plan).unwrap();
            // Evaluate all four branches by hand.
            let pair =
                PairState::tensor(&rho, &rho).apply_unitary(&pair_unitary(&angles));
            let mut best_c = -1.0;
            let mut best_k = 0;
            for k in 1..=4 {
                let branch = pair.measure_and_collapse(k);
                if let Some(state) = branch.state {
                    let c = concurrence(&state).unwrap();
                    if c > best_c {
                        best_c = c;
                        best_k = k;
                    }
                }
            }
            let chosen = pair.measure_and_collapse(best_k);
            assert_abs_diff_eq!(
                out.success_probability,
                chosen.probability,
                epsilon = 1e-12
            );
            let got_c = concurrence(&out.state).unwrap();
            assert_abs_diff_eq!(got_c, best_c, epsilon = 1e-12);
            // Greedy dominance over every fixed policy.
            for k in 1..=4 {
                let fixed = RoundPlan {
                    operation: RoundOperation::OptimizedUnitary(angles.clone()),
                    policy: MeasurementPolicy::FixedOutcome(k),
                };
                if let Ok(f) = variational_step(&rho, &fixed) {
                    assert!(concurrence(&f.state).unwrap() <= best_c + 1e-12);
                }
            }
        }
    }

    #[test]
    fn cost_is_in_unit_interval_and_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let sample: Vec<DensityMatrix> = (0..30).map(|_| random_density(&mut rng)).collect();
        let angles = random_angles30(&mut rng);
        let (value, _) = cost(&angles, &sample, MeasurementPolicy::Greedy).unwrap();
        assert!((0.0..=1.0).contains(&value));

        let mut reversed = sample.clone();
        reversed.reverse();
        let (value_rev, _) = cost(&angles, &reversed, MeasurementPolicy::Greedy).unwrap();
        assert_abs_diff_eq!(value, value_rev, epsilon = 1e-12);
    }

    #[test]
    fn product_state_cost_is_one_at_identity() {
        let zz = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), ZERO, ZERO, ZERO]);
        let (value, degenerate) = cost(
            &EulerAngles::zeros(),
            &[zz],
            MeasurementPolicy::FixedOutcome(1),
        )
        .unwrap();
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-12);
        assert_eq!(degenerate, 0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let h = 1e-5;
        let sample: Vec<DensityMatrix> = (0..20).map(|_| random_density(&mut rng)).collect();
        let (lower, upper) = bounds30();
        let mut checked = 0;
        while checked < 5 {
            // Interior point so the finite-difference probes stay in the box.
            let angles = EulerAngles::new(
                (0..30)
                    .map(|i| rng.random_range(lower[i] + 2.0 * h..upper[i] - 2.0 * h))
                    .collect(),
            )
            .unwrap();
            let policy = MeasurementPolicy::Greedy;
            let selection = select_outcomes(&angles, &sample, policy).unwrap();
            if selection.iter().any(|s| matches!(s, Selection::Degenerate)) {
                continue;
            }
            let analytic = gradient_with_selection(&angles, &sample, &selection).unwrap();
            let mut fd = vec![0.0; 30];
            for i in 0..30 {
                let mut up = angles.as_slice().to_vec();
                up[i] += h;
                let mut down = angles.as_slice().to_vec();
                down[i] -= h;
                let f_up = cost_with_selection(
                    &EulerAngles::new(up).unwrap(),
                    &sample,
                    &selection,
                )
                .unwrap();
                let f_down = cost_with_selection(
                    &EulerAngles::new(down).unwrap(),
                    &sample,
                    &selection,
                )
                .unwrap();
                fd[i] = (f_up - f_down) / (2.0 * h);
            }
            let norm_fd = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm_fd < 1e-6 {
                continue;
            }
            let diff = analytic
                .iter()
                .zip(fd.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(
                diff / norm_fd < 1e-4,
                "gradient mismatch: rel err {}",
                diff / norm_fd
            );
            checked += 1;
        }
    }

    #[test]
    fn zero_concurrence_region_has_zero_gradient() {
        // A single product state stays separable for any local unitary, so
        // the cost is flat.
        let zz = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), ZERO, ZERO, ZERO]);
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let angles = random_angles30(&mut rng);
        let g = gradient(&angles, &[zz], MeasurementPolicy::FixedOutcome(1)).unwrap();
        for x in g {
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn policy_parsing() {
        assert_eq!(
            "greedy".parse::<MeasurementPolicy>().unwrap(),
            MeasurementPolicy::Greedy
        );
        assert_eq!(
            "fixed:3".parse::<MeasurementPolicy>().unwrap(),
            MeasurementPolicy::FixedOutcome(3)
        );
        assert!("fixed:5".parse::<MeasurementPolicy>().is_err());
        assert!("argmax".parse::<MeasurementPolicy>().is_err());
    }
}
