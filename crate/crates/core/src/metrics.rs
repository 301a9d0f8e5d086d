//! Concurrence, conditional fidelities and sample statistics.

use crate::eig::general_eigenvalues_4x4;
use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, ComplexMatrix};
use crate::protocols::{Attractor, ProtocolKind};
use crate::states::{qubit, DensityMatrix};
use serde::Serialize;

/// Spin-flip eigenvalues beyond this distance from the nonnegative real
/// axis indicate a genuinely invalid state rather than round-off. States
/// reaching the concurrence are always PSD-validated, so true eigenvalues
/// are real and nonnegative; the closed-form quartic scatters clustered
/// tiny roots by up to ~(coefficient noise)^(1/multiplicity), i.e. 1e-4-ish
/// in the worst rank-deficient cases, and such excursions are clamped.
fn eig_noise_tolerance(scale: f64) -> f64 {
    (1e-3 * scale).max(1e-4)
}

/// sigma_y (x) sigma_y, the spin-flip operator (real and symmetric).
pub fn spin_flip() -> ComplexMatrix {
    qubit::pauli_y().kron(&qubit::pauli_y())
}

fn spin_flipped_product(rho: &DensityMatrix) -> ComplexMatrix {
    let s = spin_flip();
    // rho~ = rho (sy x sy) rho* (sy x sy), conjugation in the standard basis.
    rho.matrix().mul(&s).mul(&rho.matrix().conj()).mul(&s)
}

/// Spectrum of rho~ as clusters of (value, multiplicity), descending.
///
/// Closed-form quartic roots scatter by roughly the cube root of machine
/// epsilon around an exact multiple root, so nearby roots are pooled into
/// their (well-conditioned) mean before taking square roots; pooling also
/// cancels the spurious conjugate imaginary parts such clusters carry.
struct SpinFlipSpectrum {
    /// Clusters (mu, multiplicity) sorted by decreasing mu; total count 4.
    clusters: Vec<(f64, usize)>,
}

const CLUSTER_REL_TOL: f64 = 3e-5;
/// Root scatter from coefficient round-off is absolute (the trace powers
/// carry ~1e-16 noise), so the pooling tolerance never drops below this.
const CLUSTER_ABS_TOL: f64 = 1e-5;

fn spin_flip_spectrum(tilde: &ComplexMatrix) -> Result<SpinFlipSpectrum> {
    let eigs = general_eigenvalues_4x4(tilde)?;
    let scale = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let ctol = (CLUSTER_REL_TOL * scale).max(CLUSTER_ABS_TOL);

    // Transitive-closure clustering (conjugate pairs can interleave with
    // nearby real roots, so one-pass grouping by real part is not enough).
    let mut labels = [0usize, 1, 2, 3];
    loop {
        let mut changed = false;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (eigs[i] - eigs[j]).norm() <= ctol && labels[i] != labels[j] {
                    let merged = labels[i].min(labels[j]);
                    let from = labels[i].max(labels[j]);
                    for l in labels.iter_mut() {
                        if *l == from {
                            *l = merged;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut clusters: Vec<(crate::linalg::C64, usize)> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for &label in &labels {
        if seen.contains(&label) {
            continue;
        }
        seen.push(label);
        let members: Vec<usize> = (0..4).filter(|&i| labels[i] == label).collect();
        let mean = members.iter().map(|&i| eigs[i]).sum::<crate::linalg::C64>()
            / members.len() as f64;
        clusters.push((mean, members.len()));
    }

    let mut out = Vec::with_capacity(clusters.len());
    let noise = eig_noise_tolerance(scale);
    for (mean, count) in clusters {
        if mean.im.abs() > noise {
            return Err(Error::NumericalFailure(format!(
                "spin-flip eigenvalue {mean} has a non-negligible imaginary part"
            )));
        }
        if mean.re < -noise {
            return Err(Error::NumericalFailure(format!(
                "spin-flip eigenvalue {mean} is negative beyond tolerance"
            )));
        }
        // Exact zeros of rank-deficient products come out as +-1e-14 noise;
        // the square root would amplify that to 1e-7, so floor it away.
        let mu = if mean.re < 1e-13 { 0.0 } else { mean.re };
        out.push((mu, count));
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(SpinFlipSpectrum { clusters: out })
}

/// Square roots of the eigenvalues of rho~, sorted in decreasing order.
pub fn concurrence_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let spectrum = spin_flip_spectrum(&spin_flipped_product(rho))?;
    let mut lambdas = [0.0f64; 4];
    let mut pos = 0;
    for (mu, count) in spectrum.clusters {
        for _ in 0..count {
            lambdas[pos] = mu.sqrt();
            pos += 1;
        }
    }
    Ok(lambdas)
}

/// Wootters concurrence C = max(0, l1 - l2 - l3 - l4).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let l = concurrence_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Sample mean, unbiased (N-1) standard deviation and standard error s/sqrt(N).
pub fn aggregate(values: &[f64]) -> Result<(f64, f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::NotEnoughData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = pairwise_sum(values) / nf;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (nf - 1.0);
    let std = var.max(0.0).sqrt();
    Ok((mean, std, std / nf.sqrt()))
}

/// Per-iteration statistics of a protocol run over a sample.
#[derive(Debug, Clone, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub mean_concurrence: f64,
    pub concurrence_std: f64,
    pub concurrence_stderr: f64,
    pub mean_success: f64,
    pub success_std: f64,
    pub success_stderr: f64,
    pub n_nonzero: usize,
}

impl IterationStats {
    pub fn from_values(iteration: usize, concurrences: &[f64], successes: &[f64]) -> Result<Self> {
        let (mean_concurrence, concurrence_std, concurrence_stderr) = aggregate(concurrences)?;
        let (mean_success, success_std, success_stderr) = aggregate(successes)?;
        Ok(Self {
            iteration,
            mean_concurrence,
            concurrence_std,
            concurrence_stderr,
            mean_success,
            success_std,
            success_stderr,
            n_nonzero: concurrences.iter().filter(|&&c| c > 0.0).count(),
        })
    }
}

/// Conditional fidelity toward one attractor of one protocol: the Bell
/// overlap r_k when the protocol's purification condition holds, else zero.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityRecord {
    pub kind: ProtocolKind,
    pub attractor: Attractor,
    pub value: f64,
}

/// Conditional fidelities of a state with respect to every stable fixed
/// point of the given protocol, gated by the protocol's purification
/// conditions.
pub fn conditional_fidelity(kind: ProtocolKind, rho: &DensityMatrix) -> Vec<FidelityRecord> {
    let table = rho.bell_table();
    let r = |i: usize| table[(i - 1, i - 1)].re;
    let off = |i: usize, j: usize| table[(i - 1, j - 1)];
    let record = |attractor: Attractor, condition: bool, overlap: f64| FidelityRecord {
        kind,
        attractor,
        value: if condition { overlap } else { 0.0 },
    };
    match kind {
        ProtocolKind::Bennett => {
            vec![record(Attractor::Bell1, 2.0 * r(1) > 1.0, r(1))]
        }
        ProtocolKind::Deutsch => vec![
            record(
                Attractor::Bell4,
                (2.0 * r(1) - 1.0) * (1.0 - 2.0 * r(4)) > 0.0,
                r(4),
            ),
            record(
                Attractor::Bell2,
                (2.0 * r(2) - 1.0) * (1.0 - 2.0 * r(3)) > 0.0,
                r(2),
            ),
        ],
        ProtocolKind::Mfi => vec![
            record(
                Attractor::Bell1,
                (2.0 * r(1) - 1.0) * (1.0 - 2.0 * r(3))
                    > -(2.0 * off(1, 3).im).powi(2) - (2.0 * off(2, 4).re).powi(2),
                r(1),
            ),
            record(
                Attractor::Bell2,
                (2.0 * r(2) - 1.0) * (1.0 - 2.0 * r(4))
                    > -(2.0 * off(2, 4).im).powi(2) - (2.0 * off(1, 3).re).powi(2),
                r(2),
            ),
        ],
        ProtocolKind::Cnot => vec![
            record(
                Attractor::Bell4,
                (2.0 * r(1) - 1.0) * (1.0 - 2.0 * r(4))
                    > -(2.0 * off(2, 3).im).powi(2) - (2.0 * off(1, 4).re).powi(2),
                r(4),
            ),
            record(
                Attractor::Bell2,
                (2.0 * r(2) - 1.0) * (1.0 - 2.0 * r(3))
                    > -(2.0 * off(1, 4).im).powi(2) - (2.0 * off(2, 3).re).powi(2),
                r(2),
            ),
        ],
    }
}

/// Infinite-iteration limit of the average concurrence: every state whose
/// purification condition holds counts as concurrence 1, every other state
/// as 0. Returns (mean, standard error).
pub fn asymptotic_limit(kind: ProtocolKind, sample: &[DensityMatrix]) -> Result<(f64, f64)> {
    let values: Vec<f64> = sample
        .iter()
        .map(|rho| {
            if crate::protocols::purifiable(kind, rho).is_some() {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let (mean, _, err) = aggregate(&values)?;
    Ok((mean, err))
}

/// The ultimate asymptote: the fraction of entangled states in the sample
/// (each counted as concurrence 1). No protocol can exceed this.
pub fn ultimate_limit(sample: &[DensityMatrix]) -> Result<(f64, f64)> {
    let values = sample
        .iter()
        .map(|rho| concurrence(rho).map(|c| if c > 0.0 { 1.0 } else { 0.0 }))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, _, err) = aggregate(&values)?;
    Ok((mean, err))
}

/// Fixed-width histogram over [0, 1]. Bins are half-open [lo, hi) except the
/// last, which is closed so that a value of exactly 1 lands in the top bin.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_count: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub excluded_zero: bool,
}

pub fn histogram(values: &[f64], bins: usize, exclude_zero: bool) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be >= 1".into()));
    }
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        if exclude_zero && v == 0.0 {
            continue;
        }
        let idx = ((v * bins as f64).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram {
        bin_count: bins,
        edges,
        counts,
        excluded_zero: exclude_zero,
    })
}

/// Data needed to propagate derivatives through the concurrence at a point:
/// dC = Re tr(K drho) for any in-plane variation drho of the state.
///
/// `None` means the concurrence is identically zero in a neighborhood (the
/// max(0, .) branch is inactive), so the derivative vanishes.
///
/// Eigenvalue ordering and the active max-branch are frozen at the
/// evaluation point; nearly degenerate eigenvalues are pooled into clusters
/// (see [`spin_flip_spectrum`]) that share a symmetrized coefficient, the
/// standard subgradient choice for sorted-eigenvalue functions. Values and
/// derivatives are built from the same cluster structure, so finite
/// differences agree wherever the clusters are stable.
pub fn concurrence_gradient_kernel(rho: &DensityMatrix) -> Result<Option<ComplexMatrix>> {
    let tilde = spin_flipped_product(rho);
    let spectrum = spin_flip_spectrum(&tilde)?;

    // Expand clusters into sorted lambda positions carrying the concurrence
    // coefficients (+1, -1, -1, -1); each cluster shares the mean of its
    // members' coefficients.
    let coeff = [1.0, -1.0, -1.0, -1.0];
    let mut expression = 0.0;
    let mut pos = 0;
    let mut cluster_coeff = Vec::with_capacity(spectrum.clusters.len());
    for &(mu, count) in &spectrum.clusters {
        let lambda = mu.sqrt();
        let mut sum = 0.0;
        for _ in 0..count {
            expression += coeff[pos] * lambda;
            sum += coeff[pos];
            pos += 1;
        }
        cluster_coeff.push(sum / count as f64);
    }
    if expression <= 0.0 {
        return Ok(None);
    }

    let identity = ComplexMatrix::identity(4);
    let mut kernel_g = ComplexMatrix::zeros(4);
    for (i, &(mu, _)) in spectrum.clusters.iter().enumerate() {
        let lambda = mu.sqrt();
        if lambda < 1e-8 {
            // sqrt is not differentiable at 0; subgradient choice: skip.
            continue;
        }
        if cluster_coeff[i] == 0.0 {
            continue;
        }
        // Spectral projector onto the cluster via the Lagrange product over
        // the other clusters' eigenvalues.
        let mut proj = identity.clone();
        for (j, &(other_mu, _)) in spectrum.clusters.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = mu - other_mu;
            proj = proj
                .mul(&tilde.sub(&identity.scale_real(other_mu)))
                .scale_real(1.0 / denom);
        }
        kernel_g = kernel_g.add(&proj.scale_real(cluster_coeff[i] / (2.0 * lambda)));
    }

    // Chain rule through rho~ = rho S rho* S:
    //   dC = Re tr(G drho~) = Re tr(K drho),  K = S rho* S G + conj(S G rho S).
    let s = spin_flip();
    let rho_conj_mid = s.mul(&rho.matrix().conj()).mul(&s);
    let k1 = rho_conj_mid.mul(&kernel_g);
    let k2 = s.mul(&kernel_g).mul(rho.matrix()).mul(&s).conj();
    Ok(Some(k1.add(&k2)))
}
