//! Hit-and-run sampling of the convex body of two-qubit density matrices.
//!
//! Expanding a unit-trace Hermitian 4x4 matrix in the orthonormal basis of
//! normalized Pauli products fixes one coefficient, so the set of density
//! matrices becomes a 15-dimensional convex body K around the origin
//! (the maximally mixed state), contained in the ball of radius sqrt(3)/2.
//! The hit-and-run walk picks an isotropic chord direction and a uniform
//! point on the chord's intersection with K; its stationary distribution is
//! uniform on K.
//!
//! The generator is ChaCha8 (seedable, stream-splittable) and the standard
//! normal for directions comes from `rand_distr` (Ziggurat); both choices are
//! part of the reproducibility contract and are recorded in run manifests as
//! `"chacha8"`.

use crate::eig::psd_conditions_from_traces;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{qubit, DensityMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Radius of the ball bounding K: purity <= 1 forces |a| <= sqrt(3)/2.
pub fn bounding_radius() -> f64 {
    3.0f64.sqrt() / 2.0
}

/// Name of the random generator driving the chain; recorded in manifests.
pub const GENERATOR_NAME: &str = "chacha8";

/// The 16 orthonormal Hermitian basis matrices B_i = (P_a (x) P_b)/2 built
/// from Pauli products, with tr(B_i B_j) = delta_ij. The identity element
/// I_4/2 is placed last (index 16) so that the first 15 are traceless.
pub fn basis_matrices() -> Vec<ComplexMatrix> {
    let paulis = [
        qubit::identity(),
        qubit::pauli_x(),
        qubit::pauli_y(),
        qubit::pauli_z(),
    ];
    let mut out = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            if a == 0 && b == 0 {
                continue;
            }
            out.push(paulis[a].kron(&paulis[b]).scale_real(0.5));
        }
    }
    out.push(ComplexMatrix::identity(4).scale_real(0.5));
    out
}

/// Coordinates of a state in the traceless part of the Pauli-product basis;
/// the coefficient of I_4/2 is fixed at 1/2 and not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 15]);

impl BlochVector {
    pub fn origin() -> Self {
        Self([0.0; 15])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Reconstructs rho(a) = I/4 + sum_i a_i B_i. The result is a valid
    /// state only when `membership` holds; no check is performed here.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let basis = traceless_basis();
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        for (a, b) in self.0.iter().zip(basis.iter()) {
            if *a != 0.0 {
                m = m.add(&b.scale_real(*a));
            }
        }
        m
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let basis = traceless_basis();
        let mut a = [0.0; 15];
        for (ai, b) in a.iter_mut().zip(basis.iter()) {
            *ai = b.trace_product_re(rho.matrix());
        }
        Self(a)
    }

    /// True exactly when rho(a) is positive semidefinite, decided through
    /// the signs of the characteristic-polynomial coefficients computed from
    /// the trace powers; roughly 3x cheaper than an eigendecomposition.
    pub fn membership(&self) -> bool {
        let norm2: f64 = self.0.iter().map(|x| x * x).sum();
        let p2 = 0.25 + norm2;
        if p2 > 1.0 + 1e-15 {
            return false;
        }
        let rho = self.to_matrix();
        let rho2 = rho.mul(&rho);
        let p3 = rho2.trace_product_re(&rho);
        let p4: f64 = rho2.data().iter().map(|z| z.norm_sqr()).sum();
        let [e2, e3, e4] = psd_conditions_from_traces(p2, p3, p4);
        e2 >= 0.0 && e3 >= 0.0 && e4 >= 0.0
    }
}

/// Chain parameters. `burn_in` steps are discarded, then every `thinning`-th
/// state is emitted until `n_samples` states have been produced.
#[derive(Debug, Clone, Copy)]
pub struct ChainConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub n_samples: usize,
}

impl ChainConfig {
    pub fn new(seed: u64, n_samples: usize) -> Self {
        Self {
            seed,
            burn_in: 1000,
            thinning: 1,
            n_samples,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidParameter("thinning must be >= 1".into()));
        }
        Ok(())
    }
}

/// Hit-and-run Markov chain state. Starts at the origin (maximally mixed).
#[derive(Debug, Clone)]
pub struct ChainState {
    pub current: BlochVector,
    rng: ChaCha8Rng,
    pub accepted_steps: u64,
}

impl ChainState {
    pub fn new(seed: u64) -> Self {
        Self {
            current: BlochVector::origin(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            accepted_steps: 0,
        }
    }

    /// One hit-and-run step: draw an isotropic direction, then a uniform
    /// point on the chord, shrinking the chord interval toward the current
    /// point on every rejection until a point inside K is found.
    pub fn step(&mut self) -> Result<()> {
        let mut dir = [0.0f64; 15];
        loop {
            let mut norm2 = 0.0;
            for d in dir.iter_mut() {
                *d = self.rng.sample(StandardNormal);
                norm2 += *d * *d;
            }
            if norm2 > 1e-24 {
                let inv = 1.0 / norm2.sqrt();
                for d in dir.iter_mut() {
                    *d *= inv;
                }
                break;
            }
        }

        let r = bounding_radius();
        let (mut lo, mut hi) = (-r, r);
        loop {
            if hi - lo < 1e-15 {
                return Err(Error::ChainStall);
            }
            let lambda = self.rng.random_range(lo..hi);
            let mut candidate = self.current.0;
            for (c, d) in candidate.iter_mut().zip(dir.iter()) {
                *c += lambda * d;
            }
            let candidate = BlochVector(candidate);
            if candidate.membership() {
                self.current = candidate;
                self.accepted_steps += 1;
                return Ok(());
            }
            if lambda > 0.0 {
                hi = lambda;
            } else {
                lo = lambda;
            }
        }
    }
}

/// Iterator over chain samples as Bloch vectors.
pub struct BlochStream {
    chain: ChainState,
    thinning: usize,
    remaining: usize,
    warmed_up: bool,
    burn_in: usize,
}

impl Iterator for BlochStream {
    type Item = Result<BlochVector>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        if !self.warmed_up {
            for _ in 0..self.burn_in {
                if let Err(e) = self.chain.step() {
                    self.remaining = 0;
                    return Some(Err(e));
                }
            }
            self.warmed_up = true;
        }
        for _ in 0..self.thinning {
            if let Err(e) = self.chain.step() {
                self.remaining = 0;
                return Some(Err(e));
            }
        }
        self.remaining -= 1;
        Some(Ok(self.chain.current))
    }
}

/// Streams `cfg.n_samples` Bloch vectors after burn-in, keeping every
/// `thinning`-th chain point.
pub fn sample_bloch(cfg: ChainConfig) -> Result<BlochStream> {
    cfg.validate()?;
    Ok(BlochStream {
        chain: ChainState::new(cfg.seed),
        thinning: cfg.thinning,
        remaining: cfg.n_samples,
        warmed_up: false,
        burn_in: cfg.burn_in,
    })
}

/// Streams chain samples as validated density matrices.
pub fn sample_states(cfg: ChainConfig) -> Result<impl Iterator<Item = Result<DensityMatrix>>> {
    Ok(sample_bloch(cfg)?.map(|r| r.and_then(|a| a.to_density())))
}

/// Collects a whole chain into memory.
pub fn collect_bloch(cfg: ChainConfig) -> Result<Vec<BlochVector>> {
    sample_bloch(cfg)?.collect()
}

fn traceless_basis() -> &'static [ComplexMatrix] {
    use std::sync::OnceLock;
    static BASIS: OnceLock<Vec<ComplexMatrix>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = basis_matrices();
        b.pop();
        b
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::hermitian_eigenvalues;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn basis_is_orthonormal() {
        let basis = basis_matrices();
        assert_eq!(basis.len(), 16);
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = bi.adjoint().trace_product(bj);
                assert_abs_diff_eq!(got.re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_fifteen_are_traceless_and_identity_last() {
        let basis = basis_matrices();
        for b in basis.iter().take(15) {
            assert_abs_diff_eq!(b.trace().re, 0.0, epsilon = 1e-15);
        }
        assert!(
            basis[15]
                .max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn purity_identity_on_random_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut a = [0.0f64; 15];
            for x in a.iter_mut() {
                *x = rng.random_range(-0.2..0.2);
            }
            let v = BlochVector(a);
            let rho = v.to_matrix();
            let purity = rho.trace_product_re(&rho);
            assert_abs_diff_eq!(purity, 0.25 + v.norm().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn origin_is_inside() {
        assert!(BlochVector::origin().membership());
    }

    #[test]
    fn outside_bounding_sphere_is_outside() {
        let mut a = [0.0f64; 15];
        a[0] = bounding_radius() + 0.01;
        assert!(!BlochVector(a).membership());
    }

    #[test]
    fn membership_agrees_with_eigenvalue_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = bounding_radius();
        let mut inside = 0usize;
        for _ in 0..10_000 {
            // Uniform in the bounding ball via normalized Gaussian + radius.
            let mut a = [0.0f64; 15];
            let mut norm2 = 0.0;
            for x in a.iter_mut() {
                *x = rng.sample(StandardNormal);
                norm2 += *x * *x;
            }
            let radius = r * rng.random_range(0.0f64..1.0).powf(1.0 / 15.0);
            let scale = radius / norm2.sqrt();
            for x in a.iter_mut() {
                *x *= scale;
            }
            let v = BlochVector(a);
            let member = v.membership();
            let eigs = hermitian_eigenvalues(&v.to_matrix()).unwrap();
            let oracle = *eigs.last().unwrap() >= -1e-12;
            assert_eq!(member, oracle, "disagreement at {a:?}");
            inside += member as usize;
        }
        // The body occupies a tiny fraction of the ball but is not empty.
        assert!(inside > 0);
    }

    #[test]
    fn single_step_from_origin_stays_inside() {
        let mut chain = ChainState::new(9);
        chain.step().unwrap();
        assert!(chain.current.membership());
        assert_eq!(chain.accepted_steps, 1);
    }

    #[test]
    fn fixed_seed_reproduces_trajectory() {
        let cfg = ChainConfig {
            seed: 42,
            burn_in: 10,
            thinning: 1,
            n_samples: 50,
        };
        let a = collect_bloch(cfg).unwrap();
        let b = collect_bloch(cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chain_never_leaves_the_body() {
        let cfg = ChainConfig {
            seed: 1,
            burn_in: 0,
            thinning: 1,
            n_samples: 500,
        };
        for v in sample_bloch(cfg).unwrap() {
            let v = v.unwrap();
            assert!(v.membership());
            assert!(v.norm() <= bounding_radius() + 1e-12);
        }
    }

    #[test]
    fn emitted_states_pass_validation() {
        let cfg = ChainConfig {
            seed: 5,
            burn_in: 100,
            thinning: 1,
            n_samples: 200,
        };
        for s in sample_states(cfg).unwrap() {
            s.unwrap();
        }
    }

    #[test]
    fn round_trip_density_to_bloch() {
        let cfg = ChainConfig {
            seed: 8,
            burn_in: 50,
            thinning: 1,
            n_samples: 20,
        };
        for v in sample_bloch(cfg).unwrap() {
            let v = v.unwrap();
            let rho = v.to_density().unwrap();
            let back = BlochVector::from_density(&rho);
            for (x, y) in v.0.iter().zip(back.0.iter()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn independent_chains_agree_on_the_mean() {
        // Mean concurrence from two seeds must agree within 3 combined
        // standard errors; full-scale distribution checks live in the
        // acceptance suite.
        use crate::metrics::{aggregate, concurrence};
        let run = |seed: u64| {
            let cfg = ChainConfig {
                seed,
                burn_in: 500,
                thinning: 10,
                n_samples: 4000,
            };
            let cs: Vec<f64> = sample_states(cfg)
                .unwrap()
                .map(|s| concurrence(&s.unwrap()).unwrap())
                .collect();
            aggregate(&cs).unwrap()
        };
        let (m1, _, e1) = run(101);
        let (m2, _, e2) = run(202);
        let combined = (e1 * e1 + e2 * e2).sqrt();
        assert!(
            (m1 - m2).abs() < 3.0 * combined.max(1e-4),
            "chain means {m1} vs {m2} differ by more than 3 sigma"
        );
    }
}
