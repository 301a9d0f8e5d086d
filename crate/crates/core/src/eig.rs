//! Small special-purpose eigensolvers.
//!
//! Two routines cover everything the crate needs: a cyclic Jacobi iteration
//! for Hermitian matrices of any (tiny) dimension, and a closed-form quartic
//! solve with Newton polishing for the eigenvalues of a general 4x4 complex
//! matrix. At these sizes both are simpler and faster than pulling in a
//! general QR eigensolver.

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, ZERO};

const HERMITIAN_REJECT_TOL: f64 = 1e-8;

/// Eigenvalues of a Hermitian matrix, sorted in decreasing order.
///
/// Cyclic Jacobi with complex rotations; converges in a handful of sweeps at
/// 4x4 / 16x16 scale. Inputs whose Hermiticity deviation exceeds `1e-8` are
/// rejected.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_REJECT_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let mut a = m.hermitian_part();
    let n = a.dim();
    let norm: f64 = a
        .data()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);

    for _sweep in 0..60 {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a[(p, q)].norm_sqr();
            }
        }
        if off2.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eigs)
}

/// One complex Jacobi rotation zeroing the (p, q) entry of a Hermitian matrix.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let beta = apq.norm();
    if beta < 1e-300 {
        return;
    }
    let phase = apq / beta;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * beta);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J restricted to the (p, q) plane:
    //   J[p,p] = c        J[p,q] = s
    //   J[q,p] = -s/phase J[q,q] = c/phase
    let jqp = -s * phase.conj();
    let jqq = c * phase.conj();

    let n = a.dim();
    // A <- A J (columns p, q)
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c + arq * jqp;
        a[(r, q)] = arp * s + arq * jqq;
    }
    // A <- J^dag A (rows p, q)
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = apc * c + aqc * jqp.conj();
        a[(q, col)] = apc * s + aqc * jqq.conj();
    }
    // Clean the entry we just zeroed and enforce a real diagonal.
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Monic characteristic polynomial coefficients `[a, b, c, d]` of a 4x4
/// matrix, i.e. `det(xI - M) = x^4 + a x^3 + b x^2 + c x + d`, computed from
/// the power traces via the Newton identities.
pub fn char_poly_monic_4x4(m: &ComplexMatrix) -> [C64; 4] {
    assert_eq!(m.dim(), 4);
    let m2 = m.mul(m);
    let p1 = m.trace();
    let p2 = m2.trace();
    let p3 = m2.trace_product(m);
    let p4 = m2.trace_product(&m2);

    let e1 = p1;
    let e2 = (e1 * p1 - p2) / 2.0;
    let e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
    let e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
    [-e1, e2, -e3, e4]
}

/// Elementary symmetric functions (e2, e3, e4) for a unit-trace Hermitian
/// matrix given its power traces. All three are nonnegative exactly when the
/// matrix is positive semidefinite (Descartes' rule on the characteristic
/// polynomial with all-real roots).
pub fn psd_conditions_from_traces(p2: f64, p3: f64, p4: f64) -> [f64; 3] {
    let e2 = (1.0 - p2) / 2.0;
    let e3 = (e2 - p2 + p3) / 3.0;
    let e4 = (e3 - e2 * p2 + p3 - p4) / 4.0;
    [e2, e3, e4]
}

/// Eigenvalues of a general (possibly non-Hermitian, possibly defective) 4x4
/// complex matrix via the closed-form quartic, with Newton polishing on the
/// characteristic polynomial. No ordering is guaranteed.
pub fn general_eigenvalues_4x4(m: &ComplexMatrix) -> Result<[C64; 4]> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: m.dim(),
        });
    }
    let coeffs = char_poly_monic_4x4(m);
    let scale = m.max_abs().max(1e-300);
    let mut roots = solve_monic_quartic(coeffs, scale);
    for r in roots.iter_mut() {
        *r = polish_quartic_root(*r, &coeffs);
    }
    Ok(roots)
}

/// Roots of x^4 + a x^3 + b x^2 + c x + d with complex coefficients.
///
/// Trailing coefficients that are negligible at the given scale are deflated
/// to exact zero roots first; rank-deficient matrices are the common case in
/// this crate and the closed form is badly conditioned at multiple roots.
pub fn solve_monic_quartic(coeffs: [C64; 4], scale: f64) -> [C64; 4] {
    let [a, b, c, d] = coeffs;
    // Coefficient round-off is absolute at unit scale, so the deflation
    // threshold never shrinks below 1e-13 even for small matrices.
    let ztol = 1e-13;
    let scale = scale.max(1.0);
    if d.norm() <= ztol * scale.powi(4) {
        if c.norm() <= ztol * scale.powi(3) {
            if b.norm() <= ztol * scale.powi(2) {
                if a.norm() <= ztol * scale {
                    return [ZERO; 4];
                }
                return [-a, ZERO, ZERO, ZERO];
            }
            let (r1, r2) = solve_monic_quadratic(a, b);
            return [r1, r2, ZERO, ZERO];
        }
        let cubic = solve_monic_cubic(a, b, c);
        return [cubic[0], cubic[1], cubic[2], ZERO];
    }

    // Depress: x = y - a/4.
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let ys: [C64; 4] = if q.norm() <= 1e-14 * scale.powi(3) {
        // Biquadratic: y^2 solves z^2 + p z + r.
        let (z1, z2) = solve_monic_quadratic(p, r);
        let s1 = z1.sqrt();
        let s2 = z2.sqrt();
        [s1, -s1, s2, -s2]
    } else {
        // Ferrari resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0.
        let res = solve_monic_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
        let m_best = res
            .iter()
            .copied()
            .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
            .unwrap();
        let alpha = (2.0 * m_best).sqrt();
        let corr = q / (2.0 * alpha);
        let beta = p / 2.0 + m_best - corr;
        let gamma = p / 2.0 + m_best + corr;
        let (y1, y2) = solve_monic_quadratic(alpha, beta);
        let (y3, y4) = solve_monic_quadratic(-alpha, gamma);
        [y1, y2, y3, y4]
    };

    [
        ys[0] - shift,
        ys[1] - shift,
        ys[2] - shift,
        ys[3] - shift,
    ]
}

/// Roots of x^2 + b x + c, using the cancellation-safe variant.
fn solve_monic_quadratic(b: C64, c: C64) -> (C64, C64) {
    let mut s = (b * b - 4.0 * c).sqrt();
    if (b.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(b + s) / 2.0;
    if q.norm() < 1e-300 {
        (ZERO, -b)
    } else {
        (q, c / q)
    }
}

/// Roots of x^3 + a x^2 + b x + c via Cardano with complex arithmetic.
fn solve_monic_cubic(a: C64, b: C64, c: C64) -> [C64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    if p.norm() < 1e-300 && q.norm() < 1e-300 {
        return [-shift; 3];
    }

    let omega = C64::new(-0.5, 0.75f64.sqrt());
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w1 = -q / 2.0 + disc;
    let w2 = -q / 2.0 - disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let u = w.cbrt();

    let mut roots = [ZERO; 3];
    if u.norm() < 1e-300 {
        // p ~ 0: t^3 = -q.
        let t = (-q).cbrt();
        roots = [t, t * omega, t * omega * omega];
    } else {
        let mut uk = u;
        for root in roots.iter_mut() {
            *root = uk - p / (3.0 * uk);
            uk *= omega;
        }
    }
    for root in roots.iter_mut() {
        *root -= shift;
    }
    roots
}

fn polish_quartic_root(x0: C64, coeffs: &[C64; 4]) -> C64 {
    let mut x = x0;
    if x.norm() == 0.0 {
        // Deflated exact zeros are already as good as the coefficients allow.
        return x;
    }
    let mut best_residual = quartic_value(x, coeffs).norm();
    for _ in 0..3 {
        let der = quartic_derivative(x, coeffs);
        if der.norm() < 1e-290 {
            break;
        }
        let dx = quartic_value(x, coeffs) / der;
        // A genuine Newton correction near convergence is tiny relative to
        // the root; a large relative step means the derivative is noise
        // (tiny clustered roots) and following it would walk the root around
        // the coefficient noise floor.
        if dx.norm() > 0.5 * x.norm() {
            break;
        }
        let candidate = x - dx;
        let candidate_residual = quartic_value(candidate, coeffs).norm();
        if candidate_residual >= best_residual {
            break;
        }
        x = candidate;
        best_residual = candidate_residual;
        if dx.norm() <= 1e-18 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

fn quartic_derivative(x: C64, coeffs: &[C64; 4]) -> C64 {
    let [a, b, c, _] = *coeffs;
    ((4.0 * x + 3.0 * a) * x + 2.0 * b) * x + c
}

/// Evaluates the monic quartic with the given coefficients at `x`; test and
/// validation helper for residual checks.
pub fn quartic_value(x: C64, coeffs: &[C64; 4]) -> C64 {
    let [a, b, c, d] = *coeffs;
    (((x + a) * x + b) * x + c) * x + d
}

/// True if `m` is positive semidefinite down to `-tol` on the minimum
/// eigenvalue.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok(*eigs.last().unwrap_or(&0.0) >= -tol)
}
