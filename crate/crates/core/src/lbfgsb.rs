//! Box-bounded limited-memory quasi-Newton minimization.
//!
//! Projected L-BFGS: the two-loop recursion builds a quasi-Newton direction
//! from a short history of curvature pairs, the candidate step is projected
//! onto the box, and a backtracking Armijo search accepts it. When the
//! quasi-Newton direction fails to produce descent the iteration falls back
//! to projected steepest descent; if that fails too, the current best point
//! is returned. Convergence is declared on the infinity norm of the
//! projected gradient step.
//!
//! Objectives get a `begin_iteration` hook: piecewise-smooth costs (like a
//! greedy measurement policy) freeze their active branch there so that the
//! line search sees one smooth function per iteration.

use std::collections::VecDeque;

/// Objective with optional per-iteration state.
pub trait BoxObjective {
    /// Called once per outer iteration at the current iterate, before any
    /// value/gradient evaluations of that iteration.
    fn begin_iteration(&mut self, _x: &[f64]) {}

    fn value(&mut self, x: &[f64]) -> f64;

    fn value_and_gradient(&mut self, x: &[f64]) -> (f64, Vec<f64>);
}

/// Plain objective from a pair of closures; useful in tests.
pub struct FnObjective<F, G>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    pub value: F,
    pub value_and_gradient: G,
}

impl<F, G> BoxObjective for FnObjective<F, G>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    fn value(&mut self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn value_and_gradient(&mut self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value_and_gradient)(x)
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub history_size: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: 1e-6,
            history_size: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lower.iter().zip(upper.iter()))
        .map(|(&v, (&l, &u))| v.clamp(l, u))
        .collect()
}

/// Infinity norm of P(x - g) - x, the projected-gradient step.
fn projected_gradient_norm(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    x.iter()
        .zip(g.iter())
        .zip(lower.iter().zip(upper.iter()))
        .map(|((&xi, &gi), (&l, &u))| ((xi - gi).clamp(l, u) - xi).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion over the stored (s, y) pairs.
fn quasi_newton_direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y) in history.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y.iter()) {
            *qi -= a * yi;
        }
        alphas.push((a, rho));
    }
    if let Some((s, y)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y), (a, rho)) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s.iter()) {
            *qi += (a - b) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimizes `objective` over the box `[lower, upper]`.
pub fn minimize<O: BoxObjective>(
    objective: &mut O,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &Options,
) -> Minimum {
    assert_eq!(x0.len(), lower.len());
    assert_eq!(x0.len(), upper.len());

    let mut x = project(x0, lower, upper);
    objective.begin_iteration(&x);
    let (mut f, mut g) = objective.value_and_gradient(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..opts.max_iterations {
        iterations = iter;
        if projected_gradient_norm(&x, &g, lower, upper) < opts.gradient_tolerance {
            converged = true;
            break;
        }

        let mut accepted = None;
        for attempt in 0..2 {
            let d = if attempt == 0 {
                quasi_newton_direction(&g, &history)
            } else {
                g.iter().map(|&gi| -gi).collect()
            };
            // Descent check along the projected arc at unit step.
            if dot(&d, &g) >= 0.0 && attempt == 0 {
                continue;
            }
            if let Some((x_new, f_new)) =
                armijo_search(objective, &x, f, &g, &d, lower, upper)
            {
                accepted = Some((x_new, f_new));
                break;
            }
        }

        let Some((x_new, f_new)) = accepted else {
            break; // no decrease along either direction
        };

        objective.begin_iteration(&x_new);
        let (f_next, g_new) = objective.value_and_gradient(&x_new);

        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let s_norm = dot(&s, &s).sqrt();
        let y_norm = dot(&y, &y).sqrt();
        if sy > 1e-10 * s_norm * y_norm {
            history.push_back((s, y));
            while history.len() > opts.history_size {
                history.pop_front();
            }
        }

        x = x_new;
        // The value under the re-frozen selection is authoritative; the
        // line-search value f_new refers to the previous freeze.
        f = f_next.min(f_new);
        g = g_new;
    }

    Minimum {
        x,
        value: f,
        iterations,
        converged,
    }
}

/// Backtracking Armijo search along the projected path x(t) = P(x + t d).
fn armijo_search<O: BoxObjective>(
    objective: &mut O,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Option<(Vec<f64>, f64)> {
    const C1: f64 = 1e-4;
    let slope_d = dot(g, d);
    let mut t = 1.0;
    for _ in 0..40 {
        let candidate: Vec<f64> = x.iter().zip(d.iter()).map(|(&xi, &di)| xi + t * di).collect();
        let candidate = project(&candidate, lower, upper);
        let step: Vec<f64> = candidate.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let step_norm = dot(&step, &step).sqrt();
        if step_norm < 1e-16 {
            return None; // projection pinned us to the current point
        }
        let f_candidate = objective.value(&candidate);
        let slope = dot(g, &step);
        if f_candidate <= f + C1 * slope && f_candidate <= f {
            return Some((candidate, f_candidate));
        }
        // Quadratic interpolation on the unprojected model, clamped to a
        // plain backtracking window.
        let denom = 2.0 * (f_candidate - f - slope_d * t);
        let t_quad = if denom > 0.0 {
            -slope_d * t * t / denom
        } else {
            0.5 * t
        };
        t = t_quad.clamp(0.1 * t, 0.5 * t);
    }
    None
}
