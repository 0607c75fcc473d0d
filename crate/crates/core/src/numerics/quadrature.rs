//! Adaptive composite Gauss-Legendre quadrature on `[0, π]`.
//!
//! Each panel is integrated with a 15-point rule and compared against the sum
//! over its two halves. A panel is accepted once the two estimates agree to
//! within its share of the tolerance (`tol * width / π`); the refined value is
//! kept. Nodes are interior, so integrands with removable singularities at the
//! endpoints are never evaluated there.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default cap on integrand evaluations.
pub const DEFAULT_MAX_NODES: usize = 1 << 16;

const ORDER: usize = 15;
const INITIAL_PANELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_error: f64,
    pub nodes_used: usize,
}

/// Nodes and weights of the Gauss-Legendre rule on `[-1, 1]`.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(ORDER, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(ORDER, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrates `f` over `[0, π]` to absolute tolerance `tol` with the default
/// node budget.
pub fn integrate_0_pi<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    integrate_0_pi_with_budget(f, tol, DEFAULT_MAX_NODES)
}

pub fn integrate_0_pi_with_budget<F: Fn(f64) -> f64>(
    f: F,
    tol: f64,
    max_nodes: usize,
) -> Result<QuadratureResult> {
    integrate(f, 0.0, PI, tol, max_nodes)
}

/// General-interval variant used internally and by the tests.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_nodes: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) || !(b > a) {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs tol > 0 and a < b (tol = {tol}, [{a}, {b}])"
        )));
    }
    let span = b - a;
    let width = span / INITIAL_PANELS as f64;
    let mut stack: Vec<(f64, f64, f64)> = (0..INITIAL_PANELS)
        .rev()
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == INITIAL_PANELS {
                b
            } else {
                lo + width
            };
            (lo, hi, panel(&f, lo, hi))
        })
        .collect();
    let mut nodes_used = INITIAL_PANELS * ORDER;
    let mut value = 0.0;
    let mut est_error = 0.0;

    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        nodes_used += 2 * ORDER;
        let refined = left + right;
        let err = (refined - whole).abs();
        if !refined.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        if err <= tol * (hi - lo) / span {
            value += refined;
            est_error += err;
            continue;
        }
        if nodes_used + 4 * ORDER > max_nodes {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                estimate: est_error + err,
                budget: max_nodes,
            });
        }
        stack.push((mid, hi, right));
        stack.push((lo, mid, left));
    }

    Ok(QuadratureResult {
        value,
        est_error,
        nodes_used,
    })
}
