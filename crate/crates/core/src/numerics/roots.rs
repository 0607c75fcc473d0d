//! Bracketed root finding, damped fixed-point iteration and sign-change scans.

use crate::error::{Error, Result};

/// Default bracket-width tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct BracketOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Take safeguarded Newton steps (central-difference slope) when they stay
    /// inside the bracket.
    pub newton_polish: bool,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: MAX_BISECTIONS,
            newton_polish: true,
        }
    }
}

/// Root of `f` in `[lo, hi]` with `f(lo) * f(hi) <= 0`.
///
/// Terminates when `|f(x)| <= tol` or the bracket is narrower than `tol`.
pub fn solve_bracketed<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<RootResult> {
    solve_bracketed_with(
        f,
        lo,
        hi,
        BracketOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn solve_bracketed_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: BracketOptions,
) -> Result<RootResult> {
    if !(lo < hi) || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bracket needs lo < hi and tol > 0 (lo = {lo}, hi = {hi}, tol = {})",
            opts.tol
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(done(a, fa, 0, true));
    }
    if fb == 0.0 {
        return Ok(done(b, fb, 0, true));
    }
    if fa * fb > 0.0 || fa.is_nan() || fb.is_nan() {
        return Err(Error::BadBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut x = 0.5 * (a + b);
    let mut fx = f(x);
    for it in 1..=opts.max_iter {
        if fx.abs() <= opts.tol {
            return Ok(done(x, fx, it, true));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if b - a <= opts.tol {
            let (root, res) = if fx.abs() <= f(0.5 * (a + b)).abs() {
                (x, fx)
            } else {
                let m = 0.5 * (a + b);
                (m, f(m))
            };
            return Ok(done(root, res, it, true));
        }

        let mut next = 0.5 * (a + b);
        if opts.newton_polish {
            let h = 1e-7 * (1.0 + x.abs());
            let slope = (f(x + h) - f(x - h)) / (2.0 * h);
            if slope.is_finite() && slope != 0.0 {
                let cand = x - fx / slope;
                if cand > a && cand < b {
                    next = cand;
                }
            }
        }
        x = next;
        fx = f(x);
    }
    Ok(done(x, fx, opts.max_iter, fx.abs() <= opts.tol))
}

fn done(root: f64, residual: f64, iterations: usize, converged: bool) -> RootResult {
    RootResult {
        root,
        residual,
        iterations,
        converged,
    }
}

/// Damped iteration `x <- (1 - damping) x + damping g(x)` until `|x - g(x)| <= tol`.
pub fn fixed_point<G: Fn(f64) -> f64>(
    g: G,
    x0: f64,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RootResult> {
    if !(damping > 0.0 && damping <= 1.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(format!(
            "fixed point needs damping in (0, 1] and max_iter >= 1 (damping = {damping}, max_iter = {max_iter})"
        )));
    }
    let mut x = x0;
    let mut last = f64::INFINITY;
    for it in 0..=max_iter {
        let gx = g(x);
        let residual = x - gx;
        if residual.abs() <= tol {
            return Ok(done(x, residual, it, true));
        }
        last = residual;
        if it == max_iter {
            break;
        }
        x = (1.0 - damping) * x + damping * gx;
    }
    Err(Error::NonConvergence {
        what: "fixed-point iteration",
        estimate: last.abs(),
        budget: max_iter,
    })
}

/// Every root of `f` on `[lo, hi]` found by a uniform sign-change scan over
/// `intervals` subintervals followed by bisection inside each bracket.
///
/// Grid points where `f` vanishes exactly are reported as roots. Brackets
/// around a jump discontinuity come back with `converged == false` unless the
/// residual at the limit point is within `tol`.
pub fn scan_roots<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    intervals: usize,
    tol: f64,
) -> Vec<RootResult> {
    let n = intervals.max(1);
    let step = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + step * i as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let opts = BracketOptions {
        tol,
        newton_polish: false,
        ..Default::default()
    };
    let mut roots = Vec::new();
    for i in 0..=n {
        if ys[i] == 0.0 {
            roots.push(done(xs[i], 0.0, 0, true));
            continue;
        }
        if i < n && ys[i + 1] != 0.0 && ys[i] * ys[i + 1] < 0.0 {
            if let Ok(mut r) = solve_bracketed_with(&f, xs[i], xs[i + 1], opts) {
                r.converged = r.residual.abs() <= tol.max(1e-10);
                roots.push(r);
            }
        }
    }
    roots
}
