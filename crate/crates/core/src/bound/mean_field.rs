use crate::numerics::{scan_roots, RootResult};

/// Roots of a scalar self-consistency equation on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    /// Every accepted root, ascending.
    pub branches: Vec<f64>,
    pub principal: f64,
    pub residuals: Vec<f64>,
    /// At least one branch was found.
    pub converged: bool,
    /// The residual's sign at `s = ±1` implies a root outside `[-1, 1]`.
    pub out_of_range_detected: bool,
}

/// Largest residual accepted for a branch.
pub const BRANCH_TOL: f64 = 1e-10;
/// Default number of scan subintervals on `[-1, 1]`.
pub const SCAN_INTERVALS: usize = 2000;
/// Roots closer than this are merged.
const MERGE_TOL: f64 = 1e-9;
/// Branches with `|s|` below this count as the disordered branch.
pub(crate) const ZERO_BRANCH: f64 = 1e-8;

impl MeanFieldSolution {
    /// Scans `residual` on `[-1, 1]` and keeps every root whose residual is
    /// below [`BRANCH_TOL`]. The principal branch is left at 0 (or the only
    /// branch); callers choose it with [`MeanFieldSolution::select`].
    pub(crate) fn scan<F: Fn(f64) -> f64>(residual: F, intervals: usize) -> Self {
        let mut roots: Vec<RootResult> = scan_roots(&residual, -1.0, 1.0, intervals, 1e-14)
            .into_iter()
            .filter(|r| r.residual.abs() <= BRANCH_TOL)
            .collect();
        roots.sort_by(|a, b| a.root.total_cmp(&b.root));
        roots.dedup_by(|b, a| (a.root - b.root).abs() < MERGE_TOL);

        // residual(s) = s - RHS(s) with |RHS| < 1 keeps residual(1) > 0 and
        // residual(-1) < 0; the opposite sign means the root escaped the range.
        let out_of_range_detected = residual(1.0) < 0.0 || residual(-1.0) > 0.0;

        let branches: Vec<f64> = roots.iter().map(|r| r.root).collect();
        let residuals = roots.iter().map(|r| r.residual).collect();
        let principal = if branches.len() == 1 {
            branches[0]
        } else {
            0.0
        };
        Self {
            converged: !branches.is_empty(),
            branches,
            principal,
            residuals,
            out_of_range_detected,
        }
    }

    /// Picks the branch minimizing `cost`, ties (within `1e-12`) broken toward
    /// larger `|s|`, then toward positive `s`.
    pub(crate) fn select<C: Fn(f64) -> f64>(&mut self, cost: C) {
        let mut best: Option<(f64, f64)> = None;
        for &s in &self.branches {
            let value = cost(s);
            best = match best {
                None => Some((s, value)),
                Some((bs, bv)) => {
                    if value < bv - 1e-12
                        || ((value - bv).abs() <= 1e-12
                            && (s.abs() > bs.abs() + MERGE_TOL
                                || ((s.abs() - bs.abs()).abs() <= MERGE_TOL && s > bs)))
                    {
                        Some((s, value))
                    } else {
                        Some((bs, bv))
                    }
                }
            };
        }
        if let Some((s, _)) = best {
            self.principal = s;
        }
    }

    pub fn has_nonzero_branch(&self) -> bool {
        self.branches.iter().any(|s| s.abs() > ZERO_BRANCH)
    }

    /// Principal branch inside `[-1, 1]` and no sign of an escaped root.
    pub fn in_range(&self) -> bool {
        self.converged && !self.out_of_range_detected && self.principal.abs() <= 1.0
    }
}
