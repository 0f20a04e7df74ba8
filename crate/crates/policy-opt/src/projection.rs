//! Closed convex constraint sets for projected descent.

use lqrlab_core::{Mat, PolicySequence};
use serde::{Deserialize, Serialize};

use crate::error::OptError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProjectionSet {
    Unconstrained,
    /// Per step, gain `(k¹, k²)` with `γ̄k¹ + k² ≥ −1+ζ`, `k¹ ≤ 0`, `k² ≤ 0`.
    /// Gains must be `1×2`.
    Liquidation {
        gamma_bar: f64,
        zeta: f64,
    },
    /// Every gain entry in `[lo, hi]`.
    Box {
        lo: f64,
        hi: f64,
    },
}

impl ProjectionSet {
    pub fn liquidation(gamma_bar: f64, zeta: f64) -> Self {
        ProjectionSet::Liquidation { gamma_bar, zeta }
    }

    pub fn is_unconstrained(&self) -> bool {
        matches!(self, ProjectionSet::Unconstrained)
    }

    /// Checks that the set is well defined and nonempty.
    pub fn validate(&self) -> Result<(), OptError> {
        match *self {
            ProjectionSet::Unconstrained => Ok(()),
            ProjectionSet::Liquidation { gamma_bar, zeta } => {
                if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
                    return Err(OptError::InvalidConfig("gamma_bar must be positive".into()));
                }
                if !zeta.is_finite() || -1.0 + zeta > 0.0 {
                    return Err(OptError::EmptySet(format!("zeta = {zeta} leaves no feasible gain")));
                }
                Ok(())
            }
            ProjectionSet::Box { lo, hi } => {
                if !(lo <= hi) {
                    return Err(OptError::EmptySet(format!("box [{lo}, {hi}]")));
                }
                Ok(())
            }
        }
    }

    /// Exact membership test (no tolerance).
    pub fn contains(&self, policy: &PolicySequence) -> bool {
        match *self {
            ProjectionSet::Unconstrained => true,
            ProjectionSet::Liquidation { gamma_bar, zeta } => {
                policy.shape() == (1, 2)
                    && policy.iter().all(|k| in_triangle(k[(0, 0)], k[(0, 1)], gamma_bar, -1.0 + zeta))
            }
            ProjectionSet::Box { lo, hi } => policy.iter().all(|k| k.iter().all(|&v| lo <= v && v <= hi)),
        }
    }

    /// Euclidean projection, stepwise.
    pub fn project(&self, policy: &PolicySequence) -> Result<PolicySequence, OptError> {
        self.validate()?;
        match *self {
            ProjectionSet::Unconstrained => Ok(policy.clone()),
            ProjectionSet::Liquidation { gamma_bar, zeta } => {
                if policy.shape() != (1, 2) {
                    return Err(OptError::InvalidConfig("liquidation set needs 1x2 gains".into()));
                }
                let c = -1.0 + zeta;
                let gains = policy
                    .iter()
                    .map(|k| {
                        let (a, b) = project_triangle(k[(0, 0)], k[(0, 1)], gamma_bar, c);
                        Mat::from_row_slice(1, 2, &[a, b])
                    })
                    .collect();
                Ok(PolicySequence::new(gains)?)
            }
            ProjectionSet::Box { lo, hi } => {
                let gains = policy.iter().map(|k| k.map(|v| v.clamp(lo, hi))).collect();
                Ok(PolicySequence::new(gains)?)
            }
        }
    }
}

/// Two-dimensional membership predicate used by both test and projection.
pub fn in_triangle(a: f64, b: f64, g: f64, c: f64) -> bool {
    g * a + b >= c && a <= 0.0 && b <= 0.0
}

/// Projection of `(a, b)` onto `{g·a + b ≥ c, a ≤ 0, b ≤ 0}` with `g > 0`,
/// `c ≤ 0`, by enumerating the active sets. The winner is nudged by single
/// ulps if rounding left it a hair outside, so [`in_triangle`] holds exactly.
pub fn project_triangle(a: f64, b: f64, g: f64, c: f64) -> (f64, f64) {
    if in_triangle(a, b, g, c) {
        return (a, b);
    }
    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(6);
    // Edge a = 0.
    if b <= 0.0 && b >= c {
        candidates.push((0.0, b));
    }
    // Edge b = 0.
    if a <= 0.0 && g * a >= c {
        candidates.push((a, 0.0));
    }
    // Slanted edge g·a + b = c.
    let s = (g * a + b - c) / (g * g + 1.0);
    let (fa, fb) = (a - s * g, b - s);
    if fa <= 0.0 && fb <= 0.0 {
        candidates.push((fa, fb));
    }
    candidates.extend([(0.0, 0.0), (0.0, c), (c / g, 0.0)]);

    let dist = |p: &(f64, f64)| (p.0 - a).powi(2) + (p.1 - b).powi(2);
    let mut best = candidates[0];
    for cand in &candidates[1..] {
        let (dc, db) = (dist(cand), dist(&best));
        if dc < db || (dc == db && (cand.0, cand.1) < (best.0, best.1)) {
            best = *cand;
        }
    }
    repair(best, g, c)
}

fn repair((mut a, mut b): (f64, f64), g: f64, c: f64) -> (f64, f64) {
    a = a.min(0.0);
    b = b.min(0.0);
    if g * a + b < c {
        // Lift b onto the slanted edge, or past the b = 0 vertex onto a.
        b = (c - g * a).min(0.0);
        if b == 0.0 {
            a = a.max(c / g);
        }
    }
    while g * a + b < c {
        if b < 0.0 {
            b = b.next_up().min(0.0);
        } else {
            a = a.next_up().min(0.0);
        }
    }
    debug_assert!(in_triangle(a, b, g, c));
    (a, b)
}
