//! Executing a liquidation schedule on a book path and scoring it by
//! implementation shortfall.

use std::io::Write;

use lqrlab_core::PolicySequence;

use crate::book::{walk_the_book, LobSnapshot};
use crate::error::LiqError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionStep {
    pub t: usize,
    /// Inventory before the sale.
    pub inventory: f64,
    /// Shares sold.
    pub u: f64,
    pub revenue: f64,
    /// `φ′(q_t − u_t)²`.
    pub holding_cost: f64,
    pub best_bid: f64,
    pub mid: f64,
    /// The prescribed sale was negative and was raised to 0.
    pub clamped_negative: bool,
    /// The prescribed sale exceeded inventory and was cut to it.
    pub clamped_excess: bool,
}

impl ExecutionStep {
    /// `c_t(u_t) = φ′(q_t − u_t)² − r_t(u_t)`.
    pub fn cost(&self) -> f64 {
        self.holding_cost - self.revenue
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionRecord {
    pub q0: f64,
    pub phi_prime: f64,
    /// Steps `0..T-1`.
    pub steps: Vec<ExecutionStep>,
    /// Forced sale of the residual inventory at `T`.
    pub terminal: ExecutionStep,
    /// `r_0(q_0)`: revenue of selling everything on the initial book.
    pub immediate_revenue: f64,
}

impl ExecutionRecord {
    pub fn residual(&self) -> f64 {
        self.terminal.u
    }

    pub fn total_sold(&self) -> f64 {
        self.steps.iter().map(|s| s.u).sum::<f64>() + self.terminal.u
    }

    /// `Σ_t u_t + residual = q_0` up to rounding.
    pub fn is_conserved(&self) -> bool {
        (self.total_sold() - self.q0).abs() <= 1e-9 * (1.0 + self.q0.abs())
    }

    /// `Σ_{t<T} c_t(u_t) + c_T(residual)`.
    pub fn total_cost(&self) -> f64 {
        self.steps.iter().map(ExecutionStep::cost).sum::<f64>() + self.terminal.cost()
    }

    pub fn any_clamped(&self) -> bool {
        self.steps.iter().any(|s| s.clamped_negative || s.clamped_excess)
    }

    /// CSV with one row per step including the terminal sale.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LiqError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "inventory",
            "u",
            "revenue",
            "holding_cost",
            "best_bid",
            "mid",
            "clamped_negative",
            "clamped_excess",
        ])?;
        for s in self.steps.iter().chain(std::iter::once(&self.terminal)) {
            w.write_record([
                s.t.to_string(),
                s.inventory.to_string(),
                s.u.to_string(),
                s.revenue.to_string(),
                s.holding_cost.to_string(),
                s.best_bid.to_string(),
                s.mid.to_string(),
                s.clamped_negative.to_string(),
                s.clamped_excess.to_string(),
            ])?;
        }
        w.flush().map_err(|e| LiqError::Csv(e.to_string()))?;
        Ok(())
    }
}

/// `IS(u) = Σ_{t<T} c_t(u_t) + c_T(q₀ − Σu_t) − c₀(q₀)` with `c₀(q₀) = −r₀(q₀)`.
pub fn implementation_shortfall(record: &ExecutionRecord) -> f64 {
    record.total_cost() + record.immediate_revenue
}

/// `(IS(u²) − IS(u¹))/|IS(u²)|`: positive when schedule 1 beats schedule 2.
pub fn relative_performance(is_1: f64, is_2: f64) -> f64 {
    (is_2 - is_1) / is_2.abs()
}

/// Runs `decide(t, mid, inventory)` on a path of `T+1` books; the residual is
/// sold on the last book. Sales are clamped into `[0, inventory]`.
pub fn execute_with<F>(
    books: &[LobSnapshot],
    mids: &[f64],
    q0: f64,
    phi_prime: f64,
    mut decide: F,
) -> Result<ExecutionRecord, LiqError>
where
    F: FnMut(usize, f64, f64) -> f64,
{
    if books.len() < 2 || mids.len() != books.len() {
        return Err(LiqError::InvalidParams("need T+1 >= 2 books with one mid each".into()));
    }
    let horizon = books.len() - 1;
    let immediate_revenue = walk_the_book(&books[0], q0)?;
    let mut q = q0;
    let mut steps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let want = decide(t, mids[t], q);
        let (u, neg, excess) = clamp_sale(want, q);
        let revenue = walk_the_book(&books[t], u)?;
        let left = q - u;
        steps.push(ExecutionStep {
            t,
            inventory: q,
            u,
            revenue,
            holding_cost: phi_prime * left * left,
            best_bid: books[t].best_bid(),
            mid: mids[t],
            clamped_negative: neg,
            clamped_excess: excess,
        });
        q = left;
    }
    let terminal = ExecutionStep {
        t: horizon,
        inventory: q,
        u: q,
        revenue: walk_the_book(&books[horizon], q)?,
        holding_cost: 0.0,
        best_bid: books[horizon].best_bid(),
        mid: mids[horizon],
        clamped_negative: false,
        clamped_excess: false,
    };
    Ok(ExecutionRecord { q0, phi_prime, steps, terminal, immediate_revenue })
}

fn clamp_sale(want: f64, inventory: f64) -> (f64, bool, bool) {
    if !(want > 0.0) {
        (0.0, want < 0.0, false)
    } else if want > inventory {
        (inventory.max(0.0), false, true)
    } else {
        (want, false, false)
    }
}

/// Feedback sale `u_t = −K_t(S_t, q_t)ᵀ` with the mid price as `S_t`.
pub fn feedback_sale(policy: &PolicySequence, t: usize, mid: f64, inventory: f64) -> f64 {
    let k = &policy[t];
    -(k[(0, 0)] * mid + k[(0, 1)] * inventory)
}

pub fn execute_policy(
    books: &[LobSnapshot],
    mids: &[f64],
    q0: f64,
    phi_prime: f64,
    policy: &PolicySequence,
) -> Result<ExecutionRecord, LiqError> {
    if policy.len() + 1 != books.len() || policy.shape() != (1, 2) {
        return Err(LiqError::InvalidParams("policy must have T gains of shape 1x2".into()));
    }
    execute_with(books, mids, q0, phi_prime, |t, mid, q| feedback_sale(policy, t, mid, q))
}
