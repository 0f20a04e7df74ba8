//! Bid side of a limit order book and market-sell execution against it.
//!
//! Snapshot CSV layout:
//!
//! ```text
//! # tick=0.1
//! timestamp,level,bid_price,bid_volume
//! 0,1,200.1,397
//! 0,2,200.0,412
//! ```
//!
//! Levels are numbered from 1 (best bid) and rows of one timestamp are
//! contiguous.

use std::io::{Read, Write};

use crate::error::LiqError;

#[derive(Debug, Clone, PartialEq)]
pub struct LobSnapshot {
    /// `(price, volume)` from the best bid down.
    levels: Vec<(f64, f64)>,
    tick: f64,
}

impl LobSnapshot {
    /// Prices must fall strictly by whole ticks; volumes must be positive.
    pub fn new(levels: Vec<(f64, f64)>, tick: f64) -> Result<Self, LiqError> {
        if !(tick > 0.0 && tick.is_finite()) {
            return Err(LiqError::InvalidBook("tick must be positive".into()));
        }
        if levels.is_empty() {
            return Err(LiqError::InvalidBook("no levels".into()));
        }
        for (i, &(p, v)) in levels.iter().enumerate() {
            if !(p.is_finite() && v > 0.0 && v.is_finite()) {
                return Err(LiqError::InvalidBook(format!("level {} has price {p}, volume {v}", i + 1)));
            }
        }
        for w in levels.windows(2) {
            let steps = (w[0].0 - w[1].0) / tick;
            if !(steps > 0.5 && (steps - steps.round()).abs() < 1e-6) {
                return Err(LiqError::InvalidBook(format!(
                    "prices {} -> {} are not a whole number of ticks apart",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { levels, tick })
    }

    /// `n` levels of equal volume starting at `best_bid`.
    pub fn flat(best_bid: f64, tick: f64, n: usize, volume: f64) -> Result<Self, LiqError> {
        Self::new((0..n).map(|j| (best_bid - j as f64 * tick, volume)).collect(), tick)
    }

    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }

    pub fn tick(&self) -> f64 {
        self.tick
    }

    pub fn best_bid(&self) -> f64 {
        self.levels[0].0
    }

    pub fn depth(&self) -> f64 {
        self.levels.iter().map(|l| l.1).sum()
    }
}

/// Revenue of a market sell of `u` shares, consuming levels best first.
pub fn walk_the_book(book: &LobSnapshot, u: f64) -> Result<f64, LiqError> {
    if !(u >= 0.0) {
        return Err(LiqError::InvalidParams(format!("order size {u} must be nonnegative")));
    }
    let available = book.depth();
    if u > available {
        return Err(LiqError::InsufficientDepth { requested: u, available });
    }
    let mut remaining = u;
    let mut revenue = 0.0;
    for &(price, volume) in &book.levels {
        if remaining <= 0.0 {
            break;
        }
        let filled = remaining.min(volume);
        revenue += price * filled;
        remaining -= filled;
    }
    Ok(revenue)
}

/// The five-level book of the worked execution example.
pub fn example_book() -> LobSnapshot {
    LobSnapshot::new(vec![(200.1, 397.0), (200.0, 412.0), (199.9, 502.0), (199.8, 442.0), (199.7, 529.0)], 0.1)
        .expect("valid example book")
}

/// Reads snapshots in file order as `(timestamp, snapshot)`.
pub fn read_lob_csv<R: Read>(mut input: R) -> Result<Vec<(u64, LobSnapshot)>, LiqError> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| LiqError::Csv(e.to_string()))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let tick: f64 = first
        .trim()
        .strip_prefix('#')
        .and_then(|s| s.trim().strip_prefix("tick="))
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| LiqError::Csv("first line must be `# tick=<size>`".into()))?;
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let mut out: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
    for row in reader.deserialize::<(u64, usize, f64, f64)>() {
        let (ts, level, price, volume) = row?;
        match out.last_mut() {
            Some((last, levels)) if *last == ts => {
                if level != levels.len() + 1 {
                    return Err(LiqError::Csv(format!("timestamp {ts}: level {level} out of order")));
                }
                levels.push((price, volume));
            }
            _ => {
                if level != 1 {
                    return Err(LiqError::Csv(format!("timestamp {ts} must start at level 1")));
                }
                if out.iter().any(|(t, _)| *t == ts) {
                    return Err(LiqError::Csv(format!("timestamp {ts} rows are not contiguous")));
                }
                out.push((ts, vec![(price, volume)]));
            }
        }
    }
    out.into_iter().map(|(ts, levels)| Ok((ts, LobSnapshot::new(levels, tick)?))).collect()
}

pub fn write_lob_csv<W: Write>(mut out: W, snapshots: &[(u64, LobSnapshot)]) -> Result<(), LiqError> {
    let tick = snapshots.first().map_or(1.0, |s| s.1.tick);
    if snapshots.iter().any(|s| s.1.tick != tick) {
        return Err(LiqError::Csv("snapshots disagree on tick size".into()));
    }
    writeln!(out, "# tick={tick}").map_err(|e| LiqError::Csv(e.to_string()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["timestamp", "level", "bid_price", "bid_volume"])?;
    for (ts, book) in snapshots {
        for (j, (p, v)) in book.levels.iter().enumerate() {
            w.write_record([ts.to_string(), (j + 1).to_string(), p.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| LiqError::Csv(e.to_string()))?;
    Ok(())
}
