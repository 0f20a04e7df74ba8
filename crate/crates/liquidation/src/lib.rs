//! Optimal liquidation: the Almgren-Chriss model as a two-state LQR, its
//! constraint set, order-book execution with implementation-shortfall
//! scoring, and impact estimation.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod book;
pub mod error;
pub mod estimation;
pub mod execution;
pub mod params;
pub mod reference;
pub mod synthetic;

pub use book::{example_book, read_lob_csv, walk_the_book, write_lob_csv, LobSnapshot};
pub use error::LiqError;
pub use estimation::{estimate_impact_params, estimate_temporary_impact, synthetic_trades, ImpactEstimate};
pub use execution::{
    execute_policy, execute_with, feedback_sale, implementation_shortfall, relative_performance, ExecutionRecord,
    ExecutionStep,
};
pub use params::{ac_to_lqr, constant_gain, liquidation_set, membership_s, ticker, AcParams, TickerImpact, TICKERS};
pub use reference::{
    almgren_chriss_reference, expected_inventory, mean_path, regularizer_gap, AcReference, RegularizerGap,
};
pub use synthetic::{simulate_lob, LobSimulator, ShortfallMonitor, SyntheticBookConfig};
