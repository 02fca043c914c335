//! Statistics computed from run records.

pub mod aggregate;
pub mod run;
pub mod stats;

pub use aggregate::{
    aggregate, compare_groups, leader_heatmap, write_heatmap_csv, write_table_csv, Aggregate, AggregateError,
    Comparison, Estimate, Heatmap, PersonaRow,
};
pub use run::{PlayerMetrics, RunMetrics, TradeCounts};
pub use stats::{classify_trade, dirty_pct, gini, mean, std_error, variance, welch_p, StatsError, TradeClass};
