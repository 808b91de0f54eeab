//! Episodes, regret accounting, traces and seed sweeps.
//!
//! [`run_episode`] executes the interaction loop for one `(config, seed)`;
//! [`sweep`] runs the cross product of a config grid and its seeds on a
//! thread pool and aggregates the results.

mod config;
mod episode;
mod output;
mod regret;
mod sweep;

pub use config::{
    resolve, set_path, AutoTag, DominatingSetChoice, GraphSection, NamedChoice, Param,
    PolicyKind, PolicySection, ResolvedConfig, ResolvedPolicy, RunConfig, RunSection,
    SweepSection, TraceDetail,
};
pub use episode::{
    run_episode, run_with, sample_arm, EpisodeOptions, RoundRecord, Trace, TraceTotals,
};
pub use output::{
    cells_csv, results_csv, trace_csv, write_atomic, RunSummary, SweepSummary, CELLS_HEADER,
    RESULTS_HEADER,
};
pub use regret::{
    empirical_regret, entropy_sum_bound, final_regret, lemma_checks, loglog_slope, mean_stderr,
    pseudo_regret, pseudo_regret_curve, q_quantity, realized_regret, reference_arm, RegretCurve,
};
pub use sweep::{run_seeds, summarize, sweep, thread_pool, CellSummary, ScalingFit, SweepRow, SweepTable};

/// The fixed-rate Exp3.G comparison policy.
pub use crate::policy::Exp3GPolicy as BaselineExp3G;
