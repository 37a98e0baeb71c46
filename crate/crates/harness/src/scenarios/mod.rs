//! Scenario runners. Each `*_data` function computes the rows; each `run_*`
//! writes them under the output directory and returns the files written.

mod circuits;
mod fidelity;
mod oracle;
mod sync;

pub use circuits::{
    channel_run, circuit_at, fig4_data, fig4_row, largest_exponent, run_fig4, step_for, steps, ChannelRun, Fig4Data, Fig4Row,
    PORTRAIT_BANDWIDTHS_HZ,
};
pub use fidelity::{
    distribute_config, fig5_data, fig6_data, run_distribute, run_fig5, run_fig6, Fig5Data,
    Fig6Row,
};
pub use oracle::{oracle_data, run_oracle_check, OracleRow, ORACLE_TOLERANCE};
pub use sync::{run_sync, sync_data, SyncData};
