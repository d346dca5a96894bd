//! Experiment drivers, the statevector oracle and file output.

mod config;
mod program;
mod runs;
mod selftest;
mod twirl;

pub use config::{parse_key_values, read_key_values, ExperimentConfig, FloquetConfig, TDopedConfig};
pub use program::{
    apply_clifford_mps, apply_two_qubit, dense_mean_expectation, dense_oracle_run, Block, Program,
};
pub use runs::{
    analytic_magnetization, floquet_realization, magnetization_observables, mean_stderr, realization_rng,
    run_baseline_track, run_floquet, run_realizations, run_stab_track, run_tdoped, sample_floquet_program,
    sample_tdoped_program, tdoped_realization, temporal_grid, worker_pool, AggregateRow, RealizationResult,
    RunResult, StepRecord, Track, WORKERS_ENV,
};
pub use selftest::{selftest, CheckResult};
pub use twirl::{s_twirl, twirl_report, twirl_s_channel_check, u1_preserves_z, TwirlReport};
