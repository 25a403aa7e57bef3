//! p-bit simulated annealing with device variability.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: Ising instances, spin states, MAX-CUT graphs and the mapping between them.
//! * [`rng`]: counter-based random streams keyed by (trial, p-bit, sub-step).
//! * [`pbit`]: the p-bit update rule and per-device variability sampling.
//! * [`annealer`]: schedules, the pSA / TApSA / SpSA input rules and the sub-step loop.
//! * [`gset`]: G-set file parsing and the best-known cut registry.
//! * [`engine`]: seeded, thread-count independent trial batches and sweeps.
//! * [`cli`]: the `pbit-anneal` command line front end.

pub mod annealer;
pub mod cli;
pub mod engine;
pub mod error;
pub mod gset;
pub mod model;
pub mod pbit;
pub mod rng;

pub use annealer::{
    derive_schedule, run_anneal, Algorithm, AlgorithmConfig, AnnealSchedule, TraceRecord,
    TrialResult,
};
pub use engine::{summarize, Engine, ExperimentSpec, ExperimentSummary, SweepAxis, TrialStats};
pub use error::{Error, Result};
pub use gset::{parse_gset, BestKnownRegistry, GsetFile};
pub use model::{IsingModel, MaxCutGraph, SpinState};
pub use pbit::{pbit_update, sample_variability, VariabilityConfig, VariabilityProfile};
