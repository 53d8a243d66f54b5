//! Replicated studies, seeding, metrics and the command-line tool.

pub mod cli;
pub mod io;
pub mod metrics;
pub mod seed;
pub mod study;

pub use metrics::{abs_error, rmse, RunMetrics};
pub use seed::{derive, rng_from_seed, SimRng};
pub use study::{run_study, Cell, StudySpec, StudyTable};
