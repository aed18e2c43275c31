//! Quadrature oracle runs, gradient checking, synthetic region-recovery tasks and a toy training loop.

mod gradcheck;
mod oracle;
mod task;
mod train;

pub use gradcheck::{
    finite_diff_gradcheck, finite_diff_gradcheck_with, write_gradcheck_csv, ClassErrors, GradCheckReport,
    NegativeControl,
};
pub use oracle::{oracle_suite, write_oracle_csv, OracleTrial};
pub use task::{make_region_task, SyntheticTask};
pub use train::{train_toy, write_loss_csv, TrainConfig, TrainReport};
