//! Sliding-mode chaos synchronization.

pub mod law;
pub mod sync;

pub use law::{
    balance_control, routh_hurwitz, saturation, sliding_value, switching_control,
    ControllerConfig, Mat4, Vec4, DEFAULT_EPSILON, DEFAULT_GAIN, DEFAULT_SURFACE,
};
pub use sync::{
    control_input, lyapunov_series, nonlinear_block, simulate_sync, sliding_mode_matrix,
    write_sync_csv, ControlSample, SyncRun, SYNC_HEADER,
};
