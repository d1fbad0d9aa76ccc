use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("label tracking failed between field steps {step} and {next} (B = {field_t} T): best overlap {overlap:.3}")]
    LabelTracking {
        step: usize,
        next: usize,
        field_t: f64,
        overlap: f64,
    },

    #[error("lab-frame integration step underflow at t = {time_s:e} s (step {step_s:e} s)")]
    StepUnderflow { time_s: f64, step_s: f64 },

    #[error("calibration did not reach tolerance: best cost {best_cost:e} after {evaluations} evaluations")]
    Calibration { best_cost: f64, evaluations: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
}
