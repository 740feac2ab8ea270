pub mod optimize;
pub mod predict;
pub mod sample;
pub mod verify;

pub use optimize::{cmd_optimize, MeanCurve, OptimizeOutcome, SummaryRow};
pub use predict::{cmd_predict, predict_model, Prediction};
pub use sample::{cmd_sample, SampleReport};
pub use verify::{cmd_verify, Check, VerifyReport};
