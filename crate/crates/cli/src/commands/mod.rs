pub mod analyze;
pub mod modal;
pub mod predict;
pub mod repro;
pub mod sweep;
pub mod synth;

pub use analyze::{run_analyze, AnalyzeReport};
pub use modal::{run_modal, ModalReport};
pub use predict::{run_predict, PredictReport};
pub use repro::{run_repro, Target};
pub use sweep::{run_sweep, SweepRecord, SweepTable};
pub use synth::run_synth;
