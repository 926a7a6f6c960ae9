//! Variational quantum classifier: template, forward pass, loss, gradients,
//! Adam and training loops.

mod adam;
mod baseline;
mod gradient;
pub mod io;
mod model;
mod template;
mod train;

pub use adam::{adam_step, adam_update, AdamState};
pub use baseline::{train_classical_baseline, BaselineConfig, DenseSample, Mlp};
pub use gradient::{
    adjoint_gradient, adjoint_sample_gradient, gradient, gradient_with, parameter_shift_gradient, GradientMethod,
};
pub use model::{
    argmax, cross_entropy, evaluate, forward, forward_with, mean_loss, output_state, predict, Backend,
    GradientVector, LabeledSample, LOG_CLAMP,
};
pub use template::{build_classifier, Axis, ClassifierTemplate, ModelParams, RotationLayout};
pub use train::{
    evaluate_with, perturb_gradient, perturb_input, train_single, History, HistoryRecord, TrainConfig, TrainOutcome,
};

pub(crate) use template::{apply_op, apply_op_inverse, Op};
pub(crate) use train::{batch_gradient, draw_batch, Evaluator};
