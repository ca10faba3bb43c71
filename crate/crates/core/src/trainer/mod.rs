//! Contrastive training: the in-batch sampled-softmax objective with
//! optional hard negatives, exact analytic gradients, plain SGD and a
//! finite-difference gradient checker.

mod config;
mod gradcheck;
mod loss;
mod sgd;

pub use config::{HardNegativeScope, TrainingConfig};
pub use gradcheck::{gradient_check, random_instance, GradCheckReport, DEFAULT_EPSILON, MIN_SAMPLED_COORDINATES};
pub use loss::{batch_loss, batch_loss_encoded, BatchLossResult, EncodedExample, Gradients, TowerGradient};
pub use sgd::{in_batch_accuracy, sgd_step, train, EpochStats, TrainingLog};
