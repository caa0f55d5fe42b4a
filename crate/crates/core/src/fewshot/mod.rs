//! Siamese embedder trained with contrastive loss on synthetic quadrant
//! descriptors.
//!
//! Both branches of a pair go through the same [`EmbedderParams`]; the
//! distance between the two embeddings feeds the loss during training and the
//! per-class nearest-reference distances at inference time.

mod data;
mod embedder;
mod io;
mod loss;
mod pipeline;
mod train;

pub use data::{make_pairs, Dataset, Descriptor, DescriptorGenerator, LabeledPair};
pub use embedder::{embed, pair_distance, EmbedderParams, EmbeddingVector};
pub use io::{params_from_str, params_to_string, read_loss_csv, read_params, write_loss_csv, write_params};
pub use loss::{contrastive_loss, contrastive_loss_unchecked, loss_gradient, pair_loss};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutcome};
pub use train::{
    min_class_distance, nearest_reference_accuracy, squash_distance, train, TrainOutcome,
    TrainingParams,
};

/// Number of vegetation classes the embedder distinguishes.
pub const NUM_CLASSES: usize = 4;
