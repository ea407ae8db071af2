//! Small double-precision neural kernel with hand-written backward passes.

mod adam;
mod checkpoint;
mod embedding;
mod gradcheck;
mod layers;
mod lstm;
mod tensor;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{config_hash, Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use embedding::{synthetic_embeddings, EmbeddingTable, UNK};
pub use gradcheck::{grad_check, layer_suite, relative_error, GradCheck};
pub use layers::{
    argmax, dropout, dropout_mask, interaction, maxpool_backward, maxpool_time, sigmoid_bce, softmax, softmax_xent,
    Activation, BatchNorm, BatchNormCache, Dense, Interaction,
};
pub use lstm::{bidirectional_backward, bidirectional_forward, Direction, Lstm, LstmCache};
pub use tensor::{Params, Tensor};
