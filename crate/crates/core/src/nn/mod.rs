//! Denoising autoencoder with per-feature softmax output.

mod io;
mod model;
mod train;

pub use io::{MODEL_FORMAT, MODEL_VERSION};
pub use model::{bce_loss, block_softmax, layer_dims, AutoencoderModel, Dense, Gradients, BCE_EPS};
pub use train::{
    add_noise, default_batch_size, train, train_with_report, TrainConfig, TrainReport,
    DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY,
};
