//! Handcrafted meta-features and dataset embeddings.

pub mod clip;
pub mod embedding;
pub mod flow;
pub mod image;
pub mod stats;

pub use clip::{clip_feature_names, clip_meta_features, ClipFeatureVector, CLIP_FEATURE_DIM};
pub use embedding::{
    dataset_embedding, read_dataset_embedding, standardize, write_dataset_embedding, DatasetEmbedding, Scaler,
    DEFAULT_SAMPLE_BUDGET,
};
pub use flow::{flow_mag_stats, hof_histogram};
pub use image::{colourfulness, edge_density, glcm_entropy};
pub use stats::{basic_stats, quantile_sorted, BasicStats};
