//! Domain types and their on-disk formats.

pub mod access;
mod csv_util;
pub mod embedding_file;
pub mod export;
pub mod media;
pub mod pair;
pub mod perf;

pub use embedding_file::{read_embedding_file, write_embedding_file, EmbeddingFile, EmbeddingHeader};
pub use export::{read_feature_export, write_feature_export, ExportRole, FeatureExport, LinearHead};
pub use media::{read_flow_file, read_video_file, write_flow_file, write_video_file, FlowClip, VideoClip};
pub use pair::{
    read_benchmark_index, read_pair_manifest, read_split, validate_collection, validate_pair, write_pair_manifest,
    BenchmarkIndex, ClipLists, DatasetPair, Modality, SplitSpec,
};
pub use perf::{read_performance_matrix, write_performance_matrix, PerformanceMatrix};
