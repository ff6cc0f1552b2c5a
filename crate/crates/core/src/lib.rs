//! Dynamic-graphlet structural signatures, temporal-structural random walks
//! and Skip-gram node embeddings for temporal networks.
pub mod embedding_space;
pub mod error;
pub mod evaluation;
pub mod graphlet_census;
pub mod pipeline;
pub mod similarity_net;
pub mod skipgram;
pub mod temporal_graph;
pub mod walker;

pub use error::{Error, Result};
