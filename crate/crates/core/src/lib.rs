//! Tweet-corpus mining: an interest map of n-gram features (LSA, K-Means,
//! t-SNE) and rule-based sentiment aggregated over time and topics.

pub mod analytics;
pub mod cli;
pub mod cluster;
pub mod corpus;
pub mod decompose;
pub mod embed;
pub mod features;
pub mod pipeline;
pub mod sentiment;
pub mod svg;
pub mod textprep;
