pub mod cliques;
pub mod encoding;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod hafnian;
pub mod percolation;
pub mod report;
pub mod sampler;
pub mod stats;
pub mod tda;
