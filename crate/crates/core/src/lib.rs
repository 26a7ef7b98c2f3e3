pub mod aggregation;
pub mod bench;
pub mod covering;
pub mod error;
pub mod graph;
pub mod instances;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod relaxation;
pub mod rng;
pub mod separators;
pub mod sse;
