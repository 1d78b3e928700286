//! Feature2Vec: property-norm features embedded in a frozen pretrained
//! word space, with a PLSR baseline and the retrieval/overlap evaluations.
//!
//! - [`corpus`]: embedding and norms ingestion, alignment, splits
//! - [`f2v`]: negative-sampling training of feature embeddings
//! - [`plsr`]: partial least squares baseline
//! - [`eval`]: top-N retrieval, top-K overlap, qualitative rankings
//! - [`store`]: model archives and report serialization
//! - [`cli`]: the `feature2vec` command line

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod f2v;
pub mod linalg;
pub mod plsr;
pub mod rng;
pub mod store;
