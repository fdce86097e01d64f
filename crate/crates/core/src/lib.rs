//! Row-centric lossless coding of bilevel Markov (Ising) images.
//!
//! Rows are grouped into blocks and each block is coded column by column from
//! left to right. Coding distributions come either from the Ising model
//! restricted to the block (exact belief propagation on the chain of column
//! super-pixels, with 0, 1 or 2 boundary rows absorbed as fields) or from a
//! table of context frequencies.

pub mod bp;
pub mod calibrate;
pub mod coder;
pub mod error;
pub mod gibbs;
pub mod grid;
pub mod harness;
pub mod oracle;
pub mod pbm;
pub mod schemes;

pub use error::{Error, Result};
pub use grid::{BinaryImage, ImageDims, IsingParams};
