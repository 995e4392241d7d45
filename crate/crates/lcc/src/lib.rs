//! Local compositional complexity (LCC) scoring.
//!
//! The LCC score of a piece of data is the bit-length of the *structured*
//! portion of a minimum-total-length two-part description:
//!
//! - **Portion A** (structured): a model (codebook / Gaussian mixtures) plus
//!   an index that invokes the model per position. Its length is the LCC
//!   score.
//! - **Portion B** (unstructured): the residual that corrects the model's
//!   approximation to the exact input. It is counted toward the total
//!   description length but never toward the score.
//!
//! The description is chosen to minimise the total (A + B), so whether a
//! feature counts as structure depends on whether claiming it shortens the
//! whole description. Random noise ends up almost entirely in portion B
//! (score near zero); constant or repetitive data has a tiny portion A
//! (score near zero); data that carries a message lands in between, with a
//! large structured portion.
//!
//! Pipelines:
//! - [`discrete`]: symbol strings, via a codebook of aliased substrings.
//! - [`cluster`] + [`hierarchy`]: continuous tensors (images, spectrograms),
//!   via MDL-selected diagonal Gaussian mixtures over progressively larger
//!   neighbourhoods.
//! - [`arecibo`]: bitstrings rendered at candidate aspect ratios and scored
//!   as one-channel images.
//!
//! All code lengths are ideal (real-valued) Shannon code lengths; no actual
//! entropy coder is built.

pub mod arecibo;
pub mod cluster;
pub mod coding;
pub mod discrete;
pub mod frontends;
pub mod generate;
pub mod hierarchy;
pub mod oracle;
pub mod reconstruct;
pub mod report;

mod error;

pub use coding::{CostBreakdown, Precision, SymbolString};
pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
