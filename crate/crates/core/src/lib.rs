//! Kneser-family graphs on 2-subsets, their neighborhood complexes, discrete
//! Morse matchings on face posets, and exact homology for cross-checking.

pub mod certify;
pub mod complex;
pub mod error;
pub mod face;
pub mod homology;
pub mod io;
pub mod kneser;
pub mod morse;
pub mod pipeline;

pub use error::{Error, Result};
pub use face::{Face, FaceSet};
