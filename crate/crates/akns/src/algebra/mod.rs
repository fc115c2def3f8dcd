//! Exact coefficient arithmetic: Gaussian rationals, polynomials in the
//! hierarchy constants, and differential polynomials in `p`, `q`.

pub mod diffpoly;
pub mod gaussrat;
pub mod parse;
pub mod sympoly;

pub use diffpoly::{DiffMono, DiffPoly, DiffPolyError};
pub use gaussrat::{rat_sqrt, GaussRat, GaussRatError};
pub use parse::{parse_diffpoly, parse_sympoly, ParseDiffPolyError};
pub use sympoly::SymPoly;
