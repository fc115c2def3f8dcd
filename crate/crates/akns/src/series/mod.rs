//! Truncated Laurent series arithmetic and the example potential generators.

pub mod generators;
pub mod laurent;

pub use generators::{
    csc_series, example2_pq, example2_s, sin_series, wp_series, wp_taylor_at_halfperiod,
    EllipticParams,
};
pub use laurent::{
    eval_diffpoly, eval_diffpoly_numeric, eval_diffpoly_to, Coeff, Laurent, SeriesError,
    EXACT_CUTOFF,
};
