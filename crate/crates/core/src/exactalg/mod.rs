//! Exact arithmetic kernel: scalars in `Q` or `Q(θ)`, univariate and
//! bivariate polynomials, truncated series, resultants, factorization.

pub mod bipoly;
pub mod factor;
pub mod parse;
pub mod scalar;
pub mod series;
pub mod squarefree;
pub mod unipoly;

pub use bipoly::{BiPoly, Mono, Var};
pub use parse::parse_poly;
pub use scalar::{fmt_rat, rat, rat_frac, AlgExt, Rat, Scalar};
pub use series::{compose_series, SeriesOrder, TSeries};
pub use unipoly::{Coeff, UniPoly};
