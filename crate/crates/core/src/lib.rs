//! Numerical operator theory on Hardy spaces of the disc and bidisc:
//! truncated series arithmetic, disc automorphisms, boundary-quadrature
//! norms, weighted composition isometries, and the generalized
//! tri-circular projections they generate.
//!
//! The crate is organized around five layers:
//!
//! - [`series`]: truncated power series in one and two variables, the
//!   evaluation backbone.
//! - [`moebius`]: the automorphism group of the disc in normal form.
//! - [`hardy`]: boundary grids, `H^p` norms, inner functions, and the
//!   subalgebra automorphism checks.
//! - [`operators`]: weighted composition operators, the operator
//!   expression algebra, matrices on the monomial basis, and isometry
//!   verification.
//! - [`projections`]: tri-circular projection construction, the spectral
//!   oracle, the Lagrange falsifier, and the classifiers.
//!
//! Everything is immutable after construction and all operations are pure
//! functions, so values can be shared and batches parallelized freely.

pub mod hardy;
pub mod moebius;
pub mod operators;
pub mod projections;
pub mod report;
pub mod samples;
pub mod schema;
pub mod series;

pub use num_complex::Complex64;

pub use hardy::{BlaschkeProduct, BoundaryGrid, PNorm, Subalgebra};
pub use moebius::DiscAutomorphism;
pub use operators::{
    OperatorExpr, UnimodularMonomial, WeightedCompositionOp1D, WeightedCompositionOp2D,
};
pub use projections::{ClassificationReport, EigenPair, Family, GtcpTriple};
pub use report::{CheckReport, Verdict};
pub use series::{TruncatedSeries1D, TruncatedSeries2D};
