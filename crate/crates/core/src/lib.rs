//! Hypergeometric (GKZ) systems of monomial curves: exact Γ-series,
//! Gevrey indices, slopes, dimension tables and restrictions.

pub mod arith;
pub mod error;
pub mod gamma;
pub mod gevrey;
pub mod lattice;
pub mod restriction;
pub mod series;
pub mod system;

pub use arith::{Rational, RationalVector};
pub use error::{GkzError, Result};
pub use gamma::{ExponentLabel, ExponentVector, MinimalityCheck};
pub use gevrey::{DimensionTable, GevreyEstimate, GevreyOrder, Sheaf, Validity};
pub use lattice::{CurveMatrix, Family, LatticeVector, SemigroupCertificate};
pub use restriction::{BFunction, RestrictionDecomposition, RestrictionLocus};
pub use series::{TruncatedSeries, TruncationFrontier, WeylOperator, WeylTerm};
pub use system::{build_system, HypergeometricSystem};
