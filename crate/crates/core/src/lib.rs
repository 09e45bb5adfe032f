//! Exact engine for cluster patterns of geometric type.
//!
//! Seeds are mutated inside the Laurent ring of a fixed root cluster, so every
//! cluster variable is carried as an exact Laurent expansion with big-integer
//! coefficients. On top of that the crate explores finite regions of the
//! exchange tree, extracts d-vectors and g-vectors, and checks positivity,
//! d-vector positivity, the proper Laurent monomial property, linear
//! independence of cluster monomials and the g-vector statements on those
//! regions.

pub mod cli;
pub mod error;
pub mod laurent;
pub mod linalg;
pub mod pattern;
pub mod seed;
pub mod semifield;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use laurent::{Exponent, LaurentPoly};
pub use pattern::{Budget, ExploredPattern, VarId};
pub use seed::{ExchangeMatrix, Seed};
pub use semifield::TropMonomial;
pub use verify::{ClusterFamily, ClusterMonomial, ExpansionTable, VerificationReport};
pub use word::Word;
