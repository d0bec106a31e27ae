//! Exact computations with positive-definite integral lattices.
//!
//! Representation of integers and lattices by lattices, short-vector
//! enumeration, binary reduction and genera, truant witnesses for integer
//! sets, and checks for recoverability of binary lattices.

mod arith;
pub mod claims;
pub mod criterion;
pub mod enumeration;
pub mod error;
pub mod gram;
pub mod recover;
pub mod reduction;
pub mod report;
pub mod represent;

pub use arith::{determinant, gcd, is_prime, is_square, legendre};
pub use enumeration::{
    short_vectors, short_vectors_with_budget, successive_minima, vectors_of_norm, vectors_of_norm_with_budget, Budget,
    MinimaProfile, ShortVectorList, DEFAULT_BUDGET,
};
pub use error::{QfError, Result};
pub use gram::{BinaryFormTriple, GramKind, GramMatrix, Lattice, RootFamily, Vector};
pub use reduction::{enumerate_reduced_binaries, is_isometric, lll_reduce, reduce_binary, ReducedBinary};
pub use report::{Status, VerificationReport};
pub use represent::{
    genus_represents, reduced_forms_of_disc, represents_all, represents_integer, represents_lattice, Embedding,
    GenusClassList,
};
