//! Exact and numeric toolkit for qudit hypergraph states.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`modarith`]: integer number theory (factorization, totient, congruences).
//! - [`stringsets`]: cardinalities of string-sets, the sets of length-`n`
//!   strings over `Z_d` whose product is a fixed residue, with closed form,
//!   recursion and brute-force routes plus the root-of-unity identities built
//!   on them.
//! - [`hypergraph`]: symbolic multi-hypergraphs and the rewrite rules for
//!   `X^†`, controlled-`Z` and computational-basis measurement.
//! - [`statevec`]: the dense numeric oracle (state vectors, reduced density
//!   matrices, Schmidt spectra, brute-force entanglement).
//! - [`entanglement`]: closed-form entanglement of elementary states and the
//!   lower bounds for connected states.
//! - [`reduction`]: the bipartition-local procedure that turns a connected
//!   hypergraph state into an elementary one, with numeric verification.

pub mod entanglement;
pub mod error;
pub mod hypergraph;
pub mod modarith;
pub mod reduction;
pub mod statevec;
pub mod stringsets;

pub use error::{Error, Result};
