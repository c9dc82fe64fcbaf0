//! Codimension of ideals in the critical degree of the Cox ring of a complete
//! toric variety.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice_geometry`] - exact lattice polytopes, Minkowski sums, lattice
//!   point enumeration and essential families.
//! * [`toric`] - the normal fan of the Minkowski sum of a family, divisor
//!   classes in the Chow group, the critical degree and graded pieces of the
//!   Cox ring.
//! * [`koszul`] - an independent oracle that builds the last map of the
//!   Koszul complex in the critical degree and measures its cokernel with exact
//!   integer elimination.
//! * [`codim`] - closed-form bounds and formulas expressed purely through
//!   polytope dimensions and interior lattice point counts, and the
//!   [`CodimReport`](codim::CodimReport) that cross-checks them against the oracle.
//! * [`random`] - seeded generation of random essential families.
//!
//! Everything here is `no_std` (with `alloc`); file formats and the command
//! line live in the companion CLI crate.

#![no_std]

extern crate alloc;

mod arith;
pub mod codim;
mod error;
pub mod koszul;
pub mod lattice_geometry;
pub mod linalg;
pub mod random;
pub mod toric;

pub use codim::{CodimReport, OracleRequest, Verdict};
pub use error::{Error, Result};
pub use koszul::{exact_rank, IntMatrix, SparseSection};
pub use lattice_geometry::{
    EssentialCertificate, Facet, LatticePolytope, Point, PolytopeFamily,
};
pub use toric::{DivisorClass, GradedBasis, NormalFan};
