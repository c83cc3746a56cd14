//! Digital topology on integer lattices.
//!
//! Images are finite sets of lattice points viewed through one of the
//! standard adjacencies (4/8 in the plane, 6/18/26 in space, and their
//! higher-dimensional generalizations). On top of that graph view the
//! crate provides:
//!
//! - paths, loops, and checkable homotopy certificates ([`homotopy`]);
//! - constructive loop contractions on the cataloged surfaces and
//!   adjacency-lifting between coarser and finer adjacencies
//!   ([`pi1tools`]);
//! - bounded breadth-first searches over loop and map spaces that either
//!   produce a certificate or report exhaustion ([`oracle`]);
//! - clique censuses and Euler characteristics ([`euler`]);
//! - a catalog of named example images ([`catalog`]) and a JSON
//!   interchange layer ([`io`]).
//!
//! Everything is deterministic: point sets are kept sorted, searches
//! expand states in a fixed order, and random walks take explicit seeds.

pub mod catalog;
pub mod error;
pub mod euler;
pub mod homotopy;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod pi1tools;
pub mod reproduce;
pub mod walks;

pub use error::{Error, Result};
pub use euler::{euler_characteristic, simplex_census, ChiReport, DigitalDisk, DiskKind};
pub use homotopy::{
    DigitalLoop, DigitalPath, GridFlags, HomotopyGrid, NullhomotopyCertificate,
};
pub use io::{content_hash, ContentRef};
pub use lattice::{box_points, shared, Adjacency, Image, Point, MAX_DIM};
pub use oracle::{ExplorationReport, MoveKind, SearchBudget, SearchStatus};
pub use pi1tools::{contract_auto, AvoidRewriteTrace, ClampSchedule, Substitution};
pub use reproduce::{run_all, run_one, CriterionOutcome, DEFAULT_SEED};
