//! Syntactic state-space analysis of concurrent programs with mutexes.
//!
//! A program ([`syntax::Program`]) built from opaque actions, `P(a)` /
//! `V(a)` mutex operations, sequencing, choice, loops and parallel
//! composition has a lattice of [`positions::Position`]s. Sets of positions
//! are represented as finite [`regions::Region`]s of intervals, which form a
//! boolean algebra with canonical normal forms. On top of that,
//! [`statespace`] computes the forbidden region (positions where some mutex
//! is held twice or released before being taken), its complement and the
//! deadlocks.
//!
//! ```
//! use pvspace::syntax::swiss_flag;
//! use pvspace::statespace::{find_deadlocks, forbidden_region};
//!
//! let prog = swiss_flag();
//! assert_eq!(forbidden_region(&prog, None).unwrap().len(), 2);
//! assert_eq!(find_deadlocks(&prog, None).unwrap().len(), 1);
//! ```

pub mod error;
pub mod grid;
pub mod json;
pub mod positions;
pub mod regions;
pub mod resources;
pub mod statespace;
pub mod syntax;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, GridPoint};
pub use positions::{Position, ProgramPoset};
pub use regions::{Interval, PosetContract, Region};
pub use resources::ConsumptionMap;
pub use syntax::{parse_program, print_program, Program};
