//! Canonical elements of automaton groups and a semi-decision procedure for
//! the Engel property.
//!
//! * [`mealy`]: invertible Mealy machines, MAF v1 I/O, product, inverse,
//!   minimization.
//! * [`element`]: canonical group elements and their algebra, plus the
//!   word-expression language.
//! * [`groups`]: the Grigorchuk and Gupta-Sidki groups, level quotients,
//!   `K`-membership, contraction estimates.
//! * [`engel`]: Engel iteration, the tuple graph and its decision modes,
//!   periodic certificates and witnesses.
//! * [`cli`]: the `agr` command-line front end.

pub mod cli;
pub mod element;
pub mod engel;
pub mod groups;
pub mod mealy;

pub use element::{order_bounded, Element, Order, RootDecomposition};
pub use groups::{grigorchuk, gupta_sidki, GroupPresentation};
pub use mealy::{MealyMachine, PointedMachine, Word};
