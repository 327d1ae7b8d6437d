//! Computational checks around lifting isomorphisms of modular group
//! algebras: finite coefficient rings, polycyclic 2-groups, group algebras
//! over them, augmentation filtrations, and cyclic subgroup census.

pub mod census;
pub mod coefring;
pub mod filtration;
pub mod groupalg;
pub mod modlinalg;
pub mod obstruction;
pub mod parse;
pub mod pcgroup;
pub mod report;
pub mod suite;

pub use coefring::{CoefRing, FieldElem, ResidueField, RingElem, RingError};
pub use modlinalg::{HowellModule, LinalgError, Zmod};
