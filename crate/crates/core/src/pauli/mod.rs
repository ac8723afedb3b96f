//! Pauli strings modulo phase, subgroups, coverings and transforms.

pub mod cover;
pub(crate) mod gf2;
pub mod group;
pub mod string;
pub mod walsh;

pub use cover::{cover_mub, cover_mub_group, cover_trivial, StabilizerCovering};
pub use group::{PauliGroup, StabilizerGroup, SyndromeVector, ENUMERATION_CAP};
pub use string::{all_paulis, parse_list, Pauli1, PauliString};
pub use walsh::{dense_pauli_transform, fwht, wh_apply};
