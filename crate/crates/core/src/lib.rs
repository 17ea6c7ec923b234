//! Exact computation with reduced block-rigid CRQ-groups of ring type: membership in
//! `G = ⟨d, A⟩`, multiplications on `G` given by structure constants, principal absolute
//! ideals `⟨g⟩_AI`, endomorphisms and the afi property, together with randomized
//! verification campaigns backed by brute-force oracles.

pub mod arith;
pub mod element;
pub mod endo;
pub mod error;
pub mod group;
pub mod ideal;
pub mod instances;
pub mod json;
pub mod mult;
pub mod verify;

pub use arith::{Rational, Residue};
pub use element::{AmbientElement, Key, MembershipCertificate};
pub use endo::{afi_check, endo_apply, Endomorphism};
pub use error::{Error, Result};
pub use group::{Group, GroupSpec, IdempotentType, TypeIdx};
pub use ideal::{ideal_member, ideal_of, PrincipalIdeal};
pub use mult::{check_24, product, semantic_extendable, PairKey, StructureConstants};
