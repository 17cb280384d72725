//! ElGamal encryption over the iterated groups of units of Z_n.
//!
//! The crate layers up from arbitrary-precision number theory
//! ([`number_theory`]) through the totient-tower isomorphism machinery
//! ([`unit_groups`]) to three encryption schemes: the classical system
//! over Z_p* ([`elgamal_classic`]), the extension to the second group of
//! units ([`elgamal_u2`]) and the extension to the third group of units
//! ([`elgamal_u3`]). [`bench`] times the generator-power operation in
//! U^2 against U^3 for groups of comparable order, and [`scheme`] puts
//! all four scheme variants behind one trait for runtime selection.

pub mod bench;
pub mod elgamal_classic;
pub mod elgamal_u2;
pub mod elgamal_u3;
pub mod keyfile;
pub mod number_theory;
pub mod scheme;
pub mod unit_groups;

pub use keyfile::KeyFile;
pub use scheme::{lookup, registry, Scheme};
pub use unit_groups::{GroupElement, UnitGroupTower};
