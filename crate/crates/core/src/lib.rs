//! Exact computation in the golden-ratio Thompson groups `F_tau` and `T_tau`
//! and in the lift of `T_tau` to the real line: group operations, rotation
//! numbers, stable commutator length, and certified constructions.

pub mod circle;
pub mod construct;
pub mod element;
pub mod error;
pub mod expr;
pub mod lift;
pub mod par;
pub mod plmap;
pub mod ring;

pub use error::{Error, Result};

/// Limits shared by the search routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Orbit length for rotation-number enclosures.
    pub max_iter: u64,
    /// Largest denominator tried when looking for a periodic orbit.
    pub max_den: u64,
    /// Subdivision depth for candidate points in constructions.
    pub search_depth: u32,
    /// Largest breakpoint table any intermediate result may have.
    pub piece_cap: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_iter: 10_000,
            max_den: 1_000,
            search_depth: 12,
            piece_cap: 100_000,
        }
    }
}
