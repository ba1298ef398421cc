//! Exact sensitivity measures for Boolean functions and two-colorings of the
//! integer lattice, together with the constructions, reductions and bound
//! checks that connect the two settings.
//!
//! The crate is organised bottom-up:
//!
//! - [`boolfn`]: packed truth tables, sensitivity, block sensitivity and
//!   l-block sensitivity with replayable witnesses.
//! - [`lattice`]: color oracles over `Z^d`, point and axis sensitivity, and
//!   exact scans for the coloring kinds that admit a finite certificate.
//! - [`constructions`]: the sorted-input example, Rubinstein's function and
//!   the slice coloring with `d = 2r^2 - r`.
//! - [`reductions`]: function to coloring and coloring to function.
//! - [`bounds`]: Kenyon-Kutin constants, the lattice lower bound, slice
//!   graphs and the sliced / repeated coloring inequalities.
//! - [`search`]: exhaustive and randomized separation search.
//! - [`verify`]: theorem-level checks with structured reports, used by the
//!   CLI and the acceptance suite.

pub mod boolfn;
pub mod bounds;
pub mod constructions;
mod error;
pub mod hexbits;
pub mod lattice;
pub mod reductions;
pub mod report;
pub mod search;
pub mod verify;

pub use error::{Error, Result};

/// Short content fingerprint (first 16 hex digits of SHA-256).
pub fn fingerprint(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}
