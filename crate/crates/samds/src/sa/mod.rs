//! Sherali-Adams pseudo-distributions over a net domain: subset families,
//! the LP encoding, and local-table operations.

pub mod encode;
pub mod family;
pub mod pd;

pub use encode::{build_sa_lp, build_sa_lp_with, extract_pd, SaIndexMap, SaLpOptions, CLIP_TOL};
pub use family::{FamilyKind, SubsetFamily};
pub use pd::{Conditioning, PseudoDistribution, MIN_CONDITION_PROB};
