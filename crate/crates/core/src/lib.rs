//! Exact character tables, traces, GNS models and spectral-gap certificates
//! for finite groups and finite quotients of arithmetic groups.

pub mod cache;
pub mod chartable;
pub mod config;
pub mod cyclo;
pub mod error;
pub mod experiments;
pub mod gns;
pub mod group;
pub mod linalg;
pub mod modp;
pub mod ops;
pub mod relative;
pub mod spectral;
pub mod trace;

pub use chartable::{character_table, class_matrices, CharacterTable};
pub use cyclo::{CycloRational, Cyclotomic};
pub use error::{Error, Result};
pub use group::{
    build_group, conjugacy_classes, reduce, ConjClassTable, GroupDescriptor, GroupHandle,
    IntMatrix, IntegerMatrixElement,
};
pub use ops::GroupOps;
pub use trace::{convex_combine, is_trace, normalized_character, pullback, ClassValues, Trace};
pub use cache::{CacheOutcome, TableCache, TableSource};
pub use config::Config;
pub use experiments::{dimension_census, semidirect_scan, vanishing_scan, ScanPlan, VanishingSeries};
pub use gns::{center, decompose_trace, gns, is_character, GnsModel, TraceComponent};
pub use relative::{is_relative_character, relative_invariance, torus_limit_scan, AutomorphismAction};
pub use spectral::{certificate_propagation, norm_conj, norm_pi, GapReport, GroupAlgebraElement};
