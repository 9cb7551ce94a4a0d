//! Toroidal defining sequences, presented finitely and analyzed exactly.
//!
//! A decomposition of the 3-sphere can be described by a nested sequence of
//! solid-torus stages: Antoine necklaces, Bing doubles, Whitehead continua.
//! This crate represents such sequences combinatorially as [`PatternSystem`]
//! documents, expands finite stage prefixes, computes concordance invariants
//! (component counts and the mod-2 linking sequence), checks admissibility,
//! generates systems realizing prescribed invariant values, and produces
//! numerically certified embeddings of low stages in R³.

pub mod admissibility;
pub mod expand;
pub mod generators;
pub mod geometry;
pub mod invariants;
pub mod model;
pub mod schema;
pub mod seq;

pub use admissibility::{
    check_admissible, verify_component_bijection, AdmissibilityReport, BijectionCertificate,
    BijectionOutcome, ConditionStatus, NestingPair, NestingRelation, NestingTag,
};
pub use expand::{expand, stage, ExpandOptions};
pub use generators::{
    antoine_chain, antoine_from_target, bing_pattern, whitehead_pattern, GeneratedSystem,
};
pub use geometry::{
    certify_geometry, embed_antoine, export_obj, obj_string, parse_placements,
    placements_to_json, CheckEntry, EmbedParams, GeometryReport, TorusPlacement,
};
pub use invariants::{
    compare_count_sums, component_counts, disjoint_union, distinguish, mod2_linking_sequence, nu,
    nu_with_warnings, CountComparison, CountSequence, FormalClass, SliceCertificate, Verdict,
};
pub use model::{
    Arrangement, Assignment, ChildSlot, Pattern, PatternEdge, PatternSystem, RootEdge, RootSpec,
    StageEdge, StageGraph, StageRule, TorusNode,
};
pub use schema::{parse_relation, parse_system, system_to_json};
pub use seq::{EpSeq, ParitySeq, Z2};

/// Scalar type used by the geometry module's public API.
pub type Real = f64;

/// Unified error type for the whole toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The document does not match the expected JSON shape.
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    /// The document parses but breaks a semantic invariant.
    #[error("semantic violation at {path}: {message}")]
    Semantic { path: String, message: String },
    /// An expansion would exceed the configured node cap.
    #[error("resource cap exceeded: {message}")]
    Resource { message: String },
    /// A generator was asked for an unrepresentable object.
    #[error("invalid generator input: {message}")]
    Generator { message: String },
    /// The disjoint union cannot be presented in this document model.
    #[error("disjoint union failed: {message}")]
    Union { message: String },
    /// A nesting relation references unknown nodes or repeats pairs.
    #[error("malformed nesting relation: {message}")]
    Relation { message: String },
    /// Chosen layout parameters force two tori to overlap.
    #[error("layout failed: tori {a} and {b} would overlap ({message})")]
    Overlap { a: String, b: String, message: String },
    /// The layout is infeasible for a non-pairwise reason.
    #[error("layout failed: {message}")]
    Layout { message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
