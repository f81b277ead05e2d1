//! Exact symbolic engine for the formal data of meromorphic connections on
//! the sphere: Stokes circles, conjugacy-class decorations, fission trees and
//! forests, the Fourier and SL2 actions, nearby readings, and diagrams.
//!
//! All arithmetic is exact. Coefficients live in a lattice of radicals over
//! the rationals (see [`exact::ExactScalar`]); nothing is ever rounded.

pub mod circle;
pub mod diagram;
pub mod exact;
pub mod fission;
pub mod formal;
pub mod readings;
pub mod sl2;

pub use circle::{
    common_part, conjugate, fission_exponent, irr_hom, truncate, ExpFactor, StokesCircle,
    TruncMode,
};
pub use diagram::{diagram, diagram_eq, legs, Diagram, DiagramNode};
pub use exact::{rat, rat_i, ExactScalar, Rat, SpherePoint};
pub use fission::{
    build_tree, build_tree_upto, canonical_form, canonical_form_with_classes, fission_datum,
    forest_of, is_isomorphic, realize, FissionDatum, FissionEntry, FissionForest, FissionTree,
    InnerNode, LeafNode, LevelDatum, TreeNode,
};
pub use formal::{
    formal_twist, ConjClass, EigVal, Flavor, GlobalClass, LocalClass, LocalEntry,
};
pub use readings::{
    distinct_forest_count, enriched_of_shapes, enriched_tree, reading_rank, readings,
    readings_of_shapes, verify_readings, EnrichedTree, Group, NearbyReadings, Reading,
};
pub use sl2::{
    apply_word, forest_of_shapes, fourier, genericize, homography, lambda_coeff, scale, shape_of,
    sl2_factor, twist, CircleShape, DeepPart, Elementary, ShapeClass, ShapeEntry, Sl2Elem,
};

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A sum left the coefficient lattice.
    #[error("sum is not representable in the coefficient lattice")]
    NotRepresentable,
    /// Zero raised to a non-positive power.
    #[error("zero base with non-positive exponent")]
    ZeroPower,
    /// A pairwise circle operation was given circles at distinct points.
    #[error("operands anchored at different points")]
    DifferentPoints,
    /// A class enlargement was asked to shrink.
    #[error("target dimension too small")]
    TargetTooSmall,
    /// A finite point carries more rank than the point at infinity.
    #[error("class is not compatible: finite rank exceeds rank at infinity")]
    Incompatible,
    /// Scaling a symbolic eigenvalue by anything other than a sign.
    #[error("cannot scale a symbolic eigenvalue by a value other than 1 or -1")]
    SymbolicScale,
    /// The Fourier transform does not apply to these data.
    #[error("the Fourier transform is undefined for a rank-one class spanned by <a*x> or <0> at infinity")]
    ExcludedRankOne,
    /// Tree or forest data admit no realization.
    #[error("forest data is not realizable: {0}")]
    Unrealizable(String),
    /// An operation that needs modified formal data got unmodified data.
    #[error("expected modified formal data")]
    ExpectedModified,
    /// An operation that needs unmodified formal data got modified data.
    #[error("expected unmodified formal data")]
    ExpectedUnmodified,
    /// A transformation parameter must be rational but was not.
    #[error("parameter must be rational here: {0}")]
    IrrationalParameter(String),
    /// Structurally invalid input.
    #[error("invalid construction: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
