//! Comparison geometry for Lorentzian pre-length spaces.
//!
//! * [`spaces`]: pre-length space interface and concrete instances.
//! * [`models`]: the constant curvature model spaces and their laws of cosines.
//! * [`angles`]: comparison angles, angle comparison functions and normalized angles.
//! * [`certify`]: sampling based certification of timelike curvature bounds.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod numeric;

pub mod angles;
pub mod certify;
pub mod models;
pub mod spaces;

pub use models::{
    HingeSpec, ModelError, ModelParams, ModelPoint, ModelTriangle, Side, SideOffset, SizeDiagnosis,
    SizeVerdict, VertexKind,
};
pub use spaces::{
    load_instance, load_space, AnySpace, EventPoint, MaximizerVariant, PolylineCurve,
    PreLengthSpace, Relation, SpaceConfig, SpaceError, SpaceInstance, TabulatedSpace,
    TaxicabProduct,
};
