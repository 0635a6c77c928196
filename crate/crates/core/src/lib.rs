//! Pointwise curvature computation and classification for semi-Riemannian
//! metrics given by coordinate expressions.

pub mod analysis;
pub mod catalog;
pub mod chart;
pub mod classify;
pub mod curvature;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod symmetry;
pub mod tensor;
