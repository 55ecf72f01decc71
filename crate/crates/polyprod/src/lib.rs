//! Cohomology rings of polyhedral products.
//!
//! Given a simplicial complex `K` on `m` vertices and a family of based pairs
//! `(X_i, A_i)`, the space `Z(K; (X, A)) = ⋃_{σ∈K} D(σ)` carries a ring
//! structure on cohomology that splits, additively, over the full
//! subcomplexes `K_I`. This crate computes that decomposition together with
//! its multiplication (the star product on the wedge summands), and verifies
//! both against an explicit triangulation of the space itself.

pub mod cli;
pub mod cochain;
pub mod cohomology;
pub mod complex;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod pairs;
pub mod star;
pub mod suspension;

pub use complex::{parse_complex, IndexSet, SimplicialComplex, SimplicialMap};
pub use linalg::{CoeffSpec, Int};

