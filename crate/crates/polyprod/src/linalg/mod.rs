pub mod int;
pub mod mat;
pub mod ring;
pub mod snf;

pub use int::Int;
pub use mat::{SparseMat, SparseVec};
pub use ring::{CoeffRing, CoeffSpec, FpRing, IntRing};
pub use snf::{
    image_membership, rank_and_factors, smith_normal_form, smith_with_riders, solve_in_image,
    Snf, TransformFlags,
};
