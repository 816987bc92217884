//! Distance matrices of zero-weight-sum trees and odd wheels, with their
//! closed-form pseudoinverses.

mod tree;
mod wheel;

pub use tree::{
    auto_alpha, gen_zero_sum_tree, tree_build, tree_completion, tree_pinv, tree_u_and_reconstruction, TreeMatrices,
    TreePinv, TreeU, WeightedTree,
};
pub use wheel::{
    wheel_build, wheel_completion_generator, wheel_pinv, wheel_properties, wheel_z, wheel_z_identities,
    wheel_z_identities_for, IdentityCheck, WheelGraph, WheelPinv, WheelProperties, ZIdentityReport,
};
