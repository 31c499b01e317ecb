//! Invariant forms on nilmanifold-type models given by structure constants.

mod calculus;
pub mod catalog;
mod form;
mod model;

pub use calculus::{
    bracket_inv, check_map_compatible, dbar_field_contract_inv, flow_generator, flow_pullback,
    is_holomorphic_field, lie01_inv, lie10_inv, lie_std_inv, lie_typed_inv, operator_matrix,
    pullback_by_matrix, to_dmatrix,
};
pub use form::{
    contract_inv, evaluate_inv, nested_contract, ExactForm, FloatForm, InvForm, InvVectorField,
};
pub use model::{label_to_mask, mask_to_label, LieModel, MAX_MODEL_DIM};
