//! Polynomial differential forms and vector fields on `C^d` charts.

mod form;
mod poly;
mod suite;

pub use form::{
    contract, dbar_field_contract, del, del_field_contract, delbar, dtot, evaluate, lie01,
    lie10, lie_bracket, lie_std, wedge, Bidegree, ChartForm, ChartVectorField, FieldKind,
};
pub use poly::{Monomial, Poly};
pub use suite::{
    differential_relations_hold, identity_suite, second_order_suite, Expectation, IdentityCheck,
    Sampler, SuiteReport,
};
