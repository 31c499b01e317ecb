//! Balanced targets, the pairing domain of field tuples, evaluation of `Ω` and
//! `μ`, and the checks behind well-definedness and the moment-map property.

mod pairing;
mod target;
mod tuple;

pub use pairing::{
    gamma_for, second_order_check, mu_eval, omega_eval, pairing, stokes_sides, mixed_difference_check,
    well_definedness_check, zero_potential, FdReport, FdStep, GammaChoice, MuValue,
    WellDefinedness, FD_STEPS,
};
pub use target::{
    catalog_maps, check_balanced, kahler_form, map_by_name, x_membership, BalancedTarget,
    MapSpec, StokesDiagnosis, XMembership,
};
pub use tuple::{
    chart_volume, claim_del_formula, claim_del_formula_chart, closure_sum_terms,
    contraction_chain, lie_g_membership, lie_g_membership_chart, nested_contract_chart,
    pairing_integral, pg_membership, pg_residuals, reversal_sides_chart, reversal_sides_inv,
    ChartTuple, DelFormulaReport, ExactField, GammaPolicy, MomentTuple, PgMembership,
    PgResiduals, Slot, SumTerm,
};
