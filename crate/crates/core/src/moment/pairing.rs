//! Evaluation of `Ω` and `μ`, gauge invariance of the pairing and the
//! finite-difference check of the moment-map identity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis;
use crate::error::{Error, Result};
use crate::hodge::{neumann_gamma, HermitianMetricSpec, NeumannSolver};
use crate::invariant::{
    contract_inv, evaluate_inv, flow_pullback, ExactForm, FloatForm, InvForm, InvVectorField,
    LieModel,
};
use crate::scalar::GaussRat;
use crate::symalg::{self, SuiteReport};

use super::target::{x_membership, MapSpec};
use super::tuple::{
    contraction_chain, pairing_integral, pg_membership, reversal_sides_inv, ExactField,
    GammaPolicy, MomentTuple,
};

/// `∫_S (f*ω_{n−1})(v_1, …, v_{n−1}, w̄_1, …, w̄_{n−1}) dV`.
pub fn omega_eval(f: &MapSpec, vs: &[ExactField], ws: &[ExactField]) -> Result<GaussRat> {
    let n = f.target().dim();
    if vs.len() + 1 != n || ws.len() + 1 != n {
        return Err(Error::TupleArity {
            got: vs.len().max(ws.len()),
            expected: n - 1,
        });
    }
    let src = f.source();
    let args: Vec<&ExactField> = vs.iter().chain(ws).collect();
    let value = evaluate_inv(&f.pulled_omega(), &args)?.coefficient(0);
    src.integrate(&src.volume_form::<GaussRat>().scale(&value))
}

/// The potential used for `μ` and what certifies it.
#[derive(Debug, Clone)]
pub struct GammaChoice {
    pub policy: GammaPolicy,
    pub gamma: FloatForm,
    /// `‖i∂∂̄Γ − f*ω_{n−1}‖`, relative.
    pub reproduction_residual: f64,
}

/// `Γ_f` according to `policy`; errors when `f*ω_{n−1}` is not `∂∂̄`-exact.
pub fn gamma_for(f: &MapSpec, metric: &HermitianMetricSpec, policy: GammaPolicy) -> Result<GammaChoice> {
    let src = f.source();
    let pulled = f.pulled_omega();
    match policy {
        GammaPolicy::Neumann => {
            let p = neumann_gamma(src, metric, &pulled.to_float())?;
            Ok(GammaChoice {
                policy,
                gamma: p.gamma,
                reproduction_residual: p.reproduction_residual,
            })
        }
        GammaPolicy::AnySolution => {
            let x = x_membership(f)?;
            let g = x.potential.ok_or(Error::ClassObstruction { residual: 1.0 })?;
            Ok(GammaChoice {
                policy,
                gamma: g.to_float(),
                reproduction_residual: 0.0,
            })
        }
    }
}

/// `i ∫ Γ(ξ_1, …, η̄_{n−2}) dV` for a float potential.
pub fn pairing(model: &LieModel, gamma: &FloatForm, t: &MomentTuple) -> Result<Complex64> {
    let fields: Vec<InvVectorField<Complex64>> = t.ordered().iter().map(|v| v.to_float()).collect();
    let refs: Vec<&InvVectorField<Complex64>> = fields.iter().collect();
    let value = evaluate_inv(gamma, &refs)?.coefficient(0);
    let dv = model.volume_form::<Complex64>().scale(&value);
    Ok(Complex64::new(0.0, 1.0) * model.integrate(&dv)?)
}

#[derive(Debug, Clone)]
pub struct MuValue {
    pub value: Complex64,
    pub gamma: GammaChoice,
}

/// `μ(f)(ξ…, η̄…)`; refuses tuples outside the pairing domain.
pub fn mu_eval(f: &MapSpec, t: &MomentTuple, metric: &HermitianMetricSpec) -> Result<MuValue> {
    let src = f.source();
    let n = f.target().dim();
    if t.target_dim() != n {
        return Err(Error::TupleArity {
            got: t.len(),
            expected: n.saturating_sub(2),
        });
    }
    let pg = pg_membership(src, t)?;
    if !pg.member {
        return Err(Error::NotInPairingDomain {
            residual: if pg.lie_g { pg.residuals.max_abs() } else { f64::INFINITY },
        });
    }
    let gamma = gamma_for(f, metric, t.gamma_policy)?;
    Ok(MuValue {
        value: pairing(src, &gamma.gamma, t)?,
        gamma,
    })
}

/// Random `(p, q)`-form with small Gaussian-integer coefficients.
fn random_form(rng: &mut ChaCha8Rng, d: usize, p: usize, q: usize) -> ExactForm {
    let mut out = ExactForm::zero(d);
    for m in basis::basis(d, p, q) {
        let c = GaussRat::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        out = out.add(&ExactForm::monomial(d, m, c));
    }
    out
}

#[derive(Debug, Clone)]
pub struct WellDefinedness {
    pub trials: usize,
    /// Largest `|pairing(Γ + ∂β̄ + ∂̄β) − pairing(Γ)|` over sampled `β`.
    pub max_deviation: f64,
    /// Largest defect of the two reversal identities over sampled `β`; exact arithmetic, so 0 or not.
    pub reversal_defect: f64,
    pub pg_member: bool,
}

/// Samples gauge shifts `Γ ↦ Γ + ∂β̄ + ∂̄β` with `β` of bidegree `(n−2, n−3)`.
pub fn well_definedness_check(
    model: &LieModel,
    gamma: &FloatForm,
    t: &MomentTuple,
    trials: usize,
    seed: u64,
) -> Result<WellDefinedness> {
    let n = t.target_dim();
    let d = model.dim();
    let base = pairing(model, gamma, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    let mut reversal_defect: f64 = 0.0;
    for _ in 0..trials {
        if n < 3 {
            break;
        }
        let beta = random_form(&mut rng, d, n - 2, n - 3);
        let a = model.del(&beta.conj());
        let b = model.delbar(&beta);
        let shifted = gamma.add(&a.add(&b).to_float());
        max_deviation = max_deviation.max((pairing(model, &shifted, t)? - base).norm());
        for u in [&a, &b] {
            let (l, r) = reversal_sides_inv(model, u, t)?;
            reversal_defect = reversal_defect.max(l.sub(&r).max_abs());
        }
    }
    Ok(WellDefinedness {
        trials,
        max_deviation,
        reversal_defect,
        pg_member: pg_membership(model, t)?.member,
    })
}

/// Exact form of the Stokes step: `∫ (∂β̄ + ∂̄β)(ξ…, η̄…) dV` equals
/// `(−1)^{n−2} ∫ (β̄ ∧ ∂C + β ∧ ∂̄C)` for the contraction chain `C`.
pub fn stokes_sides(model: &LieModel, beta: &ExactForm, t: &MomentTuple) -> Result<(GaussRat, GaussRat)> {
    let shift = model.del(&beta.conj()).add(&model.delbar(beta));
    let lhs = pairing_integral(model, &shift, t)?;
    let c = contraction_chain(model, t)?;
    let rhs_form = beta.conj().wedge(&model.del(&c)).add(&beta.wedge(&model.delbar(&c)));
    let sign = GaussRat::from(if t.len() % 2 == 0 { 1 } else { -1 });
    Ok((lhs, model.integrate(&rhs_form)? * sign))
}

/// Finite-difference comparison at one step size.
#[derive(Debug, Clone)]
pub struct FdStep {
    pub h: f64,
    /// `i ∂²Γ_{s,t̄}/∂s∂t̄` by the central product stencil.
    pub mixed: FloatForm,
    /// Largest coefficient of `mixed − η̄⌟ξ⌟f*ω_{n−1}`, relative to the target's largest coefficient.
    pub error: f64,
    /// The same after applying `∂∂̄` to both sides.
    pub ddbar_error: f64,
}

#[derive(Debug, Clone)]
pub struct FdReport {
    pub target: FloatForm,
    pub steps: Vec<FdStep>,
    /// `log2(e(h)/e(h/2))` between consecutive steps (of the pointwise error).
    pub orders: Vec<f64>,
    /// Convergence orders of the stencil values against each other.
    pub self_orders: Vec<f64>,
    /// Largest relative finite-difference error after `∂∂̄`.
    pub max_ddbar_error: f64,
}

impl FdReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn final_error(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.error)
    }
}

fn rel_max(u: &FloatForm, scale: f64) -> f64 {
    let e = u.max_abs();
    if scale > 0.0 {
        e / scale
    } else {
        e
    }
}

/// Compares the mixed second difference of the Neumann potentials of the
/// precomposition family `f ∘ φ^ξ_s ∘ φ^η̄_t̄` with `η̄⌟ξ⌟f*ω_{n−1}`.
pub fn mixed_difference_check(
    f: &MapSpec,
    xi: &ExactField,
    eta: &ExactField,
    metric: &HermitianMetricSpec,
    steps: &[f64],
) -> Result<FdReport> {
    let src = f.source();
    let xi_f = xi.to_float();
    let etabar_f = eta.conj().to_float();
    let p0 = f.pulled_omega().to_float();
    let target = contract_inv(&etabar_f, &contract_inv(&xi_f, &p0)?)?;
    let scale = target.max_abs();
    let n = f.target().dim();
    let solver = NeumannSolver::new(src, metric, n - 1, n - 1);
    let gamma_at = |s: f64, t: f64| -> Result<FloatForm> {
        let moved = flow_pullback(src, &etabar_f, t, &flow_pullback(src, &xi_f, s, &p0)?)?;
        Ok(solver.solve(&moved)?.gamma)
    };
    let ddbar = |u: &FloatForm| src.del(&src.delbar(u));
    let target_dd = ddbar(&target);
    let dd_scale = target_dd.max_abs();
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    for &h in steps {
        let pp = gamma_at(h, h)?;
        let pm = gamma_at(h, -h)?;
        let mp = gamma_at(-h, h)?;
        let mm = gamma_at(-h, -h)?;
        let mixed = pp
            .sub(&pm)
            .sub(&mp)
            .add(&mm)
            .scale(&(i / (4.0 * h * h)));
        let error = rel_max(&mixed.sub(&target), scale);
        let ddbar_error = rel_max(&ddbar(&mixed).sub(&target_dd), dd_scale);
        out.push(FdStep {
            h,
            mixed,
            error,
            ddbar_error,
        });
    }
    let order = |a: f64, b: f64, ha: f64, hb: f64| (a / b).ln() / (ha / hb).ln();
    let orders = out
        .windows(2)
        .map(|w| order(w[0].error, w[1].error, w[0].h, w[1].h))
        .collect();
    let self_orders = out
        .windows(3)
        .map(|w| {
            let e1 = w[0].mixed.sub(&w[1].mixed).max_abs();
            let e2 = w[1].mixed.sub(&w[2].mixed).max_abs();
            order(e1, e2, w[0].h, w[1].h)
        })
        .collect();
    let max_ddbar_error = out.iter().map(|s| s.ddbar_error).fold(0.0, f64::max);
    Ok(FdReport {
        target,
        steps: out,
        orders,
        self_orders,
        max_ddbar_error,
    })
}

/// Step sizes of the finite-difference sweep.
pub const FD_STEPS: [f64; 3] = [1e-1, 5e-2, 2.5e-2];

/// Randomized exact check of the second-order Lie-derivative formula for `i∂∂̄f`.
pub fn second_order_check(seed: u64, trials: usize) -> SuiteReport {
    symalg::second_order_suite(seed, trials)
}

/// Zero potential of bidegree `(n−2, n−2)`, as an explicit float form.
pub fn zero_potential(model: &LieModel) -> FloatForm {
    InvForm::zero(model.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::catalog;
    use crate::moment::map_by_name;
    use num_traits::Zero;

    fn frames(d: usize, idx: &[usize]) -> Vec<ExactField> {
        idx.iter().map(|&i| InvVectorField::frame(d, i)).collect()
    }

    fn frames_bar(d: usize, idx: &[usize]) -> Vec<ExactField> {
        idx.iter().map(|&i| InvVectorField::frame_bar(d, i)).collect()
    }

    #[test]
    fn omega_examples() {
        let f = map_by_name("iwasawa-torus3").unwrap();
        let v = omega_eval(&f, &frames(3, &[0, 1]), &frames_bar(3, &[0, 1])).unwrap();
        assert!(!v.is_zero());
        let swapped = omega_eval(&f, &frames(3, &[1, 0]), &frames_bar(3, &[0, 1])).unwrap();
        assert_eq!(swapped, -v);
        let r1 = map_by_name("torus2-torus3-rank1").unwrap();
        let args = frames(2, &[0, 1]);
        assert!(omega_eval(&r1, &args, &frames_bar(2, &[0, 1])).unwrap().is_zero());
    }

    #[test]
    fn mu_examples() {
        let f = map_by_name("iwasawa-torus3").unwrap();
        let metric = HermitianMetricSpec::flat(f.source());
        let t = MomentTuple::frames(3, &[2], &[2]);
        let mu = mu_eval(&f, &t, &metric).unwrap();
        let g = &mu.gamma.gamma;
        let direct = Complex64::new(0.0, 1.0) * g.coefficient((1 << 2) | (1 << 5));
        // Γ(Z3, Z̄3) = Z̄3⌟Z3⌟Γ is the coefficient of φ3∧φ̄3
        assert!((mu.value - direct).norm() < 1e-12);
        assert!(mu.gamma.reproduction_residual < 1e-10);
        let mut any = t.clone();
        any.gamma_policy = GammaPolicy::AnySolution;
        let mu_any = mu_eval(&f, &any, &metric).unwrap();
        assert!((mu_any.value - mu.value).norm() < 1e-10);
        let scaled = MomentTuple::new(
            vec![t.xis[0].scale(&GaussRat::from_ints(2, 1))],
            t.etabars.clone(),
        )
        .unwrap();
        let mu2 = mu_eval(&f, &scaled, &metric).unwrap();
        assert!((mu2.value - Complex64::new(2.0, 1.0) * mu.value).norm() < 1e-10);
        let swapped = mu_eval(&f, &t.swapped(), &metric).unwrap();
        assert!((swapped.value - mu.value.conj()).norm() < 1e-10);
    }

    #[test]
    fn gauge_invariance() {
        let f = map_by_name("iwasawa-torus3").unwrap();
        let metric = HermitianMetricSpec::flat(f.source());
        let t = MomentTuple::frames(3, &[2], &[2]);
        let g = gamma_for(&f, &metric, GammaPolicy::Neumann).unwrap().gamma;
        let w = well_definedness_check(f.source(), &g, &t, 20, 1).unwrap();
        assert!(w.max_deviation < 1e-10 && w.reversal_defect == 0.0);
        let hm = catalog::heis_mixed();
        let broken = MomentTuple::frames(3, &[0], &[0]);
        let w = well_definedness_check(&hm, &zero_potential(&hm), &broken, 20, 1).unwrap();
        assert!(!w.pg_member && w.max_deviation > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for model in [catalog::iwasawa(), hm] {
            for t in [MomentTuple::frames(3, &[0], &[0]), MomentTuple::frames(3, &[1], &[2])] {
                let beta = random_form(&mut rng, 3, 1, 0);
                let (l, r) = stokes_sides(&model, &beta, &t).unwrap();
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn fd_trivial_cases() {
        let f = map_by_name("iwasawa-torus3").unwrap();
        let metric = HermitianMetricSpec::flat(f.source());
        let z3 = InvVectorField::frame(3, 2);
        let r = mixed_difference_check(&f, &z3, &z3, &metric, &FD_STEPS).unwrap();
        assert_eq!(r.target.max_abs(), 0.0);
        assert!(r.steps.iter().all(|s| s.error < 1e-10));
    }
}
