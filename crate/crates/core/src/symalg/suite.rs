//! Randomized exact checks of the Lie-derivative calculus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis;
use crate::scalar::GaussRat;

use super::form::{
    contract, dbar_field_contract, del, del_field_contract, delbar, dtot, evaluate, lie01, lie10,
    lie_bracket, lie_std, wedge, ChartForm, ChartVectorField,
};
use super::poly::Poly;

/// Whether a check is meant to hold or to exhibit a counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// A probe past the stated hypotheses; it succeeds when it finds a counterexample.
    Fails,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub anchor: String,
    pub expectation: Expectation,
    pub trials: usize,
    pub violations: usize,
    /// First violating instance, serialized.
    pub counterexample: Option<String>,
}

impl IdentityCheck {
    /// True when the observed behaviour matches the expectation.
    pub fn as_expected(&self) -> bool {
        match self.expectation {
            Expectation::Holds => self.violations == 0,
            Expectation::Fails => self.violations > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<IdentityCheck>,
}

impl SuiteReport {
    pub fn all_as_expected(&self) -> bool {
        self.checks.iter().all(IdentityCheck::as_expected)
    }
}

/// One sampled instance: both sides and a description of the inputs.
struct Instance {
    lhs: ChartForm,
    rhs: ChartForm,
    inputs: String,
}

/// Random chart data of bounded degree.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn dim(&mut self) -> usize {
        self.rng.gen_range(2..=4)
    }

    fn coefficient(&mut self) -> GaussRat {
        loop {
            let re = self.rng.gen_range(-3..=3);
            let im = self.rng.gen_range(-3..=3);
            if re != 0 || im != 0 {
                return GaussRat::from_ints(re, im);
            }
        }
    }

    /// Polynomial of total degree at most 2 in the allowed variables
    /// (`0..d` holomorphic, `d..2d` antiholomorphic).
    pub fn poly_in(&mut self, d: usize, vars: &[usize]) -> Poly {
        let nterms = self.rng.gen_range(1..=3);
        let mut p = Poly::zero(d);
        for _ in 0..nterms {
            let mut exps = vec![0u8; 2 * d];
            let deg = self.rng.gen_range(0..=2);
            for _ in 0..deg {
                if let Some(&v) = vars.choose(&mut self.rng) {
                    exps[v] += 1;
                }
            }
            p = p.add(&Poly::monomial(d, exps, self.coefficient()));
        }
        p
    }

    pub fn poly(&mut self, d: usize) -> Poly {
        let vars: Vec<usize> = (0..2 * d).collect();
        self.poly_in(d, &vars)
    }

    pub fn holo_poly(&mut self, d: usize) -> Poly {
        let vars: Vec<usize> = (0..d).collect();
        self.poly_in(d, &vars)
    }

    pub fn anti_poly(&mut self, d: usize) -> Poly {
        let vars: Vec<usize> = (d..2 * d).collect();
        self.poly_in(d, &vars)
    }

    /// Form of bidegree `(p, q)` with one or two basis terms.
    pub fn form(&mut self, d: usize, p: usize, q: usize) -> ChartForm {
        let masks = basis::basis(d, p, q);
        let mut u = ChartForm::zero(d);
        for _ in 0..self.rng.gen_range(1..=2) {
            let m = *masks.choose(&mut self.rng).expect("nonempty basis");
            u = u.add(&ChartForm::from_term(m, self.poly(d)));
        }
        u
    }

    pub fn bidegree(&mut self, d: usize) -> (usize, usize) {
        (self.rng.gen_range(0..=d.min(2)), self.rng.gen_range(0..=d.min(2)))
    }

    pub fn any_form(&mut self, d: usize) -> ChartForm {
        let (p, q) = self.bidegree(d);
        self.form(d, p, q)
    }

    /// (1,0) field; `holomorphic` restricts coefficients to `z` only.
    pub fn holo_field(&mut self, d: usize, holomorphic: bool) -> ChartVectorField {
        ChartVectorField::holo(self.components(d, holomorphic))
    }

    /// (0,1) field; `antiholomorphic` restricts coefficients to `z̄` only.
    pub fn anti_field(&mut self, d: usize, antiholomorphic: bool) -> ChartVectorField {
        ChartVectorField::anti(self.components(d, antiholomorphic).iter().map(Poly::conj).collect())
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Nonzero Gaussian integer with parts in `-3..=3`.
    pub fn scalar(&mut self) -> GaussRat {
        self.coefficient()
    }

    /// Holomorphic (1,0) field of zero divergence: a Hamiltonian rotation in
    /// one coordinate plane plus a constant.
    pub fn divergence_free_field(&mut self, d: usize) -> ChartVectorField {
        let i = self.rng.gen_range(0..d);
        let j = (i + self.rng.gen_range(1..d)) % d;
        let k = self.rng.gen_range(0..d);
        let h = self.holo_poly(d).mul(&Poly::z(d, k));
        let mut comps = vec![Poly::zero(d); d];
        comps[i] = h.dz(j);
        comps[j] = h.dz(i).neg();
        let c = self.rng.gen_range(0..d);
        comps[c] = comps[c].add(&Poly::constant(d, self.coefficient()));
        ChartVectorField::holo(comps)
    }

    fn components(&mut self, d: usize, holomorphic: bool) -> Vec<Poly> {
        let lead = self.rng.gen_range(0..d);
        (0..d)
            .map(|i| {
                if i == lead || self.rng.gen_bool(0.4) {
                    if holomorphic {
                        self.holo_poly(d)
                    } else {
                        self.poly(d)
                    }
                } else {
                    Poly::zero(d)
                }
            })
            .collect()
    }
}

/// The two conjugate halves of the calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// (1,0)-Lie derivative, paired with `∂`.
    Holo,
    /// (0,1)-Lie derivative, paired with `∂̄`.
    Anti,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Holo => "lie10",
            Side::Anti => "lie01",
        }
    }

    fn derivative_name(self) -> &'static str {
        match self {
            Side::Holo => "(1,0)-Lie derivative",
            Side::Anti => "(0,1)-Lie derivative",
        }
    }

    fn lie(self, v: &ChartVectorField, u: &ChartForm) -> ChartForm {
        match self {
            Side::Holo => lie10(v, u),
            Side::Anti => lie01(v, u),
        }
        .expect("sampled field has the right kind")
    }

    fn d_same(self, u: &ChartForm) -> ChartForm {
        match self {
            Side::Holo => del(u),
            Side::Anti => delbar(u),
        }
    }

    fn d_other(self, u: &ChartForm) -> ChartForm {
        match self {
            Side::Holo => delbar(u),
            Side::Anti => del(u),
        }
    }

    /// `(∂̄ξ)⌟u` resp. `(∂η̄)⌟u`.
    fn field_derivative_contract(self, v: &ChartVectorField, u: &ChartForm) -> ChartForm {
        match self {
            Side::Holo => dbar_field_contract(v, u),
            Side::Anti => del_field_contract(v, u),
        }
        .expect("same chart")
    }

    fn field(self, s: &mut Sampler, d: usize, holomorphic: bool) -> ChartVectorField {
        match self {
            Side::Holo => s.holo_field(d, holomorphic),
            Side::Anti => s.anti_field(d, holomorphic),
        }
    }

    fn opposite_field(self, s: &mut Sampler, d: usize) -> ChartVectorField {
        match self {
            Side::Holo => s.anti_field(d, false),
            Side::Anti => s.holo_field(d, false),
        }
    }

    /// Bidegree on which the function-linearity statement is made.
    fn linear_bidegree(self, d: usize, k: usize) -> (usize, usize) {
        let k = k.min(d);
        match self {
            Side::Holo => (0, k),
            Side::Anti => (k, 0),
        }
    }

    fn probe_bidegree(self) -> (usize, usize) {
        match self {
            Side::Holo => (1, 0),
            Side::Anti => (0, 1),
        }
    }
}

fn ct(v: &ChartVectorField, u: &ChartForm) -> ChartForm {
    contract(v, u).expect("same chart")
}

fn br(a: &ChartVectorField, b: &ChartVectorField) -> ChartVectorField {
    lie_bracket(a, b).expect("same chart")
}

fn wd(u: &ChartForm, v: &ChartForm) -> ChartForm {
    wedge(u, v).expect("same chart")
}

struct Runner {
    seed: u64,
    trials: usize,
    checks: Vec<IdentityCheck>,
}

impl Runner {
    fn run(
        &mut self,
        name: &str,
        anchor: &str,
        expectation: Expectation,
        mut sample: impl FnMut(&mut Sampler) -> Instance,
    ) {
        let stream = self.checks.len() as u64;
        let mut s = Sampler::new(self.seed, stream);
        let mut violations = 0;
        let mut counterexample = None;
        for _ in 0..self.trials {
            let inst = sample(&mut s);
            let diff = inst.lhs.sub(&inst.rhs);
            if !diff.is_zero() {
                violations += 1;
                counterexample.get_or_insert_with(|| {
                    format!("{}; lhs - rhs = {}", inst.inputs, diff)
                });
            }
        }
        self.checks.push(IdentityCheck {
            name: name.to_string(),
            anchor: anchor.to_string(),
            expectation,
            trials: self.trials,
            violations,
            counterexample,
        });
    }
}

fn lie_commutation(r: &mut Runner, side: Side) {
    let tag = side.tag();
    let what = side.derivative_name();
    let holds = Expectation::Holds;

    r.run(
        &format!("{tag}.standard-lie-relation"),
        &format!("{what}: relation to the standard Lie derivative"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, false);
            let u = s.any_form(d);
            Instance {
                lhs: lie_std(&v, &u).expect("same chart"),
                rhs: side.lie(&v, &u).add(&side.field_derivative_contract(&v, &u)),
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.standard-lie-relation-holomorphic"),
        &format!("{what}: equals the standard Lie derivative for holomorphic fields"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, true);
            let u = s.any_form(d);
            Instance {
                lhs: lie_std(&v, &u).expect("same chart"),
                rhs: side.lie(&v, &u),
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.on-functions"),
        &format!("{what}: acts on functions as the directional derivative"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, false);
            let f = s.poly(d);
            Instance {
                lhs: side.lie(&v, &ChartForm::function(f.clone())),
                rhs: ChartForm::function(v.apply(&f)),
                inputs: format!("v = {v}, f = {f}"),
            }
        },
    );

    r.run(
        &format!("{tag}.commutes-with-own-differential"),
        &format!("{what}: graded commutator with its own differential vanishes"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, false);
            let u = s.any_form(d);
            Instance {
                lhs: side.lie(&v, &side.d_same(&u)),
                rhs: side.d_same(&side.lie(&v, &u)),
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.commutator-with-other-differential"),
        &format!("{what}: commutator with the conjugate differential"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, false);
            let u = s.any_form(d);
            let lhs = side.lie(&v, &side.d_other(&u)).sub(&side.d_other(&side.lie(&v, &u)));
            let rhs = side
                .d_same(&side.field_derivative_contract(&v, &u))
                .sub(&side.field_derivative_contract(&v, &side.d_same(&u)));
            Instance {
                lhs,
                rhs,
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.commutator-with-other-differential-holomorphic"),
        &format!("{what}: commutes with the conjugate differential for holomorphic fields"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, true);
            let u = s.any_form(d);
            Instance {
                lhs: side.lie(&v, &side.d_other(&u)),
                rhs: side.d_other(&side.lie(&v, &u)),
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.contraction-commutator"),
        &format!("{what}: commutator with a contraction is contraction by the bracket"),
        holds,
        |s| {
            let d = s.dim();
            let a = side.field(s, d, false);
            let b = side.field(s, d, false);
            let u = s.any_form(d);
            Instance {
                lhs: ct(&a, &side.lie(&b, &u)).sub(&side.lie(&b, &ct(&a, &u))),
                rhs: ct(&br(&a, &b), &u),
                inputs: format!("a = {a}, b = {b}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.contraction-commutator-swapped"),
        &format!("{what}: commutator with a contraction, second form"),
        holds,
        |s| {
            let d = s.dim();
            let a = side.field(s, d, false);
            let b = side.field(s, d, false);
            let u = s.any_form(d);
            Instance {
                lhs: side.lie(&a, &ct(&b, &u)).sub(&ct(&b, &side.lie(&a, &u))),
                rhs: ct(&br(&a, &b), &u),
                inputs: format!("a = {a}, b = {b}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.bracket-homomorphism"),
        &format!("{what}: commutator of two derivatives is the derivative along the bracket"),
        holds,
        |s| {
            let d = s.dim();
            let a = side.field(s, d, false);
            let b = side.field(s, d, false);
            let u = s.any_form(d);
            Instance {
                lhs: side
                    .lie(&a, &side.lie(&b, &u))
                    .sub(&side.lie(&b, &side.lie(&a, &u))),
                rhs: side.lie(&br(&a, &b), &u),
                inputs: format!("a = {a}, b = {b}, u = {u}"),
            }
        },
    );

    r.run(
        &format!("{tag}.leibniz"),
        &format!("{what}: Leibniz rule for the wedge product"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, false);
            let u = s.any_form(d);
            let w = s.any_form(d);
            Instance {
                lhs: side.lie(&v, &wd(&u, &w)),
                rhs: wd(&side.lie(&v, &u), &w).add(&wd(&u, &side.lie(&v, &w))),
                inputs: format!("v = {v}, u = {u}, w = {w}"),
            }
        },
    );

    r.run(
        &format!("{tag}.mixed-contraction"),
        &format!("{what}: contraction by a conjugate-type field, holomorphic case"),
        holds,
        |s| {
            let d = s.dim();
            let v = side.field(s, d, true);
            let c = side.opposite_field(s, d);
            let a = s.any_form(d);
            Instance {
                lhs: side.lie(&v, &ct(&c, &a)),
                rhs: ct(&c, &side.lie(&v, &a)).add(&ct(&br(&v, &c), &a)),
                inputs: format!("v = {v}, c = {c}, alpha = {a}"),
            }
        },
    );

    let linear = |side: Side, bideg: Option<(usize, usize)>| {
        move |s: &mut Sampler| {
            let d = s.dim();
            let a = side.field(s, d, false);
            let b = side.field(s, d, false);
            let f = s.poly(d);
            let g = s.poly(d);
            let (p, q) = bideg.unwrap_or_else(|| {
                let k = 1 + (s.rng.gen_range(0..2));
                side.linear_bidegree(d, k)
            });
            let alpha = s.form(d, p, q);
            let comb = a.mul_function(&f).add(&b.mul_function(&g));
            Instance {
                lhs: side.lie(&comb, &alpha),
                rhs: side
                    .lie(&a, &alpha)
                    .mul_function(&f)
                    .add(&side.lie(&b, &alpha).mul_function(&g)),
                inputs: format!("a = {a}, b = {b}, f = {f}, g = {g}, alpha = {alpha}"),
            }
        }
    };

    r.run(
        &format!("{tag}.function-linearity"),
        &format!("{what}: linear over functions on forms of pure conjugate type"),
        holds,
        linear(side, None),
    );

    r.run(
        &format!("{tag}.function-linearity-outside-hypothesis"),
        &format!("{what}: linearity over functions fails on forms of the other type"),
        Expectation::Fails,
        linear(side, Some(side.probe_bidegree())),
    );
}

fn cartan_formula(r: &mut Runner) {
    for k in 0..=2usize {
        r.run(
            &format!("cartan.del-intrinsic-degree-{k}"),
            &format!("intrinsic formula for del on ({k},0)-forms"),
            Expectation::Holds,
            |s| {
                let d = s.dim().max(k);
                let alpha = s.form(d, k, 0);
                let fields: Vec<ChartVectorField> =
                    (0..=k).map(|_| s.holo_field(d, false)).collect();
                let eval = |form: &ChartForm, args: &[&ChartVectorField]| {
                    evaluate(form, args).expect("same chart")
                };
                let all: Vec<&ChartVectorField> = fields.iter().collect();
                let lhs = eval(&del(&alpha), &all);

                let mut rhs = ChartForm::zero(d);
                for j in 0..=k {
                    let rest: Vec<&ChartVectorField> =
                        all.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| *v).collect();
                    let val = eval(&alpha, &rest);
                    let term = ChartForm::function(fields[j].apply(&val.coefficient(0)));
                    rhs = if j % 2 == 0 { rhs.add(&term) } else { rhs.sub(&term) };
                }
                for j in 0..=k {
                    for l in j + 1..=k {
                        let bracket = br(&fields[j], &fields[l]);
                        let mut args: Vec<&ChartVectorField> = vec![&bracket];
                        args.extend(
                            all.iter()
                                .enumerate()
                                .filter(|&(i, _)| i != j && i != l)
                                .map(|(_, v)| *v),
                        );
                        let term = eval(&alpha, &args);
                        rhs = if (j + l) % 2 == 0 { rhs.add(&term) } else { rhs.sub(&term) };
                    }
                }
                Instance {
                    lhs,
                    rhs,
                    inputs: format!("alpha = {alpha}, fields = {fields:?}"),
                }
            },
        );
    }
}

fn conjugation_symmetry(r: &mut Runner) {
    r.run(
        "lie01.conjugate-of-lie10",
        "(0,1)-Lie derivative: obtained from the (1,0) one by conjugation",
        Expectation::Holds,
        |s| {
            let d = s.dim();
            let v = s.holo_field(d, false);
            let u = s.any_form(d);
            Instance {
                lhs: lie10(&v, &u).expect("holo field").conj(),
                rhs: lie01(&v.conj(), &u.conj()).expect("anti field"),
                inputs: format!("v = {v}, u = {u}"),
            }
        },
    );
}

/// `(i∂∂̄f)(v, w̄)` against `i L_v L_w̄ f` (`inner_first = false`) or
/// `i L_w̄ L_v f` (`inner_first = true`).
fn hessian_instance(
    s: &mut Sampler,
    v_holomorphic: bool,
    w_holomorphic: bool,
    anti_first: bool,
) -> Instance {
    let d = s.dim();
    let f = s.poly(d);
    let v = s.holo_field(d, v_holomorphic);
    let w = s.holo_field(d, w_holomorphic);
    let wbar = w.conj();
    let i = GaussRat::i();
    let hess = del(&delbar(&ChartForm::function(f.clone()))).scale(&i);
    let lhs = evaluate(&hess, &[&v, &wbar]).expect("same chart");
    let ff = ChartForm::function(f.clone());
    let rhs = if anti_first {
        lie01(&wbar, &lie10(&v, &ff).expect("holo")).expect("anti")
    } else {
        lie10(&v, &lie01(&wbar, &ff).expect("anti")).expect("holo")
    }
    .scale(&i);
    Instance {
        lhs,
        rhs,
        inputs: format!("f = {f}, v = {v}, w = {w}"),
    }
}

/// Instance with `w = z̄_1 ∂/∂z_1 + …` and `f` depending on `z̄_1`, where the
/// extra term `i Σ v_l (∂_l w̄_r) f_r̄` cannot vanish identically.
fn non_holomorphic_hessian_instance(s: &mut Sampler) -> Instance {
    let d = s.dim();
    let f = s.poly(d).add(&Poly::zbar(d, 0)).add(&Poly::z(d, 0).mul(&Poly::zbar(d, 0)));
    let v = ChartVectorField::coordinate(d, 0);
    let w = ChartVectorField::coordinate(d, 0).mul_function(&Poly::zbar(d, 0));
    let wbar = w.conj();
    let i = GaussRat::i();
    let ff = ChartForm::function(f.clone());
    let hess = del(&delbar(&ff)).scale(&i);
    Instance {
        lhs: evaluate(&hess, &[&v, &wbar]).expect("same chart"),
        rhs: lie10(&v, &lie01(&wbar, &ff).expect("anti"))
            .expect("holo")
            .scale(&i),
        inputs: format!("f = {f}, v = {v}, w = {w}"),
    }
}

fn hessian_checks(r: &mut Runner) {
    r.run(
        "hessian.coordinate-frames",
        "coordinate identity for the complex Hessian on frame fields",
        Expectation::Holds,
        |s| {
            let d = s.dim();
            let f = s.poly(d);
            let l = s.rng.gen_range(0..d);
            let k = s.rng.gen_range(0..d);
            let v = ChartVectorField::coordinate(d, l);
            let wbar = ChartVectorField::coordinate_bar(d, k);
            let i = GaussRat::i();
            let ff = ChartForm::function(f.clone());
            let hess = del(&delbar(&ff)).scale(&i);
            Instance {
                lhs: ct(&wbar, &ct(&v, &hess)),
                rhs: lie10(&v, &lie01(&wbar, &ff).expect("anti"))
                    .expect("holo")
                    .scale(&i),
                inputs: format!("f = {f}, l = {}, r = {}", l + 1, k + 1),
            }
        },
    );
    r.run(
        "hessian.lie-product-holomorphic-second",
        "complex Hessian as an iterated Lie derivative, holomorphic second field",
        Expectation::Holds,
        |s| hessian_instance(s, false, true, false),
    );
    r.run(
        "hessian.lie-product-holomorphic-first",
        "complex Hessian as an iterated Lie derivative, holomorphic first field",
        Expectation::Holds,
        |s| hessian_instance(s, true, false, true),
    );
    r.run(
        "hessian.lie-product-outside-hypothesis",
        "complex Hessian as an iterated Lie derivative fails for a non-holomorphic second field",
        Expectation::Fails,
        |s| {
            let mut inst = hessian_instance(s, false, false, false);
            if inst.lhs == inst.rhs {
                inst = non_holomorphic_hessian_instance(s);
            }
            inst
        },
    );
}

/// Complex-Hessian identities for functions and their non-holomorphic probe.
pub fn second_order_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut r = Runner {
        seed,
        trials,
        checks: Vec::new(),
    };
    hessian_checks(&mut r);
    SuiteReport {
        seed,
        trials,
        checks: r.checks,
    }
}

/// Every Lie-derivative identity over `trials` random instances, exact arithmetic.
pub fn identity_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut r = Runner {
        seed,
        trials,
        checks: Vec::new(),
    };
    lie_commutation(&mut r, Side::Holo);
    lie_commutation(&mut r, Side::Anti);
    cartan_formula(&mut r);
    conjugation_symmetry(&mut r);
    let mut report = SuiteReport {
        seed,
        trials,
        checks: r.checks,
    };
    report.checks.extend(second_order_suite(seed, trials).checks);
    report
}

/// Differential identities `d² = 0`, `∂² = 0`, `∂̄² = 0`, `∂∂̄ = −∂̄∂` on one form.
pub fn differential_relations_hold(u: &ChartForm) -> bool {
    dtot(&dtot(u)).is_zero()
        && del(&del(u)).is_zero()
        && delbar(&delbar(u)).is_zero()
        && del(&delbar(u)).add(&delbar(&del(u))).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_behaves_as_expected() {
        let report = identity_suite(7, 6);
        for c in &report.checks {
            assert!(c.as_expected(), "{c:?}");
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut a = Sampler::new(3, 1);
        let mut b = Sampler::new(3, 1);
        assert_eq!(a.any_form(3), b.any_form(3));
    }
}
