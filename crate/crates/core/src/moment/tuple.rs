//! Field tuples `(ξ_1, …, ξ_{n−2}, η̄_1, …, η̄_{n−2})`, the bracket-contraction
//! sums that cut out the pairing domain, and the contraction identities behind
//! the well-definedness argument.

use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::invariant::{
    bracket_inv, evaluate_inv, is_holomorphic_field, lie10_inv, nested_contract,
    ExactForm, InvVectorField, LieModel,
};
use crate::scalar::GaussRat;
use crate::symalg::{self, ChartForm, ChartVectorField, Poly};

use super::target::{format_pairs, parse_pairs};

pub type ExactField = InvVectorField<GaussRat>;

/// How the potential `Γ_f` is chosen when evaluating the moment map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaPolicy {
    /// Any real solution of `i∂∂̄Γ = f*ω_{n−1}`; meaningful when the Aeppli group vanishes.
    AnySolution,
    /// The minimal representative `iΓ = (∂∂̄)* Δ_BC^{-1} f*ω_{n−1}`.
    #[default]
    Neumann,
}

impl GammaPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            GammaPolicy::AnySolution => "any-solution",
            GammaPolicy::Neumann => "neumann",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "any-solution" => Some(GammaPolicy::AnySolution),
            "neumann" => Some(GammaPolicy::Neumann),
            _ => None,
        }
    }
}

/// `n − 2` holomorphic-type fields and `n − 2` antiholomorphic-type fields on `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTuple {
    pub xis: Vec<ExactField>,
    pub etabars: Vec<ExactField>,
    pub gamma_policy: GammaPolicy,
}

impl MomentTuple {
    pub fn new(xis: Vec<ExactField>, etabars: Vec<ExactField>) -> Result<Self> {
        if xis.len() != etabars.len() {
            return Err(Error::TupleArity {
                got: etabars.len(),
                expected: xis.len(),
            });
        }
        if xis.iter().any(ExactField::has_anti) || etabars.iter().any(ExactField::has_holo) {
            return Err(Error::KindMismatch {
                expected: "(1,0) fields ξ and (0,1) fields η̄",
            });
        }
        Ok(MomentTuple {
            xis,
            etabars,
            gamma_policy: GammaPolicy::default(),
        })
    }

    /// `(Z_a, Z̄_b)` frame pairs, 0-based.
    pub fn frames(dim: usize, xis: &[usize], etabars: &[usize]) -> Self {
        MomentTuple::new(
            xis.iter().map(|&i| InvVectorField::frame(dim, i)).collect(),
            etabars.iter().map(|&i| InvVectorField::frame_bar(dim, i)).collect(),
        )
        .expect("frame tuple is well typed")
    }

    /// Number of fields of each type, `n − 2`.
    pub fn len(&self) -> usize {
        self.xis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xis.is_empty()
    }

    /// `n` implied by the tuple length.
    pub fn target_dim(&self) -> usize {
        self.xis.len() + 2
    }

    /// All fields in evaluation order `ξ_1, …, ξ_{n−2}, η̄_1, …, η̄_{n−2}`.
    pub fn ordered(&self) -> Vec<&ExactField> {
        self.xis.iter().chain(&self.etabars).collect()
    }

    /// Holomorphic and antiholomorphic roles exchanged: `(η_i, ξ̄_i)`.
    pub fn swapped(&self) -> Self {
        MomentTuple {
            xis: self.etabars.iter().map(ExactField::conj).collect(),
            etabars: self.xis.iter().map(ExactField::conj).collect(),
            gamma_policy: self.gamma_policy,
        }
    }

    /// Parses
    ///
    /// ```text
    /// xi 1 0  0 0  0 0         # holomorphic coefficients on Z_1..Z_d
    /// etabar 0 0  1 0  0 0     # coefficients on Z̄_1..Z̄_d
    /// gamma_policy neumann
    /// ```
    pub fn from_text(text: &str) -> std::result::Result<Self, ParseError> {
        let mut xis = Vec::new();
        let mut etabars = Vec::new();
        let mut policy = None;
        let mut dim = None;
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                key @ ("xi" | "etabar") => {
                    let c = parse_pairs(&toks[1..]).map_err(|e| e.with_line(ln))?;
                    if c.is_empty() || c.len() > crate::basis::MAX_DIM {
                        return Err(ParseError::at(ln, "field needs 1..=12 coefficients"));
                    }
                    if *dim.get_or_insert(c.len()) != c.len() {
                        return Err(ParseError::at(ln, "fields disagree on the dimension"));
                    }
                    if key == "xi" {
                        xis.push(InvVectorField::holo(c));
                    } else {
                        etabars.push(InvVectorField::anti(c));
                    }
                }
                "gamma_policy" => {
                    let [_, p] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `gamma_policy <policy>`"));
                    };
                    let p = GammaPolicy::parse(p).ok_or_else(|| {
                        ParseError::at(ln, format!("unknown policy `{p}` (any-solution | neumann)"))
                    })?;
                    if policy.replace(p).is_some() {
                        return Err(ParseError::at(ln, "duplicate `gamma_policy`"));
                    }
                }
                other => return Err(ParseError::at(ln, format!("unknown key `{other}`"))),
            }
        }
        let mut t = MomentTuple::new(xis, etabars).map_err(|e| ParseError::msg(e.to_string()))?;
        t.gamma_policy = policy.unwrap_or_default();
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.xis {
            let _ = writeln!(s, "xi {}", format_pairs(x.holo_coeffs()));
        }
        for e in &self.etabars {
            let _ = writeln!(s, "etabar {}", format_pairs(e.anti_coeffs()));
        }
        let _ = writeln!(s, "gamma_policy {}", self.gamma_policy.as_str());
        s
    }
}

/// `∂̄ξ = 0` and `L^{1,0}_ξ dV = 0`.
pub fn lie_g_membership(model: &LieModel, xi: &ExactField) -> Result<bool> {
    if !is_holomorphic_field(model, xi)? {
        return Ok(false);
    }
    Ok(lie10_inv(model, xi, &model.volume_form())?.is_zero())
}

/// Chart analogue on `C^d` with the flat volume form.
pub fn lie_g_membership_chart(xi: &ChartVectorField) -> Result<bool> {
    if !xi.is_holomorphic() {
        return Ok(false);
    }
    Ok(symalg::lie10(xi, &chart_volume(xi.dim()))?.is_zero())
}

/// `i^{d²} dz_1∧…∧dz_d∧dz̄_1∧…∧dz̄_d`.
pub fn chart_volume(d: usize) -> ChartForm {
    let top = (1u32 << (2 * d)) - 1;
    ChartForm::from_term(top, Poly::constant(d, GaussRat::i_pow((d * d) as i64)))
}

/// Position in a tuple: `Lead(i)` is the `i`-th field (0-based) of the family whose
/// brackets lead the sum, `Other(i)` of the other family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Lead(usize),
    Other(usize),
}

/// `sign · [a, b] ⌟ c_1 ⌟ … ⌟ c_k ⌟ dV`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumTerm {
    pub sign: i32,
    pub bracket: (Slot, Slot),
    pub chain: Vec<Slot>,
}

/// The double sums over `l = 2..n−1`: brackets within the lead family with
/// `r < n − l`, then brackets of a lead field with an other-family field.
/// Chains list the remaining lead fields in descending order followed by the
/// remaining other fields in descending order.
pub fn closure_sum_terms(n: usize) -> Vec<SumTerm> {
    let k = n.saturating_sub(2);
    let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut out = Vec::new();
    let chain = |skip_lead: &[usize], skip_other: &[usize]| -> Vec<Slot> {
        let lead = (1..=k).rev().filter(|i| !skip_lead.contains(i)).map(|i| Slot::Lead(i - 1));
        let other = (1..=k).rev().filter(|i| !skip_other.contains(i)).map(|i| Slot::Other(i - 1));
        lead.chain(other).collect()
    };
    for l in 2..n {
        for r in 1..n - l {
            out.push(SumTerm {
                sign: sign((n + 1 - l - r) as i64),
                bracket: (Slot::Lead(n - l - 1), Slot::Lead(r - 1)),
                chain: chain(&[n - l, r], &[]),
            });
        }
    }
    for l in 2..n {
        for r in 1..=k {
            out.push(SumTerm {
                sign: sign((l + r + 1) as i64),
                bracket: (Slot::Lead(n - l - 1), Slot::Other(r - 1)),
                chain: chain(&[n - l], &[r]),
            });
        }
    }
    out
}

fn check_arity(t: &MomentTuple, n: usize) -> Result<()> {
    if t.len() + 2 != n || t.etabars.len() != t.len() {
        return Err(Error::TupleArity {
            got: t.len(),
            expected: n.saturating_sub(2),
        });
    }
    Ok(())
}

fn closure_sum_inv(
    model: &LieModel,
    lead: &[ExactField],
    other: &[ExactField],
    n: usize,
) -> Result<ExactForm> {
    let dv = model.volume_form::<GaussRat>();
    let pick = |s: Slot| match s {
        Slot::Lead(i) => &lead[i],
        Slot::Other(i) => &other[i],
    };
    let mut out = ExactForm::zero(model.dim());
    for term in closure_sum_terms(n) {
        let br = bracket_inv(model, pick(term.bracket.0), pick(term.bracket.1))?;
        let mut fields = vec![&br];
        fields.extend(term.chain.iter().map(|&s| pick(s)));
        let c = nested_contract(&fields, &dv)?;
        out = out.add(&c.scale(&GaussRat::from(term.sign as i64)));
    }
    Ok(out)
}

fn closure_sum_chart(
    lead: &[ChartVectorField],
    other: &[ChartVectorField],
    n: usize,
) -> Result<ChartForm> {
    let d = lead.first().or(other.first()).map_or(0, ChartVectorField::dim);
    let dv = chart_volume(d);
    let pick = |s: Slot| match s {
        Slot::Lead(i) => &lead[i],
        Slot::Other(i) => &other[i],
    };
    let mut out = ChartForm::zero(d);
    for term in closure_sum_terms(n) {
        let br = symalg::lie_bracket(pick(term.bracket.0), pick(term.bracket.1))?;
        let mut fields = vec![&br];
        fields.extend(term.chain.iter().map(|&s| pick(s)));
        let c = nested_contract_chart(&fields, &dv)?;
        out = out.add(&c.scale(&GaussRat::from(term.sign as i64)));
    }
    Ok(out)
}

/// `v_1 ⌟ (v_2 ⌟ ( … (v_k ⌟ u)))` on the chart.
pub fn nested_contract_chart(fields: &[&ChartVectorField], u: &ChartForm) -> Result<ChartForm> {
    let mut acc = u.clone();
    for v in fields.iter().rev() {
        acc = symalg::contract(v, &acc)?;
    }
    Ok(acc)
}

/// The two residual forms of the pairing-domain conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct PgResiduals {
    /// Brackets led by the `η̄` family; by the `∂̄` formula this is `∂̄` of the chain.
    pub delbar_side: ExactForm,
    /// Brackets led by the `ξ` family; by the `∂` formula this is `∂` of the chain.
    pub del_side: ExactForm,
}

impl PgResiduals {
    pub fn is_zero(&self) -> bool {
        self.delbar_side.is_zero() && self.del_side.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.delbar_side.max_abs().max(self.del_side.max_abs())
    }
}

pub fn pg_residuals(model: &LieModel, t: &MomentTuple) -> Result<PgResiduals> {
    let n = t.target_dim();
    check_arity(t, n)?;
    Ok(PgResiduals {
        delbar_side: closure_sum_inv(model, &t.etabars, &t.xis, n)?,
        del_side: closure_sum_inv(model, &t.xis, &t.etabars, n)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgMembership {
    pub member: bool,
    /// Every `ξ_i` and every `η_i` lies in the Lie algebra of volume-preserving biholomorphisms.
    pub lie_g: bool,
    pub residuals: PgResiduals,
    /// Membership of the swapped tuple `(η, ξ̄)`.
    pub swapped_member: bool,
}

pub fn pg_membership(model: &LieModel, t: &MomentTuple) -> Result<PgMembership> {
    let mut lie_g = true;
    for f in t.xis.iter().chain(t.etabars.iter().map(ExactField::conj).collect::<Vec<_>>().iter()) {
        lie_g &= lie_g_membership(model, f)?;
    }
    let residuals = pg_residuals(model, t)?;
    let swapped = pg_residuals(model, &t.swapped())?;
    Ok(PgMembership {
        member: lie_g && residuals.is_zero(),
        lie_g,
        residuals,
        swapped_member: lie_g && swapped.is_zero(),
    })
}

/// `ξ_1 ⌟ … ⌟ ξ_{n−2} ⌟ η̄_1 ⌟ … ⌟ η̄_{n−2} ⌟ dV`.
pub fn contraction_chain(model: &LieModel, t: &MomentTuple) -> Result<ExactForm> {
    nested_contract(&t.ordered(), &model.volume_form())
}

/// Both sides of the `∂` and `∂̄` formulas for the iterated contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct DelFormulaReport {
    pub del_direct: ExactForm,
    pub del_sum: ExactForm,
    pub delbar_direct: ExactForm,
    pub delbar_sum: ExactForm,
}

impl DelFormulaReport {
    pub fn holds(&self) -> bool {
        self.del_direct == self.del_sum && self.delbar_direct == self.delbar_sum
    }

    pub fn residual(&self) -> f64 {
        self.del_direct
            .sub(&self.del_sum)
            .max_abs()
            .max(self.delbar_direct.sub(&self.delbar_sum).max_abs())
    }
}

pub fn claim_del_formula(model: &LieModel, t: &MomentTuple) -> Result<DelFormulaReport> {
    let chain = contraction_chain(model, t)?;
    let r = pg_residuals(model, t)?;
    Ok(DelFormulaReport {
        del_direct: model.del(&chain),
        del_sum: r.del_side,
        delbar_direct: model.delbar(&chain),
        delbar_sum: r.delbar_side,
    })
}

/// Chart fields `(ξ, η̄)` for the chart versions of the identities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartTuple {
    pub xis: Vec<ChartVectorField>,
    pub etabars: Vec<ChartVectorField>,
}

impl ChartTuple {
    pub fn ordered(&self) -> Vec<&ChartVectorField> {
        self.xis.iter().chain(&self.etabars).collect()
    }

    pub fn dim(&self) -> usize {
        self.xis.first().map_or(0, ChartVectorField::dim)
    }
}

/// `(direct ∂, sum)` and `(direct ∂̄, sum)` on the chart.
pub fn claim_del_formula_chart(t: &ChartTuple) -> Result<[(ChartForm, ChartForm); 2]> {
    let n = t.xis.len() + 2;
    let chain = nested_contract_chart(&t.ordered(), &chart_volume(t.dim()))?;
    Ok([
        (symalg::del(&chain), closure_sum_chart(&t.xis, &t.etabars, n)?),
        (symalg::delbar(&chain), closure_sum_chart(&t.etabars, &t.xis, n)?),
    ])
}

/// `(u(ξ…, η̄…) dV, (−1)^{n−2} u ∧ (ξ_1⌟…⌟η̄_{n−2}⌟dV))` on the invariant complex.
pub fn reversal_sides_inv(
    model: &LieModel,
    u: &ExactForm,
    t: &MomentTuple,
) -> Result<(ExactForm, ExactForm)> {
    let dv = model.volume_form::<GaussRat>();
    let value = evaluate_inv(u, &t.ordered())?.coefficient(0);
    let lhs = dv.scale(&value);
    let sign = GaussRat::from(if t.len() % 2 == 0 { 1 } else { -1 });
    let rhs = u.wedge(&contraction_chain(model, t)?).scale(&sign);
    Ok((lhs, rhs))
}

/// Chart version of [`reversal_sides_inv`].
pub fn reversal_sides_chart(u: &ChartForm, t: &ChartTuple) -> Result<(ChartForm, ChartForm)> {
    let d = t.dim();
    let dv = chart_volume(d);
    let value = symalg::evaluate(u, &t.ordered())?.coefficient(0);
    let lhs = dv.mul_function(&value);
    let sign = GaussRat::from(if t.xis.len() % 2 == 0 { 1 } else { -1 });
    let chain = nested_contract_chart(&t.ordered(), &dv)?;
    let rhs = symalg::wedge(u, &chain)?.scale(&sign);
    Ok((lhs, rhs))
}

/// `∫ u(ξ…, η̄…) dV`, exact.
pub fn pairing_integral(model: &LieModel, u: &ExactForm, t: &MomentTuple) -> Result<GaussRat> {
    let value = evaluate_inv(u, &t.ordered())?.coefficient(0);
    model.integrate(&model.volume_form::<GaussRat>().scale(&value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::catalog;

    #[test]
    fn term_counts() {
        // n = 3: the single mixed term [ξ_1, η̄_1] ⌟ dV with sign +1
        let t3 = closure_sum_terms(3);
        assert_eq!(t3.len(), 1);
        assert_eq!(t3[0].sign, 1);
        assert_eq!(t3[0].bracket, (Slot::Lead(0), Slot::Other(0)));
        assert!(t3[0].chain.is_empty());
        // n = 4: one pure term and four mixed ones
        let t4 = closure_sum_terms(4);
        assert_eq!(t4.len(), 5);
        assert_eq!(t4[0].bracket, (Slot::Lead(1), Slot::Lead(0)));
        assert_eq!(t4[0].chain, vec![Slot::Other(1), Slot::Other(0)]);
    }

    #[test]
    fn lie_algebra_membership() {
        let t = catalog::torus(3);
        let iw = catalog::iwasawa();
        for i in 0..3 {
            assert!(lie_g_membership(&t, &InvVectorField::frame(3, i)).unwrap());
            assert!(lie_g_membership(&iw, &InvVectorField::frame(3, i)).unwrap());
        }
        let hm = catalog::heis_mixed();
        assert!(!lie_g_membership(&hm, &InvVectorField::frame(3, 0)).unwrap());
        // z_1 ∂/∂z_1 has divergence 1
        let v = ChartVectorField::holo(vec![Poly::z(2, 0), Poly::zero(2)]);
        assert!(!lie_g_membership_chart(&v).unwrap());
        let rot = ChartVectorField::holo(vec![Poly::z(2, 1), Poly::z(2, 0).neg()]);
        assert!(lie_g_membership_chart(&rot).unwrap());
    }

    #[test]
    fn pairing_domain_examples() {
        let iw = catalog::iwasawa();
        let m = pg_membership(&iw, &MomentTuple::frames(3, &[0], &[1])).unwrap();
        assert!(m.member && m.swapped_member);
        let t = catalog::torus(3);
        for a in 0..3 {
            for b in 0..3 {
                assert!(pg_membership(&t, &MomentTuple::frames(3, &[a], &[b])).unwrap().member);
            }
        }
        // n = 4 on the Iwasawa source: [Z_2, Z_1] = −Z_3 survives
        let m = pg_membership(&iw, &MomentTuple::frames(3, &[0, 1], &[0, 1])).unwrap();
        assert!(m.lie_g && !m.residuals.del_side.is_zero() && !m.member);
        let bad = MomentTuple::frames(3, &[0], &[0]);
        assert!(matches!(
            pg_residuals(&iw, &MomentTuple { xis: bad.xis.clone(), etabars: vec![], gamma_policy: bad.gamma_policy }),
            Err(Error::TupleArity { .. })
        ));
    }

    #[test]
    fn del_formula_on_models() {
        for model in [catalog::torus(3), catalog::iwasawa(), catalog::heis_mixed()] {
            for (xs, es) in [(&[0][..], &[0][..]), (&[2], &[1]), (&[0, 1], &[0, 1]), (&[0, 2], &[1, 2])] {
                let t = MomentTuple::frames(3, xs, es);
                let r = claim_del_formula(&model, &t).unwrap();
                if lie_g_tuple(&model, &t) {
                    assert!(r.holds(), "{} {:?} {:?}: {:?}", model.name(), xs, es, r);
                }
            }
        }
    }

    fn lie_g_tuple(model: &LieModel, t: &MomentTuple) -> bool {
        t.xis.iter().all(|x| lie_g_membership(model, x).unwrap())
            && t.etabars.iter().all(|e| lie_g_membership(model, &e.conj()).unwrap())
    }

    #[test]
    fn tuple_text_round_trip() {
        let mut t = MomentTuple::frames(3, &[0, 2], &[1, 1]);
        t.gamma_policy = GammaPolicy::AnySolution;
        assert_eq!(MomentTuple::from_text(&t.to_text()).unwrap(), t);
        let e = MomentTuple::from_text("xi 1 0 0 0\netabar 1 0\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    fn chart_tuple(s: &mut crate::symalg::Sampler, d: usize, k: usize) -> ChartTuple {
        ChartTuple {
            xis: (0..k).map(|_| s.divergence_free_field(d)).collect(),
            etabars: (0..k).map(|_| s.divergence_free_field(d).conj()).collect(),
        }
    }

    #[test]
    fn del_formula_on_chart() {
        let mut s = crate::symalg::Sampler::new(11, 0);
        for n in [3, 4] {
            for _ in 0..4 {
                let t = chart_tuple(&mut s, 3, n - 2);
                assert!(t.xis.iter().all(|x| lie_g_membership_chart(x).unwrap()));
                for (direct, sum) in claim_del_formula_chart(&t).unwrap() {
                    assert_eq!(direct, sum, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn reversal_identities() {
        let mut s = crate::symalg::Sampler::new(12, 0);
        for n in [3usize, 4] {
            for _ in 0..4 {
                let d = 3;
                let t = ChartTuple {
                    xis: (0..n - 2).map(|_| s.holo_field(d, false)).collect(),
                    etabars: (0..n - 2).map(|_| s.anti_field(d, false)).collect(),
                };
                let beta = s.form(d, n - 2, n - 3);
                for u in [symalg::del(&beta.conj()), symalg::delbar(&beta)] {
                    let (l, r) = reversal_sides_chart(&u, &t).unwrap();
                    assert_eq!(l, r, "n = {n}");
                }
            }
        }
    }
}
