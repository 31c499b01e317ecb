use std::collections::BTreeMap;
use std::fmt;

use crate::basis::{self, Mask};
use crate::error::{Error, Result};
use crate::scalar::GaussRat;

use super::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub fn new(p: usize, q: usize) -> Self {
        Bidegree { p, q }
    }

    pub fn total(&self) -> usize {
        self.p + self.q
    }
}

/// Differential form on a coordinate chart of `C^d` with polynomial coefficients,
/// stored over the canonical basis `dz_I ∧ dz̄_J`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartForm {
    dim: usize,
    terms: BTreeMap<Mask, Poly>,
}

impl ChartForm {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= basis::MAX_DIM, "chart dimension {dim} too large");
        ChartForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: Poly) -> Self {
        ChartForm::from_term(0, f)
    }

    pub fn from_term(mask: Mask, f: Poly) -> Self {
        let mut u = ChartForm::zero(f.dim());
        u.add_term(mask, f);
        u
    }

    /// `dz_{i+1}`.
    pub fn dz(dim: usize, i: usize) -> Self {
        ChartForm::from_term(1 << i, Poly::one(dim))
    }

    /// `dz̄_{i+1}`.
    pub fn dzbar(dim: usize, i: usize) -> Self {
        ChartForm::from_term(1 << (dim + i), Poly::one(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mask, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mask: Mask) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// Bidegree if the form is homogeneous and nonzero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|&m| basis::bidegree(m, self.dim));
        let first = it.next()?;
        it.all(|b| b == first)
            .then_some(Bidegree::new(first.0, first.1))
    }

    /// The `(p, q)` component.
    pub fn component(&self, p: usize, q: usize) -> ChartForm {
        let mut out = ChartForm::zero(self.dim);
        for (&m, f) in &self.terms {
            if basis::bidegree(m, self.dim) == (p, q) {
                out.terms.insert(m, f.clone());
            }
        }
        out
    }

    fn add_term(&mut self, mask: Mask, f: Poly) {
        if f.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(mask)
            .or_insert_with(|| Poly::zero(f.dim()));
        *entry = entry.add(&f);
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    fn add_signed(&mut self, sign: i32, mask: Mask, f: &Poly) {
        if sign > 0 {
            self.add_term(mask, f.clone());
        } else {
            self.add_term(mask, f.neg());
        }
    }

    pub fn add(&self, o: &ChartForm) -> ChartForm {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = self.clone();
        for (&m, f) in &o.terms {
            out.add_term(m, f.clone());
        }
        out
    }

    pub fn sub(&self, o: &ChartForm) -> ChartForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ChartForm {
        self.scale(&-GaussRat::from(1))
    }

    pub fn scale(&self, c: &GaussRat) -> ChartForm {
        self.mul_function(&Poly::constant(self.dim, c.clone()))
    }

    pub fn mul_function(&self, g: &Poly) -> ChartForm {
        let mut out = ChartForm::zero(self.dim);
        for (&m, f) in &self.terms {
            out.add_term(m, f.mul(g));
        }
        out
    }

    pub fn conj(&self) -> ChartForm {
        let mut out = ChartForm::zero(self.dim);
        for (&m, f) in &self.terms {
            let (s, cm) = basis::conj_mask(m, self.dim);
            out.add_signed(s, cm, &f.conj());
        }
        out
    }

    fn wedge_unchecked(&self, o: &ChartForm) -> ChartForm {
        let mut out = ChartForm::zero(self.dim);
        for (&a, f) in &self.terms {
            for (&b, g) in &o.terms {
                if let Some(s) = basis::wedge_sign(a, b) {
                    out.add_signed(s, a | b, &f.mul(g));
                }
            }
        }
        out
    }

    /// Applies `Σ_i dx_i ∧ ∂f/∂x_i` for the variables in `vars`
    /// (generator indices in `0..2d`).
    fn exterior_part(&self, vars: std::ops::Range<usize>) -> ChartForm {
        let mut out = ChartForm::zero(self.dim);
        for (&m, f) in &self.terms {
            for v in vars.clone() {
                let df = f.deriv(v);
                if df.is_zero() {
                    continue;
                }
                if let Some(s) = basis::wedge_sign(1 << v, m) {
                    out.add_signed(s, m | (1 << v), &df);
                }
            }
        }
        out
    }
}

impl fmt::Display for ChartForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, p)| format!("[{p}] {}", basis::label(m, self.dim, "dz", "dzb")))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ChartForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Type (1,0).
    Holo,
    /// Type (0,1).
    Anti,
    /// Sum of a (1,0) and a (0,1) part, e.g. a mixed bracket.
    Mixed,
    Zero,
}

/// Vector field `Σ a_i ∂/∂z_i + Σ b_i ∂/∂z̄_i` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartVectorField {
    holo: Vec<Poly>,
    anti: Vec<Poly>,
}

impl ChartVectorField {
    pub fn holo(components: Vec<Poly>) -> Self {
        let d = components.len();
        ChartVectorField {
            holo: components,
            anti: vec![Poly::zero(d); d],
        }
    }

    pub fn anti(components: Vec<Poly>) -> Self {
        let d = components.len();
        ChartVectorField {
            holo: vec![Poly::zero(d); d],
            anti: components,
        }
    }

    pub fn from_parts(holo: Vec<Poly>, anti: Vec<Poly>) -> Self {
        assert_eq!(holo.len(), anti.len());
        ChartVectorField { holo, anti }
    }

    pub fn zero(dim: usize) -> Self {
        ChartVectorField::holo(vec![Poly::zero(dim); dim])
    }

    /// `∂/∂z_{i+1}`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut c = vec![Poly::zero(dim); dim];
        c[i] = Poly::one(dim);
        ChartVectorField::holo(c)
    }

    /// `∂/∂z̄_{i+1}`.
    pub fn coordinate_bar(dim: usize, i: usize) -> Self {
        let mut c = vec![Poly::zero(dim); dim];
        c[i] = Poly::one(dim);
        ChartVectorField::anti(c)
    }

    pub fn dim(&self) -> usize {
        self.holo.len()
    }

    pub fn holo_components(&self) -> &[Poly] {
        &self.holo
    }

    pub fn anti_components(&self) -> &[Poly] {
        &self.anti
    }

    pub fn holo_part(&self) -> ChartVectorField {
        ChartVectorField::holo(self.holo.clone())
    }

    pub fn anti_part(&self) -> ChartVectorField {
        ChartVectorField::anti(self.anti.clone())
    }

    pub fn kind(&self) -> FieldKind {
        let h = self.holo.iter().any(|p| !p.is_zero());
        let a = self.anti.iter().any(|p| !p.is_zero());
        match (h, a) {
            (true, true) => FieldKind::Mixed,
            (true, false) => FieldKind::Holo,
            (false, true) => FieldKind::Anti,
            (false, false) => FieldKind::Zero,
        }
    }

    /// Holomorphic (1,0) field: no (0,1) part and holomorphic coefficients.
    pub fn is_holomorphic(&self) -> bool {
        matches!(self.kind(), FieldKind::Holo | FieldKind::Zero)
            && self.holo.iter().all(Poly::is_holomorphic)
    }

    pub fn is_antiholomorphic(&self) -> bool {
        matches!(self.kind(), FieldKind::Anti | FieldKind::Zero)
            && self.anti.iter().all(Poly::is_antiholomorphic)
    }

    pub fn is_zero(&self) -> bool {
        self.kind() == FieldKind::Zero
    }

    pub fn add(&self, o: &ChartVectorField) -> ChartVectorField {
        ChartVectorField {
            holo: self.holo.iter().zip(&o.holo).map(|(a, b)| a.add(b)).collect(),
            anti: self.anti.iter().zip(&o.anti).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &ChartVectorField) -> ChartVectorField {
        self.add(&o.mul_function(&Poly::constant(self.dim(), -GaussRat::from(1))))
    }

    pub fn mul_function(&self, f: &Poly) -> ChartVectorField {
        ChartVectorField {
            holo: self.holo.iter().map(|a| a.mul(f)).collect(),
            anti: self.anti.iter().map(|a| a.mul(f)).collect(),
        }
    }

    /// Complex conjugate field: `Σ a_i ∂_i ↦ Σ ā_i ∂̄_i`.
    pub fn conj(&self) -> ChartVectorField {
        ChartVectorField {
            holo: self.anti.iter().map(Poly::conj).collect(),
            anti: self.holo.iter().map(Poly::conj).collect(),
        }
    }

    /// Directional derivative `v·f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let d = self.dim();
        let mut out = Poly::zero(d);
        for i in 0..d {
            if !self.holo[i].is_zero() {
                out = out.add(&self.holo[i].mul(&f.dz(i)));
            }
            if !self.anti[i].is_zero() {
                out = out.add(&self.anti[i].mul(&f.dzbar(i)));
            }
        }
        out
    }

    /// Component along generator `g` (`g < d` holomorphic, else antiholomorphic).
    fn component(&self, g: usize) -> &Poly {
        let d = self.dim();
        if g < d {
            &self.holo[g]
        } else {
            &self.anti[g - d]
        }
    }

    /// Field whose components are the derivatives of ours along variable `v`.
    fn differentiate(&self, v: usize) -> ChartVectorField {
        ChartVectorField {
            holo: self.holo.iter().map(|a| a.deriv(v)).collect(),
            anti: self.anti.iter().map(|a| a.deriv(v)).collect(),
        }
    }

    fn contract_unchecked(&self, u: &ChartForm) -> ChartForm {
        let d = self.dim();
        let mut out = ChartForm::zero(d);
        for (&m, f) in &u.terms {
            for g in 0..2 * d {
                let c = self.component(g);
                if c.is_zero() {
                    continue;
                }
                if let Some((s, rest)) = basis::contract_sign(m, g) {
                    out.add_signed(s, rest, &c.mul(f));
                }
            }
        }
        out
    }
}

impl fmt::Display for ChartVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, a) in self.holo.iter().enumerate() {
            if !a.is_zero() {
                parts.push(format!("[{a}] d/dz{}", i + 1));
            }
        }
        for (i, a) in self.anti.iter().enumerate() {
            if !a.is_zero() {
                parts.push(format!("[{a}] d/dzb{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for ChartVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

pub fn wedge(u: &ChartForm, v: &ChartForm) -> Result<ChartForm> {
    same_dim(u.dim, v.dim)?;
    Ok(u.wedge_unchecked(v))
}

/// Interior product `v ⌟ u`; contracts with both parts of a mixed field.
pub fn contract(v: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(v.dim(), u.dim)?;
    Ok(v.contract_unchecked(u))
}

pub fn del(u: &ChartForm) -> ChartForm {
    u.exterior_part(0..u.dim)
}

pub fn delbar(u: &ChartForm) -> ChartForm {
    u.exterior_part(u.dim..2 * u.dim)
}

pub fn dtot(u: &ChartForm) -> ChartForm {
    u.exterior_part(0..2 * u.dim)
}

/// Lie bracket `[a, b] = Σ_g (a·b_g − b·a_g) ∂_g`.
pub fn lie_bracket(a: &ChartVectorField, b: &ChartVectorField) -> Result<ChartVectorField> {
    same_dim(a.dim(), b.dim())?;
    let d = a.dim();
    let bracket = |g: usize| a.apply(b.component(g)).sub(&b.apply(a.component(g)));
    Ok(ChartVectorField {
        holo: (0..d).map(bracket).collect(),
        anti: (d..2 * d).map(bracket).collect(),
    })
}

/// `(∂̄ξ) ⌟ u = Σ_j dz̄_j ∧ ((∂ξ/∂z̄_j) ⌟ u)` for the (1,0) part of `xi`.
pub fn dbar_field_contract(xi: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(xi.dim(), u.dim)?;
    let d = u.dim;
    let xi = xi.holo_part();
    let mut out = ChartForm::zero(d);
    for j in 0..d {
        let dxi = xi.differentiate(d + j);
        if dxi.is_zero() {
            continue;
        }
        out = out.add(&ChartForm::dzbar(d, j).wedge_unchecked(&dxi.contract_unchecked(u)));
    }
    Ok(out)
}

/// `(∂η̄) ⌟ u = Σ_j dz_j ∧ ((∂η̄/∂z_j) ⌟ u)` for the (0,1) part of `etabar`.
pub fn del_field_contract(etabar: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(etabar.dim(), u.dim)?;
    let d = u.dim;
    let eta = etabar.anti_part();
    let mut out = ChartForm::zero(d);
    for j in 0..d {
        let deta = eta.differentiate(j);
        if deta.is_zero() {
            continue;
        }
        out = out.add(&ChartForm::dz(d, j).wedge_unchecked(&deta.contract_unchecked(u)));
    }
    Ok(out)
}

fn require_kind(v: &ChartVectorField, allowed: FieldKind, expected: &'static str) -> Result<()> {
    match v.kind() {
        k if k == allowed || k == FieldKind::Zero => Ok(()),
        _ => Err(Error::KindMismatch { expected }),
    }
}

/// `(1,0)`-Lie derivative `ξ⌟∂u + ∂(ξ⌟u)`.
pub fn lie10(xi: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(xi.dim(), u.dim)?;
    require_kind(xi, FieldKind::Holo, "type (1,0)")?;
    Ok(xi
        .contract_unchecked(&del(u))
        .add(&del(&xi.contract_unchecked(u))))
}

/// `(0,1)`-Lie derivative `η̄⌟∂̄u + ∂̄(η̄⌟u)`.
pub fn lie01(etabar: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(etabar.dim(), u.dim)?;
    require_kind(etabar, FieldKind::Anti, "type (0,1)")?;
    Ok(etabar
        .contract_unchecked(&delbar(u))
        .add(&delbar(&etabar.contract_unchecked(u))))
}

/// Standard Lie derivative `a⌟du + d(a⌟u)` for any field.
pub fn lie_std(a: &ChartVectorField, u: &ChartForm) -> Result<ChartForm> {
    same_dim(a.dim(), u.dim)?;
    Ok(a.contract_unchecked(&dtot(u))
        .add(&dtot(&a.contract_unchecked(u))))
}

/// Evaluates `u(v_1, …, v_k) = v_k ⌟ … ⌟ v_1 ⌟ u`.
pub fn evaluate(u: &ChartForm, args: &[&ChartVectorField]) -> Result<ChartForm> {
    let mut acc = u.clone();
    for v in args {
        acc = contract(v, &acc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize) -> impl Fn(i64) -> Poly {
        move |c| Poly::constant(d, GaussRat::from(c))
    }

    #[test]
    fn wedge_examples() {
        let d = 2;
        let dz1 = ChartForm::dz(d, 0);
        let dzb1 = ChartForm::dzbar(d, 0);
        assert!(wedge(&dz1, &dz1).unwrap().is_zero());
        assert_eq!(
            wedge(&dz1, &dzb1).unwrap(),
            wedge(&dzb1, &dz1).unwrap().neg()
        );
        // (z1 dz1) ^ (zb2 dz2) = z1 zb2 dz1^dz2
        let a = ChartForm::from_term(0b0001, Poly::z(d, 0));
        let b = ChartForm::from_term(0b0010, Poly::zbar(d, 1));
        let expected = ChartForm::from_term(0b0011, Poly::z(d, 0).mul(&Poly::zbar(d, 1)));
        assert_eq!(wedge(&a, &b).unwrap(), expected);
        assert!(matches!(
            wedge(&a, &ChartForm::dz(3, 0)),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn contraction_examples() {
        let d = 1;
        let u = wedge(&ChartForm::dz(d, 0), &ChartForm::dzbar(d, 0)).unwrap();
        assert_eq!(
            contract(&ChartVectorField::coordinate(d, 0), &u).unwrap(),
            ChartForm::dzbar(d, 0)
        );
        assert_eq!(
            contract(&ChartVectorField::coordinate_bar(d, 0), &u).unwrap(),
            ChartForm::dz(d, 0).neg()
        );
        let d = 2;
        let z2d1 = ChartVectorField::coordinate(d, 0).mul_function(&Poly::z(d, 1));
        let u = wedge(&ChartForm::dz(d, 0), &ChartForm::dz(d, 1)).unwrap();
        assert_eq!(
            contract(&z2d1, &u).unwrap(),
            ChartForm::from_term(0b0010, Poly::z(d, 1))
        );
        // contracting a (1,0) field into a (0,q) form gives zero
        assert!(contract(&z2d1, &ChartForm::dzbar(d, 0)).unwrap().is_zero());
    }

    #[test]
    fn differential_examples() {
        let d = 2;
        assert!(del(&ChartForm::function(Poly::zbar(d, 0))).is_zero());
        let zzb = Poly::z(d, 0).mul(&Poly::zbar(d, 0));
        let u = ChartForm::from_term(0b0001, zzb);
        let expected = wedge(
            &ChartForm::dzbar(d, 0),
            &ChartForm::dz(d, 0).mul_function(&Poly::z(d, 0)),
        )
        .unwrap();
        assert_eq!(delbar(&u), expected);
        let z1sq = Poly::z(d, 0).mul(&Poly::z(d, 0)).mul(&Poly::zbar(d, 1));
        let w = ChartForm::from_term(0b1000, z1sq);
        assert!(dtot(&dtot(&w)).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let d = 2;
        let c1 = ChartVectorField::coordinate(d, 0);
        let c2 = ChartVectorField::coordinate(d, 1);
        assert!(lie_bracket(&c1, &c2).unwrap().is_zero());
        let z1d1 = c1.mul_function(&Poly::z(d, 0));
        assert_eq!(
            lie_bracket(&z1d1, &c1).unwrap(),
            c1.mul_function(&p(d)(-1))
        );
        let cb = ChartVectorField::coordinate_bar(d, 1).mul_function(&p(d)(3));
        assert!(lie_bracket(&c1, &cb).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let d = 2;
        let c1 = ChartVectorField::coordinate(d, 0);
        let f = Poly::z(d, 0).mul(&Poly::zbar(d, 1));
        assert_eq!(
            lie10(&c1, &ChartForm::function(f)).unwrap(),
            ChartForm::function(Poly::zbar(d, 1))
        );
        let z2d1 = c1.mul_function(&Poly::z(d, 1));
        assert_eq!(lie10(&z2d1, &ChartForm::dz(d, 0)).unwrap(), ChartForm::dz(d, 1));
        let cb1 = ChartVectorField::coordinate_bar(d, 0);
        let g = Poly::zbar(d, 0).mul(&Poly::z(d, 1));
        assert_eq!(
            lie01(&cb1, &ChartForm::function(g)).unwrap(),
            ChartForm::function(Poly::z(d, 1))
        );
        let zb2db1 = cb1.mul_function(&Poly::zbar(d, 1));
        assert_eq!(
            lie01(&zb2db1, &ChartForm::dzbar(d, 0)).unwrap(),
            ChartForm::dzbar(d, 1)
        );
        assert!(matches!(
            lie10(&cb1, &ChartForm::dz(d, 0)),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            lie01(&c1, &ChartForm::dz(d, 0)),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn holomorphic_standard_lie_derivative_is_the_10_one() {
        let d = 2;
        let xi = ChartVectorField::holo(vec![Poly::z(d, 1), Poly::z(d, 0).mul(&Poly::z(d, 0))]);
        let u = ChartForm::from_term(0b0101, Poly::zbar(d, 1).mul(&Poly::z(d, 0)));
        assert_eq!(lie_std(&xi, &u).unwrap(), lie10(&xi, &u).unwrap());
    }
}
