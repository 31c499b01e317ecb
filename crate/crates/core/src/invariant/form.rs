use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::basis::{self, Mask};
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Scalar};

/// Invariant form: constant coefficients over the coframe monomials `φ_I ∧ φ̄_J`.
#[derive(Clone, PartialEq)]
pub struct InvForm<S: Scalar> {
    dim: usize,
    terms: BTreeMap<Mask, S>,
}

pub type ExactForm = InvForm<GaussRat>;
pub type FloatForm = InvForm<Complex64>;

impl<S: Scalar> InvForm<S> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= basis::MAX_DIM, "dimension {dim} too large");
        InvForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        InvForm::monomial(dim, 0, c)
    }

    pub fn monomial(dim: usize, mask: Mask, c: S) -> Self {
        let mut u = InvForm::zero(dim);
        u.add_term(mask, c);
        u
    }

    /// `φ^{i+1}`.
    pub fn phi(dim: usize, i: usize) -> Self {
        InvForm::monomial(dim, 1 << i, S::one())
    }

    /// `φ̄^{i+1}`.
    pub fn phibar(dim: usize, i: usize) -> Self {
        InvForm::monomial(dim, 1 << (dim + i), S::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mask, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mask: Mask) -> S {
        self.terms.get(&mask).cloned().unwrap_or_else(S::zero)
    }

    pub(crate) fn add_term(&mut self, mask: Mask, c: S) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(S::zero);
        *entry = entry.add_ref(&c);
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub(crate) fn add_signed(&mut self, sign: i32, mask: Mask, c: &S) {
        if sign > 0 {
            self.add_term(mask, c.clone());
        } else {
            self.add_term(mask, -c.clone());
        }
    }

    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|&m| basis::bidegree(m, self.dim));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn component(&self, p: usize, q: usize) -> Self {
        let mut out = InvForm::zero(self.dim);
        for (&m, c) in &self.terms {
            if basis::bidegree(m, self.dim) == (p, q) {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = InvForm::zero(self.dim);
        for (&m, a) in &self.terms {
            out.add_term(m, a.mul_ref(c));
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = InvForm::zero(self.dim);
        for (&m, c) in &self.terms {
            let (s, cm) = basis::conj_mask(m, self.dim);
            out.add_signed(s, cm, &c.conj());
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = InvForm::zero(self.dim);
        for (&a, x) in &self.terms {
            for (&b, y) in &o.terms {
                if let Some(s) = basis::wedge_sign(a, b) {
                    out.add_signed(s, a | b, &x.mul_ref(y));
                }
            }
        }
        out
    }

    /// Coefficients over `basis(d, p, q)`; other bidegrees are dropped.
    pub fn to_vector(&self, p: usize, q: usize) -> Vec<S> {
        basis::basis(self.dim, p, q)
            .into_iter()
            .map(|m| self.coefficient(m))
            .collect()
    }

    pub fn from_vector(dim: usize, p: usize, q: usize, v: &[S]) -> Self {
        let masks = basis::basis(dim, p, q);
        assert_eq!(masks.len(), v.len(), "vector length for ({p},{q})");
        let mut u = InvForm::zero(dim);
        for (m, c) in masks.into_iter().zip(v) {
            u.add_term(m, c.clone());
        }
        u
    }

    pub fn to_float(&self) -> FloatForm {
        let mut out = InvForm::zero(self.dim);
        for (&m, c) in &self.terms {
            out.add_term(m, c.to_c64());
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }

    /// True when the form equals its own conjugate.
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn mask_label(&self, mask: Mask) -> String {
        basis::label(mask, self.dim, "φ", "φb")
    }
}

impl ExactForm {
    pub fn from_ints(dim: usize, mask: Mask, re: i64, im: i64) -> Self {
        InvForm::monomial(dim, mask, GaussRat::from_ints(re, im))
    }
}

impl FloatForm {
    /// Drops coefficients with modulus below `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = InvForm::zero(self.dim);
        for (&m, c) in &self.terms {
            if c.norm() > tol {
                out.terms.insert(m, *c);
            }
        }
        out
    }

    pub fn distance(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for InvForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, c)| format!("({c}) {}", self.mask_label(m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar> fmt::Debug for InvForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, c)| format!("({c:?}) {}", self.mask_label(m)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Frame-constant vector field `Σ a_i Z_i + Σ b_i Z̄_i`.
#[derive(Clone, PartialEq)]
pub struct InvVectorField<S: Scalar> {
    holo: Vec<S>,
    anti: Vec<S>,
}

impl<S: Scalar> InvVectorField<S> {
    pub fn holo(coeffs: Vec<S>) -> Self {
        let d = coeffs.len();
        InvVectorField {
            holo: coeffs,
            anti: vec![S::zero(); d],
        }
    }

    pub fn anti(coeffs: Vec<S>) -> Self {
        let d = coeffs.len();
        InvVectorField {
            holo: vec![S::zero(); d],
            anti: coeffs,
        }
    }

    pub fn from_parts(holo: Vec<S>, anti: Vec<S>) -> Self {
        assert_eq!(holo.len(), anti.len());
        InvVectorField { holo, anti }
    }

    pub fn zero(dim: usize) -> Self {
        InvVectorField::holo(vec![S::zero(); dim])
    }

    /// Frame field `Z_{i+1}`.
    pub fn frame(dim: usize, i: usize) -> Self {
        let mut c = vec![S::zero(); dim];
        c[i] = S::one();
        InvVectorField::holo(c)
    }

    /// Frame field `Z̄_{i+1}`.
    pub fn frame_bar(dim: usize, i: usize) -> Self {
        let mut c = vec![S::zero(); dim];
        c[i] = S::one();
        InvVectorField::anti(c)
    }

    pub fn dim(&self) -> usize {
        self.holo.len()
    }

    pub fn holo_coeffs(&self) -> &[S] {
        &self.holo
    }

    pub fn anti_coeffs(&self) -> &[S] {
        &self.anti
    }

    pub fn holo_part(&self) -> Self {
        InvVectorField::holo(self.holo.clone())
    }

    pub fn anti_part(&self) -> Self {
        InvVectorField::anti(self.anti.clone())
    }

    pub fn has_holo(&self) -> bool {
        self.holo.iter().any(|c| !c.is_zero())
    }

    pub fn has_anti(&self) -> bool {
        self.anti.iter().any(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        !self.has_holo() && !self.has_anti()
    }

    /// Coefficient along generator `g` (`g < d` holomorphic).
    pub fn component(&self, g: usize) -> &S {
        let d = self.dim();
        if g < d {
            &self.holo[g]
        } else {
            &self.anti[g - d]
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        InvVectorField {
            holo: self.holo.iter().zip(&o.holo).map(|(a, b)| a.add_ref(b)).collect(),
            anti: self.anti.iter().zip(&o.anti).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        InvVectorField {
            holo: self.holo.iter().map(|a| a.mul_ref(c)).collect(),
            anti: self.anti.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    /// `Σ a_i Z_i ↦ Σ ā_i Z̄_i`.
    pub fn conj(&self) -> Self {
        InvVectorField {
            holo: self.anti.iter().map(Scalar::conj).collect(),
            anti: self.holo.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn to_float(&self) -> InvVectorField<Complex64> {
        InvVectorField {
            holo: self.holo.iter().map(Scalar::to_c64).collect(),
            anti: self.anti.iter().map(Scalar::to_c64).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.holo
            .iter()
            .chain(&self.anti)
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> fmt::Debug for InvVectorField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, a) in self.holo.iter().enumerate() {
            if !a.is_zero() {
                parts.push(format!("({a:?}) Z{}", i + 1));
            }
        }
        for (i, a) in self.anti.iter().enumerate() {
            if !a.is_zero() {
                parts.push(format!("({a:?}) Zb{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub(crate) fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

/// Interior product `v ⌟ u`.
pub fn contract_inv<S: Scalar>(v: &InvVectorField<S>, u: &InvForm<S>) -> Result<InvForm<S>> {
    same_dim(v.dim(), u.dim())?;
    let d = u.dim();
    let mut out = InvForm::zero(d);
    for (&m, c) in u.terms() {
        for g in 0..2 * d {
            let a = v.component(g);
            if a.is_zero() {
                continue;
            }
            if let Some((s, rest)) = basis::contract_sign(m, g) {
                out.add_signed(s, rest, &a.mul_ref(c));
            }
        }
    }
    Ok(out)
}

/// `u(v_1, …, v_k) = v_k ⌟ … ⌟ v_1 ⌟ u`.
pub fn evaluate_inv<S: Scalar>(u: &InvForm<S>, args: &[&InvVectorField<S>]) -> Result<InvForm<S>> {
    let mut acc = u.clone();
    for v in args {
        acc = contract_inv(v, &acc)?;
    }
    Ok(acc)
}

/// Iterated contraction `v_1 ⌟ (v_2 ⌟ ( … (v_k ⌟ u)))`: the last field acts first.
pub fn nested_contract<S: Scalar>(
    fields: &[&InvVectorField<S>],
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    let mut acc = u.clone();
    for v in fields.iter().rev() {
        acc = contract_inv(v, &acc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_duality() {
        let d = 3;
        let u = ExactForm::phi(d, 2).wedge(&ExactForm::phibar(d, 2));
        let z3 = InvVectorField::<GaussRat>::frame(d, 2);
        assert_eq!(contract_inv(&z3, &u).unwrap(), ExactForm::phibar(d, 2));
        let zb3 = InvVectorField::<GaussRat>::frame_bar(d, 2);
        assert_eq!(contract_inv(&zb3, &u).unwrap(), ExactForm::phi(d, 2).neg());
    }

    #[test]
    fn vector_round_trip() {
        let d = 3;
        let u = ExactForm::from_ints(d, 0b001_011, 2, -1).add(&ExactForm::from_ints(d, 0b100_110, 0, 3));
        let v = u.to_vector(2, 1);
        assert_eq!(ExactForm::from_vector(d, 2, 1, &v), u);
    }

    #[test]
    fn conjugation_of_real_form() {
        let d = 2;
        let i = GaussRat::i();
        let w = ExactForm::phi(d, 0).wedge(&ExactForm::phibar(d, 0)).scale(&i);
        assert!(w.is_real());
        assert!(!ExactForm::phi(d, 0).is_real());
    }
}
