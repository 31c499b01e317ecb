use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::GaussRat;

/// Exponent vector over `z_1..z_d, z̄_1..z̄_d` (holomorphic exponents first).
pub type Monomial = Vec<u8>;

/// Polynomial in `z, z̄` with Gaussian-rational coefficients, kept canonical:
/// no zero coefficients are ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, GaussRat>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: GaussRat) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; 2 * dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, GaussRat::one())
    }

    /// `z_{i+1}`.
    pub fn z(dim: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * dim];
        e[i] = 1;
        Poly::monomial(dim, e, GaussRat::one())
    }

    /// `z̄_{i+1}`.
    pub fn zbar(dim: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * dim];
        e[dim + i] = 1;
        Poly::monomial(dim, e, GaussRat::one())
    }

    pub fn monomial(dim: usize, exps: Monomial, c: GaussRat) -> Self {
        assert_eq!(exps.len(), 2 * dim);
        let mut p = Poly::zero(dim);
        p.add_term(exps, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// True when no `z̄` appears.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|e| e[self.dim..].iter().all(|&x| x == 0))
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.terms.keys().all(|e| e[..self.dim].iter().all(|&x| x == 0))
    }

    fn add_term(&mut self, exps: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-GaussRat::one())
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        let mut out = Poly::zero(self.dim);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = Poly::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Partial derivative along variable index `v` in `0..2d`
    /// (`v < d` is `∂/∂z_{v+1}`, otherwise `∂/∂z̄_{v-d+1}`).
    pub fn deriv(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e[v];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] = k - 1;
            out.add_term(e2, c * &GaussRat::from(k as i64));
        }
        out
    }

    pub fn dz(&self, i: usize) -> Poly {
        self.deriv(i)
    }

    pub fn dzbar(&self, i: usize) -> Poly {
        self.deriv(self.dim + i)
    }

    /// Complex conjugate: swaps `z` and `z̄` exponents and conjugates coefficients.
    pub fn conj(&self) -> Poly {
        let d = self.dim;
        let mut out = Poly::zero(d);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; 2 * d];
            e2[..d].copy_from_slice(&e[d..]);
            e2[d..].copy_from_slice(&e[..d]);
            out.terms.insert(e2, c.conj());
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let d = self.dim;
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = if v < d {
                    format!("z{}", v + 1)
                } else {
                    format!("zb{}", v - d + 1)
                };
                if k == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_a_sample() {
        let d = 2;
        let a = Poly::z(d, 0).mul(&Poly::zbar(d, 1));
        let b = Poly::z(d, 0).add(&Poly::constant(d, GaussRat::i()));
        let lhs = a.mul(&b).dz(0);
        let rhs = a.dz(0).mul(&b).add(&a.mul(&b.dz(0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cancellation_leaves_canonical_zero() {
        let d = 1;
        let p = Poly::z(d, 0).sub(&Poly::z(d, 0));
        assert!(p.is_zero());
        assert_eq!(p, Poly::zero(d));
    }

    #[test]
    fn conjugation_swaps_variables() {
        let d = 2;
        let p = Poly::z(d, 0).scale(&GaussRat::i());
        assert_eq!(p.conj(), Poly::zbar(d, 0).scale(&GaussRat::from_ints(0, -1)));
        assert!(p.is_holomorphic());
        assert!(p.conj().is_antiholomorphic());
    }
}
