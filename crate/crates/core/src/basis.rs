//! Wedge monomials over `2d` generators stored as bitmasks.
//!
//! Bit `i` (for `i < d`) is the holomorphic generator `dz_{i+1}` (or `φ^{i+1}`),
//! bit `d + i` is its conjugate. Ascending bit order is the canonical order,
//! which puts every holomorphic factor before every antiholomorphic one.

pub type Mask = u32;

pub const MAX_DIM: usize = 12;

pub fn holo_part(mask: Mask, d: usize) -> Mask {
    mask & ((1 << d) - 1)
}

pub fn anti_part(mask: Mask, d: usize) -> Mask {
    mask >> d
}

pub fn bidegree(mask: Mask, d: usize) -> (usize, usize) {
    (
        holo_part(mask, d).count_ones() as usize,
        anti_part(mask, d).count_ones() as usize,
    )
}

pub fn make_mask(holo: Mask, anti: Mask, d: usize) -> Mask {
    holo | (anti << d)
}

/// Sign of `e_a ∧ e_b` relative to the canonical monomial `a | b`, or `None`
/// when the monomials share a factor.
pub fn wedge_sign(a: Mask, b: Mask) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Interior product of the dual vector of generator `g` with monomial `mask`:
/// returns the sign and the remaining monomial.
pub fn contract_sign(mask: Mask, g: usize) -> Option<(i32, Mask)> {
    let bit = 1 << g;
    if mask & bit == 0 {
        return None;
    }
    let before = (mask & (bit - 1)).count_ones();
    Some((if before % 2 == 0 { 1 } else { -1 }, mask & !bit))
}

/// Complex conjugate of a monomial: `φ_I ∧ φ̄_J ↦ φ̄_I ∧ φ_J = ± φ_J ∧ φ̄_I`.
pub fn conj_mask(mask: Mask, d: usize) -> (i32, Mask) {
    let h = holo_part(mask, d);
    let a = anti_part(mask, d);
    let s = (h.count_ones() * a.count_ones()) % 2;
    (if s == 0 { 1 } else { -1 }, make_mask(a, h, d))
}

/// All masks of bidegree `(p, q)` in ascending numeric order.
pub fn basis(d: usize, p: usize, q: usize) -> Vec<Mask> {
    if p > d || q > d {
        return Vec::new();
    }
    let holos = subsets(d, p);
    let antis = subsets(d, q);
    let mut out = Vec::with_capacity(holos.len() * antis.len());
    for &h in &holos {
        for &a in &antis {
            out.push(make_mask(h, a, d));
        }
    }
    out.sort_unstable();
    out
}

/// Subsets of `{0..d}` with `k` elements as bitmasks.
pub fn subsets(d: usize, k: usize) -> Vec<Mask> {
    (0..(1u32 << d)).filter(|m| m.count_ones() as usize == k).collect()
}

pub fn degree(mask: Mask) -> usize {
    mask.count_ones() as usize
}

/// Human-readable label, e.g. `dz1^dzb2` or `φ1^φb2` depending on `prefix`.
pub fn label(mask: Mask, d: usize, holo: &str, anti: &str) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for i in 0..d {
        if mask & (1 << i) != 0 {
            parts.push(format!("{holo}{}", i + 1));
        }
    }
    for i in 0..d {
        if mask & (1 << (d + i)) != 0 {
            parts.push(format!("{anti}{}", i + 1));
        }
    }
    parts.join("^")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_sign_counts_inversions() {
        // dz1 ^ dzb1 with d = 1 is canonical, dzb1 ^ dz1 is not
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b01, 0b01), None);
        assert_eq!(wedge_sign(0b100, 0b011), Some(1));
    }

    #[test]
    fn contraction_sign_is_position_parity() {
        assert_eq!(contract_sign(0b011, 1), Some((-1, 0b001)));
        assert_eq!(contract_sign(0b011, 0), Some((1, 0b010)));
        assert_eq!(contract_sign(0b010, 0), None);
    }

    #[test]
    fn conjugation_is_an_involution_up_to_sign() {
        let d = 3;
        for m in 0..(1u32 << (2 * d)) {
            let (s1, c) = conj_mask(m, d);
            let (s2, back) = conj_mask(c, d);
            assert_eq!(back, m);
            assert_eq!(s1 * s2, 1);
        }
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis(3, 1, 1).len(), 9);
        assert_eq!(basis(3, 2, 2).len(), 9);
        assert_eq!(basis(4, 2, 1).len(), 24);
        assert!(basis(2, 3, 0).is_empty());
    }
}
