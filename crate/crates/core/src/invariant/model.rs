use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::basis::{self, Mask};
use crate::error::{Error, ParseError, Result};
use crate::scalar::{format_rational, parse_rational, GaussRat, Scalar};

use super::form::{ExactForm, InvForm};

/// Structure constants of an invariant (1,0)-coframe on a compact quotient.
#[derive(Clone, PartialEq)]
pub struct LieModel {
    name: String,
    dim: usize,
    /// `dφ^k` for each holomorphic generator.
    diff: Vec<ExactForm>,
    volume_scale: BigRational,
    /// `∂` and `∂̄` of all `2d` generators, as `(mask, coefficient)` lists.
    del_gen: Vec<Vec<(Mask, GaussRat)>>,
    delbar_gen: Vec<Vec<(Mask, GaussRat)>>,
}

impl std::fmt::Debug for LieModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieModel({}, dim {})", self.name, self.dim)
    }
}

/// Largest supported model dimension (one-digit labels in model files).
pub const MAX_MODEL_DIM: usize = 9;

impl LieModel {
    /// Builds and validates a model; `diff[k]` is `dφ^{k+1}`.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        diff: Vec<ExactForm>,
        volume_scale: BigRational,
    ) -> Result<Self> {
        let name = name.into();
        let label = name.clone();
        let invalid = move |reason: String| Error::InvalidModel {
            name: label.clone(),
            reason,
        };
        if dim == 0 || dim > MAX_MODEL_DIM {
            return Err(invalid(format!("dimension {dim} outside 1..={MAX_MODEL_DIM}")));
        }
        if diff.len() != dim {
            return Err(invalid(format!("{} differentials for dimension {dim}", diff.len())));
        }
        if !volume_scale.is_positive() {
            return Err(invalid("volume_scale must be positive".into()));
        }
        for (k, dk) in diff.iter().enumerate() {
            if dk.dim() != dim {
                return Err(invalid(format!("dφ{} lives in dimension {}", k + 1, dk.dim())));
            }
            if let Some((&m, _)) = dk.terms().find(|(&m, _)| basis::degree(m) != 2) {
                return Err(invalid(format!(
                    "dφ{} has a term {} that is not a 2-form",
                    k + 1,
                    dk.mask_label(m)
                )));
            }
            if !dk.component(0, 2).is_zero() {
                return Err(invalid(format!(
                    "dφ{} has a (0,2) component, so the structure is not integrable",
                    k + 1
                )));
            }
        }
        let mut del_gen = Vec::with_capacity(2 * dim);
        let mut delbar_gen = Vec::with_capacity(2 * dim);
        let split = |u: &ExactForm, p, q| -> Vec<(Mask, GaussRat)> {
            u.component(p, q).terms().map(|(&m, c)| (m, c.clone())).collect()
        };
        for dk in &diff {
            del_gen.push(split(dk, 2, 0));
            delbar_gen.push(split(dk, 1, 1));
        }
        for dk in &diff {
            let c = dk.conj();
            del_gen.push(split(&c, 1, 1));
            delbar_gen.push(split(&c, 0, 2));
        }
        let model = LieModel {
            name,
            dim,
            diff,
            volume_scale,
            del_gen,
            delbar_gen,
        };
        for g in 0..2 * dim {
            let gen = InvForm::<GaussRat>::monomial(dim, 1 << g, GaussRat::one());
            let dd = model.d(&model.d(&gen));
            if !dd.is_zero() {
                return Err(invalid(format!(
                    "d² ≠ 0 on generator {}: {}",
                    gen.mask_label(1 << g),
                    dd
                )));
            }
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume_scale(&self) -> &BigRational {
        &self.volume_scale
    }

    /// `dφ^{k+1}`.
    pub fn structure(&self, k: usize) -> &ExactForm {
        &self.diff[k]
    }

    /// True when every structure constant vanishes.
    pub fn is_abelian(&self) -> bool {
        self.diff.iter().all(InvForm::is_zero)
    }

    /// True when `dφ^k` has no (1,1) part for every `k`, i.e. holomorphic frame fields.
    pub fn is_complex_parallelizable(&self) -> bool {
        self.diff.iter().all(|dk| dk.component(1, 1).is_zero())
    }

    fn apply_antiderivation<S: Scalar>(
        &self,
        gens: &[Vec<(Mask, GaussRat)>],
        u: &InvForm<S>,
    ) -> InvForm<S> {
        let d = self.dim;
        let mut out = InvForm::zero(d);
        for (&m, c) in u.terms() {
            let mut rest = m;
            let mut pos = 0;
            while rest != 0 {
                let g = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let without = m & !(1 << g);
                for (t, coeff) in &gens[g] {
                    if let Some(s) = basis::wedge_sign(*t, without) {
                        let sign = if pos % 2 == 0 { s } else { -s };
                        out.add_signed(sign, t | without, &S::from_gauss(coeff).mul_ref(c));
                    }
                }
                pos += 1;
            }
        }
        out
    }

    /// `∂` on the invariant complex.
    pub fn del<S: Scalar>(&self, u: &InvForm<S>) -> InvForm<S> {
        self.apply_antiderivation(&self.del_gen, u)
    }

    /// `∂̄` on the invariant complex.
    pub fn delbar<S: Scalar>(&self, u: &InvForm<S>) -> InvForm<S> {
        self.apply_antiderivation(&self.delbar_gen, u)
    }

    pub fn d<S: Scalar>(&self, u: &InvForm<S>) -> InvForm<S> {
        self.del(u).add(&self.delbar(u))
    }

    /// `dV = i^{d²} φ^{1..d} ∧ φ̄^{1..d} = Π_k (i φ^k ∧ φ̄^k)`.
    pub fn volume_form<S: Scalar>(&self) -> InvForm<S> {
        let d = self.dim;
        let top: Mask = (1 << (2 * d)) - 1;
        InvForm::monomial(d, top, S::from_gauss(&GaussRat::i_pow((d * d) as i64)))
    }

    pub fn top_mask(&self) -> Mask {
        (1 << (2 * self.dim)) - 1
    }

    /// `∫_S u`, normalized so that `∫ dV = volume_scale`.
    pub fn integrate<S: Scalar>(&self, u: &InvForm<S>) -> Result<S> {
        let d = self.dim;
        match u.bidegree() {
            None => return Ok(S::zero()),
            Some((p, q)) if p == d && q == d => {}
            Some(got) => {
                return Err(Error::Bidegree {
                    got,
                    expected: format!("({d},{d})"),
                })
            }
        }
        let factor = GaussRat::i_pow(-((d * d) as i64))
            * GaussRat::new(self.volume_scale.clone(), BigRational::zero());
        Ok(u.coefficient(self.top_mask()).mul_ref(&S::from_gauss(&factor)))
    }

    /// Canonical text serialization; parsing it returns an equal model.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name {}", self.name);
        let _ = writeln!(s, "dim {}", self.dim);
        let _ = writeln!(s, "volume_scale {}", format_rational(&self.volume_scale));
        for (k, dk) in self.diff.iter().enumerate() {
            for (&m, c) in dk.terms() {
                let _ = writeln!(
                    s,
                    "diff {} {} {} {}",
                    k + 1,
                    mask_to_label(m, self.dim),
                    format_rational(&c.re),
                    format_rational(&c.im)
                );
            }
        }
        s
    }

    /// Parses the line-based model format:
    ///
    /// ```text
    /// name iwasawa
    /// dim 3
    /// volume_scale 1
    /// diff 3 12 -1 0      # dφ3 = -φ1∧φ2
    /// ```
    pub fn from_text(text: &str) -> std::result::Result<Self, ParseError> {
        let mut name = None;
        let mut dim = None;
        let mut volume = None;
        let mut entries: Vec<(usize, usize, String, GaussRat)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "name" => {
                    let [_, n] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `name <identifier>`"));
                    };
                    if name.replace(n.to_string()).is_some() {
                        return Err(ParseError::at(ln, "duplicate `name`"));
                    }
                }
                "dim" => {
                    let [_, v] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `dim <integer>`"));
                    };
                    let v: usize = v
                        .parse()
                        .map_err(|_| ParseError::at(ln, format!("bad dimension `{v}`")))?;
                    if v == 0 || v > MAX_MODEL_DIM {
                        return Err(ParseError::at(
                            ln,
                            format!("dimension {v} outside 1..={MAX_MODEL_DIM}"),
                        ));
                    }
                    if dim.replace(v).is_some() {
                        return Err(ParseError::at(ln, "duplicate `dim`"));
                    }
                }
                "volume_scale" => {
                    let [_, v] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `volume_scale <rational>`"));
                    };
                    let v = parse_rational(v).map_err(|e| e.with_line(ln))?;
                    if volume.replace(v).is_some() {
                        return Err(ParseError::at(ln, "duplicate `volume_scale`"));
                    }
                }
                "diff" => {
                    let [_, k, label, re, im] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `diff <k> <label> <re> <im>`"));
                    };
                    let k: usize = k
                        .parse()
                        .map_err(|_| ParseError::at(ln, format!("bad generator index `{k}`")))?;
                    let c = GaussRat::new(
                        parse_rational(re).map_err(|e| e.with_line(ln))?,
                        parse_rational(im).map_err(|e| e.with_line(ln))?,
                    );
                    entries.push((ln, k, label.to_string(), c));
                }
                other => return Err(ParseError::at(ln, format!("unknown key `{other}`"))),
            }
        }
        let name = name.ok_or_else(|| ParseError::msg("missing `name`"))?;
        let dim = dim.ok_or_else(|| ParseError::msg("missing `dim`"))?;
        let volume = volume.unwrap_or_else(|| BigRational::from_integer(BigInt::one()));
        let mut diff = vec![ExactForm::zero(dim); dim];
        let mut seen = std::collections::BTreeSet::new();
        for (ln, k, label, c) in entries {
            if k == 0 || k > dim {
                return Err(ParseError::at(ln, format!("generator index {k} outside 1..={dim}")));
            }
            let m = label_to_mask(&label, dim).map_err(|e| e.with_line(ln))?;
            if !seen.insert((k, m)) {
                return Err(ParseError::at(ln, format!("duplicate entry for dφ{k} at `{label}`")));
            }
            diff[k - 1] = diff[k - 1].add(&InvForm::monomial(dim, m, c));
        }
        LieModel::new(name, dim, diff, volume).map_err(|e| ParseError::msg(e.to_string()))
    }
}

/// `"12"` is `φ1∧φ2`, `"1~2"` is `φ1∧φ̄2`, `"~1~2"` is `φ̄1∧φ̄2`.
pub fn label_to_mask(label: &str, dim: usize) -> std::result::Result<Mask, ParseError> {
    let bad = |why: &str| ParseError::msg(format!("bad basis label `{label}`: {why}"));
    let mut factors = Vec::new();
    let mut chars = label.chars();
    while let Some(ch) = chars.next() {
        let (anti, digit) = if ch == '~' {
            (true, chars.next().ok_or_else(|| bad("dangling `~`"))?)
        } else {
            (false, ch)
        };
        let i = digit
            .to_digit(10)
            .ok_or_else(|| bad("expected a digit"))? as usize;
        if i == 0 || i > dim {
            return Err(bad("index out of range"));
        }
        factors.push(if anti { dim + i - 1 } else { i - 1 });
    }
    if factors.len() != 2 {
        return Err(bad("a 2-form needs exactly two factors"));
    }
    if factors[0] >= factors[1] {
        return Err(bad("factors must be in canonical increasing order"));
    }
    Ok((1 << factors[0]) | (1 << factors[1]))
}

pub fn mask_to_label(mask: Mask, dim: usize) -> String {
    let mut s = String::new();
    for g in 0..2 * dim {
        if mask & (1 << g) != 0 {
            if g < dim {
                let _ = write!(s, "{}", g + 1);
            } else {
                let _ = write!(s, "~{}", g - dim + 1);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::catalog;

    #[test]
    fn labels() {
        assert_eq!(label_to_mask("12", 3).unwrap(), 0b000_011);
        assert_eq!(label_to_mask("1~2", 3).unwrap(), 0b010_001);
        assert_eq!(label_to_mask("~1~2", 3).unwrap(), 0b011_000);
        assert!(label_to_mask("21", 3).is_err());
        assert!(label_to_mask("~11", 3).is_err());
        assert!(label_to_mask("14", 3).is_err());
        assert_eq!(mask_to_label(0b010_001, 3), "1~2");
    }

    #[test]
    fn rejects_invalid_structures() {
        let d = 3;
        // dφ3 = φ̄1∧φ̄2 is not integrable
        let mut diff = vec![ExactForm::zero(d); d];
        diff[2] = ExactForm::from_ints(d, 0b011_000, 1, 0);
        assert!(LieModel::new("x", d, diff, BigRational::one()).is_err());
        // dφ1 = φ3∧φ̄1, dφ3 = φ1∧φ2 violates d² = 0
        let mut diff = vec![ExactForm::zero(d); d];
        diff[0] = ExactForm::from_ints(d, 0b001_100, 1, 0);
        diff[2] = ExactForm::from_ints(d, 0b011, 1, 0);
        assert!(LieModel::new("x", d, diff, BigRational::one()).is_err());
    }

    #[test]
    fn text_round_trip() {
        for m in catalog::models() {
            let text = m.to_text();
            let back = LieModel::from_text(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = LieModel::from_text("name a\ndim 2\ndiff 3 12 1 0\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = LieModel::from_text("name a\ndim x\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(LieModel::from_text("dim 2\n").is_err());
    }
}
