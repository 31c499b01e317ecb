//! Balanced targets, holomorphic maps between models and membership in the
//! space of maps with `∂∂̄`-exact pulled-back `ω_{n−1}`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, ParseError, Result};
use crate::hodge::ddbar_preimage_exact;
use crate::invariant::{catalog, check_map_compatible, pullback_by_matrix, ExactForm, LieModel};
use crate::linalg::ExactMatrix;
use crate::scalar::{format_rational, parse_rational, GaussRat};

/// `(1,1)`-form `i Σ h_jk φ^j ∧ φ̄^k`.
pub fn kahler_form(dim: usize, h: &ExactMatrix) -> ExactForm {
    let mut out = ExactForm::zero(dim);
    for j in 0..dim {
        for k in 0..dim {
            if !h[j][k].is_zero() {
                let m = (1 << j) | (1 << (dim + k));
                out = out.add(&ExactForm::monomial(dim, m, GaussRat::i() * h[j][k].clone()));
            }
        }
    }
    out
}

fn identity(dim: usize) -> ExactMatrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| GaussRat::from((i == j) as i64)).collect())
        .collect()
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A model `X` of dimension `n` with a balanced metric `ω` and `ω_{n−1} = ω^{n−1}/(n−1)!`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedTarget {
    model: LieModel,
    hermitian: ExactMatrix,
    omega: ExactForm,
    omega_top: ExactForm,
}

impl BalancedTarget {
    pub fn model(&self) -> &LieModel {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Coefficients `h` in `ω = i Σ h_jk φ^j ∧ φ̄^k`.
    pub fn hermitian(&self) -> &ExactMatrix {
        &self.hermitian
    }

    pub fn omega(&self) -> &ExactForm {
        &self.omega
    }

    /// `ω^{n−1}/(n−1)!`.
    pub fn omega_top(&self) -> &ExactForm {
        &self.omega_top
    }

    /// The standard metric `h = I`.
    pub fn standard(model: &LieModel) -> Result<Self> {
        check_balanced(model, &kahler_form(model.dim(), &identity(model.dim())))
    }
}

/// Verifies that `ω` is a positive real `(1,1)`-form with `d(ω^{n−1}) = 0`.
pub fn check_balanced(model: &LieModel, omega: &ExactForm) -> Result<BalancedTarget> {
    let n = model.dim();
    if omega.dim() != n {
        return Err(Error::DimensionMismatch(omega.dim(), n));
    }
    if let Some(b) = omega.bidegree() {
        if b != (1, 1) {
            return Err(Error::Bidegree {
                got: b,
                expected: "(1,1)".into(),
            });
        }
    }
    // ω = i Σ h_jk φ^j∧φ̄^k, so h_jk = -i · coefficient
    let h: ExactMatrix = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| -GaussRat::i() * omega.coefficient((1 << j) | (1 << (n + k))))
                .collect()
        })
        .collect();
    for j in 0..n {
        for k in 0..n {
            if h[j][k] != h[k][j].conj() {
                return Err(Error::NotBalanced(format!(
                    "ω is not real: h[{}][{}] = {} but conj(h[{}][{}]) = {}",
                    j + 1,
                    k + 1,
                    h[j][k],
                    k + 1,
                    j + 1,
                    h[k][j].conj()
                )));
            }
        }
    }
    let hf = DMatrix::<Complex64>::from_fn(n, n, |j, k| h[j][k].to_c64());
    let min = hf.symmetric_eigenvalues().min();
    if n == 0 || min <= 0.0 {
        return Err(Error::NotBalanced(format!(
            "ω is not positive definite (min eigenvalue {min:.3e})"
        )));
    }
    let mut power = ExactForm::constant(n, GaussRat::one());
    for _ in 0..n - 1 {
        power = power.wedge(omega);
    }
    let inv = GaussRat::new(
        BigRational::new(BigInt::one(), factorial(n - 1)),
        BigRational::zero(),
    );
    let omega_top = power.scale(&inv);
    let d = model.d(&omega_top);
    if !d.is_zero() {
        return Err(Error::NotBalanced(format!(
            "d(ω^{}) ≠ 0: {d}",
            n.saturating_sub(1)
        )));
    }
    Ok(BalancedTarget {
        model: model.clone(),
        hermitian: h,
        omega: omega.clone(),
        omega_top,
    })
}

/// Holomorphic map `f: S → X` given on coframes by `f*φ_X^k = Σ_j M_kj φ_S^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    source: LieModel,
    target: BalancedTarget,
    matrix: ExactMatrix,
}

impl MapSpec {
    pub fn new(source: LieModel, target: BalancedTarget, matrix: ExactMatrix) -> Result<Self> {
        let (d, n) = (source.dim(), target.dim());
        check_map_compatible(&matrix, &source, target.model())?;
        if d + 1 < n {
            return Err(Error::InvalidMap(format!(
                "source dimension {d} is below n − 1 = {}",
                n - 1
            )));
        }
        Ok(MapSpec {
            source,
            target,
            matrix,
        })
    }

    pub fn source(&self) -> &LieModel {
        &self.source
    }

    pub fn target(&self) -> &BalancedTarget {
        &self.target
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// Complex rank of the coframe matrix.
    pub fn rank(&self) -> usize {
        crate::linalg::rank(&self.matrix)
    }

    pub fn pullback(&self, u: &ExactForm) -> ExactForm {
        pullback_by_matrix(&self.matrix, self.source.dim(), u)
    }

    /// `f*ω_{n−1}`.
    pub fn pulled_omega(&self) -> ExactForm {
        self.pullback(self.target.omega_top())
    }

    /// Parses
    ///
    /// ```text
    /// source iwasawa
    /// target torus3
    /// row 1 0  0 0  0 0
    /// row 0 0  1 0  0 0
    /// row 0 0  0 0  0 0
    /// omega 1 1 1 0        # optional entries h_jk of ω; default h = I
    /// ```
    ///
    /// resolving model names through `resolve`.
    pub fn from_text(
        text: &str,
        resolve: impl Fn(&str) -> Option<LieModel>,
    ) -> std::result::Result<Self, ParseError> {
        let mut source = None;
        let mut target = None;
        let mut rows: Vec<(usize, Vec<GaussRat>)> = Vec::new();
        let mut omega: Vec<(usize, usize, usize, GaussRat)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                key @ ("source" | "target") => {
                    let [_, name] = toks[..] else {
                        return Err(ParseError::at(ln, format!("expected `{key} <model>`")));
                    };
                    let m = resolve(name)
                        .ok_or_else(|| ParseError::at(ln, format!("unknown model `{name}`")))?;
                    let slot = if key == "source" { &mut source } else { &mut target };
                    if slot.replace(m).is_some() {
                        return Err(ParseError::at(ln, format!("duplicate `{key}`")));
                    }
                }
                "row" => rows.push((ln, parse_pairs(&toks[1..]).map_err(|e| e.with_line(ln))?)),
                "omega" => {
                    let [_, j, k, re, im] = toks[..] else {
                        return Err(ParseError::at(ln, "expected `omega <j> <k> <re> <im>`"));
                    };
                    let idx = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| ParseError::at(ln, format!("bad index `{s}`")))
                    };
                    let c = parse_pairs(&[re, im]).map_err(|e| e.with_line(ln))?;
                    omega.push((ln, idx(j)?, idx(k)?, c[0].clone()));
                }
                other => return Err(ParseError::at(ln, format!("unknown key `{other}`"))),
            }
        }
        let source = source.ok_or_else(|| ParseError::msg("missing `source`"))?;
        let target = target.ok_or_else(|| ParseError::msg("missing `target`"))?;
        let (d, n) = (source.dim(), target.dim());
        if rows.len() != n {
            return Err(ParseError::msg(format!("expected {n} `row` lines, found {}", rows.len())));
        }
        for (ln, r) in &rows {
            if r.len() != d {
                return Err(ParseError::at(*ln, format!("expected {d} entries, found {}", r.len())));
            }
        }
        let h = if omega.is_empty() {
            identity(n)
        } else {
            let mut h = vec![vec![GaussRat::zero(); n]; n];
            let mut seen = std::collections::BTreeSet::new();
            for (ln, j, k, c) in omega {
                if j == 0 || k == 0 || j > n || k > n {
                    return Err(ParseError::at(ln, format!("index outside 1..={n}")));
                }
                if !seen.insert((j, k)) {
                    return Err(ParseError::at(ln, format!("duplicate entry h[{j}][{k}]")));
                }
                h[j - 1][k - 1] = c;
            }
            h
        };
        let bt = check_balanced(&target, &kahler_form(n, &h))
            .map_err(|e| ParseError::msg(e.to_string()))?;
        MapSpec::new(source, bt, rows.into_iter().map(|(_, r)| r).collect())
            .map_err(|e| ParseError::msg(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "source {}", self.source.name());
        let _ = writeln!(s, "target {}", self.target.model().name());
        for r in &self.matrix {
            let _ = writeln!(s, "row {}", format_pairs(r));
        }
        let n = self.target.dim();
        for j in 0..n {
            for k in 0..n {
                let c = &self.target.hermitian()[j][k];
                if !c.is_zero() {
                    let _ = writeln!(s, "omega {} {} {}", j + 1, k + 1, format_pairs(std::slice::from_ref(c)));
                }
            }
        }
        s
    }
}

/// Parses whitespace-separated `re im` pairs.
pub(crate) fn parse_pairs(toks: &[&str]) -> std::result::Result<Vec<GaussRat>, ParseError> {
    if toks.len() % 2 != 0 {
        return Err(ParseError::msg("entries must come in `re im` pairs"));
    }
    toks.chunks(2)
        .map(|p| Ok(GaussRat::new(parse_rational(p[0])?, parse_rational(p[1])?)))
        .collect()
}

pub(crate) fn format_pairs(v: &[GaussRat]) -> String {
    v.iter()
        .map(|c| format!("{} {}", format_rational(&c.re), format_rational(&c.im)))
        .collect::<Vec<_>>()
        .join("  ")
}

/// Evidence that `[f*ω_{n−1}]_BC ≠ 0` in the top-degree case.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesDiagnosis {
    /// `∫_S f*ω_{n−1}`; positive, while every `∂∂̄`-exact top form integrates to zero.
    pub integral: GaussRat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XMembership {
    pub pulled: ExactForm,
    /// A real potential `Γ` with `i∂∂̄Γ = f*ω_{n−1}`, when one exists.
    pub potential: Option<ExactForm>,
    pub impossibility: Option<StokesDiagnosis>,
}

impl XMembership {
    pub fn is_member(&self) -> bool {
        self.potential.is_some()
    }
}

/// Decides `∂∂̄`-exactness of `f*ω_{n−1}` on the invariant complex of `S`.
pub fn x_membership(f: &MapSpec) -> Result<XMembership> {
    let pulled = f.pulled_omega();
    let (d, n) = (f.source().dim(), f.target().dim());
    let potential = ddbar_preimage_exact(f.source(), &pulled).map(|v| {
        // ∂∂̄v = F gives Γ = −i v; the real part still solves since F is real
        let g = v.scale(&-GaussRat::i());
        g.add(&g.conj()).scale(&GaussRat::from_frac(1, 2))
    });
    let impossibility = if d + 1 == n && !pulled.is_zero() {
        Some(StokesDiagnosis {
            integral: f.source().integrate(&pulled)?,
        })
    } else {
        None
    };
    Ok(XMembership {
        pulled,
        potential,
        impossibility,
    })
}

fn rows(entries: &[&[i64]]) -> ExactMatrix {
    entries
        .iter()
        .map(|r| r.iter().map(|&v| GaussRat::from(v)).collect())
        .collect()
}

/// Shipped maps, all with the standard metric on the target.
pub fn catalog_maps() -> Vec<(&'static str, MapSpec)> {
    let std = |m: LieModel| BalancedTarget::standard(&m).expect("standard metric is balanced");
    let build = |s: LieModel, t: LieModel, m: ExactMatrix| {
        MapSpec::new(s, std(t), m).expect("catalog map is compatible")
    };
    vec![
        (
            "iwasawa-torus3",
            build(catalog::iwasawa(), catalog::torus(3), rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]])),
        ),
        (
            "nil5-iwasawa",
            build(
                catalog::nil5(),
                catalog::iwasawa(),
                rows(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0]]),
            ),
        ),
        (
            "torus2-torus3",
            build(catalog::torus(2), catalog::torus(3), rows(&[&[1, 0], &[0, 1], &[0, 0]])),
        ),
        (
            "torus2-torus3-rank1",
            build(catalog::torus(2), catalog::torus(3), rows(&[&[1, 0], &[0, 0], &[0, 0]])),
        ),
    ]
}

pub fn map_by_name(name: &str) -> Option<MapSpec> {
    catalog_maps().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: usize, k: usize) -> ExactForm {
        ExactForm::phi(d, k).wedge(&ExactForm::phibar(d, k)).scale(&GaussRat::i())
    }

    #[test]
    fn balanced_examples() {
        assert!(BalancedTarget::standard(&catalog::torus(3)).is_ok());
        let t = BalancedTarget::standard(&catalog::iwasawa()).unwrap();
        assert_eq!(
            t.omega_top(),
            &w(3, 0).wedge(&w(3, 1)).add(&w(3, 0).wedge(&w(3, 2))).add(&w(3, 1).wedge(&w(3, 2)))
        );
        let err = BalancedTarget::standard(&catalog::heis_mixed()).unwrap_err();
        assert!(matches!(err, Error::NotBalanced(_)));
        let not_positive = w(3, 0).add(&w(3, 1)).sub(&w(3, 2));
        assert!(check_balanced(&catalog::torus(3), &not_positive).is_err());
    }

    #[test]
    fn membership_examples() {
        let m = map_by_name("iwasawa-torus3").unwrap();
        let x = x_membership(&m).unwrap();
        assert_eq!(x.pulled, w(3, 0).wedge(&w(3, 1)));
        let g = x.potential.expect("member");
        let back = m.source().del(&m.source().delbar(&g)).scale(&GaussRat::i());
        assert_eq!(back, x.pulled);
        assert!(g.is_real());

        let x = x_membership(&map_by_name("torus2-torus3-rank1").unwrap()).unwrap();
        assert!(x.pulled.is_zero());
        assert_eq!(x.potential, Some(ExactForm::zero(2)));

        let x = x_membership(&map_by_name("torus2-torus3").unwrap()).unwrap();
        assert!(!x.is_member());
        let diag = x.impossibility.expect("top-degree case");
        assert!(diag.integral.is_real() && diag.integral.re > BigRational::zero());
    }

    #[test]
    fn map_text_round_trip() {
        for (_, m) in catalog_maps() {
            let back = MapSpec::from_text(&m.to_text(), catalog::model_by_name).unwrap();
            assert_eq!(back, m);
        }
        let bad = "source torus2\ntarget torus3\nrow 1 0 0 0\nrow 0 0\nrow 0 0 0 0\n";
        let e = MapSpec::from_text(bad, catalog::model_by_name).unwrap_err();
        assert_eq!(e.line, Some(4));
    }
}
