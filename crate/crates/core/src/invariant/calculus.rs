use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis;
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Scalar};

use super::form::{contract_inv, evaluate_inv, same_dim, InvForm, InvVectorField};
use super::model::LieModel;

fn require(cond: bool, expected: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::KindMismatch { expected })
    }
}

/// `ξ⌟∂u + ∂(ξ⌟u)` for a (1,0) frame-constant field.
pub fn lie10_inv<S: Scalar>(
    model: &LieModel,
    xi: &InvVectorField<S>,
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    same_dim(model.dim(), xi.dim())?;
    same_dim(model.dim(), u.dim())?;
    require(!xi.has_anti(), "type (1,0)")?;
    Ok(contract_inv(xi, &model.del(u))?.add(&model.del(&contract_inv(xi, u)?)))
}

/// `η̄⌟∂̄u + ∂̄(η̄⌟u)` for a (0,1) frame-constant field.
pub fn lie01_inv<S: Scalar>(
    model: &LieModel,
    etabar: &InvVectorField<S>,
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    same_dim(model.dim(), etabar.dim())?;
    same_dim(model.dim(), u.dim())?;
    require(!etabar.has_holo(), "type (0,1)")?;
    Ok(contract_inv(etabar, &model.delbar(u))?.add(&model.delbar(&contract_inv(etabar, u)?)))
}

/// Standard Lie derivative `v⌟du + d(v⌟u)`.
pub fn lie_std_inv<S: Scalar>(
    model: &LieModel,
    v: &InvVectorField<S>,
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    same_dim(model.dim(), v.dim())?;
    Ok(contract_inv(v, &model.d(u))?.add(&model.d(&contract_inv(v, u)?)))
}

/// Lie derivative matching the field type: (1,0) for holomorphic-type
/// fields, (0,1) for antiholomorphic-type ones.
pub fn lie_typed_inv<S: Scalar>(
    model: &LieModel,
    v: &InvVectorField<S>,
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    if v.has_anti() {
        lie01_inv(model, v, u)
    } else {
        lie10_inv(model, v, u)
    }
}

/// Bracket of frame-constant fields: `[X, Y] = −Σ_g dφ^g(X, Y) e_g`.
pub fn bracket_inv<S: Scalar>(
    model: &LieModel,
    x: &InvVectorField<S>,
    y: &InvVectorField<S>,
) -> Result<InvVectorField<S>> {
    let d = model.dim();
    same_dim(d, x.dim())?;
    same_dim(d, y.dim())?;
    let value = |g: usize| -> Result<S> {
        let dphi: InvForm<S> = if g < d {
            to_scalar(model.structure(g))
        } else {
            to_scalar(&model.structure(g - d).conj())
        };
        Ok(-evaluate_inv(&dphi, &[x, y])?.coefficient(0))
    };
    let holo = (0..d).map(value).collect::<Result<Vec<_>>>()?;
    let anti = (d..2 * d).map(value).collect::<Result<Vec<_>>>()?;
    Ok(InvVectorField::from_parts(holo, anti))
}

pub(crate) fn to_scalar<S: Scalar>(u: &InvForm<GaussRat>) -> InvForm<S> {
    let mut out = InvForm::zero(u.dim());
    for (&m, c) in u.terms() {
        out.add_term(m, S::from_gauss(c));
    }
    out
}

/// `(∂̄ξ)⌟u = Σ_j φ̄^j ∧ ([Z̄_j, ξ]^{1,0} ⌟ u)`.
pub fn dbar_field_contract_inv<S: Scalar>(
    model: &LieModel,
    xi: &InvVectorField<S>,
    u: &InvForm<S>,
) -> Result<InvForm<S>> {
    let d = model.dim();
    let mut out = InvForm::zero(d);
    for j in 0..d {
        let c = bracket_inv(model, &InvVectorField::frame_bar(d, j), &xi.holo_part())?.holo_part();
        if c.is_zero() {
            continue;
        }
        out = out.add(&InvForm::phibar(d, j).wedge(&contract_inv(&c, u)?));
    }
    Ok(out)
}

/// `∂̄ξ = 0` for a frame-constant (1,0) field.
pub fn is_holomorphic_field<S: Scalar>(model: &LieModel, xi: &InvVectorField<S>) -> Result<bool> {
    let d = model.dim();
    require(!xi.has_anti(), "type (1,0)")?;
    for j in 0..d {
        let b = bracket_inv(model, &InvVectorField::frame_bar(d, j), xi)?;
        if b.has_holo() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Matrix of a linear map from `(p, q)` to `(p2, q2)` forms over the wedge bases
/// (column `j` is the image of basis element `j`).
pub fn operator_matrix<S: Scalar>(
    dim: usize,
    from: (usize, usize),
    to: (usize, usize),
    mut op: impl FnMut(&InvForm<S>) -> InvForm<S>,
) -> Vec<Vec<S>> {
    let src = basis::basis(dim, from.0, from.1);
    let dst = basis::basis(dim, to.0, to.1);
    let mut m = vec![vec![S::zero(); src.len()]; dst.len()];
    for (j, &mask) in src.iter().enumerate() {
        let img = op(&InvForm::monomial(dim, mask, S::one()));
        for (i, &t) in dst.iter().enumerate() {
            m[i][j] = img.coefficient(t);
        }
    }
    m
}

pub fn to_dmatrix<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j].to_c64())
}

/// `exp(s·L) u` with `L` the Lie derivative of matching type along `v`,
/// restricted to the invariant forms of each bidegree present in `u`.
pub fn flow_pullback(
    model: &LieModel,
    v: &InvVectorField<Complex64>,
    s: f64,
    u: &InvForm<Complex64>,
) -> Result<InvForm<Complex64>> {
    let d = model.dim();
    let mut out = InvForm::zero(d);
    for p in 0..=d {
        for q in 0..=d {
            let part = u.component(p, q);
            if part.is_zero() {
                continue;
            }
            let gen = flow_generator(model, v, (p, q))?;
            let e = (gen * Complex64::new(s, 0.0)).exp();
            let x = nalgebra::DVector::from_vec(part.to_vector(p, q));
            let y = e * x;
            out = out.add(&InvForm::from_vector(d, p, q, y.as_slice()));
        }
    }
    Ok(out)
}

/// Matrix of the typed Lie derivative along `v` on `(p, q)` forms.
pub fn flow_generator(
    model: &LieModel,
    v: &InvVectorField<Complex64>,
    bideg: (usize, usize),
) -> Result<DMatrix<Complex64>> {
    let d = model.dim();
    let n = basis::basis(d, bideg.0, bideg.1).len();
    let mut err = None;
    let rows = operator_matrix::<Complex64>(d, bideg, bideg, |b| {
        lie_typed_inv(model, v, b).unwrap_or_else(|e| {
            err.get_or_insert(e);
            InvForm::zero(d)
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(to_dmatrix(&rows, n))
}

/// Pullback along a coframe map `f*φ_X^k = Σ_j M_kj φ_S^j` (`matrix` is `n × d`).
pub fn pullback_by_matrix<S: Scalar>(
    matrix: &[Vec<GaussRat>],
    source_dim: usize,
    u: &InvForm<S>,
) -> InvForm<S> {
    let n = u.dim();
    let images: Vec<InvForm<S>> = (0..2 * n)
        .map(|g| {
            let mut img = InvForm::zero(source_dim);
            for j in 0..source_dim {
                if g < n {
                    img = img.add(&InvForm::phi(source_dim, j).scale(&S::from_gauss(&matrix[g][j])));
                } else {
                    let c = matrix[g - n][j].conj();
                    img = img.add(&InvForm::phibar(source_dim, j).scale(&S::from_gauss(&c)));
                }
            }
            img
        })
        .collect();
    let mut out = InvForm::zero(source_dim);
    for (&m, c) in u.terms() {
        let mut acc = InvForm::constant(source_dim, c.clone());
        for (g, img) in images.iter().enumerate() {
            if m & (1 << g) != 0 {
                acc = acc.wedge(img);
            }
        }
        out = out.add(&acc);
    }
    out
}

/// Checks `f* ∘ ∂ = ∂ ∘ f*` and `f* ∘ ∂̄ = ∂̄ ∘ f*` on the target coframe.
pub fn check_map_compatible(
    matrix: &[Vec<GaussRat>],
    source: &LieModel,
    target: &LieModel,
) -> Result<()> {
    let n = target.dim();
    let d = source.dim();
    if matrix.len() != n || matrix.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidMap(format!("coframe matrix must be {n} × {d}")));
    }
    for g in 0..2 * n {
        let gen = InvForm::<GaussRat>::monomial(n, 1 << g, GaussRat::from(1));
        let pulled = pullback_by_matrix(matrix, d, &gen);
        let lhs_del = pullback_by_matrix(matrix, d, &target.del(&gen));
        let lhs_delbar = pullback_by_matrix(matrix, d, &target.delbar(&gen));
        if lhs_del != source.del(&pulled) || lhs_delbar != source.delbar(&pulled) {
            return Err(Error::InvalidMap(format!(
                "pullback does not commute with the differentials on {}",
                gen.mask_label(1 << g)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::catalog;
    use crate::invariant::form::ExactForm;

    type F = InvVectorField<GaussRat>;

    #[test]
    fn iwasawa_examples() {
        let m = catalog::iwasawa();
        let d = 3;
        let u = ExactForm::phi(d, 2).wedge(&ExactForm::phibar(d, 2));
        let expected = ExactForm::phi(d, 2)
            .wedge(&ExactForm::phibar(d, 0))
            .wedge(&ExactForm::phibar(d, 1));
        assert_eq!(m.delbar(&u), expected);
        assert!(m.d(&m.d(&u)).is_zero());
        assert_eq!(
            lie10_inv(&m, &F::frame(d, 0), &ExactForm::phi(d, 2)).unwrap(),
            ExactForm::phi(d, 1).neg()
        );
        let dv = m.volume_form::<GaussRat>();
        for j in 0..d {
            assert!(lie10_inv(&m, &F::frame(d, j), &dv).unwrap().is_zero());
        }
        assert_eq!(bracket_inv(&m, &F::frame(d, 0), &F::frame(d, 1)).unwrap(), F::frame(d, 2));
        for j in 0..d {
            assert!(is_holomorphic_field(&m, &F::frame(d, j)).unwrap());
        }
    }

    #[test]
    fn integration_conventions() {
        let m = catalog::iwasawa();
        let d = 3;
        let dv = m.volume_form::<GaussRat>();
        assert_eq!(m.integrate(&dv).unwrap(), GaussRat::from(1));
        let i = GaussRat::i();
        let mut prod = ExactForm::constant(d, GaussRat::from(1));
        for k in 0..d {
            prod = prod.wedge(&ExactForm::phi(d, k).wedge(&ExactForm::phibar(d, k)).scale(&i));
        }
        assert_eq!(prod, dv);
        assert!(m.integrate(&ExactForm::phi(d, 0)).is_err());
    }

    #[test]
    fn mixed_bracket_on_heisenberg_model() {
        let m = catalog::heis_mixed();
        let d = 3;
        let b = bracket_inv(&m, &F::frame(d, 0), &F::frame_bar(d, 0)).unwrap();
        let minus_one = GaussRat::from(-1);
        let expected = F::frame(d, 2).scale(&minus_one).add(&F::frame_bar(d, 2));
        assert_eq!(b, expected);
        assert!(!is_holomorphic_field(&m, &F::frame(d, 0)).unwrap());
        assert!(is_holomorphic_field(&m, &F::frame(d, 1)).unwrap());
    }

    #[test]
    fn pullback_examples() {
        let s = catalog::iwasawa();
        let t = catalog::torus(3);
        let mut mat = vec![vec![GaussRat::from(0); 3]; 3];
        mat[0][0] = GaussRat::from(1);
        mat[1][1] = GaussRat::from(1);
        check_map_compatible(&mat, &s, &t).unwrap();
        let dz3 = ExactForm::phi(3, 2).wedge(&ExactForm::phibar(3, 2));
        assert!(pullback_by_matrix(&mat, 3, &dz3).is_zero());
        let ident: Vec<Vec<GaussRat>> = (0..3)
            .map(|i| (0..3).map(|j| GaussRat::from((i == j) as i64)).collect())
            .collect();
        let u = ExactForm::phi(3, 0).wedge(&ExactForm::phibar(3, 2));
        assert_eq!(pullback_by_matrix(&ident, 3, &u), u);
        // the identity of C^3 is not a holomorphic map torus -> Iwasawa
        assert!(check_map_compatible(&ident, &t, &s).is_err());
    }

    #[test]
    fn flow_examples() {
        let m = catalog::iwasawa();
        let d = 3;
        let z1 = InvVectorField::<Complex64>::frame(d, 0);
        let u = ExactForm::phi(d, 2).to_float();
        assert!(flow_pullback(&m, &z1, 0.0, &u).unwrap().distance(&u) < 1e-15);
        let h = 1e-4;
        let fwd = flow_pullback(&m, &z1, h, &u).unwrap();
        let lie = lie10_inv(&m, &z1, &u).unwrap();
        let fd = fwd.sub(&u).scale(&Complex64::new(1.0 / h, 0.0));
        assert!(fd.distance(&lie) < 1e-3);
        let t = catalog::torus(2);
        let w = ExactForm::phi(2, 0).wedge(&ExactForm::phibar(2, 1)).to_float();
        let z = InvVectorField::<Complex64>::frame(2, 1);
        assert!(flow_pullback(&t, &z, 0.7, &w).unwrap().distance(&w) < 1e-15);
    }
}
