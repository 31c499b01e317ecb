//! Metric operators on the invariant complex: adjoints, the Bott-Chern
//! Laplacian and its Green operator, `∂∂̄`-potentials and cohomology counts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

use crate::basis::{self, Mask};
use crate::error::{Error, Result};
use crate::invariant::{operator_matrix, ExactForm, FloatForm, InvForm, LieModel};
use crate::linalg::{self, ExactMatrix};
use crate::scalar::GaussRat;

type CMat = DMatrix<Complex64>;

/// Relative singular-value cutoff for ranks, kernels and pseudo-inverses.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Bidegree that may be out of range (then the space is zero).
pub type Bideg = (i64, i64);

fn space_masks(d: usize, b: Bideg) -> Vec<Mask> {
    if b.0 < 0 || b.1 < 0 {
        return Vec::new();
    }
    basis::basis(d, b.0 as usize, b.1 as usize)
}

pub fn space_dim(d: usize, b: Bideg) -> usize {
    space_masks(d, b).len()
}

/// Differential operators whose matrices the Hodge machinery assembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOp {
    Del,
    Delbar,
    DelDelbar,
}

impl DiffOp {
    pub fn shift(self) -> Bideg {
        match self {
            DiffOp::Del => (1, 0),
            DiffOp::Delbar => (0, 1),
            DiffOp::DelDelbar => (1, 1),
        }
    }

    fn apply(self, model: &LieModel, u: &ExactForm) -> ExactForm {
        match self {
            DiffOp::Del => model.del(u),
            DiffOp::Delbar => model.delbar(u),
            DiffOp::DelDelbar => model.del(&model.delbar(u)),
        }
    }
}

/// Exact matrix of `op` on forms of bidegree `from`.
pub fn exact_operator(model: &LieModel, op: DiffOp, from: Bideg) -> ExactMatrix {
    let d = model.dim();
    let (sp, sq) = op.shift();
    let to = (from.0 + sp, from.1 + sq);
    let nsrc = space_dim(d, from);
    let ndst = space_dim(d, to);
    if nsrc == 0 || ndst == 0 {
        return vec![vec![GaussRat::zero(); nsrc]; ndst];
    }
    let f = (from.0 as usize, from.1 as usize);
    let t = (to.0 as usize, to.1 as usize);
    operator_matrix::<GaussRat>(d, f, t, |u| op.apply(model, u))
}

/// Dense complex matrix of a linear map between two bidegrees.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub from: Bideg,
    pub to: Bideg,
    pub mat: CMat,
}

impl OperatorMatrix {
    pub fn of(model: &LieModel, op: DiffOp, from: Bideg) -> Self {
        let rows = exact_operator(model, op, from);
        let d = model.dim();
        let (sp, sq) = op.shift();
        let to = (from.0 + sp, from.1 + sq);
        let nsrc = space_dim(d, from);
        let mat = CMat::from_fn(space_dim(d, to), nsrc, |i, j| rows[i][j].to_c64());
        OperatorMatrix { from, to, mat }
    }

    pub fn compose(&self, inner: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(inner.to, self.from, "composition bidegrees");
        OperatorMatrix {
            from: inner.from,
            to: self.to,
            mat: &self.mat * &inner.mat,
        }
    }

    pub fn apply(&self, dim: usize, u: &FloatForm) -> FloatForm {
        let x = to_vec(dim, self.from, u);
        from_vec(dim, self.to, &(&self.mat * x))
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn to_vec(d: usize, b: Bideg, u: &FloatForm) -> DVector<Complex64> {
    DVector::from_vec(space_masks(d, b).iter().map(|&m| u.coefficient(m)).collect())
}

fn from_vec(d: usize, b: Bideg, v: &DVector<Complex64>) -> FloatForm {
    let mut u = InvForm::zero(d);
    for (&m, c) in space_masks(d, b).iter().zip(v.iter()) {
        u = u.add(&InvForm::monomial(d, m, *c));
    }
    u
}

fn det(m: CMat) -> Complex64 {
    if m.nrows() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        m.determinant()
    }
}

/// Hermitian metric given by the Gram matrix `g_ij = ⟨φ^i, φ^j⟩` of the (1,0)-coframe.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetricSpec {
    dim: usize,
    gram_exact: Option<ExactMatrix>,
    gram: CMat,
    volume_scale: f64,
}

impl HermitianMetricSpec {
    /// `g = I`.
    pub fn flat(model: &LieModel) -> Self {
        let d = model.dim();
        let exact: ExactMatrix = (0..d)
            .map(|i| (0..d).map(|j| GaussRat::from((i == j) as i64)).collect())
            .collect();
        Self::exact(model, exact).expect("identity is positive definite")
    }

    pub fn exact(model: &LieModel, gram: ExactMatrix) -> Result<Self> {
        let d = model.dim();
        if gram.len() != d || gram.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMetric(format!("Gram matrix must be {d} × {d}")));
        }
        for i in 0..d {
            for j in 0..d {
                if gram[i][j] != gram[j][i].conj() {
                    return Err(Error::InvalidMetric("Gram matrix is not Hermitian".into()));
                }
            }
        }
        let float = CMat::from_fn(d, d, |i, j| gram[i][j].to_c64());
        let mut m = Self::float(model, float)?;
        m.gram_exact = Some(gram);
        Ok(m)
    }

    pub fn float(model: &LieModel, gram: CMat) -> Result<Self> {
        let d = model.dim();
        if gram.nrows() != d || gram.ncols() != d {
            return Err(Error::InvalidMetric(format!("Gram matrix must be {d} × {d}")));
        }
        if (&gram - gram.adjoint()).iter().any(|c| c.norm() > 1e-12) {
            return Err(Error::InvalidMetric("Gram matrix is not Hermitian".into()));
        }
        let min = gram.clone().symmetric_eigenvalues().min();
        if min <= 0.0 {
            return Err(Error::InvalidMetric(format!(
                "Gram matrix is not positive definite (min eigenvalue {min:.3e})"
            )));
        }
        let volume_scale = num_traits::ToPrimitive::to_f64(model.volume_scale()).unwrap_or(f64::NAN);
        Ok(HermitianMetricSpec {
            dim: d,
            gram_exact: None,
            gram,
            volume_scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coframe_gram(&self) -> &CMat {
        &self.gram
    }

    pub fn exact_gram(&self) -> Option<&ExactMatrix> {
        self.gram_exact.as_ref()
    }

    /// Gram matrix `G` on bidegree `b` with `⟨x, y⟩ = y^H G x`, including
    /// the volume weight of the L² pairing.
    pub fn form_gram(&self, b: Bideg) -> CMat {
        let d = self.dim;
        let masks = space_masks(d, b);
        let idx = |m: Mask, off: usize| -> Vec<usize> {
            (0..d).filter(|&i| m & (1 << (i + off)) != 0).collect()
        };
        let n = masks.len();
        let mut g = CMat::zeros(n, n);
        for (a, &ma) in masks.iter().enumerate() {
            let (ia, ja) = (idx(ma, 0), idx(ma, d));
            for (c, &mc) in masks.iter().enumerate() {
                let (ic, jc) = (idx(mc, 0), idx(mc, d));
                let holo = det(CMat::from_fn(ia.len(), ic.len(), |r, s| self.gram[(ia[r], ic[s])]));
                let anti = det(CMat::from_fn(ja.len(), jc.len(), |r, s| {
                    self.gram[(ja[r], jc[s])].conj()
                }));
                // ⟨e_a, e_c⟩ = holo·anti and G[c][a] = ⟨e_a, e_c⟩
                g[(c, a)] = holo * anti * self.volume_scale;
            }
        }
        g
    }

    pub fn inner(&self, u: &FloatForm, v: &FloatForm, b: Bideg) -> Complex64 {
        let g = self.form_gram(b);
        let x = to_vec(self.dim, b, u);
        let y = to_vec(self.dim, b, v);
        (y.adjoint() * g * x)[(0, 0)]
    }

    pub fn norm(&self, u: &FloatForm, b: Bideg) -> f64 {
        self.inner(u, u, b).re.max(0.0).sqrt()
    }

    /// `γ = i Σ h_jk φ^j ∧ φ̄^k` with `h` the metric on `T^{1,0}` dual to the coframe Gram.
    pub fn gamma_form(&self) -> FloatForm {
        let d = self.dim;
        let h = self
            .gram
            .clone()
            .try_inverse()
            .expect("positive definite")
            .transpose();
        let mut out = InvForm::zero(d);
        for j in 0..d {
            for k in 0..d {
                let m = (1 << j) | (1 << (d + k));
                out = out.add(&InvForm::monomial(d, m, Complex64::new(0.0, 1.0) * h[(j, k)]));
            }
        }
        out
    }
}

/// `A* = G_V^{-1} A^H G_W`.
pub fn adjoint(op: &OperatorMatrix, metric: &HermitianMetricSpec) -> OperatorMatrix {
    let gv = metric.form_gram(op.from);
    let gw = metric.form_gram(op.to);
    let gv_inv = gv.try_inverse().expect("Gram matrices are invertible");
    OperatorMatrix {
        from: op.to,
        to: op.from,
        mat: gv_inv * op.mat.adjoint() * gw,
    }
}

/// `max |⟨A e_i, f_j⟩ − ⟨e_i, B f_j⟩|` over basis pairs.
pub fn adjointness_defect(
    op: &OperatorMatrix,
    candidate: &OperatorMatrix,
    metric: &HermitianMetricSpec,
) -> f64 {
    let gv = metric.form_gram(op.from);
    let gw = metric.form_gram(op.to);
    let lhs = gw * &op.mat;
    let rhs = candidate.mat.adjoint() * gv;
    (lhs - rhs).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn gram_sqrt(g: &CMat) -> (CMat, CMat) {
    if g.nrows() == 0 {
        return (CMat::zeros(0, 0), CMat::zeros(0, 0));
    }
    let chol = g.clone().cholesky().expect("Gram matrices are positive definite");
    let r = chol.l().adjoint();
    let r_inv = r.clone().try_inverse().expect("triangular factor is invertible");
    (r, r_inv)
}

/// The Bott-Chern Laplacian on bidegree `(p, q)`, assembled from its six terms.
pub fn delta_bc(model: &LieModel, metric: &HermitianMetricSpec, p: usize, q: usize) -> OperatorMatrix {
    let b = (p as i64, q as i64);
    let del = |from: Bideg| OperatorMatrix::of(model, DiffOp::Del, from);
    let delbar = |from: Bideg| OperatorMatrix::of(model, DiffOp::Delbar, from);
    let ddbar = |from: Bideg| OperatorMatrix::of(model, DiffOp::DelDelbar, from);
    let adj = |o: &OperatorMatrix| adjoint(o, metric);

    let d_here = del(b);
    let db_here = delbar(b);
    let dd_here = ddbar(b);
    let dd_in = ddbar((b.0 - 1, b.1 - 1));
    // ∂*∂̄ starting at (p, q) and at (p+1, q-1)
    let dstar_db_here = adj(&del((b.0 - 1, b.1 + 1))).compose(&db_here);
    let db_in = delbar((b.0 + 1, b.1 - 1));
    let dstar_db_in = adj(&del((b.0, b.1))).compose(&db_in);

    let terms = [
        adj(&d_here).compose(&d_here),
        adj(&db_here).compose(&db_here),
        adj(&dd_here).compose(&dd_here),
        dd_in.compose(&adj(&dd_in)),
        adj(&dstar_db_here).compose(&dstar_db_here),
        dstar_db_in.compose(&adj(&dstar_db_in)),
    ];
    let n = space_dim(model.dim(), b);
    let mut mat = CMat::zeros(n, n);
    for t in &terms {
        mat += &t.mat;
    }
    OperatorMatrix { from: b, to: b, mat }
}

/// Spectral data of a metric-self-adjoint PSD operator.
#[derive(Debug, Clone)]
pub struct Green {
    pub pinv: CMat,
    pub harmonic_projector: CMat,
    pub kernel_dim: usize,
    pub eigenvalues: Vec<f64>,
}

/// Pseudo-inverse and kernel projector by Hermitian eigendecomposition in
/// Gram-orthonormal coordinates.
pub fn green(op: &OperatorMatrix, metric: &HermitianMetricSpec) -> Green {
    assert_eq!(op.from, op.to, "Green operator of an endomorphism");
    let n = op.mat.nrows();
    if n == 0 {
        return Green {
            pinv: CMat::zeros(0, 0),
            harmonic_projector: CMat::zeros(0, 0),
            kernel_dim: 0,
            eigenvalues: Vec::new(),
        };
    }
    let (r, r_inv) = gram_sqrt(&metric.form_gram(op.from));
    let t = &r * &op.mat * &r_inv;
    let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = t.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = RANK_CUTOFF * max;
    let mut pinv_t = CMat::zeros(n, n);
    let mut proj_t = CMat::zeros(n, n);
    let mut kernel_dim = 0;
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        let outer = &v * v.adjoint();
        if lam.abs() <= cut || max == 0.0 {
            proj_t += outer;
            kernel_dim += 1;
        } else {
            pinv_t += outer * Complex64::new(1.0 / lam, 0.0);
        }
    }
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Green {
        pinv: &r_inv * pinv_t * &r,
        harmonic_projector: &r_inv * proj_t * &r,
        kernel_dim,
        eigenvalues,
    }
}

/// `G u` for the Green operator of `op`; also returns the norm of the harmonic
/// part of `u` that was projected away.
pub fn green_apply(
    op: &OperatorMatrix,
    metric: &HermitianMetricSpec,
    u: &FloatForm,
) -> (FloatForm, f64) {
    let d = metric.dim();
    let g = green(op, metric);
    let x = to_vec(d, op.from, u);
    let harm = from_vec(d, op.from, &(&g.harmonic_projector * &x));
    let out = from_vec(d, op.from, &(&g.pinv * x));
    (out, metric.norm(&harm, op.from))
}

/// Orthonormal basis (columns) of the range of `a`, singular values above the cutoff.
fn orth_range(a: &CMat) -> CMat {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let max = svd.singular_values.iter().fold(0.0f64, |x, &y| x.max(y));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| max > 0.0 && svd.singular_values[k] > RANK_CUTOFF * max)
        .collect();
    CMat::from_fn(a.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Gram-orthogonal projector onto the image of `op` in its codomain.
pub fn range_projector(op: &OperatorMatrix, metric: &HermitianMetricSpec) -> CMat {
    let (rv, rv_inv) = gram_sqrt(&metric.form_gram(op.from));
    let (rw, rw_inv) = gram_sqrt(&metric.form_gram(op.to));
    let _ = rv;
    let q = orth_range(&(&rw * &op.mat * &rv_inv));
    &rw_inv * (&q * q.adjoint()) * &rw
}

/// Gram-orthogonal projector onto the kernel of `op` in its domain.
pub fn kernel_projector(op: &OperatorMatrix, metric: &HermitianMetricSpec) -> CMat {
    let (rv, rv_inv) = gram_sqrt(&metric.form_gram(op.from));
    let (rw, _) = gram_sqrt(&metric.form_gram(op.to));
    let n = op.mat.ncols();
    let a = &rw * &op.mat * &rv_inv;
    let q = orth_range(&a.adjoint());
    &rv_inv * (CMat::identity(n, n) - &q * q.adjoint()) * &rv
}

/// Neumann-type `∂∂̄`-potential with its certificates.
#[derive(Debug, Clone)]
pub struct NeumannPotential {
    /// `Γ` with `i∂∂̄Γ = fpull`.
    pub gamma: FloatForm,
    pub bidegree: Bideg,
    /// `‖i∂∂̄Γ − fpull‖ / ‖fpull‖` in the Gram norm.
    pub reproduction_residual: f64,
    /// Relative norm of the component of `Γ` in `ker ∂∂̄`.
    pub kernel_component: f64,
    /// Relative distance of `Γ` from `Im (∂∂̄)*`.
    pub coimage_residual: f64,
}

/// Relative tolerance for deciding `∂∂̄`-exactness in floating point.
pub const EXACTNESS_TOL: f64 = 1e-9;

/// Precomputed operators for `iΓ = (∂∂̄)* Δ_BC^{-1} fpull` on one bidegree,
/// reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct NeumannSolver {
    dim: usize,
    bidegree: Bideg,
    metric: HermitianMetricSpec,
    dd: OperatorMatrix,
    range: CMat,
    kernel: CMat,
    coimage: CMat,
    /// `−i (∂∂̄)* G_Δ`.
    solve: CMat,
}

impl NeumannSolver {
    /// Solver for right-hand sides of bidegree `(p, q)`.
    pub fn new(model: &LieModel, metric: &HermitianMetricSpec, p: usize, q: usize) -> Self {
        let b = (p as i64, q as i64);
        let below = (b.0 - 1, b.1 - 1);
        let dd = OperatorMatrix::of(model, DiffOp::DelDelbar, below);
        let dd_star = adjoint(&dd, metric);
        let g = green(&delta_bc(model, metric, p, q), metric);
        NeumannSolver {
            dim: model.dim(),
            bidegree: b,
            metric: metric.clone(),
            range: range_projector(&dd, metric),
            kernel: kernel_projector(&dd, metric),
            coimage: range_projector(&dd_star, metric),
            solve: &dd_star.mat * g.pinv * Complex64::new(0.0, -1.0),
            dd,
        }
    }

    pub fn solve(&self, fpull: &FloatForm) -> Result<NeumannPotential> {
        let d = self.dim;
        let b = self.bidegree;
        let below = (b.0 - 1, b.1 - 1);
        let zero = || NeumannPotential {
            gamma: InvForm::zero(d),
            bidegree: below,
            reproduction_residual: 0.0,
            kernel_component: 0.0,
            coimage_residual: 0.0,
        };
        let x = to_vec(d, b, fpull);
        let stray = fpull.sub(&from_vec(d, b, &x));
        if !stray.is_zero() {
            let got = stray.terms().next().map(|(&m, _)| basis::bidegree(m, d)).unwrap_or((0, 0));
            return Err(Error::Bidegree {
                got,
                expected: format!("({}, {})", b.0, b.1),
            });
        }
        let fnorm = self.metric.norm(fpull, b);
        if fnorm == 0.0 {
            return Ok(zero());
        }
        let outside = from_vec(d, b, &(&x - &self.range * &x));
        let obstruction = self.metric.norm(&outside, b) / fnorm;
        if obstruction > EXACTNESS_TOL || below.0 < 0 || below.1 < 0 {
            return Err(Error::ClassObstruction {
                residual: if below.0 < 0 || below.1 < 0 { 1.0 } else { obstruction },
            });
        }
        let gv = &self.solve * &x;
        let gamma = from_vec(d, below, &gv);
        let back = self.dd.apply(d, &gamma).scale(&Complex64::new(0.0, 1.0));
        let reproduction_residual = self.metric.norm(&back.sub(fpull), b) / fnorm;
        let gnorm = self.metric.norm(&gamma, below).max(f64::MIN_POSITIVE);
        let kernel_component =
            self.metric.norm(&from_vec(d, below, &(&self.kernel * &gv)), below) / gnorm;
        let coimage_residual =
            self.metric.norm(&from_vec(d, below, &(&gv - &self.coimage * &gv)), below) / gnorm;
        Ok(NeumannPotential {
            gamma,
            bidegree: below,
            reproduction_residual,
            kernel_component,
            coimage_residual,
        })
    }
}

/// `iΓ = (∂∂̄)* Δ_BC^{-1} fpull` on the invariant complex.
pub fn neumann_gamma(
    model: &LieModel,
    metric: &HermitianMetricSpec,
    fpull: &FloatForm,
) -> Result<NeumannPotential> {
    let Some((p, q)) = fpull.terms().next().map(|(&m, _)| basis::bidegree(m, model.dim())) else {
        return Ok(NeumannPotential {
            gamma: InvForm::zero(model.dim()),
            bidegree: (0, 0),
            reproduction_residual: 0.0,
            kernel_component: 0.0,
            coimage_residual: 0.0,
        });
    };
    NeumannSolver::new(model, metric, p, q).solve(fpull)
}

/// Exact test of `u ∈ Im ∂∂̄`; returns a potential `v` with `∂∂̄ v = u`.
pub fn ddbar_preimage_exact(model: &LieModel, u: &ExactForm) -> Option<ExactForm> {
    let d = model.dim();
    let Some((p, q)) = u.bidegree() else {
        return Some(InvForm::zero(d));
    };
    if p == 0 || q == 0 {
        return None;
    }
    let below = (p - 1, q - 1);
    let a = exact_operator(model, DiffOp::DelDelbar, (below.0 as i64, below.1 as i64));
    let x = linalg::solve(&a, &u.to_vector(p, q))?;
    Some(InvForm::from_vector(d, below.0, below.1, &x))
}

fn nullity(m: &ExactMatrix, ncols: usize) -> usize {
    ncols - linalg::rank(m)
}

/// `dim ker ∂∂̄ − rank(Im ∂ + Im ∂̄)` on invariant `(p, q)`-forms, exact.
pub fn aeppli_dim(model: &LieModel, p: usize, q: usize) -> usize {
    let d = model.dim();
    let b = (p as i64, q as i64);
    let n = space_dim(d, b);
    let ker = nullity(&exact_operator(model, DiffOp::DelDelbar, b), n);
    let im_del = exact_operator(model, DiffOp::Del, (b.0 - 1, b.1));
    let im_delbar = exact_operator(model, DiffOp::Delbar, (b.0, b.1 - 1));
    ker - linalg::rank(&linalg::hstack(&im_del, &im_delbar))
}

/// `dim(ker ∂ ∩ ker ∂̄) − rank ∂∂̄` on invariant `(p, q)`-forms, exact.
pub fn bc_dim(model: &LieModel, p: usize, q: usize) -> usize {
    let d = model.dim();
    let b = (p as i64, q as i64);
    let n = space_dim(d, b);
    let del = exact_operator(model, DiffOp::Del, b);
    let delbar = exact_operator(model, DiffOp::Delbar, b);
    let closed = nullity(&linalg::vstack(&del, &delbar), n);
    closed - linalg::rank(&exact_operator(model, DiffOp::DelDelbar, (b.0 - 1, b.1 - 1)))
}

/// Orthogonal splitting `u = h + (Im ∂∂̄ part) + (Im ∂* + Im ∂̄* part)`.
#[derive(Debug, Clone)]
pub struct ThreeSpace {
    pub harmonic: FloatForm,
    pub ddbar_part: FloatForm,
    pub adjoint_part: FloatForm,
    /// Largest pairwise |inner product| between parts, relative to `‖u‖²`.
    pub orthogonality: f64,
}

pub fn three_space_decompose(
    model: &LieModel,
    metric: &HermitianMetricSpec,
    u: &FloatForm,
    p: usize,
    q: usize,
) -> ThreeSpace {
    let d = model.dim();
    let b = (p as i64, q as i64);
    let x = to_vec(d, b, u);
    let g = green(&delta_bc(model, metric, p, q), metric);
    let harmonic = from_vec(d, b, &(&g.harmonic_projector * &x));
    let dd = OperatorMatrix::of(model, DiffOp::DelDelbar, (b.0 - 1, b.1 - 1));
    let ddbar_part = from_vec(d, b, &(range_projector(&dd, metric) * &x));
    let adjoint_part = u.sub(&harmonic).sub(&ddbar_part);
    let scale = metric.inner(u, u, b).norm().max(f64::MIN_POSITIVE);
    let parts = [&harmonic, &ddbar_part, &adjoint_part];
    let mut orthogonality: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            orthogonality = orthogonality.max(metric.inner(parts[i], parts[j], b).norm() / scale);
        }
    }
    ThreeSpace {
        harmonic,
        ddbar_part,
        adjoint_part,
        orthogonality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::catalog;

    #[test]
    fn torus_counts() {
        let t = catalog::torus(3);
        assert_eq!(aeppli_dim(&t, 1, 1), 9);
        assert_eq!(aeppli_dim(&t, 2, 2), 9);
        assert_eq!(bc_dim(&t, 1, 1), 9);
        let m = HermitianMetricSpec::flat(&t);
        let lap = delta_bc(&t, &m, 1, 1);
        assert_eq!(lap.max_abs(), 0.0);
        assert_eq!(green(&lap, &m).kernel_dim, 9);
    }

    #[test]
    fn adjoint_properties() {
        let m = catalog::iwasawa();
        let g = vec![
            vec![GaussRat::from(2), GaussRat::from_ints(0, 1), GaussRat::from(0)],
            vec![GaussRat::from_ints(0, -1), GaussRat::from(2), GaussRat::from(0)],
            vec![GaussRat::from(0), GaussRat::from(0), GaussRat::from(1)],
        ];
        let metric = HermitianMetricSpec::exact(&m, g).unwrap();
        let op = OperatorMatrix::of(&m, DiffOp::Delbar, (1, 1));
        let adj = adjoint(&op, &metric);
        assert!(adjointness_defect(&op, &adj, &metric) < 1e-12);
        let back = adjoint(&adj, &metric);
        assert!((&back.mat - &op.mat).iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn rejects_bad_metric() {
        let m = catalog::torus(2);
        let g = vec![
            vec![GaussRat::from(1), GaussRat::from(2)],
            vec![GaussRat::from(2), GaussRat::from(1)],
        ];
        assert!(HermitianMetricSpec::exact(&m, g).is_err());
    }

    #[test]
    fn laplacian_is_psd_and_green_is_pseudo_inverse() {
        let m = catalog::iwasawa();
        let metric = HermitianMetricSpec::flat(&m);
        for (p, q) in [(1, 1), (2, 2), (1, 2)] {
            let lap = delta_bc(&m, &metric, p, q);
            let g = green(&lap, &metric);
            assert!(g.eigenvalues[0] > -1e-10);
            let lgl = &lap.mat * &g.pinv * &lap.mat;
            assert!((lgl - &lap.mat).iter().all(|c| c.norm() < 1e-10));
        }
    }

    #[test]
    fn neumann_on_iwasawa() {
        let m = catalog::iwasawa();
        let metric = HermitianMetricSpec::flat(&m);
        let i = GaussRat::i();
        let w = |k: usize| ExactForm::phi(3, k).wedge(&ExactForm::phibar(3, k)).scale(&i);
        let f = w(0).wedge(&w(1));
        let pot = neumann_gamma(&m, &metric, &f.to_float()).unwrap();
        assert!(pot.reproduction_residual < 1e-10);
        assert!(pot.kernel_component < 1e-10);
        // the hand potential iφ3∧φ̄3 differs from the Neumann one by ker ∂∂̄
        let hand = w(2).to_float();
        let diff = hand.sub(&pot.gamma);
        let dd = OperatorMatrix::of(&m, DiffOp::DelDelbar, (1, 1));
        assert!(dd.apply(3, &diff).max_abs() < 1e-12);
        let t = catalog::torus(3);
        let tm = HermitianMetricSpec::flat(&t);
        assert!(matches!(
            neumann_gamma(&t, &tm, &f.to_float()),
            Err(Error::ClassObstruction { .. })
        ));
    }

    #[test]
    fn three_space_parts() {
        let m = catalog::iwasawa();
        let metric = HermitianMetricSpec::flat(&m);
        let i = GaussRat::i();
        let u = ExactForm::phi(3, 0)
            .wedge(&ExactForm::phibar(3, 0))
            .scale(&i)
            .add(&ExactForm::phi(3, 2).wedge(&ExactForm::phibar(3, 1)))
            .to_float();
        let parts = three_space_decompose(&m, &metric, &u, 1, 1);
        assert!(parts.orthogonality < 1e-10);
        let sum = parts.harmonic.add(&parts.ddbar_part).add(&parts.adjoint_part);
        assert!(sum.distance(&u) < 1e-12);
    }
}

#[cfg(test)]
mod harmonic_counts {
    use super::*;
    use crate::invariant::catalog;

    #[test]
    fn kernel_of_laplacian_matches_bott_chern_count() {
        for model in catalog::models() {
            let metric = HermitianMetricSpec::flat(&model);
            let d = model.dim();
            for p in 0..=d {
                for q in 0..=d {
                    let k = green(&delta_bc(&model, &metric, p, q), &metric).kernel_dim;
                    assert_eq!(k, bc_dim(&model, p, q), "{} ({p},{q})", model.name());
                }
            }
        }
    }
}
