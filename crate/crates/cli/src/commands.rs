//! The subcommands, each producing a [`Report`] or an input error.

use std::fmt;
use std::path::Path;

use balmoment::hodge::{aeppli_dim, bc_dim, HermitianMetricSpec};
use balmoment::invariant::{catalog, ExactForm, InvVectorField, LieModel};
use balmoment::masolver::{
    field_from_samples, parse_modes, solve_ma, FlatMetric, MaOptions, ScalarField, TorusGrid,
};
use balmoment::moment::{
    catalog_maps, gamma_for, map_by_name, mu_eval, pg_membership, mixed_difference_check,
    well_definedness_check, x_membership, GammaPolicy, MapSpec, MomentTuple,
};
use balmoment::symalg::{identity_suite, Expectation, IdentityCheck};
use balmoment::{moment, Error, GaussRat};
use num_traits::Zero;
use serde_json::json;

use crate::report::{Provenance, Record, Report, Status};

const COHOMOLOGY_ANCHOR: &str = "well defined in the sense";
const MOMENT_ANCHOR: &str = "we associate the map";
const THEOREM_ANCHOR: &str = "moment map for the action";
const MA_ANCHOR: &str = "a unique constant";
const CATALOG_ANCHOR: &str = "shipped catalog";

/// Relative residual accepted for floating-point checks.
pub const FLOAT_TOL: f64 = 1e-10;
/// Required observed convergence order of the finite-difference sweep.
pub const FD_MIN_ORDER: f64 = 1.9;
pub const FD_FINAL_TOL: f64 = 1e-4;

/// Malformed or inconsistent input; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input<E: fmt::Display>(context: &str) -> impl Fn(E) -> InputError + '_ {
    move |e| InputError(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(input(&path.display().to_string()))
}

/// A catalog model name or a model file.
pub fn load_model(arg: &str) -> Result<LieModel, InputError> {
    if let Some(m) = catalog::model_by_name(arg) {
        return Ok(m);
    }
    let text = read(Path::new(arg))?;
    LieModel::from_text(&text).map_err(input(arg))
}

/// A catalog map name or a map file whose models are catalog names.
pub fn load_map(arg: &str) -> Result<MapSpec, InputError> {
    if let Some(m) = map_by_name(arg) {
        return Ok(m);
    }
    let text = read(Path::new(arg))?;
    MapSpec::from_text(&text, catalog::model_by_name).map_err(input(arg))
}

pub fn load_tuple(path: &Path) -> Result<MomentTuple, InputError> {
    let text = read(path)?;
    MomentTuple::from_text(&text).map_err(input(&path.display().to_string()))
}

/// Modes or samples, told apart by the first directive.
pub fn load_field(grid: &TorusGrid, path: &Path) -> Result<ScalarField, InputError> {
    let name = path.display().to_string();
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("mode") {
        let modes = parse_modes(&text).map_err(input(&name))?;
        ScalarField::from_modes(grid.clone(), &modes).map_err(input(&name))
    } else {
        field_from_samples(grid.clone(), &text).map_err(input(&name))
    }
}

pub fn cmd_catalog() -> Report {
    let mut rep = Report::new("catalog", None);
    for m in catalog::models() {
        rep.push(
            Record::new(format!("model/{}", m.name()), CATALOG_ANCHOR, Status::Pass)
                .detail(format!("dim {}", m.dim()))
                .value(json!({
                    "dim": m.dim(),
                    "abelian": m.is_abelian(),
                    "complex_parallelizable": m.is_complex_parallelizable(),
                })),
        );
    }
    for (name, f) in catalog_maps() {
        rep.push(
            Record::new(format!("map/{name}"), CATALOG_ANCHOR, Status::Pass)
                .detail(format!(
                    "{} -> {}, rank {}",
                    f.source().name(),
                    f.target().model().name(),
                    f.rank()
                ))
                .value(json!({
                    "source": f.source().name(),
                    "target": f.target().model().name(),
                    "rank": f.rank(),
                })),
        );
    }
    rep
}

fn identity_record(prefix: &str, c: &IdentityCheck) -> Record {
    let status = match (c.expectation, c.as_expected()) {
        (_, false) => Status::Fail,
        (Expectation::Holds, true) => Status::Pass,
        (Expectation::Fails, true) => Status::ExpectedFailure,
    };
    let mut detail = format!("{} trials, {} violations", c.trials, c.violations);
    if let Some(ce) = &c.counterexample {
        detail.push_str(&format!("; first: {ce}"));
    }
    Record::new(format!("{prefix}/{}", c.name), &c.anchor, status)
        .residual(c.violations as f64)
        .provenance(Provenance::Trivial)
        .detail(detail)
}

pub fn cmd_verify_identities(seed: u64, trials: usize) -> Result<Report, InputError> {
    if trials == 0 {
        return Err(InputError("--trials must be positive".into()));
    }
    let mut rep = Report::new(format!("verify-identities --seed {seed} --trials {trials}"), Some(seed));
    for c in &identity_suite(seed, trials).checks {
        rep.push(identity_record("identity", c));
    }
    for c in &moment::second_order_check(seed, trials).checks {
        rep.push(identity_record("second-order", c));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohomologyKind {
    Aeppli,
    BottChern,
}

impl CohomologyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CohomologyKind::Aeppli => "aeppli",
            CohomologyKind::BottChern => "bottchern",
        }
    }
}

pub fn cmd_cohomology(
    model_arg: &str,
    p: usize,
    q: usize,
    kind: CohomologyKind,
) -> Result<Report, InputError> {
    let model = load_model(model_arg)?;
    let d = model.dim();
    if p > d || q > d {
        return Err(InputError(format!("bidegree ({p},{q}) exceeds dimension {d}")));
    }
    let dim = match kind {
        CohomologyKind::Aeppli => aeppli_dim(&model, p, q),
        CohomologyKind::BottChern => bc_dim(&model, p, q),
    };
    let mut rep = Report::new(
        format!("cohomology --model {} --p {p} --q {q} --kind {}", model.name(), kind.as_str()),
        None,
    );
    rep.push(
        Record::new(
            format!("{}/{}/{p},{q}", kind.as_str(), model.name()),
            COHOMOLOGY_ANCHOR,
            Status::Pass,
        )
        .provenance(Provenance::Derived)
        .detail(format!("dim {dim}"))
        .value(json!(dim)),
    );
    Ok(rep)
}

fn complex_json(z: num_complex::Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn gauss_string(g: &GaussRat) -> String {
    g.to_string()
}

pub struct MomentArgs<'a> {
    pub map: &'a str,
    pub tuple: &'a Path,
    pub gamma_policy: Option<GammaPolicy>,
    pub seed: u64,
    pub trials: usize,
}

pub fn cmd_moment(a: &MomentArgs) -> Result<Report, InputError> {
    if a.trials == 0 {
        return Err(InputError("--trials must be positive".into()));
    }
    let f = load_map(a.map)?;
    let mut t = load_tuple(a.tuple)?;
    if let Some(p) = a.gamma_policy {
        t.gamma_policy = p;
    }
    let src = f.source();
    let n = f.target().dim();
    if t.target_dim() != n {
        return Err(InputError(format!(
            "tuple has {} fields per side, the target needs n - 2 = {}",
            t.len(),
            n.saturating_sub(2)
        )));
    }
    if t.xis.iter().chain(&t.etabars).any(|v| v.dim() != src.dim()) {
        return Err(InputError(format!(
            "tuple fields do not live on `{}` (dimension {})",
            src.name(),
            src.dim()
        )));
    }
    let mut rep = Report::new(
        format!(
            "moment --map {} --tuple {} --gamma-policy {} --seed {} --trials {}",
            a.map,
            a.tuple.display(),
            t.gamma_policy.as_str(),
            a.seed,
            a.trials
        ),
        Some(a.seed),
    );
    let metric = HermitianMetricSpec::flat(src);
    let fail = |e: Error| e.to_string();

    let xm = x_membership(&f).map_err(input("x membership"))?;
    let mut rec = Record::check("moment/x-membership", MOMENT_ANCHOR, xm.is_member())
        .provenance(Provenance::Derived);
    rec = match (&xm.potential, &xm.impossibility) {
        (Some(g), _) => rec.detail(format!("exact potential with {} terms", term_count(g))),
        (None, Some(s)) => rec.detail(format!(
            "Stokes obstruction: the integral of the pulled-back top form is {}, while every ddbar-exact top form integrates to zero",
            gauss_string(&s.integral)
        )),
        (None, None) => rec.detail("pulled-back form is not ddbar-exact"),
    };
    rep.push(rec);

    let pg = pg_membership(src, &t).map_err(input("pairing domain"))?;
    rep.push(
        Record::check("moment/pairing-domain", MOMENT_ANCHOR, pg.member)
            .residual(pg.residuals.max_abs())
            .provenance(Provenance::Derived)
            .detail(format!(
                "holomorphic fields {}; swapped tuple member {}",
                if pg.lie_g { "preserve the volume" } else { "fail to preserve the volume" },
                pg.swapped_member
            )),
    );

    if !xm.is_member() {
        rep.push(
            Record::new("moment/mu", MOMENT_ANCHOR, Status::Fail)
                .detail("no potential: the map is outside the domain of the moment map"),
        );
        return Ok(rep);
    }

    match mu_eval(&f, &t, &metric) {
        Ok(mu) => {
            rep.push(
                Record::check(
                    "moment/class-certificate",
                    MOMENT_ANCHOR,
                    mu.gamma.reproduction_residual <= FLOAT_TOL,
                )
                .residual(mu.gamma.reproduction_residual)
                .provenance(Provenance::Derived)
                .detail(format!(
                    "i ddbar Gamma reproduces the pulled-back form ({} potential)",
                    mu.gamma.policy.as_str()
                )),
            );
            rep.push(
                Record::check("moment/mu", MOMENT_ANCHOR, mu.value.is_finite())
                    .provenance(Provenance::Derived)
                    .detail(format!("{:.12} {:+.12}i", mu.value.re, mu.value.im))
                    .value(complex_json(mu.value)),
            );
            let wd = well_definedness_check(src, &mu.gamma.gamma, &t, a.trials, a.seed)
                .map_err(input("gauge check"))?;
            rep.push(
                Record::check(
                    "moment/well-definedness",
                    MOMENT_ANCHOR,
                    wd.max_deviation <= FLOAT_TOL && wd.reversal_defect == 0.0,
                )
                .residual(wd.max_deviation)
                .provenance(Provenance::Derived)
                .detail(format!(
                    "{} gauge shifts, reversal defect {:e}",
                    wd.trials, wd.reversal_defect
                )),
            );
        }
        Err(e @ Error::NotInPairingDomain { .. }) => {
            rep.push(Record::new("moment/mu", MOMENT_ANCHOR, Status::Fail).detail(fail(e)));
            if let Ok(g) = gamma_for(&f, &metric, t.gamma_policy) {
                let wd = well_definedness_check(src, &g.gamma, &t, a.trials, a.seed)
                    .map_err(input("gauge check"))?;
                rep.push(
                    Record::check(
                        "moment/well-definedness",
                        MOMENT_ANCHOR,
                        wd.max_deviation <= FLOAT_TOL,
                    )
                    .residual(wd.max_deviation)
                    .provenance(Provenance::Derived)
                    .detail(format!("{} gauge shifts outside the pairing domain", wd.trials)),
                );
            }
        }
        Err(e) => {
            rep.push(Record::new("moment/mu", MOMENT_ANCHOR, Status::Fail).detail(fail(e)));
        }
    }
    Ok(rep)
}

fn term_count(g: &ExactForm) -> usize {
    g.terms().filter(|(_, c)| !c.is_zero()).count()
}

pub struct TheoremArgs<'a> {
    pub map: &'a str,
    /// 1-based frame indices.
    pub xi: usize,
    pub eta: usize,
    pub steps: &'a [f64],
}

pub fn cmd_theorem(a: &TheoremArgs) -> Result<Report, InputError> {
    let f = load_map(a.map)?;
    let d = f.source().dim();
    for (flag, k) in [("--xi", a.xi), ("--eta", a.eta)] {
        if k == 0 || k > d {
            return Err(InputError(format!("{flag} {k} outside 1..={d}")));
        }
    }
    if a.steps.len() < 2
        || a.steps.iter().any(|h| !(h.is_finite() && *h > 0.0 && *h < 1.0))
        || a.steps.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(InputError(
            "--steps needs at least two decreasing step sizes in (0, 1)".into(),
        ));
    }
    let xi = InvVectorField::<GaussRat>::frame(d, a.xi - 1);
    let eta = InvVectorField::<GaussRat>::frame(d, a.eta - 1);
    let metric = HermitianMetricSpec::flat(f.source());
    let steps: Vec<String> = a.steps.iter().map(|h| format!("{h}")).collect();
    let mut rep = Report::new(
        format!(
            "theorem --map {} --xi {} --eta {} --steps {}",
            a.map,
            a.xi,
            a.eta,
            steps.join(",")
        ),
        None,
    );
    let fd = match mixed_difference_check(&f, &xi, &eta, &metric, a.steps) {
        Ok(fd) => fd,
        Err(e @ Error::ClassObstruction { .. }) => {
            rep.push(Record::new("theorem/potential", THEOREM_ANCHOR, Status::Fail).detail(e.to_string()));
            return Ok(rep);
        }
        Err(e) => return Err(InputError(e.to_string())),
    };
    let table: Vec<serde_json::Value> = fd
        .steps
        .iter()
        .map(|s| json!({ "h": s.h, "error": s.error, "ddbar_error": s.ddbar_error }))
        .collect();
    let table_text: Vec<String> = fd
        .steps
        .iter()
        .map(|s| format!("h={} err={:.3e} ddbar_err={:.3e}", s.h, s.error, s.ddbar_error))
        .collect();
    let trivial = fd.target.max_abs() == 0.0;
    let pointwise_ok = if trivial {
        fd.final_error() <= FLOAT_TOL
    } else {
        fd.min_order() >= FD_MIN_ORDER && fd.final_error() < FD_FINAL_TOL
    };
    rep.push(
        Record::check("theorem/mixed-difference", THEOREM_ANCHOR, pointwise_ok)
            .residual(fd.final_error())
            .provenance(Provenance::Derived)
            .detail(format!(
                "orders {:?}; {}",
                fd.orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>(),
                table_text.join("; ")
            ))
            .value(json!({ "steps": table, "orders": fd.orders, "self_orders": fd.self_orders })),
    );
    rep.push(
        Record::check(
            "theorem/mixed-difference-ddbar",
            THEOREM_ANCHOR,
            fd.max_ddbar_error <= 1e-8,
        )
        .residual(fd.max_ddbar_error)
        .provenance(Provenance::Derived)
        .detail("ddbar of the mixed difference against ddbar of the target"),
    );
    Ok(rep)
}

pub struct MaArgs<'a> {
    pub dim: usize,
    pub f: &'a Path,
    pub res: usize,
    pub tol: f64,
    pub init: Option<&'a Path>,
}

pub fn cmd_ma(a: &MaArgs) -> Result<(Report, Option<ScalarField>), InputError> {
    if !(1e-12..=1e-2).contains(&a.tol) {
        return Err(InputError(format!("--tol {:e} outside [1e-12, 1e-2]", a.tol)));
    }
    let grid = TorusGrid::new(a.dim, a.res).map_err(input("grid"))?;
    let f = load_field(&grid, a.f)?;
    let initial = a.init.map(|p| load_field(&grid, p)).transpose()?;
    let opts = MaOptions {
        tol: a.tol,
        initial,
        ..MaOptions::default()
    };
    let mut rep = Report::new(
        format!(
            "ma --dim {} --f {} --res {} --tol {:e}{}",
            a.dim,
            a.f.display(),
            a.res,
            a.tol,
            a.init.map(|p| format!(" --init {}", p.display())).unwrap_or_default()
        ),
        None,
    );
    let metric = FlatMetric::identity(a.dim);
    match solve_ma(&f, &metric, &opts) {
        Ok(sol) => {
            let dg = &sol.diagnostics;
            rep.push(
                Record::check("ma/residual", MA_ANCHOR, sol.residual <= a.tol)
                    .residual(sol.residual)
                    .provenance(Provenance::Derived)
                    .detail(format!(
                        "C = {:.15}, {} Newton steps, {} restarts",
                        sol.c,
                        dg.step_lengths.len(),
                        dg.restarts
                    ))
                    .value(json!({
                        "c": sol.c,
                        "residual_history": dg.residual_history,
                        "cg_iterations": dg.cg_iterations,
                        "step_lengths": dg.step_lengths,
                        "tail_ratios": dg.tail_ratios,
                        "solve_shape": dg.solve_shape,
                    })),
            );
            rep.push(
                Record::check("ma/positivity", MA_ANCHOR, dg.min_eigenvalue > 0.0)
                    .residual(dg.min_eigenvalue)
                    .detail("min eigenvalue of g + Hess phi"),
            );
            rep.push(
                Record::check("ma/conservation", MA_ANCHOR, dg.conservation <= 1e-9)
                    .residual(dg.conservation)
                    .provenance(Provenance::Derived)
                    .detail("C mean(e^F) against mean volume ratio"),
            );
            rep.push(
                Record::check("ma/normalization", MA_ANCHOR, sol.phi.sup() == 0.0)
                    .residual(sol.phi.sup().abs())
                    .provenance(Provenance::Trivial)
                    .detail("sup phi"),
            );
            Ok((rep, Some(sol.phi)))
        }
        Err(e @ Error::MaFailure { .. }) => {
            rep.push(Record::new("ma/residual", MA_ANCHOR, Status::Fail).detail(e.to_string()));
            Ok((rep, None))
        }
        Err(e) => Err(InputError(e.to_string())),
    }
}
