//! One pass/fail line per acceptance criterion; exits nonzero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use balmoment::hodge::{aeppli_dim, bc_dim, neumann_gamma, HermitianMetricSpec};
use balmoment::invariant::{catalog, ExactForm, InvVectorField};
use balmoment::masolver::{
    positivity_check, residual, solve_ma, FlatMetric, FourierMode, MaOptions, ScalarField,
    TorusGrid,
};
use balmoment::moment::{
    claim_del_formula, claim_del_formula_chart, gamma_for, second_order_check, map_by_name,
    reversal_sides_chart, mixed_difference_check, well_definedness_check, x_membership, zero_potential,
    ChartTuple, GammaPolicy, MomentTuple, FD_STEPS,
};
use balmoment::symalg::{self, identity_suite, Sampler};
use balmoment::{Error, GaussRat};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn identities() -> Outcome {
    let start = Instant::now();
    let ids = identity_suite(0, 50);
    let second = second_order_check(0, 50);
    let secs = start.elapsed().as_secs_f64();
    let checks: Vec<_> = ids.checks.iter().chain(&second.checks).collect();
    let bad: Vec<&str> = checks
        .iter()
        .filter(|c| !c.as_expected() || c.trials < 50)
        .map(|c| c.name.as_str())
        .collect();
    ensure(
        bad.is_empty() && secs <= 60.0,
        format!("{} checks x 50 trials in {secs:.1}s; off: {bad:?}", checks.len()),
    )
}

fn closure_sums() -> Outcome {
    let mut s = Sampler::new(2, 0);
    let mut chart_cases = 0;
    for n in [3usize, 4] {
        for _ in 0..6 {
            let t = ChartTuple {
                xis: (0..n - 2).map(|_| s.divergence_free_field(3)).collect(),
                etabars: (0..n - 2)
                    .map(|_| s.divergence_free_field(3).conj())
                    .collect(),
            };
            for (direct, sum) in claim_del_formula_chart(&t).map_err(|e| e.to_string())? {
                if direct != sum {
                    return Err(format!("chart mismatch at n = {n}"));
                }
            }
            chart_cases += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for model in [catalog::torus(3), catalog::iwasawa()] {
        for (xs, es) in [
            (&[0][..], &[0][..]),
            (&[2], &[1]),
            (&[1], &[2]),
            (&[0, 1], &[0, 1]),
            (&[0, 2], &[1, 2]),
        ] {
            let t = MomentTuple::frames(3, xs, es);
            let r = claim_del_formula(&model, &t).map_err(|e| e.to_string())?;
            worst = worst.max(r.residual());
        }
    }
    ensure(
        worst <= 1e-12,
        format!("{chart_cases} exact chart cases; invariant residual {worst:e}"),
    )
}

fn reversal_signs() -> Outcome {
    let mut s = Sampler::new(3, 0);
    let mut cases = 0;
    for n in [3usize, 4] {
        for _ in 0..6 {
            let d = 3;
            let t = ChartTuple {
                xis: (0..n - 2).map(|_| s.holo_field(d, false)).collect(),
                etabars: (0..n - 2).map(|_| s.anti_field(d, false)).collect(),
            };
            let beta = s.form(d, n - 2, n - 3);
            for u in [symalg::del(&beta.conj()), symalg::delbar(&beta)] {
                let (l, r) = reversal_sides_chart(&u, &t).map_err(|e| e.to_string())?;
                if l != r {
                    return Err(format!("reversal mismatch at n = {n}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} exact cases for n = 3, 4"))
}

fn well_definedness() -> Outcome {
    let f = map_by_name("iwasawa-torus3").ok_or("missing catalog map")?;
    let metric = HermitianMetricSpec::flat(f.source());
    let t = MomentTuple::frames(3, &[2], &[2]);
    let g = gamma_for(&f, &metric, GammaPolicy::Neumann)
        .map_err(|e| e.to_string())?
        .gamma;
    let good = well_definedness_check(f.source(), &g, &t, 20, 7).map_err(|e| e.to_string())?;
    let hm = catalog::heis_mixed();
    let broken = MomentTuple::frames(3, &[0], &[0]);
    let bad = well_definedness_check(&hm, &zero_potential(&hm), &broken, 20, 7)
        .map_err(|e| e.to_string())?;
    ensure(
        good.max_deviation <= 1e-10 && bad.max_deviation > 1e-6 && !bad.pg_member,
        format!(
            "deviation {:.1e} on the domain, {:.1e} on the broken tuple",
            good.max_deviation, bad.max_deviation
        ),
    )
}

fn neumann() -> Outcome {
    let f = map_by_name("iwasawa-torus3").ok_or("missing catalog map")?;
    let metric = HermitianMetricSpec::flat(f.source());
    let pot = neumann_gamma(f.source(), &metric, &f.pulled_omega().to_float())
        .map_err(|e| e.to_string())?;
    let t3 = catalog::torus(3);
    let i = GaussRat::i();
    let w = |k: usize| {
        ExactForm::phi(3, k)
            .wedge(&ExactForm::phibar(3, k))
            .scale(&i)
    };
    let obstructed = neumann_gamma(
        &t3,
        &HermitianMetricSpec::flat(&t3),
        &w(0).wedge(&w(1)).to_float(),
    );
    let torus_ok = matches!(obstructed, Err(Error::ClassObstruction { .. }));
    ensure(
        pot.reproduction_residual <= 1e-10 && pot.coimage_residual <= 1e-10 && torus_ok,
        format!(
            "reproduction {:.1e}, coimage {:.1e}, torus obstruction raised: {torus_ok}",
            pot.reproduction_residual, pot.coimage_residual
        ),
    )
}

fn golden_dims() -> Vec<(usize, usize, usize, usize)> {
    include_str!("fixtures/iwasawa_dims.txt")
        .lines()
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (v[0], v[1], v[2], v[3])
        })
        .collect()
}

fn cohomology() -> Outcome {
    let t3 = catalog::torus(3);
    let torus = [(1, 1), (2, 2)]
        .iter()
        .all(|&(p, q)| aeppli_dim(&t3, p, q) == 9 && bc_dim(&t3, p, q) == 9);
    let iw = catalog::iwasawa();
    let gold = golden_dims();
    let off: Vec<(usize, usize)> = gold
        .iter()
        .filter(|&&(p, q, a, b)| aeppli_dim(&iw, p, q) != a || bc_dim(&iw, p, q) != b)
        .map(|&(p, q, _, _)| (p, q))
        .collect();
    ensure(
        torus && off.is_empty() && gold.len() == 16,
        format!("torus counts {torus}; {} Iwasawa bidegrees, mismatches {off:?}", gold.len()),
    )
}

fn theorem_fd() -> Outcome {
    let f = map_by_name("nil5-iwasawa").ok_or("missing catalog map")?;
    let metric = HermitianMetricSpec::flat(f.source());
    let z1 = InvVectorField::frame(5, 0);
    let r = mixed_difference_check(&f, &z1, &z1, &metric, &FD_STEPS).map_err(|e| e.to_string())?;
    let orders: Vec<String> = r.orders.iter().map(|o| format!("{o:.2}")).collect();
    ensure(
        r.target.max_abs() > 0.0 && r.min_order() >= 1.9 && r.final_error() < 1e-4,
        format!(
            "orders {orders:?}, relative error {:.3e} at h = {}, ddbar-level error {:.1e}",
            r.final_error(),
            FD_STEPS[FD_STEPS.len() - 1],
            r.max_ddbar_error
        ),
    )
}

fn mode(k: &[i64], re: f64) -> FourierMode {
    FourierMode {
        k: k.to_vec(),
        amp: Complex64::new(re, 0.0),
    }
}

fn monge_ampere() -> Outcome {
    let start = Instant::now();
    let m2 = FlatMetric::identity(2);
    let grid = TorusGrid::new(2, 64).map_err(|e| e.to_string())?;
    let zero = ScalarField::from_modes(grid.clone(), &[mode(&[0, 0, 0, 0], 0.0)])
        .map_err(|e| e.to_string())?;
    let z = solve_ma(&zero, &m2, &MaOptions::default()).map_err(|e| e.to_string())?;
    let zero_ok = z.c == 1.0 && z.phi.values().iter().all(|&v| v == 0.0);

    let g1 = TorusGrid::new(1, 64).map_err(|e| e.to_string())?;
    let f1 = ScalarField::from_modes(g1, &[mode(&[1, 0], 0.2), mode(&[0, 2], 0.1)])
        .map_err(|e| e.to_string())?;
    let s1 = solve_ma(&f1, &FlatMetric::identity(1), &MaOptions::default())
        .map_err(|e| e.to_string())?;
    let lin = linear_oracle(&f1);
    let lin_dev = s1
        .phi
        .broadcast(&[64, 64])
        .map_err(|e| e.to_string())?
        .values()
        .iter()
        .zip(&lin)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let f2 = ScalarField::from_modes(
        grid.clone(),
        &[mode(&[1, 0, 0, 0], 0.1), mode(&[1, 0, 1, 0], 0.05), mode(&[0, 0, 1, 1], 0.05)],
    )
    .map_err(|e| e.to_string())?;
    let opts = MaOptions {
        tol: 1e-10,
        ..MaOptions::default()
    };
    let s2 = solve_ma(&f2, &m2, &opts).map_err(|e| e.to_string())?;
    let res2 = residual(&s2.phi, &f2, &m2).map_err(|e| e.to_string())?;
    let pos2 = positivity_check(&s2.phi, &m2).map_err(|e| e.to_string())?;
    let start_field = ScalarField::from_modes(grid, &[mode(&[0, 0, 1, 0], 0.01)])
        .map_err(|e| e.to_string())?;
    let s2b = solve_ma(
        &f2,
        &m2,
        &MaOptions {
            initial: Some(start_field),
            ..opts
        },
    )
    .map_err(|e| e.to_string())?;
    let agree = s2.phi.max_diff(&s2b.phi).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        zero_ok
            && lin_dev <= 1e-10
            && res2 <= 1e-9
            && pos2 > 0.0
            && s2.diagnostics.conservation <= 1e-9
            && agree <= 1e-8
            && secs <= 300.0,
        format!(
            "zero data exact {zero_ok}; d=1 oracle {lin_dev:.1e}; d=2 residual {res2:.1e} after {} Newton steps, min eig {pos2:.3}, conservation {:.1e}, init spread {agree:.1e}; {secs:.1}s",
            s2.diagnostics.step_lengths.len(),
            s2.diagnostics.conservation
        ),
    )
}

/// Direct DFT solve of `phi_zz̄ = C e^F - 1` on a 64 x 64 grid.
fn linear_oracle(f: &ScalarField) -> Vec<f64> {
    use std::f64::consts::PI;
    let n = 64;
    let full = f.broadcast(&[n, n]).unwrap();
    let v = full.values();
    let c = v.len() as f64 / v.iter().map(|x| x.exp()).sum::<f64>();
    let rhs: Vec<f64> = v.iter().map(|x| c * x.exp() - 1.0).collect();
    let k = |i: usize| if 2 * i < n { i as f64 } else { i as f64 - n as f64 };
    let mut phi = vec![0.0; n * n];
    let cis = |t: f64| Complex64::from_polar(1.0, 2.0 * PI * t);
    for a in 0..n {
        for b in 0..n {
            if (a == 0 && b == 0) || 2 * a == n || 2 * b == n {
                continue;
            }
            let (ka, kb) = (k(a), k(b));
            let mut coef = Complex64::new(0.0, 0.0);
            for x in 0..n {
                for y in 0..n {
                    coef += rhs[x * n + y] * cis(-(ka * x as f64 + kb * y as f64) / n as f64);
                }
            }
            if coef.norm() < 1e-14 * (n * n) as f64 {
                continue;
            }
            let hat = coef / (n * n) as f64 / (-PI * PI * (ka * ka + kb * kb));
            for x in 0..n {
                for y in 0..n {
                    phi[x * n + y] += (hat * cis((ka * x as f64 + kb * y as f64) / n as f64)).re;
                }
            }
        }
    }
    let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    phi.iter().map(|p| p - top).collect()
}

fn immersion() -> Outcome {
    let f = map_by_name("torus2-torus3").ok_or("missing catalog map")?;
    let xm = x_membership(&f).map_err(|e| e.to_string())?;
    match (&xm.potential, &xm.impossibility) {
        (None, Some(s)) => Ok(format!("rejected; Stokes integral {}", s.integral)),
        _ => Err("immersion was not rejected by the Stokes diagnosis".into()),
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_balmoment");
    let tuple = data("z3.tuple");
    let modes = data("cos_x1.modes");
    let runs: Vec<Vec<String>> = vec![
        vec!["verify-identities".into(), "--seed".into(), "5".into(), "--trials".into(), "10".into()],
        vec![
            "moment".into(),
            "--map".into(),
            "iwasawa-torus3".into(),
            "--tuple".into(),
            tuple.display().to_string(),
            "--seed".into(),
            "3".into(),
        ],
        vec!["ma".into(), "--dim".into(), "2".into(), "--f".into(), modes.display().to_string(), "--res".into(), "16".into()],
        vec!["catalog".into()],
    ];
    for args in &runs {
        let once = || -> Result<Vec<u8>, String> {
            let out = Command::new(bin)
                .args(args)
                .args(["--format", "structured"])
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{args:?} exited with {}", out.status));
            }
            Ok(out.stdout)
        };
        let (a, b) = (once()?, once()?);
        if a != b || a.is_empty() {
            return Err(format!("{} reports differ", args[0]));
        }
    }
    Ok(format!("{} commands byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("identity suite", identities),
        ("closure sums", closure_sums),
        ("reversal signs", reversal_signs),
        ("gauge well-definedness", well_definedness),
        ("Neumann potential", neumann),
        ("cohomology counts", cohomology),
        ("mixed finite difference", theorem_fd),
        ("Monge-Ampere solver", monge_ampere),
        ("immersion rejection", immersion),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (tag, msg) = match run() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {:>2} {tag} {name}: {msg}", k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
