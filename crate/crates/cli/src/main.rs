use std::path::{Path, PathBuf};
use std::process::ExitCode;

use balmoment::moment::{GammaPolicy, FD_STEPS};
use balmoment_cli::commands::{
    cmd_catalog, cmd_cohomology, cmd_ma, cmd_moment, cmd_theorem, cmd_verify_identities,
    CohomologyKind, InputError, MaArgs, MomentArgs, TheoremArgs,
};
use balmoment_cli::report::Report;
use clap::{Parser, Subcommand, ValueEnum};

/// Exact identity checks, cohomology counts, moment-map evaluation and a
/// Monge-Ampère solver for invariant complex models.
#[derive(Parser)]
#[command(name = "balmoment", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Write the structured report here; defaults to `$BALMOMENT_OUT_DIR/<command>.jsonl` when that is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Aeppli,
    Bottchern,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Neumann,
    AnySolution,
}

#[derive(Subcommand)]
enum Command {
    /// List shipped models and maps.
    Catalog,
    /// Randomized exact checks of the exterior-calculus identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Invariant Aeppli or Bott-Chern dimension.
    Cohomology {
        /// Catalog name or model file.
        #[arg(long)]
        model: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Membership checks and the moment-map value of one tuple.
    Moment {
        /// Catalog name or map file.
        #[arg(long)]
        map: String,
        #[arg(long)]
        tuple: PathBuf,
        /// Overrides the policy in the tuple file.
        #[arg(long, value_enum)]
        gamma_policy: Option<Policy>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Finite-difference check of the second variation of the potential.
    Theorem {
        #[arg(long)]
        map: String,
        /// 1-based frame index of the holomorphic field.
        #[arg(long)]
        xi: usize,
        /// 1-based frame index of the second field, entering conjugated.
        #[arg(long)]
        eta: usize,
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<f64>>,
    },
    /// Solve the Monge-Ampère normalization on a flat torus.
    Ma {
        #[arg(long)]
        dim: usize,
        /// Mode list or sample file.
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 32)]
        res: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Starting iterate as a mode list or sample file.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Write the potential as a sample file.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<(&'static str, Report), InputError> {
    Ok(match &cli.command {
        Command::Catalog => ("catalog", cmd_catalog()),
        Command::VerifyIdentities { seed, trials } => {
            ("verify-identities", cmd_verify_identities(*seed, *trials)?)
        }
        Command::Cohomology { model, p, q, kind } => {
            let kind = match kind {
                Kind::Aeppli => CohomologyKind::Aeppli,
                Kind::Bottchern => CohomologyKind::BottChern,
            };
            ("cohomology", cmd_cohomology(model, *p, *q, kind)?)
        }
        Command::Moment {
            map,
            tuple,
            gamma_policy,
            seed,
            trials,
        } => {
            let gamma_policy = gamma_policy.map(|p| match p {
                Policy::Neumann => GammaPolicy::Neumann,
                Policy::AnySolution => GammaPolicy::AnySolution,
            });
            let args = MomentArgs {
                map,
                tuple,
                gamma_policy,
                seed: *seed,
                trials: *trials,
            };
            ("moment", cmd_moment(&args)?)
        }
        Command::Theorem { map, xi, eta, steps } => {
            let steps = steps.clone().unwrap_or_else(|| FD_STEPS.to_vec());
            let args = TheoremArgs {
                map,
                xi: *xi,
                eta: *eta,
                steps: &steps,
            };
            ("theorem", cmd_theorem(&args)?)
        }
        Command::Ma {
            dim,
            f,
            res,
            tol,
            init,
            solution,
        } => {
            let args = MaArgs {
                dim: *dim,
                f,
                res: *res,
                tol: *tol,
                init: init.as_deref(),
            };
            let (rep, phi) = cmd_ma(&args)?;
            if let (Some(path), Some(phi)) = (solution, phi) {
                write(path, &phi.to_text())?;
            }
            ("ma", rep)
        }
    })
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

const OUT_DIR_VAR: &str = "BALMOMENT_OUT_DIR";

fn output_path(cli: &Cli, name: &str, out_dir: Option<std::ffi::OsString>) -> Option<PathBuf> {
    cli.out
        .clone()
        .or_else(|| out_dir.map(|d| PathBuf::from(d).join(format!("{name}.jsonl"))))
}

fn exit_status(rep: &Report) -> u8 {
    if rep.passed() {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, rep) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let structured = rep.to_jsonl();
    if let Some(path) = output_path(&cli, name, std::env::var_os(OUT_DIR_VAR)) {
        if let Err(e) = write(&path, &structured) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.format {
        Format::Human => print!("{}", rep.to_human()),
        Format::Structured => print!("{structured}"),
    }
    ExitCode::from(exit_status(&rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use balmoment_cli::report::validate;

    fn data(name: &str) -> String {
        format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn go(args: &[&str]) -> Result<(&'static str, Report), InputError> {
        let cli = Cli::try_parse_from(std::iter::once("balmoment").chain(args.iter().copied()))
            .expect("arguments parse");
        run(&cli)
    }

    #[test]
    fn commands_emit_valid_reports() {
        let tuple = data("z3.tuple");
        let modes = data("cos_x1.modes");
        let cases: Vec<Vec<&str>> = vec![
            vec!["catalog"],
            vec!["verify-identities", "--trials", "5"],
            vec!["cohomology", "--model", "torus3", "--p", "1", "--q", "1", "--kind", "aeppli"],
            vec!["moment", "--map", "iwasawa-torus3", "--tuple", &tuple],
            vec!["ma", "--dim", "2", "--f", &modes, "--res", "16"],
        ];
        for args in cases {
            let (_, rep) = go(&args).unwrap();
            assert_eq!(exit_status(&rep), 0, "{args:?}");
            let back = validate(&rep.to_jsonl()).unwrap();
            assert_eq!(back.records.len(), rep.records.len());
        }
        let (_, rep) =
            go(&["cohomology", "--model", "torus3", "--p", "1", "--q", "1", "--kind", "aeppli"]).unwrap();
        assert_eq!(rep.records[0].value, serde_json::json!(9));
    }

    #[test]
    fn failures_and_input_errors() {
        let t2 = data("t2_z1.tuple");
        let (_, rep) = go(&["moment", "--map", "torus2-torus3", "--tuple", &t2]).unwrap();
        assert_eq!(exit_status(&rep), 1);
        assert!(rep.to_human().contains("Stokes obstruction"));
        let z3 = data("z3.tuple");
        assert!(go(&["moment", "--map", "torus2-torus3", "--tuple", &z3]).is_err());
        assert!(go(&["cohomology", "--model", "nope", "--p", "0", "--q", "0", "--kind", "aeppli"]).is_err());
        assert!(go(&["cohomology", "--model", "torus2", "--p", "3", "--q", "0", "--kind", "aeppli"]).is_err());
        assert!(go(&["theorem", "--map", "iwasawa-torus3", "--xi", "4", "--eta", "1"]).is_err());
        assert!(go(&["theorem", "--map", "iwasawa-torus3", "--xi", "1", "--eta", "1", "--steps", "0.1"]).is_err());
        let modes = data("cos_x1.modes");
        assert!(go(&["ma", "--dim", "2", "--f", &modes, "--res", "12"]).is_err());
        assert!(go(&["ma", "--dim", "1", "--f", &modes]).is_err());
        let err = go(&["ma", "--dim", "2", "--f", &z3]).unwrap_err();
        assert!(err.0.contains("line"), "{err}");
        assert!(Cli::try_parse_from(["balmoment", "cohomology", "--model", "torus3"]).is_err());
    }

    #[test]
    fn output_location() {
        let cli = Cli::try_parse_from(["balmoment", "catalog"]).unwrap();
        assert_eq!(output_path(&cli, "catalog", None), None);
        assert_eq!(
            output_path(&cli, "catalog", Some("/tmp/r".into())),
            Some(PathBuf::from("/tmp/r/catalog.jsonl"))
        );
        let cli = Cli::try_parse_from(["balmoment", "catalog", "--out", "x.jsonl"]).unwrap();
        assert_eq!(
            output_path(&cli, "catalog", Some("/tmp/r".into())),
            Some(PathBuf::from("x.jsonl"))
        );
    }
}
