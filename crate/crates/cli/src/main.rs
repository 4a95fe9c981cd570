//! `wignerkit` command-line front end.
//!
//! Exit codes: 0 when every checked property holds, 1 when a property is
//! violated (the JSON output carries the witness), 2 on operational errors.

use std::fs;
use std::io::{self, Read, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use wignerkit::commutative::{composition_operator, extract_point_map, ExtractError, PointMap};
use wignerkit::jordan::{
    is_jordan_star_homomorphism_with, kadison_split, random_jordan_iso, verify_isometry_with, verify_order_iso,
    verify_orthoisomorphism, Check, LinearMapTable,
};
use wignerkit::raymaps::{as_blackbox, classify_with, ClassifyConfig, MapKind, RayMapBlackBox, RayMapCanonical};
use wignerkit::rng::stream;
use wignerkit::wigner::{
    assemble_with, builtin_map, random_canonical, random_injective_layout, verify_induction_with, AssemblyFailure,
    InductionOutcome,
};
use wignerkit::{AlgebraSpec, Execution};

#[derive(Parser)]
#[command(name = "wignerkit", version, about = "Classify and reconstruct pure-state maps of finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Input JSON file ("-" or absent: standard input).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Built-in black-box map, e.g. `dim2-bloch:alpha=0.25`.
    #[arg(long, global = true)]
    map: Option<String>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a ray map against the orthogonality, fibre and TP properties.
    Classify,
    /// Reconstruct the inducing linear map and verify it.
    Reconstruct,
    /// Check a Jordan *-map table and split it into multiplicative and anti-multiplicative parts.
    JordanSplit,
    /// Build a composition operator from a point map, or extract the point map from a table.
    BanachStone,
    /// Emit seeded random fixtures.
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Canonical ray map; a random bi-orthogonal layout unless dims are given.
    Canonical {
        #[arg(long, value_delimiter = ',')]
        source_dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        target_dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        assignment: Option<Vec<usize>>,
        /// `linear` or `antilinear` per source block (default: all linear).
        #[arg(long, value_delimiter = ',')]
        kinds: Option<Vec<String>>,
    },
    /// Jordan *-isomorphism table.
    Jordan {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Algebra layout.
    Algebra {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Point map between finite sets.
    PointMap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
    },
}

/// Result of a command: the JSON document and whether it reports a violation.
struct Report {
    body: Value,
    violated: bool,
}

impl Report {
    fn holds(body: impl Serialize) -> Result<Self> {
        Ok(Report {
            body: serde_json::to_value(body)?,
            violated: false,
        })
    }

    fn violated(body: impl Serialize) -> Result<Self> {
        Ok(Report {
            body: serde_json::to_value(body)?,
            violated: true,
        })
    }
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            bail!("--samples must be at least 1");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            bail!("--tol must be a positive number");
        }
        Ok(())
    }

    fn read_input(&self) -> Result<String> {
        match &self.input {
            Some(path) if path.as_os_str() != "-" => {
                fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
            }
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s).context("cannot read standard input")?;
                Ok(s)
            }
        }
    }

    fn parse_input<T: serde::de::DeserializeOwned>(&self, what: &str) -> Result<T> {
        let text = self.read_input()?;
        serde_json::from_str(&text).with_context(|| format!("input is not a valid {what}"))
    }

    /// The black box named by `--map`, or the canonical map read from the input.
    fn ray_map(&self) -> Result<RayMapBlackBox> {
        match &self.map {
            Some(name) => Ok(builtin_map(name)?),
            None => {
                let canonical: RayMapCanonical = self.parse_input("canonical ray map")?;
                Ok(as_blackbox(&canonical)?)
            }
        }
    }
}

fn cmd_classify(c: &Common) -> Result<Report> {
    let map = c.ray_map()?;
    let config = ClassifyConfig {
        samples: c.samples,
        seed: c.seed,
        tol: c.tol,
        execution: c.execution(),
    };
    let report = classify_with(&map, &config);
    if report.any_fails() {
        Report::violated(&report)
    } else if report.all_hold() {
        Report::holds(&report)
    } else {
        bail!("classification undetermined: {}", serde_json::to_string(&report)?)
    }
}

fn cmd_reconstruct(c: &Common) -> Result<Report> {
    let map = c.ray_map()?;
    let phi = match assemble_with(&map, c.tol, c.execution()) {
        Ok(phi) => phi,
        Err(AssemblyFailure::Evaluation(e)) => bail!("map evaluation failed: {e}"),
        Err(failure) => {
            return Report::violated(json!({
                "failure": failure,
                "message": failure.to_string(),
                "finite_dim": true,
            }))
        }
    };
    let verification = verify_induction_with(&map, &phi, c.samples, c.seed, c.tol, c.execution())?;
    let body = json!({ "map": phi, "verification": verification, "finite_dim": true });
    match verification {
        InductionOutcome::Verified { .. } => Report::holds(body),
        InductionOutcome::Fails { .. } => Report::violated(body),
        InductionOutcome::Undetermined { reason } => bail!("induction check undetermined: {reason}"),
    }
}

fn cmd_jordan_split(c: &Common) -> Result<Report> {
    let table: LinearMapTable = c.parse_input("linear map table")?;
    let jordan = is_jordan_star_homomorphism_with(&table, c.tol, c.execution());
    if !jordan.is_verified() {
        return Report::violated(json!({
            "F_blocks": null,
            "tags": null,
            "verified": { "jordan": jordan },
        }));
    }
    let split = match kadison_split(&table, c.tol) {
        Ok(split) => split,
        Err(e) => {
            return Report::violated(json!({
                "F_blocks": null,
                "tags": null,
                "error": e,
                "message": e.to_string(),
                "verified": { "jordan": jordan },
            }))
        }
    };
    let isometry = verify_isometry_with(&table, c.samples, c.seed, c.tol, c.execution())?;
    let order = verify_order_iso(&table, c.samples, c.seed, c.tol)?;
    let ortho = verify_orthoisomorphism(&table, c.samples, c.seed, c.tol);
    let all = isometry.is_verified() && order.is_verified() && matches!(ortho, Ok(Check::Verified { .. }));
    let ortho = match ortho {
        Ok(check) => serde_json::to_value(check)?,
        Err(e) => json!({ "status": "fails", "error": e }),
    };
    let body = json!({
        "F_blocks": split.f_blocks,
        "E_blocks": split.e_blocks,
        "tags": split.tags,
        "verified": {
            "jordan": jordan,
            "isometry": isometry,
            "order_iso": order,
            "orthoisomorphism": ortho,
        },
    });
    if all {
        Report::holds(body)
    } else {
        Report::violated(body)
    }
}

fn cmd_banach_stone(c: &Common) -> Result<Report> {
    let text = c.read_input()?;
    let value: Value = serde_json::from_str(&text).context("input is not valid JSON")?;
    if value.get("nu").is_some() {
        let nu: PointMap = serde_json::from_value(value).context("input is not a valid point map")?;
        return Report::holds(composition_operator(&nu));
    }
    let table: LinearMapTable = serde_json::from_value(value).context("input is not a valid linear map table")?;
    match extract_point_map(&table, c.tol) {
        Ok(nu) => Report::holds(nu),
        Err(ExtractError::NotStarHomomorphism(w)) => Report::violated(json!({ "not_star_homomorphism": w })),
        Err(ExtractError::Algebra(e)) => Err(e.into()),
    }
}

fn parse_kind(s: &str) -> Result<MapKind> {
    match s.trim() {
        "linear" => Ok(MapKind::Linear),
        "antilinear" => Ok(MapKind::Antilinear),
        other => bail!("unknown kind `{other}` (expected linear or antilinear)"),
    }
}

fn cmd_gen(c: &Common, what: &Gen) -> Result<Report> {
    match what {
        Gen::Canonical {
            source_dims,
            target_dims,
            assignment,
            kinds,
        } => match (source_dims, target_dims, assignment) {
            (None, None, None) if kinds.is_none() => Report::holds(random_injective_layout(c.seed)?),
            (Some(src), Some(tgt), Some(assignment)) => {
                let kinds = match kinds {
                    Some(k) => k.iter().map(|s| parse_kind(s)).collect::<Result<Vec<_>>>()?,
                    None => vec![MapKind::Linear; src.len()],
                };
                Report::holds(random_canonical(src, tgt, assignment, &kinds, c.seed)?)
            }
            _ => bail!("--source-dims, --target-dims and --assignment must be given together"),
        },
        Gen::Jordan { dims } => {
            let dims = match dims {
                Some(d) => d.clone(),
                None => AlgebraSpec::random(&mut stream(c.seed, 0), 3, 4)?.block_dims().to_vec(),
            };
            Report::holds(random_jordan_iso(&dims, c.seed)?.table)
        }
        Gen::Algebra { dims } => match dims {
            Some(d) => Report::holds(AlgebraSpec::new(d)?),
            None => Report::holds(AlgebraSpec::random(&mut stream(c.seed, 0), 3, 5)?),
        },
        Gen::PointMap { n, s } => Report::holds(PointMap::random(&mut stream(c.seed, 0), *n, *s)?),
    }
}

fn run(cli: &Cli) -> Result<Report> {
    cli.common.validate()?;
    let c = &cli.common;
    match &cli.command {
        Command::Classify => cmd_classify(c),
        Command::Reconstruct => cmd_reconstruct(c),
        Command::JordanSplit => cmd_jordan_split(c),
        Command::BanachStone => cmd_banach_stone(c),
        Command::Gen { what } => cmd_gen(c, what),
    }
}

fn emit(path: Option<&PathBuf>, body: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(body)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        run(&cli).and_then(|report| {
            emit(cli.common.output.as_ref(), &report.body)?;
            Ok(report.violated)
        })
    }));
    match outcome {
        Ok(Ok(false)) => ExitCode::SUCCESS,
        Ok(Ok(true)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal failure while processing the input");
            ExitCode::from(2)
        }
    }
}
