//! `cm-bethe`: pair catalog, validation, identity campaigns and flow export.
//!
//! Exit codes: 0 success (or every check passed), 1 a check failed or a pair
//! was rejected, 2 input or usage error.

mod campaign;
mod catalog;
mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cm_bethe::sampling::{random_section, rng_from_seed};
use cm_bethe::{
    inspect_pair, run_trajectory, validate_pair, CMPair, Complex64, LatticeSection, PairFile, PairStatus,
    Tolerances,
};

use crate::campaign::{CheckKind, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cm-bethe", version, about = "Calogero-Moser pairs, tau functions and Bethe roots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List or print named pairs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Check rank([X,Z] + I) = 1 for a pair file.
    Validate {
        /// Pair JSON file, or `catalog:NAME`.
        #[arg(long)]
        pair: String,
        /// Rank-one tolerance (relative second singular value).
        #[arg(long, env = "CM_BETHE_TOL")]
        tol: Option<f64>,
    },
    /// Run identity checks over seeded random draws.
    Verify(VerifyArgs),
    /// Export root trajectories of the free flow.
    Flow(FlowArgs),
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Get { name: String },
}

#[derive(Args, Debug)]
struct SectionArgs {
    /// Lattice spacing `RE,IM` (or `RE`); drawn at random when omitted.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    eta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda1: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda2: Option<Complex64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    /// Check tolerance (relative residual).
    #[arg(long, env = "CM_BETHE_TOL")]
    tol: Option<f64>,
    #[arg(long)]
    rank_one_tol: Option<f64>,
    #[arg(long)]
    singular_tol: Option<f64>,
}

impl ToleranceArgs {
    fn resolve(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (slot, value, name) in [
            (&mut t.check, self.tol, "--tol"),
            (&mut t.rank_one, self.rank_one_tol, "--rank-one-tol"),
            (&mut t.singular, self.singular_tol, "--singular-tol"),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    bail!("{name} must be positive and finite, got {v}");
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: CheckKind,
    /// Pair JSON file or `catalog:NAME`. Omit with `--random-n` to draw a
    /// fresh Cauchy pair per trial, or with `--roots` for RNBA audits.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, conflicts_with = "pair")]
    random_n: Option<usize>,
    /// Trajectory CSV (`m,j,re,im`) to audit with the RNBA equations.
    #[arg(long, conflicts_with_all = ["pair", "random_n"])]
    roots: Option<PathBuf>,
    /// Discrete time `RE,IM`; a random integer in -3..=3 per trial when omitted.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    m: Option<Complex64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    section: SectionArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long)]
    pair: String,
    #[arg(long, allow_hyphen_values = true)]
    m_from: i64,
    #[arg(long, allow_hyphen_values = true)]
    m_to: i64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    section: SectionArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

/// `RE,IM` or `RE`.
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(s)?, 0.0),
    };
    if !z.is_finite() {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(z)
}

fn load_unvalidated(spec: &str, tol: &Tolerances) -> Result<PairFile> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return Ok(catalog::lookup(name, tol)?.to_file());
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    let file: PairFile = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
    if file.x.n() != file.z.n() {
        bail!("X is {n}x{n} but Z is {m}x{m}", n = file.x.n(), m = file.z.n());
    }
    Ok(file)
}

fn load_pair(spec: &str, tol: &Tolerances) -> Result<CMPair> {
    let file = load_unvalidated(spec, tol)?;
    validate_pair(&file.x, &file.z, tol.rank_one).with_context(|| format!("pair {spec} fails validation"))
}

/// Fills unspecified components from a random generic section.
fn resolve_section(args: &SectionArgs, pair: &CMPair, rng: &mut impl rand::Rng) -> Result<LatticeSection> {
    let drawn = random_section(rng, pair)?;
    Ok(LatticeSection::new(
        args.eta.unwrap_or(drawn.eta),
        args.lambda1.unwrap_or(drawn.lambda1),
        args.lambda2.unwrap_or(drawn.lambda2),
    )?)
}

fn cmd_catalog(action: CatalogAction) -> Result<ExitCode> {
    let mut out = io::stdout().lock();
    match action {
        CatalogAction::List => {
            for (name, desc) in catalog::ENTRIES {
                writeln!(out, "{name:<22}{desc}")?;
            }
        }
        CatalogAction::Get { name } => {
            let pair = catalog::lookup(&name, &Tolerances::default())?;
            output::write_json(&mut out, &pair.to_file())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(pair: &str, tol: Option<f64>) -> Result<ExitCode> {
    let mut t = Tolerances::default();
    if let Some(v) = tol {
        if !(v.is_finite() && v > 0.0) {
            bail!("--tol must be positive and finite, got {v}");
        }
        t.rank_one = v;
    }
    let file = load_unvalidated(pair, &t)?;
    let report = inspect_pair(&file.x, &file.z, t.rank_one)?;
    output::write_json(&mut io::stdout().lock(), &report)?;
    Ok(if report.status == PairStatus::Accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let tol = args.tolerances.resolve()?;
    if args.section.eta.is_some_and(|e| e.norm() == 0.0) {
        bail!("eta must be nonzero");
    }
    let config = RunConfig {
        check: args.check,
        seed: args.section.seed,
        trials: args.trials,
        m: args.m,
        eta: args.section.eta,
        lambda1: args.section.lambda1,
        lambda2: args.section.lambda2,
        tol,
    };
    let result = if let Some(path) = &args.roots {
        if !matches!(args.check, CheckKind::Rnba) {
            bail!("--roots only applies to the rnba check");
        }
        let eta = args.section.eta.context("--roots needs --eta")?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        campaign::audit_csv(&text, eta, &config)?
    } else {
        let source = match (&args.pair, args.random_n) {
            (Some(spec), _) => campaign::PairSource::Fixed(load_pair(spec, &tol)?),
            (None, Some(n)) if (1..=64).contains(&n) => campaign::PairSource::Random(n),
            (None, Some(n)) => bail!("--random-n must be in 1..=64, got {n}"),
            (None, None) => bail!("one of --pair, --random-n or --roots is required"),
        };
        campaign::run(&source, &config)?
    };
    output::write_json(&mut io::stdout().lock(), &result)?;
    Ok(if result.summary.fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_flow(args: FlowArgs) -> Result<ExitCode> {
    let tol = args.tolerances.resolve()?;
    if args.m_from > args.m_to {
        bail!("--m-from ({}) exceeds --m-to ({})", args.m_from, args.m_to);
    }
    let pair = load_pair(&args.pair, &tol)?;
    let mut rng = rng_from_seed(args.section.seed);
    let section = resolve_section(&args.section, &pair, &mut rng)?;
    section.validate_for(&pair, &tol)?;
    let traj = run_trajectory(&pair, &section, args.m_from, args.m_to, &tol)?;

    let mut err = io::stderr().lock();
    for (k, cost) in traj.match_cost.iter().enumerate() {
        let flag = if traj.flagged[k] { "  possible collision" } else { "" };
        writeln!(
            err,
            "step {} -> {}: cost {}{flag}",
            traj.m_values[k],
            traj.m_values[k + 1],
            output::fmt_f64(*cost)
        )?;
    }

    let body = match args.format {
        Format::Json => output::to_json(&traj)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "j", "re", "im"])?;
            for (m, level) in traj.m_values.iter().zip(&traj.roots) {
                for (j, z) in level.iter().enumerate() {
                    w.write_record([m.to_string(), j.to_string(), output::fmt_f64(z.re), output::fmt_f64(z.im)])?;
                }
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    match &args.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog { action } => cmd_catalog(action),
        Command::Validate { pair, tol } => cmd_validate(&pair, tol),
        Command::Verify(args) => cmd_verify(args),
        Command::Flow(args) => cmd_flow(args),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
