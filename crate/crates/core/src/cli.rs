//! The `lgla` command line: construct, verify, analyze, classify, lmin, oracle.
//!
//! Exit codes: 0 success, 1 violations found, 2 malformed input or flags,
//! 3 inconclusive classification.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{construct, parse_pair, CatalogName};
use crate::classify::{classify, Classification};
use crate::error::{Error, Result};
use crate::json::{structure_to_file, StructureFile, Symmetry};
use crate::lattice::LatticeBox;
use crate::local_lie::{lmin_build, LocalAlgebra, PairingKind};
use crate::scalar::{Field, Scalar};
use crate::scalar_lie::{analyze_l, check_jacobi, additivity_violations, sigma_pi, simplicity_probe};
use crate::structure::ScalarStructure;
use crate::symbols::{commutative_product, opd_commutator, opd_product, poisson_bracket, symbol_bracket, SymbolIndex, TwistedPDO};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lgla", version, about = "Exact computations with lattice-graded Lie algebras")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Restrict inputs to this field.
    #[arg(long, global = true)]
    pub field: Option<Field>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a catalog algebra on a box as interchange JSON.
    Construct(ConstructArgs),
    /// Jacobi, l-additivity and Σ/Π sweeps on a structure file.
    Verify(InputArgs),
    /// The l-alternative, Σ/Π and a randomized simplicity probe.
    Analyze(AnalyzeArgs),
    /// Run the classifier.
    Classify(ClassifyArgs),
    /// Dimension table of the minimal algebra of a local Lie algebra (CSV).
    Lmin(LminArgs),
    /// Operator/symbol calculus oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// witt, gen_witt, wpi, a1_1, a2_2, sl2_gamma3, sl3_gamma8
    #[arg(long)]
    pub name: String,
    /// Generator images of l for gen_witt, e.g. "1,i".
    #[arg(long)]
    pub l: Option<String>,
    /// Generator images of π for wpi, e.g. "1,0;0,i".
    #[arg(long)]
    pub pi: Option<String>,
    #[arg(long = "box")]
    pub radius: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Defaults to the box stored in the file.
    #[arg(long = "box")]
    pub radius: Option<i64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Pairs sampled by the simplicity probe (0 = all).
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LminArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Scalar,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub s: Scalar,
    #[arg(long, default_value = "product")]
    pub pairing: PairingKind,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 12)]
    pub window: i64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Operator, e.g. "z^2 d^1/2 + 3 * z^-1 d^0".
    #[arg(long, allow_hyphen_values = true, requires = "q")]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Number of terms kept in the operator product.
    #[arg(long, default_value_t = 8)]
    pub cut: usize,
    /// Symbol index λ, e.g. "1,-1/2".
    #[arg(long, allow_hyphen_values = true, requires = "mu", conflicts_with = "p")]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
}

fn catalog_name(a: &ConstructArgs) -> Result<CatalogName> {
    let param = match a.name.as_str() {
        "gen_witt" => Some(a.l.as_deref().ok_or_else(|| Error::Parse("gen_witt needs --l".into()))?),
        "wpi" => Some(a.pi.as_deref().ok_or_else(|| Error::Parse("wpi needs --pi".into()))?),
        _ => None,
    };
    CatalogName::from_spec(&a.name, param)
}

fn check_field(requested: Option<Field>, actual: Field) -> Result<()> {
    match requested {
        Some(Field::Q) if actual == Field::Qi => {
            Err(Error::Malformed("structure has Gaussian-rational constants but --field Q was given".into()))
        }
        _ => Ok(()),
    }
}

fn load(cli: &Cli, a: &InputArgs) -> Result<(ScalarStructure, LatticeBox)> {
    let file = StructureFile::read(&a.input)?;
    check_field(cli.field, file.field)?;
    let radius = a.radius.unwrap_or(file.radius);
    if radius < 0 || radius > file.radius {
        return Err(Error::Malformed(format!("--box {radius} must lie in [0, {}] (the box stored in the file)", file.radius)));
    }
    let s = file.table(Symmetry::Antisymmetric)?.into_structure();
    Ok((s, LatticeBox::new(radius)))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_MALFORMED,
    }
}

/// Run the command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // A second configuration attempt in the same process is ignored.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Construct(a) => {
            if a.radius < 0 {
                return Err(Error::Malformed("--box must be non-negative".into()));
            }
            let s = construct(&catalog_name(a)?)?;
            check_field(cli.field, s.field)?;
            let file = structure_to_file(&s, &LatticeBox::new(a.radius));
            match &a.out {
                Some(p) => file.write(p)?,
                None => writeln!(out, "{}", file.to_json()?)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let (s, b) = load(cli, a)?;
            let jac = check_jacobi(&s, &b);
            let l2 = additivity_violations(&s, &b);
            let sp = sigma_pi(&s, &b);
            let code = if jac.is_empty() && l2.is_empty() { EXIT_OK } else { EXIT_VIOLATIONS };
            emit(
                out,
                &json!({
                    "box": b.radius,
                    "jacobi_violations": jac.len(),
                    "additivity_violations": l2.len(),
                    "sigma_is_nonzero_l": sp.sigma_is_nonzero_l,
                    "sigma_size": sp.sigma.len(),
                    "pi_size": sp.pi.len(),
                    "first_violations": jac.iter().chain(&l2).take(10).collect::<Vec<_>>(),
                }),
            )?;
            Ok(code)
        }
        Command::Analyze(a) => {
            let (s, b) = load(cli, &a.input)?;
            let alt = analyze_l(&s, &b)?;
            let sp = sigma_pi(&s, &b);
            let probe = simplicity_probe(&s, &b, a.trials, cli.seed);
            emit(out, &json!({ "box": b.radius, "seed": cli.seed, "l_alternative": alt, "sigma_pi": sp, "simplicity": probe }))?;
            Ok(EXIT_OK)
        }
        Command::Classify(a) => {
            let (s, b) = load(cli, &a.input)?;
            let c = classify(&s, &b);
            match &a.report {
                Some(p) => std::fs::write(p, serde_json::to_string_pretty(&c)? + "\n")?,
                None => emit(out, &c)?,
            }
            if let Classification::Integrable { type_n, matched, .. } = &c {
                if a.report.is_some() {
                    writeln!(out, "integrable type {type_n}, matched {matched}")?;
                }
            }
            Ok(if c.is_inconclusive() { EXIT_INCONCLUSIVE } else { EXIT_OK })
        }
        Command::Lmin(a) => {
            let la = match a.pairing {
                PairingKind::Product => LocalAlgebra::product_family(&a.delta, &a.s)?,
                PairingKind::Bracket => LocalAlgebra::bracket_slice(&a.delta, &a.s)?,
            };
            let up = lmin_build(&la, a.levels, a.window)?;
            let down = lmin_build(&la.opposite(), a.levels, a.window)?;
            writeln!(out, "level,degree,x,dim,stable,interior")?;
            for (sign, side) in [(1i64, &up), (-1, &down)] {
                for l in side.iter() {
                    for d in &l.degrees {
                        writeln!(out, "{},{},{},{},{},{}", sign * l.level, d.degree, d.x, d.dim, d.stable, d.interior)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Oracle(a) => {
            if let (Some(p), Some(q)) = (&a.p, &a.q) {
                let p: TwistedPDO = p.parse()?;
                let q: TwistedPDO = q.parse()?;
                emit(
                    out,
                    &json!({
                        "product": opd_product(&p, &q, a.cut).to_string(),
                        "commutator": opd_commutator(&p, &q, a.cut).to_string(),
                        "poisson_bracket": symbol_bracket(&p, &q).to_string(),
                    }),
                )?;
            } else if let (Some(l), Some(m)) = (&a.lambda, &a.mu) {
                let (l, m) = (parse_pair(l)?, parse_pair(m)?);
                let (l, m) = (SymbolIndex(l), SymbolIndex(m));
                let (c, idx) = poisson_bracket(&l, &m);
                emit(
                    out,
                    &json!({
                        "bracket": { "coeff": c, "index": idx.0 },
                        "product": { "index": commutative_product(&l, &m).0 },
                    }),
                )?;
            } else {
                return Err(Error::Parse("oracle needs --p/--q or --lambda/--mu".into()));
            }
            Ok(EXIT_OK)
        }
    }
}

