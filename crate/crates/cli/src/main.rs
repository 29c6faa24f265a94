use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parmirror::chambers::{enumerate_walls, resolve_scale, sample_generic_weights};
use parmirror::cstar_fixed::{count_s, enumerate_components, insertion_bijection_all, write_census_csv};
use parmirror::moduli::hitchin_section_check;
use parmirror::pgl_fixed::{fixed_locus_invariants, quotient_count_formula, sn_quotient_count, stringy_gamma_sum};
use parmirror::tms::{summarize, sweep, verify_identity, write_summary_csv};
use parmirror::{Error, ModuliParams, Prime, SweepConfig, WeightSystem};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "parmirror", version, about = "Exact checks of the parabolic SL/PGL E-polynomial identity")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Both sides of the identity for one instance.
    Tms(Instance),
    /// The identity over every instance of a config.
    Sweep(SweepArgs),
    /// Census of the (1,...,1) fixed components.
    Variant(Instance),
    /// Fixed-locus invariants and the stringy sum.
    Stringy(ParamArgs),
    /// Walls in weight space.
    Walls(ParamArgs),
    /// Descent count S(n) and the insertion bijection.
    Lemma(LemmaArgs),
    /// Orbit count of the diagonal rotation action on (S_n)^k.
    Orbits(OrbitArgs),
    /// Strong parabolicity of the Hitchin-section template.
    Section(ParamArgs),
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    g: u32,
    #[arg(long, default_value_t = 1)]
    marked: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    deg: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Instance {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Weight scale: "margin" or a rational such as "1" or "1/3".
    #[arg(long, default_value = "margin")]
    scale: String,
    /// JSON file `{"points": [["1/10", "1/5"], ...]}`; overrides sampling.
    #[arg(long, conflicts_with_all = ["seed", "scale"])]
    weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with `[ranges]` and `[sampling]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a per-instance CSV summary with timings.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    marked: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failed check (exit 1) or a usage/config problem (exit 2).
enum Failure {
    Check(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPrime(_)
            | Error::InvalidParams(_)
            | Error::InvalidWeights(_)
            | Error::NonGenericWeights
            | Error::DimensionMismatch(_)
            | Error::Limit { .. }
            | Error::Parse(_) => Failure::Usage(e.into()),
            _ => Failure::Check(e.into()),
        }
    }
}

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

type Outcome = std::result::Result<bool, Failure>;

impl ParamArgs {
    fn params(&self) -> Result<ModuliParams, Failure> {
        Ok(ModuliParams::new(self.n, self.g, self.marked, self.deg)?)
    }
}

fn emit(out: Option<&Path>, body: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage),
        None => io::stdout().write_all(body).map_err(|e| Failure::Check(e.into())),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| Failure::Check(e.into()))?;
    body.push(b'\n');
    emit(out, &body)
}

fn load_weights(inst: &Instance, p: &ModuliParams) -> Result<WeightSystem, Failure> {
    let w = match &inst.weights {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(usage)?
        }
        None => sample_generic_weights(p, inst.seed, &resolve_scale(&inst.scale, p)?)?,
    };
    w.check_params(p)?;
    Ok(w)
}

fn run_tms(inst: &Instance) -> Outcome {
    let p = inst.params.params()?;
    let w = load_weights(inst, &p)?;
    let report = verify_identity(&p, &w)?;
    let out = inst.params.out.as_deref();
    match inst.format {
        Format::Json => emit_json(out, &report)?,
        Format::Csv => {
            let body = format!(
                "n,g,marked,deg,equal,component_count,wall_count\n{},{},{},{},{},{},{}\n",
                p.n(), p.g(), p.k(), p.d(), report.equal, report.component_count, report.wall_count
            );
            emit(out, body.as_bytes())?;
        }
    }
    Ok(report.equal)
}

fn run_sweep(args: &SweepArgs) -> Outcome {
    let cfg: SweepConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            toml::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(usage)?
        }
        None => SweepConfig::default(),
    };
    let records = sweep(&cfg)?;
    let summary = summarize(&records);
    if let Some(path) = &args.csv {
        let file = fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))
            .map_err(usage)?;
        write_summary_csv(&records, file)?;
    }
    emit_json(args.out.as_deref(), &json!({ "summary": summary, "records": records }))?;
    Ok(summary.equal == summary.total)
}

fn run_variant(inst: &Instance) -> Outcome {
    let p = inst.params.params()?;
    let w = load_weights(inst, &p)?;
    let comps = enumerate_components(&p, &w);
    let out = inst.params.out.as_deref();
    match inst.format {
        Format::Csv => {
            let mut body = Vec::new();
            write_census_csv(&comps, &mut body)?;
            emit(out, &body)?;
        }
        Format::Json => emit_json(out, &json!({ "params": p, "weights": w, "components": comps }))?,
    }
    Ok(true)
}

fn run_stringy(args: &ParamArgs) -> Outcome {
    let p = args.params()?;
    let inv = fixed_locus_invariants(&p);
    let sum = stringy_gamma_sum(&p);
    emit_json(args.out.as_deref(), &json!({ "params": p, "fixed_locus": inv, "stringy_sum": sum }))?;
    Ok(true)
}

fn run_walls(args: &ParamArgs) -> Outcome {
    let p = args.params()?;
    let walls = enumerate_walls(&p);
    emit_json(args.out.as_deref(), &json!({ "params": p, "walls": walls }))?;
    Ok(true)
}

fn run_lemma(args: &LemmaArgs) -> Outcome {
    let n = Prime::new(args.n)?;
    let s = count_s(n)?;
    let ok = insertion_bijection_all(n);
    println!("{s}");
    if !ok {
        eprintln!("insertion bijection fails for n = {}", args.n);
    }
    let fact: u64 = (1..args.n as u64).product();
    Ok(ok && s == fact)
}

fn run_orbits(args: &OrbitArgs) -> Outcome {
    let n = Prime::new(args.n)?;
    let count = sn_quotient_count(n, args.marked)?;
    let formula = quotient_count_formula(n, args.marked);
    println!("{count}");
    Ok(formula == count.into())
}

fn run_section(args: &ParamArgs) -> Outcome {
    let ok = hitchin_section_check(&args.params()?);
    println!("{}", if ok { "strongly parabolic" } else { "not strongly parabolic" });
    Ok(ok)
}

fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(anyhow!(e)))?;
    }
    match &cli.cmd {
        Command::Tms(i) => run_tms(i),
        Command::Sweep(a) => run_sweep(a),
        Command::Variant(i) => run_variant(i),
        Command::Stringy(a) => run_stringy(a),
        Command::Walls(a) => run_walls(a),
        Command::Lemma(a) => run_lemma(a),
        Command::Orbits(a) => run_orbits(a),
        Command::Section(a) => run_section(a),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
