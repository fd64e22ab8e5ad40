mod dump;
mod report;
mod suite;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qseries_core::character::Mode;
use qseries_core::identities::Engine;
use qseries_core::{AlgebraContext, AlgebraType};
use rayon::prelude::*;

use report::{Header, Status, SCHEMA_VERSION};
use suite::Selection;

#[derive(Parser, Debug)]
#[command(
    name = "qseries",
    version,
    about = "Check polynomial relations among truncated q-character series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity checks and write a newline-delimited JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TypeArg {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// Exact up to rank 4, modp above.
    Auto,
    Exact,
    Modp,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(long = "type", value_enum, ignore_case = true)]
    ty: Option<TypeArg>,
    #[arg(long)]
    rank: Option<usize>,
    /// An identity id, a family prefix (cn-conj, ch, chain, ...) or `all`.
    #[arg(long, default_value = "all")]
    identity: String,
    /// Height to which series residuals are certified.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Decision method for identities between rational functions.
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Report path (stdout when absent); the fixture directory with
    /// --regen-fixtures.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run every pair instead of a sample.
    #[arg(long)]
    all_pairs: bool,
    /// Number of pairs sampled when --all-pairs is absent.
    #[arg(long, default_value_t = 20)]
    sample: usize,
    /// Print the canonical text of one series or character and exit.
    #[arg(long, value_name = "SELECTOR", help = format!("Print one series or character and exit: {}", dump::SELECTOR_HELP))]
    dump: Option<String>,
    /// Rewrite the stored regression fixtures and exit.
    #[arg(long)]
    regen_fixtures: bool,
}

impl From<TypeArg> for AlgebraType {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::A => AlgebraType::A,
            TypeArg::B => AlgebraType::B,
            TypeArg::C => AlgebraType::C,
            TypeArg::D => AlgebraType::D,
        }
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    if args.regen_fixtures {
        let dir = args
            .out
            .unwrap_or_else(|| PathBuf::from("crates/core/tests/fixtures"));
        for name in dump::regen_fixtures(&dir)? {
            eprintln!("wrote {}", dir.join(name).display());
        }
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(sel) = &args.dump {
        let text = dump::dump(sel, args.degree)?;
        let mut out = open_out(&args.out)?;
        out.write_all(text.as_bytes())?;
        out.flush()?;
        return Ok(ExitCode::SUCCESS);
    }
    let (Some(ty), Some(rank)) = (args.ty, args.rank) else {
        bail!("--type and --rank are required unless --dump or --regen-fixtures is given");
    };
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let ctx = AlgebraContext::new(ty.into(), rank).map_err(|e| anyhow::anyhow!("{e}"))?;
    let modp = Mode::Modp {
        trials: args.trials,
        seed: args.seed,
    };
    let mode = match args.mode {
        ModeArg::Auto if rank <= 4 => Mode::Exact,
        ModeArg::Auto | ModeArg::Modp => modp,
        ModeArg::Exact => Mode::Exact,
    };
    let sel = Selection {
        ctx,
        identity: args.identity.clone(),
        degree: args.degree,
        mode,
        sample: (!args.all_pairs).then_some(args.sample),
        seed: args.seed,
    };
    let instances = suite::enumerate(&sel)?;
    let engine = Engine::new();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()?;
    let records: Vec<_> = pool.install(|| {
        instances
            .par_iter()
            .map(|i| suite::run(&sel, &engine, i))
            .collect()
    });
    let header = Header {
        schema_version: SCHEMA_VERSION,
        record: "header",
        algebra: ctx.to_string(),
        identity: &args.identity,
        degree: args.degree,
        mode: mode.label(),
        seed: args.seed,
        sample: sel.sample,
        instances: records.len(),
    };
    let mut out = open_out(&args.out)?;
    report::write_report(&mut *out, &header, &records)?;
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    if failed > 0 {
        eprintln!("{failed} of {} instances failed", records.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
