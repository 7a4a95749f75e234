use std::process::ExitCode;
use std::time::Instant;

use bcstab::commands;
use bcstab::report::{Format, Report};
use bcstab::sweep;
use bcstab_core::quillen::{Family, FamilySpec};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bcstab", version, about = "Exact verifiers for bounded-cohomology stability of classical groups")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// sp, oC0, oC1, oR, u, soC, soR or su.
    #[arg(long, default_value = "sp")]
    family: String,
    /// Dimension of the anisotropic part; defaults to the least admissible value.
    #[arg(long)]
    d: Option<usize>,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<FamilySpec, String> {
        let family = Family::from_code(&self.family).ok_or_else(|| format!("unknown family {:?}", self.family))?;
        let d = self.d.unwrap_or_else(|| family.default_d());
        FamilySpec::new(family, d).map_err(|_| format!("d = {d} is not admissible for {}", family.code()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Stability ranges r0(q), r1(q).
    Ranges {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 6)]
        qmax: u32,
    },
    /// Expand both sides of the subdivision identity for l = 0..=L.
    VerifyHomotopy {
        #[arg(long, default_value_t = 3)]
        l: usize,
    },
    /// Flag identities, w isometries, normalizer and diagram checks.
    VerifyQuillen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reflexivity, perp duality, adapted bases and configurations.
    VerifyFormed {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Chain counts, stars and sign cancellation of ΔS for |S| = 0..=L.
    Delta {
        #[arg(long, default_value_t = 4)]
        l: usize,
    },
    /// Random Witt extensions and transitivity witnesses.
    Witt {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certificate tree for the main claim at (q, r).
    Trace {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        r: i64,
    },
    /// The full acceptance suite.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn usage(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let report: Report = match &cli.command {
        Command::Ranges { family, qmax } => match family.resolve() {
            Ok(spec) => commands::ranges(&spec, *qmax),
            Err(m) => return usage(&m),
        },
        Command::VerifyHomotopy { l } => commands::verify_homotopy(*l),
        Command::VerifyQuillen { family, rank, samples, seed } => match family.resolve() {
            Ok(spec) if spec.family.is_special() => return usage("verify-quillen takes a general family (sp, oC0, oC1, oR, u)"),
            Ok(spec) => commands::verify_quillen(&spec, *rank, *samples, *seed),
            Err(m) => return usage(&m),
        },
        Command::VerifyFormed { family, rank, samples, seed } => match family.resolve() {
            Ok(spec) => commands::verify_formed(&spec, *rank, *samples, *seed),
            Err(m) => return usage(&m),
        },
        Command::Delta { l } => commands::delta(*l),
        Command::Witt { family, rank, samples, seed } => match family.resolve() {
            Ok(spec) => commands::witt(&spec, *rank, *samples, *seed),
            Err(m) => return usage(&m),
        },
        Command::Trace { family, q, r } => match family.resolve() {
            Ok(spec) => commands::trace_report(&spec, *q, *r),
            Err(m) => return usage(&m),
        },
        Command::Sweep { seed } => {
            let (report, criteria) = sweep::sweep(*seed);
            for c in &criteria {
                eprintln!("criterion {} took {:.2?}", c.id, c.elapsed);
            }
            report
        }
    };
    print!("{}", report.render(cli.format));
    eprintln!("{} finished in {:.2?}", report.command, start.elapsed());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
