use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use finfam_cli::config::{CampaignConfig, ScheduleChoice, SuiteId};
use finfam_cli::error::CliError;
use finfam_cli::report::render_report;
use finfam_cli::suites::{replay_case, run_suites};
use finfam_cli::textform;
use finfam_core::ground::KSubset;
use finfam_core::phi::{phi_decode, phi_encode, SizeSchedule};
use finfam_core::ramsey::{find_monochromatic_grid, ramsey_exact, GridColoring, RamseyExact};

#[derive(Parser)]
#[command(
    name = "finfam",
    about = "Exhaustive verification of finite set-family combinatorics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Number of atoms in the ground set
    #[arg(long, default_value_t = 8, env = "FINFAM_GROUND_SIZE")]
    ground_size: u32,

    /// Tuple arity for the codec suite
    #[arg(long, default_value_t = 1, env = "FINFAM_ARITY")]
    arity: usize,

    /// Maximum per-coordinate cell size for the codec suite
    #[arg(long, default_value_t = 1, env = "FINFAM_MAX_CELL")]
    max_cell: u32,

    /// Size schedule: paper | compact
    #[arg(long, default_value = "compact", env = "FINFAM_SCHEDULE")]
    schedule: ScheduleChoice,

    /// Suites to run (repeatable or comma-separated); all when omitted
    #[arg(long = "suite", value_delimiter = ',', env = "FINFAM_SUITE")]
    suites: Vec<SuiteId>,

    /// Seed for all randomized sweeps
    #[arg(long, default_value_t = 1, env = "FINFAM_SEED")]
    seed: u64,

    /// Randomized sample count per suite
    #[arg(long, default_value_t = 500, env = "FINFAM_SAMPLES")]
    samples: u64,

    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0, env = "FINFAM_THREADS")]
    threads: usize,

    /// Run even when the cost estimate exceeds the refusal threshold
    #[arg(long, env = "FINFAM_FORCE")]
    force: bool,

    /// Report measured wall times instead of zeros (breaks byte-stability)
    #[arg(long, env = "FINFAM_TIMINGS")]
    timings: bool,

    /// Plant a failing invariant, for testing the harness itself
    #[arg(long, env = "FINFAM_MUTATE")]
    mutate: Option<String>,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a machine-readable report
    Verify(VerifyArgs),
    /// Encode a mixed-family file into a coded-set file
    Encode {
        /// Input path, or - for stdin
        #[arg(long, short)]
        input: String,
        /// Output path, or - for stdout
        #[arg(long, short, default_value = "-")]
        output: String,
    },
    /// Decode a coded-set file back into a mixed-family file
    Decode {
        #[arg(long, short)]
        input: String,
        #[arg(long, short, default_value = "-")]
        output: String,
    },
    /// Search a monochromatic subgrid witness in a coloring
    RamseyWitness {
        /// Ground size; every coordinate uses atoms 0..ground
        #[arg(long)]
        ground: u32,
        /// Per-coordinate subset sizes, comma separated
        #[arg(long, value_delimiter = ',')]
        subset_sizes: Vec<u32>,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        radius: u32,
        /// Explicit coloring: one digit in 1..=colors per grid point, rank
        /// order; omit for a seeded random coloring
        #[arg(long)]
        coloring: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compute the exact threshold ground size by brute force
    RamseyExact {
        #[arg(long, value_delimiter = ',')]
        subset_sizes: Vec<u32>,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        radius: u32,
        /// Largest ground size to try
        #[arg(long, default_value_t = 20)]
        limit: u32,
    },
    /// Re-run a serialized counterexample and report its verdict
    Replay {
        /// Path to a failure record or bare case (JSON), or - for stdin
        #[arg(long, short, default_value = "-")]
        input: String,
    },
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn write_output(path: &str, content: &str) -> Result<(), CliError> {
    if path == "-" {
        print!("{content}");
        Ok(())
    } else {
        Ok(std::fs::write(path, content)?)
    }
}

fn schedule_from(choice: &str, arity: usize, max_cell: u32) -> Result<Box<dyn SizeSchedule>, CliError> {
    let parsed: ScheduleChoice = choice
        .parse()
        .map_err(CliError::Config)?;
    parsed.build(arity, max_cell)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let cfg = CampaignConfig {
        ground_size: args.ground_size,
        arity: args.arity,
        max_cell: args.max_cell,
        schedule: args.schedule,
        suites: args.suites,
        seed: args.seed,
        samples: args.samples,
        threads: args.threads,
        force: args.force,
        timings: args.timings,
        mutate: args.mutate,
    };
    let started = std::time::Instant::now();
    let records = run_suites(&cfg)?;
    let report = render_report(&records);
    match &args.out {
        Some(path) => std::fs::write(path, &report)?,
        None => print!("{report}"),
    }
    let mut all_passed = true;
    for record in &records {
        let status = if record.passed() { "pass" } else { "FAIL" };
        all_passed &= record.passed();
        eprintln!(
            "{:<14} {} ({} cases, {} failures)",
            record.suite,
            status,
            record.cases,
            record.failures.len()
        );
    }
    eprintln!(
        "{} suites in {:.2}s",
        records.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_encode(input: &str, output: &str) -> Result<ExitCode, CliError> {
    let file = textform::parse_mixed(&read_input(input)?)?;
    let schedule = schedule_from(&file.schedule, file.family.arity(), file.max_cell)?;
    let coded = phi_encode(&file.family, schedule.as_ref())?;
    write_output(output, &textform::serialize_coded(&coded))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(input: &str, output: &str) -> Result<ExitCode, CliError> {
    let coded = textform::parse_coded(&read_input(input)?)?;
    let schedule = schedule_from(coded.schedule_id(), coded.arity(), coded.max_cell())?;
    let mixed = phi_decode(&coded, schedule.as_ref())?;
    let file = textform::MixedFamilyFile {
        family: mixed,
        max_cell: coded.max_cell(),
        schedule: coded.schedule_id().to_string(),
    };
    write_output(output, &textform::serialize_mixed(&file))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_ramsey_witness(
    ground: u32,
    subset_sizes: &[u32],
    colors: u32,
    radius: u32,
    coloring: Option<&str>,
    seed: u64,
) -> Result<ExitCode, CliError> {
    let domains: Vec<Vec<u32>> = vec![(0..ground).collect(); subset_sizes.len()];
    let coloring = match coloring {
        Some(digits) => {
            let parsed: Vec<u32> = digits
                .chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .filter(|&d| d >= 1 && d <= colors)
                        .ok_or_else(|| {
                            CliError::Config(format!(
                                "coloring digit '{ch}' outside 1..={colors}"
                            ))
                        })
                })
                .collect::<Result<_, _>>()?;
            let mut next = 0usize;
            let col = GridColoring::from_fn(
                domains,
                subset_sizes.to_vec(),
                colors,
                |_| {
                    let d = parsed.get(next).copied().unwrap_or(0);
                    next += 1;
                    d
                },
            )?;
            if next != parsed.len() {
                return Err(CliError::Config(format!(
                    "coloring has {} digits, grid has {next} points",
                    parsed.len()
                )));
            }
            col
        }
        None => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            GridColoring::from_fn(domains, subset_sizes.to_vec(), colors, |_| {
                rng.gen_range(1..=colors)
            })?
        }
    };
    match find_monochromatic_grid(&coloring, radius)? {
        Some(witness) => {
            let parts: Vec<String> = witness
                .parts
                .iter()
                .map(|p: &KSubset| p.to_string())
                .collect();
            println!("witness {} color {}", parts.join(" "), witness.color);
        }
        None => println!("no witness"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_ramsey_exact(
    subset_sizes: &[u32],
    colors: u32,
    radius: u32,
    limit: u32,
) -> Result<ExitCode, CliError> {
    match ramsey_exact(subset_sizes, colors, radius, limit)? {
        RamseyExact::Exact(n) => println!("exact {n}"),
        RamseyExact::Unknown { at_least } => println!("unknown (>= {at_least})"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(input: &str) -> Result<ExitCode, CliError> {
    let text = read_input(input)?;
    let value: serde_json::Value = serde_json::from_str(text.trim())?;
    // accept either a full failure record or a bare case
    let case = value.get("case").cloned().unwrap_or(value);
    let outcome = replay_case(&case)?;
    if outcome.pass {
        println!("replay PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("replay FAIL {}", outcome.message);
        Ok(ExitCode::from(1))
    }
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Encode { input, output } => cmd_encode(&input, &output),
        Command::Decode { input, output } => cmd_decode(&input, &output),
        Command::RamseyWitness {
            ground,
            subset_sizes,
            colors,
            radius,
            coloring,
            seed,
        } => cmd_ramsey_witness(
            ground,
            &subset_sizes,
            colors,
            radius,
            coloring.as_deref(),
            seed,
        ),
        Command::RamseyExact {
            subset_sizes,
            colors,
            radius,
            limit,
        } => cmd_ramsey_exact(&subset_sizes, colors, radius, limit),
        Command::Replay { input } => cmd_replay(&input),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                CliError::Core(
                    finfam_core::Error::NotAPhiImage { .. }
                    | finfam_core::Error::NotAnFImage
                    | finfam_core::Error::NotInImage { .. }
                    | finfam_core::Error::UndecodableSize { .. },
                ) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
