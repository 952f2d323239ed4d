//! `lrcum`: enumeration, computation and verification from the command line.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage error, 3 I/O error.

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lr_cumulants::cumulants::{LrCumulants, PchiCache};
use lr_cumulants::deque::{
    combined_standings, pchi_by_enumeration, pchi_by_sigma, sigma_chi, simulate, standings_partitions, ChiWord,
    DequeScenario,
};
use lr_cumulants::fock::{
    bimixture_symbol, c_word, format_index_word, moment_via_pchi_cached, parse_index_word, CoefficientSource,
    FockEngine, RationalTable, SymbolicTable,
};
use lr_cumulants::lukasiewicz::{enumerate_luk, psi, validate_rise};
use lr_cumulants::partitions::{act, bell, catalan, enumerate_noncrossing, enumerate_partitions, MAX_CATALAN_N};
use lr_cumulants::report::{Check, RunReport};
use lr_cumulants::scalar::Scalar;
use lr_cumulants::verify::{run_suite, CoefficientMode, Suite, SuiteConfig};
use lr_cumulants::{Error, Execution, Result};

#[derive(Parser)]
#[command(name = "lrcum", version, about = "Deque-scenario partitions and (l,r)-cumulants in exact arithmetic")]
struct Cli {
    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List partitions, non-crossing partitions, Lukasiewicz paths or P^(chi)(n).
    Enumerate {
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Required for `pchi`; a word over {l, r} of length n.
        #[arg(long)]
        chi: Option<String>,
    },
    /// Replay one deque scenario.
    Simulate {
        /// Rise vector, e.g. "2,-1,1,-1,-1".
        #[arg(long, allow_hyphen_values = true)]
        rise: String,
        #[arg(long)]
        chi: String,
    },
    /// Vacuum moment of a word of canonical operators, by two routes.
    Moment(ValueArgs),
    /// (l,r)-cumulant of a word of canonical operators, by two routes.
    Cumulant(ValueArgs),
    /// Run one exhaustive verification suite.
    Verify {
        suite: String,
        #[arg(long)]
        max_n: Option<usize>,
        /// Alphabet size for the operator suites.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Use seeded random rational coefficients instead of symbols.
        #[arg(long)]
        random: bool,
        /// Seed for the random coefficients; implies --random.
        #[arg(long)]
        seed: Option<u64>,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct ValueArgs {
    #[arg(long)]
    chi: String,
    /// Index word, e.g. "1,2,1,2".
    #[arg(long)]
    omega: String,
    /// JSON coefficient table.
    #[arg(long, conflicts_with = "symbolic", required_unless_present = "symbolic")]
    table: Option<PathBuf>,
    /// Use formal symbols for every coefficient.
    #[arg(long)]
    symbolic: bool,
    /// Alphabet size for --symbolic; defaults to the largest index in omega.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Partitions,
    Noncrossing,
    Luk,
    Pchi,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    Moment,
    Cumulant,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            let report = report.finish(start.elapsed().as_secs_f64());
            if cli.json {
                emit(&format!("{}\n", report.to_json()));
            } else {
                emit(&report.to_text());
            }
            eprintln!("elapsed: {:.3}s", report.elapsed);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                Error::InvariantViolation(_) => 1,
                _ => 2,
            })
        }
    }
}

/// Writes to stdout; a reader that hangs up early (`| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli) -> Result<RunReport> {
    match &cli.command {
        Command::Enumerate { kind, n, chi } => enumerate(*kind, *n, chi.as_deref(), cli.json),
        Command::Simulate { rise, chi } => simulate_cmd(rise, chi),
        Command::Moment(args) => value_cmd(ValueKind::Moment, args),
        Command::Cumulant(args) => value_cmd(ValueKind::Cumulant, args),
        Command::Verify { suite, max_n, d, random, seed, sequential } => {
            let suite: Suite = suite.parse()?;
            let mode = match (random, seed) {
                (false, None) => CoefficientMode::Symbolic,
                (_, seed) => CoefficientMode::Random { seed: seed.unwrap_or(0) },
            };
            let cfg = SuiteConfig {
                max_n: max_n.unwrap_or(suite.default_max_n()),
                d: *d,
                mode,
                exec: if *sequential { Execution::Sequential } else { Execution::Parallel },
            };
            run_suite(suite, &cfg)
        }
    }
}

fn enumerate(kind: Kind, n: usize, chi: Option<&str>, json: bool) -> Result<RunReport> {
    if n == 0 || n > MAX_CATALAN_N {
        return Err(Error::InvalidArgument(format!("--n must be in 1..={MAX_CATALAN_N}, got {n}")));
    }
    let mut report = RunReport::new("enumerate").param("kind", kind_name(kind)).param("n", n);
    let (items, texts, expected): (Vec<Value>, Vec<String>, String) = match kind {
        Kind::Partitions => {
            let all = enumerate_partitions(n)?;
            rendered(&all, bell(n).to_string())
        }
        Kind::Noncrossing => rendered(&enumerate_noncrossing(n)?, catalan(n).to_string()),
        Kind::Luk => rendered(&enumerate_luk(n)?, catalan(n).to_string()),
        Kind::Pchi => {
            let chi_text = chi.ok_or_else(|| Error::InvalidArgument("enumerate pchi needs --chi".into()))?;
            let chi: ChiWord = chi_text.parse()?;
            if chi.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "--chi {chi} has length {}, expected --n {n}",
                    chi.len()
                )));
            }
            report = report.param("chi", chi.to_string());
            let by_enum = pchi_by_enumeration(&chi)?;
            let by_sigma = pchi_by_sigma(&chi)?;
            report.push(
                Check::new(
                    "deque enumeration = sigma.NC(n)",
                    "same set",
                    if by_enum == by_sigma { "same set" } else { "different sets" },
                    by_enum == by_sigma,
                ),
                1,
            );
            rendered(&by_enum, catalan(n).to_string())
        }
    };
    report.push(Check::equal("count", expected, items.len()), items.len());
    if json {
        report.result("items", Value::Array(items), "");
    } else {
        for t in texts {
            emit(&format!("{t}\n"));
        }
    }
    Ok(report)
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Partitions => "partitions",
        Kind::Noncrossing => "noncrossing",
        Kind::Luk => "luk",
        Kind::Pchi => "pchi",
    }
}

fn rendered<T: serde::Serialize + Display>(items: &[T], expected: String) -> (Vec<Value>, Vec<String>, String) {
    let values = items.iter().map(|x| serde_json::to_value(x).expect("serializable")).collect();
    let texts = items.iter().map(ToString::to_string).collect();
    (values, texts, expected)
}

fn parse_rise(s: &str) -> Result<Vec<i64>> {
    s.trim()
        .trim_start_matches(['[', '('])
        .trim_end_matches([']', ')'])
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("rise entry {t:?}: {e}")))
        })
        .collect()
}

fn simulate_cmd(rise: &str, chi: &str) -> Result<RunReport> {
    let path = validate_rise(&parse_rise(rise)?)?;
    let chi: ChiWord = chi.parse()?;
    let scenario = DequeScenario::new(path.clone(), chi.clone())?;
    let trace = simulate(&scenario);
    let (left, right) = standings_partitions(&path, &chi)?;
    let rho = combined_standings(&path, &chi)?;
    let sigma = sigma_chi(&chi);

    let mut report = RunReport::new("simulate")
        .param("rise", json!(path.rise()))
        .param("chi", chi.to_string());
    report.result("exit_order", json!(trace.exit_order), format!("{:?}", trace.exit_order));
    report.result("output_partition", json!(trace.output_partition), &trace.output_partition);
    let show = |p: &Option<lr_cumulants::partitions::Partition>| match p {
        Some(p) => p.to_string(),
        None => "none".to_string(),
    };
    report.result("left_standings", json!(left), show(&left));
    report.result("right_standings", json!(right), show(&right));
    report.result("combined_standings", json!(rho), &rho);
    report.result("sigma_chi", json!(sigma.images()), format!("{:?}", sigma.images()));

    let moved = act(&sigma, &rho)?;
    report.push(Check::equal("sigma.combined = output partition", &trace.output_partition, &moved), 1);
    report.push(Check::equal("psi(output partition) = path", &path, psi(&trace.output_partition)), 1);
    report.push(
        Check::new("combined standings non-crossing", "true", rho.is_noncrossing().to_string(), rho.is_noncrossing()),
        1,
    );
    Ok(report)
}

fn value_cmd(kind: ValueKind, args: &ValueArgs) -> Result<RunReport> {
    let chi: ChiWord = args.chi.parse()?;
    let omega = parse_index_word(&args.omega)?;
    if chi.len() != omega.len() {
        return Err(Error::InvalidArgument(format!(
            "--chi {chi} has length {} but --omega has length {}",
            chi.len(),
            omega.len()
        )));
    }
    let command = match kind {
        ValueKind::Moment => "moment",
        ValueKind::Cumulant => "cumulant",
    };
    let report = RunReport::new(command)
        .param("chi", chi.to_string())
        .param("omega", format_index_word(&omega));
    match &args.table {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            let table = RationalTable::from_json(&text)?;
            let report = report.param("table", path.display().to_string());
            two_routes(kind, &chi, &omega, &table, report)
        }
        None => {
            let max_index = omega.iter().copied().max().unwrap_or(1);
            let d = args.d.unwrap_or(max_index);
            let table = SymbolicTable::new(d, omega.len())?;
            two_routes(kind, &chi, &omega, &table, report.param("table", "symbolic"))
        }
    }
}

fn two_routes<C>(kind: ValueKind, chi: &ChiWord, omega: &[usize], table: &C, mut report: RunReport) -> Result<RunReport>
where
    C: CoefficientSource,
    C::Scalar: Display,
{
    if let Some(&i) = omega.iter().find(|&&i| i > table.d()) {
        return Err(Error::InvalidArgument(format!("index {i} exceeds the table's d = {}", table.d())));
    }
    let engine = FockEngine::new(table);
    let word = c_word(omega, chi)?;
    let (first_name, first, second_name, second) = match kind {
        ValueKind::Moment => {
            let direct = engine.moment_of(&word)?;
            let summed = moment_via_pchi_cached(omega, chi, table, &PchiCache::new())?;
            ("fock_engine", direct, "partition_sum", summed)
        }
        ValueKind::Cumulant => {
            let kappa = LrCumulants::new(&engine).cumulant(chi, &word)?;
            let symbol = bimixture_symbol(omega, chi)?;
            report.result("bimixture_symbol", json!(symbol.to_string()), &symbol);
            ("cumulant_recursion", kappa, "bimixture", table.coefficient(&symbol))
        }
    };
    report.result(first_name, first.to_json(), &first);
    report.result(second_name, second.to_json(), &second);
    report.push(
        Check::new(format!("{first_name} = {second_name}"), second.to_string(), first.to_string(), first == second),
        1,
    );
    Ok(report)
}
