use std::fs;
use std::io::{self, BufRead, Write};
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use selfnest::approx::{
    delta_nest_embedded_from_counts, delta_nest_from_counts, format_delta, nest, nest_embedded,
    nest_with, DeficitUpdate, NestRule,
};
use selfnest::bench::{
    render_svg, run_benchmark, summarize, summary_table, write_csv, write_violations,
    DEFAULT_MASTER_SEED, DEFAULT_SIZES, DEFAULT_TRIALS,
};
use selfnest::dag::reduce;
use selfnest::error::ApproxError;
use selfnest::oracle::{brute_nest, brute_nest_embedded, is_self_nested_direct, ORACLE_MAX_NODES};
use selfnest::profile::compute_profile;
use selfnest::randgen::{random_tree, GenSpec};
use selfnest::tree::{parse_tree, Tree};

#[derive(Parser)]
#[command(name = "selfnest", version, about = "Self-nested approximations of unordered rooted trees")]
struct Cli {
    /// Process input lines on N threads; output keeps input order.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the height profile of each tree.
    Profile { input: Option<PathBuf> },
    /// Print the DAG reduction of each tree.
    Dag {
        /// Graphviz output instead of the class list.
        #[arg(long)]
        dot: bool,
        input: Option<PathBuf>,
    },
    /// Nearest embedding self-nested tree (insertions), or with --embedded
    /// the nearest embedded one (deletions).
    Nest {
        #[arg(long)]
        embedded: bool,
        /// Use the exhaustive search instead of the fast algorithm.
        #[arg(long)]
        oracle: bool,
        /// Let deficits go negative during propagation.
        #[arg(long, conflicts_with_all = ["embedded", "oracle"])]
        keep_negative: bool,
        input: Option<PathBuf>,
    },
    /// Same as `nest --embedded`.
    NestEmbedded {
        #[arg(long)]
        oracle: bool,
        input: Option<PathBuf>,
    },
    /// Print `true` or `false` per tree.
    CheckSelfnested { input: Option<PathBuf> },
    /// Print seeded random trees; tree `i` uses seed `seed + i`.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run the random-tree benchmark and print per-size statistics.
    Bench {
        /// Comma-separated tree sizes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        /// Where to dump trials in which NeST is farther than NEST (stderr
        /// when omitted).
        #[arg(long, value_name = "PATH")]
        violations: Option<PathBuf>,
    },
    /// Exhaustive search, for trees of at most 12 nodes.
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Nest,
    NestEmbedded,
}

/// An error tied to an exit code: 1 for bad input, 2 for a failed internal
/// check.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::input(format!("{e:#}"))
    }
}

#[derive(Clone, Copy)]
enum LineOp {
    Profile,
    Dag { dot: bool },
    Nest { embedded: bool, oracle: bool, keep_negative: bool },
    CheckSelfNested,
    Oracle(OracleKind),
}

fn stats_line(n_in: u64, n_out: u64, embedded: bool) -> String {
    let delta = if embedded {
        delta_nest_embedded_from_counts(n_in, n_out)
    } else {
        delta_nest_from_counts(n_in, n_out)
    };
    format!("n_in={n_in} n_out={n_out} dist={} delta={}", n_in.abs_diff(n_out), format_delta(&delta))
}

fn run_oracle(tree: &Tree, embedded: bool) -> Result<String, Failure> {
    if tree.len() > ORACLE_MAX_NODES {
        return Err(Failure::input(format!(
            "tree has {} nodes, the exhaustive search takes at most {ORACLE_MAX_NODES}",
            tree.len()
        )));
    }
    let found = if embedded {
        brute_nest_embedded(tree)
    } else {
        // the fast algorithm's output embeds the tree, so its size bounds the search
        brute_nest(tree, nest(tree).output_len)
    };
    let best = found.map_err(|e| Failure::input(e.to_string()))?;
    Ok(format!(
        "{}\n{}\n",
        best.canonical(),
        stats_line(tree.len() as u64, best.len() as u64, embedded)
    ))
}

fn process(op: LineOp, tree: &Tree) -> Result<String, Failure> {
    Ok(match op {
        LineOp::Profile => compute_profile(tree).to_string(),
        LineOp::Dag { dot: true } => reduce(tree).to_dot(),
        LineOp::Dag { dot: false } => reduce(tree).to_string(),
        LineOp::CheckSelfNested => format!("{}\n", is_self_nested_direct(tree)),
        LineOp::Oracle(OracleKind::Nest) => return run_oracle(tree, false),
        LineOp::Oracle(OracleKind::NestEmbedded) => return run_oracle(tree, true),
        LineOp::Nest { oracle: true, embedded, .. } => return run_oracle(tree, embedded),
        LineOp::Nest { embedded, keep_negative, .. } => {
            let out = if embedded {
                nest_embedded(tree)
            } else {
                let rule = NestRule {
                    deficit: if keep_negative { DeficitUpdate::KeepNegative } else { DeficitUpdate::Clamped },
                    ..NestRule::default()
                };
                nest_with(tree, rule).map_err(|e: ApproxError| Failure::internal(e.to_string()))?
            };
            format!("{}\n{}\n", out.tree.canonical(), stats_line(out.input_len, out.output_len, embedded))
        }
    })
}

/// Input lines holding trees: blank lines and stats lines from a previous
/// `nest` are skipped, so `nest` output can be piped back in.
fn read_trees(input: Option<&Path>) -> anyhow::Result<Vec<(usize, String)>> {
    let reader: Box<dyn BufRead> = match input {
        Some(path) => Box::new(io::BufReader::new(
            fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.context("cannot read input")?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with("n_in=") {
            continue;
        }
        lines.push((i + 1, trimmed.to_owned()));
    }
    Ok(lines)
}

fn handle_line(op: LineOp, line_no: usize, text: &str) -> Result<String, Failure> {
    let tree = parse_tree(text).map_err(|e| Failure::input(format!("line {line_no}: {e}")))?;
    process(op, &tree)
}

fn run_lines(op: LineOp, input: Option<&Path>, jobs: Option<usize>) -> Result<(), Failure> {
    let lines = read_trees(input)?;
    let results: Vec<Result<String, Failure>> = match jobs {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::internal(e.to_string()))?;
            pool.install(|| lines.par_iter().map(|(no, text)| handle_line(op, *no, text)).collect())
        }
        _ => lines.iter().map(|(no, text)| handle_line(op, *no, text)).collect(),
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for r in results {
        let text = r?;
        out.write_all(text.as_bytes()).map_err(|e| Failure::input(e.to_string()))?;
    }
    out.flush().map_err(|e| Failure::input(e.to_string()))?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Profile { input } => run_lines(LineOp::Profile, input.as_deref(), jobs),
        Command::Dag { dot, input } => run_lines(LineOp::Dag { dot }, input.as_deref(), jobs),
        Command::Nest { embedded, oracle, keep_negative, input } => {
            run_lines(LineOp::Nest { embedded, oracle, keep_negative }, input.as_deref(), jobs)
        }
        Command::NestEmbedded { oracle, input } => run_lines(
            LineOp::Nest { embedded: true, oracle, keep_negative: false },
            input.as_deref(),
            jobs,
        ),
        Command::CheckSelfnested { input } => run_lines(LineOp::CheckSelfNested, input.as_deref(), jobs),
        Command::Oracle { which, input } => run_lines(LineOp::Oracle(which), input.as_deref(), jobs),
        Command::Random { nodes, seed, count } => {
            if nodes == 0 {
                return Err(Failure::input("--nodes must be at least 1"));
            }
            let mut out = String::new();
            for i in 0..count {
                let tree = random_tree(&GenSpec::uniform(nodes, seed.wrapping_add(i as u64)));
                out.push_str(&tree.to_string());
                out.push('\n');
            }
            print!("{out}");
            Ok(())
        }
        Command::Bench { sizes, trials, seed, csv, svg, violations } => {
            if sizes.is_empty() || sizes.contains(&0) || trials == 0 {
                return Err(Failure::input("need at least one positive size and one trial"));
            }
            let run = || run_benchmark(&sizes, trials, seed);
            let report = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::internal(e.to_string()))?
                    .install(run),
                None => run(),
            };
            if let Some(path) = csv {
                let mut buf = Vec::new();
                write_csv(&report.records, &mut buf).map_err(|e| Failure::input(e.to_string()))?;
                write_file(&path, &buf)?;
            }
            let summaries = summarize(&report.records);
            if let Some(path) = svg {
                write_file(&path, render_svg(&summaries).as_bytes())?;
            }
            let mut dump = Vec::new();
            write_violations(&report.violations, &mut dump).map_err(|e| Failure::input(e.to_string()))?;
            match violations {
                Some(path) => write_file(&path, &dump)?,
                None => io::stderr().write_all(&dump).map_err(|e| Failure::input(e.to_string()))?,
            }
            print!("{}", summary_table(&summaries));
            println!("violations={}", report.violations.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a panic is a broken internal invariant; the hook has already printed it
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("selfnest: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(2),
    }
}
