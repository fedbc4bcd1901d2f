use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gramopt::benchmarks::{Case, Rgb};
use gramopt::harness::output::{
    records_from_text, statistics, Format, ResultsDocument, RANK_TEST_METHOD,
};
use gramopt::harness::{best_scheme, run_experiment, ExperimentSpec, HarnessError};
use gramopt::{Grammar, Heuristic, SearchError};

#[derive(Parser)]
#[command(
    name = "gramopt",
    version,
    about = "Grammatical optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated seeded runs of a built-in case.
    Bench(BenchArgs),
    /// Recompute summaries and p-values from a JSON or CSV results file.
    Stats { path: PathBuf },
    /// Search a color scheme for a background and write it as CSS.
    Highlight(HighlightArgs),
    /// Parse a grammar file, print it canonically, optionally enumerate trees.
    Grammar(GrammarArgs),
}

#[derive(clap::Args)]
struct BenchArgs {
    case: Case,
    #[arg(long, value_delimiter = ',', default_value = "grant,grevo,random")]
    heuristics: Vec<Heuristic>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    grid_step: Option<f64>,
    /// GrEvo population and generations, e.g. 40:25.
    #[arg(long)]
    grevo_ratio: Option<String>,
    #[arg(long)]
    depth_cap: Option<usize>,
    /// Bundled subset-sum instance, P01 or P02.
    #[arg(long)]
    instance: Option<String>,
    /// Subset-sum instance file: target on the first line, then weights.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    #[arg(long)]
    background: Option<String>,
    #[arg(long)]
    load_seed: Option<u64>,
    /// Extra heuristic or case parameter, KEY=VALUE; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(clap::Args)]
struct HighlightArgs {
    #[arg(long)]
    background: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "grant")]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct GrammarArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// List every tree of the start sort up to this depth.
    #[arg(long)]
    enumerate: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    limit: usize,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidSpec(_)
            | HarnessError::UnknownParameter(_)
            | HarnessError::InvalidParameter { .. }
            | HarnessError::Search(SearchError::BudgetExceeded { .. })
            | HarnessError::Search(SearchError::PopulationTooSmall(..))
            | HarnessError::Search(SearchError::InvalidParameter(..))
            | HarnessError::Search(SearchError::ZeroBudget) => Failure::Usage(e.into()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(runtime),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing standard output")
            .map_err(runtime),
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut spec = ExperimentSpec::new(
        args.case,
        args.heuristics,
        args.runs,
        args.budget,
        args.seed,
    );
    let flags = [
        ("grid_step", args.grid_step.map(|v| v.to_string())),
        ("grevo_ratio", args.grevo_ratio),
        ("depth_cap", args.depth_cap.map(|v| v.to_string())),
        ("instance", args.instance),
        (
            "instance_file",
            args.instance_file.map(|p| p.display().to_string()),
        ),
        ("background", args.background),
        ("load_seed", args.load_seed.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            spec = spec.with_param(key, v);
        }
    }
    for kv in &args.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            Failure::Usage(anyhow::anyhow!("--param expects KEY=VALUE, got {kv:?}"))
        })?;
        spec = spec.with_param(k.trim(), v.trim());
    }
    let records = run_experiment(&spec)?;
    let doc = ResultsDocument::new(spec, records)?;
    let text = match args.format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    write_output(args.out.as_deref(), &text)
}

fn stats(path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(runtime)?;
    let records = records_from_text(&text)?;
    let (summaries, p_values) = statistics(&records)?;
    let report = serde_json::json!({
        "summaries": summaries,
        "pValues": p_values,
        "rankTest": RANK_TEST_METHOD,
    });
    let mut out = serde_json::to_string_pretty(&report).map_err(runtime)?;
    out.push('\n');
    write_output(None, &out)
}

fn highlight(args: HighlightArgs) -> Result<(), Failure> {
    let background: Rgb = args
        .background
        .parse()
        .map_err(|e: gramopt::benchmarks::BenchmarkError| Failure::Usage(e.into()))?;
    let spec = ExperimentSpec::new(
        Case::Syntax,
        vec![args.heuristic],
        args.runs,
        args.budget,
        args.seed,
    )
    .with_param("background", background.to_string());
    let (scheme, record) = best_scheme(&spec)?;
    write_output(Some(&args.out), &scheme.to_css())?;
    eprintln!(
        "readability {:.4}, minimum contrast {:.2}, {} distinct colors (run {})",
        record.best_fitness,
        scheme.min_contrast(),
        scheme.distinct_colors(),
        record.run
    );
    Ok(())
}

fn grammar(args: GrammarArgs) -> Result<(), Failure> {
    let path = &args.grammar;
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(runtime)?;
    let g = Grammar::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(runtime)?;
    let mut out = g.to_string();
    if !out.ends_with('\n') {
        out.push('\n');
    }
    if let Some(depth) = args.enumerate {
        let trees = g
            .enumerate_trees(g.start(), depth, args.limit)
            .map_err(runtime)?;
        out.push('\n');
        for t in trees {
            out.push_str(&format!("{t}\n"));
        }
    }
    write_output(None, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Stats { path } => stats(&path),
        Command::Highlight(args) => highlight(args),
        Command::Grammar(args) => grammar(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
