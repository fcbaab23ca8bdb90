use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use openmas::eval::{
    aggregate, policy_names, reward_over_time, run_batch_config, run_single, significance_matrix, BatchResult,
    EvalError,
};
use openmas::report::render::{render_svgs, render_text, RenderError};
use openmas::report::{self, svg, Manifest, ManifestEntry};
use openmas::{parse_config, ConfigError, Domain, EnvConfig};

#[derive(Parser)]
#[command(name = "openmas", version, about = "Evaluate, compare and replay open multi-agent benchmark runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EnvArgs {
    /// Domain; inferred from --config when omitted.
    #[arg(long)]
    domain: Option<Domain>,
    /// TOML or JSON config file; the domain default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded batches for one or more policies.
    Evaluate {
        #[command(flatten)]
        env: EnvArgs,
        /// Policy name; repeat for several. Defaults to every baseline of the domain.
        #[arg(long = "policy")]
        policies: Vec<String>,
        #[arg(long, default_value_t = 256)]
        runs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Build leaderboards, significance tables and plots from result files.
    Compare {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Run a single episode, optionally recording its replay.
    Run {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value = "noop")]
        policy: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Render a recorded replay.
    Render {
        replay: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Text)]
        mode: Mode,
        /// Output directory for vector frames.
        #[arg(long, default_value = "frames")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Text,
    Vector,
}

enum Failure {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(m) => Failure::Runtime(m),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Config(c) => c.into(),
            EvalError::Run(r) => Failure::Runtime(r.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// Resolves the config and a label for it.
fn load_env(args: &EnvArgs) -> Result<(EnvConfig, String), Failure> {
    match (&args.config, args.domain) {
        (Some(path), domain) => {
            let config = parse_config(path)?;
            if let Some(d) = domain.filter(|&d| d != config.domain()) {
                return Err(Failure::Validation(format!(
                    "--domain {d} does not match {} config {}",
                    config.domain(),
                    path.display()
                )));
            }
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((config, name))
        }
        (None, Some(d)) => Ok((EnvConfig::default_for(d), "default".into())),
        (None, None) => Err(Failure::Usage("either --domain or --config is required".into())),
    }
}

fn evaluate(env: &EnvArgs, policies: &[String], runs: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    let (config, name) = load_env(env)?;
    if runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }
    let domain = config.domain();
    let policies: Vec<String> = if policies.is_empty() {
        policy_names(domain).iter().map(|s| s.to_string()).collect()
    } else {
        policies.to_vec()
    };
    let mut entries = Vec::new();
    for policy in &policies {
        let mut batch = run_batch_config(&config, policy, runs, seed)?;
        batch.header.config_name = name.clone();
        let file = format!("{policy}.jsonl");
        write(&out.join(&file), &batch.to_jsonl())?;
        let crashes = batch.records.iter().filter(|r| r.crashed).count();
        let summary = aggregate(&batch);
        println!(
            "{policy}: mean {:.3} ± {:.3} (se, n={}){}",
            summary.reward.mean,
            summary.reward.std_error,
            summary.reward.n,
            if crashes > 0 { format!(", {crashes} crashed") } else { String::new() }
        );
        entries.push(ManifestEntry { policy: policy.clone(), file, episodes: runs, crashes });
    }
    let manifest = Manifest {
        domain,
        config_name: name,
        config_digest: config.digest(),
        base_seed: seed,
        runs,
        stream_derivation: "derive_stream(base_seed, episode_index)".into(),
        results: entries,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
    write(&out.join("manifest.json"), &text)?;
    println!("wrote {} result files to {}", policies.len(), out.display());
    Ok(())
}

fn compare(paths: &[PathBuf], alpha: f64, out: &Path) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Failure::Usage("--alpha must lie in [0, 1]".into()));
    }
    let mut batches = Vec::new();
    for p in paths {
        let batch = BatchResult::from_jsonl(&read(p)?)
            .map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?;
        batches.push(batch);
    }
    let domain = batches[0].header.domain;
    if let Some(b) = batches.iter().find(|b| b.header.domain != domain) {
        return Err(Failure::Validation(format!(
            "cannot compare {domain} results with {} results ('{}')",
            b.header.domain, b.header.policy
        )));
    }

    let mut groups: BTreeMap<String, Vec<&BatchResult>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for b in &batches {
        let label = b.config_label();
        if !order.contains(&label) {
            order.push(label.clone());
        }
        groups.entry(label).or_default().push(b);
    }

    let mut summaries = Vec::new();
    let mut matrices = Vec::new();
    let mut curves = Vec::new();
    for label in &order {
        let group = &groups[label];
        let matrix = significance_matrix(group, alpha).map_err(|e| Failure::Validation(format!("config '{label}': {e}")))?;
        for b in group {
            summaries.push((label.clone(), aggregate(b)));
            curves.push((label.clone(), b.header.policy.clone(), reward_over_time(b)));
        }
        matrices.push((label.clone(), matrix));
    }

    let board = report::leaderboard(&summaries);
    write(&out.join("leaderboard.csv"), &board.to_csv())?;
    write(&out.join("significance.csv"), &report::significance_csv(&matrices))?;
    write(&out.join("summary.json"), &report::summaries_json(&summaries))?;
    write(&out.join("activity.csv"), &report::activity_csv(&summaries))?;
    write(&out.join("reward_over_time.csv"), &report::reward_over_time_csv(&curves))?;

    let series: Vec<(String, Vec<Option<(f64, f64)>>)> = board
        .rows
        .iter()
        .map(|r| (r.policy.clone(), r.cells.iter().map(|c| c.as_ref().map(|c| (c.mean, c.std_error))).collect()))
        .collect();
    let title = format!("{domain}: mean cumulative reward ± standard error");
    write(&out.join("rewards.svg"), &svg::bar_chart(&title, &board.configs, &series))?;
    let class = report::activity_class(domain);
    let points: Vec<(String, f64, f64)> = report::activity_points(&summaries)
        .into_iter()
        .map(|(c, p, x, y)| (if order.len() > 1 { format!("{p} ({c})") } else { p }, x, y))
        .collect();
    write(
        &out.join("activity.svg"),
        &svg::scatter(&format!("{domain}: {class} share vs reward"), &format!("{class} %"), "mean reward", &points),
    )?;
    let lines: Vec<(String, Vec<(usize, f64)>)> = curves
        .iter()
        .map(|(c, p, s)| (if order.len() > 1 { format!("{p} ({c})") } else { p.clone() }, s.clone()))
        .collect();
    write(&out.join("reward_over_time.svg"), &svg::line_chart(&format!("{domain}: reward over time"), &lines))?;

    print!("{}", board.to_text());
    for (label, m) in &matrices {
        let sig = m
            .cells
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().skip(i + 1).map(move |(j, c)| (i, j, c)))
            .filter(|(_, _, c)| c.significant())
            .count();
        println!("{label}: {sig} significant pairs at alpha {alpha}");
    }
    println!("wrote report to {}", out.display());
    Ok(())
}

fn run(env: &EnvArgs, policy: &str, seed: u64, record: Option<&Path>) -> Result<(), Failure> {
    let (config, _) = load_env(env)?;
    let (replay, summary) = run_single(&config, policy, seed)?;
    if let Some(path) = record {
        write(path, &replay)?;
    }
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}

fn render(replay: &Path, mode: Mode, out: &Path) -> Result<(), Failure> {
    let text = read(replay)?;
    match mode {
        Mode::Text => print!("{}", render_text(&text)?),
        Mode::Vector => {
            let frames = render_svgs(&text)?;
            for (i, frame) in frames.iter().enumerate() {
                write(&out.join(format!("step_{:04}.svg", i + 1)), frame)?;
            }
            println!("wrote {} frames to {}", frames.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Evaluate { env, policies, runs, seed, out } => evaluate(env, policies, *runs, *seed, out),
        Command::Compare { results, alpha, out } => compare(results, *alpha, out),
        Command::Run { env, policy, seed, record } => run(env, policy, *seed, record.as_deref()),
        Command::Render { replay, mode, out } => render(replay, *mode, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
