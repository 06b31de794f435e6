use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fracq_core::harness::{
    export_heatmap, read_session_log, run_cohort, run_session_with_catalog, write_nspeak_timeline,
    write_session_log, CohortConfig, SessionConfig,
};
use fracq_core::simulator::UserProfile;
use fracq_core::stats::{welch_test, welch_test_samples};
use fracq_core::{ActionCatalog, Algorithm, LearnerConfig};
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "fracq",
    version,
    about = "Boredom-avoiding Q-learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded session against a simulated user.
    Run(RunArgs),
    /// Run several algorithms over paired seeds and compare them.
    Cohort(CohortArgs),
    /// Welch's t-test from summary statistics or raw samples.
    Welch(WelchArgs),
    /// Serve the HTTP/JSON session API.
    Serve(ServeArgs),
    /// Check a session log file for structural consistency.
    CheckLog { file: PathBuf },
}

#[derive(Args)]
struct LearnerArgs {
    /// Preset name (static-enthusiast, bored-fast, bored-slow, indifferent) or JSON file.
    #[arg(long, default_value = "bored-fast")]
    profile: String,
    #[arg(long, default_value_t = fracq_core::harness::DEFAULT_STEPS)]
    steps: usize,
    /// JSON file with learner parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// frac, q (traditional) or random.
    #[arg(long, default_value = "frac")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
    /// JSON action catalog; defaults to the built-in one.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CohortArgs {
    /// Comma-separated list, e.g. frac,q,random.
    #[arg(long, value_delimiter = ',', default_value = "frac,q,random")]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 20)]
    n_seeds: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WelchArgs {
    /// a_mean,a_sd,a_n,b_mean,b_sd,b_n
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    summary: Option<Vec<f64>>,
    /// JSON file {"a": [...], "b": [...]}.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "FRACQ_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, env = "FRACQ_IDLE_TIMEOUT_SECS", default_value_t = 30 * 60)]
    idle_timeout_secs: u64,
    /// Allowed browser origin; any origin when omitted.
    #[arg(long, env = "FRACQ_CORS_ORIGIN")]
    cors_origin: Option<String>,
}

#[derive(Deserialize)]
struct SamplesFile {
    a: Vec<f64>,
    b: Vec<f64>,
}

fn learner_config(path: Option<&Path>) -> Result<LearnerConfig> {
    match path {
        None => Ok(LearnerConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn profile(name_or_path: &str) -> Result<UserProfile> {
    UserProfile::from_preset_or_file(name_or_path).with_context(|| format!("loading profile {name_or_path:?}"))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let catalog = match &args.catalog {
        Some(p) => {
            ActionCatalog::load(p).with_context(|| format!("loading catalog {}", p.display()))?
        }
        None => ActionCatalog::default(),
    };
    let cfg = SessionConfig {
        algorithm: args.algorithm,
        steps: args.learner.steps,
        learner_config: learner_config(args.learner.config.as_deref())?,
        user_profile: profile(&args.learner.profile)?,
        session_seed: args.seed,
    };
    let log = run_session_with_catalog(&cfg, Arc::new(catalog))?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_session_log(&log, args.out.join("session_log.json"))?;
    export_heatmap(&log, args.out.join("heatmap.csv"))?;
    write_nspeak_timeline(&log, args.out.join("timeline.csv"))?;
    println!(
        "{} steps, mean state {:.3}, cumulative reward {}, total nSpeak {}, forgets {} -> {}",
        log.steps(),
        log.mean_state(),
        log.cumulative_reward,
        log.total_n_speak(),
        log.records.iter().filter(|r| r.forgot).count(),
        args.out.display()
    );
    Ok(())
}

fn cohort(args: CohortArgs) -> Result<()> {
    let cfg = CohortConfig {
        algorithms: args.algorithms,
        user_profile: profile(&args.learner.profile)?,
        n_seeds: args.n_seeds,
        base_seed: args.base_seed,
        steps: args.learner.steps,
        learner_config: learner_config(args.learner.config.as_deref())?,
    };
    let summary = run_cohort(&cfg)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_json(&args.out.join("cohort_summary.json"), &summary)?;
    for c in &summary.comparisons {
        println!(
            "{:>11} vs {:<11} {:<17} {:>9.3} vs {:>9.3}  t={:>7.3} df={:>6.2} p={:.4}",
            c.a.as_str(),
            c.b.as_str(),
            format!("{:?}", c.metric),
            c.mean_a,
            c.mean_b,
            c.welch.t_statistic,
            c.welch.degrees_of_freedom,
            c.welch.p_value_two_tailed
        );
    }
    Ok(())
}

fn welch(args: WelchArgs) -> Result<()> {
    let result = match (args.summary, args.samples) {
        (Some(v), None) => {
            if v.len() != 6 {
                bail!("--summary takes 6 comma-separated values, got {}", v.len());
            }
            let n = |x: f64| -> Result<usize> {
                if x.fract() != 0.0 || x < 0.0 {
                    bail!("group sizes must be non-negative integers, got {x}");
                }
                Ok(x as usize)
            };
            welch_test(v[0], v[1], n(v[2])?, v[3], v[4], n(v[5])?)?
        }
        (None, Some(path)) => {
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let s: SamplesFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            welch_test_samples(&s.a, &s.b)?
        }
        _ => bail!("pass exactly one of --summary or --samples"),
    };
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn check_log(file: &Path) -> Result<()> {
    let log = read_session_log(file).with_context(|| format!("reading {}", file.display()))?;
    log.validate()?;
    println!("ok: {} {} steps", log.algorithm, log.steps());
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let opts = fracq_service::ServeOptions {
        addr: args.addr,
        idle_timeout: Duration::from_secs(args.idle_timeout_secs),
        cors_origin: args.cors_origin,
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(fracq_service::serve(opts))?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::Cohort(a) => cohort(a),
        Command::Welch(a) => welch(a),
        Command::Serve(a) => serve(a),
        Command::CheckLog { file } => check_log(&file),
    }
}
