use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use keyphrase_core::experiment::Split;
use keyphrase_core::pipeline::{self, RunConfig};

#[derive(Parser)]
#[command(name = "keyphrase", version, about = "Supervised keyphrase extraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Count background n-grams into the index.
    IndexBackground,
    /// Filter responses, sample negatives and write the feature matrix.
    Featurize,
    /// Fit every experiment model.
    Train,
    /// Score the trained models and write curves plus the AUC table.
    Eval,
    /// Write descriptive statistics of the responses.
    Analyze,
    /// Print the effective configuration as TOML.
    ShowConfig,
}

/// Flags that take precedence over the config file.
#[derive(Args, Default)]
struct Overrides {
    /// TOML or JSON run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    foreground: Option<PathBuf>,
    #[arg(long, global = true)]
    background: Option<PathBuf>,
    #[arg(long, global = true)]
    annotations: Option<PathBuf>,
    #[arg(long, global = true)]
    responses: Option<PathBuf>,
    #[arg(long, global = true)]
    blocklist: Option<PathBuf>,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    commonness_bins: Option<usize>,
    /// Evaluate on this fraction of documents, held out from training.
    #[arg(long, global = true, value_name = "FRACTION")]
    held_out: Option<f64>,
    #[arg(long, global = true)]
    no_grammar: bool,
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
        _ => toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
    };
    Ok(config)
}

fn resolve(o: &Overrides) -> Result<RunConfig> {
    let mut config = match &o.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    let p = &mut config.paths;
    if let Some(v) = &o.foreground {
        p.foreground = v.clone();
    }
    if let Some(v) = &o.background {
        p.background = Some(v.clone());
    }
    if let Some(v) = &o.annotations {
        p.annotations = Some(v.clone());
    }
    if let Some(v) = &o.responses {
        p.responses = v.clone();
    }
    if let Some(v) = &o.blocklist {
        p.blocklist = Some(v.clone());
    }
    if let Some(v) = &o.output {
        p.output = v.clone();
    }
    if let Some(seed) = o.seed {
        config.seed = seed;
        config.train.seed = seed;
    }
    if let Some(bins) = o.commonness_bins {
        config.commonness_bins = bins;
    }
    if let Some(fraction) = o.held_out {
        config.split = Split::HeldOut {
            fraction,
            seed: config.seed,
        };
    }
    if o.no_grammar {
        config.features.grammar = false;
    }
    for (name, path) in [
        ("foreground", &config.paths.foreground),
        ("responses", &config.paths.responses),
        ("output", &config.paths.output),
    ] {
        if path.as_os_str().is_empty() {
            bail!("no {name} path given; set it in the config file or pass --{name}");
        }
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<()> {
    let config = resolve(&cli.overrides).context("config")?;
    match cli.command {
        Command::IndexBackground => {
            let index = pipeline::cmd_index(&config).context("index-background")?;
            println!("indexed {} documents, {} tokens", index.n_docs, index.total_tokens);
        }
        Command::Featurize => {
            let out = pipeline::cmd_featurize(&config).context("featurize")?;
            let f = &out.funnel;
            println!(
                "responses {} -> spurious {} -> length {} -> extractive {}",
                f.responses, f.after_spurious, f.after_length, f.after_extractive
            );
            println!("{} positives, {} negatives, {} columns", f.unique_positives, f.negatives, out.dataset.feature_names.len());
        }
        Command::Train => {
            let models = pipeline::cmd_train(&config).context("train")?;
            let separated = models.iter().filter(|m| m.separated).count();
            println!("trained {} models ({separated} hit the coefficient cap)", models.len());
        }
        Command::Eval => {
            for (name, auc) in pipeline::cmd_eval(&config).context("eval")? {
                println!("{auc:.4}\t{name}");
            }
        }
        Command::Analyze => {
            let out = pipeline::cmd_analyze(&config).context("analyze")?;
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
        }
        Command::ShowConfig => print!("{}", toml::to_string_pretty(&config)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
