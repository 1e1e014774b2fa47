//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use prefmodel_core::characterize::{compare_agents, Confidence, Subset};
use prefmodel_core::dataset::Corpus;
use prefmodel_core::learners::{LearnerKind, Model};
use prefmodel_core::sampling::{make_test_split, sample_matches};
use prefmodel_core::simulator::{alternative_roster, traditional_roster, RosterEntry, TurnPolicy};
use prefmodel_core::tuning::GridSpec;
use prefmodel_core::{rng, Indicator, MatchLog, Mode, Preference};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::formats::{characterization_csv, read_json, rollup_csv, write_features, write_grid, write_json};
use crate::{logs, pipeline, runner};

#[derive(Debug, Parser)]
#[command(
    name = "prefmodel",
    version,
    about = "Infer agent preferences from turn-level game telemetry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate paired match logs for a roster.
    Simulate(SimulateArgs),
    /// Expand logs into a feature CSV labeled for one preference.
    Featurize(FeaturizeArgs),
    /// Match-level splits: k folds, or a test split plus sampled training set.
    Sample(SampleArgs),
    /// Train one model on all (optionally sampled) matches.
    Train(TrainArgs),
    /// SVM grid search on one cross-validation fold.
    Tune(TuneArgs),
    /// Cross-validated reports for learners × preferences.
    Evaluate(EvaluateArgs),
    /// Regression characterization of one indicator for two agents.
    Characterize(CharacterizeArgs),
    /// Simulate, featurize and cross-validate everything from one seed.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "PREFMODEL_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Target preferences, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub preference: Vec<Preference>,
    /// Learners, comma separated (naive_bayes, adaboost, ripper, svm).
    #[arg(long, value_delimiter = ',')]
    pub learner: Vec<LearnerKind>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Fraction of each training fold's matches to keep; 1 keeps all.
    #[arg(long)]
    pub perc: Option<f64>,
    /// Keep only instances from turns after this one.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Tune SVM hyperparameters per fold.
    #[arg(long)]
    pub tune_svm: bool,
}

impl PipelineArgs {
    fn apply(&self, run: &RunArgs, cfg: &mut ExperimentConfig) {
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if !self.preference.is_empty() {
            cfg.preferences = self.preference.clone();
        }
        if !self.learner.is_empty() {
            cfg.learners = self.learner.clone();
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(p) = self.perc {
            cfg.perc = (p < 1.0).then_some(p);
        }
        if let Some(c) = self.cutoff {
            cfg.cutoff = c;
        }
        if let Some(s) = run.seed {
            cfg.seed = s;
        }
        cfg.tune_svm |= self.tune_svm;
    }
}

fn config(run: &RunArgs, pipe: &PipelineArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(run.config.as_deref())?;
    pipe.apply(run, &mut cfg);
    Ok(cfg)
}

fn single<T: Copy + std::fmt::Display>(values: &[T], what: &str) -> Result<T> {
    match values {
        [v] => Ok(*v),
        [] => Err(Error::Usage(format!("--{what} is required"))),
        _ => Err(Error::Usage(format!("exactly one --{what} expected"))),
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Roster JSON (list of `{agent_id, preference}`); default: the
    /// traditional six-agent roster.
    #[arg(long, conflicts_with = "alternative")]
    pub roster: Option<PathBuf>,
    /// Use the alternative six-agent roster.
    #[arg(long)]
    pub alternative: bool,
    #[arg(long, default_value_t = 8)]
    pub games_per_pair: usize,
    #[arg(long, default_value_t = 240)]
    pub min_turns: u32,
    #[arg(long, default_value_t = 460)]
    pub max_turns: u32,
    /// Output directory for the logs.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Directory of match logs.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Fraction of matches held out for testing (used without `--k`).
    #[arg(long, default_value_t = 0.1)]
    pub test_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Model JSON; rule sets are also rendered next to it as `.rules.txt`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0)]
    pub fold: usize,
    /// Fraction of the training fold's matches used for validation.
    #[arg(long, default_value_t = 0.2)]
    pub validation_fraction: f64,
    /// Grid CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory for reports and the roll-up table.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub indicator: Indicator,
    /// `none` or `rootK` (e.g. `root5`).
    #[arg(long, default_value = "none")]
    pub transform: String,
    /// The two agents to compare, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub agents: Vec<String>,
    /// Segment boundaries (last turn of each segment but the final one).
    #[arg(long, value_delimiter = ',')]
    pub breakpoint: Vec<u32>,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value = "general")]
    pub subset: Subset,
    /// CSV output; the full report goes next to it as JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[command(flatten)]
    pub pipe: PipelineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub games_per_pair: Option<usize>,
    /// Also write the simulated logs under `<out>/logs`.
    #[arg(long)]
    pub keep_logs: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))
}

fn corpus(input: &Path, cfg: &ExperimentConfig) -> Result<(Vec<MatchLog>, Corpus)> {
    let logs = logs::read_logs(input)?;
    let corpus = Corpus::from_logs(&logs, cfg.mode, cfg.cutoff)?;
    log::info!("{} logs, {} instances", corpus.len(), corpus.n_instances());
    Ok((logs, corpus))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(Error::io(path))
}

fn write_batch(out: &Path, batch: &pipeline::BatchOutcome) -> Result<()> {
    create_dir(out)?;
    for r in &batch.reports {
        write_json(&out.join(format!("report_{}_{}.json", r.learner, r.preference)), r)?;
    }
    write_text(&out.join("rollup.csv"), &rollup_csv(&batch.reports))?;
    write_json(&out.join("rollup.json"), &batch.reports)
}

fn finish(batch: &pipeline::BatchOutcome) -> Result<()> {
    if batch.failures.is_empty() {
        return Ok(());
    }
    for f in &batch.failures {
        eprintln!("failed: {f}");
    }
    Err(Error::Usage(format!("{} evaluation(s) failed", batch.failures.len())))
}

#[derive(Serialize)]
struct Split {
    seed: u64,
    preference: Preference,
    test: Vec<String>,
    train: Vec<String>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let roster: Vec<RosterEntry> = match (&a.roster, a.alternative) {
                (Some(p), _) => read_json(p)?,
                (None, true) => alternative_roster(),
                (None, false) => traditional_roster(),
            };
            let policy = TurnPolicy {
                min: a.min_turns,
                max: a.max_turns,
                ..TurnPolicy::default()
            };
            let logs = pipeline::simulate(&roster, a.games_per_pair, &policy, a.run.seed.unwrap_or(0))?;
            logs::write_logs(&a.out, &logs)?;
            println!("wrote {} logs to {}", logs.len(), a.out.display());
        }
        Command::Featurize(a) => {
            let cfg = config(&a.run, &a.pipe)?;
            let target = single(&a.pipe.preference, "preference")?;
            let (_, corpus) = corpus(&a.input, &cfg)?;
            write_features(&a.out, &corpus, target)?;
            println!(
                "wrote {} instances × {} features",
                corpus.n_instances(),
                corpus.names().len()
            );
        }
        Command::Sample(a) => {
            let cfg = config(&a.run, &a.pipe)?;
            let target = single(&a.pipe.preference, "preference")?;
            let (_, corpus) = corpus(&a.input, &cfg)?;
            if a.pipe.k.is_some() {
                write_json(&a.out, &pipeline::folds_for(&corpus, target, cfg.k, cfg.seed)?)?;
            } else {
                let keys = corpus.keys(target);
                let (test, rest) = make_test_split(&keys, a.test_fraction, rng::derive(cfg.seed, 1))?;
                let train = match cfg.perc {
                    Some(p) => sample_matches(&rest, p, rng::derive(cfg.seed, 2))?,
                    None => rest,
                };
                let ids = |v: Vec<prefmodel_core::sampling::MatchKey>| v.into_iter().map(|k| k.match_id).collect();
                println!("{} test matches, {} training matches", test.len(), train.len());
                write_json(
                    &a.out,
                    &Split {
                        seed: cfg.seed,
                        preference: target,
                        test: ids(test),
                        train: ids(train),
                    },
                )?;
            }
        }
        Command::Train(a) => {
            let cfg = config(&a.run, &a.pipe)?;
            let target = single(&a.pipe.preference, "preference")?;
            let kind = single(&a.pipe.learner, "learner")?;
            let (_, corpus) = corpus(&a.input, &cfg)?;
            let mut keys = corpus.keys(target);
            if let Some(p) = cfg.perc {
                keys = sample_matches(&keys, p, rng::derive(cfg.seed, 2))?;
            }
            let data = corpus.dataset(keys.iter().map(|k| k.match_id.as_str()), target);
            let model = pipeline::learner_spec(kind, &cfg).train(&data, rng::derive(cfg.seed, 3))?;
            write_json(&a.out, &model)?;
            if let Model::Ripper(rules) = &model.model {
                write_text(&a.out.with_extension("rules.txt"), &rules.render(target.title()))?;
            }
            println!(
                "trained {kind} on {} instances; training accuracy {:.4}",
                data.len(),
                model.accuracy(&data)?
            );
        }
        Command::Tune(a) => {
            let cfg = config(&a.run, &a.pipe)?;
            let target = single(&a.pipe.preference, "preference")?;
            let (_, corpus) = corpus(&a.input, &cfg)?;
            let folds = pipeline::folds_for(&corpus, target, cfg.k, cfg.seed)?;
            if a.fold >= folds.k {
                return Err(Error::Usage(format!("--fold {} out of range 0..{}", a.fold, folds.k)));
            }
            let options = pipeline::eval_options(&cfg, target);
            let fold_seed = rng::derive(options.seed, a.fold as u64);
            let mut keys: Vec<_> = corpus
                .blocks()
                .iter()
                .filter(|b| folds.fold_of(&b.match_id).is_some_and(|f| f != a.fold))
                .map(|b| b.key(target))
                .collect();
            if let Some(p) = cfg.perc {
                keys = sample_matches(&keys, p, rng::derive(fold_seed, 1))?;
            }
            let (valid, fit) = make_test_split(&keys, a.validation_fraction, rng::derive(fold_seed, 2))?;
            let fit = corpus.dataset(fit.iter().map(|k| k.match_id.as_str()), target);
            let valid = corpus.dataset(valid.iter().map(|k| k.match_id.as_str()), target);
            let pool = runner::pool(a.run.jobs)?;
            let outcome = runner::svm_grid(&pool, &fit, &valid, &GridSpec::default())?;
            write_grid(&a.out, &outcome)?;
            println!(
                "{} cells; best c=2^{} g=2^{} accuracy {:.4}",
                outcome.cells.len(),
                outcome.best_c,
                outcome.best_g,
                outcome.best_accuracy
            );
        }
        Command::Evaluate(a) => {
            let cfg = config(&a.run, &a.pipe)?;
            let (_, corpus) = corpus(&a.input, &cfg)?;
            let pool = runner::pool(a.run.jobs)?;
            let batch = pipeline::evaluate_all(&pool, &corpus, &cfg);
            write_batch(&a.out, &batch)?;
            print!("{}", rollup_csv(&batch.reports));
            finish(&batch)?;
        }
        Command::Characterize(a) => {
            let (x, y) = match a.agents.as_slice() {
                [x, y] => (x, y),
                _ => return Err(Error::Usage("--agents needs exactly two agent ids".into())),
            };
            let transform = match a.transform.as_str() {
                "none" => None,
                t => Some(
                    t.strip_prefix("root")
                        .and_then(|k| k.parse::<u32>().ok())
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| Error::Usage(format!("--transform `{t}`: expected none or rootK")))?,
                ),
            };
            let confidence = Confidence::from_value(a.confidence)?;
            let logs = logs::read_logs(&a.input)?;
            let of = |id: &str| -> Result<Vec<&MatchLog>> {
                let v: Vec<&MatchLog> = logs.iter().filter(|l| l.agent_id() == id).collect();
                if v.is_empty() {
                    return Err(Error::Usage(format!("no logs for agent `{id}`")));
                }
                Ok(v)
            };
            let report = compare_agents(
                &of(x)?,
                &of(y)?,
                a.indicator,
                transform,
                &a.breakpoint,
                a.subset,
                confidence,
            )?;
            write_text(&a.out, &characterization_csv(&report))?;
            write_json(&a.out.with_extension("json"), &report)?;
            for (i, s) in report.separation.iter().enumerate() {
                println!(
                    "interval {:?}: b0 {:?}, b1 {:?}",
                    report.intervals[i], s[0].verdict, s[1].verdict
                );
            }
        }
        Command::Repro(a) => {
            let mut cfg = config(&a.run, &a.pipe)?;
            if let Some(g) = a.games_per_pair {
                cfg.games_per_pair = g;
            }
            create_dir(&a.out)?;
            let logs = pipeline::simulate(
                &traditional_roster(),
                cfg.games_per_pair,
                &TurnPolicy::default(),
                cfg.seed,
            )?;
            if a.keep_logs {
                logs::write_logs(&a.out.join("logs"), &logs)?;
            }
            let corpus = Corpus::from_logs(&logs, cfg.mode, cfg.cutoff)?;
            let pool = runner::pool(a.run.jobs)?;
            let batch = pipeline::evaluate_all(&pool, &corpus, &cfg);
            write_json(&a.out.join("config.json"), &cfg)?;
            write_batch(&a.out, &batch)?;
            print!("{}", rollup_csv(&batch.reports));
            finish(&batch)?;
        }
    }
    Ok(())
}
