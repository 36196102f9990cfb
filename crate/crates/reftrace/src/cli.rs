//! Command-line front end: `sample`, `variants`, `run`, `analyze`, `report`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::analyze::{analyze_store, write_outputs, AnalyzeError, AnalyzeSettings};
use crate::config::{self, RunConfig};
use crate::orchestrator::{run_pipeline, FailureKind, PipelineSettings};
use crate::output::csv_writer;
use crate::provider::{from_config, RecordingProvider, RetryPolicy};
use crate::report::write_summary;
use crate::sample::{read_manifest, scan, write_manifest, SampleError, MANIFEST_FILE};
use crate::store::SnapshotStore;
use crate::variants::generate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "reftrace", version, about = "Iterative refactoring harness and line-level change analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a corpus directory and write corpus_manifest.csv.
    Sample,
    /// Write v0 of every variant for the accepted snippets.
    Variants,
    /// Generate v1..vK with the configured provider.
    Run,
    /// Compare snapshots and write the CSV artifacts.
    Analyze,
    /// Analyze, then add summary.json.
    Report,
}

/// Every config key is also a flag; flags win over the config file.
#[derive(Debug, Args, Default)]
pub struct Options {
    /// Key-value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus_dir: Option<String>,
    #[arg(long, global = true)]
    pub store_dir: Option<String>,
    #[arg(long, global = true)]
    pub output_dir: Option<String>,
    /// Defaults to <output-dir>/corpus_manifest.csv.
    #[arg(long, global = true)]
    pub manifest: Option<String>,
    #[arg(long, global = true)]
    pub iterations: Option<String>,
    /// Comma-separated subset of General,Meaning,Comments.
    #[arg(long, global = true)]
    pub prompts: Option<String>,
    /// replay or live-http.
    #[arg(long, global = true)]
    pub provider: Option<String>,
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub temperature: Option<String>,
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Replay script (digest -> response JSON object).
    #[arg(long, global = true)]
    pub script: Option<String>,
    /// Record live responses into this replay script.
    #[arg(long, global = true)]
    pub record_script: Option<String>,
    #[arg(long, global = true)]
    pub max_retries: Option<String>,
    /// Base backoff in seconds, doubled per retry.
    #[arg(long, global = true)]
    pub retry_delay: Option<String>,
    /// Per-request timeout in seconds.
    #[arg(long, global = true)]
    pub timeout: Option<String>,
    #[arg(long, global = true)]
    pub jobs: Option<String>,
    /// changed-only or identity-as-one.
    #[arg(long, global = true)]
    pub matrix_mode: Option<String>,
    /// true or false.
    #[arg(long, global = true)]
    pub bonferroni: Option<String>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl Options {
    fn overrides(&self) -> [(&'static str, &Option<String>); 18] {
        [
            ("corpus-dir", &self.corpus_dir),
            ("store-dir", &self.store_dir),
            ("output-dir", &self.output_dir),
            ("manifest", &self.manifest),
            ("iterations", &self.iterations),
            ("prompts", &self.prompts),
            ("provider", &self.provider),
            ("model", &self.model),
            ("temperature", &self.temperature),
            ("endpoint", &self.endpoint),
            ("script", &self.script),
            ("record-script", &self.record_script),
            ("max-retries", &self.max_retries),
            ("retry-delay", &self.retry_delay),
            ("timeout", &self.timeout),
            ("jobs", &self.jobs),
            ("matrix-mode", &self.matrix_mode),
            ("bonferroni", &self.bonferroni),
        ]
    }

    /// Config file first, then flags.
    pub fn resolve(&self) -> Result<RunConfig, String> {
        let mut map = BTreeMap::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            map = config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        RunConfig::from_map(&map).map_err(|e| e.to_string())
    }
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: EXIT_USAGE, message: message.into() }
}

fn data(message: impl ToString) -> Exit {
    Exit { code: EXIT_DATA, message: message.to_string() }
}

fn required<'a>(value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, Exit> {
    value.as_deref().ok_or_else(|| usage(format!("`{key}` is required (flag --{key} or config key)")))
}

fn manifest_path(cfg: &RunConfig) -> Result<PathBuf, Exit> {
    match &cfg.manifest {
        Some(p) => Ok(p.clone()),
        None => Ok(required(&cfg.output_dir, "output-dir")?.join(MANIFEST_FILE)),
    }
}

/// Parse and run; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.options.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("reftrace: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), Exit> {
    let cfg = cli.options.resolve().map_err(usage)?;
    match cli.command {
        Command::Sample => cmd_sample(&cfg),
        Command::Variants => cmd_variants(&cfg),
        Command::Run => cmd_run(&cfg),
        Command::Analyze => cmd_analyze(&cfg, false),
        Command::Report => cmd_analyze(&cfg, true),
    }
}

fn cmd_sample(cfg: &RunConfig) -> Result<(), Exit> {
    let corpus = required(&cfg.corpus_dir, "corpus-dir")?;
    let manifest = manifest_path(cfg)?;
    let rows = scan(corpus).map_err(data)?;
    write_manifest(&manifest, &rows).map_err(data)?;
    let accepted = rows.iter().filter(|r| r.accepted).count();
    println!("{} candidates, {accepted} accepted -> {}", rows.len(), manifest.display());
    if accepted == 0 {
        return Err(data(format!("no file under {} meets the sampling criteria", corpus.display())));
    }
    Ok(())
}

fn cmd_variants(cfg: &RunConfig) -> Result<(), Exit> {
    let corpus = required(&cfg.corpus_dir, "corpus-dir")?;
    let store = SnapshotStore::new(required(&cfg.store_dir, "store-dir")?);
    let manifest = manifest_path(cfg)?;
    let rows = read_manifest(&manifest).map_err(|e: SampleError| data(format!("{}: {e}", manifest.display())))?;
    let report = generate(corpus, &rows, &cfg.prompts, &store).map_err(data)?;
    if !report.failures.is_empty() {
        let path = store.root().join("variant_failures.csv");
        let write = || -> csv::Result<()> {
            let mut w = csv_writer(&path)?;
            w.write_record(["snippet", "path", "error"])?;
            for f in &report.failures {
                w.write_record([&f.snippet, &f.path, &f.message])?;
                eprintln!("reftrace: {} ({}): {}", f.snippet, f.path, f.message);
            }
            w.flush()?;
            Ok(())
        };
        write().map_err(data)?;
    }
    println!(
        "{} snippets, {} v0 files, {} failures -> {}",
        report.snippets.len(),
        report.written,
        report.failures.len(),
        store.root().display()
    );
    if report.snippets.is_empty() {
        return Err(data("no variants written (no accepted snippet, or every snippet failed)"));
    }
    Ok(())
}

fn cmd_run(cfg: &RunConfig) -> Result<(), Exit> {
    let store = SnapshotStore::new(required(&cfg.store_dir, "store-dir")?);
    let (provider, record_to) =
        from_config(&cfg.provider).map_err(|e| Exit { code: EXIT_PROVIDER, message: e.to_string() })?;
    let settings = PipelineSettings {
        iterations: cfg.iterations,
        prompts: cfg.prompts.clone(),
        model: cfg.provider.model.clone(),
        temperature: cfg.provider.temperature,
        retry: RetryPolicy { attempts: cfg.provider.max_retries, base_delay: cfg.provider.retry_delay },
        jobs: cfg.jobs,
    };
    let sleep = |d: Duration| std::thread::sleep(d);
    let report = match record_to {
        Some(path) => {
            let recorder = RecordingProvider::new(provider);
            let r = run_pipeline(&store, &recorder, &settings, &sleep);
            recorder.save(&path).map_err(|e| Exit { code: EXIT_PROVIDER, message: e.to_string() })?;
            r
        }
        None => run_pipeline(&store, provider.as_ref(), &settings, &sleep),
    }
    .map_err(data)?;
    println!(
        "requested {}, generated {}, skipped {}, failed {}",
        report.requested,
        report.generated,
        report.skipped,
        report.failures.len()
    );
    if report.failures.iter().any(|f| f.kind == FailureKind::Provider) {
        return Err(Exit { code: EXIT_PROVIDER, message: format!("{} failed iterations", report.failures.len()) });
    }
    if !report.failures.is_empty() {
        return Err(data(format!("{} failed iterations", report.failures.len())));
    }
    Ok(())
}

fn cmd_analyze(cfg: &RunConfig, with_summary: bool) -> Result<(), Exit> {
    let store = SnapshotStore::new(required(&cfg.store_dir, "store-dir")?);
    let out = required(&cfg.output_dir, "output-dir")?;
    let settings = AnalyzeSettings {
        iterations: cfg.iterations,
        prompts: cfg.prompts.clone(),
        matrix_mode: cfg.matrix_mode,
        bonferroni: cfg.bonferroni,
        jobs: cfg.jobs,
    };
    let analysis = analyze_store(&store, &settings).map_err(data)?;
    let mut files = write_outputs(&analysis, out).map_err(|e: AnalyzeError| data(e))?;
    if with_summary {
        files.push(write_summary(&analysis, out).map_err(data)?);
    }
    println!(
        "{} trajectories ({} incomplete skipped), {} comparisons, {} files -> {}",
        analysis.complete.len(),
        analysis.incomplete.len(),
        analysis.comparisons.len(),
        files.len(),
        out.display()
    );
    Ok(())
}
