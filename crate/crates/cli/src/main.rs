//! `oodselect`: offline meta-training and online zero-shot detector selection.

mod runlog;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use oodselect_core::benchgen::{synth_benchmark, RegimeSpec};
use oodselect_core::config::RunConfig;
use oodselect_core::data_model::{
    access, read_benchmark_index, read_embedding_file, read_pair_manifest, read_performance_matrix, read_split,
    write_performance_matrix, DatasetPair, EmbeddingFile,
};
use oodselect_core::detectors::{build_performance_matrix, score_pair, write_score_files};
use oodselect_core::evaluation::{
    emit_report, evaluate_selectors, random_split, rank_report, EnsembleSource, EvalInputs,
};
use oodselect_core::exec::Exec;
use oodselect_core::llm::{self, LlmRequest};
use oodselect_core::meta::{read_predictor, train_meta_predictor, write_predictor};
use oodselect_core::metafeatures::{
    dataset_embedding, read_dataset_embedding, write_dataset_embedding, DatasetEmbedding,
};
use oodselect_core::registry::Registry;

const ACCESS_LOG_ENV: &str = "OODSELECT_ACCESS_LOG";

#[derive(Parser, Debug)]
#[command(name = "oodselect", version, about = "Meta-learned OOD detector selection")]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Reproducibility log that every run appends to.
    #[arg(long, global = true, default_value = "run.json")]
    run_log: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct PairSource {
    /// Benchmark index listing pair manifests.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Individual pair manifest (repeatable).
    #[arg(long = "pair")]
    pairs: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic benchmark tree.
    Synth {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one dataset embedding per pair.
    Metafeatures {
        #[command(flatten)]
        source: PairSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write every detector's test scores per pair.
    Score {
        #[command(flatten)]
        source: PairSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the detector zoo and write the AUROC matrix.
    PerfMatrix {
        #[command(flatten)]
        source: PairSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the meta-predictor.
    MetaTrain {
        #[arg(long)]
        perf: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Restrict training to the split's train pairs.
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick a detector for a new pair, zero-shot.
    Select {
        #[arg(long)]
        predictor: PathBuf,
        #[arg(long)]
        pair: PathBuf,
    },
    /// Compare selectors on a meta-train/test split.
    Evaluate {
        #[arg(long)]
        perf: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Split file; a seeded random split is drawn when omitted.
        #[arg(long)]
        split: Option<PathBuf>,
        /// Score directory from `score`, enabling the mega-ensemble.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Pair manifests, needed by the mega-ensemble and the LLM selector.
        #[command(flatten)]
        source: PairSource,
        /// Also query the LLM selector.
        #[arg(long)]
        llm: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ask a chat-completions endpoint to pick a detector.
    LlmSelect {
        #[arg(long)]
        pair: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Metafeatures { .. } => "metafeatures",
            Command::Score { .. } => "score",
            Command::PerfMatrix { .. } => "perf-matrix",
            Command::MetaTrain { .. } => "meta-train",
            Command::Select { .. } => "select",
            Command::Evaluate { .. } => "evaluate",
            Command::LlmSelect { .. } => "llm-select",
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    seed_override: Option<u64>,
    registry: Registry,
    exec: Exec,
}

fn load_pairs(source: &PairSource) -> Result<Vec<DatasetPair>> {
    let mut pairs = Vec::new();
    if let Some(index) = &source.benchmark {
        pairs.extend(read_benchmark_index(index)?.load_pairs(index)?);
    }
    for p in &source.pairs {
        pairs.push(read_pair_manifest(p)?);
    }
    if pairs.is_empty() {
        bail!("no pairs given (use --benchmark or --pair)");
    }
    let problems = oodselect_core::data_model::validate_collection(&pairs);
    if !problems.is_empty() {
        bail!("invalid pairs: {}", problems.join("; "));
    }
    Ok(pairs)
}

fn load_embeddings(dir: &Path) -> Result<BTreeMap<String, DatasetEmbedding>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "emb"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let (name, emb) = read_dataset_embedding(&p)?;
        if out.insert(name.clone(), emb).is_some() {
            bail!("two embeddings for pair {name}");
        }
    }
    Ok(out)
}

fn descriptors(cfg: &RunConfig) -> Result<Option<EmbeddingFile>> {
    cfg.descriptors.as_deref().map(read_embedding_file).transpose().map_err(Into::into)
}

fn llm_request(ctx: &Ctx, prompt: String) -> Result<LlmRequest> {
    let endpoint = std::env::var(llm::ENDPOINT_ENV).map_err(|_| anyhow!("{} is not set", llm::ENDPOINT_ENV))?;
    Ok(LlmRequest { endpoint, api_key: std::env::var(llm::KEY_ENV).ok(), settings: ctx.cfg.llm.clone(), prompt })
}

fn llm_pick(ctx: &Ctx, pair: &DatasetPair) -> Result<String> {
    let desc = if pair.description.trim().is_empty() { pair.pair_id.clone() } else { pair.description.clone() };
    let prompt = llm::build_prompt(&[desc], &llm::registry_descriptions(&ctx.registry)?)?;
    Ok(llm::llm_select(&llm_request(ctx, prompt)?, &ctx.registry)?)
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    match cmd {
        Command::Synth { spec, out } => {
            let mut spec = match spec {
                Some(p) => serde_json::from_str::<RegimeSpec>(&access::read_string(p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => RegimeSpec::default(),
            };
            if let Some(s) = ctx.seed_override {
                spec.seed = s;
            }
            let (pairs, oracle) = synth_benchmark(&spec, out, &ctx.registry, &cfg.detectors, ctx.exec)?;
            println!(
                "wrote {} pairs and a {}x{} oracle matrix to {}",
                pairs.len(),
                oracle.n_pairs(),
                oracle.n_models(),
                out.display()
            );
        }
        Command::Metafeatures { source, out } => {
            let pairs = load_pairs(source)?;
            for pair in &pairs {
                let emb = dataset_embedding(pair, cfg.sample_budget, cfg.seed, ctx.exec)?;
                write_dataset_embedding(&emb, &pair.pair_id, &out.join(format!("{}.emb", pair.pair_id)))?;
            }
            println!("wrote {} embeddings to {}", pairs.len(), out.display());
        }
        Command::Score { source, out } => {
            let pairs = load_pairs(source)?;
            let scores =
                ctx.exec.try_map_range(pairs.len(), |i| score_pair(&pairs[i], &ctx.registry, &cfg.detectors))?;
            for s in &scores {
                write_score_files(s, out)?;
            }
            println!("wrote scores for {} pairs to {}", pairs.len(), out.display());
        }
        Command::PerfMatrix { source, out } => {
            let pairs = load_pairs(source)?;
            let p = build_performance_matrix(&pairs, &ctx.registry, &cfg.detectors, ctx.exec)?;
            write_performance_matrix(&p, out)?;
            println!("wrote {}x{} matrix to {}", p.n_pairs(), p.n_models(), out.display());
        }
        Command::MetaTrain { perf, embeddings, split, out } => {
            let mut p = read_performance_matrix(perf)?;
            if let Some(s) = split {
                let s = read_split(s)?;
                s.validate(&p)?;
                p = p.select_rows(&s.train_pair_ids)?;
            }
            let emb = load_embeddings(embeddings)?;
            let desc = descriptors(cfg)?;
            let f = train_meta_predictor(
                &emb,
                &p,
                &ctx.registry,
                &cfg.methods.gbt,
                cfg.methods.target_transform,
                desc.as_ref(),
                ctx.exec,
            )?;
            write_predictor(&f, out)?;
            println!("trained on {} pairs; wrote {}", p.n_pairs(), out.display());
        }
        Command::Select { predictor, pair } => {
            let f = read_predictor(predictor)?;
            let pair = read_pair_manifest(pair)?;
            let emb = dataset_embedding(&pair, cfg.sample_budget, cfg.seed, ctx.exec)?;
            println!("selected: {}", f.select_model(&emb, &ctx.registry)?);
        }
        Command::Evaluate { perf, embeddings, split, scores, source, llm, out } => {
            let p = read_performance_matrix(perf)?;
            let emb = load_embeddings(embeddings)?;
            let split = match split {
                Some(s) => read_split(s)?,
                None => random_split(p.pair_ids(), cfg.test_fraction, cfg.seed)?,
            };
            let pairs: BTreeMap<String, DatasetPair> = if source.benchmark.is_some() || !source.pairs.is_empty() {
                load_pairs(source)?.into_iter().map(|pr| (pr.pair_id.clone(), pr)).collect()
            } else {
                BTreeMap::new()
            };
            if (scores.is_some() || *llm) && pairs.is_empty() {
                bail!("--scores and --llm need the pair manifests (--benchmark or --pair)");
            }
            let desc = descriptors(cfg)?;
            let hook = |id: &str| -> oodselect_core::Result<String> {
                let pair = pairs
                    .get(id)
                    .ok_or_else(|| oodselect_core::Error::InvalidInput(format!("no manifest for pair {id}")))?;
                llm_pick(ctx, pair).map_err(|e| oodselect_core::Error::Llm(e.to_string()))
            };
            let inputs = EvalInputs {
                p: &p,
                embeddings: &emb,
                split: &split,
                registry: &ctx.registry,
                descriptors: desc.as_ref(),
                ensemble: scores.as_deref().map(|score_dir| EnsembleSource { score_dir, pairs: &pairs }),
                llm: if *llm { Some(&hook) } else { None },
            };
            let eval = evaluate_selectors(&inputs, &cfg.methods, ctx.exec)?;
            for (method, why) in &eval.skipped {
                eprintln!("skipped {method}: {why}");
            }
            let report = rank_report(&eval.results, "M3OOD", ctx.registry.len())?;
            emit_report(&report, out)?;
            print!("{}", report.summary_csv());
        }
        Command::LlmSelect { pair } => {
            let pair = read_pair_manifest(pair)?;
            println!("selected: {}", llm_pick(ctx, &pair)?);
        }
    }
    Ok(())
}

fn build_ctx(cli: &Cli) -> Result<Ctx> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let registry = cfg.registry()?;
    Ok(Ctx { cfg, seed_override: cli.seed, registry, exec: Exec::from_jobs(cli.jobs) })
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> Result<()> {
    let body = || run(&cli.command, ctx);
    #[cfg(feature = "parallel")]
    if cli.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
        return pool.install(body);
    }
    body()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let audit = std::env::var_os(ACCESS_LOG_ENV).map(PathBuf::from);
    if audit.is_some() {
        access::start_recording();
    }
    let ctx = build_ctx(&cli);
    let outcome = ctx.as_ref().map_err(|e| anyhow!("{e:#}")).and_then(|ctx| dispatch(&cli, ctx));
    let code: u8 = match &outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    if let Some(path) = audit {
        let opened = access::stop_recording();
        let text: String = opened.iter().map(|p| format!("{}\n", p.display())).collect();
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("error: writing access log {}: {e}", path.display());
        }
    }
    if let Err(e) = runlog::append(&cli, ctx.as_ref().ok().map(|c| &c.cfg), code) {
        eprintln!("warning: could not append to {}: {e:#}", cli.run_log.display());
    }
    ExitCode::from(code)
}
