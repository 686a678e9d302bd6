//! The `fpplab` command line: `generate`, `kappa`, `curve` and `experiment`.
//!
//! Every command resolves its configuration in three layers: built-in
//! defaults, then keys from `--config FILE`, then explicit flags. Keys that
//! do not belong to the command are usage errors. The resolved
//! configuration is logged to stderr and saved in `manifest.json` next to
//! the outputs; passing that manifest back through `--config` replays the
//! run exactly.
//!
//! Config files are TOML with one key per parameter, for example
//!
//! ```toml
//! seed = 7
//! [curve]
//! model = "cycle"
//! n = 472
//! alpha = 0.8
//! ```
//!
//! Top-level keys apply to every command; a table named after the command
//! (or the experiment id) overrides them, and other tables are ignored.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 resource error,
//! 4 failed experiment.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::genmodels::{GraphModel, OffspringLaw};
use crate::graphcore::{kappa, kappa_with_per_vertex, read_edge_list_file, write_edge_list, RootedGraph};
use crate::harness::experiments::*;
use crate::harness::{
    plateau_detect, run_ensemble, with_workers, Ensemble, GraphSource, PlateauRule, Process, Regeneration,
    TheoremReport, Thresholds, FIXED_GRAPH_STREAM,
};
use crate::randsrc::{RngStream, WeightLaw};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "FPPLAB_OUT_DIR";

/// Exit status of a failed experiment.
pub const EXIT_EXPERIMENT_FAIL: i32 = 4;

/// Bridges printed by `kappa` before the table is cut short.
const BRIDGE_ROWS: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "fpplab", version, about = "Bottleneck indices and heavy-tailed first passage percolation")]
struct Cli {
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    out: PathBuf,
    /// TOML config file, or a manifest.json to replay.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Thresholds file replacing the built-in defaults.
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a graph and write it as an edge list with a metadata sidecar.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Stream index of the master seed.
        #[arg(long)]
        stream: Option<u64>,
    },
    /// Bottleneck index and bridge table of an edge-list file.
    Kappa {
        file: Option<PathBuf>,
        /// Root to use instead of the one in the file header.
        #[arg(long)]
        root: Option<usize>,
        /// Also compute κ at every vertex and report the argmax.
        #[arg(long)]
        per_vertex: bool,
    },
    /// Average spreading curve with plateau detection.
    Curve {
        /// Edge-list file; otherwise a model is sampled.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        /// `pow` or `shiftpow`.
        #[arg(long)]
        law: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        batches: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sample a fresh graph for every run.
        #[arg(long)]
        regen: bool,
        /// `spread` or `delayed`.
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        cv: Option<f64>,
        #[arg(long)]
        share: Option<f64>,
        #[arg(long)]
        tail_index: Option<f64>,
    },
    /// Run a packaged experiment and write its report.
    Experiment {
        /// One of gw-tightness, gw-extra-edge, ust, er, urn, q-scaling,
        /// cycle-scaling, star-scaling.
        id: String,
        #[command(flatten)]
        params: ExperimentArgs,
    },
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// path, cycle, star, complete, gw-conditioned, ust or er.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// poisson1, geometric-half or binomial:K.
    #[arg(long)]
    offspring: Option<String>,
    #[arg(long)]
    extra_edge: bool,
    #[arg(long)]
    size_cap: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Comma-separated depths.
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    offspring: Option<String>,
    /// Any other parameter, `KEY=VALUE` with a JSON or bare string value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// An explicit flag: its name on the command line, the config key it sets
/// and the value.
struct Flag {
    name: String,
    key: String,
    value: Value,
}

fn flag(name: &str, key: &str, value: Option<impl Serialize>) -> Option<Flag> {
    value.map(|v| Flag {
        name: format!("--{name}"),
        key: key.into(),
        value: serde_json::to_value(v).expect("flag values serialize"),
    })
}

impl ModelArgs {
    fn flags(&self) -> Vec<Flag> {
        [
            flag("model", "model", self.model.as_ref()),
            flag("n", "n", self.n),
            flag("depth", "depth", self.depth),
            flag("offspring", "offspring", self.offspring.as_ref()),
            flag("extra-edge", "extra_edge", self.extra_edge.then_some(true)),
            flag("size-cap", "size_cap", self.size_cap),
            flag("lambda", "lambda", self.lambda),
        ]
        .into_iter()
        .flatten()
        .collect()
    }
}

impl ExperimentArgs {
    fn flags(&self) -> Result<Vec<Flag>> {
        let mut out: Vec<Flag> = [
            flag("seed", "seed", self.seed),
            flag("n", "n", self.n),
            flag("runs", "runs", self.runs),
            flag("alpha", "alpha", self.alpha),
            flag("kmax", "k_max", self.kmax),
            flag("kmin", "k_min", self.kmin),
            flag("depth", "depth", self.depth),
            flag("depths", "depths", self.depths.as_ref()),
            flag("batches", "batches", self.batches),
            flag("offspring", "offspring", self.offspring.as_ref()),
        ]
        .into_iter()
        .flatten()
        .collect();
        for s in &self.set {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::param(format!("--set expects KEY=VALUE, got {s:?}")))?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into()));
            out.push(Flag {
                name: format!("--set {k}"),
                key: k.into(),
                value,
            });
        }
        Ok(out)
    }
}

/// Keys shared by every command that samples a [`GraphModel`].
const MODEL_KEYS: [&str; 7] = ["model", "n", "depth", "offspring", "extra_edge", "size_cap", "lambda"];

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateConfig {
    model: Option<String>,
    n: Option<usize>,
    depth: Option<usize>,
    offspring: Option<OffspringLaw>,
    extra_edge: Option<bool>,
    size_cap: Option<usize>,
    lambda: Option<f64>,
    seed: u64,
    stream: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KappaConfig {
    file: Option<PathBuf>,
    root: Option<usize>,
    per_vertex: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LawName {
    Pow,
    Shiftpow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveConfig {
    graph: Option<PathBuf>,
    model: Option<String>,
    n: Option<usize>,
    depth: Option<usize>,
    offspring: Option<OffspringLaw>,
    extra_edge: Option<bool>,
    size_cap: Option<usize>,
    lambda: Option<f64>,
    law: LawName,
    alpha: f64,
    t0: f64,
    runs: usize,
    batches: usize,
    seed: u64,
    regen: bool,
    process: Process,
    /// Plateau rule; unset values come from the thresholds file.
    cv: Option<f64>,
    share: Option<f64>,
    tail_index: Option<f64>,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            graph: None,
            model: None,
            n: None,
            depth: None,
            offspring: None,
            extra_edge: None,
            size_cap: None,
            lambda: None,
            law: LawName::Pow,
            alpha: 0.8,
            t0: 1.0,
            runs: 100_000,
            batches: 20,
            seed: 0,
            regen: false,
            process: Process::Spread,
            cv: None,
            share: None,
            tail_index: None,
        }
    }
}

/// Builds the model named by the `model` key from the model keys of a
/// resolved config.
fn graph_model(config: &Value) -> Result<GraphModel> {
    let mut obj = Map::new();
    for k in MODEL_KEYS {
        match config.get(k) {
            Some(v) if !v.is_null() => {
                obj.insert(k.into(), v.clone());
            }
            _ => {}
        }
    }
    if !obj.contains_key("model") {
        return Err(Error::param("no model given (use --model)"));
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| Error::param(format!("invalid model spec: {e}")))
}

/// Configuration keys read from `--config`, if given.
struct ConfigFile {
    keys: Map<String, Value>,
    /// Set when the file is a manifest.
    experiment: Option<String>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads the keys for `command` (and `section`, the experiment id) from a
/// TOML config or a manifest.
fn load_config(path: &Path, command: &str, section: &str) -> Result<ConfigFile> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::param(format!("{}: not a manifest: {e}", path.display())))?;
        let found = v.get("command").and_then(Value::as_str).unwrap_or_default();
        if found != command {
            return Err(Error::param(format!(
                "{} is a manifest for {found:?}, not {command:?}",
                path.display()
            )));
        }
        let keys = match v.get("config") {
            Some(Value::Object(m)) => m.clone(),
            _ => return Err(Error::param(format!("{}: manifest has no config", path.display()))),
        };
        let experiment = v.get("experiment").and_then(Value::as_str).map(String::from);
        return Ok(ConfigFile { keys, experiment });
    }
    let table: toml::Table =
        toml::from_str(&text).map_err(|e| Error::param(format!("{}: {e}", path.display())))?;
    let v = serde_json::to_value(&table).expect("TOML tables convert to JSON");
    let Value::Object(top) = v else { unreachable!("a TOML table is an object") };
    let mut keys: Map<String, Value> = top.iter().filter(|(_, v)| !v.is_object()).map(|(k, v)| (k.clone(), v.clone())).collect();
    if let Some(Value::Object(sec)) = top.get(section) {
        keys.extend(sec.clone());
    }
    Ok(ConfigFile { keys, experiment: None })
}

/// Defaults, then config-file keys, then flags, on JSON objects.
fn merge(mut merged: Map<String, Value>, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<Map<String, Value>> {
    if let Some(f) = file {
        for (k, v) in &f.keys {
            if !merged.contains_key(k) {
                return Err(Error::param(format!("config key {k:?} does not apply to this command")));
            }
            merged.insert(k.clone(), v.clone());
        }
    }
    for f in flags {
        if !merged.contains_key(&f.key) {
            return Err(Error::param(format!("{} does not apply to this command", f.name)));
        }
        merged.insert(f.key.clone(), f.value.clone());
    }
    Ok(merged)
}

fn to_object(v: &impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("configs serialize") {
        Value::Object(m) => m,
        _ => unreachable!("configs are structs"),
    }
}

/// Resolves a typed config; returns it with its canonical JSON form.
fn resolve<T: Serialize + DeserializeOwned>(defaults: &T, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<(T, Value)> {
    let merged = merge(to_object(defaults), file, flags)?;
    let typed: T = serde_json::from_value(Value::Object(merged)).map_err(|e| Error::param(format!("invalid configuration: {e}")))?;
    let canonical = serde_json::to_value(&typed).expect("configs serialize");
    eprintln!("resolved config: {canonical}");
    Ok((typed, canonical))
}

/// What a command did, for the manifest and the exit status.
struct Outcome {
    command: &'static str,
    experiment: Option<String>,
    config: Value,
    outputs: Vec<String>,
    summary: Value,
    passed: bool,
}

struct Context {
    out: PathBuf,
    thresholds: Thresholds,
}

impl Context {
    fn write(&self, name: &str, contents: &str, outputs: &mut Vec<String>) -> Result<()> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        outputs.push(name.into());
        Ok(())
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs serialize");
    s.push('\n');
    s
}

fn cmd_generate(ctx: &Context, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<Outcome> {
    let (cfg, config) = resolve(&GenerateConfig::default(), file, flags)?;
    let model = graph_model(&config)?;
    let generated = model.sample(&mut RngStream::new(cfg.seed, cfg.stream))?;
    let g = &generated.graph;
    let meta = json!({
        "model": model.name(),
        "params": model.params(),
        "master_seed": cfg.seed,
        "stream_index": cfg.stream,
        "stats": generated.stats,
        "n": g.n(),
        "m": g.m(),
        "root": g.root(),
    });
    let mut outputs = Vec::new();
    ctx.write("graph.edges", &write_edge_list(g), &mut outputs)?;
    ctx.write("graph.meta.json", &pretty(&meta), &mut outputs)?;
    println!("{}: n = {}, m = {}, root = {}", model.name(), g.n(), g.m(), g.root());
    Ok(Outcome {
        command: "generate",
        experiment: None,
        config,
        outputs,
        summary: meta,
        passed: true,
    })
}

fn load_graph(path: &Path, root: Option<usize>) -> Result<RootedGraph> {
    let g = read_edge_list_file(path)?;
    match root {
        Some(r) => g.with_root(r),
        None => Ok(g),
    }
}

fn cmd_kappa(ctx: &Context, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<Outcome> {
    let (cfg, config) = resolve(&KappaConfig::default(), file, flags)?;
    let path = cfg.file.as_deref().ok_or_else(|| Error::param("no graph file given"))?;
    let g = load_graph(path, cfg.root)?;
    let profile = if cfg.per_vertex { kappa_with_per_vertex(&g) } else { kappa(&g) };
    let mut text = String::new();
    let _ = writeln!(text, "n = {}, m = {}, root = {}", g.n(), g.m(), g.root());
    let _ = writeln!(text, "kappa = {}", profile.kappa_at_root);
    if profile.bridges.is_empty() {
        let _ = writeln!(text, "no bridges: the graph is 2-edge-connected, so kappa = n");
    } else {
        let _ = writeln!(text, "bridges ({}):", profile.bridges.len());
        let _ = writeln!(text, "{:>8} {:>8} {:>8} {:>10} {:>10}", "edge", "u", "v", "root_side", "far_side");
        for b in profile.bridges.iter().take(BRIDGE_ROWS) {
            let (u, v) = g.edge(b.edge);
            let _ = writeln!(text, "{:>8} {:>8} {:>8} {:>10} {:>10}", b.edge, u, v, b.root_side, b.far_side);
        }
        if profile.bridges.len() > BRIDGE_ROWS {
            let _ = writeln!(text, "... {} more in kappa.json", profile.bridges.len() - BRIDGE_ROWS);
        }
    }
    let argmax = profile.kappa_per_vertex.as_ref().map(|per| {
        // First vertex attaining the maximum.
        let best = per.iter().copied().max().unwrap_or(0);
        let v = per.iter().position(|&k| k == best).unwrap_or(0);
        json!({"vertex": v, "kappa": best})
    });
    if let Some(a) = &argmax {
        let _ = writeln!(text, "argmax over roots: vertex {} with kappa {}", a["vertex"], a["kappa"]);
    }
    print!("{text}");
    let report = json!({
        "file": path,
        "n": g.n(),
        "m": g.m(),
        "root": g.root(),
        "kappa_at_root": profile.kappa_at_root,
        "bridges": profile.bridges,
        "kappa_per_vertex": profile.kappa_per_vertex,
        "argmax": argmax,
    });
    let mut outputs = Vec::new();
    ctx.write("kappa.json", &pretty(&report), &mut outputs)?;
    Ok(Outcome {
        command: "kappa",
        experiment: None,
        config,
        outputs,
        summary: json!({"kappa_at_root": profile.kappa_at_root, "argmax": report["argmax"]}),
        passed: true,
    })
}

fn cmd_curve(ctx: &Context, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<Outcome> {
    let (cfg, config) = resolve(&CurveConfig::default(), file, flags)?;
    let law = match cfg.law {
        LawName::Pow => WeightLaw::power(cfg.alpha, cfg.t0)?,
        LawName::Shiftpow => WeightLaw::shifted(cfg.alpha)?,
    };
    let default_rule = ctx.thresholds.plateau_rule();
    let rule = PlateauRule {
        cv: cfg.cv.unwrap_or(default_rule.cv),
        share: cfg.share.unwrap_or(default_rule.share),
        tail_index: cfg.tail_index.unwrap_or(default_rule.tail_index),
    };
    let (source, fixed) = match (&cfg.graph, cfg.model.is_some()) {
        (Some(_), true) => return Err(Error::param("give either --graph or --model, not both")),
        (Some(path), false) => {
            if cfg.regen {
                return Err(Error::param("--regen needs a model, not a graph file"));
            }
            let g = load_graph(path, None)?;
            (GraphSource::Given(g.clone()), Some(g))
        }
        (None, _) => {
            let model = graph_model(&config)?;
            if cfg.regen {
                (GraphSource::Model(model, Regeneration::FreshGraph), None)
            } else {
                let g = model.sample(&mut RngStream::new(cfg.seed, FIXED_GRAPH_STREAM))?.graph;
                (GraphSource::Given(g.clone()), Some(g))
            }
        }
    };
    let spec = Ensemble {
        source,
        law,
        runs: cfg.runs,
        batches: cfg.batches,
        master_seed: cfg.seed,
        process: cfg.process,
    };
    let stats = run_ensemble(&spec)?;
    let report = plateau_detect(&stats, rule)?;
    let kappa_at_root = fixed.as_ref().map(|g| kappa(g).kappa_at_root);
    let plateau = json!({
        "first_unstable": report.first_unstable,
        "rule": report.rule,
        "batch_cv": report.batch_cv,
        "max_share": report.max_share,
        "tail_index": report.tail_index,
        "kappa_at_root": kappa_at_root,
        "n": fixed.as_ref().map(|g| g.n()),
    });
    let mut outputs = Vec::new();
    ctx.write("curve.csv", &stats.to_csv(), &mut outputs)?;
    ctx.write("plateau.json", &pretty(&plateau), &mut outputs)?;
    match report.first_unstable {
        Some(k) => println!("plateau at k = {k}"),
        None => println!("plateau: none"),
    }
    if let Some(k) = kappa_at_root {
        println!("kappa at root = {k}");
    }
    Ok(Outcome {
        command: "curve",
        experiment: None,
        config,
        outputs,
        summary: plateau,
        passed: true,
    })
}

type Runner<P> = fn(&P, u64, &Thresholds) -> Result<TheoremReport>;

fn run_experiment<P>(run: Runner<P>, th: &Thresholds, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<(TheoremReport, Value)>
where
    P: Default + Serialize + DeserializeOwned,
{
    let mut defaults = to_object(&P::default());
    defaults.insert("seed".into(), json!(0));
    let mut merged = merge(defaults, file, flags)?;
    let seed = merged.remove("seed").expect("seed is a default key");
    let seed: u64 = serde_json::from_value(seed).map_err(|e| Error::param(format!("invalid seed: {e}")))?;
    let p: P = serde_json::from_value(Value::Object(merged)).map_err(|e| Error::param(format!("invalid parameters: {e}")))?;
    let mut config = to_object(&p);
    config.insert("seed".into(), json!(seed));
    let config = Value::Object(config);
    eprintln!("resolved config: {config}");
    Ok((run(&p, seed, th)?, config))
}

fn cmd_experiment(ctx: &Context, id: &str, file: Option<&ConfigFile>, flags: &[Flag]) -> Result<Outcome> {
    let id: ExperimentId = id.parse()?;
    if let Some(e) = file.and_then(|f| f.experiment.as_deref()) {
        if e != id.as_str() {
            return Err(Error::param(format!("manifest is for experiment {e:?}, not {:?}", id.as_str())));
        }
    }
    let th = &ctx.thresholds;
    let (report, config) = match id {
        ExperimentId::GwTightness => run_experiment::<GwTightnessParams>(experiment_gw_tightness, th, file, flags)?,
        ExperimentId::GwExtraEdge => run_experiment::<GwExtraEdgeParams>(experiment_gw_extra_edge, th, file, flags)?,
        ExperimentId::Ust => run_experiment::<UstParams>(experiment_ust, th, file, flags)?,
        ExperimentId::Er => run_experiment::<ErParams>(experiment_er, th, file, flags)?,
        ExperimentId::Urn => run_experiment::<UrnParams>(experiment_urn, th, file, flags)?,
        ExperimentId::QScaling => run_experiment::<QScalingParams>(experiment_q_scaling, th, file, flags)?,
        ExperimentId::CycleScaling => run_experiment::<CycleScalingParams>(experiment_cycle_scaling, th, file, flags)?,
        ExperimentId::StarScaling => run_experiment::<StarScalingParams>(experiment_star_scaling, th, file, flags)?,
    };
    let mut outputs = Vec::new();
    let name = format!("{}.json", id.as_str());
    ctx.write(&name, &report.to_json(), &mut outputs)?;
    for c in &report.checks {
        println!("{:<28} {:>14.6} {:<24} {}", c.name, c.value, c.requirement, if c.passed { "PASS" } else { "FAIL" });
    }
    println!("verdict: {}", if report.passed() { "pass" } else { "fail" });
    Ok(Outcome {
        command: "experiment",
        experiment: Some(id.as_str().into()),
        config,
        outputs,
        summary: json!({"verdict": report.verdict}),
        passed: report.passed(),
    })
}

fn execute(cli: Cli) -> Result<bool> {
    let thresholds = match &cli.thresholds {
        Some(p) => Thresholds::parse(&read_text(p)?)?,
        None => Thresholds::defaults(),
    };
    let ctx = Context {
        out: cli.out.clone(),
        thresholds,
    };
    let (command, section) = match &cli.command {
        Command::Generate { .. } => ("generate", "generate"),
        Command::Kappa { .. } => ("kappa", "kappa"),
        Command::Curve { .. } => ("curve", "curve"),
        Command::Experiment { id, .. } => ("experiment", id.as_str()),
    };
    let file = cli.config.as_deref().map(|p| load_config(p, command, section)).transpose()?;
    let file = file.as_ref();
    let outcome = with_workers(cli.workers, || match &cli.command {
        Command::Generate { model, seed, stream } => {
            let mut flags = model.flags();
            flags.extend(flag("seed", "seed", *seed));
            flags.extend(flag("stream", "stream", *stream));
            cmd_generate(&ctx, file, &flags)
        }
        Command::Kappa { file: path, root, per_vertex } => {
            let flags: Vec<Flag> = [
                flag("file", "file", path.as_ref()),
                flag("root", "root", *root),
                flag("per-vertex", "per_vertex", per_vertex.then_some(true)),
            ]
            .into_iter()
            .flatten()
            .collect();
            cmd_kappa(&ctx, file, &flags)
        }
        Command::Curve {
            graph,
            model,
            law,
            alpha,
            t0,
            runs,
            batches,
            seed,
            regen,
            process,
            cv,
            share,
            tail_index,
        } => {
            let mut flags = model.flags();
            flags.extend(
                [
                    flag("graph", "graph", graph.as_ref()),
                    flag("law", "law", law.as_ref()),
                    flag("alpha", "alpha", *alpha),
                    flag("t0", "t0", *t0),
                    flag("runs", "runs", *runs),
                    flag("batches", "batches", *batches),
                    flag("seed", "seed", *seed),
                    flag("regen", "regen", regen.then_some(true)),
                    flag("process", "process", process.as_ref()),
                    flag("cv", "cv", *cv),
                    flag("share", "share", *share),
                    flag("tail-index", "tail_index", *tail_index),
                ]
                .into_iter()
                .flatten(),
            );
            cmd_curve(&ctx, file, &flags)
        }
        Command::Experiment { id, params } => cmd_experiment(&ctx, id, file, &params.flags()?),
    })??;
    let mut outputs = outcome.outputs.clone();
    outputs.push("manifest.json".into());
    let manifest = json!({
        "tool": "fpplab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": outcome.command,
        "experiment": outcome.experiment,
        "config": outcome.config,
        "workers": cli.workers,
        "thresholds_version": ctx.thresholds.version,
        "outputs": outputs,
        "summary": outcome.summary,
    });
    ctx.write("manifest.json", &pretty(&manifest), &mut Vec::new())?;
    Ok(outcome.passed)
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => EXIT_EXPERIMENT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
