//! `cpevo` — drive the critical-part evolution harness from the shell.

use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cpevo_core::evolve::{evolve, BackendKind, RunConfig, TaskKind};
use cpevo_core::placement::{synthetic_problem, PlacementProblem, SyntheticSpec};
use cpevo_core::report::{gap_table, gap_table_csv};
use cpevo_core::similarity::{similarity_matrix, welch_t_test, SimilarityMatrix};
use cpevo_core::tsp::{parse_best_known, parse_tsplib, Tour, TspInstance};
use cpevo_core::visual::render_tsp_triple;

#[derive(Parser)]
#[command(name = "cpevo", version, about = "Evolve optimizer critical parts with an LLM in the loop")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the fireworks operators for a TSPLIB instance.
    EvolveTsp(EvolveArgs),
    /// Evolve the placement optimizer's step-size rule.
    EvolveStep(EvolveArgs),
    /// Run the reference fireworks search over instances and emit a gap CSV.
    Bench(BenchArgs),
    /// Render the three TSP diagnostics for a given tour.
    Render(RenderArgs),
    /// Build a code-similarity matrix over evolved pools.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic placement problem as JSON.
    GenPlacement(GenPlacementArgs),
}

#[derive(Args)]
struct EvolveArgs {
    /// TSPLIB instance (evolve-tsp).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Placement-problem JSON (evolve-step).
    #[arg(long)]
    problem: Option<PathBuf>,
    /// JSON config file mirroring the run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Candidate pool capacity.
    #[arg(long)]
    pool: Option<usize>,
    /// Attach rendered diagnostics to prompts: on|off.
    #[arg(long, value_parser = ["on", "off"])]
    visual: Option<String>,
    #[arg(long, value_enum)]
    backend: Option<BackendChoice>,
    #[arg(long)]
    run_dir: Option<PathBuf>,
    /// Replay-backend response directory.
    #[arg(long)]
    replay_dir: Option<PathBuf>,
    /// Prompt template directory (defaults to the built-in templates).
    #[arg(long)]
    template_dir: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    /// Candidate runtime command template with a {code_file} placeholder.
    #[arg(long)]
    runtime_cmd: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tour-evaluation budget handed to TSP candidates.
    #[arg(long)]
    eval_budget: Option<u64>,
    /// Seeded sandbox runs averaged into each TSP score.
    #[arg(long)]
    eval_runs: Option<usize>,
    /// Placement iterations per step-candidate evaluation.
    #[arg(long)]
    step_iters: Option<usize>,
    /// Objective-evaluation cap per step-candidate iteration.
    #[arg(long)]
    eval_cap: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BackendChoice {
    Live,
    Replay,
    Null,
}

impl From<BackendChoice> for BackendKind {
    fn from(c: BackendChoice) -> Self {
        match c {
            BackendChoice::Live => BackendKind::Live,
            BackendChoice::Replay => BackendKind::Replay,
            BackendChoice::Null => BackendKind::Null,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// TSPLIB instance files.
    #[arg(long, required = true, num_args = 1..)]
    instances: Vec<PathBuf>,
    /// Best-known registry (`name value` per line).
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    evals: u64,
    /// Seeded runs per instance.
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Tour as comma-separated city indices, e.g. `0,3,1,2`.
    #[arg(long, conflicts_with = "tour_file")]
    tour: Option<String>,
    /// JSON file holding the tour as an array of indices.
    #[arg(long)]
    tour_file: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Hexagon size for the density view (default: bbox diagonal / 20).
    #[arg(long)]
    hex_size: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Run directories whose pools are analyzed (ids become `dir/id`).
    #[arg(long, required = true, num_args = 1..)]
    run_dir: Vec<PathBuf>,
    /// Shingle width.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// CSV output path for the similarity matrix.
    #[arg(long)]
    out: PathBuf,
    /// Two cell-group files (`idA idB` per line); runs the two-sample test
    /// between the similarity values they select.
    #[arg(long, num_args = 2)]
    groups: Option<Vec<PathBuf>>,
}

#[derive(Args)]
struct GenPlacementArgs {
    #[arg(long, default_value_t = 100)]
    cells: usize,
    #[arg(long, default_value_t = 150)]
    nets: usize,
    #[arg(long, default_value_t = 2)]
    pins_min: usize,
    #[arg(long, default_value_t = 5)]
    pins_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::EvolveTsp(args) => run_evolve(TaskKind::Tsp, args),
        Command::EvolveStep(args) => run_evolve(TaskKind::Step, args),
        Command::Bench(args) => run_bench(args),
        Command::Render(args) => run_render(args),
        Command::Analyze(args) => run_analyze(args),
        Command::GenPlacement(args) => run_gen_placement(args),
    }
}

fn run_evolve(task: TaskKind, args: EvolveArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str::<RunConfig>(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    config.task = task;
    if let Some(v) = args.instance {
        config.instance = Some(v);
    }
    if let Some(v) = args.problem {
        config.problem = Some(v);
    }
    if let Some(v) = args.iterations {
        config.iterations = v;
    }
    if let Some(v) = args.pool {
        config.pool_capacity = v;
    }
    if let Some(v) = args.visual {
        config.visual_mode = v == "on";
    }
    if let Some(v) = args.backend {
        config.backend = v.into();
    }
    if let Some(v) = args.run_dir {
        config.run_dir = v;
    }
    if let Some(v) = args.replay_dir {
        config.replay_dir = Some(v);
    }
    if let Some(v) = args.template_dir {
        config.template_dir = Some(v);
    }
    if let Some(v) = args.endpoint {
        config.endpoint = v;
    }
    if let Some(v) = args.model {
        config.model = v;
    }
    if let Some(v) = args.api_key_env {
        config.api_key_env = v;
    }
    if let Some(v) = args.runtime_cmd {
        config.runtime_cmd = v;
    }
    if let Some(v) = args.seed {
        config.rng_seed = v;
    }
    if let Some(v) = args.eval_budget {
        config.tsp_eval_budget = v;
    }
    if let Some(v) = args.eval_runs {
        config.eval_runs = v;
    }
    if let Some(v) = args.step_iters {
        config.step_iters = v;
    }
    if let Some(v) = args.eval_cap {
        config.eval_cap = v;
    }

    let outcome = evolve(&config)?;
    println!(
        "run complete: best candidate {} scored {:.4} (pool of {}, artifacts in {})",
        outcome.best.id,
        outcome.best.score,
        outcome.pool.len(),
        config.run_dir.display()
    );
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let mut instances: Vec<TspInstance> = Vec::new();
    for path in &args.instances {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        instances.push(parse_tsplib(&text)?);
    }
    let registry: HashMap<String, f64> = match &args.registry {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading registry {}", path.display()))?;
            parse_best_known(&text)?
        }
        None => HashMap::new(),
    };
    let rows = gap_table(&instances, &registry, args.evals, args.runs, args.seed)?;
    let csv = gap_table_csv(&rows);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_render(args: RenderArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let inst = parse_tsplib(&text)?;
    let order: Vec<usize> = if let Some(spec) = &args.tour {
        spec.split(',')
            .map(|s| s.trim().parse::<usize>().context("bad tour index"))
            .collect::<Result<_>>()?
    } else if let Some(path) = &args.tour_file {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).context("tour file must be a JSON array of indices")?
    } else {
        bail!("provide --tour or --tour-file");
    };
    let tour = Tour::new(order);
    std::fs::create_dir_all(&args.out_dir)?;
    let arts = render_tsp_triple(&inst, &tour, args.hex_size)?;
    for art in arts {
        let name = format!("{}_{}.png", inst.name, art.kind.as_str());
        let path = args.out_dir.join(&name);
        std::fs::write(&path, &art.png)?;
        let metrics: Vec<String> = art
            .metrics
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("{} ({})", path.display(), metrics.join(", "));
    }
    Ok(())
}

fn load_pool_codes(run_dirs: &[PathBuf]) -> Result<Vec<(String, String)>> {
    let mut candidates = Vec::new();
    for dir in run_dirs {
        let pool_path = dir.join("pool.json");
        let text = std::fs::read_to_string(&pool_path)
            .with_context(|| format!("reading {}", pool_path.display()))?;
        let pool: serde_json::Value = serde_json::from_str(&text)?;
        let members = pool["members"]
            .as_array()
            .context("pool.json has no members array")?;
        let prefix = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        for member in members {
            let id = member["id"].as_str().context("member without id")?;
            let code = member["code"].as_str().context("member without code")?;
            candidates.push((format!("{prefix}/{id}"), code.to_string()));
        }
    }
    Ok(candidates)
}

fn load_group(path: &PathBuf, matrix: &SimilarityMatrix) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
            bail!("{}:{}: expected `idA idB`", path.display(), lineno + 1);
        };
        let value = matrix.at(a, b).with_context(|| {
            format!("{}:{}: unknown candidate pair {a} {b}", path.display(), lineno + 1)
        })?;
        values.push(value);
    }
    Ok(values)
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let candidates = load_pool_codes(&args.run_dir)?;
    let matrix = similarity_matrix(&candidates, args.k)?;
    std::fs::write(&args.out, matrix.to_csv())?;
    println!(
        "wrote {} ({} candidates, k={})",
        args.out.display(),
        matrix.ids.len(),
        args.k
    );

    if let Some(groups) = &args.groups {
        let a = load_group(&groups[0], &matrix)?;
        let b = load_group(&groups[1], &matrix)?;
        let stat = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / (v.len() as f64 - 1.0))
                .sqrt();
            (mean, sd)
        };
        let (ma, sa) = stat(&a);
        let (mb, sb) = stat(&b);
        let result = welch_t_test(&a, &b)?;
        println!("group A: {:.4}+-{:.4} (n={})", ma, sa, a.len());
        println!("group B: {:.4}+-{:.4} (n={})", mb, sb, b.len());
        println!("welch t = {:.4}, two-sided p = {:.6}", result.t, result.p);
    }
    Ok(())
}

fn run_gen_placement(args: GenPlacementArgs) -> Result<()> {
    if args.pins_min < 1 || args.pins_max < args.pins_min {
        bail!("pins-min/pins-max must satisfy 1 <= min <= max");
    }
    let prob: PlacementProblem = synthetic_problem(&SyntheticSpec {
        cells: args.cells,
        nets: args.nets,
        pins_min: args.pins_min,
        pins_max: args.pins_max,
        seed: args.seed,
    });
    let json = prob.to_json();
    match &args.out {
        Some(path) => {
            std::fs::write(path, json)?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}
