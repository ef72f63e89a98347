//! `aec`: generate graphs, print schedules, colour, verify and embed.
//!
//! Exit status is 0 on success, 1 when a run or a verification fails and 2
//! for usage or input errors.

use aec_core::baselines::{compare_rows, repair_colour, write_csv, CompareOptions, CompareRow};
use aec_core::colouring::{find_bicoloured_cycles, properness_violations, PartialEdgeColouring};
use aec_core::graph::{
    bipartite_girth_six, families, generate_high_girth_regular, generate_random_regular, girth, load_graph, save_graph,
    to_edge_list, Graph,
};
use aec_core::nibble::NibblePolicy;
use aec_core::pipeline::{colour_with_nibble, PipelineConfig};
use aec_core::regularizer::{embed_regular, DEFAULT_EMBED_BUDGET};
use aec_core::schedule::{compute_schedule, schedule_with_iterations};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "aec", version, about = "Acyclic edge colouring of high-girth graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in edge-list format.
    Gen(GenArgs),
    /// Print the parameter schedule as CSV.
    Schedule(ScheduleArgs),
    /// Colour a graph and write the colouring as JSON.
    Color(ColorArgs),
    /// Check a colouring file against a graph file.
    Verify(VerifyArgs),
    /// Embed a graph into a regular graph of the same maximum degree.
    Embed(EmbedArgs),
    /// Run both colourers over a seed range and write a CSV table.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    HighGirth,
    Bipartite6,
    Cycle,
    Path,
    Complete,
    Star,
    Petersen,
    Heawood,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    kind: Kind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Minimum girth for `high-girth`.
    #[arg(long, default_value_t = 3)]
    girth: usize,
    /// Residue count for `bipartite6`; the graph has `2·d·m` vertices.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: usize,
    #[arg(long)]
    girth: usize,
    /// Use this many iterations instead of the stopping rule.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Nibble,
    Repair,
}

#[derive(Args)]
struct NibbleFlags {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Registry cycle length bound; 0 turns cycle tracking off. Defaults to twice the girth.
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Use this many nibble iterations instead of the stopping rule.
    #[arg(long)]
    iterations: Option<usize>,
    /// Continue past failed intermediate checks; the final verifier decides.
    #[arg(long)]
    lenient: bool,
    #[arg(long, default_value_t = 1000)]
    reservation_rounds: usize,
    #[arg(long, default_value_t = 1000)]
    finish_rounds: usize,
}

impl NibbleFlags {
    fn config(&self, seed: u64) -> PipelineConfig {
        PipelineConfig {
            eps: self.eps,
            seed,
            l_max: self.lmax,
            iterations: self.iterations,
            policy: NibblePolicy { max_restarts: self.restarts, lenient: self.lenient },
            reservation_rounds: self.reservation_rounds,
            finish_rounds: self.finish_rounds,
            ..PipelineConfig::default()
        }
    }
}

#[derive(Args)]
struct ColorArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "nibble")]
    algo: Algo,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    nibble: NibbleFlags,
    /// Palette for `repair`; defaults to ⌈(1+ε)Δ⌉.
    #[arg(long)]
    colors: Option<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Colouring JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    colouring: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    girth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EMBED_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sidecar JSON mapping original vertices to the output; defaults to `<out>.map.json`.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Graph files; each is one instance.
    #[arg(long, required = true, num_args = 1..)]
    graph: Vec<PathBuf>,
    /// Seeds `seed .. seed + seeds`.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    nibble: NibbleFlags,
    /// Palette for `repair`; defaults to ⌈(1+ε)Δ⌉.
    #[arg(long)]
    colors: Option<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Write 0 in the millis column so output is byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Input or output problems; reported with exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<bool, UsageError>;

fn write_out(path: Option<&Path>, text: &str) -> Result<(), UsageError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, UsageError> {
    load_graph(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Outcome {
    let g = match a.kind {
        Kind::Random => generate_random_regular(a.n, a.d, a.seed)?,
        Kind::HighGirth => match generate_high_girth_regular(a.n, a.d, a.girth, a.seed, a.max_steps) {
            Ok((g, rep)) => {
                eprintln!("girth {} after {} swaps", rep.girth, rep.steps);
                g
            }
            Err(e) => {
                eprintln!("{e}");
                return Ok(false);
            }
        },
        Kind::Bipartite6 => {
            let q = aec_core::graph::next_prime(a.d);
            bipartite_girth_six(a.d, a.m.unwrap_or(2 * q - 1), a.seed)?
        }
        Kind::Cycle => families::cycle(a.n),
        Kind::Path => families::path(a.n),
        Kind::Complete => families::complete(a.n),
        Kind::Star => families::star(a.n),
        Kind::Petersen => families::petersen(),
        Kind::Heawood => families::heawood(),
    };
    match &a.out {
        Some(p) => save_graph(&g, p)?,
        None => write_out(None, &to_edge_list(&g))?,
    }
    Ok(true)
}

fn schedule(a: ScheduleArgs) -> Outcome {
    let s = match a.iterations {
        Some(k) => schedule_with_iterations(a.eps, a.delta, a.girth, k),
        None => compute_schedule(a.eps, a.delta, a.girth),
    };
    match s {
        Ok(s) => {
            write_out(a.out.as_deref(), &s.to_csv())?;
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn color(a: ColorArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    match a.algo {
        Algo::Repair => {
            let k = a.colors.unwrap_or_else(|| aec_core::numeric::palette_size(a.nibble.eps, g.max_degree()));
            match repair_colour(&g, k, a.seed, a.max_steps) {
                Ok(o) => {
                    eprintln!("{} colours, {} steps, {} repairs", o.colouring.distinct_colours(), o.steps, o.repairs);
                    write_out(a.out.as_deref(), &o.colouring.to_json())?;
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Algo::Nibble => {
            let out = colour_with_nibble(&g, &a.nibble.config(a.seed));
            if let Some(p) = &a.trace {
                let mut text = String::new();
                for t in &out.trace {
                    text.push_str(&serde_json::to_string(t)?);
                    text.push('\n');
                }
                write_out(Some(p), &text)?;
            }
            if let Some(p) = &a.report {
                write_out(Some(p), &serde_json::to_string_pretty(&out.report)?)?;
            }
            let r = &out.report;
            match &out.colouring {
                Some(chi) => {
                    eprintln!(
                        "success: {} colours of {}, {} edges from the nibble",
                        r.colours_used, r.palette_size, r.nibble_coloured
                    );
                    write_out(a.out.as_deref(), &chi.to_json())?;
                    Ok(true)
                }
                None => {
                    eprintln!(
                        "failed at {:?}: {}",
                        r.failed_stage.expect("failure has a stage"),
                        r.message.as_deref().unwrap_or("")
                    );
                    Ok(false)
                }
            }
        }
    }
}

fn verify(a: VerifyArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    let text = fs::read_to_string(&a.colouring).map_err(|e| UsageError(format!("{}: {e}", a.colouring.display())))?;
    let chi = PartialEdgeColouring::from_json(&text, g.m())?;
    let improper = properness_violations(&g, &chi)?;
    if !improper.is_empty() {
        println!("not proper: {} clashing pairs", improper.len());
        for (e, f) in improper.iter().take(20) {
            println!("  edges {e} and {f}, colour {}", chi.get(*e).unwrap());
        }
        return Ok(false);
    }
    let cycles = find_bicoloured_cycles(&g, &chi)?;
    if !cycles.is_empty() {
        println!("not acyclic: {} bicoloured cycles", cycles.len());
        for c in cycles.iter().take(20) {
            println!("  colours {:?} vertices {:?}", c.colours, c.vertices);
        }
        return Ok(false);
    }
    let uncoloured = g.m() - chi.coloured_count();
    println!(
        "acyclic: {} colours used, palette {}, {} of {} edges uncoloured",
        chi.distinct_colours(),
        chi.palette_size(),
        uncoloured,
        g.m()
    );
    Ok(true)
}

fn embed(a: EmbedArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    match embed_regular(&g, a.girth, a.seed, a.budget) {
        Ok(emb) => {
            eprintln!(
                "{} vertices, {}-regular, {} steps, girth {}",
                emb.graph.n(),
                emb.graph.max_degree(),
                emb.steps,
                girth(&emb.graph)
            );
            let map = serde_json::json!({ "steps": emb.steps, "copy0": emb.copy0 }).to_string();
            match &a.out {
                Some(p) => {
                    save_graph(&emb.graph, p)?;
                    let side = a.map.clone().unwrap_or_else(|| PathBuf::from(format!("{}.map.json", p.display())));
                    write_out(Some(&side), &map)?;
                }
                None => {
                    write_out(None, &to_edge_list(&emb.graph))?;
                    if let Some(side) = &a.map {
                        write_out(Some(side), &map)?;
                    }
                }
            }
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn experiment(a: ExperimentArgs) -> Outcome {
    let graphs = a.graph.iter().map(|p| read_graph(p)).collect::<Result<Vec<_>, _>>()?;
    let seeds: Vec<u64> = (a.seed..a.seed + a.seeds).collect();
    let opts = CompareOptions {
        repair_colours: a.colors,
        repair_steps: a.max_steps,
        pipeline: a.nibble.config(0),
        timing: !a.no_timing,
    };
    let mut rows: Vec<(usize, CompareRow)> = std::thread::scope(|s| {
        let handles: Vec<_> = graphs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let opts = &opts;
                let seeds = &seeds;
                let eps = a.nibble.eps;
                s.spawn(move || compare_rows(g, eps, seeds, opts).into_iter().map(|r| (i, r)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    rows.sort_by(|(i, r), (j, q)| (i, r.seed, r.algo).cmp(&(j, q.seed, q.algo)));
    let rows: Vec<CompareRow> = rows.into_iter().map(|(_, r)| r).collect();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    write_out(a.out.as_deref(), &String::from_utf8(buf)?)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Schedule(a) => schedule(a),
        Command::Color(a) => color(a),
        Command::Verify(a) => verify(a),
        Command::Embed(a) => embed(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
