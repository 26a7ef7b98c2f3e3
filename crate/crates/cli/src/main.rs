use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mmcut::bench::{bench, default_corpus, to_json_lines, BenchOptions, Corpus, Strategy};
use mmcut::covering::{cover_minmax_cut, cover_minmax_kpart, CoverConfig, CutCaps};
use mmcut::error::{Error, Result};
use mmcut::graph::{Graph, Measure, Partition};
use mmcut::instances::{
    boost_schedule, exact_multiway_solver, gen_greedy_bad_tree, gen_random, recursive_boost, reduce_mmmc_to_ksum,
    verify_multiway_sdp_gap, Family,
};
use mmcut::io::{self, Format, LabeledGraph};
use mmcut::oracle::{
    exact_fixed_size_cut, exact_minmax_kpart, exact_minsum_kpart, exact_multiway, exact_sse, exact_unbalanced_cut_query,
    UcutQuery,
};
use mmcut::pipeline::{run_minmax_cut, run_minmax_kpart, run_minmax_multiway, CapChoice, PipelineConfig, PipelineOutput};
use mmcut::relaxation::{build_sse_lp, build_sse_sdp, solve_lp, solve_sdp_with, SdpMode};
use mmcut::rng::stream;
use mmcut::separators::{lp_stats, orthogonal_stats};
use mmcut::sse::{
    sse_round_part1, sse_round_part2, weighted_unbalanced_cut, Backend, GuessGrid, RoundingConfig, SseInstance,
    SseSolution,
};

#[derive(Parser)]
#[command(name = "mmcut", version, about = "Min-max graph partitioning and small-set expansion")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input graph file; standard input when absent.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "edgelist")]
    format: FormatArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, global = true, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Mass targets tried by the rounding backends.
    #[arg(long, global = true, value_enum, default_value = "full")]
    grid: GridArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Edgelist,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Sdp,
    Lp,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Full,
    Doubling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Part1,
    Part2,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleProblem {
    Sse,
    Kpart,
    Minsum,
    Multiway,
    Ucut,
    FixedSize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gnp,
    Grid,
    Tree,
    Planar,
    BadTree,
    Star,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeparatorKind {
    Orthogonal,
    Lp,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted small-set expansion with uniform measures.
    Sse {
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Fixed mass target.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, value_enum, default_value = "part1")]
        scheme: Scheme,
        /// Comma-separated terminal labels.
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Weighted unbalanced cut with unit vertex weights.
    Ucut {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Min-max k-partitioning.
    Partition {
        #[arg(long)]
        k: usize,
    },
    /// Min-max multiway cut.
    Multiway {
        #[arg(long)]
        terminals: String,
    },
    /// Min-Max Cut with terminal sets and caps.
    Minmaxcut {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rho: f64,
        /// Terminal sets: labels separated by commas, sets by semicolons.
        #[arg(long)]
        terminal_sets: Option<String>,
        #[arg(long, requires = "d")]
        c: Option<f64>,
        #[arg(long, requires = "c")]
        d: Option<f64>,
    },
    /// Uniform cover only.
    Cover {
        #[arg(long)]
        k: usize,
        /// With `--c` and `--d`, runs the cut-capped loop at size fraction `rho`.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, requires = "d")]
        c: Option<f64>,
        #[arg(long, requires = "c")]
        d: Option<f64>,
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Exhaustive solvers for small inputs.
    Oracle {
        #[arg(long, value_enum)]
        problem: OracleProblem,
        #[arg(long)]
        k: Option<usize>,
        /// Part size cap; `⌈n/k⌉` when absent.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Writes a generated graph.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        max_weight: u32,
    },
    /// Star integrality-gap report.
    Gap {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Reports every k up to this value.
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Min-sum k-partitioning through the multiway gadget.
    Reduce {
        #[arg(long)]
        k: usize,
        /// Also runs the recursive size boosting with this epsilon.
        #[arg(long)]
        boost_eps: Option<f64>,
    },
    /// Empirical separator properties on the input graph's relaxation.
    SeparatorStats {
        #[arg(long, value_enum, default_value = "orthogonal")]
        kind: SeparatorKind,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 4.0)]
        m: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
    /// Runs strategies over a corpus and prints JSON lines.
    Bench {
        /// Corpus JSON; a built-in corpus when absent.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "pipeline-exact,greedy,oracle")]
        strategies: String,
        #[arg(long, default_value = "0,1")]
        seeds: String,
        /// Records wall time, which makes the output non-reproducible.
        #[arg(long)]
        timing: bool,
    },
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn backend(&self) -> Backend {
        match self.global.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Sdp => Backend::Sdp,
            BackendArg::Lp => Backend::Lp,
        }
    }

    fn format(&self) -> Format {
        match self.global.format {
            FormatArg::Edgelist => Format::Edgelist,
            FormatArg::Json => Format::Json,
        }
    }

    fn rounding(&self) -> RoundingConfig {
        RoundingConfig {
            guess_grid: match self.global.grid {
                GridArg::Full => GuessGrid::Full,
                GridArg::Doubling => GuessGrid::Doubling,
            },
            ..RoundingConfig::default()
        }
    }

    fn pipeline(&self) -> PipelineConfig {
        PipelineConfig { rounding: self.rounding(), ..PipelineConfig::new(self.backend(), self.global.eps, self.global.seed) }
    }

    fn graph(&self) -> Result<LabeledGraph> {
        match &self.global.input {
            Some(p) => io::load(p, self.format()),
            None => {
                let mut text = String::new();
                std::io::Read::read_to_string(&mut std::io::stdin(), &mut text)?;
                io::parse(&text, self.format())
            }
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.global.out {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut s = serde_json::to_string(value)?;
        s.push('\n');
        self.emit(&s)
    }
}

fn labels(g: &LabeledGraph, spec: &str) -> Result<Vec<usize>> {
    spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|l| g.index(l)).collect()
}

fn labeled_parts(g: &LabeledGraph, p: &Partition) -> Vec<Vec<String>> {
    p.parts.iter().map(|part| g.relabel(part)).collect()
}

fn solution_json(g: &LabeledGraph, s: &SseSolution) -> Result<Value> {
    let mut v = serde_json::to_value(s)?;
    v["labels"] = json!(g.relabel(&s.set));
    Ok(v)
}

fn pipeline_json(g: &LabeledGraph, out: &PipelineOutput) -> Value {
    json!({ "parts": labeled_parts(g, &out.partition), "report": out.report })
}

/// Exit code 3 when a rounding backend fell back on an unverified set.
fn fallback_status(fallbacks: usize) -> Result<()> {
    if fallbacks > 0 {
        return Err(Error::Budget(format!("{fallbacks} cover step(s) used a fallback set")));
    }
    Ok(())
}

fn run(ctx: &Ctx, cmd: &Command) -> Result<()> {
    let eps = ctx.global.eps;
    let mut rng = stream(ctx.global.seed, "separator");
    match cmd {
        Command::Sse { rho, h, scheme, terminals } => {
            let g = ctx.graph()?;
            let n = g.graph.n();
            let mut inst = SseInstance::new(&g.graph, &Measure::uniform(n), &Measure::uniform(n), *rho, eps)?;
            if let Some(h) = h {
                inst = inst.with_h(*h)?;
            }
            if let Some(t) = terminals {
                inst = inst.with_terminals(&labels(&g, t)?)?;
            }
            let sol = match scheme {
                Scheme::Part1 => sse_round_part1(&inst, ctx.backend(), &ctx.rounding(), &mut rng)?,
                Scheme::Part2 => sse_round_part2(&inst, ctx.backend(), &ctx.rounding(), &mut rng)?,
            };
            ctx.emit_json(&solution_json(&g, &sol)?)?;
            fallback_status(sol.budget_exhausted as usize)
        }
        Command::Ucut { tau, rho, terminals } => {
            let g = ctx.graph()?;
            let mut q = UcutQuery::new(&Measure::uniform(g.graph.n()), *tau, *rho);
            if let Some(t) = terminals {
                q.terminals = labels(&g, t)?;
            }
            let sol = weighted_unbalanced_cut(&g.graph, &q, eps, ctx.backend(), &ctx.rounding(), &mut rng)?;
            ctx.emit_json(&solution_json(&g, &sol)?)?;
            fallback_status(sol.budget_exhausted as usize)
        }
        Command::Partition { k } => {
            let g = ctx.graph()?;
            let out = run_minmax_kpart(&g.graph, *k, &ctx.pipeline(), None)?;
            ctx.emit_json(&pipeline_json(&g, &out))?;
            fallback_status(out.report.fallbacks)
        }
        Command::Multiway { terminals } => {
            let g = ctx.graph()?;
            let out = run_minmax_multiway(&g.graph, &labels(&g, terminals)?, &ctx.pipeline(), None)?;
            ctx.emit_json(&pipeline_json(&g, &out))?;
            fallback_status(out.report.fallbacks)
        }
        Command::Minmaxcut { k, rho, terminal_sets, c, d } => {
            let g = ctx.graph()?;
            let sets: Vec<Vec<usize>> = match terminal_sets {
                Some(s) => s.split(';').filter(|p| !p.trim().is_empty()).map(|p| labels(&g, p)).collect::<Result<_>>()?,
                None => Vec::new(),
            };
            let caps = match (c, d) {
                (Some(c), Some(d)) => CapChoice::Given { c: *c, d: *d },
                _ => CapChoice::Sweep,
            };
            let out = run_minmax_cut(&g.graph, &sets, *k, *rho, caps, &ctx.pipeline(), None)?;
            ctx.emit_json(&pipeline_json(&g, &out))?;
            fallback_status(out.report.fallbacks)
        }
        Command::Cover { k, rho, c, d, terminals } => {
            let g = ctx.graph()?;
            let cfg = CoverConfig { rounding: ctx.rounding(), ..CoverConfig::new(ctx.backend(), eps) };
            let mut crng = stream(ctx.global.seed, "cover");
            let cover = match (c, d) {
                (Some(c), Some(d)) => {
                    let rho = rho.unwrap_or(1.0 / *k as f64);
                    let terms = match terminals {
                        Some(t) => labels(&g, t)?,
                        None => Vec::new(),
                    };
                    cover_minmax_cut(&g.graph, *k, CutCaps { rho, c: *c, d: *d }, &terms, None, &cfg, &mut crng)?
                }
                _ => cover_minmax_kpart(&g.graph, *k, &cfg, &mut crng)?,
            };
            let mut v = serde_json::to_value(&cover)?;
            v["labels"] = json!(g.labels);
            v["coverage_fraction"] = json!(cover.min_coverage_fraction());
            ctx.emit_json(&v)?;
            fallback_status(cover.fallbacks())
        }
        Command::Oracle { problem, k, cap, rho, tau, size, terminals } => {
            let g = ctx.graph()?;
            let n = g.graph.n();
            let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::Input(format!("--{name} is required")));
            let needf = |x: Option<f64>, name: &str| x.ok_or_else(|| Error::Input(format!("--{name} is required")));
            let v = match problem {
                OracleProblem::Sse => {
                    let u = Measure::uniform(n);
                    solution_json(&g, &exact_sse(&g.graph, &u, &u, needf(*rho, "rho")?)?)?
                }
                OracleProblem::Ucut => {
                    let mut q = UcutQuery::new(&Measure::uniform(n), needf(*tau, "tau")?, needf(*rho, "rho")?);
                    if let Some(t) = terminals {
                        q.terminals = labels(&g, t)?;
                    }
                    solution_json(&g, &exact_unbalanced_cut_query(&g.graph, &q)?)?
                }
                OracleProblem::Kpart | OracleProblem::Minsum => {
                    let k = need(*k, "k")?;
                    let cap = cap.unwrap_or_else(|| n.div_ceil(k.max(1)));
                    let sol = if matches!(problem, OracleProblem::Kpart) {
                        exact_minmax_kpart(&g.graph, k, cap)?
                    } else {
                        exact_minsum_kpart(&g.graph, k, cap)?
                    };
                    json!({ "parts": labeled_parts(&g, &sol.partition), "value": sol.value })
                }
                OracleProblem::Multiway => {
                    let t = terminals.as_deref().ok_or_else(|| Error::Input("--terminals is required".into()))?;
                    let sol = exact_multiway(&g.graph, &labels(&g, t)?)?;
                    json!({ "parts": labeled_parts(&g, &sol.partition), "value": sol.value })
                }
                OracleProblem::FixedSize => {
                    let set = exact_fixed_size_cut(&g.graph, need(*size, "size")?)?;
                    let mask = mmcut::graph::to_mask(n, &set);
                    json!({ "set": g.relabel(&set), "cut": g.graph.cut_of_mask(&mask) })
                }
            };
            ctx.emit_json(&v)
        }
        Command::Gen { family, n, p, rows, cols, k, max_weight } => {
            let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::Input(format!("--{name} is required")));
            let graph: Graph = match family {
                FamilyArg::Gnp => gen_random(
                    &Family::Gnp { n: need(*n, "n")?, p: p.ok_or_else(|| Error::Input("--p is required".into()))? },
                    *max_weight,
                    ctx.global.seed,
                )?,
                FamilyArg::Grid => gen_random(
                    &Family::Grid { rows: need(*rows, "rows")?, cols: need(*cols, "cols")? },
                    *max_weight,
                    ctx.global.seed,
                )?,
                FamilyArg::Tree => gen_random(&Family::Tree { n: need(*n, "n")? }, *max_weight, ctx.global.seed)?,
                FamilyArg::Planar => gen_random(&Family::Planar { n: need(*n, "n")? }, *max_weight, ctx.global.seed)?,
                FamilyArg::BadTree => gen_greedy_bad_tree(need(*k, "k")?)?,
                FamilyArg::Star => {
                    let k = need(*k, "k")?;
                    Graph::new(k + 1, (1..=k).map(|t| (0, t, 1.0)))?
                }
            };
            let lg = LabeledGraph::unlabeled(graph);
            let text = match ctx.format() {
                Format::Edgelist => io::to_edgelist(&lg),
                Format::Json => io::to_json(&lg)? + "\n",
            };
            ctx.emit(&text)
        }
        Command::Gap { k, k_max } => {
            let reports: Vec<_> = (*k..=k_max.unwrap_or(*k)).map(verify_multiway_sdp_gap).collect::<Result<_>>()?;
            let mut s = String::new();
            for r in &reports {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            ctx.emit(&s)
        }
        Command::Reduce { k, boost_eps } => {
            let g = ctx.graph()?;
            let r = reduce_mmmc_to_ksum(&g.graph, *k, 1.0, &mut exact_multiway_solver)?;
            let mut v = json!({
                "parts": labeled_parts(&g, &r.partition),
                "cost": r.cost,
                "b": r.b,
                "balance_factor": r.balance_factor,
                "sweep": r.sweep,
            });
            if let Some(be) = boost_eps {
                let mut solver = |h: &Graph, parts: usize, cap: usize| Ok(exact_minsum_kpart(h, parts, cap)?.partition);
                let b = recursive_boost(&g.graph, *k, *be, &mut solver)?;
                v["boost"] = json!({
                    "parts": labeled_parts(&g, &b.partition),
                    "schedule": boost_schedule(*k, *be)?,
                    "instance_counts": b.instance_counts,
                    "level_costs": b.level_costs,
                    "size_cap": b.size_cap,
                });
            }
            ctx.emit_json(&v)
        }
        Command::SeparatorStats { kind, rho, h, draws, m, beta } => {
            let g = ctx.graph()?;
            let n = g.graph.n();
            let u = Measure::uniform(n);
            let stats = match kind {
                SeparatorKind::Orthogonal => {
                    let p = build_sse_sdp(&g.graph, &u, &u, *rho, *h, SdpMode::PartI, &[], None)?;
                    let sol = solve_sdp_with(&p, &ctx.rounding().sdp);
                    orthogonal_stats(&g.graph, &sol, *m, *beta, *draws, &mut rng)?
                }
                SeparatorKind::Lp => {
                    let p = build_sse_lp(&g.graph, &u, &u, *rho, *h, SdpMode::PartI, &[], None)?;
                    let sol = solve_lp(&p)?;
                    lp_stats(&g.graph, &sol.x, &sol.z, *beta, *draws, &mut rng)?
                }
            };
            ctx.emit_json(&stats)
        }
        Command::Bench { corpus, strategies, seeds, timing } => {
            let corpus: Corpus = match corpus {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => default_corpus(),
            };
            let strategies: Vec<Strategy> =
                strategies.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
            let seeds: Vec<u64> = seeds
                .split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Input(format!("bad seed '{s}'"))))
                .collect::<Result<_>>()?;
            let records = bench(&corpus, &strategies, &seeds, &BenchOptions { epsilon: eps, timing: *timing })?;
            ctx.emit(&to_json_lines(&records)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let ctx = Ctx { global: cli.global };
    match run(&ctx, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmcut: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
