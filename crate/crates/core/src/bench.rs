//! Benchmark harness: runs strategies over a corpus and emits JSON lines.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::instances::{gen_greedy_bad_tree, gen_random, greedy_peeling, Family};
use crate::oracle::{exact_minmax_kpart, exact_multiway};
use crate::pipeline::{run_minmax_kpart, run_minmax_multiway, PipelineConfig};
use crate::sse::{Backend, GuessGrid};

/// How a corpus graph is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Source {
    Random { family: Family, max_weight: u32, seed: u64 },
    GreedyBadTree { k: usize },
    /// Star with a centre 0 and leaves `1..=k`.
    Star { k: usize },
}

impl Source {
    pub fn build(&self) -> Result<Graph> {
        match self {
            Source::Random { family, max_weight, seed } => gen_random(family, *max_weight, *seed),
            Source::GreedyBadTree { k } => gen_greedy_bad_tree(*k),
            Source::Star { k } => Graph::new(k + 1, (1..=*k).map(|t| (0, t, 1.0))),
        }
    }
}

/// One corpus entry. With terminals, partition strategies solve the
/// multiway problem instead of k-partitioning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchInstance {
    pub id: String,
    pub source: Source,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub instances: Vec<BenchInstance>,
}

/// Small corpus mixing every generator.
pub fn default_corpus() -> Corpus {
    let random = |id: &str, family: Family, seed: u64, k: usize| BenchInstance {
        id: id.into(),
        source: Source::Random { family, max_weight: 1, seed },
        k,
        terminals: None,
    };
    Corpus {
        instances: vec![
            BenchInstance { id: "bad-tree-4".into(), source: Source::GreedyBadTree { k: 4 }, k: 4, terminals: None },
            random("gnp-10", Family::Gnp { n: 10, p: 0.4 }, 1, 2),
            random("grid-3x4", Family::Grid { rows: 3, cols: 4 }, 2, 3),
            random("tree-12", Family::Tree { n: 12 }, 3, 3),
            random("planar-10", Family::Planar { n: 10 }, 4, 2),
            BenchInstance {
                id: "star-4".into(),
                source: Source::Star { k: 4 },
                k: 4,
                terminals: Some(vec![1, 2, 3, 4]),
            },
        ],
    }
}

/// A partitioning strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Pipeline(Backend),
    /// Repeated exact minimum-cut removal of `n/k` vertices.
    Greedy,
    /// Exhaustive optimum.
    Oracle,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Pipeline(b) => write!(f, "pipeline-{b}"),
            Strategy::Greedy => f.write_str("greedy"),
            Strategy::Oracle => f.write_str("oracle"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "oracle" => Ok(Strategy::Oracle),
            _ => match s.strip_prefix("pipeline-") {
                Some(b) => Ok(Strategy::Pipeline(b.parse()?)),
                None => Err(Error::Input(format!(
                    "unknown strategy '{s}' (expected pipeline-<backend>, greedy or oracle)"
                ))),
            },
        }
    }
}

/// One JSON line of bench output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub strategy: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub max_cut: Option<f64>,
    pub sum_cut: Option<f64>,
    pub max_size: Option<usize>,
    pub parts: Option<usize>,
    pub fallbacks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Bench options.
#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub epsilon: f64,
    /// Record wall time; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { epsilon: 0.25, timing: false }
    }
}

fn run_one(g: &Graph, inst: &BenchInstance, strategy: Strategy, seed: u64, eps: f64) -> Result<(Partition, usize)> {
    match (strategy, &inst.terminals) {
        (Strategy::Pipeline(b), terms) => {
            let mut cfg = PipelineConfig::new(b, eps, seed);
            cfg.rounding.guess_grid = GuessGrid::Doubling;
            let out = match terms {
                Some(t) => run_minmax_multiway(g, t, &cfg, None)?,
                None => run_minmax_kpart(g, inst.k, &cfg, None)?,
            };
            Ok((out.partition, out.report.fallbacks))
        }
        (Strategy::Greedy, None) => Ok((greedy_peeling(g, inst.k)?, 0)),
        (Strategy::Greedy, Some(_)) => Err(Error::Input("greedy peeling ignores terminals".into())),
        (Strategy::Oracle, None) => Ok((exact_minmax_kpart(g, inst.k, g.n().div_ceil(inst.k))?.partition, 0)),
        (Strategy::Oracle, Some(t)) => Ok((exact_multiway(g, t)?.partition, 0)),
    }
}

/// Runs every `(instance, strategy, seed)` combination in order. Failures
/// become records with an `error` field.
pub fn bench(corpus: &Corpus, strategies: &[Strategy], seeds: &[u64], opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for inst in &corpus.instances {
        let g = inst.source.build()?;
        for &strategy in strategies {
            // deterministic strategies run once
            let seeds: &[u64] = if matches!(strategy, Strategy::Pipeline(_)) { seeds } else { &seeds[..seeds.len().min(1)] };
            for &seed in seeds {
                let start = Instant::now();
                let res = run_one(&g, inst, strategy, seed, opts.epsilon);
                let wall_ms = opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                let mut rec = BenchRecord {
                    instance: inst.id.clone(),
                    strategy: strategy.to_string(),
                    seed,
                    n: g.n(),
                    k: inst.k,
                    max_cut: None,
                    sum_cut: None,
                    max_size: None,
                    parts: None,
                    fallbacks: None,
                    wall_ms,
                    error: None,
                };
                match res {
                    Ok((p, fb)) => {
                        rec.max_cut = Some(p.max_cut(&g));
                        rec.sum_cut = Some(p.sum_cut(&g));
                        rec.max_size = Some(p.max_size());
                        rec.parts = Some(p.num_nonempty());
                        rec.fallbacks = Some(fb);
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                out.push(rec);
            }
        }
    }
    Ok(out)
}

/// Records as newline-terminated JSON lines.
pub fn to_json_lines(records: &[BenchRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in ["pipeline-exact", "pipeline-lp", "pipeline-sdp", "greedy", "oracle"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!("pipeline-magic".parse::<Strategy>().is_err());
    }

    #[test]
    fn corpus_json_round_trip() {
        let c = default_corpus();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Corpus>(&text).unwrap(), c);
    }
}
