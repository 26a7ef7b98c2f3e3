//! Instance generators, the star and tree worked examples, and the
//! multiway-to-min-sum reductions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::oracle::{exact_fixed_size_cut, exact_multiway, PARTITION_CAP};
use crate::rng::stream;

/// Random graph families for test corpora.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Gnp { n: usize, p: f64 },
    Grid { rows: usize, cols: usize },
    /// Random recursive tree: vertex `i` attaches to a uniform earlier vertex.
    Tree { n: usize },
    /// Stacked triangulation: each new vertex is placed inside a random face.
    Planar { n: usize },
}

impl Family {
    pub fn id(&self) -> String {
        match self {
            Family::Gnp { n, p } => format!("gnp-{n}-{p}"),
            Family::Grid { rows, cols } => format!("grid-{rows}x{cols}"),
            Family::Tree { n } => format!("tree-{n}"),
            Family::Planar { n } => format!("planar-{n}"),
        }
    }
}

/// Reproducible random graph; edge weights are uniform integers in
/// `1..=max_weight`.
pub fn gen_random(family: &Family, max_weight: u32, seed: u64) -> Result<Graph> {
    if max_weight == 0 {
        return Err(Error::Input("max_weight must be at least 1".into()));
    }
    let mut rng = stream(seed, "gen");
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let n = match *family {
        Family::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Input(format!("edge probability {p} outside [0,1]")));
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random::<f64>() < p {
                        pairs.push((u, v));
                    }
                }
            }
            n
        }
        Family::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::Input("grid needs positive dimensions".into()));
            }
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        pairs.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((v, v + cols));
                    }
                }
            }
            rows * cols
        }
        Family::Tree { n } => {
            if n == 0 {
                return Err(Error::Input("tree needs n ≥ 1".into()));
            }
            for v in 1..n {
                pairs.push((rng.random_range(0..v), v));
            }
            n
        }
        Family::Planar { n } => {
            if n < 3 {
                return Err(Error::Input("planar triangulation needs n ≥ 3".into()));
            }
            pairs.extend([(0, 1), (1, 2), (0, 2)]);
            // the outer face stays as a face
            let mut faces = vec![[0, 1, 2], [0, 1, 2]];
            for v in 3..n {
                let f = rng.random_range(0..faces.len());
                let [a, b, c] = faces.swap_remove(f);
                pairs.extend([(a, v), (b, v), (c, v)]);
                faces.extend([[a, b, v], [b, c, v], [a, c, v]]);
            }
            n
        }
    };
    let edges: Vec<(usize, usize, f64)> =
        pairs.into_iter().map(|(u, v)| (u, v, rng.random_range(1..=max_weight) as f64)).collect();
    Graph::new(n, edges)
}

/// Index of `u_{i,j}` in the greedy-bad tree; vertex 0 is the hub `v`.
pub fn greedy_bad_tree_index(k: usize, i: usize, j: usize) -> usize {
    1 + (i - 1) * (k + 1) + j
}

/// Tree on k² vertices on which greedy peeling of minimum-cut parts ends with
/// a part of boundary k−1.
pub fn gen_greedy_bad_tree(k: usize) -> Result<Graph> {
    if k < 2 {
        return Err(Error::Input("greedy-bad tree needs k ≥ 2".into()));
    }
    let n = k * k;
    let id = |i, j| greedy_bad_tree_index(k, i, j);
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..k {
        for j in 1..=k {
            edges.push((id(i, j), id(i, j - 1), 1.0));
        }
        if i >= 2 {
            edges.push((id(i, 0), id(i - 1, 0), 1.0));
        }
    }
    edges.push((0, id(1, 0), 1.0));
    Graph::new(n, edges)
}

/// Chunks of `k` consecutive vertices in the order
/// `v, u_{1,0}, …, u_{1,k}, u_{2,0}, …, u_{k−1,k}`.
pub fn consecutive_partition(k: usize) -> Result<Partition> {
    if k < 2 {
        return Err(Error::Input("greedy-bad tree needs k ≥ 2".into()));
    }
    let order: Vec<usize> = (0..k * k).collect();
    Partition::from_parts(k * k, order.chunks(k).map(<[usize]>::to_vec).collect())
}

/// Repeatedly removes a minimum-cut set of exactly `⌊n/k⌋` vertices from the
/// remaining graph; whatever is left forms the last part.
pub fn greedy_peeling(g: &Graph, k: usize) -> Result<Partition> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::Input(format!("cannot peel {k} parts from {n} vertices")));
    }
    let size = n / k;
    let mut rest: Vec<usize> = (0..n).collect();
    let mut parts = Vec::with_capacity(k);
    while parts.len() + 1 < k {
        let local = exact_fixed_size_cut(&g.induced(&rest), size)?;
        let mut taken = vec![false; rest.len()];
        for &i in &local {
            taken[i] = true;
        }
        parts.push(local.iter().map(|&i| rest[i]).collect::<Vec<_>>());
        rest = rest.iter().zip(&taken).filter(|p| !*p.1).map(|p| *p.0).collect();
    }
    parts.push(rest);
    Partition::from_parts(n, parts)
}

/// Outcome of [`verify_multiway_sdp_gap`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub k: usize,
    /// Objective of the explicit vector solution.
    pub fractional: f64,
    /// Optimal integral value; absent when the star exceeds the enumeration cap.
    pub integral: Option<f64>,
    pub ratio: Option<f64>,
    /// Largest violation over every constraint family.
    pub max_residual: f64,
    /// `(family, largest violation)` per constraint family.
    pub residuals: Vec<(String, f64)>,
    /// `‖y_{u,i}‖²` of the centre for each `i`.
    pub centre_norms: Vec<f64>,
}

/// Residual tolerance of the explicit vector solution.
pub const GAP_TOL: f64 = 1e-9;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Builds the star (centre 0, terminal `i` at vertex `i+1`) and the
/// explicit vector solution of the multiway vector relaxation, checks every
/// constraint, and compares the fractional value with the integral optimum.
pub fn verify_multiway_sdp_gap(k: usize) -> Result<GapReport> {
    if k < 3 {
        return Err(Error::Input("the star gap needs k ≥ 3".into()));
    }
    let n = k + 1;
    let dim = k + 1;
    let unit = |i: usize| {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    };
    // e is coordinate 0; x_i are centred simplex vertices on coordinates 1..=k
    let e = unit(0);
    let scale = (k as f64 / (k as f64 - 1.0)).sqrt();
    let x: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut v = vec![0.0; dim];
            for (c, slot) in v.iter_mut().enumerate().skip(1) {
                *slot = scale * ((c == i + 1) as u8 as f64 - 1.0 / k as f64);
            }
            v
        })
        .collect();
    let a = 1.0 / k as f64;
    let b = (k as f64 - 1.0).sqrt() / k as f64;
    // y[v][i]
    let mut y = vec![vec![vec![0.0; dim]; k]; n];
    for i in 0..k {
        y[0][i] = e.iter().zip(&x[i]).map(|(p, q)| a * p + b * q).collect();
        y[i + 1][i] = e.clone();
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|t| (0, t)).collect();
    let mut res: Vec<(String, f64)> = Vec::new();
    let mut push = |name: &str, r: f64| res.push((name.to_string(), r.max(0.0)));

    let loads: Vec<f64> = (0..k).map(|i| edges.iter().map(|&(u, v)| sq_dist(&y[u][i], &y[v][i])).sum()).collect();
    let fractional = loads.iter().copied().fold(0.0, f64::max);
    push("objective", loads.iter().map(|l| l - fractional).fold(f64::NEG_INFINITY, f64::max));
    push("unit-total", (0..n).map(|v| ((0..k).map(|i| dot(&y[v][i], &y[v][i])).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max));
    push("terminal", (0..k).map(|i| (dot(&y[i + 1][i], &y[i + 1][i]) - 1.0).abs()).fold(0.0, f64::max));
    let mut orth: f64 = 0.0;
    let mut sum_row: f64 = 0.0;
    let mut nonneg: f64 = 0.0;
    let mut dominated: f64 = 0.0;
    for u in 0..n {
        for i in 0..k {
            let nu = dot(&y[u][i], &y[u][i]);
            for j in 0..k {
                if i != j {
                    orth = orth.max(dot(&y[u][i], &y[u][j]).abs());
                }
            }
            for v in 0..n {
                let s: f64 = (0..k).map(|j| dot(&y[u][i], &y[v][j])).sum();
                sum_row = sum_row.max((s - nu).abs());
                for j in 0..k {
                    let p = dot(&y[u][i], &y[v][j]);
                    nonneg = nonneg.max(-p);
                    dominated = dominated.max(p - nu);
                }
            }
        }
    }
    push("orthogonal", orth);
    push("sum-consistency", sum_row);
    let vecs: Vec<&Vec<f64>> = y.iter().flatten().collect();
    let mut tri: f64 = 0.0;
    for p in &vecs {
        for q in &vecs {
            let pq = sq_dist(p, q);
            for r in &vecs {
                tri = tri.max(sq_dist(p, r) - pq - sq_dist(q, r));
            }
        }
    }
    push("triangle", tri);
    push("nonnegative", nonneg);
    push("norm-dominates", dominated);
    let max_residual = res.iter().map(|r| r.1).fold(0.0, f64::max);
    if max_residual > GAP_TOL {
        let worst = res.iter().max_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
        return Err(Error::Internal(format!("vector solution violates {} by {}", worst.0, worst.1)));
    }
    let centre_norms = (0..k).map(|i| dot(&y[0][i], &y[0][i])).collect();
    let integral = if n <= PARTITION_CAP {
        let g = Graph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))?;
        let terminals: Vec<usize> = (1..n).collect();
        Some(exact_multiway(&g, &terminals)?.value)
    } else {
        None
    };
    Ok(GapReport {
        k,
        fractional,
        integral,
        ratio: integral.map(|v| v / fractional),
        max_residual,
        residuals: res,
        centre_norms,
    })
}

/// Graph with `k` extra terminal vertices `n..n+k`, each joined to every
/// original vertex by an edge of weight `b/n`.
pub fn gadget_graph(g: &Graph, k: usize, b: f64) -> Result<Graph> {
    let n = g.n();
    let w = b / n as f64;
    let extra = (0..k).flat_map(|i| (0..n).map(move |u| (u, n + i, w)));
    Graph::new(n + k, g.edges().iter().copied().chain(extra))
}

/// Largest part boundary in the gadget graph when terminal `i` joins part `i`.
pub fn gadget_objective(g: &Graph, parts: &[Vec<usize>], b: f64) -> Result<f64> {
    let n = g.n();
    let k = parts.len();
    let gadget = gadget_graph(g, k, b)?;
    let mut with_terms = parts.to_vec();
    for (i, p) in with_terms.iter_mut().enumerate() {
        p.push(n + i);
    }
    Ok(Partition::from_parts(n + k, with_terms)?.max_cut(&gadget))
}

/// One gadget weight tried by [`reduce_mmmc_to_ksum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub b: f64,
    /// Max-boundary objective the multiway solver reported on the gadget.
    pub gadget_value: f64,
    pub max_size: usize,
    /// Total weight of original edges cut by the induced partition.
    pub cost: f64,
    pub balanced: bool,
}

/// Outcome of [`reduce_mmmc_to_ksum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub partition: Partition,
    pub b: f64,
    pub cost: f64,
    /// Parts may hold up to `balance_factor·n/k` vertices.
    pub balance_factor: f64,
    pub sweep: Vec<SweepEntry>,
}

/// Total weight of edges whose ends lie in different parts.
pub fn crossing_weight(g: &Graph, p: &Partition) -> f64 {
    g.edges().iter().filter(|e| p.part_of[e.0] != p.part_of[e.1]).map(|e| e.2).sum()
}

/// Min-sum k-partitioning through a min-max multiway solver: for every
/// `B = 2^i` up to the total edge weight, attach `k` terminals to all vertices
/// at weight `B/n`, solve, and keep the cheapest `10ρ̂`-balanced induced
/// partition. `solver` returns a partition of the gadget whose part `i`
/// contains terminal `i`; `rho_hat` is its approximation factor.
pub fn reduce_mmmc_to_ksum(
    g: &Graph,
    k: usize,
    rho_hat: f64,
    solver: &mut dyn FnMut(&Graph, &[usize]) -> Result<Partition>,
) -> Result<ReductionReport> {
    let n = g.n();
    if k < 2 || n == 0 {
        return Err(Error::Input(format!("reduction needs k ≥ 2 and a nonempty graph (k={k}, n={n})")));
    }
    if !(rho_hat >= 1.0) {
        return Err(Error::Input(format!("approximation factor {rho_hat} must be ≥ 1")));
    }
    let total = g.total_weight();
    let top = if total >= 1.0 { total.log2().floor() as i32 } else { 0 };
    let balance_factor = 10.0 * rho_hat;
    let cap = balance_factor * n as f64 / k as f64;
    let terminals: Vec<usize> = (n..n + k).collect();
    let mut sweep = Vec::new();
    let mut best: Option<(f64, f64, Partition)> = None;
    for i in 0..=top {
        let b = 2f64.powi(i);
        let gadget = gadget_graph(g, k, b)?;
        let sol = solver(&gadget, &terminals)?;
        for (j, &t) in terminals.iter().enumerate() {
            if sol.part_of.get(t) != Some(&j) {
                return Err(Error::Contract(format!("multiway solver put terminal {j} outside part {j}")));
            }
        }
        let gadget_value = sol.max_cut(&gadget);
        let labels: Vec<usize> = sol.part_of[..n].to_vec();
        let induced = Partition::from_labels(&labels, k)?;
        let cost = crossing_weight(g, &induced);
        let max_size = induced.max_size();
        let balanced = max_size as f64 <= cap * (1.0 + 1e-12);
        sweep.push(SweepEntry { b, gadget_value, max_size, cost, balanced });
        if balanced && best.as_ref().is_none_or(|x| cost < x.1) {
            best = Some((b, cost, induced));
        }
    }
    let (b, cost, partition) = best.ok_or_else(|| {
        Error::Infeasible(format!("no gadget weight produced a {balance_factor}-balanced partition"))
    })?;
    Ok(ReductionReport { partition, b, cost, balance_factor, sweep })
}

/// Exact multiway solver wrapped for [`reduce_mmmc_to_ksum`].
pub fn exact_multiway_solver(g: &Graph, terminals: &[usize]) -> Result<Partition> {
    Ok(exact_multiway(g, terminals)?.partition)
}

/// Level schedule of [`recursive_boost`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostSchedule {
    /// Real part counts `k_i = k^{(1−ε/2)^i}` for levels `0..=depth`.
    pub levels: Vec<f64>,
    pub depth: usize,
    /// `3^{2/ε}`.
    pub final_factor: f64,
}

/// Smallest depth `t` with `k_t ≤ 3^{2/ε}`.
pub fn boost_schedule(k: usize, eps: f64) -> Result<BoostSchedule> {
    if !(eps > 0.0 && eps <= 1.0) || k == 0 {
        return Err(Error::Input(format!("need k ≥ 1 and eps in (0,1] (k={k}, eps={eps})")));
    }
    let final_factor = 3f64.powf(2.0 / eps);
    let mut levels = vec![k as f64];
    while *levels.last().unwrap() > final_factor {
        let i = levels.len() as i32;
        levels.push((k as f64).powf((1.0 - eps / 2.0).powi(i)));
    }
    Ok(BoostSchedule { depth: levels.len() - 1, levels, final_factor })
}

/// Outcome of [`recursive_boost`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub partition: Partition,
    pub schedule: BoostSchedule,
    /// Number of instances at each level `0..=depth`.
    pub instance_counts: Vec<usize>,
    /// Weight of original edges cut by the solver at each level `0..depth`.
    pub level_costs: Vec<f64>,
    pub size_cap: f64,
}

/// Turns a min-sum solver with size violation `k^{1−ε}` into one with
/// violation `3^{2/ε}`: recursive splitting with dummy padding, then greedy
/// merging of the final pieces until each holds at least `n/k` vertices.
///
/// `solver(graph, parts, size_cap)` must return at most `parts` parts, each of
/// at most `size_cap` vertices.
pub fn recursive_boost(
    g: &Graph,
    k: usize,
    eps: f64,
    solver: &mut dyn FnMut(&Graph, usize, usize) -> Result<Partition>,
) -> Result<BoostReport> {
    let n = g.n();
    let schedule = boost_schedule(k, eps)?;
    let unit = n as f64 / k as f64;
    // pieces of the current level: (real vertices, total size with dummies)
    let mut pieces: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut instance_counts = vec![1usize];
    let mut level_costs = Vec::new();
    for i in 0..schedule.depth {
        let ki = schedule.levels[i];
        let parts = ki.ceil() as usize;
        let ni = (unit * ki).floor() as usize;
        let next = (unit * schedule.levels[i + 1]).floor() as usize;
        let cap = ((unit * ki.powf(1.0 - eps)).floor() as usize).max(ni.div_ceil(parts));
        if cap > next {
            return Err(Error::Internal(format!("level {i} cap {cap} exceeds next level size {next}")));
        }
        let mut out = Vec::new();
        let mut cost = 0.0;
        for real in &pieces {
            if real.len() > ni {
                return Err(Error::Internal(format!("level {i} instance has {} > {ni} real vertices", real.len())));
            }
            // dummies are isolated vertices after the real ones
            let sub = g.induced(real);
            let padded = Graph::new(ni, sub.edges().iter().copied())?;
            let sol = solver(&padded, parts, cap)?;
            if sol.part_of.len() != ni || sol.num_nonempty() > parts || sol.max_size() > cap {
                return Err(Error::Contract(format!(
                    "solver returned {} parts of max size {} for {parts} parts of size ≤ {cap}",
                    sol.num_nonempty(),
                    sol.max_size()
                )));
            }
            cost += crossing_weight(&padded, &sol);
            for p in &sol.parts {
                out.push(p.iter().filter(|&&v| v < real.len()).map(|&v| real[v]).collect::<Vec<_>>());
            }
            out.extend((sol.parts.len()..parts).map(|_| Vec::new()));
        }
        let count = out.len();
        if count as f64 > (k as f64).powf(2.0 / eps) * (1.0 + 1e-12) {
            return Err(Error::Contract(format!("level {} has {count} instances > k^(2/ε)", i + 1)));
        }
        instance_counts.push(count);
        level_costs.push(cost);
        pieces = out;
    }
    // greedy merge of pieces smaller than n/k
    let mut big: Vec<Vec<usize>> = Vec::new();
    let mut acc: Vec<usize> = Vec::new();
    let mut small_groups: Vec<Vec<usize>> = Vec::new();
    let mut pieces: Vec<Vec<usize>> = pieces.into_iter().filter(|p| !p.is_empty()).collect();
    pieces.sort_by_key(|p| (p.len(), p[0]));
    for p in pieces {
        if p.len() as f64 >= unit {
            big.push(p);
        } else {
            acc.extend(p);
            if acc.len() as f64 >= unit {
                small_groups.push(std::mem::take(&mut acc));
            }
        }
    }
    if !acc.is_empty() {
        match small_groups.last_mut().or(big.first_mut()) {
            Some(last) => last.extend(acc),
            None => small_groups.push(acc),
        }
    }
    big.extend(small_groups);
    let size_cap = schedule.final_factor * unit;
    if big.len() > k || big.iter().any(|p| p.len() as f64 > size_cap * (1.0 + 1e-12)) {
        return Err(Error::Contract(format!("boosted partition has {} parts, max size {}", big.len(), big.iter().map(Vec::len).max().unwrap_or(0))));
    }
    Ok(BoostReport { partition: Partition::from_parts(n, big)?, schedule, instance_counts, level_costs, size_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_minsum_kpart;

    #[test]
    fn greedy_bad_tree_is_a_tree() {
        for k in 2..=12 {
            let g = gen_greedy_bad_tree(k).unwrap();
            assert_eq!(g.n(), k * k);
            assert_eq!(g.m(), k * k - 1);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn peeling_on_the_bad_tree_ends_at_k_minus_one() {
        for k in 3..=5 {
            let g = gen_greedy_bad_tree(k).unwrap();
            let p = greedy_peeling(&g, k).unwrap();
            assert_eq!(p.max_cut(&g), (k - 1) as f64);
            assert!(consecutive_partition(k).unwrap().max_cut(&g) <= 4.0);
        }
    }

    #[test]
    fn star_gap_values() {
        let r = verify_multiway_sdp_gap(4).unwrap();
        assert!((r.fractional - 1.5).abs() < 1e-12);
        assert_eq!(r.integral, Some(3.0));
        assert!((r.ratio.unwrap() - 2.0).abs() < 1e-12);
        for nrm in &r.centre_norms {
            assert!((nrm - 0.25).abs() < 1e-12);
        }
        let r3 = verify_multiway_sdp_gap(3).unwrap();
        assert!((r3.ratio.unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn random_families_are_reproducible() {
        let fams = [
            Family::Gnp { n: 9, p: 0.4 },
            Family::Grid { rows: 3, cols: 4 },
            Family::Tree { n: 10 },
            Family::Planar { n: 10 },
        ];
        for f in &fams {
            let a = gen_random(f, 3, 11).unwrap();
            let b = gen_random(f, 3, 11).unwrap();
            assert_eq!(a.edges(), b.edges());
        }
        let planar = gen_random(&Family::Planar { n: 10 }, 1, 5).unwrap();
        assert_eq!(planar.m(), 3 * 10 - 6);
        assert!(gen_random(&Family::Tree { n: 10 }, 1, 5).unwrap().is_forest());
        assert!(gen_random(&Family::Gnp { n: 4, p: 1.5 }, 1, 0).is_err());
    }

    #[test]
    fn gadget_adds_k_times_n_edges() {
        let g = gen_random(&Family::Gnp { n: 6, p: 0.5 }, 1, 3).unwrap();
        let gb = gadget_graph(&g, 3, 4.0).unwrap();
        assert_eq!(gb.m(), g.m() + 18);
        let extra: Vec<f64> = gb.edges().iter().filter(|e| e.1 >= 6).map(|e| e.2).collect();
        assert!(extra.iter().all(|&w| (w - 4.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn reduction_with_exact_solver_is_balanced() {
        let g = gen_random(&Family::Gnp { n: 6, p: 0.6 }, 2, 8).unwrap();
        let r = reduce_mmmc_to_ksum(&g, 2, 1.0, &mut exact_multiway_solver).unwrap();
        let opt = exact_minsum_kpart(&g, 2, 3).unwrap().value;
        assert!(r.partition.max_size() as f64 <= 10.0 * 6.0 / 2.0);
        assert!(r.cost <= 5.0 * 2.0 * opt + 1e-9);
    }

    #[test]
    fn boost_depth_follows_the_schedule() {
        assert_eq!(boost_schedule(4, 1.0).unwrap().depth, 0);
        let s = boost_schedule(100, 1.0).unwrap();
        // 100 > 9, 100^0.5 = 10 > 9, 100^0.25 ≈ 3.16
        assert_eq!(s.depth, 2);
        assert!(s.levels[2] <= 9.0);
    }
}
