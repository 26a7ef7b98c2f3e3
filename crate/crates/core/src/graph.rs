//! Weighted undirected graphs, vertex measures, partitions and cut accounting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable weighted undirected graph on vertices `0..n`.
///
/// Edges are stored once per unordered pair with `u < v`, sorted. A CSR
/// adjacency index gives O(deg) neighbourhood scans.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    total_weight: f64,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<f64>,
}

impl Graph {
    /// Builds a graph, merging parallel edges by summing their weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let (g, merged) = Self::new_counting(n, edges)?;
        if merged > 0 {
            log::warn!("merged {merged} parallel edge(s) by summing weights");
        }
        Ok(g)
    }

    /// Like [`Graph::new`] but also returns how many parallel edges were merged.
    pub fn new_counting(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<(Self, usize)> {
        let mut merged = 0usize;
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Input(format!("edge ({u},{v}) has invalid weight {w}")));
            }
            let key = (u.min(v), u.max(v));
            match map.get_mut(&key) {
                Some(acc) => {
                    *acc += w;
                    merged += 1;
                }
                None => {
                    map.insert(key, w);
                }
            }
        }
        let edges: Vec<(usize, usize, f64)> = map.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        Ok((Self::from_sorted(n, edges), merged))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v, _) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut xadj = vec![0usize; n + 1];
        for u in 0..n {
            xadj[u + 1] = xadj[u] + deg[u];
        }
        let mut fill = xadj.clone();
        let mut adjncy = vec![0usize; xadj[n]];
        let mut adjwgt = vec![0f64; xadj[n]];
        for &(u, v, w) in &edges {
            adjncy[fill[u]] = v;
            adjwgt[fill[u]] = w;
            fill[u] += 1;
            adjncy[fill[v]] = u;
            adjwgt[fill[v]] = w;
            fill[v] += 1;
        }
        let total_weight = edges.iter().map(|e| e.2).sum();
        Graph { n, edges, total_weight, xadj, adjncy, adjwgt }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// w(E), the sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.xadj[u]..self.xadj[u + 1];
        self.adjncy[r.clone()].iter().copied().zip(self.adjwgt[r].iter().copied())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.xadj[u + 1] - self.xadj[u]
    }

    /// Sum of weights of edges at `u`.
    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.adjwgt[self.xadj[u]..self.xadj[u + 1]].iter().sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.neighbors(u).find(|&(x, _)| x == v).map_or(0.0, |(_, w)| w)
    }

    /// Cut weight for a membership mask; no range checks.
    pub fn cut_of_mask(&self, inside: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| inside[u] != inside[v])
            .fold(0.0, |acc, e| acc + e.2)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for (v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// True when the graph has no cycles.
    pub fn is_forest(&self) -> bool {
        self.m() + self.components().len() == self.n
    }

    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.2.fract() == 0.0 && e.2 < 9.0e15)
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v, w)| {
                let (a, b) = (index[u], index[v]);
                (a.min(b), a.max(b), w)
            })
            .collect();
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Graph::from_sorted(vertices.len(), edges)
    }
}

/// Membership mask of `s` over `0..n`.
pub fn to_mask(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

/// Sorted vertex list of a mask.
pub fn from_mask(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|p| *p.1).map(|p| p.0).collect()
}

fn check_set(n: usize, s: &[usize]) -> Result<Vec<bool>> {
    let mut m = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(Error::Input(format!("vertex {v} out of range for n={n}")));
        }
        m[v] = true;
    }
    Ok(m)
}

/// Nonnegative vertex weighting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    values: Vec<f64>,
    total: f64,
}

impl Measure {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(x) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Input(format!("measure value {x} is not a nonnegative real")));
        }
        let total = values.iter().sum();
        Ok(Measure { values, total })
    }

    /// Uniform probability measure on `n` vertices.
    pub fn uniform(n: usize) -> Self {
        Measure { values: vec![1.0 / n as f64; n], total: 1.0 }
    }

    /// Rescales to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        if self.total <= 0.0 {
            return Err(Error::Input("cannot normalize a measure with zero mass".into()));
        }
        let values: Vec<f64> = self.values.iter().map(|x| x / self.total).collect();
        Ok(Measure { values, total: 1.0 })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Measure { values: self.values.iter().map(|x| x * c).collect(), total: self.total * c }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn get(&self, u: usize) -> f64 {
        self.values[u]
    }

    pub fn of(&self, s: &[usize]) -> f64 {
        s.iter().map(|&u| self.values[u]).sum()
    }

    pub fn of_mask(&self, mask: &[bool]) -> f64 {
        mask.iter().zip(&self.values).filter(|p| *p.0).map(|p| p.1).sum()
    }
}

/// Disjoint vertex sets covering `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
    pub part_of: Vec<usize>,
}

impl Partition {
    /// Checks disjointness and coverage. Parts are sorted; empty parts are kept.
    pub fn from_parts(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        let mut parts = parts;
        for (i, p) in parts.iter_mut().enumerate() {
            p.sort_unstable();
            for &v in p.iter() {
                if v >= n {
                    return Err(Error::Input(format!("vertex {v} out of range for n={n}")));
                }
                if part_of[v] != usize::MAX {
                    return Err(Error::Input(format!("vertex {v} appears in two parts")));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Input(format!("vertex {v} is not covered")));
        }
        Ok(Partition { parts, part_of })
    }

    /// Builds a partition from per-vertex labels in `0..k`.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        let mut parts = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::Input(format!("label {l} out of range for k={k}")));
            }
            parts[l].push(v);
        }
        Self::from_parts(labels.len(), parts)
    }

    /// Same partition with empty parts removed.
    pub fn without_empty(&self) -> Self {
        let parts: Vec<Vec<usize>> = self.parts.iter().filter(|p| !p.is_empty()).cloned().collect();
        Self::from_parts(self.part_of.len(), parts).expect("already a partition")
    }

    pub fn num_nonempty(&self) -> usize {
        self.parts.iter().filter(|p| !p.is_empty()).count()
    }

    pub fn cuts(&self, g: &Graph) -> Vec<f64> {
        let mut cuts = vec![0.0; self.parts.len()];
        for &(u, v, w) in g.edges() {
            let (a, b) = (self.part_of[u], self.part_of[v]);
            if a != b {
                cuts[a] += w;
                cuts[b] += w;
            }
        }
        cuts
    }

    pub fn max_cut(&self, g: &Graph) -> f64 {
        self.cuts(g).into_iter().fold(0.0, f64::max)
    }

    pub fn sum_cut(&self, g: &Graph) -> f64 {
        self.cuts(g).into_iter().sum()
    }

    pub fn max_size(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Cut statistics of one vertex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub set_size: usize,
    pub boundary: f64,
    pub mu: f64,
    pub eta: f64,
    /// δ(S)/|S| when 0 < |S| ≤ n/2.
    pub expansion: Option<f64>,
}

impl CutReport {
    pub fn new(g: &Graph, s: &[usize], mu: &Measure, eta: &Measure) -> Self {
        let mask = to_mask(g.n(), s);
        let boundary = g.cut_of_mask(&mask);
        let expansion =
            (!s.is_empty() && 2 * s.len() <= g.n()).then(|| boundary / s.len() as f64);
        CutReport { set_size: s.len(), boundary, mu: mu.of(s), eta: eta.of(s), expansion }
    }
}

/// δ(S): total weight of edges with exactly one endpoint in `s`.
pub fn cut_weight(g: &Graph, s: &[usize]) -> Result<f64> {
    Ok(g.cut_of_mask(&check_set(g.n(), s)?))
}

/// Φ(S) = δ(S)/|S|.
pub fn expansion(g: &Graph, s: &[usize]) -> Result<f64> {
    let mask = check_set(g.n(), s)?;
    let size = mask.iter().filter(|b| **b).count();
    if size == 0 {
        return Err(Error::Input("expansion of the empty set".into()));
    }
    Ok(g.cut_of_mask(&mask) / size as f64)
}

/// (δ(S)/w(E)) · (1/η(S)).
pub fn weighted_expansion(g: &Graph, s: &[usize], eta: &Measure) -> Result<f64> {
    let mask = check_set(g.n(), s)?;
    let mass = eta.of_mask(&mask);
    if mass <= 0.0 {
        return Err(Error::Input("η(S) = 0".into()));
    }
    let cut = g.cut_of_mask(&mask);
    if cut == 0.0 {
        return Ok(0.0);
    }
    Ok(cut / g.total_weight() / mass)
}

/// Outcome of [`validate_partition`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub uncovered: Vec<usize>,
    pub duplicated: Vec<usize>,
    pub out_of_range: Vec<usize>,
    pub nonempty_parts: usize,
    pub too_many_parts: bool,
    pub oversized: Vec<usize>,
    pub overcost: Vec<usize>,
    pub max_cut: f64,
    pub sum_cut: f64,
    pub max_size: usize,
}

impl PartitionReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty()
            && self.duplicated.is_empty()
            && self.out_of_range.is_empty()
            && !self.too_many_parts
            && self.oversized.is_empty()
            && self.overcost.is_empty()
    }
}

/// Reports coverage and cap violations of a list of parts without failing.
pub fn validate_partition(
    g: &Graph,
    parts: &[Vec<usize>],
    k: usize,
    size_cap: f64,
    cost_cap: f64,
) -> PartitionReport {
    let n = g.n();
    let mut count = vec![0usize; n];
    let mut rep = PartitionReport::default();
    let mut label = vec![usize::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            if v >= n {
                rep.out_of_range.push(v);
                continue;
            }
            count[v] += 1;
            label[v] = i;
        }
    }
    for v in 0..n {
        match count[v] {
            0 => rep.uncovered.push(v),
            1 => {}
            _ => rep.duplicated.push(v),
        }
    }
    let mut cuts = vec![0.0; parts.len()];
    for &(u, v, w) in g.edges() {
        let (a, b) = (label[u], label[v]);
        if a != b {
            if a != usize::MAX {
                cuts[a] += w;
            }
            if b != usize::MAX {
                cuts[b] += w;
            }
        }
    }
    rep.nonempty_parts = parts.iter().filter(|p| !p.is_empty()).count();
    rep.too_many_parts = rep.nonempty_parts > k;
    for (i, p) in parts.iter().enumerate() {
        if p.len() as f64 > size_cap {
            rep.oversized.push(i);
        }
        if cuts[i] > cost_cap {
            rep.overcost.push(i);
        }
    }
    rep.max_cut = cuts.iter().copied().fold(0.0, f64::max);
    rep.sum_cut = cuts.iter().sum();
    rep.max_size = parts.iter().map(Vec::len).max().unwrap_or(0);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn triangle_vertex_cut_is_degree() {
        assert_eq!(cut_weight(&triangle(), &[0]).unwrap(), 2.0);
        assert_eq!(expansion(&triangle(), &[0]).unwrap(), 2.0);
    }

    #[test]
    fn empty_set_has_zero_cut() {
        assert_eq!(cut_weight(&triangle(), &[]).unwrap(), 0.0);
        assert!(expansion(&triangle(), &[]).is_err());
    }

    #[test]
    fn path_pair_expansion() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(expansion(&g, &[0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn six_cycle_min_three_subset_expansion() {
        // independent recount straight from the edge list
        let g = cycle(6);
        let mut best = f64::INFINITY;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let cut = (0..6).filter(|&i| ((mask >> i) & 1) != ((mask >> ((i + 1) % 6)) & 1)).count();
            best = best.min(cut as f64 / 3.0);
        }
        assert!((best - 2.0 / 3.0).abs() < 1e-15);
        assert!((expansion(&g, &[1, 2, 3]).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn weighted_expansion_cycle_and_whole_set() {
        let g = cycle(4);
        let eta = Measure::uniform(4);
        assert!((weighted_expansion(&g, &[0, 1], &eta).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(weighted_expansion(&g, &[0, 1, 2, 3], &eta).unwrap(), 0.0);
        let zero = Measure::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(weighted_expansion(&g, &[0, 1], &zero).is_err());
    }

    #[test]
    fn out_of_range_vertex_is_input_error() {
        assert!(matches!(cut_weight(&triangle(), &[3]), Err(Error::Input(_))));
    }

    #[test]
    fn parallel_edges_merge() {
        let (g, merged) = Graph::new_counting(2, [(0, 1, 1.5), (1, 0, 2.0)]).unwrap();
        assert_eq!(merged, 1);
        assert_eq!(g.m(), 1);
        assert_eq!(g.total_weight(), 3.5);
        assert!(Graph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(Graph::new(2, [(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn partition_validation_reports() {
        let g = cycle(4);
        let rep = validate_partition(&g, &[vec![0, 1], vec![2, 3]], 2, 2.0, 2.0);
        assert!(rep.is_valid());
        assert_eq!(rep.max_cut, 2.0);
        assert_eq!(rep.sum_cut, 4.0);
        let bad = validate_partition(&g, &[vec![0, 1, 2], vec![2]], 1, 2.0, 1.0);
        assert_eq!(bad.uncovered, vec![3]);
        assert_eq!(bad.duplicated, vec![2]);
        assert!(bad.too_many_parts);
        assert_eq!(bad.oversized, vec![0]);
        assert!(!bad.is_valid());
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (2usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(proptest::option::of(1u8..5), n * (n - 1) / 2).prop_map(
                move |ws| {
                    let mut edges = Vec::new();
                    let mut it = ws.into_iter();
                    for u in 0..n {
                        for v in u + 1..n {
                            if let Some(w) = it.next().unwrap() {
                                edges.push((u, v, w as f64));
                            }
                        }
                    }
                    Graph::new(n, edges).unwrap()
                },
            )
        })
    }

    fn bits(n: usize, mask: u32) -> Vec<usize> {
        (0..n).filter(|i| mask >> i & 1 == 1).collect()
    }

    proptest! {
        #[test]
        fn cut_is_symmetric_and_submodular(g in small_graph()) {
            let n = g.n();
            let full = (1u32 << n) - 1;
            for a in 0..=full {
                let ca = cut_weight(&g, &bits(n, a)).unwrap();
                prop_assert_eq!(ca, cut_weight(&g, &bits(n, full ^ a)).unwrap());
                for b in 0..=full {
                    let cb = cut_weight(&g, &bits(n, b)).unwrap();
                    let cu = cut_weight(&g, &bits(n, a | b)).unwrap();
                    let ci = cut_weight(&g, &bits(n, a & b)).unwrap();
                    prop_assert!(ca + cb >= cu + ci - 1e-9);
                }
            }
        }

        #[test]
        fn part_cuts_double_count_crossing_edges(g in small_graph(), labels in proptest::collection::vec(0usize..3, 6)) {
            let labels = &labels[..g.n()];
            let p = Partition::from_labels(labels, 3).unwrap();
            let crossing: f64 = g.edges().iter().filter(|e| labels[e.0] != labels[e.1]).map(|e| e.2).sum();
            prop_assert!((p.sum_cut(&g) - 2.0 * crossing).abs() < 1e-9);
        }
    }
}
