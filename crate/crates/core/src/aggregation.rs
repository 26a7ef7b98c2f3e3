//! Turning a uniform cover into a partition.
//!
//! Both procedures start the same way: the cover is put in random order and
//! each vertex goes to the first set containing it (sampling), then any part
//! whose cut exceeds `2B` is replaced by its whole cover set, which strictly
//! lowers the total cut by more than `2B` (uncrossing). They differ in how
//! parts are merged afterwards.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// Relative slack on floating comparisons against caps.
const SLACK: f64 = 1e-9;

/// Phase of an aggregation event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggStep {
    Sampling,
    Uncross,
    Merge,
    Group,
}

/// Snapshot after one aggregation step. `parts[i]` belongs to the `i`-th set
/// of the sampled order (empty parts included) until grouping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggEvent {
    pub step: AggStep,
    pub parts: Vec<Vec<usize>>,
    /// Sum of part cuts.
    pub potential: f64,
}

/// Optional record of every step.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggLog {
    /// `order[i]` is the cover index of the `i`-th sampled set.
    pub order: Vec<usize>,
    pub events: Vec<AggEvent>,
}

/// Inputs of the balanced aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateParams {
    pub k: usize,
    /// Every vertex lies in at least a `c/k` fraction of the sets.
    pub c: f64,
    /// Upper bound on every set's cut.
    pub b: f64,
    pub epsilon: f64,
}

/// Result of [`aggregate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregation {
    /// Nonempty parts only.
    pub partition: Partition,
    pub b: f64,
    pub b_prime: f64,
    /// Total cut right after sampling.
    pub sampled_potential: f64,
    pub uncrossings: usize,
    pub merges: usize,
    /// Strict upper bound on the part count from the counting lemma.
    pub count_bound: f64,
}

/// Working state: a label per vertex indexing the sampled order.
struct State<'a> {
    g: &'a Graph,
    sizes: &'a [usize],
    label: Vec<usize>,
    members: Vec<Vec<usize>>,
    cut: Vec<f64>,
}

impl<'a> State<'a> {
    fn new(g: &'a Graph, sizes: &'a [usize], label: Vec<usize>, t: usize) -> Self {
        let mut st = State { g, sizes, label, members: vec![Vec::new(); t], cut: vec![0.0; t] };
        st.refresh();
        st
    }

    fn refresh(&mut self) {
        for m in self.members.iter_mut() {
            m.clear();
        }
        for (v, &l) in self.label.iter().enumerate() {
            self.members[l].push(v);
        }
        self.cut.iter_mut().for_each(|c| *c = 0.0);
        for &(u, v, w) in self.g.edges() {
            let (a, b) = (self.label[u], self.label[v]);
            if a != b {
                self.cut[a] += w;
                self.cut[b] += w;
            }
        }
    }

    fn potential(&self) -> f64 {
        self.cut.iter().sum()
    }

    fn size(&self, i: usize) -> usize {
        self.members[i].iter().map(|&v| self.sizes[v]).sum()
    }

    fn snapshot(&self, step: AggStep, log: &mut Option<&mut AggLog>) {
        if let Some(log) = log.as_deref_mut() {
            log.events.push(AggEvent { step, parts: self.members.clone(), potential: self.potential() });
        }
    }

    fn merge(&mut self, i: usize, j: usize) {
        for v in std::mem::take(&mut self.members[j]) {
            self.label[v] = i;
        }
        self.refresh();
    }
}

/// Steps 1 and 2 shared by both procedures.
fn sample_and_uncross<'a, R: Rng + ?Sized>(
    g: &'a Graph,
    sets: &[Vec<usize>],
    sizes: &'a [usize],
    b: f64,
    rng: &mut R,
    log: &mut Option<&mut AggLog>,
) -> Result<(State<'a>, Vec<Vec<usize>>, f64, usize)> {
    let n = g.n();
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.shuffle(rng);
    let ordered: Vec<Vec<usize>> = order.iter().map(|&i| sets[i].clone()).collect();
    if let Some(log) = log.as_deref_mut() {
        log.order = order;
        log.events.clear();
    }
    let mut label = vec![usize::MAX; n];
    for (i, s) in ordered.iter().enumerate() {
        for &v in s {
            if label[v] == usize::MAX {
                label[v] = i;
            }
        }
    }
    if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Input(format!("vertex {v} is not covered by any set")));
    }
    let mut st = State::new(g, sizes, label, ordered.len());
    let sampled = st.potential();
    st.snapshot(AggStep::Sampling, log);
    let mut uncrossings = 0;
    let limit = 2.0 * b * (1.0 + SLACK);
    while let Some(i) = (0..ordered.len()).find(|&i| st.cut[i] > limit) {
        let before = st.potential();
        for &v in &ordered[i] {
            st.label[v] = i;
        }
        st.refresh();
        let after = st.potential();
        if before - after < 2.0 * b * (1.0 - SLACK) - SLACK {
            return Err(Error::Contract(format!(
                "uncrossing part {i} lowered the total cut by {} < 2B = {}",
                before - after,
                2.0 * b
            )));
        }
        uncrossings += 1;
        st.snapshot(AggStep::Uncross, log);
    }
    if b > 0.0 && uncrossings as f64 > sampled / (2.0 * b) + SLACK {
        return Err(Error::Contract(format!("{uncrossings} uncrossings exceed Σδ/(2B) = {}", sampled / (2.0 * b))));
    }
    Ok((st, ordered, sampled, uncrossings))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Input(format!("epsilon={epsilon} must lie in (0,1)")));
    }
    Ok(())
}

/// Algorithm 2: partitions `V` into at most `k` parts of size at most
/// `2(1+ε)n/k` and cut at most `2B′/ε`.
pub fn aggregate<R: Rng + ?Sized>(
    g: &Graph,
    sets: &[Vec<usize>],
    params: AggregateParams,
    rng: &mut R,
    mut log: Option<&mut AggLog>,
) -> Result<Aggregation> {
    let n = g.n();
    let AggregateParams { k, c, b, epsilon } = params;
    check_epsilon(epsilon)?;
    if k == 0 || !(c > 0.0 && c <= 1.0) || !(b >= 0.0) {
        return Err(Error::Input(format!("need k ≥ 1, c in (0,1] and B ≥ 0 (k={k}, c={c}, B={b})")));
    }
    if sets.is_empty() {
        return Err(Error::Input("empty cover".into()));
    }
    let mut hits = vec![0usize; n];
    for (i, s) in sets.iter().enumerate() {
        let mut mask = vec![false; n];
        for &v in s {
            if v >= n || mask[v] {
                return Err(Error::Input(format!("set {i} has an out-of-range or repeated vertex {v}")));
            }
            mask[v] = true;
            hits[v] += 1;
        }
        if s.len() as f64 > 2.0 * n as f64 / k as f64 * (1.0 + SLACK) {
            return Err(Error::Input(format!("set {i} has {} > 2n/k vertices", s.len())));
        }
        let cut = g.cut_of_mask(&mask);
        if cut > b * (1.0 + SLACK) + SLACK {
            return Err(Error::Input(format!("set {i} has cut {cut} > B = {b}")));
        }
    }
    let need = c / k as f64 * sets.len() as f64;
    if let Some(v) = (0..n).find(|&v| (hits[v] as f64) < need * (1.0 - SLACK)) {
        return Err(Error::Input(format!("vertex {v} lies in {} sets, fewer than c/k of {}", hits[v], sets.len())));
    }
    let sizes = vec![1; n];
    let (mut st, _, sampled, uncrossings) = sample_and_uncross(g, sets, &sizes, b, rng, &mut log)?;
    let t = st.members.len();
    let b_prime = (st.potential() / k as f64).max(2.0 * b);
    let size_cap = 2.0 * (1.0 + epsilon) * n as f64 / k as f64;
    let cut_cap = 2.0 * b_prime / epsilon;
    let mut merges = 0;
    loop {
        // smallest combined size first, then lowest indices
        let mut pick: Option<(usize, usize, usize)> = None;
        for i in 0..t {
            if st.members[i].is_empty() {
                continue;
            }
            for j in (i + 1)..t {
                if st.members[j].is_empty() {
                    continue;
                }
                let size = st.size(i) + st.size(j);
                if size as f64 <= size_cap * (1.0 + SLACK)
                    && st.cut[i] + st.cut[j] <= cut_cap * (1.0 + SLACK)
                    && pick.is_none_or(|p| size < p.0)
                {
                    pick = Some((size, i, j));
                }
            }
        }
        let Some((_, i, j)) = pick else { break };
        st.merge(i, j);
        merges += 1;
        if st.size(i) as f64 > size_cap * (1.0 + SLACK) || st.cut[i] > cut_cap * (1.0 + SLACK) {
            return Err(Error::Contract(format!("merge produced part {i} beyond its caps")));
        }
        st.snapshot(AggStep::Merge, &mut log);
    }
    let parts: Vec<Vec<usize>> = st.members.iter().filter(|p| !p.is_empty()).cloned().collect();
    let a: Vec<f64> = parts.iter().map(|p| p.len() as f64).collect();
    let bs: Vec<f64> = (0..t).filter(|&i| !st.members[i].is_empty()).map(|i| st.cut[i]).collect();
    let lemma = check_agg_lemma(&a, &bs, size_cap, cut_cap, n as f64, k as f64 * b_prime)?;
    if parts.len() > k {
        return Err(Error::Contract(format!("{} parts remain for k={k}", parts.len())));
    }
    Ok(Aggregation {
        partition: Partition::from_parts(n, parts)?,
        b,
        b_prime,
        sampled_potential: sampled,
        uncrossings,
        merges,
        count_bound: lemma.bound,
    })
}

/// Outcome of [`check_agg_lemma`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub t: usize,
    pub bound: f64,
}

/// Checks the greedy-aggregation counting bound
/// `t < S/A + T/B + max(S/A, T/B, 1)` for an unmergeable family.
///
/// Entries may reach the caps `A` and `B`; since every pair must exceed a cap
/// strictly, the bound still holds.
pub fn check_agg_lemma(a: &[f64], b: &[f64], cap_a: f64, cap_b: f64, s: f64, t_sum: f64) -> Result<LemmaCheck> {
    if a.len() != b.len() {
        return Err(Error::Input("sequences differ in length".into()));
    }
    if !(cap_a > 0.0 && cap_b > 0.0 && s > 0.0 && t_sum > 0.0) {
        // a zero budget leaves the bound meaningless; report the trivial count
        if a.len() <= 1 {
            return Ok(LemmaCheck { t: a.len(), bound: f64::INFINITY });
        }
    }
    if let Some(i) = (0..a.len()).find(|&i| a[i] < 0.0 || b[i] < 0.0 || a[i] > cap_a * (1.0 + SLACK) || b[i] > cap_b * (1.0 + SLACK)) {
        return Err(Error::Input(format!("entry {i} ({}, {}) is outside [0, A]×[0, B]", a[i], b[i])));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if sa > s * (1.0 + SLACK) || sb > t_sum * (1.0 + SLACK) {
        return Err(Error::Input(format!("sums ({sa}, {sb}) exceed ({s}, {t_sum})")));
    }
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if a[i] + a[j] <= cap_a * (1.0 + SLACK) && b[i] + b[j] <= cap_b * (1.0 + SLACK) {
                return Err(Error::Input(format!("entries {i} and {j} can still be merged")));
            }
        }
    }
    let (x, y) = (s / cap_a, t_sum / cap_b);
    let bound = x + y + x.max(y).max(1.0);
    if (a.len() as f64) >= bound {
        return Err(Error::Contract(format!("{} entries reach the bound {bound}", a.len())));
    }
    Ok(LemmaCheck { t: a.len(), bound })
}

/// Inputs of the terminal-aware aggregation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalParams {
    pub k: usize,
    /// Size cap as a fraction of the total vertex size; at least `1/k`.
    pub rho: f64,
    /// Upper bound on every set's cut.
    pub b: f64,
    pub epsilon: f64,
    /// `terminals[i]` must end up in part `i`; at most `k` entries.
    pub terminals: Vec<usize>,
    /// Vertex sizes; unit when absent.
    pub sizes: Option<Vec<usize>>,
}

/// Result of [`aggregate_with_terminals`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalAggregation {
    /// Exactly `k` parts, possibly empty; part `i` holds terminal `i`.
    pub partition: Partition,
    pub b_prime: f64,
    pub uncrossings: usize,
    pub merges: usize,
    /// Parts left after merging.
    pub merged_parts: usize,
    pub groups: usize,
    /// Largest `|Qᵢ| − |Pᵢ′|` over parts, `Pᵢ′` the part taken from the first group.
    pub tail_size: usize,
}

/// The five-step variant: merge only terminal-free pairs within
/// `(1+ε)ρ` total size and `2B′` cut, sort by size, split into groups of
/// `k` and deal one part of every group to each output part.
pub fn aggregate_with_terminals<R: Rng + ?Sized>(
    g: &Graph,
    sets: &[Vec<usize>],
    params: &TerminalParams,
    rng: &mut R,
    mut log: Option<&mut AggLog>,
) -> Result<TerminalAggregation> {
    let n = g.n();
    let TerminalParams { k, rho, b, epsilon, .. } = *params;
    check_epsilon(epsilon)?;
    if k == 0 || !(rho * k as f64 >= 1.0 - SLACK && rho <= 1.0) || !(b >= 0.0) {
        return Err(Error::Input(format!("need k ≥ 1, rho in [1/k, 1] and B ≥ 0 (k={k}, rho={rho}, B={b})")));
    }
    let terminals = &params.terminals;
    if terminals.len() > k {
        return Err(Error::Input(format!("{} terminals for k={k}", terminals.len())));
    }
    let sizes = params.sizes.clone().unwrap_or_else(|| vec![1; n]);
    if sizes.len() != n {
        return Err(Error::Input(format!("{} vertex sizes for n={n}", sizes.len())));
    }
    let mut term_of = vec![usize::MAX; n];
    for (i, &t) in terminals.iter().enumerate() {
        if t >= n || term_of[t] != usize::MAX {
            return Err(Error::Input(format!("terminal {t} is out of range or repeated")));
        }
        term_of[t] = i;
    }
    let total: usize = sizes.iter().sum();
    let set_cap = (1.0 + epsilon) * rho * total as f64;
    for (i, s) in sets.iter().enumerate() {
        if s.iter().any(|&v| v >= n) {
            return Err(Error::Input(format!("set {i} has an out-of-range vertex")));
        }
        if s.iter().filter(|&&v| term_of[v] != usize::MAX).count() > 1 {
            return Err(Error::Input(format!("set {i} holds more than one terminal")));
        }
        let size: usize = s.iter().map(|&v| sizes[v]).sum();
        if size as f64 > set_cap * (1.0 + SLACK) {
            return Err(Error::Input(format!("set {i} has size {size} > (1+ε)ρ·{total}")));
        }
    }
    let (mut st, _, _, uncrossings) = sample_and_uncross(g, sets, &sizes, b, rng, &mut log)?;
    let t = st.members.len();
    let b_prime = (st.potential() / k as f64).max(2.0 * b);
    let has_term = |st: &State<'_>, i: usize| st.members[i].iter().any(|&v| term_of[v] != usize::MAX);
    let mut merges = 0;
    loop {
        let mut pick: Option<(usize, usize, usize)> = None;
        for i in 0..t {
            if st.members[i].is_empty() || has_term(&st, i) {
                continue;
            }
            for j in (i + 1)..t {
                if st.members[j].is_empty() || has_term(&st, j) {
                    continue;
                }
                let size = st.size(i) + st.size(j);
                if size as f64 <= set_cap * (1.0 + SLACK)
                    && st.cut[i] + st.cut[j] <= 2.0 * b_prime * (1.0 + SLACK)
                    && pick.is_none_or(|p| size < p.0)
                {
                    pick = Some((size, i, j));
                }
            }
        }
        let Some((_, i, j)) = pick else { break };
        st.merge(i, j);
        merges += 1;
        st.snapshot(AggStep::Merge, &mut log);
    }
    // sort nonempty parts by non-increasing size, ties by smallest vertex
    let mut parts: Vec<(usize, f64, Vec<usize>)> =
        (0..t).filter(|&i| !st.members[i].is_empty()).map(|i| (st.size(i), st.cut[i], st.members[i].clone())).collect();
    parts.sort_by(|x, y| y.0.cmp(&x.0).then(x.2[0].cmp(&y.2[0])));
    let merged_parts = parts.len();
    if merged_parts > 4 * k {
        return Err(Error::Contract(format!("{merged_parts} parts after merging exceed 4k = {}", 4 * k)));
    }
    let mut q: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut q_size = vec![0usize; k];
    let mut first = vec![0usize; k];
    let groups = merged_parts.div_ceil(k);
    for (gi, group) in parts.chunks(k).enumerate() {
        let mut used = vec![false; k];
        let mut free = Vec::new();
        for (size, _, p) in group {
            match p.iter().find(|&&v| term_of[v] != usize::MAX) {
                Some(&v) => {
                    let i = term_of[v];
                    if used[i] {
                        return Err(Error::Internal(format!("group {gi} holds two parts for terminal {i}")));
                    }
                    used[i] = true;
                    q[i].extend_from_slice(p);
                    q_size[i] += size;
                    if gi == 0 {
                        first[i] = *size;
                    }
                }
                None => free.push((*size, p)),
            }
        }
        for (size, p) in free {
            let slot = (0..k).filter(|&i| !used[i]).min_by_key(|&i| (q_size[i], i)).ok_or_else(|| {
                Error::Internal(format!("group {gi} has more than k parts to place"))
            })?;
            used[slot] = true;
            q[slot].extend_from_slice(p);
            q_size[slot] += size;
            if gi == 0 {
                first[slot] = size;
            }
        }
    }
    // guarantees
    let tail_size = (0..k).map(|i| q_size[i] - first[i]).max().unwrap_or(0);
    let min_q = q_size.iter().copied().min().unwrap_or(0);
    if tail_size > min_q || tail_size as f64 > total as f64 / k as f64 * (1.0 + SLACK) {
        return Err(Error::Contract(format!("tail size {tail_size} exceeds min part {min_q} or n/k")));
    }
    let partition = Partition::from_parts(n, q)?;
    let cuts = partition.cuts(g);
    for i in 0..k {
        if q_size[i] as f64 > (2.0 + epsilon) * rho * total as f64 * (1.0 + SLACK) {
            return Err(Error::Contract(format!("part {i} has size {} > (2+ε)ρn", q_size[i])));
        }
        if cuts[i] > 8.0 * b_prime * (1.0 + SLACK) + SLACK {
            return Err(Error::Contract(format!("part {i} has cut {} > 8B′ = {}", cuts[i], 8.0 * b_prime)));
        }
    }
    for (i, &tv) in terminals.iter().enumerate() {
        if partition.part_of[tv] != i {
            return Err(Error::Internal(format!("terminal {i} landed in part {}", partition.part_of[tv])));
        }
    }
    if let Some(log) = log.as_deref_mut() {
        log.events.push(AggEvent { step: AggStep::Group, parts: partition.parts.clone(), potential: cuts.iter().sum() });
    }
    Ok(TerminalAggregation { partition, b_prime, uncrossings, merges, merged_parts, groups, tail_size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn exact_partition_cover_stays_within_caps() {
        let g = cycle(8);
        let sets = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        let p = AggregateParams { k: 2, c: 1.0, b: 2.0, epsilon: 0.25 };
        let mut log = AggLog::default();
        let a = aggregate(&g, &sets, p, &mut stream(1, "aggregate"), Some(&mut log)).unwrap();
        assert!(a.partition.num_nonempty() <= 2);
        assert!(a.partition.max_size() as f64 <= 2.0 * 1.25 * 4.0);
        assert!(a.partition.max_cut(&g) <= 2.0 * a.b_prime / 0.25);
        assert_eq!(log.events[0].step, AggStep::Sampling);
    }

    #[test]
    fn uncrossing_replaces_an_expensive_part() {
        // S0 = alternate vertices (cut 8), S1 and S2 = arcs; ordering with S0 first
        // leaves arcs fragmented until uncrossing
        let g = cycle(8);
        let sets = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![2, 3, 4, 5], vec![6, 7, 0, 1]];
        let p = AggregateParams { k: 2, c: 1.0, b: 2.0, epsilon: 0.25 };
        for seed in 0..20 {
            let mut log = AggLog::default();
            let a = aggregate(&g, &sets, p, &mut stream(seed, "aggregate"), Some(&mut log)).unwrap();
            for w in log.events.windows(2) {
                if w[1].step == AggStep::Uncross {
                    assert!(w[0].potential - w[1].potential >= 4.0 - 1e-9);
                }
            }
            assert!(a.partition.num_nonempty() <= 2);
        }
    }

    #[test]
    fn uncovered_vertex_rejected() {
        let g = cycle(4);
        let p = AggregateParams { k: 2, c: 1.0, b: 2.0, epsilon: 0.25 };
        let r = aggregate(&g, &[vec![0, 1]], p, &mut stream(2, "aggregate"), None);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(check_agg_lemma(&[0.5], &[0.5], 1.0, 1.0, 1.0, 1.0).unwrap().t, 1);
        let a = vec![0.6; 5];
        let b = vec![0.0; 5];
        let c = check_agg_lemma(&a, &b, 1.0, 1.0, 3.0, 1.0).unwrap();
        assert!((c.t as f64) < c.bound);
        // a mergeable pair is reported
        assert!(matches!(check_agg_lemma(&[0.3, 0.3], &[0.1, 0.1], 1.0, 1.0, 1.0, 1.0), Err(Error::Input(_))));
    }

    #[test]
    fn terminals_land_in_their_parts() {
        let g = cycle(6);
        let sets = vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![1, 2], vec![3, 4], vec![5, 0]];
        let params = TerminalParams { k: 3, rho: 1.0 / 3.0, b: 2.0, epsilon: 0.5, terminals: vec![0, 2, 4], sizes: None };
        let a = aggregate_with_terminals(&g, &sets, &params, &mut stream(3, "aggregate"), None).unwrap();
        assert_eq!(a.partition.parts.len(), 3);
        for (i, &t) in [0, 2, 4].iter().enumerate() {
            assert!(a.partition.parts[i].contains(&t));
        }
        assert!(a.partition.max_size() as f64 <= 2.5 / 3.0 * 6.0);
    }
}
