//! Exact dynamic programme for cut problems on forests with integer edge weights.
//!
//! Tables are indexed by (weighted size, cut weight, root inside, terminal count)
//! and hold the maximum y-mass achievable in a subtree.

use crate::graph::Graph;

pub(crate) struct ForestInput<'a> {
    pub graph: &'a Graph,
    pub size_w: &'a [usize],
    pub y: &'a [f64],
    pub terminal: &'a [bool],
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct State {
    pub s: usize,
    pub c: usize,
    pub inside: bool,
    pub t: usize,
}

struct Dims {
    cap: usize,
    cmax: usize,
}

impl Dims {
    fn len(&self) -> usize {
        (self.cap + 1) * (self.cmax + 1) * 4
    }
    fn idx(&self, st: State) -> usize {
        ((st.s * (self.cmax + 1) + st.c) * 2 + st.inside as usize) * 2 + st.t
    }
    fn state(&self, i: usize) -> State {
        let t = i % 2;
        let inside = (i / 2) % 2 == 1;
        let c = (i / 4) % (self.cmax + 1);
        let s = i / 4 / (self.cmax + 1);
        State { s, c, inside, t }
    }
}

/// Solved tables plus enough history to recover an optimal vertex set.
pub(crate) struct ForestTables {
    dims: Dims,
    children: Vec<Vec<(usize, usize)>>,
    history: Vec<Vec<Vec<f64>>>,
    root: usize,
}

impl ForestTables {
    /// Final table entry at the virtual root (which is always outside).
    pub fn root_value(&self, s: usize, c: usize, t: usize) -> f64 {
        let h = self.history[self.root].last().unwrap();
        h[self.dims.idx(State { s, c, inside: false, t })]
    }

    pub fn cmax(&self) -> usize {
        self.dims.cmax
    }

    pub fn cap(&self) -> usize {
        self.dims.cap
    }

    /// Vertices of an optimal set realizing the root state.
    pub fn recover(&self, s: usize, c: usize, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, State { s, c, inside: false, t })];
        while let Some((v, st)) = stack.pop() {
            if st.inside && v != self.root {
                out.push(v);
            }
            let hist = &self.history[v];
            let mut cur = st;
            for j in (0..self.children[v].len()).rev() {
                let (ch, w) = self.children[v][j];
                let target = hist[j + 1][self.dims.idx(cur)];
                let prev = &hist[j];
                let child_tab = self.history[ch].last().unwrap();
                let (a, b) = self
                    .find_split(prev, child_tab, cur, w, target)
                    .expect("forest table backtrack");
                stack.push((ch, b));
                cur = a;
            }
        }
        out.sort_unstable();
        out
    }

    fn find_split(
        &self,
        prev: &[f64],
        child: &[f64],
        cur: State,
        w: usize,
        target: f64,
    ) -> Option<(State, State)> {
        for sa in 0..=cur.s {
            for ta in 0..=cur.t {
                let sb = cur.s - sa;
                let tb = cur.t - ta;
                for ca in 0..=cur.c {
                    let a = State { s: sa, c: ca, inside: cur.inside, t: ta };
                    let va = prev[self.dims.idx(a)];
                    if va == f64::NEG_INFINITY {
                        continue;
                    }
                    for inb in [false, true] {
                        let extra = if inb != cur.inside { w } else { 0 };
                        if ca + extra > cur.c {
                            continue;
                        }
                        let cb = cur.c - ca - extra;
                        let b = State { s: sb, c: cb, inside: inb, t: tb };
                        let vb = child[self.dims.idx(b)];
                        if vb != f64::NEG_INFINITY && va + vb == target {
                            return Some((a, b));
                        }
                    }
                }
            }
        }
        None
    }
}

/// Runs the dynamic programme with cut budget `cmax`.
pub(crate) fn solve(input: &ForestInput<'_>, cmax: usize) -> ForestTables {
    let g = input.graph;
    let n = g.n();
    let dims = Dims { cap: input.cap, cmax };
    let root = n;
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n + 1);
    for r in 0..n {
        if seen[r] {
            continue;
        }
        children[root].push((r, 0));
        seen[r] = true;
        let mut stack = vec![r];
        while let Some(u) = stack.pop() {
            order.push(u);
            for (v, w) in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    children[u].push((v, w.round() as usize));
                    stack.push(v);
                }
            }
        }
    }
    for list in children.iter_mut() {
        list.sort_unstable();
    }
    let mut history: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n + 1];
    let len = dims.len();
    let process = |v: usize, history: &mut Vec<Vec<Vec<f64>>>| {
        let mut tab = vec![f64::NEG_INFINITY; len];
        tab[dims.idx(State { s: 0, c: 0, inside: false, t: 0 })] = 0.0;
        if v != root {
            let s = input.size_w[v];
            let t = input.terminal[v] as usize;
            if s <= dims.cap {
                tab[dims.idx(State { s, c: 0, inside: true, t })] = input.y[v];
            }
        }
        let mut hist = vec![tab];
        for &(ch, w) in &children[v] {
            let cur = hist.last().unwrap();
            let child = history[ch].last().unwrap();
            let mut next = vec![f64::NEG_INFINITY; len];
            let live_a: Vec<(State, f64)> = (0..len)
                .filter(|&i| cur[i] != f64::NEG_INFINITY)
                .map(|i| (dims.state(i), cur[i]))
                .collect();
            let live_b: Vec<(State, f64)> = (0..len)
                .filter(|&i| child[i] != f64::NEG_INFINITY)
                .map(|i| (dims.state(i), child[i]))
                .collect();
            for &(a, va) in &live_a {
                for &(b, vb) in &live_b {
                    let s = a.s + b.s;
                    let t = a.t + b.t;
                    let c = a.c + b.c + if a.inside != b.inside { w } else { 0 };
                    if s > dims.cap || t > 1 || c > dims.cmax {
                        continue;
                    }
                    let i = dims.idx(State { s, c, inside: a.inside, t });
                    if va + vb > next[i] {
                        next[i] = va + vb;
                    }
                }
            }
            hist.push(next);
        }
        history[v] = hist;
    };
    for &v in order.iter().rev() {
        process(v, &mut history);
    }
    process(root, &mut history);
    ForestTables { dims, children, history, root }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_min_cut_of_size_two() {
        // path 0-1-2-3: an end pair has cut 1
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let input = ForestInput {
            graph: &g,
            size_w: &[1; 4],
            y: &[0.0; 4],
            terminal: &[false; 4],
            cap: 2,
        };
        let tab = solve(&input, 2);
        assert_eq!(tab.root_value(2, 0, 0), f64::NEG_INFINITY);
        assert_eq!(tab.root_value(2, 1, 0), 0.0);
        let s = tab.recover(2, 1, 0);
        assert_eq!(s.len(), 2);
        assert_eq!(g.cut_of_mask(&crate::graph::to_mask(4, &s)), 1.0);
    }
}
