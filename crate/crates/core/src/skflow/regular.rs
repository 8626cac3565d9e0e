//! Regular path search as an alternating path search.
//!
//! Each residual mate pair contributes up to two unit copies. A copy is a
//! matched edge between two ends, one per arc of the pair; crossing the
//! matched edge from an end traverses that end's arc. Two ends are joined
//! by an unmatched edge when the arc of the second one can follow the arc
//! whose traversal led into the first. The exposed roots `z1` and `z2`
//! stand for the source and the sink. Augmenting `z1`–`z2` paths are exactly
//! regular source–sink paths, and the outer vertices of a failed search
//! mark the nodes reachable by regular paths.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::SkGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularSearch {
    /// Arc indices of a regular source–sink path, if one exists.
    pub path: Option<Vec<usize>>,
    /// Nodes reachable from the source by regular paths; meaningful when `path` is `None`.
    pub reach: Vec<bool>,
}

const NONE: usize = usize::MAX;

struct Aux {
    adj: Vec<Vec<usize>>,
    /// Arc traversed when leaving a vertex through its matched edge.
    arc: Vec<usize>,
    /// Node at which that arc starts.
    tail: Vec<usize>,
    mate: Vec<usize>,
}

fn build(g: &SkGraph) -> Aux {
    let mut arc = vec![NONE, NONE];
    let mut tail = vec![NONE, NONE];
    let mut mate = vec![NONE, NONE];
    for p in 0..g.arcs.len() / 2 {
        let copies = g.arcs[2 * p].cap.min(2);
        for _ in 0..copies {
            let a = arc.len();
            for side in 0..2 {
                arc.push(2 * p + side);
                tail.push(g.arcs[2 * p + side].tail);
            }
            mate.push(a + 1);
            mate.push(a);
        }
    }
    let n = arc.len();
    let mut by_tail = vec![Vec::new(); g.num_nodes()];
    for x in 2..n {
        by_tail[tail[x]].push(x);
    }
    let mut adj = vec![Vec::new(); n];
    for x in 2..n {
        adj[x].push(mate[x]);
        adj[x].extend(&by_tail[g.mate(tail[x])]);
    }
    for &x in &by_tail[g.source] {
        adj[0].push(x);
        adj[1].push(x);
        adj[x].push(0);
        adj[x].push(1);
    }
    Aux { adj, arc, tail, mate }
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    mate: &'a [usize],
    parent: Vec<usize>,
    base: Vec<usize>,
    outer: Vec<bool>,
}

impl Search<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize, blossom: &mut [bool]) {
        while self.base[v] != b {
            blossom[self.base[v]] = true;
            blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Returns the exposed vertex reached, or `None` when the search dies out.
    fn run(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.outer[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for i in 0..self.adj[v].len() {
                let to = self.adj[v][i];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    let mut blossom = vec![false; n];
                    self.mark_path(v, cur, to, &mut blossom);
                    self.mark_path(to, cur, v, &mut blossom);
                    for x in 0..n {
                        if blossom[self.base[x]] {
                            self.base[x] = cur;
                            if !self.outer[x] {
                                self.outer[x] = true;
                                queue.push_back(x);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.outer[m] = true;
                    queue.push_back(m);
                }
            }
        }
        None
    }
}

/// Searches the residual graph `g` for a regular source–sink path.
pub fn find_regular_path(g: &SkGraph, seed: Option<u64>) -> RegularSearch {
    let mut aux = build(g);
    if let Some(seed) = seed {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for list in aux.adj.iter_mut() {
            list.shuffle(&mut rng);
        }
    }
    let n = aux.adj.len();
    let mut s =
        Search { adj: &aux.adj, mate: &aux.mate, parent: vec![NONE; n], base: (0..n).collect(), outer: vec![false; n] };
    let mut reach = vec![false; g.num_nodes()];
    match s.run(0) {
        Some(end) => {
            debug_assert_eq!(end, 1);
            let mut seq = Vec::new();
            let mut v = end;
            loop {
                let pv = s.parent[v];
                seq.push(pv);
                if pv == 0 {
                    break;
                }
                let m = aux.mate[pv];
                seq.push(m);
                v = m;
            }
            // `seq` runs back from the sink: y_k, x_k, ..., y_1, x_1, root.
            seq.pop();
            seq.reverse();
            let arcs: Vec<usize> = seq.chunks(2).map(|p| aux.arc[p[0]]).collect();
            RegularSearch { path: Some(shortcut(g, &arcs)), reach }
        }
        None => {
            reach[g.source] = true;
            for x in 2..n {
                if s.outer[x] {
                    reach[g.mate(aux.tail[x])] = true;
                }
            }
            RegularSearch { path: None, reach }
        }
    }
}

/// Removes cycles from an arc walk from the source, stopping at the sink.
fn shortcut(g: &SkGraph, walk: &[usize]) -> Vec<usize> {
    let mut pos = vec![NONE; g.num_nodes()];
    let mut out: Vec<usize> = Vec::new();
    pos[g.source] = 0;
    for &a in walk {
        let h = g.arcs[a].head;
        if pos[h] != NONE {
            for &b in &out[pos[h]..] {
                pos[g.arcs[b].head] = NONE;
            }
            out.truncate(pos[h]);
            pos[h] = out.len();
            continue;
        }
        out.push(a);
        pos[h] = out.len();
        if h == g.sink() {
            break;
        }
    }
    out
}
