//! Odd barriers certify maximality of bidirected flows.

use crate::bdgraph::{flip, BdGraph, Dir};

/// `(flipped graph | A, M; B_1..B_k)` with its capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddBarrier {
    /// Nodes flipped to obtain the equivalent graph the conditions refer to.
    pub flip: Vec<usize>,
    pub a: Vec<usize>,
    pub m: Vec<usize>,
    pub b: Vec<Vec<usize>>,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BarrierError {
    #[error("parts do not partition the nodes")]
    Partition,
    #[error("source is not in A")]
    Source,
    #[error("c[→A, B_{0}] is even")]
    EvenPart(usize),
    #[error("capacity between B_{0} and B_{1}")]
    BetweenParts(usize, usize),
    #[error("capacity between B_{0} and M")]
    PartToM(usize),
    #[error("flow value {0} differs from capacity {1}")]
    Value(i64, i64),
    #[error("slackness fails: {0}")]
    Slackness(String),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    M,
    B(usize),
}

/// Canonical barrier from the nodes reachable by regular paths after a
/// maximum flow. A node whose plain copy is reachable but not its mate, or
/// the reverse, lies in `A`; the latter kind is flipped. Nodes with both
/// copies reachable form the `B` parts, one per connected component; the
/// rest is `M`.
pub fn extract_barrier(g: &BdGraph, reach: &[bool]) -> OddBarrier {
    let n = g.num_nodes();
    let fwd: Vec<bool> = (0..n).map(|v| reach[v]).collect();
    let bwd: Vec<bool> = (0..n).map(|v| reach[v + n]).collect();
    let a: Vec<usize> = (0..n).filter(|&v| fwd[v] != bwd[v]).collect();
    let m: Vec<usize> = (0..n).filter(|&v| !fwd[v] && !bwd[v]).collect();
    let flipped: Vec<usize> = (0..n).filter(|&v| bwd[v] && !fwd[v]).collect();
    let both: Vec<bool> = (0..n).map(|v| fwd[v] && bwd[v]).collect();
    let mut comp = vec![usize::MAX; n];
    let mut parts = Vec::new();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges.iter().filter(|e| e.cap > 0) {
        let (u, v) = (e.ends[0].0, e.ends[1].0);
        if both[u] && both[v] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for r in 0..n {
        if !both[r] || comp[r] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut part = vec![r];
        comp[r] = id;
        let mut i = 0;
        while i < part.len() {
            let x = part[i];
            i += 1;
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    part.push(y);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    let mut out = OddBarrier { flip: flipped, a, m, b: parts, capacity: 0 };
    out.capacity = barrier_capacity(g, &out).unwrap_or(i64::MIN);
    out
}

fn sides(g: &BdGraph, b: &OddBarrier) -> Result<Vec<Side>, BarrierError> {
    let mut side: Vec<Option<Side>> = vec![None; g.num_nodes()];
    let mut put = |v: usize, s: Side| -> Result<(), BarrierError> {
        match side.get_mut(v) {
            Some(slot @ None) => {
                *slot = Some(s);
                Ok(())
            }
            _ => Err(BarrierError::Partition),
        }
    };
    for &v in &b.a {
        put(v, Side::A)?;
    }
    for &v in &b.m {
        put(v, Side::M)?;
    }
    for (i, part) in b.b.iter().enumerate() {
        for &v in part {
            put(v, Side::B(i))?;
        }
    }
    side.into_iter().map(|s| s.ok_or(BarrierError::Partition)).collect()
}

/// `2c[→A, ←A] + c[→A] − k` in the flipped graph.
pub fn barrier_capacity(g: &BdGraph, b: &OddBarrier) -> Result<i64, BarrierError> {
    let side = sides(g, b)?;
    let h = flip(g, &b.flip).map_err(|_| BarrierError::Source)?;
    let mut cap: i64 = 0;
    for e in &h.edges {
        let [(u, du), (v, dv)] = e.ends;
        let c = e.cap as i64;
        match (side[u] == Side::A, side[v] == Side::A) {
            (true, true) if du == Dir::Leave && dv == Dir::Leave => cap += 2 * c,
            (true, false) if du == Dir::Leave => cap += c,
            (false, true) if dv == Dir::Leave => cap += c,
            _ => {}
        }
    }
    Ok(cap - b.b.len() as i64)
}

/// Checks the barrier conditions and, given a flow, that it attains the
/// capacity with the matching slackness pattern.
pub fn verify_barrier(g: &BdGraph, b: &OddBarrier, flow: Option<&[u64]>) -> Result<(), BarrierError> {
    let side = sides(g, b)?;
    if side[g.source] != Side::A || b.flip.contains(&g.source) {
        return Err(BarrierError::Source);
    }
    let h = flip(g, &b.flip).map_err(|_| BarrierError::Source)?;
    let k = b.b.len();
    let mut to_b = vec![0u64; k];
    // Flow leaving and entering A towards each part.
    let mut out_b = vec![0u64; k];
    let mut in_b = vec![0u64; k];
    for (i, e) in h.edges.iter().enumerate() {
        let [(u, du), (v, dv)] = e.ends;
        let x = flow.map(|f| f[i]).unwrap_or(0);
        match (side[u], side[v]) {
            (Side::B(i), Side::B(j)) if i != j && e.cap > 0 => return Err(BarrierError::BetweenParts(i, j)),
            (Side::B(i), Side::M) | (Side::M, Side::B(i)) if e.cap > 0 => return Err(BarrierError::PartToM(i)),
            (Side::A, Side::A) => {
                if flow.is_some() {
                    if du == Dir::Leave && dv == Dir::Leave && x != e.cap {
                        return Err(BarrierError::Slackness("edge leaving A twice is not saturated".into()));
                    }
                    if du == Dir::Enter && dv == Dir::Enter && x != 0 {
                        return Err(BarrierError::Slackness("edge entering A twice carries flow".into()));
                    }
                }
                continue;
            }
            _ => {}
        }
        let (da, other) = match (side[u], side[v]) {
            (Side::A, o) => (du, o),
            (o, Side::A) => (dv, o),
            _ => continue,
        };
        match other {
            Side::B(j) => {
                if da == Dir::Leave {
                    to_b[j] += e.cap;
                    out_b[j] += x;
                } else {
                    in_b[j] += x;
                }
            }
            Side::M if flow.is_some() => {
                if da == Dir::Leave && x != e.cap {
                    return Err(BarrierError::Slackness("edge from A to M is not saturated".into()));
                }
                if da == Dir::Enter && x != 0 {
                    return Err(BarrierError::Slackness("edge from M into A carries flow".into()));
                }
            }
            _ => {}
        }
    }
    if let Some(j) = (0..k).find(|&j| to_b[j].is_multiple_of(2)) {
        return Err(BarrierError::EvenPart(j));
    }
    let cap = barrier_capacity(g, b)?;
    if let Some(f) = flow {
        for j in 0..k {
            let tight = (out_b[j] + 1 == to_b[j] && in_b[j] == 0) || (out_b[j] == to_b[j] && in_b[j] == 1);
            if !tight {
                return Err(BarrierError::Slackness(format!("part {j} is not tight")));
            }
        }
        let val = crate::skflow::sk_value(&crate::skflow::bd_to_sk(g), f) as i64;
        if val != cap {
            return Err(BarrierError::Value(val, cap));
        }
    }
    Ok(())
}
