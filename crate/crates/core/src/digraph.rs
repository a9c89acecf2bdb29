//! Bipartite digraphs, the out-neighbourhood condition `|T| ≤ |N⁺(T)|` and
//! the pairing of `X` with `Y` inside strongly connected components.
//!
//! Vertices are numbered `0..|X|` for `X` followed by `|X|..|X|+|Y|` for `Y`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteDigraph {
    names: Vec<String>,
    nx: usize,
    out: Vec<Vec<usize>>,
}

impl BipartiteDigraph {
    /// Builds a digraph from vertex names and named edges. Edges must cross
    /// between the two sides; duplicates are merged.
    pub fn new(x: &[String], y: &[String], edges: &[(String, String)]) -> Result<BipartiteDigraph> {
        let mut ids = HashMap::new();
        for (k, name) in x.iter().chain(y).enumerate() {
            if ids.insert(name.as_str(), k).is_some() {
                return Err(Error::InvalidInput(format!("vertex {name:?} declared twice")));
            }
        }
        let lookup = |s: &str| ids.get(s).copied().ok_or_else(|| Error::UnknownVertex(s.to_string()));
        let mut id_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            id_edges.push((lookup(a)?, lookup(b)?));
        }
        let names = x.iter().chain(y).cloned().collect();
        Self::build(names, x.len(), &id_edges)
    }

    /// Vertices named `x1..xn`, `y1..ym`; edges given by vertex id.
    pub fn from_ids(nx: usize, ny: usize, edges: &[(usize, usize)]) -> Result<BipartiteDigraph> {
        let names = (1..=nx).map(|i| format!("x{i}")).chain((1..=ny).map(|j| format!("y{j}"))).collect();
        Self::build(names, nx, edges)
    }

    fn build(names: Vec<String>, nx: usize, edges: &[(usize, usize)]) -> Result<BipartiteDigraph> {
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::UnknownVertex(format!("vertex id {}", a.max(b))));
            }
            if (a < nx) == (b < nx) {
                return Err(Error::InvalidInput(format!(
                    "edge {} -> {} stays inside one side",
                    names[a], names[b]
                )));
            }
            out[a].push(b);
        }
        for o in &mut out {
            o.sort_unstable();
            o.dedup();
        }
        Ok(BipartiteDigraph { names, nx, out })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.names.len() - self.nx
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn is_x(&self, v: usize) -> bool {
        v < self.nx
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, o)| o.iter().map(move |&b| (a, b)))
            .collect()
    }

    /// `N⁺(T)`, sorted.
    pub fn out_neighborhood(&self, t: &[usize]) -> Result<Vec<usize>> {
        let mut hit = vec![false; self.num_vertices()];
        for &v in t {
            if v >= self.num_vertices() {
                return Err(Error::UnknownVertex(format!("vertex id {v}")));
            }
            for &w in &self.out[v] {
                hit[w] = true;
            }
        }
        Ok((0..hit.len()).filter(|&w| hit[w]).collect())
    }

    pub fn out_neighborhood_names(&self, t: &[&str]) -> Result<Vec<String>> {
        let ids = t
            .iter()
            .map(|s| self.vertex(s).ok_or_else(|| Error::UnknownVertex(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.out_neighborhood(&ids)?.into_iter().map(|v| self.names[v].clone()).collect())
    }

    /// Whether a directed path leads from `from` to `to` (breadth-first).
    pub fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for &w in &self.out[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Strongly connected component id of every vertex (Tarjan). Ids are
    /// assigned in order of completion.
    pub fn scc(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // explicit call stack of (vertex, next successor position)
            let mut calls = vec![(root, 0usize)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
                if let Some(&w) = self.out[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
        comp
    }
}

/// How [`hall_condition`] checks the subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HallMode {
    /// Every subset of `X` and every subset of `Y`.
    BruteForce,
    /// Maximum matchings in both directions.
    Matching,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallResult {
    pub holds: bool,
    /// A set `T` with `|T| > |N⁺(T)|` when the condition fails.
    pub witness: Option<Vec<usize>>,
}

/// `|T| ≤ |N⁺(T)|` for every vertex set `T`. Because `N⁺` of an `X`-set lies
/// in `Y` and vice versa, it is enough to test subsets of each side.
pub fn hall_condition(d: &BipartiteDigraph, mode: HallMode, caps: &Caps) -> Result<HallResult> {
    match mode {
        HallMode::BruteForce => hall_brute_force(d, caps),
        HallMode::Matching => Ok(hall_matching(d)),
    }
}

fn hall_brute_force(d: &BipartiteDigraph, caps: &Caps) -> Result<HallResult> {
    let n = d.num_vertices();
    if n > caps.hall_max_vertices {
        return Err(Error::cap("brute-force Hall check vertices", n as u128, caps.hall_max_vertices as u128));
    }
    let masks: Vec<u64> = (0..n)
        .map(|v| d.out[v].iter().fold(0u64, |m, &w| m | (1u64 << w)))
        .collect();
    for (start, len) in [(0, d.nx), (d.nx, d.ny())] {
        for s in 0u64..(1u64 << len) {
            let mut nb = 0u64;
            for k in 0..len {
                if s >> k & 1 == 1 {
                    nb |= masks[start + k];
                }
            }
            if s.count_ones() > nb.count_ones() {
                let t = (0..len).filter(|&k| s >> k & 1 == 1).map(|k| start + k).collect();
                return Ok(HallResult {
                    holds: false,
                    witness: Some(t),
                });
            }
        }
    }
    Ok(HallResult {
        holds: true,
        witness: None,
    })
}

/// Maximum matching of `left` into `right` with lowest-index augmenting
/// order. `adj[i]` lists positions in `right`. Returns `mate_of_left`.
fn kuhn(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], mate_r: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if mate_r[v].is_none_or(|w| augment(w, adj, seen, mate_r)) {
                mate_r[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut mate_r: Vec<Option<usize>> = vec![None; n_right];
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        augment(u, adj, &mut seen, &mut mate_r);
    }
    let mut mate_l = vec![None; adj.len()];
    for (v, m) in mate_r.iter().enumerate() {
        if let Some(u) = *m {
            mate_l[u] = Some(v);
        }
    }
    mate_l
}

/// On a maximum matching that leaves some left vertex free, the left
/// vertices reachable from free ones by alternating paths have too few
/// neighbours.
fn deficient_set(adj: &[Vec<usize>], n_right: usize, mate_l: &[Option<usize>]) -> Option<Vec<usize>> {
    let free = mate_l.iter().position(Option::is_none)?;
    let mut mate_r = vec![None; n_right];
    for (u, m) in mate_l.iter().enumerate() {
        if let Some(v) = *m {
            mate_r[v] = Some(u);
        }
    }
    let mut in_t = vec![false; adj.len()];
    let mut seen_r = vec![false; n_right];
    let mut queue = VecDeque::from([free]);
    in_t[free] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen_r[v] {
                seen_r[v] = true;
                let w = mate_r[v].expect("maximum matching saturates neighbours of a free vertex");
                if !in_t[w] {
                    in_t[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    Some((0..adj.len()).filter(|&u| in_t[u]).collect())
}

fn hall_matching(d: &BipartiteDigraph) -> HallResult {
    let nx = d.nx;
    let x_adj: Vec<Vec<usize>> = (0..nx).map(|v| d.out[v].iter().map(|&w| w - nx).collect()).collect();
    let y_adj: Vec<Vec<usize>> = (nx..d.num_vertices()).map(|v| d.out[v].clone()).collect();
    let mx = kuhn(&x_adj, d.ny());
    if let Some(t) = deficient_set(&x_adj, d.ny(), &mx) {
        return HallResult {
            holds: false,
            witness: Some(t),
        };
    }
    let my = kuhn(&y_adj, nx);
    if let Some(t) = deficient_set(&y_adj, nx, &my) {
        return HallResult {
            holds: false,
            witness: Some(t.into_iter().map(|k| k + nx).collect()),
        };
    }
    HallResult {
        holds: true,
        witness: None,
    }
}

/// `|T| > |N⁺(T)|`.
pub fn is_violating_set(d: &BipartiteDigraph, t: &[usize]) -> bool {
    let mut t: Vec<usize> = t.to_vec();
    t.sort_unstable();
    t.dedup();
    d.out_neighborhood(&t).is_ok_and(|nb| t.len() > nb.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsOutcome {
    /// `(x, y)` vertex-id pairs, ordered by `x`, each pair mutually reachable.
    Pairing(Vec<(usize, usize)>),
    /// The condition fails on this vertex set.
    HallFailure(Vec<usize>),
}

/// When the out-neighbourhood condition holds, `|X| = |Y|` and `X` can be
/// matched with `Y` inside strongly connected components. Returns that
/// matching, or the violating set.
pub fn ks_relabel(d: &BipartiteDigraph) -> Result<KsOutcome> {
    let hall = hall_matching(d);
    if let Some(t) = hall.witness {
        return Ok(KsOutcome::HallFailure(t));
    }
    if d.nx != d.ny() {
        return Err(Error::TheoremViolation(format!(
            "condition holds but |X| = {} and |Y| = {}",
            d.nx,
            d.ny()
        )));
    }
    let comp = d.scc();
    let nx = d.nx;
    let adj: Vec<Vec<usize>> = (0..nx)
        .map(|x| (0..d.ny()).filter(|&y| comp[x] == comp[nx + y]).collect())
        .collect();
    let mate = kuhn(&adj, d.ny());
    let mut pairs = Vec::with_capacity(nx);
    for (x, m) in mate.iter().enumerate() {
        match m {
            Some(y) => pairs.push((x, nx + y)),
            None => {
                return Err(Error::TheoremViolation(format!(
                    "condition holds but {} has no partner in its strong component",
                    d.name(x)
                )))
            }
        }
    }
    Ok(KsOutcome::Pairing(pairs))
}

/// A pairing is valid when it is a perfect matching of `X` with `Y` and
/// every pair is mutually reachable.
pub fn validate_pairing(d: &BipartiteDigraph, pairs: &[(usize, usize)]) -> bool {
    if pairs.len() != d.nx || d.nx != d.ny() {
        return false;
    }
    let mut used_x = vec![false; d.nx];
    let mut used_y = vec![false; d.ny()];
    for &(x, y) in pairs {
        if x >= d.nx || y < d.nx || y >= d.num_vertices() || used_x[x] || used_y[y - d.nx] {
            return false;
        }
        used_x[x] = true;
        used_y[y - d.nx] = true;
        if !(d.reachable(x, y) && d.reachable(y, x)) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn edges(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn neighbourhoods() {
        let d = BipartiteDigraph::new(&names(&["x1"]), &names(&["y1"]), &edges(&[("x1", "y1"), ("y1", "x1")])).unwrap();
        assert!(d.out_neighborhood(&[]).unwrap().is_empty());
        assert_eq!(d.out_neighborhood_names(&["x1"]).unwrap(), names(&["y1"]));
        let d = BipartiteDigraph::new(
            &names(&["x1", "x2"]),
            &names(&["y1"]),
            &edges(&[("x1", "y1"), ("x2", "y1")]),
        )
        .unwrap();
        assert_eq!(d.out_neighborhood_names(&["x1", "x2"]).unwrap(), names(&["y1"]));
        assert!(matches!(d.out_neighborhood_names(&["z"]), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn rejects_same_side_edges() {
        let r = BipartiteDigraph::new(&names(&["x1", "x2"]), &names(&[]), &edges(&[("x1", "x2")]));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn hall_examples() {
        let caps = Caps::default();
        let d = BipartiteDigraph::from_ids(1, 1, &[(0, 1), (1, 0)]).unwrap();
        for mode in [HallMode::BruteForce, HallMode::Matching] {
            assert!(hall_condition(&d, mode, &caps).unwrap().holds);
        }
        let bad = BipartiteDigraph::from_ids(2, 1, &[(0, 2), (1, 2), (2, 0), (2, 1)]).unwrap();
        for mode in [HallMode::BruteForce, HallMode::Matching] {
            let r = hall_condition(&bad, mode, &caps).unwrap();
            assert!(!r.holds);
            assert_eq!(r.witness, Some(vec![0, 1]));
        }
        let empty = BipartiteDigraph::from_ids(0, 0, &[]).unwrap();
        assert!(hall_condition(&empty, HallMode::BruteForce, &caps).unwrap().holds);
        assert_eq!(ks_relabel(&bad).unwrap(), KsOutcome::HallFailure(vec![0, 1]));
    }

    #[test]
    fn brute_force_cap() {
        let d = BipartiteDigraph::from_ids(11, 10, &[]).unwrap();
        assert!(matches!(
            hall_condition(&d, HallMode::BruteForce, &Caps::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn relabel_examples() {
        let d = BipartiteDigraph::from_ids(2, 2, &[(0, 2), (2, 0), (1, 3), (3, 1)]).unwrap();
        assert_eq!(ks_relabel(&d).unwrap(), KsOutcome::Pairing(vec![(0, 2), (1, 3)]));
        // x1 -> y1 -> x2 -> y2 -> x1
        let c = BipartiteDigraph::from_ids(2, 2, &[(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap();
        let KsOutcome::Pairing(p) = ks_relabel(&c).unwrap() else { panic!() };
        assert!(validate_pairing(&c, &p));
        assert_eq!(c.scc().iter().collect::<std::collections::BTreeSet<_>>().len(), 1);
    }
}
