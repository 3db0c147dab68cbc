//! Finite undirected multigraphs (loops and parallel edges allowed) and the
//! forest notions the coloring tests are built from.
//!
//! A cycle is a closed sequence of [`Dart`]s. It is *reduced* when no dart is
//! cyclically followed by its own reverse.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::Dsu;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub weight: i64,
}

/// Undirected multigraph with integer edge weights (zero unless set).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub node_count: usize,
    pub edges: Vec<GraphEdge>,
}

pub type WeightedGraph = Graph;

/// An edge traversed in a chosen direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn reverse(self) -> Dart {
        Dart { edge: self.edge, forward: !self.forward }
    }

    fn index(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }
}

/// A selection of nodes and edges of a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl Subgraph {
    pub fn new(nodes: impl IntoIterator<Item = usize>, edges: impl IntoIterator<Item = usize>) -> Self {
        Subgraph { nodes: nodes.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn whole(g: &Graph) -> Self {
        Subgraph::new(0..g.node_count, 0..g.edges.len())
    }

    pub fn contains_cycle(&self, cycle: &[Dart]) -> bool {
        cycle.iter().all(|d| self.edges.contains(&d.edge))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} of the subgraph has an endpoint outside its node set")]
    NotSubgraph(usize),
    #[error("subgraph refers to a node or edge that does not exist")]
    OutOfRange,
}

/// Evidence attached to a failing graph-level verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphWitness {
    /// A reduced cycle of the graph.
    Cycle(Vec<Dart>),
    /// Edges (original ids) forming a cycle in a quotient graph.
    QuotientCycle(Vec<usize>),
    /// Two nodes of the subgraph in one component of the graph that are not
    /// joined inside the subgraph, with a connecting path in the graph.
    Disconnected { a: usize, b: usize, path: Vec<Dart> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVerdict {
    pub pass: bool,
    pub witness: Option<GraphWitness>,
}

impl GraphVerdict {
    fn ok() -> Self {
        GraphVerdict { pass: true, witness: None }
    }

    fn fail(w: GraphWitness) -> Self {
        GraphVerdict { pass: false, witness: Some(w) }
    }
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph { node_count, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        self.add_weighted_edge(u, v, 0)
    }

    pub fn add_weighted_edge(&mut self, u: usize, v: usize, weight: i64) -> usize {
        assert!(u < self.node_count && v < self.node_count, "edge endpoint out of range");
        self.edges.push(GraphEdge { u, v, weight });
        self.edges.len() - 1
    }

    pub fn tail(&self, d: Dart) -> usize {
        let e = self.edges[d.edge];
        if d.forward {
            e.u
        } else {
            e.v
        }
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail(d.reverse())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.node_count as i64 - self.edges.len() as i64
    }

    /// Darts leaving each node, restricted to `edges` when given.
    fn out_darts(&self, edges: Option<&BTreeSet<usize>>) -> Vec<Vec<Dart>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, e) in self.edges.iter().enumerate() {
            if edges.is_some_and(|s| !s.contains(&i)) {
                continue;
            }
            adj[e.u].push(Dart { edge: i, forward: true });
            adj[e.v].push(Dart { edge: i, forward: false });
        }
        adj
    }

    /// Component label per node (smallest node index of the component).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut dsu = Dsu::new(self.node_count);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        (0..self.node_count).map(|v| dsu.find(v)).collect()
    }

    pub fn component_count(&self) -> usize {
        let labels = self.component_labels();
        (0..self.node_count).filter(|&v| labels[v] == v).count()
    }

    /// Shortest path from any node of `from` to any node of `to` using only
    /// `edges` (all edges when `None`).
    pub fn shortest_path(
        &self,
        from: &BTreeSet<usize>,
        to: &BTreeSet<usize>,
        edges: Option<&BTreeSet<usize>>,
    ) -> Option<(usize, Vec<Dart>)> {
        let adj = self.out_darts(edges);
        let mut via: Vec<Option<Dart>> = vec![None; self.node_count];
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::new();
        for &s in from {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            if to.contains(&x) {
                let mut path = Vec::new();
                let mut cur = x;
                while let Some(d) = via[cur] {
                    path.push(d);
                    cur = self.tail(d);
                }
                path.reverse();
                return Some((cur, path));
            }
            for &d in &adj[x] {
                let y = self.head(d);
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some(d);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// A simple cycle among `edges` (all when `None`), if any.
    pub fn find_cycle(&self, edges: Option<&BTreeSet<usize>>) -> Option<Vec<Dart>> {
        let mut dsu = Dsu::new(self.node_count);
        let mut forest = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if edges.is_some_and(|s| !s.contains(&i)) {
                continue;
            }
            if dsu.union(e.u, e.v) {
                forest.insert(i);
                continue;
            }
            let (_, back) = self
                .shortest_path(&BTreeSet::from([e.v]), &BTreeSet::from([e.u]), Some(&forest))
                .expect("endpoints are joined in the forest");
            let mut cycle = vec![Dart { edge: i, forward: true }];
            cycle.extend(back);
            return Some(cycle);
        }
        None
    }

    pub fn is_closed_walk(&self, walk: &[Dart]) -> bool {
        !walk.is_empty()
            && (0..walk.len()).all(|i| self.head(walk[i]) == self.tail(walk[(i + 1) % walk.len()]))
    }

    pub fn is_reduced_cycle(&self, walk: &[Dart]) -> bool {
        self.is_closed_walk(walk)
            && (0..walk.len()).all(|i| walk[(i + 1) % walk.len()] != walk[i].reverse())
    }

    pub fn cycle_weight(&self, walk: &[Dart]) -> i64 {
        walk.iter().map(|d| self.edges[d.edge].weight).sum()
    }

    pub fn check_subgraph(&self, sub: &Subgraph) -> Result<(), GraphError> {
        if sub.nodes.iter().any(|&v| v >= self.node_count) || sub.edges.iter().any(|&e| e >= self.edges.len()) {
            return Err(GraphError::OutOfRange);
        }
        for &e in &sub.edges {
            let ed = self.edges[e];
            if !sub.nodes.contains(&ed.u) || !sub.nodes.contains(&ed.v) {
                return Err(GraphError::NotSubgraph(e));
            }
        }
        Ok(())
    }
}

/// Passes iff the graph has no reduced cycle; the witness is a simple cycle.
pub fn is_forest(g: &Graph) -> GraphVerdict {
    match g.find_cycle(None) {
        None => GraphVerdict::ok(),
        Some(c) => GraphVerdict::fail(GraphWitness::Cycle(c)),
    }
}

struct CycleSearch<'a> {
    g: &'a Graph,
    adj: Vec<Vec<Dart>>,
    bound: i64,
    max_len: usize,
    outside: Option<&'a BTreeSet<usize>>,
    prune_weight: bool,
    stop_at_first: bool,
    found: Vec<Vec<Dart>>,
}

impl CycleSearch<'_> {
    fn run(&mut self) {
        let mut darts: Vec<Dart> = (0..self.g.edges.len())
            .flat_map(|e| [Dart { edge: e, forward: true }, Dart { edge: e, forward: false }])
            .collect();
        darts.sort_by_key(|d| d.index());
        let mut used = vec![false; 2 * self.g.edges.len()];
        for d0 in darts {
            used[d0.index()] = true;
            let mut path = vec![d0];
            self.extend(d0, &mut path, &mut used, self.g.edges[d0.edge].weight);
            used[d0.index()] = false;
            if self.stop_at_first && !self.found.is_empty() {
                return;
            }
        }
    }

    fn extend(&mut self, d0: Dart, path: &mut Vec<Dart>, used: &mut [bool], weight: i64) {
        if self.prune_weight && weight >= self.bound {
            return;
        }
        let last = *path.last().unwrap();
        let start = self.g.tail(d0);
        if self.g.head(last) == start
            && d0 != last.reverse()
            && weight < self.bound
            && self.outside.is_none_or(|s| path.iter().any(|d| !s.contains(&d.edge)))
        {
            self.found.push(path.clone());
            if self.stop_at_first {
                return;
            }
        }
        if path.len() >= self.max_len {
            return;
        }
        let here = self.g.head(last);
        for i in 0..self.adj[here].len() {
            let d = self.adj[here][i];
            // d0 is the smallest dart of the cycle, so every rotation class is
            // produced once.
            if d.index() <= d0.index() || used[d.index()] || d == last.reverse() {
                continue;
            }
            used[d.index()] = true;
            path.push(d);
            self.extend(d0, path, used, weight + self.g.edges[d.edge].weight);
            path.pop();
            used[d.index()] = false;
            if self.stop_at_first && !self.found.is_empty() {
                return;
            }
        }
    }
}

/// Every reduced cycle without repeated darts, of length at most `max_len`
/// and total weight `< bound`, one per rotation class. Exponential; meant as
/// a definitional cross-check.
pub fn reduced_cycles_bounded(g: &Graph, bound: i64, max_len: usize) -> Vec<Vec<Dart>> {
    let prune_weight = g.edges.iter().all(|e| e.weight >= 0);
    let mut s = CycleSearch {
        g,
        adj: g.out_darts(None),
        bound,
        max_len,
        outside: None,
        prune_weight,
        stop_at_first: false,
        found: Vec::new(),
    };
    s.run();
    s.found
}

/// First reduced cycle of weight `< bound` and length `<= max_len` that uses
/// at least one edge outside `inside` (any cycle when `inside` is `None`).
pub fn find_reduced_cycle_below(
    g: &Graph,
    bound: i64,
    max_len: usize,
    inside: Option<&BTreeSet<usize>>,
) -> Option<Vec<Dart>> {
    let prune_weight = g.edges.iter().all(|e| e.weight >= 0);
    let mut s = CycleSearch {
        g,
        adj: g.out_darts(None),
        bound,
        max_len,
        outside: inside,
        prune_weight,
        stop_at_first: true,
        found: Vec::new(),
    };
    s.run();
    s.found.pop()
}

/// Connected components of a subgraph, as (node set, edge set) pairs.
fn sub_components(g: &Graph, sub: &Subgraph) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    let mut dsu = Dsu::new(g.node_count);
    for &e in &sub.edges {
        dsu.union(g.edges[e].u, g.edges[e].v);
    }
    let mut out: Vec<(usize, BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    for &v in &sub.nodes {
        let r = dsu.find(v);
        match out.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1.insert(v);
            }
            None => out.push((r, BTreeSet::from([v]), BTreeSet::new())),
        }
    }
    for &e in &sub.edges {
        let r = dsu.find(g.edges[e].u);
        out.iter_mut().find(|c| c.0 == r).expect("endpoint in subgraph").2.insert(e);
    }
    out.into_iter().map(|(_, n, e)| (n, e)).collect()
}

/// A closed reduced walk inside the component (`nodes`, `edges`) that starts
/// and ends at `start`. The component must contain a cycle.
fn closed_walk_through(g: &Graph, nodes: &BTreeSet<usize>, edges: &BTreeSet<usize>, start: usize) -> Vec<Dart> {
    let cycle = g.find_cycle(Some(edges)).expect("component contains a cycle");
    let on_cycle: BTreeSet<usize> = cycle.iter().map(|d| g.tail(*d)).collect();
    let (_, approach) = g
        .shortest_path(&BTreeSet::from([start]), &on_cycle, Some(edges))
        .expect("component is connected");
    debug_assert!(nodes.contains(&start));
    let c0 = approach.last().map_or(start, |d| g.head(*d));
    let k = cycle.iter().position(|d| g.tail(*d) == c0).expect("c0 on cycle");
    let mut walk = approach.clone();
    walk.extend(cycle[k..].iter().chain(cycle[..k].iter()));
    walk.extend(approach.iter().rev().map(|d| d.reverse()));
    walk
}

fn component_has_cycle(nodes: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> bool {
    edges.len() >= nodes.len()
}

/// Contracts each component of `sub` separately and drops the subgraph's
/// edges. Returns the contracted graph with node and edge maps.
fn contract_components(g: &Graph, comps: &[(BTreeSet<usize>, BTreeSet<usize>)], sub: &Subgraph) -> (Graph, Vec<usize>, Vec<usize>) {
    let mut node_map = vec![usize::MAX; g.node_count];
    let mut next = 0;
    for (nodes, _) in comps {
        for &v in nodes {
            node_map[v] = next;
        }
        next += 1;
    }
    for v in node_map.iter_mut() {
        if *v == usize::MAX {
            *v = next;
            next += 1;
        }
    }
    let mut q = Graph::new(next);
    let mut edge_map = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if sub.edges.contains(&i) {
            continue;
        }
        q.add_weighted_edge(node_map[e.u], node_map[e.v], e.weight);
        edge_map.push(i);
    }
    (q, node_map, edge_map)
}

/// Lifts a walk in the contracted graph back to `g`, joining consecutive
/// darts by shortest paths inside the contracted components.
fn lift_walk(
    g: &Graph,
    q_walk: &[Dart],
    edge_map: &[usize],
    node_map: &[usize],
    comps: &[(BTreeSet<usize>, BTreeSet<usize>)],
    closed: bool,
) -> Vec<Dart> {
    let lifted: Vec<Dart> = q_walk.iter().map(|d| Dart { edge: edge_map[d.edge], forward: d.forward }).collect();
    let mut out = Vec::new();
    let n = lifted.len();
    for i in 0..n {
        out.push(lifted[i]);
        if i + 1 == n && !closed {
            break;
        }
        let x = g.head(lifted[i]);
        let y = g.tail(lifted[(i + 1) % n]);
        if x != y {
            let c = node_map[x];
            let (_, comp_edges) = &comps[c];
            let (_, p) = g
                .shortest_path(&BTreeSet::from([x]), &BTreeSet::from([y]), Some(comp_edges))
                .expect("nodes lie in one contracted component");
            out.extend(p);
        }
    }
    out
}

/// Every reduced cycle of `g` lies in `sub`. Decided by contracting each
/// component of `sub` to a point: the result must be a forest, and no
/// component of it may contain two contracted components that carry cycles.
pub fn is_relative_forest(g: &Graph, sub: &Subgraph) -> Result<GraphVerdict, GraphError> {
    g.check_subgraph(sub)?;
    let comps = sub_components(g, sub);
    let (q, node_map, edge_map) = contract_components(g, &comps, sub);
    if let Some(qc) = q.find_cycle(None) {
        let cycle = lift_walk(g, &qc, &edge_map, &node_map, &comps, true);
        return Ok(GraphVerdict::fail(GraphWitness::Cycle(cycle)));
    }
    let qlabels = q.component_labels();
    let cyclic: Vec<usize> = (0..comps.len()).filter(|&c| component_has_cycle(&comps[c].0, &comps[c].1)).collect();
    for (i, &a) in cyclic.iter().enumerate() {
        for &b in &cyclic[i + 1..] {
            if qlabels[a] != qlabels[b] {
                continue;
            }
            // alpha gamma beta gamma-bar, with gamma a shortest path in q.
            let (_, q_path) = q
                .shortest_path(&BTreeSet::from([a]), &BTreeSet::from([b]), None)
                .expect("same component of the contraction");
            let gamma = lift_walk(g, &q_path, &edge_map, &node_map, &comps, false);
            let a0 = g.tail(gamma[0]);
            let b0 = g.head(*gamma.last().unwrap());
            let mut walk = closed_walk_through(g, &comps[a].0, &comps[a].1, a0);
            walk.extend(gamma.iter().copied());
            walk.extend(closed_walk_through(g, &comps[b].0, &comps[b].1, b0));
            walk.extend(gamma.iter().rev().map(|d| d.reverse()));
            return Ok(GraphVerdict::fail(GraphWitness::Cycle(walk)));
        }
    }
    Ok(GraphVerdict::ok())
}

/// Relative forest, and each component of `g` meets `sub` in an empty or
/// connected set.
pub fn is_strong_relative_forest(g: &Graph, sub: &Subgraph) -> Result<GraphVerdict, GraphError> {
    let rel = is_relative_forest(g, sub)?;
    if !rel.pass {
        return Ok(rel);
    }
    let comps = sub_components(g, sub);
    let labels = g.component_labels();
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let a = *comps[i].0.iter().next().unwrap();
            let b = *comps[j].0.iter().next().unwrap();
            if labels[a] == labels[b] {
                let (_, path) = g
                    .shortest_path(&BTreeSet::from([a]), &BTreeSet::from([b]), None)
                    .expect("same component");
                return Ok(GraphVerdict::fail(GraphWitness::Disconnected { a, b, path }));
            }
        }
    }
    Ok(GraphVerdict::ok())
}

/// The graph with all of `sub` identified to a single node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub graph: Graph,
    /// Quotient node of each original node.
    pub node_map: Vec<usize>,
    /// Original edge of each quotient edge.
    pub edge_map: Vec<usize>,
    /// The merged node, absent when `sub` has no nodes.
    pub merged: Option<usize>,
}

/// Nodes outside `sub` keep their relative order; the merged node comes
/// last. With an empty `sub` the graph is returned unchanged.
pub fn quotient_graph(g: &Graph, sub: &Subgraph) -> Result<Quotient, GraphError> {
    g.check_subgraph(sub)?;
    let mut node_map = vec![usize::MAX; g.node_count];
    let mut next = 0;
    for (v, slot) in node_map.iter_mut().enumerate() {
        if !sub.nodes.contains(&v) {
            *slot = next;
            next += 1;
        }
    }
    let merged = if sub.nodes.is_empty() {
        None
    } else {
        for &v in &sub.nodes {
            node_map[v] = next;
        }
        next += 1;
        Some(next - 1)
    };
    let mut graph = Graph::new(next);
    let mut edge_map = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if sub.edges.contains(&i) {
            continue;
        }
        graph.add_weighted_edge(node_map[e.u], node_map[e.v], e.weight);
        edge_map.push(i);
    }
    Ok(Quotient { graph, node_map, edge_map, merged })
}

/// Strong relative forest decided through the quotient `g / sub`.
pub fn is_strong_relative_forest_by_quotient(g: &Graph, sub: &Subgraph) -> Result<GraphVerdict, GraphError> {
    let q = quotient_graph(g, sub)?;
    Ok(match q.graph.find_cycle(None) {
        None => GraphVerdict::ok(),
        Some(c) => GraphVerdict::fail(GraphWitness::QuotientCycle(c.iter().map(|d| q.edge_map[d.edge]).collect())),
    })
}

/// A cyclically reduced closed walk using at least one edge outside
/// `inside`, found by breadth-first search in the non-backtracking dart
/// graph (dart `d` may be followed by any dart leaving its head except its
/// reverse).
pub fn reduced_cycle_outside(g: &Graph, inside: &BTreeSet<usize>) -> Option<Vec<Dart>> {
    let adj = g.out_darts(None);
    let id = |d: Dart| 2 * d.edge + usize::from(!d.forward);
    for e in (0..g.edges.len()).filter(|e| !inside.contains(e)) {
        for forward in [true, false] {
            let d0 = Dart { edge: e, forward };
            let closes = |d: Dart| g.head(d) == g.tail(d0) && d0 != d.reverse();
            let mut prev: Vec<Option<Dart>> = vec![None; 2 * g.edges.len()];
            let mut seen = vec![false; 2 * g.edges.len()];
            seen[id(d0)] = true;
            let mut queue = std::collections::VecDeque::from([d0]);
            while let Some(d) = queue.pop_front() {
                if closes(d) {
                    let mut walk = vec![d];
                    let mut at = d;
                    while let Some(p) = prev[id(at)] {
                        walk.push(p);
                        at = p;
                    }
                    walk.reverse();
                    return Some(walk);
                }
                for &n in &adj[g.head(d)] {
                    if n != d.reverse() && !seen[id(n)] {
                        seen[id(n)] = true;
                        prev[id(n)] = Some(d);
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    None
}

/// Definitional relative forest check: no cyclically reduced closed walk
/// leaves `sub`. Independent of the contraction argument.
pub fn is_relative_forest_by_search(g: &Graph, sub: &Subgraph) -> Result<GraphVerdict, GraphError> {
    g.check_subgraph(sub)?;
    Ok(match reduced_cycle_outside(g, &sub.edges) {
        None => GraphVerdict::ok(),
        Some(c) => GraphVerdict::fail(GraphWitness::Cycle(c)),
    })
}

/// Definitional strong check: the dart search plus a direct connectivity
/// count of `C ∩ sub` per component `C`.
pub fn is_strong_relative_forest_by_search(g: &Graph, sub: &Subgraph) -> Result<GraphVerdict, GraphError> {
    let rel = is_relative_forest_by_search(g, sub)?;
    if !rel.pass {
        return Ok(rel);
    }
    let labels = g.component_labels();
    let mut dsu = Dsu::new(g.node_count);
    for &e in &sub.edges {
        dsu.union(g.edges[e].u, g.edges[e].v);
    }
    let nodes: Vec<usize> = sub.nodes.iter().copied().collect();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if labels[a] == labels[b] && dsu.find(a) != dsu.find(b) {
                let (_, path) = g.shortest_path(&BTreeSet::from([a]), &BTreeSet::from([b]), None).unwrap();
                return Ok(GraphVerdict::fail(GraphWitness::Disconnected { a, b, path }));
            }
        }
    }
    Ok(GraphVerdict::ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abc() -> Graph {
        let mut g = Graph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g
    }

    #[test]
    fn forest_examples() {
        assert!(is_forest(&path_abc()).pass);
        let mut lp = Graph::new(1);
        lp.add_edge(0, 0);
        let v = is_forest(&lp);
        assert_eq!(v.witness, Some(GraphWitness::Cycle(vec![Dart { edge: 0, forward: true }])));
        let mut par = Graph::new(2);
        par.add_edge(0, 1);
        par.add_edge(0, 1);
        let Some(GraphWitness::Cycle(c)) = is_forest(&par).witness else { panic!() };
        assert_eq!(c.len(), 2);
        assert!(par.is_reduced_cycle(&c));
    }

    #[test]
    fn bounded_cycles() {
        assert!(reduced_cycles_bounded(&path_abc(), 5, 10).is_empty());
        let mut lp = Graph::new(1);
        lp.add_weighted_edge(0, 0, 0);
        let cs = reduced_cycles_bounded(&lp, 2, 4);
        // the loop itself, once per direction
        assert!(cs.iter().any(|c| c.len() == 1));
        assert!(cs.iter().all(|c| lp.cycle_weight(c) == 0));
        let mut tri = Graph::new(3);
        tri.add_weighted_edge(0, 1, 1);
        tri.add_weighted_edge(1, 2, 1);
        tri.add_weighted_edge(2, 0, 0);
        assert!(reduced_cycles_bounded(&tri, 2, 6).is_empty());
        assert_eq!(reduced_cycles_bounded(&tri, 3, 6).len(), 2);
    }

    #[test]
    fn path_with_two_endpoints_selected() {
        let g = path_abc();
        let sub = Subgraph::new([0, 2], []);
        assert!(is_relative_forest(&g, &sub).unwrap().pass);
        let strong = is_strong_relative_forest(&g, &sub).unwrap();
        assert!(!strong.pass);
        assert!(matches!(strong.witness, Some(GraphWitness::Disconnected { a: 0, b: 2, .. })));
        let q = quotient_graph(&g, &sub).unwrap();
        assert_eq!(q.graph.node_count, 2);
        assert_eq!(q.graph.edges.len(), 2);
        assert!(q.graph.edges.iter().all(|e| e.u != e.v));
        assert!(!is_strong_relative_forest_by_quotient(&g, &sub).unwrap().pass);
    }

    #[test]
    fn whole_and_empty_selection() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1);
        g.add_edge(0, 1);
        let all = Subgraph::whole(&g);
        assert!(is_relative_forest(&g, &all).unwrap().pass);
        assert!(is_strong_relative_forest(&g, &all).unwrap().pass);
        assert!(is_strong_relative_forest_by_quotient(&g, &all).unwrap().pass);
        let q = quotient_graph(&g, &Subgraph::default()).unwrap();
        assert_eq!(q.graph, g);
        let none = Subgraph::default();
        let v = is_relative_forest(&g, &none).unwrap();
        let Some(GraphWitness::Cycle(c)) = v.witness else { panic!() };
        assert!(g.is_reduced_cycle(&c));
    }

    #[test]
    fn spanning_connected_selection_gives_loops() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 0);
        let sub = Subgraph::new([0, 1, 2], [0, 1]);
        let q = quotient_graph(&g, &sub).unwrap();
        assert_eq!(q.graph.node_count, 1);
        assert_eq!(q.graph.edges, vec![GraphEdge { u: 0, v: 0, weight: 0 }]);
    }

    #[test]
    fn two_cyclic_pieces_joined_by_a_path() {
        // two loops joined by an edge; both loops selected
        let mut g = Graph::new(2);
        g.add_edge(0, 0);
        g.add_edge(1, 1);
        g.add_edge(0, 1);
        let sub = Subgraph::new([0, 1], [0, 1]);
        let v = is_relative_forest(&g, &sub).unwrap();
        let Some(GraphWitness::Cycle(c)) = v.witness else { panic!("{v:?}") };
        assert!(g.is_reduced_cycle(&c));
        assert!(!sub.contains_cycle(&c));
        assert!(!is_relative_forest_by_search(&g, &sub).unwrap().pass);
    }

    #[test]
    fn not_a_subgraph() {
        let g = path_abc();
        assert_eq!(is_relative_forest(&g, &Subgraph::new([0], [0])), Err(GraphError::NotSubgraph(0)));
    }
}
