//! Attaching 2-cells to a connected graph that is not a tree so that the
//! result is collapsible, every edge lies in a cell boundary, and every link
//! is connected.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::complex::{is_collapsible, Cell, Edge, Letter, Sign, TwoComplex};
use crate::dsu::Dsu;
use crate::graph::{Dart, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapError {
    #[error("graph is empty or disconnected")]
    Disconnected,
    #[error("graph is a tree")]
    Tree,
    #[error("capped complex fails a required property: {0}")]
    Verification(&'static str),
}

/// Closed walks, one per non-tree edge `e` of a spanning tree `T`, of the
/// form `e·γ` with `γ` running in `T` from the head of `e` back to its tail
/// and covering every edge of `T`. When `T` is a single vertex, the first
/// non-tree edge stands in for `γ` in the later walks so that the link stays
/// connected.
pub fn cap_walks(g: &Graph) -> Result<Vec<Vec<Dart>>, CapError> {
    if g.node_count == 0 || g.component_count() != 1 {
        return Err(CapError::Disconnected);
    }
    let mut dsu = Dsu::new(g.node_count);
    let mut tree = BTreeSet::new();
    let mut extra = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if dsu.union(e.u, e.v) {
            tree.insert(i);
        } else {
            extra.push(i);
        }
    }
    if extra.is_empty() {
        return Err(CapError::Tree);
    }
    let mut adj: Vec<Vec<Dart>> = vec![Vec::new(); g.node_count];
    for &i in &tree {
        adj[g.edges[i].u].push(Dart { edge: i, forward: true });
        adj[g.edges[i].v].push(Dart { edge: i, forward: false });
    }
    let mut walks = Vec::new();
    for (n, &e) in extra.iter().enumerate() {
        let d = Dart { edge: e, forward: true };
        let (p, q) = (g.tail(d), g.head(d));
        let mut walk = vec![d];
        if tree.is_empty() {
            if n > 0 {
                walk.push(Dart { edge: extra[0], forward: true });
            }
        } else {
            tour(g, &adj, q, None, &mut walk);
            let (_, back) = g
                .shortest_path(&BTreeSet::from([q]), &BTreeSet::from([p]), Some(&tree))
                .expect("spanning tree is connected");
            walk.extend(back);
        }
        walks.push(walk);
    }
    Ok(walks)
}

/// Depth-first tour of the tree from `x`, returning to `x`.
fn tour(g: &Graph, adj: &[Vec<Dart>], x: usize, from: Option<usize>, out: &mut Vec<Dart>) {
    for &d in &adj[x] {
        if Some(d.edge) == from {
            continue;
        }
        out.push(d);
        tour(g, adj, g.head(d), Some(d.edge), out);
        out.push(d.reverse());
    }
}

/// Builds the 2-complex with 1-skeleton `g` (vertex `i` named `v{i}`, edge
/// `i` named `e{i}` running from `u` to `v`) and one cell per walk.
pub fn complex_from_walks(name: &str, g: &Graph, walks: &[Vec<Dart>]) -> TwoComplex {
    let vertices = (0..g.node_count).map(|i| format!("v{i}")).collect();
    let edges = g.edges.iter().enumerate().map(|(i, e)| Edge { name: format!("e{i}"), src: e.u, dst: e.v }).collect();
    let cells = walks
        .iter()
        .enumerate()
        .map(|(i, w)| Cell {
            name: format!("d{i}"),
            word: w.iter().map(|d| Letter::new(d.edge, if d.forward { Sign::Pos } else { Sign::Neg })).collect(),
        })
        .collect();
    TwoComplex::new(name, vertices, edges, cells).expect("walks are closed")
}

/// Whether `z` is collapsible, every edge lies in a cell and every link is
/// connected; the first failing property otherwise.
pub fn check_capped(z: &TwoComplex) -> Result<(), CapError> {
    if (0..z.edge_count()).any(|e| z.edge_multiplicity(e) == 0) {
        return Err(CapError::Verification("edge outside every cell"));
    }
    if z.links().iter().any(|lk| lk.to_graph().component_count() != 1) {
        return Err(CapError::Verification("disconnected link"));
    }
    if is_collapsible(z).is_none() {
        return Err(CapError::Verification("not collapsible"));
    }
    Ok(())
}

/// Caps `g` with 2-cells and verifies the three required properties.
pub fn cap_graph(g: &Graph) -> Result<TwoComplex, CapError> {
    let walks = cap_walks(g)?;
    let z = complex_from_walks("cap", g, &walks);
    check_capped(&z)?;
    Ok(z)
}
