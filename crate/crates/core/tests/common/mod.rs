#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use relnpi::graph::{Graph, Subgraph};
use relnpi::{parse_complex, AngleStructure, ComplexBuilder, ComplexDocument, TwoComplex};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus(name: &str) -> ComplexDocument {
    parse_complex(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Random complex with up to `max_vertices` vertices, `max_edges` edges and
/// `max_cells` cells whose closed words have length at most `max_word`.
pub fn random_complex(rng: &mut impl Rng, max_vertices: usize, max_edges: usize, max_cells: usize, max_word: usize) -> TwoComplex {
    let nv = rng.gen_range(1..=max_vertices);
    let ne = rng.gen_range(1..=max_edges);
    let ends: Vec<(usize, usize)> = (0..ne).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))).collect();
    let mut b = ComplexBuilder::new("random");
    for v in 0..nv {
        b = b.vertex(&format!("v{v}"));
    }
    for (i, &(s, t)) in ends.iter().enumerate() {
        b = b.edge(&format!("e{i}"), &format!("v{s}"), &format!("v{t}"));
    }
    let nc = rng.gen_range(0..=max_cells);
    for c in 0..nc {
        if let Some(word) = random_closed_word(rng, &ends, nv, max_word) {
            b = b.cell(&format!("c{c}"), &word);
        }
    }
    b.build().expect("random complex is well formed")
}

fn random_closed_word(rng: &mut impl Rng, ends: &[(usize, usize)], nv: usize, max_word: usize) -> Option<String> {
    for _ in 0..50 {
        let len = rng.gen_range(1..=max_word);
        let start = rng.gen_range(0..nv);
        let mut at = start;
        let mut letters = Vec::new();
        for _ in 0..len {
            let moves: Vec<(usize, bool)> = ends
                .iter()
                .enumerate()
                .flat_map(|(i, &(s, t))| {
                    let mut m = Vec::new();
                    if s == at {
                        m.push((i, true));
                    }
                    if t == at {
                        m.push((i, false));
                    }
                    m
                })
                .collect();
            let Some(&(e, pos)) = moves.choose(rng) else { break };
            at = if pos { ends[e].1 } else { ends[e].0 };
            letters.push(if pos { format!("e{e}") } else { format!("-e{e}") });
        }
        if at == start && !letters.is_empty() {
            return Some(letters.join(" "));
        }
    }
    None
}

pub fn random_angles(rng: &mut impl Rng, k: &TwoComplex, lo: i64, hi: i64) -> AngleStructure {
    AngleStructure::from_fn(k, |_| rng.gen_range(lo..=hi))
}

pub fn max_link_corners(k: &TwoComplex) -> usize {
    k.links().iter().map(|lk| lk.corners.len()).max().unwrap_or(0)
}

pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, max_edges: usize) -> Graph {
    let n = rng.gen_range(1..=max_nodes);
    let m = rng.gen_range(0..=max_edges);
    let mut g = Graph::new(n);
    for _ in 0..m {
        g.add_edge(rng.gen_range(0..n), rng.gen_range(0..n));
    }
    g
}

/// A random subgraph: a node subset and a subset of the edges it spans.
pub fn random_subgraph(rng: &mut impl Rng, g: &Graph) -> Subgraph {
    let nodes: Vec<usize> = (0..g.node_count).filter(|_| rng.gen_bool(0.5)).collect();
    let edges: Vec<usize> = (0..g.edges.len())
        .filter(|&e| nodes.contains(&g.edges[e].u) && nodes.contains(&g.edges[e].v) && rng.gen_bool(0.6))
        .collect();
    Subgraph::new(nodes, edges)
}

/// Random connected graph with at least one cycle.
pub fn random_connected_non_tree(rng: &mut impl Rng, max_nodes: usize) -> Graph {
    let n = rng.gen_range(1..=max_nodes);
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(rng.gen_range(0..v), v);
    }
    let extra = rng.gen_range(1..=3);
    for _ in 0..extra {
        g.add_edge(rng.gen_range(0..n), rng.gen_range(0..n));
    }
    g
}

/// The path a–b–c with the subgraph {a, c}: a forest relative to the
/// subgraph, but not a strong one.
pub fn path_with_ends() -> (Graph, Subgraph) {
    let mut g = Graph::new(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    (g, Subgraph::new([0, 2], []))
}
