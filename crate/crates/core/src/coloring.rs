//! The coloring test, the relative coloring test and the strong relative
//! coloring test on zero/one-angled complexes.
//!
//! Each test has a structural decision procedure built from forest checks on
//! lk₀ and an independent procedure (bounded reduced-cycle search, or the
//! quotient-graph criterion for the strong test).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{cell_curvature, AngleError, AngleStructure, WeightedLink};
use crate::complex::{CornerId, EdgeEnd, Subcomplex, TwoComplex};
use crate::graph::{
    find_reduced_cycle_below, is_relative_forest, is_strong_relative_forest, is_strong_relative_forest_by_quotient, Dart,
    Graph, GraphVerdict, GraphWitness, Subgraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error(transparent)]
    Angles(#[from] AngleError),
    #[error("subcomplex is not face-closed")]
    NotFaceClosed,
}

/// A corner traversed from its `a` end to its `b` end (`forward`) or back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkStep {
    pub corner: CornerId,
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColoringWitness {
    /// A cell with positive curvature.
    PositiveCell { cell: usize, curvature: i64 },
    /// A reduced cycle in lk₀ (outside the subcomplex link, in relative tests).
    ZeroCycle { vertex: usize, walk: Vec<LinkStep> },
    /// A reduced cycle of weight below 2 found by search.
    LightCycle { vertex: usize, walk: Vec<LinkStep>, weight: i64 },
    /// An angle-1 corner whose ends lie in one lk₀ component.
    ClosingCorner { vertex: usize, corner: CornerId },
    /// Two ends of the subcomplex link in one lk₀ component but in different
    /// components of the subcomplex lk₀, joined by `walk`.
    Disconnected { vertex: usize, a: EdgeEnd, b: EdgeEnd, walk: Vec<LinkStep> },
    /// Corners forming a cycle in lk₀(v, L) / lk₀(v, K).
    QuotientCycle { vertex: usize, corners: Vec<CornerId> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringVerdict {
    pub pass: bool,
    pub cells_pass: bool,
    /// Link conditions per vertex.
    pub vertex_pass: Vec<bool>,
    /// Nonempty exactly when `pass` is false.
    pub witnesses: Vec<ColoringWitness>,
}

impl ColoringVerdict {
    fn new(vertex_count: usize) -> Self {
        ColoringVerdict { pass: true, cells_pass: true, vertex_pass: vec![true; vertex_count], witnesses: Vec::new() }
    }

    fn fail_cell(&mut self, w: ColoringWitness) {
        self.pass = false;
        self.cells_pass = false;
        self.witnesses.push(w);
    }

    fn fail_vertex(&mut self, v: usize, w: ColoringWitness) {
        self.pass = false;
        self.vertex_pass[v] = false;
        self.witnesses.push(w);
    }
}

/// The link at one vertex with the pieces the tests need.
struct VertexView {
    vertex: usize,
    wl: WeightedLink,
    /// lk₀(v, L) with its own edge numbering.
    lk0: Graph,
    /// Link corner index of each lk₀ edge.
    lk0_corner: Vec<usize>,
    /// lk₀(v, K) as a subgraph of `lk0`.
    lk0_k: Subgraph,
    /// Link corners coming from cells of K.
    k_corners: BTreeSet<usize>,
}

impl VertexView {
    fn new(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure, v: usize) -> Self {
        let wl = WeightedLink::new(l.link(v).expect("vertex in range"), w);
        let mut lk0 = Graph::new(wl.graph.node_count);
        let mut lk0_corner = Vec::new();
        let mut k_lk0_edges = BTreeSet::new();
        for &e in &wl.lk0.edges {
            let ge = wl.graph.edges[e];
            let j = lk0.add_weighted_edge(ge.u, ge.v, ge.weight);
            lk0_corner.push(e);
            if k.cells.contains(&wl.link.corners[e].id.cell) {
                k_lk0_edges.insert(j);
            }
        }
        let k_nodes = (0..wl.link.nodes.len()).filter(|&i| k.edges.contains(&wl.link.nodes[i].edge));
        let lk0_k = Subgraph::new(k_nodes, k_lk0_edges);
        let k_corners = (0..wl.link.corners.len()).filter(|&i| k.cells.contains(&wl.link.corners[i].id.cell)).collect();
        VertexView { vertex: v, wl, lk0, lk0_corner, lk0_k, k_corners }
    }

    fn steps_lk0(&self, walk: &[Dart]) -> Vec<LinkStep> {
        walk.iter()
            .map(|d| LinkStep { corner: self.wl.link.corners[self.lk0_corner[d.edge]].id, forward: d.forward })
            .collect()
    }

    fn steps_link(&self, walk: &[Dart]) -> Vec<LinkStep> {
        walk.iter().map(|d| LinkStep { corner: self.wl.link.corners[d.edge].id, forward: d.forward }).collect()
    }

    fn witness(&self, g: GraphWitness) -> ColoringWitness {
        let vertex = self.vertex;
        match g {
            GraphWitness::Cycle(c) => ColoringWitness::ZeroCycle { vertex, walk: self.steps_lk0(&c) },
            GraphWitness::QuotientCycle(es) => ColoringWitness::QuotientCycle {
                vertex,
                corners: es.iter().map(|&e| self.wl.link.corners[self.lk0_corner[e]].id).collect(),
            },
            GraphWitness::Disconnected { a, b, path } => ColoringWitness::Disconnected {
                vertex,
                a: self.wl.link.nodes[a],
                b: self.wl.link.nodes[b],
                walk: self.steps_lk0(&path),
            },
        }
    }

    /// Angle-1 corners whose two ends share an lk₀(v, L) component.
    fn closing_corners(&self) -> Vec<usize> {
        let labels = self.lk0.component_labels();
        self.wl
            .graph
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight != 0 && labels[e.u] == labels[e.v])
            .map(|(i, _)| i)
            .collect()
    }

    /// Component labels of lk₀(v, K) on all link nodes.
    fn k_labels(&self) -> Vec<usize> {
        let mut g = Graph::new(self.lk0.node_count);
        for &e in &self.lk0_k.edges {
            let ge = self.lk0.edges[e];
            g.add_edge(ge.u, ge.v);
        }
        g.component_labels()
    }
}

fn check_inputs(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure) -> Result<(), ColoringError> {
    w.check_zero_one(l)?;
    if !k.is_face_closed(l) {
        return Err(ColoringError::NotFaceClosed);
    }
    Ok(())
}

fn cell_condition(l: &TwoComplex, w: &AngleStructure, cells: impl Iterator<Item = usize>, out: &mut ColoringVerdict) {
    for d in cells {
        let curvature = cell_curvature(l, w, d).expect("cell in range");
        if curvature > 0 {
            out.fail_cell(ColoringWitness::PositiveCell { cell: d, curvature });
        }
    }
}

/// Structural coloring test: cells have κ ≤ 0, every lk₀ is a forest, and
/// no angle-1 corner has both ends in one lk₀ component.
pub fn coloring_test(k: &TwoComplex, w: &AngleStructure) -> Result<ColoringVerdict, ColoringError> {
    let empty = Subcomplex::empty();
    check_inputs(k, &empty, w)?;
    let mut out = ColoringVerdict::new(k.vertex_count());
    cell_condition(k, w, 0..k.cell_count(), &mut out);
    for v in 0..k.vertex_count() {
        let view = VertexView::new(k, &empty, w, v);
        if let Some(c) = view.lk0.find_cycle(None) {
            out.fail_vertex(v, ColoringWitness::ZeroCycle { vertex: v, walk: view.steps_lk0(&c) });
            continue;
        }
        if let Some(&c) = view.closing_corners().first() {
            out.fail_vertex(v, ColoringWitness::ClosingCorner { vertex: v, corner: view.wl.link.corners[c].id });
        }
    }
    Ok(out)
}

/// Structural relative coloring test for `K ⊆ L`.
pub fn relative_coloring_test(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure) -> Result<ColoringVerdict, ColoringError> {
    check_inputs(l, k, w)?;
    let mut out = ColoringVerdict::new(l.vertex_count());
    cell_condition(l, w, (0..l.cell_count()).filter(|d| !k.cells.contains(d)), &mut out);
    for v in 0..l.vertex_count() {
        let view = VertexView::new(l, k, w, v);
        let rel = is_relative_forest(&view.lk0, &view.lk0_k).expect("lk0(v,K) is a subgraph of lk0(v,L)");
        if let Some(g) = rel.witness {
            out.fail_vertex(v, view.witness(g));
            continue;
        }
        let k_labels = view.k_labels();
        for c in view.closing_corners() {
            let ge = view.wl.graph.edges[c];
            if !view.k_corners.contains(&c) || k_labels[ge.u] != k_labels[ge.v] {
                out.fail_vertex(v, ColoringWitness::ClosingCorner { vertex: v, corner: view.wl.link.corners[c].id });
                break;
            }
        }
    }
    Ok(out)
}

/// How the strong relative forest condition is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrongMethod {
    /// Relative forest plus connectivity of each component's intersection.
    Structural,
    /// lk₀(v, L) / lk₀(v, K) is a forest.
    Quotient,
}

/// Strong relative coloring test for `K ⊆ L`.
pub fn strong_relative_coloring_test(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure) -> Result<ColoringVerdict, ColoringError> {
    strong_relative_coloring_test_with(l, k, w, StrongMethod::Structural)
}

pub fn strong_relative_coloring_test_with(
    l: &TwoComplex,
    k: &Subcomplex,
    w: &AngleStructure,
    method: StrongMethod,
) -> Result<ColoringVerdict, ColoringError> {
    check_inputs(l, k, w)?;
    let mut out = ColoringVerdict::new(l.vertex_count());
    cell_condition(l, w, 0..l.cell_count(), &mut out);
    for v in 0..l.vertex_count() {
        let view = VertexView::new(l, k, w, v);
        let verdict: GraphVerdict = match method {
            StrongMethod::Structural => is_strong_relative_forest(&view.lk0, &view.lk0_k),
            StrongMethod::Quotient => is_strong_relative_forest_by_quotient(&view.lk0, &view.lk0_k),
        }
        .expect("lk0(v,K) is a subgraph of lk0(v,L)");
        if let Some(g) = verdict.witness {
            out.fail_vertex(v, view.witness(g));
            continue;
        }
        if let Some(c) = view.closing_corners().into_iter().find(|c| !view.k_corners.contains(c)) {
            out.fail_vertex(v, ColoringWitness::ClosingCorner { vertex: v, corner: view.wl.link.corners[c].id });
        }
    }
    Ok(out)
}

/// Definitional coloring test: κ ≤ 0 on cells and no reduced link cycle of
/// weight below 2 with at most `2 · #corners` steps. Exponential.
pub fn coloring_test_oracle(k: &TwoComplex, w: &AngleStructure) -> Result<ColoringVerdict, ColoringError> {
    relative_coloring_test_oracle(k, &Subcomplex::empty(), w)
}

/// Definitional relative coloring test: κ ≤ 0 on cells outside `K` and no
/// light reduced cycle that leaves lk(v, K). Exponential.
pub fn relative_coloring_test_oracle(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure) -> Result<ColoringVerdict, ColoringError> {
    check_inputs(l, k, w)?;
    let mut out = ColoringVerdict::new(l.vertex_count());
    cell_condition(l, w, (0..l.cell_count()).filter(|d| !k.cells.contains(d)), &mut out);
    for v in 0..l.vertex_count() {
        let view = VertexView::new(l, k, w, v);
        let max_len = 2 * view.wl.graph.edges.len();
        if let Some(c) = find_reduced_cycle_below(&view.wl.graph, 2, max_len, Some(&view.k_corners)) {
            let weight = view.wl.graph.cycle_weight(&c);
            out.fail_vertex(v, ColoringWitness::LightCycle { vertex: v, walk: view.steps_link(&c), weight });
        }
    }
    Ok(out)
}

/// Re-checks a witness against the complex and angles. Returns true when the
/// witness demonstrates a failure of the named condition.
pub fn witness_is_valid(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure, wit: &ColoringWitness) -> bool {
    let link_walk = |vertex: usize, walk: &[LinkStep]| -> Option<(Graph, Vec<Dart>)> {
        let lk = l.link(vertex).ok()?;
        let g = WeightedLink::new(lk.clone(), w).graph;
        let darts = walk
            .iter()
            .map(|s| lk.corners.iter().position(|c| c.id == s.corner).map(|e| Dart { edge: e, forward: s.forward }))
            .collect::<Option<Vec<_>>>()?;
        Some((g, darts))
    };
    match wit {
        ColoringWitness::PositiveCell { cell, curvature } => {
            cell_curvature(l, w, *cell).ok() == Some(*curvature) && *curvature > 0
        }
        ColoringWitness::ZeroCycle { vertex, walk } | ColoringWitness::LightCycle { vertex, walk, .. } => {
            let Some((g, darts)) = link_walk(*vertex, walk) else { return false };
            let outside = walk.iter().any(|s| !k.cells.contains(&s.corner.cell));
            let bound = if matches!(wit, ColoringWitness::ZeroCycle { .. }) { 1 } else { 2 };
            g.is_reduced_cycle(&darts) && g.cycle_weight(&darts) < bound && outside
        }
        ColoringWitness::ClosingCorner { vertex, corner } => {
            let Ok(lk) = l.link(*vertex) else { return false };
            let wl = WeightedLink::new(lk, w);
            let Some(e) = wl.link.corners.iter().position(|c| c.id == *corner) else { return false };
            let labels = wl.lk0_components();
            let ge = wl.graph.edges[e];
            ge.weight == 1 && labels[ge.u] == labels[ge.v]
        }
        ColoringWitness::Disconnected { vertex, a, b, walk } => {
            let Some((g, darts)) = link_walk(*vertex, walk) else { return false };
            let view = VertexView::new(l, k, w, *vertex);
            let (Some(ia), Some(ib)) = (view.wl.link.node_index(*a), view.wl.link.node_index(*b)) else { return false };
            let labels = view.k_labels();
            let in_k = view.lk0_k.nodes.contains(&ia) && view.lk0_k.nodes.contains(&ib);
            let joined = darts.iter().all(|d| g.edges[d.edge].weight == 0)
                && darts.first().map_or(ia == ib, |d| g.tail(*d) == ia)
                && darts.last().map_or(true, |d| g.head(*d) == ib)
                && darts.windows(2).all(|p| g.head(p[0]) == g.tail(p[1]));
            in_k && joined && labels[ia] != labels[ib]
        }
        ColoringWitness::QuotientCycle { vertex, corners } => {
            let view = VertexView::new(l, k, w, *vertex);
            let k_nodes = &view.lk0_k.nodes;
            let ids: Option<Vec<usize>> =
                corners.iter().map(|id| view.wl.link.corners.iter().position(|c| c.id == *id)).collect();
            let Some(ids) = ids else { return false };
            // rebuild the quotient on just these corners and look for a cycle
            let mut q = Graph::new(view.wl.graph.node_count + 1);
            let merged = view.wl.graph.node_count;
            for &e in &ids {
                let ge = view.wl.graph.edges[e];
                if ge.weight != 0 || view.k_corners.contains(&e) {
                    return false;
                }
                let m = |x: usize| if k_nodes.contains(&x) { merged } else { x };
                q.add_edge(m(ge.u), m(ge.v));
            }
            q.find_cycle(None).is_some()
        }
    }
}
