//! Finite combinatorial 2-complexes: a directed 1-skeleton plus 2-cells
//! attached along closed edge words.
//!
//! Vertices, edges and cells carry string ids for I/O but are addressed by
//! their index everywhere else. All counts are exact integers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ComplexError;

/// Orientation of a traversal or of an edge end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

/// One traversal of an edge inside an attaching word: `(e,+)` runs from the
/// source of `e` to its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub edge: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(edge: usize, sign: Sign) -> Self {
        Letter { edge, sign }
    }

    pub fn pos(edge: usize) -> Self {
        Letter { edge, sign: Sign::Pos }
    }

    pub fn neg(edge: usize) -> Self {
        Letter { edge, sign: Sign::Neg }
    }

    pub fn inverse(self) -> Self {
        Letter { edge: self.edge, sign: self.sign.flip() }
    }

    /// The end of the edge the traversal arrives through.
    pub fn arrival(self) -> EdgeEnd {
        EdgeEnd { edge: self.edge, sign: self.sign.flip() }
    }

    /// The end of the edge the traversal leaves through.
    pub fn departure(self) -> EdgeEnd {
        EdgeEnd { edge: self.edge, sign: self.sign }
    }
}

/// A point of an edge close to one of its ends: `e⁺` sits near the start of
/// `e`, `e⁻` near its end. Edge ends are the nodes of vertex links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub sign: Sign,
}

impl EdgeEnd {
    pub fn new(edge: usize, sign: Sign) -> Self {
        EdgeEnd { edge, sign }
    }
}

/// A corner of a 2-cell: position `pos` is the turn from letter `pos` to
/// letter `pos + 1` (cyclically) of the cell's attaching word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CornerId {
    pub cell: usize,
    pub pos: usize,
}

impl CornerId {
    pub fn new(cell: usize, pos: usize) -> Self {
        CornerId { cell, pos }
    }
}

/// A corner viewed as an edge of a link graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub id: CornerId,
    pub a: EdgeEnd,
    pub b: EdgeEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub word: Vec<Letter>,
}

/// A validated finite 2-complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoComplex {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    cells: Vec<Cell>,
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TwoComplex {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        cells: Vec<Cell>,
    ) -> Result<Self, ComplexError> {
        let k = TwoComplex { name: name.into(), vertices, edges, cells };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<(), ComplexError> {
        check_unique("vertex", self.vertices.iter())?;
        check_unique("edge", self.edges.iter().map(|e| &e.name))?;
        check_unique("cell", self.cells.iter().map(|c| &c.name))?;
        for e in &self.edges {
            if e.src >= self.vertices.len() || e.dst >= self.vertices.len() {
                return Err(ComplexError::UnknownVertex(format!("endpoint of {}", e.name)));
            }
        }
        for c in &self.cells {
            if c.word.is_empty() {
                return Err(ComplexError::EmptyWord { cell: c.name.clone() });
            }
            for l in &c.word {
                if l.edge >= self.edges.len() {
                    return Err(ComplexError::UnknownEdge(format!("#{} in {}", l.edge, c.name)));
                }
            }
            let n = c.word.len();
            for i in 0..n {
                if self.letter_end(c.word[i]) != self.letter_start(c.word[(i + 1) % n]) {
                    return Err(ComplexError::OpenWord { cell: c.name.clone(), position: i });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.name == name)
    }

    pub fn word(&self, cell: usize) -> &[Letter] {
        &self.cells[cell].word
    }

    pub fn letter_start(&self, l: Letter) -> usize {
        let e = &self.edges[l.edge];
        match l.sign {
            Sign::Pos => e.src,
            Sign::Neg => e.dst,
        }
    }

    pub fn letter_end(&self, l: Letter) -> usize {
        self.letter_start(l.inverse())
    }

    /// The vertex whose link contains the given edge end.
    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        let e = &self.edges[end.edge];
        match end.sign {
            Sign::Pos => e.src,
            Sign::Neg => e.dst,
        }
    }

    /// The vertex a corner turns at.
    pub fn corner_vertex(&self, c: CornerId) -> usize {
        self.letter_end(self.cells[c.cell].word[c.pos])
    }

    pub fn corner(&self, c: CornerId) -> Corner {
        let w = &self.cells[c.cell].word;
        let n = w.len();
        Corner { id: c, a: w[c.pos].arrival(), b: w[(c.pos + 1) % n].departure() }
    }

    /// All corners in (cell, position) order.
    pub fn corner_ids(&self) -> impl Iterator<Item = CornerId> + '_ {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(c, cell)| (0..cell.word.len()).map(move |p| CornerId::new(c, p)))
    }

    pub fn corner_count(&self) -> usize {
        self.cells.iter().map(|c| c.word.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.cells.len() as i64
    }

    /// Number of traversals of `edge` over all attaching words.
    pub fn edge_multiplicity(&self, edge: usize) -> usize {
        self.cells.iter().flat_map(|c| &c.word).filter(|l| l.edge == edge).count()
    }

    pub fn exponent_sum(word: &[Letter]) -> i64 {
        word.iter().map(|l| l.sign.value()).sum()
    }

    /// Edge ends sitting at `v`, in edge order (`e⁺` before `e⁻` for loops).
    pub fn edge_ends_at(&self, v: usize) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.src == v {
                out.push(EdgeEnd::new(i, Sign::Pos));
            }
            if e.dst == v {
                out.push(EdgeEnd::new(i, Sign::Neg));
            }
        }
        out
    }

    pub fn link(&self, v: usize) -> Result<LinkGraph, ComplexError> {
        if v >= self.vertices.len() {
            return Err(ComplexError::UnknownVertex(format!("#{v}")));
        }
        Ok(self.link_in(&Subcomplex::full(self), v))
    }

    /// The link of `v` inside the subcomplex `sub`: nodes are ends of edges of
    /// `sub`, corners come from cells of `sub`.
    pub fn link_in(&self, sub: &Subcomplex, v: usize) -> LinkGraph {
        let nodes = self
            .edge_ends_at(v)
            .into_iter()
            .filter(|end| sub.edges.contains(&end.edge))
            .collect();
        let corners = self
            .corner_ids()
            .filter(|c| sub.cells.contains(&c.cell) && self.corner_vertex(*c) == v)
            .map(|c| self.corner(c))
            .collect();
        LinkGraph { vertex: v, nodes, corners }
    }

    pub fn links(&self) -> Vec<LinkGraph> {
        (0..self.vertices.len()).map(|v| self.link_in(&Subcomplex::full(self), v)).collect()
    }

    /// Renders a word with edge names, `-` marking inverse traversals.
    pub fn format_word(&self, word: &[Letter]) -> String {
        word.iter()
            .map(|l| match l.sign {
                Sign::Pos => self.edges[l.edge].name.clone(),
                Sign::Neg => format!("-{}", self.edges[l.edge].name),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_end(&self, end: EdgeEnd) -> String {
        format!("{}{}", self.edges[end.edge].name, end.sign.symbol())
    }

    /// Copies the subcomplex out as a standalone complex. Indices of the
    /// result follow the sorted index order of `sub`.
    pub fn extract(&self, sub: &Subcomplex) -> Extracted {
        let vmap: Vec<usize> = sub.vertices.iter().copied().collect();
        let emap: Vec<usize> = sub.edges.iter().copied().collect();
        let cmap: Vec<usize> = sub.cells.iter().copied().collect();
        let vpos = |v: usize| vmap.binary_search(&v).expect("face-closed subcomplex");
        let epos = |e: usize| emap.binary_search(&e).expect("face-closed subcomplex");
        let vertices = vmap.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges = emap
            .iter()
            .map(|&e| {
                let ed = &self.edges[e];
                Edge { name: ed.name.clone(), src: vpos(ed.src), dst: vpos(ed.dst) }
            })
            .collect();
        let cells = cmap
            .iter()
            .map(|&c| Cell {
                name: self.cells[c].name.clone(),
                word: self.cells[c].word.iter().map(|l| Letter::new(epos(l.edge), l.sign)).collect(),
            })
            .collect();
        let complex = TwoComplex { name: self.name.clone(), vertices, edges, cells };
        Extracted { complex, vertex_map: vmap, edge_map: emap, cell_map: cmap }
    }

    /// Free faces of the whole complex.
    pub fn free_faces(&self) -> FreeFaces {
        free_faces_in(self, &Subcomplex::full(self))
    }

    /// True when the complex has no free vertex and no free edge.
    pub fn has_free_faces(&self) -> bool {
        let f = self.free_faces();
        !f.vertices.is_empty() || !f.edges.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        components(self, &Subcomplex::full(self)).len() <= 1
    }

    /// A single vertex with nothing else.
    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty() && self.cells.is_empty()
    }
}

fn check_unique<'a>(kind: &'static str, ids: impl Iterator<Item = &'a String>) -> Result<(), ComplexError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(ComplexError::DuplicateId { kind, id: id.clone() });
        }
    }
    Ok(())
}

impl fmt::Display for TwoComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::write_complex(self, &[]))
    }
}

/// A subcomplex copied out of an ambient complex, with index maps back into it.
#[derive(Clone, Debug)]
pub struct Extracted {
    pub complex: TwoComplex,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub cell_map: Vec<usize>,
}

/// Builds complexes by name. Forward references are allowed; everything is
/// resolved in [`ComplexBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct ComplexBuilder {
    name: String,
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    cells: Vec<(String, Vec<(String, Sign)>)>,
}

impl ComplexBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ComplexBuilder { name: name.into(), ..Default::default() }
    }

    pub fn vertex(mut self, id: &str) -> Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn edge(mut self, id: &str, src: &str, dst: &str) -> Self {
        self.edges.push((id.to_string(), src.to_string(), dst.to_string()));
        self
    }

    /// Adds a cell whose word is given as whitespace separated tokens, with
    /// `-x` for the inverse of `x`.
    pub fn cell(mut self, id: &str, word: &str) -> Self {
        let letters = word
            .split_whitespace()
            .map(|t| match t.strip_prefix('-') {
                Some(rest) => (rest.to_string(), Sign::Neg),
                None => (t.to_string(), Sign::Pos),
            })
            .collect();
        self.cells.push((id.to_string(), letters));
        self
    }

    pub fn cell_letters(mut self, id: &str, letters: Vec<(String, Sign)>) -> Self {
        self.cells.push((id.to_string(), letters));
        self
    }

    pub fn build(self) -> Result<TwoComplex, ComplexError> {
        for id in self
            .vertices
            .iter()
            .chain(self.edges.iter().map(|e| &e.0))
            .chain(self.cells.iter().map(|c| &c.0))
        {
            if !valid_id(id) {
                return Err(ComplexError::InvalidId(id.clone()));
            }
        }
        check_unique("vertex", self.vertices.iter())?;
        let vidx = |name: &str| {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| ComplexError::UnknownVertex(name.to_string()))
        };
        let mut edges = Vec::new();
        for (id, s, t) in &self.edges {
            edges.push(Edge { name: id.clone(), src: vidx(s)?, dst: vidx(t)? });
        }
        check_unique("edge", edges.iter().map(|e| &e.name))?;
        let mut cells = Vec::new();
        for (id, letters) in &self.cells {
            let mut word = Vec::new();
            for (e, s) in letters {
                let i = edges
                    .iter()
                    .position(|x| &x.name == e)
                    .ok_or_else(|| ComplexError::UnknownEdge(e.clone()))?;
                word.push(Letter::new(i, *s));
            }
            cells.push(Cell { name: id.clone(), word });
        }
        TwoComplex::new(self.name, self.vertices, edges, cells)
    }
}

/// The graph of edge ends and corners around one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub vertex: usize,
    pub nodes: Vec<EdgeEnd>,
    pub corners: Vec<Corner>,
}

impl LinkGraph {
    pub fn node_index(&self, end: EdgeEnd) -> Option<usize> {
        self.nodes.iter().position(|n| *n == end)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.corners.len() as i64
    }

    /// The link as an undirected multigraph; graph edge `i` is corner `i`.
    pub fn to_graph(&self) -> crate::graph::Graph {
        let mut g = crate::graph::Graph::new(self.nodes.len());
        for c in &self.corners {
            let a = self.node_index(c.a).expect("corner end is a link node");
            let b = self.node_index(c.b).expect("corner end is a link node");
            g.add_edge(a, b);
        }
        g
    }
}

/// A selection of cells of an ambient complex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subcomplex {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
    pub cells: BTreeSet<usize>,
}

impl Subcomplex {
    pub fn empty() -> Self {
        Subcomplex::default()
    }

    pub fn full(k: &TwoComplex) -> Self {
        Subcomplex {
            vertices: (0..k.vertex_count()).collect(),
            edges: (0..k.edge_count()).collect(),
            cells: (0..k.cell_count()).collect(),
        }
    }

    /// The smallest face-closed subcomplex containing the given pieces.
    pub fn closure(
        k: &TwoComplex,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = usize>,
        cells: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut s = Subcomplex {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
            cells: cells.into_iter().collect(),
        };
        for &c in &s.cells {
            s.edges.extend(k.word(c).iter().map(|l| l.edge));
        }
        for &e in &s.edges {
            s.vertices.insert(k.edges()[e].src);
            s.vertices.insert(k.edges()[e].dst);
        }
        s
    }

    pub fn is_face_closed(&self, k: &TwoComplex) -> bool {
        self.check_face_closed(k).is_ok()
    }

    pub fn check_face_closed(&self, k: &TwoComplex) -> Result<(), ComplexError> {
        for &c in &self.cells {
            if c >= k.cell_count() {
                return Err(ComplexError::UnknownCell(format!("#{c}")));
            }
            if let Some(l) = k.word(c).iter().find(|l| !self.edges.contains(&l.edge)) {
                return Err(ComplexError::NotFaceClosed(format!(
                    "cell {} uses edge {} outside the subcomplex",
                    k.cells()[c].name,
                    k.edges()[l.edge].name
                )));
            }
        }
        for &e in &self.edges {
            if e >= k.edge_count() {
                return Err(ComplexError::UnknownEdge(format!("#{e}")));
            }
            let ed = &k.edges()[e];
            if !self.vertices.contains(&ed.src) || !self.vertices.contains(&ed.dst) {
                return Err(ComplexError::NotFaceClosed(format!("edge {} has an endpoint outside", ed.name)));
            }
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| v >= k.vertex_count()) {
            return Err(ComplexError::UnknownVertex(format!("#{v}")));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.cells.len() as i64
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty() && self.cells.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty() && self.cells.is_empty()
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
            cells: self.cells.union(&other.cells).copied().collect(),
        }
    }
}

/// Cells of `s`, the edges their words use, and the endpoints of those edges.
pub fn essential_part(k: &TwoComplex, s: &Subcomplex) -> Subcomplex {
    Subcomplex::closure(k, [], [], s.cells.iter().copied())
}

/// Connected components of a subcomplex, ordered by smallest vertex.
pub fn components(k: &TwoComplex, s: &Subcomplex) -> Vec<Subcomplex> {
    let mut dsu = crate::dsu::Dsu::new(k.vertex_count());
    for &e in &s.edges {
        dsu.union(k.edges()[e].src, k.edges()[e].dst);
    }
    let mut out: Vec<(usize, Subcomplex)> = Vec::new();
    let slot = |root: usize, out: &mut Vec<(usize, Subcomplex)>| -> usize {
        match out.iter().position(|(r, _)| *r == root) {
            Some(i) => i,
            None => {
                out.push((root, Subcomplex::empty()));
                out.len() - 1
            }
        }
    };
    for &v in &s.vertices {
        let i = slot(dsu.find(v), &mut out);
        out[i].1.vertices.insert(v);
    }
    for &e in &s.edges {
        let i = slot(dsu.find(k.edges()[e].src), &mut out);
        out[i].1.edges.insert(e);
    }
    for &c in &s.cells {
        let v = k.letter_start(k.word(c)[0]);
        let i = slot(dsu.find(v), &mut out);
        out[i].1.cells.insert(c);
    }
    out.into_iter().map(|(_, s)| s).collect()
}

/// Free vertices and free edges of a subcomplex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeFaces {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

/// A free edge is traversed exactly once over all attaching words of `s`; a
/// free vertex carries exactly one edge end of `s` (loops count twice) and
/// that edge lies on no cell of `s`, so the pair can be collapsed.
/// Isolated vertices are not free.
pub fn free_faces_in(k: &TwoComplex, s: &Subcomplex) -> FreeFaces {
    let mut mult = vec![0usize; k.edge_count()];
    for &c in &s.cells {
        for l in k.word(c) {
            mult[l.edge] += 1;
        }
    }
    let mut ends = vec![0usize; k.vertex_count()];
    let mut bare = vec![false; k.vertex_count()];
    for &e in &s.edges {
        let (a, b) = (k.edges()[e].src, k.edges()[e].dst);
        ends[a] += 1;
        ends[b] += 1;
        if mult[e] == 0 {
            bare[a] = true;
            bare[b] = true;
        }
    }
    FreeFaces {
        vertices: s.vertices.iter().copied().filter(|&v| ends[v] == 1 && bare[v]).collect(),
        edges: s.edges.iter().copied().filter(|&e| mult[e] == 1).collect(),
    }
}

/// One elementary collapse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollapseStep {
    /// A free edge together with the unique cell traversing it.
    Edge { edge: usize, cell: usize },
    /// A free vertex together with its edge, which lies in no cell.
    Vertex { vertex: usize, edge: usize },
}

impl CollapseStep {
    fn apply(self, s: &mut Subcomplex) {
        match self {
            CollapseStep::Edge { edge, cell } => {
                s.edges.remove(&edge);
                s.cells.remove(&cell);
            }
            CollapseStep::Vertex { vertex, edge } => {
                s.vertices.remove(&vertex);
                s.edges.remove(&edge);
            }
        }
    }
}

fn edge_moves(k: &TwoComplex, s: &Subcomplex) -> Vec<CollapseStep> {
    let mut count = vec![0usize; k.edge_count()];
    let mut owner = vec![usize::MAX; k.edge_count()];
    for &c in &s.cells {
        for l in k.word(c) {
            count[l.edge] += 1;
            owner[l.edge] = c;
        }
    }
    s.edges
        .iter()
        .filter(|&&e| count[e] == 1)
        .map(|&e| CollapseStep::Edge { edge: e, cell: owner[e] })
        .collect()
}

fn vertex_moves(k: &TwoComplex, s: &Subcomplex) -> Vec<CollapseStep> {
    let mut used = vec![false; k.edge_count()];
    for &c in &s.cells {
        for l in k.word(c) {
            used[l.edge] = true;
        }
    }
    let mut ends: Vec<Vec<usize>> = vec![Vec::new(); k.vertex_count()];
    for &e in &s.edges {
        ends[k.edges()[e].src].push(e);
        ends[k.edges()[e].dst].push(e);
    }
    s.vertices
        .iter()
        .filter(|&&v| ends[v].len() == 1 && !used[ends[v][0]])
        .map(|&v| CollapseStep::Vertex { vertex: v, edge: ends[v][0] })
        .collect()
}

/// Result of a collapse run: what is left and the steps taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseRun {
    pub remaining: Subcomplex,
    pub steps: Vec<CollapseStep>,
}

impl CollapseRun {
    /// Number of cells removed (each step removes two).
    pub fn removed_cells(&self) -> usize {
        2 * self.steps.len()
    }
}

/// Greedy elementary collapses (first available, vertex collapses first)
/// until none remain.
pub fn collapse(k: &TwoComplex) -> CollapseRun {
    collapse_sub(k, &Subcomplex::full(k))
}

pub fn collapse_sub(k: &TwoComplex, s: &Subcomplex) -> CollapseRun {
    let mut cur = s.clone();
    let mut steps = Vec::new();
    loop {
        let mut moves = vertex_moves(k, &cur);
        if moves.is_empty() {
            moves = edge_moves(k, &cur);
        }
        let Some(&m) = moves.first() else { break };
        m.apply(&mut cur);
        steps.push(m);
    }
    CollapseRun { remaining: cur, steps }
}

/// Whether some sequence of elementary collapses reduces the complex to a
/// single vertex. The witness is that sequence.
pub fn is_collapsible(k: &TwoComplex) -> Option<Vec<CollapseStep>> {
    is_collapsible_sub(k, &Subcomplex::full(k))
}

pub fn is_collapsible_sub(k: &TwoComplex, s: &Subcomplex) -> Option<Vec<CollapseStep>> {
    let greedy = collapse_sub(k, s);
    if greedy.remaining.is_point() {
        return Some(greedy.steps);
    }
    // Necessary condition: a collapsible complex has Euler characteristic 1.
    if s.euler_characteristic() != 1 {
        return None;
    }
    let mut dead = std::collections::HashSet::new();
    let mut steps = Vec::new();
    if search_collapse(k, s.clone(), &mut steps, &mut dead) {
        Some(steps)
    } else {
        None
    }
}

fn search_collapse(
    k: &TwoComplex,
    mut cur: Subcomplex,
    steps: &mut Vec<CollapseStep>,
    dead: &mut std::collections::HashSet<Subcomplex>,
) -> bool {
    let base = steps.len();
    // Leaf collapses commute with everything else, so take them eagerly.
    loop {
        let vm = vertex_moves(k, &cur);
        let Some(&m) = vm.first() else { break };
        m.apply(&mut cur);
        steps.push(m);
    }
    if cur.is_point() {
        return true;
    }
    if dead.contains(&cur) {
        steps.truncate(base);
        return false;
    }
    for m in edge_moves(k, &cur) {
        let mut next = cur.clone();
        m.apply(&mut next);
        steps.push(m);
        if search_collapse(k, next, steps, dead) {
            return true;
        }
        steps.pop();
    }
    dead.insert(cur);
    steps.truncate(base);
    false
}

/// Boundary and interior of a subcomplex `sub` of `l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryInterior {
    /// Non-interior vertices and edges of `sub` (a graph).
    pub boundary: Subcomplex,
    pub interior_vertices: BTreeSet<usize>,
    pub interior_edges: BTreeSet<usize>,
}

pub fn boundary_interior(l: &TwoComplex, sub: &Subcomplex) -> BoundaryInterior {
    let mut interior_edges = BTreeSet::new();
    for &e in &sub.edges {
        let outside = l
            .cells()
            .iter()
            .enumerate()
            .any(|(c, cell)| !sub.cells.contains(&c) && cell.word.iter().any(|x| x.edge == e));
        if !outside {
            interior_edges.insert(e);
        }
    }
    let mut interior_vertices = BTreeSet::new();
    for &v in &sub.vertices {
        let nodes_in = l.edge_ends_at(v).iter().all(|end| sub.edges.contains(&end.edge));
        let corners_in = l
            .corner_ids()
            .filter(|c| l.corner_vertex(*c) == v)
            .all(|c| sub.cells.contains(&c.cell));
        if nodes_in && corners_in {
            interior_vertices.insert(v);
        }
    }
    let boundary = Subcomplex {
        vertices: sub.vertices.difference(&interior_vertices).copied().collect(),
        edges: sub.edges.difference(&interior_edges).copied().collect(),
        cells: BTreeSet::new(),
    };
    BoundaryInterior { boundary, interior_vertices, interior_edges }
}

/// Vertex heights realising exponent sums along paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heights {
    /// Height per vertex of the graph (indices of the ambient complex);
    /// vertices outside the graph are `None`.
    pub heights: Vec<Option<i64>>,
    pub sources: BTreeSet<usize>,
    pub sinks: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HeightError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("closed path with exponent sum {exponent_sum}")]
    Inconsistent { cycle: Vec<Letter>, exponent_sum: i64 },
}

/// Heights on the 1-skeleton of `k`.
pub fn exponent_heights(k: &TwoComplex) -> Result<Heights, HeightError> {
    exponent_heights_in(k, &Subcomplex::full(k))
}

/// Heights on the graph formed by the vertices and edges of `s`: `h(root)=0`
/// and `+1` along every edge. Fails with a closed path of nonzero exponent
/// sum when no such function exists.
pub fn exponent_heights_in(k: &TwoComplex, s: &Subcomplex) -> Result<Heights, HeightError> {
    let mut heights: Vec<Option<i64>> = vec![None; k.vertex_count()];
    // parent letter used to reach each vertex, pointing away from the root
    let mut via: Vec<Option<Letter>> = vec![None; k.vertex_count()];
    let Some(&root) = s.vertices.iter().next() else {
        return Ok(Heights { heights, sources: BTreeSet::new(), sinks: BTreeSet::new() });
    };
    let mut adj: Vec<Vec<Letter>> = vec![Vec::new(); k.vertex_count()];
    for &e in &s.edges {
        adj[k.edges()[e].src].push(Letter::pos(e));
        adj[k.edges()[e].dst].push(Letter::neg(e));
    }
    heights[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut tree_edges = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        for &l in &adj[u] {
            let w = k.letter_end(l);
            if heights[w].is_none() {
                heights[w] = Some(heights[u].unwrap() + l.sign.value());
                via[w] = Some(l);
                tree_edges.insert(l.edge);
                queue.push_back(w);
            }
        }
    }
    if s.vertices.iter().any(|&v| heights[v].is_none()) {
        return Err(HeightError::Disconnected);
    }
    let path_from_root = |mut v: usize| {
        let mut p = Vec::new();
        while let Some(l) = via[v] {
            p.push(l);
            v = k.letter_start(l);
        }
        p.reverse();
        p
    };
    for &e in &s.edges {
        if tree_edges.contains(&e) {
            continue;
        }
        let ed = &k.edges()[e];
        let (hs, hd) = (heights[ed.src].unwrap(), heights[ed.dst].unwrap());
        if hd != hs + 1 {
            let mut cycle = path_from_root(ed.src);
            cycle.push(Letter::pos(e));
            cycle.extend(path_from_root(ed.dst).into_iter().rev().map(Letter::inverse));
            return Err(HeightError::Inconsistent { cycle, exponent_sum: hs + 1 - hd });
        }
    }
    let hs: Vec<i64> = s.vertices.iter().map(|&v| heights[v].unwrap()).collect();
    let (lo, hi) = (*hs.iter().min().unwrap(), *hs.iter().max().unwrap());
    let sources = s.vertices.iter().copied().filter(|&v| heights[v] == Some(lo)).collect();
    let sinks = s.vertices.iter().copied().filter(|&v| heights[v] == Some(hi)).collect();
    Ok(Heights { heights, sources, sinks })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn torus() -> TwoComplex {
        ComplexBuilder::new("torus")
            .vertex("v")
            .edge("a", "v", "v")
            .edge("b", "v", "v")
            .cell("D", "a b -a -b")
            .build()
            .unwrap()
    }

    fn end(e: usize, s: Sign) -> EdgeEnd {
        EdgeEnd::new(e, s)
    }

    #[test]
    fn torus_link() {
        let k = torus();
        let lk = k.link(0).unwrap();
        assert_eq!(lk.nodes.len(), 4);
        let pairs: Vec<_> = lk.corners.iter().map(|c| (c.a, c.b)).collect();
        use Sign::*;
        assert_eq!(
            pairs,
            vec![
                (end(0, Neg), end(1, Pos)),
                (end(1, Neg), end(0, Neg)),
                (end(0, Pos), end(1, Neg)),
                (end(1, Pos), end(0, Pos)),
            ]
        );
        assert_eq!(lk.euler_characteristic(), 0);
    }

    #[test]
    fn power_link_and_isolated_vertex() {
        let k = ComplexBuilder::new("aa").vertex("v").vertex("w").edge("a", "v", "v").cell("D", "a a").build().unwrap();
        let lk = k.link(0).unwrap();
        assert_eq!(lk.nodes.len(), 2);
        assert_eq!(lk.corners.len(), 2);
        for c in &lk.corners {
            assert_eq!((c.a, c.b), (end(0, Sign::Neg), end(0, Sign::Pos)));
        }
        let iso = k.link(1).unwrap();
        assert!(iso.nodes.is_empty() && iso.corners.is_empty());
        assert!(k.link(7).is_err());
    }

    #[test]
    fn open_word_rejected() {
        let err = ComplexBuilder::new("bad")
            .vertex("u")
            .vertex("w")
            .edge("a", "u", "w")
            .edge("b", "u", "w")
            .cell("D", "a b")
            .build()
            .unwrap_err();
        assert!(matches!(err, ComplexError::OpenWord { .. }));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = ComplexBuilder::new("d").vertex("v").vertex("v").build().unwrap_err();
        assert!(matches!(err, ComplexError::DuplicateId { kind: "vertex", .. }));
    }

    #[test]
    fn euler_counts() {
        let point = ComplexBuilder::new("p").vertex("v").build().unwrap();
        assert_eq!(point.euler_characteristic(), 1);
        assert_eq!(torus().euler_characteristic(), 0);
    }

    #[test]
    fn essential_part_drops_unused_edge() {
        let k = ComplexBuilder::new("k")
            .vertex("v")
            .edge("a", "v", "v")
            .edge("b", "v", "v")
            .cell("D", "a a")
            .build()
            .unwrap();
        let s = Subcomplex::full(&k);
        let ess = essential_part(&k, &s);
        assert_eq!(ess.edges, BTreeSet::from([0]));
        assert_eq!(essential_part(&k, &ess), ess);
        let no_cells = Subcomplex { cells: BTreeSet::new(), ..s };
        assert!(essential_part(&k, &no_cells).is_empty());
        let t = torus();
        assert_eq!(essential_part(&t, &Subcomplex::full(&t)), Subcomplex::full(&t));
    }

    #[test]
    fn free_faces_examples() {
        let disc = ComplexBuilder::new("disc").vertex("v").edge("a", "v", "v").cell("D", "a").build().unwrap();
        assert_eq!(disc.free_faces().edges, BTreeSet::from([0]));
        assert_eq!(torus().free_faces(), FreeFaces::default());
        let seg = ComplexBuilder::new("seg").vertex("u").vertex("v").edge("e", "u", "v").build().unwrap();
        assert_eq!(seg.free_faces().vertices, BTreeSet::from([0, 1]));
        let pt = ComplexBuilder::new("p").vertex("v").build().unwrap();
        assert!(pt.free_faces().vertices.is_empty());
    }

    #[test]
    fn collapsibility() {
        let disc = ComplexBuilder::new("disc").vertex("v").edge("a", "v", "v").cell("D", "a").build().unwrap();
        let w = is_collapsible(&disc).unwrap();
        assert_eq!(2 * w.len(), 2);
        assert!(is_collapsible(&torus()).is_none());
        let seg = ComplexBuilder::new("seg").vertex("u").vertex("v").edge("e", "u", "v").build().unwrap();
        assert!(is_collapsible(&seg).is_some());
        let two = ComplexBuilder::new("two").vertex("u").vertex("v").build().unwrap();
        assert!(is_collapsible(&two).is_none());
    }

    #[test]
    fn collapse_needs_backtracking_free_of_order() {
        // A disc subdivided into two triangles: every greedy order works, and
        // the search returns a full witness.
        let k = ComplexBuilder::new("sq")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge("x", "a", "b")
            .edge("y", "b", "c")
            .edge("z", "a", "c")
            .edge("d", "a", "c")
            .cell("T1", "x y -z")
            .cell("T2", "z -d")
            .build()
            .unwrap();
        let w = is_collapsible(&k).unwrap();
        let mut s = Subcomplex::full(&k);
        for st in &w {
            st.apply(&mut s);
        }
        assert!(s.is_point());
    }

    #[test]
    fn boundary_interior_examples() {
        let t = torus();
        let bi = boundary_interior(&t, &Subcomplex::full(&t));
        assert!(bi.boundary.vertices.is_empty() && bi.boundary.edges.is_empty());
        assert_eq!(bi.interior_vertices.len(), 1);

        let l = ComplexBuilder::new("l")
            .vertex("v")
            .edge("a", "v", "v")
            .edge("b", "v", "v")
            .cell("D", "a b")
            .build()
            .unwrap();
        let s = Subcomplex::closure(&l, [], [0], []);
        let bi = boundary_interior(&l, &s);
        assert!(bi.boundary.edges.contains(&0));
    }

    #[test]
    fn heights() {
        let seg = ComplexBuilder::new("seg").vertex("u").vertex("v").edge("e", "u", "v").build().unwrap();
        let h = exponent_heights(&seg).unwrap();
        assert_eq!(h.heights, vec![Some(0), Some(1)]);
        assert_eq!(h.sources, BTreeSet::from([0]));
        assert_eq!(h.sinks, BTreeSet::from([1]));

        let loop_ = ComplexBuilder::new("l").vertex("v").edge("e", "v", "v").build().unwrap();
        match exponent_heights(&loop_) {
            Err(HeightError::Inconsistent { cycle, exponent_sum }) => {
                assert_eq!(cycle, vec![Letter::pos(0)]);
                assert_eq!(exponent_sum, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let two = ComplexBuilder::new("two").vertex("u").vertex("v").build().unwrap();
        assert_eq!(exponent_heights(&two), Err(HeightError::Disconnected));
    }

    #[test]
    fn inconsistent_witness_is_closed_with_nonzero_sum() {
        let k = ComplexBuilder::new("tri")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge("x", "a", "b")
            .edge("y", "b", "c")
            .edge("z", "a", "c")
            .build()
            .unwrap();
        let Err(HeightError::Inconsistent { cycle, exponent_sum }) = exponent_heights(&k) else {
            panic!("expected inconsistency");
        };
        assert_eq!(TwoComplex::exponent_sum(&cycle), exponent_sum);
        for i in 0..cycle.len() {
            assert_eq!(k.letter_end(cycle[i]), k.letter_start(cycle[(i + 1) % cycle.len()]));
        }
    }
}
