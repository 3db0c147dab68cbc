//! Labeled oriented graphs and trees: parsing, presentation complexes,
//! reductions, sub-LOTs, bi-forest angle structures and certification by
//! folding a sub-LOT.
//!
//! ```text
//! lot gamma
//! edge 1 2 3
//! edge 2 3 1
//! sub G1 edges 0 1
//! ```
//!
//! Edge indices in `sub` lines are 0-based in edge line order. Without
//! `vertex` lines the vertex set is the set of edge endpoints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::AngleStructure;
use crate::certify::{certify_fold, AngleChoice, Check, KJustification, NpiCertificate, Tier};
use crate::coloring::coloring_test;
use crate::complex::{Cell, Edge, EdgeEnd, Letter, Sign, Subcomplex, TwoComplex};
use crate::dsu::Dsu;
use crate::error::{ComplexError, ParseError};

pub const MAX_SUBLOT_EDGES: usize = 20;
pub const MAX_BIFOREST_EDGES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LotError {
    #[error("unknown LOT vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("duplicate LOT vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge set is not a sub-LOT")]
    NotSubLot,
    #[error("sub-LOT enumeration is capped at {MAX_SUBLOT_EDGES} edges, found {0}")]
    TooManyEdges(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LotEdge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// A labeled oriented graph. Vertices are indices into `vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Log {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<LotEdge>,
    /// Named edge sets declared alongside the graph.
    pub subs: Vec<(String, BTreeSet<usize>)>,
}

impl Log {
    pub fn new(name: impl Into<String>, vertices: Vec<String>, edges: Vec<LotEdge>) -> Result<Self, LotError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(LotError::DuplicateVertex(v.clone()));
            }
        }
        for e in &edges {
            for x in [e.src, e.dst, e.label] {
                if x >= vertices.len() {
                    return Err(LotError::UnknownVertex(x.to_string()));
                }
            }
        }
        Ok(Log { name: name.into(), vertices, edges, subs: Vec::new() })
    }

    /// Builds a graph from `(src, dst, label)` name triples; vertices are
    /// the endpoints in order of first appearance.
    pub fn from_triples(name: &str, triples: &[(&str, &str, &str)]) -> Result<Self, LotError> {
        let mut vertices: Vec<String> = Vec::new();
        for (s, t, _) in triples {
            for x in [s, t] {
                if !vertices.iter().any(|v| v == x) {
                    vertices.push(x.to_string());
                }
            }
        }
        let idx = |x: &str| vertices.iter().position(|v| v == x).ok_or_else(|| LotError::UnknownVertex(x.to_string()));
        let edges = triples
            .iter()
            .map(|(s, t, l)| Ok(LotEdge { src: idx(s)?, dst: idx(t)?, label: idx(l)? }))
            .collect::<Result<Vec<_>, LotError>>()?;
        Log::new(name, vertices, edges)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn sub(&self, name: &str) -> Option<&BTreeSet<usize>> {
        self.subs.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn all_edges(&self) -> BTreeSet<usize> {
        (0..self.edges.len()).collect()
    }

    /// Whether the underlying undirected graph is a tree.
    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty() && self.edges.len() + 1 == self.vertices.len() && self.is_connected_on(&self.all_edges(), &self.all_vertices())
    }

    fn all_vertices(&self) -> BTreeSet<usize> {
        (0..self.vertices.len()).collect()
    }

    fn is_connected_on(&self, edges: &BTreeSet<usize>, vertices: &BTreeSet<usize>) -> bool {
        let mut dsu = Dsu::new(self.vertices.len());
        for &e in edges {
            dsu.union(self.edges[e].src, self.edges[e].dst);
        }
        let mut roots = vertices.iter().map(|&v| dsu.find(v));
        match roots.next() {
            Some(r) => roots.all(|x| x == r),
            None => true,
        }
    }

    /// Endpoints of the given edges.
    pub fn span(&self, edges: &BTreeSet<usize>) -> BTreeSet<usize> {
        edges.iter().flat_map(|&e| [self.edges[e].src, self.edges[e].dst]).collect()
    }

    fn valency_in(&self, edges: &BTreeSet<usize>, v: usize) -> usize {
        edges.iter().map(|&e| usize::from(self.edges[e].src == v) + usize::from(self.edges[e].dst == v)).sum()
    }

    /// The subgraph on `edges` and their endpoints, keeping vertex names
    /// and relative order. Declared subs are dropped.
    pub fn restrict(&self, edges: &BTreeSet<usize>, vertices: &BTreeSet<usize>) -> Log {
        let keep: Vec<usize> = vertices.iter().copied().collect();
        let map = |v: usize| keep.iter().position(|&x| x == v).expect("vertex kept");
        Log {
            name: self.name.clone(),
            vertices: keep.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges: edges
                .iter()
                .map(|&e| {
                    let x = self.edges[e];
                    LotEdge { src: map(x.src), dst: map(x.dst), label: map(x.label) }
                })
                .collect(),
            subs: Vec::new(),
        }
    }
}

pub fn parse_lot(text: &str) -> Result<Log, ParseError> {
    let mut name = String::from("lot");
    let mut declared: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, [String; 3])> = Vec::new();
    let mut subs: Vec<(usize, String, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["lot", n] => name = n.to_string(),
            ["vertex", v] => declared.push((line, v.to_string())),
            ["edge", s, t, l] => edges.push((line, [s.to_string(), t.to_string(), l.to_string()])),
            ["sub", n, "edges", rest @ ..] => {
                let idx = rest
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|_| ParseError::malformed(line, format!("bad edge index `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                subs.push((line, n.to_string(), idx));
            }
            _ => return Err(ParseError::malformed(line, format!("unrecognised line `{}`", content.trim()))),
        }
    }
    let mut vertices: Vec<String> = Vec::new();
    for (line, v) in &declared {
        if !crate::complex::valid_id(v) {
            return Err(ParseError::complex(*line, ComplexError::InvalidId(v.clone())));
        }
        if vertices.contains(v) {
            return Err(ParseError::complex(*line, ComplexError::DuplicateId { kind: "vertex", id: v.clone() }));
        }
        vertices.push(v.clone());
    }
    if declared.is_empty() {
        for (line, [s, t, _]) in &edges {
            for x in [s, t] {
                if !crate::complex::valid_id(x) {
                    return Err(ParseError::complex(*line, ComplexError::InvalidId(x.clone())));
                }
                if !vertices.contains(x) {
                    vertices.push(x.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    for (line, names) in &edges {
        let mut ids = [0; 3];
        for (slot, x) in ids.iter_mut().zip(names) {
            *slot = vertices
                .iter()
                .position(|v| v == x)
                .ok_or_else(|| ParseError::complex(*line, ComplexError::UnknownVertex(x.clone())))?;
        }
        out.push(LotEdge { src: ids[0], dst: ids[1], label: ids[2] });
    }
    let mut log = Log::new(name, vertices, out).map_err(|e| ParseError::malformed(0, e.to_string()))?;
    for (line, n, idx) in subs {
        if let Some(&bad) = idx.iter().find(|&&e| e >= log.edges.len()) {
            return Err(ParseError::malformed(line, format!("edge index {bad} out of range")));
        }
        if log.sub(&n).is_some() {
            return Err(ParseError::complex(line, ComplexError::DuplicateId { kind: "sub", id: n }));
        }
        log.subs.push((n, idx.into_iter().collect()));
    }
    Ok(log)
}

pub fn write_lot(g: &Log) -> String {
    let mut s = format!("lot {}\n", g.name);
    for v in &g.vertices {
        s += &format!("vertex {v}\n");
    }
    for e in &g.edges {
        s += &format!("edge {} {} {}\n", g.vertices[e.src], g.vertices[e.dst], g.vertices[e.label]);
    }
    for (n, es) in &g.subs {
        let idx: Vec<String> = es.iter().map(|e| e.to_string()).collect();
        s += &format!("sub {n} edges {}\n", idx.join(" "));
    }
    s
}

/// The presentation complex: one vertex `v`, one loop per LOT vertex, and
/// for edge `e` a cell `r{e}` with word `s(e) λ(e) t(e)⁻¹ λ(e)⁻¹`.
pub fn lot_complex(g: &Log) -> TwoComplex {
    let edges = g.vertices.iter().map(|v| Edge { name: v.clone(), src: 0, dst: 0 }).collect();
    let cells = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Cell {
            name: format!("r{i}"),
            word: vec![Letter::pos(e.src), Letter::pos(e.label), Letter::neg(e.dst), Letter::neg(e.label)],
        })
        .collect();
    TwoComplex::new(g.name.clone(), vec!["v".into()], edges, cells).expect("relator words are closed")
}

/// The subcomplex of [`lot_complex`] coming from a set of LOT edges.
pub fn lot_subcomplex(g: &Log, k: &TwoComplex, edges: &BTreeSet<usize>) -> Subcomplex {
    Subcomplex::closure(k, [], g.span(edges), edges.iter().copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionFlags {
    pub boundary_reduced: bool,
    pub interior_reduced: bool,
    pub compressed: bool,
    pub reduced: bool,
    pub injective: bool,
}

/// A vertex of valency 1 in the subgraph on `edges` that is not the label
/// of any of those edges.
pub fn boundary_reducible_vertex(g: &Log, edges: &BTreeSet<usize>) -> Option<usize> {
    let labels: BTreeSet<usize> = edges.iter().map(|&e| g.edges[e].label).collect();
    g.span(edges).into_iter().find(|&v| g.valency_in(edges, v) == 1 && !labels.contains(&v))
}

pub fn reduction_flags(g: &Log) -> ReductionFlags {
    let all = g.all_edges();
    let boundary_reduced = (0..g.vertices.len()).all(|v| g.valency_in(&all, v) != 1 || g.edges.iter().any(|e| e.label == v));
    let interior_reduced = (0..g.vertices.len()).all(|v| {
        let out: Vec<usize> = g.edges.iter().filter(|e| e.src == v).map(|e| e.label).collect();
        let inc: Vec<usize> = g.edges.iter().filter(|e| e.dst == v).map(|e| e.label).collect();
        distinct(&out) && distinct(&inc)
    });
    let compressed = g.edges.iter().all(|e| e.label != e.src && e.label != e.dst);
    let injective = distinct(&g.edges.iter().map(|e| e.label).collect::<Vec<_>>());
    ReductionFlags {
        boundary_reduced,
        interior_reduced,
        compressed,
        reduced: boundary_reduced && interior_reduced && compressed,
        injective,
    }
}

fn distinct(xs: &[usize]) -> bool {
    xs.iter().collect::<BTreeSet<_>>().len() == xs.len()
}

/// Edges and vertices left after repeatedly deleting a valency-1 vertex
/// that is not a label, together with its edge.
pub fn core_parts(g: &Log) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut edges = g.all_edges();
    let mut vertices = g.all_vertices();
    loop {
        let labels: BTreeSet<usize> = edges.iter().map(|&e| g.edges[e].label).collect();
        let Some(v) = vertices.iter().copied().find(|&v| g.valency_in(&edges, v) == 1 && !labels.contains(&v)) else {
            return (edges, vertices);
        };
        let e = *edges.iter().find(|&&e| g.edges[e].src == v || g.edges[e].dst == v).expect("valency 1");
        edges.remove(&e);
        vertices.remove(&v);
    }
}

pub fn core(g: &Log) -> Log {
    let (edges, vertices) = core_parts(g);
    let mut c = g.restrict(&edges, &vertices);
    c.name = format!("{}_core", g.name);
    c
}

/// Whether `edges` spans a sub-LOT: nonempty, connected, and closed under
/// labels.
pub fn is_sublot(g: &Log, edges: &BTreeSet<usize>) -> bool {
    if edges.is_empty() || edges.iter().any(|&e| e >= g.edges.len()) {
        return false;
    }
    let span = g.span(edges);
    edges.iter().all(|&e| span.contains(&g.edges[e].label)) && g.is_connected_on(edges, &span)
}

/// All sub-LOTs as edge sets, ordered by bitmask value.
pub fn sub_lots(g: &Log) -> Result<Vec<BTreeSet<usize>>, LotError> {
    let n = g.edges.len();
    if n > MAX_SUBLOT_EDGES {
        return Err(LotError::TooManyEdges(n));
    }
    Ok((1u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .filter(|s| is_sublot(g, s))
        .collect())
}

/// The first sub-LOT that is not boundary reduced, with its offending
/// vertex.
pub fn has_boundary_reducible_sublot(g: &Log) -> Result<Option<(BTreeSet<usize>, usize)>, LotError> {
    Ok(sub_lots(g)?.into_iter().find_map(|s| boundary_reducible_vertex(g, &s).map(|v| (s, v))))
}

/// Identifies the sub-LOT on `sub` to `v0`: its vertices merge into `v0`,
/// its edges vanish, and labels naming its vertices become `v0`.
pub fn collapse_sublot(g: &Log, sub: &BTreeSet<usize>, v0: usize) -> Result<Log, LotError> {
    if !is_sublot(g, sub) {
        return Err(LotError::NotSubLot);
    }
    let span = g.span(sub);
    if !span.contains(&v0) {
        return Err(LotError::UnknownVertex(g.vertices.get(v0).cloned().unwrap_or_else(|| v0.to_string())));
    }
    let keep: Vec<usize> = (0..g.vertices.len()).filter(|v| *v == v0 || !span.contains(v)).collect();
    let map = |v: usize| {
        let v = if span.contains(&v) { v0 } else { v };
        keep.iter().position(|&x| x == v).expect("kept")
    };
    let edges = (0..g.edges.len())
        .filter(|e| !sub.contains(e))
        .map(|e| {
            let x = g.edges[e];
            LotEdge { src: map(x.src), dst: map(x.dst), label: map(x.label) }
        })
        .collect();
    Log::new(format!("{}_bar", g.name), keep.iter().map(|&v| g.vertices[v].clone()).collect(), edges)
}

/// A sign per edge of a one-vertex complex such that the link spanned by
/// the chosen ends, and the link spanned by the opposite ends, are forests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiForest {
    pub epsilon: Vec<Sign>,
    pub angles: AngleStructure,
}

/// Searches sign choices in lexicographic order (`+` before `-`). The
/// angles put 0 on corners inside either spanned forest and 1 elsewhere;
/// a choice is returned only if those angles pass the coloring test.
pub fn biforest_angles(k: &TwoComplex) -> Option<BiForest> {
    let n = k.edge_count();
    if k.vertex_count() != 1 || n > MAX_BIFOREST_EDGES {
        return None;
    }
    let lk = k.link(0).ok()?;
    let node = |e: EdgeEnd| 2 * e.edge + usize::from(e.sign == Sign::Neg);
    for mask in 0u32..(1 << n) {
        let eps: Vec<Sign> = (0..n).map(|i| if mask >> (n - 1 - i) & 1 == 0 { Sign::Pos } else { Sign::Neg }).collect();
        let side = |e: EdgeEnd| e.sign == eps[e.edge];
        let mut dsu = Dsu::new(2 * n);
        let forests = lk
            .corners
            .iter()
            .filter(|c| side(c.a) == side(c.b))
            .all(|c| dsu.union(node(c.a), node(c.b)));
        if !forests {
            continue;
        }
        let mut angles = AngleStructure::constant(k, 1);
        for c in &lk.corners {
            if side(c.a) == side(c.b) {
                angles.set(c.id, 0);
            }
        }
        if coloring_test(k, &angles).is_ok_and(|v| v.pass) {
            return Some(BiForest { epsilon: eps, angles });
        }
    }
    None
}

/// How the complex of a LOT's core is shown to have collapsing
/// non-positive immersion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LotRoute {
    /// The core has no edges, so its complex is a wedge of circles.
    TrivialCore,
    /// A bi-forest structure on the core's complex passes the coloring test.
    BiForest(BiForest),
    /// Folding a sub-LOT of the core to one of its vertices.
    Fold {
        sub_edges: BTreeSet<usize>,
        collapse_vertex: String,
        quotient: Option<Log>,
        biforest: Option<BiForest>,
        fold: Option<Box<NpiCertificate>>,
    },
    Assumed { reason: String },
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotCertificate {
    pub lot: Log,
    /// The route applies to the complex of the core; it carries over to
    /// the whole LOT because immersions without free faces land in it.
    pub core: Log,
    pub checks: Vec<Check>,
    pub witnesses: Vec<String>,
    pub route: LotRoute,
    pub certified: bool,
    pub assumptions: Vec<String>,
}

impl LotCertificate {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }
}

/// How the complex of the folded sub-LOT is justified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubJustification {
    /// Recursive search via the core, the bi-forest base case and folds.
    Auto,
    Assume(String),
}

fn check(checks: &mut Vec<Check>, name: &str, pass: bool) -> bool {
    checks.push(Check { name: name.into(), pass });
    pass
}

/// Certifies a LOT by folding the sub-LOT on `sub` to `v0`.
pub fn certify_lot(g: &Log, sub: &BTreeSet<usize>, v0: usize, just: &SubJustification) -> LotCertificate {
    let mut checks = Vec::new();
    let mut witnesses = Vec::new();
    let flags = reduction_flags(g);
    let mut ok = check(&mut checks, "lot_is_tree", g.is_tree());
    ok &= check(&mut checks, "lot_reduced", flags.reduced);
    ok &= check(&mut checks, "lot_injective", flags.injective);
    let is_sub = is_sublot(g, sub) && g.span(sub).contains(&v0);
    ok &= check(&mut checks, "sub_lot_valid", is_sub);
    let name = g.vertices.get(v0).cloned().unwrap_or_default();
    let mut route = LotRoute::Fold { sub_edges: sub.clone(), collapse_vertex: name, quotient: None, biforest: None, fold: None };
    let mut assumptions = Vec::new();
    if ok {
        let bar = collapse_sublot(g, sub, v0).expect("validated sub-LOT");
        let bar_flags = reduction_flags(&bar);
        ok &= check(&mut checks, "quotient_reduced", bar_flags.reduced);
        let reducible = has_boundary_reducible_sublot(&bar);
        let no_reducible = matches!(reducible, Ok(None));
        if let Ok(Some((s, v))) = &reducible {
            witnesses.push(format!("boundary reducible sub-LOT {:?} at vertex {}", s, bar.vertices[*v]));
        }
        if let Err(e) = &reducible {
            witnesses.push(e.to_string());
        }
        ok &= check(&mut checks, "quotient_no_boundary_reducible_sublot", no_reducible);
        let l = lot_complex(g);
        let k = lot_subcomplex(g, &l, sub);
        let sub_log = g.restrict(sub, &g.span(sub));
        let k_just = match just {
            SubJustification::Assume(r) => KJustification::Assumed { reason: r.clone() },
            SubJustification::Auto => KJustification::Lot(Box::new(justify_lot(&sub_log))),
        };
        let folded_bar = lot_complex(&bar);
        let bf = biforest_angles(&folded_bar);
        ok &= check(&mut checks, "biforest_angles_found", bf.is_some());
        let fold = bf.as_ref().map(|b| {
            certify_fold(&l, &k, v0, AngleChoice::Supplied(b.angles.clone()))
                .expect("preconditions hold for LOT complexes")
                .with_k_justification(k_just.clone())
        });
        if let Some(f) = &fold {
            let same = f.folded.edges() == folded_bar.edges()
                && f.folded.cells().iter().zip(folded_bar.cells()).all(|(a, b)| a.word == b.word)
                && f.folded.cell_count() == folded_bar.cell_count();
            ok &= check(&mut checks, "fold_is_quotient_complex", same);
            ok &= check(&mut checks, "fold_checks_pass", f.all_checks_pass());
            ok &= check(&mut checks, "sub_justified", k_just.is_justified());
            ok &= f.conclusion == Tier::CollapsingNpi;
            assumptions = f.assumptions.clone();
        }
        if let LotRoute::Fold { quotient, biforest, fold: slot, .. } = &mut route {
            *quotient = Some(bar);
            *biforest = bf;
            *slot = fold.map(Box::new);
        }
    }
    LotCertificate { lot: g.clone(), core: g.clone(), checks, witnesses, route, certified: ok, assumptions }
}

/// Searches for a justification of collapsing non-positive immersion for
/// the complex of a LOT: reduce to the core, then try the bi-forest base
/// case, then folds along proper sub-LOTs of the core.
pub fn justify_lot(g: &Log) -> LotCertificate {
    let c = core(g);
    let mut checks = Vec::new();
    let base = |route: LotRoute, checks: Vec<Check>, certified: bool| LotCertificate {
        lot: g.clone(),
        core: c.clone(),
        checks,
        witnesses: Vec::new(),
        route,
        certified,
        assumptions: Vec::new(),
    };
    if c.edges.is_empty() {
        return base(LotRoute::TrivialCore, checks, true);
    }
    let flags = reduction_flags(&c);
    let subs = sub_lots(&c);
    let clean = matches!(has_boundary_reducible_sublot(&c), Ok(None));
    if check(&mut checks, "core_base_case", flags.reduced && flags.injective && clean) {
        if let Some(bf) = biforest_angles(&lot_complex(&c)) {
            checks.push(Check { name: "biforest_angles_found".into(), pass: true });
            return base(LotRoute::BiForest(bf), checks, true);
        }
        checks.push(Check { name: "biforest_angles_found".into(), pass: false });
    }
    let all = c.all_edges();
    for s in subs.unwrap_or_default().into_iter().filter(|s| *s != all) {
        for v0 in c.span(&s) {
            let mut cert = certify_lot(&c, &s, v0, &SubJustification::Auto);
            if cert.certified {
                cert.lot = g.clone();
                cert.core = c.clone();
                return cert;
            }
        }
    }
    base(LotRoute::Failed, checks, false)
}
