//! Certification of (relative) collapsing non-positive immersion by folding
//! a subcomplex onto one edge and checking the coloring test on the quotient.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{standard_angles, vertex_curvature, vertex_curvature_in, AngleStructure, WeightedLink};
use crate::coloring::{coloring_test, strong_relative_coloring_test, ColoringError, ColoringWitness, LinkStep};
use crate::complex::{boundary_interior, essential_part, free_faces_in, EdgeEnd, Sign, Subcomplex, TwoComplex};
use crate::dsu::Dsu;
use crate::fold::{fold_link_law_holds, fold_to_edge, FoldError, Folded};
use crate::graph::Dart;
use crate::lot::LotCertificate;

pub const MAX_ANGLE_ASSIGNMENTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Strength of the conclusion a certificate supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    None,
    /// `(L, K)` has relative collapsing non-positive immersion.
    RelativeCollapsingNpi,
    /// `L` has collapsing non-positive immersion.
    CollapsingNpi,
}

impl Tier {
    pub fn describe(self) -> &'static str {
        match self {
            Tier::None => "not certified",
            Tier::RelativeCollapsingNpi => "relative collapsing NPI",
            Tier::CollapsingNpi => "collapsing NPI",
        }
    }
}

/// Why the subcomplex itself has collapsing non-positive immersion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KJustification {
    Unjustified,
    /// Declared by the caller, not verified.
    Assumed { reason: String },
    /// The subcomplex has no 2-cells.
    Graph,
    /// The subcomplex passes the coloring test with these angles.
    ColoringTest { angles: AngleStructure },
    Nested(Box<NpiCertificate>),
    Lot(Box<LotCertificate>),
}

impl KJustification {
    pub fn is_justified(&self) -> bool {
        match self {
            KJustification::Unjustified => false,
            KJustification::Assumed { .. } | KJustification::Graph | KJustification::ColoringTest { .. } => true,
            KJustification::Nested(c) => c.conclusion == Tier::CollapsingNpi,
            KJustification::Lot(c) => c.certified,
        }
    }

    /// Unverified assumptions, including nested ones.
    pub fn assumptions(&self) -> Vec<String> {
        match self {
            KJustification::Assumed { reason } => vec![reason.clone()],
            KJustification::Nested(c) => c.assumptions.clone(),
            KJustification::Lot(c) => c.assumptions.clone(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleSource {
    Supplied,
    Standard,
    /// Exhaustive zero/one search; `tried` counts complete assignments.
    Search { tried: u64, exhausted: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertWitness {
    NonzeroExponentSum { cell: String, sum: i64 },
    LinkLaw,
    Coloring(ColoringWitness),
    /// A walk in lk₀ of the folded complex from `y⁺` to `y⁻`.
    FoldEndsJoined { walk: Vec<LinkStep> },
    NoAngleStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpiCertificate {
    pub l: TwoComplex,
    pub k: Subcomplex,
    pub fold_edge: String,
    pub folded: TwoComplex,
    pub angle_source: AngleSource,
    /// Angles on the folded complex, when one was fixed.
    pub angles: Option<AngleStructure>,
    pub checks: Vec<Check>,
    pub witnesses: Vec<CertWitness>,
    pub conclusion: Tier,
    pub k_justification: KJustification,
    pub assumptions: Vec<String>,
}

impl NpiCertificate {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Recomputes the conclusion from the checks and the justification.
    fn conclude(&mut self) {
        self.assumptions = self.k_justification.assumptions();
        self.conclusion = if !self.all_checks_pass() {
            Tier::None
        } else if self.k_justification.is_justified() {
            Tier::CollapsingNpi
        } else {
            Tier::RelativeCollapsingNpi
        };
    }

    /// Attaches a justification for the subcomplex and updates the tier.
    pub fn with_k_justification(mut self, j: KJustification) -> Self {
        self.k_justification = j;
        self.conclude();
        self
    }
}

pub const CHECK_EXPONENT_SUM: &str = "k_cells_exponent_sum_zero";
pub const CHECK_LINK_LAW: &str = "fold_link_law";
pub const CHECK_COLORING: &str = "folded_coloring_test";
pub const CHECK_SEPARATION: &str = "fold_ends_separated";

/// How angles on the folded complex are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AngleChoice {
    Supplied(AngleStructure),
    Standard,
    /// Standard angles first, then an exhaustive zero/one search.
    Search { budget: u64 },
}

/// A walk in lk₀(v, L̄) from `y⁺` to `y⁻`, if they share a component.
pub fn fold_ends_joined(folded: &Folded, w: &AngleStructure) -> Option<Vec<LinkStep>> {
    let lk = folded.complex.link(0).expect("single vertex");
    let wl = WeightedLink::new(lk, w);
    let y = folded.map.fold_edge;
    let plus = wl.link.node_index(EdgeEnd::new(y, Sign::Pos))?;
    let minus = wl.link.node_index(EdgeEnd::new(y, Sign::Neg))?;
    let (_, path) = wl.graph.shortest_path(&BTreeSet::from([plus]), &BTreeSet::from([minus]), Some(&wl.lk0.edges))?;
    Some(path.iter().map(|d: &Dart| LinkStep { corner: wl.link.corners[d.edge].id, forward: d.forward }).collect())
}

fn passes(folded: &Folded, w: &AngleStructure) -> Result<bool, CertifyError> {
    Ok(coloring_test(&folded.complex, w)?.pass && fold_ends_joined(folded, w).is_none())
}

/// Outcome of a bounded zero/one angle search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleSearch {
    pub found: Option<AngleStructure>,
    /// Complete assignments handed to the acceptance predicate.
    pub tried: u64,
    /// The budget ran out before the search space did.
    pub exhausted: bool,
}

/// Lexicographically first zero/one structure (0 before 1, corners in
/// cell/position order) accepted by `accept`. Only assignments with at most
/// `|∂d| − 2` ones per cell and a forest of zero corners in every link are
/// offered, so `accept` must reject everything else anyway (true of any
/// predicate implying the coloring test).
pub fn search_zero_one<E>(
    k: &TwoComplex,
    budget: u64,
    mut accept: impl FnMut(&AngleStructure) -> Result<bool, E>,
) -> Result<AngleSearch, E> {
    let corners: Vec<_> = k.corner_ids().collect();
    let mut offset = vec![0usize; k.vertex_count() + 1];
    let links = k.links();
    for (v, lk) in links.iter().enumerate() {
        offset[v + 1] = offset[v] + lk.nodes.len();
    }
    let ends: Vec<(usize, usize)> = corners
        .iter()
        .map(|&c| {
            let cr = k.corner(c);
            let v = k.corner_vertex(c);
            let node = |e: EdgeEnd| offset[v] + links[v].node_index(e).expect("end at the vertex");
            (node(cr.a), node(cr.b))
        })
        .collect();
    let caps: Vec<i64> = (0..k.cell_count()).map(|d| k.word(d).len() as i64 - 2).collect();
    let mut w = AngleStructure::constant(k, 0);
    let mut ones = vec![0i64; k.cell_count()];
    let mut tried = 0u64;

    // Iterative DFS; `choice[i]` is the next value to try at depth i.
    let n = corners.len();
    let mut choice = vec![0u8; n + 1];
    let mut i = 0usize;
    let zero_forest = |w: &AngleStructure, upto: usize| {
        let mut dsu = Dsu::new(offset[k.vertex_count()]);
        (0..upto).filter(|&j| w.get(corners[j]) == 0).all(|j| dsu.union(ends[j].0, ends[j].1))
    };
    loop {
        if tried >= budget {
            return Ok(AngleSearch { found: None, tried, exhausted: true });
        }
        if i == n {
            tried += 1;
            if accept(&w)? {
                return Ok(AngleSearch { found: Some(w), tried, exhausted: false });
            }
            // Backtrack.
            if n == 0 {
                return Ok(AngleSearch { found: None, tried, exhausted: false });
            }
            i -= 1;
            let c = corners[i];
            ones[c.cell] -= w.get(c);
            continue;
        }
        let c = corners[i];
        let x = choice[i];
        if x > 1 {
            choice[i] = 0;
            if i == 0 {
                return Ok(AngleSearch { found: None, tried, exhausted: false });
            }
            i -= 1;
            let p = corners[i];
            ones[p.cell] -= w.get(p);
            continue;
        }
        choice[i] = x + 1;
        let x = x as i64;
        if ones[c.cell] + x > caps[c.cell] {
            continue;
        }
        w.set(c, x);
        if x == 0 && !zero_forest(&w, i + 1) {
            continue;
        }
        ones[c.cell] += x;
        i += 1;
    }
}

/// [`search_zero_one`] for the coloring test on `y⁺`/`y⁻`-separated
/// structures of the folded complex.
pub fn search_angles(folded: &Folded, budget: u64) -> Result<(Option<AngleStructure>, u64, bool), CertifyError> {
    let s = search_zero_one(&folded.complex, budget, |w| passes(folded, w))?;
    Ok((s.found, s.tried, s.exhausted))
}

/// Fold `K ⊆ L` onto `y` and check the coloring test on the quotient with
/// `y⁺` and `y⁻` in different components of lk₀.
pub fn certify_fold(l: &TwoComplex, k: &Subcomplex, y: usize, choice: AngleChoice) -> Result<NpiCertificate, CertifyError> {
    if l.vertex_count() != 1 {
        return Err(FoldError::NotSingleVertex(l.vertex_count()).into());
    }
    if !k.is_face_closed(l) {
        return Err(FoldError::NotFaceClosed.into());
    }
    if !k.edges.contains(&y) {
        return Err(FoldError::EdgeNotInSub(l.edges().get(y).map_or(y.to_string(), |e| e.name.clone())).into());
    }
    let mut checks = Vec::new();
    let mut witnesses = Vec::new();
    let mut bad_sum = false;
    for &c in &k.cells {
        let sum = TwoComplex::exponent_sum(l.word(c));
        if sum != 0 {
            bad_sum = true;
            witnesses.push(CertWitness::NonzeroExponentSum { cell: l.cells()[c].name.clone(), sum });
        }
    }
    checks.push(Check { name: CHECK_EXPONENT_SUM.into(), pass: !bad_sum });
    if bad_sum {
        return Err(CertifyError::Precondition(format!(
            "a cell of the subcomplex has nonzero exponent sum: {witnesses:?}"
        )));
    }
    let folded = fold_to_edge(l, k, y)?;
    let law = fold_link_law_holds(l, k, &folded);
    checks.push(Check { name: CHECK_LINK_LAW.into(), pass: law });
    if !law {
        witnesses.push(CertWitness::LinkLaw);
    }

    let (angles, angle_source) = match choice {
        AngleChoice::Supplied(w) => {
            w.check_zero_one(&folded.complex).map_err(ColoringError::from)?;
            (Some(w), AngleSource::Supplied)
        }
        AngleChoice::Standard => (Some(standard_angles(&folded.complex)), AngleSource::Standard),
        AngleChoice::Search { budget } => {
            let std = standard_angles(&folded.complex);
            if passes(&folded, &std)? {
                (Some(std), AngleSource::Standard)
            } else {
                let (found, tried, exhausted) = search_angles(&folded, budget)?;
                (found, AngleSource::Search { tried, exhausted })
            }
        }
    };

    match &angles {
        Some(w) => {
            let verdict = coloring_test(&folded.complex, w)?;
            checks.push(Check { name: CHECK_COLORING.into(), pass: verdict.pass });
            witnesses.extend(verdict.witnesses.into_iter().map(CertWitness::Coloring));
            let joined = fold_ends_joined(&folded, w);
            checks.push(Check { name: CHECK_SEPARATION.into(), pass: joined.is_none() });
            if let Some(walk) = joined {
                witnesses.push(CertWitness::FoldEndsJoined { walk });
            }
        }
        None => {
            checks.push(Check { name: CHECK_COLORING.into(), pass: false });
            witnesses.push(CertWitness::NoAngleStructure);
        }
    }

    let mut cert = NpiCertificate {
        l: l.clone(),
        k: k.clone(),
        fold_edge: l.edges()[y].name.clone(),
        folded: folded.complex,
        angle_source,
        angles,
        checks,
        witnesses,
        conclusion: Tier::None,
        k_justification: if essential_part(l, k).cells.is_empty() { KJustification::Graph } else { KJustification::Unjustified },
        assumptions: Vec::new(),
    };
    cert.conclude();
    Ok(cert)
}

/// [`certify_fold`] with the standard angles on the folded complex.
pub fn certify_standard(l: &TwoComplex, k: &Subcomplex, y: usize) -> Result<NpiCertificate, CertifyError> {
    certify_fold(l, k, y, AngleChoice::Standard)
}

/// Justifies the subcomplex by the coloring test with standard angles on
/// its essential part, when that passes.
pub fn justify_by_standard_coloring(l: &TwoComplex, k: &Subcomplex) -> Option<KJustification> {
    let ess = essential_part(l, k);
    if ess.cells.is_empty() {
        return Some(KJustification::Graph);
    }
    let sub = l.extract(&ess).complex;
    let w = standard_angles(&sub);
    coloring_test(&sub, &w).ok().filter(|v| v.pass).map(|_| KJustification::ColoringTest { angles: w })
}

pub fn emit_certificate(cert: &NpiCertificate) -> String {
    serde_json::to_string_pretty(cert).expect("certificate serializes")
}

pub fn parse_certificate(text: &str) -> Result<NpiCertificate, serde_json::Error> {
    serde_json::from_str(text)
}

/// Which sufficient condition placed a vertex in the drop set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropClause {
    /// Valency 0 in ∂Y.
    Isolated,
    /// Valency 1 in ∂Y.
    Valency1,
    /// lk₀(v, Y) connected.
    ConnectedLink,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropVertex {
    pub vertex: usize,
    pub clause: DropClause,
    pub kappa_x: i64,
    pub kappa_y: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    /// Vertices of ∂Y where a clause fires and κ(v, X) < κ(v, Y) holds.
    pub vertices: Vec<DropVertex>,
    /// Vertices where a clause fires but the inequality fails.
    pub unconfirmed: Vec<DropVertex>,
}

/// Boundary vertices of `Y ⊆ X` where curvature provably drops. Clauses
/// are sufficient, not necessary: vertices where no clause fires are not
/// reported even if the inequality holds there.
pub fn curvature_drop_vertices(x: &TwoComplex, y: &Subcomplex, w: &AngleStructure) -> Result<DropReport, CertifyError> {
    if !strong_relative_coloring_test(x, y, w)?.pass {
        return Err(CertifyError::Precondition("pair fails the strong relative coloring test".into()));
    }
    if x.has_free_faces() {
        return Err(CertifyError::Precondition("complex has a free face".into()));
    }
    if essential_part(x, y) != *y {
        return Err(CertifyError::Precondition("subcomplex is not essential".into()));
    }
    let bi = boundary_interior(x, y);
    let mut valency = vec![0usize; x.vertex_count()];
    for &e in &bi.boundary.edges {
        valency[x.edges()[e].src] += 1;
        valency[x.edges()[e].dst] += 1;
    }
    let mut report = DropReport::default();
    for &v in &bi.boundary.vertices {
        let clause = match valency[v] {
            0 => Some(DropClause::Isolated),
            1 => Some(DropClause::Valency1),
            _ => {
                let wl = WeightedLink::new(x.link_in(y, v), w);
                (wl.lk0_graph().component_count() == 1).then_some(DropClause::ConnectedLink)
            }
        };
        let Some(clause) = clause else { continue };
        let kappa_x = vertex_curvature(x, w, v).expect("vertex in range");
        let kappa_y = vertex_curvature_in(x, y, w, v);
        let d = DropVertex { vertex: v, clause, kappa_x, kappa_y };
        if kappa_x < kappa_y {
            report.vertices.push(d);
        } else {
            report.unconfirmed.push(d);
        }
    }
    Ok(report)
}

/// Free faces of the essential part, for diagnostics in reports.
pub fn essential_free_faces(k: &TwoComplex, s: &Subcomplex) -> crate::complex::FreeFaces {
    free_faces_in(k, &essential_part(k, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexBuilder;

    fn hnn_pair(k: usize) -> (TwoComplex, Subcomplex) {
        let ys = vec!["y1"; k].join(" ");
        let inv = vec!["-y2"; k].join(" ");
        let l = ComplexBuilder::new("hnn")
            .vertex("v")
            .edge("x", "v", "v")
            .edge("y1", "v", "v")
            .edge("y2", "v", "v")
            .cell("c", "y1 y2 -y1 -y2")
            .cell("r", &format!("x {ys} -x {inv}"))
            .build()
            .unwrap();
        let s = Subcomplex::closure(&l, [], [], [0]);
        (l, s)
    }

    #[test]
    fn hnn_certifies() {
        for n in 1..5 {
            let (l, k) = hnn_pair(n);
            let c = certify_standard(&l, &k, 1).unwrap();
            assert!(c.all_checks_pass(), "{n}: {:?}", c.checks);
            assert_eq!(c.conclusion, Tier::RelativeCollapsingNpi);
            let j = justify_by_standard_coloring(&l, &k).unwrap();
            let c2 = c.clone().with_k_justification(j);
            assert_eq!(c2.conclusion, Tier::CollapsingNpi);
            assert_eq!(parse_certificate(&emit_certificate(&c2)).unwrap(), c2);
        }
    }

    #[test]
    fn xyxy_has_no_structure() {
        let l = ComplexBuilder::new("P")
            .vertex("v")
            .edge("x", "v", "v")
            .edge("y1", "v", "v")
            .edge("y2", "v", "v")
            .cell("r1", "y1 y2 -y1 -y2")
            .cell("r2", "x y1 x y2")
            .build()
            .unwrap();
        let k = Subcomplex::closure(&l, [], [], [0]);
        let std = certify_standard(&l, &k, 1).unwrap();
        assert_eq!(std.conclusion, Tier::None);
        assert!(std.witnesses.contains(&CertWitness::Coloring(ColoringWitness::PositiveCell { cell: 0, curvature: 2 })));
        let s = certify_fold(&l, &k, 1, AngleChoice::Search { budget: MAX_ANGLE_ASSIGNMENTS }).unwrap();
        assert_eq!(s.conclusion, Tier::None);
        assert!(matches!(s.angle_source, AngleSource::Search { exhausted: false, .. }));
    }

    #[test]
    fn nonzero_exponent_sum_rejected() {
        let l = ComplexBuilder::new("p").vertex("v").edge("y", "v", "v").cell("c", "y y").build().unwrap();
        let k = Subcomplex::full(&l);
        assert!(matches!(certify_standard(&l, &k, 0), Err(CertifyError::Precondition(_))));
        let torus = ComplexBuilder::new("t").vertex("v").edge("a", "v", "v").edge("b", "v", "v").cell("D", "a b -a -b").build().unwrap();
        assert!(certify_standard(&torus, &Subcomplex::empty(), 0).is_err());
    }

    #[test]
    fn drop_vertices_trivial() {
        let (l, _) = hnn_pair(1);
        let w = standard_angles(&l);
        let full = Subcomplex::full(&l);
        assert!(curvature_drop_vertices(&l, &full, &w).unwrap().vertices.is_empty());
    }
}
