//! Folding a subcomplex of a one-vertex complex onto a single edge.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Cell, CornerId, Edge, EdgeEnd, Letter, Subcomplex, TwoComplex};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FoldError {
    #[error("folding needs a complex with exactly one vertex, found {0}")]
    NotSingleVertex(usize),
    #[error("subcomplex is not face-closed")]
    NotFaceClosed,
    #[error("fold edge {0} is not an edge of the subcomplex")]
    EdgeNotInSub(String),
    #[error("cell {cell} of the subcomplex has exponent sum {sum}")]
    NonzeroExponentSum { cell: String, sum: i64 },
    #[error("invalid name for the fold edge: {0}")]
    BadName(String),
}

/// Where each piece of `L` goes in the folded complex. Cells of `K` have no
/// image cell: they fold onto the edge `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldMap {
    pub edge_map: Vec<usize>,
    pub cell_map: Vec<Option<usize>>,
    /// Index of `y` in the folded complex.
    pub fold_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Folded {
    pub complex: TwoComplex,
    pub map: FoldMap,
}

pub fn check_fold_preconditions(l: &TwoComplex, k: &Subcomplex, y: usize) -> Result<(), FoldError> {
    if l.vertex_count() != 1 {
        return Err(FoldError::NotSingleVertex(l.vertex_count()));
    }
    if !k.is_face_closed(l) {
        return Err(FoldError::NotFaceClosed);
    }
    if !k.edges.contains(&y) {
        return Err(FoldError::EdgeNotInSub(l.edges().get(y).map(|e| e.name.clone()).unwrap_or_else(|| y.to_string())));
    }
    for &c in &k.cells {
        let sum = TwoComplex::exponent_sum(l.word(c));
        if sum != 0 {
            return Err(FoldError::NonzeroExponentSum { cell: l.cells()[c].name.clone(), sum });
        }
    }
    Ok(())
}

/// Folds `K ⊆ L` onto the edge `y`, keeping `y`'s name.
pub fn fold_to_edge(l: &TwoComplex, k: &Subcomplex, y: usize) -> Result<Folded, FoldError> {
    let name = l.edges().get(y).map(|e| e.name.clone()).unwrap_or_default();
    fold_to_edge_named(l, k, y, &name)
}

/// Folds `K ⊆ L` onto the edge `y`, naming the image edge `new_name`.
///
/// Edges of `K` all map to `y`; the other edges keep their order. Cells of
/// `K` are dropped; the remaining cells keep their words with `K` edges
/// replaced by `y`, so corner positions are unchanged.
pub fn fold_to_edge_named(l: &TwoComplex, k: &Subcomplex, y: usize, new_name: &str) -> Result<Folded, FoldError> {
    check_fold_preconditions(l, k, y)?;
    if !crate::complex::valid_id(new_name) || l.edges().iter().enumerate().any(|(i, e)| e.name == new_name && !k.edges.contains(&i)) {
        return Err(FoldError::BadName(new_name.to_string()));
    }
    let mut edges = Vec::new();
    let mut edge_map = vec![usize::MAX; l.edge_count()];
    let mut fold_edge = usize::MAX;
    for (i, e) in l.edges().iter().enumerate() {
        if k.edges.contains(&i) {
            if i == y {
                fold_edge = edges.len();
                edges.push(Edge { name: new_name.to_string(), src: 0, dst: 0 });
            }
        } else {
            edge_map[i] = edges.len();
            edges.push(e.clone());
        }
    }
    for &e in &k.edges {
        edge_map[e] = fold_edge;
    }
    let mut cells = Vec::new();
    let mut cell_map = vec![None; l.cell_count()];
    for (i, c) in l.cells().iter().enumerate() {
        if k.cells.contains(&i) {
            continue;
        }
        cell_map[i] = Some(cells.len());
        cells.push(Cell {
            name: c.name.clone(),
            word: c.word.iter().map(|x| Letter::new(edge_map[x.edge], x.sign)).collect(),
        });
    }
    let complex = TwoComplex::new(format!("{}_folded", l.name()), l.vertices().to_vec(), edges, cells)
        .expect("folding a valid one-vertex complex yields a valid complex");
    Ok(Folded { complex, map: FoldMap { edge_map, cell_map, fold_edge } })
}

/// A link with nodes named by edge ends of the folded complex, as a sorted
/// multiset of corners `(cell, pos, {a, b})`.
pub type CanonicalLink = Vec<(usize, usize, EdgeEnd, EdgeEnd)>;

fn canonical(corners: impl Iterator<Item = (CornerId, EdgeEnd, EdgeEnd)>) -> CanonicalLink {
    let mut v: CanonicalLink = corners
        .map(|(id, a, b)| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (id.cell, id.pos, a, b)
        })
        .collect();
    v.sort();
    v
}

/// The link of the folded complex predicted from the link of `L`: drop
/// mixed corners of `K` cells, identify the `K` edge ends with `y⁺` / `y⁻`.
/// Same-sign corners of `K` cells then join two copies of one node and
/// fold away with their cell, so they are dropped as well.
pub fn predicted_folded_link(l: &TwoComplex, k: &Subcomplex, folded: &Folded) -> CanonicalLink {
    let lk = l.link(0).expect("single vertex");
    let map = &folded.map;
    canonical(lk.corners.iter().filter(|c| !k.cells.contains(&c.id.cell)).map(|c| {
        let img = |e: EdgeEnd| EdgeEnd::new(map.edge_map[e.edge], e.sign);
        let id = CornerId::new(map.cell_map[c.id.cell].expect("cell outside K"), c.id.pos);
        (id, img(c.a), img(c.b))
    }))
}

/// The node set predicted for the folded link.
pub fn predicted_folded_nodes(l: &TwoComplex, folded: &Folded) -> Vec<EdgeEnd> {
    let lk = l.link(0).expect("single vertex");
    let mut nodes: Vec<EdgeEnd> = lk.nodes.iter().map(|e| EdgeEnd::new(folded.map.edge_map[e.edge], e.sign)).collect();
    nodes.sort();
    nodes.dedup();
    nodes
}

/// Whether the computed link of the folded complex matches the prediction.
pub fn fold_link_law_holds(l: &TwoComplex, k: &Subcomplex, folded: &Folded) -> bool {
    let lk = folded.complex.link(0).expect("single vertex");
    let actual = canonical(lk.corners.iter().map(|c| (c.id, c.a, c.b)));
    let mut nodes = lk.nodes.clone();
    nodes.sort();
    actual == predicted_folded_link(l, k, folded) && nodes == predicted_folded_nodes(l, folded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexBuilder;

    fn example_pair() -> (TwoComplex, Subcomplex) {
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
        (l, k)
    }

    #[test]
    fn folds_to_xyxy() {
        let (l, k) = example_pair();
        let f = fold_to_edge_named(&l, &k, 1, "y").unwrap();
        let names: Vec<&str> = f.complex.edges().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, vec!["x", "y"]);
        assert_eq!(f.complex.cell_count(), 1);
        assert_eq!(f.complex.format_word(f.complex.word(0)), "x y x y");
        assert!(fold_link_law_holds(&l, &k, &f));
    }

    #[test]
    fn trivial_fold_is_identity() {
        let (l, _) = example_pair();
        let k = Subcomplex::closure(&l, [], [1], []);
        let f = fold_to_edge(&l, &k, 1).unwrap();
        assert_eq!(f.complex.edges(), l.edges());
        assert_eq!(f.complex.cells(), l.cells());
        assert!(fold_link_law_holds(&l, &k, &f));
    }

    #[test]
    fn preconditions() {
        let (l, k) = example_pair();
        assert!(matches!(fold_to_edge(&l, &k, 0), Err(FoldError::EdgeNotInSub(_))));
        let bad = Subcomplex::closure(&l, [], [], [1]);
        assert!(matches!(fold_to_edge(&l, &bad, 1), Err(FoldError::NonzeroExponentSum { .. })));
        let two = ComplexBuilder::new("t").vertex("u").vertex("w").edge("e", "u", "w").build().unwrap();
        let k2 = Subcomplex::closure(&two, [], [0], []);
        assert!(matches!(fold_to_edge(&two, &k2, 0), Err(FoldError::NotSingleVertex(2))));
    }
}
