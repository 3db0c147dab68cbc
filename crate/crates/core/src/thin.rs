//! Thinning an immersion: collapsible components of the preimage of `K`
//! whose boundary has no vertex of valency 0 or 1 are hollowed out, and
//! their boundary components are capped by cells mapping to formal cells
//! of the exponent-sum-zero expansion of `K`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::AngleStructure;
use crate::cap::cap_walks;
use crate::coloring::strong_relative_coloring_test;
use crate::complex::{
    boundary_interior, components, essential_part, exponent_heights_in, is_collapsible_sub, Cell, ComplexBuilder, Edge,
    Letter, Sign, Subcomplex, TwoComplex,
};
use crate::graph::Graph;
use crate::map::{check_immersion, CellImage, CombMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThinError {
    #[error("map is not an immersion: {0}")]
    NotImmersion(String),
    #[error("source complex has a free face")]
    FreeFaces,
    #[error("cell {0} of the subcomplex has nonzero exponent sum")]
    NonzeroExponentSum(String),
    #[error("pair fails the strong relative coloring test")]
    StrongTest,
    #[error("invariant breach: {0}")]
    Invariant(String),
}

/// Image of a cell of the thinned complex: a cell of `L` or a formal cell
/// of the expansion, identified by its boundary word up to rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormalCell {
    Cell(CellImage),
    Expansion { word: Vec<Letter> },
}

impl FormalCell {
    /// Equality of expansion cells is equality of words up to rotation.
    pub fn same_as(&self, other: &FormalCell) -> bool {
        match (self, other) {
            (FormalCell::Expansion { word: a }, FormalCell::Expansion { word: b }) => {
                a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i])))
            }
            _ => self == other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalMap {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub cell_map: Vec<FormalCell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thinned {
    pub x_prime: TwoComplex,
    pub map: FormalMap,
    /// Number of hollowed components.
    pub k: usize,
    /// Number of boundary components capped.
    pub p: usize,
    pub chi_x: i64,
    pub chi_x_prime: i64,
    pub hollowed: Vec<Subcomplex>,
}

/// Thins `f: X → L` relative to `K`. With `angles`, the strong test on
/// `(L, K)` is checked first.
pub fn thin_immersion(
    x: &TwoComplex,
    l: &TwoComplex,
    f: &CombMap,
    k: &Subcomplex,
    angles: Option<&AngleStructure>,
) -> Result<Thinned, ThinError> {
    check_immersion(x, l, f).map_err(|e| ThinError::NotImmersion(e.to_string()))?;
    if x.has_free_faces() {
        return Err(ThinError::FreeFaces);
    }
    if let Some(c) = k.cells.iter().find(|&&c| TwoComplex::exponent_sum(l.word(c)) != 0) {
        return Err(ThinError::NonzeroExponentSum(l.cells()[*c].name.clone()));
    }
    if let Some(w) = angles {
        if !strong_relative_coloring_test(l, k, w).is_ok_and(|v| v.pass) {
            return Err(ThinError::StrongTest);
        }
    }
    let y = essential_part(x, &f.preimage(k));
    let mut hollowed = Vec::new();
    let mut boundary = Subcomplex::empty();
    let mut interior = Subcomplex::empty();
    for comp in components(x, &y) {
        if is_collapsible_sub(x, &comp).is_none() {
            continue;
        }
        let bi = boundary_interior(x, &comp);
        let low = bi.boundary.vertices.iter().any(|&v| {
            bi.boundary.edges.iter().filter(|&&e| x.edges()[e].src == v).count()
                + bi.boundary.edges.iter().filter(|&&e| x.edges()[e].dst == v).count()
                <= 1
        });
        if low {
            continue;
        }
        boundary = boundary.union(&bi.boundary);
        interior.vertices.extend(bi.interior_vertices);
        interior.edges.extend(bi.interior_edges);
        interior.cells.extend(comp.cells.iter().copied());
        hollowed.push(comp);
    }
    if hollowed.iter().any(|c| exponent_heights_in(x, c).is_err()) {
        return Err(ThinError::Invariant("closed path of nonzero exponent sum in a collapsible component".into()));
    }

    // keep everything outside the interiors; indices are renumbered in order
    let keep_v: Vec<usize> = (0..x.vertex_count()).filter(|v| !interior.vertices.contains(v)).collect();
    let keep_e: Vec<usize> = (0..x.edge_count()).filter(|e| !interior.edges.contains(e)).collect();
    let vpos = |v: usize| keep_v.binary_search(&v).expect("kept vertex");
    let epos = |e: usize| keep_e.binary_search(&e).expect("kept edge");
    let vertices: Vec<String> = keep_v.iter().map(|&v| x.vertices()[v].clone()).collect();
    let edges: Vec<Edge> = keep_e
        .iter()
        .map(|&e| Edge { name: x.edges()[e].name.clone(), src: vpos(x.edges()[e].src), dst: vpos(x.edges()[e].dst) })
        .collect();
    let mut cells = Vec::new();
    let mut cell_map = Vec::new();
    for c in (0..x.cell_count()).filter(|c| !interior.cells.contains(c)) {
        let word = x.word(c).iter().map(|l| Letter::new(epos(l.edge), l.sign)).collect();
        cells.push(Cell { name: x.cells()[c].name.clone(), word });
        cell_map.push(FormalCell::Cell(f.cell_map[c]));
    }

    let deltas = components(x, &boundary);
    for (i, delta) in deltas.iter().enumerate() {
        let vs: Vec<usize> = delta.vertices.iter().copied().collect();
        let es: Vec<usize> = delta.edges.iter().copied().collect();
        let mut g = Graph::new(vs.len());
        for &e in &es {
            let ed = &x.edges()[e];
            g.add_edge(vs.binary_search(&ed.src).unwrap(), vs.binary_search(&ed.dst).unwrap());
        }
        let walks = cap_walks(&g).map_err(|e| ThinError::Invariant(format!("boundary component cannot be capped: {e}")))?;
        for (j, walk) in walks.iter().enumerate() {
            let gamma: Vec<Letter> =
                walk.iter().map(|d| Letter::new(es[d.edge], if d.forward { Sign::Pos } else { Sign::Neg })).collect();
            let image: Vec<Letter> = gamma.iter().map(|l| Letter::new(f.edge_map[l.edge], l.sign)).collect();
            if TwoComplex::exponent_sum(&image) != 0 {
                return Err(ThinError::Invariant("capping path maps to a path of nonzero exponent sum".into()));
            }
            cells.push(Cell { name: format!("z{i}_{j}"), word: gamma.iter().map(|l| Letter::new(epos(l.edge), l.sign)).collect() });
            cell_map.push(FormalCell::Expansion { word: image });
        }
    }
    let x_prime = TwoComplex::new(format!("{}_thin", x.name()), vertices, edges, cells)
        .map_err(|e| ThinError::Invariant(format!("thinned complex is invalid: {e}")))?;
    let map = FormalMap {
        vertex_map: keep_v.iter().map(|&v| f.vertex_map[v]).collect(),
        edge_map: keep_e.iter().map(|&e| f.edge_map[e]).collect(),
        cell_map,
    };
    let (kk, p) = (hollowed.len(), deltas.len());
    let (chi_x, chi_x_prime) = (x.euler_characteristic(), x_prime.euler_characteristic());
    if chi_x - chi_x_prime != kk as i64 - p as i64 || kk > p {
        return Err(ThinError::Invariant(format!("Euler bookkeeping failed: {chi_x} - {chi_x_prime} != {kk} - {p}")));
    }
    if x_prime.has_free_faces() {
        return Err(ThinError::Invariant("thinned complex has a free face".into()));
    }
    Ok(Thinned { x_prime, map, k: kk, p, chi_x, chi_x_prime, hollowed })
}

/// A test complex with a subcomplex: a disc made of an inner bigon and
/// `circles - 1` annuli, with an outside bigon cell on every circle in
/// `touched`. The outermost circle must be touched so nothing is free.
/// `copies` such discs are chained by outside annuli between their outer
/// circles.
#[derive(Clone, Debug)]
pub struct Necklace {
    pub x: TwoComplex,
    pub k: Subcomplex,
}

pub fn necklace(circles: usize, touched: &[usize], copies: usize) -> Necklace {
    assert!(circles >= 1 && copies >= 1 && touched.contains(&(circles - 1)));
    let mut b = ComplexBuilder::new("necklace");
    let mut inside = Vec::new();
    for c in 0..copies {
        for i in 0..circles {
            b = b.vertex(&format!("p{c}_{i}")).vertex(&format!("q{c}_{i}"));
            b = b.edge(&format!("a{c}_{i}"), &format!("p{c}_{i}"), &format!("q{c}_{i}"));
            b = b.edge(&format!("b{c}_{i}"), &format!("p{c}_{i}"), &format!("q{c}_{i}"));
        }
        let circle = |i: usize| format!("a{c}_{i} -b{c}_{i}");
        b = b.cell(&format!("D{c}"), &circle(0));
        inside.push(format!("D{c}"));
        for i in 1..circles {
            b = b.edge(&format!("t{c}_{i}"), &format!("p{c}_{}", i - 1), &format!("p{c}_{i}"));
            b = b.cell(&format!("A{c}_{i}"), &format!("{} t{c}_{i} {} -t{c}_{i}", circle(i - 1), circle(i)));
            inside.push(format!("A{c}_{i}"));
        }
        for &i in touched {
            b = b.cell(&format!("E{c}_{i}"), &format!("b{c}_{i} -a{c}_{i}"));
        }
    }
    let outer = circles - 1;
    for c in 1..copies {
        b = b.edge(&format!("s{c}"), &format!("p{}_{outer}", c - 1), &format!("p{c}_{outer}"));
        b = b.cell(
            &format!("G{c}"),
            &format!("a{0}_{outer} -b{0}_{outer} s{c} a{c}_{outer} -b{c}_{outer} -s{c}", c - 1),
        );
    }
    let x = b.build().expect("necklace is well formed");
    let cells: Vec<usize> = inside.iter().map(|n| x.cell_index(n).unwrap()).collect();
    let k = Subcomplex::closure(&x, [], [], cells);
    Necklace { x, k }
}

/// Thinning instances used by the test suites, as `(X, K)` with `f` the
/// identity.
pub fn thinning_fixtures() -> Vec<Necklace> {
    let mut out = Vec::new();
    for circles in 1..=4 {
        let outer = circles - 1;
        out.push(necklace(circles, &[outer], 1));
        out.push(necklace(circles, &(0..circles).collect::<Vec<_>>(), 1));
        if circles >= 3 {
            out.push(necklace(circles, &[0, outer], 1));
        }
    }
    out.push(necklace(1, &[0], 2));
    out.push(necklace(2, &[0, 1], 2));
    out.push(necklace(2, &[1], 3));
    let plain = necklace(2, &[0, 1], 1);
    out.push(Necklace { k: Subcomplex::empty(), x: plain.x });
    out
}

/// Touched circles that leave no free face.
pub fn touched_sets(circles: usize) -> Vec<Vec<usize>> {
    (0u32..1 << circles)
        .map(|m| (0..circles).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.contains(&(circles - 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thin(n: &Necklace) -> Thinned {
        thin_immersion(&n.x, &n.x, &CombMap::identity(&n.x), &n.k, None).unwrap()
    }

    #[test]
    fn single_disc_sphere() {
        let t = thin(&necklace(1, &[0], 1));
        assert_eq!((t.k, t.p), (1, 1));
        assert_eq!(t.chi_x, t.chi_x_prime);
        assert!(t.map.cell_map.iter().any(|c| matches!(c, FormalCell::Expansion { .. })));
    }

    #[test]
    fn two_boundary_circles() {
        let t = thin(&necklace(2, &[0, 1], 1));
        assert_eq!((t.k, t.p), (1, 2));
        assert_eq!(t.chi_x - t.chi_x_prime, -1);
    }

    #[test]
    fn empty_k_is_identity() {
        let n = necklace(2, &[0, 1], 1);
        let t = thin_immersion(&n.x, &n.x, &CombMap::identity(&n.x), &Subcomplex::empty(), None).unwrap();
        assert_eq!(t.k, 0);
        assert_eq!(t.x_prime.cells().len(), n.x.cell_count());
        assert_eq!(t.x_prime.euler_characteristic(), n.x.euler_characteristic());
    }

    #[test]
    fn fixtures_balance() {
        for n in thinning_fixtures() {
            let t = thin(&n);
            assert_eq!(t.chi_x - t.chi_x_prime, t.k as i64 - t.p as i64);
            assert!(t.k <= t.p);
        }
    }

    #[test]
    fn formal_cells_up_to_rotation() {
        let a = FormalCell::Expansion { word: vec![Letter::pos(0), Letter::neg(1)] };
        let b = FormalCell::Expansion { word: vec![Letter::neg(1), Letter::pos(0)] };
        let c = FormalCell::Expansion { word: vec![Letter::neg(0), Letter::pos(1)] };
        assert!(a.same_as(&b));
        assert!(!a.same_as(&c));
    }
}
