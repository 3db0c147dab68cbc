//! Combinatorial maps between complexes and the immersion check.
//!
//! Edges map preserving direction. A cell maps onto a target cell of the
//! same length with a rotation and an optional reflection: letter `i` of the
//! source word lands on target position `i − r` (mod n), or on `n − 1 − i − r`
//! with inverted sign when reflected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::AngleStructure;
use crate::complex::{CornerId, EdgeEnd, Subcomplex, TwoComplex};
use crate::parse::MapSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellImage {
    pub cell: usize,
    pub rot: usize,
    pub reflected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombMap {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub cell_map: Vec<CellImage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum MapViolation {
    #[error("assignment sizes do not match the source complex")]
    Shape,
    #[error("image {image} of {kind} {index} does not exist in the target")]
    OutOfRange { kind: String, index: usize, image: usize },
    #[error("edge {edge} does not commute with its endpoints")]
    EdgeEndpoints { edge: usize },
    #[error("cell {cell} does not match its target word at position {pos}")]
    WordMismatch { cell: usize, pos: usize },
    #[error("cell {cell} has length different from its target")]
    LengthMismatch { cell: usize },
    #[error("link of vertex {vertex}: two edge ends map to one")]
    NodeCollision { vertex: usize, a: EdgeEnd, b: EdgeEnd },
    #[error("link of vertex {vertex}: two corners map to one")]
    CornerCollision { vertex: usize, a: CornerId, b: CornerId },
    #[error("unknown name `{0}` in map block")]
    UnknownName(String),
    #[error("map block does not assign `{0}`")]
    Missing(String),
}

impl CombMap {
    pub fn identity(k: &TwoComplex) -> Self {
        CombMap {
            vertex_map: (0..k.vertex_count()).collect(),
            edge_map: (0..k.edge_count()).collect(),
            cell_map: (0..k.cell_count()).map(|c| CellImage { cell: c, rot: 0, reflected: false }).collect(),
        }
    }

    /// Target word position of source letter `i` of a cell of length `n`,
    /// and whether the letter appears inverted there.
    pub fn letter_image(img: CellImage, n: usize, i: usize) -> (usize, bool) {
        let r = img.rot % n;
        if img.reflected {
            ((2 * n - 1 - i - r) % n, true)
        } else {
            ((i + n - r) % n, false)
        }
    }

    /// The target corner of a source corner.
    pub fn corner_image(&self, src: &TwoComplex, c: CornerId) -> CornerId {
        let img = self.cell_map[c.cell];
        let n = src.word(c.cell).len();
        let r = img.rot % n;
        let pos = if img.reflected { (3 * n - 2 - c.pos - r) % n } else { (c.pos + n - r) % n };
        CornerId::new(img.cell, pos)
    }

    pub fn end_image(&self, e: EdgeEnd) -> EdgeEnd {
        EdgeEnd::new(self.edge_map[e.edge], e.sign)
    }

    /// `other ∘ self`.
    pub fn then(&self, src: &TwoComplex, other: &CombMap) -> CombMap {
        CombMap {
            vertex_map: self.vertex_map.iter().map(|&v| other.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&e| other.edge_map[e]).collect(),
            cell_map: self
                .cell_map
                .iter()
                .enumerate()
                .map(|(c, a)| {
                    let b = other.cell_map[a.cell];
                    let n = src.word(c).len() as i64;
                    // each image is the affine map p ↦ σp + t on Z/n
                    let affine = |img: &CellImage| -> (i64, i64) {
                        let r = (img.rot as i64) % n;
                        if img.reflected {
                            (-1, n - 1 - r)
                        } else {
                            (1, -r)
                        }
                    };
                    let (s1, t1) = affine(a);
                    let (s2, t2) = affine(&b);
                    let (s, t) = (s1 * s2, s2 * t1 + t2);
                    let rot = if s == 1 { (-t).rem_euclid(n) } else { (n - 1 - t).rem_euclid(n) };
                    CellImage { cell: b.cell, rot: rot as usize, reflected: s == -1 }
                })
                .collect(),
        }
    }

    /// Subcomplex of `src` of pieces mapping into `k`.
    pub fn preimage(&self, k: &Subcomplex) -> Subcomplex {
        Subcomplex {
            vertices: (0..self.vertex_map.len()).filter(|&v| k.vertices.contains(&self.vertex_map[v])).collect(),
            edges: (0..self.edge_map.len()).filter(|&e| k.edges.contains(&self.edge_map[e])).collect(),
            cells: (0..self.cell_map.len()).filter(|&c| k.cells.contains(&self.cell_map[c].cell)).collect(),
        }
    }

    /// Resolves a parsed map block between named complexes.
    pub fn from_spec(src: &TwoComplex, tgt: &TwoComplex, spec: &MapSpec) -> Result<CombMap, MapViolation> {
        fn resolve(
            pairs: &[(String, String)],
            n: usize,
            src: impl Fn(&str) -> Option<usize>,
            tgt: impl Fn(&str) -> Option<usize>,
            src_names: impl Fn(usize) -> String,
        ) -> Result<Vec<usize>, MapViolation> {
            let mut m: BTreeMap<usize, usize> = BTreeMap::new();
            for (a, b) in pairs {
                let i = src(a).ok_or_else(|| MapViolation::UnknownName(a.clone()))?;
                let j = tgt(b).ok_or_else(|| MapViolation::UnknownName(b.clone()))?;
                m.insert(i, j);
            }
            (0..n).map(|i| m.get(&i).copied().ok_or_else(|| MapViolation::Missing(src_names(i)))).collect()
        }
        let vertex_map = resolve(
            &spec.vertices,
            src.vertex_count(),
            |s| src.vertex_index(s),
            |s| tgt.vertex_index(s),
            |i| src.vertices()[i].clone(),
        )?;
        let edge_map = resolve(
            &spec.edges,
            src.edge_count(),
            |s| src.edge_index(s),
            |s| tgt.edge_index(s),
            |i| src.edges()[i].name.clone(),
        )?;
        let mut cells: BTreeMap<usize, CellImage> = BTreeMap::new();
        for (a, b, rot, rev) in &spec.cells {
            let i = src.cell_index(a).ok_or_else(|| MapViolation::UnknownName(a.clone()))?;
            let j = tgt.cell_index(b).ok_or_else(|| MapViolation::UnknownName(b.clone()))?;
            cells.insert(i, CellImage { cell: j, rot: *rot, reflected: *rev });
        }
        let cell_map = (0..src.cell_count())
            .map(|i| cells.get(&i).copied().ok_or_else(|| MapViolation::Missing(src.cells()[i].name.clone())))
            .collect::<Result<_, _>>()?;
        Ok(CombMap { vertex_map, edge_map, cell_map })
    }

    /// The map block lines for this map.
    pub fn to_spec(&self, src: &TwoComplex, tgt: &TwoComplex) -> MapSpec {
        MapSpec {
            vertices: self
                .vertex_map
                .iter()
                .enumerate()
                .map(|(i, &j)| (src.vertices()[i].clone(), tgt.vertices()[j].clone()))
                .collect(),
            edges: self
                .edge_map
                .iter()
                .enumerate()
                .map(|(i, &j)| (src.edges()[i].name.clone(), tgt.edges()[j].name.clone()))
                .collect(),
            cells: self
                .cell_map
                .iter()
                .enumerate()
                .map(|(i, img)| (src.cells()[i].name.clone(), tgt.cells()[img.cell].name.clone(), img.rot, img.reflected))
                .collect(),
        }
    }
}

/// Writes a map block.
pub fn write_map(spec: &MapSpec) -> String {
    let mut out = String::new();
    for (a, b) in &spec.vertices {
        out.push_str(&format!("map vertex {a} -> {b}\n"));
    }
    for (a, b) in &spec.edges {
        out.push_str(&format!("map edge {a} -> {b}\n"));
    }
    for (a, b, r, rev) in &spec.cells {
        out.push_str(&format!("map cell {a} -> {b} rot {r}{}\n", if *rev { " rev" } else { "" }));
    }
    out
}

/// Checks that `f` commutes with endpoints and matches attaching words.
pub fn validate_map(src: &TwoComplex, tgt: &TwoComplex, f: &CombMap) -> Result<(), MapViolation> {
    if f.vertex_map.len() != src.vertex_count()
        || f.edge_map.len() != src.edge_count()
        || f.cell_map.len() != src.cell_count()
    {
        return Err(MapViolation::Shape);
    }
    let oor = |kind: &str, index: usize, image: usize| MapViolation::OutOfRange { kind: kind.into(), index, image };
    for (i, &v) in f.vertex_map.iter().enumerate() {
        if v >= tgt.vertex_count() {
            return Err(oor("vertex", i, v));
        }
    }
    for (i, &e) in f.edge_map.iter().enumerate() {
        if e >= tgt.edge_count() {
            return Err(oor("edge", i, e));
        }
        let (se, te) = (&src.edges()[i], &tgt.edges()[e]);
        if f.vertex_map[se.src] != te.src || f.vertex_map[se.dst] != te.dst {
            return Err(MapViolation::EdgeEndpoints { edge: i });
        }
    }
    for (c, img) in f.cell_map.iter().enumerate() {
        if img.cell >= tgt.cell_count() {
            return Err(oor("cell", c, img.cell));
        }
        let (w, t) = (src.word(c), tgt.word(img.cell));
        if w.len() != t.len() {
            return Err(MapViolation::LengthMismatch { cell: c });
        }
        for (i, l) in w.iter().enumerate() {
            let (j, inverted) = CombMap::letter_image(*img, w.len(), i);
            let mut image = crate::complex::Letter::new(f.edge_map[l.edge], l.sign);
            if inverted {
                image = image.inverse();
            }
            if image != t[j] {
                return Err(MapViolation::WordMismatch { cell: c, pos: i });
            }
        }
    }
    Ok(())
}

/// First failure of local injectivity on link nodes and corners.
pub fn local_injectivity_violation(src: &TwoComplex, f: &CombMap) -> Option<MapViolation> {
    for lk in src.links() {
        let mut seen: BTreeMap<EdgeEnd, EdgeEnd> = BTreeMap::new();
        for &n in &lk.nodes {
            if let Some(prev) = seen.insert(f.end_image(n), n) {
                return Some(MapViolation::NodeCollision { vertex: lk.vertex, a: prev, b: n });
            }
        }
        let mut corners: BTreeMap<CornerId, CornerId> = BTreeMap::new();
        for c in &lk.corners {
            if let Some(prev) = corners.insert(f.corner_image(src, c.id), c.id) {
                return Some(MapViolation::CornerCollision { vertex: lk.vertex, a: prev, b: c.id });
            }
        }
    }
    None
}

pub fn check_immersion(src: &TwoComplex, tgt: &TwoComplex, f: &CombMap) -> Result<(), MapViolation> {
    validate_map(src, tgt, f)?;
    match local_injectivity_violation(src, f) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

pub fn is_immersion(src: &TwoComplex, tgt: &TwoComplex, f: &CombMap) -> bool {
    check_immersion(src, tgt, f).is_ok()
}

/// Angles on `src` pulled back along `f`.
pub fn pullback_angles(src: &TwoComplex, tgt: &TwoComplex, f: &CombMap, w: &AngleStructure) -> Result<AngleStructure, MapViolation> {
    validate_map(src, tgt, f)?;
    Ok(AngleStructure::from_fn(src, |c| w.get(f.corner_image(src, c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::standard_angles;
    use crate::complex::ComplexBuilder;

    fn torus() -> TwoComplex {
        ComplexBuilder::new("torus").vertex("v").edge("a", "v", "v").edge("b", "v", "v").cell("D", "a b -a -b").build().unwrap()
    }

    fn rp2() -> TwoComplex {
        ComplexBuilder::new("rp2").vertex("v").edge("a", "v", "v").cell("D", "a a").build().unwrap()
    }

    /// Sphere made of two bigons over ⟨a | a²⟩.
    fn bigon_cover() -> (TwoComplex, CombMap) {
        let x = ComplexBuilder::new("s2")
            .vertex("p")
            .vertex("q")
            .edge("a1", "p", "q")
            .edge("a2", "q", "p")
            .cell("D1", "a1 a2")
            .cell("D2", "a2 a1")
            .build()
            .unwrap();
        let f = CombMap {
            vertex_map: vec![0, 0],
            edge_map: vec![0, 0],
            cell_map: vec![CellImage { cell: 0, rot: 0, reflected: false }, CellImage { cell: 0, rot: 0, reflected: false }],
        };
        (x, f)
    }

    #[test]
    fn identity_is_immersion() {
        let t = torus();
        assert!(is_immersion(&t, &t, &CombMap::identity(&t)));
    }

    #[test]
    fn double_cover() {
        let (x, f) = bigon_cover();
        let l = rp2();
        check_immersion(&x, &l, &f).unwrap();
        let w = standard_angles(&l);
        let pw = pullback_angles(&x, &l, &f, &w).unwrap();
        assert_eq!(pw.weights, vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn folding_is_not_immersion() {
        let x = ComplexBuilder::new("x")
            .vertex("u")
            .vertex("w")
            .edge("e", "u", "w")
            .edge("f", "u", "w")
            .cell("D", "e -f")
            .build()
            .unwrap();
        let l = ComplexBuilder::new("l").vertex("v").edge("a", "v", "v").cell("D", "a -a").build().unwrap();
        let f = CombMap { vertex_map: vec![0, 0], edge_map: vec![0, 0], cell_map: vec![CellImage { cell: 0, rot: 0, reflected: false }] };
        validate_map(&x, &l, &f).unwrap();
        assert!(matches!(local_injectivity_violation(&x, &f), Some(MapViolation::NodeCollision { .. })));
    }

    #[test]
    fn word_mismatch() {
        let t = torus();
        let mut f = CombMap::identity(&t);
        f.cell_map[0].rot = 1;
        assert!(matches!(validate_map(&t, &t, &f), Err(MapViolation::WordMismatch { .. })));
        f.cell_map[0].rot = 2;
        f.edge_map = vec![0, 1];
        // a b -a -b rotated by 2 is -a -b a b: needs a ↦ a⁻¹ which is not direction preserving
        assert!(validate_map(&t, &t, &f).is_err());
    }

    #[test]
    fn reflection_and_pullback() {
        // a b -a -b reflected: reverse and invert gives b a -b -a; rotating by 1 gives a -b -a b
        let t = torus();
        let f = CombMap {
            vertex_map: vec![0],
            edge_map: vec![1, 0],
            cell_map: vec![CellImage { cell: 0, rot: 0, reflected: true }],
        };
        // swap a and b then reflect: b a -b -a -> reversed inverted: a b -a -b
        validate_map(&t, &t, &f).unwrap();
        assert!(is_immersion(&t, &t, &f));
        let w = AngleStructure { weights: vec![vec![10, 11, 12, 13]] };
        let pw = pullback_angles(&t, &t, &f, &w).unwrap();
        for c in t.corner_ids() {
            assert_eq!(pw.get(c), w.get(f.corner_image(&t, c)));
        }
        // corner images are consistent with the link: ends map onto ends
        for c in t.corner_ids() {
            let src = t.corner(c);
            let tgt = t.corner(f.corner_image(&t, c));
            let mut a = [f.end_image(src.a), f.end_image(src.b)];
            let mut b = [tgt.a, tgt.b];
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn composition() {
        let t = torus();
        let f = CombMap { vertex_map: vec![0], edge_map: vec![1, 0], cell_map: vec![CellImage { cell: 0, rot: 0, reflected: true }] };
        let ff = f.then(&t, &f);
        validate_map(&t, &t, &ff).unwrap();
        assert_eq!(ff, CombMap::identity(&t));
        for c in t.corner_ids() {
            assert_eq!(ff.corner_image(&t, c), f.corner_image(&t, f.corner_image(&t, c)));
        }
    }

    #[test]
    fn spec_round_trip() {
        let (x, f) = bigon_cover();
        let l = rp2();
        let spec = f.to_spec(&x, &l);
        assert_eq!(CombMap::from_spec(&x, &l, &spec).unwrap(), f);
        let text = format!("{}{}", crate::parse::write_complex(&x, &[]), write_map(&spec));
        let doc = crate::parse::parse_complex(&text).unwrap();
        assert_eq!(doc.map.unwrap(), spec);
    }
}
