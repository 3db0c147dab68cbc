//! Integer angle structures on corners, curvature, and the combinatorial
//! Gauss–Bonnet identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CornerId, LinkGraph, Sign, Subcomplex, TwoComplex};
use crate::error::ParseError;
use crate::graph::{Graph, Subgraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("angle structure does not match the complex's corners")]
    Shape,
    #[error("corner ({cell}, {pos}) has weight {weight}, expected 0 or 1")]
    NotZeroOne { cell: usize, pos: usize, weight: i64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown cell {0}")]
    UnknownCell(usize),
    #[error("Gauss-Bonnet residual {0} is nonzero")]
    GaussBonnet(i64),
}

/// Weight per corner, stored per cell in word order: `weights[c][i]` is the
/// corner between letters `i` and `i + 1` of cell `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleStructure {
    pub weights: Vec<Vec<i64>>,
}

impl AngleStructure {
    pub fn constant(k: &TwoComplex, w: i64) -> Self {
        AngleStructure { weights: k.cells().iter().map(|c| vec![w; c.word.len()]).collect() }
    }

    pub fn from_fn(k: &TwoComplex, mut f: impl FnMut(CornerId) -> i64) -> Self {
        AngleStructure {
            weights: (0..k.cell_count())
                .map(|c| (0..k.word(c).len()).map(|i| f(CornerId::new(c, i))).collect())
                .collect(),
        }
    }

    pub fn get(&self, c: CornerId) -> i64 {
        self.weights[c.cell][c.pos]
    }

    pub fn set(&mut self, c: CornerId, w: i64) {
        self.weights[c.cell][c.pos] = w;
    }

    pub fn check_shape(&self, k: &TwoComplex) -> Result<(), AngleError> {
        let ok = self.weights.len() == k.cell_count()
            && self.weights.iter().zip(k.cells()).all(|(w, c)| w.len() == c.word.len());
        if ok {
            Ok(())
        } else {
            Err(AngleError::Shape)
        }
    }

    pub fn check_zero_one(&self, k: &TwoComplex) -> Result<(), AngleError> {
        self.check_shape(k)?;
        for (cell, ws) in self.weights.iter().enumerate() {
            for (pos, &weight) in ws.iter().enumerate() {
                if weight != 0 && weight != 1 {
                    return Err(AngleError::NotZeroOne { cell, pos, weight });
                }
            }
        }
        Ok(())
    }

    pub fn is_zero_one(&self) -> bool {
        self.weights.iter().flatten().all(|&w| w == 0 || w == 1)
    }
}

/// Angle 0 on corners whose two ends have the same sign, 1 on mixed corners.
pub fn standard_angles(k: &TwoComplex) -> AngleStructure {
    AngleStructure::from_fn(k, |c| {
        let corner = k.corner(c);
        i64::from(corner.a.sign != corner.b.sign)
    })
}

/// κ(v) = 2 − χ(lk(v)) − Σω over the corners at `v`.
pub fn vertex_curvature(k: &TwoComplex, w: &AngleStructure, v: usize) -> Result<i64, AngleError> {
    let lk = k.link(v).map_err(|_| AngleError::UnknownVertex(v))?;
    Ok(curvature_of_link(&lk, w))
}

/// κ(v, S) computed from the link of `v` in the subcomplex `S`.
pub fn vertex_curvature_in(k: &TwoComplex, s: &Subcomplex, w: &AngleStructure, v: usize) -> i64 {
    curvature_of_link(&k.link_in(s, v), w)
}

fn curvature_of_link(lk: &LinkGraph, w: &AngleStructure) -> i64 {
    let sum: i64 = lk.corners.iter().map(|c| w.get(c.id)).sum();
    2 - lk.euler_characteristic() - sum
}

/// κ(d) = Σω − (|∂d| − 2).
pub fn cell_curvature(k: &TwoComplex, w: &AngleStructure, d: usize) -> Result<i64, AngleError> {
    if d >= k.cell_count() {
        return Err(AngleError::UnknownCell(d));
    }
    let sum: i64 = w.weights[d].iter().sum();
    Ok(sum - (k.word(d).len() as i64 - 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub vertex: Vec<i64>,
    pub cell: Vec<i64>,
    pub euler: i64,
    /// 2χ − Σκ(v) − Σκ(d).
    pub residual: i64,
}

/// Computes all curvatures; fails if the Gauss–Bonnet residual is nonzero.
pub fn gauss_bonnet(k: &TwoComplex, w: &AngleStructure) -> Result<CurvatureReport, AngleError> {
    w.check_shape(k)?;
    let vertex: Vec<i64> = k.links().iter().map(|lk| curvature_of_link(lk, w)).collect();
    let cell: Vec<i64> = (0..k.cell_count()).map(|d| cell_curvature(k, w, d)).collect::<Result<_, _>>()?;
    let euler = k.euler_characteristic();
    let residual = 2 * euler - vertex.iter().sum::<i64>() - cell.iter().sum::<i64>();
    let report = CurvatureReport { vertex, cell, euler, residual };
    if residual != 0 {
        return Err(AngleError::GaussBonnet(residual));
    }
    Ok(report)
}

/// The link of `v` as a weighted graph (edge `i` is corner `i` of the link)
/// together with the weight-0 subgraph lk₀, which spans every node.
#[derive(Clone, Debug)]
pub struct WeightedLink {
    pub link: LinkGraph,
    pub graph: Graph,
    pub lk0: Subgraph,
}

impl WeightedLink {
    pub fn new(link: LinkGraph, w: &AngleStructure) -> Self {
        let mut graph = link.to_graph();
        for (i, c) in link.corners.iter().enumerate() {
            graph.edges[i].weight = w.get(c.id);
        }
        let lk0 = Subgraph::new(
            0..graph.node_count,
            graph.edges.iter().enumerate().filter(|(_, e)| e.weight == 0).map(|(i, _)| i),
        );
        WeightedLink { link, graph, lk0 }
    }

    /// The lk₀ graph alone, with its own edge numbering.
    pub fn lk0_graph(&self) -> Graph {
        let mut g = Graph::new(self.graph.node_count);
        for &e in &self.lk0.edges {
            let ge = self.graph.edges[e];
            g.add_weighted_edge(ge.u, ge.v, ge.weight);
        }
        g
    }

    /// Component label of every link node within lk₀.
    pub fn lk0_components(&self) -> Vec<usize> {
        self.lk0_graph().component_labels()
    }

    /// Nodes of the given sign.
    pub fn signed_nodes(&self, sign: Sign) -> Vec<usize> {
        (0..self.link.nodes.len()).filter(|&i| self.link.nodes[i].sign == sign).collect()
    }
}

pub fn weighted_link(k: &TwoComplex, w: &AngleStructure, v: usize) -> Result<WeightedLink, AngleError> {
    let lk = k.link(v).map_err(|_| AngleError::UnknownVertex(v))?;
    Ok(WeightedLink::new(lk, w))
}

/// Parses an angle file against `k`.
///
/// ```text
/// default standard    # or: default 0
/// angle D 0 1
/// ```
pub fn parse_angles(k: &TwoComplex, text: &str) -> Result<AngleStructure, ParseError> {
    let mut base: Option<AngleStructure> = None;
    let mut overrides = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["default", "standard"] => base = Some(standard_angles(k)),
            ["default", n] => {
                let n: i64 = n.parse().map_err(|_| ParseError::malformed(line, "default must be `standard` or an integer"))?;
                base = Some(AngleStructure::constant(k, n));
            }
            ["angle", cell, pos, w] => {
                let c = k
                    .cell_index(cell)
                    .ok_or_else(|| ParseError::complex(line, crate::error::ComplexError::UnknownCell(cell.to_string())))?;
                let p: usize = pos.parse().map_err(|_| ParseError::malformed(line, "position must be a natural number"))?;
                if p >= k.word(c).len() {
                    return Err(ParseError::malformed(line, format!("cell {cell} has no position {p}")));
                }
                let w: i64 = w.parse().map_err(|_| ParseError::malformed(line, "weight must be an integer"))?;
                overrides.push((CornerId::new(c, p), w));
            }
            _ => return Err(ParseError::malformed(line, "expected `default standard|<int>` or `angle <cell> <pos> <int>`")),
        }
    }
    let mut w = base.unwrap_or_else(|| AngleStructure::constant(k, 0));
    for (c, x) in overrides {
        w.set(c, x);
    }
    Ok(w)
}

/// Writes every corner explicitly.
pub fn write_angles(k: &TwoComplex, w: &AngleStructure) -> String {
    let mut out = String::from("default 0\n");
    for c in k.corner_ids() {
        out.push_str(&format!("angle {} {} {}\n", k.cells()[c.cell].name, c.pos, w.get(c)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexBuilder;

    fn torus() -> TwoComplex {
        ComplexBuilder::new("torus").vertex("v").edge("a", "v", "v").edge("b", "v", "v").cell("D", "a b -a -b").build().unwrap()
    }

    fn hnn(k: usize) -> TwoComplex {
        let ys = vec!["y"; k].join(" ");
        let inv = vec!["-y"; k].join(" ");
        ComplexBuilder::new("hnn")
            .vertex("v")
            .edge("x", "v", "v")
            .edge("y", "v", "v")
            .cell("R", &format!("x {ys} -x {inv}"))
            .build()
            .unwrap()
    }

    #[test]
    fn torus_standard() {
        let k = torus();
        let w = standard_angles(&k);
        assert_eq!(w.weights, vec![vec![1, 0, 1, 0]]);
        assert_eq!(cell_curvature(&k, &w, 0).unwrap(), 0);
        assert_eq!(vertex_curvature(&k, &w, 0).unwrap(), 0);
        let r = gauss_bonnet(&k, &w).unwrap();
        assert_eq!(r.residual, 0);
    }

    #[test]
    fn hnn_standard_has_two_zero_corners() {
        for k in 1..5 {
            let c = hnn(k);
            let w = standard_angles(&c);
            let zeros: Vec<usize> = (0..w.weights[0].len()).filter(|&i| w.weights[0][i] == 0).collect();
            // y then -x, and -y then x
            assert_eq!(zeros, vec![k, 2 * k + 1]);
        }
    }

    #[test]
    fn projective_plane_curvature() {
        let k = ComplexBuilder::new("rp2").vertex("v").edge("a", "v", "v").cell("D", "a a").build().unwrap();
        let w = standard_angles(&k);
        assert_eq!(w.weights, vec![vec![1, 1]]);
        assert_eq!(cell_curvature(&k, &w, 0).unwrap(), 2);
        gauss_bonnet(&k, &w).unwrap();
    }

    #[test]
    fn empty_and_zero() {
        let k = ComplexBuilder::new("pt").vertex("v").build().unwrap();
        assert!(standard_angles(&k).weights.is_empty());
        let r = gauss_bonnet(&k, &standard_angles(&k)).unwrap();
        assert_eq!(r.vertex, vec![2]);
        let t = torus();
        gauss_bonnet(&t, &AngleStructure::constant(&t, 0)).unwrap();
    }

    #[test]
    fn standard_lk0_splits_by_sign() {
        let k = hnn(3);
        let wl = weighted_link(&k, &standard_angles(&k), 0).unwrap();
        for e in &wl.lk0.edges {
            let ge = wl.graph.edges[*e];
            assert_eq!(wl.link.nodes[ge.u].sign, wl.link.nodes[ge.v].sign);
        }
    }

    #[test]
    fn angle_file() {
        let k = torus();
        let w = parse_angles(&k, "default standard\nangle D 1 1\n").unwrap();
        assert_eq!(w.weights, vec![vec![1, 1, 1, 0]]);
        assert_eq!(parse_angles(&k, &write_angles(&k, &w)).unwrap(), w);
        assert_eq!(parse_angles(&k, "angle E 0 1").unwrap_err().line, 1);
        assert_eq!(parse_angles(&k, "\nangle D 9 1").unwrap_err().line, 2);
    }
}
