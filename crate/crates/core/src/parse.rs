//! Line-oriented text format for complexes, named subcomplexes and maps.
//!
//! ```text
//! complex torus
//! vertex v
//! edge a v v
//! edge b v v
//! cell D a b -a -b
//! sub K cells D
//! ```
//!
//! Lines may appear in any order; references are resolved after the whole
//! document has been read. `#` starts a comment.

use std::collections::BTreeMap;

use crate::complex::{valid_id, Cell, Edge, Letter, Sign, Subcomplex, TwoComplex};
use crate::error::{ComplexError, ParseError};

/// Names of a combinatorial map's assignments, resolved against source and
/// target later.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapSpec {
    pub vertices: Vec<(String, String)>,
    pub edges: Vec<(String, String)>,
    /// (source cell, target cell, rotation, reflected)
    pub cells: Vec<(String, String, usize, bool)>,
}

impl MapSpec {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty() && self.cells.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ComplexDocument {
    pub complex: TwoComplex,
    pub subs: Vec<(String, Subcomplex)>,
    pub map: Option<MapSpec>,
}

impl ComplexDocument {
    pub fn sub(&self, name: &str) -> Option<&Subcomplex> {
        self.subs.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

struct SubLine {
    line: usize,
    name: String,
    cells: Vec<String>,
    edges: Vec<String>,
    vertices: Vec<String>,
}

fn check_id(line: usize, id: &str) -> Result<(), ParseError> {
    if valid_id(id) {
        Ok(())
    } else {
        Err(ParseError::complex(line, ComplexError::InvalidId(id.to_string())))
    }
}

/// Parses a complex document. Errors carry the 1-based line number.
pub fn parse_complex(text: &str) -> Result<ComplexDocument, ParseError> {
    let mut name = String::from("unnamed");
    let mut vertices: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, String, String, String)> = Vec::new();
    let mut cells: Vec<(usize, String, Vec<(String, Sign)>)> = Vec::new();
    let mut subs: Vec<SubLine> = Vec::new();
    let mut map = MapSpec::default();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "complex" => {
                if toks.len() != 2 {
                    return Err(ParseError::malformed(line, "expected `complex <name>`"));
                }
                name = toks[1].to_string();
            }
            "vertex" => {
                if toks.len() != 2 {
                    return Err(ParseError::malformed(line, "expected `vertex <id>`"));
                }
                check_id(line, toks[1])?;
                vertices.push((line, toks[1].to_string()));
            }
            "edge" => {
                if toks.len() != 4 {
                    return Err(ParseError::malformed(line, "expected `edge <id> <src> <dst>`"));
                }
                check_id(line, toks[1])?;
                edges.push((line, toks[1].to_string(), toks[2].to_string(), toks[3].to_string()));
            }
            "cell" => {
                if toks.len() < 3 {
                    return Err(ParseError::malformed(line, "expected `cell <id> <tok>...`"));
                }
                check_id(line, toks[1])?;
                let word = toks[2..]
                    .iter()
                    .map(|t| match t.strip_prefix('-') {
                        Some(r) => (r.to_string(), Sign::Neg),
                        None => (t.to_string(), Sign::Pos),
                    })
                    .collect();
                cells.push((line, toks[1].to_string(), word));
            }
            "sub" => subs.push(parse_sub_line(line, &toks)?),
            "map" => parse_map_line(line, &toks, &mut map)?,
            other => return Err(ParseError::malformed(line, format!("unknown directive `{other}`"))),
        }
    }

    let mut vidx: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, (line, v)) in vertices.iter().enumerate() {
        if vidx.insert(v, i).is_some() {
            return Err(ParseError::complex(*line, ComplexError::DuplicateId { kind: "vertex", id: v.clone() }));
        }
    }
    let mut eidx: BTreeMap<&str, usize> = BTreeMap::new();
    let mut built_edges = Vec::new();
    for (i, (line, id, s, t)) in edges.iter().enumerate() {
        if eidx.insert(id, i).is_some() {
            return Err(ParseError::complex(*line, ComplexError::DuplicateId { kind: "edge", id: id.clone() }));
        }
        let src = *vidx.get(s.as_str()).ok_or_else(|| ParseError::complex(*line, ComplexError::UnknownVertex(s.clone())))?;
        let dst = *vidx.get(t.as_str()).ok_or_else(|| ParseError::complex(*line, ComplexError::UnknownVertex(t.clone())))?;
        built_edges.push(Edge { name: id.clone(), src, dst });
    }
    let mut cidx: BTreeMap<&str, usize> = BTreeMap::new();
    let mut built_cells = Vec::new();
    for (i, (line, id, word)) in cells.iter().enumerate() {
        if cidx.insert(id, i).is_some() {
            return Err(ParseError::complex(*line, ComplexError::DuplicateId { kind: "cell", id: id.clone() }));
        }
        let mut letters = Vec::new();
        for (e, s) in word {
            let ei = *eidx.get(e.as_str()).ok_or_else(|| ParseError::complex(*line, ComplexError::UnknownEdge(e.clone())))?;
            letters.push(Letter::new(ei, *s));
        }
        // closure is checked here so the error can point at the line
        let n = letters.len();
        for p in 0..n {
            let end = endpoint(&built_edges, letters[p], false);
            let start = endpoint(&built_edges, letters[(p + 1) % n], true);
            if end != start {
                return Err(ParseError::complex(*line, ComplexError::OpenWord { cell: id.clone(), position: p }));
            }
        }
        built_cells.push(Cell { name: id.clone(), word: letters });
    }
    let complex = TwoComplex::new(
        name,
        vertices.iter().map(|(_, v)| v.clone()).collect(),
        built_edges,
        built_cells,
    )
    .map_err(|e| ParseError::complex(0, e))?;

    let mut out_subs = Vec::new();
    for s in subs {
        let look = |names: &[String], idx: &BTreeMap<&str, usize>, err: fn(String) -> ComplexError| {
            names
                .iter()
                .map(|n| idx.get(n.as_str()).copied().ok_or_else(|| ParseError::complex(s.line, err(n.clone()))))
                .collect::<Result<Vec<_>, _>>()
        };
        let c = look(&s.cells, &cidx, ComplexError::UnknownCell)?;
        let e = look(&s.edges, &eidx, ComplexError::UnknownEdge)?;
        let v = look(&s.vertices, &vidx, ComplexError::UnknownVertex)?;
        if out_subs.iter().any(|(n, _): &(String, Subcomplex)| *n == s.name) {
            return Err(ParseError::complex(s.line, ComplexError::DuplicateId { kind: "sub", id: s.name }));
        }
        out_subs.push((s.name, Subcomplex::closure(&complex, v, e, c)));
    }
    Ok(ComplexDocument { complex, subs: out_subs, map: if map.is_empty() { None } else { Some(map) } })
}

fn endpoint(edges: &[Edge], l: Letter, start: bool) -> usize {
    let e = &edges[l.edge];
    match (l.sign, start) {
        (Sign::Pos, true) | (Sign::Neg, false) => e.src,
        _ => e.dst,
    }
}

fn parse_sub_line(line: usize, toks: &[&str]) -> Result<SubLine, ParseError> {
    if toks.len() < 3 || toks[2] != "cells" {
        return Err(ParseError::malformed(line, "expected `sub <name> cells <id>... [edges <id>...] [vertices <id>...]`"));
    }
    let mut s = SubLine { line, name: toks[1].to_string(), cells: vec![], edges: vec![], vertices: vec![] };
    let mut section = "cells";
    for t in &toks[3..] {
        match *t {
            "cells" | "edges" | "vertices" => section = t,
            id => match section {
                "cells" => s.cells.push(id.to_string()),
                "edges" => s.edges.push(id.to_string()),
                _ => s.vertices.push(id.to_string()),
            },
        }
    }
    Ok(s)
}

fn parse_map_line(line: usize, toks: &[&str], map: &mut MapSpec) -> Result<(), ParseError> {
    let bad = || ParseError::malformed(line, "expected `map vertex|edge <id> -> <id>` or `map cell <id> -> <id> rot <r> [rev]`");
    if toks.len() < 5 || toks[3] != "->" {
        return Err(bad());
    }
    let (a, b) = (toks[2].to_string(), toks[4].to_string());
    match toks[1] {
        "vertex" if toks.len() == 5 => map.vertices.push((a, b)),
        "edge" if toks.len() == 5 => map.edges.push((a, b)),
        "cell" => {
            if toks.len() < 7 || toks[5] != "rot" || toks.len() > 8 {
                return Err(bad());
            }
            let rot = toks[6].parse().map_err(|_| bad())?;
            let rev = match toks.get(7) {
                None => false,
                Some(&"rev") => true,
                Some(_) => return Err(bad()),
            };
            map.cells.push((a, b, rot, rev));
        }
        _ => return Err(bad()),
    }
    Ok(())
}

/// Writes a complex (and named subcomplexes) in the text format.
pub fn write_complex(k: &TwoComplex, subs: &[(String, Subcomplex)]) -> String {
    let mut out = format!("complex {}\n", k.name());
    for v in k.vertices() {
        out.push_str(&format!("vertex {v}\n"));
    }
    for e in k.edges() {
        out.push_str(&format!("edge {} {} {}\n", e.name, k.vertices()[e.src], k.vertices()[e.dst]));
    }
    for c in k.cells() {
        out.push_str(&format!("cell {} {}\n", c.name, k.format_word(&c.word)));
    }
    for (name, s) in subs {
        out.push_str(&format!("sub {name} cells"));
        for &c in &s.cells {
            out.push_str(&format!(" {}", k.cells()[c].name));
        }
        if !s.edges.is_empty() {
            out.push_str(" edges");
            for &e in &s.edges {
                out.push_str(&format!(" {}", k.edges()[e].name));
            }
        }
        if !s.vertices.is_empty() {
            out.push_str(" vertices");
            for &v in &s.vertices {
                out.push_str(&format!(" {}", k.vertices()[v]));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = "complex torus\nvertex v\nedge a v v\nedge b v v\ncell D a b -a -b\n";

    #[test]
    fn torus_document() {
        let doc = parse_complex(TORUS).unwrap();
        let k = &doc.complex;
        assert_eq!((k.vertex_count(), k.edge_count(), k.cell_count()), (1, 2, 1));
        assert_eq!(parse_complex(&write_complex(k, &[])).unwrap().complex, *k);
    }

    #[test]
    fn example_pair_with_sub() {
        let text = "complex P\n# forward references are fine\ncell r1 y1 y2 -y1 -y2\ncell r2 x y1 x y2\n\
                    sub K cells r1\nedge x v v\nedge y1 v v\nedge y2 v v\nvertex v\n";
        let doc = parse_complex(text).unwrap();
        let k = doc.sub("K").unwrap();
        assert_eq!(k.cells.len(), 1);
        assert_eq!(k.edges.len(), 2);
        assert_eq!(k.vertices.len(), 1);
        let again = parse_complex(&write_complex(&doc.complex, &doc.subs)).unwrap();
        assert_eq!(again.sub("K"), doc.sub("K"));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_complex("vertex u\nvertex w\nedge a u w\nedge b u w\ncell D a b\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(matches!(e.kind, crate::error::ParseErrorKind::Complex(ComplexError::OpenWord { .. })));
        let e = parse_complex("vertex v\nedge a v w\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_complex("vertex v\nvertex v\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_complex("vertex v\nedge a v v\ncell D a z\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_complex("vertex v\nfrob\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn map_lines() {
        let doc = parse_complex("vertex v\nedge a v v\ncell D a a\nmap vertex v -> w\nmap edge a -> b\nmap cell D -> E rot 1 rev\n").unwrap();
        let m = doc.map.unwrap();
        assert_eq!(m.cells, vec![("D".into(), "E".into(), 1, true)]);
        assert!(parse_complex("map cell D -> E rot x\n").is_err());
    }
}
