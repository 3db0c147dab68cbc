//! Bounded enumeration of combinatorial immersions into a fixed complex and
//! audits of the Euler characteristic inequalities over the enumerated
//! instances.
//!
//! Every enumerated `X` is built from polygon copies of target cells with
//! sides glued in classes of at least two, so every edge lies in a cell
//! boundary with multiplicity at least two. Graph appendages are out of
//! scope: they only lower `χ(X)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::angles::{vertex_curvature, vertex_curvature_in, AngleStructure};
use crate::certify::curvature_drop_vertices;
use crate::coloring::strong_relative_coloring_test;
use crate::complex::{essential_part, Cell, CornerId, Edge, Letter, Subcomplex, TwoComplex};
use crate::dsu::Dsu;
use crate::map::{check_immersion, pullback_angles, write_map, CellImage, CombMap};
use crate::parse::write_complex;

pub const DEFAULT_MAX_CELLS: usize = 3;
pub const DEFAULT_NODE_LIMIT: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionBudget {
    /// Maximum number of polygon copies; at least 1.
    pub max_cells: usize,
    pub allow_reflections: bool,
    /// Maximum number of search nodes before the run is truncated.
    pub node_limit: u64,
}

impl Default for ImmersionBudget {
    fn default() -> Self {
        ImmersionBudget { max_cells: DEFAULT_MAX_CELLS, allow_reflections: false, node_limit: DEFAULT_NODE_LIMIT }
    }
}

impl ImmersionBudget {
    pub fn cells(max_cells: usize) -> Self {
        ImmersionBudget { max_cells: max_cells.max(1), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Immersion {
    pub x: TwoComplex,
    pub f: CombMap,
}

impl Immersion {
    /// The complex followed by its map block.
    pub fn to_text(&self, target: &TwoComplex) -> String {
        write_complex(&self.x, &[]) + &write_map(&self.f.to_spec(&self.x, target))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub instances: Vec<Immersion>,
    /// False when the node limit cut the search short.
    pub completed: bool,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    cell: usize,
    reflected: bool,
}

fn piece_word(l: &TwoComplex, p: Piece) -> Vec<Letter> {
    let w = l.word(p.cell);
    if p.reflected {
        w.iter().rev().map(|x| x.inverse()).collect()
    } else {
        w.to_vec()
    }
}

/// Polygon symmetries of a word that preserve labels, as side permutations.
fn word_symmetries(word: &[Letter]) -> Vec<Vec<usize>> {
    let n = word.len();
    let mut out = Vec::new();
    for r in 0..n {
        let rot: Vec<usize> = (0..n).map(|j| (j + r) % n).collect();
        if (0..n).all(|j| word[rot[j]] == word[j]) {
            out.push(rot);
        }
        let refl: Vec<usize> = (0..n).map(|j| (2 * n - 1 - j + r) % n).collect();
        if (0..n).all(|j| word[refl[j]] == word[j].inverse()) {
            out.push(refl);
        }
    }
    out
}

/// Restricted growth string of a partition given by class ids.
fn rgs(classes: &[usize]) -> Vec<usize> {
    let mut names = BTreeMap::new();
    classes
        .iter()
        .map(|c| {
            let next = names.len();
            *names.entry(*c).or_insert(next)
        })
        .collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Canonical key of a gluing up to isomorphism over the target: copies are
/// normalised to unreflected orientation and the minimum partition string
/// is taken over copy permutations and polygon symmetries.
fn canonical_key(l: &TwoComplex, pieces: &[Piece], side_class: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let lens: Vec<usize> = pieces.iter().map(|p| l.word(p.cell).len()).collect();
    let offsets: Vec<usize> = lens.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    // normalised side j of copy i carries class norm[i][j]
    let norm: Vec<Vec<usize>> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let n = lens[i];
            (0..n).map(|j| side_class[offsets[i] + if p.reflected { n - 1 - j } else { j }]).collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by_key(|&i| pieces[i].cell);
    let cells: Vec<usize> = order.iter().map(|&i| pieces[i].cell).collect();
    let syms: Vec<Vec<Vec<usize>>> = pieces.iter().map(|p| word_symmetries(l.word(p.cell))).collect();
    // groups of copies with equal cells, in sorted order
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if pieces[g[0]].cell == pieces[i].cell => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
    let mut best: Option<Vec<usize>> = None;
    let mut perm_choice = vec![0usize; groups.len()];
    loop {
        let seq: Vec<usize> = perm_choice.iter().enumerate().flat_map(|(g, &k)| group_perms[g][k].clone()).collect();
        let mut sym_choice = vec![0usize; seq.len()];
        loop {
            let mut sides = Vec::new();
            for (slot, &i) in seq.iter().enumerate() {
                let s = &syms[i][sym_choice[slot]];
                sides.extend((0..lens[i]).map(|j| norm[i][s[j]]));
            }
            let key = rgs(&sides);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
            if !advance(&mut sym_choice, |slot| syms[seq[slot]].len()) {
                break;
            }
        }
        if !advance(&mut perm_choice, |g| group_perms[g].len()) {
            break;
        }
    }
    (cells, best.expect("at least the identity"))
}

/// Odometer step; false after the last combination.
fn advance(digits: &mut [usize], base: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < base(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

struct Layout {
    pieces: Vec<Piece>,
    words: Vec<Vec<Letter>>,
    offsets: Vec<usize>,
    /// Target letter of each side.
    side_letter: Vec<Letter>,
    side_src: Vec<usize>,
    side_dst: Vec<usize>,
    /// (polygon vertex, target corner) of each corner.
    corners: Vec<(usize, CornerId)>,
    copy_of_side: Vec<usize>,
}

impl Layout {
    fn new(l: &TwoComplex, pieces: Vec<Piece>) -> Self {
        let words: Vec<Vec<Letter>> = pieces.iter().map(|&p| piece_word(l, p)).collect();
        let mut offsets = Vec::new();
        let (mut side_letter, mut side_src, mut side_dst, mut corners, mut copy_of_side) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut total = 0;
        for (i, w) in words.iter().enumerate() {
            let n = w.len();
            offsets.push(total);
            for (j, &x) in w.iter().enumerate() {
                let (start, end) = (total + j, total + (j + 1) % n);
                side_letter.push(x);
                let (s, d) = if x.sign == crate::complex::Sign::Pos { (start, end) } else { (end, start) };
                side_src.push(s);
                side_dst.push(d);
                copy_of_side.push(i);
                let pos = if pieces[i].reflected { (3 * n - 2 - j) % n } else { j };
                corners.push((end, CornerId::new(pieces[i].cell, pos)));
            }
            total += n;
        }
        Layout { pieces, words, offsets, side_letter, side_src, side_dst, corners, copy_of_side }
    }

    fn vertex_count(&self) -> usize {
        self.side_letter.len()
    }

    /// Polygon vertex classes induced by the glued sides.
    fn vertices(&self, side_class: &[usize], first: &[usize]) -> Dsu {
        let mut dsu = Dsu::new(self.vertex_count());
        for (s, &k) in side_class.iter().enumerate() {
            let r = first[k];
            dsu.union(self.side_src[s], self.side_src[r]);
            dsu.union(self.side_dst[s], self.side_dst[r]);
        }
        dsu
    }

    /// Whether the partial gluing stays locally injective.
    fn locally_injective(&self, side_class: &[usize], first: &[usize]) -> bool {
        let mut dsu = self.vertices(side_class, first);
        let mut ends = BTreeSet::new();
        for &r in first {
            let e = self.side_letter[r].edge;
            if !ends.insert((dsu.find(self.side_src[r]), e, true)) || !ends.insert((dsu.find(self.side_dst[r]), e, false)) {
                return false;
            }
        }
        let mut seen = BTreeSet::new();
        self.corners.iter().all(|&(v, c)| seen.insert((dsu.find(v), c)))
    }

    fn connected(&self, side_class: &[usize], classes: usize) -> bool {
        let mut dsu = Dsu::new(self.pieces.len() + classes);
        for (s, &k) in side_class.iter().enumerate() {
            dsu.union(self.copy_of_side[s], self.pieces.len() + k);
        }
        let r = dsu.find(0);
        (1..self.pieces.len()).all(|i| dsu.find(i) == r)
    }

    fn build(&self, l: &TwoComplex, side_class: &[usize], first: &[usize]) -> Immersion {
        let mut dsu = self.vertices(side_class, first);
        let mut vid: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertex_map = Vec::new();
        for p in 0..self.vertex_count() {
            let root = dsu.find(p);
            if !vid.contains_key(&root) {
                vid.insert(root, vid.len());
                vertex_map.push(l.letter_start(self.side_letter[p]));
            }
        }
        let vertices = (0..vid.len()).map(|i| format!("x{i}")).collect();
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (k, &r) in first.iter().enumerate() {
            edges.push(Edge { name: format!("e{k}"), src: vid[&dsu.find(self.side_src[r])], dst: vid[&dsu.find(self.side_dst[r])] });
            edge_map.push(self.side_letter[r].edge);
        }
        let cells = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| Cell {
                name: format!("d{i}"),
                word: (0..w.len()).map(|j| Letter::new(side_class[self.offsets[i] + j], w[j].sign)).collect(),
            })
            .collect();
        let cell_map = self.pieces.iter().map(|p| CellImage { cell: p.cell, rot: 0, reflected: p.reflected }).collect();
        let x = TwoComplex::new(format!("{}_cover", l.name()), vertices, edges, cells).expect("glued polygons are closed");
        Immersion { x, f: CombMap { vertex_map, edge_map, cell_map } }
    }
}

struct Search<'a> {
    l: &'a TwoComplex,
    layout: Layout,
    side_class: Vec<usize>,
    first: Vec<usize>,
    size: Vec<usize>,
    /// Sides still to place per target edge, after the current one.
    remaining: Vec<usize>,
    nodes: &'a mut u64,
    limit: u64,
    truncated: bool,
    seen: &'a mut BTreeSet<(Vec<usize>, Vec<usize>)>,
    out: &'a mut Vec<Immersion>,
}

impl Search<'_> {
    fn feasible(&self) -> bool {
        let mut singles = vec![0usize; self.l.edge_count()];
        for (k, &r) in self.first.iter().enumerate() {
            if self.size[k] == 1 {
                singles[self.side_letter(r).edge] += 1;
            }
        }
        singles.iter().zip(&self.remaining).all(|(s, r)| s <= r)
    }

    fn side_letter(&self, s: usize) -> Letter {
        self.layout.side_letter[s]
    }

    fn run(&mut self, s: usize) {
        if *self.nodes >= self.limit {
            self.truncated = true;
            return;
        }
        *self.nodes += 1;
        if s == self.layout.side_letter.len() {
            self.finish();
            return;
        }
        let e = self.side_letter(s).edge;
        self.remaining[e] -= 1;
        for k in 0..self.first.len() {
            if self.side_letter(self.first[k]).edge != e {
                continue;
            }
            self.side_class.push(k);
            self.size[k] += 1;
            if self.feasible() && self.layout.locally_injective(&self.side_class, &self.first) {
                self.run(s + 1);
            }
            self.size[k] -= 1;
            self.side_class.pop();
        }
        let k = self.first.len();
        self.side_class.push(k);
        self.first.push(s);
        self.size.push(1);
        if self.feasible() && self.layout.locally_injective(&self.side_class, &self.first) {
            self.run(s + 1);
        }
        self.size.pop();
        self.first.pop();
        self.side_class.pop();
        self.remaining[e] += 1;
    }

    fn finish(&mut self) {
        if self.size.iter().any(|&n| n < 2) || !self.layout.connected(&self.side_class, self.first.len()) {
            return;
        }
        let key = canonical_key(self.l, &self.layout.pieces, &self.side_class);
        if self.seen.insert(key) {
            let inst = self.layout.build(self.l, &self.side_class, &self.first);
            debug_assert!(validate_instance(self.l, &inst).is_ok());
            self.out.push(inst);
        }
    }
}

/// Nondecreasing sequences over `0..types` of length `1..=max`.
fn multisets(types: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(types: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        let start = cur.last().copied().unwrap_or(0);
        for t in start..types {
            cur.push(t);
            rec(types, max, cur, out);
            cur.pop();
        }
    }
    rec(types, max, &mut Vec::new(), &mut out);
    out
}

/// All connected `X → L` built from at most `budget.max_cells` cell copies,
/// locally injective, with every edge of multiplicity at least two, one per
/// isomorphism class over `L`.
pub fn enumerate_immersions(l: &TwoComplex, budget: &ImmersionBudget) -> Enumeration {
    let types: Vec<Piece> = (0..l.cell_count())
        .flat_map(|c| {
            let refl: &[bool] = if budget.allow_reflections { &[false, true] } else { &[false] };
            refl.iter().map(move |&r| Piece { cell: c, reflected: r })
        })
        .collect();
    let mut nodes = 0;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut completed = true;
    for ms in multisets(types.len(), budget.max_cells.max(1)) {
        let pieces: Vec<Piece> = ms.iter().map(|&t| types[t]).collect();
        let layout = Layout::new(l, pieces);
        let mut remaining = vec![0; l.edge_count()];
        for x in &layout.side_letter {
            remaining[x.edge] += 1;
        }
        let mut search = Search {
            l,
            layout,
            side_class: Vec::new(),
            first: Vec::new(),
            size: Vec::new(),
            remaining,
            nodes: &mut nodes,
            limit: budget.node_limit,
            truncated: false,
            seen: &mut seen,
            out: &mut out,
        };
        search.run(0);
        if search.truncated {
            completed = false;
            break;
        }
    }
    Enumeration { instances: out, completed, nodes }
}

/// Post-hoc checks on an enumerated instance, independent of the search.
pub fn validate_instance(l: &TwoComplex, inst: &Immersion) -> Result<(), String> {
    check_immersion(&inst.x, l, &inst.f).map_err(|e| e.to_string())?;
    if inst.x.has_free_faces() {
        return Err("free face".into());
    }
    if !inst.x.is_connected() {
        return Err("disconnected".into());
    }
    if (0..inst.x.edge_count()).any(|e| inst.x.edge_multiplicity(e) < 2) {
        return Err("edge of multiplicity below two".into());
    }
    Ok(())
}

/// Generate-then-filter enumeration without reflections: every partition of
/// the sides is glued, validated with the general immersion check, and
/// deduplicated by explicit isomorphism search.
pub fn naive_enumerate(l: &TwoComplex, max_cells: usize) -> Vec<Immersion> {
    let mut out: Vec<Immersion> = Vec::new();
    for ms in multisets(l.cell_count(), max_cells) {
        let words: Vec<&[Letter]> = ms.iter().map(|&c| l.word(c)).collect();
        let sides: Vec<(usize, usize)> = words.iter().enumerate().flat_map(|(i, w)| (0..w.len()).map(move |j| (i, j))).collect();
        let mut rg = vec![0usize; sides.len()];
        loop {
            if let Some(inst) = glue_naive(l, &ms, &words, &sides, &rg) {
                if validate_instance(l, &inst).is_ok() && !out.iter().any(|o| isomorphic_over(l, o, &inst)) {
                    out.push(inst);
                }
            }
            if !next_rgs(&mut rg) {
                break;
            }
        }
    }
    out
}

fn next_rgs(rg: &mut [usize]) -> bool {
    for i in (1..rg.len()).rev() {
        let max_prefix = rg[..i].iter().copied().max().unwrap_or(0);
        if rg[i] <= max_prefix {
            rg[i] += 1;
            for x in &mut rg[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn glue_naive(l: &TwoComplex, ms: &[usize], words: &[&[Letter]], sides: &[(usize, usize)], rg: &[usize]) -> Option<Immersion> {
    let classes = rg.iter().max().map_or(0, |m| m + 1);
    let mut edge_of = vec![None; classes];
    for (s, &(i, j)) in sides.iter().enumerate() {
        let e = words[i][j].edge;
        match edge_of[rg[s]] {
            None => edge_of[rg[s]] = Some(e),
            Some(x) if x != e => return None,
            _ => {}
        }
    }
    // polygon vertex (i, j) starts letter j of copy i
    let index: BTreeMap<(usize, usize), usize> = sides.iter().enumerate().map(|(s, &p)| (p, s)).collect();
    let mut dsu = Dsu::new(sides.len());
    let mut src_of: Vec<Option<usize>> = vec![None; classes];
    let mut dst_of: Vec<Option<usize>> = vec![None; classes];
    for (s, &(i, j)) in sides.iter().enumerate() {
        let n = words[i].len();
        let a = index[&(i, j)];
        let b = index[&(i, (j + 1) % n)];
        let (src, dst) = if words[i][j].sign == crate::complex::Sign::Pos { (a, b) } else { (b, a) };
        let k = rg[s];
        match (src_of[k], dst_of[k]) {
            (Some(p), Some(q)) => {
                dsu.union(p, src);
                dsu.union(q, dst);
            }
            _ => {
                src_of[k] = Some(src);
                dst_of[k] = Some(dst);
            }
        }
    }
    let mut roots: Vec<usize> = (0..sides.len()).map(|s| dsu.find(s)).collect::<BTreeSet<_>>().into_iter().collect();
    roots.sort();
    let vid = |dsu: &mut Dsu, s: usize| roots.binary_search(&dsu.find(s)).expect("root");
    let mut vertex_map = vec![0; roots.len()];
    for (s, &(i, j)) in sides.iter().enumerate() {
        let v = vid(&mut dsu, s);
        vertex_map[v] = l.letter_start(words[i][j]);
    }
    let edges = (0..classes)
        .map(|k| Edge { name: format!("e{k}"), src: vid(&mut dsu, src_of[k].unwrap()), dst: vid(&mut dsu, dst_of[k].unwrap()) })
        .collect();
    let mut cells = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let word = (0..w.len()).map(|j| Letter::new(rg[index[&(i, j)]], w[j].sign)).collect();
        cells.push(Cell { name: format!("d{i}"), word });
    }
    let x = TwoComplex::new("naive", (0..roots.len()).map(|i| format!("x{i}")).collect(), edges, cells).ok()?;
    let f = CombMap {
        vertex_map,
        edge_map: edge_of.into_iter().map(|e| e.expect("nonempty class")).collect(),
        cell_map: ms.iter().map(|&c| CellImage { cell: c, rot: 0, reflected: false }).collect(),
    };
    Some(Immersion { x, f })
}

/// Whether some isomorphism `φ: a.x → b.x` satisfies `b.f ∘ φ = a.f` up to
/// label-preserving polygon symmetries.
pub fn isomorphic_over(l: &TwoComplex, a: &Immersion, b: &Immersion) -> bool {
    let (xa, xb) = (&a.x, &b.x);
    if xa.vertex_count() != xb.vertex_count() || xa.edge_count() != xb.edge_count() || xa.cell_count() != xb.cell_count() {
        return false;
    }
    // target-oriented words of each cell, so symmetries act uniformly
    let oriented = |inst: &Immersion, c: usize| -> Vec<Letter> {
        let w = inst.x.word(c);
        if inst.f.cell_map[c].reflected {
            w.iter().rev().map(|x| x.inverse()).collect()
        } else {
            w.to_vec()
        }
    };
    let n = xa.cell_count();
    let mut assign: Vec<Option<(usize, Vec<usize>)>> = vec![None; n];
    fn rec(
        l: &TwoComplex,
        a: &Immersion,
        b: &Immersion,
        c: usize,
        used: &mut Vec<bool>,
        assign: &mut Vec<Option<(usize, Vec<usize>)>>,
        oriented: &dyn Fn(&Immersion, usize) -> Vec<Letter>,
    ) -> bool {
        if c == assign.len() {
            return consistent(a, b, assign, oriented);
        }
        let target = a.f.cell_map[c].cell;
        for d in 0..used.len() {
            if used[d] || b.f.cell_map[d].cell != target {
                continue;
            }
            for sym in word_symmetries(l.word(target)) {
                used[d] = true;
                assign[c] = Some((d, sym));
                if rec(l, a, b, c + 1, used, assign, oriented) {
                    return true;
                }
                used[d] = false;
            }
        }
        assign[c] = None;
        false
    }
    rec(l, a, b, 0, &mut vec![false; n], &mut assign, &oriented)
}

fn consistent(
    a: &Immersion,
    b: &Immersion,
    assign: &[Option<(usize, Vec<usize>)>],
    oriented: &dyn Fn(&Immersion, usize) -> Vec<Letter>,
) -> bool {
    let mut emap: Vec<Option<usize>> = vec![None; a.x.edge_count()];
    for (c, slot) in assign.iter().enumerate() {
        let (d, sym) = slot.as_ref().expect("complete assignment");
        let (wa, wb) = (oriented(a, c), oriented(b, *d));
        for j in 0..wa.len() {
            let (x, y) = (wa[j], wb[sym[j]]);
            match emap[x.edge] {
                None => emap[x.edge] = Some(y.edge),
                Some(e) if e != y.edge => return false,
                _ => {}
            }
        }
    }
    let emap: Vec<usize> = match emap.into_iter().collect::<Option<Vec<_>>>() {
        Some(m) => m,
        None => return false,
    };
    if emap.iter().collect::<BTreeSet<_>>().len() != emap.len() {
        return false;
    }
    let mut vmap: Vec<Option<usize>> = vec![None; a.x.vertex_count()];
    for (e, &img) in emap.iter().enumerate() {
        for (u, v) in [(a.x.edges()[e].src, b.x.edges()[img].src), (a.x.edges()[e].dst, b.x.edges()[img].dst)] {
            match vmap[u] {
                None => vmap[u] = Some(v),
                Some(w) if w != v => return false,
                _ => {}
            }
        }
    }
    let vs: Vec<usize> = vmap.into_iter().flatten().collect();
    vs.len() == a.x.vertex_count() && vs.iter().collect::<BTreeSet<_>>().len() == vs.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub index: usize,
    pub cells: usize,
    pub chi_x: i64,
    pub chi_y: i64,
    pub free_faces: bool,
    pub point: bool,
    /// Total curvature drop `Σ κ(v,Y) − κ(v,X)` over confirmed vertices,
    /// when angles were supplied and the pulled-back pair passed the strong
    /// test.
    pub drop: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    /// `χ(X) > χ(Y)` for a non-point `X`.
    Euler,
    /// `2χ(X) > 2χ(Y) − drop`.
    DropBound,
    /// The target pair passes the strong test but the pulled-back pair does
    /// not.
    Heredity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditViolation {
    pub index: usize,
    pub kind: ViolationKind,
    pub chi_x: i64,
    pub chi_y: i64,
    /// The instance in complex format with its map block.
    pub instance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub target: String,
    pub relative: bool,
    pub budget: ImmersionBudget,
    pub count: usize,
    pub records: Vec<AuditRecord>,
    pub violations: Vec<AuditViolation>,
    pub completed: bool,
    pub nodes: u64,
}

/// Audits `χ(X) ≤ 0` unless `X` is a point.
pub fn audit_npi(l: &TwoComplex, budget: &ImmersionBudget) -> AuditReport {
    let mut r = audit_relative(l, &Subcomplex::empty(), budget);
    r.relative = false;
    r
}

/// Audits `χ(X) ≤ χ(Y)` unless `X` is a point, with `Y` the essential part
/// of the preimage of `K`.
pub fn audit_relative(l: &TwoComplex, k: &Subcomplex, budget: &ImmersionBudget) -> AuditReport {
    audit_impl(l, k, None, budget)
}

/// [`audit_relative`], also checking heredity of the strong test and the
/// curvature-drop bound when `(L, K)` passes the strong test with `w`.
pub fn audit_relative_with_angles(l: &TwoComplex, k: &Subcomplex, w: &AngleStructure, budget: &ImmersionBudget) -> AuditReport {
    audit_impl(l, k, Some(w), budget)
}

fn audit_impl(l: &TwoComplex, k: &Subcomplex, w: Option<&AngleStructure>, budget: &ImmersionBudget) -> AuditReport {
    let en = enumerate_immersions(l, budget);
    let strong = w.is_some_and(|w| strong_relative_coloring_test(l, k, w).is_ok_and(|v| v.pass));
    let mut records = Vec::new();
    let mut violations = Vec::new();
    for (index, inst) in en.instances.iter().enumerate() {
        let x = &inst.x;
        let y = essential_part(x, &inst.f.preimage(k));
        let (chi_x, chi_y) = (x.euler_characteristic(), y.euler_characteristic());
        let free_faces = x.has_free_faces();
        let point = x.is_point();
        let mut drop = None;
        let mut flag = |kind| violations.push(AuditViolation { index, kind, chi_x, chi_y, instance: inst.to_text(l) });
        if !point && !free_faces && chi_x > chi_y {
            flag(ViolationKind::Euler);
        }
        if let (true, Some(w)) = (strong, w) {
            let wx = pullback_angles(x, l, &inst.f, w).expect("validated immersion");
            if !strong_relative_coloring_test(x, &y, &wx).is_ok_and(|v| v.pass) {
                flag(ViolationKind::Heredity);
            } else if !free_faces {
                let d = match curvature_drop_vertices(x, &y, &wx) {
                    Ok(rep) => rep
                        .vertices
                        .iter()
                        .map(|v| {
                            debug_assert_eq!(v.kappa_x, vertex_curvature(x, &wx, v.vertex).unwrap());
                            debug_assert_eq!(v.kappa_y, vertex_curvature_in(x, &y, &wx, v.vertex));
                            v.kappa_y - v.kappa_x
                        })
                        .sum(),
                    Err(_) => 0,
                };
                drop = Some(d);
                if !point && 2 * chi_x > 2 * chi_y - d {
                    flag(ViolationKind::DropBound);
                }
            }
        }
        records.push(AuditRecord { index, cells: x.cell_count(), chi_x, chi_y, free_faces, point, drop });
    }
    AuditReport {
        target: l.name().to_string(),
        relative: true,
        budget: *budget,
        count: en.instances.len(),
        records,
        violations,
        completed: en.completed,
        nodes: en.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexBuilder;

    fn torus() -> TwoComplex {
        ComplexBuilder::new("torus").vertex("v").edge("a", "v", "v").edge("b", "v", "v").cell("D", "a b -a -b").build().unwrap()
    }

    fn aa() -> TwoComplex {
        ComplexBuilder::new("aa").vertex("v").edge("a", "v", "v").cell("D", "a a").build().unwrap()
    }

    #[test]
    fn torus_identity_found() {
        let en = enumerate_immersions(&torus(), &ImmersionBudget::cells(1));
        assert!(en.completed);
        assert_eq!(en.instances.len(), 1);
        let i = &en.instances[0];
        assert_eq!(i.x.euler_characteristic(), 0);
        assert!(validate_instance(&torus(), i).is_ok());
    }

    #[test]
    fn torus_matches_naive() {
        let l = torus();
        let en = enumerate_immersions(&l, &ImmersionBudget::cells(2));
        assert_eq!(en.instances.len(), naive_enumerate(&l, 2).len());
        let refl = enumerate_immersions(&l, &ImmersionBudget { allow_reflections: true, ..ImmersionBudget::cells(2) });
        assert_eq!(refl.instances.len(), en.instances.len());
    }

    #[test]
    fn aa_violation() {
        let r = audit_npi(&aa(), &ImmersionBudget::cells(1));
        assert_eq!(r.count, 1);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].chi_x, 1);
        let same = audit_relative(&aa(), &Subcomplex::full(&aa()), &ImmersionBudget::cells(2));
        assert!(same.violations.is_empty());
    }

    #[test]
    fn truncation_reported() {
        let en = enumerate_immersions(&torus(), &ImmersionBudget { node_limit: 3, ..ImmersionBudget::cells(2) });
        assert!(!en.completed);
    }

    #[test]
    fn symmetries() {
        let l = aa();
        assert_eq!(word_symmetries(l.word(0)).len(), 2);
        assert_eq!(word_symmetries(torus().word(0)).len(), 1);
    }
}
