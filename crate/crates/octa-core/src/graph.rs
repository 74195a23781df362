//! The crosses-and-wrenches construction.
//!
//! Each 2×2 block of height values gets a glyph: a cross (one vertex of
//! degree 4) when both diagonals of the block are level, or a wrench (two
//! vertices joined by an unweighted middle edge) when one diagonal jumps by
//! two. Horizontal and vertical connector edges between glyphs are the
//! weighted edges; each one separates two lattice-adjacent faces and carries
//! a label in the edge index space.
//!
//! The finite subgraph at an apex keeps exactly the edges bordering a closed
//! face (h < p), with open faces along the rim picking up the leftover
//! boundary paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{
    closed_faces, EdgeKind, EdgeLabel, FacePoint, HeightFunction, LatticePoint, Rect,
};

/// Glyph attached to a 2×2 block of heights.
///
/// `WrenchMain` keeps the main diagonal level and its middle edge separates
/// the block's SW and NE faces; `WrenchAnti` separates SE and NW.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlyphKind {
    Cross,
    WrenchMain,
    WrenchAnti,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellGlyph {
    /// SW corner (i, j) of the 2×2 block of faces.
    pub cell: FacePoint,
    pub kind: GlyphKind,
}

/// Classifies one 2×2 block. The three glyph kinds are exhaustive for any
/// pseudo-height function: with unit steps around the block, at least one
/// diagonal must be level.
pub fn classify_cell(h: &HeightFunction, cell: FacePoint) -> Result<CellGlyph> {
    let v00 = h.value(cell);
    let v10 = h.value(FacePoint::new(cell.i + 1, cell.j));
    let v01 = h.value(FacePoint::new(cell.i, cell.j + 1));
    let v11 = h.value(FacePoint::new(cell.i + 1, cell.j + 1));
    for (p, q) in [(v00, v10), (v00, v01), (v10, v11), (v01, v11)] {
        if (p - q).abs() != 1 {
            return Err(Error::InvalidLocalHeights { i: cell.i, j: cell.j });
        }
    }
    let kind = if v00 == v11 && v10 == v01 {
        GlyphKind::Cross
    } else if v00 == v11 {
        debug_assert_eq!((v10 - v01).abs(), 2);
        GlyphKind::WrenchMain
    } else {
        debug_assert_eq!(v10, v01);
        debug_assert_eq!((v00 - v11).abs(), 2);
        GlyphKind::WrenchAnti
    };
    Ok(CellGlyph { cell, kind })
}

/// Slot of a vertex inside its cell's glyph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VSlot {
    Center,
    Nw,
    Se,
    Ne,
    Sw,
}

impl VSlot {
    fn offset(self) -> (i64, i64) {
        match self {
            VSlot::Center => (0, 0),
            VSlot::Nw => (-1, 1),
            VSlot::Se => (1, -1),
            VSlot::Ne => (1, 1),
            VSlot::Sw => (-1, -1),
        }
    }
}

/// Stable vertex identity: a glyph slot for constructed graphs, or a
/// synthetic id introduced by graph rewrites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKey {
    Glyph { cell: FacePoint, slot: VSlot },
    Synthetic(u64),
}

impl VertexKey {
    pub fn glyph(cell: FacePoint, slot: VSlot) -> Self {
        VertexKey::Glyph { cell, slot }
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKey::Glyph { cell, slot } => write!(f, "{}:{:?}", cell, slot),
            VertexKey::Synthetic(k) => write!(f, "synthetic:{k}"),
        }
    }
}

/// Planar position in quarter-integer units: the glyph of cell (i, j) is
/// centered at (4i+2, 4j+2) and wrench vertices sit one quarter off-center.
pub fn glyph_position(cell: FacePoint, slot: VSlot) -> (i64, i64) {
    let (dx, dy) = slot.offset();
    (4 * cell.i + 2 + dx, 4 * cell.j + 2 + dy)
}

/// Face (i, j) is drawn centered at (4i, 4j) in quarter units.
pub fn face_position(face: FacePoint) -> (i64, i64) {
    (4 * face.i, 4 * face.j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GVertex {
    pub key: VertexKey,
    pub pos: (i64, i64),
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeWeight {
    Weighted(EdgeLabel),
    Unweighted,
}

#[derive(Clone, Debug)]
pub struct GEdge {
    pub v1: usize,
    pub v2: usize,
    pub weight: EdgeWeight,
    /// The two faces this edge separates in the infinite graph.
    pub faces: (FacePoint, FacePoint),
}

impl GEdge {
    pub fn other(&self, v: usize) -> usize {
        if self.v1 == v {
            self.v2
        } else {
            self.v1
        }
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self.weight, EdgeWeight::Weighted(_))
    }
}

/// Finite planar bipartite graph with closed and open faces.
#[derive(Clone, Debug)]
pub struct GraphWithOpenFaces {
    pub apex: LatticePoint,
    pub height: HeightFunction,
    pub vertices: Vec<GVertex>,
    pub edges: Vec<GEdge>,
    /// Closed face → boundary edges in cyclic order.
    pub closed_faces: BTreeMap<FacePoint, Vec<usize>>,
    /// Open face → its boundary path, ordered along the path.
    pub open_faces: BTreeMap<FacePoint, Vec<usize>>,
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    vertex_index: BTreeMap<VertexKey, usize>,
    /// False once a rewrite has introduced synthetic vertices; glyph-keyed
    /// operations require a pristine graph.
    pub(crate) pristine: bool,
    pub(crate) next_synthetic: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StubDir {
    N,
    E,
    S,
    W,
}

impl StubDir {
    fn offset(self) -> (i64, i64) {
        match self {
            StubDir::N => (0, 1),
            StubDir::E => (1, 0),
            StubDir::S => (0, -1),
            StubDir::W => (-1, 0),
        }
    }

    fn opposite(self) -> StubDir {
        match self {
            StubDir::N => StubDir::S,
            StubDir::E => StubDir::W,
            StubDir::S => StubDir::N,
            StubDir::W => StubDir::E,
        }
    }
}

/// Which vertex of a glyph carries the stub toward the given side.
fn stub_slot(kind: GlyphKind, dir: StubDir) -> VSlot {
    match kind {
        GlyphKind::Cross => VSlot::Center,
        GlyphKind::WrenchMain => match dir {
            StubDir::N | StubDir::W => VSlot::Nw,
            StubDir::S | StubDir::E => VSlot::Se,
        },
        GlyphKind::WrenchAnti => match dir {
            StubDir::N | StubDir::E => VSlot::Ne,
            StubDir::S | StubDir::W => VSlot::Sw,
        },
    }
}

fn wrench_slots(kind: GlyphKind) -> Option<(VSlot, VSlot)> {
    match kind {
        GlyphKind::Cross => None,
        GlyphKind::WrenchMain => Some((VSlot::Nw, VSlot::Se)),
        GlyphKind::WrenchAnti => Some((VSlot::Ne, VSlot::Sw)),
    }
}

/// Faces separated by a wrench's middle edge.
fn wrench_separated_faces(cell: FacePoint, kind: GlyphKind) -> Option<(FacePoint, FacePoint)> {
    match kind {
        GlyphKind::Cross => None,
        GlyphKind::WrenchMain => Some((cell, FacePoint::new(cell.i + 1, cell.j + 1))),
        GlyphKind::WrenchAnti => Some((
            FacePoint::new(cell.i + 1, cell.j),
            FacePoint::new(cell.i, cell.j + 1),
        )),
    }
}

/// Label of the weighted edge separating two lattice-adjacent faces, from
/// the four-case rule on the faces' surface heights.
pub(crate) fn weighted_edge_label(f1: FacePoint, n1: i64, f2: FacePoint, n2: i64) -> EdgeLabel {
    // Normalize so the first face is the one a positive unit step ahead.
    let ((fa, na), (_fb, nb)) = if (f1.i - f2.i) + (f1.j - f2.j) == 1 {
        ((f1, n1), (f2, n2))
    } else {
        ((f2, n2), (f1, n1))
    };
    let label = if fa.i != _fb.i {
        if na > nb {
            EdgeLabel::new(fa.i + nb, fa.j, EdgeKind::A)
        } else {
            EdgeLabel::new(fa.i - nb, fa.j, EdgeKind::C)
        }
    } else if na > nb {
        EdgeLabel::new(fa.i, fa.j + nb, EdgeKind::B)
    } else {
        EdgeLabel::new(fa.i, fa.j - nb, EdgeKind::D)
    };
    label.expect("edge label parity follows from surface parity")
}

/// Assembles the graph with open faces for an apex strictly above the
/// surface.
pub fn build_subgraph(h: &HeightFunction, apex: LatticePoint) -> Result<GraphWithOpenFaces> {
    if apex.n <= h.value(apex.face()) {
        return Err(Error::ApexNotAboveSurface(apex));
    }
    let closed: BTreeSet<FacePoint> = closed_faces(h, apex)?.into_iter().collect();
    debug_assert!(!closed.is_empty());

    // Cells carrying glyphs: all cells containing at least one closed face.
    let mut cells: BTreeMap<FacePoint, GlyphKind> = BTreeMap::new();
    for &f in &closed {
        for (di, dj) in [(0, 0), (-1, 0), (0, -1), (-1, -1)] {
            let cell = FacePoint::new(f.i + di, f.j + dj);
            if let std::collections::btree_map::Entry::Vacant(e) = cells.entry(cell) {
                e.insert(classify_cell(h, cell)?.kind);
            }
        }
    }

    // Included weighted edges: one per lattice adjacency with a closed side.
    let mut adjacencies: BTreeSet<(FacePoint, FacePoint)> = BTreeSet::new();
    for &f in &closed {
        adjacencies.insert((f, FacePoint::new(f.i + 1, f.j)));
        adjacencies.insert((FacePoint::new(f.i - 1, f.j), f));
        adjacencies.insert((f, FacePoint::new(f.i, f.j + 1)));
        adjacencies.insert((FacePoint::new(f.i, f.j - 1), f));
    }

    struct EdgeDesc {
        a: VertexKey,
        b: VertexKey,
        weight: EdgeWeight,
        faces: (FacePoint, FacePoint),
    }
    let mut descs: Vec<EdgeDesc> = Vec::new();
    for &(f, g) in &adjacencies {
        // g is f plus one unit step east or north.
        let (cell_a, dir_a, cell_b, dir_b) = if g.i == f.i + 1 {
            // East-west pair: cells north and south of the shared edge.
            (f, StubDir::S, FacePoint::new(f.i, f.j - 1), StubDir::N)
        } else {
            // South-north pair: cells east and west of the shared edge.
            (f, StubDir::W, FacePoint::new(f.i - 1, f.j), StubDir::E)
        };
        let ka = match cells.get(&cell_a) {
            Some(k) => *k,
            None => classify_cell(h, cell_a)?.kind,
        };
        let kb = match cells.get(&cell_b) {
            Some(k) => *k,
            None => classify_cell(h, cell_b)?.kind,
        };
        let va = VertexKey::glyph(cell_a, stub_slot(ka, dir_a));
        let vb = VertexKey::glyph(cell_b, stub_slot(kb, dir_b));
        let label = weighted_edge_label(f, h.value(f), g, h.value(g));
        descs.push(EdgeDesc { a: va, b: vb, weight: EdgeWeight::Weighted(label), faces: (f, g) });
    }
    for (&cell, &kind) in &cells {
        let Some((s1, s2)) = wrench_slots(kind) else { continue };
        let (fa, fb) = wrench_separated_faces(cell, kind).unwrap();
        if closed.contains(&fa) || closed.contains(&fb) {
            descs.push(EdgeDesc {
                a: VertexKey::glyph(cell, s1),
                b: VertexKey::glyph(cell, s2),
                weight: EdgeWeight::Unweighted,
                faces: (fa, fb),
            });
        }
    }

    // Deterministic ids: vertices sorted by key, edges by endpoint keys.
    let mut keys: BTreeSet<VertexKey> = BTreeSet::new();
    for d in &descs {
        keys.insert(d.a);
        keys.insert(d.b);
    }
    let vertex_index: BTreeMap<VertexKey, usize> =
        keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    descs.sort_by_key(|d| (d.a.min(d.b), d.a.max(d.b)));
    let edges: Vec<GEdge> = descs
        .iter()
        .map(|d| {
            let (v1, v2) = (vertex_index[&d.a], vertex_index[&d.b]);
            GEdge {
                v1: v1.min(v2),
                v2: v1.max(v2),
                weight: d.weight.clone(),
                faces: d.faces,
            }
        })
        .collect();

    let positions: Vec<(i64, i64)> = keys
        .iter()
        .map(|k| match k {
            VertexKey::Glyph { cell, slot } => glyph_position(*cell, *slot),
            VertexKey::Synthetic(_) => unreachable!(),
        })
        .collect();

    let mut adjacency = vec![Vec::new(); keys.len()];
    for (eid, e) in edges.iter().enumerate() {
        adjacency[e.v1].push((eid, e.v2));
        adjacency[e.v2].push((eid, e.v1));
    }
    for list in &mut adjacency {
        list.sort();
    }

    // Face incidence.
    let mut face_edges: BTreeMap<FacePoint, Vec<usize>> = BTreeMap::new();
    for (eid, e) in edges.iter().enumerate() {
        face_edges.entry(e.faces.0).or_default().push(eid);
        face_edges.entry(e.faces.1).or_default().push(eid);
    }

    let mut closed_face_map = BTreeMap::new();
    for &f in &closed {
        let eids = face_edges.remove(&f).unwrap_or_default();
        let cycle = cyclic_order(f, &eids, &edges, &positions);
        if ![4, 6, 8].contains(&cycle.len()) {
            return Err(Error::Internal(format!(
                "closed face {f} has {} sides",
                cycle.len()
            )));
        }
        closed_face_map.insert(f, cycle);
    }
    let mut open_face_map = BTreeMap::new();
    for (f, eids) in face_edges {
        let path = path_order(&eids, &edges)
            .ok_or_else(|| Error::Internal(format!("open face {f} edges are not a path")))?;
        open_face_map.insert(f, path);
    }

    // Bipartite coloring from a canonical root: the first vertex of the
    // lexicographically smallest closed face.
    let root_face = *closed_face_map.keys().next().unwrap();
    let root = closed_face_map[&root_face]
        .iter()
        .flat_map(|&eid| [edges[eid].v1, edges[eid].v2])
        .min()
        .unwrap();
    let mut colors: Vec<Option<Color>> = vec![None; keys.len()];
    colors[root] = Some(Color::Black);
    let mut queue = VecDeque::from([root]);
    let mut seen = 1usize;
    while let Some(v) = queue.pop_front() {
        let cv = colors[v].unwrap();
        for &(_, w) in &adjacency[v] {
            match colors[w] {
                None => {
                    colors[w] = Some(cv.flip());
                    seen += 1;
                    queue.push_back(w);
                }
                Some(cw) => {
                    if cw == cv {
                        return Err(Error::Internal("graph is not bipartite".into()));
                    }
                }
            }
        }
    }
    if seen != keys.len() {
        return Err(Error::Internal("graph is not connected".into()));
    }

    let vertices: Vec<GVertex> = keys
        .iter()
        .zip(positions.iter())
        .zip(colors.iter())
        .map(|((&key, &pos), color)| GVertex { key, pos, color: color.unwrap() })
        .collect();

    let graph = GraphWithOpenFaces {
        apex,
        height: h.clone(),
        vertices,
        edges,
        closed_faces: closed_face_map,
        open_faces: open_face_map,
        adjacency,
        vertex_index,
        pristine: true,
        next_synthetic: 0,
    };
    graph.label_edges()?;
    graph.check_unweighted_disjoint()?;
    Ok(graph)
}

/// Sorts a face's boundary edges counterclockwise around its center.
fn cyclic_order(
    face: FacePoint,
    eids: &[usize],
    edges: &[GEdge],
    positions: &[(i64, i64)],
) -> Vec<usize> {
    let c = face_position(face);
    let mut keyed: Vec<(usize, (i64, i64))> = eids
        .iter()
        .map(|&eid| {
            let e = &edges[eid];
            let (p1, p2) = (positions[e.v1], positions[e.v2]);
            (eid, (p1.0 + p2.0 - 2 * c.0, p1.1 + p2.1 - 2 * c.1))
        })
        .collect();
    let half = |v: (i64, i64)| -> u8 {
        if v.1 > 0 || (v.1 == 0 && v.0 > 0) {
            0
        } else {
            1
        }
    };
    keyed.sort_by(|&(ea, va), &(eb, vb)| {
        half(va)
            .cmp(&half(vb))
            .then_with(|| (vb.0 * va.1 - vb.1 * va.0).cmp(&0))
            .then_with(|| ea.cmp(&eb))
    });
    keyed.into_iter().map(|(e, _)| e).collect()
}

/// Orders edges along a simple path by chaining shared endpoints.
fn path_order(eids: &[usize], edges: &[GEdge]) -> Option<Vec<usize>> {
    if eids.len() <= 1 {
        return Some(eids.to_vec());
    }
    let mut by_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &eid in eids {
        by_vertex.entry(edges[eid].v1).or_default().push(eid);
        by_vertex.entry(edges[eid].v2).or_default().push(eid);
    }
    if by_vertex.values().any(|v| v.len() > 2) {
        return None;
    }
    let ends: Vec<usize> = by_vertex
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    if ends.len() != 2 {
        return None;
    }
    let mut at = ends[0];
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::with_capacity(eids.len());
    while out.len() < eids.len() {
        let next = *by_vertex[&at].iter().find(|e| !used.contains(*e))?;
        used.insert(next);
        out.push(next);
        at = edges[next].other(at);
    }
    Some(out)
}

impl GraphWithOpenFaces {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_id(&self, key: VertexKey) -> Option<usize> {
        self.vertex_index.get(&key).copied()
    }

    pub fn incident_edges(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Every face of the graph with its boundary list; closed faces first.
    pub fn faces(&self) -> impl Iterator<Item = (&FacePoint, &Vec<usize>, bool)> {
        self.closed_faces
            .iter()
            .map(|(f, e)| (f, e, true))
            .chain(self.open_faces.iter().map(|(f, e)| (f, e, false)))
    }

    /// The surface lattice point of a face of this graph.
    pub fn face_surface_point(&self, face: FacePoint) -> LatticePoint {
        self.height.surface_point(face)
    }

    /// Extracts the label map over weighted edges, checking injectivity.
    pub fn label_edges(&self) -> Result<BTreeMap<usize, EdgeLabel>> {
        let mut labels = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (eid, e) in self.edges.iter().enumerate() {
            if let EdgeWeight::Weighted(label) = &e.weight {
                if !seen.insert(*label) {
                    return Err(Error::Internal(format!(
                        "edge label {label} repeats; labeling is not injective"
                    )));
                }
                labels.insert(eid, *label);
            }
        }
        Ok(labels)
    }

    fn check_unweighted_disjoint(&self) -> Result<()> {
        let mut touched = BTreeSet::new();
        for e in &self.edges {
            if e.weight == EdgeWeight::Unweighted
                && (!touched.insert(e.v1) || !touched.insert(e.v2)) {
                    return Err(Error::Internal(
                        "unweighted edges are not vertex disjoint".into(),
                    ));
                }
        }
        Ok(())
    }

    /// Boundary loop: edges bordering exactly one closed face.
    pub(crate) fn boundary_edges(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.edges.len()];
        for cycle in self.closed_faces.values() {
            for &eid in cycle {
                count[eid] += 1;
            }
        }
        count
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == 1)
            .map(|(eid, _)| eid)
            .collect()
    }

    pub(crate) fn rewritten(mut self) -> Self {
        self.pristine = false;
        self
    }

    pub(crate) fn rebuild_indices(&mut self) {
        let mut adjacency = vec![Vec::new(); self.vertices.len()];
        for (eid, e) in self.edges.iter().enumerate() {
            adjacency[e.v1].push((eid, e.v2));
            adjacency[e.v2].push((eid, e.v1));
        }
        for list in &mut adjacency {
            list.sort();
        }
        self.adjacency = adjacency;
        self.vertex_index = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.key, i))
            .collect();
    }
}

/// One quadrant arc of the boundary loop.
#[derive(Clone, Debug)]
pub struct BoundaryArc {
    /// Vertices in walk order.
    pub vertices: Vec<usize>,
    /// For each vertex, true when every neighbor in the infinite graph lies
    /// in the subgraph.
    pub inward: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct BoundaryReport {
    pub arcs: Vec<BoundaryArc>,
}

impl BoundaryReport {
    pub fn all_arcs_odd(&self) -> bool {
        self.arcs.iter().all(|a| a.vertices.len() % 2 == 1)
    }

    pub fn alternation_holds(&self) -> bool {
        self.arcs.iter().all(|a| {
            a.inward.windows(2).all(|w| w[0] != w[1])
                && a.inward.first().is_none_or(|&b| !b)
                && a.inward.last().is_none_or(|&b| !b)
        })
    }
}

/// Neighbors of a glyph vertex in the infinite graph of `h`.
pub(crate) fn infinite_neighbors(h: &HeightFunction, key: VertexKey) -> Result<Vec<VertexKey>> {
    let VertexKey::Glyph { cell, slot } = key else {
        return Err(Error::Internal(
            "synthetic vertex has no glyph neighborhood".into(),
        ));
    };
    let kind = classify_cell(h, cell)?.kind;
    let stubs: &[StubDir] = match (kind, slot) {
        (GlyphKind::Cross, VSlot::Center) => &[StubDir::N, StubDir::E, StubDir::S, StubDir::W],
        (GlyphKind::WrenchMain, VSlot::Nw) => &[StubDir::N, StubDir::W],
        (GlyphKind::WrenchMain, VSlot::Se) => &[StubDir::S, StubDir::E],
        (GlyphKind::WrenchAnti, VSlot::Ne) => &[StubDir::N, StubDir::E],
        (GlyphKind::WrenchAnti, VSlot::Sw) => &[StubDir::S, StubDir::W],
        _ => {
            return Err(Error::Internal(format!(
                "vertex {key} does not match its cell's glyph"
            )))
        }
    };
    let mut out = Vec::with_capacity(4);
    for &dir in stubs {
        let (di, dj) = dir.offset();
        let ncell = FacePoint::new(cell.i + di, cell.j + dj);
        let nkind = classify_cell(h, ncell)?.kind;
        out.push(VertexKey::glyph(ncell, stub_slot(nkind, dir.opposite())));
    }
    if let Some((s1, s2)) = wrench_slots(kind) {
        out.push(VertexKey::glyph(cell, if slot == s1 { s2 } else { s1 }));
    }
    Ok(out)
}

/// Splits the boundary loop by the horizontal and vertical lines through the
/// apex face and classifies each boundary vertex as inward or outward.
pub fn boundary_paths(g: &GraphWithOpenFaces) -> Result<BoundaryReport> {
    if !g.pristine {
        return Err(Error::Internal(
            "boundary analysis requires an unmodified constructed graph".into(),
        ));
    }
    let boundary = g.boundary_edges();
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &eid in &boundary {
        incident.entry(g.edges[eid].v1).or_default().push(eid);
        incident.entry(g.edges[eid].v2).or_default().push(eid);
    }
    if incident.values().any(|v| v.len() != 2) {
        return Err(Error::Internal("boundary is not a simple loop".into()));
    }
    let start = *incident.keys().next().unwrap();
    let mut cycle = vec![start];
    let mut prev_edge = usize::MAX;
    let mut at = start;
    loop {
        let eid = *incident[&at]
            .iter()
            .find(|&&e| e != prev_edge)
            .expect("two boundary edges per vertex");
        at = g.edges[eid].other(at);
        prev_edge = eid;
        if at == start {
            break;
        }
        cycle.push(at);
    }

    let quadrant = |v: usize| -> Result<u8> {
        let (x, y) = g.vertices[v].pos;
        let dx = x - 4 * g.apex.i;
        let dy = y - 4 * g.apex.j;
        if dx == 0 || dy == 0 {
            return Err(Error::Internal("boundary vertex on a splitting line".into()));
        }
        Ok(match (dx > 0, dy > 0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        })
    };

    // Rotate the cycle to start at a quadrant change and split into runs.
    let quads: Vec<u8> = cycle.iter().map(|&v| quadrant(v)).collect::<Result<_>>()?;
    let n = cycle.len();
    let start_idx = (0..n)
        .find(|&k| quads[(k + n - 1) % n] != quads[k])
        .unwrap_or(0);
    let boundary_set: BTreeSet<usize> = incident.keys().copied().collect();
    let mut arcs: Vec<BoundaryArc> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut current_quad = quads[start_idx];
    for k in 0..n {
        let idx = (start_idx + k) % n;
        if quads[idx] != current_quad {
            arcs.push(make_arc(g, &boundary_set, std::mem::take(&mut current))?);
            current_quad = quads[idx];
        }
        current.push(cycle[idx]);
    }
    arcs.push(make_arc(g, &boundary_set, current)?);
    if arcs.len() != 4 {
        return Err(Error::Internal(format!(
            "boundary split into {} arcs, expected 4",
            arcs.len()
        )));
    }
    Ok(BoundaryReport { arcs })
}

fn make_arc(
    g: &GraphWithOpenFaces,
    boundary_set: &BTreeSet<usize>,
    vertices: Vec<usize>,
) -> Result<BoundaryArc> {
    let mut inward = Vec::with_capacity(vertices.len());
    for &v in &vertices {
        let neighbors = infinite_neighbors(&g.height, g.vertices[v].key)?;
        let all_in = neighbors.iter().all(|k| g.vertex_id(*k).is_some());
        let all_out = neighbors.iter().all(|k| match g.vertex_id(*k) {
            None => true,
            Some(w) => boundary_set.contains(&w),
        });
        // The two classes overlap when every neighbor lies on the loop
        // itself; such a vertex fills the inward slot of the alternation.
        if !all_in && !all_out {
            return Err(Error::Internal(format!(
                "boundary vertex {v} is neither inward nor outward"
            )));
        }
        inward.push(all_in);
    }
    Ok(BoundaryArc { vertices, inward })
}

/// Vertex, edge, and face injections from a smaller constructed graph into a
/// larger one over the same surface.
#[derive(Clone, Debug)]
pub struct InclusionWitness {
    pub vertex_map: BTreeMap<usize, usize>,
    pub edge_map: BTreeMap<usize, usize>,
    /// Inner face → true when the face is closed on the outer side.
    pub face_map: BTreeMap<FacePoint, bool>,
}

pub fn subgraph_inclusion(
    inner: &GraphWithOpenFaces,
    outer: &GraphWithOpenFaces,
) -> Result<InclusionWitness> {
    if !inner.pristine || !outer.pristine {
        return Err(Error::NotASubgraph("rewritten graphs are not comparable".into()));
    }
    if inner.height != outer.height {
        return Err(Error::NotASubgraph("graphs come from different surfaces".into()));
    }
    let mut vertex_map = BTreeMap::new();
    for (vid, v) in inner.vertices.iter().enumerate() {
        match outer.vertex_id(v.key) {
            Some(w) => {
                vertex_map.insert(vid, w);
            }
            None => return Err(Error::NotASubgraph(format!("vertex {} missing", v.key))),
        }
    }
    let mut outer_edge_lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (eid, e) in outer.edges.iter().enumerate() {
        outer_edge_lookup.insert((e.v1, e.v2), eid);
    }
    let mut edge_map = BTreeMap::new();
    for (eid, e) in inner.edges.iter().enumerate() {
        let (a, b) = (vertex_map[&e.v1], vertex_map[&e.v2]);
        match outer_edge_lookup.get(&(a.min(b), a.max(b))) {
            Some(&oid) => {
                if outer.edges[oid].weight != e.weight {
                    return Err(Error::NotASubgraph(format!("edge {eid} changes label")));
                }
                edge_map.insert(eid, oid);
            }
            None => return Err(Error::NotASubgraph(format!("edge {eid} missing"))),
        }
    }
    let mut face_map = BTreeMap::new();
    for (f, _, closed) in inner.faces() {
        let outer_closed = outer.closed_faces.contains_key(f);
        let outer_open = outer.open_faces.contains_key(f);
        if closed && !outer_closed {
            return Err(Error::NotASubgraph(format!(
                "closed face {f} not closed outside"
            )));
        }
        if !outer_closed && !outer_open {
            return Err(Error::NotASubgraph(format!("face {f} missing outside")));
        }
        face_map.insert(*f, outer_closed);
    }
    Ok(InclusionWitness { vertex_map, edge_map, face_map })
}

/// A rectangular window of the infinite graph of the truncated surface, with
/// the apex subgraph and the standard outer matching identified inside it.
#[derive(Clone, Debug)]
pub struct WindowGraph {
    pub window: Rect,
    /// Cells fully inside the window, with their glyphs (truncated surface).
    pub cells: BTreeMap<FacePoint, GlyphKind>,
    /// All window edges as ordered vertex-key pairs, with weight and the two
    /// separated faces.
    pub edges: BTreeMap<(VertexKey, VertexKey), (EdgeWeight, FacePoint, FacePoint)>,
    /// Edges belonging to the apex subgraph.
    pub subgraph_edges: BTreeSet<(VertexKey, VertexKey)>,
    /// Vertices of the apex subgraph.
    pub subgraph_vertices: BTreeSet<VertexKey>,
    /// The standard outer matching restricted to the window: the middle edge
    /// of every wrench outside the subgraph.
    pub outer_matching: BTreeSet<(VertexKey, VertexKey)>,
}

impl WindowGraph {
    /// Vertices of window cells at least `margin` cells from the rim.
    pub fn vertices_with_margin(&self, margin: i64) -> BTreeSet<VertexKey> {
        let mut out = BTreeSet::new();
        for (&cell, &kind) in &self.cells {
            if cell.i < self.window.i_min + margin
                || cell.i + 1 > self.window.i_max - margin
                || cell.j < self.window.j_min + margin
                || cell.j + 1 > self.window.j_max - margin
            {
                continue;
            }
            match wrench_slots(kind) {
                None => {
                    out.insert(VertexKey::glyph(cell, VSlot::Center));
                }
                Some((s1, s2)) => {
                    out.insert(VertexKey::glyph(cell, s1));
                    out.insert(VertexKey::glyph(cell, s2));
                }
            }
        }
        out
    }
}

/// Builds the window graph of min(h, p) and its standard outer matching.
///
/// The window must contain every closed face of the apex subgraph with a
/// one-cell margin.
pub fn standard_outer_matching(
    h: &HeightFunction,
    apex: LatticePoint,
    window: Rect,
) -> Result<WindowGraph> {
    let truncated = h.truncate(apex)?;
    let closed: BTreeSet<FacePoint> = closed_faces(h, apex)?.into_iter().collect();
    for &f in &closed {
        if f.i - 2 < window.i_min
            || f.i + 2 > window.i_max
            || f.j - 2 < window.j_min
            || f.j + 2 > window.j_max
        {
            return Err(Error::WindowTooSmall(format!(
                "closed face {f} needs a one-cell margin inside the window"
            )));
        }
    }

    let mut cells = BTreeMap::new();
    for ci in window.i_min..window.i_max {
        for cj in window.j_min..window.j_max {
            let cell = FacePoint::new(ci, cj);
            cells.insert(cell, classify_cell(&truncated, cell)?.kind);
        }
    }

    let mut edges: BTreeMap<(VertexKey, VertexKey), (EdgeWeight, FacePoint, FacePoint)> =
        BTreeMap::new();
    for (&cell, &kind) in &cells {
        if let (Some((s1, s2)), Some((fa, fb))) =
            (wrench_slots(kind), wrench_separated_faces(cell, kind))
        {
            let (a, b) = (VertexKey::glyph(cell, s1), VertexKey::glyph(cell, s2));
            edges.insert((a.min(b), a.max(b)), (EdgeWeight::Unweighted, fa, fb));
        }
        // Stubs east and north join the next cell over when it exists.
        for dir in [StubDir::E, StubDir::N] {
            let (di, dj) = dir.offset();
            let ncell = FacePoint::new(cell.i + di, cell.j + dj);
            let Some(&nkind) = cells.get(&ncell) else { continue };
            let (fa, fb) = match dir {
                StubDir::E => (
                    FacePoint::new(cell.i + 1, cell.j),
                    FacePoint::new(cell.i + 1, cell.j + 1),
                ),
                _ => (
                    FacePoint::new(cell.i, cell.j + 1),
                    FacePoint::new(cell.i + 1, cell.j + 1),
                ),
            };
            let label = weighted_edge_label(fa, truncated.value(fa), fb, truncated.value(fb));
            let (a, b) = (
                VertexKey::glyph(cell, stub_slot(kind, dir)),
                VertexKey::glyph(ncell, stub_slot(nkind, dir.opposite())),
            );
            edges.insert((a.min(b), a.max(b)), (EdgeWeight::Weighted(label), fa, fb));
        }
    }

    let mut subgraph_edges = BTreeSet::new();
    let mut subgraph_vertices = BTreeSet::new();
    for (&(a, b), (_, fa, fb)) in &edges {
        if closed.contains(fa) || closed.contains(fb) {
            subgraph_edges.insert((a, b));
            subgraph_vertices.insert(a);
            subgraph_vertices.insert(b);
        }
    }

    let mut outer_matching = BTreeSet::new();
    for (&(a, b), (w, _, _)) in &edges {
        if *w != EdgeWeight::Unweighted {
            continue;
        }
        let a_in = subgraph_vertices.contains(&a);
        let b_in = subgraph_vertices.contains(&b);
        if a_in != b_in {
            return Err(Error::Internal(
                "wrench middle edge straddles the subgraph boundary".into(),
            ));
        }
        if !a_in {
            outer_matching.insert((a, b));
        }
    }

    let wg = WindowGraph {
        window,
        cells,
        edges,
        subgraph_edges,
        subgraph_vertices,
        outer_matching,
    };
    // The outer matching covers every outside vertex exactly once; middle
    // edges stay inside their cell, so per-cell coverage is complete.
    for key in wg.vertices_with_margin(0) {
        if wg.subgraph_vertices.contains(&key) {
            continue;
        }
        let covered = wg
            .outer_matching
            .iter()
            .filter(|&&(a, b)| a == key || b == key)
            .count();
        if covered != 1 {
            return Err(Error::Internal(format!(
                "outer matching covers {key} {covered} times"
            )));
        }
    }
    Ok(wg)
}
