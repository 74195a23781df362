//! Condensation identities, exponent recovery, and height functions on
//! matchings.
//!
//! Everything here is a checkable statement: the nine-set vertex partition
//! and its bilinear identity, recovery of edge exponents from face
//! exponents by half-plane sums, quarter-weight heights in bijection with
//! matchings, and the finite verification of acceptable matchings against
//! the standard outer matching.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{
    build_subgraph, standard_outer_matching, Color, EdgeWeight, GraphWithOpenFaces, VertexKey,
};
use crate::lattice::{EdgeKind, EdgeLabel, FacePoint, HeightFunction, LatticePoint, Rect};
use crate::laurent::{LaurentPoly, Monomial, VarId};
use crate::matching::{enumerate_on_edges, EnumerationLimits, Matching};

/// The nine vertex classes of the condensation partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    C,
    N,
    Ne,
    E,
    Se,
    S,
    Sw,
    W,
    Nw,
}

impl Region {
    pub fn all() -> [Region; 9] {
        [
            Region::C,
            Region::N,
            Region::Ne,
            Region::E,
            Region::Se,
            Region::S,
            Region::Sw,
            Region::W,
            Region::Nw,
        ]
    }
}

/// Vertex partition of G(n₀,i₀,j₀) into the nine condensation sets, plus
/// the graph itself and the color orientation that satisfied the sign
/// conditions.
pub struct KuoPartition {
    pub graph: GraphWithOpenFaces,
    pub regions: BTreeMap<Region, BTreeSet<usize>>,
    /// True when Black counts as the positive color in the imbalance
    /// conditions; the coloring is canonical only up to a global swap.
    pub black_positive: bool,
}

fn delta(g: &GraphWithOpenFaces, set: &BTreeSet<usize>) -> i64 {
    set.iter()
        .map(|&v| if g.vertices[v].color == Color::Black { 1 } else { -1 })
        .sum()
}

/// Vertices of `set` bordering a vertex outside `set`.
fn boundary_of(g: &GraphWithOpenFaces, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    set.iter()
        .copied()
        .filter(|&v| g.incident_edges(v).iter().any(|&(_, w)| !set.contains(&w)))
        .collect()
}

/// Builds the nine-set partition and verifies every hypothesis of the
/// condensation theorem on it.
pub fn kuo_partition(h: &HeightFunction, apex: LatticePoint) -> Result<KuoPartition> {
    let center_h = h.value(apex.face());
    if apex.n - 2 <= center_h {
        return Err(Error::SimplifyingAssumptionViolated);
    }
    let graph = build_subgraph(h, apex)?;
    let LatticePoint { n, i, j } = apex;
    let sub = |n: i64, i: i64, j: i64| -> Result<GraphWithOpenFaces> {
        build_subgraph(h, LatticePoint::new(n, i, j)?)
    };
    let g_e = sub(n - 1, i + 1, j)?;
    let g_w = sub(n - 1, i - 1, j)?;
    let g_n = sub(n - 1, i, j + 1)?;
    let g_s = sub(n - 1, i, j - 1)?;
    let g_c = sub(n - 2, i, j)?;

    let mut regions: BTreeMap<Region, BTreeSet<usize>> =
        Region::all().iter().map(|&r| (r, BTreeSet::new())).collect();
    for (vid, v) in graph.vertices.iter().enumerate() {
        let e = g_e.vertex_id(v.key).is_some();
        let w = g_w.vertex_id(v.key).is_some();
        let nn = g_n.vertex_id(v.key).is_some();
        let s = g_s.vertex_id(v.key).is_some();
        let region = match (e, nn, w, s) {
            (true, true, true, true) => Region::C,
            (true, false, false, false) => Region::E,
            (false, true, false, false) => Region::N,
            (false, false, true, false) => Region::W,
            (false, false, false, true) => Region::S,
            (true, true, false, false) => Region::Ne,
            (false, true, true, false) => Region::Nw,
            (false, false, true, true) => Region::Sw,
            (true, false, false, true) => Region::Se,
            other => {
                return Err(Error::Internal(format!(
                    "vertex {} has impossible membership pattern {:?}",
                    v.key, other
                )))
            }
        };
        regions.get_mut(&region).unwrap().insert(vid);
    }

    // The center set is exactly the subgraph two levels down.
    let c_keys: BTreeSet<VertexKey> = regions[&Region::C]
        .iter()
        .map(|&v| graph.vertices[v].key)
        .collect();
    let expect_c: BTreeSet<VertexKey> = g_c.vertices.iter().map(|v| v.key).collect();
    if c_keys != expect_c {
        return Err(Error::Internal(
            "center set differs from the twice-lowered subgraph".into(),
        ));
    }

    // Sign conditions, tried under both global colorings.
    let signed = |sign: i64| -> bool {
        delta(&graph, &regions[&Region::Ne]) == sign
            && delta(&graph, &regions[&Region::Sw]) == sign
            && delta(&graph, &regions[&Region::Se]) == -sign
            && delta(&graph, &regions[&Region::Nw]) == -sign
            && [Region::C, Region::N, Region::E, Region::S, Region::W]
                .iter()
                .all(|r| delta(&graph, &regions[r]) == 0)
    };
    let boundary_color = |region: Region, color: Color| -> bool {
        boundary_of(&graph, &regions[&region])
            .iter()
            .all(|&v| graph.vertices[v].color == color)
    };
    let orientation_ok = |black_positive: bool| -> bool {
        let sign = if black_positive { 1 } else { -1 };
        let pos = if black_positive { Color::Black } else { Color::White };
        signed(sign)
            && boundary_color(Region::Ne, pos)
            && boundary_color(Region::Sw, pos)
            && boundary_color(Region::Nw, pos.flip())
            && boundary_color(Region::Se, pos.flip())
    };
    let black_positive = if orientation_ok(true) {
        true
    } else if orientation_ok(false) {
        false
    } else {
        return Err(Error::IdentityViolated(
            "no color orientation satisfies the imbalance and boundary conditions".into(),
        ));
    };

    // Only the permitted region adjacencies occur.
    let allowed: BTreeSet<(Region, Region)> = [
        (Region::C, Region::Ne),
        (Region::C, Region::Nw),
        (Region::C, Region::Se),
        (Region::C, Region::Sw),
        (Region::Ne, Region::N),
        (Region::Ne, Region::E),
        (Region::Nw, Region::N),
        (Region::Nw, Region::W),
        (Region::Se, Region::S),
        (Region::Se, Region::E),
        (Region::Sw, Region::S),
        (Region::Sw, Region::W),
        (Region::Ne, Region::Nw),
        (Region::Se, Region::Sw),
        (Region::Ne, Region::Se),
        (Region::Nw, Region::Sw),
    ]
    .into_iter()
    .flat_map(|(a, b)| [(a, b), (b, a)])
    .collect();
    let region_of = |v: usize| -> Region {
        *regions.iter().find(|(_, set)| set.contains(&v)).unwrap().0
    };
    for e in &graph.edges {
        let (ra, rb) = (region_of(e.v1), region_of(e.v2));
        if ra != rb && !allowed.contains(&(ra, rb)) {
            return Err(Error::Internal(format!(
                "edge between {ra:?} and {rb:?} breaks the connectivity hypotheses"
            )));
        }
    }

    // The four cardinal sets have unique matchings reducing to the four
    // boundary edge variables of the recurrence step.
    let expectations = [
        (Region::E, EdgeLabel::new(i + n - 1, j, EdgeKind::A).unwrap()),
        (Region::W, EdgeLabel::new(i - n + 1, j, EdgeKind::C).unwrap()),
        (Region::N, EdgeLabel::new(i, j + n - 1, EdgeKind::B).unwrap()),
        (Region::S, EdgeLabel::new(i, j - n + 1, EdgeKind::D).unwrap()),
    ];
    for (region, label) in expectations {
        let poly = induced_edge_polynomial(&graph, &regions[&region], EnumerationLimits::none())?;
        let expect = LaurentPoly::var(VarId::Edge(label));
        if poly != expect {
            return Err(Error::IdentityViolated(format!(
                "m({region:?}) = {poly}, expected {expect}"
            )));
        }
    }

    Ok(KuoPartition { graph, regions, black_positive })
}

/// Matching polynomial of the induced subgraph on a vertex set, with face
/// variables at one: a polynomial in the edge variables only.
pub fn induced_edge_polynomial(
    g: &GraphWithOpenFaces,
    vertices: &BTreeSet<usize>,
    limits: EnumerationLimits,
) -> Result<LaurentPoly> {
    let ids: Vec<usize> = vertices.iter().copied().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for e in &g.edges {
        if let (Some(&a), Some(&b)) = (index.get(&e.v1), index.get(&e.v2)) {
            pairs.push((a, b));
            labels.push(match &e.weight {
                EdgeWeight::Weighted(l) => Some(*l),
                EdgeWeight::Unweighted => None,
            });
        }
    }
    let mut out = LaurentPoly::zero();
    for m in enumerate_on_edges(ids.len(), &pairs, limits)? {
        let mono = Monomial::from_pairs(
            m.iter()
                .filter_map(|&e| labels[e].map(|l| (VarId::Edge(l), 1))),
        );
        out = out.add(&LaurentPoly::monomial(mono, BigInt::one()));
    }
    Ok(out)
}

/// Outcome of one condensation check.
#[derive(Clone, Debug)]
pub struct CondensationReport {
    pub apex: LatticePoint,
    pub lhs_terms: usize,
    pub identity_holds: bool,
    pub supports_disjoint: bool,
    pub coefficients_power_of_two: bool,
}

impl CondensationReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.supports_disjoint && self.coefficients_power_of_two
    }
}

fn is_power_of_two(c: &BigInt) -> bool {
    if c.is_zero() || c < &BigInt::zero() {
        return false;
    }
    (c & (c - BigInt::one())).is_zero()
}

/// Checks the bilinear condensation identity exactly, with face variables
/// set to one: m(G)m(C) equals the north/south product plus the east/west
/// product, every monomial lands in exactly one product, and every
/// coefficient is a power of two.
pub fn verify_condensation(h: &HeightFunction, apex: LatticePoint) -> Result<CondensationReport> {
    let part = kuo_partition(h, apex)?;
    let g = &part.graph;
    let union = |rs: &[Region]| -> BTreeSet<usize> {
        rs.iter().flat_map(|r| part.regions[r].iter().copied()).collect()
    };
    let poly = |set: &BTreeSet<usize>| -> Result<LaurentPoly> {
        induced_edge_polynomial(g, set, EnumerationLimits::none())
    };

    let all: BTreeSet<usize> = (0..g.vertex_count()).collect();
    let m_g = poly(&all)?;
    let m_c = poly(&part.regions[&Region::C])?;
    let lhs = m_g.mul(&m_c);

    let north = poly(&union(&[Region::N, Region::Ne, Region::Nw, Region::C]))?;
    let south = poly(&union(&[Region::S, Region::Se, Region::Sw, Region::C]))?;
    let east = poly(&union(&[Region::E, Region::Ne, Region::Se, Region::C]))?;
    let west = poly(&union(&[Region::W, Region::Nw, Region::Sw, Region::C]))?;
    let m_e = poly(&part.regions[&Region::E])?;
    let m_w = poly(&part.regions[&Region::W])?;
    let m_n = poly(&part.regions[&Region::N])?;
    let m_s = poly(&part.regions[&Region::S])?;

    let rhs1 = north.mul(&south).mul(&m_e).mul(&m_w);
    let rhs2 = east.mul(&west).mul(&m_n).mul(&m_s);
    let rhs = rhs1.add(&rhs2);

    let identity_holds = lhs == rhs;
    let support1: BTreeSet<&Monomial> = rhs1.terms().map(|(m, _)| m).collect();
    let supports_disjoint = rhs2.terms().all(|(m, _)| !support1.contains(m));
    let coefficients_power_of_two = rhs1
        .terms()
        .chain(rhs2.terms())
        .all(|(_, c)| is_power_of_two(c));

    let report = CondensationReport {
        apex,
        lhs_terms: lhs.term_count(),
        identity_holds,
        supports_disjoint,
        coefficients_power_of_two,
    };
    if !report.passed() {
        return Err(Error::IdentityViolated(format!(
            "apex {apex:?}: identity={identity_holds}, disjoint={supports_disjoint}, \
             powers_of_two={coefficients_power_of_two}"
        )));
    }
    Ok(report)
}

/// Recovers every weighted edge's exponent from the face exponents alone.
///
/// For each label the surface splits into four quadrants by two even linear
/// forms; the four quadrant sums must agree on a single δ ∈ {0, 1}.
pub fn recover_edge_exponents(
    g: &GraphWithOpenFaces,
    face_exp: &BTreeMap<FacePoint, i64>,
) -> Result<BTreeMap<EdgeLabel, u8>> {
    let labels = g.label_edges()?;
    let faces: Vec<(LatticePoint, i64)> = g
        .faces()
        .map(|(f, _, _)| {
            let pt = g.face_surface_point(*f);
            (pt, face_exp.get(f).copied().unwrap_or(0))
        })
        .collect();
    let mut out = BTreeMap::new();
    for label in labels.values() {
        let (i0, j0) = (label.i, label.j);
        let forms = |p: LatticePoint| -> (i64, i64) {
            let LatticePoint { n, i, j } = p;
            match label.kind {
                EdgeKind::A => (n + i + j - (i0 + j0 + 1), n + i - j - (i0 - j0 + 1)),
                EdgeKind::B => (n + i + j - (i0 + j0 + 1), n - i + j - (-i0 + j0 + 1)),
                EdgeKind::C => (n - i + j - (-i0 + j0 + 1), n - i - j - (-i0 - j0 + 1)),
                EdgeKind::D => (n + i - j - (i0 - j0 + 1), n - i - j - (-i0 - j0 + 1)),
            }
        };
        let (mut sum_p, mut sum_q, mut sum_r, mut sum_s) = (0i64, 0i64, 0i64, 0i64);
        for &(pt, eps) in &faces {
            let (u, v) = forms(pt);
            debug_assert_eq!(u.rem_euclid(2), 0);
            debug_assert_eq!(v.rem_euclid(2), 0);
            match (u < 0, v < 0) {
                (true, true) => sum_p += eps,
                (true, false) => sum_q += eps,
                (false, false) => sum_r += eps,
                (false, true) => sum_s += eps,
            }
        }
        let candidates = [-sum_p, sum_q, 1 - sum_r, sum_s];
        let delta = candidates[0];
        if candidates.iter().any(|&c| c != delta) || !(0..=1).contains(&delta) {
            return Err(Error::InconsistentExponents(format!(
                "label {label}: quadrant sums give {candidates:?}"
            )));
        }
        out.insert(*label, delta as u8);
    }
    Ok(out)
}

/// Edge weight in quarter units: 1 for weighted connector edges, 2 for
/// unweighted wrench middles. Around every vertex of the infinite graph the
/// quarters sum to 4.
pub fn propp_weights(g: &GraphWithOpenFaces) -> BTreeMap<usize, u8> {
    g.edges
        .iter()
        .enumerate()
        .map(|(eid, e)| (eid, if e.is_weighted() { 1 } else { 2 }))
        .collect()
}

/// Checks the vertex weight sums over the infinite graph: every vertex of
/// the subgraph, extended by the infinite-graph edges it is missing, must
/// total exactly 4 quarters. Boundary vertices exercise the glyph-local
/// configurations this way.
pub fn propp_weight_sums_ok(g: &GraphWithOpenFaces) -> Result<()> {
    if !g.pristine {
        return Err(Error::Internal("weight sums require a constructed graph".into()));
    }
    let weights = propp_weights(g);
    for (vid, v) in g.vertices.iter().enumerate() {
        let VertexKey::Glyph { cell, .. } = v.key else {
            return Err(Error::Internal("synthetic vertex".into()));
        };
        let mut quarters: i64 = g
            .incident_edges(vid)
            .iter()
            .map(|&(e, _)| weights[&e] as i64)
            .sum();
        let present: BTreeSet<VertexKey> = g
            .incident_edges(vid)
            .iter()
            .map(|&(_, w)| g.vertices[w].key)
            .collect();
        for nb in crate::graph::infinite_neighbors(&g.height, v.key)? {
            if present.contains(&nb) {
                continue;
            }
            // A missing edge within the same cell is the wrench middle.
            let same_cell = matches!(nb, VertexKey::Glyph { cell: c, .. } if c == cell);
            quarters += if same_cell { 2 } else { 1 };
        }
        if quarters != 4 {
            return Err(Error::Internal(format!(
                "vertex {} weight sum is {quarters} quarters",
                v.key
            )));
        }
    }
    Ok(())
}

/// A height on the faces of the graph, in quarter units, normalized so the
/// minimum is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProppHeight {
    pub quarters: BTreeMap<FacePoint, i64>,
}

/// True when crossing the edge from `from` toward `to` puts the white
/// endpoint on the left.
fn white_on_left(
    g: &GraphWithOpenFaces,
    edge: usize,
    from: FacePoint,
    to: FacePoint,
) -> Result<bool> {
    let e = &g.edges[edge];
    let (pw, pb) = match (g.vertices[e.v1].color, g.vertices[e.v2].color) {
        (Color::White, Color::Black) => (g.vertices[e.v1].pos, g.vertices[e.v2].pos),
        (Color::Black, Color::White) => (g.vertices[e.v2].pos, g.vertices[e.v1].pos),
        _ => return Err(Error::Internal("edge endpoints share a color".into())),
    };
    let dfrom = crate::graph::face_position(from);
    let dto = crate::graph::face_position(to);
    let dir = (dto.0 - dfrom.0, dto.1 - dfrom.1);
    let across = (pw.0 - pb.0, pw.1 - pb.1);
    let cross = dir.0 * across.1 - dir.1 * across.0;
    if cross == 0 {
        return Err(Error::Internal("degenerate edge orientation".into()));
    }
    Ok(cross > 0)
}

/// Integrates the height steps of a matching over the dual graph from a
/// fixed root, checking path independence, then normalizes to minimum zero.
pub fn propp_height(g: &GraphWithOpenFaces, m: &Matching) -> Result<ProppHeight> {
    if !g.pristine {
        return Err(Error::Internal("heights require a constructed graph".into()));
    }
    let weights = propp_weights(g);
    // Dual adjacency: each edge separates exactly two faces of the graph.
    let mut by_face: BTreeMap<FacePoint, Vec<usize>> = BTreeMap::new();
    for (f, boundary, _) in g.faces() {
        by_face.insert(*f, boundary.clone());
    }
    let mut values: BTreeMap<FacePoint, i64> = BTreeMap::new();
    let root = *by_face.keys().next().ok_or_else(|| Error::Internal("no faces".into()))?;
    values.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let hf = values[&f];
        for &eid in &by_face[&f] {
            let (fa, fb) = g.edges[eid].faces;
            let other = if fa == f { fb } else { fa };
            if !by_face.contains_key(&other) {
                return Err(Error::Internal(format!(
                    "edge {eid} borders {other} outside the graph"
                )));
            }
            let step = weights[&eid] as i64 - if m.contains(eid) { 4 } else { 0 };
            // H(near) − H(far) = step, oriented white-on-left.
            let expected_other = if white_on_left(g, eid, f, other)? {
                hf - step
            } else {
                hf + step
            };
            match values.get(&other) {
                None => {
                    values.insert(other, expected_other);
                    queue.push_back(other);
                }
                Some(&have) => {
                    if have != expected_other {
                        return Err(Error::PathInconsistency(format!(
                            "face {other}: {have} vs {expected_other} across edge {eid}"
                        )));
                    }
                }
            }
        }
    }
    let min = *values.values().min().unwrap();
    for v in values.values_mut() {
        *v -= min;
    }
    Ok(ProppHeight { quarters: values })
}

/// Reads the matching back off a height: an edge is used exactly when the
/// white-on-left drop equals its weight minus one.
pub fn matching_from_height(g: &GraphWithOpenFaces, height: &ProppHeight) -> Result<Matching> {
    let weights = propp_weights(g);
    let mut edges = Vec::new();
    for (eid, e) in g.edges.iter().enumerate() {
        let (fa, fb) = e.faces;
        let (ha, hb) = (
            *height
                .quarters
                .get(&fa)
                .ok_or_else(|| Error::Internal(format!("missing face {fa}")))?,
            *height
                .quarters
                .get(&fb)
                .ok_or_else(|| Error::Internal(format!("missing face {fb}")))?,
        );
        let drop = if white_on_left(g, eid, fa, fb)? { ha - hb } else { hb - ha };
        let w = weights[&eid] as i64;
        if drop == w - 4 {
            edges.push(eid);
        } else if drop != w {
            return Err(Error::PathInconsistency(format!(
                "edge {eid}: drop {drop} is neither w nor w-4"
            )));
        }
    }
    edges.sort_unstable();
    let m = Matching { edges };
    // Must cover every vertex exactly once.
    let mut covered = vec![0usize; g.vertex_count()];
    for &eid in &m.edges {
        covered[g.edges[eid].v1] += 1;
        covered[g.edges[eid].v2] += 1;
    }
    if covered.iter().any(|&c| c != 1) {
        return Err(Error::NotAMatching("height does not decode to a matching".into()));
    }
    Ok(m)
}

/// Checks a window matching of the truncated infinite graph against the
/// standard outer matching: acceptable means they coincide on the entire
/// outer region.
pub fn verify_acceptable(
    h: &HeightFunction,
    apex: LatticePoint,
    window: Rect,
    m: &BTreeSet<(VertexKey, VertexKey)>,
) -> Result<bool> {
    let wg = standard_outer_matching(h, apex, window)?;
    let inner = wg.vertices_with_margin(1);
    let rim: BTreeSet<VertexKey> = wg
        .vertices_with_margin(0)
        .difference(&inner)
        .copied()
        .collect();
    if rim.iter().any(|v| wg.subgraph_vertices.contains(v)) {
        return Err(Error::CollarTooThin(
            "the subgraph reaches the window's rim ring".into(),
        ));
    }
    // Edges must exist in the window.
    for pair in m {
        if !wg.edges.contains_key(pair) {
            return Err(Error::NotAMatching(format!(
                "{} - {} is not a window edge",
                pair.0, pair.1
            )));
        }
    }
    // Interior vertices are covered exactly once.
    let mut coverage: BTreeMap<VertexKey, usize> = BTreeMap::new();
    for &(a, b) in m {
        *coverage.entry(a).or_insert(0) += 1;
        *coverage.entry(b).or_insert(0) += 1;
    }
    for v in &inner {
        if coverage.get(v).copied().unwrap_or(0) != 1 {
            return Err(Error::NotAMatching(format!(
                "interior vertex {v} covered {} times",
                coverage.get(v).copied().unwrap_or(0)
            )));
        }
    }
    // Precondition: agreement on the rim collar.
    for &(a, b) in m {
        if (rim.contains(&a) || rim.contains(&b))
            && !wg.outer_matching.contains(&(a, b)) {
                return Err(Error::CollarTooThin(format!(
                    "matching disagrees with the outer matching at the rim: {} - {}",
                    a, b
                )));
            }
    }
    // Verdict: outside the subgraph the matching is exactly the outer one.
    for &(a, b) in m {
        let outside = !wg.subgraph_vertices.contains(&a) || !wg.subgraph_vertices.contains(&b);
        if outside && !wg.outer_matching.contains(&(a, b)) {
            return Ok(false);
        }
    }
    for &(a, b) in &wg.outer_matching {
        if inner.contains(&a) && inner.contains(&b) && !m.contains(&(a, b)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The four alternating left/right turning walks away from an edge; a
/// drawing aid for the quadrant decomposition behind exponent recovery.
pub fn turning_paths(g: &GraphWithOpenFaces, edge: usize) -> [Vec<usize>; 4] {
    let walk = |start_from: usize, left_first: bool| -> Vec<usize> {
        let mut path = vec![edge];
        let mut at = start_from;
        let mut via = edge;
        let mut turn_left = left_first;
        while path.len() <= 2 * g.edges.len() {
            let incident = g.incident_edges(at);
            if incident.len() < 2 {
                break;
            }
            // Order incident edges by angle and step one position left or
            // right of the arrival edge.
            let vpos = g.vertices[at].pos;
            let mut ordered: Vec<(usize, usize)> = incident.to_vec();
            ordered.sort_by(|&(ea, wa), &(eb, wb)| {
                let pa = g.vertices[wa].pos;
                let pb = g.vertices[wb].pos;
                let va = (pa.0 - vpos.0, pa.1 - vpos.1);
                let vb = (pb.0 - vpos.0, pb.1 - vpos.1);
                let half = |v: (i64, i64)| u8::from(!(v.1 > 0 || (v.1 == 0 && v.0 > 0)));
                half(va)
                    .cmp(&half(vb))
                    .then_with(|| (vb.0 * va.1 - vb.1 * va.0).cmp(&0))
                    .then_with(|| ea.cmp(&eb))
            });
            let pos = ordered.iter().position(|&(e, _)| e == via).unwrap();
            let next_idx = if turn_left {
                (pos + 1) % ordered.len()
            } else {
                (pos + ordered.len() - 1) % ordered.len()
            };
            let (next_edge, next_vertex) = ordered[next_idx];
            if next_edge == via {
                break;
            }
            path.push(next_edge);
            at = g.edges[next_edge].other(at);
            let _ = next_vertex;
            via = next_edge;
            turn_left = !turn_left;
        }
        path
    };
    let e = &g.edges[edge];
    [
        walk(e.v1, true),
        walk(e.v1, false),
        walk(e.v2, true),
        walk(e.v2, false),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{enumerate_matchings, matching_exponents};

    fn lp(n: i64, i: i64, j: i64) -> LatticePoint {
        LatticePoint::new(n, i, j).unwrap()
    }

    fn none() -> EnumerationLimits {
        EnumerationLimits::none()
    }

    #[test]
    fn kuo_partition_aztec_order_three() {
        let part = kuo_partition(&HeightFunction::aztec(), lp(3, 0, 1)).unwrap();
        // Center is the order-one diamond: four vertices.
        assert_eq!(part.regions[&Region::C].len(), 4);
        assert_eq!(delta(&part.graph, &part.regions[&Region::C]), 0);
        // Cardinal sets carry a unique matching (verified inside), so they
        // are nonempty and balanced.
        for r in [Region::N, Region::E, Region::S, Region::W] {
            assert!(!part.regions[&r].is_empty());
            assert_eq!(delta(&part.graph, &part.regions[&r]), 0);
        }
    }

    #[test]
    fn kuo_requires_depth() {
        assert!(matches!(
            kuo_partition(&HeightFunction::aztec(), lp(1, 0, 1)),
            Err(Error::SimplifyingAssumptionViolated)
        ));
    }

    #[test]
    fn condensation_aztec_counts() {
        let report = verify_condensation(&HeightFunction::aztec(), lp(3, 0, 1)).unwrap();
        assert!(report.passed());
        // All edge variables to one: 64·2 = 8·8 + 8·8.
        let h = HeightFunction::aztec();
        let g = build_subgraph(&h, lp(3, 0, 1)).unwrap();
        let all: BTreeSet<usize> = (0..g.vertex_count()).collect();
        let m_g = induced_edge_polynomial(&g, &all, none()).unwrap();
        assert_eq!(m_g.all_ones_value(), BigInt::from(64));
    }

    #[test]
    fn condensation_fortress_and_wedge() {
        verify_condensation(&HeightFunction::fortress(), lp(4, 0, 0)).unwrap();
        verify_condensation(&HeightFunction::abs_sum(), lp(5, 1, 0)).unwrap();
        verify_condensation(&HeightFunction::gale_robinson(4, 1, 2).unwrap(), lp(3, 1, 0))
            .unwrap();
    }

    #[test]
    fn recovery_round_trip_running_example() {
        let g = build_subgraph(&HeightFunction::abs_sum(), lp(3, 1, 0)).unwrap();
        for m in enumerate_matchings(&g, none()).unwrap() {
            let exps = matching_exponents(&g, &m).unwrap();
            let recovered = recover_edge_exponents(&g, &exps.face_exp).unwrap();
            assert_eq!(recovered, exps.edge_exp);
        }
    }

    #[test]
    fn face_exponents_determine_the_matching() {
        let g = build_subgraph(&HeightFunction::fortress(), lp(2, 0, 0)).unwrap();
        let ms = enumerate_matchings(&g, none()).unwrap();
        let mut seen = BTreeSet::new();
        for m in &ms {
            let exps = matching_exponents(&g, m).unwrap();
            assert!(seen.insert(exps.face_exp.clone()), "face exponents repeat");
            let recovered = recover_edge_exponents(&g, &exps.face_exp).unwrap();
            assert_eq!(recovered, exps.edge_exp);
        }
    }

    #[test]
    fn propp_weight_sums() {
        for (h, apex) in [
            (HeightFunction::aztec(), lp(2, 0, 0)),
            (HeightFunction::fortress(), lp(3, 1, 0)),
            (HeightFunction::blum(), lp(3, 1, 0)),
        ] {
            let g = build_subgraph(&h, apex).unwrap();
            propp_weight_sums_ok(&g).unwrap();
        }
    }

    #[test]
    fn heights_biject_with_matchings() {
        for (h, apex) in [
            (HeightFunction::aztec(), lp(2, 0, 0)),
            (HeightFunction::fortress(), lp(2, 0, 0)),
            (HeightFunction::abs_sum(), lp(3, 1, 0)),
        ] {
            let g = build_subgraph(&h, apex).unwrap();
            let ms = enumerate_matchings(&g, none()).unwrap();
            let mut heights = BTreeSet::new();
            for m in &ms {
                let height = propp_height(&g, m).unwrap();
                assert!(heights.insert(height.clone()), "heights repeat");
                let back = matching_from_height(&g, &height).unwrap();
                assert_eq!(&back, m);
            }
        }
    }

    #[test]
    fn acceptable_matchings() {
        let h = HeightFunction::aztec();
        let apex = lp(1, 0, 1);
        let window = Rect::new(-5, 5, -4, 6);
        let wg = standard_outer_matching(&h, apex, window).unwrap();
        // Extend each matching of the subgraph by the outer matching.
        let g = build_subgraph(&h, apex).unwrap();
        for m in enumerate_matchings(&g, none()).unwrap() {
            let mut edges = wg.outer_matching.clone();
            for &eid in &m.edges {
                let e = &g.edges[eid];
                let (a, b) = (g.vertices[e.v1].key, g.vertices[e.v2].key);
                edges.insert((a.min(b), a.max(b)));
            }
            assert!(verify_acceptable(&h, apex, window, &edges).unwrap());
            // The verdict is stable under window enlargement.
            let bigger = Rect::new(-6, 6, -5, 7);
            let wg2 = standard_outer_matching(&h, apex, bigger).unwrap();
            let mut edges2 = wg2.outer_matching.clone();
            for &eid in &m.edges {
                let e = &g.edges[eid];
                let (a, b) = (g.vertices[e.v1].key, g.vertices[e.v2].key);
                edges2.insert((a.min(b), a.max(b)));
            }
            assert!(verify_acceptable(&h, apex, bigger, &edges2).unwrap());
        }
        // Swapping a far wrench pair breaks the matching or the collar.
        let mut broken = wg.outer_matching.clone();
        let far = *broken.iter().next().unwrap();
        broken.remove(&far);
        assert!(verify_acceptable(&h, apex, window, &broken).is_err());
    }

    #[test]
    fn turning_paths_terminate() {
        let g = build_subgraph(&HeightFunction::fortress(), lp(3, 1, 0)).unwrap();
        let paths = turning_paths(&g, 0);
        for p in &paths {
            assert!(!p.is_empty());
            assert!(p.len() <= 2 * g.edges.len() + 1);
        }
    }
}
