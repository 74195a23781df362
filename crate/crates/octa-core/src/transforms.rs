//! Matching-polynomial-preserving graph rewrites: vertex splitting and
//! urban renewal.
//!
//! Splitting stretches a vertex into a three-vertex path whose two new edges
//! are unweighted; matchings correspond one to one. Urban renewal elevates a
//! local-minimum face by two and rebuilds; the old and new matching
//! polynomials agree after substituting the renewal binomial for the face
//! variable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{
    build_subgraph, EdgeWeight, GEdge, GVertex, GraphWithOpenFaces, VertexKey,
};
use crate::lattice::{EdgeKind, EdgeLabel, FacePoint, HeightFunction};
use crate::laurent::{LaurentPoly, Monomial, VarId};

/// Direction of the path a split stretches the vertex into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitAxis {
    NorthSouth,
    EastWest,
    NeSw,
    NwSe,
}

impl SplitAxis {
    fn direction(self) -> (i64, i64) {
        match self {
            SplitAxis::NorthSouth => (0, 1),
            SplitAxis::EastWest => (1, 0),
            SplitAxis::NeSw => (1, 1),
            SplitAxis::NwSe => (-1, 1),
        }
    }

    pub fn all() -> [SplitAxis; 4] {
        [SplitAxis::NorthSouth, SplitAxis::EastWest, SplitAxis::NeSw, SplitAxis::NwSe]
    }
}

/// Replaces vertex `v` with a path v₁—w—v₂ of two unweighted edges. Incident
/// edges left of the axis stay on v₁, those right of it move to v₂; edges
/// parallel to the axis make the site invalid.
pub fn split_vertex(
    g: &GraphWithOpenFaces,
    v: usize,
    axis: SplitAxis,
) -> Result<GraphWithOpenFaces> {
    if v >= g.vertex_count() {
        return Err(Error::InvalidSplitSite(format!("no vertex {v}")));
    }
    let d = axis.direction();
    let vpos = g.vertices[v].pos;
    let mut left: Vec<usize> = Vec::new();
    let mut right: Vec<usize> = Vec::new();
    for &(eid, w) in g.incident_edges(v) {
        let wpos = g.vertices[w].pos;
        let vec = (wpos.0 - vpos.0, wpos.1 - vpos.1);
        let cross = d.0 * vec.1 - d.1 * vec.0;
        match cross.signum() {
            1 => left.push(eid),
            -1 => right.push(eid),
            _ => {
                return Err(Error::InvalidSplitSite(format!(
                    "edge {eid} is parallel to the split axis"
                )))
            }
        }
    }
    if left.is_empty() || right.is_empty() {
        return Err(Error::InvalidSplitSite(
            "all incident edges on one side of the axis".into(),
        ));
    }

    let mut out = g.clone().rewritten();
    let v_color = out.vertices[v].color;
    let mid_id = out.vertices.len();
    let far_id = mid_id + 1;
    let mid_key = VertexKey::Synthetic(out.next_synthetic);
    let far_key = VertexKey::Synthetic(out.next_synthetic + 1);
    out.next_synthetic += 2;
    out.vertices[v].pos = (vpos.0 + d.0, vpos.1 + d.1);
    out.vertices.push(GVertex { key: mid_key, pos: vpos, color: v_color.flip() });
    out.vertices.push(GVertex {
        key: far_key,
        pos: (vpos.0 - d.0, vpos.1 - d.1),
        color: v_color,
    });
    for &eid in &right {
        let e = &mut out.edges[eid];
        if e.v1 == v {
            e.v1 = far_id;
        }
        if e.v2 == v {
            e.v2 = far_id;
        }
        let (a, b) = (e.v1.min(e.v2), e.v1.max(e.v2));
        e.v1 = a;
        e.v2 = b;
    }
    // The two faces flanking the gaps between the edge groups pick up both
    // new edges; in a matching exactly one of the pair is used, so each
    // face's exponent is unchanged.
    let gap_faces: Vec<FacePoint> = g
        .faces()
        .filter_map(|(f, boundary, _)| {
            let has_left = boundary.iter().any(|e| left.contains(e));
            let has_right = boundary.iter().any(|e| right.contains(e));
            (has_left && has_right).then_some(*f)
        })
        .collect();
    let e1 = out.edges.len();
    let dummy_face = gap_faces.first().copied().unwrap_or(FacePoint::new(0, 0));
    let pair = (
        *gap_faces.first().unwrap_or(&dummy_face),
        *gap_faces.get(1).unwrap_or(&dummy_face),
    );
    out.edges.push(GEdge { v1: v, v2: mid_id, weight: EdgeWeight::Unweighted, faces: pair });
    out.edges.push(GEdge {
        v1: mid_id,
        v2: far_id,
        weight: EdgeWeight::Unweighted,
        faces: pair,
    });
    for f in &gap_faces {
        if let Some(list) = out.closed_faces.get_mut(f) {
            list.push(e1);
            list.push(e1 + 1);
        } else if let Some(list) = out.open_faces.get_mut(f) {
            list.push(e1);
            list.push(e1 + 1);
        }
    }
    out.rebuild_indices();
    Ok(out)
}

/// Undoes a split: removes a degree-2 vertex whose two edges are unweighted
/// synthetic insertions, merging its neighbors back into one vertex.
pub fn unsplit_vertex(g: &GraphWithOpenFaces, mid: usize) -> Result<GraphWithOpenFaces> {
    let incident = g.incident_edges(mid).to_vec();
    if incident.len() != 2 {
        return Err(Error::InvalidSplitSite("midpoint must have degree 2".into()));
    }
    let (e1, n1) = incident[0];
    let (e2, n2) = incident[1];
    if g.edges[e1].weight != EdgeWeight::Unweighted || g.edges[e2].weight != EdgeWeight::Unweighted
    {
        return Err(Error::InvalidSplitSite("midpoint edges must be unweighted".into()));
    }
    let mut out = g.clone().rewritten();
    // Merge n2 into n1 and drop mid and both path edges.
    let mut removed: Vec<usize> = vec![e1, e2];
    removed.sort_unstable();
    let mut edge_remap: Vec<Option<usize>> = vec![None; out.edges.len()];
    let mut kept_edges = Vec::with_capacity(out.edges.len() - 2);
    for (eid, e) in out.edges.iter().enumerate() {
        if removed.contains(&eid) {
            continue;
        }
        edge_remap[eid] = Some(kept_edges.len());
        kept_edges.push(e.clone());
    }
    for e in &mut kept_edges {
        for endpoint in [&mut e.v1, &mut e.v2] {
            if *endpoint == n2 {
                *endpoint = n1;
            }
        }
        let (a, b) = (e.v1.min(e.v2), e.v1.max(e.v2));
        e.v1 = a;
        e.v2 = b;
    }
    // Drop the two vertices, compacting ids.
    let mut vertex_remap: Vec<Option<usize>> = vec![None; out.vertices.len()];
    let mut kept_vertices = Vec::with_capacity(out.vertices.len() - 2);
    for (vid, v) in out.vertices.iter().enumerate() {
        if vid == mid || vid == n2 {
            continue;
        }
        vertex_remap[vid] = Some(kept_vertices.len());
        kept_vertices.push(v.clone());
    }
    for e in &mut kept_edges {
        e.v1 = vertex_remap[e.v1].ok_or_else(|| Error::Internal("dangling endpoint".into()))?;
        e.v2 = vertex_remap[e.v2].ok_or_else(|| Error::Internal("dangling endpoint".into()))?;
        let (a, b) = (e.v1.min(e.v2), e.v1.max(e.v2));
        e.v1 = a;
        e.v2 = b;
    }
    for list in out.closed_faces.values_mut().chain(out.open_faces.values_mut()) {
        list.retain(|e| !removed.contains(e));
        for e in list.iter_mut() {
            *e = edge_remap[*e].expect("face edge survived");
        }
    }
    out.vertices = kept_vertices;
    out.edges = kept_edges;
    out.rebuild_indices();
    Ok(out)
}

/// Raises a strict local minimum by two. The result is again a valid height
/// function: the four neighbors sat one above, now they sit one below.
pub fn elevate_face(h: &HeightFunction, face: FacePoint) -> Result<HeightFunction> {
    let v = h.value(face);
    if face.lattice_neighbors().iter().any(|nb| h.value(*nb) != v + 1) {
        return Err(Error::NotALocalMinimum(face));
    }
    Ok(h.with_face_set(face, v + 2))
}

/// The substitution produced by renewing a face: the face variable is
/// replaced by (a·c·x_N·x_S + b·d·x_E·x_W) / x(face).
#[derive(Clone, Debug)]
pub struct RenewalSubstitution {
    pub face: FacePoint,
    /// The replacement value, a genuine Laurent polynomial.
    pub replacement: LaurentPoly,
}

impl RenewalSubstitution {
    fn for_face(h: &HeightFunction, face: FacePoint) -> RenewalSubstitution {
        let m = h.value(face);
        let (i, j) = (face.i, face.j);
        let var = |l: EdgeLabel| LaurentPoly::var(VarId::Edge(l));
        let a = var(EdgeLabel::new(i + 1 + m, j, EdgeKind::A).unwrap());
        let b = var(EdgeLabel::new(i, j + 1 + m, EdgeKind::B).unwrap());
        let c = var(EdgeLabel::new(i - 1 - m, j, EdgeKind::C).unwrap());
        let d = var(EdgeLabel::new(i, j - 1 - m, EdgeKind::D).unwrap());
        let x = |p: FacePoint| LaurentPoly::var(VarId::Face(p));
        let north = x(FacePoint::new(i, j + 1));
        let south = x(FacePoint::new(i, j - 1));
        let east = x(FacePoint::new(i + 1, j));
        let west = x(FacePoint::new(i - 1, j));
        let numerator = a.mul(&c).mul(&north).mul(&south).add(&b.mul(&d).mul(&east).mul(&west));
        let x_inv = LaurentPoly::monomial(Monomial::var(VarId::Face(face)).inverse(), BigInt::one());
        RenewalSubstitution { face, replacement: numerator.mul(&x_inv) }
    }

    /// Substitutes the replacement into a polynomial that may carry the face
    /// variable at exponent −1, by multiplying through and dividing exactly.
    pub fn apply(&self, p: &LaurentPoly) -> Result<LaurentPoly> {
        let var = VarId::Face(self.face);
        // Group by the exponent of the renewed face variable.
        let mut by_exp: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (mono, coeff) in p.terms() {
            let k = mono.exponent_of(var);
            let stripped = mono.mul(&Monomial::var(var).pow(-k));
            let entry = by_exp.entry(k).or_insert_with(LaurentPoly::zero);
            *entry = entry.add(&LaurentPoly::monomial(stripped, coeff.clone()));
        }
        if by_exp.keys().any(|&k| k < -1) {
            return Err(Error::Internal(
                "face exponent below -1 in renewal substitution".into(),
            ));
        }
        // Σ R^{k+1}·c_k = result·R, with every power on the left nonnegative.
        let mut acc = LaurentPoly::zero();
        for (k, part) in by_exp {
            acc = acc.add(&self.replacement.pow((k + 1) as u64).mul(&part));
        }
        acc.exact_div(&self.replacement)
    }
}

/// Renews a closed local-minimum quadrilateral: elevates the face, rebuilds
/// the graph, and returns the substitution that transports matching
/// polynomials back.
pub fn urban_renewal(
    g: &GraphWithOpenFaces,
    face: FacePoint,
) -> Result<(GraphWithOpenFaces, RenewalSubstitution)> {
    if !g.pristine {
        return Err(Error::FaceNotRenewable {
            face,
            reason: "graph has been rewritten".into(),
        });
    }
    if !g.closed_faces.contains_key(&face) {
        return Err(Error::FaceNotRenewable { face, reason: "face is not closed".into() });
    }
    let elevated = elevate_face(&g.height, face).map_err(|_| Error::FaceNotRenewable {
        face,
        reason: "face is not a strict local minimum".into(),
    })?;
    if elevated.value(g.apex.face()) == g.apex.n {
        // The last induction step: the elevated surface touches the apex and
        // the renewed subgraph degenerates to the bare surface value.
        return Err(Error::FaceNotRenewable {
            face,
            reason: "elevation reaches the apex; the renewed subgraph is empty".into(),
        });
    }
    let substitution = RenewalSubstitution::for_face(&g.height, face);
    let renewed = build_subgraph(&elevated, g.apex)?;
    Ok((renewed, substitution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{validate_height, LatticePoint, Rect};
    use crate::matching::{enumerate_matchings, matching_polynomial, EnumerationLimits};

    fn lp(n: i64, i: i64, j: i64) -> LatticePoint {
        LatticePoint::new(n, i, j).unwrap()
    }

    fn fp(i: i64, j: i64) -> FacePoint {
        FacePoint::new(i, j)
    }

    fn none() -> EnumerationLimits {
        EnumerationLimits::none()
    }

    #[test]
    fn split_preserves_matching_polynomial() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(2, 0, 0)).unwrap();
        let before = matching_polynomial(&g, none()).unwrap();
        let mut split_count = 0;
        for v in 0..g.vertex_count() {
            for axis in SplitAxis::all() {
                let Ok(split) = split_vertex(&g, v, axis) else { continue };
                split_count += 1;
                assert_eq!(matching_polynomial(&split, none()).unwrap(), before);
            }
        }
        assert!(split_count > 0);
    }

    #[test]
    fn split_then_unsplit_is_identity() {
        let g = build_subgraph(&HeightFunction::fortress(), lp(2, 0, 0)).unwrap();
        let split = split_vertex(&g, 0, SplitAxis::NeSw)
            .or_else(|_| split_vertex(&g, 0, SplitAxis::NwSe))
            .unwrap();
        let mid = split.vertex_count() - 2; // first synthetic vertex id
        let merged = unsplit_vertex(&split, mid).unwrap();
        assert_eq!(merged.vertex_count(), g.vertex_count());
        assert_eq!(merged.edges.len(), g.edges.len());
        assert_eq!(
            matching_polynomial(&merged, none()).unwrap(),
            matching_polynomial(&g, none()).unwrap()
        );
    }

    #[test]
    fn split_rejects_bad_sites() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(1, 0, 1)).unwrap();
        // Degree-2 corner vertices: axes parallel to an incident edge fail.
        let mut some_failure = false;
        for v in 0..g.vertex_count() {
            for axis in [SplitAxis::NorthSouth, SplitAxis::EastWest] {
                some_failure |= split_vertex(&g, v, axis).is_err();
            }
        }
        assert!(some_failure);
        assert!(split_vertex(&g, 99, SplitAxis::NeSw).is_err());
    }

    #[test]
    fn elevate_examples() {
        let h = HeightFunction::abs_sum();
        // Faces on the valley floor are strict local minima.
        let elevated = elevate_face(&h, fp(0, 0)).unwrap();
        assert_eq!(elevated.value(fp(0, 0)), 2);
        assert!(validate_height(&elevated, Rect::new(-5, 5, -5, 5)).is_valid());
        assert!(matches!(
            elevate_face(&h, fp(1, 0)),
            Err(Error::NotALocalMinimum(_))
        ));
    }

    #[test]
    fn repeated_elevation_reaches_the_apex() {
        // Raising minima below the cone eventually leaves a single-step
        // surface whose subgraph has one matching.
        let mut h = HeightFunction::aztec();
        let apex = lp(2, 0, 0);
        loop {
            if h.value(apex.face()) == apex.n {
                break;
            }
            let g = build_subgraph(&h, apex).unwrap();
            let candidates: Vec<FacePoint> = g.closed_faces.keys().copied().collect();
            let lowest = candidates
                .iter()
                .min_by_key(|f| (h.value(**f), f.i, f.j))
                .copied()
                .unwrap();
            h = elevate_face(&h, lowest).unwrap();
        }
        assert_eq!(h.value(fp(0, 0)), 2);
    }

    #[test]
    fn renewal_substitution_value_at_ones() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(2, 0, 0)).unwrap();
        let (_, sub) = urban_renewal(&g, fp(0, 1)).unwrap();
        let mut ones = BTreeMap::new();
        for (m, _) in sub.replacement.terms() {
            for &(v, _) in m.exponents() {
                ones.insert(v, LaurentPoly::one());
            }
        }
        assert_eq!(
            sub.replacement.substitute(&ones).unwrap(),
            LaurentPoly::constant(2)
        );
    }

    #[test]
    fn renewal_preserves_matching_polynomial() {
        for (h, apex) in [
            (HeightFunction::aztec(), lp(2, 0, 0)),
            (HeightFunction::abs_sum(), lp(3, 1, 0)),
            (HeightFunction::fortress(), lp(2, 0, 0)),
        ] {
            let g = build_subgraph(&h, apex).unwrap();
            // Renew the lowest closed face; it is a strict local minimum.
            let face = *g
                .closed_faces
                .keys()
                .min_by_key(|f| (h.value(**f), f.i, f.j))
                .unwrap();
            let before = matching_polynomial(&g, none()).unwrap();
            let (renewed, sub) = urban_renewal(&g, face).unwrap();
            let after = matching_polynomial(&renewed, none()).unwrap();
            assert_eq!(sub.apply(&after).unwrap(), before, "face {face}");
        }
    }

    #[test]
    fn renewal_one_edge_terms_are_in_bijection() {
        // Terms using exactly one of the four boundary edges agree between
        // the old and new polynomials, with the face variable absent.
        let h = HeightFunction::abs_sum();
        let g = build_subgraph(&h, lp(3, 1, 0)).unwrap();
        let face = fp(0, 0);
        let (renewed, sub) = urban_renewal(&g, face).unwrap();
        let boundary: Vec<VarId> = sub
            .replacement
            .terms()
            .flat_map(|(m, _)| m.exponents().iter().map(|&(v, _)| v))
            .filter(|v| matches!(v, VarId::Edge(_)))
            .collect();
        let one_edge_part = |p: &LaurentPoly| -> LaurentPoly {
            let mut out = LaurentPoly::zero();
            for (m, c) in p.terms() {
                let used = boundary
                    .iter()
                    .filter(|v| m.exponent_of(**v) == 1)
                    .count();
                if used == 1 {
                    out = out.add(&LaurentPoly::monomial(m.clone(), c.clone()));
                }
            }
            out
        };
        let m1_old = one_edge_part(&matching_polynomial(&g, none()).unwrap());
        let m1_new = one_edge_part(&matching_polynomial(&renewed, none()).unwrap());
        assert_eq!(m1_old, m1_new);
        assert!(!m1_old.is_zero());
    }

    #[test]
    fn renewal_at_the_apex_face_gives_the_one_step_value() {
        // One elevation away from the apex, the renewed value is the face
        // variable itself, so the substitution alone is the polynomial.
        let h = HeightFunction::aztec();
        let g = build_subgraph(&h, lp(1, 0, 1)).unwrap();
        assert!(matches!(
            urban_renewal(&g, fp(0, 1)),
            Err(Error::FaceNotRenewable { .. })
        ));
        let sub = RenewalSubstitution::for_face(&h, fp(0, 1));
        let surface_value = LaurentPoly::var(VarId::Face(fp(0, 1)));
        assert_eq!(
            sub.apply(&surface_value).unwrap(),
            matching_polynomial(&g, none()).unwrap()
        );
    }

    #[test]
    fn renewal_rejects_bad_faces() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(2, 0, 0)).unwrap();
        // (0,0) is closed but not a local minimum of the aztec surface.
        assert!(matches!(
            urban_renewal(&g, fp(0, 0)),
            Err(Error::FaceNotRenewable { .. })
        ));
        assert!(matches!(
            urban_renewal(&g, fp(9, 9)),
            Err(Error::FaceNotRenewable { .. })
        ));
    }

    #[test]
    fn split_sites_on_enumerated_graphs() {
        // Splitting commutes with enumeration count on a wrench-heavy graph.
        let g = build_subgraph(&HeightFunction::fortress(), lp(2, 0, 0)).unwrap();
        let n = enumerate_matchings(&g, none()).unwrap().len();
        let split = split_vertex(&g, 1, SplitAxis::NeSw)
            .or_else(|_| split_vertex(&g, 1, SplitAxis::NwSe))
            .unwrap();
        assert_eq!(enumerate_matchings(&split, none()).unwrap().len(), n);
    }
}
