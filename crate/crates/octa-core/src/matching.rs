//! Matching enumeration and matching polynomials for graphs with open faces.
//!
//! A matching covers every vertex exactly once. Its monomial multiplies the
//! label variable of every weighted edge used and, for each face, the face
//! variable raised to ε = ⌈(unused − used)/2⌉, minus one more for closed
//! faces. Open faces count only the edges actually present on their path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeight, GraphWithOpenFaces};
use crate::lattice::{EdgeLabel, FacePoint};
use crate::laurent::{LaurentPoly, Monomial, VarId};

/// A matching, as a sorted list of edge ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    /// The weighted-edge labels used, which determine the matching.
    pub fn weighted_labels(&self, g: &GraphWithOpenFaces) -> Vec<EdgeLabel> {
        let mut out: Vec<EdgeLabel> = self
            .edges
            .iter()
            .filter_map(|&eid| match g.edges[eid].weight {
                EdgeWeight::Weighted(l) => Some(l),
                EdgeWeight::Unweighted => None,
            })
            .collect();
        out.sort();
        out
    }
}

/// Caps on enumeration work.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerationLimits {
    pub max_vertices: Option<usize>,
    pub max_matchings: Option<u64>,
}

impl EnumerationLimits {
    pub fn none() -> Self {
        EnumerationLimits::default()
    }
}

/// Backtracking enumeration over an explicit adjacency structure: always
/// branch on the lowest uncovered vertex, try edges in id order. Vertex set
/// is `0..n`; `edges[k]` lists endpoint pairs.
pub(crate) fn enumerate_on_edges(
    n: usize,
    edges: &[(usize, usize)],
    limits: EnumerationLimits,
) -> Result<Vec<Vec<usize>>> {
    if let Some(cap) = limits.max_vertices {
        if n > cap {
            return Err(Error::SizeLimitExceeded(format!(
                "{n} vertices exceeds the cap of {cap}"
            )));
        }
    }
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (eid, &(a, b)) in edges.iter().enumerate() {
        if a == b {
            return Err(Error::Internal("self-loop in matching enumeration".into()));
        }
        adjacency[a].push((eid, b));
        adjacency[b].push((eid, a));
    }

    let mut covered = vec![false; n];
    let mut chosen: Vec<usize> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();

    fn recurse(
        adjacency: &[Vec<(usize, usize)>],
        covered: &mut [bool],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: Option<u64>,
    ) -> Result<()> {
        let Some(v) = covered.iter().position(|&c| !c) else {
            if let Some(cap) = cap {
                if out.len() as u64 >= cap {
                    return Err(Error::SizeLimitExceeded(format!(
                        "more than {cap} matchings"
                    )));
                }
            }
            let mut m = chosen.clone();
            m.sort_unstable();
            out.push(m);
            return Ok(());
        };
        covered[v] = true;
        for &(eid, w) in &adjacency[v] {
            if covered[w] {
                continue;
            }
            covered[w] = true;
            chosen.push(eid);
            recurse(adjacency, covered, chosen, out, cap)?;
            chosen.pop();
            covered[w] = false;
        }
        covered[v] = false;
        Ok(())
    }

    recurse(&adjacency, &mut covered, &mut chosen, &mut out, limits.max_matchings)?;
    out.sort();
    Ok(out)
}

/// All matchings of the graph, each exactly once, in a deterministic order.
pub fn enumerate_matchings(
    g: &GraphWithOpenFaces,
    limits: EnumerationLimits,
) -> Result<Vec<Matching>> {
    let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.v1, e.v2)).collect();
    Ok(enumerate_on_edges(g.vertex_count(), &pairs, limits)?
        .into_iter()
        .map(|edges| Matching { edges })
        .collect())
}

pub fn count_matchings(g: &GraphWithOpenFaces, limits: EnumerationLimits) -> Result<u64> {
    Ok(enumerate_matchings(g, limits)?.len() as u64)
}

/// Face and edge exponents of one matching: the invertible fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExponentVector {
    /// ε for every face of the graph (zeros included).
    pub face_exp: BTreeMap<FacePoint, i64>,
    /// δ for every weighted edge label of the graph.
    pub edge_exp: BTreeMap<EdgeLabel, u8>,
}

fn ceil_half(x: i64) -> i64 {
    x.div_euclid(2) + if x.rem_euclid(2) == 1 { 1 } else { 0 }
}

/// ε per face and δ per weighted edge.
pub fn matching_exponents(g: &GraphWithOpenFaces, m: &Matching) -> Result<ExponentVector> {
    let mut face_exp = BTreeMap::new();
    for (face, boundary, closed) in g.faces() {
        let used = boundary.iter().filter(|&&e| m.contains(e)).count() as i64;
        let unused = boundary.len() as i64 - used;
        if closed && boundary.len() % 2 != 0 {
            return Err(Error::Internal(format!(
                "closed face {face} has an odd side count"
            )));
        }
        let eps = ceil_half(unused - used) - if closed { 1 } else { 0 };
        if eps < -1 {
            return Err(Error::Internal(format!(
                "face {face} has exponent {eps} below -1"
            )));
        }
        face_exp.insert(*face, eps);
    }
    let mut edge_exp = BTreeMap::new();
    for (eid, e) in g.edges.iter().enumerate() {
        if let EdgeWeight::Weighted(label) = &e.weight {
            edge_exp.insert(*label, u8::from(m.contains(eid)));
        }
    }
    Ok(ExponentVector { face_exp, edge_exp })
}

/// The matching monomial with the labeling applied: label variables for
/// weighted edges used, 1 for unweighted edges, face variables by position.
pub fn matching_monomial(g: &GraphWithOpenFaces, m: &Matching) -> Result<Monomial> {
    let exps = matching_exponents(g, m)?;
    let mut pairs: Vec<(VarId, i64)> = Vec::new();
    for (face, eps) in exps.face_exp {
        if eps != 0 {
            pairs.push((VarId::Face(face), eps));
        }
    }
    for (label, delta) in exps.edge_exp {
        if delta == 1 {
            pairs.push((VarId::Edge(label), 1));
        }
    }
    Ok(Monomial::from_pairs(pairs))
}

/// Σ over matchings of the matching monomial.
pub fn matching_polynomial(
    g: &GraphWithOpenFaces,
    limits: EnumerationLimits,
) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero();
    for m in enumerate_matchings(g, limits)? {
        let mono = matching_monomial(g, &m)?;
        out = out.add(&LaurentPoly::monomial(mono, BigInt::one()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_subgraph;
    use crate::lattice::{HeightFunction, LatticePoint};
    use crate::recurrence::EvalContext;
    use std::collections::BTreeSet;

    fn lp(n: i64, i: i64, j: i64) -> LatticePoint {
        LatticePoint::new(n, i, j).unwrap()
    }

    fn fp(i: i64, j: i64) -> FacePoint {
        FacePoint::new(i, j)
    }

    #[test]
    fn ceil_half_works() {
        assert_eq!(ceil_half(0), 0);
        assert_eq!(ceil_half(1), 1);
        assert_eq!(ceil_half(-1), 0);
        assert_eq!(ceil_half(4), 2);
        assert_eq!(ceil_half(-3), -1);
    }

    #[test]
    fn order_one_aztec_has_two_matchings() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(1, 0, 1)).unwrap();
        let ms = enumerate_matchings(&g, EnumerationLimits::none()).unwrap();
        assert_eq!(ms.len(), 2);
        // Each matching uses two opposite edges; the center face exponent is
        // -1, the two open faces opposite the used edges get +1.
        for m in &ms {
            let exps = matching_exponents(&g, m).unwrap();
            assert_eq!(exps.face_exp[&fp(0, 1)], -1);
            let plus: Vec<FacePoint> = exps
                .face_exp
                .iter()
                .filter(|&(_, &e)| e == 1)
                .map(|(f, _)| *f)
                .collect();
            assert_eq!(plus.len(), 2);
        }
    }

    #[test]
    fn running_example_has_four_matchings_matching_the_recurrence() {
        let h = HeightFunction::abs_sum();
        let g = build_subgraph(&h, lp(3, 1, 0)).unwrap();
        let ms = enumerate_matchings(&g, EnumerationLimits::none()).unwrap();
        assert_eq!(ms.len(), 4);
        let poly = matching_polynomial(&g, EnumerationLimits::none()).unwrap();
        let f = EvalContext::new(h).eval(lp(3, 1, 0)).unwrap();
        assert_eq!(poly, *f);
    }

    #[test]
    fn one_step_matching_polynomial_is_the_recurrence_step() {
        // Order-1 graph at any odd face: two matchings reproduce the
        // single-step value.
        let h = HeightFunction::aztec();
        let g = build_subgraph(&h, lp(1, 2, 1)).unwrap();
        let poly = matching_polynomial(&g, EnumerationLimits::none()).unwrap();
        let f = EvalContext::new(h).eval(lp(1, 2, 1)).unwrap();
        assert_eq!(poly, *f);
    }

    #[test]
    fn counting_tables() {
        let aztec = HeightFunction::aztec();
        // Orders 1..4: 2, 8, 64, 1024 matchings.
        for (apex, want) in [
            (lp(1, 0, 1), 2u64),
            (lp(2, 0, 0), 8),
            (lp(3, 0, 1), 64),
            (lp(4, 0, 0), 1024),
        ] {
            let g = build_subgraph(&aztec, apex).unwrap();
            assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), want);
        }
        let fortress = HeightFunction::fortress();
        let g = build_subgraph(&fortress, lp(2, 0, 0)).unwrap();
        assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), 5);
        let g = build_subgraph(&fortress, lp(3, 1, 0)).unwrap();
        assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), 25);
        let g = build_subgraph(&fortress, lp(3, 0, 1)).unwrap();
        assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), 50);
        let douglass = HeightFunction::douglass();
        let g = build_subgraph(&douglass, lp(2, 0, 0)).unwrap();
        assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), 4);
        let blum = HeightFunction::blum();
        let g = build_subgraph(&blum, lp(3, 1, 0)).unwrap();
        assert_eq!(count_matchings(&g, EnumerationLimits::none()).unwrap(), 27);
    }

    #[test]
    fn distinct_matchings_have_distinct_monomials() {
        for (h, apex) in [
            (HeightFunction::aztec(), lp(3, 0, 1)),
            (HeightFunction::fortress(), lp(2, 0, 0)),
            (HeightFunction::abs_sum(), lp(3, 1, 0)),
        ] {
            let g = build_subgraph(&h, apex).unwrap();
            let ms = enumerate_matchings(&g, EnumerationLimits::none()).unwrap();
            let monos: BTreeSet<String> = ms
                .iter()
                .map(|m| format!("{:?}", matching_monomial(&g, m).unwrap()))
                .collect();
            assert_eq!(monos.len(), ms.len());
            // Weighted labels alone determine the matching.
            let weighted: BTreeSet<Vec<EdgeLabel>> =
                ms.iter().map(|m| m.weighted_labels(&g)).collect();
            assert_eq!(weighted.len(), ms.len());
            // All coefficients 1 and exponent ranges hold.
            let poly = matching_polynomial(&g, EnumerationLimits::none()).unwrap();
            assert!(poly.profile().satisfies_unit_form());
            assert_eq!(poly.term_count(), ms.len());
            assert_eq!(poly.all_ones_value(), BigInt::from(ms.len()));
        }
    }

    #[test]
    fn enumeration_limits_enforced() {
        let g = build_subgraph(&HeightFunction::aztec(), lp(3, 0, 1)).unwrap();
        let err = enumerate_matchings(
            &g,
            EnumerationLimits { max_vertices: Some(4), max_matchings: None },
        );
        assert!(matches!(err, Err(Error::SizeLimitExceeded(_))));
        let err = enumerate_matchings(
            &g,
            EnumerationLimits { max_vertices: None, max_matchings: Some(10) },
        );
        assert!(matches!(err, Err(Error::SizeLimitExceeded(_))));
    }
}
