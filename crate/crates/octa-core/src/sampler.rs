//! Exact random generation of matchings, uniform over the matchings of the
//! subgraph at an apex.
//!
//! The sampler repeatedly elevates a minimal face below the cone, keeping an
//! integer weight table x with x′ = (x_E·x_W + x_N·x_S)/x at each step, then
//! unwinds: at each elevation the four local edge labels are examined and,
//! when none is present, one opposite pair is added with the exact rational
//! probability the weight table dictates. All randomness is consumed as
//! 64-bit chunks compared exactly against rational thresholds; nothing is
//! ever rounded.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::build_subgraph;
use crate::lattice::{
    closed_faces, p_value, EdgeKind, EdgeLabel, FacePoint, HeightFunction, LatticePoint,
};
use crate::matching::{enumerate_matchings, EnumerationLimits};

/// One run's outcome: the weighted edge labels of the sampled matching and
/// the number of elevation steps performed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleOutcome {
    pub edges: BTreeSet<EdgeLabel>,
    pub elevation_steps: u64,
}

struct Elevation {
    face: FacePoint,
    old_height: i64,
    x_old: BigInt,
    x_new: BigInt,
    ns_product: BigInt,
}

/// Exact Bernoulli draw with probability num/den.
fn bernoulli(mut num: BigInt, den: &BigInt, rng: &mut ChaCha8Rng) -> Result<bool> {
    debug_assert!(!den.is_zero() && num >= BigInt::zero() && &num <= den);
    loop {
        if num.is_zero() {
            return Ok(false);
        }
        if &num == den {
            return Ok(true);
        }
        num <<= 64;
        let (digit, rem) = num.div_rem(den);
        let threshold = digit
            .to_u64()
            .ok_or_else(|| Error::Internal("bernoulli digit out of range".into()))?;
        let drawn = rng.next_u64();
        if drawn < threshold {
            return Ok(true);
        }
        if drawn > threshold {
            return Ok(false);
        }
        num = rem;
    }
}

/// Draws one matching of the subgraph at `apex`, uniformly at random, as its
/// weighted edge-label set; the unweighted edges are forced.
pub fn sample_matching(
    h: &HeightFunction,
    apex: LatticePoint,
    seed: u64,
) -> Result<SampleOutcome> {
    if apex.n < h.value(apex.face()) {
        return Err(Error::PointBelowSurface(apex));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut height = h.clone();
    let mut x: BTreeMap<FacePoint, BigInt> = BTreeMap::new();
    let x_get = |x: &BTreeMap<FacePoint, BigInt>, f: FacePoint| -> BigInt {
        x.get(&f).cloned().unwrap_or_else(BigInt::one)
    };

    // Reverse lookup: current height value → faces still below the cone.
    let mut below: BTreeMap<i64, BTreeSet<FacePoint>> = BTreeMap::new();
    for f in closed_faces(h, apex)? {
        below.entry(h.value(f)).or_default().insert(f);
    }

    let mut trail: Vec<Elevation> = Vec::new();
    while let Some((&level, faces)) = below.iter().next() {
        let face = *faces.iter().next().unwrap();
        {
            let faces = below.get_mut(&level).unwrap();
            faces.remove(&face);
            if faces.is_empty() {
                below.remove(&level);
            }
        }
        // A minimal face below the cone is a strict local minimum.
        if face
            .lattice_neighbors()
            .iter()
            .any(|nb| height.value(*nb) != level + 1)
        {
            return Err(Error::NoLocalMinimum);
        }
        let x_old = x_get(&x, face);
        let ew = x_get(&x, FacePoint::new(face.i + 1, face.j))
            * x_get(&x, FacePoint::new(face.i - 1, face.j));
        let ns = x_get(&x, FacePoint::new(face.i, face.j + 1))
            * x_get(&x, FacePoint::new(face.i, face.j - 1));
        let (x_new, rem) = (&ew + &ns).div_rem(&x_old);
        if !rem.is_zero() {
            return Err(Error::NonIntegerX(face));
        }
        x.insert(face, x_new.clone());
        height = height.with_face_set(face, level + 2);
        if level + 2 < p_value(apex, face) {
            below.entry(level + 2).or_default().insert(face);
        }
        trail.push(Elevation { face, old_height: level, x_old, x_new, ns_product: ns });
    }
    debug_assert_eq!(height.value(apex.face()), apex.n);

    // Unwind, resolving the four local edges of each elevation.
    let mut matching: BTreeSet<EdgeLabel> = BTreeSet::new();
    let steps = trail.len() as u64;
    for elev in trail.into_iter().rev() {
        let Elevation { face, old_height: m, x_old, x_new, ns_product } = elev;
        let (i, j) = (face.i, face.j);
        let a = EdgeLabel::new(i + 1 + m, j, EdgeKind::A).unwrap();
        let b = EdgeLabel::new(i, j + 1 + m, EdgeKind::B).unwrap();
        let c = EdgeLabel::new(i - 1 - m, j, EdgeKind::C).unwrap();
        let d = EdgeLabel::new(i, j - 1 - m, EdgeKind::D).unwrap();
        let present: Vec<EdgeLabel> = [a, b, c, d]
            .into_iter()
            .filter(|l| matching.contains(l))
            .collect();
        match present.len() {
            1 => {}
            2 => {
                for l in present {
                    matching.remove(&l);
                }
            }
            0 => {
                let den = &x_old * &x_new;
                if bernoulli(ns_product, &den, &mut rng)? {
                    matching.insert(a);
                    matching.insert(c);
                } else {
                    matching.insert(b);
                    matching.insert(d);
                }
            }
            k => {
                return Err(Error::Internal(format!(
                    "{k} of the four local edges present at {face}; impossible"
                )));
            }
        }
        // Restore the table for the enclosing level.
        if x_old.is_one() {
            x.remove(&face);
        } else {
            x.insert(face, x_old);
        }
    }
    Ok(SampleOutcome { edges: matching, elevation_steps: steps })
}

/// Exact probability of one matching under the sampler's target
/// distribution; with the unit weight table every matching has probability
/// 1 / #matchings.
pub fn matching_probability(
    h: &HeightFunction,
    apex: LatticePoint,
    edges: &BTreeSet<EdgeLabel>,
) -> Result<BigRational> {
    if apex.n == h.value(apex.face()) {
        // Base case: the empty matching is the only one.
        return if edges.is_empty() {
            Ok(BigRational::one())
        } else {
            Err(Error::NotAMatching("the base case has only the empty matching".into()))
        };
    }
    let g = build_subgraph(h, apex)?;
    let all = enumerate_matchings(&g, EnumerationLimits::none())?;
    let found = all.iter().any(|m| {
        let labels: BTreeSet<EdgeLabel> = m.weighted_labels(&g).into_iter().collect();
        labels == *edges
    });
    if !found {
        return Err(Error::NotAMatching(
            "edge set is not a matching of the subgraph".into(),
        ));
    }
    Ok(BigRational::new(BigInt::one(), BigInt::from(all.len())))
}

/// Completes a weighted edge-label set into the full matching of the graph:
/// the unweighted edges are forced onto the vertices left uncovered.
pub fn complete_matching(
    g: &crate::graph::GraphWithOpenFaces,
    labels: &BTreeSet<EdgeLabel>,
) -> Result<crate::matching::Matching> {
    use crate::graph::EdgeWeight;
    let mut covered = vec![false; g.vertex_count()];
    let mut edges = Vec::new();
    for (eid, e) in g.edges.iter().enumerate() {
        if let EdgeWeight::Weighted(l) = &e.weight {
            if labels.contains(l) {
                edges.push(eid);
                covered[e.v1] = true;
                covered[e.v2] = true;
            }
        }
    }
    if edges.len() != labels.len() {
        return Err(Error::NotAMatching("label not present in the graph".into()));
    }
    for (eid, e) in g.edges.iter().enumerate() {
        if e.weight == EdgeWeight::Unweighted && !covered[e.v1] && !covered[e.v2] {
            edges.push(eid);
            covered[e.v1] = true;
            covered[e.v2] = true;
        }
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::NotAMatching(
            "labels do not extend to a perfect matching".into(),
        ));
    }
    edges.sort_unstable();
    Ok(crate::matching::Matching { edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::count_matchings;

    fn lp(n: i64, i: i64, j: i64) -> LatticePoint {
        LatticePoint::new(n, i, j).unwrap()
    }

    #[test]
    fn base_case_returns_empty() {
        let h = HeightFunction::aztec();
        let out = sample_matching(&h, lp(0, 0, 0), 7).unwrap();
        assert!(out.edges.is_empty());
        assert_eq!(out.elevation_steps, 0);
        assert_eq!(
            matching_probability(&h, lp(0, 0, 0), &BTreeSet::new()).unwrap(),
            BigRational::one()
        );
    }

    #[test]
    fn order_one_aztec_both_pairs_occur() {
        let h = HeightFunction::aztec();
        let apex = lp(1, 0, 1);
        let mut seen = BTreeSet::new();
        for seed in 0..32 {
            let out = sample_matching(&h, apex, seed).unwrap();
            assert_eq!(out.elevation_steps, 1);
            assert_eq!(out.edges.len(), 2);
            matching_probability(&h, apex, &out.edges).unwrap();
            seen.insert(out.edges);
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let h = HeightFunction::fortress();
        let apex = lp(2, 0, 0);
        for seed in [0u64, 1, 99, u64::MAX] {
            let a = sample_matching(&h, apex, seed).unwrap();
            let b = sample_matching(&h, apex, seed).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn samples_are_matchings_and_steps_count_the_cone() {
        for (h, apex) in [
            (HeightFunction::aztec(), lp(2, 0, 0)),
            (HeightFunction::fortress(), lp(2, 0, 0)),
            (HeightFunction::abs_sum(), lp(3, 1, 0)),
            (HeightFunction::gale_robinson(4, 1, 2).unwrap(), lp(1, 1, 0)),
        ] {
            let cone = crate::lattice::cone_upper_points(&h, apex).unwrap().len() as u64;
            let g = build_subgraph(&h, apex).unwrap();
            for seed in 0..24 {
                let out = sample_matching(&h, apex, seed).unwrap();
                assert_eq!(out.elevation_steps, cone);
                matching_probability(&h, apex, &out.edges).unwrap();
                complete_matching(&g, &out.edges).unwrap();
            }
        }
    }

    #[test]
    fn rough_uniformity_on_the_running_example() {
        let h = HeightFunction::abs_sum();
        let apex = lp(3, 1, 0);
        let g = build_subgraph(&h, apex).unwrap();
        let n = count_matchings(&g, EnumerationLimits::none()).unwrap();
        assert_eq!(n, 4);
        let mut counts: BTreeMap<BTreeSet<EdgeLabel>, u64> = BTreeMap::new();
        let draws = 4000u64;
        for seed in 0..draws {
            let out = sample_matching(&h, apex, seed).unwrap();
            *counts.entry(out.edges).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 4);
        for (_, c) in counts {
            // Loose 6-sigma band around 1000.
            assert!((730..=1270).contains(&c), "count {c} outside band");
        }
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!bernoulli(BigInt::zero(), &BigInt::from(7), &mut rng).unwrap());
        assert!(bernoulli(BigInt::from(7), &BigInt::from(7), &mut rng).unwrap());
    }

    #[test]
    fn order_two_aztec_probability_is_one_eighth() {
        let h = HeightFunction::aztec();
        let apex = lp(2, 0, 0);
        let out = sample_matching(&h, apex, 5).unwrap();
        let p = matching_probability(&h, apex, &out.edges).unwrap();
        assert_eq!(p, BigRational::new(BigInt::one(), BigInt::from(8)));
    }

    #[test]
    fn probability_rejects_non_matchings() {
        let h = HeightFunction::aztec();
        let apex = lp(1, 0, 1);
        let mut edges = BTreeSet::new();
        edges.insert(EdgeLabel::new(0, 1, EdgeKind::A).unwrap());
        assert!(matches!(
            matching_probability(&h, apex, &edges),
            Err(Error::NotAMatching(_))
        ));
    }
}
