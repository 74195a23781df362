//! Memoized evaluation of the octahedron recurrence over a height function,
//! plus the three-term Gale-Robinson integer recurrence used as a counting
//! oracle.
//!
//! f(n,i,j) = x(i,j) on the surface, and above it
//!
//!   f(n,i,j) = ( a(i+n−1,j)·c(i−n+1,j)·f(n−1,i,j+1)·f(n−1,i,j−1)
//!              + b(i,j+n−1)·d(i,j−n+1)·f(n−1,i+1,j)·f(n−1,i−1,j) ) / f(n−2,i,j)
//!
//! with the division performed exactly and checked; a failed division on a
//! validated surface would falsify the evaluator.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{cone_upper_points, EdgeKind, FacePoint, HeightFunction, LatticePoint};
use crate::laurent::{LaurentPoly, VarId};

/// Constant specialization of the four edge-variable families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeConstants {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl EdgeConstants {
    pub fn all_ones() -> Self {
        EdgeConstants {
            a: BigInt::one(),
            b: BigInt::one(),
            c: BigInt::one(),
            d: BigInt::one(),
        }
    }

    /// Gale-Robinson coefficients r, s split as a=r, c=1, b=s, d=1.
    pub fn from_rs(r: BigInt, s: BigInt) -> Self {
        EdgeConstants { a: r, b: s, c: BigInt::one(), d: BigInt::one() }
    }

    fn get(&self, kind: EdgeKind) -> &BigInt {
        match kind {
            EdgeKind::A => &self.a,
            EdgeKind::B => &self.b,
            EdgeKind::C => &self.c,
            EdgeKind::D => &self.d,
        }
    }
}

/// Evaluation options: apply edge constants and/or collapse all face
/// variables to 1 during evaluation rather than post hoc.
#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    pub edge_constants: Option<EdgeConstants>,
    pub faces_to_one: bool,
}

impl EvalOptions {
    /// Pure counting: every variable becomes 1.
    pub fn numeric() -> Self {
        EvalOptions { edge_constants: Some(EdgeConstants::all_ones()), faces_to_one: true }
    }
}

/// Shared, memoizing evaluation context for one height function.
///
/// Values are immutable once computed; the memo supports concurrent
/// evaluation of disjoint apexes behind a read/write lock.
pub struct EvalContext {
    height: HeightFunction,
    options: EvalOptions,
    memo: RwLock<HashMap<LatticePoint, Arc<LaurentPoly>>>,
}

impl EvalContext {
    pub fn new(height: HeightFunction) -> Self {
        Self::with_options(height, EvalOptions::default())
    }

    pub fn with_options(height: HeightFunction, options: EvalOptions) -> Self {
        EvalContext { height, options, memo: RwLock::new(HashMap::new()) }
    }

    pub fn height(&self) -> &HeightFunction {
        &self.height
    }

    fn surface_poly(&self, face: FacePoint) -> LaurentPoly {
        if self.options.faces_to_one {
            LaurentPoly::one()
        } else {
            LaurentPoly::var(VarId::Face(face))
        }
    }

    fn edge_poly(&self, kind: EdgeKind, i: i64, j: i64) -> LaurentPoly {
        match &self.options.edge_constants {
            Some(consts) => LaurentPoly::constant(consts.get(kind).clone()),
            None => {
                let label = crate::lattice::EdgeLabel::new(i, j, kind)
                    .expect("recurrence edge coordinates always have odd parity");
                LaurentPoly::var(VarId::Edge(label))
            }
        }
    }

    /// f at a lattice point on or above the surface.
    pub fn eval(&self, point: LatticePoint) -> Result<Arc<LaurentPoly>> {
        let h0 = self.height.value(point.face());
        if point.n < h0 {
            return Err(Error::PointBelowSurface(point));
        }
        if point.n == h0 {
            return Ok(Arc::new(self.surface_poly(point.face())));
        }
        if let Some(hit) = self.memo.read().unwrap().get(&point) {
            return Ok(hit.clone());
        }
        // Bottom-up over the dependency cone in increasing n; every value a
        // step needs is then already present.
        let worklist = cone_upper_points(&self.height, point)?;
        let mut fresh: HashMap<LatticePoint, Arc<LaurentPoly>> = HashMap::new();
        {
            let shared = self.memo.read().unwrap();
            for q in &worklist {
                if shared.contains_key(q) || fresh.contains_key(q) {
                    continue;
                }
                let value = self.step(*q, &shared, &fresh)?;
                fresh.insert(*q, Arc::new(value));
            }
        }
        let mut shared = self.memo.write().unwrap();
        for (k, v) in fresh {
            shared.entry(k).or_insert(v);
        }
        Ok(shared.get(&point).expect("apex is in its own cone").clone())
    }

    fn lookup(
        &self,
        point: LatticePoint,
        shared: &HashMap<LatticePoint, Arc<LaurentPoly>>,
        fresh: &HashMap<LatticePoint, Arc<LaurentPoly>>,
    ) -> Result<LaurentPoly> {
        let h0 = self.height.value(point.face());
        if point.n == h0 {
            return Ok(self.surface_poly(point.face()));
        }
        debug_assert!(point.n > h0);
        if let Some(v) = fresh.get(&point) {
            return Ok((**v).clone());
        }
        if let Some(v) = shared.get(&point) {
            return Ok((**v).clone());
        }
        Err(Error::Internal(format!(
            "evaluation order violated: missing dependency {point:?}"
        )))
    }

    fn step(
        &self,
        q: LatticePoint,
        shared: &HashMap<LatticePoint, Arc<LaurentPoly>>,
        fresh: &HashMap<LatticePoint, Arc<LaurentPoly>>,
    ) -> Result<LaurentPoly> {
        let LatticePoint { n, i, j } = q;
        let f_n1_jp = self.lookup(LatticePoint { n: n - 1, i, j: j + 1 }, shared, fresh)?;
        let f_n1_jm = self.lookup(LatticePoint { n: n - 1, i, j: j - 1 }, shared, fresh)?;
        let f_n1_ip = self.lookup(LatticePoint { n: n - 1, i: i + 1, j }, shared, fresh)?;
        let f_n1_im = self.lookup(LatticePoint { n: n - 1, i: i - 1, j }, shared, fresh)?;
        let f_n2 = self.lookup(LatticePoint { n: n - 2, i, j }, shared, fresh)?;

        let ac = self
            .edge_poly(EdgeKind::A, i + n - 1, j)
            .mul(&self.edge_poly(EdgeKind::C, i - n + 1, j));
        let bd = self
            .edge_poly(EdgeKind::B, i, j + n - 1)
            .mul(&self.edge_poly(EdgeKind::D, i, j - n + 1));
        let numerator = ac
            .mul(&f_n1_jp.mul(&f_n1_jm))
            .add(&bd.mul(&f_n1_ip.mul(&f_n1_im)));
        numerator.exact_div(&f_n2)
    }
}

/// Symbolic term count cross-checked against the all-ones numeric value.
///
/// The two agree exactly when every coefficient of f is 1; a mismatch is an
/// invariant violation, not an input error.
pub struct TermCounter {
    symbolic: EvalContext,
    numeric: EvalContext,
}

impl TermCounter {
    pub fn new(height: HeightFunction) -> Self {
        TermCounter {
            symbolic: EvalContext::new(height.clone()),
            numeric: EvalContext::with_options(height, EvalOptions::numeric()),
        }
    }

    pub fn count(&self, point: LatticePoint) -> Result<BigInt> {
        let symbolic = self.symbolic.eval(point)?;
        let numeric = self.numeric.eval(point)?;
        let count = BigInt::from(symbolic.term_count());
        let value = numeric.all_ones_value();
        if count != value {
            return Err(Error::Internal(format!(
                "term count {count} disagrees with all-ones value {value} at {point:?}"
            )));
        }
        Ok(count)
    }

    /// Numeric value only; no symbolic polynomial is built.
    pub fn count_numeric(&self, point: LatticePoint) -> Result<BigInt> {
        Ok(self.numeric.eval(point)?.all_ones_value())
    }
}

/// g(n)·g(n−k) = r·g(n−a)·g(n−k+a) + s·g(n−b)·g(n−k+b), seeded with ones.
///
/// Divisions are checked; a non-integer step flags bad parameters.
pub fn gale_robinson_sequence(
    k: i64,
    a: i64,
    b: i64,
    r: &BigInt,
    s: &BigInt,
    count: usize,
) -> Result<Vec<BigInt>> {
    if !(0 < a && a < k && 0 < b && b < k) {
        return Err(Error::GaleRobinsonParams { k, a, b });
    }
    let (k, a, b) = (k as usize, a as usize, b as usize);
    let mut g: Vec<BigInt> = Vec::with_capacity(count);
    for n in 0..count {
        if n < k {
            g.push(BigInt::one());
            continue;
        }
        let numerator = r * &g[n - a] * &g[n - k + a] + s * &g[n - b] * &g[n - k + b];
        let (q, rem) = num_integer::div_rem(numerator, g[n - k].clone());
        if !rem.is_zero() {
            return Err(Error::NonIntegerStep { index: n });
        }
        g.push(q);
    }
    Ok(g)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::EdgeLabel;
    use crate::laurent::Monomial;
    use std::collections::BTreeMap;

    fn lp(n: i64, i: i64, j: i64) -> LatticePoint {
        LatticePoint::new(n, i, j).unwrap()
    }

    fn x(i: i64, j: i64) -> LaurentPoly {
        LaurentPoly::var(VarId::face(i, j))
    }

    fn ev(kind: EdgeKind, i: i64, j: i64) -> LaurentPoly {
        LaurentPoly::var(VarId::Edge(EdgeLabel::new(i, j, kind).unwrap()))
    }

    #[test]
    fn surface_point_is_its_face_variable() {
        let ctx = EvalContext::new(HeightFunction::aztec());
        assert_eq!(*ctx.eval(lp(0, 0, 0)).unwrap(), x(0, 0));
        assert_eq!(*ctx.eval(lp(-1, 0, 1)).unwrap(), x(0, 1));
        assert!(matches!(
            ctx.eval(lp(-2, 0, 0)),
            Err(Error::PointBelowSurface(_))
        ));
    }

    #[test]
    fn one_step_aztec() {
        let ctx = EvalContext::new(HeightFunction::aztec());
        let f = ctx.eval(lp(1, 0, 1)).unwrap();
        let num = ev(EdgeKind::A, 0, 1)
            .mul(&ev(EdgeKind::C, 0, 1))
            .mul(&x(0, 2))
            .mul(&x(0, 0))
            .add(
                &ev(EdgeKind::B, 0, 1)
                    .mul(&ev(EdgeKind::D, 0, 1))
                    .mul(&x(1, 1))
                    .mul(&x(-1, 1)),
            );
        let expected = num.exact_div(&x(0, 1)).unwrap();
        assert_eq!(*f, expected);
        assert_eq!(f.term_count(), 2);
    }

    /// The four-term value over h = |i+j| at (3,1,0), frozen term by term.
    #[test]
    fn running_example_four_terms() {
        let ctx = EvalContext::new(HeightFunction::abs_sum());
        let f = ctx.eval(lp(3, 1, 0)).unwrap();
        assert_eq!(*f, running_example_polynomial());
    }

    pub(crate) fn running_example_polynomial() -> LaurentPoly {
        let e = |k: EdgeKind, i: i64, j: i64| (VarId::edge(i, j, k).unwrap(), 1i64);
        let xf = |i: i64, j: i64, p: i64| (VarId::face(i, j), p);
        let term = |pairs: Vec<(VarId, i64)>| {
            LaurentPoly::monomial(Monomial::from_pairs(pairs), 1.into())
        };
        let t1 = term(vec![
            e(EdgeKind::A, 3, 0),
            e(EdgeKind::C, -1, 0),
            e(EdgeKind::A, 2, -1),
            e(EdgeKind::C, 0, -1),
            xf(1, -2, 1),
            xf(1, -1, -1),
            xf(1, 1, 1),
        ]);
        let t2 = term(vec![
            e(EdgeKind::A, 3, 0),
            e(EdgeKind::C, -1, 0),
            e(EdgeKind::B, 1, 0),
            e(EdgeKind::D, 1, -2),
            xf(1, 0, -1),
            xf(0, -1, 1),
            xf(2, -1, 1),
            xf(1, -1, -1),
            xf(1, 1, 1),
        ]);
        let t3 = term(vec![
            e(EdgeKind::B, 1, 2),
            e(EdgeKind::D, 1, -2),
            e(EdgeKind::A, 1, 0),
            e(EdgeKind::C, -1, 0),
            xf(0, -1, 1),
            xf(0, 1, 1),
            xf(0, 0, -1),
            xf(2, 0, 1),
            xf(1, 0, -1),
        ]);
        let t4 = term(vec![
            e(EdgeKind::B, 1, 2),
            e(EdgeKind::D, 1, -2),
            e(EdgeKind::B, 0, 1),
            e(EdgeKind::D, 0, -1),
            xf(-1, 0, 1),
            xf(0, 0, -1),
            xf(2, 0, 1),
        ]);
        t1.add(&t2).add(&t3).add(&t4)
    }

    #[test]
    fn running_example_profile_and_substitution() {
        let ctx = EvalContext::new(HeightFunction::abs_sum());
        let f = ctx.eval(lp(3, 1, 0)).unwrap();
        let profile = f.profile();
        assert_eq!(profile.term_count, 4);
        assert!(profile.satisfies_unit_form());
        assert_eq!(profile.face_exponents, Some((-1, 1)));
        assert_eq!(profile.edge_exponents, Some((1, 1)));
        // All variables to one: 4.
        let mut assign = BTreeMap::new();
        for (m, _) in f.terms() {
            for &(v, _) in m.exponents() {
                assign.insert(v, LaurentPoly::one());
            }
        }
        assert_eq!(f.substitute(&assign).unwrap(), LaurentPoly::constant(4));
    }

    #[test]
    fn aztec_term_counts() {
        let counter = TermCounter::new(HeightFunction::aztec());
        assert_eq!(counter.count(lp(0, 0, 0)).unwrap(), BigInt::one());
        assert_eq!(counter.count(lp(1, 0, 1)).unwrap(), BigInt::from(2));
        assert_eq!(counter.count(lp(2, 0, 0)).unwrap(), BigInt::from(8));
        assert_eq!(counter.count(lp(3, 0, 1)).unwrap(), BigInt::from(64));
        // 2^{n(n+1)/2} for n = 4, 5, checked numerically.
        assert_eq!(counter.count_numeric(lp(4, 0, 0)).unwrap(), BigInt::from(1024));
        assert_eq!(counter.count_numeric(lp(5, 0, 1)).unwrap(), BigInt::from(32768));
    }

    #[test]
    fn concurrent_evaluations_share_the_memo() {
        let ctx = EvalContext::new(HeightFunction::fortress());
        let apexes = [lp(2, 0, 0), lp(2, 1, 1), lp(1, 1, 0), lp(3, 1, 0), lp(2, 2, 0)];
        let results: Vec<Arc<LaurentPoly>> = std::thread::scope(|scope| {
            let handles: Vec<_> = apexes
                .iter()
                .map(|&apex| {
                    let ctx = &ctx;
                    scope.spawn(move || ctx.eval(apex).unwrap())
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (apex, value) in apexes.iter().zip(results) {
            let fresh = EvalContext::new(HeightFunction::fortress());
            assert_eq!(*value, *fresh.eval(*apex).unwrap());
        }
    }

    #[test]
    fn memo_is_order_independent() {
        let h = HeightFunction::fortress();
        let a = EvalContext::new(h.clone());
        let top = a.eval(lp(2, 0, 0)).unwrap();
        let low = a.eval(lp(1, 1, 0)).unwrap();
        let b = EvalContext::new(h);
        let low2 = b.eval(lp(1, 1, 0)).unwrap();
        let top2 = b.eval(lp(2, 0, 0)).unwrap();
        assert_eq!(*top, *top2);
        assert_eq!(*low, *low2);
    }

    #[test]
    fn edge_constant_specialization_matches_post_hoc_substitution() {
        let h = HeightFunction::gale_robinson(4, 1, 2).unwrap();
        let point = lp(2, 0, 0);
        let specialized = EvalContext::with_options(
            h.clone(),
            EvalOptions {
                edge_constants: Some(EdgeConstants::from_rs(3.into(), 5.into())),
                faces_to_one: false,
            },
        );
        let direct = specialized.eval(point).unwrap();

        let symbolic = EvalContext::new(h).eval(point).unwrap();
        let mut assign = BTreeMap::new();
        for (m, _) in symbolic.terms() {
            for &(v, _) in m.exponents() {
                if let VarId::Edge(label) = v {
                    let value = match label.kind {
                        EdgeKind::A => 3,
                        EdgeKind::B => 5,
                        EdgeKind::C | EdgeKind::D => 1,
                    };
                    assign.insert(v, LaurentPoly::constant(value));
                }
            }
        }
        assert_eq!(*direct, symbolic.substitute(&assign).unwrap());
    }

    #[test]
    fn gale_robinson_sequences() {
        let one = BigInt::one();
        let somos4: Vec<i64> = vec![1, 1, 1, 1, 2, 3, 7, 23, 59, 314];
        assert_eq!(
            gale_robinson_sequence(4, 1, 2, &one, &one, 10).unwrap(),
            somos4.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        let somos5: Vec<i64> = vec![1, 1, 1, 1, 1, 2, 3, 5, 11, 37];
        assert_eq!(
            gale_robinson_sequence(5, 1, 2, &one, &one, 10).unwrap(),
            somos5.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        // (2,1,1) doubles: g(n)·g(n−2) = 2·g(n−1)².
        let doubling = gale_robinson_sequence(2, 1, 1, &one, &one, 5).unwrap();
        let expect: Vec<i64> = vec![1, 1, 2, 8, 64];
        assert_eq!(doubling, expect.into_iter().map(BigInt::from).collect::<Vec<_>>());
        assert!(gale_robinson_sequence(4, 4, 2, &one, &one, 5).is_err());
    }

    #[test]
    fn somos_counts_match_recurrence_values() {
        // Terms of f along the Somos-4 slab equal the integer sequence. The
        // slab's seed segment is the half-open window (−k, 0], so the line
        // index m = 2n − i reads the zero-based sequence at m + k − 1.
        let counter = TermCounter::new(HeightFunction::gale_robinson(4, 1, 2).unwrap());
        let g = gale_robinson_sequence(4, 1, 2, &BigInt::one(), &BigInt::one(), 8).unwrap();
        assert_eq!(counter.count(lp(1, 1, 0)).unwrap(), g[4]); // m = 1 → 2
        assert_eq!(counter.count(lp(1, 0, 1)).unwrap(), g[5]); // m = 2 → 3
        assert_eq!(counter.count(lp(2, 1, 1)).unwrap(), g[6]); // m = 3 → 7
        assert_eq!(counter.count(lp(2, 0, 0)).unwrap(), g[7]); // m = 4 → 23
    }
}
