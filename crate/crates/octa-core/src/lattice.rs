//! Index spaces, cones, and height functions (initial surfaces).
//!
//! The recurrence lives on the parity lattice of triples (n, i, j) with
//! n ≡ i + j (mod 2). An initial surface is a height function h on the faces
//! (i, j) ∈ ℤ²: parity h(i,j) ≡ i+j, unit steps between lattice-adjacent
//! faces, and proper growth so every evaluation cone meets only finitely many
//! points above the surface.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// A point (n, i, j) with n ≡ i + j (mod 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub n: i64,
    pub i: i64,
    pub j: i64,
}

impl LatticePoint {
    pub fn new(n: i64, i: i64, j: i64) -> Result<Self> {
        if (n - i - j).rem_euclid(2) != 0 {
            return Err(Error::LatticeParity { n, i, j });
        }
        Ok(LatticePoint { n, i, j })
    }

    pub fn face(&self) -> FacePoint {
        FacePoint { i: self.i, j: self.j }
    }
}

/// A face of the square grid; all of ℤ² is valid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacePoint {
    pub i: i64,
    pub j: i64,
}

impl FacePoint {
    pub fn new(i: i64, j: i64) -> Self {
        FacePoint { i, j }
    }

    /// The four lattice-adjacent faces, in E, N, W, S order.
    pub fn lattice_neighbors(&self) -> [FacePoint; 4] {
        [
            FacePoint::new(self.i + 1, self.j),
            FacePoint::new(self.i, self.j + 1),
            FacePoint::new(self.i - 1, self.j),
            FacePoint::new(self.i, self.j - 1),
        ]
    }
}

impl fmt::Display for FacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// One of the four edge-variable kinds: east, north, west, south of an odd face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    A,
    B,
    C,
    D,
}

impl EdgeKind {
    pub fn letter(&self) -> char {
        match self {
            EdgeKind::A => 'a',
            EdgeKind::B => 'b',
            EdgeKind::C => 'c',
            EdgeKind::D => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<EdgeKind> {
        match c {
            'a' => Some(EdgeKind::A),
            'b' => Some(EdgeKind::B),
            'c' => Some(EdgeKind::C),
            'd' => Some(EdgeKind::D),
            _ => None,
        }
    }
}

/// An edge label (i, j, q) with i + j odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub i: i64,
    pub j: i64,
    pub kind: EdgeKind,
}

impl EdgeLabel {
    pub fn new(i: i64, j: i64, kind: EdgeKind) -> Result<Self> {
        if (i + j).rem_euclid(2) != 1 {
            return Err(Error::EdgeLabelParity { i, j });
        }
        Ok(EdgeLabel { i, j, kind })
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.kind.letter(), self.i, self.j)
    }
}

/// p(i,j) = n₀ − |i−i₀| − |j−j₀| for an apex (n₀, i₀, j₀).
pub fn p_value(apex: LatticePoint, face: FacePoint) -> i64 {
    apex.n - (face.i - apex.i).abs() - (face.j - apex.j).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    Inner,
    Boundary,
    Outside,
}

/// Inner iff n < p(i,j), boundary iff n = p(i,j), outside otherwise.
pub fn cone_membership(apex: LatticePoint, point: LatticePoint) -> ConeMembership {
    let p = p_value(apex, point.face());
    if point.n < p {
        ConeMembership::Inner
    } else if point.n == p {
        ConeMembership::Boundary
    } else {
        ConeMembership::Outside
    }
}

/// The dependency cone of an apex.
#[derive(Clone, Copy, Debug)]
pub struct ConeRegion {
    pub apex: LatticePoint,
}

impl ConeRegion {
    pub fn new(apex: LatticePoint) -> Self {
        ConeRegion { apex }
    }

    pub fn p(&self, face: FacePoint) -> i64 {
        p_value(self.apex, face)
    }

    pub fn membership(&self, point: LatticePoint) -> ConeMembership {
        cone_membership(self.apex, point)
    }

    pub fn contains(&self, point: LatticePoint) -> bool {
        self.membership(point) != ConeMembership::Outside
    }
}

/// Periodic residue table with integer drift per full period.
///
/// h(i,j) = table[i mod p1][j mod p2] + c1·⌊i/p1⌋ + c2·⌊j/p2⌋.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicTable {
    period: (i64, i64),
    table: Vec<Vec<i64>>,
    drift: (i64, i64),
}

impl PeriodicTable {
    pub fn new(period: (i64, i64), table: Vec<Vec<i64>>, drift: (i64, i64)) -> Result<Self> {
        let (p1, p2) = period;
        if p1 < 1 || p2 < 1 {
            return Err(Error::InvalidPeriodicTable("periods must be ≥ 1".into()));
        }
        if table.len() != p1 as usize || table.iter().any(|row| row.len() != p2 as usize) {
            return Err(Error::InvalidPeriodicTable(format!(
                "table must be {}x{}",
                p1, p2
            )));
        }
        let (c1, c2) = drift;
        // Properness: the average slope must stay strictly inside ±1 per axis.
        if c1.abs() >= p1 || c2.abs() >= p2 {
            return Err(Error::InvalidPeriodicTable(
                "drift must satisfy |c1| < p1 and |c2| < p2".into(),
            ));
        }
        // Parity must be consistent across period boundaries.
        if (c1 - p1).rem_euclid(2) != 0 || (c2 - p2).rem_euclid(2) != 0 {
            return Err(Error::InvalidPeriodicTable(
                "drift parity must match the period parity".into(),
            ));
        }
        let pt = PeriodicTable { period, table, drift };
        // One fundamental domain plus its neighbor collar covers every
        // parity/step constraint on the plane.
        for i in 0..=p1 {
            for j in 0..=p2 {
                let f = FacePoint::new(i, j);
                let v = pt.value(f);
                if (v - i - j).rem_euclid(2) != 0 {
                    return Err(Error::InvalidPeriodicTable(format!(
                        "parity fails at {}: h={}",
                        f, v
                    )));
                }
                for nb in [FacePoint::new(i + 1, j), FacePoint::new(i, j + 1)] {
                    if (pt.value(nb) - v).abs() != 1 {
                        return Err(Error::InvalidPeriodicTable(format!(
                            "step condition fails between {} and {}",
                            f, nb
                        )));
                    }
                }
            }
        }
        Ok(pt)
    }

    fn value(&self, face: FacePoint) -> i64 {
        let (p1, p2) = self.period;
        let (c1, c2) = self.drift;
        self.table[face.i.rem_euclid(p1) as usize][face.j.rem_euclid(p2) as usize]
            + c1 * face.i.div_euclid(p1)
            + c2 * face.j.div_euclid(p2)
    }

    pub fn period(&self) -> (i64, i64) {
        self.period
    }

    pub fn drift(&self) -> (i64, i64) {
        self.drift
    }

    pub fn table(&self) -> &[Vec<i64>] {
        &self.table
    }
}

/// Base pattern of a height function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightBase {
    /// h = 0 on even faces, −1 on odd faces. Aztec diamond graphs.
    Aztec,
    /// h = 0 (i+j even), 1 (i even, j odd), −1 (i odd, j even). Fortresses.
    Fortress,
    /// h = 0 (i+j even), 1 (i+j ≡ 1 mod 4), −1 (i+j ≡ 3 mod 4).
    Douglass,
    /// h = 0 (i+j even), 1 (i+j odd, j ≡ 0,1 mod 4), −1 (i+j odd, j ≡ 2,3 mod 4).
    Blum,
    /// h = |i+j|; the diagonal wedge.
    AbsSum,
    /// Gale-Robinson slab: the unique n ≡ i+j (mod 2) with
    /// −2k < kn + (2a−k)i + (2b−k)j ≤ 0.
    GaleRobinson { k: i64, a: i64, b: i64 },
    Periodic(PeriodicTable),
    /// min(inner, p_apex): the truncation of a surface below a cone.
    /// A pseudo-height: steps and parity hold, properness does not.
    Truncated { inner: Box<HeightFunction>, apex: LatticePoint },
}

/// A height function: base pattern plus finitely many overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    base: HeightBase,
    overrides: BTreeMap<FacePoint, i64>,
}

impl HeightFunction {
    pub fn new(base: HeightBase) -> Result<Self> {
        if let HeightBase::GaleRobinson { k, a, b } = base {
            if !(0 < a && a < k && 0 < b && b < k) {
                return Err(Error::GaleRobinsonParams { k, a, b });
            }
        }
        Ok(HeightFunction { base, overrides: BTreeMap::new() })
    }

    pub fn aztec() -> Self {
        Self::new(HeightBase::Aztec).unwrap()
    }

    pub fn fortress() -> Self {
        Self::new(HeightBase::Fortress).unwrap()
    }

    pub fn douglass() -> Self {
        Self::new(HeightBase::Douglass).unwrap()
    }

    pub fn blum() -> Self {
        Self::new(HeightBase::Blum).unwrap()
    }

    pub fn abs_sum() -> Self {
        Self::new(HeightBase::AbsSum).unwrap()
    }

    pub fn gale_robinson(k: i64, a: i64, b: i64) -> Result<Self> {
        Self::new(HeightBase::GaleRobinson { k, a, b })
    }

    pub fn periodic(table: PeriodicTable) -> Self {
        HeightFunction { base: HeightBase::Periodic(table), overrides: BTreeMap::new() }
    }

    /// Builtin family by name.
    pub fn builtin(family: &str) -> Result<Self> {
        match family {
            "aztec" => Ok(Self::aztec()),
            "fortress" => Ok(Self::fortress()),
            "douglass" => Ok(Self::douglass()),
            "blum" => Ok(Self::blum()),
            "abs_sum" => Ok(Self::abs_sum()),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    /// Replaces the override set, validating each override and its four
    /// neighbors for parity and unit steps.
    pub fn with_overrides(
        mut self,
        overrides: BTreeMap<FacePoint, i64>,
    ) -> Result<Self> {
        self.overrides = overrides;
        for (&f, &v) in &self.overrides {
            if (v - f.i - f.j).rem_euclid(2) != 0 {
                return Err(Error::InvalidOverrides(format!(
                    "override at {} has value {} of wrong parity",
                    f, v
                )));
            }
            for nb in f.lattice_neighbors() {
                let w = self.value(nb);
                if (w - v).abs() != 1 {
                    return Err(Error::InvalidOverrides(format!(
                        "override at {} (h={}) breaks the step condition to {} (h={})",
                        f, v, nb, w
                    )));
                }
            }
        }
        Ok(self)
    }

    /// Sets a single face value without validation. Callers are responsible
    /// for keeping the result a pseudo-height function.
    pub(crate) fn with_face_set(&self, face: FacePoint, value: i64) -> HeightFunction {
        let mut h = self.clone();
        if h.base_value(face) == value {
            h.overrides.remove(&face);
        } else {
            h.overrides.insert(face, value);
        }
        h
    }

    pub fn overrides(&self) -> &BTreeMap<FacePoint, i64> {
        &self.overrides
    }

    pub fn base(&self) -> &HeightBase {
        &self.base
    }

    fn base_value(&self, face: FacePoint) -> i64 {
        let FacePoint { i, j } = face;
        match &self.base {
            HeightBase::Aztec => {
                if (i + j).rem_euclid(2) == 0 {
                    0
                } else {
                    -1
                }
            }
            HeightBase::Fortress => {
                if (i + j).rem_euclid(2) == 0 {
                    0
                } else if i.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
            HeightBase::Douglass => match (i + j).rem_euclid(4) {
                0 | 2 => 0,
                1 => 1,
                _ => -1,
            },
            HeightBase::Blum => {
                if (i + j).rem_euclid(2) == 0 {
                    0
                } else if j.rem_euclid(4) <= 1 {
                    1
                } else {
                    -1
                }
            }
            HeightBase::AbsSum => (i + j).abs(),
            HeightBase::GaleRobinson { k, a, b } => {
                let s = (2 * a - k) * i + (2 * b - k) * j;
                // Largest n with k·n ≤ −s, then parity-adjust downward; the
                // window (−2k, 0] admits exactly one n per parity class.
                let mut n = (-s).div_euclid(*k);
                if (n - i - j).rem_euclid(2) != 0 {
                    n -= 1;
                }
                debug_assert!(-2 * k < k * n + s && k * n + s <= 0);
                n
            }
            HeightBase::Periodic(table) => table.value(face),
            HeightBase::Truncated { inner, apex } => {
                inner.value(face).min(p_value(*apex, face))
            }
        }
    }

    /// h(i, j), overrides included.
    pub fn value(&self, face: FacePoint) -> i64 {
        match self.overrides.get(&face) {
            Some(&v) => v,
            None => self.base_value(face),
        }
    }

    /// The lattice point (h(i,j), i, j) on the initial surface.
    pub fn surface_point(&self, face: FacePoint) -> LatticePoint {
        LatticePoint { n: self.value(face), i: face.i, j: face.j }
    }

    /// Properness is a certified property of the base; finite overrides
    /// cannot break it. Truncations are pseudo-heights only.
    pub fn properness_certified(&self) -> bool {
        !matches!(self.base, HeightBase::Truncated { .. })
    }

    /// min(h, p_apex). The apex must lie strictly above the surface.
    pub fn truncate(&self, apex: LatticePoint) -> Result<HeightFunction> {
        if apex.n <= self.value(apex.face()) {
            return Err(Error::ApexNotAboveSurface(apex));
        }
        Ok(HeightFunction {
            base: HeightBase::Truncated { inner: Box::new(self.clone()), apex },
            overrides: BTreeMap::new(),
        })
    }

    /// Radius guard for cone scans; exceeding it flags an improper surface.
    pub(crate) fn scan_bound(&self, apex: LatticePoint) -> i64 {
        let center = (apex.n - self.value(apex.face())).abs();
        let override_span = self
            .overrides
            .iter()
            .map(|(f, v)| (v - self.base_value(*f)).abs() + (f.i - apex.i).abs() + (f.j - apex.j).abs())
            .max()
            .unwrap_or(0);
        let base_span = match &self.base {
            HeightBase::Periodic(t) => {
                let flat: i64 = t.table.iter().flatten().map(|v| v.abs()).max().unwrap_or(0);
                2 * flat + t.period.0 + t.period.1
            }
            HeightBase::GaleRobinson { k, .. } => 2 * k,
            HeightBase::Truncated { inner, .. } => inner.scan_bound(apex) - center,
            _ => 4,
        };
        center + override_span + base_span + 8
    }
}

/// Inclusive rectangular window of faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub i_min: i64,
    pub i_max: i64,
    pub j_min: i64,
    pub j_max: i64,
}

impl Rect {
    pub fn new(i_min: i64, i_max: i64, j_min: i64, j_max: i64) -> Self {
        assert!(i_min <= i_max && j_min <= j_max, "empty window");
        Rect { i_min, i_max, j_min, j_max }
    }

    pub fn centered(center: FacePoint, radius: i64) -> Self {
        Rect::new(
            center.i - radius,
            center.i + radius,
            center.j - radius,
            center.j + radius,
        )
    }

    pub fn contains(&self, f: FacePoint) -> bool {
        self.i_min <= f.i && f.i <= self.i_max && self.j_min <= f.j && f.j <= self.j_max
    }

    pub fn faces(&self) -> impl Iterator<Item = FacePoint> + '_ {
        (self.i_min..=self.i_max)
            .flat_map(move |i| (self.j_min..=self.j_max).map(move |j| FacePoint::new(i, j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightViolation {
    Parity { face: FacePoint, value: i64 },
    Step { face: FacePoint, neighbor: FacePoint, value: i64, neighbor_value: i64 },
}

/// Validation report for a window: every parity and step violation found,
/// plus whether properness is certified for the base.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<HeightViolation>,
    pub properness_certified: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks parity everywhere in the window and steps across every
/// lattice-adjacent pair inside it (plus one collar step eastward/northward).
pub fn validate_height(h: &HeightFunction, window: Rect) -> ValidationReport {
    let mut violations = Vec::new();
    for f in window.faces() {
        let v = h.value(f);
        if (v - f.i - f.j).rem_euclid(2) != 0 {
            violations.push(HeightViolation::Parity { face: f, value: v });
        }
        for nb in [FacePoint::new(f.i + 1, f.j), FacePoint::new(f.i, f.j + 1)] {
            if !window.contains(nb) {
                continue;
            }
            let w = h.value(nb);
            if (w - v).abs() != 1 {
                violations.push(HeightViolation::Step {
                    face: f,
                    neighbor: nb,
                    value: v,
                    neighbor_value: w,
                });
            }
        }
    }
    ValidationReport { violations, properness_certified: h.properness_certified() }
}

/// The finite set {(n,i,j) : h(i,j) < n ≤ p(i,j)}, sorted by (n, i, j).
///
/// The faces carrying such points are exactly the closed faces of the
/// subgraph at this apex, so the ring scan may stop at the first empty ring.
pub fn cone_upper_points(h: &HeightFunction, apex: LatticePoint) -> Result<Vec<LatticePoint>> {
    let faces = closed_faces(h, apex)?;
    let mut points = Vec::new();
    for f in faces {
        let hv = h.value(f);
        let p = p_value(apex, f);
        let mut n = hv + 2;
        while n <= p {
            points.push(LatticePoint { n, i: f.i, j: f.j });
            n += 2;
        }
    }
    points.sort();
    Ok(points)
}

/// Faces with h < p for the given apex, i.e. the closed faces of G(apex).
pub(crate) fn closed_faces(h: &HeightFunction, apex: LatticePoint) -> Result<Vec<FacePoint>> {
    let bound = h.scan_bound(apex);
    let mut faces = Vec::new();
    let mut d = 0i64;
    loop {
        let mut any = false;
        for f in ring(apex.face(), d) {
            if h.value(f) < p_value(apex, f) {
                faces.push(f);
                any = true;
            }
        }
        if !any {
            // Staircase convexity: an empty ring means every farther ring is
            // empty too.
            break;
        }
        d += 1;
        if d > bound {
            return Err(Error::ScanBoundExceeded { bound });
        }
    }
    faces.sort();
    Ok(faces)
}

fn ring(center: FacePoint, d: i64) -> Vec<FacePoint> {
    if d == 0 {
        return vec![center];
    }
    let mut out = Vec::with_capacity((4 * d) as usize);
    for di in -d..=d {
        let dj = d - di.abs();
        out.push(FacePoint::new(center.i + di, center.j + dj));
        if dj != 0 {
            out.push(FacePoint::new(center.i + di, center.j - dj));
        }
    }
    out
}

// --- JSON surface format -------------------------------------------------
//
// {"base": "aztec" | "fortress" | "douglass" | "blum" | "abs_sum"
//          | {"gale_robinson": [k, a, b]}
//          | {"periodic": {"period": [p1, p2], "table": [[..], ..], "drift": [c1, c2]}}
//          | {"truncated": {"inner": <height>, "apex": [n, i, j]}},
//  "overrides": [[i, j, n], ...]}

pub fn height_to_json(h: &HeightFunction) -> Value {
    let base = match h.base() {
        HeightBase::Aztec => json!("aztec"),
        HeightBase::Fortress => json!("fortress"),
        HeightBase::Douglass => json!("douglass"),
        HeightBase::Blum => json!("blum"),
        HeightBase::AbsSum => json!("abs_sum"),
        HeightBase::GaleRobinson { k, a, b } => json!({ "gale_robinson": [k, a, b] }),
        HeightBase::Periodic(t) => json!({
            "periodic": {
                "period": [t.period().0, t.period().1],
                "table": t.table(),
                "drift": [t.drift().0, t.drift().1],
            }
        }),
        HeightBase::Truncated { inner, apex } => json!({
            "truncated": {
                "inner": height_to_json(inner),
                "apex": [apex.n, apex.i, apex.j],
            }
        }),
    };
    let overrides: Vec<Value> = h
        .overrides()
        .iter()
        .map(|(f, v)| json!([f.i, f.j, v]))
        .collect();
    json!({ "base": base, "overrides": overrides })
}

pub fn height_from_json(v: &Value) -> Result<HeightFunction> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::HeightJson("expected an object".into()))?;
    let base = obj
        .get("base")
        .ok_or_else(|| Error::HeightJson("missing `base`".into()))?;
    let h = parse_base(base)?;
    let mut overrides = BTreeMap::new();
    if let Some(ovs) = obj.get("overrides") {
        let arr = ovs
            .as_array()
            .ok_or_else(|| Error::HeightJson("`overrides` must be an array".into()))?;
        for entry in arr {
            let triple = entry
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::HeightJson("override entries are [i, j, n]".into()))?;
            let nums: Vec<i64> = triple
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| Error::HeightJson("override entries are integers".into()))
                })
                .collect::<Result<_>>()?;
            overrides.insert(FacePoint::new(nums[0], nums[1]), nums[2]);
        }
    }
    h.with_overrides(overrides)
}

pub fn height_from_json_str(s: &str) -> Result<HeightFunction> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| Error::HeightJson(format!("bad JSON: {e}")))?;
    height_from_json(&v)
}

fn parse_base(v: &Value) -> Result<HeightFunction> {
    if let Some(name) = v.as_str() {
        return HeightFunction::builtin(name);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::HeightJson("`base` must be a string or object".into()))?;
    if let Some(params) = obj.get("gale_robinson") {
        let arr = params
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::HeightJson("gale_robinson takes [k, a, b]".into()))?;
        let nums: Vec<i64> = arr
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Error::HeightJson("k, a, b are integers".into())))
            .collect::<Result<_>>()?;
        return HeightFunction::gale_robinson(nums[0], nums[1], nums[2]);
    }
    if let Some(p) = obj.get("periodic") {
        let period = p
            .get("period")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::HeightJson("periodic needs `period: [p1, p2]`".into()))?;
        let p1 = period[0]
            .as_i64()
            .ok_or_else(|| Error::HeightJson("periods are integers".into()))?;
        let p2 = period[1]
            .as_i64()
            .ok_or_else(|| Error::HeightJson("periods are integers".into()))?;
        let table_v = p
            .get("table")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::HeightJson("periodic needs `table`".into()))?;
        let mut table = Vec::new();
        for row in table_v {
            let row = row
                .as_array()
                .ok_or_else(|| Error::HeightJson("table rows are arrays".into()))?;
            table.push(
                row.iter()
                    .map(|x| {
                        x.as_i64()
                            .ok_or_else(|| Error::HeightJson("table entries are integers".into()))
                    })
                    .collect::<Result<Vec<i64>>>()?,
            );
        }
        let drift_v = p
            .get("drift")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::HeightJson("periodic needs `drift: [c1, c2]`".into()))?;
        let c1 = drift_v[0]
            .as_i64()
            .ok_or_else(|| Error::HeightJson("drift entries are integers".into()))?;
        let c2 = drift_v[1]
            .as_i64()
            .ok_or_else(|| Error::HeightJson("drift entries are integers".into()))?;
        let table = PeriodicTable::new((p1, p2), table, (c1, c2))?;
        return Ok(HeightFunction::periodic(table));
    }
    if let Some(t) = obj.get("truncated") {
        let inner = t
            .get("inner")
            .ok_or_else(|| Error::HeightJson("truncated needs `inner`".into()))?;
        let apex_v = t
            .get("apex")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::HeightJson("truncated needs `apex: [n, i, j]`".into()))?;
        let nums: Vec<i64> = apex_v
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Error::HeightJson("apex entries are integers".into())))
            .collect::<Result<_>>()?;
        let apex = LatticePoint::new(nums[0], nums[1], nums[2])?;
        let inner = height_from_json(inner)?;
        return inner.truncate(apex);
    }
    Err(Error::HeightJson(format!("unrecognized base: {v}")))
}
