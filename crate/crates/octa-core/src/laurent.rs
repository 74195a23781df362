//! Sparse Laurent polynomials over ℤ in face variables x(i,j) and edge
//! variables a/b/c/d(i,j).
//!
//! Canonical form everywhere: monomials keep their variables in a fixed
//! total order (faces before edges, then lexicographic), polynomials map
//! monomials to nonzero coefficients under a graded-lexicographic term
//! order. Two polynomials are equal iff their canonical forms coincide,
//! and the serialized forms are byte-identical exactly then.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{EdgeKind, EdgeLabel, FacePoint};

/// A face or edge variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    Face(FacePoint),
    Edge(EdgeLabel),
}

impl VarId {
    pub fn face(i: i64, j: i64) -> VarId {
        VarId::Face(FacePoint::new(i, j))
    }

    pub fn edge(i: i64, j: i64, kind: EdgeKind) -> Result<VarId> {
        Ok(VarId::Edge(EdgeLabel::new(i, j, kind)?))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Face(p) => write!(f, "x[{},{}]", p.i, p.j),
            VarId::Edge(e) => write!(f, "{}", e),
        }
    }
}

/// Product of variables with nonzero integer exponents, canonically sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: Vec<(VarId, i64)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial { vars: vec![(v, 1)] }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, i64)>>(pairs: I) -> Self {
        let mut map: BTreeMap<VarId, i64> = BTreeMap::new();
        for (v, e) in pairs {
            let entry = map.entry(v).or_insert(0);
            *entry += e;
        }
        Monomial { vars: map.into_iter().filter(|&(_, e)| e != 0).collect() }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn exponents(&self) -> &[(VarId, i64)] {
        &self.vars
    }

    pub fn exponent_of(&self, v: VarId) -> i64 {
        match self.vars.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(idx) => self.vars[idx].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.vars.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut a, mut b) = (self.vars.iter().peekable(), other.vars.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        if ea + eb != 0 {
                            out.push((va, ea + eb));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial { vars: out }
    }

    pub fn inverse(&self) -> Monomial {
        Monomial { vars: self.vars.iter().map(|&(v, e)| (v, -e)).collect() }
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial {
            vars: if k == 0 {
                Vec::new()
            } else {
                self.vars.iter().map(|&(v, e)| (v, e * k)).collect()
            },
        }
    }

    /// Componentwise divisibility (used on shifted, nonnegative monomials).
    fn divides(&self, other: &Monomial) -> bool {
        self.vars
            .iter()
            .all(|&(v, e)| other.exponent_of(v) >= e)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inverse())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// earliest differing variable in canonical variable order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut a, mut b) = (self.vars.iter().peekable(), other.vars.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    // `self` has an extra variable at `va`; its exponent there
                    // is ea vs 0 for `other`.
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(&&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&&(_, eb))) => return 0.cmp(&eb),
                (None, None) => return Ordering::Equal,
            }
        }
    }
}

/// Sparse Laurent polynomial with BigInt coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        LaurentPoly { terms }
    }

    pub fn var(v: VarId) -> Self {
        LaurentPoly::monomial(Monomial::var(v), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    fn insert_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn pow(&self, mut k: u64) -> LaurentPoly {
        let mut base = self.clone();
        let mut out = LaurentPoly::one();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Componentwise minimum exponent over all terms; variables absent from
    /// some term count as exponent 0 there.
    fn min_exponents(&self) -> Monomial {
        let mut mins: BTreeMap<VarId, i64> = BTreeMap::new();
        let mut seen_in: BTreeMap<VarId, usize> = BTreeMap::new();
        for m in self.terms.keys() {
            for &(v, e) in m.exponents() {
                mins.entry(v).and_modify(|x| *x = (*x).min(e)).or_insert(e);
                *seen_in.entry(v).or_insert(0) += 1;
            }
        }
        let nterms = self.terms.len();
        Monomial::from_pairs(mins.into_iter().map(|(v, e)| {
            // A variable missing from any term has an implicit exponent 0.
            if seen_in[&v] < nterms {
                (v, e.min(0))
            } else {
                (v, e)
            }
        }))
    }

    /// Exact division in the Laurent ring: returns r with r·divisor = self,
    /// or DivisionNotExact when no such r exists.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        // Shift both operands into honest polynomials; if a Laurent quotient
        // exists it is exactly the shifted polynomial quotient times the
        // monomial shift difference.
        let shift_num = self.min_exponents();
        let shift_den = divisor.min_exponents();
        let num = self.mul_monomial(&shift_num.inverse());
        let den = divisor.mul_monomial(&shift_den.inverse());

        let (dlm, dlc) = den.leading().expect("nonzero divisor");
        let dlm = dlm.clone();
        let dlc = dlc.clone();
        let mut rem = num;
        let mut quot = LaurentPoly::zero();
        while let Some((rlm, rlc)) = rem.leading() {
            if !dlm.divides(rlm) {
                return Err(Error::DivisionNotExact);
            }
            let (q, r) = num_integer::div_rem(rlc.clone(), dlc.clone());
            if !r.is_zero() {
                return Err(Error::DivisionNotExact);
            }
            let qm = rlm.div(&dlm);
            quot.insert_term(qm.clone(), q.clone());
            let piece = den.mul(&LaurentPoly::monomial(qm, q));
            rem = rem.sub(&piece);
        }
        Ok(quot.mul_monomial(&shift_num.mul(&shift_den.inverse())))
    }

    fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    /// Returns (monomial, coefficient) when this polynomial is a single term
    /// with a unit coefficient, i.e. invertible in the Laurent ring.
    fn as_invertible_monomial(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if c.abs().is_one() {
            Some((m, c))
        } else {
            None
        }
    }

    /// Simultaneous substitution. Values at negative exponents must be
    /// invertible monomials; substituting 0 at a negative exponent is an
    /// error.
    pub fn substitute(&self, assignment: &BTreeMap<VarId, LaurentPoly>) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = LaurentPoly::constant(c.clone());
            for &(v, e) in m.exponents() {
                let Some(value) = assignment.get(&v) else {
                    kept.push((v, e));
                    continue;
                };
                if e >= 0 {
                    factor = factor.mul(&value.pow(e as u64));
                } else if value.is_zero() {
                    return Err(Error::NegativePowerOfZero);
                } else if let Some((vm, vc)) = value.as_invertible_monomial() {
                    let inv_c = if vc.is_negative() && e.rem_euclid(2) == 1 {
                        -BigInt::one()
                    } else {
                        BigInt::one()
                    };
                    factor = factor.mul(&LaurentPoly::monomial(vm.pow(e), inv_c));
                } else {
                    return Err(Error::NonInvertibleSubstitution);
                }
                if factor.is_zero() {
                    break;
                }
            }
            let residual = LaurentPoly::monomial(Monomial::from_pairs(kept), BigInt::one());
            out = out.add(&factor.mul(&residual));
        }
        Ok(out)
    }

    /// Substitute every variable with 1, i.e. the integer term sum.
    pub fn all_ones_value(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn profile(&self) -> CoefficientProfile {
        let mut coefficients: Vec<BigInt> = self.terms.values().cloned().collect();
        coefficients.sort();
        let mut face_exponents: Option<(i64, i64)> = None;
        let mut edge_exponents: Option<(i64, i64)> = None;
        let mut per_variable: BTreeMap<VarId, (i64, i64)> = BTreeMap::new();
        for m in self.terms.keys() {
            for &(v, e) in m.exponents() {
                let slot = match v {
                    VarId::Face(_) => &mut face_exponents,
                    VarId::Edge(_) => &mut edge_exponents,
                };
                *slot = Some(match *slot {
                    None => (e, e),
                    Some((lo, hi)) => (lo.min(e), hi.max(e)),
                });
                per_variable
                    .entry(v)
                    .and_modify(|r| *r = (r.0.min(e), r.1.max(e)))
                    .or_insert((e, e));
            }
        }
        CoefficientProfile {
            term_count: self.terms.len(),
            coefficients,
            face_exponents,
            edge_exponents,
            per_variable,
        }
    }
}

/// Shape summary: term count, coefficient multiset, exponent ranges.
#[derive(Clone, Debug)]
pub struct CoefficientProfile {
    pub term_count: usize,
    pub coefficients: Vec<BigInt>,
    pub face_exponents: Option<(i64, i64)>,
    pub edge_exponents: Option<(i64, i64)>,
    pub per_variable: BTreeMap<VarId, (i64, i64)>,
}

impl CoefficientProfile {
    /// All coefficients 1, face exponents within [−1, 3], edge exponents
    /// within {0, 1}.
    pub fn satisfies_unit_form(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_one())
            && self.face_exponents.is_none_or(|(lo, hi)| lo >= -1 && hi <= 3)
            && self.edge_exponents.is_none_or(|(lo, hi)| lo >= 0 && hi <= 1)
    }
}

// --- canonical text form --------------------------------------------------

impl fmt::Display for LaurentPoly {
    /// Terms in descending monomial order; factors in canonical variable
    /// order; `^1` elided; unit coefficients elided.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if !mag.is_one() || m.is_one() {
                write!(f, "{}", mag)?;
                wrote = true;
            }
            for &(v, e) in m.exponents() {
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "{}", v)?;
                if e != 1 {
                    write!(f, "^{}", e)?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

/// Parses the canonical text form back into a polynomial.
pub fn poly_from_text(input: &str) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero();
    let s = input.trim();
    if s == "0" {
        return Ok(out);
    }
    let mut rest = s;
    let mut sign = BigInt::one();
    if let Some(r) = rest.strip_prefix('-') {
        sign = -sign;
        rest = r.trim_start();
    }
    loop {
        let end = find_term_end(rest);
        let term = rest[..end].trim();
        if term.is_empty() {
            return Err(Error::PolyParse("empty term".into()));
        }
        let (m, c) = parse_term(term)?;
        out.insert_term(m, c * &sign);
        rest = rest[end..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        sign = if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
            BigInt::one()
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r.trim_start();
            -BigInt::one()
        } else {
            return Err(Error::PolyParse(format!("expected + or - near `{rest}`")));
        };
    }
}

fn find_term_end(s: &str) -> usize {
    let mut depth = 0usize;
    for (idx, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            '+' if depth == 0 => return idx,
            '-' if depth == 0 && idx > 0 && !s[..idx].ends_with('^') => return idx,
            _ => {}
        }
    }
    s.len()
}

fn parse_term(term: &str) -> Result<(Monomial, BigInt)> {
    let mut coeff = BigInt::one();
    let mut pairs = Vec::new();
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::PolyParse("empty factor".into()));
        }
        let first = factor.chars().next().unwrap();
        if first.is_ascii_digit() {
            let c: BigInt = factor
                .parse()
                .map_err(|_| Error::PolyParse(format!("bad integer `{factor}`")))?;
            coeff *= c;
            continue;
        }
        let (name, expo) = match factor.find('^') {
            Some(pos) => (&factor[..pos], factor[pos + 1..].parse::<i64>().map_err(|_| {
                Error::PolyParse(format!("bad exponent in `{factor}`"))
            })?),
            None => (factor, 1i64),
        };
        let open = name
            .find('[')
            .ok_or_else(|| Error::PolyParse(format!("bad variable `{name}`")))?;
        if !name.ends_with(']') {
            return Err(Error::PolyParse(format!("bad variable `{name}`")));
        }
        let head = &name[..open];
        let body = &name[open + 1..name.len() - 1];
        let coords: Vec<&str> = body.split(',').collect();
        if coords.len() != 2 {
            return Err(Error::PolyParse(format!("bad coordinates in `{name}`")));
        }
        let i: i64 = coords[0]
            .trim()
            .parse()
            .map_err(|_| Error::PolyParse(format!("bad coordinate in `{name}`")))?;
        let j: i64 = coords[1]
            .trim()
            .parse()
            .map_err(|_| Error::PolyParse(format!("bad coordinate in `{name}`")))?;
        let var = match head {
            "x" => VarId::face(i, j),
            q => {
                let kind = q
                    .chars()
                    .next()
                    .and_then(EdgeKind::from_letter)
                    .filter(|_| q.len() == 1)
                    .ok_or_else(|| Error::PolyParse(format!("unknown variable `{name}`")))?;
                VarId::edge(i, j, kind).map_err(|_| {
                    Error::PolyParse(format!("edge variable `{name}` has even i+j"))
                })?
            }
        };
        pairs.push((var, expo));
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

// --- JSON form --------------------------------------------------------------

pub fn poly_to_json(p: &LaurentPoly) -> Value {
    let terms: Vec<Value> = p
        .terms
        .iter()
        .rev()
        .map(|(m, c)| {
            let vars: Vec<Value> = m
                .exponents()
                .iter()
                .map(|&(v, e)| match v {
                    VarId::Face(f) => json!(["x", f.i, f.j, e]),
                    VarId::Edge(l) => json!([l.kind.letter().to_string(), l.i, l.j, e]),
                })
                .collect();
            json!({ "coeff": c.to_string(), "vars": vars })
        })
        .collect();
    json!({ "terms": terms })
}

pub fn poly_from_json(v: &Value) -> Result<LaurentPoly> {
    let bad = |msg: &str| Error::PolyParse(msg.to_string());
    let terms = v
        .get("terms")
        .and_then(|t| t.as_array())
        .ok_or_else(|| bad("missing `terms`"))?;
    let mut out = LaurentPoly::zero();
    for t in terms {
        let coeff: BigInt = t
            .get("coeff")
            .and_then(|c| c.as_str())
            .ok_or_else(|| bad("term needs string `coeff`"))?
            .parse()
            .map_err(|_| bad("bad coefficient"))?;
        let vars = t
            .get("vars")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("term needs `vars`"))?;
        let mut pairs = Vec::new();
        for entry in vars {
            let quad = entry.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
                bad("var entries are [name, i, j, exponent]")
            })?;
            let name = quad[0].as_str().ok_or_else(|| bad("var name"))?;
            let i = quad[1].as_i64().ok_or_else(|| bad("var i"))?;
            let j = quad[2].as_i64().ok_or_else(|| bad("var j"))?;
            let e = quad[3].as_i64().ok_or_else(|| bad("var exponent"))?;
            let var = match name {
                "x" => VarId::face(i, j),
                q if q.len() == 1 => {
                    let kind = EdgeKind::from_letter(q.chars().next().unwrap())
                        .ok_or_else(|| bad("unknown variable name"))?;
                    VarId::edge(i, j, kind).map_err(|_| bad("edge parity"))?
                }
                _ => return Err(bad("unknown variable name")),
            };
            pairs.push((var, e));
        }
        out.insert_term(Monomial::from_pairs(pairs), coeff);
    }
    Ok(out)
}
