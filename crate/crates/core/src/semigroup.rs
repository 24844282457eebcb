//! Right LCM semigroups with exact normal forms.
//!
//! Two families cover every built-in semigroup:
//!
//! * [`LatticeMonoid`]: `U × ℕ^k` where `U` is a finite cyclic unit group. Optional
//!   labels realize it inside `ℤ^×` (e.g. `|2,3⟩`, `|−2,3⟩`, `|−1,2,3⟩`) or inside
//!   `ℤ[i]^×`; abstract labels give `ℕ^k`. Right LCMs are exponentwise maxima.
//! * the free monoid `𝔽_n^+` on letters `a, b, …`, where two principal right
//!   ideals meet iff one word is a prefix of the other.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{mismatch, AlgebraError, Result};
use crate::gaussian::{self, Gaussian};

/// Relation-search depth used when registering `|g₁,…,g_k⟩ ⊂ ℤ^×`.
pub const DEFAULT_FREENESS_DEPTH: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemigroupElement {
    /// `unit` indexes the cyclic unit group, `exps` the non-unit generators.
    Lattice { unit: u8, exps: Vec<u32> },
    /// A word over the letters `0..n`, printed as `a, b, …`.
    Word(Vec<u8>),
}

impl SemigroupElement {
    pub fn lattice(unit: u8, exps: Vec<u32>) -> Self {
        SemigroupElement::Lattice { unit, exps }
    }

    pub fn word(s: &str) -> Self {
        SemigroupElement::Word(s.bytes().map(|b| b - b'a').collect())
    }

    fn family(&self) -> String {
        match self {
            SemigroupElement::Lattice { exps, .. } => format!("lattice element of rank {}", exps.len()),
            SemigroupElement::Word(_) => "word".to_string(),
        }
    }
}

/// How a lattice monoid sits inside a ring, if at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labels {
    Abstract,
    Integer(Vec<BigInt>),
    Gaussian(Vec<Gaussian>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMonoid {
    rank: usize,
    unit_order: u8,
    labels: Labels,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semigroup {
    Lattice(LatticeMonoid),
    Free { letters: u8 },
}

/// Outcome of intersecting two principal right ideals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RightLcm {
    Disjoint,
    /// `pP ∩ qP = rP` with `p·p_comp = r = q·q_comp`.
    Meet {
        r: SemigroupElement,
        p_comp: SemigroupElement,
        q_comp: SemigroupElement,
    },
}

impl RightLcm {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, RightLcm::Disjoint)
    }
}

impl Semigroup {
    /// `ℕ^rank` with abstract generators.
    pub fn free_abelian(rank: usize) -> Self {
        Semigroup::Lattice(LatticeMonoid {
            rank,
            unit_order: 1,
            labels: Labels::Abstract,
        })
    }

    /// The trivial monoid `{1}`.
    pub fn trivial() -> Self {
        Semigroup::free_abelian(0)
    }

    pub fn free_monoid(letters: u8) -> Self {
        assert!(letters <= 26, "at most 26 letters are supported");
        Semigroup::Free { letters }
    }

    /// The multiplicative subsemigroup `|g₁,…,g_k⟩` of `ℤ^×`.
    pub fn integers(gens: &[i64]) -> Result<Self> {
        Self::integers_with_depth(gens, DEFAULT_FREENESS_DEPTH)
    }

    /// As [`Semigroup::integers`], searching for relations among products of up to
    /// `depth` generators. `−1` is taken as the unit group `{±1}`; the non-unit
    /// generators must be free up to that unit group.
    pub fn integers_with_depth(gens: &[i64], depth: u32) -> Result<Self> {
        let what = format!("|{}⟩", gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","));
        let reg_err = |reason: String| AlgebraError::Registration {
            what: what.clone(),
            reason,
            report: None,
        };
        let unit_order = if gens.contains(&-1) { 2 } else { 1 };
        let mut labels = Vec::new();
        for &g in gens {
            match g {
                0 => return Err(reg_err("0 is not an injective multiplier".into())),
                1 | -1 => {}
                _ if unit_order == 2 => labels.push(BigInt::from(g.abs())),
                _ => labels.push(BigInt::from(g)),
            }
        }
        let key = |v: BigInt| if unit_order == 2 { v.abs() } else { v };
        let mut seen: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
        for exps in exponent_vectors(labels.len(), depth) {
            let v = key(int_product(&labels, &exps));
            if let Some(prev) = seen.get(&v) {
                return Err(reg_err(format!(
                    "generators are not free: exponent vectors {prev:?} and {exps:?} both give {v}"
                )));
            }
            seen.insert(v, exps);
        }
        Ok(Semigroup::Lattice(LatticeMonoid {
            rank: labels.len(),
            unit_order,
            labels: Labels::Integer(labels),
        }))
    }

    /// The multiplicative subsemigroup of `ℤ[i]^×` generated by `gens`. Units among
    /// the generators span the unit group; the remaining generators must be pairwise
    /// coprime non-units.
    pub fn gaussian(gens: &[Gaussian]) -> Result<Self> {
        let what = format!("|{}⟩", gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","));
        let reg_err = |reason: String| AlgebraError::Registration {
            what: what.clone(),
            reason,
            report: None,
        };
        let mut unit_order = 1u8;
        let mut raw = Vec::new();
        for g in gens {
            if g.is_zero() {
                return Err(reg_err("0 is not an injective multiplier".into()));
            }
            match g.unit_index() {
                Some(0) => {}
                Some(2) => unit_order = unit_order.max(2),
                Some(_) => unit_order = 4,
                None => raw.push(g.clone()),
            }
        }
        let labels: Vec<Gaussian> = raw.iter().map(|g| g.normalize_by(unit_order)).collect();
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                let d = gaussian::gcd(&labels[i], &labels[j]);
                if !d.is_unit() {
                    return Err(reg_err(format!(
                        "generators {} and {} share the factor {}",
                        labels[i], labels[j], d
                    )));
                }
            }
        }
        Ok(Semigroup::Lattice(LatticeMonoid {
            rank: labels.len(),
            unit_order,
            labels: Labels::Gaussian(labels),
        }))
    }

    pub fn name(&self) -> String {
        match self {
            Semigroup::Free { letters } => format!("𝔽_{letters}^+"),
            Semigroup::Lattice(l) => match &l.labels {
                Labels::Abstract if l.rank == 0 => "{1}".to_string(),
                Labels::Abstract => format!("ℕ^{}", l.rank),
                Labels::Integer(gs) => {
                    let mut parts: Vec<String> = Vec::new();
                    if l.unit_order == 2 {
                        parts.push("-1".into());
                    }
                    parts.extend(gs.iter().map(|g| g.to_string()));
                    if parts.is_empty() {
                        "{1}".to_string()
                    } else {
                        format!("|{}⟩", parts.join(","))
                    }
                }
                Labels::Gaussian(gs) => {
                    let mut parts: Vec<String> = Vec::new();
                    match l.unit_order {
                        2 => parts.push("-1".into()),
                        4 => parts.push("i".into()),
                        _ => {}
                    }
                    parts.extend(gs.iter().map(|g| g.to_string()));
                    format!("|{}⟩", parts.join(","))
                }
            },
        }
    }

    pub fn labels(&self) -> Option<&Labels> {
        match self {
            Semigroup::Lattice(l) => Some(&l.labels),
            Semigroup::Free { .. } => None,
        }
    }

    pub fn identity(&self) -> SemigroupElement {
        match self {
            Semigroup::Lattice(l) => SemigroupElement::lattice(0, vec![0; l.rank]),
            Semigroup::Free { .. } => SemigroupElement::Word(Vec::new()),
        }
    }

    /// Generators in ball order: the unit generator first (if any), then the rest.
    pub fn generators(&self) -> Vec<SemigroupElement> {
        match self {
            Semigroup::Lattice(l) => {
                let mut out = Vec::new();
                if l.unit_order > 1 {
                    out.push(SemigroupElement::lattice(1, vec![0; l.rank]));
                }
                for i in 0..l.rank {
                    let mut e = vec![0; l.rank];
                    e[i] = 1;
                    out.push(SemigroupElement::lattice(0, e));
                }
                out
            }
            Semigroup::Free { letters } => (0..*letters).map(|c| SemigroupElement::Word(vec![c])).collect(),
        }
    }

    pub fn unit_order(&self) -> usize {
        match self {
            Semigroup::Lattice(l) => l.unit_order as usize,
            Semigroup::Free { .. } => 1,
        }
    }

    /// True when every element is invertible (the semigroup is a group).
    pub fn is_group(&self) -> bool {
        match self {
            Semigroup::Lattice(l) => l.rank == 0,
            Semigroup::Free { letters } => *letters == 0,
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            Semigroup::Lattice(_) => true,
            Semigroup::Free { letters } => *letters <= 1,
        }
    }

    pub fn check(&self, p: &SemigroupElement) -> Result<()> {
        match (self, p) {
            (Semigroup::Lattice(l), SemigroupElement::Lattice { unit, exps }) => {
                if exps.len() != l.rank {
                    Err(mismatch(self.name(), p.family()))
                } else if *unit >= l.unit_order {
                    Err(AlgebraError::InvalidElement(format!(
                        "unit index {unit} outside the unit group of order {}",
                        l.unit_order
                    )))
                } else {
                    Ok(())
                }
            }
            (Semigroup::Free { letters }, SemigroupElement::Word(w)) => {
                if let Some(c) = w.iter().find(|c| **c >= *letters) {
                    Err(AlgebraError::InvalidElement(format!(
                        "letter {} outside the alphabet of size {letters}",
                        (b'a' + c) as char
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Err(mismatch(self.name(), p.family())),
        }
    }

    pub fn compose(&self, p: &SemigroupElement, q: &SemigroupElement) -> Result<SemigroupElement> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.compose_unchecked(p, q))
    }

    pub(crate) fn compose_unchecked(&self, p: &SemigroupElement, q: &SemigroupElement) -> SemigroupElement {
        match (self, p, q) {
            (
                Semigroup::Lattice(l),
                SemigroupElement::Lattice { unit: u, exps: a },
                SemigroupElement::Lattice { unit: v, exps: b },
            ) => SemigroupElement::Lattice {
                unit: (u + v) % l.unit_order,
                exps: a.iter().zip(b).map(|(x, y)| x + y).collect(),
            },
            (Semigroup::Free { .. }, SemigroupElement::Word(a), SemigroupElement::Word(b)) => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                SemigroupElement::Word(w)
            }
            _ => unreachable!("checked elements"),
        }
    }

    /// Intersection of `pP` and `qP`; in the `Meet` case `r` has trivial unit part.
    pub fn right_lcm(&self, p: &SemigroupElement, q: &SemigroupElement) -> Result<RightLcm> {
        self.check(p)?;
        self.check(q)?;
        Ok(match (self, p, q) {
            (
                Semigroup::Lattice(l),
                SemigroupElement::Lattice { unit: u, exps: a },
                SemigroupElement::Lattice { unit: v, exps: b },
            ) => {
                let m: Vec<u32> = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
                let n = l.unit_order;
                RightLcm::Meet {
                    p_comp: SemigroupElement::Lattice {
                        unit: (n - u) % n,
                        exps: m.iter().zip(a).map(|(x, y)| x - y).collect(),
                    },
                    q_comp: SemigroupElement::Lattice {
                        unit: (n - v) % n,
                        exps: m.iter().zip(b).map(|(x, y)| x - y).collect(),
                    },
                    r: SemigroupElement::Lattice { unit: 0, exps: m },
                }
            }
            (Semigroup::Free { .. }, SemigroupElement::Word(a), SemigroupElement::Word(b)) => {
                let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                if long.starts_with(short) {
                    let rest = SemigroupElement::Word(long[short.len()..].to_vec());
                    let empty = SemigroupElement::Word(Vec::new());
                    let (p_comp, q_comp) = if a.len() <= b.len() { (rest, empty) } else { (empty, rest) };
                    RightLcm::Meet {
                        r: SemigroupElement::Word(long.clone()),
                        p_comp,
                        q_comp,
                    }
                } else {
                    RightLcm::Disjoint
                }
            }
            _ => unreachable!("checked elements"),
        })
    }

    /// The unique `x` with `p·x = q`, if `q ∈ pP`.
    pub fn divides(&self, p: &SemigroupElement, q: &SemigroupElement) -> Result<Option<SemigroupElement>> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.divides_unchecked(p, q))
    }

    pub(crate) fn divides_unchecked(&self, p: &SemigroupElement, q: &SemigroupElement) -> Option<SemigroupElement> {
        match (self, p, q) {
            (
                Semigroup::Lattice(l),
                SemigroupElement::Lattice { unit: u, exps: a },
                SemigroupElement::Lattice { unit: v, exps: b },
            ) => {
                if a.iter().zip(b).all(|(x, y)| x <= y) {
                    let n = l.unit_order;
                    Some(SemigroupElement::Lattice {
                        unit: (v + n - u) % n,
                        exps: b.iter().zip(a).map(|(y, x)| y - x).collect(),
                    })
                } else {
                    None
                }
            }
            (Semigroup::Free { .. }, SemigroupElement::Word(a), SemigroupElement::Word(b)) => {
                b.starts_with(a).then(|| SemigroupElement::Word(b[a.len()..].to_vec()))
            }
            _ => unreachable!("checked elements"),
        }
    }

    pub fn is_unit(&self, p: &SemigroupElement) -> bool {
        match p {
            SemigroupElement::Lattice { exps, .. } => exps.iter().all(|e| *e == 0),
            SemigroupElement::Word(w) => w.is_empty(),
        }
    }

    pub fn units(&self) -> Vec<SemigroupElement> {
        match self {
            Semigroup::Lattice(l) => (0..l.unit_order)
                .map(|u| SemigroupElement::lattice(u, vec![0; l.rank]))
                .collect(),
            Semigroup::Free { .. } => vec![self.identity()],
        }
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self, x: &SemigroupElement) -> Result<SemigroupElement> {
        self.check(x)?;
        if !self.is_unit(x) {
            return Err(AlgebraError::Contract(format!("{} is not a unit", self.display(x))));
        }
        Ok(match (self, x) {
            (Semigroup::Lattice(l), SemigroupElement::Lattice { unit, exps }) => SemigroupElement::Lattice {
                unit: (l.unit_order - unit) % l.unit_order,
                exps: exps.clone(),
            },
            _ => x.clone(),
        })
    }

    /// `(normalized, x)` with `p·x = normalized`, `x` a unit and the unit part of
    /// `normalized` trivial.
    pub fn unit_normalize(&self, p: &SemigroupElement) -> (SemigroupElement, SemigroupElement) {
        match (self, p) {
            (Semigroup::Lattice(l), SemigroupElement::Lattice { unit, exps }) => {
                let n = l.unit_order;
                (
                    SemigroupElement::lattice(0, exps.clone()),
                    SemigroupElement::lattice((n - unit) % n, vec![0; l.rank]),
                )
            }
            _ => (p.clone(), self.identity()),
        }
    }

    /// All products of at most `radius` generators, in breadth-first discovery order.
    pub fn enumerate_ball(&self, radius: usize) -> Vec<SemigroupElement> {
        let mut seen = BTreeSet::new();
        let id = self.identity();
        seen.insert(id.clone());
        let mut out = vec![id.clone()];
        let mut frontier = vec![id];
        let gens = self.generators();
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for g in &gens {
                    let y = self.compose_unchecked(x, g);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Every element, layer by layer in ball order; infinite unless the semigroup is finite.
    pub fn elements(&self) -> ElementStream {
        ElementStream {
            semigroup: self.clone(),
            seen: BTreeSet::new(),
            frontier: Vec::new(),
            buffer: VecDeque::new(),
            started: false,
        }
    }

    /// Searches the ball of radius `bound` for `(a, b)` with `a·p = b·q`.
    pub fn right_reversibility_witness(
        &self,
        p: &SemigroupElement,
        q: &SemigroupElement,
        bound: usize,
    ) -> Result<Option<(SemigroupElement, SemigroupElement)>> {
        self.check(p)?;
        self.check(q)?;
        let ball = self.enumerate_ball(bound);
        let mut by_product: BTreeMap<SemigroupElement, SemigroupElement> = BTreeMap::new();
        for b in &ball {
            by_product.entry(self.compose_unchecked(b, q)).or_insert_with(|| b.clone());
        }
        for a in &ball {
            if let Some(b) = by_product.get(&self.compose_unchecked(a, p)) {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
        Ok(None)
    }

    /// Whether `P ∖ pP` is finite.
    pub fn complement_is_finite(&self, p: &SemigroupElement) -> bool {
        if self.is_unit(p) {
            return true;
        }
        match self {
            Semigroup::Lattice(l) => l.rank <= 1,
            Semigroup::Free { letters } => *letters <= 1,
        }
    }

    /// The integer this element stands for, for `ℤ^×`-labelled lattices.
    pub fn int_value(&self, p: &SemigroupElement) -> Option<BigInt> {
        match (self, p) {
            (Semigroup::Lattice(l), SemigroupElement::Lattice { unit, exps }) => match &l.labels {
                Labels::Integer(gs) => {
                    let v = int_product(gs, exps);
                    Some(if *unit == 1 { -v } else { v })
                }
                _ => None,
            },
            _ => None,
        }
    }

    pub fn gauss_value(&self, p: &SemigroupElement) -> Option<Gaussian> {
        match (self, p) {
            (Semigroup::Lattice(l), SemigroupElement::Lattice { unit, exps }) => match &l.labels {
                Labels::Gaussian(gs) => {
                    let mut v = Gaussian::i().pow(*unit as u32 * (4 / l.unit_order as u32));
                    for (g, e) in gs.iter().zip(exps) {
                        v = &v * &g.pow(*e);
                    }
                    Some(v)
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Inverse of [`Semigroup::int_value`].
    pub fn from_int_value(&self, v: &BigInt) -> Result<SemigroupElement> {
        let not_in = || AlgebraError::InvalidElement(format!("{v} is not an element of {}", self.name()));
        let Semigroup::Lattice(l) = self else { return Err(not_in()) };
        let Labels::Integer(gs) = &l.labels else { return Err(not_in()) };
        fn search(gs: &[BigInt], i: usize, rem: &BigInt, exps: &mut Vec<u32>, unit_order: u8) -> Option<u8> {
            if i == gs.len() {
                return if rem.is_one() {
                    Some(0)
                } else if unit_order == 2 && *rem == -BigInt::one() {
                    Some(1)
                } else {
                    None
                };
            }
            let mut pow = BigInt::one();
            let mut e = 0;
            loop {
                if !(rem % &pow).is_zero() {
                    return None;
                }
                exps.push(e);
                if let Some(u) = search(gs, i + 1, &(rem / &pow), exps, unit_order) {
                    return Some(u);
                }
                exps.pop();
                pow *= &gs[i];
                e += 1;
            }
        }
        let mut exps = Vec::new();
        let unit = search(gs, 0, v, &mut exps, l.unit_order).ok_or_else(not_in)?;
        Ok(SemigroupElement::Lattice { unit, exps })
    }

    pub fn from_gauss_value(&self, v: &Gaussian) -> Result<SemigroupElement> {
        let not_in = || AlgebraError::InvalidElement(format!("{v} is not an element of {}", self.name()));
        let Semigroup::Lattice(l) = self else { return Err(not_in()) };
        let Labels::Gaussian(gs) = &l.labels else { return Err(not_in()) };
        if v.is_zero() {
            return Err(not_in());
        }
        // Pairwise coprime generators: multiplicities are read off by repeated division.
        let mut rem = v.clone();
        let mut exps = Vec::with_capacity(gs.len());
        for g in gs {
            let mut e = 0;
            while let Some(q) = rem.div_exact(g) {
                rem = q;
                e += 1;
            }
            exps.push(e);
        }
        let idx = rem.unit_index().ok_or_else(not_in)?;
        let step = 4 / l.unit_order;
        if idx % step != 0 {
            return Err(not_in());
        }
        Ok(SemigroupElement::Lattice { unit: idx / step, exps })
    }

    pub fn display(&self, p: &SemigroupElement) -> String {
        if let Some(v) = self.int_value(p) {
            return v.to_string();
        }
        if let Some(v) = self.gauss_value(p) {
            return v.to_string();
        }
        match p {
            SemigroupElement::Word(w) if w.is_empty() => "ε".to_string(),
            SemigroupElement::Word(w) => w.iter().map(|c| (b'a' + c) as char).collect(),
            SemigroupElement::Lattice { exps, .. } => format!(
                "[{}]",
                exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// JSON payload: integers for `ℤ^×` labels, strings like `"1+i"` for `ℤ[i]`,
    /// exponent arrays for `ℕ^k`, strings for words.
    pub fn encode(&self, p: &SemigroupElement) -> Value {
        if let Some(v) = self.int_value(p) {
            return encode_bigint(&v);
        }
        if let Some(v) = self.gauss_value(p) {
            return Value::String(v.to_string());
        }
        match p {
            SemigroupElement::Word(_) => Value::String(self.display(p)),
            SemigroupElement::Lattice { exps, .. } => json!(exps),
        }
    }

    pub fn decode(&self, v: &Value) -> Result<SemigroupElement> {
        let bad = || AlgebraError::Parse(format!("cannot read {v} as an element of {}", self.name()));
        let p = match (self, v) {
            (Semigroup::Free { .. }, Value::String(s)) => self.parse(s)?,
            (Semigroup::Free { .. }, Value::Number(n)) if n.as_i64() == Some(1) => self.identity(),
            (Semigroup::Lattice(l), _) => match (&l.labels, v) {
                (Labels::Integer(_), Value::Number(_) | Value::String(_)) => {
                    self.from_int_value(&decode_bigint(v)?)?
                }
                (Labels::Gaussian(_), Value::String(s)) => self.from_gauss_value(&s.parse()?)?,
                (Labels::Gaussian(_), Value::Number(n)) => {
                    self.from_gauss_value(&Gaussian::new(n.as_i64().ok_or_else(bad)?, 0))?
                }
                (Labels::Gaussian(_), Value::Array(a)) if a.len() == 2 => {
                    let re = decode_bigint(&a[0])?;
                    let im = decode_bigint(&a[1])?;
                    self.from_gauss_value(&Gaussian { re, im })?
                }
                (Labels::Abstract, Value::Array(a)) => SemigroupElement::Lattice {
                    unit: 0,
                    exps: a
                        .iter()
                        .map(|x| x.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(bad))
                        .collect::<Result<_>>()?,
                },
                (Labels::Abstract, Value::Number(n)) if n.as_i64() == Some(1) => self.identity(),
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        };
        self.check(&p)?;
        Ok(p)
    }

    /// Reads the textual forms accepted on the command line.
    pub fn parse(&self, s: &str) -> Result<SemigroupElement> {
        let s = s.trim();
        match self {
            Semigroup::Free { .. } => {
                let p = match s {
                    "" | "ε" | "1" | "e" => self.identity(),
                    _ => {
                        if !s.bytes().all(|b| b.is_ascii_lowercase()) {
                            return Err(AlgebraError::Parse(format!("not a word: {s:?}")));
                        }
                        SemigroupElement::word(s)
                    }
                };
                self.check(&p)?;
                Ok(p)
            }
            Semigroup::Lattice(l) => match &l.labels {
                Labels::Integer(_) => self.from_int_value(
                    &s.parse::<BigInt>()
                        .map_err(|_| AlgebraError::Parse(format!("not an integer: {s:?}")))?,
                ),
                Labels::Gaussian(_) => self.from_gauss_value(&s.parse()?),
                Labels::Abstract => {
                    let v: Value = serde_json::from_str(s)
                        .map_err(|e| AlgebraError::Parse(format!("not an exponent vector {s:?}: {e}")))?;
                    self.decode(&v)
                }
            },
        }
    }
}

impl fmt::Display for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Lazily enumerated elements of a semigroup, in ball order.
pub struct ElementStream {
    semigroup: Semigroup,
    seen: BTreeSet<SemigroupElement>,
    frontier: Vec<SemigroupElement>,
    buffer: VecDeque<SemigroupElement>,
    started: bool,
}

impl Iterator for ElementStream {
    type Item = SemigroupElement;

    fn next(&mut self) -> Option<SemigroupElement> {
        if !self.started {
            self.started = true;
            let id = self.semigroup.identity();
            self.seen.insert(id.clone());
            self.frontier.push(id.clone());
            return Some(id);
        }
        if self.buffer.is_empty() {
            let gens = self.semigroup.generators();
            let mut next = Vec::new();
            for x in &self.frontier {
                for g in &gens {
                    let y = self.semigroup.compose_unchecked(x, g);
                    if self.seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            self.buffer.extend(next.iter().cloned());
            self.frontier = next;
        }
        self.buffer.pop_front()
    }
}

fn int_product(gs: &[BigInt], exps: &[u32]) -> BigInt {
    let mut v = BigInt::one();
    for (g, e) in gs.iter().zip(exps) {
        v *= num::pow(g.clone(), *e as usize);
    }
    v
}

/// All exponent vectors of length `k` with total degree at most `depth`.
fn exponent_vectors(k: usize, depth: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, depth, &mut cur, &mut out);
    out
}

pub(crate) fn encode_bigint(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => Value::String(v.to_string()),
    }
}

pub(crate) fn decode_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| AlgebraError::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| AlgebraError::Parse(format!("not an integer: {s:?}"))),
        other => Err(AlgebraError::Parse(format!("not an integer: {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(sg: &Semigroup, v: i64) -> SemigroupElement {
        sg.from_int_value(&BigInt::from(v)).unwrap()
    }

    fn shown(sg: &Semigroup, xs: &[SemigroupElement]) -> Vec<String> {
        xs.iter().map(|x| sg.display(x)).collect()
    }

    #[test]
    fn compose_examples() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(p23.compose(&int(&p23, 2), &int(&p23, 3)).unwrap(), int(&p23, 6));

        let f2 = Semigroup::free_monoid(2);
        let ab = SemigroupElement::word("ab");
        let ba = SemigroupElement::word("ba");
        assert_eq!(f2.compose(&ab, &ba).unwrap(), SemigroupElement::word("abba"));

        let signed = Semigroup::integers(&[-1, 2, 3]).unwrap();
        assert_eq!(
            signed.compose(&int(&signed, -1), &int(&signed, -2)).unwrap(),
            int(&signed, 2)
        );
    }

    #[test]
    fn family_mismatch_is_an_error() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        let err = p23.compose(&p23.identity(), &SemigroupElement::word("a")).unwrap_err();
        assert!(matches!(err, AlgebraError::FamilyMismatch { .. }));
        let n3 = SemigroupElement::lattice(0, vec![1, 0, 0]);
        assert!(p23.divides(&n3, &n3).is_err());
    }

    #[test]
    fn right_lcm_examples() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(
            p23.right_lcm(&int(&p23, 2), &int(&p23, 3)).unwrap(),
            RightLcm::Meet {
                r: int(&p23, 6),
                p_comp: int(&p23, 3),
                q_comp: int(&p23, 2)
            }
        );
        assert_eq!(
            p23.right_lcm(&int(&p23, 4), &int(&p23, 6)).unwrap(),
            RightLcm::Meet {
                r: int(&p23, 12),
                p_comp: int(&p23, 3),
                q_comp: int(&p23, 2)
            }
        );

        let f2 = Semigroup::free_monoid(2);
        let a = SemigroupElement::word("a");
        let b = SemigroupElement::word("b");
        let ab = SemigroupElement::word("ab");
        assert_eq!(f2.right_lcm(&a, &b).unwrap(), RightLcm::Disjoint);
        assert_eq!(
            f2.right_lcm(&a, &ab).unwrap(),
            RightLcm::Meet {
                r: ab.clone(),
                p_comp: b.clone(),
                q_comp: f2.identity()
            }
        );
    }

    #[test]
    fn right_lcm_is_unit_normalized() {
        let signed = Semigroup::integers(&[-1, 2, 3]).unwrap();
        match signed.right_lcm(&int(&signed, -2), &int(&signed, 3)).unwrap() {
            RightLcm::Meet { r, p_comp, q_comp } => {
                assert_eq!(r, int(&signed, 6));
                assert_eq!(p_comp, int(&signed, -3));
                assert_eq!(q_comp, int(&signed, 2));
            }
            RightLcm::Disjoint => panic!("abelian ideals always meet"),
        }
    }

    #[test]
    fn divides_examples() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(p23.divides(&int(&p23, 2), &int(&p23, 6)).unwrap(), Some(int(&p23, 3)));
        assert_eq!(p23.divides(&int(&p23, 4), &int(&p23, 6)).unwrap(), None);
        let f2 = Semigroup::free_monoid(2);
        assert_eq!(
            f2.divides(&SemigroupElement::word("ab"), &SemigroupElement::word("a")).unwrap(),
            None
        );
    }

    #[test]
    fn unit_groups() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(shown(&p23, &p23.units()), ["1"]);
        let signed = Semigroup::integers(&[-1, 2, 3]).unwrap();
        assert_eq!(shown(&signed, &signed.units()), ["1", "-1"]);
        let f2 = Semigroup::free_monoid(2);
        assert_eq!(shown(&f2, &f2.units()), ["ε"]);
        for x in signed.enumerate_ball(3) {
            let divides_one = signed.divides(&x, &signed.identity()).unwrap().is_some();
            assert_eq!(divides_one, signed.is_unit(&x));
        }
    }

    #[test]
    fn ball_examples() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(shown(&p23, &p23.enumerate_ball(2)), ["1", "2", "3", "4", "6", "9"]);
        let f2 = Semigroup::free_monoid(2);
        assert_eq!(shown(&f2, &f2.enumerate_ball(1)), ["ε", "a", "b"]);
        let signed = Semigroup::integers(&[-1, 2, 3]).unwrap();
        assert_eq!(shown(&signed, &signed.enumerate_ball(1)), ["1", "-1", "2", "3"]);
        // Lazily enumerated prefix agrees with the ball.
        let lazy: Vec<_> = p23.elements().take(6).collect();
        assert_eq!(lazy, p23.enumerate_ball(2));
        // Finite semigroups end.
        assert_eq!(Semigroup::integers(&[-1]).unwrap().elements().count(), 2);
    }

    #[test]
    fn right_reversibility_examples() {
        let p23 = Semigroup::integers(&[2, 3]).unwrap();
        assert_eq!(
            p23.right_reversibility_witness(&int(&p23, 2), &int(&p23, 3), 3).unwrap(),
            Some((int(&p23, 3), int(&p23, 2)))
        );
        let f2 = Semigroup::free_monoid(2);
        for bound in 0..=6 {
            assert_eq!(
                f2.right_reversibility_witness(&SemigroupElement::word("a"), &SemigroupElement::word("b"), bound)
                    .unwrap(),
                None
            );
        }
        let ab = SemigroupElement::word("ab");
        assert_eq!(
            f2.right_reversibility_witness(&ab, &ab, 2).unwrap(),
            Some((f2.identity(), f2.identity()))
        );
    }

    #[test]
    fn registration_rejects_relations() {
        assert!(Semigroup::integers(&[2, 4]).is_err());
        assert!(Semigroup::integers(&[-2, 2]).is_err());
        assert!(Semigroup::integers(&[0, 3]).is_err());
        assert!(Semigroup::integers(&[-1, -2, 2]).is_err());
        // 4 and 6 are multiplicatively independent.
        assert!(Semigroup::integers(&[4, 6]).is_ok());
        assert!(Semigroup::gaussian(&[Gaussian::new(1, 1), Gaussian::new(2, 0)]).is_err());
        assert!(Semigroup::gaussian(&[Gaussian::new(1, 1), Gaussian::new(2, 1)]).is_ok());
    }

    #[test]
    fn signed_labels_are_normalized() {
        let a = Semigroup::integers(&[-1, -2, 3]).unwrap();
        let b = Semigroup::integers(&[-1, 2, 3]).unwrap();
        assert_eq!(a, b);
        let c = Semigroup::integers(&[-2, 3]).unwrap();
        assert_eq!(c.unit_order(), 1);
        assert_eq!(c.display(&c.generators()[0]), "-2");
        assert_eq!(shown(&c, &c.enumerate_ball(2)), ["1", "-2", "3", "4", "-6", "9"]);
    }

    #[test]
    fn gaussian_values_roundtrip() {
        let sg = Semigroup::gaussian(&[Gaussian::i(), Gaussian::new(1, 1), Gaussian::new(2, 1)]).unwrap();
        for p in sg.enumerate_ball(4) {
            let v = sg.gauss_value(&p).unwrap();
            assert_eq!(sg.from_gauss_value(&v).unwrap(), p);
            assert_eq!(sg.decode(&sg.encode(&p)).unwrap(), p);
        }
        assert!(sg.from_gauss_value(&Gaussian::new(3, 0)).is_err());
    }

    #[test]
    fn integer_values_roundtrip_with_shared_primes() {
        let sg = Semigroup::integers(&[4, 6]).unwrap();
        for p in sg.enumerate_ball(4) {
            let v = sg.int_value(&p).unwrap();
            assert_eq!(sg.from_int_value(&v).unwrap(), p);
        }
        assert!(sg.from_int_value(&BigInt::from(8)).is_err());
    }

    #[test]
    fn parsing() {
        let f2 = Semigroup::free_monoid(2);
        assert_eq!(f2.parse("ab").unwrap(), SemigroupElement::word("ab"));
        assert_eq!(f2.parse("ε").unwrap(), f2.identity());
        assert!(f2.parse("ac").is_err());
        let n2 = Semigroup::free_abelian(2);
        assert_eq!(n2.parse("[1,2]").unwrap(), SemigroupElement::lattice(0, vec![1, 2]));
        assert!(n2.parse("[1]").is_err());
    }

    #[test]
    fn complement_finiteness() {
        let n1 = Semigroup::free_abelian(1);
        let n2 = Semigroup::free_abelian(2);
        let f2 = Semigroup::free_monoid(2);
        assert!(n1.complement_is_finite(&SemigroupElement::lattice(0, vec![3])));
        assert!(!n2.complement_is_finite(&SemigroupElement::lattice(0, vec![1, 0])));
        assert!(n2.complement_is_finite(&n2.identity()));
        assert!(!f2.complement_is_finite(&SemigroupElement::word("a")));
    }
}
