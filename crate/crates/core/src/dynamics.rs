//! Algebraic dynamical systems `(G, P, θ)`: a right LCM semigroup acting on a
//! group by injective endomorphisms that respect the order on `P`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use serde_json::{json, Value};

use crate::error::{mismatch, AlgebraError, Result};
use crate::gaussian::{self, Gaussian};
use crate::group::{display_shift, least_residue, BaseGroup, GroupElement};
use crate::report::Report;
use crate::sample::{Rng, SampleSpec};
use crate::semigroup::{decode_bigint, encode_bigint, Labels, RightLcm, Semigroup, SemigroupElement};

/// How `P` acts on `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// `G = ℤ`, `θ_p(g) = p·g` for `P ⊂ ℤ^×`.
    IntMult,
    /// `G = ℤ[i]`, `θ_p(g) = p·g` for `P ⊂ ℤ[i]^×`.
    GaussMult,
    /// `G = ℤ/n`, `θ_p(g) = p·g mod n`; usually not injective.
    CyclicMult { modulus: u64 },
    /// `G = ⊕_P G₀`, `θ_p(f)(px) = f(x)` and `θ_p(f)` vanishes off `pP`.
    Shift { base: BaseGroup },
    /// `G = {1}`.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicalSystem {
    semigroup: Semigroup,
    action: Action,
}

impl DynamicalSystem {
    /// Registers a system, rejecting it if the sampled axioms fail.
    pub fn new(semigroup: Semigroup, action: Action) -> Result<Self> {
        Self::with_spec(semigroup, action, &SampleSpec::default())
    }

    pub fn with_spec(semigroup: Semigroup, action: Action, spec: &SampleSpec) -> Result<Self> {
        let sys = Self::unverified(semigroup, action)?;
        let report = sys.verify_axioms(spec);
        if report.passed {
            Ok(sys)
        } else {
            let first = report
                .failures
                .first()
                .map(|f| format!("{} fails, witness {}", f.check, f.witness))
                .unwrap_or_default();
            Err(AlgebraError::Registration {
                what: sys.name(),
                reason: first,
                report: Some(Box::new(report)),
            })
        }
    }

    /// Checks only that the action fits the semigroup's family.
    pub fn unverified(semigroup: Semigroup, action: Action) -> Result<Self> {
        let fits = match (&action, semigroup.labels()) {
            (Action::IntMult | Action::CyclicMult { .. }, Some(Labels::Integer(_))) => true,
            (Action::GaussMult, Some(Labels::Gaussian(_))) => true,
            (Action::Shift { .. } | Action::Trivial, _) => true,
            _ => false,
        };
        if !fits {
            return Err(AlgebraError::Registration {
                what: semigroup.name(),
                reason: format!("{action:?} cannot act through this semigroup"),
                report: None,
            });
        }
        if matches!(action, Action::CyclicMult { modulus: 0 } | Action::Shift { base: BaseGroup::Cyclic(0) }) {
            return Err(AlgebraError::Registration {
                what: semigroup.name(),
                reason: "cyclic groups need a positive order".into(),
                report: None,
            });
        }
        Ok(DynamicalSystem { semigroup, action })
    }

    pub fn int_mult(gens: &[i64]) -> Result<Self> {
        Self::new(Semigroup::integers(gens)?, Action::IntMult)
    }

    pub fn gauss_mult(gens: &[Gaussian]) -> Result<Self> {
        Self::new(Semigroup::gaussian(gens)?, Action::GaussMult)
    }

    pub fn shift(base: BaseGroup, semigroup: Semigroup) -> Result<Self> {
        Self::new(semigroup, Action::Shift { base })
    }

    pub fn trivial_group(semigroup: Semigroup) -> Result<Self> {
        Self::new(semigroup, Action::Trivial)
    }

    pub fn semigroup(&self) -> &Semigroup {
        &self.semigroup
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn group_name(&self) -> String {
        match &self.action {
            Action::IntMult => "ℤ".into(),
            Action::GaussMult => "ℤ[i]".into(),
            Action::CyclicMult { modulus } => format!("ℤ/{modulus}"),
            Action::Shift { base } => format!("⊕_{{{}}} {}", self.semigroup.name(), base.name().replace('Z', "ℤ")),
            Action::Trivial => "{1}".into(),
        }
    }

    pub fn name(&self) -> String {
        format!("({}, {})", self.group_name(), self.semigroup.name())
    }

    // ---- group law -------------------------------------------------------

    pub fn identity(&self) -> GroupElement {
        match &self.action {
            Action::IntMult => GroupElement::Int(BigInt::zero()),
            Action::GaussMult => GroupElement::Gauss(Gaussian::zero()),
            Action::CyclicMult { .. } => GroupElement::Residue(0),
            Action::Shift { .. } => GroupElement::Shift(BTreeMap::new()),
            Action::Trivial => GroupElement::Trivial,
        }
    }

    pub fn check_group(&self, g: &GroupElement) -> Result<()> {
        let ok = match (&self.action, g) {
            (Action::IntMult, GroupElement::Int(_)) => true,
            (Action::GaussMult, GroupElement::Gauss(_)) => true,
            (Action::CyclicMult { modulus }, GroupElement::Residue(r)) => r < modulus,
            (Action::Shift { base }, GroupElement::Shift(m)) => {
                for (x, v) in m {
                    self.semigroup.check(x)?;
                    if v.is_zero() || base.reduce(v.clone()) != *v {
                        return Err(AlgebraError::InvalidElement(format!("value {v} is not reduced in {}", base.name())));
                    }
                }
                true
            }
            (Action::Trivial, GroupElement::Trivial) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(mismatch(self.group_name(), g.family()))
        }
    }

    /// The group product `a·b`.
    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.action, a, b) {
            (_, GroupElement::Int(x), GroupElement::Int(y)) => GroupElement::Int(x + y),
            (_, GroupElement::Gauss(x), GroupElement::Gauss(y)) => GroupElement::Gauss(x + y),
            (Action::CyclicMult { modulus }, GroupElement::Residue(x), GroupElement::Residue(y)) => {
                GroupElement::Residue(((*x as u128 + *y as u128) % *modulus as u128) as u64)
            }
            (Action::Shift { base }, GroupElement::Shift(f), GroupElement::Shift(h)) => {
                let mut out = f.clone();
                for (x, v) in h {
                    let w = base.reduce(out.get(x).cloned().unwrap_or_default() + v);
                    if w.is_zero() {
                        out.remove(x);
                    } else {
                        out.insert(x.clone(), w);
                    }
                }
                GroupElement::Shift(out)
            }
            (_, GroupElement::Trivial, GroupElement::Trivial) => GroupElement::Trivial,
            _ => panic!("group elements from different families: {a} and {b}"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (&self.action, a) {
            (_, GroupElement::Int(x)) => GroupElement::Int(-x),
            (_, GroupElement::Gauss(x)) => GroupElement::Gauss(-x),
            (Action::CyclicMult { modulus }, GroupElement::Residue(x)) => GroupElement::Residue((modulus - x) % modulus),
            (Action::Shift { base }, GroupElement::Shift(f)) => {
                GroupElement::Shift(f.iter().map(|(x, v)| (x.clone(), base.reduce(-v))).collect())
            }
            _ => a.clone(),
        }
    }

    /// `a⁻¹·b`.
    pub fn quotient(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.op(&self.inverse(a), b)
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    // ---- the action ------------------------------------------------------

    pub fn apply_endo(&self, p: &SemigroupElement, g: &GroupElement) -> Result<GroupElement> {
        self.semigroup.check(p)?;
        self.check_group(g)?;
        Ok(self.theta(p, g))
    }

    /// `θ_p(g)` on checked inputs.
    pub(crate) fn theta(&self, p: &SemigroupElement, g: &GroupElement) -> GroupElement {
        match (&self.action, g) {
            (Action::IntMult, GroupElement::Int(x)) => GroupElement::Int(self.int_label(p) * x),
            (Action::GaussMult, GroupElement::Gauss(x)) => GroupElement::Gauss(&self.gauss_label(p) * x),
            (Action::CyclicMult { modulus }, GroupElement::Residue(x)) => {
                let m = BigInt::from(*modulus);
                let v = (self.int_label(p) * BigInt::from(*x)).mod_floor(&m);
                GroupElement::Residue(v.to_u64().expect("residue fits"))
            }
            (Action::Shift { .. }, GroupElement::Shift(f)) => GroupElement::Shift(
                f.iter()
                    .map(|(x, v)| (self.semigroup.compose_unchecked(p, x), v.clone()))
                    .collect(),
            ),
            _ => g.clone(),
        }
    }

    fn int_label(&self, p: &SemigroupElement) -> BigInt {
        self.semigroup.int_value(p).expect("integer-labelled semigroup")
    }

    fn gauss_label(&self, p: &SemigroupElement) -> Gaussian {
        self.semigroup.gauss_value(p).expect("Gaussian-labelled semigroup")
    }

    /// The unique `g₀` with `θ_p(g₀) = g`, if `g ∈ θ_p(G)`.
    pub fn preimage(&self, p: &SemigroupElement, g: &GroupElement) -> Result<Option<GroupElement>> {
        self.semigroup.check(p)?;
        self.check_group(g)?;
        Ok(self.theta_pre(p, g))
    }

    pub(crate) fn theta_pre(&self, p: &SemigroupElement, g: &GroupElement) -> Option<GroupElement> {
        match (&self.action, g) {
            (Action::IntMult, GroupElement::Int(x)) => {
                let v = self.int_label(p);
                x.is_multiple_of(&v).then(|| GroupElement::Int(x / v))
            }
            (Action::GaussMult, GroupElement::Gauss(x)) => x.div_exact(&self.gauss_label(p)).map(GroupElement::Gauss),
            (Action::CyclicMult { modulus }, _) => (0..*modulus)
                .map(GroupElement::Residue)
                .find(|k| self.theta(p, k) == *g),
            (Action::Shift { .. }, GroupElement::Shift(f)) => f
                .iter()
                .map(|(x, v)| Some((self.semigroup.divides_unchecked(p, x)?, v.clone())))
                .collect::<Option<BTreeMap<_, _>>>()
                .map(GroupElement::Shift),
            _ => Some(g.clone()),
        }
    }

    // ---- transversals ------------------------------------------------------

    pub fn transversal_is_finite(&self, p: &SemigroupElement) -> bool {
        match &self.action {
            Action::Shift { base } => {
                self.semigroup.is_unit(p) || (base.is_finite() && self.semigroup.complement_is_finite(p))
            }
            _ => true,
        }
    }

    /// The index `[G : θ_p(G)]`, when finite.
    pub fn index(&self, p: &SemigroupElement) -> Option<BigInt> {
        if !self.transversal_is_finite(p) {
            return None;
        }
        match &self.action {
            Action::IntMult => Some(self.int_label(p).abs()),
            Action::GaussMult => Some(self.gauss_label(p).norm()),
            _ => Some(BigInt::from(self.transversal_list(p).len())),
        }
    }

    /// Enumerates the canonical transversal `T_p` of `G/θ_p(G)` without repetition.
    pub fn transversal(&self, p: &SemigroupElement) -> Result<Transversal> {
        self.semigroup.check(p)?;
        Ok(self.transversal_iter(p))
    }

    pub(crate) fn transversal_iter(&self, p: &SemigroupElement) -> Transversal {
        match &self.action {
            Action::Shift { base } => Transversal(TransversalInner::Shift(ShiftTransversal::new(
                &self.semigroup,
                p,
                *base,
            ))),
            _ => Transversal(TransversalInner::Finite(self.transversal_list(p).into_iter())),
        }
    }

    /// All of `T_p`; infinite transversals must be requested by prefix instead.
    pub fn transversal_all(&self, p: &SemigroupElement) -> Result<Vec<GroupElement>> {
        self.semigroup.check(p)?;
        if !self.transversal_is_finite(p) {
            return Err(AlgebraError::TruncationRequired(format!(
                "{} in {}",
                self.semigroup.display(p),
                self.name()
            )));
        }
        Ok(self.transversal_iter(p).collect())
    }

    pub fn transversal_prefix(&self, p: &SemigroupElement, len: usize) -> Result<Vec<GroupElement>> {
        Ok(self.transversal(p)?.take(len).collect())
    }

    fn transversal_list(&self, p: &SemigroupElement) -> Vec<GroupElement> {
        match &self.action {
            Action::IntMult => {
                let n = self.int_label(p).abs();
                num::range(BigInt::zero(), n).map(GroupElement::Int).collect()
            }
            Action::GaussMult => {
                let hnf = GaussHnf::new(&self.gauss_label(p));
                let mut out = Vec::new();
                for y in num::range(BigInt::zero(), hnf.height.clone()) {
                    for x in num::range(BigInt::zero(), hnf.width.clone()) {
                        out.push(GroupElement::Gauss(Gaussian { re: x.clone(), im: y.clone() }));
                    }
                }
                out
            }
            Action::CyclicMult { modulus } => {
                let mut reps: Vec<GroupElement> = Vec::new();
                for r in 0..*modulus {
                    let g = GroupElement::Residue(r);
                    if reps.iter().all(|t| self.theta_pre(p, &self.quotient(t, &g)).is_none()) {
                        reps.push(g);
                    }
                }
                reps
            }
            Action::Shift { .. } => self.transversal_iter(p).collect(),
            Action::Trivial => vec![GroupElement::Trivial],
        }
    }

    /// The unique `(t, k)` with `t ∈ T_p` and `g = t·θ_p(k)`.
    pub fn canon_rep(&self, p: &SemigroupElement, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        self.semigroup.check(p)?;
        self.check_group(g)?;
        Ok(self.canon(p, g))
    }

    pub(crate) fn canon(&self, p: &SemigroupElement, g: &GroupElement) -> (GroupElement, GroupElement) {
        match (&self.action, g) {
            (Action::IntMult, GroupElement::Int(x)) => {
                let v = self.int_label(p);
                let t = least_residue(x, &v);
                let k = (x - &t) / v;
                (GroupElement::Int(t), GroupElement::Int(k))
            }
            (Action::GaussMult, GroupElement::Gauss(z)) => {
                let pi = self.gauss_label(p);
                let t = GaussHnf::new(&pi).reduce(z);
                let k = (z - &t).div_exact(&pi).expect("reduction stays in the coset");
                (GroupElement::Gauss(t), GroupElement::Gauss(k))
            }
            (Action::CyclicMult { .. }, _) => {
                for t in self.transversal_list(p) {
                    if let Some(k) = self.theta_pre(p, &self.quotient(&t, g)) {
                        return (t, k);
                    }
                }
                unreachable!("transversal covers every coset")
            }
            (Action::Shift { .. }, GroupElement::Shift(f)) => {
                let mut t = BTreeMap::new();
                let mut k = BTreeMap::new();
                for (x, v) in f {
                    match self.semigroup.divides_unchecked(p, x) {
                        Some(y) => k.insert(y, v.clone()),
                        None => t.insert(x.clone(), v.clone()),
                    };
                }
                (GroupElement::Shift(t), GroupElement::Shift(k))
            }
            _ => (GroupElement::Trivial, GroupElement::Trivial),
        }
    }

    // ---- double factorization -------------------------------------------

    /// `(k, ℓ)` with `x = θ_p(k)·θ_q(ℓ)⁻¹`, or `None` if `x ∉ θ_p(G)θ_q(G)`.
    ///
    /// When `pP ∩ qP = rP` with `pp′ = qq′ = r`, the returned `ℓ` lies in `T_{q′}`.
    pub fn solve_double(
        &self,
        p: &SemigroupElement,
        q: &SemigroupElement,
        x: &GroupElement,
    ) -> Result<Option<(GroupElement, GroupElement)>> {
        self.semigroup.check(p)?;
        self.semigroup.check(q)?;
        self.check_group(x)?;
        Ok(self.solve(p, q, x))
    }

    /// Any solution, as produced by the per-family algorithm before normalization.
    pub fn solve_double_raw(
        &self,
        p: &SemigroupElement,
        q: &SemigroupElement,
        x: &GroupElement,
    ) -> Result<Option<(GroupElement, GroupElement)>> {
        self.semigroup.check(p)?;
        self.semigroup.check(q)?;
        self.check_group(x)?;
        Ok(self.solve_raw(p, q, x))
    }

    pub(crate) fn solve(
        &self,
        p: &SemigroupElement,
        q: &SemigroupElement,
        x: &GroupElement,
    ) -> Option<(GroupElement, GroupElement)> {
        let (k, l) = self.solve_raw(p, q, x)?;
        match self.semigroup.right_lcm(p, q).expect("checked elements") {
            RightLcm::Meet { p_comp, q_comp, .. } => {
                let (t, m) = self.canon(&q_comp, &l);
                let k = self.op(&k, &self.inverse(&self.theta(&p_comp, &m)));
                Some((k, t))
            }
            RightLcm::Disjoint => Some((k, l)),
        }
    }

    fn solve_raw(
        &self,
        p: &SemigroupElement,
        q: &SemigroupElement,
        x: &GroupElement,
    ) -> Option<(GroupElement, GroupElement)> {
        match (&self.action, x) {
            (Action::IntMult, GroupElement::Int(x)) => {
                let a = self.int_label(p);
                let b = self.int_label(q);
                let e = a.extended_gcd(&b);
                if !x.is_multiple_of(&e.gcd) {
                    return None;
                }
                let m = x / &e.gcd;
                Some((GroupElement::Int(&e.x * &m), GroupElement::Int(-(&e.y * &m))))
            }
            (Action::GaussMult, GroupElement::Gauss(x)) => {
                let (d, s, t) = gaussian::ext_gcd(&self.gauss_label(p), &self.gauss_label(q));
                let m = x.div_exact(&d)?;
                Some((GroupElement::Gauss(&s * &m), GroupElement::Gauss(-(&t * &m))))
            }
            (Action::CyclicMult { modulus }, _) => {
                for k in (0..*modulus).map(GroupElement::Residue) {
                    let pk = self.theta(p, &k);
                    for l in (0..*modulus).map(GroupElement::Residue) {
                        if self.op(&pk, &self.inverse(&self.theta(q, &l))) == *x {
                            return Some((k, l));
                        }
                    }
                }
                None
            }
            (Action::Shift { base }, GroupElement::Shift(f)) => {
                let mut k = BTreeMap::new();
                let mut l = BTreeMap::new();
                for (pos, v) in f {
                    if let Some(y) = self.semigroup.divides_unchecked(p, pos) {
                        k.insert(y, v.clone());
                    } else {
                        let z = self.semigroup.divides_unchecked(q, pos)?;
                        l.insert(z, base.reduce(-v));
                    }
                }
                Some((GroupElement::Shift(k), GroupElement::Shift(l)))
            }
            _ => Some((GroupElement::Trivial, GroupElement::Trivial)),
        }
    }

    // ---- sampling ------------------------------------------------------------

    /// Deterministic small elements first, then seeded random ones; no repeats.
    pub fn sample_group(&self, rng: &mut Rng, count: usize) -> Vec<GroupElement> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |g: GroupElement, out: &mut Vec<GroupElement>| {
            if out.len() < count && seen.insert(g.clone()) {
                out.push(g);
            }
        };
        match &self.action {
            Action::IntMult => {
                push(GroupElement::int(0), &mut out);
                for i in 1..=10 {
                    push(GroupElement::int(i), &mut out);
                    push(GroupElement::int(-i), &mut out);
                }
            }
            Action::GaussMult => {
                for r in 0..=2i64 {
                    for a in -r..=r {
                        for b in -r..=r {
                            if a.abs().max(b.abs()) == r {
                                push(GroupElement::gauss(a, b), &mut out);
                            }
                        }
                    }
                }
            }
            Action::CyclicMult { modulus } => {
                for r in 0..*modulus {
                    push(GroupElement::Residue(r), &mut out);
                }
            }
            Action::Shift { base } => {
                push(self.identity(), &mut out);
                for x in self.semigroup.enumerate_ball(2) {
                    for i in 0..2 {
                        if let Some(v) = base.nonzero(i) {
                            push(GroupElement::Shift(BTreeMap::from([(x.clone(), v)])), &mut out);
                        }
                    }
                }
            }
            Action::Trivial => push(GroupElement::Trivial, &mut out),
        }
        let positions = match &self.action {
            Action::Shift { .. } => self.semigroup.enumerate_ball(3),
            _ => Vec::new(),
        };
        let mut attempts = 0;
        while out.len() < count && attempts < 20 * count + 100 {
            attempts += 1;
            let g = match &self.action {
                Action::IntMult => GroupElement::int(rng.gen_range(-200..=200)),
                Action::GaussMult => GroupElement::gauss(rng.gen_range(-30..=30), rng.gen_range(-30..=30)),
                Action::CyclicMult { modulus } => GroupElement::Residue(rng.gen_range(0..*modulus)),
                Action::Shift { base } => {
                    let mut g = self.identity();
                    for _ in 0..rng.gen_range(1..=3) {
                        let x = positions[rng.gen_range(0..positions.len())].clone();
                        let v = base.nonzero(rng.gen_range(0..4)).unwrap_or_else(BigInt::one);
                        g = self.op(&g, &GroupElement::Shift(BTreeMap::from([(x, base.reduce(v))])));
                    }
                    g
                }
                Action::Trivial => break,
            };
            push(g, &mut out);
        }
        out
    }

    // ---- verification --------------------------------------------------------

    /// Samples the defining axioms: action law, injectivity of each `θ_p`, and
    /// `θ_p(G) ∩ θ_q(G) = θ_r(G)` whenever `pP ∩ qP = rP`.
    pub fn verify_axioms(&self, spec: &SampleSpec) -> Report {
        let mut report = Report::new("dynamics", json!({"system": self.name(), "sample": spec.to_json()}));
        let ball = self.semigroup.enumerate_ball(spec.p_ball);
        let gs = self.sample_group(&mut spec.rng_for("dynamics"), spec.g_samples);
        let sg = &self.semigroup;

        {
            let mut t = report.begin("endomorphism");
            for p in &ball {
                for (i, g) in gs.iter().enumerate() {
                    let h = &gs[(i * 7 + 3) % gs.len()];
                    let lhs = self.theta(p, &self.op(g, h));
                    let rhs = self.op(&self.theta(p, g), &self.theta(p, h));
                    t.record(
                        lhs == rhs,
                        || json!({"lhs": self.encode_group(&lhs), "rhs": self.encode_group(&rhs)}),
                        || json!({"p": sg.encode(p), "g": self.encode_group(g), "h": self.encode_group(h)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("action-law");
            for p in &ball {
                for q in &ball {
                    let pq = sg.compose_unchecked(p, q);
                    for g in &gs {
                        let lhs = self.theta(p, &self.theta(q, g));
                        let rhs = self.theta(&pq, g);
                        t.record(
                            lhs == rhs,
                            || json!({"lhs": self.encode_group(&lhs), "rhs": self.encode_group(&rhs)}),
                            || json!({"p": sg.encode(p), "q": sg.encode(q), "g": self.encode_group(g)}),
                        );
                    }
                }
            }
        }
        {
            let mut t = report.begin("injectivity");
            for p in &ball {
                for g in &gs {
                    if self.is_identity(g) {
                        continue;
                    }
                    let image = self.theta(p, g);
                    t.record(
                        !self.is_identity(&image),
                        || json!({"g": self.encode_group(g), "image": self.encode_group(&image)}),
                        || json!({"p": sg.encode(p)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("order");
            for p in &ball {
                for q in &ball {
                    let RightLcm::Meet { r, .. } = sg.right_lcm(p, q).expect("ball elements") else {
                        continue;
                    };
                    for h in &gs {
                        // θ_p(G) ∩ θ_q(G) ⊆ θ_r(G), probed from inside θ_p(G).
                        let g = self.theta(p, h);
                        if self.theta_pre(q, &g).is_some() {
                            let ok = self.theta_pre(&r, &g).is_some();
                            t.record(
                                ok,
                                || json!({"g": self.encode_group(&g), "r": sg.encode(&r)}),
                                || json!({"p": sg.encode(p), "q": sg.encode(q)}),
                            );
                        }
                        // θ_r(G) ⊆ θ_p(G) ∩ θ_q(G).
                        let g = self.theta(&r, h);
                        let ok = self.theta_pre(p, &g).is_some() && self.theta_pre(q, &g).is_some();
                        t.record(
                            ok,
                            || json!({"g": self.encode_group(&g), "r": sg.encode(&r)}),
                            || json!({"p": sg.encode(p), "q": sg.encode(q)}),
                        );
                    }
                }
            }
        }
        report
    }

    // ---- encoding --------------------------------------------------------------

    pub fn encode_group(&self, g: &GroupElement) -> Value {
        match g {
            GroupElement::Int(v) => encode_bigint(v),
            GroupElement::Gauss(z) => Value::String(z.to_string()),
            GroupElement::Residue(r) => json!(r),
            GroupElement::Shift(f) => Value::Array(
                f.iter()
                    .map(|(x, v)| json!([self.semigroup.encode(x), encode_bigint(v)]))
                    .collect(),
            ),
            GroupElement::Trivial => json!(1),
        }
    }

    pub fn decode_group(&self, v: &Value) -> Result<GroupElement> {
        let bad = || AlgebraError::Parse(format!("cannot read {v} as an element of {}", self.group_name()));
        let g = match &self.action {
            Action::IntMult => GroupElement::Int(decode_bigint(v)?),
            Action::GaussMult => match v {
                Value::String(s) => GroupElement::Gauss(s.parse()?),
                Value::Number(_) => GroupElement::Gauss(Gaussian {
                    re: decode_bigint(v)?,
                    im: BigInt::zero(),
                }),
                Value::Array(a) if a.len() == 2 => GroupElement::Gauss(Gaussian {
                    re: decode_bigint(&a[0])?,
                    im: decode_bigint(&a[1])?,
                }),
                _ => return Err(bad()),
            },
            Action::CyclicMult { modulus } => {
                let r = decode_bigint(v)?.mod_floor(&BigInt::from(*modulus));
                GroupElement::Residue(r.to_u64().ok_or_else(bad)?)
            }
            Action::Shift { base } => {
                let Value::Array(entries) = v else { return Err(bad()) };
                let mut g = self.identity();
                for e in entries {
                    let Value::Array(pair) = e else { return Err(bad()) };
                    if pair.len() != 2 {
                        return Err(bad());
                    }
                    let x = self.semigroup.decode(&pair[0])?;
                    let val = base.reduce(decode_bigint(&pair[1])?);
                    g = self.op(&g, &GroupElement::Shift(BTreeMap::from([(x, val)])));
                }
                g
            }
            Action::Trivial => match v {
                Value::Null => GroupElement::Trivial,
                Value::Number(n) if n.as_i64() == Some(0) || n.as_i64() == Some(1) => GroupElement::Trivial,
                Value::String(s) if s == "1" || s == "e" => GroupElement::Trivial,
                _ => return Err(bad()),
            },
        };
        self.check_group(&g)?;
        Ok(g)
    }

    /// Reads a group element from command-line text.
    pub fn parse_group(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let v = match &self.action {
            Action::GaussMult => Value::String(s.to_string()),
            _ => serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string())),
        };
        self.decode_group(&v)
    }

    pub fn display_group(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Shift(f) => display_shift(f, |x| self.semigroup.display(x)),
            _ => g.to_string(),
        }
    }
}

impl fmt::Display for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Hermite normal form of the ideal `πℤ[i]`, spanned by `step` and `width`.
/// The box `[0, width) × [0, height)` is a transversal.
struct GaussHnf {
    width: BigInt,
    height: BigInt,
    /// Lattice vector with imaginary part `height`.
    step: Gaussian,
}

impl GaussHnf {
    fn new(pi: &Gaussian) -> Self {
        let n = pi.norm();
        let e = pi.im.extended_gcd(&pi.re);
        let height = e.gcd.abs();
        let mut step = pi * &Gaussian { re: e.x.clone(), im: e.y.clone() };
        if step.im.is_negative() {
            step = -step;
        }
        GaussHnf {
            width: &n / &height,
            height,
            step,
        }
    }

    fn reduce(&self, z: &Gaussian) -> Gaussian {
        let q = z.im.div_floor(&self.height);
        let shift = Gaussian {
            re: &self.step.re * &q,
            im: &self.step.im * &q,
        };
        let w = z - &shift;
        Gaussian {
            re: w.re.mod_floor(&self.width),
            im: w.im,
        }
    }
}

/// A lazily enumerated transversal.
pub struct Transversal(TransversalInner);

enum TransversalInner {
    Finite(std::vec::IntoIter<GroupElement>),
    Shift(ShiftTransversal),
}

impl Iterator for Transversal {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        match &mut self.0 {
            TransversalInner::Finite(it) => it.next(),
            TransversalInner::Shift(it) => it.next(),
        }
    }
}

/// Functions supported on `P ∖ pP`, enumerated in stages: stage `n` adds the
/// functions that use only the first `n` positions and the first `n` nonzero
/// values of `G₀`, ordered by support size, then positions, then values.
struct ShiftTransversal {
    source: Box<dyn Iterator<Item = SemigroupElement> + Send>,
    positions: Vec<SemigroupElement>,
    base: BaseGroup,
    stage: usize,
    pending: VecDeque<GroupElement>,
    done: bool,
}

impl ShiftTransversal {
    fn new(sg: &Semigroup, p: &SemigroupElement, base: BaseGroup) -> Self {
        let owned = sg.clone();
        let p = p.clone();
        let source: Box<dyn Iterator<Item = SemigroupElement> + Send> = if sg.complement_is_finite(&p) {
            let radius = match &p {
                SemigroupElement::Lattice { exps, .. } => exps.iter().sum::<u32>() as usize + sg.unit_order(),
                SemigroupElement::Word(w) => w.len(),
            };
            let list: Vec<_> = sg
                .enumerate_ball(radius)
                .into_iter()
                .filter(|x| owned.divides_unchecked(&p, x).is_none())
                .collect();
            Box::new(list.into_iter())
        } else {
            Box::new(sg.elements().filter(move |x| owned.divides_unchecked(&p, x).is_none()))
        };
        ShiftTransversal {
            source,
            positions: Vec::new(),
            base,
            stage: 0,
            pending: VecDeque::new(),
            done: false,
        }
    }

    fn values_available(&self, n: usize) -> usize {
        match self.base {
            BaseGroup::Cyclic(m) => n.min(m.saturating_sub(1) as usize),
            BaseGroup::Integers => n,
        }
    }

    fn advance(&mut self) {
        if self.stage == 0 {
            self.pending.push_back(GroupElement::Shift(BTreeMap::new()));
            self.stage = 1;
            return;
        }
        let n = self.stage;
        while self.positions.len() < n {
            match self.source.next() {
                Some(x) => self.positions.push(x),
                None => break,
            }
        }
        let pos_now = self.positions.len().min(n);
        let pos_prev = self.positions.len().min(n - 1);
        let val_now = self.values_available(n);
        let val_prev = self.values_available(n - 1);
        if pos_now == 0 || (pos_now == pos_prev && val_now == val_prev) {
            self.done = true;
            return;
        }
        for size in 1..=pos_now {
            for support in combinations(pos_now, size) {
                for vals in tuples(val_now, size) {
                    let fresh = support.iter().any(|i| *i >= pos_prev) || vals.iter().any(|v| *v >= val_prev);
                    if !fresh {
                        continue;
                    }
                    let f = support
                        .iter()
                        .zip(&vals)
                        .map(|(i, v)| {
                            let value = self.base.nonzero(*v).expect("value index in range");
                            (self.positions[*i].clone(), self.base.reduce(value))
                        })
                        .collect();
                    self.pending.push_back(GroupElement::Shift(f));
                }
            }
        }
        self.stage += 1;
    }
}

impl Iterator for ShiftTransversal {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        loop {
            if let Some(g) = self.pending.pop_front() {
                return Some(g);
            }
            if self.done {
                return None;
            }
            self.advance();
        }
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All `k`-tuples over `0..n` in lexicographic order.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z23() -> DynamicalSystem {
        DynamicalSystem::int_mult(&[2, 3]).unwrap()
    }

    fn el(sys: &DynamicalSystem, v: i64) -> SemigroupElement {
        sys.semigroup().from_int_value(&BigInt::from(v)).unwrap()
    }

    fn int(v: i64) -> GroupElement {
        GroupElement::int(v)
    }

    fn shift_n() -> DynamicalSystem {
        DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_abelian(1)).unwrap()
    }

    fn n(e: u32) -> SemigroupElement {
        SemigroupElement::lattice(0, vec![e])
    }

    fn delta(positions: &[u32]) -> GroupElement {
        GroupElement::Shift(positions.iter().map(|e| (n(*e), BigInt::one())).collect())
    }

    #[test]
    fn apply_endo_examples() {
        let sys = z23();
        assert_eq!(sys.apply_endo(&el(&sys, 2), &int(5)).unwrap(), int(10));
        let g = DynamicalSystem::gauss_mult(&[Gaussian::new(1, 1), Gaussian::new(2, 1)]).unwrap();
        let p = g.semigroup().from_gauss_value(&Gaussian::new(1, 1)).unwrap();
        assert_eq!(g.apply_endo(&p, &GroupElement::gauss(1, 0)).unwrap(), GroupElement::gauss(1, 1));
        let s = shift_n();
        assert_eq!(s.apply_endo(&n(1), &delta(&[0])).unwrap(), delta(&[1]));
    }

    #[test]
    fn preimage_examples() {
        let sys = z23();
        assert_eq!(sys.preimage(&el(&sys, 2), &int(10)).unwrap(), Some(int(5)));
        assert_eq!(sys.preimage(&el(&sys, 2), &int(5)).unwrap(), None);
        assert_eq!(sys.preimage(&el(&sys, 6), &int(12)).unwrap(), Some(int(2)));
    }

    #[test]
    fn transversal_examples() {
        let sys = z23();
        assert_eq!(sys.transversal_all(&el(&sys, 2)).unwrap(), vec![int(0), int(1)]);
        assert_eq!(sys.canon_rep(&el(&sys, 2), &int(7)).unwrap(), (int(1), int(3)));
        assert_eq!(sys.canon_rep(&el(&sys, 6), &int(-1)).unwrap(), (int(5), int(-1)));

        let s = shift_n();
        assert_eq!(s.transversal_all(&n(1)).unwrap(), vec![delta(&[]), delta(&[0])]);
        assert_eq!(s.canon_rep(&n(1), &delta(&[0, 2])).unwrap(), (delta(&[0]), delta(&[1])));
    }

    #[test]
    fn signed_transversals_use_absolute_values() {
        let sys = DynamicalSystem::int_mult(&[-2, 3]).unwrap();
        let p = el(&sys, -2);
        assert_eq!(sys.transversal_all(&p).unwrap(), vec![int(0), int(1)]);
        let (t, k) = sys.canon_rep(&p, &int(7)).unwrap();
        assert_eq!((t, k), (int(1), int(-3)));
    }

    #[test]
    fn infinite_transversals_need_truncation() {
        let s = DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_abelian(2)).unwrap();
        let p = SemigroupElement::lattice(0, vec![1, 0]);
        assert!(!s.transversal_is_finite(&p));
        assert!(matches!(s.transversal_all(&p), Err(AlgebraError::TruncationRequired(_))));
        let prefix = s.transversal_prefix(&p, 20).unwrap();
        assert_eq!(prefix.len(), 20);
        let distinct: BTreeSet<_> = prefix.iter().collect();
        assert_eq!(distinct.len(), 20);
    }

    #[test]
    fn gaussian_transversal_has_norm_many_classes() {
        let sys = DynamicalSystem::gauss_mult(&[Gaussian::new(1, 1), Gaussian::new(2, 1)]).unwrap();
        for p in sys.semigroup().enumerate_ball(3) {
            let t = sys.transversal_all(&p).unwrap();
            assert_eq!(BigInt::from(t.len()), sys.semigroup().gauss_value(&p).unwrap().norm());
            for (i, a) in t.iter().enumerate() {
                for b in &t[i + 1..] {
                    assert!(sys.preimage(&p, &sys.quotient(a, b)).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn solve_double_examples() {
        let sys = z23();
        assert_eq!(
            sys.solve_double(&el(&sys, 2), &el(&sys, 3), &int(3)).unwrap(),
            Some((int(3), int(1)))
        );
        assert_eq!(
            sys.solve_double(&el(&sys, 2), &el(&sys, 3), &int(-1)).unwrap(),
            Some((int(1), int(1)))
        );
        assert_eq!(
            sys.solve_double(&el(&sys, 3), &el(&sys, 2), &int(0)).unwrap(),
            Some((int(0), int(0)))
        );
        let z2 = DynamicalSystem::int_mult(&[2]).unwrap();
        let two = el(&z2, 2);
        let four = el(&z2, 4);
        assert_eq!(z2.solve_double(&two, &four, &int(1)).unwrap(), None);
    }

    #[test]
    fn shift_solve_requires_covered_support() {
        let s = DynamicalSystem::shift(BaseGroup::Cyclic(2), Semigroup::free_monoid(2)).unwrap();
        let a = SemigroupElement::word("a");
        let b = SemigroupElement::word("b");
        let x = GroupElement::point_mass(SemigroupElement::word("ab"), 1);
        let (k, l) = s.solve_double(&a, &b, &x).unwrap().unwrap();
        assert_eq!(s.quotient(&s.theta(&b, &l), &s.theta(&a, &k)), x);
        let y = GroupElement::point_mass(s.semigroup().identity(), 1);
        assert_eq!(s.solve_double(&a, &b, &y).unwrap(), None);
    }

    #[test]
    fn axioms_hold_for_built_ins() {
        let spec = SampleSpec::default();
        assert!(z23().verify_axioms(&spec).passed);
        assert!(shift_n().verify_axioms(&spec).passed);
    }

    #[test]
    fn non_injective_action_is_reported() {
        let sys = DynamicalSystem::unverified(Semigroup::integers(&[2]).unwrap(), Action::CyclicMult { modulus: 4 })
            .unwrap();
        let report = sys.verify_axioms(&SampleSpec::default());
        assert!(!report.passed);
        let f = report.failures_of("injectivity").next().unwrap();
        assert_eq!(f.witness, json!({"g": 2, "image": 0}));
        assert_eq!(f.inputs, json!({"p": 2}));
    }

    #[test]
    fn order_violation_is_reported() {
        let err = DynamicalSystem::int_mult(&[4, 6]).unwrap_err();
        let AlgebraError::Registration { report: Some(report), .. } = err else {
            panic!("expected a registration report")
        };
        let f = report.failures_of("order").next().unwrap();
        assert_eq!(f.witness, json!({"g": 12, "r": 24}));
        assert_eq!(f.inputs, json!({"p": 4, "q": 6}));
    }

    #[test]
    fn incompatible_actions_are_rejected() {
        assert!(DynamicalSystem::unverified(Semigroup::free_monoid(2), Action::IntMult).is_err());
        assert!(DynamicalSystem::unverified(Semigroup::integers(&[2]).unwrap(), Action::GaussMult).is_err());
    }

    #[test]
    fn group_json_roundtrip() {
        let s = DynamicalSystem::shift(BaseGroup::Integers, Semigroup::free_monoid(2)).unwrap();
        let g = s.op(
            &GroupElement::point_mass(SemigroupElement::word("ab"), -3),
            &GroupElement::point_mass(s.semigroup().identity(), 2),
        );
        assert_eq!(s.decode_group(&s.encode_group(&g)).unwrap(), g);
        assert_eq!(s.parse_group(r#"[["ab",-3],["",2]]"#).unwrap(), g);
        let gauss = DynamicalSystem::gauss_mult(&[Gaussian::new(1, 1)]).unwrap();
        assert_eq!(gauss.parse_group("2-i").unwrap(), GroupElement::gauss(2, -1));
    }
}
