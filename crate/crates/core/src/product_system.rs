//! The product system `M = (M_p)_{p∈P}` over `C*(G)`: fibres `M_p` completed from
//! `C*(G)` under `⟨a,b⟩_p = L_p(a*b)`, their fibre multiplication, rank-one
//! operators, the maps `ι_p^r`, and the Fock representation.
//!
//! Operators are only ever applied to vectors. Each basis vector `π_p(δ_g)` is
//! sent to a single basis vector or to zero, so every identity is checked exactly.

use std::collections::BTreeMap;

use num::Zero;
use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::dynamics::{DynamicalSystem, Transversal};
use crate::error::{mismatch, AlgebraError, Result};
use crate::group::GroupElement;
use crate::report::Report;
use crate::sample::{Rng, SampleSpec};
use crate::scalar::{self, Scalar};
use crate::semigroup::{RightLcm, SemigroupElement};

/// A finite combination `Σ c_g δ_g` in `ℂ[G]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    terms: BTreeMap<GroupElement, Scalar>,
}

impl GroupAlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn delta(g: GroupElement) -> Self {
        Self::term(scalar::one(), g)
    }

    pub fn term(c: Scalar, g: GroupElement) -> Self {
        let mut a = Self::zero();
        a.push(c, g);
        a
    }

    pub(crate) fn push(&mut self, c: Scalar, g: GroupElement) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&g) {
            Some(v) => v + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&g);
        } else {
            self.terms.insert(g, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_else(scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.push(c.clone(), g.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (g, d) in &self.terms {
            out.push(c * d, g.clone());
        }
        out
    }

    fn single(&self) -> Option<(&GroupElement, &Scalar)> {
        match self.terms.len() {
            1 => self.terms.iter().next(),
            _ => None,
        }
    }
}

/// `Σ c_g π_p(δ_g)` in the fibre `M_p`. Distinct keys are linearly independent,
/// so the stored form is already a normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreVector {
    pub fibre: SemigroupElement,
    pub coeffs: GroupAlgebraElement,
}

impl FibreVector {
    pub fn zero(fibre: SemigroupElement) -> Self {
        FibreVector {
            fibre,
            coeffs: GroupAlgebraElement::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn add(&self, other: &FibreVector) -> Result<FibreVector> {
        same_fibre(self, other)?;
        Ok(FibreVector {
            fibre: self.fibre.clone(),
            coeffs: self.coeffs.add(&other.coeffs),
        })
    }

    pub fn scale(&self, c: &Scalar) -> FibreVector {
        FibreVector {
            fibre: self.fibre.clone(),
            coeffs: self.coeffs.scale(c),
        }
    }
}

fn same_fibre(a: &FibreVector, b: &FibreVector) -> Result<()> {
    if a.fibre == b.fibre {
        Ok(())
    } else {
        Err(mismatch(format!("fibre {:?}", a.fibre), format!("fibre {:?}", b.fibre)))
    }
}

/// `Θ_{ξ,η}: μ ↦ ξ·⟨η,μ⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOne {
    pub xi: FibreVector,
    pub eta: FibreVector,
}

impl RankOne {
    pub fn fibre(&self) -> &SemigroupElement {
        &self.xi.fibre
    }
}

/// A finitely supported vector of the Fock module `⊕_w M_w`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    components: BTreeMap<SemigroupElement, GroupAlgebraElement>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `π_w(δ_x)`.
    pub fn basis(w: SemigroupElement, x: GroupElement) -> Self {
        let mut v = Self::zero();
        v.push(scalar::one(), w, x);
        v
    }

    pub fn from_fibre(xi: &FibreVector) -> Self {
        let mut v = Self::zero();
        for (x, c) in xi.coeffs.terms() {
            v.push(c.clone(), xi.fibre.clone(), x.clone());
        }
        v
    }

    fn push(&mut self, c: Scalar, w: SemigroupElement, x: GroupElement) {
        let slot = self.components.entry(w.clone()).or_default();
        slot.push(c, x);
        if slot.is_zero() {
            self.components.remove(&w);
        }
    }

    pub fn component(&self, w: &SemigroupElement) -> FibreVector {
        FibreVector {
            fibre: w.clone(),
            coeffs: self.components.get(w).cloned().unwrap_or_default(),
        }
    }

    /// `(w, x, c)` for every nonzero coefficient of `π_w(δ_x)`.
    pub fn terms(&self) -> impl Iterator<Item = (&SemigroupElement, &GroupElement, &Scalar)> {
        self.components
            .iter()
            .flat_map(|(w, a)| a.terms().map(move |(x, c)| (w, x, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (w, x, c) in other.terms() {
            out.push(c.clone(), w.clone(), x.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FockVector {
        let mut out = FockVector::zero();
        for (w, x, d) in self.terms() {
            out.push(c * d, w.clone(), x.clone());
        }
        out
    }
}

/// Enumerates `{t·θ_p(t′) : t ∈ T_p, t′ ∈ T_q}`: nested with `t` outermost when
/// both transversals are finite, along anti-diagonals otherwise.
pub struct ComposedTransversal<'a> {
    sys: &'a DynamicalSystem,
    p: SemigroupElement,
    left: Source,
    right: Source,
    nested: bool,
    diagonal: usize,
    step: usize,
}

struct Source {
    iter: Transversal,
    seen: Vec<GroupElement>,
    done: bool,
}

impl Source {
    fn get(&mut self, i: usize) -> Option<GroupElement> {
        while !self.done && self.seen.len() <= i {
            match self.iter.next() {
                Some(g) => self.seen.push(g),
                None => self.done = true,
            }
        }
        self.seen.get(i).cloned()
    }
}

impl Iterator for ComposedTransversal<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        if self.nested {
            let width = self.right.seen.len();
            let (i, j) = (self.step / width, self.step % width);
            self.step += 1;
            let t = self.left.get(i)?;
            return Some(self.sys.op(&t, &self.sys.theta(&self.p, &self.right.seen[j])));
        }
        loop {
            let (i, j) = (self.step, self.diagonal - self.step);
            if self.step == self.diagonal {
                self.diagonal += 1;
                self.step = 0;
            } else {
                self.step += 1;
            }
            if let (Some(t), Some(u)) = (self.left.get(i), self.right.get(j)) {
                return Some(self.sys.op(&t, &self.sys.theta(&self.p, &u)));
            }
            if self.left.done && self.right.done && self.diagonal > self.left.seen.len() + self.right.seen.len() {
                return None;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProductSystem<'a> {
    sys: &'a DynamicalSystem,
}

impl<'a> ProductSystem<'a> {
    pub fn new(sys: &'a DynamicalSystem) -> Self {
        ProductSystem { sys }
    }

    pub fn system(&self) -> &'a DynamicalSystem {
        self.sys
    }

    /// `π_p(δ_g)`.
    pub fn basis(&self, p: &SemigroupElement, g: &GroupElement) -> FibreVector {
        FibreVector {
            fibre: p.clone(),
            coeffs: GroupAlgebraElement::delta(g.clone()),
        }
    }

    /// `ℰ_{g,p} = Θ_{π_p(δ_g), π_p(δ_g)}`.
    pub fn projection(&self, g: &GroupElement, p: &SemigroupElement) -> RankOne {
        let v = self.basis(p, g);
        RankOne { xi: v.clone(), eta: v }
    }

    /// `⟨π_p(δ_g), π_p(δ_h)⟩ = δ_k` when `g⁻¹h = θ_p(k)`, and `0` otherwise;
    /// conjugate-linear in the first slot.
    pub fn inner_product(&self, xi: &FibreVector, eta: &FibreVector) -> Result<GroupAlgebraElement> {
        same_fibre(xi, eta)?;
        let mut out = GroupAlgebraElement::zero();
        for (g, a) in xi.coeffs.terms() {
            for (h, b) in eta.coeffs.terms() {
                if let Some(k) = self.sys.theta_pre(&xi.fibre, &self.sys.quotient(g, h)) {
                    out.push(a.conj() * b, k);
                }
            }
        }
        Ok(out)
    }

    /// `π_p(δ_g)·π_q(δ_h) = π_{pq}(δ_{gθ_p(h)})`.
    pub fn fibre_mult(&self, xi: &FibreVector, eta: &FibreVector) -> FibreVector {
        let mut out = FibreVector::zero(self.sys.semigroup().compose_unchecked(&xi.fibre, &eta.fibre));
        for (g, a) in xi.coeffs.terms() {
            for (h, b) in eta.coeffs.terms() {
                out.coeffs.push(a * b, self.sys.op(g, &self.sys.theta(&xi.fibre, h)));
            }
        }
        out
    }

    /// `δ_g·π_p(δ_h) = π_p(δ_{gh})`.
    pub fn left_action(&self, a: &GroupAlgebraElement, xi: &FibreVector) -> FibreVector {
        let mut out = FibreVector::zero(xi.fibre.clone());
        for (g, c) in a.terms() {
            for (h, d) in xi.coeffs.terms() {
                out.coeffs.push(c * d, self.sys.op(g, h));
            }
        }
        out
    }

    /// `π_p(δ_g)·δ_k = π_p(δ_{gθ_p(k)})`.
    pub fn right_action(&self, xi: &FibreVector, a: &GroupAlgebraElement) -> FibreVector {
        let mut out = FibreVector::zero(xi.fibre.clone());
        for (g, c) in xi.coeffs.terms() {
            for (k, d) in a.terms() {
                out.coeffs.push(c * d, self.sys.op(g, &self.sys.theta(&xi.fibre, k)));
            }
        }
        out
    }

    /// Coordinates of `ξ` in the basis `{π_p(δ_t) : t ∈ T_p}` with coefficients
    /// in `ℂ[G]`.
    pub fn basis_coordinates(&self, xi: &FibreVector) -> BTreeMap<GroupElement, GroupAlgebraElement> {
        let mut out: BTreeMap<GroupElement, GroupAlgebraElement> = BTreeMap::new();
        for (g, c) in xi.coeffs.terms() {
            let (t, k) = self.sys.canon(&xi.fibre, g);
            let slot = out.entry(t.clone()).or_default();
            slot.push(c.clone(), k);
            if slot.is_zero() {
                out.remove(&t);
            }
        }
        out
    }

    pub fn transversal_compose(&self, p: &SemigroupElement, q: &SemigroupElement) -> ComposedTransversal<'a> {
        let nested = self.sys.transversal_is_finite(p) && self.sys.transversal_is_finite(q);
        let mut right = Source {
            iter: self.sys.transversal_iter(q),
            seen: Vec::new(),
            done: false,
        };
        if nested {
            right.seen = right.iter.by_ref().collect();
            right.done = true;
        }
        ComposedTransversal {
            sys: self.sys,
            p: p.clone(),
            left: Source {
                iter: self.sys.transversal_iter(p),
                seen: Vec::new(),
                done: false,
            },
            right,
            nested,
            diagonal: 0,
            step: 0,
        }
    }

    /// Whether `C*(G)` acts on `M_p` by compact operators, i.e. `T_p` is finite.
    pub fn left_action_compact(&self, p: &SemigroupElement) -> bool {
        self.sys.transversal_is_finite(p)
    }

    pub fn rank_one(&self, xi: FibreVector, eta: FibreVector) -> Result<RankOne> {
        same_fibre(&xi, &eta)?;
        Ok(RankOne { xi, eta })
    }

    pub fn rank_one_apply(&self, op: &RankOne, mu: &FibreVector) -> Result<FibreVector> {
        let coeff = self.inner_product(&op.eta, mu)?;
        Ok(self.right_action(&op.xi, &coeff))
    }

    pub fn rank_one_adjoint(&self, op: &RankOne) -> RankOne {
        RankOne {
            xi: op.eta.clone(),
            eta: op.xi.clone(),
        }
    }

    /// `ι_p^r(Θ)(μ)` for `μ ∈ M_r`, from
    /// `ι_p^r(Θ_{π_p(δ_{g₁}), π_p(δ_{g₂})})(π_r(δ_s)) = χ_{g₂θ_p(G)}(s)·π_r(δ_{g₁g₂⁻¹s})`;
    /// zero unless `r ∈ pP`.
    pub fn iota_apply(&self, p: &SemigroupElement, op: &RankOne, mu: &FibreVector) -> Result<FibreVector> {
        if op.fibre() != p {
            return Err(mismatch(format!("fibre {p:?}"), format!("fibre {:?}", op.fibre())));
        }
        same_fibre(&op.xi, &op.eta)?;
        let mut out = FibreVector::zero(mu.fibre.clone());
        if self.sys.semigroup().divides_unchecked(p, &mu.fibre).is_none() {
            return Ok(out);
        }
        for (g1, a) in op.xi.coeffs.terms() {
            for (g2, b) in op.eta.coeffs.terms() {
                let coeff = a * b.conj();
                for (s, c) in mu.coeffs.terms() {
                    let shift = self.sys.quotient(g2, s);
                    if self.sys.theta_pre(p, &shift).is_some() {
                        out.coeffs.push(&coeff * c, self.sys.op(g1, &shift));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `ι_p^r(T_p)·ι_q^r(T_q)` as a rank-one operator on `M_r`, `pP ∩ qP = rP`,
    /// for rank-ones whose vectors are single scaled basis vectors.
    /// `None` when the product vanishes.
    pub fn compact_align_product(&self, left: &RankOne, right: &RankOne) -> Result<Option<RankOne>> {
        let single = |v: &FibreVector| {
            v.coeffs
                .single()
                .map(|(g, c)| (g.clone(), c.clone()))
                .ok_or_else(|| AlgebraError::Contract("expected a scaled basis vector".to_string()))
        };
        let (g1, a1) = single(&left.xi)?;
        let (g2, b1) = single(&left.eta)?;
        let (h1, a2) = single(&right.xi)?;
        let (h2, b2) = single(&right.eta)?;
        let (p, q) = (left.fibre(), right.fibre());
        let sg = self.sys.semigroup();
        let RightLcm::Meet { r, .. } = sg.right_lcm(p, q)? else {
            return Ok(None);
        };
        let Some((k, l)) = self.sys.solve(p, q, &self.sys.quotient(&g2, &h1)) else {
            return Ok(None);
        };
        let coeff = a1 * b1.conj() * a2 * b2.conj();
        Ok(Some(RankOne {
            xi: self.basis(&r, &self.sys.op(&g1, &self.sys.theta(p, &k))).scale(&coeff),
            eta: self.basis(&r, &self.sys.op(&h2, &self.sys.theta(q, &l))),
        }))
    }

    // ---- Fock representation ----------------------------------------------

    /// `ψ_p(ξ)`: `η_w ↦ ξ·η_w` at index `pw`.
    pub fn fock_create(&self, xi: &FibreVector, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (w, component) in &v.components {
            let eta = FibreVector {
                fibre: w.clone(),
                coeffs: component.clone(),
            };
            let product = self.fibre_mult(xi, &eta);
            for (x, c) in product.coeffs.terms() {
                out.push(c.clone(), product.fibre.clone(), x.clone());
            }
        }
        out
    }

    /// `ψ_p(ξ)*`: `π_w(δ_x) ↦ π_{w′}(δ_k)` when `w = pw′` and `g⁻¹x = θ_p(k)`, else 0.
    pub fn fock_annihilate(&self, xi: &FibreVector, v: &FockVector) -> FockVector {
        let p = &xi.fibre;
        let mut out = FockVector::zero();
        for (w, x, c) in v.terms() {
            let Some(rest) = self.sys.semigroup().divides_unchecked(p, w) else {
                continue;
            };
            for (g, a) in xi.coeffs.terms() {
                if let Some(k) = self.sys.theta_pre(p, &self.sys.quotient(g, x)) {
                    out.push(a.conj() * c, rest.clone(), k);
                }
            }
        }
        out
    }

    /// `U_g`: the left action of `δ_g` on every fibre.
    pub fn fock_unitary(&self, g: &GroupElement, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (w, x, c) in v.terms() {
            out.push(c.clone(), w.clone(), self.sys.op(g, x));
        }
        out
    }

    /// `S_p = ψ_p(π_p(δ_1))`.
    pub fn fock_isometry(&self, p: &SemigroupElement, v: &FockVector) -> FockVector {
        self.fock_create(&self.basis(p, &self.sys.identity()), v)
    }

    pub fn fock_isometry_adjoint(&self, p: &SemigroupElement, v: &FockVector) -> FockVector {
        self.fock_annihilate(&self.basis(p, &self.sys.identity()), v)
    }

    /// `ψ^{(p)}(Θ_{ξ,η}) = ψ_p(ξ)ψ_p(η)*`.
    pub fn fock_rank_one(&self, op: &RankOne, v: &FockVector) -> FockVector {
        self.fock_create(&op.xi, &self.fock_annihilate(&op.eta, v))
    }

    /// `E_{(g,p)} = U_g S_p S_p* U_g*`.
    pub fn fock_projection(&self, g: &GroupElement, p: &SemigroupElement, v: &FockVector) -> FockVector {
        let inner = self.fock_unitary(&self.sys.inverse(g), v);
        let inner = self.fock_isometry(p, &self.fock_isometry_adjoint(p, &inner));
        self.fock_unitary(g, &inner)
    }

    pub fn encode_fibre(&self, xi: &FibreVector) -> Value {
        json!({
            "fibre": self.sys.semigroup().encode(&xi.fibre),
            "terms": self.encode_terms(&xi.coeffs),
        })
    }

    pub fn encode_group_algebra(&self, a: &GroupAlgebraElement) -> Value {
        self.encode_terms(a)
    }

    fn encode_terms(&self, a: &GroupAlgebraElement) -> Value {
        Value::Array(
            a.terms()
                .map(|(g, c)| json!({"g": self.sys.encode_group(g), "coeff": scalar::encode(c)}))
                .collect(),
        )
    }

    pub fn encode_fock(&self, v: &FockVector) -> Value {
        Value::Array(
            v.terms()
                .map(|(w, x, c)| {
                    json!({
                        "w": self.sys.semigroup().encode(w),
                        "x": self.sys.encode_group(x),
                        "coeff": scalar::encode(c),
                    })
                })
                .collect(),
        )
    }

    // ---- sampled verification ---------------------------------------------

    fn sample_pool(&self, spec: &SampleSpec, stream: &str) -> (Vec<GroupElement>, Vec<SemigroupElement>) {
        let gs = self.sys.sample_group(&mut spec.rng_for(stream), spec.g_samples);
        (gs, self.sys.semigroup().enumerate_ball(spec.p_ball))
    }

    /// Fock basis vectors: random ones from the pool, and half of them inside
    /// `π_{r·y}(δ_{gθ_r(z)})` so the range of `ℰ_{g,r}` is actually probed.
    fn fock_samples(
        &self,
        rng: &mut Rng,
        gs: &[GroupElement],
        ball: &[SemigroupElement],
        aim: Option<(&GroupElement, &SemigroupElement)>,
        count: usize,
    ) -> Vec<(SemigroupElement, GroupElement)> {
        let sg = self.sys.semigroup();
        let short: Vec<&SemigroupElement> = ball.iter().take(6).collect();
        (0..count)
            .map(|i| {
                let z = gs.choose(rng).expect("group samples");
                match aim {
                    Some((g, r)) if i % 2 == 0 => {
                        let y = short.choose(rng).expect("ball");
                        (sg.compose_unchecked(r, y), self.sys.op(g, &self.sys.theta(r, z)))
                    }
                    _ => (ball.choose(rng).expect("ball").clone(), z.clone()),
                }
            })
            .collect()
    }

    fn pick_pair(
        &self,
        rng: &mut Rng,
        gs: &[GroupElement],
        ball: &[SemigroupElement],
        solvable: bool,
    ) -> ((GroupElement, SemigroupElement), (GroupElement, SemigroupElement)) {
        let g = gs.choose(rng).expect("group samples").clone();
        let p = ball.choose(rng).expect("ball").clone();
        let q = ball.choose(rng).expect("ball").clone();
        let h = if solvable {
            let k = gs.choose(rng).expect("group samples");
            let l = gs.choose(rng).expect("group samples");
            let shift = self.sys.op(&self.sys.theta(&p, k), &self.sys.inverse(&self.sys.theta(&q, l)));
            self.sys.op(&g, &shift)
        } else {
            gs.choose(rng).expect("group samples").clone()
        };
        ((g, p), (h, q))
    }

    /// `ψ^{(p)}(ℰ_{g,p})ψ^{(q)}(ℰ_{h,q})` against `ψ^{(r)}(ℰ_{g′,r})` (or zero) on
    /// sampled Fock basis vectors, for sampled pairs `(g,p), (h,q)`.
    pub fn check_nica_covariance(&self, spec: &SampleSpec) -> Report {
        let sys = self.sys;
        let sg = sys.semigroup();
        let mut report = Report::new("nica-covariance", json!({"system": sys.name(), "sample": spec.to_json()}));
        let mut rng = spec.rng_for("nica-covariance");
        let (gs, ball) = self.sample_pool(spec, "nica-pool");
        let mut t = report.begin("nica-covariance");
        let mut non_compact = 0usize;
        for i in 0..spec.pairs {
            let ((g, p), (h, q)) = self.pick_pair(&mut rng, &gs, &ball, i % 2 == 0);
            if !self.left_action_compact(&p) || !self.left_action_compact(&q) {
                non_compact += 1;
            }
            let lhs_ops = [self.projection(&g, &p), self.projection(&h, &q)];
            let rhs = self
                .compact_align_product(&lhs_ops[0], &lhs_ops[1])
                .expect("basis projections");
            let aim = rhs.as_ref().map(|op| (single_key(&op.xi), op.fibre()));
            let vectors = self.fock_samples(&mut rng, &gs, &ball, aim, spec.basis_vectors);
            let bad = vectors.iter().find_map(|(w, x)| {
                let v = FockVector::basis(w.clone(), x.clone());
                let left = self.fock_rank_one(&lhs_ops[0], &self.fock_rank_one(&lhs_ops[1], &v));
                let right = match &rhs {
                    Some(op) => self.fock_rank_one(op, &v),
                    None => FockVector::zero(),
                };
                (left != right).then(|| {
                    json!({
                        "vector": {"w": sg.encode(w), "x": sys.encode_group(x)},
                        "lhs": self.encode_fock(&left),
                        "rhs": self.encode_fock(&right),
                    })
                })
            });
            t.record(
                bad.is_none(),
                || bad.clone().expect("witness"),
                || {
                    json!({
                        "g": sys.encode_group(&g), "p": sg.encode(&p),
                        "h": sys.encode_group(&h), "q": sg.encode(&q),
                    })
                },
            );
        }
        t.note(format!("{non_compact} sampled pairs involve a fibre with non-compact left action"));
        drop(t);
        report
    }

    /// Fock-realized generators `U_g`, `S_p` against the defining relations:
    /// `S_pU_g = U_{θ_p(g)}S_p`, `S_p*S_p = 1`, and
    /// `E_{(g,p)}E_{(h,q)} = E_{(g,p)(h,q)-meet}` (or 0). One sample per basis vector.
    pub fn check_generator_relations(&self, spec: &SampleSpec) -> Report {
        let sys = self.sys;
        let sg = sys.semigroup();
        let mut report = Report::new(
            "generator-relations",
            json!({"system": sys.name(), "sample": spec.to_json()}),
        );
        let mut rng = spec.rng_for("generator-relations");
        let (gs, ball) = self.sample_pool(spec, "generator-pool");
        let encode_vec = |w: &SemigroupElement, x: &GroupElement| json!({"w": sg.encode(w), "x": sys.encode_group(x)});
        {
            let mut t = report.begin("covariance");
            for _ in 0..spec.pairs {
                let g = gs.choose(&mut rng).expect("group samples");
                let p = ball.choose(&mut rng).expect("ball");
                for (w, x) in self.fock_samples(&mut rng, &gs, &ball, None, spec.basis_vectors) {
                    let v = FockVector::basis(w.clone(), x.clone());
                    let lhs = self.fock_isometry(p, &self.fock_unitary(g, &v));
                    let rhs = self.fock_unitary(&sys.theta(p, g), &self.fock_isometry(p, &v));
                    t.record(
                        lhs == rhs,
                        || json!({"vector": encode_vec(&w, &x), "lhs": self.encode_fock(&lhs), "rhs": self.encode_fock(&rhs)}),
                        || json!({"g": sys.encode_group(g), "p": sg.encode(p)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("isometry");
            for _ in 0..spec.pairs {
                let p = ball.choose(&mut rng).expect("ball");
                for (w, x) in self.fock_samples(&mut rng, &gs, &ball, None, spec.basis_vectors) {
                    let v = FockVector::basis(w.clone(), x.clone());
                    let back = self.fock_isometry_adjoint(p, &self.fock_isometry(p, &v));
                    t.record(
                        back == v,
                        || json!({"vector": encode_vec(&w, &x), "image": self.encode_fock(&back)}),
                        || json!({"p": sg.encode(p)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("projection-product");
            for i in 0..spec.pairs {
                let ((g, p), (h, q)) = self.pick_pair(&mut rng, &gs, &ball, i % 2 == 0);
                let meet = sys.intersect(
                    &crate::semidirect::SdElement::new(g.clone(), p.clone()),
                    &crate::semidirect::SdElement::new(h.clone(), q.clone()),
                );
                let aim = match &meet {
                    crate::semidirect::IdealOutcome::Principal(e) => Some((&e.g, &e.p)),
                    crate::semidirect::IdealOutcome::Empty => None,
                };
                for (w, x) in self.fock_samples(&mut rng, &gs, &ball, aim, spec.basis_vectors) {
                    let v = FockVector::basis(w.clone(), x.clone());
                    let lhs = self.fock_projection(&g, &p, &self.fock_projection(&h, &q, &v));
                    let rhs = match aim {
                        Some((e_g, e_p)) => self.fock_projection(e_g, e_p, &v),
                        None => FockVector::zero(),
                    };
                    t.record(
                        lhs == rhs,
                        || json!({"vector": encode_vec(&w, &x), "lhs": self.encode_fock(&lhs), "rhs": self.encode_fock(&rhs)}),
                        || json!({
                            "g": sys.encode_group(&g), "p": sg.encode(&p),
                            "h": sys.encode_group(&h), "q": sg.encode(&q),
                        }),
                    );
                }
            }
        }
        report
    }

    /// Structural identities of the fibres: orthonormality of transversal bases,
    /// the composed transversals, associativity and inner-product compatibility
    /// of the fibre multiplication, the rank-one alignment identity, and the
    /// Fock relation `ψ_p(ξ)*ψ_p(η) = φ(⟨ξ,η⟩)`.
    pub fn check_fibre_structure(&self, spec: &SampleSpec) -> Report {
        let sys = self.sys;
        let sg = sys.semigroup();
        let mut report = Report::new("fibre-structure", json!({"system": sys.name(), "sample": spec.to_json()}));
        let mut rng = spec.rng_for("fibre-structure");
        let (gs, ball) = self.sample_pool(spec, "fibre-pool");
        let small_ball = sg.enumerate_ball(spec.p_ball.min(2));
        {
            let mut t = report.begin("orthonormal-basis");
            for p in &ball {
                let prefix: Vec<GroupElement> = sys.transversal_iter(p).take(spec.prefix).collect();
                for (i, s) in prefix.iter().enumerate() {
                    for (j, u) in prefix.iter().enumerate() {
                        let ip = self.inner_product(&self.basis(p, s), &self.basis(p, u)).expect("same fibre");
                        let expected = if i == j {
                            GroupAlgebraElement::delta(sys.identity())
                        } else {
                            GroupAlgebraElement::zero()
                        };
                        t.record(
                            ip == expected,
                            || json!({"inner": self.encode_group_algebra(&ip)}),
                            || json!({"p": sg.encode(p), "s": sys.encode_group(s), "t": sys.encode_group(u)}),
                        );
                    }
                }
            }
        }
        {
            let mut t = report.begin("transversal-composition");
            for p in &small_ball {
                for q in &small_ball {
                    let pq = sg.compose_unchecked(p, q);
                    let limit = if sys.transversal_is_finite(&pq) { usize::MAX } else { spec.prefix * 4 };
                    let composed: Vec<GroupElement> = self.transversal_compose(p, q).take(limit).collect();
                    let mut classes = std::collections::BTreeSet::new();
                    let collision = composed.iter().find(|g| !classes.insert(sys.canon(&pq, g).0)).cloned();
                    t.record(
                        collision.is_none(),
                        || json!({"repeated_class": collision.as_ref().map(|g| sys.encode_group(g))}),
                        || json!({"p": sg.encode(p), "q": sg.encode(q)}),
                    );
                    if let Some(n) = sys.index(&pq).filter(|_| sys.transversal_is_finite(p)) {
                        t.record(
                            num::BigInt::from(composed.len()) == n,
                            || json!({"enumerated": composed.len(), "index": n.to_string()}),
                            || json!({"p": sg.encode(p), "q": sg.encode(q)}),
                        );
                    }
                    for g in &gs {
                        let target = sys.canon(&pq, g).0;
                        let hit = self.covers(p, q, &target);
                        t.record(
                            hit,
                            || json!({"uncovered": sys.encode_group(g)}),
                            || json!({"p": sg.encode(p), "q": sg.encode(q)}),
                        );
                    }
                }
            }
        }
        {
            let mut t = report.begin("fibre-associativity");
            for _ in 0..spec.pairs {
                let v: Vec<FibreVector> = (0..3)
                    .map(|_| {
                        self.basis(
                            ball.choose(&mut rng).expect("ball"),
                            gs.choose(&mut rng).expect("group samples"),
                        )
                    })
                    .collect();
                let lhs = self.fibre_mult(&self.fibre_mult(&v[0], &v[1]), &v[2]);
                let rhs = self.fibre_mult(&v[0], &self.fibre_mult(&v[1], &v[2]));
                t.record(
                    lhs == rhs,
                    || json!({"lhs": self.encode_fibre(&lhs), "rhs": self.encode_fibre(&rhs)}),
                    || json!(v.iter().map(|x| self.encode_fibre(x)).collect::<Vec<_>>()),
                );
            }
        }
        {
            let mut t = report.begin("inner-product-compatibility");
            for _ in 0..spec.pairs {
                let p = ball.choose(&mut rng).expect("ball");
                let q = ball.choose(&mut rng).expect("ball");
                let pick = |rng: &mut Rng, f: &SemigroupElement| self.basis(f, gs.choose(rng).expect("group samples"));
                let (x1, x2) = (pick(&mut rng, p), pick(&mut rng, p));
                let (y1, y2) = (pick(&mut rng, q), pick(&mut rng, q));
                let lhs = self
                    .inner_product(&self.fibre_mult(&x1, &y1), &self.fibre_mult(&x2, &y2))
                    .expect("same fibre");
                let inner = self.inner_product(&x1, &x2).expect("same fibre");
                let rhs = self.inner_product(&y1, &self.left_action(&inner, &y2)).expect("same fibre");
                t.record(
                    lhs == rhs,
                    || json!({"lhs": self.encode_group_algebra(&lhs), "rhs": self.encode_group_algebra(&rhs)}),
                    || json!([self.encode_fibre(&x1), self.encode_fibre(&y1), self.encode_fibre(&x2), self.encode_fibre(&y2)]),
                );
            }
        }
        {
            let mut t = report.begin("compact-alignment");
            for i in 0..spec.pairs {
                let ((g1, p), (h1, q)) = self.pick_pair(&mut rng, &gs, &ball, i % 2 == 0);
                let g2 = gs.choose(&mut rng).expect("group samples").clone();
                let h2 = gs.choose(&mut rng).expect("group samples").clone();
                let left = RankOne { xi: self.basis(&p, &g1), eta: self.basis(&p, &g2) };
                let right = RankOne { xi: self.basis(&q, &h1), eta: self.basis(&q, &h2) };
                let product = self.compact_align_product(&left, &right).expect("basis rank-ones");
                let r = match sg.right_lcm(&p, &q).expect("ball elements") {
                    RightLcm::Meet { r, .. } => r,
                    RightLcm::Disjoint => {
                        t.record(product.is_none(), || json!("nonzero product for disjoint ideals"), || json!({}));
                        continue;
                    }
                };
                let anchor = product.as_ref().map_or(&h2, |op| single_key(&op.eta)).clone();
                for j in 0..spec.basis_vectors {
                    let z = gs.choose(&mut rng).expect("group samples");
                    let s = if j % 2 == 0 { sys.op(&anchor, &sys.theta(&r, z)) } else { z.clone() };
                    let mu = self.basis(&r, &s);
                    let chained = self
                        .iota_apply(&p, &left, &self.iota_apply(&q, &right, &mu).expect("fibre"))
                        .expect("fibre");
                    let direct = match &product {
                        Some(op) => self.rank_one_apply(op, &mu).expect("fibre"),
                        None => FibreVector::zero(r.clone()),
                    };
                    t.record(
                        chained == direct,
                        || json!({"mu": self.encode_fibre(&mu), "chained": self.encode_fibre(&chained), "direct": self.encode_fibre(&direct)}),
                        || json!({
                            "left": [sys.encode_group(&g1), sys.encode_group(&g2), sg.encode(&p)],
                            "right": [sys.encode_group(&h1), sys.encode_group(&h2), sg.encode(&q)],
                        }),
                    );
                }
            }
        }
        {
            let mut t = report.begin("fock-representation");
            for _ in 0..spec.pairs {
                let p = ball.choose(&mut rng).expect("ball");
                let xi = self.basis(p, gs.choose(&mut rng).expect("group samples"));
                let eta = self.basis(p, gs.choose(&mut rng).expect("group samples"));
                let inner = self.inner_product(&xi, &eta).expect("same fibre");
                for (w, x) in self.fock_samples(&mut rng, &gs, &ball, None, spec.basis_vectors.min(5)) {
                    let v = FockVector::basis(w, x);
                    let lhs = self.fock_annihilate(&xi, &self.fock_create(&eta, &v));
                    let mut rhs = FockVector::zero();
                    for (k, c) in inner.terms() {
                        rhs = rhs.add(&self.fock_unitary(k, &v).scale(c));
                    }
                    t.record(
                        lhs == rhs,
                        || json!({"lhs": self.encode_fock(&lhs), "rhs": self.encode_fock(&rhs)}),
                        || json!({"xi": self.encode_fibre(&xi), "eta": self.encode_fibre(&eta), "v": self.encode_fock(&v)}),
                    );
                }
            }
        }
        report
    }

    /// Writes `target = t·θ_p(u)·θ_{pq}(m)` with `t ∈ T_p`, `u ∈ T_q` and checks
    /// that `t·θ_p(u)` is the listed representative of its class.
    fn covers(&self, p: &SemigroupElement, q: &SemigroupElement, target: &GroupElement) -> bool {
        let pq = self.sys.semigroup().compose_unchecked(p, q);
        let (t, k) = self.sys.canon(p, target);
        let (u, _) = self.sys.canon(q, &k);
        let composed = self.sys.op(&t, &self.sys.theta(p, &u));
        let listed = !self.sys.transversal_is_finite(&pq) || self.transversal_compose(p, q).any(|g| g == composed);
        listed && self.sys.canon(&pq, &composed).0 == self.sys.canon(&pq, target).0
    }
}

fn single_key(v: &FibreVector) -> &GroupElement {
    v.coeffs.terms().next().map(|(g, _)| g).expect("single basis vector")
}
