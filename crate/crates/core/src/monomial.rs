//! The *-algebra spanned by the Wick-ordered monomials `u_g s_p s_q* u_h*`.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;
use serde_json::{json, Value};

use crate::dynamics::DynamicalSystem;
use crate::error::{AlgebraError, Result};
use crate::group::GroupElement;
use crate::scalar::{self, Scalar};
use crate::semigroup::{RightLcm, SemigroupElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monomial {
    Zero,
    /// `u_g s_p s_q* u_h*`, canonical when `h ∈ T_q` and `p` has trivial unit part.
    Term {
        g: GroupElement,
        p: SemigroupElement,
        q: SemigroupElement,
        h: GroupElement,
    },
}

impl Monomial {
    pub fn is_zero(&self) -> bool {
        matches!(self, Monomial::Zero)
    }

    /// `e_{(g,p)}`-shaped: `p = q` and `g = h`.
    pub fn is_projection(&self) -> bool {
        match self {
            Monomial::Term { g, p, q, h } => p == q && g == h,
            Monomial::Zero => false,
        }
    }
}

/// Finite formal sum of nonzero monomials with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut a = AlgebraElement::zero();
        a.push(c, m);
        a
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(scalar::one(), m)
    }

    fn push(&mut self, c: Scalar, m: Monomial) {
        if m.is_zero() || c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&m) {
            Some(v) => v + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
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

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(c.clone(), m.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, d) in &self.terms {
            out.push(c * d, m.clone());
        }
        out
    }
}

/// Multiplication, adjoint and canonical forms for one dynamical system.
#[derive(Clone, Copy, Debug)]
pub struct MonomialAlgebra<'a> {
    sys: &'a DynamicalSystem,
}

impl<'a> MonomialAlgebra<'a> {
    pub fn new(sys: &'a DynamicalSystem) -> Self {
        MonomialAlgebra { sys }
    }

    pub fn system(&self) -> &'a DynamicalSystem {
        self.sys
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        if let Monomial::Term { g, p, q, h } = m {
            self.sys.check_group(g)?;
            self.sys.check_group(h)?;
            self.sys.semigroup().check(p)?;
            self.sys.semigroup().check(q)?;
        }
        Ok(())
    }

    /// Twists `u_g s_p s_q* u_h*` by units of `G ⋊ P` until `p` has trivial unit
    /// part and `h ∈ T_q`.
    pub fn canonicalize(
        &self,
        g: &GroupElement,
        p: &SemigroupElement,
        q: &SemigroupElement,
        h: &GroupElement,
    ) -> Result<Monomial> {
        self.check(&Monomial::Term {
            g: g.clone(),
            p: p.clone(),
            q: q.clone(),
            h: h.clone(),
        })?;
        Ok(self.canon(g, p, q, h))
    }

    pub(crate) fn canon(
        &self,
        g: &GroupElement,
        p: &SemigroupElement,
        q: &SemigroupElement,
        h: &GroupElement,
    ) -> Monomial {
        let sg = self.sys.semigroup();
        let (p, x) = sg.unit_normalize(p);
        let q = sg.compose_unchecked(q, &x);
        let (t, l) = self.sys.canon(&q, h);
        let g = self.sys.op(g, &self.sys.inverse(&self.sys.theta(&p, &l)));
        Monomial::Term { g, p, q, h: t }
    }

    pub fn is_canonical(&self, m: &Monomial) -> bool {
        match m {
            Monomial::Zero => true,
            Monomial::Term { g, p, q, h } => self.canon(g, p, q, h) == *m,
        }
    }

    pub fn identity(&self) -> Monomial {
        let one = self.sys.identity();
        let e = self.sys.semigroup().identity();
        Monomial::Term {
            g: one.clone(),
            p: e.clone(),
            q: e,
            h: one,
        }
    }

    /// `u_g`.
    pub fn unitary(&self, g: &GroupElement) -> Monomial {
        let e = self.sys.semigroup().identity();
        self.canon(g, &e, &e, &self.sys.identity())
    }

    /// `s_p`.
    pub fn isometry(&self, p: &SemigroupElement) -> Monomial {
        let one = self.sys.identity();
        self.canon(&one, p, &self.sys.semigroup().identity(), &one)
    }

    /// `e_{(g,p)} = u_g s_p s_p* u_g*`.
    pub fn projection(&self, g: &GroupElement, p: &SemigroupElement) -> Monomial {
        self.canon(g, p, p, g)
    }

    pub fn mult(&self, m1: &Monomial, m2: &Monomial) -> Result<Monomial> {
        self.check(m1)?;
        self.check(m2)?;
        Ok(self.mul(m1, m2))
    }

    pub(crate) fn mul(&self, m1: &Monomial, m2: &Monomial) -> Monomial {
        let (Monomial::Term { h: h1, q: q1, .. }, Monomial::Term { g: g2, p: p2, .. }) = (m1, m2) else {
            return Monomial::Zero;
        };
        match self.sys.solve(q1, p2, &self.sys.quotient(h1, g2)) {
            Some(solution) => self.mul_via(m1, m2, &solution),
            None => Monomial::Zero,
        }
    }

    /// The product computed from a caller-supplied `(k, ℓ)` with
    /// `h₁⁻¹g₂ = θ_{q₁}(k)·θ_{p₂}(ℓ)⁻¹`.
    pub fn mul_via(&self, m1: &Monomial, m2: &Monomial, solution: &(GroupElement, GroupElement)) -> Monomial {
        let (Monomial::Term { g: g1, p: p1, q: q1, .. }, Monomial::Term { p: p2, q: q2, h: h2, .. }) = (m1, m2)
        else {
            return Monomial::Zero;
        };
        let sg = self.sys.semigroup();
        let RightLcm::Meet { p_comp, q_comp, .. } = sg.right_lcm(q1, p2).expect("same semigroup") else {
            return Monomial::Zero;
        };
        let (k, l) = solution;
        self.canon(
            &self.sys.op(g1, &self.sys.theta(p1, k)),
            &sg.compose_unchecked(p1, &p_comp),
            &sg.compose_unchecked(q2, &q_comp),
            &self.sys.op(h2, &self.sys.theta(q2, l)),
        )
    }

    pub fn adjoint(&self, m: &Monomial) -> Result<Monomial> {
        self.check(m)?;
        Ok(self.adj(m))
    }

    pub(crate) fn adj(&self, m: &Monomial) -> Monomial {
        match m {
            Monomial::Zero => Monomial::Zero,
            Monomial::Term { g, p, q, h } => self.canon(h, q, p, g),
        }
    }

    /// `e_{(g,p)}·e_{(h,q)} = e_{(g·θ_p(k), r)}` or zero.
    pub fn projection_product(&self, e1: &Monomial, e2: &Monomial) -> Result<Monomial> {
        for e in [e1, e2] {
            self.check(e)?;
            if !e.is_projection() {
                return Err(AlgebraError::Contract(format!(
                    "{} is not of the form e_(g,p)",
                    self.display(e)
                )));
            }
        }
        let (Monomial::Term { g, p, .. }, Monomial::Term { g: h, p: q, .. }) = (e1, e2) else {
            unreachable!("projection-shaped")
        };
        let sg = self.sys.semigroup();
        let RightLcm::Meet { r, .. } = sg.right_lcm(p, q)? else {
            return Ok(Monomial::Zero);
        };
        Ok(match self.sys.solve(p, q, &self.sys.quotient(g, h)) {
            Some((k, _)) => self.projection(&self.sys.op(g, &self.sys.theta(p, &k)), &r),
            None => Monomial::Zero,
        })
    }

    pub fn algebra_mult(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m1, c1) in a.terms() {
            for (m2, c2) in b.terms() {
                out.push(c1 * c2, self.mul(m1, m2));
            }
        }
        out
    }

    pub fn algebra_adjoint(&self, a: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in a.terms() {
            out.push(c.conj(), self.adj(m));
        }
        out
    }

    pub fn algebra_add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.add(b)
    }

    pub fn algebra_scale(&self, c: &Scalar, a: &AlgebraElement) -> AlgebraElement {
        a.scale(c)
    }

    pub fn encode(&self, m: &Monomial) -> Value {
        match m {
            Monomial::Zero => json!("0"),
            Monomial::Term { g, p, q, h } => json!({
                "g": self.sys.encode_group(g),
                "p": self.sys.semigroup().encode(p),
                "q": self.sys.semigroup().encode(q),
                "h": self.sys.encode_group(h),
            }),
        }
    }

    /// Reads a monomial and brings it into canonical form.
    pub fn decode(&self, v: &Value) -> Result<Monomial> {
        if v == &json!("0") || v == &json!(0) {
            return Ok(Monomial::Zero);
        }
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| AlgebraError::Parse(format!("monomial {v} lacks field {k:?}")))
        };
        let sg = self.sys.semigroup();
        self.canonicalize(
            &self.sys.decode_group(field("g")?)?,
            &sg.decode(field("p")?)?,
            &sg.decode(field("q")?)?,
            &self.sys.decode_group(field("h")?)?,
        )
    }

    pub fn encode_element(&self, a: &AlgebraElement) -> Value {
        Value::Array(
            a.terms()
                .map(|(m, c)| json!({"coeff": scalar::encode(c), "monomial": self.encode(m)}))
                .collect(),
        )
    }

    pub fn display(&self, m: &Monomial) -> String {
        match m {
            Monomial::Zero => "0".to_string(),
            Monomial::Term { g, p, q, h } => format!(
                "u[{}] s[{}] s[{}]* u[{}]*",
                self.sys.display_group(g),
                self.sys.semigroup().display(p),
                self.sys.semigroup().display(q),
                self.sys.display_group(h)
            ),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monomial::Zero => f.write_str("0"),
            Monomial::Term { g, p, q, h } => write!(f, "({g}, {p:?}, {q:?}, {h})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn z(gens: &[i64]) -> DynamicalSystem {
        DynamicalSystem::int_mult(gens).unwrap()
    }

    fn m(sys: &DynamicalSystem, g: i64, p: i64, q: i64, h: i64) -> Monomial {
        let sg = sys.semigroup();
        Monomial::Term {
            g: GroupElement::int(g),
            p: sg.from_int_value(&BigInt::from(p)).unwrap(),
            q: sg.from_int_value(&BigInt::from(q)).unwrap(),
            h: GroupElement::int(h),
        }
    }

    #[test]
    fn canonicalize_examples() {
        let sys = z(&[2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        let raw = m(&sys, 3, 3, 2, 3);
        let Monomial::Term { g, p, q, h } = &raw else { unreachable!() };
        assert_eq!(alg.canonicalize(g, p, q, h).unwrap(), m(&sys, 0, 3, 2, 1));
        assert!(alg.is_canonical(&m(&sys, 0, 1, 1, 0)));

        let signed = z(&[-1, 2, 3]);
        let alg = MonomialAlgebra::new(&signed);
        let Monomial::Term { g, p, q, h } = m(&signed, 0, -2, 3, 0) else { unreachable!() };
        assert_eq!(alg.canonicalize(&g, &p, &q, &h).unwrap(), m(&signed, 0, 2, -3, 0));
    }

    #[test]
    fn mult_examples() {
        let sys = z(&[2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        assert_eq!(alg.mult(&m(&sys, 0, 1, 2, 0), &m(&sys, 3, 3, 1, 0)).unwrap(), m(&sys, 3, 3, 2, 1));
        assert_eq!(alg.mult(&m(&sys, 1, 2, 2, 1), &m(&sys, 0, 3, 3, 0)).unwrap(), m(&sys, 3, 6, 6, 3));
        assert_eq!(alg.mult(&m(&sys, 0, 2, 2, 0), &m(&sys, 1, 2, 2, 1)).unwrap(), Monomial::Zero);
        let x = m(&sys, 5, 6, 3, 2);
        assert_eq!(alg.mult(&alg.identity(), &x).unwrap(), x);
        assert_eq!(alg.mult(&Monomial::Zero, &x).unwrap(), Monomial::Zero);
    }

    #[test]
    fn adjoint_examples() {
        let sys = z(&[2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        assert_eq!(alg.adjoint(&m(&sys, 3, 3, 2, 1)).unwrap(), m(&sys, -1, 2, 3, 0));
        let e = alg.projection(&GroupElement::int(1), &m_p(&sys, 2));
        assert_eq!(alg.adjoint(&e).unwrap(), e);
    }

    fn m_p(sys: &DynamicalSystem, p: i64) -> SemigroupElement {
        sys.semigroup().from_int_value(&BigInt::from(p)).unwrap()
    }

    #[test]
    fn projection_product_examples() {
        let sys = z(&[2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        let e = |g: i64, p: i64| alg.projection(&GroupElement::int(g), &m_p(&sys, p));
        assert_eq!(alg.projection_product(&e(1, 2), &e(0, 3)).unwrap(), e(3, 6));
        assert_eq!(alg.projection_product(&e(5, 6), &e(5, 6)).unwrap(), e(5, 6));
        assert_eq!(alg.projection_product(&e(0, 2), &e(1, 4)).unwrap(), Monomial::Zero);
        assert!(alg.projection_product(&m(&sys, 0, 1, 2, 0), &e(0, 2)).is_err());
    }

    #[test]
    fn sums_are_bilinear() {
        let sys = z(&[2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        let e = |g: i64, p: i64| alg.projection(&GroupElement::int(g), &m_p(&sys, p));
        let a = AlgebraElement::monomial(e(0, 2)).add(&AlgebraElement::term(scalar::from_int(2), e(1, 2)));
        let b = AlgebraElement::monomial(e(1, 2));
        let ab = alg.algebra_mult(&a, &b);
        assert_eq!(ab, AlgebraElement::term(scalar::from_int(2), e(1, 2)));
        assert!(alg.algebra_mult(&AlgebraElement::monomial(e(0, 2)), &b).is_zero());
        let c = AlgebraElement::term(scalar::imaginary_unit(), m(&sys, 0, 1, 2, 0));
        let c_star = alg.algebra_adjoint(&c);
        assert_eq!(
            c_star,
            AlgebraElement::term(-scalar::imaginary_unit(), alg.adjoint(&m(&sys, 0, 1, 2, 0)).unwrap())
        );
        let cancel = a.add(&a.scale(&scalar::from_int(-1)));
        assert!(cancel.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let sys = z(&[-1, 2, 3]);
        let alg = MonomialAlgebra::new(&sys);
        let x = m(&sys, 4, 6, -3, 2);
        assert_eq!(alg.decode(&alg.encode(&x)).unwrap(), x);
        assert_eq!(alg.decode(&json!("0")).unwrap(), Monomial::Zero);
        assert_eq!(alg.encode(&x), json!({"g": 4, "p": 6, "q": -3, "h": 2}));
    }
}
