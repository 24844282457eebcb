//! The left regular representation of `G ⋊_θ P`, modelled by partial injections
//! of `S = G ⋊_θ P` onto itself.

use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::dynamics::DynamicalSystem;
use crate::monomial::{Monomial, MonomialAlgebra};
use crate::report::{CheckTally, Report};
use crate::sample::SampleSpec;
use crate::semidirect::{IdealOutcome, SdElement};

/// `src·x ↦ dst·x` on the principal ideal `src·S`, or the empty map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartialInjection {
    Empty,
    Map { src: SdElement, dst: SdElement },
}

#[derive(Clone, Copy, Debug)]
pub struct RegularRep<'a> {
    sys: &'a DynamicalSystem,
}

impl<'a> RegularRep<'a> {
    pub fn new(sys: &'a DynamicalSystem) -> Self {
        RegularRep { sys }
    }

    /// `λ(u_g s_p s_q* u_h*)`: `(h,q)·x ↦ (g,p)·x`.
    pub fn as_partial_map(&self, m: &Monomial) -> PartialInjection {
        match m {
            Monomial::Zero => PartialInjection::Empty,
            Monomial::Term { g, p, q, h } => PartialInjection::Map {
                src: SdElement::new(h.clone(), q.clone()),
                dst: SdElement::new(g.clone(), p.clone()),
            },
        }
    }

    pub fn identity(&self) -> PartialInjection {
        let one = self.sys.sd_identity();
        PartialInjection::Map {
            src: one.clone(),
            dst: one,
        }
    }

    /// `V_a`.
    pub fn isometry(&self, a: &SdElement) -> PartialInjection {
        PartialInjection::Map {
            src: self.sys.sd_identity(),
            dst: a.clone(),
        }
    }

    /// `e_X` for `X = aS`.
    pub fn range_projection(&self, a: &SdElement) -> PartialInjection {
        PartialInjection::Map {
            src: a.clone(),
            dst: a.clone(),
        }
    }

    pub fn ideal_projection(&self, x: &IdealOutcome) -> PartialInjection {
        match x {
            IdealOutcome::Empty => PartialInjection::Empty,
            IdealOutcome::Principal(a) => self.range_projection(a),
        }
    }

    pub fn adjoint(&self, f: &PartialInjection) -> PartialInjection {
        match f {
            PartialInjection::Empty => PartialInjection::Empty,
            PartialInjection::Map { src, dst } => PartialInjection::Map {
                src: dst.clone(),
                dst: src.clone(),
            },
        }
    }

    pub fn eval(&self, f: &PartialInjection, s: &SdElement) -> Option<SdElement> {
        match f {
            PartialInjection::Empty => None,
            PartialInjection::Map { src, dst } => {
                let x = self.sys.sd_div(src, s)?;
                Some(self.sys.sd_mul(dst, &x))
            }
        }
    }

    /// Applies `maps` right to left, pointwise.
    pub fn eval_chain(&self, maps: &[&PartialInjection], s: &SdElement) -> Option<SdElement> {
        maps.iter().rev().try_fold(s.clone(), |x, f| self.eval(f, &x))
    }

    /// `f ∘ g`, computed symbolically through the ideal-intersection formula.
    pub fn compose(&self, f: &PartialInjection, g: &PartialInjection) -> PartialInjection {
        let (PartialInjection::Map { src: d, dst: c }, PartialInjection::Map { src: b, dst: a }) = (f, g) else {
            return PartialInjection::Empty;
        };
        let IdealOutcome::Principal(e) = self.sys.intersect(a, d) else {
            return PartialInjection::Empty;
        };
        let a_rest = self.sys.sd_div(a, &e).expect("intersection lies in aS");
        let d_rest = self.sys.sd_div(d, &e).expect("intersection lies in dS");
        PartialInjection::Map {
            src: self.sys.sd_mul(b, &a_rest),
            dst: self.sys.sd_mul(c, &d_rest),
        }
    }

    /// Whether the two maps coincide, decided symbolically: `src` and `dst` may
    /// differ only by a common unit of `S`.
    pub fn same_map(&self, f: &PartialInjection, g: &PartialInjection) -> bool {
        match (f, g) {
            (PartialInjection::Empty, PartialInjection::Empty) => true,
            (PartialInjection::Map { src: b, dst: a }, PartialInjection::Map { src: b2, dst: a2 }) => {
                match self.sys.sd_div(b, b2) {
                    Some(u) => self.sys.sd_is_unit(&u) && self.sys.sd_mul(a, &u) == *a2,
                    None => false,
                }
            }
            _ => false,
        }
    }

    /// First window point where the two maps disagree.
    pub fn separating_point(
        &self,
        f: &PartialInjection,
        g: &PartialInjection,
        window: &[SdElement],
    ) -> Option<SdElement> {
        window.iter().find(|s| self.eval(f, s) != self.eval(g, s)).cloned()
    }

    pub fn equal_on_window(&self, f: &PartialInjection, g: &PartialInjection, window: &[SdElement]) -> bool {
        self.separating_point(f, g, window).is_none()
    }

    /// No two window points in the domain share an image.
    pub fn injective_on_window(&self, f: &PartialInjection, window: &[SdElement]) -> bool {
        let mut images = std::collections::BTreeSet::new();
        window
            .iter()
            .filter_map(|s| self.eval(f, s))
            .all(|y| images.insert(y))
    }

    pub fn encode(&self, f: &PartialInjection) -> Value {
        match f {
            PartialInjection::Empty => json!("empty"),
            PartialInjection::Map { src, dst } => json!({
                "src": self.sys.encode_sd(src),
                "dst": self.sys.encode_sd(dst),
            }),
        }
    }

    fn compare_chains(
        &self,
        tally: &mut CheckTally<'_>,
        lhs: &[&PartialInjection],
        rhs: &[&PartialInjection],
        points: &[SdElement],
        inputs: impl FnOnce() -> Value,
    ) {
        let sys = self.sys;
        let bad = points.iter().find(|s| self.eval_chain(lhs, s) != self.eval_chain(rhs, s));
        tally.record(
            bad.is_none(),
            || {
                let s = bad.expect("failing point");
                json!({
                    "point": sys.encode_sd(s),
                    "lhs": self.eval_chain(lhs, s).map(|y| sys.encode_sd(&y)),
                    "rhs": self.eval_chain(rhs, s).map(|y| sys.encode_sd(&y)),
                })
            },
            inputs,
        );
    }

    /// Checks the defining relations of the full semigroup C*-algebra, exactly and
    /// pointwise on a window: `V_aV_b = V_{ab}`, `V_a e_X V_a* = e_{aX}`,
    /// `e_∅ = 0`, `e_S = 1`, `e_X e_Y = e_{X∩Y}` and `V_a*V_a = 1`.
    pub fn check_li_relations(&self, spec: &SampleSpec) -> Report {
        let sys = self.sys;
        let mut report = Report::new("li-relations", json!({"system": sys.name(), "sample": spec.to_json()}));
        let window = sys.window(spec);
        let mut rng = spec.rng_for("li-relations");
        let gs = sys.sample_group(&mut spec.rng_for("li-generators"), spec.g_samples.min(8));
        let ball = sys.semigroup().enumerate_ball(spec.p_ball);
        let gens: Vec<SdElement> = gs
            .iter()
            .flat_map(|g| ball.iter().map(move |p| SdElement::new(g.clone(), p.clone())))
            .collect();
        let pick = |rng: &mut crate::sample::Rng| gens.choose(rng).expect("generators").clone();
        let depth = 16;

        {
            let mut t = report.begin("L1");
            for _ in 0..spec.pairs {
                let (a, b) = (pick(&mut rng), pick(&mut rng));
                let ab = sys.sd_mul(&a, &b);
                let points = sys.extend_window(&window, &[&a, &ab], depth);
                self.compare_chains(
                    &mut t,
                    &[&self.isometry(&a), &self.isometry(&b)],
                    &[&self.isometry(&ab)],
                    &points,
                    || json!({"a": sys.encode_sd(&a), "b": sys.encode_sd(&b)}),
                );
            }
        }
        {
            let mut t = report.begin("L2");
            for _ in 0..spec.pairs {
                let (a, c) = (pick(&mut rng), pick(&mut rng));
                let ac = sys.sd_mul(&a, &c);
                let points = sys.extend_window(&window, &[&a, &ac], depth);
                let va = self.isometry(&a);
                self.compare_chains(
                    &mut t,
                    &[&va, &self.range_projection(&c), &self.adjoint(&va)],
                    &[&self.range_projection(&ac)],
                    &points,
                    || json!({"a": sys.encode_sd(&a), "X": sys.encode_sd(&c)}),
                );
            }
        }
        {
            let mut t = report.begin("L3");
            let empty = self.as_partial_map(&Monomial::Zero);
            t.record(
                window.iter().all(|s| self.eval(&empty, s).is_none()),
                || json!("e_empty is nonzero"),
                || json!({}),
            );
            let whole = self.range_projection(&sys.sd_identity());
            for s in &window {
                t.record(
                    self.eval(&whole, s).as_ref() == Some(s),
                    || json!({"point": sys.encode_sd(s)}),
                    || json!({}),
                );
            }
        }
        {
            let mut t = report.begin("L4");
            for _ in 0..spec.pairs {
                let (c, d) = (pick(&mut rng), pick(&mut rng));
                let meet = sys.intersect(&c, &d);
                let mut through = vec![&c, &d];
                if let IdealOutcome::Principal(e) = &meet {
                    through.push(e);
                }
                let points = sys.extend_window(&window, &through, depth);
                self.compare_chains(
                    &mut t,
                    &[&self.range_projection(&c), &self.range_projection(&d)],
                    &[&self.ideal_projection(&meet)],
                    &points,
                    || json!({"X": sys.encode_sd(&c), "Y": sys.encode_sd(&d)}),
                );
            }
        }
        {
            let mut t = report.begin("isometry");
            for _ in 0..spec.pairs {
                let a = pick(&mut rng);
                let va = self.isometry(&a);
                self.compare_chains(
                    &mut t,
                    &[&self.adjoint(&va), &va],
                    &[&self.identity()],
                    &window,
                    || json!({"a": sys.encode_sd(&a)}),
                );
            }
        }
        {
            let mut t = report.begin("compose");
            let monos = MonomialAlgebra::new(sys);
            for _ in 0..spec.pairs {
                let (a, b, c, d) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let f = PartialInjection::Map { src: a.clone(), dst: b.clone() };
                let g = PartialInjection::Map { src: c.clone(), dst: d.clone() };
                let fg = self.compose(&f, &g);
                let points = sys.extend_window(&window, &[&a, &c, &d], depth);
                self.compare_chains(&mut t, &[&f, &g], &[&fg], &points, || {
                    json!({"f": self.encode(&f), "g": self.encode(&g)})
                });
                let m1 = monos.canon(&b.g, &b.p, &a.p, &a.g);
                let m2 = monos.canon(&d.g, &d.p, &c.p, &c.g);
                let product = self.as_partial_map(&monos.mul(&m1, &m2));
                t.record(
                    self.same_map(&product, &fg),
                    || json!({"product": self.encode(&product), "compose": self.encode(&fg)}),
                    || json!({"f": self.encode(&f), "g": self.encode(&g)}),
                );
            }
        }
        report
    }
}
