//! The semidirect product `S = G ⋊_θ P` with `(g,p)(h,q) = (g·θ_p(h), pq)`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::dynamics::DynamicalSystem;
use crate::error::{AlgebraError, Result};
use crate::group::GroupElement;
use crate::report::Report;
use crate::sample::SampleSpec;
use crate::semigroup::{RightLcm, SemigroupElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SdElement {
    pub g: GroupElement,
    pub p: SemigroupElement,
}

impl SdElement {
    pub fn new(g: GroupElement, p: SemigroupElement) -> Self {
        SdElement { g, p }
    }
}

/// An intersection `X_a ∩ X_b` of principal right ideals of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealOutcome {
    Empty,
    Principal(SdElement),
}

impl DynamicalSystem {
    pub fn sd_identity(&self) -> SdElement {
        SdElement::new(self.identity(), self.semigroup().identity())
    }

    pub fn sd_check(&self, a: &SdElement) -> Result<()> {
        self.check_group(&a.g)?;
        self.semigroup().check(&a.p)
    }

    pub fn sd_compose(&self, a: &SdElement, b: &SdElement) -> Result<SdElement> {
        self.sd_check(a)?;
        self.sd_check(b)?;
        Ok(self.sd_mul(a, b))
    }

    pub(crate) fn sd_mul(&self, a: &SdElement, b: &SdElement) -> SdElement {
        SdElement {
            g: self.op(&a.g, &self.theta(&a.p, &b.g)),
            p: self.semigroup().compose_unchecked(&a.p, &b.p),
        }
    }

    /// The unique `x` with `a·x = s`, if `s ∈ aS`.
    pub fn sd_divides(&self, a: &SdElement, s: &SdElement) -> Result<Option<SdElement>> {
        self.sd_check(a)?;
        self.sd_check(s)?;
        Ok(self.sd_div(a, s))
    }

    pub(crate) fn sd_div(&self, a: &SdElement, s: &SdElement) -> Option<SdElement> {
        let x = self.semigroup().divides_unchecked(&a.p, &s.p)?;
        let k = self.theta_pre(&a.p, &self.quotient(&a.g, &s.g))?;
        Some(SdElement { g: k, p: x })
    }

    /// Whether `aS = bS`.
    pub fn same_ideal(&self, a: &SdElement, b: &SdElement) -> bool {
        self.sd_div(a, b).is_some() && self.sd_div(b, a).is_some()
    }

    pub fn ideal_intersect(&self, a: &SdElement, b: &SdElement) -> Result<IdealOutcome> {
        self.sd_check(a)?;
        self.sd_check(b)?;
        Ok(self.intersect(a, b))
    }

    pub(crate) fn intersect(&self, a: &SdElement, b: &SdElement) -> IdealOutcome {
        let RightLcm::Meet { r, .. } = self.semigroup().right_lcm(&a.p, &b.p).expect("checked elements") else {
            return IdealOutcome::Empty;
        };
        match self.solve(&a.p, &b.p, &self.quotient(&a.g, &b.g)) {
            Some((k, _)) => IdealOutcome::Principal(SdElement {
                g: self.op(&a.g, &self.theta(&a.p, &k)),
                p: r,
            }),
            None => IdealOutcome::Empty,
        }
    }

    /// `(g,p)` is invertible in `S` exactly when `p ∈ P*`.
    pub fn sd_is_unit(&self, a: &SdElement) -> bool {
        self.semigroup().is_unit(&a.p)
    }

    /// The unit group `S* = G ⋊ P*`, described symbolically.
    pub fn sd_unit_description(&self) -> String {
        let sg = self.semigroup();
        let units: Vec<String> = sg.units().iter().map(|u| sg.display(u)).collect();
        let units = if units == ["1", "-1"] {
            "±1".to_string()
        } else {
            units.join(", ")
        };
        format!("{} ⋊ {{{units}}}", self.group_name())
    }

    /// `(c, d)` with `c·a = d·b`, built from a right-reversibility witness in `P`.
    pub fn sd_left_ore_witness(
        &self,
        a: &SdElement,
        b: &SdElement,
        radius: usize,
    ) -> Result<Option<(SdElement, SdElement)>> {
        self.sd_check(a)?;
        self.sd_check(b)?;
        let Some((pl, ql)) = self.semigroup().right_reversibility_witness(&a.p, &b.p, radius)? else {
            return Ok(None);
        };
        let c = SdElement {
            g: self.op(&self.theta(&ql, &b.g), &self.inverse(&self.theta(&pl, &a.g))),
            p: pl,
        };
        let d = SdElement {
            g: self.identity(),
            p: ql,
        };
        Ok(Some((c, d)))
    }

    /// Samples pairs for common left multiples and triples for right cancellation.
    pub fn sd_left_ore_sample(&self, spec: &SampleSpec) -> Report {
        let mut report = Report::new("left-ore", json!({"system": self.name(), "sample": spec.to_json()}));
        let mut rng = spec.rng_for("left-ore");
        let ball = self.semigroup().enumerate_ball(spec.search_radius);
        let gs = self.sample_group(&mut rng, spec.g_samples.min(12));
        let elements: Vec<SdElement> = gs
            .iter()
            .flat_map(|g| ball.iter().map(move |p| SdElement::new(g.clone(), p.clone())))
            .collect();
        {
            let mut t = report.begin("common-left-multiple");
            for _ in 0..spec.pairs {
                let a = elements.choose(&mut rng).expect("nonempty window");
                let b = elements.choose(&mut rng).expect("nonempty window");
                let found = self.sd_left_ore_witness(a, b, spec.search_radius).expect("sampled elements");
                let ok = match &found {
                    Some((c, d)) => self.sd_mul(c, a) == self.sd_mul(d, b),
                    None => false,
                };
                t.record(
                    ok,
                    || match &found {
                        Some((c, d)) => json!({"c": self.encode_sd(c), "d": self.encode_sd(d)}),
                        None => json!({"searched_radius": spec.search_radius}),
                    },
                    || json!({"a": self.encode_sd(a), "b": self.encode_sd(b)}),
                );
            }
        }
        {
            let mut t = report.begin("right-cancellation");
            for _ in 0..spec.pairs {
                let a = elements.choose(&mut rng).expect("nonempty window");
                let c = elements.choose(&mut rng).expect("nonempty window");
                // A second left factor agreeing with `a` on the semigroup part half the time.
                let b = if t.samples().is_multiple_of(2) {
                    SdElement::new(gs.choose(&mut rng).expect("samples").clone(), a.p.clone())
                } else {
                    elements.choose(&mut rng).expect("nonempty window").clone()
                };
                let ac = self.sd_mul(a, c);
                let bc = self.sd_mul(&b, c);
                t.record(
                    ac != bc || *a == b,
                    || json!({"product": self.encode_sd(&ac)}),
                    || json!({"a": self.encode_sd(a), "b": self.encode_sd(&b), "c": self.encode_sd(c)}),
                );
            }
        }
        report
    }

    /// Sampled group elements times the semigroup ball, followed by products of
    /// the first few of those.
    pub fn window(&self, spec: &SampleSpec) -> Vec<SdElement> {
        let gs = self.sample_group(&mut spec.rng_for("window"), spec.g_samples);
        let ball = self.semigroup().enumerate_ball(spec.p_ball);
        let base: Vec<SdElement> = gs
            .iter()
            .flat_map(|g| ball.iter().map(move |p| SdElement::new(g.clone(), p.clone())))
            .collect();
        let head = &base[..base.len().min(12)];
        let products: Vec<SdElement> = head
            .iter()
            .flat_map(|a| head.iter().map(move |b| (a, b)))
            .map(|(a, b)| self.sd_mul(a, b))
            .collect();
        dedup(base.iter().cloned().chain(products))
    }

    /// `window` together with `c·w` for each `c` in `through` and each of the
    /// first `depth` window points, so ideals generated by `through` are probed.
    pub fn extend_window(&self, window: &[SdElement], through: &[&SdElement], depth: usize) -> Vec<SdElement> {
        let head = &window[..window.len().min(depth)];
        let extra: Vec<SdElement> = through
            .iter()
            .flat_map(|c| head.iter().map(move |w| self.sd_mul(c, w)))
            .collect();
        dedup(window.iter().cloned().chain(through.iter().map(|c| (*c).clone())).chain(extra))
    }

    pub fn encode_sd(&self, a: &SdElement) -> Value {
        json!({"g": self.encode_group(&a.g), "p": self.semigroup().encode(&a.p)})
    }

    pub fn decode_sd(&self, v: &Value) -> Result<SdElement> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| AlgebraError::Parse(format!("missing field {k:?} in {v}")))
        };
        Ok(SdElement::new(self.decode_group(field("g")?)?, self.semigroup().decode(field("p")?)?))
    }

    /// Reads `"g,p"`, splitting at the first comma outside brackets and quotes.
    pub fn parse_sd(&self, s: &str) -> Result<SdElement> {
        let (g, p) = split_top_level(s)
            .ok_or_else(|| AlgebraError::Parse(format!("expected \"g,p\", got {s:?}")))?;
        Ok(SdElement::new(self.parse_group(g)?, self.semigroup().parse(p)?))
    }

    pub fn encode_ideal(&self, outcome: &IdealOutcome) -> Value {
        match outcome {
            IdealOutcome::Empty => json!({"kind": "empty"}),
            IdealOutcome::Principal(a) => json!({
                "kind": "principal",
                "g": self.encode_group(&a.g),
                "p": self.semigroup().encode(&a.p),
            }),
        }
    }
}

fn dedup(items: impl IntoIterator<Item = SdElement>) -> Vec<SdElement> {
    let mut seen = BTreeSet::new();
    items.into_iter().filter(|a| seen.insert(a.clone())).collect()
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut quoted = false;
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '[' | '{' | '(' if !quoted => depth += 1,
            ']' | '}' | ')' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}
