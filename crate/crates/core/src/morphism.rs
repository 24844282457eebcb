//! Morphisms `(φ_G, φ_P)` of algebraic dynamical systems, their admissibility, and
//! the induced homomorphism `φ_G ⋊ φ_P` of semidirect products.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::dynamics::{Action, DynamicalSystem};
use crate::error::{AlgebraError, Result};
use crate::group::GroupElement;
use crate::report::Report;
use crate::sample::SampleSpec;
use crate::semidirect::{IdealOutcome, SdElement};
use crate::semigroup::{Labels, RightLcm, Semigroup, SemigroupElement};

/// How `φ_G` acts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupMap {
    Identity,
    /// Multiplication by a fixed ring element (integer or Gaussian groups).
    Scale(GroupElement),
    /// Everything to the identity.
    Trivial,
    /// `f ↦ Σ_x f(x)·δ_{φ_P(x)}` between shift groups.
    Pushforward,
}

/// `φ_P`, given by the images of the source generators in generator order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupMap {
    images: Vec<SemigroupElement>,
}

impl SemigroupMap {
    pub fn from_images(source: &Semigroup, target: &Semigroup, images: Vec<SemigroupElement>) -> Result<Self> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(AlgebraError::InvalidElement(format!(
                "{} generators need {} images, got {}",
                source.name(),
                gens.len(),
                images.len()
            )));
        }
        for img in &images {
            target.check(img)?;
        }
        let map = SemigroupMap { images };
        if let Semigroup::Lattice(_) = source {
            let commute = map.images.iter().enumerate().all(|(i, a)| {
                map.images[i + 1..]
                    .iter()
                    .all(|b| target.compose_unchecked(a, b) == target.compose_unchecked(b, a))
            });
            if !commute {
                return Err(AlgebraError::InvalidElement(format!(
                    "images of the generators of the commutative {} do not commute",
                    source.name()
                )));
            }
            if source.unit_order() > 1 {
                let unit_img = power(target, &map.images[0], source.unit_order() as u32);
                if unit_img != target.identity() {
                    return Err(AlgebraError::InvalidElement(format!(
                        "the unit generator has order {} but its image does not",
                        source.unit_order()
                    )));
                }
            }
        }
        Ok(map)
    }

    pub fn identity(sg: &Semigroup) -> Self {
        SemigroupMap {
            images: sg.generators(),
        }
    }

    /// Everything to `1`.
    pub fn collapse(source: &Semigroup, target: &Semigroup) -> Self {
        SemigroupMap {
            images: vec![target.identity(); source.generators().len()],
        }
    }

    /// Sends each generator to the target element with the same integer or
    /// Gaussian value, as for inclusions of subsemigroups.
    pub fn by_value(source: &Semigroup, target: &Semigroup) -> Result<Self> {
        let images = source
            .generators()
            .iter()
            .map(|g| match source.labels() {
                Some(Labels::Integer(_)) => target.from_int_value(&source.int_value(g).expect("integer labels")),
                Some(Labels::Gaussian(_)) => target.from_gauss_value(&source.gauss_value(g).expect("Gaussian labels")),
                _ => Err(AlgebraError::Contract(format!("{} has no values to match", source.name()))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(source, target, images)
    }

    pub fn images(&self) -> &[SemigroupElement] {
        &self.images
    }

    pub(crate) fn apply(&self, source: &Semigroup, target: &Semigroup, p: &SemigroupElement) -> SemigroupElement {
        let mut out = target.identity();
        match p {
            SemigroupElement::Lattice { unit, exps } => {
                let offset = usize::from(source.unit_order() > 1);
                if offset == 1 {
                    out = power(target, &self.images[0], u32::from(*unit));
                }
                for (img, e) in self.images[offset..].iter().zip(exps) {
                    out = target.compose_unchecked(&out, &power(target, img, *e));
                }
            }
            SemigroupElement::Word(w) => {
                for c in w {
                    out = target.compose_unchecked(&out, &self.images[usize::from(*c)]);
                }
            }
        }
        out
    }
}

fn power(sg: &Semigroup, p: &SemigroupElement, n: u32) -> SemigroupElement {
    (0..n).fold(sg.identity(), |acc, _| sg.compose_unchecked(&acc, p))
}

/// What a bounded search found about `φ_P` on balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageFindings {
    pub search_radius: usize,
    pub target_radius: usize,
    pub surjective_on_ball: bool,
    /// Target ball elements with no preimage in the source search ball.
    pub missing: Vec<SemigroupElement>,
    pub injective_on_ball: bool,
    /// Colliding source pairs, in ball order, at most eight.
    pub collisions: Vec<(SemigroupElement, SemigroupElement)>,
}

const MAX_LISTED: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdsMorphism {
    pub source: DynamicalSystem,
    pub target: DynamicalSystem,
    pub phi_g: GroupMap,
    pub phi_p: SemigroupMap,
}

impl AdsMorphism {
    pub fn new(source: DynamicalSystem, target: DynamicalSystem, phi_g: GroupMap, phi_p: SemigroupMap) -> Result<Self> {
        let ok = match &phi_g {
            GroupMap::Identity => source.group_name() == target.group_name(),
            GroupMap::Scale(c) => matches!(
                (source.action(), target.action(), c),
                (Action::IntMult, Action::IntMult, GroupElement::Int(_))
                    | (Action::GaussMult, Action::GaussMult, GroupElement::Gauss(_))
            ),
            GroupMap::Trivial => true,
            GroupMap::Pushforward => matches!(
                (source.action(), target.action()),
                (Action::Shift { base: a }, Action::Shift { base: b }) if a == b
            ),
        };
        if !ok {
            return Err(AlgebraError::Contract(format!(
                "{phi_g:?} cannot map {} to {}",
                source.group_name(),
                target.group_name()
            )));
        }
        if phi_p.images.len() != source.semigroup().generators().len() {
            return Err(AlgebraError::Contract("semigroup map does not fit the source".into()));
        }
        Ok(AdsMorphism {
            source,
            target,
            phi_g,
            phi_p,
        })
    }

    /// `(id, id)` on one system.
    pub fn identity(sys: &DynamicalSystem) -> Self {
        AdsMorphism {
            source: sys.clone(),
            target: sys.clone(),
            phi_g: GroupMap::Identity,
            phi_p: SemigroupMap::identity(sys.semigroup()),
        }
    }

    pub fn map_group(&self, g: &GroupElement) -> GroupElement {
        match (&self.phi_g, g) {
            (GroupMap::Identity, _) => g.clone(),
            (GroupMap::Scale(GroupElement::Int(c)), GroupElement::Int(x)) => GroupElement::Int(c * x),
            (GroupMap::Scale(GroupElement::Gauss(c)), GroupElement::Gauss(x)) => GroupElement::Gauss(c * x),
            (GroupMap::Pushforward, GroupElement::Shift(f)) => {
                let mut out = self.target.identity();
                for (x, v) in f {
                    let moved = self.map_semigroup(x);
                    out = self.target.op(&out, &GroupElement::Shift(BTreeMap::from([(moved, v.clone())])));
                }
                out
            }
            _ => self.target.identity(),
        }
    }

    pub fn map_semigroup(&self, p: &SemigroupElement) -> SemigroupElement {
        self.phi_p.apply(self.source.semigroup(), self.target.semigroup(), p)
    }

    /// `φ_G ⋊ φ_P`.
    pub fn induced_sd_hom(&self, a: &SdElement) -> SdElement {
        SdElement::new(self.map_group(&a.g), self.map_semigroup(&a.p))
    }

    fn spec_json(&self, spec: &SampleSpec) -> Value {
        json!({"source": self.source.name(), "target": self.target.name(), "sample": spec.to_json()})
    }

    fn samples(&self, spec: &SampleSpec, stream: &str) -> (Vec<GroupElement>, Vec<SemigroupElement>) {
        (
            self.source.sample_group(&mut spec.rng_for(stream), spec.g_samples),
            self.source.semigroup().enumerate_ball(spec.p_ball),
        )
    }

    /// Homomorphism of groups, identity-preserving homomorphism of semigroups, and
    /// `φ_G∘θ_{1,p} = θ_{2,φ_P(p)}∘φ_G`, on samples.
    pub fn check_morphism(&self, spec: &SampleSpec) -> Report {
        let (src, tgt) = (&self.source, &self.target);
        let mut report = Report::new("morphism", self.spec_json(spec));
        let mut rng = spec.rng_for("morphism");
        let (gs, ball) = self.samples(spec, "morphism-pool");
        {
            let mut t = report.begin("group-homomorphism");
            t.record(
                tgt.is_identity(&self.map_group(&src.identity())),
                || json!({"image_of_identity": tgt.encode_group(&self.map_group(&src.identity()))}),
                || json!({}),
            );
            for _ in 0..spec.pairs {
                let a = gs.choose(&mut rng).expect("group samples");
                let b = gs.choose(&mut rng).expect("group samples");
                let lhs = self.map_group(&src.op(a, b));
                let rhs = tgt.op(&self.map_group(a), &self.map_group(b));
                t.record(
                    lhs == rhs,
                    || json!({"lhs": tgt.encode_group(&lhs), "rhs": tgt.encode_group(&rhs)}),
                    || json!({"g": src.encode_group(a), "h": src.encode_group(b)}),
                );
            }
        }
        {
            let mut t = report.begin("semigroup-homomorphism");
            let (s1, s2) = (src.semigroup(), tgt.semigroup());
            t.record(
                self.map_semigroup(&s1.identity()) == s2.identity(),
                || json!({"image_of_identity": s2.encode(&self.map_semigroup(&s1.identity()))}),
                || json!({}),
            );
            for p in &ball {
                for q in &ball {
                    let lhs = self.map_semigroup(&s1.compose_unchecked(p, q));
                    let rhs = s2.compose_unchecked(&self.map_semigroup(p), &self.map_semigroup(q));
                    t.record(
                        lhs == rhs,
                        || json!({"lhs": s2.encode(&lhs), "rhs": s2.encode(&rhs)}),
                        || json!({"p": s1.encode(p), "q": s1.encode(q)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("equivariance");
            for g in &gs {
                for p in &ball {
                    let lhs = self.map_group(&src.theta(p, g));
                    let rhs = tgt.theta(&self.map_semigroup(p), &self.map_group(g));
                    t.record(
                        lhs == rhs,
                        || json!({"lhs": tgt.encode_group(&lhs), "rhs": tgt.encode_group(&rhs)}),
                        || json!({"g": src.encode_group(g), "p": src.semigroup().encode(p)}),
                    );
                }
            }
        }
        report
    }

    /// The ideal condition `φ(p)P₂ ∩ φ(q)P₂ = φ(pP₁ ∩ qP₁)P₂` ("lcm") and the
    /// double-coset condition
    /// `φ_G⁻¹(φ_G(G₁) ∩ θ_{2,φ(p)}(G₂)θ_{2,φ(q)}(G₂)) = θ_{1,p}(G₁)θ_{1,q}(G₁)`
    /// ("double-coset"), on samples, together with their unconditional `⊇` halves.
    pub fn check_admissible(&self, spec: &SampleSpec) -> Report {
        let (src, tgt) = (&self.source, &self.target);
        let (s1, s2) = (src.semigroup(), tgt.semigroup());
        let mut report = Report::new("admissible", self.spec_json(spec));
        if s1.is_group() {
            for check in ["lcm", "double-coset"] {
                report
                    .begin(check)
                    .note("source semigroup is a group, so every morphism is admissible");
            }
            return report;
        }
        let (gs, ball) = self.samples(spec, "admissible-pool");
        let mut containment_failures = Vec::new();
        {
            let mut t = report.begin("lcm");
            for p in &ball {
                for q in &ball {
                    let (fp, fq) = (self.map_semigroup(p), self.map_semigroup(q));
                    let image_meet = s2.right_lcm(&fp, &fq).expect("mapped elements");
                    let (ok, contained) = match (s1.right_lcm(p, q).expect("ball elements"), &image_meet) {
                        (RightLcm::Disjoint, RightLcm::Disjoint) => (true, true),
                        (RightLcm::Disjoint, RightLcm::Meet { .. }) => (false, true),
                        (RightLcm::Meet { .. }, RightLcm::Disjoint) => (false, false),
                        (RightLcm::Meet { r, .. }, RightLcm::Meet { r: r2, .. }) => {
                            let fr = self.map_semigroup(&r);
                            let contained = s2.divides_unchecked(r2, &fr).is_some();
                            (contained && s2.divides_unchecked(&fr, r2).is_some(), contained)
                        }
                    };
                    let inputs = || json!({"p": s1.encode(p), "q": s1.encode(q)});
                    if !contained {
                        containment_failures.push(inputs());
                    }
                    t.record(
                        ok,
                        || match &image_meet {
                            RightLcm::Meet { r, .. } => json!({"image_meet": s2.encode(r)}),
                            RightLcm::Disjoint => json!({"image_meet": "empty"}),
                        },
                        inputs,
                    );
                }
            }
        }
        {
            let mut t = report.begin("double-coset");
            for p in &ball {
                for q in &ball {
                    if s1.right_lcm(p, q).expect("ball elements").is_disjoint() {
                        continue;
                    }
                    let (fp, fq) = (self.map_semigroup(p), self.map_semigroup(q));
                    for g in &gs {
                        let in_source = src.solve(p, q, g).is_some();
                        let in_target = tgt.solve(&fp, &fq, &self.map_group(g)).is_some();
                        let inputs = || json!({"g": src.encode_group(g), "p": s1.encode(p), "q": s1.encode(q)});
                        if in_source && !in_target {
                            containment_failures.push(inputs());
                        }
                        t.record(
                            in_source == in_target,
                            || json!({"g": src.encode_group(g), "in_preimage": in_target, "in_double_coset": in_source}),
                            inputs,
                        );
                    }
                }
            }
        }
        if matches!(s1, Semigroup::Free { .. }) {
            let mut t = report.begin("single-fibre");
            t.note("free source: equivalent to the double-coset condition");
            for p in &ball {
                let fp = self.map_semigroup(p);
                for g in &gs {
                    let in_source = src.theta_pre(p, g).is_some();
                    let in_target = tgt.theta_pre(&fp, &self.map_group(g)).is_some();
                    t.record(
                        in_source == in_target,
                        || json!({"g": src.encode_group(g), "in_preimage": in_target, "in_image": in_source}),
                        || json!({"g": src.encode_group(g), "p": s1.encode(p)}),
                    );
                }
            }
        }
        {
            let mut t = report.begin("containment");
            if containment_failures.is_empty() {
                t.pass();
            }
            for inputs in containment_failures {
                t.fail(json!("the image-side set does not contain the source-side set"), inputs);
            }
        }
        report
    }

    /// `φ(a)S₂ ∩ φ(b)S₂ = φ(aS₁ ∩ bS₁)S₂` and `φ(ab) = φ(a)φ(b)` on sampled pairs.
    pub fn ideal_functoriality_check(&self, spec: &SampleSpec) -> Report {
        let (src, tgt) = (&self.source, &self.target);
        let mut report = Report::new("ideal-functoriality", self.spec_json(spec));
        let mut rng = spec.rng_for("ideal-functoriality");
        let (gs, ball) = self.samples(spec, "ideal-functoriality-pool");
        let elements: Vec<SdElement> = gs
            .iter()
            .flat_map(|g| ball.iter().map(move |p| SdElement::new(g.clone(), p.clone())))
            .collect();
        let pairs: Vec<(&SdElement, &SdElement)> = (0..spec.pairs)
            .map(|_| {
                (
                    elements.choose(&mut rng).expect("elements"),
                    elements.choose(&mut rng).expect("elements"),
                )
            })
            .collect();
        let inputs = |a: &SdElement, b: &SdElement| json!({"a": src.encode_sd(a), "b": src.encode_sd(b)});
        {
            let mut t = report.begin("homomorphism");
            for (a, b) in &pairs {
                let lhs = self.induced_sd_hom(&src.sd_mul(a, b));
                let rhs = tgt.sd_mul(&self.induced_sd_hom(a), &self.induced_sd_hom(b));
                t.record(
                    lhs == rhs,
                    || json!({"lhs": tgt.encode_sd(&lhs), "rhs": tgt.encode_sd(&rhs)}),
                    || inputs(a, b),
                );
            }
        }
        {
            let mut t = report.begin("intersection");
            for (a, b) in &pairs {
                let image_meet = tgt.intersect(&self.induced_sd_hom(a), &self.induced_sd_hom(b));
                let source_meet = src.intersect(a, b);
                let ok = match (&source_meet, &image_meet) {
                    (IdealOutcome::Empty, IdealOutcome::Empty) => true,
                    (IdealOutcome::Principal(e), IdealOutcome::Principal(e2)) => {
                        tgt.same_ideal(&self.induced_sd_hom(e), e2)
                    }
                    _ => false,
                };
                t.record(
                    ok,
                    || {
                        json!({
                            "image_intersection": tgt.encode_ideal(&image_meet),
                            "source_intersection": src.encode_ideal(&source_meet),
                        })
                    },
                    || inputs(a, b),
                );
            }
        }
        report
    }

    /// Bounded surjectivity and injectivity of `φ_P`: target elements of the
    /// `p_ball` ball are looked up among images of the `search_radius` ball.
    pub fn hom_surjectivity_injectivity(&self, spec: &SampleSpec) -> ImageFindings {
        let source_ball = self.source.semigroup().enumerate_ball(spec.search_radius.max(spec.p_ball));
        let images: Vec<SemigroupElement> = source_ball.iter().map(|p| self.map_semigroup(p)).collect();
        let image_set: BTreeSet<&SemigroupElement> = images.iter().collect();
        let missing: Vec<SemigroupElement> = self
            .target
            .semigroup()
            .enumerate_ball(spec.p_ball)
            .into_iter()
            .filter(|t| !image_set.contains(t))
            .collect();
        let mut collisions = Vec::new();
        let mut injective = true;
        for i in 0..source_ball.len() {
            for j in i + 1..source_ball.len() {
                if images[i] == images[j] {
                    injective = false;
                    if collisions.len() < MAX_LISTED {
                        collisions.push((source_ball[i].clone(), source_ball[j].clone()));
                    }
                }
            }
        }
        ImageFindings {
            search_radius: spec.search_radius.max(spec.p_ball),
            target_radius: spec.p_ball,
            surjective_on_ball: missing.is_empty(),
            missing: missing.into_iter().take(MAX_LISTED).collect(),
            injective_on_ball: injective,
            collisions,
        }
    }

    pub fn encode_findings(&self, f: &ImageFindings) -> Value {
        let (s1, s2) = (self.source.semigroup(), self.target.semigroup());
        json!({
            "search_radius": f.search_radius,
            "target_radius": f.target_radius,
            "surjective_on_ball": f.surjective_on_ball,
            "missing": f.missing.iter().map(|t| s2.encode(t)).collect::<Vec<_>>(),
            "injective_on_ball": f.injective_on_ball,
            "collisions": f.collisions.iter().map(|(a, b)| json!([s1.encode(a), s1.encode(b)])).collect::<Vec<_>>(),
        })
    }
}
