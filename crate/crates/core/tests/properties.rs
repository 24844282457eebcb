use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rlcm_core::{
    catalog, DynamicalSystem, FibreVector, FockVector, GroupAlgebraElement, GroupElement, IdealOutcome, Monomial,
    MonomialAlgebra, ProductSystem, RankOne, RegularRep, RightLcm, SampleSpec, Scalar, SdElement, SemigroupElement,
};

const SYSTEMS: &[&str] = &[
    "z-2-3",
    "z-neg2-3",
    "z-neg1-2-3",
    "zi-i-1+i-2+i",
    "shift-z2-f2",
    "shift-z2-n2",
    "shift-z-n",
    "trivial-n2",
];

struct Pool {
    sys: DynamicalSystem,
    gs: Vec<GroupElement>,
    ball: Vec<SemigroupElement>,
    big_ball: Vec<SemigroupElement>,
    /// Multipliers reaching every element of `x·P` inside `big_ball`.
    multipliers: Vec<SemigroupElement>,
}

fn pools() -> &'static [Pool] {
    static POOLS: OnceLock<Vec<Pool>> = OnceLock::new();
    POOLS.get_or_init(|| {
        let spec = SampleSpec::default();
        SYSTEMS
            .iter()
            .map(|name| {
                let sys = catalog::system(name).unwrap();
                let gs = sys.sample_group(&mut spec.rng_for("properties"), 40);
                let ball = sys.semigroup().enumerate_ball(2);
                let big_ball = sys.semigroup().enumerate_ball(4);
                let multipliers = sys.semigroup().enumerate_ball(4 + sys.semigroup().unit_order());
                Pool { sys, gs, ball, big_ball, multipliers }
            })
            .collect()
    })
}

/// A system index plus raw indices resolved modulo the pool sizes.
fn picks(n: usize) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..SYSTEMS.len(), proptest::collection::vec(any::<usize>(), n))
}

fn g(pool: &Pool, i: usize) -> GroupElement {
    pool.gs[i % pool.gs.len()].clone()
}

fn p(pool: &Pool, i: usize) -> SemigroupElement {
    pool.ball[i % pool.ball.len()].clone()
}

fn sd(pool: &Pool, i: usize, j: usize) -> SdElement {
    SdElement::new(g(pool, i), p(pool, j))
}

fn mono(pool: &Pool, idx: &[usize]) -> Monomial {
    MonomialAlgebra::new(&pool.sys)
        .canonicalize(&g(pool, idx[0]), &p(pool, idx[1]), &p(pool, idx[2]), &g(pool, idx[3]))
        .unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn right_lcm_matches_principal_ideals((s, idx) in picks(2)) {
        let pool = &pools()[s];
        let sg = pool.sys.semigroup();
        let (a, b) = (p(pool, idx[0]), p(pool, idx[1]));
        let ideal = |x: &SemigroupElement| -> BTreeSet<SemigroupElement> {
            pool.multipliers.iter().map(|y| sg.compose(x, y).unwrap()).collect()
        };
        let (ia, ib) = (ideal(&a), ideal(&b));
        let meet: BTreeSet<_> = ia.intersection(&ib).filter(|s| pool.big_ball.contains(s)).cloned().collect();
        match sg.right_lcm(&a, &b).unwrap() {
            RightLcm::Disjoint => prop_assert!(meet.is_empty()),
            RightLcm::Meet { r, p_comp, q_comp } => {
                prop_assert_eq!(sg.compose(&a, &p_comp).unwrap(), r.clone());
                prop_assert_eq!(sg.compose(&b, &q_comp).unwrap(), r.clone());
                let ir = ideal(&r);
                let predicted: BTreeSet<_> = ir.into_iter().filter(|s| pool.big_ball.contains(s)).collect();
                prop_assert_eq!(meet, predicted);
            }
        }
    }

    #[test]
    fn semigroup_laws((s, idx) in picks(3)) {
        let pool = &pools()[s];
        let sg = pool.sys.semigroup();
        let (a, b, c) = (p(pool, idx[0]), p(pool, idx[1]), p(pool, idx[2]));
        let ab_c = sg.compose(&sg.compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = sg.compose(&a, &sg.compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(sg.compose(&a, &sg.identity()).unwrap(), a.clone());
        prop_assert_eq!(sg.compose(&sg.identity(), &a).unwrap(), a.clone());
        prop_assert_eq!(sg.divides(&a, &sg.compose(&a, &b).unwrap()).unwrap(), Some(b.clone()));
        let has_inverse = sg.units().iter().any(|u| sg.compose(&a, u).unwrap() == sg.identity());
        prop_assert_eq!(sg.is_unit(&a), has_inverse);
    }

    #[test]
    fn endomorphisms_are_injective_and_transversals_canonical((s, idx) in picks(2)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let (x, q) = (g(pool, idx[0]), p(pool, idx[1]));
        let image = sys.apply_endo(&q, &x).unwrap();
        prop_assert_eq!(sys.preimage(&q, &image).unwrap(), Some(x.clone()));
        let (t, k) = sys.canon_rep(&q, &x).unwrap();
        prop_assert_eq!(sys.op(&t, &sys.apply_endo(&q, &k).unwrap()), x.clone());
        prop_assert_eq!(sys.canon_rep(&q, &t).unwrap(), (t.clone(), sys.identity()));
        if sys.transversal_is_finite(&q) {
            prop_assert!(sys.transversal_all(&q).unwrap().contains(&t));
        }
    }

    #[test]
    fn transversal_prefixes_are_pairwise_inequivalent((s, idx) in picks(1)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let q = p(pool, idx[0]);
        let prefix = sys.transversal_prefix(&q, 12).unwrap();
        for (i, t) in prefix.iter().enumerate() {
            for u in &prefix[i + 1..] {
                prop_assert_eq!(sys.preimage(&q, &sys.quotient(t, u)).unwrap(), None);
            }
        }
        if let (Some(n), rlcm_core::Action::IntMult) = (sys.index(&q), sys.action()) {
            prop_assert_eq!(num::BigInt::from(sys.transversal_all(&q).unwrap().len()), n);
        }
    }

    #[test]
    fn double_factorizations_are_unique_modulo_the_lcm((s, idx) in picks(4)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let (a, b) = (p(pool, idx[0]), p(pool, idx[1]));
        let x = sys.op(
            &sys.apply_endo(&a, &g(pool, idx[2])).unwrap(),
            &sys.inverse(&sys.apply_endo(&b, &g(pool, idx[3])).unwrap()),
        );
        let solved = sys.solve_double(&a, &b, &x).unwrap();
        let raw = sys.solve_double_raw(&a, &b, &x).unwrap();
        prop_assert!(solved.is_some() && raw.is_some());
        let check = |(k, l): &(GroupElement, GroupElement)| {
            sys.op(&sys.apply_endo(&a, k).unwrap(), &sys.inverse(&sys.apply_endo(&b, l).unwrap())) == x
        };
        let (solved, raw) = (solved.unwrap(), raw.unwrap());
        prop_assert!(check(&solved) && check(&raw));
        if let RightLcm::Meet { p_comp, q_comp, .. } = sys.semigroup().right_lcm(&a, &b).unwrap() {
            prop_assert!(sys.preimage(&p_comp, &sys.quotient(&solved.0, &raw.0)).unwrap().is_some());
            prop_assert!(sys.preimage(&q_comp, &sys.quotient(&solved.1, &raw.1)).unwrap().is_some());
        }
    }

    #[test]
    fn semidirect_laws((s, idx) in picks(6)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let (a, b, c) = (sd(pool, idx[0], idx[1]), sd(pool, idx[2], idx[3]), sd(pool, idx[4], idx[5]));
        let ab_c = sys.sd_compose(&sys.sd_compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = sys.sd_compose(&a, &sys.sd_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(sys.sd_divides(&a, &sys.sd_compose(&a, &b).unwrap()).unwrap(), Some(b.clone()));
        match (sys.ideal_intersect(&a, &b).unwrap(), sys.ideal_intersect(&b, &a).unwrap()) {
            (IdealOutcome::Empty, IdealOutcome::Empty) => {}
            (IdealOutcome::Principal(e), IdealOutcome::Principal(f)) => prop_assert!(sys.same_ideal(&e, &f)),
            (x, y) => prop_assert!(false, "asymmetric intersection {:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn monomial_calculus((s, idx) in picks(12)) {
        let pool = &pools()[s];
        let alg = MonomialAlgebra::new(&pool.sys);
        let (m1, m2, m3) = (mono(pool, &idx[0..4]), mono(pool, &idx[4..8]), mono(pool, &idx[8..12]));
        prop_assert!(alg.is_canonical(&m1));
        if let Monomial::Term { g, p, q, h } = &m1 {
            prop_assert_eq!(&alg.canonicalize(g, p, q, h).unwrap(), &m1);
        }
        let left = alg.mult(&alg.mult(&m1, &m2).unwrap(), &m3).unwrap();
        let right = alg.mult(&m1, &alg.mult(&m2, &m3).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let adj = alg.adjoint(&alg.mult(&m1, &m2).unwrap()).unwrap();
        let anti = alg.mult(&alg.adjoint(&m2).unwrap(), &alg.adjoint(&m1).unwrap()).unwrap();
        prop_assert_eq!(adj, anti);
        prop_assert_eq!(alg.adjoint(&alg.adjoint(&m1).unwrap()).unwrap(), m1.clone());
    }

    #[test]
    fn regular_representation_is_multiplicative((s, idx) in picks(8)) {
        let pool = &pools()[s];
        let alg = MonomialAlgebra::new(&pool.sys);
        let rep = RegularRep::new(&pool.sys);
        let (m1, m2) = (mono(pool, &idx[0..4]), mono(pool, &idx[4..8]));
        let product = alg.mult(&m1, &m2).unwrap();
        let composed = rep.compose(&rep.as_partial_map(&m1), &rep.as_partial_map(&m2));
        prop_assert!(rep.same_map(&rep.as_partial_map(&product), &composed));
        prop_assert_eq!(product.is_zero(), composed == rlcm_core::PartialInjection::Empty);
        let window = pool.sys.window(&SampleSpec { g_samples: 10, p_ball: 2, ..SampleSpec::default() });
        prop_assert!(rep.injective_on_window(&rep.as_partial_map(&m1), &window));
    }

    #[test]
    fn fibre_inner_products((s, idx) in picks(8)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let ps = ProductSystem::new(sys);
        let q = p(pool, idx[0]);
        let vec_at = |fibre: &SemigroupElement, i: usize, j: usize| {
            ps.basis(fibre, &g(pool, i)).add(&ps.basis(fibre, &g(pool, j)).scale(&rlcm_core::scalar::rational(1, 2, 1, 3))).unwrap()
        };
        let (xi, eta, mu) = (vec_at(&q, idx[1], idx[2]), vec_at(&q, idx[3], idx[4]), vec_at(&q, idx[5], idx[6]));
        // ⟨ξ,η⟩* = ⟨η,ξ⟩ with δ_g* = δ_{g⁻¹}.
        let star = |a: &GroupAlgebraElement| {
            a.terms().fold(GroupAlgebraElement::zero(), |acc, (x, c)| {
                acc.add(&GroupAlgebraElement::term(c.conj(), sys.inverse(x)))
            })
        };
        prop_assert_eq!(star(&ps.inner_product(&xi, &eta).unwrap()), ps.inner_product(&eta, &xi).unwrap());
        // ⟨Θ_{ξ,η} ζ, μ⟩ = ⟨ζ, Θ_{η,ξ} μ⟩.
        let op = RankOne { xi: xi.clone(), eta: eta.clone() };
        let zeta = vec_at(&q, idx[7], idx[1]);
        let lhs = ps.inner_product(&ps.rank_one_apply(&op, &zeta).unwrap(), &mu).unwrap();
        let rhs = ps.inner_product(&zeta, &ps.rank_one_apply(&ps.rank_one_adjoint(&op), &mu).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fock_annihilation_after_creation_is_the_inner_product((s, idx) in picks(5)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let ps = ProductSystem::new(sys);
        let q = p(pool, idx[0]);
        let xi = ps.basis(&q, &g(pool, idx[1]));
        let eta = ps.basis(&q, &g(pool, idx[2]));
        let v = FockVector::basis(p(pool, idx[3]), g(pool, idx[4]));
        let lhs = ps.fock_annihilate(&xi, &ps.fock_create(&eta, &v));
        let rhs = ps
            .inner_product(&xi, &eta)
            .unwrap()
            .terms()
            .fold(FockVector::zero(), |acc, (k, c)| acc.add(&ps.fock_unitary(k, &v).scale(c)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn projections_onto_transversal_classes_reconstruct((s, idx) in picks(6)) {
        let pool = &pools()[s];
        let sys = &pool.sys;
        let ps = ProductSystem::new(sys);
        let q = p(pool, idx[0]);
        let prefix = sys.transversal_prefix(&q, 6).unwrap();
        let mut mu = FibreVector::zero(q.clone());
        for (n, i) in idx[1..].iter().enumerate() {
            let t = &prefix[i % prefix.len()];
            let x = sys.op(t, &sys.apply_endo(&q, &g(pool, *i)).unwrap());
            mu = mu.add(&ps.basis(&q, &x).scale(&rlcm_core::scalar::from_int(n as i64 + 1))).unwrap();
        }
        let mut sum = FibreVector::zero(q.clone());
        for t in &prefix {
            sum = sum.add(&ps.rank_one_apply(&ps.projection(t, &q), &mu).unwrap()).unwrap();
        }
        prop_assert_eq!(sum, mu);
    }
}

#[test]
fn scalar_coefficients_are_exact() {
    let half: Scalar = rlcm_core::scalar::rational(1, 2, 0, 1);
    assert_eq!(&half + &half, rlcm_core::scalar::one());
}
