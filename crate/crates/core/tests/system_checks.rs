use rlcm_core::{catalog, MonomialAlgebra, ProductSystem, RegularRep, Report, SampleSpec};

fn spec() -> SampleSpec {
    SampleSpec {
        pairs: 60,
        g_samples: 20,
        basis_vectors: 10,
        prefix: 8,
        ..SampleSpec::default()
    }
}

fn assert_passed(name: &str, report: &Report) {
    assert!(
        report.passed,
        "{name} / {}: {}",
        report.suite,
        serde_json::to_string_pretty(&report.failures).unwrap()
    );
}

#[test]
fn axioms_hold_for_every_builtin() {
    for name in catalog::NAMES {
        let sys = catalog::system(name).unwrap();
        assert_passed(name, &sys.verify_axioms(&spec()));
    }
}

#[test]
fn li_relations_hold_for_every_builtin() {
    for name in catalog::NAMES {
        let sys = catalog::system(name).unwrap();
        assert_passed(name, &RegularRep::new(&sys).check_li_relations(&spec()));
    }
}

#[test]
fn product_system_checks_hold_for_every_builtin() {
    for name in catalog::NAMES {
        let sys = catalog::system(name).unwrap();
        let ps = ProductSystem::new(&sys);
        assert_passed(name, &ps.check_nica_covariance(&spec()));
        assert_passed(name, &ps.check_generator_relations(&spec()));
        assert_passed(name, &ps.check_fibre_structure(&spec()));
    }
}

#[test]
fn reports_are_deterministic() {
    let sys = catalog::system("shift-z2-f2").unwrap();
    let ps = ProductSystem::new(&sys);
    let a = ps.check_nica_covariance(&spec()).to_json();
    let b = ps.check_nica_covariance(&spec()).to_json();
    assert_eq!(a, b);
}

#[test]
fn identity_monomial_is_total_on_windows() {
    for name in catalog::NAMES {
        let sys = catalog::system(name).unwrap();
        let rep = RegularRep::new(&sys);
        let id = rep.as_partial_map(&MonomialAlgebra::new(&sys).identity());
        for s in sys.window(&spec()) {
            assert_eq!(rep.eval(&id, &s).as_ref(), Some(&s), "{name}");
        }
    }
}

#[test]
fn unit_fibres_of_integer_shifts_have_one_representative() {
    let sys = catalog::system("shift-z-n").unwrap();
    let one = sys.semigroup().identity();
    assert_eq!(sys.transversal_all(&one).unwrap(), vec![sys.identity()]);
}
