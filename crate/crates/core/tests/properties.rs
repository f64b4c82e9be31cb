use std::sync::Arc;

use proptest::prelude::*;

use cdgbench::derived::{derived_table, lq, semiderived_member};
use cdgbench::algebra::DeformedAlgebra;
use cdgbench::field::{Field, PrimeField, Rationals};
use cdgbench::filtration::{gr, is_n_acyclic, is_rn_free, structure_identities, FiltrationKind};
use cdgbench::fuzz::ModulePolicy;
use cdgbench::generators::{closed_form_comparison, corepresentability, duality_report, g_module, sod_membership, tria_objects};
use cdgbench::io::{module_value, parse_json, parse_module, render};
use cdgbench::module::{f_hom, hom_complex, CdgModule};
use cdgbench::resolution::{cocell_resolve, rnfree_resolve, semifree_resolve};
use cdgbench::workbench::{check_property, fuzz_instance};

const ORDERS: &[usize] = &[1, 2, 3];

type Instance<K> = (Arc<DeformedAlgebra<K>>, CdgModule<K>, CdgModule<K>);

fn parts<K: Field>(k: K, seed: u64, orders: &[usize], policy: &ModulePolicy) -> Instance<K> {
    let (_, a, _, m, other) = fuzz_instance(k, seed, orders, policy);
    (a, m, other)
}

fn instance(seed: u64) -> Instance<PrimeField> {
    parts(PrimeField::default(), seed, ORDERS, &ModulePolicy::small())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hom_differential_squares_to_zero(seed in any::<u64>()) {
        let (_, m, other) = instance(seed);
        let h = hom_complex(&m, &other).unwrap();
        prop_assert!(h.complex.differential().mul(h.complex.differential()).is_zero());
    }

    #[test]
    fn filtration_routes_agree(seed in any::<u64>()) {
        let (_, m, _) = instance(seed);
        prop_assert!(is_n_acyclic(&m).is_ok());
    }

    #[test]
    fn hom_from_gamma_matches_closed_form(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        for i in 0..=a.order() {
            prop_assert!(closed_form_comparison(&m, i).unwrap(), "i = {}", i);
        }
    }

    #[test]
    fn generators_detect_n_acyclicity(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        let probes = (0..=a.order()).all(|i| f_hom(&m, i).unwrap().is_acyclic());
        prop_assert_eq!(probes, is_n_acyclic(&m).unwrap().answer);
    }

    #[test]
    fn g_corepresents_reduction(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        let gm = g_module(&a).unwrap();
        prop_assert!(corepresentability(&gm, &m).unwrap().phi_quasi_iso);
    }

    #[test]
    fn triangle_is_exact(seed in any::<u64>()) {
        let (_, m, _) = instance(seed);
        let t = tria_objects(&m).unwrap();
        prop_assert!(t.report.all_pass(), "{:?}", t.report);
    }

    #[test]
    fn derived_functors_match_oracle(seed in any::<u64>()) {
        let (_, m, _) = instance(seed);
        let t = derived_table(&m, 4);
        prop_assert!(t.oracle_agrees && t.rk_shift_agrees && t.periodic, "{:?}", t);
        if is_rn_free(&m) {
            prop_assert!((1..=4).all(|i| lq(&m, i).dim() == 0));
        }
    }

    #[test]
    fn duality_isomorphisms(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        for i in 0..=a.order() {
            let d = duality_report(&m, i).unwrap();
            prop_assert!(d.all_pass(), "{:?}", d);
        }
    }

    #[test]
    fn sod_profile_is_gr_profile(seed in any::<u64>()) {
        let (_, m, _) = instance(seed);
        let s = sod_membership(&m).unwrap();
        prop_assert_eq!(&s.profile, &gr(&m, FiltrationKind::TAdic).unwrap().profile());
        if s.n_acyclic {
            prop_assert!(s.in_lower);
        }
    }

    #[test]
    fn n_acyclic_modules_are_semiacyclic(seed in any::<u64>()) {
        let (_, m, _) = instance(seed);
        let v = semiderived_member(&m).unwrap();
        if is_n_acyclic(&m).unwrap().answer {
            prop_assert!(v.member);
        }
        if is_rn_free(&m) {
            prop_assert!(v.member);
        }
    }

    #[test]
    fn structure_identities_hold(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        let n = a.order();
        for i in 0..=n + 1 {
            for j in 0..=n + 1 {
                let r = structure_identities(&m, i, j);
                prop_assert!(r.all_pass(), "{:?}", r);
            }
        }
    }

    #[test]
    fn trivial_fibrations_lift(seed in any::<u64>()) {
        let (a, m, other) = instance(seed);
        let gm = g_module(&a).unwrap();
        prop_assert!(check_property("fibration_lifting", &m, &other, &gm));
    }

    #[test]
    fn module_documents_round_trip(seed in any::<u64>()) {
        let (a, m, _) = instance(seed);
        let text = render(&module_value(&m));
        let back = parse_module(PrimeField::default(), &parse_json(&text).unwrap(), Some(a)).unwrap();
        prop_assert_eq!(back, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rational_hom_differential_squares_to_zero(seed in any::<u64>()) {
        let (_, m, other) = parts(Rationals, seed, &[1, 2], &ModulePolicy { max_dim: 10, ..ModulePolicy::default() });
        let h = hom_complex(&m, &other).unwrap();
        prop_assert!(h.complex.differential().mul(h.complex.differential()).is_zero());
        prop_assert!(is_n_acyclic(&m).is_ok());
    }

    #[test]
    fn resolutions_pass_window_checks(seed in any::<u64>()) {
        let (_, m, _) = parts(PrimeField::default(), seed, &[1, 2], &ModulePolicy { max_dim: 4, ..ModulePolicy::default() });
        for s in [1, 2] {
            let r = semifree_resolve(&m, None, s, (-1, 1)).unwrap();
            prop_assert!(r.report.all_pass(), "{:?}", r.report);
        }
        let c = cocell_resolve(&m, 1, (-1, 1)).unwrap();
        prop_assert!(c.report.all_pass(), "{:?}", c.report);
        let f = rnfree_resolve(&m, 3).unwrap();
        prop_assert!(f.report.all_pass(), "{:?}", f.report);
    }
}
