mod common;

use common::RawFramework;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reqarg_core::af::ArgumentId;

fn preferred_members(raw: &RawFramework) -> Vec<Vec<ArgumentId>> {
    raw.framework()
        .preferred_extensions()
        .into_iter()
        .map(|e| e.sorted_members())
        .collect()
}

#[test]
fn matches_brute_force_on_random_frameworks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for density in [0.1, 0.2, 0.35] {
        for _ in 0..200 {
            let raw = RawFramework::random(&mut rng, 9, density, true);
            let af = raw.framework();
            assert_eq!(af.grounded_extension().members, raw.oracle_grounded(), "{raw:?}");
            assert_eq!(preferred_members(&raw), raw.oracle_preferred(), "{raw:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_extension_is_admissible_and_contains_grounded(seed in any::<u64>(), density in 0.05f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = RawFramework::random(&mut rng, 11, density, true);
        let af = raw.framework();
        let grounded = af.grounded_extension();
        prop_assert!(af.is_admissible(&grounded.members).unwrap());
        let preferred = af.preferred_extensions();
        prop_assert!(!preferred.is_empty());
        for ext in &preferred {
            prop_assert!(af.is_conflict_free(&ext.members).unwrap());
            prop_assert!(ext.members.iter().all(|a| af.defends(&ext.members, a).unwrap()));
            prop_assert!(grounded.members.is_subset(&ext.members));
        }
    }

    #[test]
    fn acyclic_frameworks_have_one_preferred_equal_to_grounded(seed in any::<u64>(), density in 0.05f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = RawFramework::random_dag(&mut rng, 12, density);
        let af = raw.framework();
        let preferred = af.preferred_extensions();
        prop_assert_eq!(preferred.len(), 1);
        prop_assert_eq!(&preferred[0].members, &af.grounded_extension().members);
        prop_assert_eq!(af.graph_stats(None).gci.unwrap_or(0.0), 0.0);
    }

    #[test]
    fn gci_zero_iff_no_cycle(seed in any::<u64>(), density in 0.0f64..0.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = RawFramework::random(&mut rng, 10, density, true);
        let af = raw.framework();
        let gci = af.graph_stats(None).gci.unwrap_or(0.0);
        prop_assert_eq!(gci == 0.0, !af.has_nontrivial_cycle());
    }

    #[test]
    fn output_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = RawFramework::random(&mut rng, 10, 0.25, false);
        let a = serde_json::to_string(&raw.framework().preferred_extensions()).unwrap();
        let b = serde_json::to_string(&raw.framework().preferred_extensions()).unwrap();
        prop_assert_eq!(a, b);
    }
}
