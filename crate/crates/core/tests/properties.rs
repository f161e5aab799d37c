use proptest::prelude::*;

use invk_core::function::snap_to_integer;
use invk_core::quadrature::integrate;
use invk_core::{is_disjoint_covering, make_from_spec, parse_system, InvariantFunction};

const SMOOTH: &[&str] = &[
    "E1", "E2:m=1", "E2:m=2", "E2:m=3", "E5:a=2", "E5:a=1/2", "E6c:r=2,theta=1", "E6s:r=1/2,theta=1", "E7:r=1/2",
    "E8:r=2", "E9:r=1/2", "E13:s=-1", "E13:s=-2",
];

fn sum_n(f: &InvariantFunction, x: f64, y: f64, n: usize) -> f64 {
    (0..n).map(|r| f.eval(x + r as f64 * y, n as f64 * y).unwrap()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smooth_entries_replicate(idx in 0..SMOOTH.len(), u in -3.0f64..3.0, y in 0.25f64..4.0, n in 1usize..8) {
        let f = make_from_spec(SMOOTH[idx]).unwrap();
        let x = u * y;
        let rhs = f.eval(x, y).unwrap();
        let lhs = sum_n(&f, x, y, n);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0), "{} at ({x}, {y}), n={n}: {lhs} vs {rhs}", SMOOTH[idx]);
    }

    #[test]
    fn floor_entry_replicates_off_lattice(u in -5.0f64..5.0, y in 0.1f64..10.0, n in 1usize..12) {
        let f = make_from_spec("E3a").unwrap();
        let x = u * y;
        prop_assume!(f.singular_distance(x, y) > 1e-6);
        // Hermite: Σ ⌊(u + r)/n⌋ = ⌊u⌋ holds away from the singular set for every n
        let lhs = sum_n(&f, x, y, n);
        prop_assert_eq!(lhs, f.eval(x, y).unwrap());
    }

    #[test]
    fn snapping_is_idempotent(k in -1_000_000i64..1_000_000, d in -1e-12f64..1e-12) {
        let u = k as f64 + d;
        prop_assert_eq!(snap_to_integer(u), Some(k as f64));
        prop_assert_eq!(snap_to_integer(k as f64 + 0.25), None);
    }

    #[test]
    fn quadrature_is_additive(a in -2.0f64..0.0, m in 0.0f64..1.0, b in 1.0f64..3.0) {
        let f = |t: f64| (3.0 * t).sin() + t * t;
        let whole = integrate(f, a, b, 1e-12, &[]).value;
        let parts = integrate(f, a, m, 1e-12, &[]).value + integrate(f, m, b, 1e-12, &[]).value;
        prop_assert!((whole - parts).abs() < 1e-10);
        let reversed = integrate(f, b, a, 1e-12, &[]).value;
        prop_assert!((whole + reversed).abs() < 1e-10);
    }

    #[test]
    fn refined_partitions_are_accepted(n in 1u64..12, k in 1u64..5) {
        // split residue 0 (mod n) into k classes mod n·k
        let mut classes: Vec<String> = (1..n).map(|a| format!("{a}/{n}")).collect();
        classes.extend((0..k).map(|j| format!("{}/{}", j * n, n * k)));
        let sys = parse_system(&classes.join(",")).unwrap();
        let d = is_disjoint_covering(&sys).unwrap();
        prop_assert!(d.accepted);
        prop_assert!(d.density_is_one);
    }

    #[test]
    fn dropping_a_class_leaves_a_hole(n in 2u64..30, drop in 0u64..30) {
        let drop = drop % n;
        let text: Vec<String> = (0..n).filter(|&a| a != drop).map(|a| format!("{a}/{n}")).collect();
        let d = is_disjoint_covering(&parse_system(&text.join(",")).unwrap()).unwrap();
        prop_assert!(!d.accepted);
        prop_assert_eq!(d.witness, Some(drop));
    }

    #[test]
    fn residues_are_reduced(a in -10_000i64..10_000, n in 1u64..500) {
        let sys = parse_system(&format!("{a}/{n}")).unwrap();
        let c = sys.classes()[0];
        prop_assert!(c.a < c.n);
        prop_assert_eq!((c.a as i64 - a).rem_euclid(n as i64), 0);
    }
}
