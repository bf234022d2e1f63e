use proptest::prelude::*;

use qosc::cli::parse_complex;
use qosc::coherent::overlap;
use qosc::fock::Truncation;
use qosc::hopf::{counit_residuals, Generator, HopfMaps};
use qosc::quantize::{commutator_residual, max_abs, quantize_monomial};
use qosc::{Complex64, DeformationParams};

fn params() -> impl Strategy<Value = DeformationParams> {
    (prop_oneof![0.2f64..0.9, 1.2f64..4.0], 0.3f64..3.0, -1.0f64..1.5).prop_map(|(q, lsq, lambda)| DeformationParams::new(q, lsq, lambda).unwrap())
}

/// A point with |z|² below `frac` of the convergence radius (capped at 4).
fn point(p: &DeformationParams, frac: f64, r: f64, theta: f64) -> Complex64 {
    let edge = p.radius().min(4.0);
    Complex64::from_polar((r * frac * edge).sqrt(), theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlaps_are_normalized_and_bounded(p in params(), r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let (z1, z2) = (point(&p, 0.9, r1, t1), point(&p, 0.9, r2, t2));
        let own = overlap(&p, z1, z1).unwrap();
        prop_assert!((own - 1.0).norm() < 1e-12, "{own}");
        let o = overlap(&p, z1, z2).unwrap();
        prop_assert!(o.norm() <= 1.0 + 1e-12);
        prop_assert!((o - overlap(&p, z2, z1).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn conjugate_symbol_quantizes_to_adjoint(p in params(), mu in 0usize..4, nu in 0usize..4) {
        let t = Truncation::new(12).unwrap();
        let a = quantize_monomial(&p, mu, nu, t).unwrap().matrix;
        let b = quantize_monomial(&p, nu, mu, t).unwrap().matrix;
        prop_assert!(max_abs(&(&a - b.adjoint())) <= 1e-13 * max_abs(&a).max(1.0));
    }

    #[test]
    fn quantized_ladders_obey_the_commutator(p in params()) {
        prop_assert!(commutator_residual(&p, Truncation::new(16).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn counit_holds_for_every_generator(p in params(), c13 in -1.0f64..1.0) {
        let maps = HopfMaps::new(&p, c13);
        for g in [Generator::A, Generator::Adag, Generator::N, Generator::I] {
            let (right, left) = counit_residuals(&p, &maps, g, 6);
            prop_assert!(right < 1e-12 && left < 1e-12, "{g:?}: {right} {left}");
        }
    }

    #[test]
    fn complex_text_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = Complex64::new(re, im);
        prop_assert_eq!(parse_complex(&format!("{re:e}{im:+e}i")).unwrap(), z);
        prop_assert_eq!(parse_complex(&format!("{re},{im}")).unwrap(), z);
    }
}
