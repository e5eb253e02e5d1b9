mod common;

use proptest::prelude::*;
use sphdyn::zoo::{chebyshev_map, lattes4, power_map, random_map, tanh_product, theorem1_map, FamilyLabel};
use sphdyn::{Complex64, SpherePoint};

/// `R_n(e^{2z}) = ∏_{|k|≤n} tanh(nz + 2k)`, checked at 50 points per `n`.
#[test]
fn theorem1_matches_tanh_product() {
    for n in 1..=4 {
        let f = theorem1_map(n).unwrap();
        for j in 0..50 {
            let zeta = Complex64::new(-0.6 + 1.2 * j as f64 / 49.0, 0.37 * (j as f64).sin());
            let w = (zeta * 2.0).exp();
            let got = f.apply(&SpherePoint::from_complex(w));
            // independent oracle: the product of tanh written out with exp
            let mut want = Complex64::new(1.0, 0.0);
            for k in -(n as i64)..=(n as i64) {
                let x = zeta * n as f64 + 2.0 * k as f64;
                let (e, ei) = (x.exp(), (-x).exp());
                want *= (e - ei) / (e + ei);
            }
            let dist = sphdyn::sphere::chordal_distance(&got, &SpherePoint::from_complex(want));
            assert!(dist < 1e-8, "n={n} j={j} dist={dist}");
            let lib = tanh_product(n, zeta * n as f64);
            assert!((lib - want).norm() <= 1e-12 * want.norm().max(1.0));
        }
    }
}

#[test]
fn constructed_degrees() {
    let degrees: Vec<usize> = (1..=4).map(|n| theorem1_map(n).unwrap().degree()).collect();
    assert_eq!(degrees, [3, 10, 21, 36]);
    assert_eq!(lattes4().degree(), 4);
    assert_eq!(chebyshev_map(5).unwrap().degree(), 5);
}

proptest! {
    #![proptest_config(common::cases(256))]

    #[test]
    fn constructors_are_deterministic(d in 2usize..17, seed in any::<u64>()) {
        let a = random_map(d, seed).unwrap();
        let b = random_map(d, seed).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.degree(), d);
    }

    #[test]
    fn labels_build_valid_maps(d in 2usize..10, seed in 0u64..1000, n in 1usize..5) {
        for label in [
            FamilyLabel::Power { d },
            FamilyLabel::Chebyshev { d },
            FamilyLabel::Random { d, seed },
            FamilyLabel::Theorem1 { n },
            FamilyLabel::Lattes4,
        ] {
            let f = label.build().unwrap();
            let parsed: FamilyLabel = label.to_string().parse().unwrap();
            prop_assert_eq!(parsed, label);
            // round trip through the JSON schema re-runs validation
            let g = sphdyn::RationalMap::from_json(&f.to_json()).unwrap();
            prop_assert_eq!(g.degree(), f.degree());
        }
    }

    #[test]
    fn chebyshev_semiconjugacy(d in 2usize..8, t in 0.0f64..6.28, r in 1.0f64..3.0) {
        let f = chebyshev_map(d).unwrap();
        let w = Complex64::from_polar(r, t);
        let got = f.apply(&SpherePoint::from_complex(w + w.inv()));
        let want = SpherePoint::from_complex(w.powu(d as u32) + w.powu(d as u32).inv());
        prop_assert!(sphdyn::sphere::chordal_distance(&got, &want) < 1e-9);
    }
}

#[test]
fn power_map_is_monomial() {
    let f = power_map(5).unwrap();
    let z = Complex64::new(0.3, -0.8);
    let got = f.apply(&SpherePoint::from_complex(z)).to_complex().unwrap();
    assert!((got - z.powu(5)).norm() < 1e-14);
}
