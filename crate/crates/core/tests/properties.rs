mod common;

use common::{brute_hc, brute_sigma, C64};
use hcrecover::indexsets::{hyperbolic_cross, mixed_weight, sum_weight, AnisotropyMixed, AnisotropySum, MultiIndex};
use hcrecover::seqtools::{
    best_s_term_error, best_s_term_profile, lq_norm, rearrange, stechkin_factor, weak_lorentz_norm, Exponent,
};
use hcrecover::srlasso::soft_threshold;
use hcrecover::widths::{width_sandwich, WeightSpectrum};
use proptest::prelude::*;

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| C64::new(a, b)), 0..max_len)
}

fn exps(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..4.0, d)
}

proptest! {
    #[test]
    fn weights_ignore_signs(
        n in prop::collection::vec(-40i64..40, 1..4),
        flip in 0usize..8,
        raw in exps(3),
    ) {
        let d = n.len();
        let a = AnisotropyMixed::new(raw[..d].to_vec()).unwrap();
        let b = AnisotropySum::new(raw[..d].to_vec()).unwrap();
        let flipped: Vec<i64> = n.iter().enumerate().map(|(j, &k)| if flip >> j & 1 == 1 { -k } else { k }).collect();
        let (n, f) = (MultiIndex::new(n), MultiIndex::new(flipped));
        prop_assert_eq!(mixed_weight(&n, &a), mixed_weight(&f, &a));
        prop_assert_eq!(sum_weight(&n, &b), sum_weight(&f, &b));
    }

    #[test]
    fn rearrangement_keeps_magnitudes(c in complex_vec(40)) {
        let r = rearrange(&c);
        prop_assert!(r.magnitudes().windows(2).all(|w| w[0] >= w[1]));
        let mut ours = r.magnitudes().to_vec();
        let mut theirs: Vec<f64> = c.iter().map(|z| z.norm()).collect();
        ours.sort_by(f64::total_cmp);
        theirs.sort_by(f64::total_cmp);
        prop_assert_eq!(ours, theirs);
        for q in [1.0, 2.0, 0.5] {
            let sorted: Vec<C64> = r.magnitudes().iter().map(|&m| C64::new(m, 0.0)).collect();
            let (x, y) = (lq_norm(&c, Exponent::Finite(q)), lq_norm(&sorted, Exponent::Finite(q)));
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x));
        }
    }

    #[test]
    fn sigma_is_monotone_and_bounded(c in complex_vec(30), q in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let norm = lq_norm(&c, Exponent::Finite(q));
        let prof = best_s_term_profile(&rearrange(&c), Exponent::Finite(q));
        prop_assert!(prof.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert!(prof[0] <= norm * (1.0 + 1e-12));
        prop_assert_eq!(*prof.last().unwrap(), 0.0);
        for (s, expected) in prof.iter().enumerate() {
            let direct = best_s_term_error(&c, s, Exponent::Finite(q));
            prop_assert!((direct - expected).abs() <= 1e-9 * (1.0 + norm));
        }
    }

    #[test]
    fn sigma_matches_enumeration(c in complex_vec(9), s in 0usize..4) {
        let ours = best_s_term_error(&c, s, Exponent::Finite(2.0));
        prop_assert!((ours - brute_sigma(&c, s, 2.0)).abs() <= 1e-12);
    }

    #[test]
    fn stechkin_converse(c in complex_vec(50), idx in 0usize..3) {
        let (p, q, a) = [(1.0, 2.0, 0.0), (0.5, 1.0, 1.0), (1.5, 4.0, 0.3)][idx];
        prop_assume!(!c.is_empty());
        let r = rearrange(&c);
        let prof = best_s_term_profile(&r, Exponent::Finite(q));
        let big_c = (0..c.len())
            .map(|s| prof[s] / stechkin_factor(s, p, Exponent::Finite(q), a).unwrap())
            .fold(0.0, f64::max);
        let lhs = weak_lorentz_norm(&r, p, a).unwrap();
        prop_assert!(lhs <= 2f64.powf(1.0 / p + 1.0 / q) * big_c * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn soft_threshold_keeps_phase(re in -3.0f64..3.0, im in -3.0f64..3.0, t in 0.0f64..4.0) {
        let x = C64::new(re, im);
        let y = soft_threshold(x, t);
        if x.norm() <= t {
            prop_assert_eq!(y, C64::new(0.0, 0.0));
        } else {
            prop_assert!((y.norm() - (x.norm() - t)).abs() <= 1e-12);
            prop_assert!((y * x.norm() - x * y.norm()).norm() <= 1e-9);
        }
    }

    #[test]
    fn hyperbolic_cross_matches_scan(d in 1usize..4, r in 1.0f64..30.0) {
        prop_assert_eq!(hyperbolic_cross(d, r).unwrap().len(), brute_hc(d, r));
    }

    #[test]
    fn sandwich_is_ordered(mut w in prop::collection::vec(0.001f64..10.0, 1..60), m in 0usize..30) {
        w.sort_by(|a, b| b.total_cmp(a));
        let spec = WeightSpectrum::from_sorted(w.clone(), "test").unwrap();
        match width_sandwich(&spec, m) {
            Ok((lo, up)) => {
                prop_assert!(lo <= up);
                prop_assert_eq!(up, w[m]);
            }
            Err(_) => prop_assert!(w.len() < 2 * m + 1),
        }
    }
}
