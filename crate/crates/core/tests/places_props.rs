mod common;

use common::{any_rat, nonzero_rat, nonzero_rf, rat};
use critheight_core::arith::{factor_rational, RationalFunction};
use critheight_core::places::{
    ff_height_affine, ff_product_formula_sum, height, height_affine, log_abs, support,
};
use critheight_core::{LogCombination, PlaceQ};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_formula_q(x in nonzero_rat(100_000, 100_000)) {
        let mut places = support(&x).unwrap();
        places.insert(PlaceQ::Arch);
        let total: LogCombination = places.iter().map(|v| log_abs(&x, v).unwrap()).sum();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn factorization_rebuilds_abs(x in nonzero_rat(100_000, 100_000)) {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, e) in factor_rational(&x).unwrap() {
            let pe = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
            if e > 0 { num *= pe } else { den *= pe }
        }
        prop_assert_eq!(critheight_core::Rational::new(num, den), x.abs());
    }

    #[test]
    fn product_formula_ff(x in nonzero_rf()) {
        prop_assert_eq!(ff_product_formula_sum(&x).unwrap(), 0);
    }

    #[test]
    fn height_symmetries(xs in prop::collection::vec(any_rat(500, 500), 1..5), x in nonzero_rat(500, 500)) {
        let mut rev = xs.clone();
        rev.reverse();
        prop_assert!((height_affine(&xs) - height_affine(&rev)).abs() < 1e-12);
        let inv = rat(1, 1) / &x;
        prop_assert!((height(&x) - height(&inv)).abs() < 1e-12);
    }

    #[test]
    fn ff_height_zero_iff_constant(xs in prop::collection::vec(nonzero_rf(), 1..4)) {
        let all_const = xs.iter().all(RationalFunction::is_constant);
        prop_assert_eq!(ff_height_affine(&xs) == 0, all_const);
    }
}
