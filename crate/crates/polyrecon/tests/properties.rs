//! Property tests for the structural invariants the rest of the pipeline
//! leans on.

use proptest::collection::vec;
use proptest::prelude::*;

use polyrecon::poly::{
    multiset_from_product, multiset_poly, prefix_poly, product_from_multiset, product_matches,
    product_poly, reciprocal,
};
use polyrecon::strings::{compose, gap_decode, gap_encode, BitString};

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    vec(0u8..=1, 1..=max_len).prop_map(BitString::new)
}

proptest! {
    #[test]
    fn gap_encoding_roundtrips(s in bits(96)) {
        prop_assume!(s.weight() >= 1);
        let a = gap_encode(&s).unwrap();
        prop_assert_eq!(a.weight(), s.weight());
        prop_assert_eq!(a.gaps().iter().sum::<u64>() as usize, s.len() - s.weight());
        prop_assert_eq!(gap_decode(&a), s);
    }

    #[test]
    fn composition_counts_and_reversal(s in bits(48)) {
        let n = s.len();
        let m = compose(&s);
        prop_assert_eq!(m.total() as usize, n * (n + 1) / 2);
        prop_assert_eq!(&m, &compose(&s.reversed()));
        // One entry of full length, and per-length multiplicities n-L+1.
        m.validate().unwrap();
    }

    #[test]
    fn product_transforms_roundtrip(s in bits(64)) {
        let n = s.len();
        let sp = multiset_poly(&s);
        let f = product_from_multiset(&sp, n).unwrap();
        prop_assert_eq!(&f, &product_poly(&s));
        prop_assert_eq!(multiset_from_product(&f, n).unwrap(), sp);
        prop_assert!(product_matches(&s, &f));
    }

    #[test]
    fn reciprocal_involution_and_reversal(s in bits(48)) {
        let p = prefix_poly(&s);
        prop_assert_eq!(reciprocal(&reciprocal(&p)), p);
        prop_assert_eq!(reciprocal(&prefix_poly(&s)), prefix_poly(&s.reversed()));
        // F is self-reciprocal.
        let f = product_poly(&s);
        prop_assert_eq!(reciprocal(&f), f);
    }

    #[test]
    fn multiset_text_roundtrips(s in bits(40)) {
        let m = compose(&s);
        let parsed = polyrecon::strings::CompositionMultiset::from_text(&m.to_text()).unwrap();
        prop_assert_eq!(parsed, m);
    }
}
