//! Free differential calculus identities on random words in a, b, x.

use proptest::prelude::*;
use rigidity_core::words::{fox_derivative, GroupRingElem, Letter, Word};

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0usize..3, any::<bool>()), 0..max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

fn elem(w: &Word) -> GroupRingElem {
    GroupRingElem::from_word(w.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Σ_g ∂w/∂g · (g - 1) = w - 1.
    #[test]
    fn fundamental_identity(w in word(24)) {
        let one = GroupRingElem::one();
        let mut sum = GroupRingElem::zero();
        for g in 0..3 {
            let shift = &elem(&Word::generator(g)) - &one;
            sum += &(&fox_derivative(&w, g) * &shift);
        }
        prop_assert_eq!(sum, &elem(&w) - &one);
    }

    /// ∂(uv) = ∂u + u ∂v.
    #[test]
    fn product_rule(u in word(16), v in word(16)) {
        let uv = &u * &v;
        for g in 0..3 {
            let rhs = &fox_derivative(&u, g) + &(&elem(&u) * &fox_derivative(&v, g));
            prop_assert_eq!(fox_derivative(&uv, g), rhs);
        }
    }

    /// ∂(w⁻¹) = -w⁻¹ ∂w.
    #[test]
    fn inverse_rule(w in word(16)) {
        let wi = w.inverse();
        for g in 0..3 {
            let rhs = -&(&elem(&wi) * &fox_derivative(&w, g));
            prop_assert_eq!(fox_derivative(&wi, g), rhs);
        }
    }

    /// Augmentation of ∂w/∂g is the exponent sum of g.
    #[test]
    fn augmentation_is_exponent_sum(w in word(24)) {
        for g in 0..3 {
            prop_assert_eq!(fox_derivative(&w, g).augmentation(), w.exponent_sum(g));
        }
    }
}
