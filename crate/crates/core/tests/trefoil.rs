//! Wada invariants of the trefoil: trivial and Heusener representations,
//! two presentations, every removable column.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidity_core::alexander::{twisted_alexander, twisted_alexander_with_column, RingRep};
use rigidity_core::numeric::{cint, cs, root_of_unity, CMatrix, CScalar, LaurentPoly, Tolerances};
use rigidity_core::presentation::{AbelianizationMap, Presentation, PresentationFile};
use rigidity_core::words::Word;

fn torus_form() -> Presentation {
    Presentation::new(vec!['a', 'b'], vec![Word::parse("a^2b^-3").unwrap()]).unwrap()
}

fn braid_form() -> Presentation {
    Presentation::new(vec!['a', 'b'], vec![Word::parse("abaBAB").unwrap()]).unwrap()
}

/// Cross-multiplied comparison num·(x-1) against den·(x²-x+1), each up to ±x^k.
fn cross_error(num: &LaurentPoly, den: &LaurentPoly) -> f64 {
    let lhs = num * &LaurentPoly::from_ints(0, &[-1, 1]);
    let rhs = den * &LaurentPoly::from_ints(0, &[1, -1, 1]);
    let (l, r) = (lhs.normalized(), rhs.normalized());
    let s = r.norm_inf();
    (&l - &r).norm_inf().min((&l + &r).norm_inf()) / s
}

#[test]
fn trivial_rep_on_torus_form() {
    let rep = RingRep::trivial(1, AbelianizationMap(vec![3, 2]));
    let w = twisted_alexander(&torus_form(), &rep, &Tolerances::default()).unwrap();
    assert!(cross_error(&w.numerator, &w.denominator) < 1e-10);
}

#[test]
fn trivial_rep_on_braid_form_agrees() {
    let rep = RingRep::trivial(1, AbelianizationMap(vec![1, 1]));
    let w = twisted_alexander(&braid_form(), &rep, &Tolerances::default()).unwrap();
    assert!(cross_error(&w.numerator, &w.denominator) < 1e-10);
    let (n, d) = &w.reduced;
    assert!(cross_error(n, d) < 1e-10);
}

#[test]
fn removed_column_does_not_matter() {
    let tol = Tolerances::default();
    for (p, alpha) in [(torus_form(), vec![3, 2]), (braid_form(), vec![1, 1])] {
        let rep = RingRep::trivial(1, AbelianizationMap(alpha));
        for k in 0..2 {
            let w = twisted_alexander_with_column(&p, &rep, k, &tol).unwrap();
            assert_eq!(w.column, k);
            assert!(cross_error(&w.numerator, &w.denominator) < 1e-10, "column {k}");
        }
    }
}

fn heusener(s: CScalar, t: CScalar) -> Vec<CMatrix> {
    let w = root_of_unity(1, 3);
    let w2 = w * w;
    let (z, one) = (cint(0), cint(1));
    let a = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => one,
        (1, 0) => s,
        (2, 0) => t,
        (1, 1) | (2, 2) => -one,
        _ => z,
    });
    let b = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => one,
        (0, 1) => w - one,
        (0, 2) => w2 - one,
        (1, 1) => w,
        (2, 2) => w2,
        _ => z,
    });
    vec![a, b]
}

#[test]
fn heusener_family_is_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let tol = Tolerances::default();
    let target = LaurentPoly::from_ints(0, &[1, 0, 0, -1]);
    let mut first: Option<LaurentPoly> = None;
    for _ in 0..5 {
        let mut draw = || cs(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (s, t) = (draw(), draw());
        let rep = RingRep::new(heusener(s, t), AbelianizationMap(vec![3, 2])).unwrap();
        let w = twisted_alexander(&torus_form(), &rep, &tol).unwrap();
        let q = w.quotient.expect("denominator divides").normalized();
        assert!((&q - &target).norm_inf() < 1e-8, "{}", q.display("x"));
        if let Some(f) = &first {
            assert!((&q - f).norm_inf() < 1e-8);
        } else {
            first = Some(q);
        }
    }
}

#[test]
fn heusener_rep_loaded_from_file() {
    let rep = heusener(cs(0.5, 0.25), cs(-1.0, 2.0));
    let file = PresentationFile {
        generators: vec!["a".into(), "b".into()],
        relators: vec!["a^2b^-3".into()],
        abelianization: vec![3, 2],
        representation: Some(rep.iter().map(|m| m.to_pairs()).collect()),
    };
    let text = serde_json::to_string(&file).unwrap();
    let loaded = PresentationFile::from_json(&text).unwrap().load().unwrap();
    let ring = RingRep::new(loaded.representation.unwrap(), loaded.abelianization).unwrap();
    let w = twisted_alexander(&loaded.presentation, &ring, &Tolerances::default()).unwrap();
    let q = w.quotient.unwrap().normalized();
    // f64 round trip through JSON costs about 1e-16 per entry.
    assert!((&q - &LaurentPoly::from_ints(0, &[1, 0, 0, -1])).norm_inf() < 1e-10);
}

#[test]
fn bad_abelianization_is_rejected() {
    let rep = RingRep::trivial(1, AbelianizationMap(vec![1, 1]));
    assert!(twisted_alexander(&torus_form(), &rep, &Tolerances::default()).is_err());
}
