use autfn::expr::{parse, Atom};
use autfn::generators::Generator;
use autfn::matrix::det_sign_map;
use autfn::nielsen::{factor_into_elementary, inverse, is_automorphism, recompose};
use autfn::{Endo, GenExpr, IntMatrix, Letter, Special, Word};
use proptest::prelude::*;

fn letter(n: usize) -> impl Strategy<Value = Letter> {
    (1..=n, any::<bool>()).prop_map(|(i, inv)| if inv { Letter::inv(i) } else { Letter::gen(i) })
}

fn word(n: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(n), 0..24).prop_map(move |ls| Word::reduce(ls, n).unwrap())
}

fn generator(n: usize) -> impl Strategy<Value = Generator> {
    let pair = (1..=n, 1..=n).prop_filter("distinct", |(i, j)| i != j);
    prop_oneof![
        pair.clone().prop_map(|(i, j)| Generator::Lambda { i, j }),
        pair.clone().prop_map(|(i, j)| Generator::Rho { i, j }),
        (1..=n).prop_map(|i| Generator::Eps { i }),
        pair.prop_map(|(i, j)| Generator::Perm {
            cycles: vec![vec![i, j]]
        }),
    ]
}

fn product(n: usize, max: usize) -> impl Strategy<Value = Endo> {
    prop::collection::vec(generator(n), 0..=max).prop_map(move |gs| recompose(&gs, n).unwrap())
}

fn ranked_products() -> impl Strategy<Value = (Endo, Endo, Word)> {
    (3usize..=5).prop_flat_map(|n| (product(n, 12), product(n, 12), word(n)))
}

fn atom() -> impl Strategy<Value = GenExpr> {
    let idx = 1usize..=9;
    let cycles = prop::collection::vec(prop::collection::vec(1usize..=9, 1..4), 1..3);
    prop_oneof![
        (idx.clone(), idx.clone()).prop_map(|(i, j)| GenExpr::l(i, j)),
        (idx.clone(), idx.clone()).prop_map(|(i, j)| GenExpr::r(i, j)),
        idx.prop_map(GenExpr::e),
        cycles.clone().prop_map(GenExpr::p),
        cycles.prop_map(|c| GenExpr::atom(Atom::Sig(c))),
        prop::sample::select(Special::ALL.to_vec()).prop_map(GenExpr::special),
        Just(GenExpr::one()),
    ]
}

fn syntax_tree() -> impl Strategy<Value = GenExpr> {
    atom().prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(GenExpr::Seq),
            inner.clone().prop_map(GenExpr::inv),
            (inner.clone(), -5i64..=5).prop_map(|(x, k)| x.pow(k)),
            (inner.clone(), inner).prop_map(|(x, y)| GenExpr::comm(x, y)),
        ]
    })
}

fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), n)
        .prop_map(|rows| IntMatrix::from_rows(rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduced_words_have_no_cancelling_pairs(w in word(4)) {
        for pair in w.letters().windows(2) {
            prop_assert_ne!(pair[0], pair[1].inverted());
        }
        prop_assert_eq!(Word::reduce(w.letters().to_vec(), 4).unwrap(), w);
    }

    #[test]
    fn word_group_laws(u in word(3), v in word(3), x in word(3)) {
        prop_assert!(u.concat(&u.inverse()).unwrap().is_empty());
        prop_assert_eq!(u.concat(&v).unwrap().inverse(), v.inverse().concat(&u.inverse()).unwrap());
        prop_assert_eq!(
            u.concat(&v).unwrap().concat(&x).unwrap(),
            u.concat(&v.concat(&x).unwrap()).unwrap()
        );
        let sums: Vec<i64> = u.exponent_sums().iter().zip(v.exponent_sums()).map(|(a, b)| a + b).collect();
        prop_assert_eq!(u.concat(&v).unwrap().exponent_sums(), sums);
        prop_assert_eq!((u.len() + v.len()) % 2, u.concat(&v).unwrap().len() % 2);
    }

    #[test]
    fn words_render_and_parse(w in word(5)) {
        prop_assert_eq!(Word::parse(&w.to_string(), 5).unwrap(), w);
    }

    #[test]
    fn compose_is_a_right_action((f, g, w) in ranked_products()) {
        let lhs = f.compose(&g).unwrap().apply(&w).unwrap();
        let rhs = g.apply(&f.apply(&w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_is_a_homomorphism((f, _g, w) in ranked_products(), v in word(3)) {
        if f.rank() == 3 {
            let lhs = f.apply(&w.concat(&v).unwrap()).unwrap();
            let rhs = f.apply(&w).unwrap().concat(&f.apply(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn abelianization_is_a_homomorphism((f, g, _w) in ranked_products()) {
        let lhs = f.compose(&g).unwrap().abelianize();
        let rhs = f.abelianize().mul(&g.abelianize()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let d = det_sign_map(&f).unwrap();
        prop_assert!(d == 1 || d == -1);
    }

    #[test]
    fn determinant_is_multiplicative(a in small_matrix(4), b in small_matrix(4)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
        prop_assert_eq!(a.transpose().det().unwrap(), a.det().unwrap());
    }

    #[test]
    fn rendered_expressions_reparse(e in syntax_tree()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "rendered as {}", text);
    }

    #[test]
    fn nielsen_round_trip(f in (3usize..=5).prop_flat_map(|n| product(n, 40))) {
        let n = f.rank();
        prop_assert!(is_automorphism(&f).unwrap());
        let g = inverse(&f).unwrap();
        prop_assert!(f.compose(&g).unwrap().is_identity());
        prop_assert!(g.compose(&f).unwrap().is_identity());
        let factors = factor_into_elementary(&f).unwrap();
        prop_assert_eq!(recompose(&factors, n).unwrap(), f);
    }
}
