use marklat::field::{rational, Rational};
use marklat::io::{exact_matrix_json, parse_matrix};
use marklat::lattices::{gram_from_probes, LengthFunction, Order, ProbeTable};
use marklat::matk::{hermitian_eig, MatK};
use marklat::octo::{det_h2, det_h3, HermitianOct};
use marklat::scalars::{Algebra, Scalar};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rational(n, d))
}

fn scalar(k: Algebra) -> impl Strategy<Value = Scalar<Rational>> {
    proptest::collection::vec(rat(), k.dim()).prop_map(move |c| Scalar::new(k, c).unwrap())
}

fn algebra() -> impl Strategy<Value = Algebra> {
    prop_oneof![Just(Algebra::R), Just(Algebra::C), Just(Algebra::H)]
}

fn matrix() -> impl Strategy<Value = MatK<Rational>> {
    (algebra(), 1usize..=3).prop_flat_map(|(k, m)| {
        proptest::collection::vec(scalar(k), m * m).prop_map(move |e| MatK::new(k, m, e).unwrap())
    })
}

fn quaternion_pair() -> impl Strategy<Value = (MatK<Rational>, MatK<Rational>)> {
    (1usize..=3).prop_flat_map(|m| {
        let mat = move || {
            proptest::collection::vec(scalar(Algebra::H), m * m)
                .prop_map(move |e| MatK::new(Algebra::H, m, e).unwrap())
        };
        (mat(), mat())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative_exactly(x in scalar(Algebra::O), y in scalar(Algebra::O)) {
        prop_assert_eq!((&x * &y).norm_sq(), x.norm_sq() * y.norm_sq());
    }

    #[test]
    fn conjugation_reverses_products(x in scalar(Algebra::O), y in scalar(Algebra::O)) {
        prop_assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
    }

    #[test]
    fn probes_recover_gram_exactly(f in matrix()) {
        let order = Order::default_for(f.algebra());
        let gram = f.adjoint().mul(&f);
        let table = ProbeTable::of_length(&LengthFunction::new(gram.clone()), &order);
        prop_assert_eq!(gram_from_probes(&table, &order, f.size(), 0.0).unwrap(), gram);
    }

    #[test]
    fn eta_is_a_star_homomorphism((a, b) in quaternion_pair()) {
        prop_assert_eq!(a.mul(&b).eta().unwrap(), a.eta().unwrap().mul(&b.eta().unwrap()));
        prop_assert_eq!(a.adjoint().eta().unwrap(), a.eta().unwrap().adjoint());
    }

    #[test]
    fn exact_matrices_survive_json(f in matrix()) {
        let text = exact_matrix_json(&f).to_string();
        let back = parse_matrix(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn det_h2_of_diagonal(a in rat(), b in rat()) {
        prop_assert_eq!(det_h2(a.clone(), b.clone(), &Scalar::zero(Algebra::O)), a * b);
    }

    #[test]
    fn det_h3_matches_matrix_layout(d in proptest::collection::vec(rat(), 3), x in scalar(Algebra::O), y in scalar(Algebra::O), z in scalar(Algebra::O)) {
        let h = HermitianOct::new(d.clone(), vec![x.clone(), y.clone(), z.clone()]).unwrap();
        prop_assert_eq!(h.det(), det_h3([d[0].clone(), d[1].clone(), d[2].clone()], [&x, &y, &z]));
        let m = h.to_matrix();
        prop_assert_eq!(m.adjoint(), m);
    }

    #[test]
    fn eigen_reconstructs(f in matrix()) {
        let g = f.to_f64();
        let a = g.adjoint().mul(&g).hermitian_part();
        let eig = hermitian_eig(&a, 1e-10).unwrap();
        prop_assert!(eig.reconstruct().distance(&a) <= 1e-9 * a.frobenius().max(1.0));
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

/// Pins the association `Re((x·y)·z)` in `det_h3`.
#[test]
fn det_h3_golden() {
    let e = |i| Scalar::<Rational>::basis(Algebra::O, i);
    let one = rational(1, 1);
    // e1 e2 = e4 and e4 e4 = −1, so Re((e1 e2) e4) = −1.
    let d = det_h3(
        [one.clone(), one.clone(), one.clone()],
        [&e(1), &e(2), &e(4)],
    );
    assert_eq!(d, rational(1 - 3 - 2, 1));
}
