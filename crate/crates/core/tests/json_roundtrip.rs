//! parse(serialize(x)) reproduces x for the serializable types.

use lietor::graded::{GradedAlgebra, GradedElement, QuantumMatrix};
use lietor::lattice::LatticeSubset;
use lietor::matrix_lie::{MatLieElement, SlnAlgebra};
use lietor::reflection::{ExtensionDatum, PreReflectionSystem};
use lietor::roots::{build, Family, RootSystem};
use lietor::scalar::{Field, Scalar};
use proptest::prelude::*;
use serde_json::Value;

fn scalar(n: u32, coeffs: &[(i64, i64)]) -> Scalar {
    let f = Field::cyclotomic(n);
    coeffs.iter().fold(f.zero(), |acc, &(k, c)| &acc + &(&f.zeta_pow(k) * &f.from_i64(c)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scalars(n in prop::sample::select(vec![1u32, 3, 4, 5, 8, 12]), coeffs in prop::collection::vec((-12i64..12, -1_000_000i64..1_000_000), 0..5), d in 1i64..50) {
        let x = scalar(n, &coeffs).try_div(&Field::cyclotomic(n).from_i64(d)).unwrap();
        let v = serde_json::to_value(&x).unwrap();
        let y: Scalar = serde_json::from_value(v.clone()).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(lietor::graded::scalar_from_json(&v, None).unwrap(), x);
    }

    #[test]
    fn lattice_subsets(gens in prop::collection::vec(prop::collection::vec(-4i64..5, 2), 0..3), cosets in prop::collection::vec(prop::collection::vec(-4i64..5, 2), 1..3)) {
        let l = LatticeSubset::new(2, &gens, &cosets);
        let back = LatticeSubset::from_json(&l.to_json(), 2).unwrap();
        prop_assert!(back.set_eq(&l));
        prop_assert_eq!(back.to_json(), l.to_json());
    }
}

fn same_json(a: &Value, b: &Value) {
    assert_eq!(a, b, "round trip changed the serialization");
}

#[test]
fn root_systems() {
    for (family, rank) in [(Family::A, 3), (Family::B, 2), (Family::BC, 2), (Family::G2, 2), (Family::E6, 6)] {
        let s = build(family, rank).unwrap();
        let back = RootSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back.root_set(), s.root_set());
        same_json(&back.to_json(), &s.to_json());
        let pre = PreReflectionSystem::from_root_system(&s);
        same_json(&PreReflectionSystem::from_json(&pre.to_json()).unwrap().to_json(), &pre.to_json());
    }
}

#[test]
fn extension_data() {
    for (family, rank, tier) in [(Family::A, 2, 1), (Family::B, 3, 2), (Family::BC, 1, 1)] {
        let ed = ExtensionDatum::affine(build(family, rank).unwrap(), tier).unwrap();
        same_json(&ExtensionDatum::from_json(&ed.to_json()).unwrap().to_json(), &ed.to_json());
    }
}

#[test]
fn algebras_and_elements() {
    let z3 = Field::cyclotomic(3);
    let q = QuantumMatrix::from_upper(z3, 2, &[(0, 1, z3.zeta_pow(1))]).unwrap();
    same_json(&QuantumMatrix::from_json(&q.to_json()).unwrap().to_json(), &q.to_json());
    let algebras =
        [GradedAlgebra::laurent(Field::Rationals, 2), GradedAlgebra::polynomial(Field::Rationals, 1), GradedAlgebra::quantum_torus(q)];
    for a in algebras {
        same_json(&GradedAlgebra::from_json(&a.to_json()).unwrap().to_json(), &a.to_json());
        let mut x = GradedElement::zero(a.field());
        for g in a.generators() {
            x.add_scaled(&a.field().from_i64(-7), &g);
        }
        let back = GradedElement::from_json(&x.to_json(), a.field(), a.rank()).unwrap();
        assert_eq!(back, x);
        let l = SlnAlgebra::new(3, a.clone()).unwrap();
        let m = l.to_matrix(&l.elementary(0, 2, &x));
        let back = MatLieElement::from_json(&m.to_json(), &a).unwrap();
        assert_eq!(back.to_json(), m.to_json());
    }
}
