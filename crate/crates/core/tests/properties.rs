//! Randomised structural invariants, each run under five fixed seeds.

use lietor::central::build_affine;
use lietor::eala::{build_e, default_data, BuiltE, ToralPair};
use lietor::graded::{GradedAlgebra, QuantumMatrix};
use lietor::lattice::LatticeSubset;
use lietor::lie::{check_bigrading, check_eigenvalue_law, check_jacobi_random, sl2_completion, Grade, LieAlgebra};
use lietor::matrix_lie::{check_form, invariant_form, SlnAlgebra, SlnForm};
use lietor::reflection::{build_affine_rs, build_extension, string_stats, validate_extension_datum, ExtensionDatum};
use lietor::roots::{build, qvec, Family};
use lietor::scalar::Field;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const SEEDS: [u64; 5] = [1, 7, 42, 1009, 65537];

fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn for_each_seed<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>)
where
    S::Value: std::fmt::Debug,
{
    for seed in SEEDS {
        if let Err(e) = runner(seed, cases).run(&strategy, &test) {
            panic!("seed {seed}: {e}");
        }
    }
}

fn zeta3_torus() -> GradedAlgebra {
    let f = Field::cyclotomic(3);
    GradedAlgebra::quantum_torus(QuantumMatrix::from_upper(f, 2, &[(0, 1, f.zeta_pow(1))]).unwrap())
}

/// sl_n over a Laurent ring in `vars` variables (vars = 0 gives the split form) or over the ζ₃ quantum torus.
fn sl(n: usize, coeffs: usize) -> SlnAlgebra {
    let a = match coeffs {
        0 | 1 | 2 => GradedAlgebra::laurent(Field::Rationals, coeffs),
        _ => zeta3_torus(),
    };
    SlnAlgebra::new(n, a).unwrap()
}

fn form_of(l: &SlnAlgebra, window: i64) -> SlnForm {
    invariant_form(l, vec![l.field().one()], window).unwrap()
}

fn qtorus_e() -> BuiltE {
    let l = sl(3, 3);
    let form = form_of(&l, 1);
    build_e(default_data(l, form, 1), 1).unwrap()
}

fn ok(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

#[test]
fn jacobi_on_random_triples() {
    let e = qtorus_e();
    let aff = build_affine(3).unwrap();
    for_each_seed(4, (0usize..4, 3usize..5, any::<u64>()), |(coeffs, n, seed)| {
        ok(check_jacobi_random(&sl(n, coeffs), 2, 60, seed))?;
        ok(check_jacobi_random(&aff, 2, 60, seed))?;
        ok(check_jacobi_random(&e, 1, 60, seed))
    });
}

#[test]
fn forms_are_invariant() {
    for_each_seed(2, 0usize..4, |coeffs| {
        let l = sl(3, coeffs);
        let form = form_of(&l, 1);
        let rep = check_form(&l, &|x, y| form.eval(x, y), 1);
        prop_assert!(rep.all_pass(), "{rep}");
        Ok(())
    });
    let aff = build_affine(3).unwrap();
    let rep = check_form(&aff, &|x, y| aff.form(x, y), 1);
    assert!(rep.all_pass(), "{rep}");
    let e = qtorus_e();
    let rep = check_form(&e, &|x, y| ToralPair::form(&e, x, y), 1);
    assert!(rep.all_pass(), "{rep}");
}

#[test]
fn brackets_respect_bigrading() {
    for_each_seed(2, (0usize..4, 3usize..5), |(coeffs, n)| ok(check_bigrading(&sl(n, coeffs), 1)));
    assert!(check_bigrading(&build_affine(2).unwrap(), 2).is_ok());
    assert!(check_bigrading(&qtorus_e(), 1).is_ok());
}

fn random_root_vector() -> impl Strategy<Value = (usize, usize, usize, usize, Vec<i64>)> {
    (0usize..4, 3usize..5).prop_flat_map(|(coeffs, n)| {
        let vars = if coeffs == 3 { 2 } else { coeffs };
        (Just(coeffs), Just(n), 0..n, 0..n, prop::collection::vec(-2i64..=2, vars))
    })
}

#[test]
fn sl2_triples_and_eigenvalues() {
    for_each_seed(6, random_root_vector(), |(coeffs, n, i, j, lambda)| {
        prop_assume!(i != j);
        let l = sl(n, coeffs);
        let a = l.coefficients();
        let e = l.elementary(i, j, &a.monomial(&lambda).unwrap());
        let t = sl2_completion(&l, &e).ok_or_else(|| TestCaseError::fail("no sl₂-completion"))?;
        ok(t.check(&l))?;
        let s = l.root_system();
        let mut root = vec![0i64; n];
        root[i] = 1;
        root[j] = -1;
        let idx = s.index_of(&qvec(&root)).expect("ε_i − ε_j is a root");
        prop_assert_eq!(l.grade_of(&t.h), Some(Grade::new(vec![0; n], vec![0; lambda.len()])));
        ok(check_eigenvalue_law(&l, &s, idx, &t.h, 1))
    });
}

/// Extension data with Λ_sh = ℤⁿ and Λ_lg a lattice between kℤⁿ and ℤⁿ, where k is the squared length ratio.
fn random_datum() -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (0usize..4, 1usize..3).prop_flat_map(|(kind, rank)| (Just(kind), Just(rank), prop::collection::vec(any::<bool>(), rank)))
}

fn make_datum(kind: usize, rank: usize, keep: &[bool]) -> ExtensionDatum {
    let (family, r, k) = [(Family::A, 2, 1), (Family::B, 2, 2), (Family::C, 3, 2), (Family::G2, 2, 3)][kind];
    let s = build(family, r).unwrap();
    let full = LatticeSubset::full(rank);
    if k == 1 {
        let gens: Vec<Vec<i64>> = (0..rank).map(|i| (0..rank).map(|j| if i == j { if keep[i] { 1 } else { 2 } } else { 0 }).collect()).collect();
        return ExtensionDatum::untwisted(s, LatticeSubset::lattice(rank, &gens));
    }
    let gens: Vec<Vec<i64>> =
        (0..rank).map(|i| (0..rank).map(|j| if i == j { if keep[i] { 1 } else { k } } else { 0 }).collect()).collect();
    ExtensionDatum::by_length(s, full.clone(), full, Some(LatticeSubset::lattice(rank, &gens)), None).unwrap()
}

#[test]
fn extension_datum_identities() {
    for_each_seed(6, random_datum(), |(kind, rank, keep)| {
        let rep = validate_extension_datum(&make_datum(kind, rank, &keep));
        prop_assert!(rep.all_pass(), "{rep}");
        Ok(())
    });
}

#[test]
fn root_strings_in_constructed_systems() {
    for_each_seed(3, random_datum(), |(kind, rank, keep)| {
        let ars = build_extension(make_datum(kind, rank, &keep), Some(2)).unwrap();
        let stats = string_stats(&ars);
        prop_assert!(stats.all_unbroken && stats.formula_holds, "{:?}", stats.witness);
        prop_assert!(stats.max_len <= 5, "string of length {}", stats.max_len);
        Ok(())
    });
    let affine = [(Family::A, 2, 1), (Family::B, 3, 2), (Family::C, 3, 2), (Family::G2, 2, 3), (Family::BC, 2, 1), (Family::BC, 1, 1)];
    for (family, r, tier) in affine {
        let ars = build_affine_rs(&build(family, r).unwrap(), tier, Some(2)).unwrap();
        let stats = string_stats(&ars.ars);
        assert!(stats.all_unbroken && stats.formula_holds, "{:?}", stats.witness);
        assert!(stats.max_len <= 5, "{}: string of length {}", ars.mp_label, stats.max_len);
    }
}
