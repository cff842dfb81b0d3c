//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or exceeds its time budget.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use lietor::central::{build_affine, check_kernel_central, check_projection, hc1_component, projection_kernel, steinberg_check, UceAlgebra};
use lietor::eala::{affine_isomorphism, build_e, compare_root_data, default_data, verify_all, BuiltE, EKey, ToralPair};
use lietor::graded::{centre_of_qtorus, commutator_decomposition, GradedAlgebra, QuantumMatrix};
use lietor::lattice::{box_points, LatticeSubset};
use lietor::lie::{check_bigrading, check_eigenvalue_law, check_jacobi_random, sl2_completion, Grade, LieAlgebra};
use lietor::matrix_lie::{check_form, invariant_form, SlnAlgebra};
use lietor::reflection::{
    build_affine_rs, build_extension, string_stats, validate_axioms, validate_extension_datum, ExtensionDatum, PreReflectionSystem,
};
use lietor::roots::{build, qvec, Family};
use lietor::scalar::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SEEDS: [u64; 5] = [1, 7, 42, 1009, 65537];

const AFFINE_TABLE: &str = "\
S              t(S)  label (MP)  label (Kac)
reduced        1     S^(1)       S^(1)
B_l (l >= 2)   2     B_l^(2)     D_{l+1}^(2)
C_l (l >= 3)   2     C_l^(2)     A_{2l-1}^(2)
F4             2     F4^(2)      E6^(2)
G2             3     G2^(3)      D4^(3)
BC_1           -     BC_1^(2)    A_2^(2)
BC_l (l >= 2)  1     BC_l^(2)    A_{2l}^(2)
";

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn zeta3_matrix() -> QuantumMatrix {
    let f = Field::cyclotomic(3);
    QuantumMatrix::from_upper(f, 2, &[(0, 1, f.zeta_pow(1))]).unwrap()
}

fn laurent(n: usize) -> GradedAlgebra {
    GradedAlgebra::laurent(Field::Rationals, n)
}

fn affine_table() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_lietor")).args(["table", "affine"]).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    ensure(text == AFFINE_TABLE, || format!("table differs:\n{text}"))?;
    Ok("7 rows, byte-exact".into())
}

fn root_system_axioms() -> Outcome {
    let mut systems = Vec::new();
    for family in [Family::A, Family::B, Family::C, Family::D, Family::BC] {
        for rank in 1..=5 {
            if let Ok(s) = build(family, rank) {
                systems.push(s);
            }
        }
    }
    for family in [Family::E6, Family::E7, Family::E8, Family::F4, Family::G2] {
        systems.push(build(family, family.fixed_rank().unwrap()).map_err(|e| e.to_string())?);
    }
    for s in &systems {
        let label = s.classify().map_err(|e| e.to_string())?;
        s.validate().map_err(|e| format!("{label}: {e}"))?;
        let pre = PreReflectionSystem::from_root_system(s);
        let rep = validate_axioms(&pre);
        ensure(rep.all_pass(), || format!("{label}: {rep}"))?;
        let st = string_stats(&pre);
        ensure(st.all_unbroken && st.formula_holds, || format!("{label}: {:?}", st.witness))?;
    }
    Ok(format!("{} systems", systems.len()))
}

fn normalized_values() -> Outcome {
    let mut cases: Vec<(Family, usize, &[&str])> = (1..=5).map(|n| (Family::A, n, &["2"][..])).collect();
    cases.extend([
        (Family::B, 3, &["2", "4"][..]),
        (Family::G2, 2, &["2", "6"][..]),
        (Family::BC, 1, &["2", "8"][..]),
        (Family::BC, 2, &["2", "4", "8"][..]),
    ]);
    for (family, rank, expect) in &cases {
        let s = build(*family, *rank).map_err(|e| e.to_string())?;
        let got: Vec<String> = s.normalized_lengths().map_err(|e| e.to_string())?.iter().map(|x| x.to_string()).collect();
        ensure(got == *expect, || format!("{family:?}{rank}: {got:?} ≠ {expect:?}"))?;
    }
    Ok(format!("{} systems", cases.len()))
}

fn qtorus_centre() -> Outcome {
    let q = zeta3_matrix();
    let gamma = centre_of_qtorus(&q).map_err(|e| e.to_string())?;
    ensure(gamma == vec![vec![3, 0], vec![0, 3]], || format!("Γ basis {gamma:?}"))?;
    // t^γ is central iff it commutes with both generators.
    let a = GradedAlgebra::quantum_torus(q);
    let lattice = LatticeSubset::lattice(2, &gamma);
    for g in box_points(2, 6) {
        let tg = a.monomial(&g).map_err(|e| e.to_string())?;
        let central = a.generators().iter().all(|t| a.mul(t, &tg) == a.mul(&tg, t));
        ensure(central == lattice.contains(&g), || format!("box oracle disagrees at {g:?}"))?;
    }
    let dec = commutator_decomposition(&a, 4).map_err(|e| e.to_string())?;
    ensure(dec.report.all_pass(), || dec.report.to_string())?;
    ensure(dec.degrees.len() == 81, || format!("{} degrees in window 4", dec.degrees.len()))?;
    Ok("Γ = 3ℤ × 3ℤ on [−6,6]², Z ⊕ [F_q,F_q] on window 4".into())
}

fn hc1_laurent() -> Outcome {
    let a = laurent(1);
    let c = hc1_component(&a, &[0], 6).map_err(|e| e.to_string())?;
    let (w0, d0) = c.stable.ok_or("degree 0 did not stabilize by window 6")?;
    ensure(d0 == 1, || format!("dim HC₁ at degree 0 is {d0}"))?;
    let mut worst = w0;
    // Stabilization needs two windows ≥ |k|, so degree k is decidable by window 6 only for |k| ≤ 5.
    for k in (-5i64..=5).filter(|&k| k != 0) {
        let c = hc1_component(&a, &[k], 6).map_err(|e| e.to_string())?;
        let (w, d) = c.stable.ok_or_else(|| format!("degree {k} did not stabilize by window 6"))?;
        ensure(d == 0, || format!("dim HC₁ at degree {k} is {d}"))?;
        worst = worst.max(w);
    }
    Ok(format!("dim 1 at degree 0 (stable at window {w0}); 0 at degrees 1 ≤ |k| ≤ 5 (stable by window {worst})"))
}

fn uce_correctness() -> Outcome {
    let w = 5;
    let u = UceAlgebra::new(3, laurent(1), 3 * w).map_err(|e| e.to_string())?;
    let kernel = projection_kernel(&u, w);
    ensure(kernel.len() == 1, || format!("kernel dimension {}", kernel.len()))?;
    ensure(kernel[0].0 == vec![0], || format!("kernel in degree {:?}", kernel[0].0))?;
    check_projection(&u, w)?;
    check_kernel_central(&u, &kernel, w)?;
    check_jacobi_random(&u, w, 1000, SEEDS[0])?;
    let st = steinberg_check(&u, w).map_err(|e| e.to_string())?;
    ensure(st.all_pass(), || st.to_string())?;
    Ok("kernel dim 1 (window 5), 1000 Jacobi triples, st1–st3".into())
}

fn affine_equivalence() -> Outcome {
    let w = 3;
    let l = SlnAlgebra::new(3, laurent(1)).map_err(|e| e.to_string())?;
    let form = invariant_form(&l, vec![Field::Rationals.one()], w).map_err(|e| e.to_string())?;
    let data = default_data(l, form, w);
    ensure(data.d.len() == 1 && data.c.len() == 1 && data.tau.is_empty(), || "data is not D = ℚd, C = D*, τ = 0".into())?;
    let e = build_e(data, w).map_err(|e| e.to_string())?;
    let ars = build_affine_rs(&build(Family::A, 2).map_err(|e| e.to_string())?, 1, Some(w)).map_err(|e| e.to_string())?;
    compare_root_data(&e, &ars.ars, w)?;
    affine_isomorphism(&e, &build_affine(3).map_err(|e| e.to_string())?, w)?;
    let zero = e.component_basis(&Grade::new(vec![0, 0, 0], vec![0]));
    let count = |p: fn(&EKey) -> bool| zero.iter().filter(|v| v.keys().all(p)).count();
    let (h, c, d) = (count(|k| matches!(k, EKey::L(_))), count(|k| matches!(k, EKey::C(_))), count(|k| matches!(k, EKey::D(_))));
    ensure((h, c, d) == (2, 1, 1), || format!("E₀ splits as h:{h}, c:{c}, d:{d}"))?;
    let toral = e.toral_basis();
    ensure(toral.len() == 4, || format!("dim H = {}", toral.len()))?;
    for m in (-w..=w).filter(|&m| m != 0) {
        let dim = e.component_basis(&Grade::new(vec![0, 0, 0], vec![m])).len();
        ensure(dim == 2, || format!("dim E_{{{m}δ}} = {dim}"))?;
    }
    Ok(format!("{} ≅ root data, E₀ = H (h:2, c:1, d:1), dim E_mδ = 2 for 0 < |m| ≤ {w}", ars.mp_label))
}

fn eala_qtorus() -> Outcome {
    let w = 3;
    let l = SlnAlgebra::new(3, GradedAlgebra::quantum_torus(zeta3_matrix())).map_err(|e| e.to_string())?;
    let form = invariant_form(&l, vec![l.field().one()], w).map_err(|e| e.to_string())?;
    let e = build_e(default_data(l, form, w), w).map_err(|e| e.to_string())?;
    let v = verify_all(&e, w);
    for name in ["IA1", "IA2", "IA3"] {
        ensure(v.iara.passed(name), || format!("{name}: {}", v.iara))?;
    }
    for name in ["EA1", "EA2", "EA3", "EA4", "EA5", "EA6"] {
        ensure(v.eala.passed(name), || format!("{name}: {}", v.eala))?;
    }
    ensure(v.nullity == 2, || format!("nullity {}", v.nullity))?;
    ensure(v.core.tame, || format!("not tame: {:?}", v.core.witness))?;
    Ok("IA1–IA3, EA1–EA6 at window 3; nullity 2; tame".into())
}

fn sl_over(kind: usize) -> SlnAlgebra {
    let a = match kind {
        0 => laurent(1),
        1 => laurent(2),
        _ => GradedAlgebra::quantum_torus(zeta3_matrix()),
    };
    SlnAlgebra::new(3, a).unwrap()
}

fn small_qtorus_e() -> BuiltE {
    let l = sl_over(2);
    let form = invariant_form(&l, vec![l.field().one()], 1).unwrap();
    build_e(default_data(l, form, 1), 1).unwrap()
}

fn datum(rng: &mut ChaCha8Rng) -> ExtensionDatum {
    let rank = rng.gen_range(1..=2usize);
    let (family, r, k) = [(Family::A, 2, 1), (Family::B, 2, 2), (Family::C, 3, 2), (Family::G2, 2, 3)][rng.gen_range(0..4)];
    let s = build(family, r).unwrap();
    let gens: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            let d = if rng.gen_bool(0.5) { 1 } else { k.max(2) };
            (0..rank).map(|j| if i == j { d } else { 0 }).collect()
        })
        .collect();
    if k == 1 {
        return ExtensionDatum::untwisted(s, LatticeSubset::lattice(rank, &gens));
    }
    let gens: Vec<Vec<i64>> = gens.into_iter().map(|g| g.into_iter().map(|x| if x > 1 { k } else { x }).collect()).collect();
    let full = LatticeSubset::full(rank);
    ExtensionDatum::by_length(s, full.clone(), full, Some(LatticeSubset::lattice(rank, &gens)), None).unwrap()
}

fn property_suites() -> Outcome {
    let e = small_qtorus_e();
    let aff = build_affine(3).map_err(|e| e.to_string())?;
    let algebras: Vec<SlnAlgebra> = (0..3).map(sl_over).collect();
    let mut cases = 0usize;
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in &algebras {
            check_jacobi_random(l, 2, 100, seed).map_err(|m| format!("seed {seed}: {m}"))?;
        }
        check_jacobi_random(&aff, 2, 100, seed).map_err(|m| format!("seed {seed}: {m}"))?;
        check_jacobi_random(&e, 1, 100, seed).map_err(|m| format!("seed {seed}: {m}"))?;
        for _ in 0..6 {
            let l = &algebras[rng.gen_range(0..3)];
            let i = rng.gen_range(0..3);
            let j = (i + rng.gen_range(1..3)) % 3;
            let lambda: Vec<i64> = (0..l.lattice_rank()).map(|_| rng.gen_range(-2..=2)).collect();
            let x = l.elementary(i, j, &l.coefficients().monomial(&lambda).map_err(|e| e.to_string())?);
            let t = sl2_completion(l, &x).ok_or_else(|| format!("seed {seed}: no sl₂-triple through {x:?}"))?;
            t.check(l).map_err(|m| format!("seed {seed}: {m}"))?;
            let mut root = vec![0i64; 3];
            root[i] = 1;
            root[j] = -1;
            let s = l.root_system();
            let a = s.index_of(&qvec(&root)).ok_or("ε_i − ε_j missing")?;
            check_eigenvalue_law(l, &s, a, &t.h, 1).map_err(|m| format!("seed {seed}: {m}"))?;
            cases += 1;
        }
        for _ in 0..3 {
            let ed = datum(&mut rng);
            let rep = validate_extension_datum(&ed);
            ensure(rep.all_pass(), || format!("seed {seed}: {rep}"))?;
            let st = string_stats(&build_extension(ed, Some(2)).map_err(|e| e.to_string())?);
            ensure(st.all_unbroken && st.max_len <= 5, || format!("seed {seed}: strings {:?}, max {}", st.witness, st.max_len))?;
        }
    }
    for l in &algebras {
        let form = invariant_form(l, vec![l.field().one()], 1).map_err(|e| e.to_string())?;
        let rep = check_form(l, &|x, y| form.eval(x, y), 1);
        ensure(rep.all_pass(), || rep.to_string())?;
        check_bigrading(l, 1)?;
    }
    let rep = check_form(&aff, &|x, y| aff.form(x, y), 2);
    ensure(rep.all_pass(), || rep.to_string())?;
    let rep = check_form(&e, &|x, y| ToralPair::form(&e, x, y), 1);
    ensure(rep.all_pass(), || rep.to_string())?;
    check_bigrading(&aff, 2)?;
    check_bigrading(&e, 1)?;
    let affine: BTreeSet<(Family, usize, i64)> =
        [(Family::A, 2, 1), (Family::B, 3, 2), (Family::C, 3, 2), (Family::F4, 4, 2), (Family::G2, 2, 3), (Family::BC, 1, 1), (Family::BC, 2, 1)]
            .into_iter()
            .collect();
    for (family, r, tier) in affine {
        let a = build_affine_rs(&build(family, r).map_err(|e| e.to_string())?, tier, Some(2)).map_err(|e| e.to_string())?;
        let st = string_stats(&a.ars);
        ensure(st.all_unbroken && st.formula_holds && st.max_len <= 5, || format!("{}: {:?}, max {}", a.mp_label, st.witness, st.max_len))?;
    }
    Ok(format!("5 seeds, {cases} sl₂-triples, zero failures"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("affine label table", Duration::from_secs(1), affine_table),
        ("root system axioms", Duration::from_secs(30), root_system_axioms),
        ("normalized form values", Duration::from_secs(30), normalized_values),
        ("quantum torus centre", Duration::from_secs(5), qtorus_centre),
        ("HC₁ of ℚ[t^{±1}]", Duration::from_secs(10), hc1_laurent),
        ("uce of sl₃(ℚ[t^{±1}])", Duration::from_secs(60), uce_correctness),
        ("affine construction", Duration::from_secs(120), affine_equivalence),
        ("EALA verifier on sl₃(F_q)", Duration::from_secs(120), eala_qtorus),
        ("property suites", Duration::from_secs(600), property_suites),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        let (status, detail) = match outcome {
            Ok(_) if t > *budget => ("FAIL", format!("over budget {:.0} s", budget.as_secs_f64())),
            Ok(d) => ("PASS", d),
            Err(w) => ("FAIL", w),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status}  {name}  ({:.2} s)  {detail}", k + 1, t.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
