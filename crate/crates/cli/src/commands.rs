use std::path::{Path, PathBuf};

use lietor::central::{
    build_affine, check_affine, check_kernel_central, check_projection, hc1_component, projection_kernel, steinberg_check,
    UceAlgebra,
};
use lietor::eala::{build_e, compare_root_data, default_data, verify_all};
use lietor::graded::{
    centre_box_scan, centre_of_qtorus, commutator_decomposition, skew_centroidal_space, validate_crossed_product, GradedAlgebra,
    Multiplication, QuantumMatrix,
};
use lietor::lattice::{box_points, LatticeSubset};
use lietor::lie::{check_bigrading, check_jacobi_random, LieAlgebra};
use lietor::matrix_lie::{check_form, invariant_form, verify_root_graded, SlnAlgebra};
use lietor::reflection::{
    ars_structure, build_affine_rs, build_extension, predicates, render_affine_table, string_stats, validate_axioms,
    validate_extension_datum, ExtensionDatum, PreReflectionSystem, RootSetView,
};
use lietor::roots::{build, Family, RootSystem};
use lietor::scalar::Field;
use serde_json::{json, Value};

use crate::report::{read_json, Report};
use crate::CliError;

/// Longest root string allowed in an affine reflection system.
const MAX_STRING: usize = 5;

pub struct Context {
    pub max_window: Option<i64>,
    pub seed: u64,
}

impl Context {
    /// Applies LIETOR_MAX_WINDOW, noting any reduction in the report.
    pub fn window(&self, requested: i64, report: &mut Report) -> Result<i64, CliError> {
        if requested < 0 {
            return Err(CliError::Input(format!("window must be nonnegative, got {requested}")));
        }
        match self.max_window {
            Some(cap) if requested > cap => {
                report.checks.info("window capped", format!("requested {requested}, LIETOR_MAX_WINDOW = {cap}"));
                Ok(cap)
            }
            _ => Ok(requested),
        }
    }
}

fn string_checks<V: RootSetView + ?Sized>(v: &V, report: &mut Report, bound: Option<usize>) {
    let stats = string_stats(v);
    let window = v.window();
    let witness = stats.witness.clone().unwrap_or_default();
    report.checks.record("unbroken strings", window, if stats.all_unbroken { Ok(()) } else { Err(witness.clone()) });
    report.checks.record("p − q = −⟨β,α∨⟩", window, if stats.formula_holds { Ok(()) } else { Err(witness) });
    if let Some(b) = bound {
        let r = if stats.max_len <= b { Ok(()) } else { Err(format!("a root string has {} elements", stats.max_len)) };
        report.checks.record("|root string| ≤ 5", window, r);
    }
    report.line("longest string", stats.max_len);
    report.put("max_string_length", json!(stats.max_len));
}

fn describe_root_system(rs: &RootSystem, report: &mut Report) -> Result<(), CliError> {
    let label = rs.classify()?;
    let lengths: Vec<String> = rs.normalized_lengths()?.iter().map(|x| x.to_string()).collect();
    report.line("type", &label);
    report.line("roots", rs.len() - 1);
    report.line("normalized (α|α)", format!("{{{}}}", lengths.join(", ")));
    report.put("type", json!(label.to_string()));
    report.put("normalized_lengths", json!(lengths));
    report.put("root_system", rs.to_json());
    report.checks.record("root system axioms", None, rs.validate().map_err(|e| e.to_string()));
    let pre = PreReflectionSystem::from_root_system(rs);
    report.checks.extend(validate_axioms(&pre));
    string_checks(&pre, report, None);
    Ok(())
}

pub fn roots_build(family: &str, rank: Option<usize>, report: &mut Report) -> Result<(), CliError> {
    let family = Family::parse(family)?;
    let rank = rank.or(family.fixed_rank()).ok_or_else(|| CliError::Input("--rank is required for classical families".into()))?;
    describe_root_system(&build(family, rank)?, report)
}

pub fn roots_classify(path: &Path, report: &mut Report) -> Result<(), CliError> {
    let v = read_json(path, report)?;
    describe_root_system(&RootSystem::from_json(&v)?, report)
}

pub fn refl_check(path: &Path, report: &mut Report) -> Result<(), CliError> {
    let v = read_json(path, report)?;
    let pre = PreReflectionSystem::from_json(&v)?;
    report.checks.extend(validate_axioms(&pre));
    let p = predicates(&pre);
    let flags = json!({
        "reduced": p.reduced,
        "integral": p.integral,
        "nondegenerate": p.nondegenerate,
        "symmetric": p.symmetric,
        "coherent": p.coherent,
        "tame": p.tame,
    });
    for (k, v) in flags.as_object().expect("object") {
        report.line(k, v);
    }
    report.put("predicates", flags);
    string_checks(&pre, report, None);
    Ok(())
}

fn describe_ars(ars: &lietor::reflection::AffineReflectionSystem, report: &mut Report) {
    report.checks.extend(validate_extension_datum(ars.datum()));
    let st = ars_structure(ars);
    report.line("nullity", st.nullity);
    report.line("window", ars.window_radius());
    report.put("structure", st.to_json());
    report.put("window", json!(ars.window_radius()));
    string_checks(ars, report, Some(MAX_STRING));
}

pub fn ars_build(ty: &str, rank: Option<usize>, tier: i64, window: Option<i64>, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let family = Family::parse(ty)?;
    let rank = rank.or(family.fixed_rank()).ok_or_else(|| CliError::Input("--rank is required for classical families".into()))?;
    let s = build(family, rank)?;
    let window = window.map(|w| ctx.window(w, report)).transpose()?;
    let a = build_affine_rs(&s, tier, window)?;
    report.line("labels", format!("{} (Moody–Pianzola), {} (Kac)", a.mp_label, a.kac_label));
    report.put("labels", json!({"moody_pianzola": a.mp_label, "kac": a.kac_label}));
    describe_ars(&a.ars, report);
    Ok(())
}

pub fn ars_check(path: &Path, window: Option<i64>, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let v = read_json(path, report)?;
    let ed = ExtensionDatum::from_json(&v)?;
    let window = window.map(|w| ctx.window(w, report)).transpose()?;
    let ars = build_extension(ed, window)?;
    describe_ars(&ars, report);
    Ok(())
}

fn read_qtorus(path: &Path, report: &mut Report) -> Result<QuantumMatrix, CliError> {
    let v = read_json(path, report)?;
    Ok(QuantumMatrix::from_json(&v)?)
}

pub fn qtorus_centre(path: &Path, oracle_window: i64, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let q = read_qtorus(path, report)?;
    let w = ctx.window(oracle_window, report)?;
    let gamma = centre_of_qtorus(&q)?;
    report.line("Γ basis", format!("{gamma:?}"));
    report.line("fgc", gamma.len() == q.n());
    report.put("gamma", json!(gamma));
    report.put("fgc", json!(gamma.len() == q.n()));
    let lattice = LatticeSubset::lattice(q.n(), &gamma);
    let mut scan = centre_box_scan(&q, w);
    scan.sort();
    let mut ours: Vec<_> = box_points(q.n(), w).into_iter().filter(|p| lattice.contains(p)).collect();
    ours.sort();
    let agree = if scan == ours {
        Ok(())
    } else {
        let p = scan.iter().find(|p| !ours.contains(p)).or_else(|| ours.iter().find(|p| !scan.contains(p))).expect("sets differ");
        Err(format!("Γ and the box scan disagree at {p:?}"))
    };
    report.checks.record("Γ = box scan", Some(w), agree);
    Ok(())
}

pub fn qtorus_scder(path: &Path, degree: &[i64], report: &mut Report) -> Result<(), CliError> {
    let q = read_qtorus(path, report)?;
    if degree.len() != q.n() {
        return Err(CliError::Input(format!("degree has {} entries but the torus has rank {}", degree.len(), q.n())));
    }
    let a = GradedAlgebra::quantum_torus(q);
    let space = skew_centroidal_space(&a, degree);
    report.line("dim SCDer", space.len());
    let basis: Vec<Value> = space
        .iter()
        .map(|d| json!({"degree": d.degree(), "values": d.values().iter().map(|v| v.to_json()).collect::<Vec<_>>()}))
        .collect();
    report.put("degree", json!(degree));
    report.put("dim", json!(space.len()));
    report.put("basis", json!(basis));
    Ok(())
}

pub fn qtorus_decompose(path: &Path, window: i64, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let q = read_qtorus(path, report)?;
    let w = ctx.window(window, report)?;
    let dec = commutator_decomposition(&GradedAlgebra::quantum_torus(q), w)?;
    let central = dec.degrees.iter().filter(|d| d.central).count();
    report.line("Γ basis", format!("{:?}", dec.gamma));
    report.line("central degrees", format!("{central} of {}", dec.degrees.len()));
    report.put("gamma", json!(dec.gamma));
    report.put("central_degrees", json!(dec.degrees.iter().filter(|d| d.central).map(|d| &d.degree).collect::<Vec<_>>()));
    report.checks.extend(dec.report);
    Ok(())
}

/// `laurent` or `laurentN` for ℚ[t₁^{±1}, …, t_N^{±1}]; otherwise a JSON file.
fn read_coordinates(coord: &str, report: &mut Report) -> Result<GradedAlgebra, CliError> {
    if let Some(rest) = coord.strip_prefix("laurent") {
        let n = if rest.is_empty() { 1 } else { rest.parse().map_err(|_| CliError::Input(format!("bad coordinate ring {coord:?}")))? };
        return Ok(GradedAlgebra::laurent(Field::Rationals, n));
    }
    let v = read_json(&PathBuf::from(coord), report)?;
    Ok(GradedAlgebra::from_json(&v)?)
}

pub fn alg_check(path: &Path, window: i64, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let v = read_json(path, report)?;
    let a = GradedAlgebra::from_json(&v)?;
    let w = ctx.window(window, report)?;
    let f = a.structure_flags(w);
    report.line("algebra", &a);
    report.line("commutative", f.commutative);
    report.line("predivision", f.predivision);
    report.line("division", show_opt(f.division));
    report.line("torus", show_opt(f.torus));
    report.put(
        "flags",
        json!({"window": w, "commutative": f.commutative, "predivision": f.predivision, "division": f.division, "torus": f.torus}),
    );
    if let Some(wit) = f.witness {
        report.checks.info("structure witness", wit);
    }
    match a.rule() {
        Multiplication::CrossedProduct(cp) => report.checks.extend(validate_crossed_product(cp, w)),
        Multiplication::QuantumTorus(_) => report.checks.extend(commutator_decomposition(&a, w)?.report),
        _ => {}
    }
    Ok(())
}

fn show_opt(b: Option<bool>) -> String {
    b.map_or_else(|| "undecided".to_string(), |b| b.to_string())
}

pub fn sl_verify(n: usize, coord: &str, window: i64, samples: usize, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let a = read_coordinates(coord, report)?;
    let w = ctx.window(window, report)?;
    let l = SlnAlgebra::new(n, a)?;
    report.line("algebra", format!("sl_{n}({})", l.coefficients()));
    let rg = verify_root_graded(&l, w);
    report.line("predivision", rg.predivision);
    report.line("division", show_opt(rg.division));
    report.line("torus", show_opt(rg.torus));
    report.put("flags", json!({"predivision": rg.predivision, "division": rg.division, "torus": rg.torus}));
    report.checks.extend(rg.report);
    report.checks.record("Jacobi", Some(w), check_jacobi_random(&l, w, samples, ctx.seed)).note = Some(format!("{samples} random triples"));
    report.checks.record("bigrading", Some(w), check_bigrading(&l, w));
    match invariant_form(&l, vec![l.field().one()], w) {
        Ok(form) => {
            let mut fr = check_form(&l, &|x, y| form.eval(x, y), w);
            for e in &mut fr.entries {
                e.name = format!("form {}", e.name);
            }
            report.checks.extend(fr);
        }
        Err(e) => {
            report.checks.info("form", format!("no invariant form from the unit coefficient: {e}"));
        }
    }
    Ok(())
}

pub fn uce(n: usize, coord: &str, window: i64, samples: usize, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let a = read_coordinates(coord, report)?;
    let w = ctx.window(window, report)?;
    // Brackets of three windowed elements reach degree 3w; relations must cover it.
    let u = UceAlgebra::new(n, a, 3 * w)?;
    let kernel = projection_kernel(&u, w);
    let mut by_degree: std::collections::BTreeMap<Vec<i64>, usize> = std::collections::BTreeMap::new();
    for (d, _) in &kernel {
        *by_degree.entry(d.clone()).or_default() += 1;
    }
    report.line("kernel dim", format!("{} (window {w})", kernel.len()));
    report.put("kernel_dim", json!(kernel.len()));
    report.put("kernel_by_degree", json!(by_degree.iter().map(|(d, k)| json!({"degree": d, "dim": k})).collect::<Vec<_>>()));
    report.put("window", json!(w));
    report.checks.record("projection is a homomorphism", Some(w), check_projection(&u, w));
    report.checks.record("kernel central", Some(w), check_kernel_central(&u, &kernel, w));
    report.checks.record("Jacobi", Some(w), check_jacobi_random(&u, w, samples, ctx.seed)).note = Some(format!("{samples} random triples"));
    if n >= 3 {
        report.checks.extend(steinberg_check(&u, w)?);
    }
    Ok(())
}

fn parse_g(g: &str) -> Result<usize, CliError> {
    g.strip_prefix("sl")
        .and_then(|m| m.parse::<usize>().ok())
        .filter(|&m| m >= 2)
        .ok_or_else(|| CliError::Input(format!("--g must be sl<m> with m ≥ 2, got {g:?}")))
}

pub fn affine_build(g: &str, window: i64, emit: &str, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let m = parse_g(g)?;
    let w = ctx.window(window, report)?;
    let e = build_affine(m)?;
    report.checks.extend(check_affine(&e, w));
    let v = verify_all(&e, w);
    report.line("nullity", v.nullity);
    report.line("dim core ∩ E₀", v.core.zero_dim);
    report.put("verdict", v.to_json());
    report.checks.extend(v.iara);
    report.checks.extend(v.eala);
    let ars = build_affine_rs(&build(Family::A, m - 1)?, 1, Some(w))?;
    report.checks.record(&format!("root data = {}", ars.mp_label), Some(w), compare_root_data(&e, &ars.ars, w));
    match emit {
        "roots" => {
            let roots: Vec<Value> = e
                .grades_in_window(w)
                .into_iter()
                .map(|g| json!({"root": g.root, "degree": g.degree, "dim": e.component_basis(&g).len()}))
                .collect();
            report.line("root spaces", roots.len());
            report.put("roots", json!(roots));
        }
        "summary" => {}
        other => return Err(CliError::Input(format!("--emit must be roots or summary, got {other:?}"))),
    }
    Ok(())
}

pub fn hc1(coord: &str, degree: &[i64], max_window: i64, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let a = read_coordinates(coord, report)?;
    if degree.len() != a.rank() {
        return Err(CliError::Input(format!("degree has {} entries but the algebra has rank {}", degree.len(), a.rank())));
    }
    let w = ctx.window(max_window, report)?;
    let c = hc1_component(&a, degree, w)?;
    let dims: Vec<String> = c.dims.iter().map(|(w, d)| format!("{d}@{w}")).collect();
    report.line("dims by window", dims.join(" "));
    match c.stable {
        Some((sw, d)) => {
            report.line("dim HC₁", format!("{d} (stable from window {sw})"));
            report.checks.record("stabilized", Some(sw), Ok(()));
        }
        None => {
            report.checks.record("stabilized", Some(w), Err(format!("no two consecutive windows up to {w} agree")));
        }
    }
    report.put("hc1", c.to_json());
    Ok(())
}

pub struct EalaOptions<'a> {
    pub coord: &'a str,
    pub n: usize,
    pub window: i64,
    pub check: &'a str,
}

pub fn eala_build(opts: &EalaOptions<'_>, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let a = read_coordinates(opts.coord, report)?;
    let w = ctx.window(opts.window, report)?;
    let l = SlnAlgebra::new(opts.n, a)?;
    let form = invariant_form(&l, vec![l.field().one()], w)?;
    let data = default_data(l, form, w);
    let e = build_e(data, w)?;
    report.line("algebra", format!("C ⊕ sl_{}({}) ⊕ D", opts.n, e.l().coefficients()));
    report.line("dim D", e.derivations().len());
    report.line("dim C", e.c_dim());
    let v = verify_all(&e, w);
    report.line("nullity", v.nullity);
    report.line("tame", v.core.tame);
    let flags = &v.variant;
    report.line(
        "classes",
        [("IARA", flags.iara), ("EALA", flags.eala), ("LEALA", flags.leala), ("GRLA-style", flags.grla_style), ("toral-type", flags.toral_type)]
            .iter()
            .filter(|(_, b)| *b)
            .map(|(s, _)| *s)
            .collect::<Vec<_>>()
            .join(", "),
    );
    report.put("verdict", v.to_json());
    match opts.check {
        "all" => {
            report.checks.extend(v.iara);
            report.checks.extend(v.eala);
        }
        "iara" => report.checks.extend(v.iara),
        "eala" => report.checks.extend(v.eala),
        other => return Err(CliError::Input(format!("--check must be all, iara or eala, got {other:?}"))),
    }
    Ok(())
}

pub fn table(which: &str, report: &mut Report) -> Result<(), CliError> {
    match which {
        "affine" => {
            let t = render_affine_table();
            report.put("table", json!(t));
            report.raw = Some(t);
            Ok(())
        }
        other => Err(CliError::Input(format!("unknown table {other:?}"))),
    }
}
