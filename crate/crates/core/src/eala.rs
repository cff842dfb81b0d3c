//! Toral pairs (E, T) with an invariant form, the construction
//! E = C ⊕ L ⊕ D over L = sl_n(A), and verifiers for the IARA and EALA axioms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::central::{AffKey, AffineAlgebra};
use crate::error::{Error, Result};
use crate::graded::{Basis, CentroidalDerivation, GradedElement};
use crate::lattice::{self, box_points, IVec};
use crate::lie::{dense_columns, windowed_basis, Grade, LieAlgebra, LieVec, SparseEchelon};
use crate::linalg::Matrix;
use crate::matrix_lie::{check_form, MatKey, SlnAlgebra, SlnForm};
use crate::reflection::{AffineReflectionSystem, RootSetView};
use crate::report::AxiomReport;
use crate::roots::form_value;
use crate::scalar::{Field, Rational, Scalar};

/// Local nilpotence bound: root strings have at most 5 elements.
pub const NILPOTENCE_BOUND: usize = 6;

/// A Lie algebra with a toral subalgebra T and an invariant symmetric form.
/// T must act diagonally on every component.
pub trait ToralPair: LieAlgebra {
    fn toral_basis(&self) -> Vec<LieVec<Self::Key>>;

    fn form(&self, x: &LieVec<Self::Key>, y: &LieVec<Self::Key>) -> Scalar;

    /// A construction-specific tameness criterion, when one is known.
    fn tameness_criterion(&self, _window: i64) -> Option<std::result::Result<(), String>> {
        None
    }
}

fn kernel_basis(field: Field, images: &[LieVec<impl Ord + Clone>]) -> Vec<Vec<Scalar>> {
    let (m, _) = dense_columns(field, images, &[]);
    if m.rows() == 0 {
        return (0..images.len())
            .map(|k| (0..images.len()).map(|j| if j == k { field.one() } else { field.zero() }).collect())
            .collect();
    }
    m.kernel()
}

fn combine<K: Ord + Clone>(field: Field, coeffs: &[Scalar], basis: &[LieVec<K>]) -> LieVec<K> {
    let mut out = LieVec::zero(field);
    for (c, b) in coeffs.iter().zip(basis) {
        out.add_scaled(c, b);
    }
    out
}

fn dense_vec(field: Field, v: &[Scalar]) -> LieVec<usize> {
    let mut out = LieVec::zero(field);
    for (k, c) in v.iter().enumerate() {
        out.add_term(k, c);
    }
    out
}

fn flatten_rational(v: &[Scalar]) -> Vec<Rational> {
    v.iter().flat_map(|s| s.coeffs().iter().cloned()).collect()
}

fn show_functional(v: &[Scalar]) -> String {
    format!("[{}]", v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))
}

// ---------------------------------------------------------------------------
// Root decomposition on a window

struct Component<K: Ord> {
    grade: Grade,
    basis: Vec<LieVec<K>>,
    root: usize,
}

/// Root-space decomposition of the windowed part of a toral pair.
struct Analysis<K: Ord> {
    field: Field,
    window: i64,
    toral: Vec<LieVec<K>>,
    gram: Matrix,
    gram_inv: Option<Matrix>,
    comps: Vec<Component<K>>,
    /// Distinct root functionals, in order of first appearance.
    roots: Vec<Vec<Scalar>>,
    toral_failure: Option<String>,
}

impl<K: Ord + Clone + fmt::Debug + Send + Sync> Analysis<K> {
    fn new<E: ToralPair<Key = K> + ?Sized>(e: &E, window: i64) -> Analysis<K> {
        let field = e.field();
        let toral = e.toral_basis();
        let r = toral.len();
        let mut gram = Matrix::zeros(field, r, r);
        for (i, x) in toral.iter().enumerate() {
            for (j, y) in toral.iter().enumerate() {
                gram.set(i, j, e.form(x, y));
            }
        }
        let gram_inv = (gram.rank() == r).then(|| gram.inverse().expect("full rank"));
        let grades = e.grades_in_window(window);
        let per: Vec<(Grade, Vec<LieVec<K>>, std::result::Result<Vec<Scalar>, String>)> = grades
            .into_par_iter()
            .map(|g| {
                let basis = e.component_basis(&g);
                let alpha = root_functional(e, &toral, &g, &basis);
                (g, basis, alpha)
            })
            .collect();
        let mut roots: Vec<Vec<Scalar>> = Vec::new();
        let mut index: HashMap<Vec<Scalar>, usize> = HashMap::new();
        let mut comps = Vec::new();
        let mut toral_failure = None;
        for (grade, basis, alpha) in per {
            match alpha {
                Ok(a) => {
                    let idx = *index.entry(a.clone()).or_insert_with(|| {
                        roots.push(a);
                        roots.len() - 1
                    });
                    comps.push(Component { grade, basis, root: idx });
                }
                Err(w) => {
                    toral_failure.get_or_insert(w);
                }
            }
        }
        Analysis { field, window, toral, gram, gram_inv, comps, roots, toral_failure }
    }

    /// (α | β) = αᵀ G⁻¹ β.
    fn pair(&self, a: &[Scalar], b: &[Scalar]) -> Option<Scalar> {
        let inv = self.gram_inv.as_ref()?;
        let gb = inv.mul_vec(b).ok()?;
        Some(a.iter().zip(&gb).fold(self.field.zero(), |acc, (x, y)| &acc + &(x * y)))
    }

    fn is_zero_root(&self, r: usize) -> bool {
        self.roots[r].iter().all(Scalar::is_zero)
    }

    fn anisotropic(&self, r: usize) -> bool {
        self.pair(&self.roots[r], &self.roots[r]).is_some_and(|v| !v.is_zero())
    }

    fn root_index(&self, a: &[Scalar]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == a)
    }

    fn by_grade(&self) -> BTreeMap<&Grade, &Component<K>> {
        self.comps.iter().map(|c| (&c.grade, c)).collect()
    }

    fn basis(&self) -> impl Iterator<Item = (&Component<K>, &LieVec<K>)> {
        self.comps.iter().flat_map(|c| c.basis.iter().map(move |v| (c, v)))
    }

    fn null_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&r| self.gram_inv.is_some() && !self.anisotropic(r)).collect()
    }
}

/// α(t_k) for every toral basis vector, requiring [t, v] = α(t)v on the whole component.
fn root_functional<E: ToralPair + ?Sized>(
    e: &E,
    toral: &[LieVec<E::Key>],
    g: &Grade,
    basis: &[LieVec<E::Key>],
) -> std::result::Result<Vec<Scalar>, String> {
    let first = &basis[0];
    let alpha: Vec<Scalar> = toral
        .iter()
        .enumerate()
        .map(|(k, t)| first.ratio(&e.bracket(t, first)).ok_or_else(|| format!("ad t_{} is not scalar on E{g}", k + 1)))
        .collect::<std::result::Result<_, _>>()?;
    for v in &basis[1..] {
        for (k, t) in toral.iter().enumerate() {
            if e.bracket(t, v) != v.scale(&alpha[k]) {
                return Err(format!("ad t_{} does not act by one scalar on E{g}", k + 1));
            }
        }
    }
    Ok(alpha)
}

fn check_nondegenerate<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> std::result::Result<(), String> {
    let by_grade = an.by_grade();
    let bad = an.comps.par_iter().find_map_first(|c| {
        let Some(dual) = by_grade.get(&c.grade.neg()) else {
            return Some(format!("E{} pairs with nothing: E{} is zero", c.grade, c.grade.neg()));
        };
        let mut m = Matrix::zeros(an.field, dual.basis.len(), c.basis.len());
        for (i, y) in dual.basis.iter().enumerate() {
            for (j, x) in c.basis.iter().enumerate() {
                m.set(i, j, e.form(x, y));
            }
        }
        let ker = m.kernel();
        ker.first().map(|v| format!("radical vector {:?} in E{}", combine(an.field, v, &c.basis), c.grade))
    });
    bad.map_or(Ok(()), Err)
}

fn form_checks<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> AxiomReport {
    let mut rep = check_form(e, &|x, y| e.form(x, y), an.window);
    for entry in &mut rep.entries {
        entry.name = format!("form {}", entry.name);
    }
    rep.record("form nondegenerate", Some(an.window), check_nondegenerate(e, an));
    rep
}

fn toral_check<K: Ord + Clone + fmt::Debug + Send + Sync, E: ToralPair<Key = K> + ?Sized>(e: &E, an: &Analysis<K>) -> std::result::Result<(), String> {
    if let Some(w) = &an.toral_failure {
        return Err(w.clone());
    }
    for (i, x) in an.toral.iter().enumerate() {
        for y in &an.toral[i + 1..] {
            if !e.bracket(x, y).is_zero() {
                return Err("T is not abelian".into());
            }
        }
    }
    Ok(())
}

fn ia1<K: Ord + Clone + fmt::Debug + Send + Sync>(an: &Analysis<K>) -> std::result::Result<String, String> {
    if an.gram_inv.is_none() {
        let ker = an.gram.kernel();
        let w = ker.first().map(|v| format!("radical vector {:?} of the form on T", combine(an.field, v, &an.toral))).unwrap_or_default();
        return Err(w);
    }
    Ok(format!("t_α = G⁻¹α solved exactly for {} roots", an.roots.len()))
}

fn ia2<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> std::result::Result<(), String> {
    let mut t_span = SparseEchelon::new(an.field);
    for t in &an.toral {
        t_span.insert(t);
    }
    let bad = (0..an.roots.len()).into_par_iter().filter(|&r| !an.is_zero_root(r)).find_map_first(|r| {
        let neg: Vec<Scalar> = an.roots[r].iter().map(|x| -x).collect();
        let Some(nr) = an.root_index(&neg) else {
            return Some(format!("−α is not a root for α = {}", show_functional(&an.roots[r])));
        };
        let plus: Vec<&Component<E::Key>> = an.comps.iter().filter(|c| c.root == r).collect();
        let minus: Vec<&Component<E::Key>> = an.comps.iter().filter(|c| c.root == nr).collect();
        let found = plus.iter().any(|c| {
            c.basis.iter().any(|x| {
                minus.iter().any(|d| {
                    d.basis.iter().any(|y| {
                        let b = e.bracket(x, y);
                        !b.is_zero() && t_span.contains(&b)
                    })
                })
            })
        });
        (!found).then(|| format!("no basis pair e ∈ E{}, f ∈ E_−α with 0 ≠ [e, f] ∈ T", plus[0].grade))
    });
    bad.map_or(Ok(()), Err)
}

fn ia3<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> std::result::Result<(), String> {
    if an.gram_inv.is_none() {
        return Err("anisotropy undefined: the form on T is degenerate".into());
    }
    let xs: Vec<(&Grade, &LieVec<E::Key>)> =
        an.comps.iter().filter(|c| an.anisotropic(c.root)).flat_map(|c| c.basis.iter().map(move |x| (&c.grade, x))).collect();
    let ys: Vec<(&Component<E::Key>, &LieVec<E::Key>)> = an.basis().collect();
    let bad = xs.par_iter().find_map_first(|(g, x)| {
        ys.iter().find_map(|(c, y)| {
            let mut z = (*y).clone();
            for _ in 0..NILPOTENCE_BOUND {
                z = e.bracket(x, &z);
                if z.is_zero() {
                    return None;
                }
            }
            Some(format!("(ad x)^{NILPOTENCE_BOUND} y ≠ 0 for x ∈ E{g}, y ∈ E{}", c.grade))
        })
    });
    bad.map_or(Ok(()), Err)
}

fn ea2<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> std::result::Result<(), String> {
    if an.toral.is_empty() {
        return Err("H = 0".into());
    }
    let zero: Vec<&Component<E::Key>> = an.comps.iter().filter(|c| an.is_zero_root(c.root)).collect();
    let mut h_span = SparseEchelon::new(an.field);
    for t in &an.toral {
        h_span.insert(t);
    }
    for c in &zero {
        if let Some(v) = c.basis.iter().find(|v| !h_span.contains(v)) {
            return Err(format!("E₀ ≠ H: {v:?} ∈ E{} lies outside H", c.grade));
        }
    }
    let _ = e;
    Ok(())
}

fn ea4<K: Ord + Clone + fmt::Debug + Send + Sync>(an: &Analysis<K>) -> std::result::Result<usize, String> {
    if an.gram_inv.is_none() {
        return Err("anisotropy undefined: the form on T is degenerate".into());
    }
    let anis: Vec<usize> = (0..an.roots.len()).filter(|&r| an.anisotropic(r)).collect();
    if anis.is_empty() {
        return Err("R^an is empty".into());
    }
    let mut parent: Vec<usize> = (0..anis.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..anis.len() {
        for j in i + 1..anis.len() {
            let v = an.pair(&an.roots[anis[i]], &an.roots[anis[j]]).expect("gram invertible");
            if !v.is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root0 = find(&mut parent, 0);
    for i in 1..anis.len() {
        if find(&mut parent, i) != root0 {
            let grade = |r: usize| an.comps.iter().find(|c| c.root == r).map(|c| c.grade.to_string()).unwrap_or_default();
            return Err(format!("anisotropic roots of E{} and E{} lie in different components", grade(anis[0]), grade(anis[i])));
        }
    }
    Ok(anis.len())
}

/// Nullity as the ℤ-rank of the null roots (as functionals on H), and the
/// rank of the lattice generated by their Λ-degrees.
fn nullity<K: Ord + Clone + fmt::Debug + Send + Sync>(an: &Analysis<K>) -> (usize, usize) {
    let null = an.null_roots();
    let rows: Vec<Vec<Rational>> = null.iter().map(|&r| flatten_rational(&an.roots[r])).collect();
    let functional_rank = if rows.is_empty() || rows[0].is_empty() { 0 } else { Matrix::from_rational_rows(&rows).rank() };
    let degrees: Vec<IVec> = an.comps.iter().filter(|c| null.contains(&c.root)).map(|c| c.grade.degree.clone()).collect();
    let dim = an.comps.first().map_or(0, |c| c.grade.degree.len());
    (functional_rank, lattice::lattice_rank(&degrees, dim))
}

/// R⁰ ⊆ R^an − R^an on the window.
fn root_system_tame<K: Ord + Clone + fmt::Debug + Send + Sync>(an: &Analysis<K>) -> std::result::Result<(), String> {
    if an.gram_inv.is_none() {
        return Err("the form on T is degenerate".into());
    }
    let anis: Vec<&Vec<Scalar>> = (0..an.roots.len()).filter(|&r| an.anisotropic(r)).map(|r| &an.roots[r]).collect();
    for r in an.null_roots() {
        if an.is_zero_root(r) {
            continue;
        }
        let delta = &an.roots[r];
        let ok = anis.iter().any(|b| {
            let sum: Vec<Scalar> = b.iter().zip(delta).map(|(x, y)| x + y).collect();
            anis.iter().any(|c| **c == sum)
        });
        if !ok {
            return Err(format!("null root {} is not a difference of anisotropic roots in the window", show_functional(delta)));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Core and tameness

/// The windowed core (the ideal generated by anisotropic root spaces)
/// together with the tameness verdict.
#[derive(Clone, Debug)]
pub struct CoreReport<K: Ord> {
    pub window: i64,
    pub core: Vec<(Grade, Vec<LieVec<K>>)>,
    /// dim(core ∩ E_g) summed over the window.
    pub dim: usize,
    /// dim(core ∩ E₀), where E₀ is the zero-root space.
    pub zero_dim: usize,
    pub tame: bool,
    pub criterion: String,
    pub witness: Option<String>,
}

impl<K: Ord> CoreReport<K> {
    pub fn to_json(&self) -> Value {
        json!({
            "window": self.window,
            "dim": self.dim,
            "zero_root_dim": self.zero_dim,
            "tame": self.tame,
            "criterion": self.criterion,
            "witness": self.witness,
        })
    }
}

fn core_closure<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> BTreeMap<Grade, SparseEchelon<E::Key>> {
    let field = an.field;
    let mut core: BTreeMap<Grade, SparseEchelon<E::Key>> = BTreeMap::new();
    let all: Vec<(&Grade, &LieVec<E::Key>)> = an.basis().map(|(c, v)| (&c.grade, v)).collect();
    let mut frontier = Vec::new();
    if an.gram_inv.is_none() {
        return core;
    }
    for c in an.comps.iter().filter(|c| an.anisotropic(c.root)) {
        let ech = core.entry(c.grade.clone()).or_insert_with(|| SparseEchelon::new(field));
        for v in &c.basis {
            if ech.insert(v) {
                frontier.push((c.grade.clone(), v.clone()));
            }
        }
    }
    let in_window = |g: &Grade| g.degree.iter().all(|x| x.abs() <= an.window);
    while !frontier.is_empty() {
        let products: Vec<(Grade, LieVec<E::Key>)> = frontier
            .par_iter()
            .flat_map_iter(|(g, x)| {
                all.iter().filter_map(move |&(h, y)| {
                    let s = g.add(h);
                    if !in_window(&s) {
                        return None;
                    }
                    let b = e.bracket(x, y);
                    (!b.is_zero()).then_some((s, b))
                })
            })
            .collect();
        frontier = Vec::new();
        for (g, b) in products {
            let ech = core.entry(g.clone()).or_insert_with(|| SparseEchelon::new(field));
            if ech.insert(&b) {
                frontier.push((g, b));
            }
        }
    }
    core
}

/// Centralizer of the anisotropic root spaces inside the windowed part of E.
fn centralizer_outside_core<E: ToralPair + ?Sized>(
    e: &E,
    an: &Analysis<E::Key>,
    core: &BTreeMap<Grade, SparseEchelon<E::Key>>,
) -> Option<String> {
    let gens: Vec<&LieVec<E::Key>> = an.comps.iter().filter(|c| an.anisotropic(c.root)).flat_map(|c| c.basis.iter()).collect();
    an.comps.par_iter().find_map_first(|c| {
        let images: Vec<LieVec<(usize, E::Key)>> = c
            .basis
            .iter()
            .map(|b| {
                let mut img = LieVec::zero(an.field);
                for (i, k) in gens.iter().enumerate() {
                    for (key, v) in e.bracket(b, k).terms() {
                        img.add_term((i, key.clone()), v);
                    }
                }
                img
            })
            .collect();
        kernel_basis(an.field, &images).into_iter().find_map(|v| {
            let z = combine(an.field, &v, &c.basis);
            let inside = core.get(&c.grade).is_some_and(|ech| ech.contains(&z));
            (!inside).then(|| format!("{z:?} ∈ E{} centralizes the core but lies outside it", c.grade))
        })
    })
}

fn core_report<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> CoreReport<E::Key> {
    let core = core_closure(e, an);
    let zero_grades: Vec<&Grade> = an.comps.iter().filter(|c| an.is_zero_root(c.root)).map(|c| &c.grade).collect();
    let zero_dim = core.iter().filter(|(g, _)| zero_grades.contains(g)).map(|(_, ech)| ech.dim()).sum();
    let dim = core.values().map(SparseEchelon::dim).sum();
    let (tame, criterion, witness) = match e.tameness_criterion(an.window) {
        Some(r) => (r.is_ok(), "C ⊕ L is perfect".to_string(), r.err()),
        None => {
            let w = if an.gram_inv.is_none() { Some("the form on T is degenerate".to_string()) } else { centralizer_outside_core(e, an, &core) };
            (w.is_none(), "centralizer of the core lies in the core".to_string(), w)
        }
    };
    CoreReport {
        window: an.window,
        core: core.into_iter().map(|(g, ech)| (g, ech.basis())).collect(),
        dim,
        zero_dim,
        tame,
        criterion,
        witness,
    }
}

pub fn core_and_tameness<E: ToralPair + ?Sized>(e: &E, window: i64) -> CoreReport<E::Key> {
    core_report(e, &Analysis::new(e, window))
}

// ---------------------------------------------------------------------------
// Verifiers

fn iara_report<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>) -> AxiomReport {
    let w = Some(an.window);
    let mut rep = AxiomReport::new("invariant affine reflection algebra");
    rep.record("T toral", w, toral_check(e, an));
    rep.extend(form_checks(e, an));
    match ia1(an) {
        Ok(note) => {
            rep.record("IA1", w, Ok(())).note = Some(note);
        }
        Err(wit) => {
            rep.record("IA1", w, Err(wit));
        }
    }
    rep.record("IA2", w, ia2(e, an));
    rep.record("IA3", w, ia3(e, an)).note = Some(format!("(ad x_α)^{NILPOTENCE_BOUND} = 0 from |root string| ≤ 5"));
    rep
}

fn eala_report<E: ToralPair + ?Sized>(e: &E, an: &Analysis<E::Key>, core: &CoreReport<E::Key>) -> (AxiomReport, usize) {
    let w = Some(an.window);
    let mut rep = AxiomReport::new("extended affine Lie algebra");
    let forms = form_checks(e, an);
    let form_failure = forms.failures().next().map(|f| format!("{}: {}", f.name, f.witness.clone().unwrap_or_default()));
    rep.record("EA1", w, form_failure.map_or(Ok(()), Err));
    let ea2_result = toral_check(e, an).and_then(|_| ea2(e, an));
    rep.record("EA2", w, ea2_result).note = Some(format!("dim H = {}", an.toral.len()));
    rep.record("EA3", w, ia3(e, an)).note = Some(format!("(ad x_α)^{NILPOTENCE_BOUND} = 0 from |root string| ≤ 5"));
    match ea4(an) {
        Ok(n) => {
            rep.record("EA4", w, Ok(())).note = Some(format!("{n} anisotropic roots, one component"));
        }
        Err(wit) => {
            rep.record("EA4", w, Err(wit));
        }
    }
    rep.record("EA5", w, if core.tame { Ok(()) } else { Err(core.witness.clone().unwrap_or_else(|| "not tame".into())) }).note =
        Some(core.criterion.clone());
    let (null_rank, degree_rank) = nullity(an);
    let ea6 = if null_rank == degree_rank {
        Ok(())
    } else {
        Err(format!("null roots span rank {null_rank} in H* but their degrees span rank {degree_rank}"))
    };
    rep.record("EA6", w, ea6).note = Some(format!("⟨R⁰⟩ ≅ ℤ^{null_rank}; Λ realized inside ℤ^{}", e.lattice_rank()));
    rep.info("nullity", null_rank.to_string());
    (rep, null_rank)
}

pub fn verify_iara<E: ToralPair + ?Sized>(e: &E, window: i64) -> AxiomReport {
    iara_report(e, &Analysis::new(e, window))
}

pub fn verify_eala<E: ToralPair + ?Sized>(e: &E, window: i64) -> AxiomReport {
    let an = Analysis::new(e, window);
    let core = core_report(e, &an);
    eala_report(e, &an, &core).0
}

/// Structural classes, decided on the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantFlags {
    pub iara: bool,
    pub eala: bool,
    pub leala: bool,
    pub grla_style: bool,
    pub toral_type: bool,
}

impl VariantFlags {
    pub fn to_json(&self) -> Value {
        json!({
            "IARA": self.iara,
            "EALA": self.eala,
            "LEALA": self.leala,
            "GRLA-style": self.grla_style,
            "toral-type-style": self.toral_type,
        })
    }
}

/// Everything the verifiers produce for one toral pair and window.
#[derive(Clone, Debug)]
pub struct Verdict<K: Ord> {
    pub iara: AxiomReport,
    pub eala: AxiomReport,
    pub core: CoreReport<K>,
    pub nullity: usize,
    pub variant: VariantFlags,
}

impl<K: Ord> Verdict<K> {
    pub fn to_json(&self) -> Value {
        json!({
            "iara": self.iara.to_json(),
            "eala": self.eala.to_json(),
            "core": self.core.to_json(),
            "nullity": self.nullity,
            "variant": self.variant.to_json(),
        })
    }
}

/// IARA and EALA reports, the core, the nullity and the class flags, sharing one root decomposition.
pub fn verify_all<E: ToralPair + ?Sized>(e: &E, window: i64) -> Verdict<E::Key> {
    let an = Analysis::new(e, window);
    let iara = iara_report(e, &an);
    let core = core_report(e, &an);
    let (eala, nullity) = eala_report(e, &an, &core);
    let splitting = eala.passed("EA2");
    let connected = eala.passed("EA4");
    let is_iara = iara.all_pass();
    let variant = VariantFlags {
        iara: is_iara,
        eala: is_iara && eala.all_pass(),
        leala: is_iara && splitting && connected,
        grla_style: is_iara && splitting && eala.passed("EA6"),
        toral_type: is_iara && connected && root_system_tame(&an).is_ok(),
    };
    Verdict { iara, eala, core, nullity, variant }
}

pub fn classify_variant<E: ToralPair + ?Sized>(e: &E, window: i64) -> VariantFlags {
    verify_all(e, window).variant
}

/// Root data of (E, T) on the window against an affine reflection system in the
/// same coordinates (ε-roots ⊕ Λ): equal root sets, anisotropic ⟺ real, and equal forms.
pub fn compare_root_data<E: ToralPair + ?Sized>(e: &E, ars: &AffineReflectionSystem, window: i64) -> std::result::Result<(), String> {
    let an = Analysis::new(e, window);
    if an.gram_inv.is_none() {
        return Err("the form on T is degenerate".into());
    }
    let s = ars.root_system();
    let mut ours: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    for c in &an.comps {
        let eps: Vec<Rational> = c.grade.root.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let xi = s.index_of(&eps).ok_or_else(|| format!("{} is not a root of the finite root system", c.grade))?;
        ours.insert(ars.vector(xi, &c.grade.degree), c.root);
    }
    let theirs: Vec<Vec<Rational>> = ars.window_roots().into_iter().filter(|v| v[ars.y_dim()..].iter().all(|x| num_traits::Signed::abs(x) <= Rational::from_integer(window.into()))).collect();
    for v in &theirs {
        if !ours.contains_key(v) {
            return Err(format!("{v:?} is a root of the reflection system but not of E"));
        }
    }
    if ours.len() != theirs.len() {
        let extra = ours.keys().find(|v| !theirs.contains(v)).expect("sizes differ");
        return Err(format!("{extra:?} is a root of E but not of the reflection system"));
    }
    let form = ars.affine_form().map_err(|e| e.to_string())?;
    for (v, &r) in &ours {
        let real = ars.coroot_of(v).is_some_and(|c| c.iter().any(|x| *x != Rational::from_integer(0.into())));
        if real != an.anisotropic(r) {
            return Err(format!("{v:?}: real = {real} but anisotropic = {}", an.anisotropic(r)));
        }
    }
    for (v, &r) in &ours {
        for (u, &s) in &ours {
            let ours_val = an.pair(&an.roots[r], &an.roots[s]).expect("gram invertible");
            let theirs_val = an.field.from_rational(form_value(&form, v, u));
            if ours_val != theirs_val {
                return Err(format!("({v:?} | {u:?}) = {ours_val} in E but {theirs_val} in the reflection system"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Toral pairs from sl_n(A), the affine algebra, sums and abelian pieces

/// sl_n(A) with T = h = span{E_ii − E_{i+1,i+1}} and an invariant form.
#[derive(Clone, Debug)]
pub struct SlnPair {
    pub l: SlnAlgebra,
    pub form: SlnForm,
}

impl LieAlgebra for SlnPair {
    type Key = MatKey;
    fn field(&self) -> Field {
        self.l.field()
    }
    fn root_dim(&self) -> usize {
        self.l.root_dim()
    }
    fn lattice_rank(&self) -> usize {
        self.l.lattice_rank()
    }
    fn roots(&self) -> Vec<IVec> {
        self.l.roots()
    }
    fn grade(&self, k: &MatKey) -> Grade {
        self.l.grade(k)
    }
    fn bracket_keys(&self, a: &MatKey, b: &MatKey) -> LieVec<MatKey> {
        self.l.bracket_keys(a, b)
    }
    fn component_basis(&self, g: &Grade) -> Vec<LieVec<MatKey>> {
        self.l.component_basis(g)
    }
}

impl ToralPair for SlnPair {
    fn toral_basis(&self) -> Vec<LieVec<MatKey>> {
        (0..self.l.size() - 1).map(|i| self.l.h(i, i + 1)).collect()
    }
    fn form(&self, x: &LieVec<MatKey>, y: &LieVec<MatKey>) -> Scalar {
        self.form.eval(x, y)
    }
}

impl ToralPair for AffineAlgebra {
    fn toral_basis(&self) -> Vec<LieVec<AffKey>> {
        self.cartan()
    }
    fn form(&self, x: &LieVec<AffKey>, y: &LieVec<AffKey>) -> Scalar {
        AffineAlgebra::form(self, x, y)
    }
}

/// An abelian Lie algebra ℚ^k with T = E and the standard form.
#[derive(Clone, Debug)]
pub struct Abelian {
    pub dim: usize,
}

impl LieAlgebra for Abelian {
    type Key = usize;
    fn field(&self) -> Field {
        Field::Rationals
    }
    fn root_dim(&self) -> usize {
        0
    }
    fn lattice_rank(&self) -> usize {
        0
    }
    fn roots(&self) -> Vec<IVec> {
        vec![vec![]]
    }
    fn grade(&self, _k: &usize) -> Grade {
        Grade::new(vec![], vec![])
    }
    fn bracket_keys(&self, _a: &usize, _b: &usize) -> LieVec<usize> {
        LieVec::zero(Field::Rationals)
    }
    fn component_basis(&self, g: &Grade) -> Vec<LieVec<usize>> {
        if g.root.is_empty() && g.degree.is_empty() {
            (0..self.dim).map(|k| LieVec::unit(Field::Rationals, k)).collect()
        } else {
            Vec::new()
        }
    }
}

impl ToralPair for Abelian {
    fn toral_basis(&self) -> Vec<LieVec<usize>> {
        (0..self.dim).map(|k| LieVec::unit(Field::Rationals, k)).collect()
    }
    fn form(&self, x: &LieVec<usize>, y: &LieVec<usize>) -> Scalar {
        x.terms().fold(Field::Rationals.zero(), |acc, (k, c)| &acc + &(c * &y.coefficient(k)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SumKey<A, B> {
    Left(A),
    Right(B),
}

/// The orthogonal direct sum E₁ ⊕ E₂ with T = T₁ ⊕ T₂. Roots and degrees
/// are concatenated.
#[derive(Clone, Debug)]
pub struct DirectSum<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: LieAlgebra, B: LieAlgebra> DirectSum<A, B> {
    fn split(&self, g: &Grade) -> (Grade, Grade) {
        let (ra, rb) = g.root.split_at(self.left.root_dim());
        let (da, db) = g.degree.split_at(self.left.lattice_rank());
        (Grade::new(ra.to_vec(), da.to_vec()), Grade::new(rb.to_vec(), db.to_vec()))
    }

    fn join(&self, a: &Grade, b: &Grade) -> Grade {
        Grade::new([a.root.clone(), b.root.clone()].concat(), [a.degree.clone(), b.degree.clone()].concat())
    }

    fn zero_left(&self) -> Grade {
        Grade::new(vec![0; self.left.root_dim()], vec![0; self.left.lattice_rank()])
    }

    fn zero_right(&self) -> Grade {
        Grade::new(vec![0; self.right.root_dim()], vec![0; self.right.lattice_rank()])
    }
}

impl<A: LieAlgebra, B: LieAlgebra> LieAlgebra for DirectSum<A, B> {
    type Key = SumKey<A::Key, B::Key>;

    fn field(&self) -> Field {
        self.left.field()
    }
    fn root_dim(&self) -> usize {
        self.left.root_dim() + self.right.root_dim()
    }
    fn lattice_rank(&self) -> usize {
        self.left.lattice_rank() + self.right.lattice_rank()
    }
    fn roots(&self) -> Vec<IVec> {
        let za = vec![0; self.left.root_dim()];
        let zb = vec![0; self.right.root_dim()];
        let mut out: Vec<IVec> = self.left.roots().into_iter().map(|r| [r, zb.clone()].concat()).collect();
        for r in self.right.roots() {
            let v = [za.clone(), r].concat();
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
    fn grade(&self, k: &Self::Key) -> Grade {
        match k {
            SumKey::Left(a) => self.join(&self.left.grade(a), &self.zero_right()),
            SumKey::Right(b) => self.join(&self.zero_left(), &self.right.grade(b)),
        }
    }
    fn bracket_keys(&self, a: &Self::Key, b: &Self::Key) -> LieVec<Self::Key> {
        match (a, b) {
            (SumKey::Left(x), SumKey::Left(y)) => self.left.bracket_keys(x, y).map_keys(|k| SumKey::Left(k.clone())),
            (SumKey::Right(x), SumKey::Right(y)) => self.right.bracket_keys(x, y).map_keys(|k| SumKey::Right(k.clone())),
            _ => LieVec::zero(self.field()),
        }
    }
    fn component_basis(&self, g: &Grade) -> Vec<LieVec<Self::Key>> {
        let (ga, gb) = self.split(g);
        let mut out = Vec::new();
        if gb == self.zero_right() {
            out.extend(self.left.component_basis(&ga).into_iter().map(|v| v.map_keys(|k| SumKey::Left(k.clone()))));
        }
        if ga == self.zero_left() {
            out.extend(self.right.component_basis(&gb).into_iter().map(|v| v.map_keys(|k| SumKey::Right(k.clone()))));
        }
        out
    }
}

fn split_vec<A: Ord + Clone, B: Ord + Clone>(field: Field, x: &LieVec<SumKey<A, B>>) -> (LieVec<A>, LieVec<B>) {
    let mut a = LieVec::zero(field);
    let mut b = LieVec::zero(field);
    for (k, c) in x.terms() {
        match k {
            SumKey::Left(p) => a.add_term(p.clone(), c),
            SumKey::Right(q) => b.add_term(q.clone(), c),
        }
    }
    (a, b)
}

impl<A: ToralPair, B: ToralPair> ToralPair for DirectSum<A, B> {
    fn toral_basis(&self) -> Vec<LieVec<Self::Key>> {
        let mut out: Vec<LieVec<Self::Key>> = self.left.toral_basis().into_iter().map(|v| v.map_keys(|k| SumKey::Left(k.clone()))).collect();
        out.extend(self.right.toral_basis().into_iter().map(|v| v.map_keys(|k| SumKey::Right(k.clone()))));
        out
    }
    fn form(&self, x: &LieVec<Self::Key>, y: &LieVec<Self::Key>) -> Scalar {
        let f = self.field();
        let (xa, xb) = split_vec(f, x);
        let (ya, yb) = split_vec(f, y);
        &self.left.form(&xa, &ya) + &self.right.form(&xb, &yb)
    }
}

// ---------------------------------------------------------------------------
// The construction E = C ⊕ L ⊕ D

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EKey {
    /// The functional dual to the k-th basis vector of D.
    C(usize),
    L(MatKey),
    D(usize),
}

impl fmt::Debug for EKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EKey::C(k) => write!(f, "d{}*", k + 1),
            EKey::L(m) => write!(f, "{m:?}"),
            EKey::D(k) => write!(f, "d{}", k + 1),
        }
    }
}

/// Input data: D by a basis of homogeneous skew centroidal derivations;
/// T_D by coordinates in that basis; C and T_C by functionals given as
/// values on the basis of D; τ(d_a, d_b) as functionals (absent entries are 0).
#[derive(Clone, Debug)]
pub struct IaraData {
    pub l: SlnAlgebra,
    pub form: SlnForm,
    pub d: Vec<CentroidalDerivation>,
    pub t_d: Vec<Vec<Scalar>>,
    pub c: Vec<Vec<Scalar>>,
    pub t_c: Vec<Vec<Scalar>>,
    pub tau: BTreeMap<(usize, usize), Vec<Scalar>>,
}

#[derive(Clone, Debug)]
pub struct BuiltE {
    l: SlnAlgebra,
    form: SlnForm,
    d: Vec<CentroidalDerivation>,
    /// [d_a, d_b] in coordinates of the basis of D.
    d_struct: Vec<Vec<LieVec<usize>>>,
    c_by_degree: BTreeMap<IVec, Vec<LieVec<usize>>>,
    t_d: Vec<LieVec<usize>>,
    t_c: Vec<LieVec<usize>>,
    tau: BTreeMap<(usize, usize), LieVec<usize>>,
}

fn lift(l: &SlnAlgebra, d: &CentroidalDerivation, x: &LieVec<MatKey>) -> LieVec<MatKey> {
    l.map_entries(x, |e| d.apply(l.coefficients(), e))
}

/// σ_D(l₁, l₂)(d_k) = (d_k(l₁) | l₂) for every basis vector d_k of D.
pub fn sigma_d(l: &SlnAlgebra, form: &SlnForm, d: &[CentroidalDerivation], l1: &LieVec<MatKey>, l2: &LieVec<MatKey>) -> Vec<Scalar> {
    d.iter().map(|dk| form.eval(&lift(l, dk, l1), l2)).collect()
}

fn derivation_vec(d: &CentroidalDerivation) -> LieVec<(usize, Basis)> {
    let field = d.values().iter().map(GradedElement::field).next().unwrap_or(Field::Rationals);
    let mut out = LieVec::zero(field);
    for (k, v) in d.values().iter().enumerate() {
        for (b, c) in v.terms() {
            out.add_term((k, b.clone()), c);
        }
    }
    out
}

fn is_degree_derivation(a: &crate::graded::GradedAlgebra, d: &CentroidalDerivation) -> bool {
    let zero = vec![0; a.rank()];
    d.degree().iter().all(|&x| x == 0)
        && d.values().iter().all(|v| v.terms().all(|(b, _)| b.degree == zero && a.component_basis(&zero).first() == Some(b)) && v.len() <= 1)
}

/// Windowed basis pairs (l₁, l₂) of L whose degrees satisfy deg l₁ + deg l₂ = −deg d for some d ∈ D.
fn sigma_pairs(l: &SlnAlgebra, d: &[CentroidalDerivation], window: i64) -> Vec<(LieVec<MatKey>, LieVec<MatKey>)> {
    let mut shifts: Vec<IVec> = d.iter().map(|x| x.degree().to_vec()).collect();
    shifts.sort();
    shifts.dedup();
    let mut out = Vec::new();
    for g in l.grades_in_window(window) {
        for s in &shifts {
            let h = Grade::new(g.root.iter().map(|x| -x).collect(), g.degree.iter().zip(s).map(|(a, b)| -a - b).collect());
            if h.degree.iter().any(|x| x.abs() > window) {
                continue;
            }
            for x in l.component_basis(&g) {
                for y in l.component_basis(&h) {
                    out.push((x.clone(), y));
                }
            }
        }
    }
    out
}

fn contragredient(d_struct: &[Vec<LieVec<usize>>], a: usize, c: &LieVec<usize>) -> LieVec<usize> {
    // (d_a·c)(d_k) = −c([d_a, d_k]).
    let field = c.field();
    let mut out = LieVec::zero(field);
    for (k, s) in d_struct[a].iter().enumerate() {
        let v = s.terms().fold(field.zero(), |acc, (j, x)| &acc + &(x * &c.coefficient(j)));
        out.add_term(k, &-v);
    }
    out
}

/// D = T_D = span of the degree derivations, C = T_C = span σ_D(L, L), τ = 0.
pub fn default_data(l: SlnAlgebra, form: SlnForm, window: i64) -> IaraData {
    let a = l.coefficients().clone();
    let field = a.field();
    let n = a.rank();
    let d: Vec<CentroidalDerivation> = (0..n).map(|k| CentroidalDerivation::degree_derivation(&a, k)).collect();
    let t_d = (0..n).map(|k| (0..n).map(|j| if j == k { field.one() } else { field.zero() }).collect()).collect();
    let mut c_min = SparseEchelon::new(field);
    for (x, y) in sigma_pairs(&l, &d, window) {
        c_min.insert(&dense_vec(field, &sigma_d(&l, &form, &d, &x, &y)));
    }
    let c: Vec<Vec<Scalar>> = c_min.basis().iter().map(|v| (0..n).map(|k| v.coefficient(&k)).collect()).collect();
    IaraData { l, form, d, t_d, t_c: c.clone(), c, tau: BTreeMap::new() }
}

fn inv(axiom: &str, witness: impl Into<String>) -> Error {
    Error::axiom(axiom, witness.into())
}

/// Validates INV(b)–(f) on the window and assembles E.
pub fn build_e(data: IaraData, window: i64) -> Result<BuiltE> {
    let IaraData { l, form, d, t_d, c, t_c, tau } = data;
    let a = l.coefficients().clone();
    let field = a.field();
    let nd = d.len();
    let check_len = |v: &[Scalar], what: &str| -> Result<()> {
        if v.len() != nd {
            return Err(Error::Dimension(format!("{what} needs {nd} coordinates, got {}", v.len())));
        }
        Ok(())
    };
    for v in t_d.iter().chain(&c).chain(&t_c).chain(tau.values()) {
        check_len(v, "vector over D")?;
    }

    // INV(b): D is a graded subalgebra of skew centroidal derivations.
    let mut d_span = SparseEchelon::new(field);
    let d_vecs: Vec<LieVec<(usize, Basis)>> = d.iter().map(derivation_vec).collect();
    for (k, dk) in d.iter().enumerate() {
        if !dk.theta(dk.degree()).is_zero() {
            return Err(inv("INV(b)", format!("d{} has θ(λ) ≠ 0 in its own degree λ", k + 1)));
        }
        if dk.is_zero() || !d_span.insert(&d_vecs[k]) {
            return Err(inv("INV(b)", format!("d{} is zero or linearly dependent on the others", k + 1)));
        }
    }
    let mut d_struct = vec![vec![LieVec::zero(field); nd]; nd];
    for i in 0..nd {
        for j in 0..nd {
            let br = d[i].bracket(&a, &d[j]);
            let target = derivation_vec(&br);
            let same_degree: Vec<usize> = (0..nd).filter(|&k| d[k].degree() == br.degree()).collect();
            let basis: Vec<LieVec<(usize, Basis)>> = same_degree.iter().map(|&k| d_vecs[k].clone()).collect();
            let coords = if target.is_zero() {
                Some(vec![field.zero(); basis.len()])
            } else {
                crate::lie::coordinates_in(&basis, &target)
            };
            let coords = coords.ok_or_else(|| inv("INV(b)", format!("[d{}, d{}] lies outside D", i + 1, j + 1)))?;
            for (c, &k) in coords.iter().zip(&same_degree) {
                d_struct[i][j].add_term(k, c);
            }
        }
    }
    let wb = windowed_basis(&l, window);
    let skew = wb.par_iter().find_map_first(|(g, x)| {
        d.iter().enumerate().find_map(|(k, dk)| {
            let dx = lift(&l, dk, x);
            wb.iter().find_map(|(h, y)| {
                let s = &form.eval(&dx, y) + &form.eval(x, &lift(&l, dk, y));
                (!s.is_zero()).then(|| format!("(d{}x | y) + (x | d{}y) ≠ 0 for x ∈ L{g}, y ∈ L{h}", k + 1, k + 1))
            })
        })
    });
    if let Some(w) = skew {
        return Err(inv("INV(b)", w));
    }

    // INV(c): T_D ⊆ D⁰ ∩ 𝒟 and λ ↦ ev_λ|T_D is injective on the support.
    let t_d: Vec<LieVec<usize>> = t_d.iter().map(|v| dense_vec(field, v)).collect();
    for (j, t) in t_d.iter().enumerate() {
        let mut combo = CentroidalDerivation::zero(&a, vec![0; a.rank()]);
        for (k, c) in t.terms() {
            if d[*k].degree().iter().any(|&x| x != 0) {
                return Err(inv("INV(c)", format!("t_D{} involves d{} of nonzero degree", j + 1, k + 1)));
            }
            combo = combo.add(&d[*k].scale(c))?;
        }
        if !is_degree_derivation(&a, &combo) {
            return Err(inv("INV(c)", format!("t_D{} is not a degree derivation", j + 1)));
        }
    }
    let ev = |lambda: &[i64], t: &LieVec<usize>| -> Scalar {
        t.terms().fold(field.zero(), |acc, (k, c)| {
            let th = d[*k].theta(lambda);
            let one = th.terms().next().map(|(_, s)| s.clone()).unwrap_or_else(|| field.zero());
            &acc + &(c * &one)
        })
    };
    let support: Vec<IVec> = l.grades_in_window(window).into_iter().map(|g| g.degree).collect();
    let support_rank = lattice::lattice_rank(&support, a.rank());
    let images: Vec<LieVec<usize>> =
        support.iter().map(|lam| dense_vec(field, &t_d.iter().map(|t| ev(lam, t)).collect::<Vec<_>>())).collect();
    if crate::lie::span_rank(field, &images) != support_rank {
        let witness = box_points(a.rank(), window)
            .into_iter()
            .find(|lam| lam.iter().any(|&x| x != 0) && t_d.iter().all(|t| ev(lam, t).is_zero()))
            .map(|lam| format!("ev_{lam:?} vanishes on T_D"))
            .unwrap_or_else(|| "λ ↦ ev_λ|T_D is not injective on the support".into());
        return Err(inv("INV(c)", witness));
    }

    // INV(d): C is graded, contains σ_D(L, L) and is D-stable.
    let deg_of_functional = |v: &LieVec<usize>| -> Option<IVec> {
        let mut degs = v.keys().map(|&k| d[k].degree().iter().map(|x| -x).collect::<IVec>());
        let first = degs.next()?;
        degs.all(|x| x == first).then_some(first)
    };
    let mut c_span = SparseEchelon::new(field);
    let mut c_by_degree: BTreeMap<IVec, Vec<LieVec<usize>>> = BTreeMap::new();
    for (j, v) in c.iter().enumerate() {
        let v = dense_vec(field, v);
        let Some(deg) = deg_of_functional(&v) else {
            return Err(inv("INV(d)", format!("c{} is zero or not homogeneous", j + 1)));
        };
        if c_span.insert(&v) {
            c_by_degree.entry(deg).or_default().push(v);
        }
    }
    let pairs = sigma_pairs(&l, &d, window);
    let missing = pairs.par_iter().find_map_first(|(x, y)| {
        let s = dense_vec(field, &sigma_d(&l, &form, &d, x, y));
        (!c_span.contains(&s)).then(|| format!("σ_D({x:?}, {y:?}) ∉ C"))
    });
    if let Some(w) = missing {
        return Err(inv("INV(d)", w));
    }
    for vs in c_by_degree.values() {
        for v in vs {
            for k in 0..nd {
                if !c_span.contains(&contragredient(&d_struct, k, v)) {
                    return Err(inv("INV(d)", format!("d{}·{v:?} ∉ C", k + 1)));
                }
            }
        }
    }

    // INV(e): T_C ⊆ C⁰ restricts injectively to T_D and contains σ_D(e, f).
    let t_c: Vec<LieVec<usize>> = t_c.iter().map(|v| dense_vec(field, v)).collect();
    let mut tc_span = SparseEchelon::new(field);
    for (j, v) in t_c.iter().enumerate() {
        let zero = vec![0; a.rank()];
        if !v.is_zero() && (deg_of_functional(v) != Some(zero) || !c_span.contains(v)) {
            return Err(inv("INV(e)", format!("t_C{} ∉ C⁰", j + 1)));
        }
        tc_span.insert(v);
    }
    let restrict: Vec<LieVec<usize>> = t_c
        .iter()
        .map(|v| dense_vec(field, &t_d.iter().map(|t| t.terms().fold(field.zero(), |acc, (k, c)| &acc + &(c * &v.coefficient(k)))).collect::<Vec<_>>()))
        .collect();
    if crate::lie::span_rank(field, &restrict) != t_c.len() {
        return Err(inv("INV(e)", "T_C → T_D* is not injective"));
    }
    for g in l.grades_in_window(window) {
        let Some(e) = l.component_basis(&g).into_iter().find_map(|e| {
            let key = e.keys().next()?.clone();
            let coeff = a.basis_element(&key.b);
            let inv_el = a.homogeneous_inverse(&coeff)?;
            let f = if g.is_root_zero() {
                l.map_entries(&e, |_| GradedElement::zero(field)).clone()
            } else {
                l.elementary(key.j, key.i, &inv_el)
            };
            let f = if g.is_root_zero() {
                let mut h = LieVec::zero(field);
                for (k, c) in e.terms() {
                    h.add_term(MatKey { i: k.i, j: k.j, b: inv_el.terms().next().expect("monomial").0.clone() }, c);
                }
                h
            } else {
                f
            };
            Some((e, f))
        }) else {
            continue;
        };
        let s = dense_vec(field, &sigma_d(&l, &form, &d, &e.0, &e.1));
        if !tc_span.contains(&s) {
            return Err(inv("INV(e)", format!("σ_D(e, f) ∉ T_C for e ∈ L{g}")));
        }
    }

    // INV(f): τ is an invariant toral 2-cocycle with values in C.
    let tau: BTreeMap<(usize, usize), LieVec<usize>> =
        tau.into_iter().map(|(k, v)| (k, dense_vec(field, &v))).filter(|(_, v)| !v.is_zero()).collect();
    let tau_of = |i: usize, j: usize| tau.get(&(i, j)).cloned().unwrap_or_else(|| LieVec::zero(field));
    let tau_lin = |x: &LieVec<usize>, j: usize| -> LieVec<usize> {
        let mut out = LieVec::zero(field);
        for (i, c) in x.terms() {
            out.add_scaled(c, &tau_of(*i, j));
        }
        out
    };
    for ((i, j), v) in &tau {
        if !c_span.contains(v) {
            return Err(inv("INV(f)", format!("τ(d{}, d{}) ∉ C", i + 1, j + 1)));
        }
    }
    for i in 0..nd {
        for j in 0..nd {
            if tau_of(i, j) != -&tau_of(j, i) {
                return Err(inv("INV(f)", format!("τ(d{}, d{}) ≠ −τ(d{}, d{})", i + 1, j + 1, j + 1, i + 1)));
            }
            for k in 0..nd {
                let cyc = [(i, j, k), (j, k, i), (k, i, j)];
                let mut lhs = LieVec::zero(field);
                let mut rhs = LieVec::zero(field);
                for &(p, q, r) in &cyc {
                    lhs = &lhs + &tau_lin(&d_struct[p][q], r);
                    rhs = &rhs + &contragredient(&d_struct, p, &tau_of(q, r));
                }
                if lhs != rhs {
                    return Err(inv("INV(f)", format!("cyclic identity fails on (d{}, d{}, d{})", i + 1, j + 1, k + 1)));
                }
                if tau_of(i, j).coefficient(&k) != tau_of(j, k).coefficient(&i) {
                    return Err(inv("INV(f)", format!("τ(d{}, d{})(d{}) ≠ τ(d{}, d{})(d{})", i + 1, j + 1, k + 1, j + 1, k + 1, i + 1)));
                }
            }
        }
    }
    for t in &t_d {
        for j in 0..nd {
            if !tau_lin(t, j).is_zero() {
                return Err(inv("INV(f)", format!("τ(T_D, d{}) ≠ 0", j + 1)));
            }
        }
    }

    Ok(BuiltE { l, form, d, d_struct, c_by_degree, t_d, t_c, tau })
}

impl BuiltE {
    pub fn l(&self) -> &SlnAlgebra {
        &self.l
    }

    pub fn derivations(&self) -> &[CentroidalDerivation] {
        &self.d
    }

    pub fn c_dim(&self) -> usize {
        self.c_by_degree.values().map(Vec::len).sum()
    }

    pub fn embed_l(&self, x: &LieVec<MatKey>) -> LieVec<EKey> {
        x.map_keys(|k| EKey::L(k.clone()))
    }

    pub fn d_elem(&self, k: usize) -> LieVec<EKey> {
        LieVec::unit(self.field(), EKey::D(k))
    }

    pub fn c_elem(&self, k: usize) -> LieVec<EKey> {
        LieVec::unit(self.field(), EKey::C(k))
    }

    fn sigma_keys(&self, x: &MatKey, y: &MatKey) -> LieVec<EKey> {
        let field = self.field();
        let lx = LieVec::unit(field, x.clone());
        let ly = LieVec::unit(field, y.clone());
        let mut out = LieVec::zero(field);
        for (k, dk) in self.d.iter().enumerate() {
            let v = self.form.eval(&lift(&self.l, dk, &lx), &ly);
            out.add_term(EKey::C(k), &v);
        }
        out
    }

    fn functional_to_e(&self, v: &LieVec<usize>) -> LieVec<EKey> {
        v.map_keys(|k| EKey::C(*k))
    }

    /// Perfectness of C ⊕ L on the window: every component of C ⊕ L is
    /// spanned by brackets of windowed components.
    pub fn check_perfect(&self, window: i64) -> std::result::Result<(), String> {
        let field = self.field();
        let basis: Vec<(Grade, LieVec<EKey>)> =
            windowed_basis(self, window).into_iter().filter(|(_, v)| v.keys().all(|k| !matches!(k, EKey::D(_)))).collect();
        let products: Vec<(Grade, LieVec<EKey>)> = basis
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, (g, x))| {
                basis[i + 1..].iter().filter_map(move |(h, y)| {
                    let s = g.add(h);
                    if s.degree.iter().any(|v| v.abs() > window) {
                        return None;
                    }
                    let b = self.bracket(x, y);
                    (!b.is_zero()).then_some((s, b))
                })
            })
            .collect();
        let mut spans: BTreeMap<Grade, SparseEchelon<EKey>> = BTreeMap::new();
        for (g, b) in products {
            spans.entry(g).or_insert_with(|| SparseEchelon::new(field)).insert(&b);
        }
        for (g, v) in &basis {
            if !spans.get(g).is_some_and(|s| s.contains(v)) {
                return Err(format!("{v:?} ∈ E{g} is not a sum of brackets in C ⊕ L"));
            }
        }
        Ok(())
    }
}

impl LieAlgebra for BuiltE {
    type Key = EKey;

    fn field(&self) -> Field {
        self.l.field()
    }

    fn root_dim(&self) -> usize {
        self.l.root_dim()
    }

    fn lattice_rank(&self) -> usize {
        self.l.lattice_rank()
    }

    fn roots(&self) -> Vec<IVec> {
        self.l.roots()
    }

    fn grade(&self, k: &EKey) -> Grade {
        let zero = vec![0; self.l.root_dim()];
        match k {
            EKey::C(a) => Grade::new(zero, self.d[*a].degree().iter().map(|x| -x).collect()),
            EKey::L(m) => self.l.grade(m),
            EKey::D(a) => Grade::new(zero, self.d[*a].degree().to_vec()),
        }
    }

    fn bracket_keys(&self, x: &EKey, y: &EKey) -> LieVec<EKey> {
        let field = self.field();
        match (x, y) {
            (EKey::C(_), EKey::C(_)) | (EKey::C(_), EKey::L(_)) | (EKey::L(_), EKey::C(_)) => LieVec::zero(field),
            (EKey::D(a), EKey::C(b)) => self.functional_to_e(&contragredient(&self.d_struct, *a, &LieVec::unit(field, *b))),
            (EKey::C(_), EKey::D(_)) => -&self.bracket_keys(y, x),
            (EKey::L(p), EKey::L(q)) => &self.embed_l(&self.l.bracket_keys(p, q)) + &self.sigma_keys(p, q),
            (EKey::D(a), EKey::L(q)) => self.embed_l(&lift(&self.l, &self.d[*a], &LieVec::unit(field, q.clone()))),
            (EKey::L(_), EKey::D(_)) => -&self.bracket_keys(y, x),
            (EKey::D(a), EKey::D(b)) => {
                let mut out = self.d_struct[*a][*b].map_keys(|k| EKey::D(*k));
                if let Some(t) = self.tau.get(&(*a, *b)) {
                    out = &out + &self.functional_to_e(t);
                }
                out
            }
        }
    }

    fn component_basis(&self, g: &Grade) -> Vec<LieVec<EKey>> {
        let field = self.field();
        let mut out = Vec::new();
        if g.is_root_zero() {
            if let Some(cs) = self.c_by_degree.get(&g.degree) {
                out.extend(cs.iter().map(|v| self.functional_to_e(v)));
            }
        }
        out.extend(self.l.component_basis(g).iter().map(|v| self.embed_l(v)));
        if g.is_root_zero() {
            for (k, dk) in self.d.iter().enumerate() {
                if dk.degree() == g.degree.as_slice() {
                    out.push(LieVec::unit(field, EKey::D(k)));
                }
            }
        }
        out
    }
}

impl ToralPair for BuiltE {
    fn toral_basis(&self) -> Vec<LieVec<EKey>> {
        let mut out: Vec<LieVec<EKey>> = self.t_c.iter().map(|v| self.functional_to_e(v)).collect();
        out.extend((0..self.l.size() - 1).map(|i| self.embed_l(&self.l.h(i, i + 1))));
        out.extend(self.t_d.iter().map(|v| v.map_keys(|k| EKey::D(*k))));
        out
    }

    /// c₁(d₂) + c₂(d₁) + (l₁ | l₂)_L.
    fn form(&self, x: &LieVec<EKey>, y: &LieVec<EKey>) -> Scalar {
        let field = self.field();
        let mut acc = field.zero();
        let mut lx = LieVec::zero(field);
        let mut ly = LieVec::zero(field);
        for (k, c) in x.terms() {
            match k {
                EKey::C(a) => acc += &(c * &y.coefficient(&EKey::D(*a))),
                EKey::D(a) => acc += &(c * &y.coefficient(&EKey::C(*a))),
                EKey::L(m) => lx.add_term(m.clone(), c),
            }
        }
        for (k, c) in y.terms() {
            if let EKey::L(m) = k {
                ly.add_term(m.clone(), c);
            }
        }
        &acc + &self.form.eval(&lx, &ly)
    }

    fn tameness_criterion(&self, window: i64) -> Option<std::result::Result<(), String>> {
        Some(self.check_perfect(window))
    }
}

/// E over sl_m(ℚ[t^{±1}]) with D = ℚ∂ and C = D* against the affine algebra:
/// d ↦ d, ∂* ↦ c and x ↦ x preserve brackets, forms and component dimensions on the window.
pub fn affine_isomorphism(e: &BuiltE, aff: &AffineAlgebra, window: i64) -> std::result::Result<(), String> {
    if e.d.len() != 1 || e.c_dim() != 1 || e.l.size() != aff.size() || e.lattice_rank() != 1 {
        return Err("E is not built from sl_m(ℚ[t^{±1}]) with one-dimensional C and D".into());
    }
    let phi = |x: &LieVec<EKey>| -> LieVec<AffKey> {
        x.map_keys(|k| match k {
            EKey::C(_) => AffKey::C,
            EKey::D(_) => AffKey::D,
            EKey::L(m) => AffKey::Loop(m.clone()),
        })
    };
    for g in e.grades_in_window(window) {
        let (a, b) = (e.component_basis(&g).len(), aff.component_basis(&g).len());
        if a != b {
            return Err(format!("dim E{g} = {a} but the affine component has dimension {b}"));
        }
    }
    let basis = windowed_basis(e, window);
    let bad = basis.par_iter().find_map_first(|(g, x)| {
        basis.iter().find_map(|(h, y)| {
            if phi(&e.bracket(x, y)) != aff.bracket(&phi(x), &phi(y)) {
                return Some(format!("φ[x, y] ≠ [φx, φy] for x ∈ E{g}, y ∈ E{h}"));
            }
            (ToralPair::form(e, x, y) != aff.form(&phi(x), &phi(y))).then(|| format!("(x | y) ≠ (φx | φy) for x ∈ E{g}, y ∈ E{h}"))
        })
    });
    bad.map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{build_affine, build_affine_core};
    use crate::graded::{GradedAlgebra, QuantumMatrix};
    use crate::lattice::LatticeSubset;
    use crate::lie::check_jacobi_random;
    use crate::matrix_lie::invariant_form;
    use crate::reflection::{build_affine_rs, build_extension, ExtensionDatum};
    use crate::roots::{build_classical, Family};

    fn affine_data() -> IaraData {
        let l = SlnAlgebra::new(3, GradedAlgebra::laurent(Field::Rationals, 1)).unwrap();
        let form = invariant_form(&l, vec![Field::Rationals.one()], 2).unwrap();
        default_data(l, form, 2)
    }

    fn qtorus_e(window: i64) -> BuiltE {
        let z3 = Field::cyclotomic(3);
        let q = QuantumMatrix::from_upper(z3, 2, &[(0, 1, z3.zeta_pow(1))]).unwrap();
        let l = SlnAlgebra::new(3, GradedAlgebra::quantum_torus(q)).unwrap();
        let form = invariant_form(&l, vec![z3.one()], window).unwrap();
        build_e(default_data(l, form, window), window).unwrap()
    }

    #[test]
    fn sigma_values() {
        let data = affine_data();
        let t = |k: i64| GradedElement::monomial(vec![k], Field::Rationals.one());
        let x = data.l.elementary(0, 1, &t(2));
        let y = data.l.elementary(1, 0, &t(-2));
        assert_eq!(sigma_d(&data.l, &data.form, &data.d, &x, &y), vec![Field::Rationals.from_i64(2)]);
        let z = data.l.elementary(1, 0, &t(1));
        assert!(sigma_d(&data.l, &data.form, &data.d, &x, &z)[0].is_zero());
        let h = data.l.h(0, 1);
        assert!(sigma_d(&data.l, &data.form, &data.d, &h, &h)[0].is_zero());
    }

    #[test]
    fn affine_blocks() {
        let e = build_e(affine_data(), 2).unwrap();
        assert_eq!(e.c_dim(), 1);
        let dc = e.bracket(&e.d_elem(0), &e.c_elem(0));
        assert!(dc.is_zero());
        assert!(e.bracket(&e.c_elem(0), &e.c_elem(0)).is_zero());
        let zero = Grade::new(vec![0, 0, 0], vec![0]);
        assert_eq!(e.component_basis(&zero).len(), 4);
        for m in [-2, -1, 1, 2] {
            assert_eq!(e.component_basis(&Grade::new(vec![0, 0, 0], vec![m])).len(), 2);
        }
        assert!(affine_isomorphism(&e, &build_affine(3).unwrap(), 2).is_ok());
        assert!(check_jacobi_random(&e, 2, 300, 7).is_ok());
    }

    #[test]
    fn affine_root_data_matches_reflection_system() {
        let e = build_e(affine_data(), 2).unwrap();
        let s = build_classical(Family::A, 2).unwrap();
        let ars = build_affine_rs(&s, 1, Some(2)).unwrap();
        compare_root_data(&e, &ars.ars, 2).unwrap();
    }

    #[test]
    fn affine_is_eala_of_nullity_one() {
        let aff = build_affine(3).unwrap();
        let v = verify_all(&aff, 2);
        assert!(v.iara.all_pass(), "{}", v.iara);
        assert!(v.eala.all_pass(), "{}", v.eala);
        assert_eq!(v.nullity, 1);
        assert_eq!(v.core.zero_dim, 3);
        assert!(v.variant.leala && v.variant.grla_style && v.variant.toral_type && v.variant.eala);
        let e = build_e(affine_data(), 2).unwrap();
        let v = verify_all(&e, 2);
        assert!(v.eala.all_pass(), "{}", v.eala);
        assert_eq!(v.nullity, 1);
    }

    #[test]
    fn degenerate_form_on_t() {
        let k = build_affine_core(3).unwrap();
        let rep = verify_iara(&k, 1);
        let ia1 = rep.get("IA1").unwrap();
        assert_eq!(ia1.status, crate::report::Status::Fail);
        assert!(ia1.witness.as_ref().unwrap().contains("radical"));
    }

    #[test]
    fn split_simple_has_nullity_zero() {
        let l = SlnAlgebra::new(3, GradedAlgebra::laurent(Field::Rationals, 0)).unwrap();
        let form = invariant_form(&l, vec![Field::Rationals.one()], 0).unwrap();
        let v = verify_all(&SlnPair { l, form }, 0);
        assert!(v.iara.all_pass(), "{}", v.iara);
        assert!(v.eala.all_pass(), "{}", v.eala);
        assert_eq!(v.nullity, 0);
    }

    #[test]
    fn disconnected_and_reductive() {
        let split = || {
            let l = SlnAlgebra::new(3, GradedAlgebra::laurent(Field::Rationals, 0)).unwrap();
            let form = invariant_form(&l, vec![Field::Rationals.one()], 0).unwrap();
            SlnPair { l, form }
        };
        let sum = DirectSum { left: split(), right: split() };
        let v = verify_all(&sum, 0);
        assert!(v.variant.iara, "{}", v.iara);
        assert!(!v.variant.leala);
        assert!(!v.eala.passed("EA4"));
        let red = DirectSum { left: split(), right: Abelian { dim: 1 } };
        let v = verify_all(&red, 0);
        assert!(v.iara.all_pass(), "{}", v.iara);
        assert!(!v.core.tame);
        assert!(v.core.witness.is_some());
    }

    #[test]
    fn qtorus_eala() {
        let e = qtorus_e(2);
        let v = verify_all(&e, 2);
        assert!(v.iara.all_pass(), "{}", v.iara);
        assert!(v.eala.all_pass(), "{}", v.eala);
        assert_eq!(v.nullity, 2);
        assert!(v.core.tame);
        assert!(v.variant.leala);
        let ed = ExtensionDatum::untwisted(build_classical(Family::A, 2).unwrap(), LatticeSubset::full(2));
        let ars = build_extension(ed, Some(2)).unwrap();
        compare_root_data(&e, &ars, 2).unwrap();
    }

    #[test]
    fn invalid_data_rejected() {
        let mut data = affine_data();
        data.c.clear();
        data.t_c.clear();
        assert!(matches!(build_e(data, 2), Err(Error::Axiom { axiom, .. }) if axiom == "INV(d)"));
        let mut data = affine_data();
        data.t_d = vec![vec![Field::Rationals.zero()]];
        assert!(matches!(build_e(data, 2), Err(Error::Axiom { axiom, .. }) if axiom == "INV(c)"));
        let mut data = affine_data();
        data.tau.insert((0, 0), vec![Field::Rationals.one()]);
        assert!(matches!(build_e(data, 2), Err(Error::Axiom { axiom, .. }) if axiom == "INV(f)"));
    }
}
