//! ⟨A, A⟩ = (A ∧ A)/B and its graded HC₁, the universal central extension
//! of sl_n(A) with Steinberg relations, loop algebras with their cocycle,
//! the affine algebra g ⊗ ℚ[t^{±1}] ⊕ ℚc ⊕ ℚd, and multiloop algebras.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graded::{Basis, GradedAlgebra, GradedElement};
use crate::lattice::{self, box_points, IVec};
use crate::lie::{dense_columns, windowed_basis, Grade, LieAlgebra, LieVec, SparseEchelon};
use crate::linalg::Matrix;
use crate::matrix_lie::{MatKey, MatLieElement, SlnAlgebra};
use crate::report::AxiomReport;
use crate::roots::{build_classical, Family, RootSystem};
use crate::scalar::{root_group_generator, Field, Scalar};

/// ⟨a, b⟩ for basis elements a < b.
pub type WedgeKey = (Basis, Basis);
pub type WedgeElement = LieVec<WedgeKey>;

pub fn wedge_degree(k: &WedgeKey) -> IVec {
    lattice::add(&k.0.degree, &k.1.degree)
}

fn wedge_basis(field: Field, a: &Basis, b: &Basis) -> WedgeElement {
    match a.cmp(b) {
        std::cmp::Ordering::Equal => LieVec::zero(field),
        std::cmp::Ordering::Less => LieVec::unit(field, (a.clone(), b.clone())),
        std::cmp::Ordering::Greater => LieVec::term((b.clone(), a.clone()), -field.one()),
    }
}

/// The antisymmetric bilinear expansion of ⟨a, b⟩.
pub fn wedge(a: &GradedElement, b: &GradedElement) -> WedgeElement {
    let field = a.field();
    let mut out = LieVec::zero(field);
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            out.add_scaled(&(c * d), &wedge_basis(field, x, y));
        }
    }
    out
}

fn in_box(v: &[i64], w: i64) -> bool {
    v.iter().all(|x| x.abs() <= w)
}

/// Generators and B-relations of one degree of the windowed quotient.
#[derive(Debug)]
struct DegreeQuotient {
    relations: SparseEchelon<WedgeKey>,
    /// Generators that are not pivots; a basis of the windowed quotient.
    free: Vec<WedgeKey>,
}

fn relation(a: &GradedAlgebra, x: &Basis, y: &Basis, z: &Basis) -> WedgeElement {
    let field = a.field();
    let ex = a.basis_element(x);
    let ey = a.basis_element(y);
    let ez = a.basis_element(z);
    let mut r = wedge(&a.mul(&ex, &ey), &ez);
    r = &r + &wedge(&a.mul(&ey, &ez), &ex);
    r = &r + &wedge(&a.mul(&ez, &ex), &ey);
    if r.field() != field {
        return LieVec::zero(field);
    }
    r
}

fn build_degree(a: &GradedAlgebra, lambda: &[i64], w: i64) -> DegreeQuotient {
    let field = a.field();
    let pts = box_points(a.rank(), w);
    let mut gens = BTreeSet::new();
    for mu in &pts {
        let nu = lattice::sub(lambda, mu);
        if !in_box(&nu, w) {
            continue;
        }
        for x in a.component_basis(mu) {
            for y in a.component_basis(&nu) {
                if x < y {
                    gens.insert((x.clone(), y));
                }
            }
        }
    }
    // Triples are taken up to rotation: α is the least of (α, β, γ).
    let rels: Vec<WedgeElement> = pts
        .par_iter()
        .flat_map_iter(|alpha| {
            let mut out = Vec::new();
            for beta in &pts {
                let gamma = lattice::sub(&lattice::sub(lambda, alpha), beta);
                if !in_box(&gamma, w) || alpha > beta || alpha > &gamma {
                    continue;
                }
                let sums = [lattice::add(alpha, beta), lattice::add(beta, &gamma), lattice::add(&gamma, alpha)];
                if !sums.iter().all(|s| in_box(s, w)) {
                    continue;
                }
                for x in a.component_basis(alpha) {
                    for y in a.component_basis(beta) {
                        for z in a.component_basis(&gamma) {
                            let r = relation(a, &x, &y, &z);
                            if !r.is_zero() {
                                out.push(r);
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut relations = SparseEchelon::new(field);
    for r in &rels {
        relations.insert(r);
    }
    let pivots: BTreeSet<WedgeKey> = relations.basis().iter().filter_map(|r| r.leading().map(|(k, _)| k.clone())).collect();
    let free = gens.into_iter().filter(|g| !pivots.contains(g)).collect();
    DegreeQuotient { relations, free }
}

/// ⟨A, A⟩ with B-relations among entries of degree in [−w, w]ⁿ. Canonical
/// forms are residues modulo the windowed relations; quotients are built
/// lazily per degree and cached.
pub struct WedgeSpace {
    algebra: GradedAlgebra,
    window: i64,
    cache: Mutex<BTreeMap<IVec, Arc<DegreeQuotient>>>,
}

impl Clone for WedgeSpace {
    fn clone(&self) -> Self {
        WedgeSpace::new(self.algebra.clone(), self.window)
    }
}

impl fmt::Debug for WedgeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨A, A⟩ over {} (window {})", self.algebra, self.window)
    }
}

impl WedgeSpace {
    pub fn new(algebra: GradedAlgebra, window: i64) -> WedgeSpace {
        WedgeSpace { algebra, window, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    fn quotient(&self, lambda: &[i64]) -> Arc<DegreeQuotient> {
        if let Some(q) = self.cache.lock().expect("cache lock").get(lambda) {
            return q.clone();
        }
        let q = Arc::new(build_degree(&self.algebra, lambda, self.window));
        self.cache.lock().expect("cache lock").entry(lambda.to_vec()).or_insert(q).clone()
    }

    /// Residue modulo the windowed relations; terms outside the window are kept as they are.
    pub fn reduce_unchecked(&self, x: &WedgeElement) -> WedgeElement {
        let mut by_degree: BTreeMap<IVec, WedgeElement> = BTreeMap::new();
        for (k, c) in x.terms() {
            by_degree.entry(wedge_degree(k)).or_insert_with(|| LieVec::zero(x.field())).add_term(k.clone(), c);
        }
        let mut out = LieVec::zero(x.field());
        for (d, part) in by_degree {
            out = &out + &self.quotient(&d).relations.reduce(&part);
        }
        out
    }

    /// Canonical form of x; every entry degree must lie in the window.
    pub fn reduce(&self, x: &WedgeElement) -> Result<WedgeElement> {
        for (k, _) in x.terms() {
            for b in [&k.0, &k.1] {
                if !in_box(&b.degree, self.window) {
                    return Err(Error::WindowOverflow(format!("{:?}", b.degree), self.window as u32));
                }
            }
        }
        Ok(self.reduce_unchecked(x))
    }

    /// Basis of the degree-λ part of the windowed quotient.
    pub fn quotient_basis(&self, lambda: &[i64]) -> Vec<WedgeKey> {
        self.quotient(lambda).free.clone()
    }

    /// ⟨a, b⟩ ↦ [a, b].
    pub fn commutator(&self, x: &WedgeElement) -> GradedElement {
        let a = &self.algebra;
        let mut out = GradedElement::zero(a.field());
        for ((p, q), c) in x.terms() {
            let comm = a.commutator(&a.basis_element(p), &a.basis_element(q));
            out.add_scaled(c, &comm);
        }
        out
    }

    /// Basis of the kernel of ⟨a, b⟩ ↦ [a, b] on the degree-λ quotient.
    pub fn hc1_basis(&self, lambda: &[i64]) -> Vec<WedgeElement> {
        let a = &self.algebra;
        let field = a.field();
        let free = self.quotient_basis(lambda);
        if free.is_empty() {
            return Vec::new();
        }
        let target = a.component_basis(lambda);
        let mut m = Matrix::zeros(field, target.len().max(1), free.len());
        for (j, k) in free.iter().enumerate() {
            let img = self.commutator(&LieVec::unit(field, k.clone()));
            for (i, b) in target.iter().enumerate() {
                m.set(i, j, img.coefficient(b));
            }
        }
        m.kernel()
            .into_iter()
            .map(|v| {
                let mut el = LieVec::zero(field);
                for (c, k) in v.iter().zip(&free) {
                    el.add_term(k.clone(), c);
                }
                el
            })
            .collect()
    }
}

/// Windowed HC₁ in one degree, with the dimension sequence that was observed.
#[derive(Clone, Debug)]
pub struct Hc1Component {
    pub degree: IVec,
    /// (window, dimension) for every window tried.
    pub dims: Vec<(i64, usize)>,
    /// (window, dimension) at the first window agreeing with its predecessor.
    pub stable: Option<(i64, usize)>,
    pub basis: Vec<WedgeElement>,
}

impl Hc1Component {
    pub fn dim(&self) -> Option<usize> {
        self.stable.map(|(_, d)| d)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "dims": self.dims.iter().map(|(w, d)| json!({"window": w, "dim": d})).collect::<Vec<_>>(),
            "stable": self.stable.map(|(w, d)| json!({"window": w, "dim": d})),
            "inconclusive": self.stable.is_none(),
        })
    }
}

/// HC₁(A)^λ: windows grow from max(1, |λ|∞) until two consecutive
/// dimensions agree or `max_window` is reached (then inconclusive).
pub fn hc1_component(a: &GradedAlgebra, lambda: &[i64], max_window: i64) -> Result<Hc1Component> {
    if lambda.len() != a.rank() {
        return Err(Error::Dimension(format!("degree {lambda:?} has the wrong rank for {a}")));
    }
    let start = lambda.iter().map(|x| x.abs()).max().unwrap_or(0).max(1);
    let mut dims = Vec::new();
    let mut basis = Vec::new();
    let mut stable = None;
    for w in start..=max_window.max(start) {
        let space = WedgeSpace::new(a.clone(), w);
        basis = space.hc1_basis(lambda);
        let d = basis.len();
        if dims.last().is_some_and(|&(_, prev)| prev == d) {
            dims.push((w, d));
            stable = Some((w, d));
            break;
        }
        dims.push((w, d));
        if w >= max_window {
            break;
        }
    }
    Ok(Hc1Component { degree: lambda.to_vec(), dims, stable, basis })
}

// ---------------------------------------------------------------------------
// uce(sl_n(A)) = ⟨A, A⟩ ⊕ (sl_n(ℚ) ⊗ A)

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UceKey {
    Wedge(Basis, Basis),
    Mat(MatKey),
}

impl fmt::Debug for UceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UceKey::Wedge(a, b) => write!(f, "⟨{:?}, {:?}⟩", a.degree, b.degree),
            UceKey::Mat(k) => write!(f, "{k:?}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct UceAlgebra {
    n: usize,
    wedge: WedgeSpace,
}

impl UceAlgebra {
    /// uce(sl_n(A)) with B-relations taken in the given window.
    pub fn new(n: usize, a: GradedAlgebra, window: i64) -> Result<UceAlgebra> {
        if n < 2 {
            return Err(Error::invalid("uce(sl_n(A)) needs n ≥ 2"));
        }
        Ok(UceAlgebra { n, wedge: WedgeSpace::new(a, window) })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &GradedAlgebra {
        self.wedge.algebra()
    }

    pub fn wedge_space(&self) -> &WedgeSpace {
        &self.wedge
    }

    fn inv_n(&self) -> Scalar {
        self.field().from_i64(self.n as i64).inv().expect("n ≠ 0")
    }

    fn embed_wedge(&self, w: &WedgeElement) -> LieVec<UceKey> {
        self.wedge.reduce_unchecked(w).map_keys(|(a, b)| UceKey::Wedge(a.clone(), b.clone()))
    }

    /// X_ij(a) = 0 ⊕ E_ij ⊗ a.
    pub fn x(&self, i: usize, j: usize, a: &GradedElement) -> LieVec<UceKey> {
        let mut v = LieVec::zero(self.field());
        for (b, c) in a.terms() {
            v.add_term(UceKey::Mat(MatKey { i, j, b: b.clone() }), c);
        }
        v
    }

    /// 0 ⊕ x ⊗ a for x = E_ii − E_jj.
    pub fn h(&self, i: usize, j: usize, a: &GradedElement) -> LieVec<UceKey> {
        &self.x(i, i, a) - &self.x(j, j, a)
    }

    /// ⟨a, b⟩ ⊕ 0.
    pub fn pair(&self, a: &GradedElement, b: &GradedElement) -> LieVec<UceKey> {
        self.embed_wedge(&wedge(a, b))
    }

    /// (w, M) ↦ (1/n)[w]·I + M in sl_n(A).
    pub fn project(&self, x: &LieVec<UceKey>) -> LieVec<MatKey> {
        let field = self.field();
        let a = self.coefficients();
        let mut out = LieVec::zero(field);
        let inv = self.inv_n();
        for (k, c) in x.terms() {
            match k {
                UceKey::Mat(m) => out.add_term(m.clone(), c),
                UceKey::Wedge(p, q) => {
                    let comm = a.commutator(&a.basis_element(p), &a.basis_element(q));
                    for (b, d) in comm.terms() {
                        for i in 0..self.n {
                            out.add_term(MatKey { i, j: i, b: b.clone() }, &(&(c * d) * &inv));
                        }
                    }
                }
            }
        }
        out
    }

    fn mat_bracket(&self, x: &MatKey, y: &MatKey) -> LieVec<UceKey> {
        let a = self.coefficients();
        let field = self.field();
        let inv = self.inv_n();
        let mut out = LieVec::zero(field);
        if x.j == y.i {
            for (b, c) in a.basis_product(&x.b, &y.b) {
                out.add_term(UceKey::Mat(MatKey { i: x.i, j: y.j, b }), &c);
            }
        }
        if y.j == x.i {
            for (b, c) in a.basis_product(&y.b, &x.b) {
                out.add_term(UceKey::Mat(MatKey { i: y.i, j: x.j, b }), &-c);
            }
        }
        if x.j == y.i && y.j == x.i {
            // Remove the trace (1/n)[a, b]·I and record (1/n)⟨a, b⟩.
            let comm = a.commutator(&a.basis_element(&x.b), &a.basis_element(&y.b));
            for (b, c) in comm.terms() {
                for i in 0..self.n {
                    out.add_term(UceKey::Mat(MatKey { i, j: i, b: b.clone() }), &-(c * &inv));
                }
            }
            let w = wedge_basis(field, &x.b, &y.b).scale(&inv);
            out = &out + &self.embed_wedge(&w);
        }
        out
    }
}

impl LieAlgebra for UceAlgebra {
    type Key = UceKey;

    fn field(&self) -> Field {
        self.coefficients().field()
    }

    fn root_dim(&self) -> usize {
        self.n
    }

    fn lattice_rank(&self) -> usize {
        self.coefficients().rank()
    }

    fn roots(&self) -> Vec<IVec> {
        let mut out = vec![vec![0; self.n]];
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let mut r = vec![0; self.n];
                    r[i] = 1;
                    r[j] = -1;
                    out.push(r);
                }
            }
        }
        out
    }

    fn grade(&self, k: &UceKey) -> Grade {
        match k {
            UceKey::Wedge(a, b) => Grade::new(vec![0; self.n], lattice::add(&a.degree, &b.degree)),
            UceKey::Mat(m) => {
                let mut r = vec![0; self.n];
                if m.i != m.j {
                    r[m.i] = 1;
                    r[m.j] = -1;
                }
                Grade::new(r, m.b.degree.clone())
            }
        }
    }

    fn bracket_keys(&self, x: &UceKey, y: &UceKey) -> LieVec<UceKey> {
        let a = self.coefficients();
        match (x, y) {
            (UceKey::Mat(p), UceKey::Mat(q)) => self.mat_bracket(p, q),
            (UceKey::Wedge(c1, c2), UceKey::Wedge(d1, d2)) => {
                let c = a.commutator(&a.basis_element(c1), &a.basis_element(c2));
                let d = a.commutator(&a.basis_element(d1), &a.basis_element(d2));
                self.embed_wedge(&wedge(&c, &d))
            }
            (UceKey::Wedge(c1, c2), UceKey::Mat(m)) => {
                let c = a.commutator(&a.basis_element(c1), &a.basis_element(c2));
                self.x(m.i, m.j, &a.commutator(&c, &a.basis_element(&m.b)))
            }
            (UceKey::Mat(_), UceKey::Wedge(..)) => -&self.bracket_keys(y, x),
        }
    }

    fn component_basis(&self, g: &Grade) -> Vec<LieVec<UceKey>> {
        let field = self.field();
        let a = self.coefficients();
        let abasis = a.component_basis(&g.degree);
        if g.is_root_zero() {
            let mut out = Vec::new();
            for i in 0..self.n - 1 {
                for b in &abasis {
                    let e = a.basis_element(b);
                    out.push(self.h(i, i + 1, &e));
                }
            }
            for (p, q) in self.wedge.quotient_basis(&g.degree) {
                out.push(LieVec::unit(field, UceKey::Wedge(p, q)));
            }
            return out;
        }
        let i = g.root.iter().position(|&v| v == 1);
        let j = g.root.iter().position(|&v| v == -1);
        match (i, j) {
            (Some(i), Some(j)) if g.root.iter().filter(|&&v| v != 0).count() == 2 => {
                abasis.into_iter().map(|b| LieVec::unit(field, UceKey::Mat(MatKey { i, j, b }))).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Bracket of sl_n(A) computed by matrix multiplication, used as the target of the projection.
fn sl_bracket(n: usize, a: &GradedAlgebra, x: &LieVec<MatKey>, y: &LieVec<MatKey>) -> LieVec<MatKey> {
    MatLieElement::from_vec(n, x).bracket(a, &MatLieElement::from_vec(n, y)).to_vec()
}

/// The projection is a Lie homomorphism on windowed basis pairs.
pub fn check_projection(u: &UceAlgebra, window: i64) -> std::result::Result<(), String> {
    let basis = windowed_basis(u, window);
    let a = u.coefficients();
    let bad = basis.par_iter().find_map_first(|(g, x)| {
        basis.iter().find_map(|(h, y)| {
            let lhs = u.project(&u.bracket(x, y));
            let rhs = sl_bracket(u.n, a, &u.project(x), &u.project(y));
            (lhs != rhs).then(|| format!("π[x, y] ≠ [πx, πy] for x ∈ uce{g}, y ∈ uce{h}"))
        })
    });
    bad.map_or(Ok(()), Err)
}

/// Kernel of the projection on root-0 components with degree in the window.
pub fn projection_kernel(u: &UceAlgebra, window: i64) -> Vec<(IVec, LieVec<UceKey>)> {
    let field = u.field();
    let pts = box_points(u.lattice_rank(), window);
    let per: Vec<Vec<(IVec, LieVec<UceKey>)>> = pts
        .par_iter()
        .map(|d| {
            let basis = u.component_basis(&Grade::new(vec![0; u.n], d.clone()));
            if basis.is_empty() {
                return Vec::new();
            }
            let images: Vec<LieVec<MatKey>> = basis.iter().map(|b| u.project(b)).collect();
            let (m, _) = dense_columns(field, &images, &[]);
            let kernel = if m.rows() == 0 {
                (0..basis.len()).map(|k| (0..basis.len()).map(|j| if j == k { field.one() } else { field.zero() }).collect()).collect()
            } else {
                m.kernel()
            };
            kernel
                .into_iter()
                .map(|v: Vec<Scalar>| {
                    let mut el = LieVec::zero(field);
                    for (c, b) in v.iter().zip(&basis) {
                        el.add_scaled(c, b);
                    }
                    (d.clone(), el)
                })
                .collect()
        })
        .collect();
    per.into_iter().flatten().collect()
}

/// Kernel elements bracket to zero with every windowed basis vector.
pub fn check_kernel_central(u: &UceAlgebra, kernel: &[(IVec, LieVec<UceKey>)], window: i64) -> std::result::Result<(), String> {
    let basis = windowed_basis(u, window);
    let bad = kernel.par_iter().find_map_first(|(d, z)| {
        basis.iter().find_map(|(g, y)| (!u.bracket(z, y).is_zero()).then(|| format!("kernel element of degree {d:?} fails to commute with uce{g}")))
    });
    bad.map_or(Ok(()), Err)
}

/// st1–st3 for X_ij(a) on monomials with degree in the window.
pub fn steinberg_check(u: &UceAlgebra, window: i64) -> Result<AxiomReport> {
    let n = u.n;
    if n < 3 {
        return Err(Error::invalid(format!("Steinberg relations need n ≥ 3; got {n}")));
    }
    let a = u.coefficients();
    let field = u.field();
    let mut monomials = Vec::new();
    for d in box_points(a.rank(), window) {
        for b in a.component_basis(&d) {
            monomials.push(a.basis_element(&b));
        }
    }
    let mut rep = AxiomReport::new(format!("Steinberg relations for uce(sl_{n}(A))"));
    let w = Some(window);

    let two = field.from_i64(2);
    let st1 = monomials.par_iter().find_map_first(|x| {
        monomials.iter().take(8).find_map(|y| {
            let combo = &x.scale(&two) + y;
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).find_map(|(i, j)| {
                let lhs = u.x(i, j, &combo);
                let rhs = &u.x(i, j, x).scale(&two) + &u.x(i, j, y);
                (lhs != rhs).then(|| format!("X_{}{}(2a + b) ≠ 2X(a) + X(b) for a = {x}, b = {y}", i + 1, j + 1))
            })
        })
    });
    rep.record("st1", w, st1.map_or(Ok(()), Err));

    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |l| (i, j, l))))
        .filter(|&(i, j, l)| i != j && j != l && i != l)
        .collect();
    let st2 = monomials.par_iter().find_map_first(|x| {
        monomials.iter().find_map(|y| {
            triples.iter().find_map(|&(i, j, l)| {
                let lhs = u.bracket(&u.x(i, j, x), &u.x(j, l, y));
                let rhs = u.x(i, l, &a.mul(x, y));
                (lhs != rhs).then(|| format!("[X_{}{}({x}), X_{}{}({y})] ≠ X_{}{}(ab)", i + 1, j + 1, j + 1, l + 1, i + 1, l + 1))
            })
        })
    });
    rep.record("st2", w, st2.map_or(Ok(()), Err));

    let quads: Vec<(usize, usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).flat_map(move |l| (0..n).map(move |m| (i, j, l, m)))))
        .filter(|&(i, j, l, m)| i != j && l != m && i != m && j != l)
        .collect();
    let st3 = monomials.par_iter().find_map_first(|x| {
        monomials.iter().find_map(|y| {
            quads.iter().find_map(|&(i, j, l, m)| {
                let b = u.bracket(&u.x(i, j, x), &u.x(l, m, y));
                (!b.is_zero()).then(|| format!("[X_{}{}({x}), X_{}{}({y})] ≠ 0", i + 1, j + 1, l + 1, m + 1))
            })
        })
    });
    rep.record("st3", w, st3.map_or(Ok(()), Err));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Loop algebras and the affine algebra

/// κ(x, y) = tr(xy).
pub fn trace_form(x: &Matrix, y: &Matrix) -> Result<Scalar> {
    let p = x.mul(y)?;
    let mut t = x.field().zero();
    for i in 0..p.rows().min(p.cols()) {
        t += p.get(i, i);
    }
    Ok(t)
}

/// σ(x ⊗ t^m, y ⊗ t^n) = δ_{m+n,0}·m·κ(x, y).
pub fn loop_cocycle(kappa: impl Fn(&Matrix, &Matrix) -> Result<Scalar>, x: &Matrix, m: i64, y: &Matrix, n: i64) -> Result<Scalar> {
    if m + n != 0 {
        return Ok(x.field().zero());
    }
    Ok(&kappa(x, y)? * &x.field().from_i64(m))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AffKey {
    C,
    D,
    Loop(MatKey),
}

impl fmt::Debug for AffKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffKey::C => f.write_str("c"),
            AffKey::D => f.write_str("d"),
            AffKey::Loop(k) => write!(f, "{k:?}"),
        }
    }
}

/// (sl_m ⊗ ℚ[t^{±1}]) ⊕ ℚc, plus ℚd when `with_d`.
#[derive(Clone, Debug)]
pub struct AffineAlgebra {
    loop_algebra: SlnAlgebra,
    with_d: bool,
}

/// E = (sl_m ⊗ ℚ[t^{±1}]) ⊕ ℚc ⊕ ℚd.
pub fn build_affine(m: usize) -> Result<AffineAlgebra> {
    let loop_algebra = SlnAlgebra::chevalley_tensor(m, GradedAlgebra::laurent(Field::Rationals, 1))?;
    Ok(AffineAlgebra { loop_algebra, with_d: true })
}

/// K = (sl_m ⊗ ℚ[t^{±1}]) ⊕ ℚc without the degree derivation.
pub fn build_affine_core(m: usize) -> Result<AffineAlgebra> {
    Ok(AffineAlgebra { with_d: false, ..build_affine(m)? })
}

impl AffineAlgebra {
    pub fn size(&self) -> usize {
        self.loop_algebra.size()
    }

    pub fn loop_algebra(&self) -> &SlnAlgebra {
        &self.loop_algebra
    }

    pub fn has_d(&self) -> bool {
        self.with_d
    }

    pub fn root_system(&self) -> RootSystem {
        build_classical(Family::A, self.size() - 1).expect("m ≥ 2")
    }

    pub fn c(&self) -> LieVec<AffKey> {
        LieVec::unit(Field::Rationals, AffKey::C)
    }

    pub fn d(&self) -> LieVec<AffKey> {
        LieVec::unit(Field::Rationals, AffKey::D)
    }

    /// x ⊗ t^k for x in sl_m, given as a loop-algebra vector of degree 0.
    pub fn embed(&self, x: &LieVec<MatKey>) -> LieVec<AffKey> {
        x.map_keys(|k| AffKey::Loop(k.clone()))
    }

    /// E_ij ⊗ t^k.
    pub fn e(&self, i: usize, j: usize, k: i64) -> LieVec<AffKey> {
        LieVec::unit(Field::Rationals, AffKey::Loop(MatKey { i, j, b: Basis::new(vec![k], 0) }))
    }

    /// (E_ii − E_jj) ⊗ t^k.
    pub fn h(&self, i: usize, j: usize, k: i64) -> LieVec<AffKey> {
        &self.e(i, i, k) - &self.e(j, j, k)
    }

    fn form_keys(&self, x: &AffKey, y: &AffKey) -> Scalar {
        let f = Field::Rationals;
        match (x, y) {
            (AffKey::C, AffKey::D) | (AffKey::D, AffKey::C) => f.one(),
            (AffKey::Loop(p), AffKey::Loop(q)) => {
                let dual = p.i == q.j && p.j == q.i && p.b.degree[0] + q.b.degree[0] == 0;
                if dual {
                    f.one()
                } else {
                    f.zero()
                }
            }
            _ => f.zero(),
        }
    }

    /// (x ⊗ t^a | y ⊗ t^b) = δ_{a+b,0} tr(xy), (c | d) = 1.
    pub fn form(&self, x: &LieVec<AffKey>, y: &LieVec<AffKey>) -> Scalar {
        let mut acc = Field::Rationals.zero();
        for (p, a) in x.terms() {
            for (q, b) in y.terms() {
                let v = self.form_keys(p, q);
                if !v.is_zero() {
                    acc += &(&(a * b) * &v);
                }
            }
        }
        acc
    }

    /// H = (h ⊗ 1) ⊕ ℚc ⊕ ℚd.
    pub fn cartan(&self) -> Vec<LieVec<AffKey>> {
        let mut out: Vec<LieVec<AffKey>> = (0..self.size() - 1).map(|i| self.h(i, i + 1, 0)).collect();
        out.push(self.c());
        if self.with_d {
            out.push(self.d());
        }
        out
    }
}

impl LieAlgebra for AffineAlgebra {
    type Key = AffKey;

    fn field(&self) -> Field {
        Field::Rationals
    }

    fn root_dim(&self) -> usize {
        self.size()
    }

    fn lattice_rank(&self) -> usize {
        1
    }

    fn roots(&self) -> Vec<IVec> {
        self.loop_algebra.roots()
    }

    fn grade(&self, k: &AffKey) -> Grade {
        match k {
            AffKey::C | AffKey::D => Grade::new(vec![0; self.size()], vec![0]),
            AffKey::Loop(m) => self.loop_algebra.grade(m),
        }
    }

    fn bracket_keys(&self, x: &AffKey, y: &AffKey) -> LieVec<AffKey> {
        let f = Field::Rationals;
        match (x, y) {
            (AffKey::Loop(p), AffKey::Loop(q)) => {
                let mut out = self.embed(&self.loop_algebra.bracket_keys(p, q));
                let (a, b) = (p.b.degree[0], q.b.degree[0]);
                if a + b == 0 && p.i == q.j && p.j == q.i {
                    out.add_term(AffKey::C, &f.from_i64(a));
                }
                out
            }
            (AffKey::D, AffKey::Loop(q)) if self.with_d => LieVec::term(AffKey::Loop(q.clone()), f.from_i64(q.b.degree[0])),
            (AffKey::Loop(p), AffKey::D) if self.with_d => LieVec::term(AffKey::Loop(p.clone()), f.from_i64(-p.b.degree[0])),
            _ => LieVec::zero(f),
        }
    }

    fn component_basis(&self, g: &Grade) -> Vec<LieVec<AffKey>> {
        let mut out: Vec<LieVec<AffKey>> = self.loop_algebra.component_basis(g).iter().map(|v| self.embed(v)).collect();
        if g.is_root_zero() && g.degree.iter().all(|&v| v == 0) {
            out.push(self.c());
            if self.with_d {
                out.push(self.d());
            }
        }
        out
    }
}

/// c is central, σ is a 2-cocycle and d acts by degree, on windowed basis triples.
pub fn check_affine(e: &AffineAlgebra, window: i64) -> AxiomReport {
    let mut rep = AxiomReport::new(format!("affine algebra over sl_{}", e.size()));
    let w = Some(window);
    let basis = windowed_basis(e, window);
    let c = e.c();
    let central = basis.iter().find(|(_, y)| !e.bracket(&c, y).is_zero()).map(|(g, _)| format!("[c, E{g}] ≠ 0"));
    rep.record("c central", w, central.map_or(Ok(()), Err));
    if e.with_d {
        let d = e.d();
        let deg = basis.iter().find_map(|(g, y)| {
            let expect = y.scale_i64(g.degree[0]);
            (e.bracket(&d, y) != expect).then(|| format!("[d, x ⊗ t^m] ≠ m·x ⊗ t^m in E{g}"))
        });
        rep.record("d degree derivation", w, deg.map_or(Ok(()), Err));
    }
    let loops: Vec<&(Grade, LieVec<AffKey>)> = basis.iter().filter(|(_, v)| v.keys().all(|k| matches!(k, AffKey::Loop(_)))).collect();
    let sigma = |x: &LieVec<AffKey>, y: &LieVec<AffKey>| e.bracket(x, y).coefficient(&AffKey::C);
    let cocycle = loops.par_iter().find_map_first(|(g, x)| {
        loops.iter().find_map(|(h, y)| {
            if sigma(x, y) != -sigma(y, x) {
                return Some(format!("σ not antisymmetric on E{g} × E{h}"));
            }
            loops.iter().find_map(|(k, z)| {
                let loop_part = |v: LieVec<AffKey>| v.filter(|key| matches!(key, AffKey::Loop(_)));
                let s = &(&sigma(&loop_part(e.bracket(x, y)), z) + &sigma(&loop_part(e.bracket(y, z)), x))
                    + &sigma(&loop_part(e.bracket(z, x)), y);
                (!s.is_zero()).then(|| format!("σ cocycle identity fails on E{g} × E{h} × E{k}"))
            })
        })
    });
    rep.record("σ 2-cocycle", w, cocycle.map_or(Ok(()), Err));
    rep
}

// ---------------------------------------------------------------------------
// Multiloop algebras

/// A finite-dimensional algebra given by structure constants e_i e_j = Σ_k c_ij^k e_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureAlgebra {
    field: Field,
    table: Vec<Vec<Vec<Scalar>>>,
}

impl StructureAlgebra {
    pub fn new(field: Field, table: Vec<Vec<Vec<Scalar>>>) -> Result<StructureAlgebra> {
        let d = table.len();
        if table.iter().any(|row| row.len() != d || row.iter().any(|v| v.len() != d)) {
            return Err(Error::Dimension("structure table must be d×d×d".into()));
        }
        Ok(StructureAlgebra { field, table })
    }

    /// sl_m(F) on the basis E_ij (i ≠ j, row-major) followed by E_ii − E_{i+1,i+1}.
    pub fn sl(field: Field, m: usize) -> StructureAlgebra {
        let basis = sl_basis(field, m);
        let mats: Vec<Matrix> = basis.clone();
        let d = mats.len();
        let mut table = vec![vec![vec![field.zero(); d]; d]; d];
        for (i, x) in mats.iter().enumerate() {
            for (j, y) in mats.iter().enumerate() {
                let xy = x.mul(y).expect("square");
                let yx = y.mul(x).expect("square");
                let mut br = Matrix::zeros(field, m, m);
                for r in 0..m {
                    for c in 0..m {
                        br.set(r, c, xy.get(r, c) - yx.get(r, c));
                    }
                }
                table[i][j] = sl_coordinates(m, &br);
            }
        }
        StructureAlgebra { field, table }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out = vec![self.field.zero(); d];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &(&ab * c);
                    }
                }
            }
        }
        out
    }

    fn embed(&self, target: Field) -> Result<StructureAlgebra> {
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|c| c.embed(target)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(StructureAlgebra { field: target, table })
    }
}

fn sl_basis(field: Field, m: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let mut e = Matrix::zeros(field, m, m);
                e.set(i, j, field.one());
                out.push(e);
            }
        }
    }
    for i in 0..m - 1 {
        let mut h = Matrix::zeros(field, m, m);
        h.set(i, i, field.one());
        h.set(i + 1, i + 1, -field.one());
        out.push(h);
    }
    out
}

/// Coordinates of a traceless matrix in the basis of [`StructureAlgebra::sl`].
fn sl_coordinates(m: usize, x: &Matrix) -> Vec<Scalar> {
    let field = x.field();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                out.push(x.get(i, j).clone());
            }
        }
    }
    // x_ii = c_i − c_{i−1} with c_{−1} = 0, so c_i = Σ_{k ≤ i} x_kk.
    let mut acc = field.zero();
    for i in 0..m - 1 {
        acc += x.get(i, i);
        out.push(acc.clone());
    }
    out
}

/// The automorphism x ↦ −xᵗ of sl_m in the basis of [`StructureAlgebra::sl`].
pub fn sl_minus_transpose(field: Field, m: usize) -> Matrix {
    let basis = sl_basis(field, m);
    let d = basis.len();
    let mut out = Matrix::zeros(field, d, d);
    for (j, x) in basis.iter().enumerate() {
        let mut y = Matrix::zeros(field, m, m);
        for r in 0..m {
            for c in 0..m {
                y.set(r, c, -x.get(c, r));
            }
        }
        for (i, v) in sl_coordinates(m, &y).into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// M_m(A, σ) = ⊕_λ A^{π(λ)} ⊗ z^λ with A^{π(λ)} = {a : σ_i(a) = ζ_{m_i}^{λ_i} a}.
#[derive(Clone, Debug)]
pub struct MultiloopAlgebra {
    base: StructureAlgebra,
    orders: Vec<u32>,
    /// Eigenspace bases keyed by residues (λ_i mod m_i).
    eigenspaces: BTreeMap<Vec<i64>, Vec<Vec<Scalar>>>,
}

pub fn build_multiloop(a: &StructureAlgebra, sigmas: &[Matrix], orders: &[u32]) -> Result<MultiloopAlgebra> {
    if sigmas.len() != orders.len() || sigmas.is_empty() {
        return Err(Error::Dimension("one order per automorphism is required".into()));
    }
    if orders.contains(&0) {
        return Err(Error::invalid("orders must be positive"));
    }
    let lcm = orders.iter().fold(1u32, |acc, &m| num_integer::lcm(acc, m));
    let field = a.field().join(&Field::cyclotomic(lcm));
    let base = a.embed(field)?;
    let sig: Vec<Matrix> = sigmas
        .iter()
        .map(|s| {
            let rows = s.row_vecs().iter().map(|r| r.iter().map(|c| c.embed(field)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
            Matrix::from_rows(field, rows)
        })
        .collect::<Result<_>>()?;
    let d = base.dim();
    let unit = |k: usize| -> Vec<Scalar> { (0..d).map(|i| if i == k { field.one() } else { field.zero() }).collect() };
    for (idx, s) in sig.iter().enumerate() {
        if s.rows() != d || s.cols() != d {
            return Err(Error::Dimension(format!("σ_{} must be {d}×{d}", idx + 1)));
        }
        for i in 0..d {
            for j in 0..d {
                let lhs = s.mul_vec(&base.mul(&unit(i), &unit(j)))?;
                let rhs = base.mul(&s.mul_vec(&unit(i))?, &s.mul_vec(&unit(j))?);
                if lhs != rhs {
                    return Err(Error::axiom("automorphism", format!("σ_{}(e_{i} e_{j}) ≠ σ(e_{i}) σ(e_{j})", idx + 1)));
                }
            }
        }
        let mut p = Matrix::identity(field, d);
        for _ in 0..orders[idx] {
            p = p.mul(s)?;
        }
        if p != Matrix::identity(field, d) {
            return Err(Error::axiom("σ^m = id", format!("σ_{}^{} ≠ id", idx + 1, orders[idx])));
        }
    }
    for i in 0..sig.len() {
        for j in i + 1..sig.len() {
            if sig[i].mul(&sig[j])? != sig[j].mul(&sig[i])? {
                return Err(Error::axiom("commuting automorphisms", format!("σ_{}σ_{} ≠ σ_{}σ_{}", i + 1, j + 1, j + 1, i + 1)));
            }
        }
    }
    let ranges: Vec<IVec> = orders.iter().map(|&m| (0..m as i64).collect()).collect();
    let mut residues: Vec<Vec<i64>> = vec![vec![]];
    for r in &ranges {
        residues = residues.into_iter().flat_map(|p| r.iter().map(move |&k| [p.clone(), vec![k]].concat())).collect();
    }
    let gen = root_group_generator(field);
    let group = num_integer::lcm(2, i64::from(field.order()));
    // ζ_m = g^{|g|/m}, where g generates the roots of unity of the field.
    let zeta = |m: u32, k: i64| gen.pow(group / i64::from(m) * k);
    let mut eigenspaces = BTreeMap::new();
    for res in residues {
        let mut rows = Vec::new();
        for (s, (&m, &k)) in sig.iter().zip(orders.iter().zip(&res)) {
            let z = zeta(m, k)?;
            for r in 0..d {
                rows.push((0..d).map(|c| if r == c { s.get(r, c) - &z } else { s.get(r, c).clone() }).collect::<Vec<_>>());
            }
        }
        let basis = Matrix::from_rows(field, rows)?.kernel();
        eigenspaces.insert(res, basis);
    }
    Ok(MultiloopAlgebra { base, orders: orders.to_vec(), eigenspaces })
}

impl MultiloopAlgebra {
    pub fn field(&self) -> Field {
        self.base.field()
    }

    pub fn base(&self) -> &StructureAlgebra {
        &self.base
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    fn residue(&self, lambda: &[i64]) -> Vec<i64> {
        lambda.iter().zip(&self.orders).map(|(&l, &m)| l.rem_euclid(i64::from(m))).collect()
    }

    /// Basis of A^{π(λ)}.
    pub fn eigenspace(&self, lambda: &[i64]) -> &[Vec<Scalar>] {
        &self.eigenspaces[&self.residue(lambda)]
    }

    /// Eigenspace dimensions per residue class.
    pub fn eigenspace_dims(&self) -> BTreeMap<Vec<i64>, usize> {
        self.eigenspaces.iter().map(|(k, v)| (k.clone(), v.len())).collect()
    }

    pub fn component_dim(&self, lambda: &[i64]) -> usize {
        self.eigenspace(lambda).len()
    }

    /// (a ⊗ z^λ)(b ⊗ z^μ) = ab ⊗ z^{λ+μ}, with ab in coordinates of A^{π(λ+μ)}.
    pub fn multiply(&self, lambda: &[i64], a: usize, mu: &[i64], b: usize) -> Result<Vec<Scalar>> {
        let x = &self.eigenspace(lambda)[a];
        let y = &self.eigenspace(mu)[b];
        let prod = self.base.mul(x, y);
        let target = lattice::add(lambda, mu);
        let basis = self.eigenspace(&target);
        if basis.is_empty() {
            return if prod.iter().all(Scalar::is_zero) {
                Ok(Vec::new())
            } else {
                Err(Error::axiom("grading", format!("product leaves A^π{:?}", self.residue(&target))))
            };
        }
        let d = self.base.dim();
        let mut m = Matrix::zeros(self.field(), d, basis.len());
        for (j, v) in basis.iter().enumerate() {
            for (i, c) in v.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        m.solve(&prod)?.ok_or_else(|| Error::axiom("grading", format!("product leaves A^π{:?}", self.residue(&target))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::QuantumMatrix;
    use crate::lie::{check_bigrading, check_jacobi_random};

    fn laurent() -> GradedAlgebra {
        GradedAlgebra::laurent(Field::Rationals, 1)
    }

    fn t(k: i64) -> GradedElement {
        GradedElement::monomial(vec![k], Field::Rationals.one())
    }

    #[test]
    fn wedge_reduction_examples() {
        let ws = WedgeSpace::new(laurent(), 3);
        assert!(ws.reduce(&wedge(&t(2), &t(2))).unwrap().is_zero());
        let one = t(0);
        assert!(ws.reduce(&wedge(&one, &t(2))).unwrap().is_zero());
        let class = ws.reduce(&wedge(&t(1), &t(-1))).unwrap();
        assert!(!class.is_zero());
        // ⟨t², t⁻²⟩ = 2⟨t, t⁻¹⟩.
        let two = ws.reduce(&wedge(&t(2), &t(-2))).unwrap();
        assert_eq!(two, class.scale_i64(2));
        assert!(matches!(ws.reduce(&wedge(&t(4), &t(-4))), Err(Error::WindowOverflow(..))));
    }

    /// B-reduction oracle: ⟨1, a⟩ = 0 follows from the relation with b = c = 1.
    #[test]
    fn unit_pairs_vanish_by_relation() {
        let a = laurent();
        let r = relation(&a, &Basis::new(vec![3], 0), &Basis::new(vec![0], 0), &Basis::new(vec![0], 0));
        // ⟨a, 1⟩ + ⟨1, a⟩ + ⟨a, 1⟩ = ⟨a, 1⟩.
        assert_eq!(r, wedge(&t(3), &t(0)));
    }

    #[test]
    fn hc1_laurent() {
        let a = laurent();
        let h0 = hc1_component(&a, &[0], 8).unwrap();
        assert_eq!(h0.dim(), Some(1));
        assert!(h0.stable.unwrap().0 <= 6);
        for m in [-3, -1, 1, 2, 5] {
            assert_eq!(hc1_component(&a, &[m], 8).unwrap().dim(), Some(0), "degree {m}");
        }
        let q = GradedAlgebra::laurent(Field::Rationals, 0);
        assert_eq!(hc1_component(&q, &[], 3).unwrap().dim(), Some(0));
        assert!(hc1_component(&a, &[0, 0], 3).is_err());
    }

    #[test]
    fn hc1_inconclusive_flag() {
        let h = hc1_component(&laurent(), &[0], 1).unwrap();
        assert!(h.stable.is_none());
        assert_eq!(h.dims, vec![(1, 1)]);
    }

    /// Windowed HC₁ of the Laurent ring in two variables, degree 0, is
    /// spanned by ⟨t₁, t₁⁻¹⟩ and ⟨t₂, t₂⁻¹⟩ (Ω¹/dA in degree 0).
    #[test]
    fn hc1_two_variables() {
        let a = GradedAlgebra::laurent(Field::Rationals, 2);
        assert_eq!(hc1_component(&a, &[0, 0], 3).unwrap().dim(), Some(2));
        assert_eq!(hc1_component(&a, &[1, 0], 3).unwrap().dim(), Some(1));
    }

    #[test]
    fn uce_brackets() {
        let u = UceAlgebra::new(3, laurent(), 5).unwrap();
        let one = t(0);
        let b = u.bracket(&u.x(0, 1, &one), &u.x(1, 0, &one));
        assert_eq!(b, u.h(0, 1, &one));
        // [E_12 ⊗ t, E_21 ⊗ t⁻¹]: tr(xy) = 1 so the wedge part is (1/3)⟨t, t⁻¹⟩.
        let b = u.bracket(&u.x(0, 1, &t(1)), &u.x(1, 0, &t(-1)));
        let wedge_part = b.filter(|k| matches!(k, UceKey::Wedge(..)));
        assert_eq!(wedge_part, u.pair(&t(1), &t(-1)).scale(&Field::Rationals.from_rational(crate::scalar::rat(1, 3))));
        assert_eq!(b.filter(|k| matches!(k, UceKey::Mat(_))), u.h(0, 1, &one));
        assert!(check_jacobi_random(&u, 2, 200, 1).is_ok());
        assert!(check_bigrading(&u, 1).is_ok());
        assert!(check_projection(&u, 1).is_ok());
    }

    #[test]
    fn uce_kernel_is_hc1() {
        let u = UceAlgebra::new(3, laurent(), 5).unwrap();
        let ker = projection_kernel(&u, 5);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0].0, vec![0]);
        assert!(check_kernel_central(&u, &ker, 2).is_ok());
    }

    #[test]
    fn steinberg() {
        let u = UceAlgebra::new(4, laurent(), 4).unwrap();
        let rep = steinberg_check(&u, 2).unwrap();
        assert!(rep.all_pass(), "{rep}");
        let st2 = u.bracket(&u.x(0, 1, &t(1)), &u.x(1, 2, &t(2)));
        assert_eq!(st2, u.x(0, 2, &t(3)));
        assert!(u.bracket(&u.x(0, 1, &t(1)), &u.x(2, 3, &t(2))).is_zero());
        assert!(steinberg_check(&UceAlgebra::new(2, laurent(), 2).unwrap(), 1).is_err());
    }

    #[test]
    fn uce_over_quantum_torus() {
        let z3 = Field::cyclotomic(3);
        let q = GradedAlgebra::quantum_torus(QuantumMatrix::from_upper(z3, 2, &[(0, 1, z3.zeta_pow(1))]).unwrap());
        let u = UceAlgebra::new(3, q, 2).unwrap();
        assert!(check_jacobi_random(&u, 1, 60, 3).is_ok());
        assert!(steinberg_check(&u, 1).unwrap().all_pass());
    }

    #[test]
    fn loop_cocycle_values() {
        let f = Field::Rationals;
        let x = Matrix::from_i64_rows(f, &[vec![0, 1], vec![0, 0]]);
        let y = Matrix::from_i64_rows(f, &[vec![0, 0], vec![1, 0]]);
        assert!(loop_cocycle(trace_form, &x, 1, &y, 2).unwrap().is_zero());
        assert_eq!(loop_cocycle(trace_form, &x, 1, &y, -1).unwrap(), f.one());
        assert!(loop_cocycle(trace_form, &x, 0, &y, 0).unwrap().is_zero());
        assert_eq!(loop_cocycle(trace_form, &x, 3, &y, -3).unwrap(), f.from_i64(3));
    }

    #[test]
    fn affine_structure() {
        let e = build_affine(3).unwrap();
        assert!(check_affine(&e, 2).all_pass());
        let x = e.e(0, 1, 2);
        assert_eq!(e.bracket(&e.d(), &x), x.scale_i64(2));
        let zero = Grade::new(vec![0, 0, 0], vec![0]);
        assert_eq!(e.component_basis(&zero).len(), 4);
        for m in 1..=3 {
            assert_eq!(e.component_basis(&Grade::new(vec![0, 0, 0], vec![m])).len(), 2);
        }
        let b = e.bracket(&e.e(0, 1, 1), &e.e(1, 0, -1));
        assert_eq!(b, &e.h(0, 1, 0) + &e.c());
        assert!(check_jacobi_random(&e, 2, 200, 5).is_ok());
        assert!(build_affine(1).is_err());
    }

    #[test]
    fn multiloops() {
        let f = Field::Rationals;
        let g = StructureAlgebra::sl(f, 3);
        let id = Matrix::identity(f, 8);
        let untwisted = build_multiloop(&g, &[id], &[1]).unwrap();
        assert_eq!(untwisted.component_dim(&[5]), 8);
        let s = sl_minus_transpose(f, 3);
        let tw = build_multiloop(&g, &[s.clone()], &[2]).unwrap();
        assert_eq!(tw.component_dim(&[0]), 3);
        assert_eq!(tw.component_dim(&[1]), 5);
        assert_eq!(tw.eigenspace_dims().values().sum::<usize>(), 8);
        // The fixed algebra is closed under the bracket and not abelian.
        let mut nonzero = false;
        for a in 0..3 {
            for b in 0..3 {
                let c = tw.multiply(&[0], a, &[0], b).unwrap();
                nonzero |= c.iter().any(|x| !x.is_zero());
            }
        }
        assert!(nonzero);
        assert!(tw.multiply(&[1], 0, &[1], 1).is_ok());
        let wrong = build_multiloop(&g, &[s], &[3]);
        assert!(matches!(wrong, Err(Error::Axiom { .. })));
        let z3 = build_multiloop(&g, &[Matrix::identity(f, 8)], &[3]).unwrap();
        assert_eq!(z3.field(), Field::cyclotomic(3));
        assert_eq!(z3.component_dim(&[0]), 8);
        assert_eq!(z3.component_dim(&[1]), 0);
    }
}
