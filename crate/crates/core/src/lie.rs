//! Sparse vectors over a keyed basis, (Q, Λ)-bigraded Lie algebras given by
//! structure constants on basis keys, and checks shared by every concrete
//! Lie algebra in the crate.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::lattice::{box_points, IVec};
use crate::linalg::Matrix;
use crate::roots::{qvec, RootSystem};
use crate::scalar::{Field, Scalar};

/// A finite linear combination of basis keys; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieVec<K: Ord> {
    field: Field,
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord + Clone> LieVec<K> {
    pub fn zero(field: Field) -> Self {
        LieVec { field, terms: BTreeMap::new() }
    }

    pub fn term(key: K, c: Scalar) -> Self {
        let mut v = LieVec::zero(c.field());
        v.add_term(key, &c);
        v
    }

    pub fn unit(field: Field, key: K) -> Self {
        LieVec::term(key, field.one())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coefficient(&self, k: &K) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<(&K, &Scalar)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, key: K, c: &Scalar) {
        assert_eq!(c.field(), self.field, "vector across different fields");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &Self) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.terms {
            self.add_term(k.clone(), &(c * x));
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = LieVec::zero(self.field);
        out.add_scaled(c, self);
        out
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&self.field.from_i64(c))
    }

    pub fn filter(&self, keep: impl Fn(&K) -> bool) -> Self {
        LieVec {
            field: self.field,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Relabels keys, summing coefficients of keys that collide.
    pub fn map_keys<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> LieVec<J> {
        let mut out = LieVec::zero(self.field);
        for (k, c) in &self.terms {
            out.add_term(f(k), c);
        }
        out
    }

    /// Is `other` a scalar multiple of `self`? Returns the scalar c with other = c·self.
    pub fn ratio(&self, other: &Self) -> Option<Scalar> {
        let (k, a) = self.leading()?;
        let c = other.coefficient(k).try_div(a).ok()?;
        (self.scale(&c) == *other).then_some(c)
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for LieVec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("({c})·{k:?}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<K: Ord + Clone> std::ops::Add for &LieVec<K> {
    type Output = LieVec<K>;
    fn add(self, rhs: &LieVec<K>) -> LieVec<K> {
        let mut out = self.clone();
        out.add_scaled(&self.field.one(), rhs);
        out
    }
}

impl<K: Ord + Clone> std::ops::Sub for &LieVec<K> {
    type Output = LieVec<K>;
    fn sub(self, rhs: &LieVec<K>) -> LieVec<K> {
        let mut out = self.clone();
        out.add_scaled(&-self.field.one(), rhs);
        out
    }
}

impl<K: Ord + Clone> std::ops::Neg for &LieVec<K> {
    type Output = LieVec<K>;
    fn neg(self) -> LieVec<K> {
        self.scale(&-self.field.one())
    }
}

// ---------------------------------------------------------------------------
// Linear algebra on sparse vectors

/// Incremental echelon form over sparse vectors. Each row is monic at its
/// smallest key (its pivot); rows are not reduced against each other, so
/// reduction eliminates pivots in increasing key order.
#[derive(Clone, Debug)]
pub struct SparseEchelon<K: Ord> {
    field: Field,
    rows: BTreeMap<K, LieVec<K>>,
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new(field: Field) -> Self {
        SparseEchelon { field, rows: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The residue of `v` after eliminating every pivot key.
    pub fn reduce(&self, v: &LieVec<K>) -> LieVec<K> {
        let mut v = v.clone();
        let mut cursor: Option<K> = None;
        loop {
            let next = v
                .terms
                .range::<K, _>((
                    cursor.as_ref().map_or(std::ops::Bound::Unbounded, std::ops::Bound::Excluded),
                    std::ops::Bound::Unbounded,
                ))
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, c)| (k.clone(), c.clone()));
            let Some((k, c)) = next else { return v };
            v.add_scaled(&-c, &self.rows[&k]);
            cursor = Some(k);
        }
    }

    pub fn contains(&self, v: &LieVec<K>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &LieVec<K>) -> bool {
        let r = self.reduce(v);
        let Some((k, c)) = r.leading().map(|(k, c)| (k.clone(), c.clone())) else { return false };
        let monic = r.scale(&c.inv().expect("nonzero pivot"));
        self.rows.insert(k, monic);
        true
    }

    pub fn basis(&self) -> Vec<LieVec<K>> {
        self.rows.values().cloned().collect()
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Dense matrix whose columns are the given vectors, over the union of their keys.
pub fn dense_columns<K: Ord + Clone>(field: Field, vecs: &[LieVec<K>], extra: &[&LieVec<K>]) -> (Matrix, Vec<K>) {
    let mut keys: Vec<K> = vecs.iter().chain(extra.iter().copied()).flat_map(|v| v.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let mut m = Matrix::zeros(field, keys.len(), vecs.len());
    for (j, v) in vecs.iter().enumerate() {
        for (k, c) in v.terms() {
            let i = keys.binary_search(k).expect("key collected");
            m.set(i, j, c.clone());
        }
    }
    (m, keys)
}

/// Coordinates of `x` in the span of `basis` (assumed independent), if it lies there.
pub fn coordinates_in<K: Ord + Clone>(basis: &[LieVec<K>], x: &LieVec<K>) -> Option<Vec<Scalar>> {
    let field = x.field();
    if basis.is_empty() {
        return x.is_zero().then(Vec::new);
    }
    let (m, keys) = dense_columns(field, basis, &[x]);
    let rhs: Vec<Scalar> = keys.iter().map(|k| x.coefficient(k)).collect();
    if m.rows() == 0 {
        return Some(vec![field.zero(); basis.len()]);
    }
    m.solve(&rhs).ok().flatten()
}

pub fn span_rank<K: Ord + Clone>(field: Field, vecs: &[LieVec<K>]) -> usize {
    let mut e = SparseEchelon::new(field);
    vecs.iter().filter(|v| e.insert(v)).count()
}

// ---------------------------------------------------------------------------
// Bigraded Lie algebras

/// A (Q, Λ)-degree: root part in the coordinates of the root lattice and
/// lattice part in Λ = ℤⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade {
    pub root: IVec,
    pub degree: IVec,
}

impl Grade {
    pub fn new(root: IVec, degree: IVec) -> Grade {
        Grade { root, degree }
    }

    pub fn add(&self, other: &Grade) -> Grade {
        Grade::new(
            self.root.iter().zip(&other.root).map(|(a, b)| a + b).collect(),
            self.degree.iter().zip(&other.degree).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn neg(&self) -> Grade {
        Grade::new(self.root.iter().map(|x| -x).collect(), self.degree.iter().map(|x| -x).collect())
    }

    pub fn is_root_zero(&self) -> bool {
        self.root.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.root, self.degree)
    }
}

/// A Lie algebra presented on a graded basis of keys. Elements of the algebra
/// are the spans of [`LieAlgebra::component_basis`], which may be proper
/// subspaces of the span of keys of the same grade.
pub trait LieAlgebra: Sync {
    type Key: Ord + Clone + fmt::Debug + Send + Sync;

    fn field(&self) -> Field;

    /// Length of root coordinates.
    fn root_dim(&self) -> usize;

    /// Rank n of Λ = ℤⁿ.
    fn lattice_rank(&self) -> usize;

    /// The finite set of roots carrying nonzero components, including 0.
    fn roots(&self) -> Vec<IVec>;

    fn grade(&self, k: &Self::Key) -> Grade;

    fn bracket_keys(&self, a: &Self::Key, b: &Self::Key) -> LieVec<Self::Key>;

    /// A basis of the component of the given grade.
    fn component_basis(&self, g: &Grade) -> Vec<LieVec<Self::Key>>;

    fn bracket(&self, x: &LieVec<Self::Key>, y: &LieVec<Self::Key>) -> LieVec<Self::Key> {
        let mut out = LieVec::zero(self.field());
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let cd = c * d;
                out.add_scaled(&cd, &self.bracket_keys(a, b));
            }
        }
        out
    }

    /// The grade of a nonzero homogeneous vector.
    fn grade_of(&self, x: &LieVec<Self::Key>) -> Option<Grade> {
        let mut it = x.keys().map(|k| self.grade(k));
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    /// Nonempty grades with root in [`LieAlgebra::roots`] and degree in [−w, w]ⁿ.
    fn grades_in_window(&self, w: i64) -> Vec<Grade> {
        let pts = box_points(self.lattice_rank(), w);
        let mut out = Vec::new();
        for r in self.roots() {
            for d in &pts {
                let g = Grade::new(r.clone(), d.clone());
                if !self.component_basis(&g).is_empty() {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Does `x` lie in the component of grade `g`?
    fn in_component(&self, x: &LieVec<Self::Key>, g: &Grade) -> bool {
        if x.is_zero() {
            return true;
        }
        if x.keys().any(|k| self.grade(k) != *g) {
            return false;
        }
        coordinates_in(&self.component_basis(g), x).is_some()
    }

    /// Does `x` belong to the algebra (every homogeneous part in its component)?
    fn contains(&self, x: &LieVec<Self::Key>) -> bool {
        let mut parts: BTreeMap<Grade, LieVec<Self::Key>> = BTreeMap::new();
        for (k, c) in x.terms() {
            parts.entry(self.grade(k)).or_insert_with(|| LieVec::zero(self.field())).add_term(k.clone(), c);
        }
        parts.iter().all(|(g, v)| self.in_component(v, g))
    }
}

/// All basis vectors of the components with degree in [−w, w]ⁿ.
pub fn windowed_basis<L: LieAlgebra + ?Sized>(l: &L, w: i64) -> Vec<(Grade, LieVec<L::Key>)> {
    l.grades_in_window(w)
        .into_iter()
        .flat_map(|g| l.component_basis(&g).into_iter().map(move |v| (g.clone(), v)))
        .collect()
}

pub fn jacobi_witness<L: LieAlgebra + ?Sized>(
    l: &L,
    x: &LieVec<L::Key>,
    y: &LieVec<L::Key>,
    z: &LieVec<L::Key>,
) -> Option<String> {
    let s1 = l.bracket(x, &l.bracket(y, z));
    let s2 = l.bracket(y, &l.bracket(z, x));
    let s3 = l.bracket(z, &l.bracket(x, y));
    let total = &(&s1 + &s2) + &s3;
    (!total.is_zero()).then(|| format!("x = {x:?}, y = {y:?}, z = {z:?}: cyclic sum {total:?}"))
}

/// A homogeneous element with small random integer coefficients.
pub fn random_homogeneous<L: LieAlgebra + ?Sized, R: Rng>(l: &L, grades: &[Grade], rng: &mut R) -> LieVec<L::Key> {
    let g = grades.choose(rng).expect("nonempty grade list");
    let basis = l.component_basis(g);
    let mut out = LieVec::zero(l.field());
    for b in &basis {
        let c: i64 = rng.gen_range(-3..=3);
        out.add_scaled(&l.field().from_i64(c), b);
    }
    if out.is_zero() {
        out = basis[0].clone();
    }
    out
}

/// Jacobi identity on `samples` seeded random homogeneous triples with degrees in the window.
pub fn check_jacobi_random<L: LieAlgebra + ?Sized>(l: &L, window: i64, samples: usize, seed: u64) -> Result<(), String> {
    let grades = l.grades_in_window(window);
    if grades.is_empty() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<_> = (0..samples)
        .map(|_| {
            (
                random_homogeneous(l, &grades, &mut rng),
                random_homogeneous(l, &grades, &mut rng),
                random_homogeneous(l, &grades, &mut rng),
            )
        })
        .collect();
    match triples.par_iter().find_map_first(|(x, y, z)| jacobi_witness(l, x, y, z)) {
        Some(w) => Err(w),
        None => Ok(()),
    }
}

/// Antisymmetry and bigrading compatibility on all pairs of windowed basis
/// vectors: [L_α^λ, L_β^μ] ⊆ L_{α+β}^{λ+μ}.
pub fn check_bigrading<L: LieAlgebra + ?Sized>(l: &L, window: i64) -> Result<(), String> {
    let basis = windowed_basis(l, window);
    let roots = l.roots();
    let bad = basis.par_iter().find_map_first(|(g, x)| {
        basis.iter().find_map(|(h, y)| {
            let b = l.bracket(x, y);
            if l.bracket(y, x) != -&b {
                return Some(format!("[x, y] ≠ −[y, x] for x ∈ L{g}, y ∈ L{h}"));
            }
            let target = g.add(h);
            if !roots.contains(&target.root) {
                return (!b.is_zero()).then(|| format!("[L{g}, L{h}] ≠ 0 although {:?} is not a root", target.root));
            }
            (!l.in_component(&b, &target)).then(|| format!("[L{g}, L{h}] ⊄ L{target}"))
        })
    });
    bad.map_or(Ok(()), Err)
}

// ---------------------------------------------------------------------------
// sl₂-triples and invertible elements

/// (e, h, f) with [e, f] = −h, [h, e] = 2e, [h, f] = −2f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Triple<K: Ord> {
    pub e: LieVec<K>,
    pub h: LieVec<K>,
    pub f: LieVec<K>,
}

impl<K: Ord + Clone + fmt::Debug> Sl2Triple<K> {
    pub fn check<L: LieAlgebra<Key = K> + ?Sized>(&self, l: &L) -> Result<(), String> {
        if l.bracket(&self.e, &self.f) != -&self.h {
            return Err(format!("[e, f] ≠ −h for e = {:?}", self.e));
        }
        if l.bracket(&self.h, &self.e) != self.e.scale_i64(2) {
            return Err(format!("[h, e] ≠ 2e for e = {:?}", self.e));
        }
        if l.bracket(&self.h, &self.f) != self.f.scale_i64(-2) {
            return Err(format!("[h, f] ≠ −2f for e = {:?}", self.e));
        }
        Ok(())
    }
}

/// Completes e ∈ L_α^λ to an sl₂-triple with f ∈ L_{−α}^{−λ} when the
/// opposite component is one-dimensional or some basis vector works.
pub fn sl2_completion<L: LieAlgebra + ?Sized>(l: &L, e: &LieVec<L::Key>) -> Option<Sl2Triple<L::Key>> {
    let g = l.grade_of(e)?;
    for f0 in l.component_basis(&g.neg()) {
        let h0 = l.bracket(&f0, e);
        if h0.is_zero() {
            continue;
        }
        let Some(c) = e.ratio(&l.bracket(&h0, e)) else { continue };
        if c.is_zero() {
            continue;
        }
        let s = l.field().from_i64(2).try_div(&c).ok()?;
        let t = Sl2Triple { e: e.clone(), h: h0.scale(&s), f: f0.scale(&s) };
        if t.check(l).is_ok() {
            return Some(t);
        }
    }
    None
}

/// [h, y] = ⟨β, α∨⟩·y for every windowed basis vector y of root β, where
/// h comes from an sl₂-triple at the root with index `a` of `s`.
pub fn check_eigenvalue_law<L: LieAlgebra + ?Sized>(
    l: &L,
    s: &RootSystem,
    a: usize,
    h: &LieVec<L::Key>,
    window: i64,
) -> Result<(), String> {
    let field = l.field();
    let basis = windowed_basis(l, window);
    let bad = basis.par_iter().find_map_first(|(g, y)| {
        let p = s.pairing(&qvec(&g.root), a);
        let expect = y.scale(&field.from_rational(p.clone()));
        (l.bracket(h, y) != expect).then(|| format!("[h, y] ≠ {p}·y for y ∈ L{g}"))
    });
    bad.map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_echelon_membership() {
        let f = Field::Rationals;
        let v = |xs: &[(u8, i64)]| {
            let mut out = LieVec::zero(f);
            for &(k, c) in xs {
                out.add_term(k, &f.from_i64(c));
            }
            out
        };
        let mut e = SparseEchelon::new(f);
        assert!(e.insert(&v(&[(1, 1), (2, 1)])));
        assert!(e.insert(&v(&[(2, 1), (3, 1)])));
        assert!(!e.insert(&v(&[(1, 1), (3, -1)])));
        assert!(e.contains(&v(&[(1, 2), (2, 4), (3, 2)])));
        assert!(!e.contains(&v(&[(3, 1)])));
        assert_eq!(e.dim(), 2);
        let basis = vec![v(&[(1, 1), (2, 1)]), v(&[(2, 1), (3, 1)])];
        assert_eq!(coordinates_in(&basis, &v(&[(1, 1), (3, -1)])).unwrap(), vec![f.one(), -f.one()]);
        assert!(coordinates_in(&basis, &v(&[(3, 1)])).is_none());
    }

    #[test]
    fn ratio_detects_multiples() {
        let f = Field::Rationals;
        let x = LieVec::term(1u8, f.from_i64(2));
        assert_eq!(x.ratio(&x.scale_i64(-3)), Some(f.from_i64(-3)));
        let mut y = x.clone();
        y.add_term(2, &f.one());
        assert_eq!(x.ratio(&y), None);
    }
}
