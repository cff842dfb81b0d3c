//! Finite root systems: classical and exceptional realizations, reflections,
//! root strings, orbits, normalized forms and classification.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{int, parse_rational, rat, rational_to_i64, rational_to_string, Rational};

pub type QVec = Vec<Rational>;

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn qdot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn qadd(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn qsub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qscale(c: &Rational, a: &[Rational]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// `form · y` for a symmetric matrix given by rows.
pub fn apply_form(form: &[QVec], y: &[Rational]) -> QVec {
    form.iter().map(|row| qdot(row, y)).collect()
}

pub fn form_value(form: &[QVec], x: &[Rational], y: &[Rational]) -> Rational {
    qdot(x, &apply_form(form, y))
}

/// Rank over ℚ of a list of rational vectors.
pub fn qrank(vs: &[QVec]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Matrix::from_rational_rows(vs).rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "BC" => Family::BC,
            "E6" => Family::E6,
            "E7" => Family::E7,
            "E8" => Family::E8,
            "F4" | "F" => Family::F4,
            "G2" | "G" => Family::G2,
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        })
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self, Family::E6 | Family::E7 | Family::E8 | Family::F4 | Family::G2)
    }

    pub fn fixed_rank(&self) -> Option<usize> {
        match self {
            Family::E6 => Some(6),
            Family::E7 => Some(7),
            Family::E8 => Some(8),
            Family::F4 => Some(4),
            Family::G2 => Some(2),
            _ => None,
        }
    }

    /// Number of nonzero roots of the irreducible system of this type.
    pub fn root_count(&self, r: usize) -> usize {
        match self {
            Family::A => r * (r + 1),
            Family::B | Family::C => 2 * r * r,
            Family::D => 2 * r * (r - 1),
            Family::BC => 2 * r * r + 2 * r,
            Family::E6 => 72,
            Family::E7 => 126,
            Family::E8 => 240,
            Family::F4 => 48,
            Family::G2 => 12,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
            Family::E6 => "E",
            Family::E7 => "E",
            Family::E8 => "E",
            Family::F4 => "F",
            Family::G2 => "G",
        }
    }
}

/// Type of an irreducible component: family and rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.symbol(), self.rank)
    }
}

/// Classification result; a single component for irreducible systems.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeLabel {
    pub components: Vec<Component>,
}

impl TypeLabel {
    pub fn irreducible(family: Family, rank: usize) -> TypeLabel {
        TypeLabel { components: vec![Component { family, rank }] }
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn single(&self) -> Option<Component> {
        if self.is_irreducible() {
            Some(self.components[0])
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Result<TypeLabel> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(TypeLabel { components: vec![] });
        }
        let mut components = Vec::new();
        for part in s.split('x') {
            let part = part.trim();
            let split = part.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::Parse(format!("bad type label {s:?}")))?;
            let (fam, rank) = part.split_at(split);
            let rank: usize = rank.parse().map_err(|_| Error::Parse(format!("bad type label {s:?}")))?;
            let family = match fam {
                "E" => Family::parse(&format!("E{rank}"))?,
                "F" => Family::F4,
                "G" => Family::G2,
                other => Family::parse(other)?,
            };
            components.push(Component { family, rank });
        }
        Ok(TypeLabel { components })
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

/// α-string through β: the set {i : β + iα ∈ R} with p = max, −q = min.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootString {
    pub members: Vec<i64>,
    pub p: i64,
    pub q: i64,
    pub unbroken: bool,
    /// ⟨β, α∨⟩.
    pub pairing: Rational,
}

/// Short, long and divisible roots of an irreducible system under its
/// normalized form, and the ratio k(S) = (long|long)/(short|short).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthPartition {
    pub short: Vec<usize>,
    pub long: Vec<usize>,
    pub divisible: Vec<usize>,
    pub k: Option<i64>,
}

/// A finite root system in ℚ^dim. Index 0 is the zero root.
#[derive(Clone, Debug)]
pub struct RootSystem {
    dim: usize,
    form: Vec<QVec>,
    roots: Vec<QVec>,
    coroots: Vec<QVec>,
    index: HashMap<QVec, usize>,
    label: Option<TypeLabel>,
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.form == other.form && self.root_set() == other.root_set()
    }
}

impl RootSystem {
    /// Roots with coroots 2(α|·)/(α|α) from a symmetric form. The zero vector
    /// is added if absent.
    pub fn from_form(form: Vec<QVec>, roots: Vec<QVec>) -> Result<RootSystem> {
        let dim = form.len();
        if form.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("form must be square".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                if form[i][j] != form[j][i] {
                    return Err(Error::invalid("form is not symmetric"));
                }
            }
        }
        let mut coroots = Vec::with_capacity(roots.len());
        for a in &roots {
            if a.len() != dim {
                return Err(Error::Dimension(format!("root of length {} in dimension {dim}", a.len())));
            }
            if is_zero_vec(a) {
                coroots.push(vec![Rational::zero(); dim]);
                continue;
            }
            let fa = apply_form(&form, a);
            let aa = qdot(a, &fa);
            if aa.is_zero() {
                return Err(Error::invalid(format!("root {} is isotropic", show_qvec(a))));
            }
            coroots.push(qscale(&(int(2) / aa), &fa));
        }
        RootSystem::with_coroots(form, roots, coroots)
    }

    /// Roots with explicitly supplied coroots.
    pub fn with_coroots(form: Vec<QVec>, roots: Vec<QVec>, coroots: Vec<QVec>) -> Result<RootSystem> {
        let dim = form.len();
        if roots.len() != coroots.len() {
            return Err(Error::Dimension("roots and coroots differ in number".into()));
        }
        let mut pairs: Vec<(QVec, QVec)> = roots.into_iter().zip(coroots).collect();
        if !pairs.iter().any(|(r, _)| is_zero_vec(r)) {
            pairs.push((vec![Rational::zero(); dim], vec![Rational::zero(); dim]));
        }
        // zero first, then a fixed order for reproducible output
        pairs.sort_by(|(a, _), (b, _)| {
            let za = is_zero_vec(a);
            let zb = is_zero_vec(b);
            zb.cmp(&za).then_with(|| a.cmp(b))
        });
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (roots, coroots): (Vec<QVec>, Vec<QVec>) = pairs.into_iter().unzip();
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        Ok(RootSystem { dim, form, roots, coroots, index, label: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &[QVec] {
        &self.form
    }

    pub fn roots(&self) -> &[QVec] {
        &self.roots
    }

    pub fn coroots(&self) -> &[QVec] {
        &self.coroots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.len() <= 1
    }

    pub fn nonzero(&self) -> std::ops::Range<usize> {
        1..self.roots.len()
    }

    pub fn root(&self, i: usize) -> &QVec {
        &self.roots[i]
    }

    pub fn coroot(&self, i: usize) -> &QVec {
        &self.coroots[i]
    }

    pub fn index_of(&self, x: &[Rational]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.index.contains_key(x)
    }

    pub fn root_set(&self) -> BTreeSet<QVec> {
        self.roots.iter().cloned().collect()
    }

    pub fn label(&self) -> Option<&TypeLabel> {
        self.label.as_ref()
    }

    pub fn with_label(mut self, label: TypeLabel) -> RootSystem {
        self.label = Some(label);
        self
    }

    /// ⟨x, α∨⟩ for the root with index `a`.
    pub fn pairing(&self, x: &[Rational], a: usize) -> Rational {
        qdot(x, &self.coroots[a])
    }

    /// ⟨β, α∨⟩ for root indices.
    pub fn cartan(&self, b: usize, a: usize) -> Rational {
        qdot(&self.roots[b], &self.coroots[a])
    }

    pub fn form_value(&self, x: &[Rational], y: &[Rational]) -> Rational {
        form_value(&self.form, x, y)
    }

    /// s_α(x) = x − ⟨x, α∨⟩α.
    pub fn reflect(&self, alpha: &[Rational], x: &[Rational]) -> Result<QVec> {
        let a = self.index_of(alpha).ok_or_else(|| Error::NotARoot(show_qvec(alpha)))?;
        Ok(self.reflect_by(a, x))
    }

    pub fn reflect_by(&self, a: usize, x: &[Rational]) -> QVec {
        let c = self.pairing(x, a);
        if c.is_zero() {
            return x.to_vec();
        }
        x.iter().zip(&self.roots[a]).map(|(xi, ai)| xi - &c * ai).collect()
    }

    /// perm[a][b] = index of s_α(β). Errors if some s_α(β) is not a root.
    pub fn reflection_table(&self) -> Result<Vec<Vec<usize>>> {
        let mut table = Vec::with_capacity(self.len());
        for a in 0..self.len() {
            let mut row = Vec::with_capacity(self.len());
            for b in 0..self.len() {
                let img = self.reflect_by(a, &self.roots[b]);
                let i = self.index_of(&img).ok_or_else(|| {
                    Error::axiom(
                        "reflection closure",
                        format!("s_{}({}) = {} is not a root", show_qvec(&self.roots[a]), show_qvec(&self.roots[b]), show_qvec(&img)),
                    )
                })?;
                row.push(i);
            }
            table.push(row);
        }
        Ok(table)
    }

    pub fn root_string(&self, beta: &[Rational], alpha: &[Rational]) -> Result<RootString> {
        let b = self.index_of(beta).ok_or_else(|| Error::NotARoot(show_qvec(beta)))?;
        let a = self.index_of(alpha).ok_or_else(|| Error::NotARoot(show_qvec(alpha)))?;
        if a == 0 {
            return Err(Error::invalid("root strings need α ≠ 0"));
        }
        Ok(self.root_string_by(b, a))
    }

    pub fn root_string_by(&self, b: usize, a: usize) -> RootString {
        let pairing = self.cartan(b, a);
        // |⟨β,α∨⟩| ≤ 4 in a finite root system, so strings fit in [−8, 8].
        let bound = 8 + rational_to_i64(&pairing.abs().ceil()).unwrap_or(0);
        let members: Vec<i64> = (-bound..=bound)
            .filter(|&i| {
                let v: QVec = self.roots[b].iter().zip(&self.roots[a]).map(|(x, y)| x + int(i) * y).collect();
                self.contains(&v)
            })
            .collect();
        let p = *members.iter().max().expect("β itself lies in the string");
        let q = -*members.iter().min().expect("β itself lies in the string");
        let unbroken = members.len() as i64 == p + q + 1;
        RootString { members, p, q, unbroken, pairing }
    }

    /// Closure of {α} under all reflections.
    pub fn weyl_orbit(&self, alpha: &[Rational]) -> Result<BTreeSet<QVec>> {
        let a = self.index_of(alpha).ok_or_else(|| Error::NotARoot(show_qvec(alpha)))?;
        Ok(self.weyl_orbit_by(a).into_iter().map(|i| self.roots[i].clone()).collect())
    }

    pub fn weyl_orbit_by(&self, a: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([a]);
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for s in self.nonzero() {
                let img = self.reflect_by(s, &self.roots[x]);
                if let Some(i) = self.index_of(&img) {
                    if seen.insert(i) {
                        queue.push_back(i);
                    }
                }
            }
        }
        seen
    }

    /// Connected components of the nonzero roots under ⟨α, β∨⟩ ≠ 0.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 1..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[start] = id;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in 1..n {
                    if comp[y] == usize::MAX && (!self.cartan(x, y).is_zero() || !self.cartan(y, x).is_zero()) {
                        comp[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        self.components().len() == 1
    }

    /// Rank of the span of the roots.
    pub fn rank(&self) -> usize {
        qrank(&self.roots[1..])
    }

    /// Checks the defining properties; returns the first violation found.
    pub fn validate(&self) -> Result<()> {
        for a in self.nonzero() {
            if self.cartan(a, a) != int(2) {
                return Err(Error::axiom("⟨α,α∨⟩ = 2", show_qvec(&self.roots[a])));
            }
        }
        if !is_zero_vec(&self.coroots[0]) {
            return Err(Error::axiom("0∨ = 0", "coroot of 0 is nonzero"));
        }
        for a in self.nonzero() {
            for b in 0..self.len() {
                if !self.cartan(b, a).is_integer() {
                    return Err(Error::axiom(
                        "integrality",
                        format!("⟨{}, {}∨⟩ = {}", show_qvec(&self.roots[b]), show_qvec(&self.roots[a]), self.cartan(b, a)),
                    ));
                }
            }
        }
        self.reflection_table()?;
        Ok(())
    }

    /// Direct sum on ℚ^{d₁} ⊕ ℚ^{d₂} with the block form.
    pub fn direct_sum(&self, other: &RootSystem) -> Result<RootSystem> {
        let d = self.dim + other.dim;
        let zero1 = vec![Rational::zero(); self.dim];
        let zero2 = vec![Rational::zero(); other.dim];
        let mut form = vec![vec![Rational::zero(); d]; d];
        for i in 0..self.dim {
            for j in 0..self.dim {
                form[i][j] = self.form[i][j].clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                form[self.dim + i][self.dim + j] = other.form[i][j].clone();
            }
        }
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for (r, c) in self.roots.iter().zip(&self.coroots) {
            roots.push([r.clone(), zero2.clone()].concat());
            coroots.push([c.clone(), zero2.clone()].concat());
        }
        for (r, c) in other.roots.iter().zip(&other.coroots).skip(1) {
            roots.push([zero1.clone(), r.clone()].concat());
            coroots.push([zero1.clone(), c.clone()].concat());
        }
        RootSystem::with_coroots(form, roots, coroots)
    }

    /// The invariant form rescaled on each component so that the minimal
    /// nonzero (α|α) is 2; the orthogonal complement of the roots is unchanged.
    pub fn normalized_form(&self) -> Result<Vec<QVec>> {
        let mut out = self.form.clone();
        for comp in self.components() {
            let min = comp
                .iter()
                .map(|&a| self.form_value(&self.roots[a], &self.roots[a]))
                .min()
                .expect("components are nonempty");
            if min.is_zero() {
                return Err(Error::invalid("isotropic root on a component"));
            }
            let s = int(2) / min.abs();
            let s = if min.is_negative() { -s } else { s };
            // basis V of the component span, Gram G = VᵀBV, orthogonal projection
            // contributes B V G⁻¹ Vᵀ B.
            let vecs: Vec<QVec> = comp.iter().map(|&a| self.roots[a].clone()).collect();
            let (red, pivots) = Matrix::from_rational_rows(&vecs).rref();
            let basis: Vec<QVec> = (0..pivots.len())
                .map(|r| red.row(r).iter().map(|x| x.as_rational().expect("rational").clone()).collect())
                .collect();
            let bv: Vec<QVec> = basis.iter().map(|v| apply_form(&self.form, v)).collect();
            let k = basis.len();
            let gram: Vec<QVec> = (0..k).map(|i| (0..k).map(|j| qdot(&basis[i], &bv[j])).collect()).collect();
            let ginv = Matrix::from_rational_rows(&gram)
                .inverse()
                .map_err(|_| Error::invalid("form is degenerate on an irreducible component"))?;
            let factor = &s - Rational::one();
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let mut acc = Rational::zero();
                    for p in 0..k {
                        for q in 0..k {
                            let g = ginv.get(p, q).as_rational().expect("rational");
                            if !g.is_zero() {
                                acc += &bv[p][i] * g * &bv[q][j];
                            }
                        }
                    }
                    out[i][j] += &factor * acc;
                }
            }
        }
        Ok(out)
    }

    /// The set of values (α|α) over nonzero roots under the normalized form.
    pub fn normalized_lengths(&self) -> Result<BTreeSet<Rational>> {
        let nf = self.normalized_form()?;
        Ok(self.nonzero().map(|a| form_value(&nf, &self.roots[a], &self.roots[a])).collect())
    }

    pub fn is_divisible(&self, a: usize) -> bool {
        a != 0 && self.contains(&qscale(&rat(1, 2), &self.roots[a]))
    }

    /// Indices of nonzero indivisible roots.
    pub fn indivisible(&self) -> Vec<usize> {
        self.nonzero().filter(|&a| !self.is_divisible(a)).collect()
    }

    /// Partition of an irreducible system into short, long and divisible roots.
    pub fn length_partition(&self) -> Result<LengthPartition> {
        if !self.is_irreducible() {
            return Err(Error::invalid("length partition needs an irreducible root system"));
        }
        let nf = self.normalized_form()?;
        let mut short = Vec::new();
        let mut long = Vec::new();
        let mut divisible = Vec::new();
        let mut long_len: Option<Rational> = None;
        for a in self.nonzero() {
            let l = form_value(&nf, &self.roots[a], &self.roots[a]);
            if self.is_divisible(a) {
                divisible.push(a);
            } else if l == int(2) {
                short.push(a);
            } else {
                long_len = Some(l);
                long.push(a);
            }
        }
        let k = long_len.map(|l| rational_to_i64(&(l / int(2))).expect("k(S) is an integer"));
        Ok(LengthPartition { short, long, divisible, k })
    }

    /// Decomposes into components and identifies each Dynkin diagram.
    pub fn classify(&self) -> Result<TypeLabel> {
        self.validate()?;
        let mut components = Vec::new();
        for comp in self.components() {
            components.push(self.classify_component(&comp)?);
        }
        components.sort();
        Ok(TypeLabel { components })
    }

    /// Simple roots of a component, chosen by the first generic functional
    /// (1, t, t², …) with t = 1/p, p prime.
    pub fn simple_roots(&self, comp: &[usize]) -> Vec<usize> {
        let f = self.generic_functional(comp);
        let pos: Vec<usize> = comp.iter().copied().filter(|&a| qdot(&f, &self.roots[a]).is_positive()).collect();
        let pos_set: BTreeSet<usize> = pos.iter().copied().collect();
        pos.iter()
            .copied()
            .filter(|&a| !self.is_divisible(a))
            .filter(|&a| {
                !pos.iter().any(|&b| {
                    let d = qsub(&self.roots[a], &self.roots[b]);
                    self.index_of(&d).is_some_and(|i| pos_set.contains(&i))
                })
            })
            .collect()
    }

    fn generic_functional(&self, comp: &[usize]) -> QVec {
        const PRIMES: [i64; 12] = [7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        for p in PRIMES {
            let t = rat(1, p);
            let mut f = Vec::with_capacity(self.dim);
            let mut cur = Rational::one();
            for _ in 0..self.dim {
                f.push(cur.clone());
                cur *= &t;
            }
            if comp.iter().all(|&a| !qdot(&f, &self.roots[a]).is_zero()) {
                return f;
            }
        }
        // Integer weights that grow fast enough always separate a finite set.
        let bound = comp.iter().flat_map(|&a| self.roots[a].iter().map(|x| x.abs())).max().unwrap_or_else(Rational::one);
        let base = (bound * int(4) + int(1)).ceil();
        let mut f = Vec::with_capacity(self.dim);
        let mut cur = Rational::one();
        for _ in 0..self.dim {
            f.push(cur.clone());
            cur *= &base;
        }
        f.reverse();
        f
    }

    fn classify_component(&self, comp: &[usize]) -> Result<Component> {
        let simple = self.simple_roots(comp);
        let r = simple.len();
        let span_rank = qrank(&comp.iter().map(|&a| self.roots[a].clone()).collect::<Vec<_>>());
        let unclassifiable = |why: String| Error::axiom("classification", why);
        if r != span_rank {
            return Err(unclassifiable(format!("{r} simple roots for a component of rank {span_rank}")));
        }
        let a = |i: usize, j: usize| rational_to_i64(&self.cartan(simple[j], simple[i])).unwrap_or(0);
        let has_divisible = comp.iter().any(|&x| self.is_divisible(x));
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); r];
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    let m = a(i, j) * a(j, i);
                    if m != 0 {
                        adj[i].push((j, m));
                    }
                }
            }
        }
        let family = if has_divisible {
            Family::BC
        } else if adj.iter().flatten().any(|&(_, m)| m == 3) {
            Family::G2
        } else if let Some((i, j)) = (0..r).flat_map(|i| adj[i].iter().map(move |&(j, m)| (i, j, m))).find(|t| t.2 == 2).map(|t| (t.0, t.1)) {
            if r == 4 && adj[i].len() == 2 && adj[j].len() == 2 {
                Family::F4
            } else if r == 2 {
                Family::B
            } else {
                let (end, other) = if adj[i].len() == 1 { (i, j) } else { (j, i) };
                // ⟨α_other, α_end∨⟩ = −2 exactly when α_end is short.
                if a(end, other) == -2 {
                    Family::B
                } else {
                    Family::C
                }
            }
        } else {
            let branch: Vec<usize> = (0..r).filter(|&i| adj[i].len() >= 3).collect();
            match branch.as_slice() {
                [] => Family::A,
                [b] if adj[*b].len() == 3 => {
                    let mut arms: Vec<usize> = adj[*b].iter().map(|&(n, _)| arm_length(&adj, *b, n)).collect();
                    arms.sort_unstable();
                    match arms.as_slice() {
                        [1, 1, _] => Family::D,
                        [1, 2, 2] => Family::E6,
                        [1, 2, 3] => Family::E7,
                        [1, 2, 4] => Family::E8,
                        _ => return Err(unclassifiable(format!("branch arms {arms:?}"))),
                    }
                }
                _ => return Err(unclassifiable("diagram is not a Dynkin diagram".into())),
            }
        };
        let family = if family == Family::B && r == 1 { Family::A } else { family };
        if family.root_count(r) != comp.len() {
            return Err(unclassifiable(format!(
                "diagram {}{r} expects {} roots, component has {}",
                family.symbol(),
                family.root_count(r),
                comp.len()
            )));
        }
        Ok(Component { family, rank: r })
    }

    pub fn to_json(&self) -> Value {
        let show = |v: &QVec| v.iter().map(rational_to_string).collect::<Vec<_>>();
        let mut out = json!({
            "space": {"dim": self.dim, "form": self.form.iter().map(show).collect::<Vec<_>>()},
            "roots": self.roots.iter().map(show).collect::<Vec<_>>(),
            "coroots": self.coroots.iter().map(show).collect::<Vec<_>>(),
        });
        if let Some(l) = &self.label {
            out["type"] = json!(l.to_string());
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<RootSystem> {
        let space = v.get("space").ok_or_else(|| Error::Parse("missing \"space\"".into()))?;
        let dim = space
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing \"space.dim\"".into()))? as usize;
        let form = match space.get("form") {
            Some(f) => parse_qrows(f, dim)?,
            None => (0..dim).map(|i| (0..dim).map(|j| int(i64::from(i == j))).collect()).collect(),
        };
        if form.len() != dim {
            return Err(Error::Parse("form has wrong size".into()));
        }
        let roots = parse_qrows(v.get("roots").ok_or_else(|| Error::Parse("missing \"roots\"".into()))?, dim)?;
        let mut rs = match v.get("coroots") {
            Some(c) => RootSystem::with_coroots(form, roots, parse_qrows(c, dim)?)?,
            None => RootSystem::from_form(form, roots)?,
        };
        if let Some(t) = v.get("type").and_then(Value::as_str) {
            rs.label = Some(TypeLabel::parse(t)?);
        }
        Ok(rs)
    }

    /// Basis of span(R): the nonzero rows of the reduced echelon form, so the
    /// coordinates of a vector in the span are its entries at the pivot columns.
    pub fn span_basis(&self) -> (Vec<QVec>, Vec<usize>) {
        let (red, pivots) = Matrix::from_rational_rows(&self.roots[1..]).rref();
        let basis = (0..pivots.len())
            .map(|r| red.row(r).iter().map(|x| x.as_rational().expect("rational").clone()).collect())
            .collect();
        (basis, pivots)
    }

    /// Roots and coroots in the coordinates of [`RootSystem::span_basis`], so
    /// that the result spans its ambient space. Root order is preserved.
    pub fn span_coordinates(&self) -> (Vec<QVec>, Vec<QVec>) {
        let (basis, pivots) = self.span_basis();
        let roots = self.roots.iter().map(|x| pivots.iter().map(|&p| x[p].clone()).collect()).collect();
        let coroots = self.coroots.iter().map(|c| basis.iter().map(|b| qdot(b, c)).collect()).collect();
        (roots, coroots)
    }

    /// Gram matrix of `form` on [`RootSystem::span_basis`].
    pub fn span_gram(&self, form: &[QVec]) -> Vec<QVec> {
        let (basis, _) = self.span_basis();
        let fb: Vec<QVec> = basis.iter().map(|b| apply_form(form, b)).collect();
        basis.iter().map(|a| fb.iter().map(|f| qdot(a, f)).collect()).collect()
    }
}

fn arm_length(adj: &[Vec<(usize, i64)>], from: usize, start: usize) -> usize {
    let mut len = 1;
    let (mut prev, mut cur) = (from, start);
    loop {
        let next: Vec<usize> = adj[cur].iter().map(|&(n, _)| n).filter(|&n| n != prev).collect();
        match next.as_slice() {
            [n] => {
                prev = cur;
                cur = *n;
                len += 1;
            }
            _ => return len,
        }
    }
}

pub fn show_qvec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(rational_to_string).collect();
    format!("({})", parts.join(","))
}

pub fn parse_qvalue(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(int(i)),
            None => Err(Error::Parse(format!("non-integer JSON number {n}; use a \"p/q\" string"))),
        },
        other => Err(Error::Parse(format!("not a rational: {other}"))),
    }
}

pub fn parse_qrows(v: &Value, dim: usize) -> Result<Vec<QVec>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("expected list of vectors".into()))?;
    rows.iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| Error::Parse("expected vector".into()))?;
            if r.len() != dim {
                return Err(Error::Parse(format!("vector of length {} in dimension {dim}", r.len())));
            }
            r.iter().map(parse_qvalue).collect()
        })
        .collect()
}

fn unit(dim: usize, i: usize) -> QVec {
    (0..dim).map(|j| int(i64::from(i == j))).collect()
}

fn euclidean(dim: usize) -> Vec<QVec> {
    (0..dim).map(|i| unit(dim, i)).collect()
}

fn pm_pairs(dim: usize, same_index: bool) -> Vec<QVec> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if i < j || (same_index && i == j) {
                for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let mut v = vec![Rational::zero(); dim];
                    v[i] += int(si);
                    v[j] += int(sj);
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Classical root systems in their ε-coordinates (A_n lives in ℚ^{n+1}).
pub fn build_classical(family: Family, n: usize) -> Result<RootSystem> {
    if n == 0 {
        return Err(Error::invalid("rank must be at least 1"));
    }
    let (dim, roots) = match family {
        Family::A => {
            let d = n + 1;
            let mut roots = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        roots.push(qsub(&unit(d, i), &unit(d, j)));
                    }
                }
            }
            (d, roots)
        }
        Family::B => {
            let mut roots = pm_pairs(n, false);
            for i in 0..n {
                roots.push(unit(n, i));
                roots.push(qscale(&int(-1), &unit(n, i)));
            }
            (n, roots)
        }
        Family::C => (n, pm_pairs(n, true)),
        Family::D => (n, pm_pairs(n, false)),
        Family::BC => {
            let mut roots = pm_pairs(n, true);
            for i in 0..n {
                roots.push(unit(n, i));
                roots.push(qscale(&int(-1), &unit(n, i)));
            }
            (n, roots)
        }
        other => return Err(Error::invalid(format!("{other:?} is not a classical family"))),
    };
    RootSystem::from_form(euclidean(dim), roots)
}

fn e8_roots() -> Vec<QVec> {
    let mut roots = pm_pairs(8, false);
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            roots.push((0..8).map(|i| if mask >> i & 1 == 1 { rat(-1, 2) } else { rat(1, 2) }).collect());
        }
    }
    roots
}

/// Exceptional root systems in standard coordinates: E8 in ℚ⁸ and E7, E6 as
/// centralizers of A1, A2 inside it; F4 in ℚ⁴; G2 in the plane x+y+z = 0 of ℚ³.
pub fn build_exceptional(family: Family) -> Result<RootSystem> {
    let roots = match family {
        Family::E8 | Family::E7 | Family::E6 => {
            let a = qvec(&[0, 0, 0, 0, 0, 0, 1, 1]);
            let b = qvec(&[0, 0, 0, 0, 0, 1, -1, 0]);
            let orth: Vec<&QVec> = match family {
                Family::E8 => vec![],
                Family::E7 => vec![&a],
                _ => vec![&a, &b],
            };
            let roots = e8_roots().into_iter().filter(|r| orth.iter().all(|o| qdot(r, o).is_zero())).collect();
            return RootSystem::from_form(euclidean(8), roots);
        }
        Family::F4 => {
            let mut roots = pm_pairs(4, false);
            for i in 0..4 {
                roots.push(unit(4, i));
                roots.push(qscale(&int(-1), &unit(4, i)));
            }
            for mask in 0u32..16 {
                roots.push((0..4).map(|i| if mask >> i & 1 == 1 { rat(-1, 2) } else { rat(1, 2) }).collect());
            }
            roots
        }
        Family::G2 => {
            let mut roots = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        roots.push(qsub(&unit(3, i), &unit(3, j)));
                        let k = 3 - i - j;
                        let long = qsub(&qscale(&int(2), &unit(3, i)), &qadd(&unit(3, j), &unit(3, k)));
                        if j < k {
                            roots.push(long.clone());
                            roots.push(qscale(&int(-1), &long));
                        }
                    }
                }
            }
            roots
        }
        other => return Err(Error::invalid(format!("{other:?} is not exceptional"))),
    };
    let dim = roots[0].len();
    RootSystem::from_form(euclidean(dim), roots)
}

/// Builds any irreducible type.
pub fn build(family: Family, rank: usize) -> Result<RootSystem> {
    let rs = match family.fixed_rank() {
        Some(r) if r != rank => return Err(Error::invalid(format!("{family:?} has rank {r}"))),
        Some(_) => build_exceptional(family)?,
        None => build_classical(family, rank)?,
    };
    Ok(rs)
}

/// Convenience: the label of an isomorphic standard system for (family, rank),
/// accounting for the small-rank coincidences.
pub fn canonical_label(family: Family, rank: usize) -> TypeLabel {
    let c = |f, r| TypeLabel::irreducible(f, r);
    match (family, rank) {
        (Family::B | Family::C, 1) => c(Family::A, 1),
        (Family::C, 2) => c(Family::B, 2),
        (Family::D, 1) => TypeLabel { components: vec![] },
        (Family::D, 2) => TypeLabel { components: vec![Component { family: Family::A, rank: 1 }; 2] },
        (Family::D, 3) => c(Family::A, 3),
        _ => c(family, rank),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(build_classical(Family::A, 2).unwrap().len(), 7);
        assert_eq!(build_classical(Family::BC, 1).unwrap().len(), 5);
        assert_eq!(build_classical(Family::B, 2).unwrap().len(), 9);
        for (f, n) in [(Family::E6, 72), (Family::E7, 126), (Family::E8, 240), (Family::F4, 48), (Family::G2, 12)] {
            assert_eq!(build_exceptional(f).unwrap().len(), n + 1, "{f:?}");
        }
    }

    #[test]
    fn reflections() {
        let a3 = build_classical(Family::A, 3).unwrap();
        let e1 = qvec(&[1, 0, 0, 0]);
        let alpha = qvec(&[1, -1, 0, 0]);
        assert_eq!(a3.reflect(&alpha, &e1).unwrap(), qvec(&[0, 1, 0, 0]));
        assert_eq!(a3.reflect(&alpha, &alpha).unwrap(), qvec(&[-1, 1, 0, 0]));
        assert_eq!(a3.reflect(&qvec(&[0, 0, 0, 0]), &e1).unwrap(), e1);
        assert!(a3.reflect(&qvec(&[1, 1, 0, 0]), &e1).is_err());
    }

    #[test]
    fn strings() {
        let b2 = build_classical(Family::B, 2).unwrap();
        let s = b2.root_string(&qvec(&[0, 1]), &qvec(&[1, -1])).unwrap();
        assert_eq!((s.members.clone(), s.p, s.q), (vec![0, 1], 1, 0));
        let a = qvec(&[1, 1]);
        let s = b2.root_string(&a, &a).unwrap();
        assert_eq!(s.members, vec![-2, -1, 0]);
        let g2 = build_exceptional(Family::G2).unwrap();
        let short = qvec(&[1, -1, 0]);
        let long = qvec(&[-1, 2, -1]);
        assert_eq!(g2.cartan(g2.index_of(&short).unwrap(), g2.index_of(&long).unwrap()), int(-1));
        assert_eq!(g2.root_string(&short, &long).unwrap().members.len(), 2);
    }

    #[test]
    fn orbits() {
        let a2 = build_classical(Family::A, 2).unwrap();
        assert_eq!(a2.weyl_orbit(&qvec(&[1, -1, 0])).unwrap().len(), 6);
        assert_eq!(a2.weyl_orbit(&qvec(&[0, 0, 0])).unwrap().len(), 1);
        let b2 = build_classical(Family::B, 2).unwrap();
        assert_eq!(b2.weyl_orbit(&qvec(&[1, 0])).unwrap().len(), 4);
    }

    #[test]
    fn normalized_lengths() {
        let two = |xs: &[i64]| xs.iter().map(|&x| int(x)).collect::<BTreeSet<_>>();
        assert_eq!(build_classical(Family::A, 3).unwrap().normalized_lengths().unwrap(), two(&[2]));
        assert_eq!(build_classical(Family::B, 3).unwrap().normalized_lengths().unwrap(), two(&[2, 4]));
        assert_eq!(build_exceptional(Family::G2).unwrap().normalized_lengths().unwrap(), two(&[2, 6]));
        assert_eq!(build_classical(Family::BC, 1).unwrap().normalized_lengths().unwrap(), two(&[2, 8]));
        assert_eq!(build_classical(Family::BC, 2).unwrap().normalized_lengths().unwrap(), two(&[2, 4, 8]));
    }

    #[test]
    fn partitions() {
        let g2 = build_exceptional(Family::G2).unwrap().length_partition().unwrap();
        assert_eq!(g2.k, Some(3));
        let bc1 = build_classical(Family::BC, 1).unwrap();
        let p = bc1.length_partition().unwrap();
        let div: BTreeSet<QVec> = p.divisible.iter().map(|&i| bc1.root(i).clone()).collect();
        assert_eq!(div, BTreeSet::from([qvec(&[2]), qvec(&[-2])]));
        let a4 = build_classical(Family::A, 4).unwrap().length_partition().unwrap();
        assert!(a4.long.is_empty() && a4.k.is_none());
        assert_eq!(a4.short.len(), 20);
    }

    #[test]
    fn classification_round_trips() {
        assert_eq!(build_classical(Family::B, 3).unwrap().classify().unwrap(), TypeLabel::irreducible(Family::B, 3));
        assert_eq!(build_exceptional(Family::F4).unwrap().classify().unwrap(), TypeLabel::irreducible(Family::F4, 4));
        let a1 = build_classical(Family::A, 1).unwrap();
        let sum = a1.direct_sum(&a1).unwrap();
        assert_eq!(sum.classify().unwrap().to_string(), "A1xA1");
        assert_eq!(build_classical(Family::D, 2).unwrap().classify().unwrap().to_string(), "A1xA1");
        assert_eq!(build_classical(Family::D, 3).unwrap().classify().unwrap().to_string(), "A3");
        assert_eq!(build_classical(Family::C, 2).unwrap().classify().unwrap().to_string(), "B2");
        assert_eq!(build_classical(Family::BC, 3).unwrap().classify().unwrap().to_string(), "BC3");
    }

    #[test]
    fn json_round_trip() {
        let rs = build_exceptional(Family::G2).unwrap();
        let back = RootSystem::from_json(&rs.to_json()).unwrap();
        assert_eq!(back, rs);
        assert_eq!(back.coroots(), rs.coroots());
    }

    #[test]
    fn label_parsing() {
        for s in ["A2", "BC1", "E8", "F4", "G2", "A1xA1"] {
            assert_eq!(TypeLabel::parse(s).unwrap().to_string(), s);
        }
    }
}
