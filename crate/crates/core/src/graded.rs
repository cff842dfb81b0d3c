//! ℤⁿ-graded unital associative algebras: group algebras, polynomial
//! algebras, quantum tori and crossed products over a finite-dimensional
//! algebra, with centres, centroids, graded forms and centroidal derivations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{self, box_points, hnf, integer_kernel, parse_int, parse_int_vec, IVec, LatticeSubset};
use crate::linalg::Matrix;
use crate::report::AxiomReport;
use crate::scalar::{parse_scalar, root_group_generator, Field, Scalar};

fn show_degree(d: &[i64]) -> String {
    let parts: Vec<String> = d.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn unit_vector(n: usize, k: usize) -> IVec {
    (0..n).map(|i| i64::from(i == k)).collect()
}

fn neg_degree(d: &[i64]) -> IVec {
    d.iter().map(|x| -x).collect()
}

/// Parses a scalar given as a JSON string, number, or serialized [`Scalar`].
pub fn scalar_from_json(v: &Value, field: Option<Field>) -> Result<Scalar> {
    let s = match v {
        Value::String(s) => parse_scalar(s, field)?,
        Value::Number(n) => parse_scalar(&n.to_string(), field)?,
        Value::Object(_) => {
            let s: Scalar = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            match field {
                Some(f) => s.embed(f)?,
                None => s,
            }
        }
        _ => return Err(Error::Parse(format!("expected a scalar, got {v}"))),
    };
    Ok(s)
}

fn scalar_rows_from_json(v: &Value, field: Option<Field>) -> Result<Vec<Vec<Scalar>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("expected an array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("expected a row array".into()))?
                .iter()
                .map(|x| scalar_from_json(x, field))
                .collect()
        })
        .collect()
}

fn scalar_vec_from_json(v: &Value, field: Field, len: usize) -> Result<Vec<Scalar>> {
    let xs = v.as_array().ok_or_else(|| Error::Parse("expected a scalar array".into()))?;
    if xs.len() != len {
        return Err(Error::Dimension(format!("expected {len} scalars, got {}", xs.len())));
    }
    xs.iter().map(|x| scalar_from_json(x, Some(field))).collect()
}

fn scalars_json(xs: &[Scalar]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x.to_string())).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| scalars_json(r)).collect())
}

// ---------------------------------------------------------------------------
// Quantum matrices

/// Exponent data when every entry is a root of unity: q_ij = g^{a_ij}.
#[derive(Clone, Debug)]
struct Torsion {
    exps: Vec<Vec<u64>>,
    /// g^k for 0 ≤ k < M.
    powers: Vec<Scalar>,
}

/// An n×n matrix of nonzero scalars with q_ii = 1 and q_ij·q_ji = 1.
#[derive(Clone, Debug)]
pub struct QuantumMatrix {
    field: Field,
    q: Vec<Vec<Scalar>>,
    torsion: Option<Torsion>,
}

impl PartialEq for QuantumMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.q == other.q
    }
}

impl Eq for QuantumMatrix {}

impl QuantumMatrix {
    pub fn new(field: Field, q: Vec<Vec<Scalar>>) -> Result<QuantumMatrix> {
        let n = q.len();
        if n == 0 {
            return Err(Error::invalid("quantum matrix must be at least 1×1"));
        }
        let mut rows = Vec::with_capacity(n);
        for row in q {
            if row.len() != n {
                return Err(Error::Dimension("quantum matrix must be square".into()));
            }
            rows.push(row.into_iter().map(|x| x.embed(field)).collect::<Result<Vec<_>>>()?);
        }
        for i in 0..n {
            if !rows[i][i].is_one() {
                return Err(Error::invalid(format!("q_{i}{i} = {} must be 1", rows[i][i])));
            }
            for j in 0..n {
                if rows[i][j].is_zero() {
                    return Err(Error::invalid(format!("q_{i}{j} must be nonzero")));
                }
                if !(&rows[i][j] * &rows[j][i]).is_one() {
                    return Err(Error::invalid(format!("q_{i}{j}·q_{j}{i} = {} must be 1", &rows[i][j] * &rows[j][i])));
                }
            }
        }
        let torsion = Self::torsion_data(field, &rows);
        Ok(QuantumMatrix { field, q: rows, torsion })
    }

    /// The matrix with the given entries above the diagonal (i < j) and
    /// q_ji = q_ij⁻¹; unspecified entries are 1.
    pub fn from_upper(field: Field, n: usize, entries: &[(usize, usize, Scalar)]) -> Result<QuantumMatrix> {
        let mut q = vec![vec![field.one(); n]; n];
        for (i, j, v) in entries {
            if *i >= n || *j >= n || i == j {
                return Err(Error::invalid(format!("bad quantum matrix position ({i},{j})")));
            }
            let v = v.embed(field)?;
            q[*j][*i] = v.inv()?;
            q[*i][*j] = v;
        }
        QuantumMatrix::new(field, q)
    }

    pub fn trivial(field: Field, n: usize) -> QuantumMatrix {
        QuantumMatrix::new(field, vec![vec![field.one(); n]; n]).expect("identity quantum matrix")
    }

    fn torsion_data(field: Field, q: &[Vec<Scalar>]) -> Option<Torsion> {
        let mut exps = vec![vec![0u64; q.len()]; q.len()];
        let mut modulus = 1;
        for (i, row) in q.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let (r, a, m) = x.split_torsion()?;
                if !r.is_one() {
                    return None;
                }
                exps[i][j] = a;
                modulus = m;
            }
        }
        let g = root_group_generator(field);
        let mut powers = Vec::with_capacity(modulus as usize);
        let mut cur = field.one();
        for _ in 0..modulus {
            powers.push(cur.clone());
            cur = &cur * &g;
        }
        Some(Torsion { exps, powers })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.q[i][j]
    }

    pub fn is_trivial(&self) -> bool {
        self.q.iter().flatten().all(Scalar::is_one)
    }

    /// ∏_{i,j} q_ij^{c_ij} for an integer exponent matrix.
    fn monomial(&self, c: impl Fn(usize, usize) -> i64) -> Scalar {
        let n = self.n();
        if let Some(t) = &self.torsion {
            let m = t.powers.len() as i128;
            let mut e: i128 = 0;
            for i in 0..n {
                for j in 0..n {
                    e += t.exps[i][j] as i128 * c(i, j) as i128;
                }
            }
            return t.powers[e.rem_euclid(m) as usize].clone();
        }
        let mut acc = self.field.one();
        for i in 0..n {
            for j in 0..n {
                let k = c(i, j);
                if k != 0 && !self.q[i][j].is_one() {
                    acc = &acc * &self.q[i][j].pow(k).expect("nonzero quantum entry");
                }
            }
        }
        acc
    }

    /// τ(λ,μ) = ∏_{j<i} q_ij^{λ_i μ_j}, so that t^λ t^μ = τ(λ,μ) t^{λ+μ}.
    pub fn tau(&self, l: &[i64], m: &[i64]) -> Scalar {
        self.monomial(|i, j| if j < i { l[i] * m[j] } else { 0 })
    }

    /// The factor c with t^λ t^μ = c · t^μ t^λ, namely ∏_{i,j} q_ij^{λ_i μ_j}.
    pub fn commutation(&self, l: &[i64], m: &[i64]) -> Scalar {
        self.monomial(|i, j| l[i] * m[j])
    }

    /// ∏_j q_ij^{λ_j}; t^λ is central iff this is 1 for every i.
    pub fn character(&self, i: usize, l: &[i64]) -> Scalar {
        self.monomial(|a, j| if a == i { l[j] } else { 0 })
    }

    pub fn is_central_degree(&self, l: &[i64]) -> bool {
        (0..self.n()).all(|i| self.character(i, l).is_one())
    }

    /// True iff Γ has finite index, i.e. the torus is finitely generated
    /// over its centroid.
    pub fn is_fgc(&self) -> Result<bool> {
        Ok(centre_of_qtorus(self)?.len() == self.n())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "qtorus",
            "n": self.n(),
            "field": self.field.name(),
            "q": Value::Array(self.q.iter().map(|r| scalars_json(r)).collect()),
        })
    }

    /// Reads `{"n", "q", "field"?}`; the field defaults to the smallest one
    /// containing all entries.
    pub fn from_json(v: &Value) -> Result<QuantumMatrix> {
        let declared = match v.get("field") {
            Some(f) => Some(Field::parse(f.as_str().ok_or_else(|| Error::Parse("field must be a string".into()))?)?),
            None => None,
        };
        let rows = scalar_rows_from_json(v.get("q").ok_or_else(|| Error::Parse("missing \"q\"".into()))?, declared)?;
        if let Some(n) = v.get("n") {
            if parse_int(n)? != rows.len() as i64 {
                return Err(Error::Dimension(format!("n = {n} but q has {} rows", rows.len())));
            }
        }
        let field = declared.unwrap_or_else(|| rows.iter().flatten().fold(Field::Rationals, |f, x| f.join(&x.field())));
        QuantumMatrix::new(field, rows)
    }
}

// ---------------------------------------------------------------------------
// Centre of a quantum torus

/// Splits positive integers into a pairwise coprime base.
fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = values.iter().filter(|v| **v > BigInt::one()).cloned().collect();
    loop {
        base.sort();
        base.dedup();
        let mut split = None;
        'outer: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else { return base };
        let (a, b) = (&base[i] / &g, &base[j] / &g);
        base = base.into_iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| x).collect();
        base.extend([a, b, g].into_iter().filter(|x| *x > BigInt::one()));
    }
}

fn valuation(mut x: BigInt, p: &BigInt) -> i64 {
    let mut v = 0;
    while (&x % p).is_zero() {
        x /= p;
        v += 1;
    }
    v
}

/// HNF basis of Γ = {γ ∈ ℤⁿ : ∏_j q_ij^{γ_j} = 1 for all i}.
///
/// Each entry is written as r·g^a with r a positive rational and g a
/// generator of the roots of unity of the field; Γ is then cut out by the
/// congruences Σ_j a_ij γ_j ≡ 0 (mod M) together with exponent equations over
/// a coprime base of the numerators and denominators of the r's.
pub fn centre_of_qtorus(q: &QuantumMatrix) -> Result<Vec<IVec>> {
    let n = q.n();
    let mut split = vec![Vec::with_capacity(n); n];
    let mut modulus = 1i64;
    for i in 0..n {
        for j in 0..n {
            let (r, a, m) = q.entry(i, j).split_torsion().ok_or_else(|| {
                Error::Unsupported(format!("q_{i}{j} = {} is not a rational multiple of a root of unity", q.entry(i, j)))
            })?;
            modulus = m as i64;
            split[i].push((r, a as i64));
        }
    }
    let mut ints = Vec::new();
    for row in &split {
        for (r, _) in row {
            ints.push(r.numer().clone());
            ints.push(r.denom().clone());
        }
    }
    let base = coprime_base(&ints);
    let cols = 2 * n;
    let mut rows: Vec<IVec> = Vec::new();
    for (i, row) in split.iter().enumerate() {
        let mut cong: IVec = row.iter().map(|(_, a)| *a).collect();
        cong.extend((0..n).map(|k| if k == i { -modulus } else { 0 }));
        rows.push(cong);
        for p in &base {
            let mut ex: IVec = row
                .iter()
                .map(|(r, _)| valuation(r.numer().abs(), p) - valuation(r.denom().clone(), p))
                .collect();
            ex.extend(std::iter::repeat(0).take(n));
            rows.push(ex);
        }
    }
    let kernel = integer_kernel(&rows, cols);
    let projected: Vec<IVec> = kernel.iter().map(|k| k[..n].to_vec()).collect();
    Ok(hnf(&projected, n))
}

/// All γ in the box [−w, w]ⁿ with t^γ central, by direct evaluation.
pub fn centre_box_scan(q: &QuantumMatrix, w: i64) -> Vec<IVec> {
    box_points(q.n(), w).into_par_iter().filter(|g| q.is_central_degree(g)).collect()
}

// ---------------------------------------------------------------------------
// Finite-dimensional coefficient algebras and crossed products

/// A finite-dimensional unital associative algebra given by structure
/// constants: e_i e_j = Σ_k table[i][j][k] e_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    field: Field,
    table: Vec<Vec<Vec<Scalar>>>,
    unit: Vec<Scalar>,
}

impl FiniteAlgebra {
    /// Validates shapes, the unit law and associativity on basis triples.
    pub fn new(field: Field, table: Vec<Vec<Vec<Scalar>>>, unit: Vec<Scalar>) -> Result<FiniteAlgebra> {
        let m = table.len();
        if m == 0 || unit.len() != m {
            return Err(Error::Dimension("finite algebra needs a nonempty basis and a unit of matching length".into()));
        }
        if table.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != m)) {
            return Err(Error::Dimension("structure constants must be m×m×m".into()));
        }
        let b = FiniteAlgebra { field, table, unit };
        let one = b.one();
        for s in 0..m {
            let e = b.basis(s);
            if b.mul(&one, &e) != e || b.mul(&e, &one) != e {
                return Err(Error::axiom("unit", format!("1·e_{s} or e_{s}·1 differs from e_{s}")));
            }
            for t in 0..m {
                for u in 0..m {
                    let (x, y, z) = (b.basis(s), b.basis(t), b.basis(u));
                    if b.mul(&b.mul(&x, &y), &z) != b.mul(&x, &b.mul(&y, &z)) {
                        return Err(Error::axiom("associativity", format!("(e_{s}, e_{t}, e_{u})")));
                    }
                }
            }
        }
        Ok(b)
    }

    /// The one-dimensional algebra k.
    pub fn ground(field: Field) -> FiniteAlgebra {
        FiniteAlgebra { field, table: vec![vec![vec![field.one()]]], unit: vec![field.one()] }
    }

    /// k × ⋯ × k with orthogonal idempotents e_i.
    pub fn diagonal(field: Field, m: usize) -> FiniteAlgebra {
        let table = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).map(|k| if i == j && j == k { field.one() } else { field.zero() }).collect())
                    .collect()
            })
            .collect();
        FiniteAlgebra { field, table, unit: vec![field.one(); m] }
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn one(&self) -> Vec<Scalar> {
        self.unit.clone()
    }

    pub fn basis(&self, s: usize) -> Vec<Scalar> {
        (0..self.dim()).map(|k| if k == s { self.field.one() } else { self.field.zero() }).collect()
    }

    pub fn structure(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i][j]
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let m = self.dim();
        let mut out = vec![self.field.zero(); m];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in self.table[i][j].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    out[k] += &(&ab * c);
                }
            }
        }
        out
    }

    /// The matrix of y ↦ x·y.
    pub fn left_matrix(&self, x: &[Scalar]) -> Matrix {
        let m = self.dim();
        let mut mat = Matrix::zeros(self.field, m, m);
        for j in 0..m {
            let col = self.mul(x, &self.basis(j));
            for (k, c) in col.into_iter().enumerate() {
                mat.set(k, j, c);
            }
        }
        mat
    }

    /// Two-sided inverse, when it exists.
    pub fn inverse(&self, x: &[Scalar]) -> Option<Vec<Scalar>> {
        let y = self.left_matrix(x).solve(&self.unit).ok()??;
        (self.mul(&y, x) == self.unit).then_some(y)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "table": Value::Array(self.table.iter().map(|r| Value::Array(r.iter().map(|c| scalars_json(c)).collect())).collect()),
            "unit": scalars_json(&self.unit),
        })
    }

    pub fn from_json(v: &Value, field: Field) -> Result<FiniteAlgebra> {
        let m = parse_int(v.get("dim").ok_or_else(|| Error::Parse("finite algebra needs \"dim\"".into()))?)? as usize;
        let tv = v.get("table").and_then(Value::as_array).ok_or_else(|| Error::Parse("finite algebra needs \"table\"".into()))?;
        let table = tv
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("table row".into()))?
                    .iter()
                    .map(|c| scalar_vec_from_json(c, field, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let unit = scalar_vec_from_json(v.get("unit").ok_or_else(|| Error::Parse("finite algebra needs \"unit\"".into()))?, field, m)?;
        FiniteAlgebra::new(field, table, unit)
    }
}

/// Default rule for the cocycle τ away from explicit overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleBase {
    /// τ ≡ 1.
    Trivial,
    /// τ(λ,μ) = ∏_{j<i} q_ij^{λ_i μ_j}·1.
    Quantum(QuantumMatrix),
}

/// B^t ⊗ k[Λ] twisted by (σ, τ): (b u_λ)(b′ u_μ) = b·σ(λ)(b′)·τ(λ,μ) u_{λ+μ}.
///
/// σ(λ) defaults to ∏_i G_i^{λ_i} for the generator matrices G_i (identity
/// when none are given); τ defaults to the base rule. Both accept overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedProduct {
    b: FiniteAlgebra,
    n: usize,
    base: CocycleBase,
    tau_overrides: BTreeMap<(IVec, IVec), Vec<Scalar>>,
    sigma_generators: Vec<(Matrix, Matrix)>,
    sigma_overrides: BTreeMap<IVec, Matrix>,
}

impl CrossedProduct {
    /// The untwisted crossed product B[Λ] with τ ≡ 1 and σ ≡ id.
    pub fn new(b: FiniteAlgebra, n: usize) -> CrossedProduct {
        CrossedProduct {
            b,
            n,
            base: CocycleBase::Trivial,
            tau_overrides: BTreeMap::new(),
            sigma_generators: Vec::new(),
            sigma_overrides: BTreeMap::new(),
        }
    }

    pub fn with_quantum(mut self, q: QuantumMatrix) -> Result<CrossedProduct> {
        if q.n() != self.n || q.field() != self.b.field() {
            return Err(Error::invalid("quantum matrix must match the rank and field of the crossed product"));
        }
        self.base = CocycleBase::Quantum(q);
        Ok(self)
    }

    pub fn with_tau(mut self, l: IVec, m: IVec, value: Vec<Scalar>) -> Result<CrossedProduct> {
        if l.len() != self.n || m.len() != self.n || value.len() != self.b.dim() {
            return Err(Error::Dimension("τ override shape".into()));
        }
        self.tau_overrides.insert((l, m), value);
        Ok(self)
    }

    /// Sets σ(e_i) = gens[i]; each must be an invertible m×m matrix.
    pub fn with_sigma_generators(mut self, gens: Vec<Matrix>) -> Result<CrossedProduct> {
        if gens.len() != self.n {
            return Err(Error::Dimension(format!("expected {} σ generators, got {}", self.n, gens.len())));
        }
        let m = self.b.dim();
        self.sigma_generators = gens
            .into_iter()
            .map(|g| {
                if g.rows() != m || g.cols() != m {
                    return Err(Error::Dimension("σ generator must be m×m".into()));
                }
                let inv = g.inverse().map_err(|_| Error::invalid("σ generator is not invertible"))?;
                Ok((g, inv))
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_sigma(mut self, l: IVec, mat: Matrix) -> Result<CrossedProduct> {
        let m = self.b.dim();
        if l.len() != self.n || mat.rows() != m || mat.cols() != m {
            return Err(Error::Dimension("σ override shape".into()));
        }
        self.sigma_overrides.insert(l, mat);
        Ok(self)
    }

    pub fn coefficient_algebra(&self) -> &FiniteAlgebra {
        &self.b
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn tau(&self, l: &[i64], m: &[i64]) -> Vec<Scalar> {
        if let Some(v) = self.tau_overrides.get(&(l.to_vec(), m.to_vec())) {
            return v.clone();
        }
        match &self.base {
            CocycleBase::Trivial => self.b.one(),
            CocycleBase::Quantum(q) => {
                let c = q.tau(l, m);
                self.b.one().iter().map(|x| x * &c).collect()
            }
        }
    }

    pub fn sigma(&self, l: &[i64]) -> Matrix {
        if let Some(m) = self.sigma_overrides.get(l) {
            return m.clone();
        }
        let f = self.b.field();
        let mut acc = Matrix::identity(f, self.b.dim());
        for ((g, ginv), &k) in self.sigma_generators.iter().zip(l) {
            let step = if k >= 0 { g } else { ginv };
            for _ in 0..k.unsigned_abs() {
                acc = acc.mul(step).expect("square σ matrices");
            }
        }
        acc
    }

    pub fn sigma_apply(&self, l: &[i64], x: &[Scalar]) -> Vec<Scalar> {
        if self.sigma_generators.is_empty() && !self.sigma_overrides.contains_key(l) {
            return x.to_vec();
        }
        self.sigma(l).mul_vec(x).expect("σ dimension")
    }

    pub fn to_json(&self) -> Value {
        let base = match &self.base {
            CocycleBase::Trivial => json!("trivial"),
            CocycleBase::Quantum(q) => json!({"q": q.to_json()["q"].clone()}),
        };
        let tau: Vec<Value> = self
            .tau_overrides
            .iter()
            .map(|((l, m), v)| json!({"lambda": l, "mu": m, "value": scalars_json(v)}))
            .collect();
        let sigma_over: Vec<Value> =
            self.sigma_overrides.iter().map(|(l, m)| json!({"lambda": l, "matrix": matrix_json(m)})).collect();
        json!({
            "kind": "crossed",
            "n": self.n,
            "field": self.b.field().name(),
            "B": self.b.to_json(),
            "tau": {"base": base, "overrides": tau},
            "sigma": {
                "generators": self.sigma_generators.iter().map(|(g, _)| matrix_json(g)).collect::<Vec<_>>(),
                "overrides": sigma_over,
            },
        })
    }

    pub fn from_json(v: &Value, field: Field, n: usize) -> Result<CrossedProduct> {
        let b = match v.get("B") {
            Some(bv) => FiniteAlgebra::from_json(bv, field)?,
            None => FiniteAlgebra::ground(field),
        };
        let m = b.dim();
        let mut cp = CrossedProduct::new(b, n);
        if let Some(t) = v.get("tau") {
            if let Some(qv) = t.get("base").and_then(|b| b.get("q")) {
                let rows = scalar_rows_from_json(qv, Some(field))?;
                cp = cp.with_quantum(QuantumMatrix::new(field, rows)?)?;
            }
            for o in t.get("overrides").and_then(Value::as_array).into_iter().flatten() {
                let l = parse_int_vec(o.get("lambda").unwrap_or(&Value::Null), n)?;
                let mu = parse_int_vec(o.get("mu").unwrap_or(&Value::Null), n)?;
                let val = scalar_vec_from_json(o.get("value").unwrap_or(&Value::Null), field, m)?;
                cp = cp.with_tau(l, mu, val)?;
            }
        }
        if let Some(s) = v.get("sigma") {
            if let Some(gs) = s.get("generators").and_then(Value::as_array) {
                if !gs.is_empty() {
                    let mats = gs
                        .iter()
                        .map(|g| Matrix::from_rows(field, scalar_rows_from_json(g, Some(field))?))
                        .collect::<Result<Vec<_>>>()?;
                    cp = cp.with_sigma_generators(mats)?;
                }
            }
            for o in s.get("overrides").and_then(Value::as_array).into_iter().flatten() {
                let l = parse_int_vec(o.get("lambda").unwrap_or(&Value::Null), n)?;
                let mat = Matrix::from_rows(field, scalar_rows_from_json(o.get("matrix").unwrap_or(&Value::Null), Some(field))?)?;
                cp = cp.with_sigma(l, mat)?;
            }
        }
        Ok(cp)
    }
}

fn show_b(x: &[Scalar]) -> String {
    let parts: Vec<String> = x.iter().map(Scalar::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Checks normalization, invertibility of τ, σ(λ) ∈ Aut(B), and both
/// crossed-product identities on all triples from [−w, w]ⁿ:
/// τ(λ,μ)^{σ(ν)} τ(ν,λ+μ) = τ(ν,λ) τ(ν+λ,μ) and
/// σ(ν)(σ(λ)(b)) τ(ν,λ) = τ(ν,λ) σ(ν+λ)(b).
///
/// Both identities are translation-invariant consequences of associativity,
/// so a window containing every override decides them for the stored data.
pub fn validate_crossed_product(cp: &CrossedProduct, window: i64) -> AxiomReport {
    let mut rep = AxiomReport::new("crossed product");
    let b = &cp.b;
    let m = b.dim();
    let n = cp.n;
    let zero = vec![0; n];
    let pts = box_points(n, window);
    let w = Some(window);
    let pr = &pts;

    let norm = (|| {
        let s0 = cp.sigma(&zero);
        if s0 != Matrix::identity(b.field(), m) {
            return Err("σ(0) ≠ id".to_string());
        }
        for l in &pts {
            if cp.tau(&zero, l) != b.one() {
                return Err(format!("τ(0, {}) ≠ 1", show_degree(l)));
            }
            if cp.tau(l, &zero) != b.one() {
                return Err(format!("τ({}, 0) ≠ 1", show_degree(l)));
            }
        }
        Ok(())
    })();
    rep.record("normalization", w, norm);

    let inv = pts
        .par_iter()
        .flat_map_iter(|l| pr.iter().map(move |mu| (l, mu)))
        .find_map_first(|(l, mu)| {
            b.inverse(&cp.tau(l, mu)).is_none().then(|| format!("τ({}, {}) is not invertible", show_degree(l), show_degree(mu)))
        });
    rep.record("τ invertible", w, inv.map_or(Ok(()), Err));

    let aut = pts.par_iter().find_map_first(|l| {
        let s = cp.sigma(l);
        if s.rank() < m {
            return Some(format!("σ{} is singular", show_degree(l)));
        }
        if s.mul_vec(&b.one()).expect("σ dimension") != b.one() {
            return Some(format!("σ{}(1) ≠ 1", show_degree(l)));
        }
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (b.basis(i), b.basis(j));
                let lhs = s.mul_vec(&b.mul(&x, &y)).expect("σ dimension");
                let rhs = b.mul(&s.mul_vec(&x).expect("σ dimension"), &s.mul_vec(&y).expect("σ dimension"));
                if lhs != rhs {
                    return Some(format!("σ{}(e_{i} e_{j}) ≠ σ(e_{i}) σ(e_{j})", show_degree(l)));
                }
            }
        }
        None
    });
    rep.record("σ(λ) ∈ Aut(B)", w, aut.map_or(Ok(()), Err));

    let cocycle = pts
        .par_iter()
        .flat_map_iter(|nu| pr.iter().flat_map(move |l| pr.iter().map(move |mu| (nu, l, mu))))
        .find_map_first(|(nu, l, mu)| {
        let lhs = b.mul(&cp.sigma_apply(nu, &cp.tau(l, mu)), &cp.tau(nu, &lattice::add(l, mu)));
        let rhs = b.mul(&cp.tau(nu, l), &cp.tau(&lattice::add(nu, l), mu));
        (lhs != rhs).then(|| {
            format!(
                "(ν, λ, μ) = ({}, {}, {}): {} ≠ {}",
                show_degree(nu),
                show_degree(l),
                show_degree(mu),
                show_b(&lhs),
                show_b(&rhs)
            )
        })
    });
    rep.record("2-cocycle identity", w, cocycle.map_or(Ok(()), Err))
        .note = Some("translation-invariant identity; conclusive on the stored data".into());

    let twist = pts
        .par_iter()
        .flat_map_iter(|nu| pr.iter().map(move |l| (nu, l)))
        .find_map_first(|(nu, l)| {
            let t = cp.tau(nu, l);
            (0..m).find_map(|s| {
                let e = b.basis(s);
                let lhs = b.mul(&cp.sigma_apply(nu, &cp.sigma_apply(l, &e)), &t);
                let rhs = b.mul(&t, &cp.sigma_apply(&lattice::add(nu, l), &e));
                (lhs != rhs).then(|| format!("(ν, λ) = ({}, {}), b = e_{s}", show_degree(nu), show_degree(l)))
            })
        });
    rep.record("twisted action identity", w, twist.map_or(Ok(()), Err));
    rep
}

// ---------------------------------------------------------------------------
// Graded elements

/// A homogeneous basis vector: `symbol` indexes a basis of the degree component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub degree: IVec,
    pub symbol: usize,
}

impl Basis {
    pub fn new(degree: IVec, symbol: usize) -> Basis {
        Basis { degree, symbol }
    }
}

/// A finite linear combination of homogeneous basis vectors; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedElement {
    field: Field,
    terms: BTreeMap<Basis, Scalar>,
}

impl GradedElement {
    pub fn zero(field: Field) -> GradedElement {
        GradedElement { field, terms: BTreeMap::new() }
    }

    pub fn term(basis: Basis, c: Scalar) -> GradedElement {
        let mut e = GradedElement::zero(c.field());
        e.add_term(basis, &c);
        e
    }

    /// c·t^λ (symbol 0).
    pub fn monomial(degree: IVec, c: Scalar) -> GradedElement {
        GradedElement::term(Basis::new(degree, 0), c)
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

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, b: &Basis) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, basis: Basis, c: &Scalar) {
        assert_eq!(c.field(), self.field, "graded element across different fields");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(basis) {
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

    pub fn add_scaled(&mut self, c: &Scalar, other: &GradedElement) {
        for (b, x) in &other.terms {
            self.add_term(b.clone(), &(c * x));
        }
    }

    pub fn scale(&self, c: &Scalar) -> GradedElement {
        let mut out = GradedElement::zero(self.field);
        out.add_scaled(c, self);
        out
    }

    /// The component of degree λ.
    pub fn component(&self, degree: &[i64]) -> GradedElement {
        GradedElement {
            field: self.field,
            terms: self.terms.iter().filter(|(b, _)| b.degree == degree).map(|(b, c)| (b.clone(), c.clone())).collect(),
        }
    }

    pub fn degrees(&self) -> BTreeSet<IVec> {
        self.terms.keys().map(|b| b.degree.clone()).collect()
    }

    /// The degree, when the element is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<IVec> {
        let mut ds = self.degrees().into_iter();
        let d = ds.next()?;
        ds.next().is_none().then_some(d)
    }

    /// Coordinates along the given basis list; `None` if a term lies outside it.
    pub fn coordinates(&self, basis: &[Basis]) -> Option<Vec<Scalar>> {
        let mut out = vec![self.field.zero(); basis.len()];
        for (b, c) in &self.terms {
            let k = basis.iter().position(|x| x == b)?;
            out[k] = c.clone();
        }
        Some(out)
    }

    pub fn from_coordinates(field: Field, basis: &[Basis], coords: &[Scalar]) -> GradedElement {
        let mut out = GradedElement::zero(field);
        for (b, c) in basis.iter().zip(coords) {
            out.add_term(b.clone(), c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(b, c)| json!({"degree": b.degree, "symbol": b.symbol, "coeff": c.to_string()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, field: Field, n: usize) -> Result<GradedElement> {
        let items = v.as_array().ok_or_else(|| Error::Parse("graded element must be an array of terms".into()))?;
        let mut out = GradedElement::zero(field);
        for it in items {
            let degree = parse_int_vec(it.get("degree").ok_or_else(|| Error::Parse("term needs \"degree\"".into()))?, n)?;
            let symbol = match it.get("symbol") {
                Some(s) => usize::try_from(parse_int(s)?).map_err(|_| Error::Parse("negative symbol".into()))?,
                None => 0,
            };
            let c = scalar_from_json(it.get("coeff").ok_or_else(|| Error::Parse("term needs \"coeff\"".into()))?, Some(field))?;
            out.add_term(Basis::new(degree, symbol), &c);
        }
        Ok(out)
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| {
                let sym = if b.symbol == 0 { String::new() } else { format!("[{}]", b.symbol) };
                let cs = c.to_string();
                let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
                format!("{cs}*t^{}{sym}", show_degree(&b.degree))
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::ops::Add for &GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out.add_scaled(&self.field.one(), rhs);
        out
    }
}

impl std::ops::Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out.add_scaled(&-self.field.one(), rhs);
        out
    }
}

impl std::ops::Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        self.scale(&-self.field.one())
    }
}

// ---------------------------------------------------------------------------
// Graded algebras

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplication {
    /// k[Λ]: z^λ z^μ = z^{λ+μ}.
    GroupAlgebra,
    /// k[t₁, …, t_n], supported on ℕⁿ.
    Polynomial,
    QuantumTorus(QuantumMatrix),
    CrossedProduct(Box<CrossedProduct>),
}

/// Structural flags evaluated on a window of degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureFlags {
    pub window: i64,
    pub commutative: bool,
    /// Every nonzero component in the window contains an invertible element.
    pub predivision: bool,
    /// Every nonzero homogeneous element is invertible; `None` when this is
    /// not decidable from basis data.
    pub division: Option<bool>,
    /// Division-graded with components of dimension at most one.
    pub torus: Option<bool>,
    pub witness: Option<String>,
}

/// A ℤⁿ-graded unital associative algebra over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    field: Field,
    n: usize,
    rule: Multiplication,
}

impl GradedAlgebra {
    pub fn laurent(field: Field, n: usize) -> GradedAlgebra {
        GradedAlgebra { field, n, rule: Multiplication::GroupAlgebra }
    }

    pub fn polynomial(field: Field, n: usize) -> GradedAlgebra {
        GradedAlgebra { field, n, rule: Multiplication::Polynomial }
    }

    pub fn quantum_torus(q: QuantumMatrix) -> GradedAlgebra {
        GradedAlgebra { field: q.field(), n: q.n(), rule: Multiplication::QuantumTorus(q) }
    }

    pub fn crossed_product(cp: CrossedProduct) -> GradedAlgebra {
        GradedAlgebra { field: cp.b.field(), n: cp.n, rule: Multiplication::CrossedProduct(Box::new(cp)) }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> &Multiplication {
        &self.rule
    }

    pub fn quantum_matrix(&self) -> Option<&QuantumMatrix> {
        match &self.rule {
            Multiplication::QuantumTorus(q) => Some(q),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.rule {
            Multiplication::GroupAlgebra => "laurent",
            Multiplication::Polynomial => "polynomial",
            Multiplication::QuantumTorus(_) => "qtorus",
            Multiplication::CrossedProduct(_) => "crossed",
        }
    }

    pub fn in_support(&self, degree: &[i64]) -> bool {
        degree.len() == self.n && (self.rule != Multiplication::Polynomial || degree.iter().all(|&x| x >= 0))
    }

    pub fn component_dim(&self, degree: &[i64]) -> usize {
        if !self.in_support(degree) {
            return 0;
        }
        match &self.rule {
            Multiplication::CrossedProduct(cp) => cp.b.dim(),
            _ => 1,
        }
    }

    pub fn component_basis(&self, degree: &[i64]) -> Vec<Basis> {
        (0..self.component_dim(degree)).map(|s| Basis::new(degree.to_vec(), s)).collect()
    }

    pub fn basis_element(&self, b: &Basis) -> GradedElement {
        GradedElement::term(b.clone(), self.field.one())
    }

    pub fn one(&self) -> GradedElement {
        let zero = vec![0; self.n];
        match &self.rule {
            Multiplication::CrossedProduct(cp) => {
                let basis = self.component_basis(&zero);
                GradedElement::from_coordinates(self.field, &basis, &cp.b.one())
            }
            _ => GradedElement::monomial(zero, self.field.one()),
        }
    }

    pub fn scalar(&self, c: &Scalar) -> GradedElement {
        self.one().scale(c)
    }

    /// t^λ (or u_λ for crossed products).
    pub fn monomial(&self, degree: &[i64]) -> Result<GradedElement> {
        if !self.in_support(degree) {
            return Err(Error::invalid(format!("degree {} is outside the support", show_degree(degree))));
        }
        match &self.rule {
            Multiplication::CrossedProduct(cp) => {
                let basis = self.component_basis(degree);
                Ok(GradedElement::from_coordinates(self.field, &basis, &cp.b.one()))
            }
            _ => Ok(GradedElement::monomial(degree.to_vec(), self.field.one())),
        }
    }

    /// The generator t_i = t^{e_i}.
    pub fn t(&self, i: usize) -> GradedElement {
        self.monomial(&unit_vector(self.n, i)).expect("unit degree lies in the support")
    }

    /// Algebra generators whose commutant is the centre: a basis of A⁰
    /// together with t^{e_i} (and t^{−e_i} when not already implied).
    pub fn generators(&self) -> Vec<GradedElement> {
        let zero = vec![0; self.n];
        let mut gens: Vec<GradedElement> = match &self.rule {
            Multiplication::CrossedProduct(_) => {
                self.component_basis(&zero).iter().map(|b| self.basis_element(b)).collect()
            }
            _ => Vec::new(),
        };
        gens.extend((0..self.n).map(|i| self.t(i)));
        gens
    }

    pub fn contains(&self, x: &GradedElement) -> bool {
        x.field == self.field && x.terms.keys().all(|b| self.in_support(&b.degree) && b.symbol < self.component_dim(&b.degree))
    }

    /// The product of two basis vectors, as (basis, coefficient) pairs.
    pub fn basis_product(&self, a: &Basis, b: &Basis) -> Vec<(Basis, Scalar)> {
        let d = lattice::add(&a.degree, &b.degree);
        match &self.rule {
            Multiplication::GroupAlgebra | Multiplication::Polynomial => vec![(Basis::new(d, 0), self.field.one())],
            Multiplication::QuantumTorus(q) => vec![(Basis::new(d, 0), q.tau(&a.degree, &b.degree))],
            Multiplication::CrossedProduct(cp) => {
                let bb = &cp.b;
                let x = bb.basis(a.symbol);
                let y = cp.sigma_apply(&a.degree, &bb.basis(b.symbol));
                let prod = bb.mul(&bb.mul(&x, &y), &cp.tau(&a.degree, &b.degree));
                prod.into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(s, c)| (Basis::new(d.clone(), s), c))
                    .collect()
            }
        }
    }

    fn check_member(&self, x: &GradedElement) -> Result<()> {
        if x.field != self.field {
            return Err(Error::FieldMismatch(x.field.name(), self.field.name()));
        }
        if let Some(b) = x.terms.keys().find(|b| !self.in_support(&b.degree) || b.symbol >= self.component_dim(&b.degree)) {
            return Err(Error::invalid(format!(
                "basis vector t^{}[{}] does not belong to the {} algebra",
                show_degree(&b.degree),
                b.symbol,
                self.kind_name()
            )));
        }
        Ok(())
    }

    pub fn multiply(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.mul(x, y))
    }

    /// Product of elements already known to belong to the algebra.
    pub fn mul(&self, x: &GradedElement, y: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.field);
        for (a, c) in &x.terms {
            for (b, d) in &y.terms {
                let cd = c * d;
                for (basis, k) in self.basis_product(a, b) {
                    out.add_term(basis, &(&cd * &k));
                }
            }
        }
        out
    }

    /// [x, y] = xy − yx.
    pub fn commutator(&self, x: &GradedElement, y: &GradedElement) -> GradedElement {
        &self.mul(x, y) - &self.mul(y, x)
    }

    pub fn is_commutative(&self) -> bool {
        match &self.rule {
            Multiplication::GroupAlgebra | Multiplication::Polynomial => true,
            Multiplication::QuantumTorus(q) => q.is_trivial(),
            Multiplication::CrossedProduct(_) => {
                let gens = self.generators();
                gens.iter().enumerate().all(|(i, a)| gens[i + 1..].iter().all(|b| self.commutator(a, b).is_zero()))
                    && (0..self.n).all(|i| {
                        let inv = self.monomial(&neg_degree(&unit_vector(self.n, i))).expect("torus support");
                        gens.iter().all(|g| self.commutator(&inv, g).is_zero())
                    })
            }
        }
    }

    /// The two-sided inverse of a homogeneous element, when it exists.
    pub fn homogeneous_inverse(&self, x: &GradedElement) -> Option<GradedElement> {
        let d = x.homogeneous_degree()?;
        let target = neg_degree(&d);
        let basis = self.component_basis(&target);
        if basis.is_empty() {
            return None;
        }
        let one = self.one();
        let zero = vec![0; self.n];
        let basis0 = self.component_basis(&zero);
        let rhs = one.coordinates(&basis0)?;
        let mut mat = Matrix::zeros(self.field, basis0.len(), basis.len());
        for (j, b) in basis.iter().enumerate() {
            let col = self.mul(x, &self.basis_element(b)).coordinates(&basis0)?;
            for (i, c) in col.into_iter().enumerate() {
                mat.set(i, j, c);
            }
        }
        let y = GradedElement::from_coordinates(self.field, &basis, &mat.solve(&rhs).ok()??);
        (self.mul(&y, x) == one).then_some(y)
    }

    /// Inverse of an arbitrary element. In quantum tori, group algebras and
    /// polynomial algebras every unit is homogeneous.
    pub fn unit_inverse(&self, x: &GradedElement) -> Result<Option<GradedElement>> {
        if x.homogeneous_degree().is_some() {
            return Ok(self.homogeneous_inverse(x));
        }
        match &self.rule {
            Multiplication::CrossedProduct(_) if !x.is_zero() => {
                Err(Error::Unsupported("inverses of inhomogeneous crossed-product elements".into()))
            }
            _ => Ok(None),
        }
    }

    /// A basis of [A, A]^λ. Exact for quantum tori and commutative algebras;
    /// for crossed products it is spanned by commutators of basis vectors
    /// with degrees μ, λ − μ where μ ranges over [−w, w]ⁿ.
    pub fn commutator_component(&self, degree: &[i64], window: i64) -> Vec<GradedElement> {
        if !self.in_support(degree) {
            return Vec::new();
        }
        match &self.rule {
            Multiplication::GroupAlgebra | Multiplication::Polynomial => Vec::new(),
            Multiplication::QuantumTorus(q) => {
                if q.is_central_degree(degree) {
                    Vec::new()
                } else {
                    vec![self.monomial(degree).expect("torus support")]
                }
            }
            Multiplication::CrossedProduct(_) => {
                let basis = self.component_basis(degree);
                let mut span = crate::linalg::Subspace::new(self.field, basis.len());
                for mu in box_points(self.n, window) {
                    let nu = lattice::sub(degree, &mu);
                    for x in self.component_basis(&mu) {
                        for y in self.component_basis(&nu) {
                            let c = self.commutator(&self.basis_element(&x), &self.basis_element(&y));
                            span.insert(&c.coordinates(&basis).expect("commutator stays in degree"));
                        }
                    }
                }
                span.basis().iter().map(|v| GradedElement::from_coordinates(self.field, &basis, v)).collect()
            }
        }
    }

    /// A basis of the degree-λ part of the centre.
    pub fn centre_component(&self, degree: &[i64]) -> Vec<GradedElement> {
        let basis = self.component_basis(degree);
        if basis.is_empty() {
            return Vec::new();
        }
        if let Multiplication::QuantumTorus(q) = &self.rule {
            return if q.is_central_degree(degree) { vec![self.basis_element(&basis[0])] } else { Vec::new() };
        }
        let gens = self.generators();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut images: Vec<Vec<GradedElement>> = Vec::new();
        for b in &basis {
            let z = self.basis_element(b);
            images.push(gens.iter().map(|g| self.commutator(&z, g)).collect());
        }
        for (gi, _) in gens.iter().enumerate() {
            let mut keys: BTreeSet<Basis> = BTreeSet::new();
            for im in &images {
                keys.extend(im[gi].terms.keys().cloned());
            }
            for key in keys {
                rows.push(images.iter().map(|im| im[gi].coefficient(&key)).collect());
            }
        }
        let kernel = if rows.is_empty() {
            (0..basis.len())
                .map(|k| (0..basis.len()).map(|j| if j == k { self.field.one() } else { self.field.zero() }).collect())
                .collect()
        } else {
            Matrix::from_rows(self.field, rows).expect("commutator rows").kernel()
        };
        kernel.iter().map(|v| GradedElement::from_coordinates(self.field, &basis, v)).collect()
    }

    /// A basis of (Cent A)^λ, identified with Z(A)^λ through χ ↦ χ(1); the
    /// inverse map sends z to left multiplication by z.
    pub fn centroid_component(&self, degree: &[i64]) -> Vec<GradedElement> {
        self.centre_component(degree)
    }

    pub fn structure_flags(&self, window: i64) -> StructureFlags {
        let commutative = self.is_commutative();
        let mut flags =
            StructureFlags { window, commutative, predivision: true, division: Some(true), torus: Some(true), witness: None };
        for d in box_points(self.n, window) {
            let basis = self.component_basis(&d);
            if basis.is_empty() {
                continue;
            }
            let units: Vec<bool> =
                basis.iter().map(|b| self.homogeneous_inverse(&self.basis_element(b)).is_some()).collect();
            let has_unit = units.iter().any(|&u| u)
                || self.monomial(&d).ok().and_then(|m| self.homogeneous_inverse(&m)).is_some();
            if !has_unit {
                flags.predivision = false;
                flags.division = Some(false);
                flags.torus = Some(false);
                flags.witness.get_or_insert_with(|| format!("no invertible element in degree {}", show_degree(&d)));
                continue;
            }
            if basis.len() > 1 {
                if units.iter().any(|&u| !u) {
                    flags.division = Some(false);
                    flags.witness.get_or_insert_with(|| format!("noninvertible basis vector in degree {}", show_degree(&d)));
                } else if flags.division == Some(true) {
                    flags.division = None;
                }
                flags.torus = Some(false);
            }
        }
        if flags.division == Some(false) {
            flags.torus = Some(false);
        } else if flags.division.is_none() && flags.torus == Some(true) {
            flags.torus = None;
        }
        flags
    }

    pub fn to_json(&self) -> Value {
        match &self.rule {
            Multiplication::GroupAlgebra => json!({"kind": "laurent", "n": self.n, "field": self.field.name()}),
            Multiplication::Polynomial => json!({"kind": "polynomial", "n": self.n, "field": self.field.name()}),
            Multiplication::QuantumTorus(q) => q.to_json(),
            Multiplication::CrossedProduct(cp) => cp.to_json(),
        }
    }

    /// Reads `{"kind": "laurent" | "group" | "polynomial" | "qtorus" | "crossed", ...}`.
    pub fn from_json(v: &Value) -> Result<GradedAlgebra> {
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Parse("algebra needs a \"kind\"".into()))?;
        let field = match v.get("field") {
            Some(f) => Field::parse(f.as_str().ok_or_else(|| Error::Parse("field must be a string".into()))?)?,
            None => Field::Rationals,
        };
        let n = || -> Result<usize> {
            let n = parse_int(v.get("n").ok_or_else(|| Error::Parse("algebra needs \"n\"".into()))?)?;
            usize::try_from(n).map_err(|_| Error::Parse("negative rank".into()))
        };
        match kind {
            "laurent" | "group" => Ok(GradedAlgebra::laurent(field, n()?)),
            "polynomial" => Ok(GradedAlgebra::polynomial(field, n()?)),
            "qtorus" => Ok(GradedAlgebra::quantum_torus(QuantumMatrix::from_json(v)?)),
            "crossed" => Ok(GradedAlgebra::crossed_product(CrossedProduct::from_json(v, field, n()?)?)),
            other => Err(Error::Parse(format!("unknown algebra kind {other:?}"))),
        }
    }
}

impl fmt::Display for GradedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Multiplication::GroupAlgebra => write!(f, "{}[ℤ^{}]", self.field, self.n),
            Multiplication::Polynomial => write!(f, "{}[t_1..t_{}]", self.field, self.n),
            Multiplication::QuantumTorus(_) => write!(f, "quantum torus of rank {} over {}", self.n, self.field),
            Multiplication::CrossedProduct(cp) => {
                write!(f, "crossed product of rank {} over a {}-dimensional algebra", self.n, cp.b.dim())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Centre / commutator decomposition of quantum tori

/// How the degree-λ component of a quantum torus sits in Z ⊕ [A, A].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSplit {
    pub degree: IVec,
    pub central: bool,
    /// For noncentral degrees: (i, c) with t^λ = c·[t_i, t^{λ−e_i}].
    pub commutator: Option<(usize, Scalar)>,
}

#[derive(Clone, Debug)]
pub struct CommutatorDecomposition {
    pub window: i64,
    pub gamma: Vec<IVec>,
    pub degrees: Vec<DegreeSplit>,
    pub report: AxiomReport,
}

/// Splits every degree of the window into Z(A) or [A, A] and verifies the
/// split: central degrees commute with all generators and receive no
/// commutators from the window; the rest are exhibited as commutators.
pub fn commutator_decomposition(a: &GradedAlgebra, window: i64) -> Result<CommutatorDecomposition> {
    let q = a.quantum_matrix().ok_or_else(|| Error::Unsupported("commutator decomposition needs a quantum torus".into()))?;
    let n = a.rank();
    let gamma = centre_of_qtorus(q)?;
    let pts = box_points(n, window);
    let gamma_lattice = LatticeSubset::lattice(n, &gamma);
    let results: Vec<(DegreeSplit, Option<String>)> = pts
        .par_iter()
        .map(|d| {
            let t = a.monomial(d).expect("torus support");
            let in_gamma = gamma_lattice.contains(d);
            if in_gamma {
                let bad = (0..n).find(|&i| !a.commutator(&t, &a.t(i)).is_zero()).map(|i| {
                    format!("t^{} ∈ Γ does not commute with t_{}", show_degree(d), i + 1)
                });
                let bad = bad.or_else(|| {
                    pts.iter().find_map(|mu| {
                        let nu = lattice::sub(d, mu);
                        let c = a.commutator(&a.monomial(mu).ok()?, &a.monomial(&nu).ok()?);
                        (!c.is_zero()).then(|| format!("[t^{}, t^{}] ≠ 0 in central degree", show_degree(mu), show_degree(&nu)))
                    })
                });
                (DegreeSplit { degree: d.clone(), central: true, commutator: None }, bad)
            } else {
                let Some(i) = (0..n).find(|&i| !q.character(i, d).is_one()) else {
                    return (
                        DegreeSplit { degree: d.clone(), central: false, commutator: None },
                        Some(format!("t^{} is central but outside Γ", show_degree(d))),
                    );
                };
                let rest = lattice::sub(d, &unit_vector(n, i));
                let comm = a.commutator(&a.t(i), &a.monomial(&rest).expect("torus support"));
                let k = comm.coefficient(&Basis::new(d.clone(), 0));
                let c = k.inv().expect("nonzero commutator coefficient");
                let bad = (comm.scale(&c) != t).then(|| format!("t^{} is not c·[t_{}, t^{}]", show_degree(d), i + 1, show_degree(&rest)));
                (DegreeSplit { degree: d.clone(), central: false, commutator: Some((i, c)) }, bad)
            }
        })
        .collect();
    let mut report = AxiomReport::new("F_q = Z(F_q) ⊕ [F_q, F_q]");
    let witness = results.iter().find_map(|(_, w)| w.clone());
    report.record("per-degree decomposition", Some(window), witness.map_or(Ok(()), Err));
    if q.is_trivial() {
        report.record("[F_q, F_q] = 0", None, if results.iter().all(|(s, _)| s.central) { Ok(()) } else { Err("noncentral degree".into()) });
    }
    Ok(CommutatorDecomposition { window, gamma, degrees: results.into_iter().map(|(s, _)| s).collect(), report })
}

// ---------------------------------------------------------------------------
// Graded invariant forms

/// (a|b) = φ((ab)⁰) for a functional φ on A⁰ vanishing on [A, A]⁰.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedForm {
    algebra: GradedAlgebra,
    phi: Vec<Scalar>,
}

/// Builds the form attached to φ (coordinates on the basis of A⁰), after
/// checking that φ vanishes on the commutators [A^λ, A^{−λ}] for λ in the window.
pub fn graded_form(a: &GradedAlgebra, phi: Vec<Scalar>, window: i64) -> Result<GradedForm> {
    let zero = vec![0; a.rank()];
    let basis0 = a.component_basis(&zero);
    if phi.len() != basis0.len() {
        return Err(Error::Dimension(format!("φ needs {} coordinates, got {}", basis0.len(), phi.len())));
    }
    let phi = phi.into_iter().map(|x| x.embed(a.field())).collect::<Result<Vec<_>>>()?;
    let form = GradedForm { algebra: a.clone(), phi };
    let bad = box_points(a.rank(), window).into_par_iter().find_map_first(|l| {
        let m = neg_degree(&l);
        for x in a.component_basis(&l) {
            for y in a.component_basis(&m) {
                let c = a.commutator(&a.basis_element(&x), &a.basis_element(&y));
                if !form.functional(&c).is_zero() {
                    return Some(format!("φ([t^{}, t^{}]) ≠ 0", show_degree(&l), show_degree(&m)));
                }
            }
        }
        None
    });
    match bad {
        Some(w) => Err(Error::axiom("φ vanishes on [A,A]⁰", w)),
        None => Ok(form),
    }
}

impl GradedForm {
    /// φ = coefficient of 1, for algebras with one-dimensional A⁰.
    pub fn unit_coefficient(a: &GradedAlgebra, window: i64) -> Result<GradedForm> {
        graded_form(a, vec![a.field().one()], window)
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn phi(&self) -> &[Scalar] {
        &self.phi
    }

    /// φ applied to the degree-0 component.
    pub fn functional(&self, x: &GradedElement) -> Scalar {
        let mut acc = self.algebra.field().zero();
        for (b, c) in x.terms() {
            if b.degree.iter().all(|&v| v == 0) {
                acc += &(c * &self.phi[b.symbol]);
            }
        }
        acc
    }

    pub fn eval(&self, x: &GradedElement, y: &GradedElement) -> Scalar {
        self.functional(&self.algebra.mul(x, y))
    }

    /// The pairing matrix between the bases of A^λ and A^{−λ}.
    pub fn gram(&self, degree: &[i64]) -> Matrix {
        let a = &self.algebra;
        let rows = a.component_basis(degree);
        let cols = a.component_basis(&neg_degree(degree));
        let mut m = Matrix::zeros(a.field(), rows.len(), cols.len());
        for (i, x) in rows.iter().enumerate() {
            for (j, y) in cols.iter().enumerate() {
                m.set(i, j, self.eval(&a.basis_element(x), &a.basis_element(y)));
            }
        }
        m
    }

    /// Radical vectors of the form among degrees of the window.
    pub fn radical(&self, window: i64) -> Vec<GradedElement> {
        let a = &self.algebra;
        let mut out = Vec::new();
        for d in box_points(a.rank(), window) {
            let basis = a.component_basis(&d);
            if basis.is_empty() {
                continue;
            }
            let g = self.gram(&d).transpose();
            let ker = if g.rows() == 0 {
                (0..basis.len())
                    .map(|k| (0..basis.len()).map(|j| if j == k { a.field().one() } else { a.field().zero() }).collect())
                    .collect()
            } else {
                g.kernel()
            };
            out.extend(ker.iter().map(|v| GradedElement::from_coordinates(a.field(), &basis, v)));
        }
        out
    }

    pub fn is_nondegenerate(&self, window: i64) -> bool {
        self.radical(window).is_empty()
    }

    /// Symmetry, invariance (ab|c) = (a|bc) and gradedness on basis vectors
    /// with degrees in the window.
    pub fn check(&self, window: i64) -> AxiomReport {
        let a = &self.algebra;
        let pts = box_points(a.rank(), window);
        let basis: Vec<Basis> = pts.iter().flat_map(|d| a.component_basis(d)).collect();
        let mut rep = AxiomReport::new("graded invariant form");
        let w = Some(window);
        let sym = basis.par_iter().find_map_first(|x| {
            basis.iter().find_map(|y| {
                let (ex, ey) = (a.basis_element(x), a.basis_element(y));
                (self.eval(&ex, &ey) != self.eval(&ey, &ex)).then(|| format!("({ex} | {ey})"))
            })
        });
        rep.record("symmetric", w, sym.map_or(Ok(()), Err));
        let graded = basis.par_iter().find_map_first(|x| {
            basis.iter().find_map(|y| {
                let s = lattice::add(&x.degree, &y.degree);
                let (ex, ey) = (a.basis_element(x), a.basis_element(y));
                (s.iter().any(|&v| v != 0) && !self.eval(&ex, &ey).is_zero()).then(|| format!("({ex} | {ey}) ≠ 0"))
            })
        });
        rep.record("graded", w, graded.map_or(Ok(()), Err));
        let inv = basis.par_iter().find_map_first(|x| {
            let ex = a.basis_element(x);
            basis.iter().find_map(|y| {
                let ey = a.basis_element(y);
                let exy = a.mul(&ex, &ey);
                let target = neg_degree(&lattice::add(&x.degree, &y.degree));
                a.component_basis(&target).into_iter().find_map(|z| {
                    let ez = a.basis_element(&z);
                    (self.functional(&a.mul(&exy, &ez)) != self.functional(&a.mul(&ex, &a.mul(&ey, &ez))))
                        .then(|| format!("(({ex})({ey}) | {ez}) ≠ ({ex} | ({ey})({ez}))"))
                })
            })
        });
        rep.record("invariant", w, inv.map_or(Ok(()), Err));
        rep
    }
}

// ---------------------------------------------------------------------------
// Centroidal derivations

/// ∂_θ(x^μ) = θ(μ)·x^μ for an additive θ: ℤⁿ → Z(A)^λ, stored by its
/// values θ(e_k) (each central of degree λ, or zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentroidalDerivation {
    degree: IVec,
    values: Vec<GradedElement>,
}

impl CentroidalDerivation {
    pub fn new(a: &GradedAlgebra, degree: IVec, values: Vec<GradedElement>) -> Result<CentroidalDerivation> {
        if degree.len() != a.rank() || values.len() != a.rank() {
            return Err(Error::Dimension("centroidal derivation needs one value per lattice generator".into()));
        }
        let gens = a.generators();
        for (k, v) in values.iter().enumerate() {
            if !v.is_zero() && v.homogeneous_degree().as_ref() != Some(&degree) {
                return Err(Error::invalid(format!("θ(e_{}) = {v} is not of degree {}", k + 1, show_degree(&degree))));
            }
            a.check_member(v)?;
            if gens.iter().any(|g| !a.commutator(v, g).is_zero()) {
                return Err(Error::invalid(format!("θ(e_{}) = {v} is not central", k + 1)));
            }
        }
        Ok(CentroidalDerivation { degree, values })
    }

    /// The degree derivation ∂_k: x^μ ↦ μ_k x^μ.
    pub fn degree_derivation(a: &GradedAlgebra, k: usize) -> CentroidalDerivation {
        let n = a.rank();
        let values = (0..n).map(|j| if j == k { a.one() } else { GradedElement::zero(a.field()) }).collect();
        CentroidalDerivation { degree: vec![0; n], values }
    }

    pub fn zero(a: &GradedAlgebra, degree: IVec) -> CentroidalDerivation {
        CentroidalDerivation { values: vec![GradedElement::zero(a.field()); a.rank()], degree }
    }

    pub fn degree(&self) -> &[i64] {
        &self.degree
    }

    pub fn values(&self) -> &[GradedElement] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(GradedElement::is_zero)
    }

    /// θ(μ) = Σ_k μ_k θ(e_k).
    pub fn theta(&self, mu: &[i64]) -> GradedElement {
        let field = self.values.first().map_or(Field::Rationals, GradedElement::field);
        let mut acc = GradedElement::zero(field);
        for (v, &m) in self.values.iter().zip(mu) {
            if m != 0 {
                acc.add_scaled(&field.from_i64(m), v);
            }
        }
        acc
    }

    pub fn apply(&self, a: &GradedAlgebra, x: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(a.field());
        for d in x.degrees() {
            let th = self.theta(&d);
            if !th.is_zero() {
                out.add_scaled(&a.field().one(), &a.mul(&th, &x.component(&d)));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> CentroidalDerivation {
        CentroidalDerivation { degree: self.degree.clone(), values: self.values.iter().map(|v| v.scale(c)).collect() }
    }

    pub fn add(&self, other: &CentroidalDerivation) -> Result<CentroidalDerivation> {
        if self.degree != other.degree {
            return Err(Error::invalid("sum of centroidal derivations of different degrees"));
        }
        Ok(CentroidalDerivation {
            degree: self.degree.clone(),
            values: self.values.iter().zip(&other.values).map(|(x, y)| x + y).collect(),
        })
    }

    /// [∂_θ, ∂_ψ] = ∂_χ with χ(e_k) = θ(μ)ψ(e_k) − ψ(λ)θ(e_k), where
    /// λ = deg θ and μ = deg ψ.
    pub fn bracket(&self, a: &GradedAlgebra, other: &CentroidalDerivation) -> CentroidalDerivation {
        let th_mu = self.theta(&other.degree);
        let psi_l = other.theta(&self.degree);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(th, psi)| &a.mul(&th_mu, psi) - &a.mul(&psi_l, th))
            .collect();
        CentroidalDerivation { degree: lattice::add(&self.degree, &other.degree), values }
    }
}

/// A basis of (SCDer A)^λ = {∂_θ ∈ (CDer A)^λ : θ(λ) = 0}.
pub fn skew_centroidal_space(a: &GradedAlgebra, degree: &[i64]) -> Vec<CentroidalDerivation> {
    let n = a.rank();
    let centre = a.centroid_component(degree);
    let c = centre.len();
    if c == 0 {
        return Vec::new();
    }
    // Unknowns x_{k,j}: θ(e_k) = Σ_j x_{k,j} z_j; constraints Σ_k λ_k x_{k,j} = 0.
    let rows: Vec<Vec<i64>> = (0..c)
        .map(|j| {
            let mut r = vec![0; n * c];
            for k in 0..n {
                r[k * c + j] = degree[k];
            }
            r
        })
        .collect();
    let field = a.field();
    let kernel = Matrix::from_i64_rows(field, &rows).kernel();
    kernel
        .iter()
        .map(|x| {
            let values = (0..n)
                .map(|k| {
                    let mut v = GradedElement::zero(field);
                    for (j, z) in centre.iter().enumerate() {
                        v.add_scaled(&x[k * c + j], z);
                    }
                    v
                })
                .collect();
            CentroidalDerivation { degree: degree.to_vec(), values }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> Field {
        Field::cyclotomic(3)
    }

    fn fq3() -> GradedAlgebra {
        let q = QuantumMatrix::from_upper(z3(), 2, &[(0, 1, z3().zeta_pow(1))]).unwrap();
        GradedAlgebra::quantum_torus(q)
    }

    #[test]
    fn quantum_torus_commutation() {
        let a = fq3();
        let (t1, t2) = (a.t(0), a.t(1));
        let q12 = a.quantum_matrix().unwrap().entry(0, 1).clone();
        assert_eq!(a.mul(&t1, &t2), a.mul(&t2, &t1).scale(&q12));
        let x = a.monomial(&[2, -1]).unwrap();
        assert_eq!(a.mul(&a.one(), &x), x);
        assert_eq!(a.mul(&x, &a.one()), x);
    }

    #[test]
    fn group_algebra_product() {
        let a = GradedAlgebra::laurent(Field::Rationals, 2);
        let p = a.mul(&a.monomial(&[1, 2]).unwrap(), &a.monomial(&[-3, 1]).unwrap());
        assert_eq!(p, a.monomial(&[-2, 3]).unwrap());
    }

    #[test]
    fn mismatched_field_is_an_error() {
        let a = fq3();
        let x = GradedElement::monomial(vec![1, 0], Field::Rationals.one());
        assert!(a.multiply(&x, &a.t(0)).is_err());
        let p = GradedAlgebra::polynomial(Field::Rationals, 1);
        let neg = GradedElement::monomial(vec![-1], Field::Rationals.one());
        assert!(p.multiply(&neg, &neg).is_err());
    }

    #[test]
    fn quantum_matrix_validation() {
        let f = Field::Rationals;
        let two = f.from_i64(2);
        assert!(QuantumMatrix::new(f, vec![vec![f.one(), two.clone()], vec![two.clone(), f.one()]]).is_err());
        assert!(QuantumMatrix::new(f, vec![vec![two.clone()]]).is_err());
        assert!(QuantumMatrix::from_upper(f, 2, &[(0, 1, two)]).is_ok());
    }

    #[test]
    fn centre_examples() {
        let f = Field::Rationals;
        assert_eq!(centre_of_qtorus(&QuantumMatrix::trivial(f, 3)).unwrap(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let q = fq3().quantum_matrix().unwrap().clone();
        let gamma = centre_of_qtorus(&q).unwrap();
        assert_eq!(gamma, vec![vec![3, 0], vec![0, 3]]);
        let scan = centre_box_scan(&q, 6);
        let lat = LatticeSubset::lattice(2, &gamma);
        assert_eq!(scan, lat.enumerate(6));
        let q2 = QuantumMatrix::from_upper(f, 2, &[(0, 1, f.from_i64(2))]).unwrap();
        assert!(centre_of_qtorus(&q2).unwrap().is_empty());
        assert_eq!(centre_box_scan(&q2, 4), vec![vec![0, 0]]);
        assert!(!q2.is_fgc().unwrap() && q.is_fgc().unwrap());
    }

    #[test]
    fn centre_mixed_rational_and_torsion() {
        // q12 = −4, q13 = 2, q23 = ζ6: sign and prime-power relations interact.
        let f = Field::cyclotomic(6);
        let q = QuantumMatrix::from_upper(f, 3, &[(0, 1, f.from_i64(-4)), (0, 2, f.from_i64(2)), (1, 2, f.zeta_pow(1))])
            .unwrap();
        let gamma = centre_of_qtorus(&q).unwrap();
        let lat = LatticeSubset::lattice(3, &gamma);
        assert_eq!(centre_box_scan(&q, 6), lat.enumerate(6));
    }

    #[test]
    fn decomposition_zeta3() {
        let a = fq3();
        let d = commutator_decomposition(&a, 4).unwrap();
        assert!(d.report.all_pass(), "{}", d.report);
        let central: Vec<&IVec> = d.degrees.iter().filter(|s| s.central).map(|s| &s.degree).collect();
        assert_eq!(central, vec![&vec![-3, -3], &vec![-3, 0], &vec![-3, 3], &vec![0, -3], &vec![0, 0], &vec![0, 3], &vec![3, -3], &vec![3, 0], &vec![3, 3]]);
        let lau = GradedAlgebra::quantum_torus(QuantumMatrix::trivial(Field::Rationals, 2));
        let d = commutator_decomposition(&lau, 2).unwrap();
        assert!(d.report.all_pass() && d.degrees.iter().all(|s| s.central));
    }

    fn swap_crossed(perturb: bool) -> CrossedProduct {
        let f = Field::Rationals;
        let b = FiniteAlgebra::diagonal(f, 2);
        let swap = Matrix::from_i64_rows(f, &[vec![0, 1], vec![1, 0]]);
        let cp = CrossedProduct::new(b, 1).with_sigma_generators(vec![swap]).unwrap();
        if perturb {
            cp.with_tau(vec![1], vec![1], vec![f.from_i64(2), f.one()]).unwrap()
        } else {
            cp
        }
    }

    #[test]
    fn crossed_product_validation() {
        let q = fq3().quantum_matrix().unwrap().clone();
        let cp = CrossedProduct::new(FiniteAlgebra::ground(z3()), 2).with_quantum(q).unwrap();
        assert!(validate_crossed_product(&cp, 2).all_pass());
        let group = CrossedProduct::new(FiniteAlgebra::ground(Field::Rationals), 2);
        assert!(validate_crossed_product(&group, 2).all_pass());
        let f = z3();
        let bad = CrossedProduct::new(FiniteAlgebra::ground(f), 2)
            .with_tau(vec![1, 0], vec![0, 1], vec![f.from_i64(5)])
            .unwrap();
        let rep = validate_crossed_product(&bad, 1);
        assert!(!rep.passed("2-cocycle identity"));
        assert!(rep.get("2-cocycle identity").unwrap().witness.as_ref().unwrap().contains("(ν, λ, μ)"));
        assert!(validate_crossed_product(&swap_crossed(false), 2).all_pass());
        // Perturbing τ(1,1) alone breaks the cocycle identity at (1, 1, −1).
        let rep = validate_crossed_product(&swap_crossed(true), 2);
        assert!(!rep.all_pass());
    }

    #[test]
    fn crossed_product_multiplication_is_associative() {
        let a = GradedAlgebra::crossed_product(swap_crossed(false));
        let basis: Vec<Basis> = box_points(1, 2).iter().flat_map(|d| a.component_basis(d)).collect();
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let (ex, ey, ez) = (a.basis_element(x), a.basis_element(y), a.basis_element(z));
                    assert_eq!(a.mul(&a.mul(&ex, &ey), &ez), a.mul(&ex, &a.mul(&ey, &ez)));
                }
            }
        }
        assert!(!a.is_commutative());
        let flags = a.structure_flags(2);
        assert!(flags.predivision);
        assert_eq!(flags.division, Some(false));
        // Centre of (k×k) ⋊ ℤ with swap: degree 0 is k·1, odd degrees vanish.
        assert_eq!(a.centre_component(&[0]).len(), 1);
        assert_eq!(a.centre_component(&[1]).len(), 0);
        assert_eq!(a.centre_component(&[2]).len(), 1);
    }

    #[test]
    fn inverses() {
        let a = fq3();
        let x = a.monomial(&[2, 1]).unwrap().scale(&z3().from_i64(3));
        let y = a.homogeneous_inverse(&x).unwrap();
        assert_eq!(a.mul(&x, &y), a.one());
        let lau = GradedAlgebra::laurent(Field::Rationals, 1);
        let tp1 = &lau.t(0) + &lau.one();
        assert_eq!(lau.unit_inverse(&tp1).unwrap(), None);
        let p = GradedAlgebra::polynomial(Field::Rationals, 1);
        assert_eq!(p.homogeneous_inverse(&p.t(0)), None);
        let flags = p.structure_flags(2);
        assert!(!flags.predivision && flags.commutative);
        let flags = a.structure_flags(2);
        assert!(flags.predivision && flags.division == Some(true) && flags.torus == Some(true) && !flags.commutative);
    }

    #[test]
    fn forms() {
        let a = fq3();
        let form = GradedForm::unit_coefficient(&a, 3).unwrap();
        assert!(form.check(2).all_pass());
        assert!(form.is_nondegenerate(3));
        let zero = graded_form(&a, vec![z3().zero()], 2).unwrap();
        assert!(!zero.is_nondegenerate(1));
        let lau = GradedAlgebra::laurent(Field::Rationals, 1);
        let f = GradedForm::unit_coefficient(&lau, 3).unwrap();
        assert_eq!(f.eval(&lau.monomial(&[2]).unwrap(), &lau.monomial(&[-2]).unwrap()), Field::Rationals.one());
        assert!(f.eval(&lau.t(0), &lau.t(0)).is_zero());
    }

    #[test]
    fn ill_defined_functional_rejected() {
        // In (k×k) ⋊ ℤ with swap, [e_1 u_1, e_1 u_{-1}] = e_1 − e_2 lies in [A,A]⁰.
        let a = GradedAlgebra::crossed_product(swap_crossed(false));
        let f = Field::Rationals;
        assert!(graded_form(&a, vec![f.one(), f.zero()], 1).is_err());
        assert!(graded_form(&a, vec![f.one(), f.one()], 2).is_ok());
    }

    #[test]
    fn centroidal_brackets() {
        let lau = GradedAlgebra::laurent(Field::Rationals, 1);
        let f = Field::Rationals;
        let d = |i: i64| CentroidalDerivation::new(&lau, vec![i], vec![lau.monomial(&[i]).unwrap()]).unwrap();
        for i in -2..=2 {
            for j in -2..=2 {
                assert_eq!(d(i).bracket(&lau, &d(j)), d(i + j).scale(&f.from_i64(j - i)));
            }
        }
        let a = fq3();
        let (d1, d2) = (CentroidalDerivation::degree_derivation(&a, 0), CentroidalDerivation::degree_derivation(&a, 1));
        assert!(d1.bracket(&a, &d2).is_zero());
        let x = a.monomial(&[2, -1]).unwrap();
        assert_eq!(d1.apply(&a, &x), x.scale(&z3().from_i64(2)));
        let zero = CentroidalDerivation::zero(&a, vec![0, 0]);
        assert!(d1.bracket(&a, &zero).is_zero());
    }

    #[test]
    fn skew_centroidal_examples() {
        let lau = GradedAlgebra::laurent(Field::Rationals, 1);
        let s = skew_centroidal_space(&lau, &[0]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].values()[0], lau.one());
        assert!(skew_centroidal_space(&lau, &[2]).is_empty());
        let a = fq3();
        assert_eq!(skew_centroidal_space(&a, &[0, 0]).len(), 2);
        assert!(skew_centroidal_space(&a, &[1, 0]).is_empty());
        assert_eq!(skew_centroidal_space(&a, &[3, 0]).len(), 1);
        for th in skew_centroidal_space(&a, &[3, -3]) {
            assert!(th.theta(&[3, -3]).is_zero());
        }
    }

    #[test]
    fn centroid_matches_windowed_commutant() {
        let a = fq3();
        for d in box_points(2, 3) {
            let c = a.centroid_component(&d);
            let central = box_points(2, 2).iter().all(|m| a.commutator(&a.monomial(&d).unwrap(), &a.monomial(m).unwrap()).is_zero());
            assert_eq!(c.len(), usize::from(central));
        }
        let lau = GradedAlgebra::laurent(Field::Rationals, 2);
        assert_eq!(lau.centroid_component(&[4, -1]).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let v: Value = serde_json::from_str(r#"{"kind":"qtorus","n":2,"q":[["1","z3"],["z3^-1","1"]],"field":"Q(zeta_3)"}"#).unwrap();
        let a = GradedAlgebra::from_json(&v).unwrap();
        assert_eq!(a, fq3());
        assert_eq!(GradedAlgebra::from_json(&a.to_json()).unwrap(), a);
        let c = GradedAlgebra::crossed_product(swap_crossed(true));
        assert_eq!(GradedAlgebra::from_json(&c.to_json()).unwrap(), c);
        let x = &a.monomial(&[1, -2]).unwrap().scale(&z3().zeta_pow(2)) + &a.one();
        assert_eq!(GradedElement::from_json(&x.to_json(), z3(), 2).unwrap(), x);
        assert!(GradedAlgebra::from_json(&serde_json::json!({"kind": "nope"})).is_err());
    }
}
