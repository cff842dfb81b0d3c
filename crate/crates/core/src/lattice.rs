//! Integer lattices in ℤⁿ and finite unions of cosets of a sublattice.
//!
//! Membership and containment between coset unions are decided exactly;
//! only enumeration is restricted to a box.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type IVec = Vec<i64>;

/// Cap on the size of finite quotient groups explored by containment tests.
const MAX_QUOTIENT: usize = 1_000_000;

fn to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("lattice coordinate overflow")
}

/// Hermite normal form (row style) of the lattice spanned by `gens`.
///
/// Rows are in echelon form with positive pivots; entries above each pivot lie
/// in `[0, pivot)`. Zero rows are dropped.
pub fn hnf(gens: &[IVec], dim: usize) -> Vec<IVec> {
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| {
            assert_eq!(g.len(), dim, "lattice generator length");
            g.iter().map(|&x| x as i128).collect()
        })
        .filter(|r: &Vec<i128>| r.iter().any(|&x| x != 0))
        .collect();
    let mut out: Vec<Vec<i128>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..dim {
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| rows[i][col].abs());
            let p = nz[0];
            let prow = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_euclid(prow[col]);
                for (x, y) in rows[i].iter_mut().zip(&prow) {
                    *x -= q * y;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.swap_remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
            pivots.push(col);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    for k in 0..out.len() {
        let p = pivots[k];
        for j in 0..k {
            let q = out[j][p].div_euclid(out[k][p]);
            if q != 0 {
                let rk = out[k].clone();
                for (x, y) in out[j].iter_mut().zip(&rk) {
                    *x -= q * y;
                }
            }
        }
    }
    out.into_iter().map(|r| r.into_iter().map(to_i64).collect()).collect()
}

fn pivot_of(row: &[i64]) -> usize {
    row.iter().position(|&x| x != 0).expect("nonzero HNF row")
}

/// Canonical representative of `v` modulo the lattice with HNF basis `basis`.
pub fn reduce_mod(v: &[i64], basis: &[IVec]) -> IVec {
    let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in basis {
        let p = pivot_of(row);
        let q = v[p].div_euclid(row[p] as i128);
        if q != 0 {
            for (x, &y) in v.iter_mut().zip(row) {
                *x -= q * y as i128;
            }
        }
    }
    v.into_iter().map(to_i64).collect()
}

pub fn lattice_rank(gens: &[IVec], dim: usize) -> usize {
    hnf(gens, dim).len()
}

/// A basis of {x ∈ ℤⁿ : A x = 0} for an integer matrix given by rows.
pub fn integer_kernel(rows: &[IVec], n: usize) -> Vec<IVec> {
    let m = rows.len();
    let aug: Vec<IVec> = (0..n)
        .map(|j| {
            let mut r: IVec = rows.iter().map(|row| row[j]).collect();
            r.extend((0..n).map(|k| i64::from(k == j)));
            r
        })
        .collect();
    hnf(&aug, m + n)
        .into_iter()
        .filter(|r| r[..m].iter().all(|&x| x == 0))
        .map(|r| r[m..].to_vec())
        .collect()
}

/// Index [ℤⁿ : L] for a full-rank lattice, else `None`.
pub fn lattice_index(basis: &[IVec], dim: usize) -> Option<u128> {
    if basis.len() < dim {
        return None;
    }
    Some(basis.iter().map(|r| r[pivot_of(r)] as u128).product())
}

/// All points of the box [−w, w]ⁿ in lexicographic order.
pub fn box_points(dim: usize, w: i64) -> Vec<IVec> {
    let mut out = Vec::new();
    let mut cur = vec![-w; dim];
    loop {
        out.push(cur.clone());
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < w {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -w;
                }
                break;
            }
        }
    }
}

pub fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(k: i64, a: &[i64]) -> IVec {
    a.iter().map(|x| k * x).collect()
}

/// A finite union of cosets `c + L` of one lattice `L ⊆ ℤⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSubset {
    dim: usize,
    lattice: Vec<IVec>,
    cosets: BTreeSet<IVec>,
}

impl LatticeSubset {
    pub fn new(dim: usize, gens: &[IVec], cosets: &[IVec]) -> LatticeSubset {
        let lattice = hnf(gens, dim);
        let cosets = cosets
            .iter()
            .map(|c| {
                assert_eq!(c.len(), dim, "coset representative length");
                reduce_mod(c, &lattice)
            })
            .collect();
        LatticeSubset { dim, lattice, cosets }
    }

    /// The sublattice generated by `gens`.
    pub fn lattice(dim: usize, gens: &[IVec]) -> LatticeSubset {
        LatticeSubset::new(dim, gens, &[vec![0; dim]])
    }

    /// All of ℤⁿ.
    pub fn full(dim: usize) -> LatticeSubset {
        let gens: Vec<IVec> = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        LatticeSubset::lattice(dim, &gens)
    }

    /// A finite point set.
    pub fn points(dim: usize, pts: &[IVec]) -> LatticeSubset {
        LatticeSubset::new(dim, &[], pts)
    }

    pub fn empty(dim: usize) -> LatticeSubset {
        LatticeSubset::new(dim, &[], &[])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice_basis(&self) -> &[IVec] {
        &self.lattice
    }

    pub fn coset_reps(&self) -> impl Iterator<Item = &IVec> {
        self.cosets.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.cosets.contains(&reduce_mod(z, &self.lattice))
    }

    pub fn neg(&self) -> LatticeSubset {
        let cs: Vec<IVec> = self.cosets.iter().map(|c| scale(-1, c)).collect();
        LatticeSubset::new(self.dim, &self.lattice, &cs)
    }

    /// {k·x : x ∈ self}.
    pub fn scale(&self, k: i64) -> LatticeSubset {
        let gens: Vec<IVec> = self.lattice.iter().map(|g| scale(k, g)).collect();
        let cs: Vec<IVec> = self.cosets.iter().map(|c| scale(k, c)).collect();
        LatticeSubset::new(self.dim, &gens, &cs)
    }

    pub fn shift(&self, v: &[i64]) -> LatticeSubset {
        let cs: Vec<IVec> = self.cosets.iter().map(|c| add(c, v)).collect();
        LatticeSubset::new(self.dim, &self.lattice, &cs)
    }

    /// Minkowski sum {x + y}.
    pub fn add(&self, other: &LatticeSubset) -> LatticeSubset {
        let mut gens = self.lattice.clone();
        gens.extend(other.lattice.iter().cloned());
        let cs: Vec<IVec> = self.cosets.iter().flat_map(|a| other.cosets.iter().map(move |b| add(a, b))).collect();
        LatticeSubset::new(self.dim, &gens, &cs)
    }

    /// Minkowski difference {x − y}.
    pub fn sub(&self, other: &LatticeSubset) -> LatticeSubset {
        self.add(&other.neg())
    }

    /// {x − k·y : x ∈ self, y ∈ other}.
    pub fn sub_scaled(&self, k: i64, other: &LatticeSubset) -> LatticeSubset {
        self.add(&other.scale(k).neg())
    }

    /// The subgroup generated.
    pub fn group(&self) -> LatticeSubset {
        let mut gens = self.lattice.clone();
        gens.extend(self.cosets.iter().cloned());
        LatticeSubset::lattice(self.dim, &gens)
    }

    /// Rank of the subgroup generated.
    pub fn rank(&self) -> usize {
        self.group().lattice.len()
    }

    pub fn is_subset_of(&self, other: &LatticeSubset) -> bool {
        self.cosets.iter().all(|c| coset_in_union(c, &self.lattice, other))
    }

    pub fn set_eq(&self, other: &LatticeSubset) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn is_disjoint(&self, other: &LatticeSubset) -> bool {
        let mut gens = self.lattice.clone();
        gens.extend(other.lattice.iter().cloned());
        let sum = hnf(&gens, self.dim);
        self.cosets
            .iter()
            .all(|a| other.cosets.iter().all(|b| reduce_mod(&sub(a, b), &sum).iter().any(|&x| x != 0)))
    }

    /// Members inside the box [−w, w]ⁿ.
    pub fn enumerate(&self, w: i64) -> Vec<IVec> {
        box_points(self.dim, w).into_iter().filter(|p| self.contains(p)).collect()
    }

    pub fn to_json(&self) -> Value {
        let show = |v: &IVec| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "lattice": self.lattice.iter().map(show).collect::<Vec<_>>(),
            "cosets": self.cosets.iter().map(show).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, dim: usize) -> Result<LatticeSubset> {
        let gens = parse_int_rows(v.get("lattice").unwrap_or(&Value::Array(vec![])), dim)?;
        let cosets = match v.get("cosets") {
            Some(c) => parse_int_rows(c, dim)?,
            None => vec![vec![0; dim]],
        };
        Ok(LatticeSubset::new(dim, &gens, &cosets))
    }
}

/// Decides `v + span_ℤ(m) ⊆ target` exactly.
pub fn coset_in_union(v: &[i64], m: &[IVec], target: &LatticeSubset) -> bool {
    if target.is_empty() {
        return false;
    }
    let lt = &target.lattice;
    let mut joint = lt.clone();
    joint.extend(m.iter().cloned());
    if lattice_rank(&joint, target.dim) > lt.len() {
        return false;
    }
    // target is L_t-periodic, so only (M + L_t)/L_t matters; that group is finite.
    let gens: Vec<IVec> = m.iter().map(|g| reduce_mod(g, lt)).collect();
    let zero = vec![0i64; target.dim];
    let mut seen: HashSet<IVec> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(zero.clone());
    queue.push_back(zero);
    while let Some(e) = queue.pop_front() {
        if !target.contains(&add(v, &e)) {
            return false;
        }
        for g in &gens {
            let next = reduce_mod(&add(&e, g), lt);
            if seen.insert(next.clone()) {
                assert!(seen.len() <= MAX_QUOTIENT, "quotient group too large for containment test");
                queue.push_back(next);
            }
        }
    }
    true
}

pub fn parse_int(v: &Value) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        other => Err(Error::Parse(format!("not an integer: {other}"))),
    }
}

pub fn parse_int_vec(v: &Value, dim: usize) -> Result<IVec> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("expected integer vector".into()))?;
    if arr.len() != dim {
        return Err(Error::Parse(format!("expected integer vector of length {dim}, got {}", arr.len())));
    }
    arr.iter().map(parse_int).collect()
}

pub fn parse_int_rows(v: &Value, dim: usize) -> Result<Vec<IVec>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("expected list of integer vectors".into()))?;
    arr.iter().map(|r| parse_int_vec(r, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_basic() {
        let h = hnf(&[vec![4, 6], vec![6, 4]], 2);
        assert_eq!(h, vec![vec![2, 8], vec![0, 10]]);
        assert_eq!(lattice_index(&h, 2), Some(20));
        assert!(hnf(&[vec![0, 0]], 2).is_empty());
    }

    #[test]
    fn reduction_is_canonical() {
        let h = hnf(&[vec![3, 0], vec![0, 3]], 2);
        assert_eq!(reduce_mod(&[7, -2], &h), vec![1, 1]);
        assert_eq!(reduce_mod(&[-2, 4], &h), vec![1, 1]);
    }

    #[test]
    fn kernel_of_congruence_system() {
        // {γ : γ₂ ≡ 0, −γ₁ ≡ 0 mod 3}: kernel of [[0,1,3,0],[-1,0,0,3]] projected.
        let k = integer_kernel(&[vec![0, 1, 3, 0], vec![-1, 0, 0, 3]], 4);
        let proj: Vec<IVec> = k.iter().map(|r| r[..2].to_vec()).collect();
        assert_eq!(hnf(&proj, 2), vec![vec![3, 0], vec![0, 3]]);
    }

    #[test]
    fn coset_algebra() {
        let z = LatticeSubset::full(1);
        let two_z = LatticeSubset::lattice(1, &[vec![2]]);
        let odd = LatticeSubset::new(1, &[vec![2]], &[vec![1]]);
        assert!(two_z.is_subset_of(&z));
        assert!(!z.is_subset_of(&two_z));
        assert!(odd.is_disjoint(&two_z));
        assert!(two_z.add(&odd).set_eq(&odd));
        assert!(z.set_eq(&two_z.add(&LatticeSubset::points(1, &[vec![0], vec![1]]))));
        assert!(odd.sub(&odd).set_eq(&two_z));
        assert_eq!(odd.enumerate(3), vec![vec![-3], vec![-1], vec![1], vec![3]]);
        assert!(!LatticeSubset::points(1, &[vec![0]]).add(&z).is_subset_of(&LatticeSubset::points(1, &[vec![0]])));
    }

    #[test]
    fn box_enumeration_size() {
        assert_eq!(box_points(2, 1).len(), 9);
        assert_eq!(box_points(0, 3), vec![Vec::<i64>::new()]);
    }
}
