//! Pre-reflection and reflection systems, invariant and affine forms,
//! extension data and affine reflection systems.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{hnf, lattice_index, IVec, LatticeSubset};
use crate::linalg::Matrix;
use crate::report::AxiomReport;
use crate::roots::{
    apply_form, is_zero_vec, parse_qrows, qdot, qrank, qscale, qsub, show_qvec, Component, Family, QVec, RootSystem,
};
use crate::scalar::{int, rational_to_i64, Rational};

/// A (possibly infinite) root set seen through a finite window, with an exact
/// membership oracle. Coroots of imaginary roots are zero.
pub trait RootSetView {
    fn dim(&self) -> usize;
    /// The finite list of roots the checks quantify over (contains 0).
    fn window_roots(&self) -> Vec<QVec>;
    /// `Some(coroot)` iff `x` is a root.
    fn coroot_of(&self, x: &[Rational]) -> Option<QVec>;
    /// `None` when `window_roots` is the whole root set.
    fn window(&self) -> Option<i64>;
}

/// s_α(x) = x − ⟨x, α∨⟩α.
pub fn reflect(x: &[Rational], alpha: &[Rational], coroot: &[Rational]) -> QVec {
    let c = qdot(x, coroot);
    if c.is_zero() {
        return x.to_vec();
    }
    x.iter().zip(alpha).map(|(xi, ai)| xi - &c * ai).collect()
}

/// The c with b = c·a, if it exists (a ≠ 0).
fn proportion(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    let i = a.iter().position(|x| !x.is_zero())?;
    let c = &b[i] / &a[i];
    if a.iter().zip(b).all(|(x, y)| &(&c * x) == y) {
        Some(c)
    } else {
        None
    }
}

/// A finite pre-reflection system given by roots and coroots.
#[derive(Clone, Debug)]
pub struct PreReflectionSystem {
    dim: usize,
    roots: Vec<QVec>,
    coroots: Vec<QVec>,
    index: HashMap<QVec, usize>,
}

impl PreReflectionSystem {
    /// Keeps the given order; 0 is prepended (with zero coroot) if absent.
    pub fn new(dim: usize, roots: Vec<QVec>, coroots: Vec<QVec>) -> Result<PreReflectionSystem> {
        if roots.len() != coroots.len() {
            return Err(Error::Dimension("roots and coroots differ in number".into()));
        }
        let mut rs = Vec::with_capacity(roots.len() + 1);
        let mut cs = Vec::with_capacity(roots.len() + 1);
        if !roots.iter().any(|r| is_zero_vec(r)) {
            rs.push(vec![Rational::zero(); dim]);
            cs.push(vec![Rational::zero(); dim]);
        }
        rs.extend(roots);
        cs.extend(coroots);
        let mut index = HashMap::new();
        for (i, (r, c)) in rs.iter().zip(&cs).enumerate() {
            if r.len() != dim || c.len() != dim {
                return Err(Error::Dimension(format!("vector of wrong length in dimension {dim}")));
            }
            if index.insert(r.clone(), i).is_some() {
                return Err(Error::invalid(format!("root {} listed twice", show_qvec(r))));
            }
        }
        Ok(PreReflectionSystem { dim, roots: rs, coroots: cs, index })
    }

    /// The root system in coordinates of a basis of its span; indices agree
    /// with those of `rs`.
    pub fn from_root_system(rs: &RootSystem) -> PreReflectionSystem {
        let (roots, coroots) = rs.span_coordinates();
        let dim = roots.first().map_or(0, Vec::len);
        PreReflectionSystem::new(dim, roots, coroots).expect("root systems have distinct roots")
    }

    pub fn roots(&self) -> &[QVec] {
        &self.roots
    }

    pub fn coroots(&self) -> &[QVec] {
        &self.coroots
    }

    pub fn index_of(&self, x: &[Rational]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_real(&self, i: usize) -> bool {
        !is_zero_vec(&self.coroots[i])
    }

    pub fn to_json(&self) -> Value {
        let show = |v: &QVec| v.iter().map(crate::scalar::rational_to_string).collect::<Vec<_>>();
        json!({
            "dim": self.dim,
            "roots": self.roots.iter().map(show).collect::<Vec<_>>(),
            "coroots": self.coroots.iter().map(show).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<PreReflectionSystem> {
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing \"dim\"".into()))? as usize;
        let roots = parse_qrows(v.get("roots").ok_or_else(|| Error::Parse("missing \"roots\"".into()))?, dim)?;
        let coroots = parse_qrows(v.get("coroots").ok_or_else(|| Error::Parse("missing \"coroots\"".into()))?, dim)?;
        PreReflectionSystem::new(dim, roots, coroots)
    }
}

impl RootSetView for PreReflectionSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn window_roots(&self) -> Vec<QVec> {
        self.roots.clone()
    }

    fn coroot_of(&self, x: &[Rational]) -> Option<QVec> {
        self.index.get(x).map(|&i| self.coroots[i].clone())
    }

    fn window(&self) -> Option<i64> {
        None
    }
}

fn entries<V: RootSetView + ?Sized>(v: &V) -> Vec<(QVec, QVec)> {
    v.window_roots()
        .into_iter()
        .map(|r| {
            let c = v.coroot_of(&r).expect("window roots are roots");
            (r, c)
        })
        .collect()
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, check: impl Fn(T) -> std::result::Result<(), String>) -> std::result::Result<(), String> {
    for it in items {
        check(it)?;
    }
    Ok(())
}

/// Evaluates ReS0–ReS4 over the window; the final entry is the
/// reflection-system verdict.
pub fn validate_axioms<V: RootSetView + ?Sized>(v: &V) -> AxiomReport {
    let w = v.window();
    let dim = v.dim();
    let items = entries(v);
    let real: Vec<usize> = (0..items.len()).filter(|&i| !is_zero_vec(&items[i].1)).collect();
    let mut report = AxiomReport::new("reflection-system axioms");

    let res0 = (|| {
        match v.coroot_of(&vec![Rational::zero(); dim]) {
            None => return Err("0 is not a root".to_string()),
            Some(c) if !is_zero_vec(&c) => return Err("0 has a nonzero coroot".to_string()),
            _ => {}
        }
        let roots: Vec<QVec> = items.iter().map(|(r, _)| r.clone()).collect();
        let r = qrank(&roots);
        if r < dim {
            return Err(format!("roots span a subspace of dimension {r} in dimension {dim}"));
        }
        first_failure(real.iter(), |&i| {
            let (a, c) = &items[i];
            let p = qdot(a, c);
            if is_zero_vec(a) || p == int(2) {
                Ok(())
            } else {
                Err(format!("s_α² ≠ id for α = {} (⟨α,α∨⟩ = {p})", show_qvec(a)))
            }
        })
    })();
    report.record("ReS0", w, res0);

    let res1 = first_failure(real.iter(), |&i| {
        let (a, c) = &items[i];
        if is_zero_vec(a) {
            Err("0 is real".to_string())
        } else if qdot(a, c) != int(2) {
            Err(format!("s_α(α) ≠ −α for α = {}", show_qvec(a)))
        } else {
            Ok(())
        }
    });
    report.record("ReS1", w, res1);

    let res2 = first_failure(real.iter(), |&i| {
        let (a, c) = &items[i];
        first_failure(items.iter(), |(b, bc)| {
            let img = reflect(b, a, c);
            match v.coroot_of(&img) {
                None => Err(format!("s_{}({}) = {} ∉ R", show_qvec(a), show_qvec(b), show_qvec(&img))),
                Some(ic) if is_zero_vec(&ic) != is_zero_vec(bc) => {
                    Err(format!("s_{}({}) changes real/imaginary type", show_qvec(a), show_qvec(b)))
                }
                Some(_) => Ok(()),
            }
        })
    });
    report.record("ReS2", w, res2);

    let res3 = first_failure(real.iter(), |&i| {
        let (a, ac) = &items[i];
        first_failure(real.iter(), |&j| {
            let (b, bc) = &items[j];
            match proportion(a, b) {
                Some(c) if !c.is_one() && &qscale(&c, bc) != ac => {
                    Err(format!("s_{} ≠ s_{} with {} = {}·{}", show_qvec(b), show_qvec(a), show_qvec(b), c, show_qvec(a)))
                }
                _ => Ok(()),
            }
        })
    });
    report.record("ReS3", w, res3);

    let res4 = first_failure(real.iter(), |&i| {
        let (a, ac) = &items[i];
        first_failure(items.iter(), |(b, bc)| {
            let img = reflect(b, a, ac);
            let Some(gc) = v.coroot_of(&img) else {
                return Err(format!("s_{}({}) ∉ R", show_qvec(a), show_qvec(b)));
            };
            // s_α s_β s_α is the reflection with root s_α β and coroot β∨∘s_α.
            let k = qdot(a, bc);
            let expected: QVec = bc.iter().zip(ac).map(|(x, y)| x - &k * y).collect();
            if expected == gc {
                Ok(())
            } else {
                Err(format!("s_α s_β s_α ≠ s_(s_α β) for α = {}, β = {}", show_qvec(a), show_qvec(b)))
            }
        })
    });
    report.record("ReS4", w, res4);

    let failed: Vec<String> = ["ReS0", "ReS1", "ReS2", "ReS3", "ReS4"]
        .iter()
        .filter(|n| !report.passed(n))
        .map(|n| n.to_string())
        .collect();
    let verdict = if failed.is_empty() { Ok(()) } else { Err(format!("{} failed", failed.join(", "))) };
    report.record("reflection system", w, verdict);
    report
}

/// The structural predicates, each decided over the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub reduced: bool,
    pub integral: bool,
    pub nondegenerate: bool,
    pub symmetric: bool,
    pub coherent: bool,
    pub tame: bool,
    pub window: Option<i64>,
}

pub fn predicates<V: RootSetView + ?Sized>(v: &V) -> Predicates {
    let items = entries(v);
    let real: Vec<usize> = (0..items.len()).filter(|&i| !is_zero_vec(&items[i].1)).collect();
    let imag: Vec<usize> = (0..items.len()).filter(|&i| is_zero_vec(&items[i].1)).collect();

    let reduced = real.iter().all(|&i| {
        real.iter().all(|&j| match proportion(&items[i].0, &items[j].0) {
            Some(c) => c.abs().is_one(),
            None => true,
        })
    });
    let integral = real.iter().all(|&i| items.iter().all(|(b, _)| qdot(b, &items[i].1).is_integer()));
    let coroots: Vec<QVec> = items.iter().map(|(_, c)| c.clone()).collect();
    let nondegenerate = qrank(&coroots) == v.dim();
    let symmetric = items.iter().all(|(b, _)| v.coroot_of(&qscale(&int(-1), b)).is_some());
    let coherent = real.iter().all(|&i| {
        real.iter().all(|&j| qdot(&items[i].0, &items[j].1).is_zero() == qdot(&items[j].0, &items[i].1).is_zero())
    });
    let tame = imag.iter().all(|&i| {
        real.iter().any(|&j| v.coroot_of(&qsub(&items[i].0, &items[j].0)).is_some_and(|c| !is_zero_vec(&c)))
    });
    Predicates { reduced, integral, nondegenerate, symmetric, coherent, tame, window: v.window() }
}

/// Statistics of the root strings S(β, α) for real α over the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringStats {
    pub all_unbroken: bool,
    /// p − q = −⟨β, α∨⟩ for every unbroken string.
    pub formula_holds: bool,
    pub max_len: usize,
    pub witness: Option<String>,
}

/// String members are searched in [−8, 8]; strings of reflection systems
/// with bounded pairings lie well inside.
pub fn string_stats<V: RootSetView + ?Sized>(v: &V) -> StringStats {
    let items = entries(v);
    let mut stats = StringStats { all_unbroken: true, formula_holds: true, max_len: 0, witness: None };
    for (a, ac) in items.iter().filter(|(_, c)| !is_zero_vec(c)) {
        for (b, _) in &items {
            let members: Vec<i64> = (-8i64..=8)
                .filter(|&j| {
                    let x: QVec = b.iter().zip(a).map(|(bi, ai)| bi + int(j) * ai).collect();
                    v.coroot_of(&x).is_some()
                })
                .collect();
            let p = *members.iter().max().expect("β is in its own string");
            let q = -*members.iter().min().expect("β is in its own string");
            stats.max_len = stats.max_len.max(members.len());
            let unbroken = members.len() as i64 == p + q + 1;
            if !unbroken {
                stats.all_unbroken = false;
                stats.witness.get_or_insert_with(|| format!("S({}, {}) = {members:?} is broken", show_qvec(b), show_qvec(a)));
            } else if Rational::from_integer((q - p).into()) != qdot(b, ac) {
                stats.formula_holds = false;
                stats.witness.get_or_insert_with(|| format!("p − q ≠ −⟨β,α∨⟩ for β = {}, α = {}", show_qvec(b), show_qvec(a)));
            }
        }
    }
    stats
}

/// Which of the three form conditions a symmetric form satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFlags {
    pub invariant: bool,
    pub strictly_invariant: bool,
    pub affine: bool,
    pub witness: Option<String>,
}

pub fn check_form<V: RootSetView + ?Sized>(v: &V, b: &[QVec]) -> FormFlags {
    let dim = v.dim();
    let none = |w: String| FormFlags { invariant: false, strictly_invariant: false, affine: false, witness: Some(w) };
    if b.len() != dim || b.iter().any(|r| r.len() != dim) {
        return none(format!("form is not {dim}×{dim}"));
    }
    if (0..dim).any(|i| (0..i).any(|j| b[i][j] != b[j][i])) {
        return none("form is not symmetric".into());
    }
    let items = entries(v);
    let mut flags = FormFlags { invariant: true, strictly_invariant: true, affine: true, witness: None };
    for (a, ac) in &items {
        let ba = apply_form(b, a);
        let in_radical = is_zero_vec(&ba);
        if is_zero_vec(ac) {
            if !in_radical {
                flags.strictly_invariant = false;
                flags.affine = false;
                flags.witness.get_or_insert_with(|| format!("imaginary root {} is not in Rad b", show_qvec(a)));
            }
        } else {
            let aa = qdot(a, &ba);
            // 2b(e_i, α) = ⟨e_i, α∨⟩ b(α, α) on the standard basis.
            if (0..dim).any(|i| int(2) * &ba[i] != &ac[i] * &aa) {
                flags.invariant = false;
                flags.witness.get_or_insert_with(|| format!("invariance fails at α = {}", show_qvec(a)));
            }
            if in_radical {
                flags.affine = false;
                flags.witness.get_or_insert_with(|| format!("real root {} lies in Rad b", show_qvec(a)));
            }
        }
    }
    if !flags.invariant {
        flags.strictly_invariant = false;
        flags.affine = false;
    }
    flags
}

/// A family (Λ_ξ)_{ξ∈S} of subsets of ℤⁿ indexed by the roots of a finite
/// root system, together with the subsystem S′.
#[derive(Clone, Debug)]
pub struct ExtensionDatum {
    s: RootSystem,
    sub: BTreeSet<usize>,
    rank: usize,
    family: Vec<LatticeSubset>,
}

impl ExtensionDatum {
    /// `sub` defaults to S_ind = {0} ∪ indivisible roots.
    pub fn new(s: RootSystem, sub: Option<BTreeSet<usize>>, rank: usize, family: Vec<LatticeSubset>) -> Result<ExtensionDatum> {
        if family.len() != s.len() {
            return Err(Error::Dimension(format!("{} sets for {} roots", family.len(), s.len())));
        }
        if family.iter().any(|l| l.dim() != rank) {
            return Err(Error::Dimension(format!("a set is not in ℤ^{rank}")));
        }
        let sub = sub.unwrap_or_else(|| std::iter::once(0).chain(s.indivisible()).collect());
        if sub.iter().any(|&i| i >= s.len()) {
            return Err(Error::invalid("subsystem index out of range"));
        }
        Ok(ExtensionDatum { s, sub, rank, family })
    }

    /// Λ_ξ ≡ L for every ξ.
    pub fn untwisted(s: RootSystem, lattice: LatticeSubset) -> ExtensionDatum {
        let rank = lattice.dim();
        let family = vec![lattice; s.len()];
        ExtensionDatum::new(s, None, rank, family).expect("shapes agree")
    }

    /// Λ_ξ by root length for an irreducible S.
    pub fn by_length(
        s: RootSystem,
        zero: LatticeSubset,
        sh: LatticeSubset,
        lg: Option<LatticeSubset>,
        div: Option<LatticeSubset>,
    ) -> Result<ExtensionDatum> {
        let part = s.length_partition()?;
        let rank = zero.dim();
        let mut family = vec![zero; s.len()];
        for &i in &part.short {
            family[i] = sh.clone();
        }
        if !part.long.is_empty() {
            let lg = lg.ok_or_else(|| Error::invalid("long roots need Λ_lg"))?;
            for &i in &part.long {
                family[i] = lg.clone();
            }
        }
        if !part.divisible.is_empty() {
            let div = div.ok_or_else(|| Error::invalid("divisible roots need Λ_div"))?;
            for &i in &part.divisible {
                family[i] = div.clone();
            }
        }
        ExtensionDatum::new(s, None, rank, family)
    }

    /// Datum of the affine root system R(S, t): Λ_sh = Λ₀ = ℤ, Λ_lg = tℤ,
    /// Λ_div = 1 + 2ℤ.
    pub fn affine(s: RootSystem, tier: i64) -> Result<ExtensionDatum> {
        let z = LatticeSubset::full(1);
        let lg = LatticeSubset::lattice(1, &[vec![tier]]);
        let div = LatticeSubset::new(1, &[vec![2]], &[vec![1]]);
        ExtensionDatum::by_length(s, z.clone(), z, Some(lg), Some(div))
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.s
    }

    pub fn sub(&self) -> &BTreeSet<usize> {
        &self.sub
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lambda(&self, xi: usize) -> &LatticeSubset {
        &self.family[xi]
    }

    pub fn family(&self) -> &[LatticeSubset] {
        &self.family
    }

    pub fn lambda_zero(&self) -> &LatticeSubset {
        &self.family[0]
    }

    pub fn with_lambda_zero(mut self, zero: LatticeSubset) -> ExtensionDatum {
        self.family[0] = zero;
        self
    }

    /// The group generated by Λ_ξ − Λ_ξ over ξ ≠ 0.
    pub fn lambda_diff(&self) -> LatticeSubset {
        let mut gens: Vec<IVec> = Vec::new();
        for l in &self.family[1..] {
            gens.extend(l.lattice_basis().iter().cloned());
            let reps: Vec<&IVec> = l.coset_reps().collect();
            for c in &reps[1.min(reps.len())..] {
                gens.push(crate::lattice::sub(c, reps[0]));
            }
        }
        LatticeSubset::lattice(self.rank, &gens)
    }

    fn pairing(&self, eta: usize, xi: usize) -> i64 {
        rational_to_i64(&self.s.cartan(eta, xi)).expect("root systems are integral")
    }

    fn reflect_index(&self, xi: usize, eta: usize) -> usize {
        self.s.index_of(&self.s.reflect_by(xi, self.s.root(eta))).expect("root systems are closed under reflections")
    }

    pub fn to_json(&self) -> Value {
        let family: serde_json::Map<String, Value> =
            self.family.iter().enumerate().map(|(i, l)| (i.to_string(), l.to_json())).collect();
        json!({
            "S": self.s.to_json(),
            "Z_rank": self.rank,
            "sub": self.sub.iter().collect::<Vec<_>>(),
            "family": family,
        })
    }

    /// Family keys are indices into the listed roots of "S", or the length
    /// classes "zero", "sh", "lg", "div" for an irreducible S. A missing Λ₀
    /// defaults to Λ_diff.
    pub fn from_json(v: &Value) -> Result<ExtensionDatum> {
        let sj = v.get("S").ok_or_else(|| Error::Parse("missing \"S\"".into()))?;
        let s = RootSystem::from_json(sj)?;
        let rank = v
            .get("Z_rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing \"Z_rank\"".into()))? as usize;
        let fam = v
            .get("family")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing \"family\" object".into()))?;
        let listed = parse_qrows(sj.get("roots").expect("checked by RootSystem::from_json"), s.dim())?;
        let position = |key: &str| -> Result<usize> {
            let k: usize = key.parse().map_err(|_| Error::Parse(format!("bad family key {key:?}")))?;
            let root = listed.get(k).ok_or_else(|| Error::Parse(format!("family key {k} out of range")))?;
            Ok(s.index_of(root).expect("listed roots are roots"))
        };
        let sub = match v.get("sub") {
            Some(Value::Array(xs)) => Some(
                xs.iter()
                    .map(|x| {
                        let k = x.as_u64().ok_or_else(|| Error::Parse("bad subsystem index".into()))?;
                        if k == 0 && !listed.iter().any(|r| is_zero_vec(r)) {
                            return Ok(0);
                        }
                        position(&k.to_string())
                    })
                    .collect::<Result<BTreeSet<usize>>>()?,
            ),
            _ => None,
        };
        let by_class = ["zero", "sh", "lg", "div"].iter().any(|k| fam.contains_key(*k));
        if by_class {
            let get = |k: &str| fam.get(k).map(|x| LatticeSubset::from_json(x, rank)).transpose();
            let zero = get("zero")?;
            let placeholder = LatticeSubset::points(rank, &[vec![0; rank]]);
            let sh = get("sh")?.ok_or_else(|| Error::Parse("missing family \"sh\"".into()))?;
            let mut ed = ExtensionDatum::by_length(s, zero.clone().unwrap_or(placeholder), sh, get("lg")?, get("div")?)?;
            if zero.is_none() {
                let diff = ed.lambda_diff();
                ed = ed.with_lambda_zero(diff);
            }
            return match sub {
                Some(sub) => ExtensionDatum::new(ed.s, Some(sub), rank, ed.family),
                None => Ok(ed),
            };
        }
        let mut family: Vec<Option<LatticeSubset>> = vec![None; s.len()];
        for (k, val) in fam {
            family[position(k)?] = Some(LatticeSubset::from_json(val, rank)?);
        }
        let zero_missing = family[0].is_none();
        if zero_missing {
            family[0] = Some(LatticeSubset::points(rank, &[vec![0; rank]]));
        }
        let family = family
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Parse(format!("no set for root {}", show_qvec(s.root(i))))))
            .collect::<Result<Vec<_>>>()?;
        let ed = ExtensionDatum::new(s, sub, rank, family)?;
        if zero_missing {
            let diff = ed.lambda_diff();
            return Ok(ed.with_lambda_zero(diff));
        }
        Ok(ed)
    }
}

fn is_group(l: &LatticeSubset) -> bool {
    l.set_eq(&l.group())
}

/// ED1–ED3, the derived identities and, for irreducible S, the relations
/// between Λ_sh, Λ_lg and Λ_div. Every check is exact.
pub fn validate_extension_datum(ed: &ExtensionDatum) -> AxiomReport {
    let s = &ed.s;
    let n = s.len();
    let lam = |i: usize| &ed.family[i];
    let show = |i: usize| show_qvec(s.root(i));
    let mut report = AxiomReport::new("extension datum");

    let nonempty = first_failure(0..n, |i| if lam(i).is_empty() { Err(format!("Λ_{} is empty", show(i))) } else { Ok(()) });
    report.record("nonempty", None, nonempty);

    let ed1 = first_failure(0..n, |xi| {
        first_failure(0..n, |eta| {
            let k = ed.pairing(eta, xi);
            if k == 0 {
                return Ok(()); // s_ξ η = η and the set is Λ_η itself
            }
            let target = ed.reflect_index(xi, eta);
            if lam(eta).sub_scaled(k, lam(xi)).is_subset_of(lam(target)) {
                Ok(())
            } else {
                Err(format!("Λ_η − {k}Λ_ξ ⊄ Λ_(s_ξ η) for ξ = {}, η = {}", show(xi), show(eta)))
            }
        })
    });
    report.record("ED1", None, ed1);

    let ed2 = first_failure(ed.sub.iter(), |&x| {
        if lam(x).contains(&vec![0; ed.rank]) {
            Ok(())
        } else {
            Err(format!("0 ∉ Λ_ξ′ for ξ′ = {}", show(x)))
        }
    });
    report.record("ED2", None, ed2);

    let mut gens = Vec::new();
    for l in &ed.family {
        gens.extend(l.group().lattice_basis().iter().cloned());
    }
    let span = hnf(&gens, ed.rank).len();
    let ed3 = if span == ed.rank { Ok(()) } else { Err(format!("the sets span a subspace of dimension {span} < {}", ed.rank)) };
    report.record("ED3", None, ed3);

    let real: Vec<usize> = s.nonzero().collect();
    let neg = |i: usize| s.index_of(&qscale(&int(-1), s.root(i))).expect("finite root systems are symmetric");
    let d1 = first_failure(real.iter(), |&x| {
        if lam(neg(x)).set_eq(&lam(x).neg()) {
            Ok(())
        } else {
            Err(format!("Λ_(−ξ) ≠ −Λ_ξ for ξ = {}", show(x)))
        }
    });
    report.record("Λ_(−ξ) = −Λ_ξ", None, d1);

    let d2 = first_failure(real.iter(), |&x| {
        if lam(x).scale(2).sub(lam(x)).is_subset_of(lam(x)) {
            Ok(())
        } else {
            Err(format!("2Λ_ξ − Λ_ξ ⊄ Λ_ξ for ξ = {}", show(x)))
        }
    });
    report.record("2Λ_ξ − Λ_ξ ⊆ Λ_ξ", None, d2);

    let sub_real: Vec<usize> = ed.sub.iter().copied().filter(|&x| x != 0).collect();
    let d3 = first_failure(sub_real.iter(), |&x| {
        first_failure(0..n, |eta| {
            if lam(eta).set_eq(lam(ed.reflect_index(x, eta))) {
                Ok(())
            } else {
                Err(format!("Λ_η ≠ Λ_(s_ξ′ η) for ξ′ = {}, η = {}", show(x), show(eta)))
            }
        })
    });
    report.record("W_S′-invariance", None, d3);

    let d4 = first_failure(sub_real.iter(), |&x| {
        first_failure(0..n, |eta| {
            let k = ed.pairing(eta, x);
            if lam(eta).sub_scaled(k, lam(x)).is_subset_of(lam(eta)) {
                Ok(())
            } else {
                Err(format!("Λ_η − {k}Λ_ξ′ ⊄ Λ_η for ξ′ = {}, η = {}", show(x), show(eta)))
            }
        })
    });
    report.record("Λ_η − ⟨η,ξ′∨⟩Λ_ξ′ ⊆ Λ_η", None, d4);

    let d5 = first_failure(ed.sub.iter(), |&x| {
        if lam(x).set_eq(lam(neg(x))) {
            Ok(())
        } else {
            Err(format!("Λ_ξ′ ≠ Λ_(−ξ′) for ξ′ = {}", show(x)))
        }
    });
    report.record("Λ_ξ′ = Λ_(−ξ′)", None, d5);

    let pointed = first_failure(sub_real.iter(), |&x| {
        let a = lam(x);
        if a.contains(&vec![0; ed.rank]) && a.sub(&a.scale(2)).is_subset_of(a) {
            Ok(())
        } else {
            Err(format!("Λ_ξ′ is not a pointed reflection subspace for ξ′ = {}", show(x)))
        }
    });
    report.record("pointed reflection subspaces", None, pointed);

    if s.is_irreducible() && !s.is_empty() {
        if let Ok(part) = s.length_partition() {
            type_relations(ed, &part, &mut report);
        }
    }
    report
}

fn type_relations(ed: &ExtensionDatum, part: &crate::roots::LengthPartition, report: &mut AxiomReport) {
    let s = &ed.s;
    let classes = [("sh", &part.short), ("lg", &part.long), ("div", &part.divisible)];
    let constant = first_failure(classes.iter(), |(name, idx)| {
        first_failure(idx.iter(), |&i| {
            if ed.family[i].set_eq(&ed.family[idx[0]]) {
                Ok(())
            } else {
                Err(format!("Λ differs within the {name} class at {}", show_qvec(s.root(i))))
            }
        })
    });
    report.record("constant on length classes", None, constant);

    let sh = part.short.first().map(|&i| &ed.family[i]);
    let lg = part.long.first().map(|&i| &ed.family[i]);
    let div = part.divisible.first().map(|&i| &ed.family[i]);
    let k = part.k.unwrap_or(1);
    let rank = s.rank();
    let incl = |a: LatticeSubset, b: &LatticeSubset, what: &str| -> std::result::Result<(), String> {
        if a.is_subset_of(b) {
            Ok(())
        } else {
            Err(format!("{what} fails"))
        }
    };
    if let (Some(sh), Some(lg)) = (sh, lg) {
        report.record("Λ_sh + Λ_lg ⊆ Λ_sh", None, incl(sh.add(lg), sh, "Λ_sh + Λ_lg ⊆ Λ_sh"));
        report.record("Λ_lg + kΛ_sh ⊆ Λ_lg", None, incl(lg.add(&sh.scale(k)), lg, "Λ_lg + kΛ_sh ⊆ Λ_lg"));
    }
    if let (Some(sh), Some(div)) = (sh, div) {
        report.record("Λ_sh + Λ_div ⊆ Λ_sh", None, incl(sh.add(div), sh, "Λ_sh + Λ_div ⊆ Λ_sh"));
        report.record("Λ_div + 4Λ_sh ⊆ Λ_div", None, incl(div.add(&sh.scale(4)), div, "Λ_div + 4Λ_sh ⊆ Λ_div"));
    }
    if let (Some(lg), Some(div)) = (lg, div) {
        if rank >= 2 {
            report.record("Λ_lg + Λ_div ⊆ Λ_lg", None, incl(lg.add(div), lg, "Λ_lg + Λ_div ⊆ Λ_lg"));
            report.record("Λ_div + 2Λ_lg ⊆ Λ_div", None, incl(div.add(&lg.scale(2)), div, "Λ_div + 2Λ_lg ⊆ Λ_div"));
        }
    }
    // A class containing an A2 subsystem forces a subgroup.
    let has_a2 = |idx: &[usize]| {
        let set: HashSet<usize> = idx.iter().copied().collect();
        idx.iter().any(|&a| idx.iter().any(|&b| s.index_of(&crate::roots::qadd(s.root(a), s.root(b))).is_some_and(|c| set.contains(&c))))
    };
    if let Some(sh) = sh {
        if has_a2(&part.short) {
            report.record("Λ_sh is a subgroup", None, if is_group(sh) { Ok(()) } else { Err("Λ_sh is not a group".into()) });
        }
    }
    if let Some(lg) = lg {
        if has_a2(&part.long) {
            report.record("Λ_lg is a subgroup", None, if is_group(lg) { Ok(()) } else { Err("Λ_lg is not a group".into()) });
        }
    }
}

/// The pre-reflection system ⋃ ξ ⊕ Λ_ξ in Y ⊕ ℤⁿ, with S written in
/// coordinates of a basis of its span. Membership is exact; the window
/// bounds enumeration only.
#[derive(Clone, Debug)]
pub struct AffineReflectionSystem {
    datum: ExtensionDatum,
    quotient: PreReflectionSystem,
    window: i64,
}

/// 4·max |⟨β, α∨⟩| over S.
pub fn default_window(s: &RootSystem) -> i64 {
    let mut m = 0;
    for a in s.nonzero() {
        for b in s.nonzero() {
            m = m.max(rational_to_i64(&s.cartan(b, a).abs()).unwrap_or(0));
        }
    }
    4 * m.max(1)
}

impl AffineReflectionSystem {
    pub fn datum(&self) -> &ExtensionDatum {
        &self.datum
    }

    pub fn quotient(&self) -> &PreReflectionSystem {
        &self.quotient
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.datum.s
    }

    pub fn y_dim(&self) -> usize {
        self.quotient.dim
    }

    pub fn z_rank(&self) -> usize {
        self.datum.rank
    }

    pub fn window_radius(&self) -> i64 {
        self.window
    }

    pub fn with_window(mut self, window: i64) -> AffineReflectionSystem {
        self.window = window;
        self
    }

    /// The vector ξ ⊕ λ for the root of S with index `xi`.
    pub fn vector(&self, xi: usize, lambda: &[i64]) -> QVec {
        let mut v = self.quotient.roots[xi].clone();
        v.extend(lambda.iter().map(|&x| int(x)));
        v
    }

    /// (ξ index, λ) for a vector of Y ⊕ ℤⁿ if it is a root.
    pub fn decompose(&self, x: &[Rational]) -> Option<(usize, IVec)> {
        let d = self.y_dim();
        if x.len() != d + self.z_rank() {
            return None;
        }
        let xi = self.quotient.index_of(&x[..d])?;
        let lambda: Option<IVec> = x[d..].iter().map(|c| if c.is_integer() { rational_to_i64(c) } else { None }).collect();
        let lambda = lambda?;
        self.datum.family[xi].contains(&lambda).then_some((xi, lambda))
    }

    /// The normalized form of S on Y, extended by zero on ℤⁿ.
    pub fn affine_form(&self) -> Result<Vec<QVec>> {
        let nf = self.datum.s.normalized_form()?;
        let gram = self.datum.s.span_gram(&nf);
        let d = self.y_dim() + self.z_rank();
        let mut out = vec![vec![Rational::zero(); d]; d];
        for (i, row) in gram.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out[i][j] = x.clone();
            }
        }
        Ok(out)
    }
}

impl RootSetView for AffineReflectionSystem {
    fn dim(&self) -> usize {
        self.y_dim() + self.z_rank()
    }

    fn window_roots(&self) -> Vec<QVec> {
        let mut out = Vec::new();
        for (xi, l) in self.datum.family.iter().enumerate() {
            for lambda in l.enumerate(self.window) {
                out.push(self.vector(xi, &lambda));
            }
        }
        out
    }

    fn coroot_of(&self, x: &[Rational]) -> Option<QVec> {
        let (xi, _) = self.decompose(x)?;
        let mut c = self.quotient.coroots[xi].clone();
        c.extend(std::iter::repeat_with(Rational::zero).take(self.z_rank()));
        Some(c)
    }

    fn window(&self) -> Option<i64> {
        Some(self.window)
    }
}

/// Builds ⋃ ξ ⊕ Λ_ξ after validating the datum.
pub fn build_extension(ed: ExtensionDatum, window: Option<i64>) -> Result<AffineReflectionSystem> {
    let report = validate_extension_datum(&ed);
    let core = ["nonempty", "ED1", "ED2", "ED3"];
    if let Some(bad) = report.failures().find(|e| core.contains(&e.name.as_str())) {
        return Err(Error::axiom(bad.name.clone(), bad.witness.clone().unwrap_or_default()));
    }
    let quotient = PreReflectionSystem::from_root_system(&ed.s);
    let window = window.unwrap_or_else(|| default_window(&ed.s));
    Ok(AffineReflectionSystem { datum: ed, quotient, window })
}

/// Datum relative to the partial section g(ξ) = ξ ⊕ φ(ξ), φ linear on the
/// coordinates of S: Λ′_ξ = Λ_ξ − φ(ξ). `phi` has one row per ℤ-coordinate.
pub fn extract_datum(ars: &AffineReflectionSystem, phi: Option<&[QVec]>) -> Result<ExtensionDatum> {
    let ed = &ars.datum;
    let Some(phi) = phi else {
        return Ok(ed.clone());
    };
    if phi.len() != ed.rank || phi.iter().any(|r| r.len() != ed.s.dim()) {
        return Err(Error::Dimension(format!("section must be {}×{}", ed.rank, ed.s.dim())));
    }
    let mut family = Vec::with_capacity(ed.s.len());
    for xi in 0..ed.s.len() {
        let val: Option<IVec> = phi
            .iter()
            .map(|row| {
                let x = qdot(row, ed.s.root(xi));
                if x.is_integer() {
                    rational_to_i64(&x)
                } else {
                    None
                }
            })
            .collect();
        let val = val.ok_or_else(|| Error::invalid(format!("φ({}) is not integral", show_qvec(ed.s.root(xi)))))?;
        if ed.sub.contains(&xi) && !ed.family[xi].contains(&val) {
            return Err(Error::invalid(format!(
                "not a partial section: φ(ξ′) ∉ Λ_ξ′ for ξ′ = {}",
                show_qvec(ed.s.root(xi))
            )));
        }
        family.push(ed.family[xi].shift(&crate::lattice::scale(-1, &val)));
    }
    ExtensionDatum::new(ed.s.clone(), Some(ed.sub.clone()), ed.rank, family)
}

/// Result of dividing a root set by the radical of an affine form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub root_system: RootSystem,
    /// Rows of the map X → X/Rad b in coordinates.
    pub projection: Vec<QVec>,
    pub radical: Vec<QVec>,
}

pub fn quotient_by_affine_form<V: RootSetView + ?Sized>(v: &V, b: &[QVec]) -> Result<Quotient> {
    let flags = check_form(v, b);
    if !flags.affine {
        return Err(Error::invalid(format!("form is not affine: {}", flags.witness.unwrap_or_default())));
    }
    if !predicates(v).integral {
        return Err(Error::invalid("root set is not integral"));
    }
    let bm = Matrix::from_rational_rows(b);
    let (red, pivots) = bm.rref();
    let to_q = |row: &[crate::scalar::Scalar]| -> QVec { row.iter().map(|x| x.as_rational().expect("rational").clone()).collect() };
    let projection: Vec<QVec> = (0..pivots.len()).map(|r| to_q(red.row(r))).collect();
    let radical: Vec<QVec> = bm.kernel().iter().map(|k| to_q(k)).collect();
    // e_{pivot_j} maps to the j-th unit vector, which fixes preimages.
    let qform: Vec<QVec> = pivots.iter().map(|&i| pivots.iter().map(|&j| b[i][j].clone()).collect()).collect();
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    let mut seen = HashSet::new();
    for (r, c) in entries(v) {
        let img: QVec = projection.iter().map(|p| qdot(p, &r)).collect();
        if seen.insert(img.clone()) {
            coroots.push(pivots.iter().map(|&p| c[p].clone()).collect());
            roots.push(img);
        }
    }
    let root_system = RootSystem::with_coroots(qform, roots, coroots)?;
    root_system.validate()?;
    Ok(Quotient { root_system, projection, radical })
}

/// Moody–Pianzola and Kac labels of R(S, t).
pub fn affine_labels(c: Component, tier: i64) -> Result<(String, String)> {
    let l = c.rank;
    let bad = || Error::invalid(format!("tier {tier} is not allowed for {c}"));
    let simply_laced = matches!(c.family, Family::A | Family::D | Family::E6 | Family::E7 | Family::E8);
    let labels = match (c.family, tier) {
        (Family::BC, 1 | 2) if l == 1 => ("BC1^(2)".to_string(), "A2^(2)".to_string()),
        (Family::BC, 1) => (format!("BC{l}^(2)"), format!("A{}^(2)", 2 * l)),
        (Family::BC, _) => return Err(bad()),
        (_, 1) => (format!("{c}^(1)"), format!("{c}^(1)")),
        _ if simply_laced => return Err(bad()),
        (Family::B, 2) if l >= 2 => (format!("B{l}^(2)"), format!("D{}^(2)", l + 1)),
        (Family::C, 2) if l >= 3 => (format!("C{l}^(2)"), format!("A{}^(2)", 2 * l - 1)),
        (Family::F4, 2) => ("F4^(2)".to_string(), "E6^(2)".to_string()),
        (Family::G2, 3) => ("G2^(3)".to_string(), "D4^(3)".to_string()),
        _ => return Err(bad()),
    };
    Ok(labels)
}

/// An affine root system R(S, t) with both labels.
#[derive(Clone, Debug)]
pub struct AffineRootSystem {
    pub ars: AffineReflectionSystem,
    pub component: Component,
    pub tier: i64,
    pub mp_label: String,
    pub kac_label: String,
}

pub fn build_affine_rs(s: &RootSystem, tier: i64, window: Option<i64>) -> Result<AffineRootSystem> {
    let label = s.classify()?;
    let component = label.single().ok_or_else(|| Error::invalid(format!("{label} is not irreducible")))?;
    let (mp_label, kac_label) = affine_labels(component, tier)?;
    let ed = ExtensionDatum::affine(s.clone(), tier)?;
    let ars = build_extension(ed, window)?;
    Ok(AffineRootSystem { ars, component, tier, mp_label, kac_label })
}

/// One row of the table of affine root systems R(S, t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTableRow {
    pub s: &'static str,
    pub tier: &'static str,
    pub mp: &'static str,
    pub kac: &'static str,
}

pub fn affine_table() -> Vec<AffineTableRow> {
    let row = |s, tier, mp, kac| AffineTableRow { s, tier, mp, kac };
    vec![
        row("reduced", "1", "S^(1)", "S^(1)"),
        row("B_l (l >= 2)", "2", "B_l^(2)", "D_{l+1}^(2)"),
        row("C_l (l >= 3)", "2", "C_l^(2)", "A_{2l-1}^(2)"),
        row("F4", "2", "F4^(2)", "E6^(2)"),
        row("G2", "3", "G2^(3)", "D4^(3)"),
        row("BC_1", "-", "BC_1^(2)", "A_2^(2)"),
        row("BC_l (l >= 2)", "1", "BC_l^(2)", "A_{2l}^(2)"),
    ]
}

pub fn render_affine_table() -> String {
    let rows = affine_table();
    let header = AffineTableRow { s: "S", tier: "t(S)", mp: "label (MP)", kac: "label (Kac)" };
    let all: Vec<&AffineTableRow> = std::iter::once(&header).chain(rows.iter()).collect();
    let w0 = all.iter().map(|r| r.s.chars().count()).max().unwrap_or(0);
    let w1 = all.iter().map(|r| r.tier.chars().count()).max().unwrap_or(0);
    let w2 = all.iter().map(|r| r.mp.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for r in all {
        let line = format!("{:<w0$}  {:<w1$}  {:<w2$}  {}", r.s, r.tier, r.mp, r.kac);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// EARS / SEARS / LEARS / GRRS membership. Finite rank and discreteness hold
/// automatically because every Λ_ξ lies in ℤⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFlags {
    pub ears: bool,
    pub sears: bool,
    pub lears: bool,
    pub grrs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArsStructure {
    pub nullity: usize,
    pub symmetric: bool,
    pub unbroken: bool,
    pub tame: bool,
    pub reduced: bool,
    pub connected: bool,
    /// R = Re(R), i.e. Λ₀ = {0}.
    pub real_only: bool,
    pub max_string_len: usize,
    /// Root strings computed directly, for comparison with `unbroken`.
    pub strings_unbroken: bool,
    /// `None` when strings were checked on all residue classes (exact).
    pub string_window: Option<i64>,
    pub flags: ClassFlags,
    pub notes: Vec<String>,
}

/// Points of `l` reduced into [0, d)ⁿ.
fn residues(l: &LatticeSubset, d: i64) -> Vec<IVec> {
    let md = |v: IVec| -> IVec { v.into_iter().map(|x| x.rem_euclid(d)).collect() };
    let mut seen: BTreeSet<IVec> = BTreeSet::new();
    let mut queue: VecDeque<IVec> = l.coset_reps().cloned().map(md).collect();
    for q in &queue {
        seen.insert(q.clone());
    }
    while let Some(x) = queue.pop_front() {
        for g in l.lattice_basis() {
            let y = md(crate::lattice::add(&x, g));
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn ars_structure(ars: &AffineReflectionSystem) -> ArsStructure {
    let ed = &ars.datum;
    let s = &ed.s;
    let n = ed.rank;
    let zero = ed.lambda_zero();
    let diff = ed.lambda_diff();
    let nullity = zero.rank();
    let symmetric = zero.set_eq(&zero.neg());
    let unbroken = diff.is_subset_of(zero);
    let tame = zero.is_subset_of(&diff);
    let connected = s.is_irreducible();
    let real_only = zero.set_eq(&LatticeSubset::points(n, &[vec![0; n]]));
    let reduced = s.nonzero().all(|x| {
        [2i64, -2].iter().all(|&c| match s.index_of(&qscale(&int(c), s.root(x))) {
            Some(y) => ed.family[y].is_disjoint(&ed.family[x].scale(c)),
            None => true,
        })
    });

    // Strings depend on λ, μ only modulo a common full-rank sublattice dℤⁿ.
    let indices: Option<Vec<u128>> = ed.family.iter().map(|l| lattice_index(l.lattice_basis(), n)).collect();
    let modulus = indices.map(|ix| ix.into_iter().fold(1u128, num_integer::lcm));
    let mut notes = vec!["discreteness holds automatically: all Λ_ξ lie in ℤⁿ".to_string()];
    let (sets, string_window): (Vec<Vec<IVec>>, Option<i64>) = match modulus {
        Some(d) if d <= 64 && d.checked_pow(n as u32).is_some_and(|size| size <= 4096) => {
            (ed.family.iter().map(|l| residues(l, d as i64)).collect(), None)
        }
        _ => {
            notes.push(format!("root strings checked on the window {}", ars.window));
            (ed.family.iter().map(|l| l.enumerate(ars.window)).collect(), Some(ars.window))
        }
    };
    let mut max_len = 0;
    let mut strings_unbroken = true;
    for xi in s.nonzero() {
        for eta in 0..s.len() {
            for lambda in &sets[xi] {
                for mu in &sets[eta] {
                    let members: Vec<i64> = (-4i64..=4)
                        .filter(|&j| {
                            let y: QVec = s.root(eta).iter().zip(s.root(xi)).map(|(a, b)| a + int(j) * b).collect();
                            let Some(k) = s.index_of(&y) else { return false };
                            let z: IVec = mu.iter().zip(lambda).map(|(m, l)| m + j * l).collect();
                            ed.family[k].contains(&z)
                        })
                        .collect();
                    max_len = max_len.max(members.len());
                    let lo = *members.iter().min().expect("β lies in its string");
                    let hi = *members.iter().max().expect("β lies in its string");
                    if members.len() as i64 != hi - lo + 1 {
                        strings_unbroken = false;
                    }
                }
            }
        }
    }
    let flags = ClassFlags {
        ears: connected && symmetric && reduced && tame && unbroken,
        sears: connected && symmetric && real_only,
        lears: connected && symmetric && real_only,
        grrs: symmetric && reduced && unbroken,
    };
    ArsStructure {
        nullity,
        symmetric,
        unbroken,
        tame,
        reduced,
        connected,
        real_only,
        max_string_len: max_len,
        strings_unbroken,
        string_window,
        flags,
        notes,
    }
}

impl ArsStructure {
    pub fn to_json(&self) -> Value {
        json!({
            "nullity": self.nullity,
            "symmetric": self.symmetric,
            "unbroken": self.unbroken,
            "tame": self.tame,
            "reduced": self.reduced,
            "connected": self.connected,
            "real_only": self.real_only,
            "max_string_len": self.max_string_len,
            "strings_unbroken": self.strings_unbroken,
            "string_window": self.string_window,
            "class_flags": {"EARS": self.flags.ears, "SEARS": self.flags.sears, "LEARS": self.flags.lears, "GRRS": self.flags.grrs},
            "notes": self.notes,
        })
    }
}

/// Groups window roots by their image in S (test and CLI helper).
pub fn fibers(ars: &AffineReflectionSystem) -> BTreeMap<usize, Vec<IVec>> {
    let mut out: BTreeMap<usize, Vec<IVec>> = BTreeMap::new();
    for r in ars.window_roots() {
        let (xi, lambda) = ars.decompose(&r).expect("window roots are roots");
        out.entry(xi).or_default().push(lambda);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build_classical, build_exceptional, qvec};

    fn z1() -> LatticeSubset {
        LatticeSubset::full(1)
    }

    #[test]
    fn finite_root_systems_are_reflection_systems() {
        for (f, n) in [(Family::A, 3), (Family::BC, 2), (Family::D, 4)] {
            let prs = PreReflectionSystem::from_root_system(&build_classical(f, n).unwrap());
            let r = validate_axioms(&prs);
            assert!(r.all_pass(), "{f:?}{n}: {r}");
        }
        let prs = PreReflectionSystem::from_root_system(&build_exceptional(Family::G2).unwrap());
        assert!(validate_axioms(&prs).all_pass());
    }

    #[test]
    fn res2_counterexample() {
        // α = e1 reflects e2 + e1 to e2 − e1, which is missing.
        let roots = vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[1, 1])];
        let coroots = vec![qvec(&[2, 0]), qvec(&[-2, 0]), qvec(&[0, 0])];
        let prs = PreReflectionSystem::new(2, roots, coroots).unwrap();
        let r = validate_axioms(&prs);
        assert!(!r.passed("ReS2"));
        assert!(r.get("ReS2").unwrap().witness.is_some());
    }

    #[test]
    fn res3_counterexample() {
        // 2e1 has coroot (1, 1) instead of (1, 0): same line, different mirror.
        let roots = vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[2, 0]), qvec(&[-2, 0]), qvec(&[0, 1])];
        let coroots = vec![qvec(&[2, 0]), qvec(&[-2, 0]), qvec(&[1, 1]), qvec(&[-1, -1]), qvec(&[0, 0])];
        let prs = PreReflectionSystem::new(2, roots, coroots).unwrap();
        let r = validate_axioms(&prs);
        assert!(r.passed("ReS1"));
        assert!(!r.passed("ReS3"));
    }

    #[test]
    fn predicate_flags() {
        let bc2 = PreReflectionSystem::from_root_system(&build_classical(Family::BC, 2).unwrap());
        let p = predicates(&bc2);
        assert!(!p.reduced && p.integral && p.nondegenerate && p.coherent && p.symmetric);
        // isolated imaginary root δ = e2 with A1 on e1
        let roots = vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, 1])];
        let coroots = vec![qvec(&[2, 0]), qvec(&[-2, 0]), qvec(&[0, 0])];
        let prs = PreReflectionSystem::new(2, roots, coroots).unwrap();
        assert!(!predicates(&prs).tame);
    }

    #[test]
    fn forms() {
        let rs = build_classical(Family::B, 2).unwrap();
        let prs = PreReflectionSystem::from_root_system(&rs);
        let f = check_form(&prs, &rs.span_gram(&rs.normalized_form().unwrap()));
        assert!(f.invariant && f.strictly_invariant && f.affine);
        let a = build_affine_rs(&build_classical(Family::A, 2).unwrap(), 1, Some(2)).unwrap();
        let b = a.ars.affine_form().unwrap();
        assert!(check_form(&a.ars, &b).affine);
        let mut bad = b.clone();
        let last = bad.len() - 1;
        bad[last][last] = int(1);
        let f = check_form(&a.ars, &bad);
        assert!(!f.strictly_invariant && !f.affine);
    }

    #[test]
    fn datum_validation() {
        let a1 = build_classical(Family::A, 1).unwrap();
        let ed = ExtensionDatum::untwisted(a1.clone(), z1());
        assert!(validate_extension_datum(&ed).all_pass());
        let b2 = build_classical(Family::B, 2).unwrap();
        assert!(validate_extension_datum(&ExtensionDatum::affine(b2.clone(), 2).unwrap()).all_pass());
        let odd = LatticeSubset::new(1, &[vec![2]], &[vec![1]]);
        let ed = ExtensionDatum::by_length(b2, z1(), z1(), Some(odd), None).unwrap();
        let r = validate_extension_datum(&ed);
        assert!(!r.passed("ED2"));
    }

    #[test]
    fn labels_and_table() {
        let b3 = build_classical(Family::B, 3).unwrap();
        let a = build_affine_rs(&b3, 2, Some(2)).unwrap();
        assert_eq!((a.mp_label.as_str(), a.kac_label.as_str()), ("B3^(2)", "D4^(2)"));
        let g2 = build_affine_rs(&build_exceptional(Family::G2).unwrap(), 3, Some(2)).unwrap();
        assert_eq!((g2.mp_label.as_str(), g2.kac_label.as_str()), ("G2^(3)", "D4^(3)"));
        let bc1 = build_affine_rs(&build_classical(Family::BC, 1).unwrap(), 1, Some(2)).unwrap();
        assert_eq!((bc1.mp_label.as_str(), bc1.kac_label.as_str()), ("BC1^(2)", "A2^(2)"));
        assert!(build_affine_rs(&build_classical(Family::A, 2).unwrap(), 2, None).is_err());
        assert!(build_affine_rs(&build_classical(Family::BC, 2).unwrap(), 2, None).is_err());
        assert_eq!(render_affine_table().lines().count(), 8);
    }

    #[test]
    fn quotient_recovers_s() {
        let a = build_affine_rs(&build_classical(Family::A, 2).unwrap(), 1, Some(2)).unwrap();
        let q = quotient_by_affine_form(&a.ars, &a.ars.affine_form().unwrap()).unwrap();
        assert_eq!(q.root_system.classify().unwrap().to_string(), "A2");
        assert_eq!(q.radical.len(), 1);
        let g = build_affine_rs(&build_exceptional(Family::G2).unwrap(), 3, Some(3)).unwrap();
        let q = quotient_by_affine_form(&g.ars, &g.ars.affine_form().unwrap()).unwrap();
        assert_eq!(q.root_system.classify().unwrap().to_string(), "G2");
    }

    #[test]
    fn extraction_shifts() {
        let b2 = build_classical(Family::B, 2).unwrap();
        let a = build_affine_rs(&b2, 2, Some(4)).unwrap();
        let same = extract_datum(&a.ars, None).unwrap();
        assert!(same.family().iter().zip(a.ars.datum().family()).all(|(x, y)| x.set_eq(y)));
        // φ(ε1) = 2, φ(ε2) = 0 takes values in Λ_ξ′ on S_ind.
        let phi = vec![vec![int(2), int(0)]];
        let shifted = extract_datum(&a.ars, Some(&phi)).unwrap();
        let e1 = b2.index_of(&qvec(&[1, 0])).unwrap();
        assert!(shifted.lambda(e1).set_eq(&a.ars.datum().lambda(e1).shift(&[-2])));
        let bad = vec![vec![int(1), int(0)]];
        assert!(extract_datum(&a.ars, Some(&bad)).is_err());
    }

    #[test]
    fn structure_of_affine_systems() {
        let a = build_affine_rs(&build_classical(Family::A, 2).unwrap(), 1, Some(3)).unwrap();
        let st = ars_structure(&a.ars);
        assert_eq!(st.nullity, 1);
        assert!(st.flags.ears && st.tame && st.unbroken && st.strings_unbroken);
        assert!(st.max_string_len <= 5 && st.string_window.is_none());
        let g = build_affine_rs(&build_exceptional(Family::G2).unwrap(), 3, None).unwrap();
        let st = ars_structure(&g.ars);
        assert!(st.flags.ears && st.max_string_len == 4);
        let finite = build_extension(
            ExtensionDatum::untwisted(build_classical(Family::A, 2).unwrap(), LatticeSubset::points(1, &[vec![0]])),
            Some(2),
        );
        // the single point {0} spans nothing, so ED3 fails in ℤ¹
        assert!(finite.is_err());
    }

    #[test]
    fn extension_is_reflection_system() {
        let a = build_affine_rs(&build_classical(Family::BC, 1).unwrap(), 1, Some(3)).unwrap();
        let r = validate_axioms(&a.ars);
        assert!(r.all_pass(), "{r}");
        let p = predicates(&a.ars);
        assert!(p.reduced && p.symmetric && p.coherent && p.integral);
    }
}
