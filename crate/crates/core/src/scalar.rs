//! Exact scalars: the rationals and cyclotomic fields ℚ(ζ_N).
//!
//! Cyclotomic elements are stored in the power basis of ℚ[x]/Φ_N(x) and are
//! reduced eagerly, so structural equality is field equality.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Converts an integral rational to `i64`, if it is one and fits.
pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

/// A field instance: ℚ or ℚ(ζ_N) with N ≥ 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Cyclotomic(u32),
}

impl Field {
    /// ℚ(ζ_N); N ∈ {1, 2} gives ℚ.
    pub fn cyclotomic(n: u32) -> Field {
        assert!(n >= 1, "cyclotomic order must be positive");
        if n <= 2 {
            Field::Rationals
        } else {
            Field::Cyclotomic(n)
        }
    }

    /// The order N of the adjoined root of unity (1 for ℚ).
    pub fn order(&self) -> u32 {
        match self {
            Field::Rationals => 1,
            Field::Cyclotomic(n) => *n,
        }
    }

    /// Degree over ℚ, i.e. φ(N).
    pub fn degree(&self) -> usize {
        euler_phi(self.order()) as usize
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rationals => "Q".to_string(),
            Field::Cyclotomic(n) => format!("Q(zeta_{n})"),
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rationals);
        }
        let inner = s
            .strip_prefix("Q(zeta_")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown field {s:?}")))?;
        let n: u32 = inner.parse().map_err(|_| Error::Parse(format!("bad order in {s:?}")))?;
        if n == 0 {
            return Err(Error::Parse("cyclotomic order must be positive".into()));
        }
        Ok(Field::cyclotomic(n))
    }

    pub fn zero(&self) -> Scalar {
        Scalar { field: *self, coeffs: vec![Rational::zero(); self.degree()] }
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(Rational::one())
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_rational(int(n))
    }

    pub fn from_rational(&self, r: Rational) -> Scalar {
        let mut s = self.zero();
        s.coeffs[0] = r;
        s
    }

    /// ζ_N^k.
    pub fn zeta_pow(&self, k: i64) -> Scalar {
        let n = self.order() as i64;
        let e = k.rem_euclid(n) as usize;
        if n <= 2 {
            return self.from_i64(if n == 2 && e == 1 { -1 } else { 1 });
        }
        let table = reduction_table(self.order());
        let coeffs = table.powers[e].iter().map(|&c| int(c)).collect();
        Scalar { field: *self, coeffs }
    }

    /// The smallest field ℚ(ζ_lcm) containing both.
    pub fn join(&self, other: &Field) -> Field {
        Field::cyclotomic(self.order().lcm(&other.order()))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn euler_phi(n: u32) -> u32 {
    let mut m = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // Both monic with constant-first ordering.
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Coefficients of Φ_N, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

struct ReductionTable {
    /// powers[k] = x^k mod Φ_N for 0 ≤ k < max(N, 2φ − 1).
    powers: Vec<Vec<i64>>,
}

thread_local! {
    static TABLES: RefCell<HashMap<u32, Rc<ReductionTable>>> = RefCell::new(HashMap::new());
}

fn reduction_table(n: u32) -> Rc<ReductionTable> {
    TABLES.with(|t| {
        t.borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let phi_poly = cyclotomic_polynomial(n);
                let deg = phi_poly.len() - 1;
                let count = (n as usize).max(2 * deg);
                let mut powers = Vec::with_capacity(count);
                let mut cur = vec![0i64; deg];
                cur[0] = 1;
                for _ in 0..count {
                    powers.push(cur.clone());
                    // multiply by x and reduce
                    let top = cur[deg - 1];
                    let mut next = vec![0i64; deg];
                    next[1..deg].copy_from_slice(&cur[..(deg - 1)]);
                    for i in 0..deg {
                        next[i] -= top * phi_poly[i];
                    }
                    cur = next;
                }
                Rc::new(ReductionTable { powers })
            })
            .clone()
    })
}

/// An element of ℚ or ℚ(ζ_N), in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: Field,
    coeffs: Vec<Rational>,
}

impl Scalar {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn from_coeffs(field: Field, coeffs: Vec<Rational>) -> Result<Scalar> {
        if coeffs.len() != field.degree() {
            return Err(Error::Dimension(format!(
                "{} needs {} coefficients, got {}",
                field,
                field.degree(),
                coeffs.len()
            )));
        }
        Ok(Scalar { field, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it lies in ℚ.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_rational().and_then(rational_to_i64)
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.name(), other.field.name()))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Scalar { field: self.field, coeffs })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Scalar { field: self.field, coeffs })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let d = self.coeffs.len();
        if d == 1 {
            return Ok(Scalar { field: self.field, coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] });
        }
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let table = reduction_table(self.field.order());
        let mut coeffs = prod[..d].to_vec();
        for (k, c) in prod.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (i, &t) in table.powers[k].iter().enumerate() {
                if t != 0 {
                    coeffs[i] += c * int(t);
                }
            }
        }
        Ok(Scalar { field: self.field, coeffs })
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        Scalar { field: self.field, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.coeffs.len();
        if d == 1 {
            return Ok(Scalar { field: self.field, coeffs: vec![self.coeffs[0].recip()] });
        }
        // Column k of the multiplication matrix is self · x^k.
        let basis: Vec<Scalar> = (0..d).map(|k| self.field.zeta_pow(k as i64)).collect();
        let cols: Vec<Vec<Rational>> = basis.iter().map(|b| (self * b).coeffs).collect();
        let mut aug: Vec<Vec<Rational>> = (0..d)
            .map(|r| {
                let mut row: Vec<Rational> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !aug[r][col].is_zero()).ok_or(Error::DivisionByZero)?;
            aug.swap(col, piv);
            let p = aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v = &*v / &p;
            }
            for r in 0..d {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=d {
                        let sub = &f * &aug[col][c];
                        aug[r][c] -= sub;
                    }
                }
            }
        }
        let coeffs = aug.into_iter().map(|row| row[d].clone()).collect();
        Ok(Scalar { field: self.field, coeffs })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Embeds into ℚ(ζ_M) where N divides M.
    pub fn embed(&self, target: Field) -> Result<Scalar> {
        let (n, m) = (self.field.order(), target.order());
        if m % n != 0 {
            return Err(Error::FieldMismatch(self.field.name(), target.name()));
        }
        if self.field == target {
            return Ok(self.clone());
        }
        let step = (m / n) as i64;
        let mut acc = target.zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &target.zeta_pow(step * k as i64).scale(c);
            }
        }
        Ok(acc)
    }

    /// Least m ≥ 1 with selfᵐ = 1, if one exists in the field.
    pub fn root_of_unity_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let n = self.field.order() as u64;
        let big = n.lcm(&2);
        if !self.pow(big as i64).ok()?.is_one() {
            return None;
        }
        (1..=big).filter(|d| big % d == 0).find(|&d| self.pow(d as i64).map(|p| p.is_one()).unwrap_or(false))
    }

    /// Writes self = r·ζ with r ∈ ℚ positive and ζ a root of unity, when possible.
    /// Returns (r, exponent a, M) with ζ = g^a for the generator g of the roots of
    /// unity in the field (of order M = lcm(2, N)).
    pub fn split_torsion(&self) -> Option<(Rational, u64, u64)> {
        let m = (self.field.order() as u64).lcm(&2);
        let g = self.root_group_generator();
        let ginv = g.inv().ok()?;
        let mut cur = self.clone();
        for a in 0..m {
            if let Some(r) = cur.as_rational() {
                if r.is_positive() {
                    return Some((r.clone(), a, m));
                }
            }
            cur = &cur * &ginv;
        }
        None
    }

    /// A generator of the cyclic group of roots of unity in the field.
    pub fn root_group_generator(&self) -> Scalar {
        root_group_generator(self.field)
    }
}

/// A generator of the roots of unity of ℚ(ζ_N), of order lcm(2, N).
pub fn root_group_generator(field: Field) -> Scalar {
    let n = field.order();
    if n % 2 == 1 {
        -field.zeta_pow(1)
    } else {
        field.zeta_pow(1)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.field.order();
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = if k == 0 {
                rational_to_string(c)
            } else {
                let z = if k == 1 { format!("z{n}") } else { format!("z{n}^{k}") };
                if c.is_one() {
                    z
                } else if (-c).is_one() {
                    format!("-{z}")
                } else {
                    format!("{}*{z}", rational_to_string(c))
                }
            };
            terms.push(term);
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(t);
                }
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses compact scalar syntax: sums of terms `c`, `zN`, `zN^k`, `c*zN^k`.
/// All `zN` occurring must share one N; the result lies in `field` when given,
/// else in ℚ(ζ_N) (or ℚ when no root of unity occurs).
pub fn parse_scalar(s: &str, field: Option<Field>) -> Result<Scalar> {
    let src = s.trim();
    if src.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut prev: Option<char> = None;
    for ch in src.chars() {
        if (ch == '+' || ch == '-') && !matches!(prev, None | Some('^') | Some('*') | Some('/')) && !cur.trim().is_empty() {
            terms.push((neg, cur.trim().to_string()));
            cur.clear();
            neg = ch == '-';
        } else if ch == '-' && cur.trim().is_empty() && prev != Some('^') {
            neg = !neg;
        } else if ch == '+' && cur.trim().is_empty() {
        } else if !ch.is_whitespace() {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("dangling operator in {src:?}")));
    }
    terms.push((neg, cur.trim().to_string()));

    let mut parsed: Vec<(Rational, Option<(u32, i64)>)> = Vec::new();
    let mut order: Option<u32> = None;
    for (neg, t) in &terms {
        let (coef, z) = match t.find('z') {
            None => (parse_rational(t)?, None),
            Some(pos) => {
                let c = if pos == 0 {
                    Rational::one()
                } else {
                    let head = t[..pos].strip_suffix('*').ok_or_else(|| Error::Parse(format!("bad term {t:?}")))?;
                    parse_rational(head)?
                };
                let rest = &t[pos + 1..];
                let (ns, ks) = match rest.split_once('^') {
                    Some((a, b)) => (a, Some(b)),
                    None => (rest, None),
                };
                let n: u32 = ns.parse().map_err(|_| Error::Parse(format!("bad root order in {t:?}")))?;
                if n == 0 {
                    return Err(Error::Parse("root order must be positive".into()));
                }
                let k: i64 = match ks {
                    Some(k) => k.parse().map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?,
                    None => 1,
                };
                if let Some(o) = order {
                    if o != n {
                        return Err(Error::Parse(format!("mixed roots of unity z{o} and z{n}")));
                    }
                }
                order = Some(n);
                (c, Some((n, k)))
            }
        };
        parsed.push((if *neg { -coef } else { coef }, z));
    }
    let natural = Field::cyclotomic(order.unwrap_or(1));
    let target = field.unwrap_or(natural);
    let mut acc = natural.zero();
    for (c, z) in parsed {
        let term = match z {
            None => natural.from_rational(c),
            Some((_, k)) => natural.zeta_pow(k).scale(&c),
        };
        acc = &acc + &term;
    }
    acc.embed(target)
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    field: String,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            field: self.field.name(),
            coeffs: self.coeffs.iter().map(|c| [c.numer().to_string(), c.denom().to_string()]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ScalarRepr::deserialize(d)?;
        let field = Field::parse(&repr.field).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|[n, d]| parse_rational(&format!("{n}/{d}")))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Scalar::from_coeffs(field, coeffs).map_err(D::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$f(rhs).expect("scalar operation across different fields")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.field, rhs.field, "scalar operation across different fields");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.field, rhs.field, "scalar operation across different fields");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> Field {
        Field::cyclotomic(3)
    }

    #[test]
    fn rational_sum() {
        let f = Field::Rationals;
        let a = f.from_rational(rat(1, 2));
        let b = f.from_rational(rat(1, 3));
        assert_eq!(a + b, f.from_rational(rat(5, 6)));
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = Field::cyclotomic(4);
        let z = f.zeta_pow(1);
        assert_eq!(&z * &z, f.from_i64(-1));
    }

    #[test]
    fn zeta3_squared() {
        let f = q3();
        let z = f.zeta_pow(1);
        assert_eq!(&z * &z, f.from_i64(-1) - z.clone());
        assert_eq!(f.zeta_pow(2), f.from_i64(-1) - z);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn inverses() {
        let f = Field::cyclotomic(5);
        let a = f.from_i64(2) + f.zeta_pow(1) - f.zeta_pow(3).scale(&rat(1, 3));
        assert!((&a * &a.inv().unwrap()).is_one());
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn orders() {
        assert_eq!(Field::Rationals.from_i64(-1).root_of_unity_order(), Some(2));
        assert_eq!(Field::cyclotomic(6).zeta_pow(1).root_of_unity_order(), Some(6));
        assert_eq!(Field::Rationals.from_i64(2).root_of_unity_order(), None);
        assert_eq!(q3().zeta_pow(1).root_of_unity_order(), Some(3));
        assert_eq!((-q3().zeta_pow(1)).root_of_unity_order(), Some(6));
        assert_eq!((q3().one() + q3().zeta_pow(1)).root_of_unity_order(), Some(6));
    }

    #[test]
    fn mixed_fields_rejected_and_embedding() {
        let a = Field::Rationals.from_i64(1);
        let b = q3().zeta_pow(1);
        assert!(matches!(a.try_add(&b), Err(Error::FieldMismatch(..))));
        let z3 = b.embed(Field::cyclotomic(6)).unwrap();
        assert_eq!(z3.root_of_unity_order(), Some(3));
        assert!(q3().zeta_pow(1).embed(Field::cyclotomic(4)).is_err());
    }

    #[test]
    fn parse_and_display() {
        let s = parse_scalar("z3^-1", None).unwrap();
        assert_eq!(s, q3().zeta_pow(2));
        let t = parse_scalar("1/2 - 3*z5^2", None).unwrap();
        assert_eq!(t.to_string(), "1/2 - 3*z5^2");
        assert_eq!(parse_scalar(&t.to_string(), None).unwrap(), t);
        assert_eq!(parse_scalar("-2", None).unwrap(), Field::Rationals.from_i64(-2));
        assert_eq!(parse_scalar("1", Some(q3())).unwrap(), q3().one());
        assert!(parse_scalar("z3 + z4", None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = parse_scalar("2/3 + z7^4", None).unwrap();
        let v = serde_json::to_string(&s).unwrap();
        assert!(v.contains("\"Q(zeta_7)\""));
        let back: Scalar = serde_json::from_str(&v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn torsion_split() {
        let f = q3();
        let x = f.zeta_pow(1).scale(&int(-2));
        let (r, a, m) = x.split_torsion().unwrap();
        assert_eq!(r, int(2));
        assert_eq!(m, 6);
        assert_eq!(root_group_generator(f).pow(a as i64).unwrap().scale(&r), x);
    }
}
