//! Sparse Laurent polynomials in `x_1..x_n` with coefficients in the group
//! ring `Z[y_1^{±1}..y_m^{±1}]` of the tropical semifield.
//!
//! A term is `c · x^u · y^v` with `u ∈ Z^n`, `v ∈ Z^m` and `c` a nonzero
//! big integer. The support is a hash map; whenever an order is needed
//! (division, serialization, canonical comparison) terms are sorted by the
//! graded lexicographic order on the concatenation `(u, v)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::{FxHashMap, FxHasher};

use crate::error::{Error, Result};
use crate::semifield::TropMonomial;

mod packed;

/// Exponent pair `(u, v)` of a term `x^u y^v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    x: Vec<i64>,
    y: Vec<i64>,
}

impl Exponent {
    pub fn new(x: Vec<i64>, y: Vec<i64>) -> Self {
        Exponent { x, y }
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Exponent {
            x: vec![0; n],
            y: vec![0; m],
        }
    }

    pub fn x(&self) -> &[i64] {
        &self.x
    }

    pub fn y(&self) -> &[i64] {
        &self.y
    }

    pub fn is_y_free(&self) -> bool {
        self.y.iter().all(|&e| e == 0)
    }

    /// True iff `x^u` is a proper Laurent monomial, i.e. `u ∉ N^n`.
    pub fn is_proper(&self) -> bool {
        self.x.iter().any(|&e| e < 0)
    }

    fn total_degree(&self) -> i128 {
        self.x.iter().chain(&self.y).map(|&e| e as i128).sum()
    }

    fn all(&self) -> impl Iterator<Item = &i64> {
        self.x.iter().chain(self.y.iter())
    }

    fn combine(&self, other: &Exponent, sign: i64) -> Result<Exponent> {
        let op = |a: &i64, b: &i64| {
            b.checked_mul(sign)
                .and_then(|b| a.checked_add(b))
                .ok_or(Error::Overflow("Laurent exponent"))
        };
        Ok(Exponent {
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| op(a, b))
                .collect::<Result<_>>()?,
            y: self
                .y
                .iter()
                .zip(&other.y)
                .map(|(a, b)| op(a, b))
                .collect::<Result<_>>()?,
        })
    }

    pub fn checked_add(&self, other: &Exponent) -> Result<Exponent> {
        self.combine(other, 1)
    }

    pub fn checked_sub(&self, other: &Exponent) -> Result<Exponent> {
        self.combine(other, -1)
    }

    /// Componentwise `self >= other`.
    fn dominates(&self, other: &Exponent) -> bool {
        self.all().zip(other.all()).all(|(a, b)| a >= b)
    }
}

/// Graded lexicographic order on the concatenated exponent `(x, y)`.
impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.y.cmp(&other.y))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Normalized sparse Laurent polynomial; no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    n: usize,
    m: usize,
    terms: FxHashMap<Exponent, BigInt>,
}

impl Hash for LaurentPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Order-independent combination so equal maps hash equally.
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut h = FxHasher::default();
            e.hash(&mut h);
            c.hash(&mut h);
            acc = acc.wrapping_add(h.finish());
        }
        self.n.hash(state);
        self.m.hash(state);
        self.terms.len().hash(state);
        acc.hash(state);
    }
}

impl LaurentPoly {
    pub fn zero(n: usize, m: usize) -> Self {
        LaurentPoly {
            n,
            m,
            terms: FxHashMap::default(),
        }
    }

    pub fn one(n: usize, m: usize) -> Self {
        Self::constant(n, m, BigInt::one())
    }

    pub fn constant(n: usize, m: usize, c: BigInt) -> Self {
        let mut p = Self::zero(n, m);
        if !c.is_zero() {
            p.terms.insert(Exponent::zero(n, m), c);
        }
        p
    }

    /// The cluster variable `x_i` (0-based) of the reference cluster.
    pub fn x_var(n: usize, m: usize, i: usize) -> Self {
        let mut e = Exponent::zero(n, m);
        e.x[i] = 1;
        Self::zero(n, m).with_term(e, BigInt::one())
    }

    pub fn monomial(n: usize, m: usize, exponent: Exponent, coeff: BigInt) -> Result<Self> {
        Error::check_len(n, exponent.x.len())?;
        Error::check_len(m, exponent.y.len())?;
        Ok(Self::zero(n, m).with_term(exponent, coeff))
    }

    /// Sums the given terms, merging repeated exponents and dropping zeros.
    pub fn from_terms(
        n: usize,
        m: usize,
        terms: impl IntoIterator<Item = (Exponent, BigInt)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n, m);
        for (e, c) in terms {
            Error::check_len(n, e.x.len())?;
            Error::check_len(m, e.y.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn with_term(mut self, e: Exponent, c: BigInt) -> Self {
        self.add_term(e, c);
        self
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
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

    pub fn coeff(&self, e: &Exponent) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in descending graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable_by(|a, b| b.0.cmp(a.0));
        v
    }

    /// Total order used for canonical forms: term lists compared in sorted order.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        (self.n, self.m)
            .cmp(&(other.n, other.m))
            .then_with(|| self.sorted_terms().cmp(&other.sorted_terms()))
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        Error::check_len(self.n, other.n)?;
        Error::check_len(self.m, other.m)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            n: self.n,
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.n, self.m));
        }
        if self.len() == 1 || other.len() == 1 {
            let (mono, poly) = if self.len() == 1 {
                (self, other)
            } else {
                (other, self)
            };
            let (e, c) = mono.terms.iter().next().expect("one term");
            let terms = poly
                .terms
                .iter()
                .map(|(pe, pc)| Ok((pe.checked_add(e)?, pc * c)))
                .collect::<Result<_>>()?;
            return Ok(LaurentPoly {
                n: self.n,
                m: self.m,
                terms,
            });
        }
        if let Some(p) = packed::mul(self, other) {
            return Ok(p);
        }
        self.mul_sparse(other)
    }

    fn mul_sparse(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.n, self.m);
        out.terms
            .reserve(self.len().saturating_mul(other.len()).min(1 << 20));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.checked_add(eb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base)?,
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| Self::one(self.n, self.m)))
    }

    /// Multiplies by the monomial `x^u y^v`.
    pub fn shift(&self, by: &Exponent) -> Result<Self> {
        Error::check_len(self.n, by.x.len())?;
        Error::check_len(self.m, by.y.len())?;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_add(by)?, c.clone())))
            .collect::<Result<_>>()?;
        Ok(LaurentPoly {
            n: self.n,
            m: self.m,
            terms,
        })
    }

    /// Multiplies by a coefficient of the tropical semifield.
    pub fn shift_y(&self, y: &TropMonomial) -> Result<Self> {
        self.shift(&Exponent::new(vec![0; self.n], y.exponents().to_vec()))
    }

    /// Componentwise minimum over all exponents (x and y parts).
    fn min_exponent(&self) -> Exponent {
        let mut it = self.terms.keys();
        let first = it.next().expect("nonzero polynomial").clone();
        it.fold(first, |mut acc, e| {
            for (a, b) in acc.x.iter_mut().zip(&e.x) {
                *a = (*a).min(*b);
            }
            for (a, b) in acc.y.iter_mut().zip(&e.y) {
                *a = (*a).min(*b);
            }
            acc
        })
    }

    /// Division with remainder: `self = quotient · q + remainder`, computed
    /// by long division after clearing the minimal monomials of both sides.
    /// The remainder is zero iff `q` divides `self` in the Laurent ring.
    pub fn div_rem(&self, q: &Self) -> Result<(Self, Self)> {
        self.check_dims(q)?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (n, m) = (self.n, self.m);
        if self.is_zero() {
            return Ok((Self::zero(n, m), Self::zero(n, m)));
        }
        let mq = q.min_exponent();
        let mp = self.min_exponent();

        let mut divisor: Vec<(Exponent, BigInt)> = q
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_sub(&mq)?, c.clone())))
            .collect::<Result<_>>()?;
        divisor.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let (lead_e, lead_c) = divisor[0].clone();
        let tail = &divisor[1..];

        let mut work: BTreeMap<Exponent, BigInt> = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_sub(&mp)?, c.clone())))
            .collect::<Result<_>>()?;
        let mut quot = Self::zero(n, m);
        let mut rem = Self::zero(n, m);

        while let Some((e, c)) = work.pop_last() {
            let (qc, r) = c.div_rem(&lead_c);
            if !e.dominates(&lead_e) || !r.is_zero() {
                rem.terms.insert(e, c);
                continue;
            }
            let qe = e.checked_sub(&lead_e)?;
            for (te, tc) in tail {
                let key = te.checked_add(&qe)?;
                let delta = &qc * tc;
                match work.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() -= delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                }
            }
            quot.terms.insert(qe, qc);
        }

        let quot = quot.shift(&mp.checked_sub(&mq)?)?;
        let rem = rem.shift(&mp)?;
        Ok((quot, rem))
    }

    /// Exact quotient `self / q` in the Laurent ring.
    pub fn exact_div(&self, q: &Self) -> Result<Self> {
        self.check_dims(q)?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.n, self.m));
        }
        if let packed::Division::Quotient(quot) = packed::exact_div(self, q) {
            return Ok(quot);
        }
        let (quot, rem) = self.div_rem(q)?;
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(Error::NotDivisible { remainder: rem })
        }
    }

    /// Evaluation at `y_1 = ... = y_m = 0`: keeps the y-free terms.
    pub fn specialize_y_zero(&self) -> Result<Self> {
        let mut out = Self::zero(self.n, self.m);
        for (e, c) in &self.terms {
            if e.y.iter().any(|&v| v < 0) {
                return Err(Error::IllDefinedSpecialization {
                    term: format_term(e, c),
                });
            }
            if e.is_y_free() {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Componentwise minimum of the x-exponents; the d-vector is its negative.
    pub fn min_x_exponents(&self) -> Result<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(Error::ZeroPolynomial)?.x.clone();
        Ok(it.fold(first, |mut acc, e| {
            for (a, b) in acc.iter_mut().zip(&e.x) {
                *a = (*a).min(*b);
            }
            acc
        }))
    }

    pub fn is_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// First term (in sorted order) with a nonpositive coefficient.
    pub fn first_nonpositive_term(&self) -> Option<(Exponent, BigInt)> {
        self.sorted_terms()
            .into_iter()
            .find(|(_, c)| !c.is_positive())
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// The g-vector, if the polynomial has the shape `x^g (1 + Σ_{v≠0} c y^v x^u)`:
    /// exactly one y-free term, with coefficient 1.
    pub fn is_pointed(&self) -> Result<Vec<i64>> {
        let mut free = self.terms.iter().filter(|(e, _)| e.is_y_free());
        let not_pointed = |reason: String| Err(Error::NotPointed { reason });
        match (free.next(), free.next()) {
            (None, _) if self.is_zero() => not_pointed("zero polynomial".into()),
            (None, _) => not_pointed("no y-free term".into()),
            (Some(_), Some(_)) => {
                let count = 2 + free.count();
                not_pointed(format!("{count} y-free terms"))
            }
            (Some((e, c)), None) if c.is_one() => Ok(e.x.clone()),
            (Some((e, c)), None) => not_pointed(format!(
                "y-free term {} has coefficient {c}",
                format_term(e, c)
            )),
        }
    }

    /// True iff every term is a proper Laurent monomial in x (vacuous for 0).
    pub fn is_proper_sum(&self) -> bool {
        self.terms.keys().all(Exponent::is_proper)
    }

    pub fn first_improper_term(&self) -> Option<(Exponent, BigInt)> {
        self.sorted_terms()
            .into_iter()
            .find(|(e, _)| !e.is_proper())
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// One line per term, `coeff  x:e1,..,en  y:f1,..,fm`, in sorted order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in self.sorted_terms() {
            s.push_str(&format_term(e, c));
            s.push('\n');
        }
        s
    }

    /// Parses the output of [`LaurentPoly::to_text`]; blank lines are ignored.
    pub fn from_text(n: usize, m: usize, text: &str) -> Result<Self> {
        let terms = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| parse_term(n, m, l))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, m, terms)
    }
}

pub fn format_term(e: &Exponent, c: &BigInt) -> String {
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    format!("{c}  x:{}  y:{}", join(&e.x), join(&e.y))
}

pub fn parse_term(n: usize, m: usize, line: &str) -> Result<(Exponent, BigInt)> {
    let bad = || Error::Parse(format!("bad term line {line:?}"));
    let mut parts = line.split_whitespace();
    let c: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let vec_field = |field: Option<&str>, tag: &str, len: usize| -> Result<Vec<i64>> {
        let body = field.and_then(|f| f.strip_prefix(tag)).ok_or_else(bad)?;
        let v = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|s| s.parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        Error::check_len(len, v.len())?;
        Ok(v)
    };
    let x = vec_field(parts.next(), "x:", n)?;
    let y = vec_field(parts.next(), "y:", m)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((Exponent::new(x, y), c))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let mut factors = Vec::new();
            for (j, &a) in e.y.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("y{}", j + 1)),
                    _ => factors.push(format!("y{}^{a}", j + 1)),
                }
            }
            for (j, &a) in e.x.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("x{}", j + 1)),
                    _ => factors.push(format!("x{}^{a}", j + 1)),
                }
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            match (mag.is_one(), factors.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => f.write_str(&factors.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}
