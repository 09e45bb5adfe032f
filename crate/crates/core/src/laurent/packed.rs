//! Kronecker-packed, multi-modular kernels for multiplication and exact
//! division.
//!
//! Exponents inside a bounding box are packed into one `u64` index by
//! mixed-radix encoding, so products of monomials become sums of indices.
//! Coefficients are computed modulo several primes just below `2^50`, with
//! products accumulated lazily in `u128`, and recombined by the Chinese
//! remainder theorem. Every result is exact:
//!
//! * a product uses enough primes that `M > 2 min(|a|_∞ |b|_1, |a|_1 |b|_∞)`;
//! * a quotient `Q` of `p / q` is accepted only when every modular remainder
//!   vanishes and `M > 2 (|p|_∞ + |Q|_∞ |q|_1)`, which forces `p = Q q`.
//!   A nonzero modular remainder proves that `q` does not divide `p`.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::{Exponent, LaurentPoly};

/// Largest box whose rows are located through a dense table.
const DENSE_CELLS: u64 = 1 << 23;
/// Each lazily accumulated product is below `2^100`; this many fit in `u128`.
const MAX_ACCUMULATED: usize = 1 << 26;
const PRIME_BITS: u64 = 49;
const PRIME_COUNT: usize = 48;

thread_local! {
    /// Row table, all `u32::MAX` between calls.
    static SLOTS: std::cell::RefCell<Vec<u32>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The largest primes below `2^50`, each above `2^49`.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut c = (1u64 << (PRIME_BITS + 1)) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

fn residue(c: &BigInt, p: u64) -> u64 {
    if let Some(v) = c.to_i64() {
        return v.rem_euclid(p as i64) as u64;
    }
    c.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("reduced residue")
}

/// Garner recombination of residues into the symmetric range `(-M/2, M/2]`.
struct Crt {
    primes: Vec<u64>,
    /// `inv[i][j] = p_j^{-1} mod p_i` for `j < i`.
    inv: Vec<Vec<u64>>,
    modulus: BigInt,
    half: BigInt,
}

impl Crt {
    fn new(primes: Vec<u64>) -> Self {
        let inv = primes
            .iter()
            .enumerate()
            .map(|(i, &pi)| primes[..i].iter().map(|&pj| inv_mod(pj % pi, pi)).collect())
            .collect();
        let modulus = primes.iter().fold(BigInt::from(1), |acc, &p| acc * p);
        let half = &modulus >> 1;
        Crt {
            primes,
            inv,
            modulus,
            half,
        }
    }

    fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let k = self.primes.len();
        if k == 1 {
            let (r, p) = (residues[0], self.primes[0]);
            return if r > p / 2 {
                BigInt::from(r as i64 - p as i64)
            } else {
                BigInt::from(r)
            };
        }
        let mut digits = vec![0u64; k];
        for i in 0..k {
            let p = self.primes[i];
            // v = (r_i - (d_0 + d_1 p_0 + ...)) / (p_0 ... p_{i-1}) mod p_i
            let mut v = residues[i] % p;
            for j in 0..i {
                let d = digits[j] % p;
                v = mul_mod((v + p - d) % p, self.inv[i][j], p);
            }
            digits[i] = v;
        }
        let mut value = BigInt::zero();
        for i in (0..k).rev() {
            value = value * self.primes[i] + digits[i];
        }
        if value > self.half {
            value - &self.modulus
        } else {
            value
        }
    }
}

/// Componentwise bounds of the concatenated exponents of a nonzero polynomial.
fn bounds(p: &LaurentPoly) -> (Vec<i64>, Vec<i64>) {
    let mut it = p.terms.keys();
    let first: Vec<i64> = it
        .next()
        .expect("nonzero polynomial")
        .all()
        .copied()
        .collect();
    let (mut lo, mut hi) = (first.clone(), first);
    for e in it {
        for (i, &v) in e.all().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    (lo, hi)
}

/// Mixed-radix packing of the box `lo + [0, radix)`.
struct Packing {
    lo: Vec<i64>,
    radix: Vec<u64>,
    cells: u64,
}

impl Packing {
    fn new(lo: Vec<i64>, radix: Vec<u64>) -> Option<Self> {
        let cells = radix.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r))?;
        (cells < 1 << 62).then_some(Packing { lo, radix, cells })
    }

    /// Index of `e - origin`, where the difference lies in the box at zero.
    fn encode(&self, e: &Exponent, origin: &[i64]) -> u64 {
        let mut idx = 0u64;
        let mut stride = 1u64;
        for ((v, o), r) in e.all().zip(origin).zip(&self.radix) {
            idx += (v - o) as u64 * stride;
            stride *= r;
        }
        idx
    }

    fn digits(&self, mut idx: u64) -> impl Iterator<Item = u64> + '_ {
        self.radix.iter().map(move |r| {
            let d = idx % r;
            idx /= r;
            d
        })
    }

    fn decode(&self, idx: u64, n: usize, offset: &[i64]) -> Exponent {
        let mut x: Vec<i64> = self
            .digits(idx)
            .zip(offset)
            .map(|(d, o)| d as i64 + o)
            .collect();
        let y = x.split_off(n);
        Exponent { x, y }
    }
}

/// Packed terms with norms of their coefficient vector.
struct Packed<'a> {
    terms: Vec<(u64, &'a BigInt)>,
    max_abs: BigInt,
    l1: BigInt,
}

impl<'a> Packed<'a> {
    fn new(p: &'a LaurentPoly, pk: &Packing, origin: &[i64]) -> Self {
        let mut max_abs = BigInt::zero();
        let mut l1 = BigInt::zero();
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| {
                let a = c.abs();
                if a > max_abs {
                    max_abs = a.clone();
                }
                l1 += a;
                (pk.encode(e, origin), c)
            })
            .collect();
        Packed { terms, max_abs, l1 }
    }
}

/// Number of primes whose product exceeds `bound`.
fn primes_for(bound: &BigInt) -> usize {
    (bound.bits() + 1).div_ceil(PRIME_BITS) as usize
}

/// Residues of every term modulo each prime, `primes.len()` lanes per term.
fn lanes(p: &Packed, primes: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(p.terms.len() * primes.len());
    for (_, c) in &p.terms {
        out.extend(primes.iter().map(|&pr| residue(c, pr)));
    }
    out
}

/// Accumulator rows of `k` lazy `u128` lanes, addressed by packed index.
///
/// Small boxes look rows up in a dense table borrowed from thread-local
/// storage; the table is restored to all-`u32::MAX` on drop.
struct Rows {
    k: usize,
    dense: Option<Vec<u32>>,
    sparse: FxHashMap<u64, u32>,
    idx: Vec<u64>,
    acc: Vec<u128>,
}

impl Rows {
    fn new(k: usize, cells: u64) -> Self {
        let dense = (cells <= DENSE_CELLS).then(|| {
            let mut t = SLOTS.with(|s| std::mem::take(&mut *s.borrow_mut()));
            if t.len() < cells as usize {
                t.resize(cells as usize, u32::MAX);
            }
            t
        });
        Rows {
            k,
            dense,
            sparse: FxHashMap::default(),
            idx: Vec::new(),
            acc: Vec::new(),
        }
    }

    /// Row of `idx`, created zeroed on first use.
    #[inline(always)]
    fn row(&mut self, idx: u64) -> (usize, bool) {
        let next = self.idx.len() as u32;
        let slot = match &mut self.dense {
            Some(t) => &mut t[idx as usize],
            None => self.sparse.entry(idx).or_insert(u32::MAX),
        };
        if *slot == u32::MAX {
            *slot = next;
            self.idx.push(idx);
            self.acc.resize(self.acc.len() + self.k, 0);
            (next as usize * self.k, true)
        } else {
            (*slot as usize * self.k, false)
        }
    }

    /// Adds `x_l * y_l` to every lane of the row of `idx`.
    #[inline]
    fn add_products(&mut self, idx: u64, x: &[u64], y: &[u64]) -> bool {
        let (base, fresh) = self.row(idx);
        for ((a, &u), &v) in self.acc[base..base + self.k].iter_mut().zip(x).zip(y) {
            *a += u as u128 * v as u128;
        }
        fresh
    }
}

impl Drop for Rows {
    fn drop(&mut self) {
        if let Some(mut t) = self.dense.take() {
            for &i in &self.idx {
                t[i as usize] = u32::MAX;
            }
            SLOTS.with(|s| *s.borrow_mut() = t);
        }
    }
}

/// Recombines rows of residues; returns the polynomial and its largest
/// coefficient magnitude.
fn recombine<'a>(
    rows: impl Iterator<Item = (u64, &'a [u64])>,
    crt: &Crt,
    n: usize,
    m: usize,
    pk: &Packing,
    offset: &[i64],
) -> (LaurentPoly, BigInt) {
    let mut out = LaurentPoly::zero(n, m);
    let mut max_abs = BigInt::zero();
    for (idx, rs) in rows {
        if rs.iter().all(|&r| r == 0) {
            continue;
        }
        let c = crt.reconstruct(rs);
        if c.is_zero() {
            continue;
        }
        let a = c.abs();
        if a > max_abs {
            max_abs = a;
        }
        out.terms.insert(pk.decode(idx, n, offset), c);
    }
    (out, max_abs)
}

/// Product of two nonzero polynomials of equal dimensions, or `None` when the
/// packed box is too large to index.
pub(super) fn mul(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    let (alo, ahi) = bounds(a);
    let (blo, bhi) = bounds(b);
    let lo: Vec<i64> = alo
        .iter()
        .zip(&blo)
        .map(|(x, y)| x.checked_add(*y))
        .collect::<Option<_>>()?;
    let radix = (0..lo.len())
        .map(|i| {
            let sa = ahi[i].checked_sub(alo[i])?;
            let sb = bhi[i].checked_sub(blo[i])?;
            u64::try_from(sa.checked_add(sb)?.checked_add(1)?).ok()
        })
        .collect::<Option<Vec<u64>>>()?;
    for (l, r) in lo.iter().zip(&radix) {
        l.checked_add(i64::try_from(*r).ok()?)?;
    }
    let pk = Packing::new(lo, radix)?;
    let square = std::ptr::eq(a, b);
    let pa = Packed::new(a, &pk, &alo);
    let pb = (!square).then(|| Packed::new(b, &pk, &blo));
    let pb = pb.as_ref().unwrap_or(&pa);
    let shorter = pa.terms.len().min(pb.terms.len());
    if shorter >= MAX_ACCUMULATED {
        return None;
    }
    let bound = (&pa.max_abs * &pb.l1).min(&pa.l1 * &pb.max_abs) * 2;
    let k = primes_for(&bound);
    if k > PRIME_COUNT {
        return None;
    }
    let crt = Crt::new(primes()[..k].to_vec());
    let ra = lanes(&pa, &crt.primes);
    let mut rows = Rows::new(k, pk.cells);
    if square {
        // Unordered pairs of distinct terms are visited once, doubled.
        let doubled: Vec<u64> = ra
            .chunks_exact(k)
            .flat_map(|r| r.iter().zip(&crt.primes).map(|(&c, &p)| (2 * c) % p))
            .collect();
        for (i, &(ia, _)) in pa.terms.iter().enumerate() {
            let x = &ra[i * k..(i + 1) * k];
            rows.add_products(ia + ia, x, x);
            for (j, &(ib, _)) in pa.terms.iter().enumerate().skip(i + 1) {
                rows.add_products(ia + ib, x, &doubled[j * k..(j + 1) * k]);
            }
        }
    } else {
        let rb = lanes(pb, &crt.primes);
        for (i, &(ia, _)) in pa.terms.iter().enumerate() {
            let x = &ra[i * k..(i + 1) * k];
            for (j, &(ib, _)) in pb.terms.iter().enumerate() {
                rows.add_products(ia + ib, x, &rb[j * k..(j + 1) * k]);
            }
        }
    }
    let reduced: Vec<u64> = rows
        .acc
        .chunks_exact(k)
        .flat_map(|r| {
            r.iter()
                .zip(&crt.primes)
                .map(|(&v, &p)| (v % p as u128) as u64)
        })
        .collect();
    let iter = rows.idx.iter().copied().zip(reduced.chunks_exact(k));
    Some(recombine(iter, &crt, a.n, a.m, &pk, &pk.lo).0)
}

pub(super) enum Division {
    Quotient(LaurentPoly),
    NotDivisible,
    Unsupported,
}

/// Exact division of nonzero `p` by nonzero `q` of equal dimensions.
///
/// Both sides are shifted so that every exponent has minimum zero; a quotient
/// then exists iff one exists among polynomials whose exponents fit in the
/// difference of the two boxes, which makes the packed univariate division
/// faithful.
pub(super) fn exact_div(p: &LaurentPoly, q: &LaurentPoly) -> Division {
    let (plo, phi) = bounds(p);
    let (qlo, qhi) = bounds(q);
    let dims = plo.len();
    let mut radix = Vec::with_capacity(dims);
    let mut room = Vec::with_capacity(dims);
    let mut offset = Vec::with_capacity(dims);
    for i in 0..dims {
        let (Some(sp), Some(sq)) = (phi[i].checked_sub(plo[i]), qhi[i].checked_sub(qlo[i])) else {
            return Division::Unsupported;
        };
        if sq > sp {
            return Division::NotDivisible;
        }
        let Some(off) = plo[i].checked_sub(qlo[i]) else {
            return Division::Unsupported;
        };
        radix.push(sp as u64 + 1);
        room.push((sp - sq) as u64);
        offset.push(off);
    }
    let Some(pk) = Packing::new(plo.clone(), radix) else {
        return Division::Unsupported;
    };
    if q.len() >= MAX_ACCUMULATED {
        return Division::Unsupported;
    }
    let pp = Packed::new(p, &pk, &pk.lo);
    let pq = Packed::new(q, &pk, &qlo);
    let lead = pq
        .terms
        .iter()
        .enumerate()
        .max_by_key(|(_, (i, _))| *i)
        .map(|(j, &(i, c))| (j, i, c))
        .expect("nonzero divisor");

    // Primes dividing the leading coefficient cannot be used.
    let usable: Vec<u64> = primes()
        .iter()
        .copied()
        .filter(|&pr| residue(lead.2, pr) != 0)
        .collect();
    // Sufficient whenever |Q|_∞ <= |p|_∞, as for positive coefficients.
    let mut k = primes_for(&(&pp.max_abs * (&pq.l1 + 1u32) * 2));
    loop {
        if k > usable.len() {
            return Division::Unsupported;
        }
        let crt = Crt::new(usable[..k].to_vec());
        let Some(quot) = div_lanes(&pp, &pq, lead, &pk, &room, &crt.primes) else {
            return Division::NotDivisible;
        };
        let iter = quot.idx.iter().copied().zip(quot.res.chunks_exact(k));
        let (quot, q_max) = recombine(iter, &crt, p.n, p.m, &pk, &offset);
        let bound = &pp.max_abs + &q_max * &pq.l1;
        if crt.modulus > bound * 2 {
            return Division::Quotient(quot);
        }
        k = (k + 1).max(primes_for(&(&q_max * &pq.l1 * 4)));
    }
}

/// Quotient digits with `k` residue lanes per packed index.
struct LaneQuotient {
    idx: Vec<u64>,
    res: Vec<u64>,
}

/// Long division modulo every prime at once, or `None` when some prime
/// leaves a nonzero remainder or needs a quotient term outside the box.
///
/// Every update lands below the index being eliminated, so a max-heap visits
/// each remainder row exactly once in descending order.
fn div_lanes(
    pp: &Packed,
    pq: &Packed,
    (lead_pos, lead_idx, _): (usize, u64, &BigInt),
    pk: &Packing,
    room: &[u64],
    primes: &[u64],
) -> Option<LaneQuotient> {
    let k = primes.len();
    let divisor = lanes(pq, primes);
    let lead_inv: Vec<u64> = divisor[lead_pos * k..(lead_pos + 1) * k]
        .iter()
        .zip(primes)
        .map(|(&c, &p)| inv_mod(c, p))
        .collect();
    let mut rows = Rows::new(k, pk.cells);
    let mut heap = BinaryHeap::with_capacity(pp.terms.len());
    let init = lanes(pp, primes);
    let ones = vec![1u64; k];
    for (i, &(idx, _)) in pp.terms.iter().enumerate() {
        rows.add_products(idx, &init[i * k..(i + 1) * k], &ones);
        heap.push(idx);
    }
    let mut quot = LaneQuotient {
        idx: Vec::new(),
        res: Vec::new(),
    };
    let mut neg = vec![0u64; k];
    while let Some(idx) = heap.pop() {
        let (base, _) = rows.row(idx);
        let mut nonzero = false;
        for l in 0..k {
            let c = (rows.acc[base + l] % primes[l] as u128) as u64;
            let qc = mul_mod(c, lead_inv[l], primes[l]);
            neg[l] = (primes[l] - qc) % primes[l];
            nonzero |= c != 0;
        }
        if !nonzero {
            continue;
        }
        if idx < lead_idx {
            return None;
        }
        let s = idx - lead_idx;
        if pk.digits(s).zip(room).any(|(d, r)| d > *r) {
            return None;
        }
        quot.idx.push(s);
        quot.res
            .extend(neg.iter().zip(primes).map(|(&v, &p)| (p - v) % p));
        for (j, &(t, _)) in pq.terms.iter().enumerate() {
            if j != lead_pos && rows.add_products(s + t, &neg, &divisor[j * k..(j + 1) * k]) {
                heap.push(s + t);
            }
        }
    }
    Some(quot)
}
