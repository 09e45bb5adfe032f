//! Independent reference arithmetic for integration tests.
//!
//! Seeds are mutated by direct substitution: cluster variables are exact
//! rationals at a fixed evaluation point, coefficients are exponent vectors of
//! the tropical semifield with its own min-plus sum, and the exchange matrix
//! uses the textbook entrywise rule. Nothing here calls into the engine's
//! polynomial arithmetic.
#![allow(dead_code)]

use glp::{LaurentPoly, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Tropical sum: componentwise minimum of exponents.
pub fn trop_sum(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| *x.min(y)).collect()
}

pub fn trop_one_plus(a: &[i64]) -> Vec<i64> {
    trop_sum(a, &vec![0; a.len()])
}

fn pos(v: i64) -> i64 {
    v.max(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSeed {
    pub b: Vec<Vec<i64>>,
    pub y: Vec<Vec<i64>>,
    pub x: Vec<BigRational>,
    /// Values substituted for the tropical generators.
    pub y_point: Vec<BigRational>,
}

impl OracleSeed {
    pub fn new(
        b: Vec<Vec<i64>>,
        y: Vec<Vec<i64>>,
        x: Vec<BigRational>,
        y_point: Vec<BigRational>,
    ) -> Self {
        OracleSeed { b, y, x, y_point }
    }

    fn y_value(&self, e: &[i64]) -> BigRational {
        e.iter()
            .zip(&self.y_point)
            .fold(BigRational::one(), |acc, (&k, v)| acc * v.pow(k as i32))
    }

    pub fn mutate(&self, k: usize) -> OracleSeed {
        let n = self.b.len();
        let mut b = self.b.clone();
        for i in 0..n {
            for j in 0..n {
                b[i][j] = if i == k || j == k {
                    -self.b[i][j]
                } else {
                    let (bik, bkj) = (self.b[i][k], self.b[k][j]);
                    self.b[i][j] + (bik.abs() * bkj + bik * bkj.abs()) / 2
                };
            }
        }
        let yk = &self.y[k];
        let denom = trop_one_plus(yk);
        let mut y = self.y.clone();
        for i in 0..n {
            y[i] = if i == k {
                yk.iter().map(|v| -v).collect()
            } else {
                let bki = self.b[k][i];
                (0..yk.len())
                    .map(|l| self.y[i][l] + yk[l] * pos(bki) - denom[l] * bki)
                    .collect()
            };
        }
        let hat_plus: Vec<i64> = yk.iter().zip(&denom).map(|(a, d)| a - d).collect();
        let hat_minus: Vec<i64> = denom.iter().map(|d| -d).collect();
        let mut plus = self.y_value(&hat_plus);
        let mut minus = self.y_value(&hat_minus);
        for j in 0..n {
            let bjk = self.b[j][k];
            plus *= self.x[j].pow(pos(bjk) as i32);
            minus *= self.x[j].pow(pos(-bjk) as i32);
        }
        let mut x = self.x.clone();
        x[k] = (plus + minus) / &self.x[k];
        OracleSeed {
            b,
            y,
            x,
            y_point: self.y_point.clone(),
        }
    }

    pub fn mutate_along(&self, w: &Word) -> OracleSeed {
        w.directions()
            .iter()
            .fold(self.clone(), |s, &k| s.mutate(k))
    }
}

/// Value of `p` at `x = xs`, `y = ys`.
///
/// Each variable `v = a/b` with exponents in `[-k, k]` is scaled by
/// `(ab)^k`, so every term becomes an integer read from a power table and
/// only the final quotient is reduced.
pub fn evaluate(p: &LaurentPoly, xs: &[BigRational], ys: &[BigRational]) -> BigRational {
    let point: Vec<&BigRational> = xs.iter().chain(ys).collect();
    let mut bound = vec![0i64; point.len()];
    for (e, _) in p.terms() {
        for (b, &k) in bound.iter_mut().zip(e.x().iter().chain(e.y())) {
            *b = (*b).max(k.abs());
        }
    }
    // table[v][k + bound] = numer^(k + bound) * denom^(bound - k)
    let tables: Vec<Vec<BigInt>> = point
        .iter()
        .zip(&bound)
        .map(|(v, &kb)| {
            let (a, d) = (v.numer(), v.denom());
            let span = 2 * kb as usize;
            let a_pow: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |x| Some(x * a))
                .take(span + 1)
                .collect();
            let d_pow: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |x| Some(x * d))
                .take(span + 1)
                .collect();
            (0..=span).map(|j| &a_pow[j] * &d_pow[span - j]).collect()
        })
        .collect();
    let mut numer = BigInt::zero();
    for (e, c) in p.terms() {
        let mut t = c.clone();
        for (v, &k) in e.x().iter().chain(e.y()).enumerate() {
            t *= &tables[v][(k + bound[v]) as usize];
        }
        numer += t;
    }
    let mut denom = BigInt::one();
    for (v, &kb) in point.iter().zip(&bound) {
        denom *= (v.numer() * v.denom()).pow(kb as u32);
    }
    BigRational::new(numer, denom)
}

/// Small positive rationals, distinct with high probability.
pub fn random_point(rng: &mut impl Rng, len: usize) -> Vec<BigRational> {
    (0..len)
        .map(|_| rat(rng.gen_range(1..60), rng.gen_range(1..60)))
        .collect()
}

pub fn principal_y(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Numbers of distinct unlabeled clusters and of distinct cluster variables
/// reachable within `max_depth` mutations, identifying variables by value at
/// the point `x`. Returns `None` if the last level still produced new
/// clusters.
pub fn enumerate_clusters(
    b: Vec<Vec<i64>>,
    x: Vec<BigRational>,
    max_depth: usize,
) -> Option<(usize, usize)> {
    use std::collections::BTreeSet;
    let n = b.len();
    let root = OracleSeed::new(b, vec![Vec::new(); n], x, Vec::new());
    let key = |s: &OracleSeed| -> Vec<BigRational> {
        let mut v = s.x.clone();
        v.sort();
        v
    };
    let mut clusters: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    let mut variables: BTreeSet<BigRational> = root.x.iter().cloned().collect();
    clusters.insert(key(&root));
    let mut frontier = vec![root];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..n {
                let t = s.mutate(k);
                if clusters.insert(key(&t)) {
                    variables.extend(t.x.iter().cloned());
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            return Some((clusters.len(), variables.len()));
        }
        frontier = next;
    }
    None
}

/// Random skew-symmetrizable matrix with `n <= 4`, `|b_ij| <= 3`, and random
/// tropical coefficients with `m <= 3` generators and exponents in `[-2, 2]`.
///
/// A symmetrizer `d` in `{1, 2, 3}^n` is drawn first; each `b_ij` (`i < j`) is
/// drawn from the values for which `b_ji = -d_i b_ij / d_j` is an integer
/// within bounds.
pub fn random_seed(rng: &mut impl Rng) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(0..=3);
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let choices: Vec<i64> = (-3..=3)
                .filter(|&v: &i64| (d[i] * v) % d[j] == 0 && (d[i] * v / d[j]).abs() <= 3)
                .collect();
            let v = choices[rng.gen_range(0..choices.len())];
            b[i][j] = v;
            b[j][i] = -d[i] * v / d[j];
        }
    }
    let y = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    (b, y)
}

pub fn random_word(rng: &mut impl Rng, n: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut dirs: Vec<usize> = Vec::with_capacity(len);
    while dirs.len() < len && n > 0 {
        let k = rng.gen_range(0..n);
        if dirs.last() != Some(&k) {
            dirs.push(k);
        }
        if n == 1 {
            break;
        }
    }
    Word::new(dirs).expect("reduced by construction")
}

pub fn engine_seed(b: &[Vec<i64>], y: &[Vec<i64>]) -> glp::Seed {
    let matrix = glp::ExchangeMatrix::new(b.to_vec()).expect("skew-symmetrizable");
    let coeffs = y
        .iter()
        .map(|e| glp::TropMonomial::new(e.clone()))
        .collect();
    glp::Seed::root(matrix, coeffs).expect("valid seed")
}
