//! Seeds of geometric type and their mutations.
//!
//! A seed carries the exchange matrix `B`, the coefficient tuple `Y` in
//! `Trop(y_1..y_m)`, and the cluster `X` as Laurent expansions in the cluster
//! of the root seed. Mutating the cluster divides the exchange binomial by the
//! old variable exactly; a nonzero remainder is reported as a violation of the
//! Laurent phenomenon rather than silently producing a rational function.

use std::fmt::Write as _;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::semifield::TropMonomial;
use crate::word::Word;

fn pos(a: i64) -> i64 {
    a.max(0)
}

/// Square integer matrix with a certified skew-symmetrizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<i64>,
    symmetrizer: Vec<i64>,
}

impl ExchangeMatrix {
    /// Validates the rows and computes the symmetrizer.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            Error::check_len(n, row.len())?;
        }
        let symmetrizer = skew_symmetrizer(&rows)?;
        Ok(ExchangeMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
            symmetrizer,
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[i64]>::to_vec)
            .collect()
    }

    /// Diagonal of `S` with `S·B` skew-symmetric.
    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    /// Checks `d_i b_ij = -d_j b_ji` for every pair.
    pub fn is_skew_symmetrized_by(&self, d: &[i64]) -> bool {
        d.len() == self.n
            && (0..self.n).all(|i| {
                (0..self.n).all(|j| {
                    (d[i] as i128) * (self.get(i, j) as i128)
                        == -(d[j] as i128) * (self.get(j, i) as i128)
                })
            })
    }

    /// True iff the quiver `Γ(B)`, with an arrow `i → j` whenever `b_ij > 0`,
    /// has no oriented cycle.
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        fn visit(b: &ExchangeMatrix, v: usize, color: &mut [Color]) -> bool {
            color[v] = Color::Grey;
            for w in 0..b.n {
                if b.get(v, w) > 0 {
                    let c = color[w];
                    match c {
                        Color::Grey => return false,
                        Color::White if !visit(b, w, color) => return false,
                        _ => {}
                    }
                }
            }
            color[v] = Color::Black;
            true
        }
        let mut color = vec![Color::White; self.n];
        (0..self.n).all(|v| color[v] != Color::White || visit(self, v, &mut color))
    }

    /// Matrix mutation in direction `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.n;
        if k >= n {
            return Err(Error::DirectionOutOfRange { k, n });
        }
        let overflow = || Error::Overflow("exchange matrix entry");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                let v = if i == k || j == k {
                    -b
                } else {
                    let (bik, bkj) = (self.get(i, k), self.get(k, j));
                    let t1 = bik.checked_mul(pos(-bkj)).ok_or_else(overflow)?;
                    let t2 = pos(bik).checked_mul(bkj).ok_or_else(overflow)?;
                    b.checked_add(t1)
                        .and_then(|v| v.checked_add(t2))
                        .ok_or_else(overflow)?
                };
                entries.push(v);
            }
        }
        Ok(ExchangeMatrix {
            n,
            entries,
            symmetrizer: self.symmetrizer.clone(),
        })
    }

    /// Simultaneous permutation of rows and columns: entry `(i, j)` of the
    /// result is `b_{σ(i) σ(j)}`.
    pub fn permuted(&self, sigma: &[usize]) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for &i in sigma {
            for &j in sigma {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn new(num: i128, den: i128) -> Self {
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }
}

/// Least positive diagonal `d` with `d_i b_ij = -d_j b_ji`, found by
/// propagating ratios along a spanning forest of the nonzero pattern and
/// checking every remaining entry.
pub fn skew_symmetrizer(rows: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = rows.len();
    for row in rows {
        Error::check_len(n, row.len())?;
    }
    let fail = |reason: String| Err(Error::NotSkewSymmetrizable { reason });
    for (i, row) in rows.iter().enumerate() {
        if row[i] != 0 {
            return fail(format!("b_{0}{0} = {1} is nonzero", i + 1, row[i]));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a == 0) != (b == 0) || (a as i128) * (b as i128) > 0 {
                return fail(format!(
                    "b_{}{} = {a} and b_{}{} = {b} do not have opposite signs",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                ));
            }
        }
    }

    let overflow = || Error::Overflow("skew-symmetrizer");
    let mut ratio: Vec<Option<Ratio>> = vec![None; n];
    let mut out = vec![0i64; n];
    for start in 0..n {
        if ratio[start].is_some() {
            continue;
        }
        ratio[start] = Some(Ratio::new(1, 1));
        let mut component = vec![start];
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let di = ratio[i].unwrap();
            for j in 0..n {
                let (bij, bji) = (rows[i][j] as i128, rows[j][i] as i128);
                if bij == 0 {
                    continue;
                }
                // d_j = -d_i b_ij / b_ji
                let num = di.num.checked_mul(-bij).ok_or_else(overflow)?;
                let den = di.den.checked_mul(bji).ok_or_else(overflow)?;
                let dj = Ratio::new(num, den);
                match ratio[j] {
                    None => {
                        ratio[j] = Some(dj);
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(prev) if prev.num == dj.num && prev.den == dj.den => {}
                    Some(_) => {
                        return fail(format!(
                            "inconsistent ratios around a cycle through entries ({0},{1}) and ({1},{0})",
                            i + 1,
                            j + 1
                        ))
                    }
                }
            }
        }
        let lcm = component
            .iter()
            .try_fold(1i128, |acc, &i| {
                acc.checked_mul(ratio[i].unwrap().den / acc.gcd(&ratio[i].unwrap().den))
            })
            .ok_or_else(overflow)?;
        let scaled: Vec<i128> = component
            .iter()
            .map(|&i| {
                let r = ratio[i].unwrap();
                r.num.checked_mul(lcm / r.den).ok_or_else(overflow)
            })
            .collect::<Result<_>>()?;
        let g = scaled.iter().fold(0i128, |acc, v| acc.gcd(v)).max(1);
        for (&i, v) in component.iter().zip(scaled) {
            out[i] = i64::try_from(v / g).map_err(|_| overflow())?;
        }
    }
    Ok(out)
}

/// Coefficient mutation: `y'_k = y_k^{-1}` and
/// `y'_i = y_i · y_k^{[b_ki]_+} · (1 ⊕ y_k)^{-b_ki}` otherwise.
pub fn mutate_coeffs(
    coeffs: &[TropMonomial],
    matrix: &ExchangeMatrix,
    k: usize,
) -> Result<Vec<TropMonomial>> {
    let n = matrix.rank();
    Error::check_len(n, coeffs.len())?;
    if k >= n {
        return Err(Error::DirectionOutOfRange { k, n });
    }
    let yk = &coeffs[k];
    let one_plus = yk.one_plus();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, yi)| {
            if i == k {
                yk.inverse()
            } else {
                let bki = matrix.get(k, i);
                yi.mul_pow(yk, pos(bki))?.mul_pow(&one_plus, -bki)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    matrix: ExchangeMatrix,
    coeffs: Vec<TropMonomial>,
    cluster: Vec<Arc<LaurentPoly>>,
    word: Word,
}

impl Seed {
    /// Root seed: the cluster is `(x_1, ..., x_n)` itself.
    pub fn root(matrix: ExchangeMatrix, coeffs: Vec<TropMonomial>) -> Result<Self> {
        let n = matrix.rank();
        Error::check_len(n, coeffs.len())?;
        let m = coeffs.first().map_or(0, TropMonomial::len);
        for y in &coeffs {
            Error::check_len(m, y.len())?;
        }
        let cluster = (0..n)
            .map(|i| Arc::new(LaurentPoly::x_var(n, m, i)))
            .collect();
        Ok(Seed {
            matrix,
            coeffs,
            cluster,
            word: Word::root(),
        })
    }

    /// Root seed with principal coefficients `Y = (y_1, ..., y_n)`.
    pub fn principal(matrix: ExchangeMatrix) -> Result<Self> {
        let n = matrix.rank();
        let coeffs = (0..n).map(|i| TropMonomial::generator(n, i)).collect();
        Seed::root(matrix, coeffs)
    }

    /// Root seed with trivial coefficients (`m = 0`).
    pub fn coefficient_free(matrix: ExchangeMatrix) -> Result<Self> {
        let n = matrix.rank();
        Seed::root(matrix, vec![TropMonomial::identity(0); n])
    }

    /// The same seed data taken as a new root: the cluster becomes `(x_1..x_n)`.
    pub fn as_root(&self) -> Self {
        let (n, m) = (self.rank(), self.coeff_rank());
        Seed {
            matrix: self.matrix.clone(),
            coeffs: self.coeffs.clone(),
            cluster: (0..n)
                .map(|i| Arc::new(LaurentPoly::x_var(n, m, i)))
                .collect(),
            word: Word::root(),
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Number `m` of tropical generators.
    pub fn coeff_rank(&self) -> usize {
        self.cluster.first().map_or(0, |x| x.m())
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn coeffs(&self) -> &[TropMonomial] {
        &self.coeffs
    }

    pub fn cluster(&self) -> &[Arc<LaurentPoly>] {
        &self.cluster
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    /// `ŷ_+ Π x_j^{[b_jk]_+} + ŷ_- Π x_j^{[-b_jk]_+}` with
    /// `ŷ_+ = y_k / (1 ⊕ y_k)` and `ŷ_- = 1 / (1 ⊕ y_k)`.
    pub fn exchange_numerator(&self, k: usize) -> Result<LaurentPoly> {
        let n = self.rank();
        if k >= n {
            return Err(Error::DirectionOutOfRange { k, n });
        }
        let m = self.coeff_rank();
        let mut plus = LaurentPoly::one(n, m);
        let mut minus = LaurentPoly::one(n, m);
        for j in 0..n {
            let b = self.matrix.get(j, k);
            if b > 0 {
                plus = plus.mul(&self.cluster[j].pow(b as u64)?)?;
            } else if b < 0 {
                minus = minus.mul(&self.cluster[j].pow(b.unsigned_abs())?)?;
            }
        }
        let yk = &self.coeffs[k];
        let denom = yk.one_plus();
        let plus_coeff = yk.mul_pow(&denom, -1)?;
        let minus_coeff = denom.inverse()?;
        plus.shift_y(&plus_coeff)?
            .add(&minus.shift_y(&minus_coeff)?)
    }

    /// Seed mutation `μ_k` (0-based direction).
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let numerator = self.exchange_numerator(k)?;
        let new_var = numerator.exact_div(&self.cluster[k]).map_err(|e| match e {
            Error::NotDivisible { remainder } => Error::LaurentViolation {
                word: self.word.clone(),
                direction: k,
                remainder,
            },
            other => other,
        })?;
        let mut cluster = self.cluster.clone();
        cluster[k] = Arc::new(new_var);
        Ok(Seed {
            coeffs: mutate_coeffs(&self.coeffs, &self.matrix, k)?,
            matrix: self.matrix.mutate(k)?,
            cluster,
            word: self.word.extended(k),
        })
    }

    /// Mutates along every direction of `word` in turn.
    pub fn mutate_along(&self, word: &Word) -> Result<Seed> {
        word.check_rank(self.rank())?;
        word.directions()
            .iter()
            .try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Text dump: `B` row-major, `Y` as exponent vectors, `X` in term format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "word {}", self.word);
        let _ = writeln!(s, "B");
        for row in self.matrix.rows() {
            let _ = writeln!(s, "{}", join(&row));
        }
        let _ = writeln!(s, "Y");
        for y in &self.coeffs {
            let _ = writeln!(s, "{}", join(y.exponents()));
        }
        for (i, x) in self.cluster.iter().enumerate() {
            let _ = writeln!(s, "X {}", i + 1);
            s.push_str(&x.to_text());
        }
        s
    }
}

pub(crate) fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Exponent;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn a2() -> ExchangeMatrix {
        ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    fn markov() -> ExchangeMatrix {
        ExchangeMatrix::new(vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]).unwrap()
    }

    fn poly(n: usize, m: usize, terms: &[(i64, &[i64], &[i64])]) -> LaurentPoly {
        LaurentPoly::from_terms(
            n,
            m,
            terms
                .iter()
                .map(|(c, x, y)| (Exponent::new(x.to_vec(), y.to_vec()), BigInt::from(*c))),
        )
        .unwrap()
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(
            skew_symmetrizer(&[vec![0, 1], vec![-1, 0]]).unwrap(),
            vec![1, 1]
        );
        assert_eq!(
            skew_symmetrizer(&[vec![0, 1], vec![-2, 0]]).unwrap(),
            vec![2, 1]
        );
        assert!(matches!(
            skew_symmetrizer(&[vec![0, 1], vec![1, 0]]),
            Err(Error::NotSkewSymmetrizable { .. })
        ));
        assert!(skew_symmetrizer(&[vec![1, 0], vec![0, 0]]).is_err());
        assert!(skew_symmetrizer(&[vec![0, 1], vec![0, 0]]).is_err());
        assert_eq!(
            skew_symmetrizer(&[vec![0, 0], vec![0, 0]]).unwrap(),
            vec![1, 1]
        );
        // B2/C2 style chain with an isolated vertex.
        let g2 = vec![vec![0, 3, 0], vec![-1, 0, 0], vec![0, 0, 0]];
        assert_eq!(skew_symmetrizer(&g2).unwrap(), vec![1, 3, 1]);
    }

    #[test]
    fn symmetrizer_rejects_inconsistent_cycle() {
        // 1-2 forces d2 = d1, 2-3 forces d3 = d2, 1-3 forces d3 = 2 d1.
        let b = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-2, -1, 0]];
        assert!(matches!(
            skew_symmetrizer(&b),
            Err(Error::NotSkewSymmetrizable { .. })
        ));
    }

    #[test]
    fn acyclicity() {
        assert!(a2().is_acyclic());
        assert!(!markov().is_acyclic());
        assert!(ExchangeMatrix::new(vec![vec![0; 3]; 3])
            .unwrap()
            .is_acyclic());
    }

    #[test]
    fn matrix_mutation_examples() {
        assert_eq!(
            a2().mutate(0).unwrap().rows(),
            vec![vec![0, -1], vec![1, 0]]
        );
        assert_eq!(
            markov().mutate(0).unwrap().rows(),
            vec![vec![0, -2, 2], vec![2, 0, -2], vec![-2, 2, 0]]
        );
        assert!(matches!(
            a2().mutate(2),
            Err(Error::DirectionOutOfRange { .. })
        ));
    }

    #[test]
    fn coefficient_mutation_examples() {
        let y = vec![TropMonomial::generator(2, 0), TropMonomial::generator(2, 1)];
        let mu = mutate_coeffs(&y, &a2(), 0).unwrap();
        assert_eq!(mu[0], TropMonomial::new(vec![-1, 0]));
        assert_eq!(mu[1], TropMonomial::new(vec![1, 1]));
        assert_eq!(mutate_coeffs(&mu, &a2().mutate(0).unwrap(), 0).unwrap(), y);

        let free = vec![TropMonomial::identity(0); 2];
        assert_eq!(mutate_coeffs(&free, &a2(), 1).unwrap(), free);
    }

    #[test]
    fn a2_principal_mutations() {
        let root = Seed::principal(a2()).unwrap();
        let s1 = root.mutate(0).unwrap();
        assert_eq!(
            *s1.cluster()[0],
            poly(2, 2, &[(1, &[-1, 1], &[0, 0]), (1, &[-1, 0], &[1, 0])])
        );
        let s2 = root.mutate(1).unwrap();
        assert_eq!(
            *s2.cluster()[1],
            poly(2, 2, &[(1, &[0, -1], &[0, 0]), (1, &[1, -1], &[0, 1])])
        );
        assert_eq!(s1.mutate(0).unwrap(), root);
        assert_eq!(s1.word().directions(), &[0]);
    }

    #[test]
    fn exchange_identity() {
        let root = Seed::principal(markov()).unwrap();
        let s = root.mutate_along(&Word::reduced([0, 1, 2, 0])).unwrap();
        for k in 0..3 {
            let next = s.mutate(k).unwrap();
            assert_eq!(
                next.cluster()[k].mul(&s.cluster()[k]).unwrap(),
                s.exchange_numerator(k).unwrap()
            );
        }
    }

    #[test]
    fn laurent_violation_is_reported() {
        // Seed whose "cluster" is not free: x_1 replaced by x_1 + x_2 at root.
        let root = Seed::coefficient_free(a2()).unwrap();
        let mut bogus = root.clone();
        bogus.cluster[0] = Arc::new(poly(2, 0, &[(1, &[1, 0], &[]), (1, &[0, 1], &[])]));
        match bogus.mutate(0) {
            Err(Error::LaurentViolation { direction: 0, .. }) => {}
            other => panic!("expected a Laurent violation, got {other:?}"),
        }
    }

    fn arb_matrix() -> impl Strategy<Value = ExchangeMatrix> {
        (2usize..5)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec(1i64..3, n),
                    prop::collection::vec(-2i64..3, n * n),
                )
            })
            .prop_filter_map("bounded entries", |(d, raw)| {
                let n = d.len();
                let mut rows = vec![vec![0i64; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        let l = d[i] * d[j] / d[i].gcd(&d[j]);
                        let c = raw[i * n + j] * l;
                        rows[i][j] = c / d[i];
                        rows[j][i] = -c / d[j];
                    }
                }
                if rows.iter().flatten().any(|v| v.abs() > 3) {
                    return None;
                }
                ExchangeMatrix::new(rows).ok()
            })
    }

    proptest! {
        #[test]
        fn matrix_mutation_is_involutive_and_keeps_symmetrizer(b in arb_matrix(), k in 0usize..4) {
            let k = k % b.rank();
            let once = b.mutate(k).unwrap();
            prop_assert!(once.is_skew_symmetrized_by(b.symmetrizer()));
            prop_assert_eq!(once.mutate(k).unwrap(), b);
        }

        #[test]
        fn seed_mutation_is_involutive(b in arb_matrix(), k in 0usize..4, w in prop::collection::vec(0usize..4, 0..3)) {
            let n = b.rank();
            let root = Seed::principal(b).unwrap();
            let s = root.mutate_along(&Word::reduced(w.into_iter().map(|k| k % n))).unwrap();
            let k = k % n;
            prop_assert_eq!(s.mutate(k).unwrap().mutate(k).unwrap(), s);
        }
    }
}
