//! Finite-instance checks over explored patterns and imported expansion
//! tables.
//!
//! Every check takes a [`ClusterFamily`], the common view of an
//! [`ExploredPattern`] and an [`ExpansionTable`]: a set of labeled clusters
//! together with expansions of each cluster relative to a reference cluster.
//! Checks return a [`VerificationReport`]; a failing report always carries at
//! least one witness, a passing one the number of checks performed.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{format_term, parse_term, Exponent, LaurentPoly};
use crate::linalg::{bareiss_rank, IntMatrix};
use crate::pattern::{
    check_nonnegative, d_vector, g_matrix_of, ExploredPattern, VarId, VariableRegistry,
    MAX_CANONICAL_RANK,
};
use crate::seed::{join, ExchangeMatrix, Seed};
use crate::semifield::TropMonomial;
use crate::word::Word;

/// Expansions of every available cluster relative to the cluster at
/// `reference`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub reference: Word,
    clusters: FxHashMap<Word, Vec<Arc<LaurentPoly>>>,
}

impl Frame {
    /// The cluster at `t`, or `None` when it was not supplied.
    pub fn cluster(&self, t: &Word) -> Option<&[Arc<LaurentPoly>]> {
        self.clusters.get(t).map(Vec::as_slice)
    }
}

/// Labeled clusters with expansions relative to any of them.
pub trait ClusterFamily: Sync {
    fn rank(&self) -> usize;
    fn coeff_rank(&self) -> usize;
    /// Vertex labels in breadth-first order, root first.
    fn labels(&self) -> &[Word];
    fn variable_ids(&self, t: &Word) -> Result<&[VarId]>;
    fn registry(&self) -> &VariableRegistry;
    fn frame(&self, t0: &Word) -> Result<Arc<Frame>>;
    fn is_closed(&self) -> bool;
}

impl ClusterFamily for ExploredPattern {
    fn rank(&self) -> usize {
        ExploredPattern::rank(self)
    }

    fn coeff_rank(&self) -> usize {
        ExploredPattern::coeff_rank(self)
    }

    fn labels(&self) -> &[Word] {
        self.words()
    }

    fn variable_ids(&self, t: &Word) -> Result<&[VarId]> {
        Ok(&self.vertex(t)?.variables)
    }

    fn registry(&self) -> &VariableRegistry {
        self.variables()
    }

    fn frame(&self, t0: &Word) -> Result<Arc<Frame>> {
        let rebased = if t0.is_empty() {
            None
        } else {
            Some(self.rebase(t0)?)
        };
        let mut clusters = FxHashMap::default();
        for w in self.words() {
            let seed = match &rebased {
                None => self.seed_at(w)?,
                Some(f) => f.seed_at(&t0.path_to(w))?,
            };
            clusters.insert(w.clone(), seed.cluster().to_vec());
        }
        Ok(Arc::new(Frame {
            reference: t0.clone(),
            clusters,
        }))
    }

    fn is_closed(&self) -> bool {
        ExploredPattern::is_closed(self)
    }
}

/// Exchange matrix entries and coefficients of a seed in a fixed ordering.
type RootKey = (Vec<i64>, Vec<TropMonomial>);

/// Frames of an explored pattern computed through a shared memo.
///
/// The frame at `t0` depends only on the seed data `(B, Y)` at `t0`, up to a
/// simultaneous permutation of positions that also relabels directions and
/// root variables. Reference seeds are brought to a canonical ordering (for
/// rank at most [`MAX_CANONICAL_RANK`]) and every path from a canonical root
/// is mutated once, however many frames and symmetric paths need it.
pub struct Memoized<'a> {
    pattern: &'a ExploredPattern,
    classes: Mutex<FxHashMap<RootKey, usize>>,
    roots: Mutex<Vec<Seed>>,
    memo: Mutex<FxHashMap<(usize, Word), Seed>>,
}

impl<'a> Memoized<'a> {
    pub fn new(pattern: &'a ExploredPattern) -> Self {
        Memoized {
            pattern,
            classes: Mutex::new(FxHashMap::default()),
            roots: Mutex::new(Vec::new()),
            memo: Mutex::new(FxHashMap::default()),
        }
    }

    /// Class of the seed data at `t0`, and every `σ` that realizes its
    /// canonical form: position `i` of the canonical seed is position `σ(i)`
    /// of the seed at `t0`.
    fn classify(&self, t0: &Word) -> Result<(usize, Vec<Vec<usize>>)> {
        let seed = self.pattern.seed_at(t0)?;
        let n = seed.rank();
        let key_of = |sigma: &[usize]| {
            (
                seed.matrix().permuted(sigma),
                sigma
                    .iter()
                    .map(|&i| seed.coeffs()[i].clone())
                    .collect::<Vec<_>>(),
            )
        };
        let identity: Vec<usize> = (0..n).collect();
        let mut best = key_of(&identity);
        let mut realizing = vec![identity];
        if n <= MAX_CANONICAL_RANK {
            for sigma in permutations(n).into_iter().skip(1) {
                let key = key_of(&sigma);
                match key.cmp(&best) {
                    std::cmp::Ordering::Less => {
                        best = key;
                        realizing = vec![sigma];
                    }
                    std::cmp::Ordering::Equal => realizing.push(sigma),
                    std::cmp::Ordering::Greater => {}
                }
            }
        }
        let mut classes = self.classes.lock().expect("class table");
        if let Some(&c) = classes.get(&best) {
            return Ok((c, realizing));
        }
        let (rows, coeffs) = best.clone();
        let rows: Vec<Vec<i64>> = rows.chunks(n.max(1)).take(n).map(<[i64]>::to_vec).collect();
        let root = Seed::root(ExchangeMatrix::new(rows)?, coeffs)?;
        let mut roots = self.roots.lock().expect("class roots");
        roots.push(root);
        classes.insert(best, roots.len() - 1);
        Ok((roots.len() - 1, realizing))
    }

    fn seed_along(&self, class: usize, u: &Word) -> Result<Seed> {
        if let Some(s) = self
            .memo
            .lock()
            .expect("path memo")
            .get(&(class, u.clone()))
        {
            return Ok(s.clone());
        }
        let s = match (u.parent(), u.last()) {
            (Some(parent), Some(k)) => self.seed_along(class, &parent)?.mutate(k)?,
            _ => self.roots.lock().expect("class roots")[class].clone(),
        };
        self.memo
            .lock()
            .expect("path memo")
            .insert((class, u.clone()), s.clone());
        Ok(s)
    }
}

/// All permutations of `0..n`, identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(0..n).collect::<Vec<usize>>()];
    loop {
        let mut p = out.last().expect("nonempty").clone();
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p);
    }
}

/// `p` with root variable `i` renamed to `sigma[i]`.
fn relabel(p: &Arc<LaurentPoly>, sigma: &[usize]) -> Result<Arc<LaurentPoly>> {
    if sigma.iter().enumerate().all(|(i, &s)| i == s) {
        return Ok(p.clone());
    }
    let terms = p.terms().map(|(e, c)| {
        let mut x = vec![0; sigma.len()];
        for (i, &v) in e.x().iter().enumerate() {
            x[sigma[i]] = v;
        }
        (Exponent::new(x, e.y().to_vec()), c.clone())
    });
    Ok(Arc::new(LaurentPoly::from_terms(p.n(), p.m(), terms)?))
}

impl ClusterFamily for Memoized<'_> {
    fn rank(&self) -> usize {
        self.pattern.rank()
    }
    fn coeff_rank(&self) -> usize {
        self.pattern.coeff_rank()
    }
    fn labels(&self) -> &[Word] {
        self.pattern.words()
    }
    fn variable_ids(&self, t: &Word) -> Result<&[VarId]> {
        Ok(&self.pattern.vertex(t)?.variables)
    }
    fn registry(&self) -> &VariableRegistry {
        self.pattern.variables()
    }
    fn frame(&self, t0: &Word) -> Result<Arc<Frame>> {
        let (class, realizing) = self.classify(t0)?;
        let n = self.pattern.rank();
        let mut clusters = FxHashMap::default();
        for w in self.pattern.words() {
            let u = t0.path_to(w);
            // Among the realizing orderings, use the one giving the least word.
            let (sigma, canonical) = realizing
                .iter()
                .map(|sigma| {
                    let mut inv = vec![0; n];
                    for (i, &s) in sigma.iter().enumerate() {
                        inv[s] = i;
                    }
                    let mapped = Word::new(u.directions().iter().map(|&k| inv[k]).collect())
                        .expect("relabeling keeps words reduced");
                    (sigma, mapped)
                })
                .min_by(|a, b| a.1.cmp(&b.1))
                .expect("at least the identity");
            let seed = self.seed_along(class, &canonical)?;
            let mut cluster: Vec<Option<Arc<LaurentPoly>>> = vec![None; n];
            for (i, x) in seed.cluster().iter().enumerate() {
                cluster[sigma[i]] = Some(relabel(x, sigma)?);
            }
            clusters.insert(
                w.clone(),
                cluster
                    .into_iter()
                    .map(|x| x.expect("permutation"))
                    .collect(),
            );
        }
        Ok(Arc::new(Frame {
            reference: t0.clone(),
            clusters,
        }))
    }
    fn is_closed(&self) -> bool {
        self.pattern.is_closed()
    }
}

/// Cluster expansions read from text rather than computed.
///
/// ```text
/// expansions n=2 m=2
/// @ t=1 ref=- i=1
/// 1  x:-1,1  y:0,0
/// 1  x:-1,0  y:1,0
/// ```
///
/// Every labeled cluster must be supplied relative to the root `-`; those
/// expansions define the variable registry. Other reference clusters are
/// optional, and pairs that are absent are simply not available to checks.
#[derive(Debug, Clone)]
pub struct ExpansionTable {
    n: usize,
    m: usize,
    labels: Vec<Word>,
    entries: BTreeMap<(Word, Word), Vec<Arc<LaurentPoly>>>,
    ids: FxHashMap<Word, Vec<VarId>>,
    registry: VariableRegistry,
}

impl ExpansionTable {
    pub fn from_entries(
        n: usize,
        m: usize,
        entries: BTreeMap<(Word, Word), Vec<Arc<LaurentPoly>>>,
    ) -> Result<Self> {
        let mut labels: Vec<Word> = entries.keys().map(|(t, _)| t.clone()).collect();
        labels.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        labels.dedup();
        for ((t, r), cluster) in &entries {
            t.check_rank(n)?;
            r.check_rank(n)?;
            if cluster.len() != n {
                return Err(Error::Invalid(format!(
                    "cluster {t} relative to {r} has {} of {n} expansions",
                    cluster.len()
                )));
            }
            for x in cluster {
                Error::check_len(n, x.n())?;
                Error::check_len(m, x.m())?;
            }
        }
        let mut registry = VariableRegistry::default();
        let mut ids = FxHashMap::default();
        let root = Word::root();
        for t in &labels {
            let cluster = entries.get(&(t.clone(), root.clone())).ok_or_else(|| {
                Error::Invalid(format!("cluster {t} lacks its expansion relative to -"))
            })?;
            let v: Vec<VarId> = cluster.iter().map(|x| registry.insert(x.clone())).collect();
            ids.insert(t.clone(), v);
        }
        Ok(ExpansionTable {
            n,
            m,
            labels,
            entries,
            ids,
            registry,
        })
    }

    /// Exports the frames of `family` at each of `references`.
    pub fn from_family(family: &impl ClusterFamily, references: &[Word]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut refs = vec![Word::root()];
        refs.extend(references.iter().filter(|r| !r.is_empty()).cloned());
        for r in &refs {
            let frame = family.frame(r)?;
            for t in family.labels() {
                if let Some(c) = frame.cluster(t) {
                    entries.insert((t.clone(), r.clone()), c.to_vec());
                }
            }
        }
        Self::from_entries(family.rank(), family.coeff_rank(), entries)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty expansion table".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("expansions") {
            return Err(Error::Parse(format!("bad table header {header:?}")));
        }
        let mut n = None;
        let mut m = None;
        for f in fields {
            match f.split_once('=') {
                Some(("n", v)) => n = v.parse().ok(),
                Some(("m", v)) => m = v.parse().ok(),
                _ => return Err(Error::Parse(format!("bad table header field {f:?}"))),
            }
        }
        let (Some(n), Some(m)) = (n, m) else {
            return Err(Error::Parse(format!(
                "table header {header:?} needs n= and m="
            )));
        };

        let mut raw: BTreeMap<(Word, Word), BTreeMap<usize, Vec<(Exponent, BigInt)>>> =
            BTreeMap::new();
        let mut current: Option<(Word, Word, usize)> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix('@') {
                let (mut t, mut r, mut i) = (None, None, None);
                for f in rest.split_whitespace() {
                    match f.split_once('=') {
                        Some(("t", v)) => t = Some(v.parse::<Word>()?),
                        Some(("ref", v)) => r = Some(v.parse::<Word>()?),
                        Some(("i", v)) => i = v.parse::<usize>().ok(),
                        _ => return Err(Error::Parse(format!("bad entry field {f:?}"))),
                    }
                }
                let (Some(t), Some(r), Some(i)) = (t, r, i) else {
                    return Err(Error::Parse(format!(
                        "entry line {line:?} needs t=, ref= and i="
                    )));
                };
                if i == 0 || i > n {
                    return Err(Error::Parse(format!("position {i} out of range 1..={n}")));
                }
                let slot = raw.entry((t.clone(), r.clone())).or_default();
                if slot.insert(i - 1, Vec::new()).is_some() {
                    return Err(Error::Parse(format!("duplicate entry t={t} ref={r} i={i}")));
                }
                current = Some((t, r, i - 1));
                continue;
            }
            let Some((t, r, i)) = &current else {
                return Err(Error::Parse(format!("term line {line:?} before any entry")));
            };
            let term = parse_term(n, m, line)?;
            raw.get_mut(&(t.clone(), r.clone()))
                .and_then(|s| s.get_mut(i))
                .expect("entry opened above")
                .push(term);
        }
        let mut entries = BTreeMap::new();
        for (key, slots) in raw {
            if slots.len() != n {
                return Err(Error::Invalid(format!(
                    "cluster {} relative to {} has {} of {n} expansions",
                    key.0,
                    key.1,
                    slots.len()
                )));
            }
            let cluster = slots
                .into_values()
                .map(|terms| LaurentPoly::from_terms(n, m, terms).map(Arc::new))
                .collect::<Result<Vec<_>>>()?;
            entries.insert(key, cluster);
        }
        Self::from_entries(n, m, entries)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("expansions n={} m={}\n", self.n, self.m);
        for ((t, r), cluster) in &self.entries {
            for (i, x) in cluster.iter().enumerate() {
                let _ = writeln!(s, "@ t={t} ref={r} i={}", i + 1);
                s.push_str(&x.to_text());
            }
        }
        s
    }

    pub fn entries(&self) -> &BTreeMap<(Word, Word), Vec<Arc<LaurentPoly>>> {
        &self.entries
    }
}

impl ClusterFamily for ExpansionTable {
    fn rank(&self) -> usize {
        self.n
    }
    fn coeff_rank(&self) -> usize {
        self.m
    }
    fn labels(&self) -> &[Word] {
        &self.labels
    }
    fn variable_ids(&self, t: &Word) -> Result<&[VarId]> {
        self.ids
            .get(t)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::NotExplored(t.clone()))
    }
    fn registry(&self) -> &VariableRegistry {
        &self.registry
    }
    fn frame(&self, t0: &Word) -> Result<Arc<Frame>> {
        if !self.ids.contains_key(t0) {
            return Err(Error::NotExplored(t0.clone()));
        }
        let clusters = self
            .entries
            .iter()
            .filter(|((_, r), _)| r == t0)
            .map(|((t, _), c)| (t.clone(), c.clone()))
            .collect();
        Ok(Arc::new(Frame {
            reference: t0.clone(),
            clusters,
        }))
    }
    fn is_closed(&self) -> bool {
        false
    }
}

/// The cluster monomial `x_t^a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterMonomial {
    word: Word,
    exponent: Vec<i64>,
}

impl ClusterMonomial {
    pub fn new(word: Word, exponent: Vec<i64>) -> Result<Self> {
        check_nonnegative(&exponent)?;
        Ok(ClusterMonomial { word, exponent })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn exponent(&self) -> &[i64] {
        &self.exponent
    }

    pub fn degree(&self) -> i64 {
        self.exponent.iter().sum()
    }

    /// Sorted `(variable, exponent)` pairs with positive exponent; two
    /// monomials are the same element iff their keys agree.
    pub fn key(&self, family: &impl ClusterFamily) -> Result<Vec<(VarId, i64)>> {
        let ids = family.variable_ids(&self.word)?;
        Error::check_len(ids.len(), self.exponent.len())?;
        let mut key: Vec<(VarId, i64)> = ids
            .iter()
            .zip(&self.exponent)
            .filter(|(_, &a)| a > 0)
            .map(|(&id, &a)| (id, a))
            .collect();
        key.sort_unstable();
        Ok(key)
    }

    /// Expansion relative to the reference cluster of `frame`.
    pub fn expand(&self, frame: &Frame) -> Result<LaurentPoly> {
        let cluster = frame
            .cluster(&self.word)
            .ok_or_else(|| Error::NotExplored(self.word.clone()))?;
        Error::check_len(cluster.len(), self.exponent.len())?;
        let (n, m) = (cluster[0].n(), cluster[0].m());
        let mut out = LaurentPoly::one(n, m);
        for (x, &a) in cluster.iter().zip(&self.exponent) {
            if a > 0 {
                out = out.mul(&x.pow(a as u64)?)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ClusterMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x[{}]^({})", self.word, join(&self.exponent))
    }
}

/// All monomials of total degree at most `max_degree` at each of `words`,
/// degree first, then exponents in lexicographic order.
pub fn cluster_monomials(words: &[Word], n: usize, max_degree: usize) -> Vec<ClusterMonomial> {
    let mut exps: Vec<Vec<i64>> = Vec::new();
    for d in 0..=max_degree {
        let mut level = Vec::new();
        compositions(n, d as i64, &mut Vec::new(), &mut level);
        level.sort_by(|a, b| b.cmp(a));
        exps.extend(level);
    }
    words
        .iter()
        .flat_map(|w| {
            exps.iter().map(move |a| ClusterMonomial {
                word: w.clone(),
                exponent: a.clone(),
            })
        })
        .collect()
}

fn compositions(parts: usize, total: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for v in 0..=total {
        prefix.push(v);
        compositions(parts - 1, total - v, prefix, out);
        prefix.pop();
    }
}

/// Every ordered pair `(t, t0)` of labels.
pub fn all_pairs(family: &impl ClusterFamily) -> Vec<(Word, Word)> {
    let labels = family.labels();
    labels
        .iter()
        .flat_map(|t0| labels.iter().map(move |t| (t.clone(), t0.clone())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Positive,
    DPositive,
    ProperLaurent,
    LinIndep,
    GInjective,
    GUnimodular,
    GComposition,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Positive => "positive",
            Property::DPositive => "d-positive",
            Property::ProperLaurent => "proper-laurent",
            Property::LinIndep => "lin-indep",
            Property::GInjective => "g-injective",
            Property::GUnimodular => "g-unimodular",
            Property::GComposition => "g-composition",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scope {
    pub vertices: usize,
    pub references: Vec<String>,
    pub monomials: usize,
    pub degree: Option<usize>,
}

/// One offending item: where it lives, what it is, and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub word: String,
    pub reference: String,
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub property: Property,
    pub scope: Scope,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub checks: usize,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(
        property: Property,
        scope: Scope,
        witnesses: Vec<Witness>,
        checks: usize,
        notes: Vec<String>,
    ) -> Self {
        let verdict = if witnesses.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        VerificationReport {
            property,
            scope,
            verdict,
            witnesses,
            checks,
            notes,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Sets the degree bound recorded in the scope.
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.scope.degree = Some(degree);
        self
    }

    /// `#`-prefixed summary followed by one row per witness.
    pub fn to_tsv(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        let mut s = String::new();
        let _ = writeln!(s, "# property\t{}", self.property);
        let _ = writeln!(s, "# verdict\t{verdict}");
        let _ = writeln!(s, "# checks\t{}", self.checks);
        let _ = writeln!(s, "# vertices\t{}", self.scope.vertices);
        let _ = writeln!(s, "# references\t{}", self.scope.references.join(" "));
        let _ = writeln!(s, "# monomials\t{}", self.scope.monomials);
        if let Some(d) = self.scope.degree {
            let _ = writeln!(s, "# degree\t{d}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "# note\t{note}");
        }
        s.push_str("word\treference\tsubject\tdetail\n");
        for w in &self.witnesses {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}",
                w.word, w.reference, w.subject, w.detail
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn witness(
    word: &Word,
    reference: &Word,
    subject: impl Into<String>,
    detail: impl Into<String>,
) -> Witness {
    Witness {
        word: word.to_string(),
        reference: reference.to_string(),
        subject: subject.into(),
        detail: detail.into(),
    }
}

fn variable_name(i: usize, t: &Word) -> String {
    format!("x_{};{t}", i + 1)
}

/// Distinct references of `pairs` in first-appearance order, each with the
/// words to inspect in its frame.
fn group_by_reference(pairs: &[(Word, Word)]) -> Vec<(Word, Vec<Word>)> {
    let mut order: Vec<(Word, Vec<Word>)> = Vec::new();
    let mut index: FxHashMap<Word, usize> = FxHashMap::default();
    for (t, t0) in pairs {
        let i = *index.entry(t0.clone()).or_insert_with(|| {
            order.push((t0.clone(), Vec::new()));
            order.len() - 1
        });
        order[i].1.push(t.clone());
    }
    order
}

fn scope_of(family: &impl ClusterFamily, references: Vec<String>, monomials: usize) -> Scope {
    Scope {
        vertices: family.labels().len(),
        references,
        monomials,
        degree: None,
    }
}

/// Runs `f` on each reference frame in parallel and concatenates the results
/// in reference order.
fn per_reference<F, T>(
    family: &F,
    references: &[Word],
    f: impl Fn(&Frame) -> Result<(Vec<Witness>, usize, Vec<T>)> + Sync,
) -> Result<(Vec<Witness>, usize, Vec<T>)>
where
    F: ClusterFamily,
    T: Send,
{
    let parts: Vec<Result<(Vec<Witness>, usize, Vec<T>)>> = references
        .par_iter()
        .map(|t0| f(&*family.frame(t0)?))
        .collect();
    let mut witnesses = Vec::new();
    let mut checks = 0;
    let mut extra = Vec::new();
    for part in parts {
        let (w, c, e) = part?;
        witnesses.extend(w);
        checks += c;
        extra.extend(e);
    }
    Ok((witnesses, checks, extra))
}

fn unavailable_note(count: usize) -> Vec<String> {
    if count == 0 {
        Vec::new()
    } else {
        vec![format!("{count} clusters not supplied, skipped")]
    }
}

/// Positivity of every expansion of `X_t` relative to `X_{t0}` over `pairs`
/// of `(t, t0)`.
pub fn check_positive(
    family: &impl ClusterFamily,
    pairs: &[(Word, Word)],
) -> Result<VerificationReport> {
    let groups = group_by_reference(pairs);
    let references: Vec<Word> = groups.iter().map(|(r, _)| r.clone()).collect();
    let by_ref: FxHashMap<&Word, &Vec<Word>> = groups.iter().map(|(r, ts)| (r, ts)).collect();
    let (witnesses, checks, missing) = per_reference(family, &references, |frame| {
        let mut ws = Vec::new();
        let mut checks = 0;
        let mut missing = Vec::new();
        for t in by_ref[&frame.reference] {
            let Some(cluster) = frame.cluster(t) else {
                missing.push(());
                continue;
            };
            for (i, x) in cluster.iter().enumerate() {
                checks += 1;
                if let Some((e, c)) = x.first_nonpositive_term() {
                    ws.push(witness(
                        t,
                        &frame.reference,
                        variable_name(i, t),
                        format_term(&e, &c),
                    ));
                }
            }
        }
        Ok((ws, checks, missing))
    })?;
    let scope = scope_of(family, references.iter().map(Word::to_string).collect(), 0);
    Ok(VerificationReport::new(
        Property::Positive,
        scope,
        witnesses,
        checks,
        unavailable_note(missing.len()),
    ))
}

/// First label (in family order) whose cluster contains each variable, with
/// its position.
fn locations(family: &impl ClusterFamily) -> Result<FxHashMap<VarId, (Word, usize)>> {
    let mut out = FxHashMap::default();
    for t in family.labels() {
        for (i, &id) in family.variable_ids(t)?.iter().enumerate() {
            out.entry(id).or_insert_with(|| (t.clone(), i));
        }
    }
    Ok(out)
}

/// For each reference `t` and variable `z`: `z ∈ X_t`, or the d-vector of
/// `z` relative to `X_t` is nonnegative.
pub fn check_d_positive(
    family: &impl ClusterFamily,
    variables: &[VarId],
    references: &[Word],
) -> Result<VerificationReport> {
    let loc = locations(family)?;
    for z in variables {
        if !loc.contains_key(z) {
            return Err(Error::UnknownVariable(*z));
        }
    }
    let (witnesses, checks, missing) = per_reference(family, references, |frame| {
        let t = &frame.reference;
        let here: FxHashSet<VarId> = family.variable_ids(t)?.iter().copied().collect();
        let mut ws = Vec::new();
        let mut checks = 0;
        let mut missing = Vec::new();
        for z in variables {
            if here.contains(z) {
                checks += 1;
                continue;
            }
            let (w, i) = &loc[z];
            let Some(cluster) = frame.cluster(w) else {
                missing.push(());
                continue;
            };
            checks += 1;
            let d = d_vector(&cluster[*i])?;
            if d.iter().any(|&v| v < 0) {
                ws.push(witness(
                    t,
                    t,
                    format!("z{z} = {}", variable_name(*i, w)),
                    format!("d = ({})", join(&d)),
                ));
            }
        }
        Ok((ws, checks, missing))
    })?;
    let scope = scope_of(family, references.iter().map(Word::to_string).collect(), 0);
    Ok(VerificationReport::new(
        Property::DPositive,
        scope,
        witnesses,
        checks,
        unavailable_note(missing.len()),
    ))
}

/// Every monomial outside `CM(t0)` expands with only proper terms relative to
/// `X_{t0}`; monomials inside `CM(t0)` are skipped and counted as passing.
pub fn check_proper_laurent(
    family: &impl ClusterFamily,
    t0: &Word,
    monomials: &[ClusterMonomial],
) -> Result<VerificationReport> {
    let frame = family.frame(t0)?;
    let here: FxHashSet<VarId> = family.variable_ids(t0)?.iter().copied().collect();
    let results: Vec<Result<Option<Witness>>> = monomials
        .par_iter()
        .map(|mono| {
            let key = mono.key(family)?;
            if key.iter().all(|(id, _)| here.contains(id)) {
                return Ok(None);
            }
            let p = mono.expand(&frame)?;
            Ok(p.first_improper_term()
                .map(|(e, c)| witness(mono.word(), t0, mono.to_string(), format_term(&e, &c))))
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        witnesses.extend(r?);
    }
    let scope = scope_of(family, vec![t0.to_string()], monomials.len());
    Ok(VerificationReport::new(
        Property::ProperLaurent,
        scope,
        witnesses,
        monomials.len(),
        Vec::new(),
    ))
}

/// Small primes substituted for the coefficient generators.
const SPECIALIZATION: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Linear independence over the coefficient ring of the distinct monomials,
/// expanded relative to `X_{t0}`.
///
/// Rows are monomials, columns are x-exponents, entries are Laurent
/// polynomials in the coefficient generators. The rank is certified full by
/// an integer specialization of those generators when it stays full there;
/// otherwise it is computed exactly over the Laurent entries.
pub fn check_linear_independence(
    family: &impl ClusterFamily,
    t0: &Word,
    monomials: &[ClusterMonomial],
) -> Result<VerificationReport> {
    let frame = family.frame(t0)?;
    let mut seen: FxHashMap<Vec<(VarId, i64)>, usize> = FxHashMap::default();
    let mut distinct: Vec<&ClusterMonomial> = Vec::new();
    let mut notes = Vec::new();
    for mono in monomials {
        let key = mono.key(family)?;
        match seen.get(&key) {
            Some(&first) => notes.push(format!("duplicate {mono} of {}", distinct[first])),
            None => {
                seen.insert(key, distinct.len());
                distinct.push(mono);
            }
        }
    }
    let expansions: Vec<LaurentPoly> = distinct
        .par_iter()
        .map(|m| m.expand(&frame))
        .collect::<Result<_>>()?;

    let m = family.coeff_rank();
    let mut columns: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for p in &expansions {
        for (e, _) in p.terms() {
            let next = columns.len();
            columns.entry(e.x().to_vec()).or_insert(next);
        }
    }
    let mut rows: Vec<Vec<Vec<(Vec<i64>, BigInt)>>> = Vec::with_capacity(expansions.len());
    let mut min_y = 0i64;
    for p in &expansions {
        let mut row = vec![Vec::new(); columns.len()];
        for (e, c) in p.terms() {
            min_y = e.y().iter().copied().fold(min_y, i64::min);
            row[columns[e.x()]].push((e.y().to_vec(), c.clone()));
        }
        rows.push(row);
    }

    let target = distinct.len();
    let shift = -min_y;
    let specialized: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|entry| {
                    entry
                        .iter()
                        .map(|(y, c)| {
                            y.iter()
                                .zip(SPECIALIZATION.iter().cycle())
                                .fold(c.clone(), |acc, (&b, &p)| {
                                    acc * BigInt::from(p).pow((b + shift) as u32)
                                })
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut rank = bareiss_rank(specialized);
    if rank < target && m > 0 {
        notes.push("specialization dropped rank, recomputed over Laurent entries".into());
        let exact: Vec<Vec<LaurentPoly>> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|entry| {
                        LaurentPoly::from_terms(
                            0,
                            m,
                            entry
                                .into_iter()
                                .map(|(y, c)| (Exponent::new(Vec::new(), y), c)),
                        )
                    })
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        rank = bareiss_rank(exact);
    }
    let witnesses = if rank < target {
        vec![witness(
            &Word::root(),
            t0,
            "rank",
            format!("rank {rank} < {target} distinct monomials"),
        )]
    } else {
        Vec::new()
    };
    notes.insert(0, format!("rank {rank} of {target} distinct monomials"));
    let scope = scope_of(family, vec![t0.to_string()], monomials.len());
    Ok(VerificationReport::new(
        Property::LinIndep,
        scope,
        witnesses,
        target,
        notes,
    ))
}

/// Monomials with equal g-vectors relative to `X_{t0}` have equal expansions.
pub fn check_g_injective(
    family: &impl ClusterFamily,
    t0: &Word,
    monomials: &[ClusterMonomial],
) -> Result<VerificationReport> {
    let frame = family.frame(t0)?;
    let mut g_matrices: FxHashMap<&Word, IntMatrix> = FxHashMap::default();
    for mono in monomials {
        if !g_matrices.contains_key(mono.word()) {
            let cluster = frame
                .cluster(mono.word())
                .ok_or_else(|| Error::NotExplored(mono.word().clone()))?;
            let g = g_matrix_of(mono.word(), t0, cluster)?;
            g_matrices.insert(mono.word(), g.matrix);
        }
    }
    let mut groups: BTreeMap<Vec<i64>, Vec<&ClusterMonomial>> = BTreeMap::new();
    for mono in monomials {
        let g = g_matrices[mono.word()].mul_vec(mono.exponent())?;
        groups.entry(g).or_default().push(mono);
    }
    let collisions: Vec<(&Vec<i64>, &Vec<&ClusterMonomial>)> =
        groups.iter().filter(|(_, ms)| ms.len() > 1).collect();
    let results: Vec<Result<Vec<Witness>>> = collisions
        .par_iter()
        .map(|(g, ms)| {
            let first = ms[0];
            let first_key = first.key(family)?;
            let mut first_expansion: Option<LaurentPoly> = None;
            let mut ws = Vec::new();
            for other in &ms[1..] {
                if other.key(family)? == first_key {
                    continue;
                }
                if first_expansion.is_none() {
                    first_expansion = Some(first.expand(&frame)?);
                }
                if other.expand(&frame)? != *first_expansion.as_ref().expect("set above") {
                    ws.push(witness(
                        other.word(),
                        t0,
                        other.to_string(),
                        format!("g = ({}) as for {first}, expansions differ", join(g)),
                    ));
                }
            }
            Ok(ws)
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        witnesses.extend(r?);
    }
    let notes = vec![format!("{} distinct g-vectors", groups.len())];
    let scope = scope_of(family, vec![t0.to_string()], monomials.len());
    Ok(VerificationReport::new(
        Property::GInjective,
        scope,
        witnesses,
        monomials.len(),
        notes,
    ))
}

/// `det G_t^{t0} = ±1` for every label `t`.
pub fn check_g_unimodular(family: &impl ClusterFamily, t0: &Word) -> Result<VerificationReport> {
    let frame = family.frame(t0)?;
    let mut witnesses = Vec::new();
    let mut checks = 0;
    let mut missing = 0;
    for t in family.labels() {
        let Some(cluster) = frame.cluster(t) else {
            missing += 1;
            continue;
        };
        let g = g_matrix_of(t, t0, cluster)?;
        let det = g.matrix.determinant()?;
        checks += 1;
        if !det.abs().is_one() {
            witnesses.push(witness(
                t,
                t0,
                format!("G = {}", g.matrix),
                format!("det = {det}"),
            ));
        }
    }
    let scope = scope_of(family, vec![t0.to_string()], 0);
    Ok(VerificationReport::new(
        Property::GUnimodular,
        scope,
        witnesses,
        checks,
        unavailable_note(missing),
    ))
}

/// G-matrix of the cluster at `at` relative to the cluster at `reference`.
fn g_in(family: &impl ClusterFamily, at: &Word, reference: &Word) -> Result<IntMatrix> {
    let frame = family.frame(reference)?;
    let cluster = frame
        .cluster(at)
        .ok_or_else(|| Error::NotExplored(at.clone()))?;
    Ok(g_matrix_of(at, reference, cluster)?.matrix)
}

/// For each triple `(t0, t, t')`: `G_{t'}^{t0} = G_t^{t0} R`, where the
/// columns of `R` are the g-vectors of `X_{t'}` relative to `X_t`.
pub fn check_g_composition(
    family: &impl ClusterFamily,
    triples: &[(Word, Word, Word)],
) -> Result<VerificationReport> {
    let results: Vec<Result<Option<Witness>>> = triples
        .par_iter()
        .map(|(t0, t, t1)| {
            let lhs = g_in(family, t1, t0)?;
            let g = g_in(family, t, t0)?;
            let r = g_in(family, t1, t)?;
            let rhs = g.mul(&r)?;
            Ok((lhs != rhs).then(|| {
                witness(
                    t1,
                    t0,
                    format!("via {t}"),
                    format!("G_t'^t0 = {lhs} but G_t^t0 R = {g} * {r} = {rhs}"),
                )
            }))
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        witnesses.extend(r?);
    }
    let mut refs: Vec<String> = triples.iter().map(|(t0, _, _)| t0.to_string()).collect();
    refs.dedup();
    let scope = scope_of(family, refs, 0);
    Ok(VerificationReport::new(
        Property::GComposition,
        scope,
        witnesses,
        triples.len(),
        Vec::new(),
    ))
}

/// Least tree distance from `t` to a label whose cluster contains `z`. Exact
/// when the family is closed, an upper bound otherwise.
pub fn distance(family: &impl ClusterFamily, z: VarId, t: &Word) -> Result<usize> {
    let mut best = None;
    for w in family.labels() {
        if family.variable_ids(w)?.contains(&z) {
            let d = w.distance(t);
            best = Some(best.map_or(d, |b: usize| b.min(d)));
        }
    }
    best.ok_or(Error::UnknownVariable(z))
}

/// Greedy maximal set of labels that are pairwise positive.
///
/// Starting from the first label, labels are visited in family order and one
/// is kept iff every expansion between it and each kept label, in both
/// directions, is positive. Pairs a table does not supply impose no
/// constraint.
pub fn maximal_positive_subpattern(family: &impl ClusterFamily) -> Result<Vec<Word>> {
    let labels = family.labels();
    let Some(first) = labels.first() else {
        return Ok(Vec::new());
    };
    let mut rows: FxHashMap<Word, FxHashMap<Word, bool>> = FxHashMap::default();
    let mut row = |t0: &Word| -> Result<FxHashMap<Word, bool>> {
        if let Some(r) = rows.get(t0) {
            return Ok(r.clone());
        }
        let frame = family.frame(t0)?;
        let r: FxHashMap<Word, bool> = labels
            .iter()
            .filter_map(|t| {
                frame
                    .cluster(t)
                    .map(|c| (t.clone(), c.iter().all(|x| x.is_positive())))
            })
            .collect();
        rows.insert(t0.clone(), r.clone());
        Ok(r)
    };
    let mut members = vec![first.clone()];
    for v in &labels[1..] {
        let from_v = row(v)?;
        let mut ok = members
            .iter()
            .all(|m| from_v.get(m).copied().unwrap_or(true));
        if ok {
            for m in &members {
                if !row(m)?.get(v).copied().unwrap_or(true) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            members.push(v.clone());
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Budget;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn a2(principal: bool) -> ExploredPattern {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let seed = if principal {
            Seed::principal(b).unwrap()
        } else {
            Seed::coefficient_free(b).unwrap()
        };
        ExploredPattern::explore(seed, Budget::depth(10)).unwrap()
    }

    fn a3(principal: bool) -> ExploredPattern {
        let b = ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        let seed = if principal {
            Seed::principal(b).unwrap()
        } else {
            Seed::coefficient_free(b).unwrap()
        };
        ExploredPattern::explore(seed, Budget::depth(12)).unwrap()
    }

    fn mono(t: &str, a: &[i64]) -> ClusterMonomial {
        ClusterMonomial::new(w(t), a.to_vec()).unwrap()
    }

    fn assert_same_frames(p: &ExploredPattern) {
        let memo = Memoized::new(p);
        for t0 in p.words() {
            let direct = p.frame(t0).unwrap();
            let shared = memo.frame(t0).unwrap();
            for t in p.words() {
                let a = direct.cluster(t).unwrap();
                let b = shared.cluster(t).unwrap();
                assert!(a.iter().zip(b).all(|(x, y)| **x == **y), "t0={t0} t={t}");
            }
        }
    }

    #[test]
    fn memoized_frames_match() {
        assert_same_frames(&a3(true));
        assert_same_frames(&a3(false));
        let markov =
            ExchangeMatrix::new(vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]).unwrap();
        let seed = Seed::coefficient_free(markov).unwrap();
        assert_same_frames(&ExploredPattern::explore(seed, Budget::depth(3)).unwrap());
    }

    /// A2 principal table at the root, with `x_{1;(1)}` replaced by `x_1 - x_2`.
    fn negative_table() -> ExpansionTable {
        let p = a2(true);
        let mut entries = ExpansionTable::from_family(&p, &[])
            .unwrap()
            .entries()
            .clone();
        let bad = LaurentPoly::x_var(2, 2, 0)
            .sub(&LaurentPoly::x_var(2, 2, 1))
            .unwrap();
        entries.get_mut(&(w("1"), w("-"))).unwrap()[0] = Arc::new(bad);
        ExpansionTable::from_entries(2, 2, entries).unwrap()
    }

    #[test]
    fn positivity() {
        let p = a2(true);
        let diagonal: Vec<(Word, Word)> =
            p.words().iter().map(|t| (t.clone(), t.clone())).collect();
        let r = check_positive(&p, &diagonal).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 2 * p.words().len());

        let r = check_positive(&p, &all_pairs(&p)).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
        assert_eq!(r.checks, 2 * 25);

        let table = negative_table();
        let r = check_positive(&table, &all_pairs(&table)).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witnesses.len(), 1);
        let wit = &r.witnesses[0];
        assert_eq!((wit.word.as_str(), wit.reference.as_str()), ("1", "-"));
        assert_eq!(wit.detail, "-1  x:0,1  y:0,0");
        assert_eq!(
            r.notes,
            vec!["20 clusters not supplied, skipped".to_string()]
        );
    }

    #[test]
    fn d_positivity() {
        let p = a3(false);
        let vars: Vec<VarId> = (0..p.variables().len()).collect();
        let r = check_d_positive(&p, &vars, p.words()).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
        assert_eq!(r.checks, 9 * 14);
        assert!(matches!(
            check_d_positive(&p, &[99], p.words()),
            Err(Error::UnknownVariable(99))
        ));
    }

    #[test]
    fn proper_laurent() {
        let p = a2(true);
        let r =
            check_proper_laurent(&p, &w("-"), &[mono("1", &[1, 0]), mono("1", &[0, 0])]).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 2);
        // x_{2;root}^2 lies in CM(root) even though it is named at (1).
        let r = check_proper_laurent(&p, &w("-"), &[mono("1", &[0, 2])]).unwrap();
        assert!(r.passed());

        let q = a3(true);
        let monos: Vec<ClusterMonomial> = cluster_monomials(q.words(), 3, 2);
        let r = check_proper_laurent(&q, &w("-"), &monos).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
    }

    #[test]
    fn linear_independence() {
        let p = a2(false);
        let r = check_linear_independence(&p, &w("-"), &[mono("-", &[1, 0]), mono("-", &[0, 1])])
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 2);

        let all: Vec<ClusterMonomial> = p
            .words()
            .iter()
            .flat_map(|t| [mono(&t.to_string(), &[1, 0]), mono(&t.to_string(), &[0, 1])])
            .collect();
        let r = check_linear_independence(&p, &w("-"), &all).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 5);
        assert_eq!(r.notes[0], "rank 5 of 5 distinct monomials");

        // x_1 at the root and at (2), where position 1 still holds x_1.
        let r = check_linear_independence(&p, &w("-"), &[mono("-", &[1, 0]), mono("2", &[1, 0])])
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 1);
        assert!(r
            .notes
            .iter()
            .any(|n| n.starts_with("duplicate x[2]^(1,0)")));
    }

    #[test]
    fn linear_independence_principal() {
        let p = a2(true);
        let monos = cluster_monomials(p.words(), 2, 2);
        let r = check_linear_independence(&p, &w("-"), &monos).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
        // Five variables; degree two in each of five clusters, distinct: 1 + 5 + 10.
        assert_eq!(r.checks, 16);
    }

    #[test]
    fn g_vector_checks() {
        let p = a2(true);
        let monos = cluster_monomials(p.words(), 2, 3);
        let r = check_g_injective(&p, &w("-"), &monos).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
        let r = check_g_injective(
            &p,
            &w("-"),
            &[mono("-", &[1, 0]), mono("2", &[1, 0]), mono("-", &[0, 1])],
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.notes[0], "2 distinct g-vectors");

        let r = check_g_unimodular(&p, &w("-")).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 5);
        assert_eq!(g_in(&p, &w("-"), &w("-")).unwrap(), IntMatrix::identity(2));
        assert_eq!(
            g_in(&p, &w("1"), &w("-")).unwrap().determinant().unwrap(),
            BigInt::from(-1)
        );

        let triples = vec![
            (w("-"), w("1"), w("1,2")),
            (w("-"), w("-"), w("1,2")),
            (w("-"), w("1"), w("-")),
        ];
        let r = check_g_composition(&p, &triples).unwrap();
        assert!(r.passed(), "{}", r.to_tsv());
        assert_eq!(r.checks, 3);
    }

    #[test]
    fn distances() {
        let p = a2(true);
        let ids = p.vertex(&w("1")).unwrap().variables.clone();
        assert_eq!(distance(&p, ids[0], &w("1")).unwrap(), 0);
        assert_eq!(distance(&p, ids[0], &w("-")).unwrap(), 1);
        assert!(matches!(
            distance(&p, 42, &w("-")),
            Err(Error::UnknownVariable(42))
        ));
    }

    #[test]
    fn maximal_subpattern() {
        let p = a2(true);
        assert_eq!(maximal_positive_subpattern(&p).unwrap(), p.words().to_vec());

        let single = ExploredPattern::explore(p.root().clone(), Budget::depth(0)).unwrap();
        assert_eq!(
            maximal_positive_subpattern(&single).unwrap(),
            vec![Word::root()]
        );

        let table = negative_table();
        let kept = maximal_positive_subpattern(&table).unwrap();
        assert!(!kept.contains(&w("1")));
        assert_eq!(kept.len(), table.labels().len() - 1);
    }

    #[test]
    fn table_round_trip() {
        let p = a2(true);
        let table = ExpansionTable::from_family(&p, &[w("1")]).unwrap();
        let text = table.to_text();
        let back = ExpansionTable::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.labels(), table.labels());
        assert_eq!(back.registry().len(), 5);
        assert!(ExpansionTable::from_text(
            "expansions n=2 m=2\n@ t=1 ref=1 i=1\n1  x:1,0  y:0,0\n"
        )
        .is_err());
    }

    #[test]
    fn reports_render() {
        let table = negative_table();
        let r = check_positive(&table, &[(w("1"), w("-"))]).unwrap();
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("# property\tpositive\n# verdict\tfail\n"));
        assert!(tsv.ends_with("1\t-\tx_1;1\t-1  x:0,1  y:0,0\n"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["verdict"], "fail");
        assert_eq!(json["property"], "positive");
        assert_eq!(json["witnesses"][0]["subject"], "x_1;1");
    }
}
