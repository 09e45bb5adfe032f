//! Bounded exploration of a cluster pattern on the n-regular tree.
//!
//! Vertices are reduced words. Exploration is breadth first with directions
//! ascending; a mutated seed whose unlabeled class (orbit under simultaneous
//! permutation of positions) was already seen is recorded as an edge to the
//! existing representative and not expanded further. Exploration is *closed*
//! when every stored vertex has been expanded and no new class appeared.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::IntMatrix;
use crate::seed::Seed;
use crate::semifield::TropMonomial;
use crate::word::Word;

pub type VarId = usize;

/// Largest rank for which unlabeled classes are canonicalized.
pub const MAX_CANONICAL_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_depth: usize,
    pub max_vertices: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 8,
            max_vertices: 20_000,
        }
    }
}

impl Budget {
    pub fn depth(max_depth: usize) -> Self {
        Budget {
            max_depth,
            ..Budget::default()
        }
    }
}

/// Cluster variables keyed by their expansion in the root cluster.
#[derive(Debug, Clone, Default)]
pub struct VariableRegistry {
    index: FxHashMap<Arc<LaurentPoly>, VarId>,
    list: Vec<Arc<LaurentPoly>>,
}

impl VariableRegistry {
    pub fn get(&self, p: &LaurentPoly) -> Option<VarId> {
        self.index.get(p).copied()
    }

    pub fn insert(&mut self, p: Arc<LaurentPoly>) -> VarId {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.list.len();
        self.list.push(p.clone());
        self.index.insert(p, id);
        id
    }

    pub fn expansion(&self, id: VarId) -> Option<&Arc<LaurentPoly>> {
        self.list.get(id)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Orbit-invariant key of a seed under simultaneous permutation of positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SeedKey {
    matrix: Vec<i64>,
    coeffs: Vec<TropMonomial>,
    vars: Vec<VarId>,
}

impl SeedKey {
    fn permuted(seed: &Seed, ids: &[VarId], sigma: &[usize]) -> Self {
        SeedKey {
            matrix: seed.matrix().permuted(sigma),
            coeffs: sigma.iter().map(|&i| seed.coeffs()[i].clone()).collect(),
            vars: sigma.iter().map(|&i| ids[i]).collect(),
        }
    }

    fn labeled(seed: &Seed, ids: &[VarId]) -> Self {
        let sigma: Vec<usize> = (0..ids.len()).collect();
        Self::permuted(seed, ids, &sigma)
    }

    /// Positions are sorted by `(variable id, coefficient)`; the lexicographic
    /// minimum is then taken over the permutations inside each block of ties.
    fn canonical(seed: &Seed, ids: &[VarId]) -> Self {
        let n = ids.len();
        let sig = |i: usize| (ids[i], &seed.coeffs()[i]);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| sig(a).cmp(&sig(b)));
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || sig(order[i]) != sig(order[start]) {
                blocks.push((start, i));
                start = i;
            }
        }
        let mut best = Self::permuted(seed, ids, &order);
        if blocks.iter().all(|(a, b)| b - a == 1) {
            return best;
        }
        let mut sigma = order.clone();
        permute_blocks(&mut sigma, &blocks, 0, &mut |s| {
            let key = Self::permuted(seed, ids, s);
            if key < best {
                best = key;
            }
        });
        best
    }
}

fn permute_blocks(
    sigma: &mut [usize],
    blocks: &[(usize, usize)],
    b: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    let Some(&(lo, hi)) = blocks.get(b) else {
        visit(sigma);
        return;
    };
    heap_permute(sigma, lo, hi - lo, &mut |s| {
        let mut s = s.to_vec();
        permute_blocks(&mut s, blocks, b + 1, visit);
    });
}

/// Heap's algorithm over `sigma[lo..lo + k]`.
fn heap_permute(sigma: &mut [usize], lo: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(sigma);
        return;
    }
    for i in 0..k - 1 {
        heap_permute(sigma, lo, k - 1, visit);
        if k.is_multiple_of(2) {
            sigma.swap(lo + i, lo + k - 1);
        } else {
            sigma.swap(lo, lo + k - 1);
        }
    }
    heap_permute(sigma, lo, k - 1, visit);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub seed: Seed,
    pub variables: Vec<VarId>,
}

/// A mutation edge `from -k-> to`, where `to` is the stored representative of
/// the class reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: Word,
    pub direction: usize,
    pub to: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteTypeReport {
    pub closed: bool,
    pub cluster_count: usize,
    pub variable_count: usize,
}

#[derive(Debug, Clone)]
pub struct ExploredPattern {
    root: Seed,
    vertices: FxHashMap<Word, Vertex>,
    order: Vec<Word>,
    canonical_index: FxHashMap<SeedKey, Word>,
    edges: Vec<Edge>,
    variables: VariableRegistry,
    budget: Budget,
    closed: bool,
}

impl ExploredPattern {
    fn with_root(root: Seed, budget: Budget) -> Self {
        let mut p = ExploredPattern {
            root: root.clone(),
            vertices: FxHashMap::default(),
            order: Vec::new(),
            canonical_index: FxHashMap::default(),
            edges: Vec::new(),
            variables: VariableRegistry::default(),
            budget,
            closed: false,
        };
        p.insert(root);
        p
    }

    fn key(&self, seed: &Seed, ids: &[VarId]) -> SeedKey {
        if seed.rank() <= MAX_CANONICAL_RANK {
            SeedKey::canonical(seed, ids)
        } else {
            SeedKey::labeled(seed, ids)
        }
    }

    /// Stores `seed` unless its class is known; returns the representative.
    fn insert(&mut self, seed: Seed) -> (Word, bool) {
        let known: Option<Vec<VarId>> = seed
            .cluster()
            .iter()
            .map(|x| self.variables.get(x))
            .collect();
        if let Some(ids) = &known {
            if let Some(rep) = self.canonical_index.get(&self.key(&seed, ids)) {
                return (rep.clone(), false);
            }
        }
        let ids: Vec<VarId> = seed
            .cluster()
            .iter()
            .map(|x| self.variables.insert(x.clone()))
            .collect();
        let key = self.key(&seed, &ids);
        let word = seed.word().clone();
        self.canonical_index.insert(key, word.clone());
        self.order.push(word.clone());
        self.vertices.insert(
            word.clone(),
            Vertex {
                seed,
                variables: ids,
            },
        );
        (word, true)
    }

    fn is_known(&self, seed: &Seed) -> Option<Word> {
        let ids: Vec<VarId> = seed
            .cluster()
            .iter()
            .map(|x| self.variables.get(x))
            .collect::<Option<_>>()?;
        self.canonical_index.get(&self.key(seed, &ids)).cloned()
    }

    /// Breadth-first exploration from `root` within `budget`.
    pub fn explore(root: Seed, budget: Budget) -> Result<Self> {
        let n = root.rank();
        let mut p = Self::with_root(root, budget);
        let mut frontier = vec![Word::root()];
        let mut truncated = false;
        let mut depth = 0;
        while !frontier.is_empty() {
            let jobs: Vec<(Word, usize)> = frontier
                .iter()
                .flat_map(|w| {
                    (0..n)
                        .filter(move |&k| w.last() != Some(k))
                        .map(move |k| (w.clone(), k))
                })
                .collect();
            if jobs.is_empty() {
                break;
            }
            if depth == budget.max_depth {
                truncated = true;
                break;
            }
            let children: Vec<Result<Seed>> = jobs
                .par_iter()
                .map(|(w, k)| p.vertices[w].seed.mutate(*k))
                .collect();
            let mut next = Vec::new();
            for ((from, direction), child) in jobs.into_iter().zip(children) {
                let child = child?;
                if let Some(rep) = p.is_known(&child) {
                    p.edges.push(Edge {
                        from,
                        direction,
                        to: rep,
                    });
                    continue;
                }
                if p.vertices.len() >= budget.max_vertices {
                    truncated = true;
                    continue;
                }
                let (to, _) = p.insert(child);
                p.edges.push(Edge {
                    from,
                    direction,
                    to: to.clone(),
                });
                next.push(to);
            }
            frontier = next;
            depth += 1;
        }
        p.closed = !truncated && n <= MAX_CANONICAL_RANK;
        Ok(p)
    }

    pub fn root(&self) -> &Seed {
        &self.root
    }

    pub fn rank(&self) -> usize {
        self.root.rank()
    }

    pub fn coeff_rank(&self) -> usize {
        self.root.coeff_rank()
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Stored vertices in exploration order (root first).
    pub fn words(&self) -> &[Word] {
        &self.order
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn variables(&self) -> &VariableRegistry {
        &self.variables
    }

    pub fn vertex(&self, word: &Word) -> Result<&Vertex> {
        if !word.is_reduced() {
            return Err(Error::UnreducedWord(word.clone()));
        }
        self.vertices
            .get(word)
            .ok_or_else(|| Error::NotExplored(word.clone()))
    }

    pub fn seed_at(&self, word: &Word) -> Result<&Seed> {
        self.vertex(word).map(|v| &v.seed)
    }

    /// The representative word stored for the class of `seed`, if any.
    pub fn representative(&self, seed: &Seed) -> Option<Word> {
        self.is_known(seed)
    }

    pub fn finite_type_report(&self) -> FiniteTypeReport {
        FiniteTypeReport {
            closed: self.closed,
            cluster_count: self.vertices.len(),
            variable_count: self.variables.len(),
        }
    }

    /// Re-expresses the explored region relative to the cluster at `t1`: the
    /// seed at `t1` becomes the root and every stored vertex `w` is recomputed
    /// at the word `t1 → w` by mutating along the stored tree.
    pub fn rebase(&self, t1: &Word) -> Result<ExploredPattern> {
        let base = self.seed_at(t1)?.as_root();
        let mut seeds: FxHashMap<Word, Seed> = FxHashMap::default();
        seeds.insert(t1.clone(), base.clone());
        let mut stack = vec![t1.clone()];
        while let Some(cur) = stack.pop() {
            let mut neighbours: Vec<(Word, usize)> = Vec::new();
            if let (Some(parent), Some(k)) = (cur.parent(), cur.last()) {
                neighbours.push((parent, k));
            }
            for k in 0..self.rank() {
                let child = cur.extended(k);
                if child.len() > cur.len() && self.vertices.contains_key(&child) {
                    neighbours.push((child, k));
                }
            }
            for (w, k) in neighbours {
                if seeds.contains_key(&w) {
                    continue;
                }
                let s = seeds[&cur].mutate(k)?;
                seeds.insert(w.clone(), s);
                stack.push(w);
            }
        }
        let mut relocated: Vec<Seed> = seeds.into_values().collect();
        relocated.sort_by(|a, b| (a.word().len(), a.word()).cmp(&(b.word().len(), b.word())));

        let mut out = ExploredPattern {
            root: base,
            vertices: FxHashMap::default(),
            order: Vec::new(),
            canonical_index: FxHashMap::default(),
            edges: Vec::new(),
            variables: VariableRegistry::default(),
            budget: self.budget,
            closed: self.closed,
        };
        for s in relocated {
            out.insert(s);
        }
        out.edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: t1.path_to(&e.from),
                direction: e.direction,
                to: t1.path_to(&e.to),
            })
            .collect();
        Ok(out)
    }

    /// Expansions of the cluster at `t` in the cluster at `t0`.
    pub fn cluster_in(&self, t: &Word, t0: &Word) -> Result<Vec<Arc<LaurentPoly>>> {
        let here = self.seed_at(t)?;
        if t0.is_empty() {
            return Ok(here.cluster().to_vec());
        }
        let frame = self.rebase(t0)?;
        Ok(frame.seed_at(&t0.path_to(t))?.cluster().to_vec())
    }

    /// D-matrix of the cluster at `t` relative to the cluster at `t0`.
    pub fn d_matrix(&self, t: &Word, t0: &Word) -> Result<DMatrix> {
        let cluster = self.cluster_in(t, t0)?;
        d_matrix_of(t, t0, &cluster)
    }

    /// G-matrix of the cluster at `t` relative to the cluster at `t0`.
    pub fn g_matrix(&self, t: &Word, t0: &Word) -> Result<GMatrix> {
        let cluster = self.cluster_in(t, t0)?;
        g_matrix_of(t, t0, &cluster)
    }

    /// g-vector `G_t^{t0} a` of the cluster monomial `x_t^a`.
    pub fn g_of_monomial(&self, t: &Word, a: &[i64], t0: &Word) -> Result<Vec<i64>> {
        check_nonnegative(a)?;
        Error::check_len(self.rank(), a.len())?;
        self.g_matrix(t, t0)?.matrix.mul_vec(a)
    }

    /// TSV dump, one row per stored vertex: word, variable ids, D-matrix and
    /// G-matrix relative to the root (`-` when not pointed).
    pub fn dump_tsv(&self) -> Result<String> {
        let mut s = String::from("word\tvariables\td_matrix\tg_matrix\n");
        let root = Word::root();
        for w in &self.order {
            let v = &self.vertices[w];
            let ids: Vec<String> = v.variables.iter().map(VarId::to_string).collect();
            let d = d_matrix_of(w, &root, v.seed.cluster())?;
            let g = match g_matrix_of(w, &root, v.seed.cluster()) {
                Ok(g) => g.matrix.to_string(),
                Err(Error::NotPointed { .. }) => "-".to_string(),
                Err(e) => return Err(e),
            };
            let _ = writeln!(s, "{w}\t{}\t{}\t{g}", ids.join(","), d.matrix);
        }
        Ok(s)
    }
}

pub(crate) fn check_nonnegative(a: &[i64]) -> Result<()> {
    if a.iter().any(|&v| v < 0) {
        Err(Error::NegativeExponent(a.to_vec()))
    } else {
        Ok(())
    }
}

/// Matrix of denominator vectors; column `i` belongs to `x_{i;at}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMatrix {
    pub at: Word,
    pub reference: Word,
    pub matrix: IntMatrix,
}

/// Matrix of g-vectors; column `i` belongs to `x_{i;at}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMatrix {
    pub at: Word,
    pub reference: Word,
    pub matrix: IntMatrix,
}

pub fn d_vector(p: &LaurentPoly) -> Result<Vec<i64>> {
    Ok(p.min_x_exponents()?.into_iter().map(|v| -v).collect())
}

pub fn d_matrix_of(at: &Word, reference: &Word, cluster: &[Arc<LaurentPoly>]) -> Result<DMatrix> {
    let cols = cluster
        .iter()
        .map(|x| d_vector(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix {
        at: at.clone(),
        reference: reference.clone(),
        matrix: IntMatrix::from_columns(&cols)?,
    })
}

pub fn g_matrix_of(at: &Word, reference: &Word, cluster: &[Arc<LaurentPoly>]) -> Result<GMatrix> {
    let cols = cluster
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.is_pointed().map_err(|e| match e {
                Error::NotPointed { reason } => Error::NotPointed {
                    reason: format!("x_{};{at} relative to {reference}: {reason}", i + 1),
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GMatrix {
        at: at.clone(),
        reference: reference.clone(),
        matrix: IntMatrix::from_columns(&cols)?,
    })
}
