mod common;

use common::{evaluate, random_point, OracleSeed};
use glp::verify::{check_positive, Memoized};
use glp::{Budget, ClusterFamily, ExchangeMatrix, ExploredPattern, Seed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn markov_b() -> Vec<Vec<i64>> {
    vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]
}

fn markov(depth: usize) -> ExploredPattern {
    let seed = Seed::coefficient_free(ExchangeMatrix::new(markov_b()).unwrap()).unwrap();
    ExploredPattern::explore(seed, Budget::depth(depth)).unwrap()
}

#[test]
fn depth_five_region_is_the_full_ball() {
    let p = markov(5);
    assert!(!p.is_closed());
    assert_eq!(p.words().len(), 1 + 3 + 6 + 12 + 24 + 48);
}

#[test]
fn random_frames_follow_substitution() {
    let p = markov(5);
    let family = Memoized::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let xs = random_point(&mut rng, 3);
    let root = OracleSeed::new(markov_b(), vec![Vec::new(); 3], xs.clone(), Vec::new());
    let words = p.words();
    for _ in 0..3 {
        let t0 = &words[rng.gen_range(0..words.len())];
        let t = &words[rng.gen_range(0..words.len())];
        let at_t0 = root.mutate_along(t0);
        let rebased = OracleSeed::new(at_t0.b, at_t0.y, xs.clone(), Vec::new());
        let expected = rebased.mutate_along(&t0.path_to(t));
        let frame = family.frame(t0).unwrap();
        for (i, x) in frame.cluster(t).unwrap().iter().enumerate() {
            assert_eq!(
                evaluate(x, &xs, &[]),
                expected.x[i],
                "x_{};{t} relative to {t0}",
                i + 1
            );
        }
    }
}

#[test]
fn small_region_is_positive() {
    let p = markov(3);
    let report = check_positive(&p, &glp::verify::all_pairs(&p)).unwrap();
    assert!(report.passed(), "{}", report.to_tsv());
    assert_eq!(report.checks, 22 * 22 * 3);
}
