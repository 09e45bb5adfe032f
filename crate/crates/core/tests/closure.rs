mod common;

use common::{enumerate_clusters, random_point};
use glp::{Budget, ExchangeMatrix, ExploredPattern, Seed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn engine_counts(b: &[Vec<i64>], depth: usize) -> (bool, usize, usize) {
    let seed = Seed::coefficient_free(ExchangeMatrix::new(b.to_vec()).unwrap()).unwrap();
    let r = ExploredPattern::explore(seed, Budget::depth(depth))
        .unwrap()
        .finite_type_report();
    (r.closed, r.cluster_count, r.variable_count)
}

fn oracle_counts(b: &[Vec<i64>], depth: usize) -> Option<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    enumerate_clusters(b.to_vec(), random_point(&mut rng, b.len()), depth)
}

#[test]
fn finite_types_close_at_oracle_counts() {
    let cases: Vec<(&str, Vec<Vec<i64>>, (usize, usize))> = vec![
        ("A1", vec![vec![0]], (2, 2)),
        ("A2", vec![vec![0, 1], vec![-1, 0]], (5, 5)),
        ("B2", vec![vec![0, 2], vec![-1, 0]], (6, 6)),
        ("G2", vec![vec![0, 3], vec![-1, 0]], (8, 8)),
        (
            "A3",
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]],
            (14, 9),
        ),
        // A3 with cyclic orientation: same mutation class.
        (
            "A3 cyclic",
            vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]],
            (14, 9),
        ),
        (
            "B3",
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -2, 0]],
            (20, 12),
        ),
        (
            "A4",
            vec![
                vec![0, 1, 0, 0],
                vec![-1, 0, 1, 0],
                vec![0, -1, 0, 1],
                vec![0, 0, -1, 0],
            ],
            (42, 14),
        ),
        (
            "D4",
            vec![
                vec![0, 1, 1, 1],
                vec![-1, 0, 0, 0],
                vec![-1, 0, 0, 0],
                vec![-1, 0, 0, 0],
            ],
            (50, 16),
        ),
    ];
    for (name, b, expected) in cases {
        let oracle =
            oracle_counts(&b, 20).unwrap_or_else(|| panic!("{name}: oracle did not close"));
        assert_eq!(oracle, expected, "{name}: oracle");
        let (closed, clusters, variables) = engine_counts(&b, 20);
        assert!(closed, "{name}: engine did not close");
        assert_eq!((clusters, variables), expected, "{name}: engine");
    }
}

#[test]
fn infinite_types_stay_truncated() {
    for b in [
        vec![vec![0, 2], vec![-2, 0]],
        vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]],
        vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]],
    ] {
        let (closed, clusters, _) = engine_counts(&b, 4);
        assert!(!closed, "{b:?}");
        assert!(oracle_counts(&b, 4).is_none(), "{b:?}");
        assert!(clusters > 1);
    }
}
