use std::sync::Arc;

use glp::verify::{
    all_pairs, check_d_positive, check_g_unimodular, check_linear_independence, check_positive,
    cluster_monomials, maximal_positive_subpattern, Memoized,
};
use glp::{
    Budget, ClusterFamily, ExchangeMatrix, ExpansionTable, ExploredPattern, LaurentPoly, Seed, Word,
};

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn a3_principal() -> ExploredPattern {
    let b = ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
    ExploredPattern::explore(Seed::principal(b).unwrap(), Budget::depth(12)).unwrap()
}

#[test]
fn complete_table_behaves_like_the_pattern() {
    let p = a3_principal();
    let table = ExpansionTable::from_family(&p, p.words()).unwrap();
    let back = ExpansionTable::from_text(&table.to_text()).unwrap();
    assert_eq!(back.entries(), table.entries());
    assert_eq!(back.labels(), p.words());
    assert_eq!(back.registry().len(), p.variables().len());
    assert!(!back.is_closed());

    let pairs = all_pairs(&p);
    let direct = check_positive(&Memoized::new(&p), &pairs).unwrap();
    let imported = check_positive(&back, &all_pairs(&back)).unwrap();
    assert!(direct.passed() && imported.passed());
    assert_eq!(direct.checks, imported.checks);
    assert!(imported.notes.is_empty(), "{:?}", imported.notes);

    let vars: Vec<usize> = (0..back.registry().len()).collect();
    assert!(check_d_positive(&back, &vars, back.labels())
        .unwrap()
        .passed());
    assert!(check_g_unimodular(&back, &Word::root()).unwrap().passed());
    let monos = cluster_monomials(back.labels(), 3, 2);
    let li_table = check_linear_independence(&back, &Word::root(), &monos).unwrap();
    let li_direct = check_linear_independence(&p, &Word::root(), &monos).unwrap();
    assert!(li_table.passed());
    assert_eq!(li_table.notes.first(), li_direct.notes.first());
}

#[test]
fn partial_table_skips_missing_frames() {
    let p = a3_principal();
    let table = ExpansionTable::from_family(&p, &[]).unwrap();
    let report = check_positive(&table, &all_pairs(&table)).unwrap();
    assert!(report.passed());
    assert_eq!(report.checks, p.words().len() * 3);
    assert!(
        report
            .notes
            .iter()
            .any(|n| n.ends_with("clusters not supplied, skipped")),
        "{:?}",
        report.notes
    );
}

#[test]
fn tampered_expansion_is_located() {
    let p = a3_principal();
    let target = w("2,1");
    let mut entries = ExpansionTable::from_family(&p, &[])
        .unwrap()
        .entries()
        .clone();
    let slot = &mut entries.get_mut(&(target.clone(), Word::root())).unwrap()[1];
    let negated = LaurentPoly::x_var(3, 3, 0)
        .sub(slot)
        .unwrap()
        .sub(slot)
        .unwrap();
    *slot = Arc::new(negated);
    let table = ExpansionTable::from_entries(3, 3, entries).unwrap();

    let report = check_positive(&table, &all_pairs(&table)).unwrap();
    assert!(!report.passed());
    assert!(
        report
            .witnesses
            .iter()
            .all(|x| x.word == "2,1" && x.subject == "x_2;2,1"),
        "{}",
        report.to_tsv()
    );

    let kept = maximal_positive_subpattern(&table).unwrap();
    assert!(!kept.contains(&target));
    assert!(kept.contains(&Word::root()));
    let clean =
        maximal_positive_subpattern(&ExpansionTable::from_family(&p, &[]).unwrap()).unwrap();
    assert_eq!(clean.len(), p.words().len());
}
