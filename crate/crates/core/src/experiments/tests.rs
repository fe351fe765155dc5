use super::*;
use crate::graph::DiGraph;
use crate::spectral::Tolerances;

#[test]
fn seeds_are_distinct_and_stable() {
    let mut seen = std::collections::HashSet::new();
    for cell in 0..10 {
        for trial in 0..100 {
            assert!(seen.insert(derive_seed(7, cell, trial)));
        }
    }
    assert_eq!(derive_seed(7, 3, 4), derive_seed(7, 3, 4));
    assert_ne!(derive_seed(7, 3, 4), derive_seed(8, 3, 4));
}

#[test]
fn trials_come_back_in_order() {
    let out = run_trials(100, |i| i * i);
    assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
}

#[test]
fn accepted_keeps_attempt_order() {
    let (acc, rej) = collect_accepted(5, 100, |i| if i % 3 == 0 { Err("skip".to_string()) } else { Ok(i) });
    assert_eq!(acc, vec![1, 2, 4, 5, 7]);
    assert_eq!(rej.len(), 3);
    assert_eq!(tally(&rej).get("skip"), Some(&3));
    let (acc, rej) = collect_accepted(3, 10, |_| Err::<usize, _>("never".to_string()));
    assert!(acc.is_empty());
    assert_eq!(rej.len(), 10);
}

#[test]
fn cycles_and_paths() {
    let cycles: Vec<DiGraph> = (0..5).map(|_| DiGraph::cycle(3).unwrap()).collect();
    let r = classify_corpus(&cycles, Tolerances::default());
    assert_eq!((r.scg, r.wcg), (5, 0));
    assert_eq!(r.scg_pct(), Some(0.0));

    let paths: Vec<DiGraph> = (0..4).map(|_| DiGraph::path(3).unwrap()).collect();
    let r = classify_corpus(&paths, Tolerances::default());
    assert_eq!((r.scg, r.wcg), (0, 4));
    assert_eq!(r.wcg_pct(), Some(100.0));
    assert_eq!(r.scg_pct(), None);
}

#[test]
fn small_defective_survey() {
    let config = DefectiveConfig { sizes: vec![20], factors: vec![1.0, 10.0], trials: 10, seed: 1, tolerances: Tolerances::default() };
    let t = defective_survey(&config).unwrap();
    assert_eq!(t.row_labels, vec!["N=20"]);
    assert_eq!(t.column_labels, vec!["1/N", "10/N"]);
    for v in t.cells.iter().flatten() {
        let v = v.unwrap();
        assert!((0.0..=100.0).contains(&v));
    }
    let again = defective_survey(&config).unwrap();
    assert_eq!(t.to_csv(), again.to_csv());
    assert_eq!(t.to_json(), again.to_json());
    assert!(t.to_csv().starts_with("# experiment=survey-defective run_id="));
    let zero = DefectiveConfig { trials: 0, ..config };
    assert!(matches!(defective_survey(&zero), Err(ExperimentError::InvalidConfig(_))));
}

#[test]
fn run_id_depends_on_config() {
    let a = DefectiveConfig::desk();
    let b = DefectiveConfig { seed: 8, ..DefectiveConfig::desk() };
    assert_ne!(Metadata::new("x", 7, &a).run_id, Metadata::new("x", 8, &b).run_id);
    assert_eq!(Metadata::new("x", 7, &a).run_id, Metadata::new("x", 7, &a).run_id);
}

#[test]
fn small_rank_histogram() {
    let config = RankConfig { graphs: 6, n: 20, m: 3, ..RankConfig::desk() };
    let r = rank_histogram(&config).unwrap();
    assert_eq!(r.records.len(), 6);
    assert!(r.records.iter().all(|x| x.gst_rank == 20));
    let hist = r.histogram();
    assert_eq!(hist.iter().map(|h| h.2).sum::<usize>(), 6);
    assert!(r.histogram_csv().lines().nth(1) == Some("rank,eigenvector_count,gst_count"));
}

#[test]
fn small_orthogonality_and_variance() {
    let config = OrthogonalityConfig { sizes: vec![30], divisors: vec![10, 5], graphs: 3, factor: 6.0, seed: 2 };
    let r = orthogonality_experiment(&config, true).unwrap();
    assert_eq!(r.rows.len(), 6);
    assert_eq!(r.histograms.len(), 2);
    assert_eq!(r.pairs.len(), r.rows.iter().map(|x| x.pairs).sum::<usize>());
    assert!(r.mean_mu(30, 3).is_some() && r.pooled_fraction_above_02(30, 6).is_some());

    let config = VarianceConfig { sizes: vec![30], divisors: vec![10, 5], epsilon: 1e-3, trials: 3, factor: 6.0, seed: 2 };
    let v = variance_experiment(&config).unwrap();
    assert_eq!(v.table.row_labels, vec!["N=30 DW", "N=30 GST"]);
    let g = v.row(30, "GST", 6).unwrap();
    assert_eq!((g.subspaces_mean, g.graphs), (6.0, 3));
    assert!(g.variance.is_some());
    assert!(v.rows_csv().contains("\n30,DW,3,"));
}
