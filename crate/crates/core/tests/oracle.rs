use std::collections::BTreeSet;

use opm_fixpoint::conditions::{check_new_condition, Domain};
use opm_fixpoint::oracle::{
    distance_grid, enumerate_cfp, generate_instance, separation_bound, stress_theorem,
    FailedConclusion, RandomInstanceSpec,
};
use opm_fixpoint::solver::{iterate, SolverOptions};
use opm_fixpoint::{FiniteSpace, Instance, TableMap};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pairs whose image under (x,y) ↦ (F(x,y), F(y,x)) is at distance zero,
/// scanned column-major.
fn displacement_scan(space: &FiniteSpace, map: &TableMap) -> BTreeSet<(usize, usize)> {
    let n = space.len();
    let mut out = BTreeSet::new();
    for y in (0..n).rev() {
        for x in (0..n).rev() {
            let moved = space.dist_idx(map.get(x, y), x) + space.dist_idx(map.get(y, x), y);
            if moved == 0.0 {
                out.insert((x, y));
            }
        }
    }
    out
}

fn spec(max_n: usize, seed: u64) -> RandomInstanceSpec {
    let mut s = RandomInstanceSpec::new(max_n, seed);
    s.min_elements = 1;
    s
}

#[test]
fn enumeration_matches_displacement_scan() {
    for seed in 0..1000 {
        let (space, map) = generate_instance(&spec(5, seed)).unwrap();
        let listed = enumerate_cfp(&space, &map);
        let as_set: BTreeSet<_> = listed.pairs.iter().copied().collect();
        assert_eq!(as_set.len(), listed.len(), "seed {seed}: duplicates");
        assert_eq!(as_set, displacement_scan(&space, &map), "seed {seed}");
    }
}

#[test]
fn enumeration_is_row_major() {
    let (space, map) = generate_instance(&spec(5, 3)).unwrap();
    let pairs = enumerate_cfp(&space, &map).pairs;
    assert!(pairs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn constant_map_has_one_fixed_point() {
    let (space, _) = generate_instance(&RandomInstanceSpec::new(4, 11)).unwrap();
    for c in 0..4 {
        let map = TableMap::from_fn(4, |_, _| c);
        let cfps = enumerate_cfp(&space, &map);
        assert_eq!(cfps.pairs, vec![(c, c)]);
        assert!(separation_bound(&space, &cfps).vacuous);
    }
}

proptest! {
    #[test]
    fn separation_is_permutation_invariant(n in 1usize..=6, seed in any::<u64>(), shuffle in any::<u64>()) {
        let (space, map) = generate_instance(&RandomInstanceSpec::new(n, seed)).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let (ps, pm) = (space.permuted(&perm), map.permuted(&perm));

        let before = separation_bound(&space, &enumerate_cfp(&space, &map));
        let after = separation_bound(&ps, &enumerate_cfp(&ps, &pm));
        prop_assert_eq!(before.minimum, after.minimum);
        prop_assert_eq!(before.comparable_minimum, after.comparable_minimum);
        prop_assert_eq!(before.vacuous, after.vacuous);

        let relabel = |(x, y): (usize, usize)| (space.label(x).to_string(), space.label(y).to_string());
        let orig: BTreeSet<_> = enumerate_cfp(&space, &map).pairs.into_iter().map(relabel).collect();
        let moved: BTreeSet<_> = enumerate_cfp(&ps, &pm)
            .pairs
            .into_iter()
            .map(|(x, y)| (ps.label(x).to_string(), ps.label(y).to_string()))
            .collect();
        prop_assert_eq!(orig, moved);
    }

    #[test]
    fn converged_limits_are_coupled_fixed_points(n in 1usize..=5, seed in any::<u64>()) {
        let (space, map) = generate_instance(&RandomInstanceSpec::new(n, seed)).unwrap();
        let cfps = enumerate_cfp(&space, &map);
        let opts = SolverOptions { max_iter: n * n + 1, allow_unmet_start: true, ..SolverOptions::default() };
        for x0 in 0..n {
            for y0 in 0..n {
                let trace = iterate(&space, &map, &x0, &y0, &opts).unwrap();
                if let Some(limit) = trace.limit() {
                    prop_assert!(cfps.contains(limit));
                }
            }
        }
    }
}

#[test]
fn stress_run_is_deterministic_and_clean() {
    let mut s = RandomInstanceSpec::new(4, 2024);
    s.min_elements = 2;
    let a = stress_theorem(&s, 400).unwrap();
    let b = stress_theorem(&s, 400).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.summary.instances, 400);
    assert!(a.summary.hypothesis_satisfying > 0);
    assert!(a.failures.is_empty(), "{:?}", a.failures.first());
}

#[test]
fn empty_stress_run() {
    let run = stress_theorem(&RandomInstanceSpec::new(3, 1), 0).unwrap();
    assert_eq!(run.summary, Default::default());
    assert!(run.failures.is_empty());
}

// With distances finer than 1/4, two incomparable coupled fixed points can be
// close. Every such archived failure must still respect the bound on
// comparable pairs.
#[test]
fn fine_grid_separation_failures_involve_only_incomparable_pairs() {
    let mut s = RandomInstanceSpec::new(4, 99);
    s.min_elements = 2;
    s.distance_values = distance_grid(0.05, 1.0).unwrap();
    let run = stress_theorem(&s, 2000).unwrap();
    assert!(!run.failures.is_empty());
    for f in &run.failures {
        assert_eq!(
            f.failed_conclusion,
            FailedConclusion::SeparationBelowQuarter,
            "{}",
            f.details
        );
        let Instance::Finite { space, map, .. } = f.instance().build().unwrap() else {
            panic!("archive entries are finite");
        };
        assert!(
            check_new_condition(&space, &map, &Domain::finite(&space))
                .unwrap()
                .holds
        );
        let sep = separation_bound(&space, &enumerate_cfp(&space, &map));
        assert!(sep.minimum.unwrap() < 0.25);
        assert!(
            sep.comparable_minimum.is_none_or(|m| m >= 0.25),
            "seed {}",
            f.seed
        );
    }
}

#[test]
fn archive_entries_rebuild_their_instance() {
    let mut s = RandomInstanceSpec::new(3, 5);
    s.distance_values = distance_grid(0.05, 0.5).unwrap();
    let run = stress_theorem(&s, 500).unwrap();
    let f = run.failures.first().expect("fine grid yields failures");
    let (space, map) = generate_instance(&f.spec).unwrap();
    let Instance::Finite {
        space: rs, map: rm, ..
    } = f.instance().build().unwrap()
    else {
        unreachable!()
    };
    assert_eq!(space, rs);
    assert_eq!(map, rm);

    let dir = std::env::temp_dir().join(format!("opm-archive-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("archive.jsonl");
    let _ = std::fs::remove_file(&path);
    opm_fixpoint::oracle::append_archive(&path, &run.failures[..1]).unwrap();
    opm_fixpoint::oracle::append_archive(&path, &run.failures[..1]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    let back: opm_fixpoint::oracle::ArchiveEntry =
        serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(&back, f);
    std::fs::remove_dir_all(&dir).unwrap();
}
