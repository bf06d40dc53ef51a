//! The satisfaction search against a full enumeration oracle, plus the
//! deletion-distance search against the exhaustive subset oracle.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use itertools::Itertools;

use hyperlag::construction::random_hypergraph;
use hyperlag::hypergraph::Hypergraph;
use hyperlag::palette::{build_pt, random_palette, Palette};
use hyperlag::satisfaction::{
    almost_satisfies_distance, satisfies, verify_certificate, DistanceBudget, Satisfaction,
    SatisfactionCertificate, SearchBudget,
};

/// Ground-truth decision by enumerating every ordering and colouring.
fn brute_satisfies(f: &Hypergraph, p: &Palette) -> bool {
    if f.edge_count() == 0 {
        return true;
    }
    if p.is_empty() {
        return false;
    }
    let n = f.n();
    let colours = p.colours();
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)))
        .collect();
    for ordering in (1..=n).permutations(n) {
        let mut assignment = vec![0usize; pairs.len()];
        loop {
            let mut colouring = BTreeMap::new();
            for (i, &(u, v)) in pairs.iter().enumerate() {
                colouring.insert((u, v), colours[assignment[i]]);
            }
            let cert = SatisfactionCertificate::new(ordering.clone(), colouring);
            if verify_certificate(f, p, &cert).unwrap() {
                return true;
            }
            // Odometer over |colours|^pairs.
            let mut i = 0;
            loop {
                if i == assignment.len() {
                    break;
                }
                assignment[i] += 1;
                if assignment[i] < colours.len() {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == assignment.len() {
                break;
            }
        }
    }
    false
}

/// All 3-graphs on exactly `n` labelled vertices (every edge subset).
fn all_3graphs(n: usize) -> Vec<Hypergraph> {
    let universe: Vec<Vec<usize>> = (1..=n).combinations(3).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << universe.len()) {
        let edges: Vec<Vec<usize>> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        out.push(Hypergraph::new(3, n, edges).unwrap());
    }
    out
}

#[test]
fn search_agrees_with_brute_force_small() {
    // Exhaustive sweep at n = 4 over palettes on two colours with at most
    // two triples; the full matrix runs in the acceptance suite.
    let budget = SearchBudget::default();
    let triple_universe: Vec<[u32; 3]> = (1..=2u32)
        .flat_map(|a| (1..=2u32).flat_map(move |b| (1..=2u32).map(move |c| [a, b, c])))
        .collect();
    let mut palettes: Vec<Palette> = vec![Palette::empty()];
    for i in 0..triple_universe.len() {
        palettes.push(Palette::new(vec![triple_universe[i]]).unwrap());
        for j in (i + 1)..triple_universe.len() {
            palettes.push(Palette::new(vec![triple_universe[i], triple_universe[j]]).unwrap());
        }
    }
    let mut checked = 0;
    for f in all_3graphs(4) {
        for p in &palettes {
            let expected = brute_satisfies(&f, p);
            match satisfies(&f, p, &budget).unwrap() {
                Satisfaction::Satisfied(cert) => {
                    assert!(expected, "search satisfied, brute force did not");
                    assert_eq!(verify_certificate(&f, p, &cert).unwrap(), true);
                }
                Satisfaction::Unsatisfied => assert!(!expected, "search unsatisfied, brute force satisfied"),
                Satisfaction::Indeterminate => panic!("unexpected budget exhaustion"),
            }
            checked += 1;
        }
    }
    assert!(checked > 500, "only {checked} cases");
}

#[test]
fn search_agrees_with_brute_force_n5() {
    // Spot checks at n = 5 with three colours.
    let budget = SearchBudget::default();
    for seed in 0..6u64 {
        let f = random_hypergraph(3, 5, 0.35, seed).unwrap();
        let p = random_palette(3, 4, seed + 100);
        let expected = brute_satisfies(&f, &p);
        let got = satisfies(&f, &p, &budget).unwrap();
        assert_eq!(got.is_satisfied(), expected, "seed {seed}");
    }
}

#[test]
fn pt_self_satisfaction_k4_confirmed_by_brute_force() {
    // The palette is a union over edges, so an edge's shadow may match a
    // triple contributed by another edge; for K_4 and t = 6 a proper
    // 3-edge-colouring of the pair graph works.
    let k4 = Hypergraph::complete(3, 4).unwrap();
    for t in [1, 6] {
        let p = build_pt(&k4, t).unwrap();
        assert!(brute_satisfies(&k4, &p), "t={t}");
        let got = satisfies(&k4, &p, &SearchBudget::default()).unwrap();
        assert!(got.is_satisfied(), "t={t}");
    }
}

#[test]
fn pt_self_satisfaction() {
    // Every graph checked satisfies its own p_t palettes, for all t.
    let budget = SearchBudget::default();
    let mut graphs = vec![
        Hypergraph::parse("3 3\n1 2 3\n").unwrap(),
        Hypergraph::parse("3 5\n1 2 3\n1 4 5\n2 4 5\n3 4 5\n").unwrap(),
        Hypergraph::parse("3 5\n1 2 3\n2 3 4\n3 4 5\n").unwrap(),
        Hypergraph::complete(3, 5).unwrap(),
        Hypergraph::tight_cycle(6).unwrap(),
        Hypergraph::tight_cycle(7).unwrap(),
    ];
    for seed in 0..6u64 {
        let n = 5 + (seed as usize % 3);
        graphs.push(random_hypergraph(3, n, 0.4, seed + 400).unwrap());
    }
    for f in &graphs {
        if f.edge_count() == 0 {
            continue;
        }
        for t in 1..=6 {
            let p = build_pt(f, t).unwrap();
            let got = satisfies(f, &p, &budget).unwrap();
            match got {
                Satisfaction::Satisfied(cert) => {
                    assert_eq!(verify_certificate(f, &p, &cert).unwrap(), true);
                }
                other => panic!("n={} t={t}: expected satisfied, got {other:?}", f.n()),
            }
        }
    }
}

#[test]
fn subgraph_monotonicity() {
    // Any sub-3-graph of a satisfying instance satisfies the same palette:
    // restrict the ordering and colouring.
    let budget = SearchBudget::default();
    let mut found = 0;
    for seed in 0..30u64 {
        let f = random_hypergraph(3, 6, 0.3, seed).unwrap();
        let p = random_palette(3, 6, seed + 77);
        if f.edge_count() == 0 {
            continue;
        }
        if !satisfies(&f, &p, &budget).unwrap().is_satisfied() {
            continue;
        }
        found += 1;
        // Drop one edge.
        let fewer = f.without_edges(&BTreeSet::from([0usize]));
        assert!(satisfies(&fewer, &p, &budget).unwrap().is_satisfied(), "seed {seed}: fewer edges");
        // Induced subgraph on vertices 1..=5, relabelled 1..=5 already.
        let induced_edges: Vec<Vec<usize>> = f
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&v| v <= 5))
            .cloned()
            .collect();
        let induced = Hypergraph::new(3, 5, induced_edges).unwrap();
        assert!(satisfies(&induced, &p, &budget).unwrap().is_satisfied(), "seed {seed}: induced");
        if found >= 8 {
            break;
        }
    }
    assert!(found >= 3, "too few satisfying instances sampled: {found}");
}

/// Exhaustive subset oracle for the deletion distance, built on the brute
/// force decision only.
fn brute_distance(f: &Hypergraph, p: &Palette) -> usize {
    let m = f.edge_count();
    for d in 0..=m {
        for combo in (0..m).combinations(d) {
            let remove: BTreeSet<usize> = combo.into_iter().collect();
            if brute_satisfies(&f.without_edges(&remove), p) {
                return d;
            }
        }
    }
    m
}

#[test]
fn distance_k4_vs_p1_matches_subset_oracle() {
    let k4 = Hypergraph::complete(3, 4).unwrap();
    let edge = Hypergraph::parse("3 3\n1 2 3\n").unwrap();
    let p1 = build_pt(&edge, 1).unwrap();
    let oracle = brute_distance(&k4, &p1);
    // Frozen from the subset oracle: two deletions are necessary and
    // sufficient for K_4 against the single lex-first triple.
    assert_eq!(oracle, 2);
    let rep = almost_satisfies_distance(&k4, &p1, &DistanceBudget::default()).unwrap();
    assert_eq!(rep.distance, oracle);
    assert!(rep.optimal);
}

#[test]
fn distance_matches_subset_oracle_random() {
    for seed in 0..8u64 {
        let f = random_hypergraph(3, 5, 0.4, seed).unwrap();
        let p = random_palette(2, 3, seed + 200).clone();
        let oracle = brute_distance(&f, &p);
        let rep = almost_satisfies_distance(&f, &p, &DistanceBudget::default()).unwrap();
        assert_eq!(rep.distance, oracle, "seed {seed}");
        assert!(rep.optimal);
    }
}

#[test]
fn distance_sandwich() {
    let budget = DistanceBudget::default();
    for seed in 0..10u64 {
        let f = random_hypergraph(3, 5, 0.5, seed).unwrap();
        let p = random_palette(3, 5, seed + 300);
        let rep = almost_satisfies_distance(&f, &p, &budget).unwrap();
        assert!(rep.distance <= f.edge_count());
        let sat = satisfies(&f, &p, &SearchBudget::default()).unwrap().is_satisfied();
        assert_eq!(rep.distance == 0, sat, "seed {seed}");
    }
}
