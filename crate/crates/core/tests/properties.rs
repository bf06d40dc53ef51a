//! Structural and algebraic invariants checked on randomized inputs.

use proptest::prelude::*;

use hyperlag::hypergraph::Hypergraph;
use hyperlag::lagrangian::{lagrange_grad, lagrange_poly};
use hyperlag::palette::{lambda_ee, lambda_ev, lambda_vvv, random_palette, Palette};
use hyperlag::construction::random_hypergraph;
use hyperlag::weighting::Weighting;

fn arb_3graph() -> impl Strategy<Value = Hypergraph> {
    (3usize..=7, any::<u64>(), 0.0f64..1.0).prop_map(|(n, seed, p)| {
        random_hypergraph(3, n, p, seed).unwrap()
    })
}

fn arb_palette() -> impl Strategy<Value = Palette> {
    (1u32..=5, 1usize..=20, any::<u64>()).prop_map(|(colours, count, seed)| {
        random_palette(colours, count, seed)
    })
}

proptest! {
    #[test]
    fn hypergraph_parse_round_trip(h in arb_3graph()) {
        let text = h.to_text();
        let back = Hypergraph::parse(&text).unwrap();
        prop_assert_eq!(&back, &h);
        // Canonical serialization: equal objects, identical bytes.
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn palette_parse_round_trip(p in arb_palette()) {
        let text = p.to_text();
        let back = Palette::parse(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn lagrange_scale_bound(h in arb_3graph(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = Weighting::random(h.n(), &mut rng);
        let v = lagrange_poly(&h, &x).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "lambda out of range: {}", v);
    }

    #[test]
    fn euler_identity(h in arb_3graph(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = Weighting::random(h.n(), &mut rng);
        let v = lagrange_poly(&h, &x).unwrap();
        let g = lagrange_grad(&h, &x).unwrap();
        let dot: f64 = x.as_slice().iter().zip(&g).map(|(a, b)| a * b).sum();
        prop_assert!((dot - 3.0 * v).abs() < 1e-10, "euler violated: {} vs {}", dot, 3.0 * v);
    }

    #[test]
    fn pointwise_chain(p in arb_palette(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = Weighting::random(p.colour_count(), &mut rng);
        let vvv = lambda_vvv(&p, &x).unwrap();
        let ev = lambda_ev(&p, &x).unwrap();
        let ee = lambda_ee(&p, &x).unwrap();
        prop_assert!(ee <= ev + 1e-12, "ee {} > ev {}", ee, ev);
        prop_assert!(ev <= vvv + 1e-12, "ev {} > vvv {}", ev, vvv);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&vvv));
        prop_assert!(ee >= -1e-12);
    }

    #[test]
    fn vvv_monotone_in_triples(p in arb_palette(), extra in (1u32..=5, 1u32..=5, 1u32..=5), seed in any::<u64>()) {
        use rand::SeedableRng;
        let t = [extra.0, extra.1, extra.2];
        prop_assume!(!p.contains(&t));
        let mut triples = p.triples().to_vec();
        triples.push(t);
        let bigger = Palette::new(triples).unwrap();
        // Evaluate both on the larger colour set: extend x by zeros on
        // colours the smaller palette misses.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x_big = Weighting::random(bigger.colour_count(), &mut rng);
        let x_small: Vec<f64> = p
            .colours()
            .iter()
            .map(|c| bigger.colour_index(*c).map(|i| x_big.get(i)).unwrap_or(0.0))
            .collect();
        let small_val: f64 = p
            .triples()
            .iter()
            .map(|t| {
                let xi = |c: u32| x_small[p.colour_index(c).unwrap()];
                xi(t[0]) * xi(t[1]) * xi(t[2])
            })
            .sum();
        let big_val = lambda_vvv(&bigger, &x_big).unwrap();
        prop_assert!(big_val + 1e-12 >= small_val, "adding a triple decreased vvv: {} -> {}", small_val, big_val);
    }
}

#[test]
fn tight_cycle_edge_count_property() {
    assert_eq!(Hypergraph::tight_cycle(3).unwrap().edge_count(), 1);
    assert_eq!(Hypergraph::tight_cycle(4).unwrap().edge_count(), 4);
    for l in 5..=30 {
        assert_eq!(Hypergraph::tight_cycle(l).unwrap().edge_count(), l);
    }
}
