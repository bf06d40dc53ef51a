//! Cross-checks of the Lagrangian solver against independent oracles:
//! central finite differences for the gradient, the exhaustive rational
//! grid for the optimum, and the p_t scaling identity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperlag::construction::random_hypergraph;
use hyperlag::hypergraph::Hypergraph;
use hyperlag::lagrangian::{
    lagrange_grad, lagrange_poly, lagrangian, lagrangian_grid_oracle, SolverConfig,
};
use hyperlag::palette::{build_pt, lambda_vvv, palette_grid_oracle, palette_lagrangian, PaletteSolverConfig};
use hyperlag::weighting::{StarMode, Weighting};

// The public API validates simplex membership; the finite-difference probe
// leaves the simplex by construction, so evaluate the polynomial directly.
fn poly_raw(f: &Hypergraph, x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for e in f.edges() {
        let mut prod = 1.0;
        for &v in e {
            prod *= x[v - 1];
        }
        sum += prod;
    }
    6.0 * sum
}

/// Central finite differences of the Lagrange polynomial, step 1e-5.
fn fd_gradient(f: &Hypergraph, x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let mut plus = x.to_vec();
        plus[i] += h;
        let mut minus = x.to_vec();
        minus[i] -= h;
        g[i] = (poly_raw(f, &plus) - poly_raw(f, &minus)) / (2.0 * h);
    }
    g
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    for seed in 0..50u64 {
        let n = 3 + (seed as usize % 6); // up to 8 vertices
        let f = random_hypergraph(3, n, 0.5, seed).unwrap();
        let x = Weighting::random(n, &mut rng);
        let g = lagrange_grad(&f, &x).unwrap();
        let fd = fd_gradient(&f, x.as_slice());
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6, "grad {a} vs fd {b} (seed {seed})");
        }
        checked += 1;
    }
    assert_eq!(checked, 50);
}

#[test]
fn f32_gradient_matches_finite_differences() {
    let f = Hypergraph::parse("3 5\n1 2 3\n1 4 5\n2 4 5\n3 4 5\n").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let x = Weighting::random(5, &mut rng);
        let g = lagrange_grad(&f, &x).unwrap();
        let fd = fd_gradient(&f, x.as_slice());
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn solver_sandwiched_by_grid_oracle() {
    // Lower bound within 1e-9, upper bound within 0.1 of the resolution-12
    // grid, for seeded random graphs with n <= 6.
    let cfg = SolverConfig { starts: 60, ..SolverConfig::default() };
    for seed in 0..12u64 {
        let n = 3 + (seed as usize % 4);
        let f = random_hypergraph(3, n, 0.6, seed).unwrap();
        let rep = lagrangian(&f, &cfg).unwrap();
        let oracle = lagrangian_grid_oracle(&f, 12).unwrap();
        assert!(rep.value >= oracle - 1e-9, "solver {} under oracle {}", rep.value, oracle);
        assert!(rep.value <= oracle + 0.1, "solver {} too far above oracle {}", rep.value, oracle);
    }
}

#[test]
fn edge_monotonicity_via_grid_oracle() {
    // Adding an edge never decreases the optimum, measured exactly on the
    // fixed-resolution grid.
    for seed in 0..8u64 {
        let f = random_hypergraph(3, 6, 0.4, seed).unwrap();
        let base = lagrangian_grid_oracle(&f, 10).unwrap();
        let mut edges = f.edges().to_vec();
        // First missing edge in lex order.
        'outer: for a in 1..=6 {
            for b in (a + 1)..=6 {
                for c in (b + 1)..=6 {
                    if !f.has_edge(&[a, b, c]) {
                        edges.push(vec![a, b, c]);
                        break 'outer;
                    }
                }
            }
        }
        if edges.len() == f.edge_count() {
            continue; // complete graph, nothing to add
        }
        let bigger = Hypergraph::new(3, 6, edges).unwrap();
        let grown = lagrangian_grid_oracle(&bigger, 10).unwrap();
        assert!(grown + 1e-15 >= base, "adding an edge decreased the oracle: {base} -> {grown}");
    }
}

#[test]
fn solver_value_is_polynomial_at_maximiser() {
    for seed in [1u64, 5, 9] {
        let f = random_hypergraph(3, 6, 0.5, seed).unwrap();
        let rep = lagrangian(&f, &SolverConfig { starts: 40, ..SolverConfig::default() }).unwrap();
        let v = lagrange_poly(&f, &rep.maximiser).unwrap();
        assert!((rep.value - v).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&rep.value));
        let sum: f64 = rep.maximiser.as_slice().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "maximiser off the simplex: {sum}");
    }
}

#[test]
fn pt_identity_random_graphs() {
    // Exact algebraic identity between the p_t palette polynomial and the
    // scaled Lagrange polynomial, on graphs without isolated vertices.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut graphs = 0;
    let mut seed = 0u64;
    while graphs < 12 {
        seed += 1;
        let n = 4 + (seed as usize % 4);
        let f = random_hypergraph(3, n, 0.5, seed).unwrap();
        if f.edge_count() == 0 || (1..=n).any(|v| f.degree(v) == 0) {
            continue;
        }
        graphs += 1;
        for t in 1..=6 {
            let p = build_pt(&f, t).unwrap();
            assert_eq!(p.colour_count(), n);
            for _ in 0..25 {
                let x = Weighting::random(n, &mut rng);
                let lhs = lambda_vvv(&p, &x).unwrap();
                let rhs = t as f64 / 6.0 * lagrange_poly(&f, &x).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "t={t} seed={seed}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn palette_solver_vs_grid_oracle_random() {
    // Independent cross-check of the max-min solver on small palettes.
    let cfg = PaletteSolverConfig {
        minmax_restarts: 8,
        starts: 40,
        oracle_cap: 0, // manual comparison below
        ..PaletteSolverConfig::default()
    };
    for seed in 0..10u64 {
        let p = hyperlag::palette::random_palette(4, 8, seed);
        for star in [StarMode::Vvv, StarMode::Ev, StarMode::Ee] {
            let rep = palette_lagrangian(&p, star, &cfg).unwrap();
            let grid = palette_grid_oracle(&p, star, 10).unwrap();
            assert!(
                rep.value >= grid - 1e-9,
                "seed {seed} {star}: solver {} under grid {}",
                rep.value,
                grid
            );
            assert!(
                rep.value <= grid + 0.12,
                "seed {seed} {star}: solver {} too far above grid {}",
                rep.value,
                grid
            );
        }
    }
}
