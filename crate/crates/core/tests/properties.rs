mod common;

use common::*;
use kgs_core::graph::{self, compute_boundary, path_graph, Region, VertexFunction, WeightedGraph};
use kgs_core::kirchhoff::StatePair;
use kgs_core::spaces::{embedding_constants, lp_norm, w0_norm, EmbeddingOptions, Exponent, SobolevElement};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_is_symmetric_and_bilinear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 15, (0.2, 2.0));
        let n = d.working_len();
        let f = VertexFunction::new(&d, random_coefficients(&mut rng, n, 1.0)).unwrap();
        let g = VertexFunction::new(&d, random_coefficients(&mut rng, n, 1.0)).unwrap();
        let h = VertexFunction::new(&d, random_coefficients(&mut rng, n, 1.0)).unwrap();
        let fg = f.combine(a, &g, b);
        for x in 0..n {
            let gfh = graph::gamma(&d, &f, &h, x).unwrap();
            prop_assert!(close(gfh, graph::gamma(&d, &h, &f, x).unwrap(), 1e-12));
            let lin = a * gfh + b * graph::gamma(&d, &g, &h, x).unwrap();
            prop_assert!(close(graph::gamma(&d, &fg, &h, x).unwrap(), lin, 1e-12));
            prop_assert!(graph::gamma(&d, &f, &f, x).unwrap() >= 0.0);
        }
    }

    #[test]
    fn constants_have_zero_gradient(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 15, (0.2, 2.0));
        let f = VertexFunction::constant(&d, c);
        for x in 0..d.working_len() {
            prop_assert_eq!(graph::grad_norm(&d, &f, x).unwrap(), 0.0);
            prop_assert_eq!(graph::laplacian(&d, &f, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn laplacian_integrates_by_parts(seed in any::<u64>(), l in 1.2f64..5.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 20, (0.2, 2.0));
        let psi = VertexFunction::new(&d, random_coefficients(&mut rng, d.working_len(), 2.0)).unwrap();
        let phi = VertexFunction::from_interior(&d, &random_coefficients(&mut rng, d.omega_len(), 2.0)).unwrap();
        let lhs: f64 = (0..d.omega_len())
            .map(|x| d.measure(x) * phi.value(x) * graph::l_laplacian(&d, &psi, x, l).unwrap())
            .sum();
        let rhs: f64 = -(0..d.working_len())
            .map(|x| {
                let g = graph::grad_norm(&d, &psi, x).unwrap();
                let a = if g == 0.0 && l < 2.0 { 0.0 } else { g.powf(l - 2.0) };
                d.measure(x) * a * graph::gamma(&d, &psi, &phi, x).unwrap()
            })
            .sum::<f64>();
        prop_assert!(close(lhs, rhs, 1e-10), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), t in -4.0f64..4.0, l in 1.2f64..4.0, gamma in 1.0f64..6.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 15, (0.2, 2.0));
        let c = random_coefficients(&mut rng, d.omega_len(), 1.0);
        let ct: Vec<f64> = c.iter().map(|v| t * v).collect();
        let u = SobolevElement::from_interior(&d, &c, l).unwrap();
        let ut = SobolevElement::from_interior(&d, &ct, l).unwrap();
        prop_assert!(close(w0_norm(&d, &ut), t.abs() * w0_norm(&d, &u), 1e-12));
        for g in [Exponent::Finite(gamma), Exponent::Infinity] {
            let a = lp_norm(&d, ut.function(), g, Region::Omega).unwrap();
            let b = lp_norm(&d, u.function(), g, Region::Omega).unwrap();
            prop_assert!(close(a, t.abs() * b, 1e-12));
        }
    }

    #[test]
    fn w0_norm_is_definite(seed in any::<u64>(), l in 1.2f64..4.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 15, (0.2, 2.0));
        let c = random_coefficients(&mut rng, d.omega_len(), 1.0);
        let u = SobolevElement::from_interior(&d, &c, l).unwrap();
        prop_assert!(w0_norm(&d, &u) > 0.0);
        let zero = SobolevElement::from_interior(&d, &vec![0.0; d.omega_len()], l).unwrap();
        prop_assert_eq!(w0_norm(&d, &zero), 0.0);
    }

    #[test]
    fn scaling_polynomial_matches_energy(seed in any::<u64>(), t in 0.01f64..3.0) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 10, (0.2, 2.0));
        let inst = random_signed_instance(&mut rng, &d);
        let x = random_coefficients(&mut rng, 2 * inst.dim(), 1.0);
        let s = StatePair::from_coefficients(&inst, &x).unwrap();
        let poly = inst.scaling_polynomial(&s).unwrap();
        let xt: Vec<f64> = x.iter().map(|v| t * v).collect();
        let e = inst.energy(&StatePair::from_coefficients(&inst, &xt).unwrap()).unwrap();
        prop_assert!(close(poly.eval(t), e, 1e-10), "{} vs {}", poly.eval(t), e);
    }

    #[test]
    fn directional_derivative_is_gradient_dot_direction(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, d) = random_domain(&mut rng, 10, (0.2, 2.0));
        let inst = random_signed_instance(&mut rng, &d);
        let x = random_coefficients(&mut rng, 2 * inst.dim(), 1.5);
        let dir = random_coefficients(&mut rng, 2 * inst.dim(), 1.0);
        let grad = inst.gradient_coeffs(&x);
        let dot: f64 = grad.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let dd = inst
            .directional_derivative(
                &StatePair::from_coefficients(&inst, &x).unwrap(),
                &StatePair::from_coefficients(&inst, &dir).unwrap(),
            )
            .unwrap();
        prop_assert!(close(dot, dd, 1e-10), "{} vs {}", dot, dd);
    }
}

#[test]
fn l_laplacian_of_linear_function_on_path() {
    let g = path_graph(&["a", "b", "c", "d"], 1.0, 1.0).unwrap();
    let d = compute_boundary(&g, &["b", "c"]).unwrap();
    let f = VertexFunction::new(&d, vec![1.0, 2.0, 0.0, 3.0]).unwrap();
    let b = d.local_index("b").unwrap();
    // Values are a = 0, b = 1, c = 2, d = 3. The plain Laplacian vanishes;
    // for l = 3 the weights differ because |∇f|(a) = 1/√2 while
    // |∇f|(b) = |∇f|(c) = 1.
    assert_eq!(graph::laplacian(&d, &f, b).unwrap(), 0.0);
    let expected = 0.5 * (-(0.5f64.sqrt() + 1.0) + 2.0);
    assert!((graph::l_laplacian(&d, &f, b, 3.0).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn path_embedding_constant_is_inverse_sqrt_two() {
    let g = path_graph(&["a", "b", "c"], 1.0, 1.0).unwrap();
    let d = compute_boundary(&g, &["b"]).unwrap();
    let rep = embedding_constants(&d, 2.0, Exponent::Finite(2.0), &EmbeddingOptions::default()).unwrap();
    assert!((rep.best_constant - 0.5f64.sqrt()).abs() < 1e-12);
    assert!(rep.best_constant <= rep.general_constant);
}

/// With a heavy interior vertex the general constant can be beaten for
/// `γ < l`; the optimal constant is then larger than the closed form.
#[test]
fn heavy_vertex_exceeds_general_constant_below_l() {
    let g = WeightedGraph::new(&[("a", 2.0), ("b", 1.0)], &[("a", "b", 1.0)]).unwrap();
    let d = compute_boundary(&g, &["a"]).unwrap();
    let rep = embedding_constants(&d, 4.0, Exponent::Finite(1.0), &EmbeddingOptions::default()).unwrap();
    assert!(rep.best_constant > rep.general_constant);
    let at_l = embedding_constants(&d, 4.0, Exponent::Finite(4.0), &EmbeddingOptions::default()).unwrap();
    assert!(at_l.best_constant <= at_l.general_constant);
}
