#![allow(dead_code)]

use kgs_core::graph::{compute_boundary, load_graph_json, DomainDecomposition, WeightedGraph};
use kgs_core::kirchhoff::{Coefficients, InstanceDocument, KirchhoffInstance, Parameters, TailMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn instances_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

pub fn load_instance(graph: &str, instance: &str) -> KirchhoffInstance {
    let dir = instances_dir();
    let (_, d) = load_graph_json(&std::fs::read_to_string(dir.join(graph)).unwrap()).unwrap();
    let doc = InstanceDocument::from_json(&std::fs::read_to_string(dir.join(instance)).unwrap()).unwrap();
    doc.build(&d).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random graph: random spanning tree plus extra edges, with
/// `μ ∈ mu_range` and `ω ∈ [0.2, 2]`, and a random proper interior set.
pub fn random_domain(rng: &mut ChaCha8Rng, max_vertices: usize, mu_range: (f64, f64)) -> (WeightedGraph, DomainDecomposition) {
    loop {
        let n = rng.random_range(3..=max_vertices);
        let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let vertices: Vec<(&str, f64)> =
            ids.iter().map(|id| (id.as_str(), rng.random_range(mu_range.0..=mu_range.1))).collect();
        let mut pairs = std::collections::BTreeSet::new();
        for i in 1..n {
            let j = rng.random_range(0..i);
            pairs.insert((j, i));
        }
        for _ in 0..n / 2 {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<(&str, &str, f64)> =
            pairs.iter().map(|&(a, b)| (ids[a].as_str(), ids[b].as_str(), rng.random_range(0.2..2.0))).collect();
        let graph = WeightedGraph::new(&vertices, &edges).unwrap();
        let omega: Vec<&str> = ids.iter().filter(|_| rng.random_bool(0.5)).map(|s| s.as_str()).collect();
        if omega.is_empty() || omega.len() == n {
            continue;
        }
        let domain = compute_boundary(&graph, &omega).unwrap();
        if domain.validate().is_ok() {
            return (graph, domain);
        }
    }
}

/// Random instance on `domain` with `λ_i > 0`, `h_i > 0`, `g_i ≥ 0` and
/// `r < α + β`.
pub fn random_positive_instance(rng: &mut ChaCha8Rng, domain: &DomainDecomposition) -> KirchhoffInstance {
    let n = domain.omega_len();
    let p = rng.random_range(1.5..4.0);
    let q = rng.random_range(1.5..4.0);
    let params = Parameters {
        p,
        q,
        r: rng.random_range(1.1..p.min(q)),
        k: rng.random_range(0.0..2.0),
        alpha: rng.random_range(1.2..3.0),
        beta: rng.random_range(1.2..3.0),
        a1: rng.random_range(0.5..2.0),
        a2: rng.random_range(0.5..2.0),
        b1: rng.random_range(0.0..2.0),
        b2: rng.random_range(0.0..2.0),
        lambda1: rng.random_range(0.05..1.0),
        lambda2: rng.random_range(0.05..1.0),
    };
    let mut draw = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|_| rng.random_range(lo..hi)).collect() };
    let coefficients = Coefficients {
        h1: draw(0.1, 1.0),
        h2: draw(0.1, 1.0),
        h3: draw(0.1, 1.0),
        g1: draw(0.0, 0.5),
        g2: draw(0.0, 0.5),
    };
    KirchhoffInstance::new(domain.clone(), params, coefficients, TailMode::default()).unwrap()
}

/// Random instance with sign-free `λ_i` and `g_i`.
pub fn random_signed_instance(rng: &mut ChaCha8Rng, domain: &DomainDecomposition) -> KirchhoffInstance {
    let base = random_positive_instance(rng, domain);
    let mut params = *base.params();
    params.lambda1 = rng.random_range(-1.0..1.0);
    params.lambda2 = rng.random_range(-1.0..1.0);
    let n = domain.omega_len();
    let mut c = base.coefficients().clone();
    c.g1 = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    c.g2 = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    KirchhoffInstance::new(domain.clone(), params, c, TailMode::default()).unwrap()
}

pub fn random_coefficients(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

/// Prints the one-line verdict of an acceptance criterion and fails the
/// test when it does not pass.
pub fn report(criterion: u32, title: &str, pass: bool, detail: &str) {
    println!("[{}] criterion {criterion}: {title} :: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}
