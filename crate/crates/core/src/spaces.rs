//! `L^γ` and `W₀^{1,l}` norms on the working set, the canonical basis of
//! `W₀^{1,l}(Ω)`, and numerically computed embedding constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{gamma_diag_raw, gradient_power_weight, DomainDecomposition, GraphError, Region, VertexFunction};
use crate::par::{self, Execution};

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("L^gamma exponent {0} must be >= 1")]
    InvalidGamma(f64),
    #[error("Sobolev exponent l = {0} must satisfy l > 1")]
    InvalidExponent(f64),
    #[error("Sobolev element must vanish on the boundary")]
    MissingZeroBoundary,
    #[error("omega is empty")]
    EmptyOmega,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An `L^γ` exponent, `1 ≤ γ ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(g: f64) -> Result<Self, SpaceError> {
        if g.is_nan() || g < 1.0 {
            return Err(SpaceError::InvalidGamma(g));
        }
        Ok(if g.is_infinite() { Exponent::Infinity } else { Exponent::Finite(g) })
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(g) => g,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(g) => s.serialize_f64(*g),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(g) => Exponent::finite(g).map_err(serde::de::Error::custom),
            Raw::Text(t) if t == "inf" || t == "infinity" => Ok(Exponent::Infinity),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad exponent `{t}`"))),
        }
    }
}

/// Member of `W₀^{1,l}(Ω)`: a zero-boundary function with its exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevElement {
    function: VertexFunction,
    exponent: f64,
}

impl SobolevElement {
    pub fn new(function: VertexFunction, exponent: f64) -> Result<Self, SpaceError> {
        if !(exponent > 1.0 && exponent.is_finite()) {
            return Err(SpaceError::InvalidExponent(exponent));
        }
        if !function.zero_boundary() {
            return Err(SpaceError::MissingZeroBoundary);
        }
        Ok(SobolevElement { function, exponent })
    }

    pub fn from_interior(
        domain: &DomainDecomposition,
        coefficients: &[f64],
        exponent: f64,
    ) -> Result<Self, SpaceError> {
        Self::new(VertexFunction::from_interior(domain, coefficients)?, exponent)
    }

    pub fn function(&self) -> &VertexFunction {
        &self.function
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn coefficients(&self) -> &[f64] {
        self.function.interior()
    }
}

/// `(Σ_{x∈region} μ(x)|u(x)|^γ)^{1/γ}`, or `max_{x∈region} |u(x)|` for `γ = ∞`.
pub fn lp_norm(
    domain: &DomainDecomposition,
    u: &VertexFunction,
    gamma: Exponent,
    region: Region<'_>,
) -> Result<f64, SpaceError> {
    if let Exponent::Finite(g) = gamma {
        if g.is_nan() || g < 1.0 {
            return Err(SpaceError::InvalidGamma(g));
        }
    }
    if u.len() != domain.working_len() {
        return Err(GraphError::LengthMismatch { expected: domain.working_len(), got: u.len() }.into());
    }
    let vertices: Vec<usize> = match region {
        Region::Omega => (0..domain.omega_len()).collect(),
        Region::Boundary => (domain.omega_len()..domain.working_len()).collect(),
        Region::Working => (0..domain.working_len()).collect(),
        Region::Vertices(xs) => {
            if let Some(&x) = xs.iter().find(|&&x| x >= domain.working_len()) {
                return Err(GraphError::OutsideWorkingSet { index: x, size: domain.working_len() }.into());
            }
            xs.to_vec()
        }
    };
    Ok(match gamma {
        Exponent::Infinity => vertices.iter().map(|&x| u.value(x).abs()).fold(0.0, f64::max),
        Exponent::Finite(g) => {
            let s: f64 = vertices.iter().map(|&x| domain.measure(x) * u.value(x).abs().powf(g)).sum();
            s.powf(1.0 / g)
        }
    })
}

/// `L^γ(Ω)` norm of interior coefficients.
pub(crate) fn lp_norm_interior(domain: &DomainDecomposition, c: &[f64], gamma: Exponent) -> f64 {
    match gamma {
        Exponent::Infinity => c.iter().map(|v| v.abs()).fold(0.0, f64::max),
        Exponent::Finite(g) => {
            let s: f64 = c.iter().enumerate().map(|(i, v)| domain.measure(i) * v.abs().powf(g)).sum();
            s.powf(1.0 / g)
        }
    }
}

/// `∫_{Ω∪∂Ω} |∇u|^l dμ` for working-set values.
pub(crate) fn gradient_energy(domain: &DomainDecomposition, values: &[f64], l: f64) -> f64 {
    (0..domain.working_len())
        .map(|x| {
            let g2 = gamma_diag_raw(domain, values, x);
            // |∇u|^l = (Γ(u,u))^{l/2}
            domain.measure(x) * if g2 == 0.0 { 0.0 } else { g2.powf(0.5 * l) }
        })
        .sum()
}

/// Partial derivatives of `∫|∇u|^l dμ` with respect to the interior
/// coefficients, assembled from the weak form `l ∫ |∇u|^{l−2} Γ(u, e_j) dμ`.
pub(crate) fn gradient_energy_derivative(domain: &DomainDecomposition, values: &[f64], l: f64) -> Vec<f64> {
    let n = domain.omega_len();
    let mut out = vec![0.0; n];
    for x in 0..domain.working_len() {
        let a = gradient_power_weight(gamma_diag_raw(domain, values, x).sqrt(), l);
        if a == 0.0 {
            continue;
        }
        let ux = values[x];
        for &(y, w) in domain.neighbors(x) {
            let t = 0.5 * a * w * (values[y] - ux);
            if x < n {
                out[x] -= t;
            }
            if y < n {
                out[y] += t;
            }
        }
    }
    for v in &mut out {
        *v *= l;
    }
    out
}

/// `‖u‖_{W₀^{1,l}} = (∫_{Ω∪∂Ω} |∇u|^l dμ)^{1/l}`.
pub fn w0_norm(domain: &DomainDecomposition, u: &SobolevElement) -> f64 {
    gradient_energy(domain, u.function.values(), u.exponent).powf(1.0 / u.exponent)
}

/// `W₀^{1,l}` norm of interior coefficients.
pub(crate) fn w0_norm_interior(domain: &DomainDecomposition, c: &[f64], l: f64) -> f64 {
    gradient_energy(domain, &extend(domain, c), l).powf(1.0 / l)
}

pub(crate) fn extend(domain: &DomainDecomposition, c: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; domain.working_len()];
    v[..c.len()].copy_from_slice(c);
    v
}

/// Indicator functions of the `Ω` vertices, in local (sorted id) order.
pub fn canonical_basis(domain: &DomainDecomposition, l: f64) -> Result<Vec<SobolevElement>, SpaceError> {
    if domain.omega_len() == 0 {
        return Err(SpaceError::EmptyOmega);
    }
    (0..domain.omega_len())
        .map(|i| SobolevElement::new(VertexFunction::indicator(domain, i)?, l))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingOptions {
    pub random_starts: usize,
    pub tolerance: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        EmbeddingOptions {
            random_starts: 20,
            tolerance: 1e-10,
            max_iters: 20_000,
            seed: 0x5eed,
            execution: Execution::Parallel,
        }
    }
}

/// Embedding constants for one `(l, γ)` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub l: f64,
    pub gamma: Exponent,
    /// Smallest `C` with `‖u‖_{L^γ} ≤ C ‖u‖_{W₀^{1,l}}` found by the search.
    pub best_constant: f64,
    /// The same quantity for `γ = l`; this is the `C` entering the formulas below.
    pub best_constant_l: f64,
    /// `C_{1,l}(Ω) = C / μ_min,Ω · (1 + |Σ_{x∈Ω} μ(x)|)`.
    pub general_constant: f64,
    /// `M_l = C / μ_min,Ω^{1/l}`.
    pub sup_constant: f64,
    pub mu_min_omega: f64,
    pub omega_measure: f64,
    pub witness_ids: Vec<String>,
    /// Interior coefficients of the maximiser, normalised to unit `W₀` norm.
    pub witness: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl EmbeddingReport {
    /// `C_{1,l}(Ω)` as used by the hypothesis and estimate machinery.
    pub fn c1(&self) -> f64 {
        self.general_constant
    }
}

struct AscentResult {
    ratio: f64,
    witness: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Computes the best embedding constant `sup ‖u‖_γ / ‖u‖_{W₀^{1,l}}` and the
/// derived constants `C_{1,l}(Ω)` and `M_l`.
///
/// For finite `γ` the quotient is maximised by Armijo gradient ascent on the
/// unit `W₀` sphere from every canonical basis vector plus
/// `options.random_starts` random starts. For `γ = ∞` the supremum is
/// `max_i 1 / min{‖u‖_{W₀}: u(x_i) = 1}`, and each inner problem is convex.
pub fn embedding_constants(
    domain: &DomainDecomposition,
    l: f64,
    gamma: Exponent,
    options: &EmbeddingOptions,
) -> Result<EmbeddingReport, SpaceError> {
    if !(l > 1.0 && l.is_finite()) {
        return Err(SpaceError::InvalidExponent(l));
    }
    if let Exponent::Finite(g) = gamma {
        if g.is_nan() || g < 1.0 {
            return Err(SpaceError::InvalidGamma(g));
        }
    }
    if domain.omega_len() == 0 {
        return Err(SpaceError::EmptyOmega);
    }
    domain.validate()?;

    let at_l = best_constant(domain, l, Exponent::Finite(l), options);
    let target = if gamma == Exponent::Finite(l) {
        None
    } else {
        Some(best_constant(domain, l, gamma, options))
    };
    let c = at_l.ratio;
    let mu_min = domain.min_omega_measure();
    let omega_measure = domain.omega_measure();
    let chosen = target.as_ref().unwrap_or(&at_l);
    Ok(EmbeddingReport {
        l,
        gamma,
        best_constant: chosen.ratio,
        best_constant_l: c,
        general_constant: c / mu_min * (1.0 + omega_measure.abs()),
        sup_constant: c / mu_min.powf(1.0 / l),
        mu_min_omega: mu_min,
        omega_measure,
        witness_ids: domain.omega_ids().to_vec(),
        witness: chosen.witness.clone(),
        converged: at_l.converged && target.as_ref().is_none_or(|t| t.converged),
        iterations: at_l.iterations + target.as_ref().map_or(0, |t| t.iterations),
    })
}

fn best_constant(domain: &DomainDecomposition, l: f64, gamma: Exponent, options: &EmbeddingOptions) -> AscentResult {
    let n = domain.omega_len();
    let results = match gamma {
        Exponent::Infinity => par::map_range(options.execution, n, |i| pinned_minimum(domain, l, i, options)),
        Exponent::Finite(g) => {
            let starts = n + options.random_starts;
            par::map_range(options.execution, starts, |k| {
                let start: Vec<f64> = if k < n {
                    (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect()
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(par::stream_seed(options.seed, k as u64));
                    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
                };
                quotient_ascent(domain, l, g, start, options)
            })
        }
    };
    // Ties keep the earliest start, so the result does not depend on threading.
    let iterations = results.iter().map(|r| r.iterations).sum();
    let mut best = results
        .into_iter()
        .reduce(|a, b| if b.ratio > a.ratio { b } else { a })
        .expect("at least one start");
    best.iterations = iterations;
    best
}

fn log_quotient(domain: &DomainDecomposition, c: &[f64], l: f64, g: f64) -> f64 {
    let num: f64 = c.iter().enumerate().map(|(i, v)| domain.measure(i) * v.abs().powf(g)).sum();
    let den = gradient_energy(domain, &extend(domain, c), l);
    num.ln() / g - den.ln() / l
}

fn log_quotient_gradient(domain: &DomainDecomposition, c: &[f64], l: f64, g: f64) -> Vec<f64> {
    let num: f64 = c.iter().enumerate().map(|(i, v)| domain.measure(i) * v.abs().powf(g)).sum();
    let values = extend(domain, c);
    let den = gradient_energy(domain, &values, l);
    let dden = gradient_energy_derivative(domain, &values, l);
    c.iter()
        .enumerate()
        .map(|(i, &v)| {
            let dnum = if v == 0.0 { 0.0 } else { domain.measure(i) * v.abs().powf(g - 1.0) * v.signum() };
            dnum / num - dden[i] / (l * den)
        })
        .collect()
}

fn normalise(domain: &DomainDecomposition, c: &mut [f64], l: f64) {
    let norm = w0_norm_interior(domain, c, l);
    for v in c.iter_mut() {
        *v /= norm;
    }
}

fn quotient_ascent(domain: &DomainDecomposition, l: f64, g: f64, mut c: Vec<f64>, options: &EmbeddingOptions) -> AscentResult {
    normalise(domain, &mut c, l);
    let mut value = log_quotient(domain, &c, l, g);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let grad = log_quotient_gradient(domain, &c, l, g);
        let scale = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gnorm2: f64 = grad.iter().map(|v| v * v).sum();
        if gnorm2.sqrt() * scale < options.tolerance {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial: Vec<f64> = c.iter().zip(&grad).map(|(x, d)| x + step * d).collect();
            normalise(domain, &mut trial, l);
            let v = log_quotient(domain, &trial, l, g);
            if v.is_finite() && v >= value + 1e-4 * step * gnorm2 {
                c = trial;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No ascent possible at working precision.
            converged = true;
            break;
        }
        step *= 2.0;
    }
    let ratio = lp_norm_interior(domain, &c, Exponent::Finite(g)) / w0_norm_interior(domain, &c, l);
    AscentResult { ratio, witness: c, converged, iterations }
}

/// Minimises `∫|∇u|^l` subject to `u(x_i) = 1` and returns the sup-norm
/// quotient of the minimiser.
fn pinned_minimum(domain: &DomainDecomposition, l: f64, pin: usize, options: &EmbeddingOptions) -> AscentResult {
    let n = domain.omega_len();
    let mut c = vec![0.0; n];
    c[pin] = 1.0;
    let mut value = gradient_energy(domain, &extend(domain, &c), l);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let mut grad = gradient_energy_derivative(domain, &extend(domain, &c), l);
        grad[pin] = 0.0;
        let gnorm2: f64 = grad.iter().map(|v| v * v).sum();
        if gnorm2.sqrt() < options.tolerance * value.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, d)| x - step * d).collect();
            let v = gradient_energy(domain, &extend(domain, &trial), l);
            if v <= value - 1e-4 * step * gnorm2 {
                c = trial;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
        step *= 2.0;
    }
    let norm = value.powf(1.0 / l);
    let ratio = lp_norm_interior(domain, &c, Exponent::Infinity) / norm;
    let witness = c.iter().map(|v| v / norm).collect();
    AscentResult { ratio, witness, converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{compute_boundary, path_graph};

    fn p3() -> DomainDecomposition {
        let g = path_graph(&["a", "b", "c"], 1.0, 1.0).unwrap();
        compute_boundary(&g, &["b"]).unwrap()
    }

    fn p5(mu: f64) -> DomainDecomposition {
        let g = path_graph(&["a", "b", "c", "d", "e"], mu, 1.0).unwrap();
        compute_boundary(&g, &["b", "c", "d"]).unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        let d = p3();
        let ib = VertexFunction::indicator(&d, 0).unwrap();
        assert_eq!(lp_norm(&d, &ib, Exponent::Finite(2.0), Region::Omega).unwrap(), 1.0);
        let z = VertexFunction::zeros(&d);
        for g in [Exponent::Finite(1.0), Exponent::Finite(3.5), Exponent::Infinity] {
            assert_eq!(lp_norm(&d, &z, g, Region::Omega).unwrap(), 0.0);
        }
        let d = p5(1.0);
        let u = VertexFunction::from_interior(&d, &[1.0, 2.0, 2.0]).unwrap();
        let n = lp_norm(&d, &u, Exponent::Finite(3.0), Region::Omega).unwrap();
        assert!((n - 17f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!((n - 2.5713).abs() < 1e-4);
        assert!(matches!(
            lp_norm(&d, &u, Exponent::Finite(0.5), Region::Omega),
            Err(SpaceError::InvalidGamma(_))
        ));
        assert!(Exponent::finite(0.9).is_err());
    }

    #[test]
    fn w0_norm_examples() {
        let d = p3();
        let u = SobolevElement::from_interior(&d, &[1.0], 2.0).unwrap();
        assert!((w0_norm(&d, &u) - 2f64.sqrt()).abs() < 1e-15);
        let u4 = SobolevElement::from_interior(&d, &[1.0], 4.0).unwrap();
        assert!((w0_norm(&d, &u4) - 1.5f64.powf(0.25)).abs() < 1e-15);
        assert!((w0_norm(&d, &u4) - 1.10668).abs() < 1e-5);
        let z = SobolevElement::new(VertexFunction::zeros(&d), 3.0).unwrap();
        assert_eq!(w0_norm(&d, &z), 0.0);
        let not_zero_bdry = VertexFunction::indicator(&d, 1).unwrap();
        assert!(matches!(SobolevElement::new(not_zero_bdry, 2.0), Err(SpaceError::MissingZeroBoundary)));
    }

    #[test]
    fn canonical_basis_has_dimension_omega() {
        assert_eq!(canonical_basis(&p3(), 2.0).unwrap().len(), 1);
        let d = p5(1.0);
        let basis = canonical_basis(&d, 3.0).unwrap();
        assert_eq!(basis.len(), 3);
        for (i, e) in basis.iter().enumerate() {
            assert!(e.function().zero_boundary());
            assert!(w0_norm(&d, e) > 0.0);
            assert_eq!(e.coefficients()[i], 1.0);
        }
    }

    #[test]
    fn weak_derivative_matches_finite_differences() {
        let d = p5(0.7);
        for l in [1.5, 2.0, 3.0] {
            let c = [0.3, -1.2, 0.8];
            let grad = gradient_energy_derivative(&d, &extend(&d, &c), l);
            for j in 0..3 {
                let h = 1e-6;
                let mut plus = c;
                let mut minus = c;
                plus[j] += h;
                minus[j] -= h;
                let fd = (gradient_energy(&d, &extend(&d, &plus), l)
                    - gradient_energy(&d, &extend(&d, &minus), l))
                    / (2.0 * h);
                assert!((fd - grad[j]).abs() < 1e-7 * (1.0 + fd.abs()), "l={l} j={j}: {fd} vs {}", grad[j]);
            }
        }
    }

    #[test]
    fn p3_embedding_constant_is_exact() {
        let d = p3();
        let opts = EmbeddingOptions::default();
        let r = embedding_constants(&d, 2.0, Exponent::Finite(2.0), &opts).unwrap();
        assert!((r.best_constant - 0.5f64.sqrt()).abs() < 1e-10);
        assert!(r.best_constant <= r.general_constant);
        let r = embedding_constants(&d, 2.0, Exponent::Infinity, &opts).unwrap();
        assert!((r.best_constant - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn witness_reproduces_ratio() {
        let d = p5(1.0);
        for gamma in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let r = embedding_constants(&d, 2.5, gamma, &EmbeddingOptions::default()).unwrap();
            let u = VertexFunction::from_interior(&d, &r.witness).unwrap();
            let num = lp_norm(&d, &u, gamma, Region::Omega).unwrap();
            let den = w0_norm(&d, &SobolevElement::new(u, 2.5).unwrap());
            assert!(((num / den) - r.best_constant).abs() <= 1e-8 * r.best_constant);
        }
    }

    #[test]
    fn execution_modes_agree() {
        let d = p5(1.0);
        let mut opts = EmbeddingOptions::default();
        let a = embedding_constants(&d, 3.0, Exponent::Finite(2.0), &opts).unwrap();
        opts.execution = Execution::Sequential;
        let b = embedding_constants(&d, 3.0, Exponent::Finite(2.0), &opts).unwrap();
        assert_eq!(a.best_constant.to_bits(), b.best_constant.to_bits());
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn exponent_serde() {
        assert_eq!(serde_json::to_string(&Exponent::Infinity).unwrap(), "\"inf\"");
        let e: Exponent = serde_json::from_str("2.5").unwrap();
        assert_eq!(e, Exponent::Finite(2.5));
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(e, Exponent::Infinity);
        assert!(serde_json::from_str::<Exponent>("0.5").is_err());
    }
}
