//! Numerical counterparts of the existence results: ball-constrained
//! minimisation, a path-deformation mountain-pass search, scalar reductions
//! with multi-start multiplicity search, and verification of candidate
//! critical points.
//!
//! All iterations work on flat coefficient vectors `[u; v]` over `Ω`.
//! Candidates are finished with a Newton polish on the analytic gradient
//! (finite-difference Jacobian), and every returned point is re-verified
//! through [`verify`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kirchhoff::{product_norm_coeffs, Component, KirchhoffError, KirchhoffInstance, StatePair};
use crate::par::{map_range, stream_seed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub grad_tol: f64,
    pub residual_tol: f64,
    pub max_iters: usize,
    pub armijo_slope: f64,
    pub backtrack: f64,
    pub path_points: usize,
    pub restarts: usize,
    pub dedup_radius: f64,
    /// Component norms below this count as zero when classifying.
    pub zero_tol: f64,
    pub rng_seed: u64,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: 1e-8,
            residual_tol: 1e-8,
            max_iters: 100_000,
            armijo_slope: 1e-4,
            backtrack: 0.5,
            path_points: 50,
            restarts: 50,
            dedup_radius: 1e-6,
            zero_tol: 1e-9,
            rng_seed: 0,
            execution: Execution::Parallel,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("residual_tol", self.residual_tol),
            ("armijo_slope", self.armijo_slope),
            ("dedup_radius", self.dedup_radius),
            ("zero_tol", self.zero_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::InvalidConfig(format!("{name} must be a positive number, got {v}")));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(SolverError::InvalidConfig(format!("backtrack must lie in (0,1), got {}", self.backtrack)));
        }
        if self.path_points < 3 {
            return Err(SolverError::InvalidConfig(format!("path_points must be >= 3, got {}", self.path_points)));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Trivial,
    SemiTrivialU,
    SemiTrivialV,
    FullyNonTrivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MountainPass,
    Minimize,
    Scalar,
    Multiplicity,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub state: StatePair,
    pub energy: f64,
    pub grad_norm: f64,
    pub max_residual: f64,
    pub classification: Classification,
    pub method: Method,
    pub verified: bool,
    pub seed: u64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// On-disk form of a [`CriticalPoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPointRecord {
    pub u: BTreeMap<String, f64>,
    pub v: BTreeMap<String, f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub max_residual: f64,
    pub classification: Classification,
    pub method: Method,
    pub verified: bool,
    pub seed: u64,
    pub iterations: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CriticalPoint {
    pub fn coefficients(&self) -> Vec<f64> {
        self.state.coefficients()
    }

    pub fn record(&self, instance: &KirchhoffInstance) -> CriticalPointRecord {
        let ids = instance.domain().omega_ids();
        let zip = |c: &[f64]| ids.iter().cloned().zip(c.iter().copied()).collect();
        CriticalPointRecord {
            u: zip(self.state.u().coefficients()),
            v: zip(self.state.v().coefficients()),
            energy: self.energy,
            grad_norm: self.grad_norm,
            max_residual: self.max_residual,
            classification: self.classification,
            method: self.method,
            verified: self.verified,
            seed: self.seed,
            iterations: self.iterations,
            warnings: self.warnings.clone(),
        }
    }
}

impl CriticalPointRecord {
    /// Rebuilds the state on `instance`; every `Ω` vertex must be present.
    pub fn state(&self, instance: &KirchhoffInstance) -> Result<StatePair, KirchhoffError> {
        let ids = instance.domain().omega_ids();
        let mut x = Vec::with_capacity(2 * ids.len());
        for map in [&self.u, &self.v] {
            if map.len() != ids.len() {
                return Err(KirchhoffError::DomainMismatch(format!(
                    "record has {} values for {} omega vertices",
                    map.len(),
                    ids.len()
                )));
            }
            for id in ids {
                x.push(*map.get(id).ok_or_else(|| KirchhoffError::DomainMismatch(format!("record lacks vertex {id}")))?);
            }
        }
        StatePair::from_coefficients(instance, &x)
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("no start with negative energy inside the ball after {restarts} restarts")]
    NoNegativeStart { restarts: usize },
    #[error("descent stopped on the ball boundary with the gradient pointing outward (grad norm {})", .best.grad_norm)]
    BoundaryStuck { best: Box<CriticalPoint> },
    #[error("best point has energy {} >= 0", .best.energy)]
    NonNegativeEnergy { best: Box<CriticalPoint> },
    #[error("no verified critical point (best grad norm {}, residual {})", .best.grad_norm, .best.max_residual)]
    NotConverged { best: Box<CriticalPoint> },
    #[error("no endpoint with negative energy outside the ball up to t = {t:e}")]
    EndpointNotFound { t: f64 },
    #[error("endpoint has energy {energy} and norm {norm}; need negative energy")]
    InvalidEndpoint { energy: f64, norm: f64 },
    #[error("path maximum {path_max} fell below the barrier floor {floor} before the gradient converged")]
    GeometryCollapsed { path_max: f64, floor: f64, best: Box<CriticalPoint> },
    #[error(transparent)]
    Kirchhoff(#[from] KirchhoffError),
}

/// Classifies a pair by which components vanish (norm below `tol`).
pub fn classify_solution(state: &StatePair, tol: f64) -> Classification {
    match (state.norm_u() < tol, state.norm_v() < tol) {
        (true, true) => Classification::Trivial,
        (false, true) => Classification::SemiTrivialU,
        (true, false) => Classification::SemiTrivialV,
        (false, false) => Classification::FullyNonTrivial,
    }
}

/// Evaluates gradient norm, strong residual and classification of a state.
pub fn verify(instance: &KirchhoffInstance, state: &StatePair, config: &SolverConfig) -> Result<CriticalPoint, SolverError> {
    verify_tagged(instance, state, config, Method::Verify, config.rng_seed, 0)
}

fn verify_tagged(
    instance: &KirchhoffInstance,
    state: &StatePair,
    config: &SolverConfig,
    method: Method,
    seed: u64,
    iterations: usize,
) -> Result<CriticalPoint, SolverError> {
    let energy = instance.energy(state)?;
    let grad_norm = norm(&instance.gradient_vector(state)?);
    let max_residual = instance
        .strong_residual(state)?
        .into_iter()
        .map(|(a, b)| a.abs().max(b.abs()))
        .fold(0.0, f64::max);
    Ok(CriticalPoint {
        state: state.clone(),
        energy,
        grad_norm,
        max_residual,
        classification: classify_solution(state, config.zero_tol),
        method,
        verified: grad_norm < config.grad_tol && max_residual < config.residual_tol,
        seed,
        iterations,
        warnings: Vec::new(),
    })
}

fn point_from(
    instance: &KirchhoffInstance,
    x: &[f64],
    config: &SolverConfig,
    method: Method,
    seed: u64,
    iterations: usize,
) -> Result<CriticalPoint, SolverError> {
    let state = StatePair::from_coefficients(instance, x)?;
    verify_tagged(instance, &state, config, method, seed, iterations)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates a run is allowed to move.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Free {
    All,
    Only(Component),
}

impl Free {
    fn admits(self, n: usize, i: usize) -> bool {
        match self {
            Free::All => true,
            Free::Only(Component::U) => i < n,
            Free::Only(Component::V) => i >= n,
        }
    }
}

fn masked_gradient(instance: &KirchhoffInstance, x: &[f64], free: Free) -> Vec<f64> {
    let n = instance.dim();
    let mut g = instance.gradient_coeffs(x);
    for (i, gi) in g.iter_mut().enumerate() {
        if !free.admits(n, i) {
            *gi = 0.0;
        }
    }
    g
}

/// Radial projection onto the closed `X`-ball of radius `rho`.
fn project(instance: &KirchhoffInstance, x: &mut [f64], rho: Option<f64>) {
    if let Some(rho) = rho {
        let nx = product_norm_coeffs(instance, x);
        if nx > rho {
            let s = rho / nx;
            x.iter_mut().for_each(|c| *c *= s);
        }
    }
}

struct Descent {
    x: Vec<f64>,
    iterations: usize,
    /// The last Armijo search failed to find a decrease.
    stalled: bool,
}

/// Projected gradient descent with Armijo backtracking. The step length is
/// carried across iterations and doubled before each search.
fn descend(
    instance: &KirchhoffInstance,
    mut x: Vec<f64>,
    free: Free,
    rho: Option<f64>,
    tol: f64,
    config: &SolverConfig,
) -> Descent {
    let mut f = instance.energy_coeffs(&x);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut trial = vec![0.0; x.len()];
    while iterations < config.max_iters {
        let g = masked_gradient(instance, &x, free);
        let gn = norm(&g);
        if gn < tol {
            return Descent { x, iterations, stalled: false };
        }
        if iterations == 0 {
            step = 1.0 / gn.max(1.0);
        }
        let mut s = (2.0 * step).min(1e6);
        let accepted = loop {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *t = xi - s * gi;
            }
            project(instance, &mut trial, rho);
            let moved: Vec<f64> = trial.iter().zip(&x).map(|(t, xi)| t - xi).collect();
            let decrease = dot(&g, &moved);
            let ft = instance.energy_coeffs(&trial);
            if decrease < 0.0 && ft <= f + config.armijo_slope * decrease {
                break Some(ft);
            }
            s *= config.backtrack;
            if s < 1e-30 {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some(ft) => {
                debug_assert!(ft <= f, "Armijo step increased the energy");
                f = ft;
                step = s;
                x.copy_from_slice(&trial);
            }
            None => return Descent { x, iterations, stalled: true },
        }
    }
    Descent { x, iterations, stalled: false }
}

/// Newton iteration on the gradient over the free coordinates, with a
/// central-difference Jacobian and backtracking on the gradient norm.
/// Returns the iterate with the smallest gradient norm reached.
fn newton_polish(instance: &KirchhoffInstance, x0: &[f64], free: Free, target: f64, max_steps: usize) -> Vec<f64> {
    let n = instance.dim();
    let idx: Vec<usize> = (0..x0.len()).filter(|&i| free.admits(n, i)).collect();
    let m = idx.len();
    let mut x = x0.to_vec();
    let mut g = masked_gradient(instance, &x, free);
    let mut gn = norm(&g);
    for _ in 0..max_steps {
        if gn < target {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for (col, &j) in idx.iter().enumerate() {
            let h = 1e-7 * x[j].abs().max(1e-3);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let gp = instance.gradient_coeffs(&xp);
            let gm = instance.gradient_coeffs(&xm);
            for (row, &i) in idx.iter().enumerate() {
                jac[(row, col)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(m, idx.iter().map(|&i| -g[i]));
        let Some(delta) = jac.lu().solve(&rhs) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut trial = x.clone();
            for (k, &i) in idx.iter().enumerate() {
                trial[i] += t * delta[k];
            }
            let gt = masked_gradient(instance, &trial, free);
            let gtn = norm(&gt);
            if gtn.is_finite() && gtn < gn {
                x = trial;
                g = gt;
                gn = gtn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Number of negative eigenvalues of the symmetrised finite-difference
/// Hessian of `φ` at `state`.
pub fn morse_index(instance: &KirchhoffInstance, state: &StatePair) -> usize {
    let x = state.coefficients();
    let m = x.len();
    let mut hess = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        let h = 1e-6 * x[j].abs().max(1e-3);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let gp = instance.gradient_coeffs(&xp);
        let gm = instance.gradient_coeffs(&xm);
        for i in 0..m {
            hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    let scale = sym.amax().max(1.0);
    sym.symmetric_eigenvalues().iter().filter(|&&e| e < -1e-8 * scale).count()
}

/// Descent followed by Newton polish, falling back to further descent if
/// the polish does not reach the tolerance.
fn local_solve(
    instance: &KirchhoffInstance,
    x0: Vec<f64>,
    free: Free,
    rho: Option<f64>,
    config: &SolverConfig,
) -> (Vec<f64>, usize, bool) {
    let coarse = descend(instance, x0, free, rho, config.grad_tol.max(1e-6), config);
    let mut iterations = coarse.iterations;
    let polished = newton_polish(instance, &coarse.x, free, 1e-2 * config.grad_tol, 60);
    let inside = rho.is_none_or(|r| product_norm_coeffs(instance, &polished) <= r);
    let f_coarse = instance.energy_coeffs(&coarse.x);
    // The polish must stay in the same basin: no energy increase beyond
    // round-off relative to the descent iterate.
    let kept = inside && instance.energy_coeffs(&polished) <= f_coarse + 1e-9 * (1.0 + f_coarse.abs());
    if kept && norm(&masked_gradient(instance, &polished, free)) < config.grad_tol {
        return (polished, iterations, false);
    }
    let fine = descend(instance, coarse.x, free, rho, config.grad_tol, config);
    iterations += fine.iterations;
    (fine.x, iterations, fine.stalled)
}

fn random_direction(instance: &KirchhoffInstance, rng: &mut ChaCha8Rng, free: Free) -> Vec<f64> {
    let n = instance.dim();
    let mut d: Vec<f64> = (0..2 * n)
        .map(|i| if free.admits(n, i) { rng.random_range(-1.0..1.0) } else { 0.0 })
        .collect();
    let nd = product_norm_coeffs(instance, &d);
    if nd > 0.0 {
        d.iter_mut().for_each(|c| *c /= nd);
    }
    d
}

fn is_better(a: &CriticalPoint, b: &CriticalPoint) -> bool {
    match (a.verified, b.verified) {
        (true, false) => true,
        (false, true) => false,
        _ => a.energy < b.energy,
    }
}

/// Minimises `φ` over the closed ball `‖(u,v)‖_X ≤ rho`.
///
/// Each restart draws a random direction with both components active,
/// halves `t` from 1 until `φ(t·d) < 0` inside the ball, then runs
/// projected Armijo descent and a Newton polish. The lowest-energy verified
/// point wins; ties keep the earliest restart.
pub fn minimize_in_ball(instance: &KirchhoffInstance, rho: f64, config: &SolverConfig) -> Result<CriticalPoint, SolverError> {
    config.validate()?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(SolverError::InvalidRadius(rho));
    }
    let restarts = config.restarts.max(1);
    let runs = map_range(config.execution, restarts, |i| -> Result<Option<CriticalPoint>, SolverError> {
        let seed = stream_seed(config.rng_seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_direction(instance, &mut rng, Free::All);
        let mut t = 1.0;
        let mut start = None;
        for _ in 0..=60 {
            let x: Vec<f64> = d.iter().map(|c| t * c).collect();
            if t <= rho && instance.energy_coeffs(&x) < 0.0 {
                start = Some(x);
                break;
            }
            t *= 0.5;
        }
        let Some(x0) = start else { return Ok(None) };
        let (x, iterations, _) = local_solve(instance, x0, Free::All, Some(rho), config);
        Ok(Some(point_from(instance, &x, config, Method::Minimize, seed, iterations)?))
    });
    let mut best: Option<CriticalPoint> = None;
    for run in runs {
        if let Some(p) = run? {
            if best.as_ref().is_none_or(|b| is_better(&p, b)) {
                best = Some(p);
            }
        }
    }
    let best = best.ok_or(SolverError::NoNegativeStart { restarts })?;
    if !best.verified {
        let on_boundary = best.state.product_norm() >= rho * (1.0 - 1e-9);
        return Err(if on_boundary {
            SolverError::BoundaryStuck { best: Box::new(best) }
        } else {
            SolverError::NotConverged { best: Box::new(best) }
        });
    }
    if best.energy >= 0.0 {
        return Err(SolverError::NonNegativeEnergy { best: Box::new(best) });
    }
    Ok(best)
}

/// Doubles `t` along the all-ones direction on `Ω` (both components) until
/// `φ(t·d) < 0` and `‖t·d‖_X > rho`.
pub fn find_endpoint(instance: &KirchhoffInstance, rho: f64, config: &SolverConfig) -> Result<StatePair, SolverError> {
    let ones = vec![1.0; 2 * instance.dim()];
    find_endpoint_along(instance, &ones, rho, config)
}

/// [`find_endpoint`] along a caller-supplied direction `[u; v]`.
pub fn find_endpoint_along(
    instance: &KirchhoffInstance,
    direction: &[f64],
    rho: f64,
    config: &SolverConfig,
) -> Result<StatePair, SolverError> {
    config.validate()?;
    let d = StatePair::from_coefficients(instance, direction)?.coefficients();
    let mut t = 1.0;
    while t <= 1e30 {
        let x: Vec<f64> = d.iter().map(|c| t * c).collect();
        if instance.energy_coeffs(&x) < 0.0 && product_norm_coeffs(instance, &x) > rho {
            return Ok(StatePair::from_coefficients(instance, &x)?);
        }
        t *= 2.0;
    }
    Err(SolverError::EndpointNotFound { t })
}

/// One node of the final mountain-pass path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub index: usize,
    /// Normalised arc length in the `X` norm.
    pub t: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MountainPassRun {
    pub point: CriticalPoint,
    pub path: Vec<PathNode>,
    /// Number of negative Hessian eigenvalues at the returned point; 1 for
    /// a nondegenerate mountain-pass point.
    pub morse_index: usize,
}

impl MountainPassRun {
    /// `index,t,energy` rows with a header line.
    pub fn path_csv(&self) -> String {
        let mut out = String::from("index,t,energy\n");
        for n in &self.path {
            out.push_str(&format!("{},{:.17e},{:.17e}\n", n.index, n.t, n.energy));
        }
        out
    }
}

/// Re-spaces the interior nodes of a piecewise-linear path to equal arc
/// length in the `X` norm, keeping both ends fixed.
fn equidistribute(instance: &KirchhoffInstance, path: &mut [Vec<f64>]) {
    let n = path.len();
    let seg: Vec<f64> = path
        .windows(2)
        .map(|w| {
            let diff: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            product_norm_coeffs(instance, &diff)
        })
        .collect();
    let total: f64 = seg.iter().sum();
    if total <= 0.0 {
        return;
    }
    let old = path.to_vec();
    let mut k = 0;
    let mut acc = 0.0;
    for (i, node) in path.iter_mut().enumerate().take(n - 1).skip(1) {
        let target = total * i as f64 / (n - 1) as f64;
        while k < seg.len() - 1 && acc + seg[k] < target {
            acc += seg[k];
            k += 1;
        }
        let w = if seg[k] > 0.0 { ((target - acc) / seg[k]).clamp(0.0, 1.0) } else { 0.0 };
        for (j, c) in node.iter_mut().enumerate() {
            *c = (1.0 - w) * old[k][j] + w * old[k + 1][j];
        }
    }
}

fn path_profile_length(instance: &KirchhoffInstance, path: &[Vec<f64>]) -> f64 {
    path.windows(2)
        .map(|w| {
            let diff: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            product_norm_coeffs(instance, &diff)
        })
        .sum()
}

fn path_profile(instance: &KirchhoffInstance, path: &[Vec<f64>]) -> Vec<PathNode> {
    let mut arc = vec![0.0];
    for w in path.windows(2) {
        let diff: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
        arc.push(arc.last().unwrap() + product_norm_coeffs(instance, &diff));
    }
    let total = *arc.last().unwrap();
    path.iter()
        .enumerate()
        .map(|(i, x)| PathNode {
            index: i,
            t: if total > 0.0 { arc[i] / total } else { 0.0 },
            energy: instance.energy_coeffs(x),
        })
        .collect()
}

/// Path-deformation mountain-pass search between `0` and `endpoint`.
///
/// The segment is discretised into `path_points` nodes. Each iteration takes
/// an Armijo descent step at the path maximum and re-equidistributes the
/// nodes. Once the gradient at the maximum is small, or periodically, a
/// Newton polish is attempted from the maximum; it is accepted if it yields a
/// verified point with positive energy at or above `barrier` (when given).
/// The run fails if the path maximum drops below `barrier / 2`.
pub fn mountain_pass(
    instance: &KirchhoffInstance,
    endpoint: &StatePair,
    barrier: Option<f64>,
    config: &SolverConfig,
) -> Result<MountainPassRun, SolverError> {
    config.validate()?;
    let e = endpoint.coefficients();
    let fe = instance.energy_coeffs(&e);
    if fe >= 0.0 {
        return Err(SolverError::InvalidEndpoint { energy: fe, norm: endpoint.product_norm() });
    }
    let np = config.path_points;
    let mut path: Vec<Vec<f64>> = (0..np)
        .map(|i| {
            let s = i as f64 / (np - 1) as f64;
            e.iter().map(|c| s * c).collect()
        })
        .collect();
    let floor = barrier.map(|b| 0.5 * b);
    let accept_level = barrier.map_or(0.0, |b| b - 1e-8);
    let mut step: f64 = 1e-2;
    let mut best: Option<CriticalPoint> = None;
    let mut last_newton_grad = f64::INFINITY;

    for iteration in 0..config.max_iters {
        let energies: Vec<f64> = path.iter().map(|x| instance.energy_coeffs(x)).collect();
        let (imax, &fmax) = energies[1..np - 1]
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, f)| if *f > *acc.1 { (i, f) } else { acc });
        let imax = imax + 1;
        let x = path[imax].clone();
        let g = instance.gradient_coeffs(&x);
        let gn = norm(&g);

        let candidate = point_from(instance, &x, config, Method::MountainPass, config.rng_seed, iteration)?;
        if best.as_ref().is_none_or(|b| candidate.grad_norm < b.grad_norm) {
            best = Some(candidate);
        }
        if let Some(fl) = floor {
            if fmax < fl {
                return Err(SolverError::GeometryCollapsed {
                    path_max: fmax,
                    floor: fl,
                    best: Box::new(best.expect("candidate recorded")),
                });
            }
        }

        // Newton is tried when the maximum's gradient has shrunk by a
        // factor of ten since the last attempt.
        if gn < 0.1 * last_newton_grad || iteration % 500 == 0 {
            last_newton_grad = gn;
            let polished = newton_polish(instance, &x, Free::All, 1e-2 * config.grad_tol, 60);
            let p = point_from(instance, &polished, config, Method::MountainPass, config.rng_seed, iteration)?;
            let close = product_norm_coeffs(
                instance,
                &polished.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>(),
            ) <= 0.25 * product_norm_coeffs(instance, &e);
            if p.verified && p.energy > 0.0 && p.energy >= accept_level && close {
                path[imax] = polished;
                let morse_index = morse_index(instance, &p.state);
                return Ok(MountainPassRun { point: p, path: path_profile(instance, &path), morse_index });
            }
        }

        // The maximum may move at most half a node spacing per step so the
        // piecewise-linear path keeps resolving the barrier.
        let spacing = path_profile_length(instance, &path) / (np - 1) as f64;
        let g_len = product_norm_coeffs(instance, &g);
        let mut s = (2.0 * step).min(if g_len > 0.0 { 0.5 * spacing / g_len } else { 1.0 });
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - s * b).collect();
            if instance.energy_coeffs(&trial) <= fmax - config.armijo_slope * s * gn * gn {
                path[imax] = trial;
                step = s;
                break;
            }
            s *= config.backtrack;
            if s < 1e-30 {
                break;
            }
        }
        equidistribute(instance, &mut path);
    }
    Err(SolverError::NotConverged { best: Box::new(best.expect("at least one iteration")) })
}

/// Positive root of `d/dc ψ(c·e_x) = 0` for a single basis vector, where
/// `ψ` is the scalar functional of `component` with `g ≡ 0`. Returns 1 when
/// the sublinear term has no positive driving coefficient.
pub fn basis_root(instance: &KirchhoffInstance, component: Component, vertex: usize) -> f64 {
    let n = instance.dim();
    let prm = instance.params();
    let (l, lambda, h) = match component {
        Component::U => (prm.p, prm.lambda1, instance.coefficients().h1[vertex]),
        Component::V => (prm.q, prm.lambda2, instance.coefficients().h3[vertex]),
    };
    let drive = lambda * h * instance.domain().measure(vertex);
    if drive <= 0.0 {
        return 1.0;
    }
    let mut e = vec![0.0; 2 * n];
    let off = if component == Component::U { 0 } else { n };
    e[off + vertex] = 1.0;
    let k_energy = product_norm_coeffs(instance, &e).powf(l);
    // M(K c^l) K c^{l-r} is increasing in c > 0.
    let lhs = |c: f64| -> f64 {
        let m = instance.kirchhoff_m(component, k_energy * c.powf(l)).unwrap_or(f64::NAN);
        m * k_energy * c.powf(l - prm.r) - drive
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while lhs(hi) < 0.0 && hi < 1e30 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn embed(instance: &KirchhoffInstance, component: Component, c: &[f64]) -> Vec<f64> {
    let n = instance.dim();
    let mut x = vec![0.0; 2 * n];
    let off = if component == Component::U { 0 } else { n };
    x[off..off + n].copy_from_slice(c);
    x
}

fn scalar_warnings(instance: &KirchhoffInstance, component: Component) -> Vec<String> {
    let other = match component {
        Component::U => Component::V,
        Component::V => Component::U,
    };
    if instance.g_is_zero(other) {
        Vec::new()
    } else {
        vec![format!(
            "the forcing term of the {} equation is not identically zero, so a pair with that component zero cannot solve the system",
            match other {
                Component::U => "first",
                Component::V => "second",
            }
        )]
    }
}

/// Starts for the scalar searches: `±s·c_x·e_x` for every `Ω` vertex and
/// scale `s ∈ {0.1, 0.5, 1, 2}`, followed by `random` random states.
fn scalar_starts(instance: &KirchhoffInstance, component: Component, random: usize, seed: u64) -> Vec<(u64, Vec<f64>)> {
    let n = instance.dim();
    let mut starts = Vec::new();
    for x in 0..n {
        let c = basis_root(instance, component, x);
        for scale in [0.1, 0.5, 1.0, 2.0] {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[x] = sign * scale * c;
                starts.push((seed, embed(instance, component, &e)));
            }
        }
    }
    let magnitude = (0..n).map(|x| basis_root(instance, component, x)).fold(0.0, f64::max);
    for i in 0..random {
        let s = stream_seed(seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let c: Vec<f64> = (0..n).map(|_| magnitude * rng.random_range(-2.0..2.0)).collect();
        starts.push((s, embed(instance, component, &c)));
    }
    starts
}

fn scalar_runs(
    instance: &KirchhoffInstance,
    component: Component,
    starts: &[(u64, Vec<f64>)],
    method: Method,
    config: &SolverConfig,
) -> Result<Vec<CriticalPoint>, SolverError> {
    let free = Free::Only(component);
    // The multiplicity search also runs a Newton iteration from every
    // start, since descent alone only reaches local minima and most of the
    // antipodal pairs are saddle points.
    let saddles = method == Method::Multiplicity;
    let per_start = if saddles { 2 } else { 1 };
    map_range(config.execution, per_start * starts.len(), |k| {
        let (seed, x0) = &starts[k / per_start];
        if k % per_start == 1 {
            let x = newton_polish(instance, x0, free, 1e-2 * config.grad_tol, 200);
            return point_from(instance, &x, config, method, *seed, 0);
        }
        let (x, iterations, _) = local_solve(instance, x0.clone(), free, None, config);
        point_from(instance, &x, config, method, *seed, iterations)
    })
    .into_iter()
    .collect()
}

/// Minimises the scalar functional obtained by freezing the other component
/// at zero. Returns the lowest-energy verified point (earliest start on ties).
pub fn scalar_solve(instance: &KirchhoffInstance, component: Component, config: &SolverConfig) -> Result<CriticalPoint, SolverError> {
    config.validate()?;
    let starts = scalar_starts(instance, component, config.restarts, config.rng_seed);
    let runs = scalar_runs(instance, component, &starts, Method::Scalar, config)?;
    let mut best = runs.into_iter().reduce(|b, p| if is_better(&p, &b) { p } else { b }).expect("at least one start");
    best.warnings = scalar_warnings(instance, component);
    if !best.verified {
        return Err(SolverError::NotConverged { best: Box::new(best) });
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    /// Distinct verified nonzero points, closed under `u ↦ −u`, sorted by
    /// energy then coefficients.
    pub points: Vec<CriticalPoint>,
    pub pairs: usize,
    /// `#Ω`, the number of pairs guaranteed to exist.
    pub target: usize,
    pub under_count: bool,
    pub starts: usize,
    pub warnings: Vec<String>,
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Multi-start search for distinct antipodal pairs of nonzero critical
/// points of the even scalar functional.
pub fn scalar_multiplicity(
    instance: &KirchhoffInstance,
    component: Component,
    config: &SolverConfig,
) -> Result<MultiplicityReport, SolverError> {
    config.validate()?;
    let mut warnings = scalar_warnings(instance, component);
    if !instance.g_is_zero(component) {
        warnings.push("the functional is not even because the forcing term is nonzero; antipodal closure is skipped".into());
    }
    let even = instance.g_is_zero(component);
    let starts = scalar_starts(instance, component, config.restarts, config.rng_seed);
    let runs = scalar_runs(instance, component, &starts, Method::Multiplicity, config)?;

    let mut found: Vec<CriticalPoint> = Vec::new();
    let consider = |p: CriticalPoint, found: &mut Vec<CriticalPoint>| {
        if !p.verified || p.classification == Classification::Trivial {
            return;
        }
        let x = p.coefficients();
        for q in found.iter_mut() {
            let diff: Vec<f64> = x.iter().zip(q.coefficients()).map(|(a, b)| a - b).collect();
            if product_norm_coeffs(instance, &diff) < config.dedup_radius {
                if lexicographic(&x, &q.coefficients()).is_lt() {
                    *q = p;
                }
                return;
            }
        }
        found.push(p);
    };
    for p in runs {
        consider(p, &mut found);
    }
    if even {
        let originals = found.clone();
        for p in originals {
            let neg: Vec<f64> = p.coefficients().iter().map(|c| -c).collect();
            let q = point_from(instance, &neg, config, Method::Multiplicity, p.seed, p.iterations)?;
            consider(q, &mut found);
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| lexicographic(&a.coefficients(), &b.coefficients())));
    for p in &mut found {
        p.warnings = warnings.clone();
    }
    let pairs = if even { found.len() / 2 } else { found.len() };
    let target = instance.dim();
    Ok(MultiplicityReport { points: found, pairs, target, under_count: pairs < target, starts: starts.len(), warnings })
}

/// Unconstrained multi-start search over the full space: from each of
/// `config.restarts` random states, runs descent with Newton polish and a
/// pure Newton iteration. Returns the distinct verified points found,
/// sorted by energy.
pub fn multistart_sweep(instance: &KirchhoffInstance, scale: f64, config: &SolverConfig) -> Result<Vec<CriticalPoint>, SolverError> {
    config.validate()?;
    let n = instance.dim();
    let runs = map_range(config.execution, 2 * config.restarts, |k| {
        let seed = stream_seed(config.rng_seed, (k / 2) as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<f64> = (0..2 * n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        if k % 2 == 1 {
            let x = newton_polish(instance, &x0, Free::All, 1e-2 * config.grad_tol, 200);
            return point_from(instance, &x, config, Method::Verify, seed, 0);
        }
        let (x, iterations, _) = local_solve(instance, x0, Free::All, None, config);
        point_from(instance, &x, config, Method::Verify, seed, iterations)
    });
    let mut found: Vec<CriticalPoint> = Vec::new();
    for p in runs {
        let p = p?;
        if !p.verified {
            continue;
        }
        let x = p.coefficients();
        let duplicate = found.iter().any(|q| {
            let diff: Vec<f64> = x.iter().zip(q.coefficients()).map(|(a, b)| a - b).collect();
            product_norm_coeffs(instance, &diff) < config.dedup_radius
        });
        if !duplicate {
            found.push(p);
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| lexicographic(&a.coefficients(), &b.coefficients())));
    Ok(found)
}
