//! Weighted finite graphs, the boundary of a vertex set, and the discrete
//! differential operators (gradient form, gradient length, Laplacian,
//! l-Laplacian, integral) evaluated on the working set `Ω ∪ ∂Ω`.
//!
//! Functions supported in `Ω` vanish outside `Ω`, so every sum that matters
//! for the variational problem lives on the subgraph induced by `Ω ∪ ∂Ω`.
//! All operators here act on that induced subgraph with zero extension.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("invariant `unique-vertex-ids` violated: vertex `{0}` listed twice")]
    DuplicateVertex(String),
    #[error("invariant `measure-positivity` violated: mu({id}) = {mu} is not a positive finite number")]
    NonPositiveMeasure { id: String, mu: f64 },
    #[error("invariant `weight-positivity` violated: w({a},{b}) = {w} is not a positive finite number")]
    NonPositiveWeight { a: String, b: String, w: f64 },
    #[error("invariant `weight-symmetry` violated: edge {{{a},{b}}} given with weights {w1} and {w2}")]
    AsymmetricWeight { a: String, b: String, w1: f64, w2: f64 },
    #[error("invariant `unique-edges` violated: edge {{{a},{b}}} listed twice")]
    DuplicateEdge { a: String, b: String },
    #[error("invariant `no-self-loops` violated: self-loop at `{0}`")]
    SelfLoop(String),
    #[error("invariant `known-vertices` violated: unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("invariant `connected` violated: only {reached} of {total} vertices reachable from `{start}`")]
    Disconnected { start: String, reached: usize, total: usize },
    #[error("omega is empty")]
    EmptyOmega,
    #[error("omega lists vertex `{0}` twice")]
    DuplicateOmegaVertex(String),
    #[error("boundary of omega is empty")]
    EmptyBoundary,
    #[error("working subgraph component containing `{0}` does not touch the boundary")]
    UnanchoredComponent(String),
    #[error("vertex index {index} is outside the working set of size {size}")]
    OutsideWorkingSet { index: usize, size: usize },
    #[error("function has {got} values, working set has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("function does not vanish on the boundary: value {value} at `{id}`")]
    BoundaryNotZero { id: String, value: f64 },
    #[error("exponent l = {0} must satisfy l > 1")]
    InvalidExponent(f64),
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
}

impl GraphError {
    /// Short name of the violated invariant, used in CLI diagnostics.
    pub fn invariant(&self) -> &'static str {
        match self {
            GraphError::Empty => "non-empty",
            GraphError::DuplicateVertex(_) => "unique-vertex-ids",
            GraphError::NonPositiveMeasure { .. } => "measure-positivity",
            GraphError::NonPositiveWeight { .. } => "weight-positivity",
            GraphError::AsymmetricWeight { .. } => "weight-symmetry",
            GraphError::DuplicateEdge { .. } => "unique-edges",
            GraphError::SelfLoop(_) => "no-self-loops",
            GraphError::UnknownVertex(_) => "known-vertices",
            GraphError::Disconnected { .. } => "connected",
            GraphError::EmptyOmega => "omega-non-empty",
            GraphError::DuplicateOmegaVertex(_) => "omega-unique",
            GraphError::EmptyBoundary => "boundary-non-empty",
            GraphError::UnanchoredComponent(_) => "boundary-anchored",
            GraphError::OutsideWorkingSet { .. } => "working-set-membership",
            GraphError::LengthMismatch { .. } => "function-length",
            GraphError::BoundaryNotZero { .. } => "zero-boundary",
            GraphError::InvalidExponent(_) => "exponent-range",
            GraphError::Json(_) => "json-syntax",
        }
    }
}

/// A connected weighted graph with positive vertex measure and symmetric,
/// positive edge weights.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl WeightedGraph {
    /// Builds a graph from `(id, mu)` vertices and unordered `(a, b, w)` edges.
    ///
    /// Rejects non-positive measures or weights, self-loops, unknown
    /// endpoints, an edge listed twice (with differing weights this is
    /// reported as a symmetry violation), and disconnected graphs.
    pub fn new<S: AsRef<str>>(
        vertices: &[(S, f64)],
        edges: &[(S, S, f64)],
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut ids = Vec::with_capacity(vertices.len());
        let mut index = HashMap::with_capacity(vertices.len());
        let mut measure = Vec::with_capacity(vertices.len());
        for (id, mu) in vertices {
            let id = id.as_ref();
            if index.insert(id.to_string(), ids.len()).is_some() {
                return Err(GraphError::DuplicateVertex(id.to_string()));
            }
            if !(mu.is_finite() && *mu > 0.0) {
                return Err(GraphError::NonPositiveMeasure { id: id.to_string(), mu: *mu });
            }
            ids.push(id.to_string());
            measure.push(*mu);
        }

        let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (a, b, w) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
            if ia == ib {
                return Err(GraphError::SelfLoop(a.to_string()));
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(GraphError::NonPositiveWeight { a: a.into(), b: b.into(), w: *w });
            }
            let key = (ia.min(ib), ia.max(ib));
            if let Some(prev) = seen.insert(key, *w) {
                return Err(if prev != *w {
                    GraphError::AsymmetricWeight { a: a.into(), b: b.into(), w1: prev, w2: *w }
                } else {
                    GraphError::DuplicateEdge { a: a.into(), b: b.into() }
                });
            }
            adjacency[ia].push((ib, *w));
            adjacency[ib].push((ia, *w));
        }

        let graph = WeightedGraph { ids, index, measure, adjacency, edge_count: seen.len() };
        let reached = graph.reachable_from(0);
        if reached != graph.len() {
            return Err(GraphError::Disconnected {
                start: graph.ids[0].clone(),
                reached,
                total: graph.len(),
            });
        }
        Ok(graph)
    }

    fn reachable_from(&self, start: usize) -> usize {
        let mut visited = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !visited[y] {
                    visited[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// Weight of the edge `{x, y}`, if present.
    pub fn weight(&self, x: usize, y: usize) -> Option<f64> {
        self.adjacency[x].iter().find(|&&(z, _)| z == y).map(|&(_, w)| w)
    }

    /// `μ₀ = min_x μ(x)`.
    pub fn min_measure(&self) -> f64 {
        self.measure.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `Ω`, its boundary `∂Ω`, and the subgraph induced by `Ω ∪ ∂Ω`.
///
/// Local vertex indices put `Ω` first (sorted by id) and `∂Ω` after it
/// (sorted by id), so the first `omega_len()` entries of any
/// [`VertexFunction`] are its interior values.
#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    ids: Vec<String>,
    global: Vec<usize>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    omega_len: usize,
    local: HashMap<String, usize>,
}

/// Computes `∂Ω = { y ∉ Ω : ∃ x ∈ Ω, xy ∈ E }` and the induced working subgraph.
///
/// An empty boundary is a valid result (for example when `Ω = V`);
/// [`DomainDecomposition::validate`] is where theorem-level requirements are
/// checked.
pub fn compute_boundary<S: AsRef<str>>(
    graph: &WeightedGraph,
    omega: &[S],
) -> Result<DomainDecomposition, GraphError> {
    if omega.is_empty() {
        return Err(GraphError::EmptyOmega);
    }
    let mut interior = BTreeSet::new();
    for id in omega {
        let id = id.as_ref();
        let x = graph.index_of(id).ok_or_else(|| GraphError::UnknownVertex(id.to_string()))?;
        if !interior.insert((graph.id(x).to_string(), x)) {
            return Err(GraphError::DuplicateOmegaVertex(id.to_string()));
        }
    }
    let in_omega: Vec<bool> = {
        let mut flags = vec![false; graph.len()];
        for &(_, x) in &interior {
            flags[x] = true;
        }
        flags
    };
    let mut boundary = BTreeSet::new();
    for &(_, x) in &interior {
        for &(y, _) in graph.neighbors(x) {
            if !in_omega[y] {
                boundary.insert((graph.id(y).to_string(), y));
            }
        }
    }

    let omega_len = interior.len();
    let (ids, global): (Vec<String>, Vec<usize>) = interior.into_iter().chain(boundary).unzip();
    let local: HashMap<String, usize> =
        ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    let mut to_local = vec![usize::MAX; graph.len()];
    for (i, &g) in global.iter().enumerate() {
        to_local[g] = i;
    }
    let adjacency = global
        .iter()
        .map(|&g| {
            graph
                .neighbors(g)
                .iter()
                .filter(|&&(y, _)| to_local[y] != usize::MAX)
                .map(|&(y, w)| (to_local[y], w))
                .collect()
        })
        .collect();
    let measure = global.iter().map(|&g| graph.measure(g)).collect();

    Ok(DomainDecomposition { ids, global, measure, adjacency, omega_len, local })
}

/// Integration region.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    Omega,
    Boundary,
    Working,
    Vertices(&'a [usize]),
}

impl DomainDecomposition {
    /// Number of interior vertices, `#Ω`.
    pub fn omega_len(&self) -> usize {
        self.omega_len
    }

    pub fn boundary_len(&self) -> usize {
        self.ids.len() - self.omega_len
    }

    pub fn working_len(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn omega_ids(&self) -> &[String] {
        &self.ids[..self.omega_len]
    }

    pub fn boundary_ids(&self) -> &[String] {
        &self.ids[self.omega_len..]
    }

    /// Index of the vertex in the parent graph.
    pub fn global_index(&self, x: usize) -> usize {
        self.global[x]
    }

    pub fn local_index(&self, id: &str) -> Option<usize> {
        self.local.get(id).copied()
    }

    pub fn is_interior(&self, x: usize) -> bool {
        x < self.omega_len
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// `μ_min,Ω = min_{x∈Ω} μ(x)`.
    pub fn min_omega_measure(&self) -> f64 {
        self.measure[..self.omega_len].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_{x∈Ω} μ(x)`.
    pub fn omega_measure(&self) -> f64 {
        self.measure[..self.omega_len].iter().sum()
    }

    /// Checks what the existence theorems require of the domain: `Ω ≠ ∅`,
    /// `∂Ω ≠ ∅`, and every component of the working subgraph touches `∂Ω`
    /// (which makes the `W₀^{1,l}` norm definite).
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.omega_len == 0 {
            return Err(GraphError::EmptyOmega);
        }
        if self.boundary_len() == 0 {
            return Err(GraphError::EmptyBoundary);
        }
        let n = self.working_len();
        let mut anchored = vec![false; n];
        let mut queue: VecDeque<usize> = (self.omega_len..n).collect();
        anchored[self.omega_len..].fill(true);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !anchored[y] {
                    anchored[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match anchored.iter().position(|a| !a) {
            Some(x) => Err(GraphError::UnanchoredComponent(self.ids[x].clone())),
            None => Ok(()),
        }
    }

    fn check_vertex(&self, x: usize) -> Result<(), GraphError> {
        if x >= self.working_len() {
            return Err(GraphError::OutsideWorkingSet { index: x, size: self.working_len() });
        }
        Ok(())
    }

    fn check_function(&self, f: &VertexFunction) -> Result<(), GraphError> {
        if f.values.len() != self.working_len() {
            return Err(GraphError::LengthMismatch {
                expected: self.working_len(),
                got: f.values.len(),
            });
        }
        Ok(())
    }
}

/// Real values on `Ω ∪ ∂Ω`, laid out in the domain's local order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
    omega_len: usize,
    zero_boundary: bool,
}

impl VertexFunction {
    /// Arbitrary values on the working set.
    pub fn new(domain: &DomainDecomposition, values: Vec<f64>) -> Result<Self, GraphError> {
        if values.len() != domain.working_len() {
            return Err(GraphError::LengthMismatch { expected: domain.working_len(), got: values.len() });
        }
        Ok(VertexFunction { values, omega_len: domain.omega_len(), zero_boundary: false })
    }

    /// Values that must vanish on `∂Ω`; the claim is checked.
    pub fn with_zero_boundary(
        domain: &DomainDecomposition,
        values: Vec<f64>,
    ) -> Result<Self, GraphError> {
        let mut f = Self::new(domain, values)?;
        if let Some(i) = f.values[f.omega_len..].iter().position(|&v| v != 0.0) {
            let x = f.omega_len + i;
            return Err(GraphError::BoundaryNotZero { id: domain.id(x).to_string(), value: f.values[x] });
        }
        f.zero_boundary = true;
        Ok(f)
    }

    /// Zero extension of interior coefficients (one per `Ω` vertex).
    pub fn from_interior(domain: &DomainDecomposition, coefficients: &[f64]) -> Result<Self, GraphError> {
        if coefficients.len() != domain.omega_len() {
            return Err(GraphError::LengthMismatch { expected: domain.omega_len(), got: coefficients.len() });
        }
        let mut values = vec![0.0; domain.working_len()];
        values[..coefficients.len()].copy_from_slice(coefficients);
        Ok(VertexFunction { values, omega_len: domain.omega_len(), zero_boundary: true })
    }

    pub fn zeros(domain: &DomainDecomposition) -> Self {
        VertexFunction {
            values: vec![0.0; domain.working_len()],
            omega_len: domain.omega_len(),
            zero_boundary: true,
        }
    }

    pub fn constant(domain: &DomainDecomposition, c: f64) -> Self {
        VertexFunction {
            values: vec![c; domain.working_len()],
            omega_len: domain.omega_len(),
            zero_boundary: c == 0.0 || domain.boundary_len() == 0,
        }
    }

    /// Indicator of the working-set vertex `x`.
    pub fn indicator(domain: &DomainDecomposition, x: usize) -> Result<Self, GraphError> {
        domain.check_vertex(x)?;
        let mut values = vec![0.0; domain.working_len()];
        values[x] = 1.0;
        Ok(VertexFunction {
            values,
            omega_len: domain.omega_len(),
            zero_boundary: domain.is_interior(x),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[..self.omega_len]
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn zero_boundary(&self) -> bool {
        self.zero_boundary
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t · self`.
    pub fn scaled(&self, t: f64) -> Self {
        let out = VertexFunction {
            values: self.values.iter().map(|v| t * v).collect(),
            omega_len: self.omega_len,
            zero_boundary: self.zero_boundary,
        };
        out.assert_boundary();
        out
    }

    /// `a · self + b · other`.
    pub fn combine(&self, a: f64, other: &VertexFunction, b: f64) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "functions on different domains");
        let out = VertexFunction {
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
            omega_len: self.omega_len,
            zero_boundary: self.zero_boundary && other.zero_boundary,
        };
        out.assert_boundary();
        out
    }

    fn assert_boundary(&self) {
        if self.zero_boundary {
            assert!(
                self.values[self.omega_len..].iter().all(|&v| v == 0.0),
                "zero-boundary invariant broken"
            );
        }
    }
}

/// `|∇ψ|^{l-2}(z)` with the convention that the factor is 0 when the
/// gradient length vanishes and `l < 2`.
#[inline]
pub(crate) fn gradient_power_weight(grad_len: f64, l: f64) -> f64 {
    if grad_len == 0.0 && l < 2.0 {
        0.0
    } else {
        grad_len.powf(l - 2.0)
    }
}

/// `Γ(ψ,ψ)(x)` for raw working-set values.
#[inline]
pub(crate) fn gamma_diag_raw(domain: &DomainDecomposition, values: &[f64], x: usize) -> f64 {
    let vx = values[x];
    let s: f64 = domain.adjacency[x]
        .iter()
        .map(|&(y, w)| {
            let d = values[y] - vx;
            w * d * d
        })
        .sum();
    s / (2.0 * domain.measure[x])
}

/// `|∇ψ|` at every working-set vertex.
pub fn gradient_lengths(domain: &DomainDecomposition, values: &[f64]) -> Vec<f64> {
    (0..domain.working_len()).map(|x| gamma_diag_raw(domain, values, x).sqrt()).collect()
}

/// `Δ_l ψ(x)` for raw values given precomputed gradient lengths.
#[inline]
pub(crate) fn l_laplacian_raw(
    domain: &DomainDecomposition,
    values: &[f64],
    grad: &[f64],
    x: usize,
    l: f64,
) -> f64 {
    let ax = gradient_power_weight(grad[x], l);
    let vx = values[x];
    let s: f64 = domain.adjacency[x]
        .iter()
        .map(|&(y, w)| (gradient_power_weight(grad[y], l) + ax) * w * (values[y] - vx))
        .sum();
    s / (2.0 * domain.measure[x])
}

/// Gradient form `Γ(ψ₁, ψ₂)(x) = (1/2μ(x)) Σ_{y∼x} ω_xy (ψ₁(y)−ψ₁(x))(ψ₂(y)−ψ₂(x))`.
pub fn gamma(
    domain: &DomainDecomposition,
    f1: &VertexFunction,
    f2: &VertexFunction,
    x: usize,
) -> Result<f64, GraphError> {
    domain.check_vertex(x)?;
    domain.check_function(f1)?;
    domain.check_function(f2)?;
    let (a, b) = (&f1.values, &f2.values);
    let s: f64 = domain.adjacency[x]
        .iter()
        .map(|&(y, w)| w * (a[y] - a[x]) * (b[y] - b[x]))
        .sum();
    Ok(s / (2.0 * domain.measure[x]))
}

/// Gradient length `|∇ψ|(x) = √Γ(ψ,ψ)(x)`.
pub fn grad_norm(domain: &DomainDecomposition, f: &VertexFunction, x: usize) -> Result<f64, GraphError> {
    domain.check_vertex(x)?;
    domain.check_function(f)?;
    Ok(gamma_diag_raw(domain, &f.values, x).sqrt())
}

/// Graph Laplacian `Δψ(x) = (1/μ(x)) Σ_{y∼x} ω_xy (ψ(y)−ψ(x))`.
pub fn laplacian(domain: &DomainDecomposition, f: &VertexFunction, x: usize) -> Result<f64, GraphError> {
    domain.check_vertex(x)?;
    domain.check_function(f)?;
    let v = &f.values;
    let s: f64 = domain.adjacency[x].iter().map(|&(y, w)| w * (v[y] - v[x])).sum();
    Ok(s / domain.measure[x])
}

/// l-Laplacian
/// `Δ_l ψ(x) = (1/2μ(x)) Σ_{y∼x} (|∇ψ|^{l−2}(y) + |∇ψ|^{l−2}(x)) ω_xy (ψ(y)−ψ(x))`.
pub fn l_laplacian(
    domain: &DomainDecomposition,
    f: &VertexFunction,
    x: usize,
    l: f64,
) -> Result<f64, GraphError> {
    if !(l > 1.0 && l.is_finite()) {
        return Err(GraphError::InvalidExponent(l));
    }
    domain.check_vertex(x)?;
    domain.check_function(f)?;
    let v = &f.values;
    // Only x and its neighbours need gradient lengths.
    let mut grad = vec![0.0; domain.working_len()];
    grad[x] = gamma_diag_raw(domain, v, x).sqrt();
    for &(y, _) in &domain.adjacency[x] {
        grad[y] = gamma_diag_raw(domain, v, y).sqrt();
    }
    Ok(l_laplacian_raw(domain, v, &grad, x, l))
}

/// `∫_region ψ dμ = Σ_{x∈region} μ(x) ψ(x)`.
pub fn integrate(domain: &DomainDecomposition, f: &VertexFunction, region: Region<'_>) -> Result<f64, GraphError> {
    domain.check_function(f)?;
    let term = |x: usize| domain.measure[x] * f.values[x];
    Ok(match region {
        Region::Omega => (0..domain.omega_len).map(term).sum(),
        Region::Boundary => (domain.omega_len..domain.working_len()).map(term).sum(),
        Region::Working => (0..domain.working_len()).map(term).sum(),
        Region::Vertices(xs) => {
            for &x in xs {
                domain.check_vertex(x)?;
            }
            xs.iter().map(|&x| term(x)).sum()
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VertexRecord {
    pub id: String,
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeRecord {
    pub a: String,
    pub b: String,
    pub w: f64,
}

/// On-disk graph document: vertices with measure, unordered weighted edges,
/// and the interior set `Ω`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub omega: Vec<String>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<(WeightedGraph, DomainDecomposition), GraphError> {
        let vertices: Vec<(&str, f64)> = self.vertices.iter().map(|v| (v.id.as_str(), v.mu)).collect();
        let edges: Vec<(&str, &str, f64)> =
            self.edges.iter().map(|e| (e.a.as_str(), e.b.as_str(), e.w)).collect();
        let graph = WeightedGraph::new(&vertices, &edges)?;
        let domain = compute_boundary(&graph, &self.omega)?;
        Ok((graph, domain))
    }
}

/// Parses and validates a graph document in one step.
pub fn load_graph_json(text: &str) -> Result<(WeightedGraph, DomainDecomposition), GraphError> {
    GraphDocument::from_json(text)?.build()
}

/// Path graph on the given ids with uniform measure and weight.
pub fn path_graph(ids: &[&str], mu: f64, w: f64) -> Result<WeightedGraph, GraphError> {
    let vertices: Vec<(&str, f64)> = ids.iter().map(|&id| (id, mu)).collect();
    let edges: Vec<(&str, &str, f64)> = ids.windows(2).map(|p| (p[0], p[1], w)).collect();
    WeightedGraph::new(&vertices, &edges)
}
