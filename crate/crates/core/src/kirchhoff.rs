//! The `(p,q)`-Kirchhoff system on `Ω`: instance data, the energy
//! functional and its derivative, the pointwise residual of the system, and
//! the hypothesis and mountain-pass geometry constants.
//!
//! States are handled as flat coefficient vectors `[u(x_1..x_n), v(x_1..x_n)]`
//! over the interior vertices; boundary values are zero by construction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{self, gamma_diag_raw, gradient_lengths, l_laplacian_raw, DomainDecomposition, GraphError, VertexFunction};
use crate::spaces::{self, EmbeddingReport, SobolevElement, SpaceError};

#[derive(Debug, Error)]
pub enum KirchhoffError {
    #[error("parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("coefficient `{0}` is missing")]
    MissingCoefficient(String),
    #[error("coefficient `{coefficient}` has no value for omega vertex `{vertex}`")]
    MissingCoefficientValue { coefficient: String, vertex: String },
    #[error("coefficient `{coefficient}` names `{vertex}`, which is not an omega vertex")]
    UnknownCoefficientVertex { coefficient: String, vertex: String },
    #[error("unknown coefficient `{0}` (expected h1, h2, h3, g1, g2)")]
    UnknownCoefficient(String),
    #[error("coefficient `{coefficient}` at `{vertex}` is not finite")]
    NonFiniteCoefficient { coefficient: String, vertex: String },
    #[error("state does not match the instance domain: {0}")]
    DomainMismatch(String),
    #[error("Kirchhoff function evaluated at negative argument {0}")]
    NegativeArgument(f64),
    #[error("alpha + beta = {sum} must exceed max(p,q)(k+1) = {leading}")]
    ExponentGap { sum: f64, leading: f64 },
    #[error("embedding report for l = {found} where l = {expected} was required")]
    WrongEmbedding { expected: f64, found: f64 },
    #[error("state does not vanish on the boundary")]
    BoundaryViolation,
    #[error("malformed instance document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Scalar parameters of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Parameters {
    /// `max{p,q}(k+1)`.
    pub fn leading_exponent(&self) -> f64 {
        self.p.max(self.q) * (self.k + 1.0)
    }

    pub fn coupling_exponent(&self) -> f64 {
        self.alpha + self.beta
    }

    fn validate(&self) -> Result<(), KirchhoffError> {
        let named = [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("k", self.k),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("a1", self.a1),
            ("a2", self.a2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(KirchhoffError::InvalidParameter { name, value, reason: "must be finite" });
            }
        }
        for (name, value) in [("p", self.p), ("q", self.q), ("r", self.r), ("alpha", self.alpha), ("beta", self.beta)] {
            if value <= 1.0 {
                return Err(KirchhoffError::InvalidParameter {
                    name,
                    value,
                    reason: "exponent must exceed 1 for a C^1 functional",
                });
            }
        }
        if self.k < 0.0 {
            return Err(KirchhoffError::InvalidParameter { name: "k", value: self.k, reason: "must be >= 0" });
        }
        for (name, value) in [("a1", self.a1), ("a2", self.a2)] {
            if value <= 0.0 {
                return Err(KirchhoffError::InvalidParameter { name, value, reason: "must be > 0" });
            }
        }
        for (name, value) in [("b1", self.b1), ("b2", self.b2)] {
            if value < 0.0 {
                return Err(KirchhoffError::InvalidParameter { name, value, reason: "must be >= 0" });
            }
        }
        Ok(())
    }
}

/// Which exponent the `g_i` norms use in the hypothesis tail and in the
/// profile `g(z)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailMode {
    /// `‖g_1‖_{L^{p/(p-1)}}^{p/(p-1)}`, as produced by Young's inequality.
    #[default]
    #[serde(rename = "proof")]
    ProofConsistent,
    /// `‖g_1‖_{L^{p/(p-r)}}^{p/(p-r)}`, as printed in the hypothesis.
    #[serde(rename = "literal")]
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    U,
    V,
}

/// Coefficient functions on `Ω`, in the domain's interior order.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub h3: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

impl Coefficients {
    pub fn constant(n: usize, h1: f64, h2: f64, h3: f64, g1: f64, g2: f64) -> Self {
        Coefficients { h1: vec![h1; n], h2: vec![h2; n], h3: vec![h3; n], g1: vec![g1; n], g2: vec![g2; n] }
    }

    fn named(&self) -> [(&'static str, &Vec<f64>); 5] {
        [("h1", &self.h1), ("h2", &self.h2), ("h3", &self.h3), ("g1", &self.g1), ("g2", &self.g2)]
    }
}

/// Cached minima and maxima of the coefficients over `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    /// `h_i^⋆ = min h_i`, i = 1, 2, 3.
    pub h_min: [f64; 3],
    /// `H_i = max h_i`.
    pub h_max: [f64; 3],
    /// `g_i^⋆ = min g_i`, i = 1, 2.
    pub g_min: [f64; 2],
    /// `G_i = max g_i`.
    pub g_max: [f64; 2],
    /// `‖h_2‖_∞`.
    pub h2_sup: f64,
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `|t|^{s-2} t`, continuous at 0 for `s > 1`.
#[inline]
pub(crate) fn signed_pow(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(s - 1.0)
    }
}

#[derive(Debug, Clone)]
pub struct KirchhoffInstance {
    params: Parameters,
    coefficients: Coefficients,
    domain: DomainDecomposition,
    tail_mode: TailMode,
    extrema: Extrema,
    warnings: Vec<String>,
}

impl KirchhoffInstance {
    pub fn new(
        domain: DomainDecomposition,
        params: Parameters,
        coefficients: Coefficients,
        tail_mode: TailMode,
    ) -> Result<Self, KirchhoffError> {
        params.validate()?;
        let n = domain.omega_len();
        let mut warnings = Vec::new();
        for (name, values) in coefficients.named() {
            if values.len() != n {
                return Err(KirchhoffError::DomainMismatch(format!(
                    "coefficient {name} has {} values for {n} omega vertices",
                    values.len()
                )));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(KirchhoffError::NonFiniteCoefficient {
                    coefficient: name.into(),
                    vertex: domain.id(i).into(),
                });
            }
            if name.starts_with('h') {
                if let Some(i) = values.iter().position(|&v| v <= 0.0) {
                    warnings.push(format!(
                        "{name} is not positive on omega: {name}({}) = {}",
                        domain.id(i),
                        values[i]
                    ));
                }
            }
        }
        let extrema = Extrema {
            h_min: [min_of(&coefficients.h1), min_of(&coefficients.h2), min_of(&coefficients.h3)],
            h_max: [max_of(&coefficients.h1), max_of(&coefficients.h2), max_of(&coefficients.h3)],
            g_min: [min_of(&coefficients.g1), min_of(&coefficients.g2)],
            g_max: [max_of(&coefficients.g1), max_of(&coefficients.g2)],
            h2_sup: coefficients.h2.iter().map(|v| v.abs()).fold(0.0, f64::max),
        };
        Ok(KirchhoffInstance { params, coefficients, domain, tail_mode, extrema, warnings })
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn domain(&self) -> &DomainDecomposition {
        &self.domain
    }

    pub fn tail_mode(&self) -> TailMode {
        self.tail_mode
    }

    pub fn with_tail_mode(mut self, mode: TailMode) -> Self {
        self.tail_mode = mode;
        self
    }

    pub fn extrema(&self) -> &Extrema {
        &self.extrema
    }

    /// Load-time validation findings that do not prevent evaluation
    /// (for example a non-positive `h_i`).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `#Ω`.
    pub fn dim(&self) -> usize {
        self.domain.omega_len()
    }

    pub fn exponent(&self, c: Component) -> f64 {
        match c {
            Component::U => self.params.p,
            Component::V => self.params.q,
        }
    }

    pub fn g_is_zero(&self, c: Component) -> bool {
        match c {
            Component::U => self.coefficients.g1.iter().all(|&v| v == 0.0),
            Component::V => self.coefficients.g2.iter().all(|&v| v == 0.0),
        }
    }

    /// `M_i(s) = a_i + b_i s^k`.
    pub fn kirchhoff_m(&self, c: Component, s: f64) -> Result<f64, KirchhoffError> {
        if s < 0.0 || s.is_nan() {
            return Err(KirchhoffError::NegativeArgument(s));
        }
        Ok(self.kirchhoff_m_unchecked(c, s))
    }

    fn kirchhoff_m_unchecked(&self, c: Component, s: f64) -> f64 {
        let (a, b) = match c {
            Component::U => (self.params.a1, self.params.b1),
            Component::V => (self.params.a2, self.params.b2),
        };
        // 0^0 = 1 so k = 0 gives the constant a + b.
        a + b * s.powf(self.params.k)
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(self.dim())
    }

    /// `φ(u, v)` for a flat coefficient vector `[u; v]`.
    pub fn energy_coeffs(&self, x: &[f64]) -> f64 {
        let Parameters { p, q, r, k, alpha, beta, a1, a2, b1, b2, lambda1, lambda2 } = self.params;
        let (u, v) = self.split(x);
        let ep = spaces::gradient_energy(&self.domain, &spaces::extend(&self.domain, u), p);
        let eq = spaces::gradient_energy(&self.domain, &spaces::extend(&self.domain, v), q);
        let mut value = a1 / p * ep + b1 / (p * (k + 1.0)) * ep.powf(k + 1.0) + a2 / q * eq
            + b2 / (q * (k + 1.0)) * eq.powf(k + 1.0);
        let c = &self.coefficients;
        for i in 0..self.dim() {
            let mu = self.domain.measure(i);
            let (ui, vi) = (u[i].abs(), v[i].abs());
            value -= mu
                * (lambda1 / r * c.h1[i] * ui.powf(r)
                    + lambda2 / r * c.h3[i] * vi.powf(r)
                    + c.h2[i] * ui.powf(alpha) * vi.powf(beta) / (alpha + beta)
                    + c.g1[i] * u[i]
                    + c.g2[i] * v[i]);
        }
        value
    }

    /// `φ(u, v)`.
    pub fn energy(&self, state: &StatePair) -> Result<f64, KirchhoffError> {
        self.check_state(state)?;
        Ok(self.energy_coeffs(&state.coefficients()))
    }

    /// Coefficients of `φ'(u,v)` against the canonical basis, `2·#Ω` entries.
    pub fn gradient_coeffs(&self, x: &[f64]) -> Vec<f64> {
        let Parameters { p, q, r, alpha, beta, lambda1, lambda2, .. } = self.params;
        let n = self.dim();
        let (u, v) = self.split(x);
        let uw = spaces::extend(&self.domain, u);
        let vw = spaces::extend(&self.domain, v);
        let ep = spaces::gradient_energy(&self.domain, &uw, p);
        let eq = spaces::gradient_energy(&self.domain, &vw, q);
        let mu_p = self.kirchhoff_m_unchecked(Component::U, ep) / p;
        let mu_q = self.kirchhoff_m_unchecked(Component::V, eq) / q;
        let du = spaces::gradient_energy_derivative(&self.domain, &uw, p);
        let dv = spaces::gradient_energy_derivative(&self.domain, &vw, q);
        let c = &self.coefficients;
        let ab = alpha + beta;
        let mut out = vec![0.0; 2 * n];
        for i in 0..n {
            let mu = self.domain.measure(i);
            let (ui, vi) = (u[i], v[i]);
            out[i] = mu_p * du[i]
                - mu * (lambda1 * c.h1[i] * signed_pow(ui, r)
                    + alpha / ab * c.h2[i] * signed_pow(ui, alpha) * vi.abs().powf(beta)
                    + c.g1[i]);
            out[n + i] = mu_q * dv[i]
                - mu * (lambda2 * c.h3[i] * signed_pow(vi, r)
                    + beta / ab * c.h2[i] * ui.abs().powf(alpha) * signed_pow(vi, beta)
                    + c.g2[i]);
        }
        out
    }

    /// Gradient vector of `φ` with respect to the canonical-basis coefficients.
    pub fn gradient_vector(&self, state: &StatePair) -> Result<Vec<f64>, KirchhoffError> {
        self.check_state(state)?;
        Ok(self.gradient_coeffs(&state.coefficients()))
    }

    /// `⟨φ'(u,v), (φ₁,φ₂)⟩`, evaluated from the gradient-form expression:
    /// Kirchhoff-weighted `|∇u|^{p−2} Γ(u, φ₁)` over `Ω ∪ ∂Ω`, minus the
    /// nonlinear and forcing terms over `Ω`.
    pub fn directional_derivative(&self, state: &StatePair, direction: &StatePair) -> Result<f64, KirchhoffError> {
        self.check_state(state)?;
        self.check_state(direction)?;
        let Parameters { p, q, r, alpha, beta, lambda1, lambda2, .. } = self.params;
        let d = &self.domain;
        let (u, v) = (state.u.function(), state.v.function());
        let (f1, f2) = (direction.u.function(), direction.v.function());
        let mp = self.kirchhoff_m_unchecked(Component::U, state.norm_u.powf(p));
        let mq = self.kirchhoff_m_unchecked(Component::V, state.norm_v.powf(q));
        let mut total = 0.0;
        for x in 0..d.working_len() {
            let gu = graph::grad_norm(d, u, x)?;
            let gv = graph::grad_norm(d, v, x)?;
            total += d.measure(x)
                * (mp * graph::gradient_power_weight(gu, p) * graph::gamma(d, u, f1, x)?
                    + mq * graph::gradient_power_weight(gv, q) * graph::gamma(d, v, f2, x)?);
        }
        let c = &self.coefficients;
        let ab = alpha + beta;
        for i in 0..d.omega_len() {
            let (ui, vi) = (u.value(i), v.value(i));
            let first = lambda1 * c.h1[i] * signed_pow(ui, r)
                + alpha / ab * c.h2[i] * signed_pow(ui, alpha) * vi.abs().powf(beta)
                + c.g1[i];
            let second = lambda2 * c.h3[i] * signed_pow(vi, r)
                + beta / ab * c.h2[i] * ui.abs().powf(alpha) * signed_pow(vi, beta)
                + c.g2[i];
            total -= d.measure(i) * (first * f1.value(i) + second * f2.value(i));
        }
        Ok(total)
    }

    /// LHS − RHS of both equations of the system at every `x ∈ Ω`, computed
    /// with the l-Laplacian.
    pub fn residual_coeffs(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let Parameters { p, q, r, alpha, beta, lambda1, lambda2, .. } = self.params;
        let n = self.dim();
        let d = &self.domain;
        let (u, v) = self.split(x);
        let uw = spaces::extend(d, u);
        let vw = spaces::extend(d, v);
        let gu = gradient_lengths(d, &uw);
        let gv = gradient_lengths(d, &vw);
        let ep: f64 = (0..d.working_len()).map(|z| d.measure(z) * gamma_diag_raw(d, &uw, z).powf(0.5 * p)).sum();
        let eq: f64 = (0..d.working_len()).map(|z| d.measure(z) * gamma_diag_raw(d, &vw, z).powf(0.5 * q)).sum();
        let mp = self.kirchhoff_m_unchecked(Component::U, ep);
        let mq = self.kirchhoff_m_unchecked(Component::V, eq);
        let c = &self.coefficients;
        let ab = alpha + beta;
        let mut ru = vec![0.0; n];
        let mut rv = vec![0.0; n];
        for i in 0..n {
            let (ui, vi) = (u[i], v[i]);
            ru[i] = -mp * l_laplacian_raw(d, &uw, &gu, i, p)
                - (lambda1 * c.h1[i] * signed_pow(ui, r)
                    + alpha / ab * c.h2[i] * signed_pow(ui, alpha) * vi.abs().powf(beta)
                    + c.g1[i]);
            rv[i] = -mq * l_laplacian_raw(d, &vw, &gv, i, q)
                - (lambda2 * c.h3[i] * signed_pow(vi, r)
                    + beta / ab * c.h2[i] * ui.abs().powf(alpha) * signed_pow(vi, beta)
                    + c.g2[i]);
        }
        (ru, rv)
    }

    /// Pointwise residual pairs `(first equation, second equation)` over `Ω`.
    pub fn strong_residual(&self, state: &StatePair) -> Result<Vec<(f64, f64)>, KirchhoffError> {
        self.check_state(state)?;
        let (ru, rv) = self.residual_coeffs(&state.coefficients());
        Ok(ru.into_iter().zip(rv).collect())
    }

    fn check_state(&self, state: &StatePair) -> Result<(), KirchhoffError> {
        let n = self.dim();
        if state.u.function().len() != self.domain.working_len() || state.u.coefficients().len() != n {
            return Err(KirchhoffError::DomainMismatch("u has the wrong length".into()));
        }
        if state.v.function().len() != self.domain.working_len() {
            return Err(KirchhoffError::DomainMismatch("v has the wrong length".into()));
        }
        if state.u.exponent() != self.params.p || state.v.exponent() != self.params.q {
            return Err(KirchhoffError::DomainMismatch("state exponents differ from (p, q)".into()));
        }
        Ok(())
    }

    fn check_embedding(&self, emb: &EmbeddingReport, l: f64) -> Result<(), KirchhoffError> {
        if emb.l != l {
            return Err(KirchhoffError::WrongEmbedding { expected: l, found: emb.l });
        }
        Ok(())
    }

    /// The two summands of the tail constant in `g(z)`: the `h`-part and
    /// the `g`-part.
    pub fn tail_parts(&self) -> (f64, f64) {
        let Parameters { p, q, r, lambda1, lambda2, .. } = self.params;
        let d = &self.domain;
        let c = &self.coefficients;
        let pow_sum = |f: &[f64], e: f64| -> f64 {
            f.iter().enumerate().map(|(i, v)| d.measure(i) * v.abs().powf(e)).sum()
        };
        let h_part = (lambda1 * (p - r) / (p * r)).max(lambda2 * (q - r) / (q * r))
            * (pow_sum(&c.h1, p / (p - r)) + pow_sum(&c.h3, q / (q - r)));
        let (ep, eq) = match self.tail_mode {
            TailMode::ProofConsistent => (p / (p - 1.0), q / (q - 1.0)),
            TailMode::Literal => (p / (p - r), q / (q - r)),
        };
        let g_part = ((p - 1.0) / p).max((q - 1.0) / q) * (pow_sum(&c.g1, ep) + pow_sum(&c.g2, eq));
        (h_part, g_part)
    }

    /// `M₁`, `M₂`, the exponents and the tail of the profile `g(z)`.
    pub fn geometry(&self, emb_p: &EmbeddingReport, emb_q: &EmbeddingReport) -> Result<Geometry, KirchhoffError> {
        self.check_embedding(emb_p, self.params.p)?;
        self.check_embedding(emb_q, self.params.q)?;
        let Parameters { p, q, k, alpha, beta, b1, b2, .. } = self.params;
        let leading = self.params.leading_exponent();
        let ab = alpha + beta;
        let (cp, cq) = (emb_p.c1(), emb_q.c1());
        let m1 = 2f64.powf(1.0 - leading) * (b1 / (p * (k + 1.0))).min(b2 / (q * (k + 1.0)));
        let m2 = self.extrema.h2_sup / (ab * ab) * (alpha * cp.powf(ab)).max(beta * cq.powf(ab));
        let (h, g) = self.tail_parts();
        Ok(Geometry { leading_exponent: leading, coupling_exponent: ab, m1, m2, tail: h + g })
    }

    /// `g(z) = M₁ z^{max{p,q}(k+1)} − M₂ z^{α+β} − tail`.
    pub fn g_profile(&self, emb_p: &EmbeddingReport, emb_q: &EmbeddingReport, z: f64) -> Result<f64, KirchhoffError> {
        Ok(self.geometry(emb_p, emb_q)?.g(z))
    }

    /// `M₁, M₂, z*, g(z*), g''(z*)`; the mountain-pass radius is `ρ = z*`.
    pub fn mountain_pass_radius(
        &self,
        emb_p: &EmbeddingReport,
        emb_q: &EmbeddingReport,
    ) -> Result<RadiusReport, KirchhoffError> {
        self.geometry(emb_p, emb_q)?.radius()
    }

    /// Evaluates (H1)–(H4) with explicit margins (positive = satisfied).
    pub fn check_hypotheses(
        &self,
        emb_p: &EmbeddingReport,
        emb_q: &EmbeddingReport,
    ) -> Result<HypothesisReport, KirchhoffError> {
        self.check_embedding(emb_p, self.params.p)?;
        self.check_embedding(emb_q, self.params.q)?;
        let Parameters { p, q, r, k, alpha, beta, a1, a2, b1, b2, lambda1, lambda2 } = self.params;
        let (cp, cq) = (emb_p.c1(), emb_q.c1());
        let e = &self.extrema;

        let h1 = vec![
            Check::strict("a1 > C_{1,p}^p", a1 - cp.powf(p)),
            Check::strict("a2 > C_{1,q}^q", a2 - cq.powf(q)),
            Check::strict("b1 > 0", b1),
            Check::strict("b2 > 0", b2),
            Check::non_strict("k >= 0", k),
        ];
        let h2 = vec![
            Check::strict("h1 > 0 on omega", e.h_min[0]),
            Check::strict("h2 > 0 on omega", e.h_min[1]),
            Check::strict("h3 > 0 on omega", e.h_min[2]),
        ];
        let leading = self.params.leading_exponent();
        let h3 = vec![
            Check::strict("p > 1", p - 1.0),
            Check::strict("q > 1", q - 1.0),
            Check::strict("r > 1", r - 1.0),
            Check::strict("lambda1 > 0", lambda1),
            Check::strict("lambda2 > 0", lambda2),
            Check::strict("alpha > 0", alpha),
            Check::strict("beta > 0", beta),
            Check::strict("r < min{p,q}", p.min(q) - r),
            Check::non_strict("max{p,q} <= (k+1) max{p,q}", leading - p.max(q)),
            Check::strict("(k+1) max{p,q} < alpha + beta", alpha + beta - leading),
        ];

        let geometry = self.geometry(emb_p, emb_q)?;
        let mut h4 = vec![
            Check::strict("0 < lambda1", lambda1),
            Check::strict("lambda1 < a1 C_{1,p}^{-p} - 1", a1 * cp.powf(-p) - 1.0 - lambda1),
            Check::strict("0 < lambda2", lambda2),
            Check::strict("lambda2 < a2 C_{1,q}^{-q} - 1", a2 * cq.powf(-q) - 1.0 - lambda2),
            Check::non_strict(
                "M1 <= (alpha+beta)/(max{p,q}(k+1)) M2",
                (alpha + beta) / leading * geometry.m2 - geometry.m1,
            ),
        ];
        let radius = geometry.radius().ok();
        let peak = if geometry.coupling_exponent > geometry.leading_exponent {
            geometry.peak()
        } else {
            f64::NAN
        };
        h4.push(Check::strict("tail < peak of g", peak - geometry.tail));

        let hypotheses = vec![
            HypothesisVerdict::new("H1", h1),
            HypothesisVerdict::new("H2", h2),
            HypothesisVerdict::new("H3", h3),
            HypothesisVerdict::new("H4", h4),
        ];
        Ok(HypothesisReport {
            hypotheses,
            c1_p: cp,
            c1_q: cq,
            m1: geometry.m1,
            m2: geometry.m2,
            tail: geometry.tail,
            peak,
            zstar: radius.as_ref().map(|r| r.zstar),
            rho: radius.as_ref().map(|r| r.zstar),
            g_at_zstar: radius.as_ref().map(|r| r.g_at_zstar),
            g_second_derivative_at_zstar: radius.as_ref().map(|r| r.g_second_derivative_at_zstar),
            extrema: self.extrema,
            mode: self.tail_mode,
            warnings: self.warnings.clone(),
        })
    }

    /// Lower bound on `φ − ⟨φ', (u,v)⟩/(α+β)` in terms of the component norms.
    ///
    /// The bound is valid when `λ_i > 0`, `G_i ≥ max|g_i|` and `C_{1,l}`
    /// dominates the `L^r` and `L^1` embedding constants.
    pub fn ps_lower_bound(
        &self,
        emb_p: &EmbeddingReport,
        emb_q: &EmbeddingReport,
        state: &StatePair,
    ) -> Result<f64, KirchhoffError> {
        self.check_embedding(emb_p, self.params.p)?;
        self.check_embedding(emb_q, self.params.q)?;
        self.check_state(state)?;
        Ok(self.ps_lower_bound_norms(emb_p.c1(), emb_q.c1(), state.norm_u, state.norm_v))
    }

    pub(crate) fn ps_lower_bound_norms(&self, cp: f64, cq: f64, nu: f64, nv: f64) -> f64 {
        let Parameters { p, q, r, k, alpha, beta, a1, a2, b1, b2, lambda1, lambda2 } = self.params;
        let inv = 1.0 / (alpha + beta);
        let e = &self.extrema;
        a1 * (1.0 / p - inv) * nu.powf(p) + b1 * (1.0 / (p * (k + 1.0)) - inv) * nu.powf(p * (k + 1.0))
            + a2 * (1.0 / q - inv) * nv.powf(q)
            + b2 * (1.0 / (q * (k + 1.0)) - inv) * nv.powf(q * (k + 1.0))
            - lambda1 * (1.0 / r - inv) * e.h_max[0] * cp.powf(r) * nu.powf(r)
            - lambda2 * (1.0 / r - inv) * e.h_max[2] * cq.powf(r) * nv.powf(r)
            - (1.0 - inv) * (e.g_max[0] * cp * nu + e.g_max[1] * cq * nv)
    }

    /// `φ(u,v) − ⟨φ'(u,v), (u,v)⟩ / (α+β)`.
    pub fn ps_left_side(&self, state: &StatePair) -> Result<f64, KirchhoffError> {
        let ab = self.params.alpha + self.params.beta;
        Ok(self.energy(state)? - self.directional_derivative(state, state)? / ab)
    }

    /// Closed-form expansion of `t ↦ φ(t u, t v)` for a fixed state.
    pub fn scaling_polynomial(&self, state: &StatePair) -> Result<ScalingPolynomial, KirchhoffError> {
        self.check_state(state)?;
        let Parameters { p, q, r, k, alpha, beta, a1, a2, b1, b2, lambda1, lambda2 } = self.params;
        let d = &self.domain;
        let c = &self.coefficients;
        let u = state.u.coefficients();
        let v = state.v.coefficients();
        let (nu, nv) = (state.norm_u, state.norm_v);
        let sum = |f: &dyn Fn(usize) -> f64| -> f64 { (0..d.omega_len()).map(|i| d.measure(i) * f(i)).sum() };
        let terms = vec![
            (p, a1 / p * nu.powf(p)),
            (p * (k + 1.0), b1 / (p * (k + 1.0)) * nu.powf(p * (k + 1.0))),
            (q, a2 / q * nv.powf(q)),
            (q * (k + 1.0), b2 / (q * (k + 1.0)) * nv.powf(q * (k + 1.0))),
            (r, -lambda1 / r * sum(&|i| c.h1[i] * u[i].abs().powf(r))),
            (r, -lambda2 / r * sum(&|i| c.h3[i] * v[i].abs().powf(r))),
            (alpha + beta, -sum(&|i| c.h2[i] * u[i].abs().powf(alpha) * v[i].abs().powf(beta)) / (alpha + beta)),
            (1.0, -sum(&|i| c.g1[i] * u[i])),
            (1.0, -sum(&|i| c.g2[i] * v[i])),
        ];
        Ok(ScalingPolynomial { terms })
    }
}

/// `t ↦ Σ c_j t^{e_j}` for `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPolynomial {
    pub terms: Vec<(f64, f64)>,
}

impl ScalingPolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(e, c)| c * t.powf(e)).sum()
    }
}

/// Constants of the one-dimensional lower profile
/// `g(z) = M₁ z^{m} − M₂ z^{α+β} − tail`, `m = max{p,q}(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub leading_exponent: f64,
    pub coupling_exponent: f64,
    pub m1: f64,
    pub m2: f64,
    pub tail: f64,
}

impl Geometry {
    pub fn g(&self, z: f64) -> f64 {
        self.m1 * z.powf(self.leading_exponent) - self.m2 * z.powf(self.coupling_exponent) - self.tail
    }

    pub fn g_second_derivative(&self, z: f64) -> f64 {
        let (m, s) = (self.leading_exponent, self.coupling_exponent);
        m * (m - 1.0) * self.m1 * z.powf(m - 2.0) - s * (s - 1.0) * self.m2 * z.powf(s - 2.0)
    }

    /// Unique stationary point of `g` on `(0, ∞)`.
    pub fn zstar(&self) -> Result<f64, KirchhoffError> {
        let (m, s) = (self.leading_exponent, self.coupling_exponent);
        if s <= m {
            return Err(KirchhoffError::ExponentGap { sum: s, leading: m });
        }
        Ok((m * self.m1 / (s * self.m2)).powf(1.0 / (s - m)))
    }

    /// `g(z*) + tail` in closed form, the right-hand side of the tail
    /// inequality in (H4).
    pub fn peak(&self) -> f64 {
        let (m, s) = (self.leading_exponent, self.coupling_exponent);
        let gap = s - m;
        gap / s * self.m1.powf(s / gap) * (m / (s * self.m2)).powf(m / gap)
    }

    pub fn radius(&self) -> Result<RadiusReport, KirchhoffError> {
        let zstar = self.zstar()?;
        Ok(RadiusReport {
            m1: self.m1,
            m2: self.m2,
            zstar,
            rho: zstar,
            g_at_zstar: self.g(zstar),
            g_second_derivative_at_zstar: self.g_second_derivative(zstar),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub m1: f64,
    pub m2: f64,
    pub zstar: f64,
    pub rho: f64,
    pub g_at_zstar: f64,
    pub g_second_derivative_at_zstar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Slack of the inequality; positive means satisfied.
    pub margin: f64,
    pub strict: bool,
}

impl Check {
    fn strict(name: &str, margin: f64) -> Self {
        Check { name: name.into(), holds: margin > 0.0, margin, strict: true }
    }

    fn non_strict(name: &str, margin: f64) -> Self {
        Check { name: name.into(), holds: margin >= 0.0, margin, strict: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub name: String,
    pub holds: bool,
    pub checks: Vec<Check>,
}

impl HypothesisVerdict {
    fn new(name: &str, checks: Vec<Check>) -> Self {
        HypothesisVerdict { name: name.into(), holds: checks.iter().all(|c| c.holds), checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hypotheses: Vec<HypothesisVerdict>,
    pub c1_p: f64,
    pub c1_q: f64,
    pub m1: f64,
    pub m2: f64,
    pub tail: f64,
    pub peak: f64,
    pub zstar: Option<f64>,
    pub rho: Option<f64>,
    pub g_at_zstar: Option<f64>,
    pub g_second_derivative_at_zstar: Option<f64>,
    pub extrema: Extrema,
    pub mode: TailMode,
    pub warnings: Vec<String>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    pub fn verdict(&self, name: &str) -> Option<&HypothesisVerdict> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    /// Plain-text table: one row per inequality.
    pub fn table(&self) -> String {
        let mut out = String::from("hypothesis  verdict  margin                  inequality\n");
        for h in &self.hypotheses {
            for c in &h.checks {
                out.push_str(&format!(
                    "{:<11} {:<8} {:<23.15e} {}\n",
                    h.name,
                    if c.holds { "ok" } else { "FAIL" },
                    c.margin,
                    c.name
                ));
            }
        }
        out
    }
}

/// `(u, v) ∈ W₀^{1,p}(Ω) × W₀^{1,q}(Ω)` with cached component norms.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    u: SobolevElement,
    v: SobolevElement,
    norm_u: f64,
    norm_v: f64,
}

impl StatePair {
    pub fn new(instance: &KirchhoffInstance, u: SobolevElement, v: SobolevElement) -> Result<Self, KirchhoffError> {
        let d = instance.domain();
        let norm_u = spaces::w0_norm(d, &u);
        let norm_v = spaces::w0_norm(d, &v);
        let state = StatePair { u, v, norm_u, norm_v };
        instance.check_state(&state)?;
        Ok(state)
    }

    /// State from a flat vector `[u(x_1..x_n), v(x_1..x_n)]`.
    pub fn from_coefficients(instance: &KirchhoffInstance, x: &[f64]) -> Result<Self, KirchhoffError> {
        let n = instance.dim();
        if x.len() != 2 * n {
            return Err(KirchhoffError::DomainMismatch(format!("expected {} coefficients, got {}", 2 * n, x.len())));
        }
        let d = instance.domain();
        let u = SobolevElement::from_interior(d, &x[..n], instance.params().p)?;
        let v = SobolevElement::from_interior(d, &x[n..], instance.params().q)?;
        Self::new(instance, u, v)
    }

    /// State from full working-set functions; both must vanish on `∂Ω`.
    pub fn from_functions(
        instance: &KirchhoffInstance,
        u: VertexFunction,
        v: VertexFunction,
    ) -> Result<Self, KirchhoffError> {
        if !u.zero_boundary() || !v.zero_boundary() {
            return Err(KirchhoffError::BoundaryViolation);
        }
        let u = SobolevElement::new(u, instance.params().p)?;
        let v = SobolevElement::new(v, instance.params().q)?;
        Self::new(instance, u, v)
    }

    pub fn zero(instance: &KirchhoffInstance) -> Self {
        Self::from_coefficients(instance, &vec![0.0; 2 * instance.dim()]).expect("zero state")
    }

    pub fn u(&self) -> &SobolevElement {
        &self.u
    }

    pub fn v(&self) -> &SobolevElement {
        &self.v
    }

    pub fn norm_u(&self) -> f64 {
        self.norm_u
    }

    pub fn norm_v(&self) -> f64 {
        self.norm_v
    }

    /// `‖(u,v)‖_X = ‖u‖_{W₀^{1,p}} + ‖v‖_{W₀^{1,q}}`.
    pub fn product_norm(&self) -> f64 {
        self.norm_u + self.norm_v
    }

    pub fn coefficients(&self) -> Vec<f64> {
        let mut x = self.u.coefficients().to_vec();
        x.extend_from_slice(self.v.coefficients());
        x
    }
}

/// `‖(u,v)‖_X` of a flat coefficient vector.
pub(crate) fn product_norm_coeffs(instance: &KirchhoffInstance, x: &[f64]) -> f64 {
    let n = instance.dim();
    let d = instance.domain();
    spaces::w0_norm_interior(d, &x[..n], instance.params().p) + spaces::w0_norm_interior(d, &x[n..], instance.params().q)
}

/// A coefficient given per vertex or as `{"const": value}`.
pub type CoefficientSpec = BTreeMap<String, f64>;

/// On-disk instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub params: Parameters,
    pub coefficients: BTreeMap<String, CoefficientSpec>,
    #[serde(default)]
    pub h4_mode: TailMode,
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self, KirchhoffError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves the document against a domain. `{"const": v}` expands to
    /// every `Ω` vertex; absent `g1`/`g2` default to zero.
    pub fn build(&self, domain: &DomainDecomposition) -> Result<KirchhoffInstance, KirchhoffError> {
        for key in self.coefficients.keys() {
            if !["h1", "h2", "h3", "g1", "g2"].contains(&key.as_str()) {
                return Err(KirchhoffError::UnknownCoefficient(key.clone()));
            }
        }
        let resolve = |name: &str, optional: bool| -> Result<Vec<f64>, KirchhoffError> {
            let Some(spec) = self.coefficients.get(name) else {
                return if optional {
                    Ok(vec![0.0; domain.omega_len()])
                } else {
                    Err(KirchhoffError::MissingCoefficient(name.into()))
                };
            };
            if spec.len() == 1 && domain.local_index("const").is_none() {
                if let Some(&c) = spec.get("const") {
                    return Ok(vec![c; domain.omega_len()]);
                }
            }
            for vertex in spec.keys() {
                if !matches!(domain.local_index(vertex), Some(i) if domain.is_interior(i)) {
                    return Err(KirchhoffError::UnknownCoefficientVertex {
                        coefficient: name.into(),
                        vertex: vertex.clone(),
                    });
                }
            }
            domain
                .omega_ids()
                .iter()
                .map(|id| {
                    spec.get(id).copied().ok_or_else(|| KirchhoffError::MissingCoefficientValue {
                        coefficient: name.into(),
                        vertex: id.clone(),
                    })
                })
                .collect()
        };
        let coefficients = Coefficients {
            h1: resolve("h1", false)?,
            h2: resolve("h2", false)?,
            h3: resolve("h3", false)?,
            g1: resolve("g1", true)?,
            g2: resolve("g2", true)?,
        };
        KirchhoffInstance::new(domain.clone(), self.params, coefficients, self.h4_mode)
    }

    /// Per-vertex document for an instance.
    pub fn from_instance(instance: &KirchhoffInstance) -> Self {
        let ids = instance.domain().omega_ids();
        let coefficients = instance
            .coefficients()
            .named()
            .into_iter()
            .map(|(name, values)| (name.to_string(), ids.iter().cloned().zip(values.iter().copied()).collect()))
            .collect();
        InstanceDocument { params: *instance.params(), coefficients, h4_mode: instance.tail_mode() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{compute_boundary, path_graph};

    fn p3() -> DomainDecomposition {
        let g = path_graph(&["a", "b", "c"], 1.0, 1.0).unwrap();
        compute_boundary(&g, &["b"]).unwrap()
    }

    fn params() -> Parameters {
        Parameters {
            p: 2.0,
            q: 2.0,
            r: 1.5,
            k: 1.0,
            alpha: 2.0,
            beta: 2.0,
            a1: 1.0,
            a2: 1.0,
            b1: 1.0,
            b2: 1.0,
            lambda1: 0.0,
            lambda2: 0.0,
        }
    }

    #[test]
    fn kirchhoff_m_examples() {
        let inst = KirchhoffInstance::new(p3(), params(), Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        assert_eq!(inst.kirchhoff_m(Component::U, 2.0).unwrap(), 3.0);
        let mut pr = params();
        pr.k = 0.0;
        pr.a2 = 2.0;
        pr.b2 = 0.5;
        let inst0 = KirchhoffInstance::new(p3(), pr, Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        for s in [0.0, 0.3, 17.0] {
            assert_eq!(inst0.kirchhoff_m(Component::V, s).unwrap(), 2.5);
        }
        pr.k = 2.0;
        let inst2 = KirchhoffInstance::new(p3(), pr, Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        assert_eq!(inst2.kirchhoff_m(Component::V, 3.0).unwrap(), 6.5);
        assert!(matches!(inst.kirchhoff_m(Component::U, -1.0), Err(KirchhoffError::NegativeArgument(_))));
    }

    #[test]
    fn energy_examples() {
        // p = q = 2, k = 1, a1 = b1 = 1, lambda = 0, g1 = 1, u = 1_b, v = 0:
        // phi = (1/2)*2 + (1/4)*4 - 1 = 1.
        let inst = KirchhoffInstance::new(p3(), params(), Coefficients::constant(1, 1.0, 1.0, 1.0, 1.0, 0.0), TailMode::default()).unwrap();
        let s = StatePair::from_coefficients(&inst, &[1.0, 0.0]).unwrap();
        assert!((inst.energy(&s).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(inst.energy(&StatePair::zero(&inst)).unwrap(), 0.0);
    }

    #[test]
    fn gradient_at_origin_is_minus_forcing() {
        let g = path_graph(&["a", "b", "c", "d", "e"], 1.0, 1.0).unwrap();
        let d = compute_boundary(&g, &["b", "c", "d"]).unwrap();
        let inst = KirchhoffInstance::new(d.clone(), params(), Coefficients::constant(3, 1.0, 1.0, 1.0, 1.0, 0.0), TailMode::default()).unwrap();
        let grad = inst.gradient_vector(&StatePair::zero(&inst)).unwrap();
        assert_eq!(grad, vec![-1.0, -1.0, -1.0, 0.0, 0.0, 0.0]);
        let inst = KirchhoffInstance::new(d, params(), Coefficients::constant(3, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        assert!(inst.gradient_vector(&StatePair::zero(&inst)).unwrap().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn closed_form_scalar_residual_vanishes() {
        let pr = Parameters { k: 0.0, a1: 0.5, b1: 0.5, lambda1: 2.0, ..params() };
        let inst = KirchhoffInstance::new(p3(), pr, Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        let s = StatePair::from_coefficients(&inst, &[1.0, 0.0]).unwrap();
        let res = inst.strong_residual(&s).unwrap();
        assert!(res[0].0.abs() < 1e-15 && res[0].1 == 0.0, "{res:?}");
        assert!(inst.gradient_vector(&s).unwrap().iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn radius_examples() {
        let geo = Geometry { leading_exponent: 2.0, coupling_exponent: 4.0, m1: 1.0, m2: 2.0, tail: 0.0 };
        assert!((geo.zstar().unwrap() - 0.5).abs() < 1e-15);
        assert!(geo.radius().unwrap().g_second_derivative_at_zstar < 0.0);

        // m * M1 = (alpha + beta) * M2 puts z* on the boundary z = 1.
        let edge = Geometry { leading_exponent: 2.0, coupling_exponent: 4.0, m1: 2.0, m2: 1.0, tail: 0.0 };
        assert!((edge.zstar().unwrap() - 1.0).abs() < 1e-15);

        let bad = Geometry { leading_exponent: 4.0, coupling_exponent: 4.0, m1: 1.0, m2: 1.0, tail: 0.0 };
        assert!(matches!(bad.zstar(), Err(KirchhoffError::ExponentGap { .. })));
    }

    #[test]
    fn g_profile_examples() {
        let geo = Geometry { leading_exponent: 2.0, coupling_exponent: 4.0, m1: 1.0, m2: 2.0, tail: 0.1 };
        assert!((geo.g(0.5) - 0.025).abs() < 1e-15);
        assert_eq!(geo.g(0.0), -0.1);
        assert!(geo.g(1e3) < 0.0);
        // Closed-form peak agrees with evaluating g at z*.
        let z = geo.zstar().unwrap();
        assert!((geo.g(z) + geo.tail - geo.peak()).abs() < 1e-15);
    }

    #[test]
    fn parameters_are_validated() {
        let bad = Parameters { p: 1.0, ..params() };
        assert!(matches!(
            KirchhoffInstance::new(p3(), bad, Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()),
            Err(KirchhoffError::InvalidParameter { name: "p", .. })
        ));
        let bad = Parameters { a1: 0.0, ..params() };
        assert!(KirchhoffInstance::new(p3(), bad, Coefficients::constant(1, 1.0, 1.0, 1.0, 0.0, 0.0), TailMode::default()).is_err());
        let ok = KirchhoffInstance::new(p3(), params(), Coefficients::constant(1, 1.0, -1.0, 1.0, 0.0, 0.0), TailMode::default()).unwrap();
        assert_eq!(ok.warnings().len(), 1);
    }

    #[test]
    fn instance_document_const_and_per_vertex() {
        let d = p3();
        let text = r#"{"params":{"p":2,"q":3,"r":1.5,"k":1,"alpha":2,"beta":2.5,"a1":1,"a2":1,"b1":1,"b2":1,"lambda1":0.5,"lambda2":0.5},
            "coefficients":{"h1":{"const":2},"h2":{"b":0.5},"h3":{"const":1},"g1":{"b":-0.25}},"h4_mode":"literal"}"#;
        let doc = InstanceDocument::from_json(text).unwrap();
        let inst = doc.build(&d).unwrap();
        assert_eq!(inst.coefficients().h1, vec![2.0]);
        assert_eq!(inst.coefficients().g1, vec![-0.25]);
        assert_eq!(inst.coefficients().g2, vec![0.0]);
        assert_eq!(inst.tail_mode(), TailMode::Literal);
        let back = InstanceDocument::from_instance(&inst).build(&d).unwrap();
        assert_eq!(back.coefficients(), inst.coefficients());

        let missing = r#"{"params":{"p":2,"q":3,"r":1.5,"k":1,"alpha":2,"beta":2.5,"a1":1,"a2":1,"b1":1,"b2":1,"lambda1":0.5,"lambda2":0.5},
            "coefficients":{"h1":{"const":2},"h3":{"const":1}}}"#;
        assert!(matches!(
            InstanceDocument::from_json(missing).unwrap().build(&d),
            Err(KirchhoffError::MissingCoefficient(_))
        ));
        let stray = r#"{"params":{"p":2,"q":3,"r":1.5,"k":1,"alpha":2,"beta":2.5,"a1":1,"a2":1,"b1":1,"b2":1,"lambda1":0.5,"lambda2":0.5},
            "coefficients":{"h1":{"a":2},"h2":{"const":1},"h3":{"const":1}}}"#;
        assert!(matches!(
            InstanceDocument::from_json(stray).unwrap().build(&d),
            Err(KirchhoffError::UnknownCoefficientVertex { .. })
        ));
    }
}
