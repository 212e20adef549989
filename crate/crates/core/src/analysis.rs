//! Checks tied to the structural results: the necessary inequality for
//! semi-trivial solutions, a numerical search for the sign condition of the
//! nonexistence criterion, and full non-triviality of computed points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kirchhoff::{Component, KirchhoffError, KirchhoffInstance};
use crate::par::{map_range, Execution};
use crate::solvers::{Classification, CriticalPoint};
use crate::spaces::EmbeddingReport;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("point is classified {0:?}; a semi-trivial point is required")]
    NotSemiTrivial(Classification),
    #[error("embedding report for l = {found} where l = {expected} was required")]
    WrongEmbedding { expected: f64, found: f64 },
    #[error("search needs t_max > 0 and an odd grid size >= 3, got t_max = {t_max}, grid = {grid}")]
    InvalidSearch { t_max: f64, grid: usize },
    #[error(transparent)]
    Kirchhoff(#[from] KirchhoffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessaryCheck {
    pub component: Component,
    pub holds: bool,
    /// Right-hand side minus left-hand side.
    pub margin: f64,
    pub norm: f64,
}

/// Margin of the semi-trivial necessary inequality for a nonzero component
/// of norm `norm`:
/// `λ H C^r ‖w‖^r + G C ‖w‖ − a ‖w‖^l − b ‖w‖^{l(k+1)}`, using `max h₁`
/// for the first component and `max h₃` for the second.
pub fn necessary_margin(instance: &KirchhoffInstance, c1: f64, component: Component, norm: f64) -> f64 {
    let prm = instance.params();
    let e = instance.extrema();
    let (l, a, b, lambda, h, g) = match component {
        Component::U => (prm.p, prm.a1, prm.b1, prm.lambda1, e.h_max[0], e.g_max[0]),
        Component::V => (prm.q, prm.a2, prm.b2, prm.lambda2, e.h_max[2], e.g_max[1]),
    };
    lambda * h * c1.powf(prm.r) * norm.powf(prm.r) + g * c1 * norm
        - a * norm.powf(l)
        - b * norm.powf(l * (prm.k + 1.0))
}

/// Evaluates the necessary inequality at a semi-trivial (or trivial) point.
pub fn semitrivial_necessary(
    instance: &KirchhoffInstance,
    emb_p: &EmbeddingReport,
    emb_q: &EmbeddingReport,
    point: &CriticalPoint,
) -> Result<NecessaryCheck, AnalysisError> {
    let prm = instance.params();
    for (emb, l) in [(emb_p, prm.p), (emb_q, prm.q)] {
        if emb.l != l {
            return Err(AnalysisError::WrongEmbedding { expected: l, found: emb.l });
        }
    }
    let (component, norm, c1) = match point.classification {
        Classification::SemiTrivialU | Classification::Trivial => (Component::U, point.state.norm_u(), emb_p.c1()),
        Classification::SemiTrivialV => (Component::V, point.state.norm_v(), emb_q.c1()),
        c @ Classification::FullyNonTrivial => return Err(AnalysisError::NotSemiTrivial(c)),
    };
    let margin = necessary_margin(instance, c1, component, norm);
    Ok(NecessaryCheck { component, holds: margin >= 0.0, margin, norm })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    /// The condition with the coefficients integrated over `Ω`.
    Integral,
    /// The same condition required separately at every vertex of `Ω`.
    Pointwise,
    /// The condition for all `(s,t)`, origin included.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub t_max: f64,
    /// Points per axis; odd so that the axes are sampled.
    pub grid: usize,
    pub execution: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { t_max: 1e3, grid: 201, execution: Execution::Parallel }
    }
}

/// `F(s,t) = λ₁|s|^r I₁ + λ₂|t|^r I₃ + |s|^α|t|^β I₂ + s J₁ + t J₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignFunction {
    pub lambda1: f64,
    pub lambda2: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub j1: f64,
    pub j2: f64,
}

impl SignFunction {
    fn from_values(instance: &KirchhoffInstance, h: [f64; 3], g: [f64; 2]) -> Self {
        let p = instance.params();
        SignFunction {
            lambda1: p.lambda1,
            lambda2: p.lambda2,
            r: p.r,
            alpha: p.alpha,
            beta: p.beta,
            i1: h[0],
            i2: h[1],
            i3: h[2],
            j1: g[0],
            j2: g[1],
        }
    }

    /// Coefficients integrated against `μ` over `Ω`.
    pub fn integral(instance: &KirchhoffInstance) -> Self {
        let d = instance.domain();
        let c = instance.coefficients();
        let int = |f: &[f64]| -> f64 { f.iter().enumerate().map(|(i, v)| d.measure(i) * v).sum() };
        Self::from_values(instance, [int(&c.h1), int(&c.h2), int(&c.h3)], [int(&c.g1), int(&c.g2)])
    }

    /// Coefficients at a single vertex of `Ω`.
    pub fn at_vertex(instance: &KirchhoffInstance, x: usize) -> Self {
        let c = instance.coefficients();
        Self::from_values(instance, [c.h1[x], c.h2[x], c.h3[x]], [c.g1[x], c.g2[x]])
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let (sa, ta) = (s.abs(), t.abs());
        self.lambda1 * sa.powf(self.r) * self.i1
            + self.lambda2 * ta.powf(self.r) * self.i3
            + sa.powf(self.alpha) * ta.powf(self.beta) * self.i2
            + s * self.j1
            + t * self.j2
    }

    /// Leading exponent and coefficient of `τ ↦ F(τa, τb)` as `τ → ∞`.
    pub fn ray_leading(&self, a: f64, b: f64) -> (f64, f64) {
        let mut terms = vec![
            (self.r, self.lambda1 * a.abs().powf(self.r) * self.i1 + self.lambda2 * b.abs().powf(self.r) * self.i3),
            (self.alpha + self.beta, a.abs().powf(self.alpha) * b.abs().powf(self.beta) * self.i2),
            (1.0, a * self.j1 + b * self.j2),
        ];
        terms.sort_by(|x, y| y.0.total_cmp(&x.0));
        // Equal exponents are merged before picking the leading term.
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (e, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        merged.into_iter().find(|t| t.1 != 0.0).unwrap_or((0.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayAsymptotic {
    pub direction: (f64, f64),
    pub vertex: Option<usize>,
    pub leading_exponent: f64,
    pub leading_coefficient: f64,
    /// `+1`, `−1`, or `0` when `F` vanishes identically along the ray.
    pub sign_at_infinity: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// A point `(s,t) ≠ (0,0)` with `F(s,t) ≥ 0` was found.
    Refuted { s: f64, t: f64, vertex: Option<String>, value: f64 },
    /// `F < 0` at every tested point of the region.
    HoldsNumerically { worst_margin: f64 },
    /// `F(0,0) = 0`, so the strict inequality fails at the origin.
    VacuousAtOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub t_max: f64,
    pub grid: usize,
    pub step: f64,
    /// The polish never enters `max(|s|,|t|) < exclusion_radius`.
    pub exclusion_radius: f64,
    /// Whether the ray signs settle the behaviour beyond `t_max`.
    pub rays_conclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceVerdict {
    pub mode: CertifyMode,
    pub verdict: Verdict,
    pub f_max: f64,
    pub argmax: (f64, f64),
    pub argmax_vertex: Option<String>,
    pub region: SearchRegion,
    pub rays: Vec<RayAsymptotic>,
}

impl NonexistenceVerdict {
    /// Re-evaluates a refutation witness; true for other verdicts.
    pub fn witness_reverifies(&self, instance: &KirchhoffInstance) -> bool {
        match &self.verdict {
            Verdict::Refuted { s, t, vertex, .. } => {
                if *s == 0.0 && *t == 0.0 {
                    return false;
                }
                let f = match vertex {
                    Some(id) => match instance.domain().local_index(id) {
                        Some(x) if instance.domain().is_interior(x) => SignFunction::at_vertex(instance, x),
                        _ => return false,
                    },
                    None => SignFunction::integral(instance),
                };
                f.eval(*s, *t) >= -1e-12
            }
            _ => true,
        }
    }
}

const RAYS: [(f64, f64); 8] =
    [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

struct Search {
    f_max: f64,
    argmax: (f64, f64),
}

/// Grid maximisation of `F` over the punctured square followed by a compass
/// search from the best grid point.
fn maximise(f: &SignFunction, options: &SearchOptions, exclusion: f64) -> Search {
    let n = options.grid;
    let h = 2.0 * options.t_max / (n - 1) as f64;
    let coord = |i: usize| -options.t_max + h * i as f64;
    let rows = map_range(options.execution, n, |i| {
        let s = coord(i);
        let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
        for j in 0..n {
            let t = coord(j);
            if i == n / 2 && j == n / 2 {
                continue;
            }
            let v = f.eval(s, t);
            if v > best.0 {
                best = (v, (s, t));
            }
        }
        best
    });
    let (mut fv, mut at) = rows.into_iter().fold((f64::NEG_INFINITY, (0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });

    let mut step = h;
    let admissible = |s: f64, t: f64| s.abs().max(t.abs()) >= exclusion && s.abs() <= options.t_max && t.abs() <= options.t_max;
    while step > 1e-12 * options.t_max {
        let mut moved = false;
        for (ds, dt) in RAYS {
            let (s, t) = (at.0 + step * ds, at.1 + step * dt);
            if !admissible(s, t) {
                continue;
            }
            let v = f.eval(s, t);
            if v > fv {
                fv = v;
                at = (s, t);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Search { f_max: fv, argmax: at }
}

fn rays_for(f: &SignFunction, vertex: Option<usize>) -> Vec<RayAsymptotic> {
    RAYS.iter()
        .map(|&(a, b)| {
            let (e, c) = f.ray_leading(a, b);
            RayAsymptotic {
                direction: (a, b),
                vertex,
                leading_exponent: e,
                leading_coefficient: c,
                sign_at_infinity: if c > 0.0 {
                    1
                } else if c < 0.0 {
                    -1
                } else {
                    0
                },
            }
        })
        .collect()
}

/// Walks out along a ray with positive leading term until `F ≥ 0`.
fn ray_witness(f: &SignFunction, ray: &RayAsymptotic) -> Option<(f64, f64, f64)> {
    let mut tau = 1.0;
    while tau < 1e300 {
        let (s, t) = (tau * ray.direction.0, tau * ray.direction.1);
        let v = f.eval(s, t);
        if v >= 0.0 && v.is_finite() {
            return Some((s, t, v));
        }
        tau *= 2.0;
    }
    None
}

/// Searches for `(s,t) ≠ (0,0)` violating the sign condition of the
/// nonexistence criterion. The result is a numerical statement about the
/// reported region, not a proof.
pub fn certify_nonexistence(
    instance: &KirchhoffInstance,
    mode: CertifyMode,
    options: &SearchOptions,
) -> Result<NonexistenceVerdict, AnalysisError> {
    if !(options.t_max > 0.0 && options.t_max.is_finite()) || options.grid < 3 || options.grid.is_multiple_of(2) {
        return Err(AnalysisError::InvalidSearch { t_max: options.t_max, grid: options.grid });
    }
    let step = 2.0 * options.t_max / (options.grid - 1) as f64;
    let exclusion = 1e-6 * step;
    let d = instance.domain();
    let functions: Vec<(Option<usize>, SignFunction)> = match mode {
        CertifyMode::Integral | CertifyMode::Literal => vec![(None, SignFunction::integral(instance))],
        CertifyMode::Pointwise => (0..d.omega_len()).map(|x| (Some(x), SignFunction::at_vertex(instance, x))).collect(),
    };
    let rays: Vec<RayAsymptotic> = functions.iter().flat_map(|(x, f)| rays_for(f, *x)).collect();
    let rays_conclusive = rays.iter().all(|r| r.sign_at_infinity != 0);
    let region = SearchRegion { t_max: options.t_max, grid: options.grid, step, exclusion_radius: exclusion, rays_conclusive };

    if mode == CertifyMode::Literal {
        let f0 = functions[0].1.eval(0.0, 0.0);
        return Ok(NonexistenceVerdict {
            mode,
            verdict: Verdict::VacuousAtOrigin,
            f_max: f0,
            argmax: (0.0, 0.0),
            argmax_vertex: None,
            region,
            rays,
        });
    }

    let mut best: Option<(Option<usize>, Search)> = None;
    for (x, f) in &functions {
        let s = maximise(f, options, exclusion);
        if best.as_ref().is_none_or(|b| s.f_max > b.1.f_max) {
            best = Some((*x, s));
        }
    }
    let (vertex, search) = best.expect("omega is nonempty");
    let id = |x: Option<usize>| x.map(|x| d.id(x).to_string());

    let verdict = if search.f_max >= 0.0 {
        Verdict::Refuted { s: search.argmax.0, t: search.argmax.1, vertex: id(vertex), value: search.f_max }
    } else {
        // A positive leading term along some ray refutes the condition
        // beyond the searched square.
        let escape = functions.iter().find_map(|(x, f)| {
            rays_for(f, *x)
                .iter()
                .filter(|r| r.sign_at_infinity > 0)
                .find_map(|r| ray_witness(f, r))
                .map(|(s, t, v)| Verdict::Refuted { s, t, vertex: id(*x), value: v })
        });
        escape.unwrap_or(Verdict::HoldsNumerically { worst_margin: search.f_max })
    };
    Ok(NonexistenceVerdict {
        mode,
        verdict,
        f_max: search.f_max,
        argmax: search.argmax,
        argmax_vertex: id(vertex),
        region,
        rays,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub classification: Classification,
    pub verified: bool,
    /// Vertex with the largest residual in the equation of the vanishing
    /// component, and that residual.
    pub vertex: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullyNontrivialReport {
    /// Both forcing terms are nonzero, so every solution must have two
    /// nonzero components.
    pub premise_holds: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl FullyNontrivialReport {
    pub fn all_fully_nontrivial(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every point that is not fully non-trivial together with the
/// residual of the equation belonging to its vanishing component.
pub fn fully_nontrivial_check(
    instance: &KirchhoffInstance,
    points: &[CriticalPoint],
) -> Result<FullyNontrivialReport, AnalysisError> {
    let premise_holds = !instance.g_is_zero(Component::U) && !instance.g_is_zero(Component::V);
    let mut violations = Vec::new();
    for (index, p) in points.iter().enumerate() {
        if p.classification == Classification::FullyNonTrivial {
            continue;
        }
        let residual = instance.strong_residual(&p.state)?;
        let pick = |(a, b): (f64, f64)| match p.classification {
            Classification::SemiTrivialU => b,
            Classification::SemiTrivialV => a,
            _ => if a.abs() >= b.abs() { a } else { b },
        };
        let (x, r) = residual
            .iter()
            .map(|&pair| pick(pair))
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, r)| if r.abs() > acc.1.abs() { (i, r) } else { acc });
        violations.push(Violation {
            index,
            classification: p.classification,
            verified: p.verified,
            vertex: instance.domain().id(x).to_string(),
            residual: r,
        });
    }
    Ok(FullyNontrivialReport { premise_holds, checked: points.len(), violations })
}
