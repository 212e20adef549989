use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::ValueEnum;
use kgs_core::analysis::{certify_nonexistence, CertifyMode, SearchOptions, Verdict};
use kgs_core::graph::load_graph_json;
use kgs_core::kirchhoff::{Component, HypothesisReport, InstanceDocument, KirchhoffInstance};
use kgs_core::par::Execution;
use kgs_core::solvers::{
    find_endpoint, minimize_in_ball, mountain_pass, scalar_multiplicity, scalar_solve, Classification, CriticalPoint,
    CriticalPointRecord, SolverConfig,
};
use kgs_core::spaces::{embedding_constants, EmbeddingOptions, Exponent};
use serde::Serialize;
use serde_json::json;

use crate::run::{Run, RunManifest};
use crate::{Command, Common, ComponentArg, ModeArg, SolveMethod};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_HYPOTHESES: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_REFUTED: u8 = 4;
pub const EXIT_VACUOUS: u8 = 5;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

type Outcome = Result<u8, Failure>;

pub fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Check { common } => check(&common),
        Command::Solve { common, method } => solve(&common, method),
        Command::Scalar { common, component, multiplicity } => scalar(&common, component, multiplicity),
        Command::Certify { common, mode } => certify(&common, mode),
    }
}

struct Session {
    instance: KirchhoffInstance,
    seed: u64,
    threads: usize,
    execution: Execution,
}

fn effective_seed(flag: u64) -> anyhow::Result<u64> {
    match std::env::var("KGS_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("KGS_SEED is not an unsigned integer: {s:?}")),
        Err(_) => Ok(flag),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn open(common: &Common) -> Result<Session, Failure> {
    let load = || -> anyhow::Result<Session> {
        let seed = effective_seed(common.seed)?;
        let (_, domain) =
            load_graph_json(&read(&common.graph)?).with_context(|| format!("invalid graph {}", common.graph.display()))?;
        let doc = InstanceDocument::from_json(&read(&common.instance)?)
            .with_context(|| format!("invalid instance {}", common.instance.display()))?;
        let instance = doc.build(&domain).with_context(|| format!("invalid instance {}", common.instance.display()))?;
        if common.threads > 0 {
            // Fails harmlessly if a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(common.threads).build_global();
        }
        let execution = if common.threads == 1 { Execution::Sequential } else { Execution::Parallel };
        Ok(Session { instance, seed, threads: common.threads, execution })
    };
    load().map_err(fail(EXIT_INPUT))
}

fn manifest(command: &str, common: &Common, session: &Session, config: impl Serialize) -> RunManifest {
    RunManifest {
        command: command.into(),
        inputs: [&common.graph, &common.instance].iter().map(|p| p.display().to_string()).collect(),
        config: serde_json::to_value(config).expect("config serializes"),
        seed: session.seed,
        threads: session.threads,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_clock_seconds: None,
    }
}

fn start_run(common: &Common, manifest: RunManifest) -> Result<Run, Failure> {
    Run::create(&common.out, manifest).map_err(fail(EXIT_INPUT))
}

fn finish(run: Run) -> Result<PathBuf, Failure> {
    let dir = run.finish().map_err(fail(EXIT_INPUT))?;
    println!("run directory: {}", dir.display());
    Ok(dir)
}

fn embedding_options(session: &Session) -> EmbeddingOptions {
    EmbeddingOptions { seed: session.seed, execution: session.execution, ..EmbeddingOptions::default() }
}

fn hypotheses(session: &Session, opts: &EmbeddingOptions) -> anyhow::Result<HypothesisReport> {
    let inst = &session.instance;
    let prm = inst.params();
    let ep = embedding_constants(inst.domain(), prm.p, Exponent::Finite(prm.p), opts)?;
    let eq = embedding_constants(inst.domain(), prm.q, Exponent::Finite(prm.q), opts)?;
    Ok(inst.check_hypotheses(&ep, &eq)?)
}

fn check(common: &Common) -> Outcome {
    let session = open(common)?;
    let opts = embedding_options(&session);
    let report = hypotheses(&session, &opts).map_err(fail(EXIT_INPUT))?;
    let run = start_run(common, manifest("check", common, &session, json!({ "embedding": opts })))?;
    let write = || -> anyhow::Result<()> {
        run.write_json("hypotheses.json", "report", &report)?;
        run.write_text("hypotheses.txt", &report.table())?;
        Ok(())
    };
    write().map_err(fail(EXIT_INPUT))?;
    print!("{}", report.table());
    finish(run)?;
    Ok(if report.all_hold() { EXIT_OK } else { EXIT_HYPOTHESES })
}

fn solver_config(session: &Session) -> SolverConfig {
    SolverConfig { rng_seed: session.seed, execution: session.execution, ..SolverConfig::default() }
}

fn summary(label: &str, p: &CriticalPoint) -> String {
    format!(
        "{label}: energy {:.10e}, grad norm {:.2e}, residual {:.2e}, {:?}, verified {}",
        p.energy, p.grad_norm, p.max_residual, p.classification, p.verified
    )
}

fn solve(common: &Common, method: SolveMethod) -> Outcome {
    let session = open(common)?;
    let inst = &session.instance;
    let cfg = solver_config(&session);
    let opts = embedding_options(&session);
    let report = hypotheses(&session, &opts).map_err(fail(EXIT_INPUT))?;
    let run = start_run(
        common,
        manifest("solve", common, &session, json!({ "method": method.to_possible_value().map(|v| v.get_name().to_string()), "solver": cfg, "embedding": opts })),
    )?;
    let mut failures = Vec::new();
    let rho = match report.rho {
        Some(rho) if rho > 0.0 && rho.is_finite() => Some(rho),
        _ => {
            failures.push("the mountain-pass geometry does not hold: no admissible radius".to_string());
            None
        }
    };
    let accept = |p: &CriticalPoint| p.verified && p.classification != Classification::Trivial;

    if let (Some(rho), true) = (rho, method != SolveMethod::MountainPass) {
        match minimize_in_ball(inst, rho, &cfg) {
            Ok(p) => {
                println!("{}", summary("minimize", &p));
                run.write_json("minimize.json", "solution", &p.record(inst)).map_err(fail(EXIT_INPUT))?;
                if !accept(&p) {
                    failures.push("minimize: point is not a verified nontrivial solution".into());
                }
            }
            Err(e) => failures.push(format!("minimize: {e}")),
        }
    }
    if let (Some(rho), true) = (rho, method != SolveMethod::Minimize) {
        let result = find_endpoint(inst, rho, &cfg).and_then(|e| mountain_pass(inst, &e, report.g_at_zstar, &cfg));
        match result {
            Ok(mp) => {
                println!("{} (Morse index {})", summary("mountain pass", &mp.point), mp.morse_index);
                let write = || -> anyhow::Result<()> {
                    run.write_json("mountain_pass.json", "solution", &mp.point.record(inst))?;
                    run.write_csv("mountain_pass_path.csv", &mp.path_csv())?;
                    Ok(())
                };
                write().map_err(fail(EXIT_INPUT))?;
                if !accept(&mp.point) {
                    failures.push("mountain pass: point is not a verified nontrivial solution".into());
                }
            }
            Err(e) => failures.push(format!("mountain pass: {e}")),
        }
    }
    finish(run)?;
    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure { code: EXIT_SOLVER, error: anyhow!(failures.join("; ")) })
    }
}

#[derive(Serialize)]
struct SolutionSet {
    component: Component,
    points: Vec<CriticalPointRecord>,
    pairs: usize,
    target: usize,
    under_count: bool,
    warnings: Vec<String>,
}

fn scalar(common: &Common, component: ComponentArg, multiplicity: bool) -> Outcome {
    let session = open(common)?;
    let inst = &session.instance;
    let cfg = solver_config(&session);
    let component = match component {
        ComponentArg::U => Component::U,
        ComponentArg::V => Component::V,
    };
    let run = start_run(
        common,
        manifest("scalar", common, &session, json!({ "component": component, "multiplicity": multiplicity, "solver": cfg })),
    )?;
    let mut warnings = Vec::new();
    let even = inst.g_is_zero(component);
    if multiplicity && !even {
        warnings.push("the forcing term of this component is nonzero, so the functional is not even; computing a single solution instead".to_string());
        eprintln!("warning: {}", warnings[0]);
    }
    let set = if multiplicity && even {
        let rep = scalar_multiplicity(inst, component, &cfg).map_err(|e| fail(EXIT_SOLVER)(e.into()))?;
        warnings.extend(rep.warnings);
        SolutionSet {
            component,
            points: rep.points.iter().map(|p| p.record(inst)).collect(),
            pairs: rep.pairs,
            target: rep.target,
            under_count: rep.under_count,
            warnings,
        }
    } else {
        let p = scalar_solve(inst, component, &cfg).map_err(|e| fail(EXIT_SOLVER)(e.into()))?;
        warnings.extend(p.warnings.iter().cloned());
        let ok = p.verified && p.classification != Classification::Trivial;
        SolutionSet {
            component,
            points: if ok { vec![p.record(inst)] } else { Vec::new() },
            pairs: 0,
            target: inst.dim(),
            under_count: !ok,
            warnings,
        }
    };
    for w in set.warnings.iter().skip(usize::from(multiplicity && !even)) {
        eprintln!("warning: {w}");
    }
    for (i, p) in set.points.iter().enumerate() {
        println!("point {i}: energy {:.10e}, grad norm {:.2e}, {:?}", p.energy, p.grad_norm, p.classification);
    }
    if multiplicity && even {
        println!("{} antipodal pairs (target {})", set.pairs, set.target);
    }
    run.write_json("solutions.json", "solutions", &set).map_err(fail(EXIT_INPUT))?;
    finish(run)?;
    if set.points.is_empty() {
        return Err(Failure { code: EXIT_SOLVER, error: anyhow!("no verified semi-trivial solution") });
    }
    Ok(EXIT_OK)
}

fn certify(common: &Common, mode: ModeArg) -> Outcome {
    let session = open(common)?;
    let mode = match mode {
        ModeArg::Integral => CertifyMode::Integral,
        ModeArg::Pointwise => CertifyMode::Pointwise,
        ModeArg::Literal => CertifyMode::Literal,
    };
    let opts = SearchOptions { execution: session.execution, ..SearchOptions::default() };
    let verdict = certify_nonexistence(&session.instance, mode, &opts).map_err(|e| fail(EXIT_INPUT)(e.into()))?;
    let run = start_run(common, manifest("certify", common, &session, json!({ "mode": mode, "search": opts })))?;
    run.write_json("verdict.json", "verdict", &verdict).map_err(fail(EXIT_INPUT))?;
    println!("{}", serde_json::to_string(&verdict.verdict).expect("verdict serializes"));
    finish(run)?;
    Ok(match verdict.verdict {
        Verdict::HoldsNumerically { .. } => EXIT_OK,
        Verdict::Refuted { .. } => EXIT_REFUTED,
        Verdict::VacuousAtOrigin => EXIT_VACUOUS,
    })
}
