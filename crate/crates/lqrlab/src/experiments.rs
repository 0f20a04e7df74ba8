//! One function per experiment kind. Each writes its artifacts and summary
//! numbers into the [`RunContext`].

use std::collections::BTreeMap;

use lqrlab_baselines::{greedy_policy_cost, q_learning_step, qlearning_samples, QTable};
use lqrlab_core::{derive_seed, simulate_trajectory, solve_riccati, LqrInstance, PolicySequence};
use lqrlab_liquidation::{
    ac_to_lqr, almgren_chriss_reference, estimate_impact_params, estimate_temporary_impact, execute_policy,
    expected_inventory, implementation_shortfall, read_lob_csv, regularizer_gap, relative_performance, simulate_lob,
    synthetic_trades, AcParams, LobSimulator, LobSnapshot, ShortfallMonitor,
};
use lqrlab_opt::{run_exact_ppg, Benchmark, DescentConfig, DescentTrace, ProjectionSet};
use lqrlab_zo::{rollouts_per_iteration, run_modelfree_pg, run_modelfree_ppg, run_modelfree_with};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::{aggregate_rows, fmt, median, ArtifactDir, AGGREGATE_HEADER};
use crate::config::{require, ExperimentConfig, ExperimentKind};
use crate::error::HarnessError;

pub struct RunContext<'a> {
    pub cfg: &'a ExperimentConfig,
    pub seeds: &'a [u64],
    pub dir: ArtifactDir,
    pub results: BTreeMap<String, Value>,
}

impl RunContext<'_> {
    fn put(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }
}

pub fn dispatch(kind: ExperimentKind, ctx: &mut RunContext) -> Result<(), HarnessError> {
    match kind {
        ExperimentKind::Riccati => riccati(ctx),
        ExperimentKind::PgExact | ExperimentKind::PpgExact | ExperimentKind::PgZeroth | ExperimentKind::PpgZeroth => {
            policy_descent(kind, ctx)
        }
        ExperimentKind::LiquidateLqr => liquidate_lqr(ctx),
        ExperimentKind::LiquidateLob => liquidate_lob(ctx),
        ExperimentKind::EstimateParams => estimate_params(ctx),
        ExperimentKind::QlearnCompare => qlearn_compare(ctx),
        ExperimentKind::DeadlineSweep => deadline_sweep(ctx),
    }
}

/// Runs `f` for every seed in parallel; results come back in seed order and
/// the first failure (in that order) wins.
fn per_seed<T, F>(seeds: &[u64], f: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(u64) -> Result<T, HarnessError> + Sync,
{
    seeds.par_iter().map(|&s| f(s)).collect::<Vec<_>>().into_iter().collect()
}

fn gain_rows(policy: &PolicySequence) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (t, k) in policy.iter().enumerate() {
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                rows.push(vec![t.to_string(), i.to_string(), j.to_string(), fmt(k[(i, j)])]);
            }
        }
    }
    rows
}

fn riccati(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let inst = ctx.cfg.lqr_instance()?;
    let sol = solve_riccati(&inst)?;
    ctx.dir.write_table("k_star.csv", &["t", "row", "col", "value"], &gain_rows(&sol.k_star))?;
    let mut p_rows = Vec::new();
    for (t, p) in sol.p_star.iter().enumerate() {
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                p_rows.push(vec![t.to_string(), i.to_string(), j.to_string(), fmt(p[(i, j)])]);
            }
        }
    }
    ctx.dir.write_table("p_star.csv", &["t", "row", "col", "value"], &p_rows)?;
    ctx.put("optimal_cost", json!(sol.optimal_cost));
    Ok(())
}

struct SeedRun {
    seed: u64,
    policy: PolicySequence,
    trace: DescentTrace,
}

/// Traces, `aggregate.csv` and `summary.csv` for a set of descent runs.
fn write_descent_outputs(ctx: &mut RunContext, runs: &[SeedRun]) -> Result<(), HarnessError> {
    for run in runs {
        ctx.dir.write_trace(&format!("traces/seed_{}.csv", run.seed), &run.trace)?;
    }
    let traces: Vec<DescentTrace> = runs.iter().map(|r| r.trace.clone()).collect();
    ctx.dir.write_table("aggregate.csv", &AGGREGATE_HEADER, &aggregate_rows(&traces))?;
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| {
            let last = r.trace.last().expect("descent records the initial iterate");
            vec![
                r.seed.to_string(),
                last.iter.to_string(),
                fmt(last.cost),
                fmt(last.normalized_error),
                r.trace.first_below(1e-2).map_or(String::new(), |i| i.to_string()),
            ]
        })
        .collect();
    ctx.dir.write_table(
        "summary.csv",
        &["seed", "iterations", "final_cost", "final_normalized_error", "first_iter_below_1e-2"],
        &rows,
    )?;
    let finals: Vec<f64> = runs.iter().map(|r| r.trace.last().unwrap().normalized_error).collect();
    ctx.put("median_final_normalized_error", json!(median(&finals)));
    let hits = runs.iter().filter(|r| r.trace.first_below(1e-2).is_some()).count();
    ctx.put("seeds_below_1e-2", json!(hits));
    Ok(())
}

fn run_descent(
    inst: &LqrInstance,
    cfg: &ExperimentConfig,
    descent: &DescentConfig,
    set: &ProjectionSet,
    zeroth: bool,
    seed: u64,
) -> Result<SeedRun, HarnessError> {
    let k0 = cfg.policy0(inst, seed)?;
    let (policy, trace) = if zeroth {
        let smoothing = require(&cfg.smoothing, "smoothing")?;
        run_modelfree_ppg(inst, &k0, descent, smoothing, set, seed)?
    } else {
        run_exact_ppg(inst, &k0, descent, set)?
    };
    Ok(SeedRun { seed, policy, trace })
}

fn policy_descent(kind: ExperimentKind, ctx: &mut RunContext) -> Result<(), HarnessError> {
    let inst = ctx.cfg.lqr_instance()?;
    let descent = ctx.cfg.descent()?;
    let projected = matches!(kind, ExperimentKind::PpgExact | ExperimentKind::PpgZeroth);
    let zeroth = matches!(kind, ExperimentKind::PgZeroth | ExperimentKind::PpgZeroth);
    let set = if projected {
        require(&ctx.cfg.projection, "projection")?.clone()
    } else {
        if !ctx.cfg.projection().is_unconstrained() {
            return Err(HarnessError::config("plain policy gradient takes no [projection]; use a ppg kind"));
        }
        ProjectionSet::Unconstrained
    };
    let cfg = ctx.cfg;
    let runs = per_seed(ctx.seeds, |s| run_descent(&inst, cfg, &descent, &set, zeroth, s))?;
    ctx.put("optimal_cost", json!(Benchmark::new(&inst)?.optimal_cost()));
    write_descent_outputs(ctx, &runs)
}

fn liquidate_lqr(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let ac = require(&ctx.cfg.ac, "ac")?.clone();
    if ctx.cfg.instance.is_some() {
        return Err(HarnessError::config("liquidate-lqr builds its instance from [ac]; drop [instance]"));
    }
    let inst = ac_to_lqr(&ac)?;
    let descent = ctx.cfg.descent()?;
    let set = require(&ctx.cfg.projection, "projection")?.clone();
    let zeroth = ctx.cfg.smoothing.is_some();
    let cfg = ctx.cfg;
    let runs = per_seed(ctx.seeds, |s| run_descent(&inst, cfg, &descent, &set, zeroth, s))?;
    write_descent_outputs(ctx, &runs)?;

    let reference = almgren_chriss_reference(&ac)?;
    let optimum = solve_riccati(&inst)?;
    let learned: Vec<Vec<f64>> = runs.iter().map(|r| expected_inventory(&inst, &r.policy)).collect();
    let lqr_q = expected_inventory(&inst, &optimum.k_star);
    let rows: Vec<Vec<String>> = (0..=ac.horizon)
        .map(|t| {
            let col: Vec<f64> = learned.iter().map(|q| q[t]).collect();
            vec![t.to_string(), fmt(reference.expected_inventory[t]), fmt(lqr_q[t]), fmt(median(&col))]
        })
        .collect();
    ctx.dir.write_table("inventory.csv", &["t", "ac_reference", "lqr_optimal", "learned_median"], &rows)?;
    ctx.dir.write_table("reference_policy.csv", &["t", "row", "col", "value"], &gain_rows(&reference.policy))?;
    let gap = regularizer_gap(&ac)?;
    ctx.put("c_ac", json!(gap.c_ac));
    ctx.put("c_lqr", json!(gap.c_lqr));
    ctx.put("regularizer_relative_gap", json!(gap.relative()));
    Ok(())
}

/// AC parameters with `φ = σ²φ′` for comparison against a book run.
fn bridged_ac(ac: &AcParams, phi_prime: f64, horizon: usize, q0: f64) -> AcParams {
    AcParams { phi: ac.sigma * ac.sigma * phi_prime, horizon, q0, q0_sd: 0.0, ..ac.clone() }
}

fn replay_windows(books: &[(u64, LobSnapshot)], horizon: usize) -> Vec<(Vec<LobSnapshot>, Vec<f64>)> {
    books
        .chunks_exact(horizon + 1)
        .map(|w| {
            let snaps: Vec<LobSnapshot> = w.iter().map(|(_, b)| b.clone()).collect();
            // Only the bid side is recorded; the mid is taken half a tick above the best bid.
            let mids = snaps.iter().map(|b| b.best_bid() + 0.5 * b.tick()).collect();
            (snaps, mids)
        })
        .collect()
}

fn liquidate_lob(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let lob = require(&ctx.cfg.lob, "lob")?.clone();
    let ac = require(&ctx.cfg.ac, "ac")?.clone();
    let smoothing = require(&ctx.cfg.smoothing, "smoothing")?.clone();
    let descent = ctx.cfg.descent()?;
    let set = require(&ctx.cfg.projection, "projection")?.clone();
    let init = require(&ctx.cfg.policy0, "policy0")?.clone();
    let synth = lob.synthetic.clone();
    let sim = LobSimulator::new(synth.clone())?;
    let ac_ref = almgren_chriss_reference(&bridged_ac(&ac, synth.phi_prime, synth.horizon, synth.q0))?;
    let replay = match &lob.csv {
        Some(p) => {
            let path = ctx.cfg.resolve(p);
            let file =
                std::fs::File::open(&path).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
            let windows = replay_windows(&read_lob_csv(file)?, synth.horizon);
            if windows.is_empty() {
                return Err(HarnessError::config("LOB csv holds fewer than T+1 snapshots"));
            }
            windows
        }
        None => Vec::new(),
    };

    struct LobRun {
        run: SeedRun,
        eval: Vec<[f64; 3]>,
        replay: Vec<[f64; 3]>,
    }
    let runs = per_seed(ctx.seeds, |seed| {
        let k0 = crate::config::policy_from_init(&init, synth.horizon, 1, 2, seed)?;
        let monitor = ShortfallMonitor::new(&sim, derive_seed(seed, &[1]), lob.train_paths);
        let (policy, trace) =
            run_modelfree_with(&monitor, &sim, &k0, &descent, &smoothing, &set, derive_seed(seed, &[0]))?;
        let score = |a: f64, b: f64| [a, b, relative_performance(a, b)];
        let mut eval = Vec::with_capacity(lob.eval_paths);
        for i in 0..lob.eval_paths as u64 {
            let path_seed = derive_seed(seed, &[2, i]);
            let pg = implementation_shortfall(&simulate_lob(&synth, &policy, path_seed)?);
            let acs = implementation_shortfall(&simulate_lob(&synth, &ac_ref.policy, path_seed)?);
            eval.push(score(pg, acs));
        }
        let mut rep = Vec::with_capacity(replay.len());
        for (books, mids) in &replay {
            let pg = implementation_shortfall(&execute_policy(books, mids, synth.q0, synth.phi_prime, &policy)?);
            let acs =
                implementation_shortfall(&execute_policy(books, mids, synth.q0, synth.phi_prime, &ac_ref.policy)?);
            rep.push(score(pg, acs));
        }
        Ok(LobRun { run: SeedRun { seed, policy, trace }, eval, replay: rep })
    })?;

    let header = ["path", "is_pg", "is_ac", "relative_performance"];
    let table = |v: &[[f64; 3]]| -> Vec<Vec<String>> {
        v.iter().enumerate().map(|(i, r)| vec![i.to_string(), fmt(r[0]), fmt(r[1]), fmt(r[2])]).collect()
    };
    let mut summary = Vec::new();
    let mut all_rel = Vec::new();
    for r in &runs {
        ctx.dir.write_table(&format!("evaluation/seed_{}.csv", r.run.seed), &header, &table(&r.eval))?;
        if !r.replay.is_empty() {
            ctx.dir.write_table(&format!("replay/seed_{}.csv", r.run.seed), &header, &table(&r.replay))?;
        }
        let n = r.eval.len().max(1) as f64;
        let rel: Vec<f64> = r.eval.iter().map(|e| e[2]).collect();
        all_rel.extend_from_slice(&rel);
        summary.push(vec![
            r.run.seed.to_string(),
            fmt(r.eval.iter().map(|e| e[0]).sum::<f64>() / n),
            fmt(r.eval.iter().map(|e| e[1]).sum::<f64>() / n),
            fmt(median(&rel)),
        ]);
    }
    ctx.dir.write_table(
        "evaluation_summary.csv",
        &["seed", "mean_is_pg", "mean_is_ac", "median_relative_performance"],
        &summary,
    )?;
    let plain: Vec<SeedRun> = runs.into_iter().map(|r| r.run).collect();
    write_descent_outputs(ctx, &plain)?;
    // Normalized error is undefined without a model optimum.
    ctx.results.remove("median_final_normalized_error");
    ctx.results.remove("seeds_below_1e-2");
    ctx.put("median_relative_performance", json!(median(&all_rel)));
    Ok(())
}

fn read_trades(path: &std::path::Path) -> Result<Vec<(f64, f64)>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["delta_s", "mfi"] {
        return Err(HarnessError::config("trades csv header must be delta_s,mfi"));
    }
    reader.deserialize::<(f64, f64)>().map(|r| r.map_err(HarnessError::from)).collect()
}

fn estimate_params(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let est = require(&ctx.cfg.estimate, "estimate")?.clone();
    let beta = estimate_temporary_impact(est.tick, est.mean_queue)?;
    let recorded = match (&est.trades, &est.synthetic) {
        (Some(p), None) => Some(read_trades(&ctx.cfg.resolve(p))?),
        (None, Some(_)) => None,
        _ => return Err(HarnessError::config("[estimate] needs exactly one of trades, synthetic")),
    };
    let rows = per_seed(ctx.seeds, |seed| {
        let data = match (&recorded, &est.synthetic) {
            (Some(d), _) => d.clone(),
            (None, Some(s)) => synthetic_trades(s.gamma, s.sigma, s.mfi_sd, s.n, seed),
            (None, None) => unreachable!("checked above"),
        };
        let e = estimate_impact_params(&data)?;
        Ok(vec![seed.to_string(), e.n.to_string(), fmt(e.gamma), fmt(e.gamma_se), fmt(e.sigma), fmt(beta)])
    })?;
    ctx.dir.write_table("estimates.csv", &["seed", "n", "gamma", "gamma_se", "sigma", "beta"], &rows)?;
    ctx.put("beta", json!(beta));
    Ok(())
}

fn qlearn_compare(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let inst = ctx.cfg.lqr_instance()?;
    let q = require(&ctx.cfg.qlearn, "qlearn")?.clone();
    let smoothing = require(&ctx.cfg.smoothing, "smoothing")?.clone();
    let mut descent = ctx.cfg.descent()?;
    if q.sweeps == 0 || q.eval_every == 0 || q.eval_rollouts == 0 {
        return Err(HarnessError::config("qlearn sweeps, eval_every and eval_rollouts must be positive"));
    }
    let horizon = inst.horizon();
    let bench = Benchmark::new(&inst)?;
    let budget = qlearning_samples(horizon, q.state_bins, q.action_bins, q.sweeps);
    // One PG iteration draws T·m rollouts of T transitions each.
    let per_iter = (rollouts_per_iteration(horizon, &smoothing) * horizon) as u64;
    let pg_iters = (budget / per_iter) as usize;
    if pg_iters == 0 {
        return Err(HarnessError::config("sample budget is smaller than one policy-gradient iteration"));
    }
    descent.max_iters = pg_iters;
    let cfg = ctx.cfg;

    struct Compare {
        seed: u64,
        curve: Vec<Vec<String>>,
        q_err: f64,
        pg_err: f64,
    }
    let out = per_seed(ctx.seeds, |seed| {
        let mut table = QTable::new(&inst, q.state_bins, q.action_bins)?;
        let mut curve = Vec::new();
        let mut q_err = f64::NAN;
        for s in 0..q.sweeps {
            table = q_learning_step(&table, &inst, q.eta, derive_seed(seed, &[s as u64]))?.0;
            if (s + 1) % q.eval_every == 0 || s + 1 == q.sweeps {
                let cost = greedy_policy_cost(&table, &inst, q.eval_rollouts, derive_seed(seed, &[0xe7a1, s as u64]))?;
                q_err = bench.normalize(cost);
                let samples = qlearning_samples(horizon, q.state_bins, q.action_bins, s + 1);
                curve.push(vec![(s + 1).to_string(), samples.to_string(), fmt(q_err)]);
            }
        }
        let k0 = cfg.policy0(&inst, seed)?;
        let (_, trace) = run_modelfree_pg(&inst, &k0, &descent, &smoothing, derive_seed(seed, &[0x9e]))?;
        Ok(Compare { seed, curve, q_err, pg_err: trace.last().unwrap().normalized_error })
    })?;

    let mut rows = Vec::new();
    for c in &out {
        ctx.dir.write_table(
            &format!("qlearn/seed_{}.csv", c.seed),
            &["sweep", "samples", "normalized_error"],
            &c.curve,
        )?;
        rows.push(vec![
            c.seed.to_string(),
            budget.to_string(),
            fmt(c.q_err),
            pg_iters.to_string(),
            (pg_iters as u64 * per_iter).to_string(),
            fmt(c.pg_err),
            (c.pg_err < c.q_err).to_string(),
        ]);
    }
    ctx.dir.write_table(
        "compare.csv",
        &[
            "seed",
            "qlearn_samples",
            "qlearn_normalized_error",
            "pg_iterations",
            "pg_samples",
            "pg_normalized_error",
            "pg_better",
        ],
        &rows,
    )?;
    let q_errs: Vec<f64> = out.iter().map(|c| c.q_err).collect();
    ctx.put("median_qlearn_normalized_error", json!(median(&q_errs)));
    ctx.put("pg_wins", json!(out.iter().filter(|c| c.pg_err < c.q_err).count()));
    Ok(())
}

fn deadline_sweep(ctx: &mut RunContext) -> Result<(), HarnessError> {
    let ac = require(&ctx.cfg.ac, "ac")?.clone();
    let sweep = require(&ctx.cfg.sweep, "sweep")?.clone();
    if sweep.horizons.is_empty() || sweep.horizons.contains(&0) || sweep.paths == 0 {
        return Err(HarnessError::config("sweep needs nonempty horizons >= 1 and paths >= 1"));
    }
    let root = ctx.seeds[0];
    for &horizon in &sweep.horizons {
        let p = AcParams { horizon, ..ac.clone() };
        let inst = ac_to_lqr(&p)?;
        let sol = solve_riccati(&inst)?;
        let paths: Vec<Vec<f64>> = (0..sweep.paths as u64)
            .into_par_iter()
            .map(|i| {
                let traj = simulate_trajectory(&inst, &sol.k_star, derive_seed(root, &[horizon as u64, i]));
                traj.states.iter().map(|x| x[1]).collect()
            })
            .collect();
        let expected = expected_inventory(&inst, &sol.k_star);
        let rows: Vec<Vec<String>> = (0..=horizon)
            .map(|t| {
                let mean = paths.iter().map(|q| q[t]).sum::<f64>() / paths.len() as f64;
                vec![t.to_string(), fmt(mean), fmt(expected[t])]
            })
            .collect();
        ctx.dir.write_table(
            &format!("inventory_T{horizon}.csv"),
            &["t", "mean_inventory", "expected_inventory"],
            &rows,
        )?;
    }
    ctx.put("paths", json!(sweep.paths));
    Ok(())
}
