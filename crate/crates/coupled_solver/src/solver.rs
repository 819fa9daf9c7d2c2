use log::{debug, warn};
use serde::{Deserialize, Serialize};

use fem_core::{Block, FieldState, SkylineCholesky};

use crate::assembly::{block_field, block_field_mut, CoupledProblem, NodalResidual};
use crate::SolverError;

/// Iteration controls of the quasi-Newton solve and the load stepping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearSolveConfig {
    /// Per-block residual relative to the block's reference force.
    pub rel_tol: f64,
    /// Per-block residual relative to the block's natural scale.
    pub abs_tol: f64,
    pub max_iterations: usize,
    /// Secant pairs kept before the seed operator is refactorised.
    pub bfgs_history: usize,
    pub line_search_steps: usize,
    /// Fraction of a failed load increment retried.
    pub cutback: f64,
    pub max_cutbacks: usize,
    /// Solves per load step; each extra pass refreshes the history field
    /// from the current strain first.
    pub history_passes: usize,
}

impl Default for NonlinearSolveConfig {
    fn default() -> Self {
        NonlinearSolveConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_iterations: 200,
            bfgs_history: 30,
            line_search_steps: 4,
            cutback: 0.5,
            max_cutbacks: 8,
            history_passes: 1,
        }
    }
}

impl NonlinearSolveConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidInput(m.into()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.cutback > 0.0 && self.cutback < 1.0) {
            return bad("cutback factor must lie in (0, 1)");
        }
        if self.max_iterations == 0 || self.bfgs_history == 0 || self.history_passes == 0 {
            return bad("iteration counts must be positive");
        }
        Ok(())
    }
}

/// Work done in one converged solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub iterations: usize,
    pub resets: usize,
}

/// Converged quantities recorded at one point of the load program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub load: f64,
    /// Sum of reactions on the loaded nodes (N).
    pub force: f64,
    /// Current entering at the driven electrode (A).
    pub current_in: f64,
    /// Current entering at the grounded electrode (A); `−current_in` ideally.
    pub current_out: f64,
    pub max_damage: f64,
    /// Smallest nodal damage change since the previous record.
    pub min_damage_change: f64,
    pub iterations: usize,
    pub cutbacks: usize,
}

impl StepRecord {
    /// Relative mismatch of the two electrode currents.
    pub fn charge_imbalance(&self) -> f64 {
        let scale = self.current_in.abs().max(self.current_out.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.current_in + self.current_out).abs() / scale
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadHistory {
    pub records: Vec<StepRecord>,
    /// Last converged state.
    pub state: FieldState,
}

fn block_norm(r: &NodalResidual, p: &CoupledProblem, b: Block) -> (f64, f64) {
    let rb = r.block(b);
    let comps = p.dofs.components(b);
    let (mut free, mut fixed) = (0.0, 0.0);
    for i in 0..p.dofs.n_dofs(b) {
        let (v, c) = p.dofs.owner(b, i);
        let x = rb[v * comps + c];
        if p.dofs.is_fixed(b, i) {
            fixed += x * x;
        } else {
            free += x * x;
        }
    }
    (free.sqrt(), fixed.sqrt())
}

/// Scale of each block's residual for a unit of its unknown.
fn natural_scales(p: &CoupledProblem) -> [f64; 3] {
    let m = &p.material;
    let (lo, hi) = p.mesh.bounds();
    let span = (0..p.dim()).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let vol = p.mesh.active_measure() * if p.dim() == 2 { p.mesh.thickness } else { 1.0 };
    let volts = p.electrodes.as_ref().map_or(1.0, |e| e.voltage.abs().max(1e-3));
    [m.young() * vol / span, volts * vol / (m.rho0 * span * span), m.g_c * vol / m.ell]
}

struct Workspace<'a> {
    p: &'a CoupledProblem,
    offsets: [usize; 4],
}

impl<'a> Workspace<'a> {
    fn new(p: &'a CoupledProblem) -> Self {
        let n = Block::ALL.map(|b| p.dofs.n_free(b));
        Workspace { p, offsets: [0, n[0], n[0] + n[1], n[0] + n[1] + n[2]] }
    }

    fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    fn pack(&self, state: &FieldState) -> Vec<f64> {
        Block::ALL.iter().flat_map(|&b| self.p.dofs.gather(b, block_field(state, b))).collect()
    }

    fn unpack(&self, x: &[f64], state: &mut FieldState) {
        for (k, &b) in Block::ALL.iter().enumerate() {
            self.p.dofs.scatter(b, &x[self.range(k)], block_field_mut(state, b));
        }
    }

    fn pack_residual(&self, r: &NodalResidual) -> Vec<f64> {
        Block::ALL.iter().flat_map(|&b| self.p.dofs.gather(b, r.block(b))).collect()
    }

    fn seed(&self, state: &FieldState) -> Result<Vec<SkylineCholesky>, SolverError> {
        let k = self.p.stiffness(state)?;
        k.into_iter().zip(Block::ALL).map(|(m, b)| m.factorize().map_err(|e| SolverError::Factorization { block: b.name(), source: e })).collect()
    }

    fn seed_solve(&self, seed: &[SkylineCholesky], v: &mut [f64]) {
        for (k, f) in seed.iter().enumerate() {
            f.solve_in_place(&mut v[self.range(k)]);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Quasi-Newton solve at fixed boundary values and history.
fn bfgs(p: &CoupledProblem, state: &mut FieldState, cfg: &NonlinearSolveConfig) -> Result<StepStats, SolverError> {
    let ws = Workspace::new(p);
    let natural = natural_scales(p);
    let r0 = p.residual(state)?;
    let mut reference = [0.0; 3];
    let mut floor = [0.0; 3];
    for (k, &b) in Block::ALL.iter().enumerate() {
        let (free, fixed) = block_norm(&r0, p, b);
        floor[k] = cfg.abs_tol * natural[k];
        reference[k] = free.max(fixed).max(floor[k]);
    }
    let measure = |r: &[f64]| -> ([f64; 3], bool) {
        let mut rel = [0.0; 3];
        let mut ok = true;
        for k in 0..3 {
            let n = norm(&r[ws.range(k)]);
            rel[k] = n / reference[k];
            ok &= n <= (cfg.rel_tol * reference[k]).max(floor[k]);
        }
        (rel, ok)
    };
    let merit = |rel: &[f64; 3]| rel.iter().map(|v| v * v).sum::<f64>();

    let mut x = ws.pack(state);
    let mut r = ws.pack_residual(&r0);
    let (mut rel, done) = measure(&r);
    let mut stats = StepStats::default();
    if done {
        return Ok(stats);
    }
    let mut seed = ws.seed(state)?;
    let mut pairs: Vec<Pair> = Vec::new();
    let mut trial = state.clone();
    while stats.iterations < cfg.max_iterations {
        stats.iterations += 1;
        // two-loop recursion with the block-diagonal seed
        let mut q = r.clone();
        let mut alpha = Vec::with_capacity(pairs.len());
        for pr in pairs.iter().rev() {
            let a = pr.rho * dot(&pr.s, &q);
            q.iter_mut().zip(&pr.y).for_each(|(qi, yi)| *qi -= a * yi);
            alpha.push(a);
        }
        ws.seed_solve(&seed, &mut q);
        for (pr, a) in pairs.iter().zip(alpha.iter().rev()) {
            let beta = pr.rho * dot(&pr.y, &q);
            q.iter_mut().zip(&pr.s).for_each(|(qi, si)| *qi += (a - beta) * si);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.line_search_steps {
            let xt: Vec<f64> = x.iter().zip(&q).map(|(xi, qi)| xi - t * qi).collect();
            ws.unpack(&xt, &mut trial);
            let rt = ws.pack_residual(&p.residual(&trial)?);
            let (relt, ok) = measure(&rt);
            if ok || merit(&relt) < merit(&rel) {
                accepted = Some((xt, rt, relt, ok));
                break;
            }
            t *= 0.5;
        }
        let Some((xt, rt, relt, ok)) = accepted else {
            if pairs.is_empty() {
                ws.unpack(&x, state);
                return Err(SolverError::NotConverged { iterations: stats.iterations, residual: rel });
            }
            debug!("line search failed; refreshing the seed operator");
            ws.unpack(&x, state);
            seed = ws.seed(state)?;
            pairs.clear();
            stats.resets += 1;
            continue;
        };
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = rt.iter().zip(&r).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        x = xt;
        r = rt;
        rel = relt;
        ws.unpack(&x, state);
        if ok {
            return Ok(stats);
        }
        if sy > 1e-12 * norm(&s) * norm(&y) {
            pairs.push(Pair { s, y, rho: 1.0 / sy });
        }
        if pairs.len() >= cfg.bfgs_history {
            seed = ws.seed(state)?;
            pairs.clear();
            stats.resets += 1;
        }
    }
    Err(SolverError::NotConverged { iterations: stats.iterations, residual: rel })
}

/// Exact solve of one block that is linear in its own unknowns with the
/// others held fixed; two refinement passes leave only roundoff.
fn settle_block(p: &CoupledProblem, state: &mut FieldState, block: Block) -> Result<(), SolverError> {
    if p.dofs.n_free(block) == 0 {
        return Ok(());
    }
    let k = p.stiffness(state)?.into_iter().nth(block as usize).expect("three blocks");
    let f = k.factorize().map_err(|e| SolverError::Factorization { block: block.name(), source: e })?;
    for _ in 0..2 {
        let r = p.residual(state)?;
        let mut delta = p.dofs.gather(block, r.block(block));
        f.solve_in_place(&mut delta);
        let field = block_field_mut(state, block);
        let mut free = p.dofs.gather(block, field);
        free.iter_mut().zip(&delta).for_each(|(a, b)| *a -= b);
        p.dofs.scatter(block, &free, field);
    }
    Ok(())
}

/// Exact potential solve with displacement and damage held fixed, so that
/// the electrode currents balance to roundoff.
pub fn settle_potential(p: &CoupledProblem, state: &mut FieldState) -> Result<(), SolverError> {
    settle_block(p, state, Block::Potential)
}

/// Solve the coupled system at load factor `load`. On failure the state is
/// left as it was on entry.
pub fn solve_step(p: &CoupledProblem, state: &mut FieldState, load: f64, cfg: &NonlinearSolveConfig) -> Result<StepStats, SolverError> {
    cfg.validate()?;
    let entry = state.clone();
    p.apply_constraints(state, load);
    let mut total = StepStats::default();
    for pass in 0..cfg.history_passes {
        if pass > 0 {
            p.update_history(state);
        }
        // With the history frozen the damage residual involves neither the
        // displacement nor the potential, so its exact solve is a free
        // predictor for the coupled iteration.
        if let Err(e) = settle_block(p, state, Block::Damage) {
            *state = entry;
            return Err(e);
        }
        match bfgs(p, state, cfg) {
            Ok(s) => {
                total.iterations += s.iterations;
                total.resets += s.resets;
            }
            Err(e) => {
                *state = entry;
                return Err(e);
            }
        }
    }
    if let Err(e) = settle_potential(p, state) {
        *state = entry;
        return Err(e);
    }
    if !state.is_finite() {
        *state = entry;
        return Err(SolverError::InvalidInput("non-finite converged state".into()));
    }
    Ok(total)
}

fn record(p: &CoupledProblem, state: &FieldState, step: usize, load: f64, previous_d: &[f64]) -> Result<StepRecord, SolverError> {
    let r = p.residual(state)?;
    let (current_in, current_out) = p.electrode_currents(&r);
    let min_damage_change = state.d.iter().zip(previous_d).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    Ok(StepRecord {
        step,
        load,
        force: p.reaction_force(&r),
        current_in,
        current_out,
        max_damage: state.max_damage(),
        min_damage_change: if min_damage_change.is_finite() { min_damage_change } else { 0.0 },
        iterations: 0,
        cutbacks: 0,
    })
}

/// Follow the load factors of `program` from the unloaded state. The history
/// field is refreshed from every converged increment, cut-back increments
/// included. `observe` sees each recorded state.
pub fn run_load_program(
    p: &CoupledProblem,
    program: &[f64],
    cfg: &NonlinearSolveConfig,
    mut observe: impl FnMut(&StepRecord, &FieldState) -> Result<(), SolverError>,
) -> Result<LoadHistory, SolverError> {
    cfg.validate()?;
    let mut state = p.initial_state();
    let mut records: Vec<StepRecord> = Vec::with_capacity(program.len());
    let mut load = 0.0;
    for (step, &target) in program.iter().enumerate() {
        let previous_d = state.d.clone();
        let mut iterations = 0;
        let mut cutbacks = 0;
        let mut increment = target - load;
        // every entry is solved, a repeated load included, so that the
        // refreshed history acts
        let mut reached = false;
        while !reached {
            let next = if (target - load).abs() <= increment.abs() * (1.0 + 1e-12) { target } else { load + increment };
            match solve_step(p, &mut state, next, cfg) {
                Ok(s) => {
                    iterations += s.iterations;
                    p.update_history(&mut state);
                    load = next;
                    reached = next == target;
                }
                Err(e @ (SolverError::NotConverged { .. } | SolverError::Factorization { .. })) => {
                    cutbacks += 1;
                    if cutbacks > cfg.max_cutbacks {
                        warn!("giving up at load {next:e}: {e}");
                        return Err(SolverError::Aborted {
                            load: next,
                            source: Box::new(e),
                            partial: Box::new(LoadHistory { records, state }),
                        });
                    }
                    increment *= cfg.cutback;
                    debug!("cutting back to increment {increment:e} after: {e}");
                }
                Err(e) => return Err(e),
            }
        }
        let mut rec = record(p, &state, step, target, &previous_d)?;
        rec.iterations = iterations;
        rec.cutbacks = cutbacks;
        if rec.min_damage_change < -1e-6 {
            warn!("damage decreased by {:e} at step {step}", -rec.min_damage_change);
        }
        observe(&rec, &state)?;
        records.push(rec);
    }
    Ok(LoadHistory { records, state })
}
