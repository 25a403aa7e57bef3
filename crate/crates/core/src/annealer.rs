//! Annealing schedules, input rules and the sub-step simulation loop.
//!
//! A main cycle is divided into `t_res` sub-steps. At global sub-step
//! `count = cycle·t_res + s` every p-bit with `count mod periodᵢ == 0` updates.
//! All p-bits updating at the same sub-step read the spin snapshot taken at
//! its start, and each update draws its noise from the `(p-bit, count)`
//! stream. The pseudo inverse temperature advances once per main cycle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};
use crate::pbit::{pbit_update, VariabilityProfile};
use crate::rng::{Purpose, TrialKey};

pub const DEFAULT_ALPHA: usize = 4;
pub const DEFAULT_P_STALL: f64 = 0.5;

/// Below this node count the per-sub-step update runs on the calling thread.
const PARALLEL_MIN_NODES: usize = 4096;

/// Geometric ramp of the pseudo inverse temperature from `i0_min` to `i0_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub i0_min: f64,
    pub i0_max: f64,
    pub beta: f64,
    pub cycles: usize,
    pub t_res: u32,
}

impl AnnealSchedule {
    /// Schedule with `β = (i0_min/i0_max)^(1/(cycles−1))`.
    pub fn new(i0_min: f64, i0_max: f64, cycles: usize, t_res: u32) -> Result<Self> {
        if !(i0_min.is_finite() && i0_min > 0.0 && i0_max.is_finite() && i0_min < i0_max) {
            return Err(Error::Schedule(format!(
                "need 0 < i0_min < i0_max, got {i0_min} and {i0_max}"
            )));
        }
        if cycles < 2 {
            return Err(Error::Schedule(format!("need at least 2 cycles, got {cycles}")));
        }
        if t_res == 0 {
            return Err(Error::Schedule("t_res must be >= 1".into()));
        }
        let beta = (i0_min / i0_max).powf(1.0 / (cycles - 1) as f64);
        Ok(Self {
            i0_min,
            i0_max,
            beta,
            cycles,
            t_res,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.i0_min, self.i0_max, self.cycles, self.t_res)?;
        if !(self.beta > 0.0 && self.beta < 1.0) || (fresh.beta - self.beta).abs() > 1e-12 * fresh.beta {
            return Err(Error::Schedule(format!("beta {} inconsistent with the ramp", self.beta)));
        }
        Ok(())
    }

    /// `I₀` used during each cycle, produced by the recursion `I₀ ← I₀/β`.
    pub fn i0_sequence(&self) -> Vec<f64> {
        let mut i0 = self.i0_min;
        let mut out = Vec::with_capacity(self.cycles);
        for c in 0..self.cycles {
            out.push(i0);
            if c + 1 < self.cycles {
                i0 /= self.beta;
            }
        }
        out
    }
}

/// Per-node coupling spread `sᵢ = sqrt((n−1)·Var(Jᵢ,:))`.
///
/// `Var` is the population variance over the full length-`n` row, zeros and
/// the diagonal included.
pub fn coupling_spread(model: &IsingModel) -> Vec<f64> {
    let n = model.n();
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let sum: f64 = model.neighbors(i).map(|(_, w)| w).sum();
            let mean = sum / nf;
            let nonzero: f64 = model.neighbors(i).map(|(_, w)| (w - mean).powi(2)).sum();
            let zeros = (n - model.degree(i)) as f64;
            let var = (nonzero + zeros * mean * mean) / nf;
            ((nf - 1.0) * var).sqrt()
        })
        .collect()
}

/// `i0_min = 0.1/mean(sᵢ)`, `i0_max = 10/mean(sᵢ)`.
pub fn derive_schedule(model: &IsingModel, cycles: usize, t_res: u32) -> Result<AnnealSchedule> {
    if model.edges().is_empty() {
        return Err(Error::Schedule("all couplings are zero".into()));
    }
    let s = coupling_spread(model);
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::Schedule(format!("mean coupling spread is {mean}")));
    }
    AnnealSchedule::new(0.1 / mean, 10.0 / mean, cycles, t_res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Input is the scaled local field.
    Psa,
    /// Input is the scaled mean of the last `alpha` local fields.
    Tapsa,
    /// Input keeps its previous value with probability `p_stall`.
    Spsa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Psa => "psa",
            Algorithm::Tapsa => "tapsa",
            Algorithm::Spsa => "spsa",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psa" => Ok(Algorithm::Psa),
            "tapsa" => Ok(Algorithm::Tapsa),
            "spsa" => Ok(Algorithm::Spsa),
            other => Err(Error::invalid(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgorithmConfig {
    pub kind: Algorithm,
    pub alpha: usize,
    pub p_stall: f64,
}

impl AlgorithmConfig {
    pub fn new(kind: Algorithm) -> Self {
        Self {
            kind,
            alpha: DEFAULT_ALPHA,
            p_stall: DEFAULT_P_STALL,
        }
    }

    pub fn with_alpha(mut self, alpha: usize) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_p_stall(mut self, p_stall: f64) -> Self {
        self.p_stall = p_stall;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::invalid("alpha must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.p_stall) {
            return Err(Error::invalid(format!("p_stall must lie in [0, 1], got {}", self.p_stall)));
        }
        Ok(())
    }
}

/// Raw input `hᵢ + Σⱼ Jᵢⱼσⱼ` of node `i`.
pub fn compute_raw_input(model: &IsingModel, spins: &SpinState, i: usize) -> Result<f64> {
    if spins.len() != model.n() {
        return Err(Error::invalid("state length does not match the model"));
    }
    if i >= model.n() {
        return Err(Error::invalid(format!("node {i} out of range")));
    }
    Ok(model.local_field(spins.as_slice(), i))
}

#[inline]
pub fn next_input_psa(raw: f64, i0: f64) -> f64 {
    i0 * raw
}

/// `i0 · mean(history)`; the window holds only the inputs seen so far.
#[inline]
pub fn next_input_tapsa(history: &[f64], i0: f64) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    i0 * (history.iter().sum::<f64>() / history.len() as f64)
}

/// Keeps `prev_input` when `u < p_stall`, otherwise `i0 · raw`.
#[inline]
pub fn next_input_spsa(prev_input: f64, raw: f64, i0: f64, u: f64, p_stall: f64) -> f64 {
    if u < p_stall {
        prev_input
    } else {
        i0 * raw
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub cycle: usize,
    pub i0: f64,
    pub energy: f64,
    pub cut: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    /// One record per main cycle, taken after its sub-steps.
    pub trace: Vec<TraceRecord>,
    pub final_state: SpinState,
    pub final_energy: f64,
    pub final_cut: f64,
    pub best_cut: f64,
    /// Total number of p-bit updates performed.
    pub updates: u64,
}

/// Mutable per-p-bit state: update count and the last applied input.
#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    updates: u64,
    input: f64,
}

/// Runs one annealing trial. The result depends only on the arguments.
pub fn run_anneal(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    algo: &AlgorithmConfig,
    profile: &VariabilityProfile,
    seed: u64,
) -> Result<TrialResult> {
    run_anneal_with(model, schedule, algo, profile, seed, PARALLEL_MIN_NODES)
}

pub(crate) fn run_anneal_with(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    algo: &AlgorithmConfig,
    profile: &VariabilityProfile,
    seed: u64,
    parallel_min_nodes: usize,
) -> Result<TrialResult> {
    schedule.validate()?;
    algo.validate()?;
    let n = model.n();
    profile.validate(n)?;

    let key = TrialKey::new(seed);
    let alpha = match algo.kind {
        Algorithm::Tapsa => algo.alpha,
        _ => 1,
    };

    let mut spins: Vec<i8> = (0..n)
        .map(|i| {
            if key.stream(Purpose::InitialSpin, i, 0).next_bool() {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut next = spins.clone();
    let mut cells = vec![Cell::default(); n];
    let mut history = vec![0.0f64; n * alpha];

    let t_res = u64::from(schedule.t_res);
    let mut trace = Vec::with_capacity(schedule.cycles);
    let mut i0 = schedule.i0_min;
    let mut best_cut = f64::NEG_INFINITY;
    let mut updates = 0u64;
    let parallel = n >= parallel_min_nodes;

    for cycle in 0..schedule.cycles {
        for s in 0..t_res {
            let count = cycle as u64 * t_res + s;
            let due = |i: usize| count.is_multiple_of(u64::from(profile.period[i]));
            if !(0..n).any(due) {
                continue;
            }
            next.copy_from_slice(&spins);
            let snapshot = &spins;
            let step = |i: usize, cell: &mut Cell, hist: &mut [f64], out: &mut i8| -> u64 {
                if !due(i) {
                    return 0;
                }
                let raw = model.local_field(snapshot, i);
                let mut stream = key.stream(Purpose::Update, i, count);
                let r = stream.next_signed_unit();
                let input = match algo.kind {
                    Algorithm::Psa => next_input_psa(raw, i0),
                    Algorithm::Tapsa => {
                        let filled = (cell.updates as usize).min(alpha);
                        hist[cell.updates as usize % alpha] = raw;
                        next_input_tapsa(&hist[..(filled + 1).min(alpha)], i0)
                    }
                    Algorithm::Spsa => {
                        let u = stream.next_unit();
                        let prev = if cell.updates == 0 {
                            next_input_psa(raw, i0)
                        } else {
                            cell.input
                        };
                        next_input_spsa(prev, raw, i0, u, algo.p_stall)
                    }
                };
                cell.input = input;
                cell.updates += 1;
                *out = pbit_update(input, r, profile.lambda[i], profile.delta[i]);
                1
            };
            updates += if parallel {
                cells
                    .par_iter_mut()
                    .zip(history.par_chunks_mut(alpha))
                    .zip(next.par_iter_mut())
                    .enumerate()
                    .with_min_len(512)
                    .map(|(i, ((cell, hist), out))| step(i, cell, hist, out))
                    .sum::<u64>()
            } else {
                cells
                    .iter_mut()
                    .zip(history.chunks_mut(alpha))
                    .zip(next.iter_mut())
                    .enumerate()
                    .map(|(i, ((cell, hist), out))| step(i, cell, hist, out))
                    .sum::<u64>()
            };
            std::mem::swap(&mut spins, &mut next);
        }

        let energy = model.energy_unchecked(&spins);
        let cut = model.cut_weight_unchecked(&spins);
        best_cut = best_cut.max(cut);
        trace.push(TraceRecord { cycle, i0, energy, cut });
        if cycle + 1 < schedule.cycles {
            i0 /= schedule.beta;
        }
    }

    let last = *trace.last().expect("at least two cycles");
    Ok(TrialResult {
        trace,
        final_state: SpinState::from_raw(spins),
        final_energy: last.energy,
        final_cut: last.cut,
        best_cut,
        updates,
    })
}
