//! Seeded trial batches, variability sweeps and summary statistics.
//!
//! Trial `k` of a batch is keyed by `(base seed, k)`; its device realisation
//! and every random draw of its anneal come from streams under that key.
//! Trials run concurrently on a dedicated pool sized by the thread budget and
//! are collected in index order, so summaries do not depend on the budget.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::annealer::{derive_schedule, run_anneal, AlgorithmConfig, AnnealSchedule, TrialResult};
use crate::error::{Error, Result};
use crate::gset::{BestKnownRegistry, GsetFile};
use crate::model::{IsingModel, MaxCutGraph};
use crate::pbit::{sample_variability, VariabilityConfig, VariabilityProfile};
use crate::rng::{mix64, TrialKey};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_CYCLES: usize = 1000;

const FIXED_PROFILE_SALT: u64 = 0x243F_6A88_85A3_08D3;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub graph: String,
    pub algo: AlgorithmConfig,
    pub variability: VariabilityConfig,
    pub cycles: usize,
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads; `0` uses every available core.
    pub threads: usize,
    /// Draw a fresh device realisation per trial (default). When false every
    /// trial shares one realisation derived from the base seed.
    pub resample_variability: bool,
}

impl ExperimentSpec {
    pub fn new(graph: impl Into<String>, algo: AlgorithmConfig) -> Self {
        Self {
            graph: graph.into(),
            algo,
            variability: VariabilityConfig::default(),
            cycles: DEFAULT_CYCLES,
            trials: DEFAULT_TRIALS,
            base_seed: 0,
            threads: 0,
            resample_variability: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if self.cycles < 2 {
            return Err(Error::invalid("cycles must be >= 2"));
        }
        self.algo.validate()?;
        self.variability.validate()
    }

    /// Seed handed to [`run_anneal`] for trial `index`.
    pub fn trial_seed(&self, index: usize) -> u64 {
        TrialKey::for_trial(self.base_seed, index as u64).raw()
    }

    /// Device realisation used by trial `index`.
    pub fn trial_profile(&self, index: usize, n: usize) -> Result<VariabilityProfile> {
        let key = if self.resample_variability {
            TrialKey::new(self.trial_seed(index))
        } else {
            TrialKey::new(mix64(self.base_seed) ^ FIXED_PROFILE_SALT)
        };
        sample_variability(&self.variability, n, key)
    }
}

/// Aggregate statistics over final cuts of a batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialStats {
    pub mean_cut: f64,
    /// Sample (n − 1) standard deviation; zero for a single trial.
    pub std_cut: f64,
    pub normalized_mean_cut: Option<f64>,
    pub mean_final_energy: f64,
    pub mean_best_cut: f64,
}

pub fn summarize(results: &[TrialResult], best_known: Option<u64>) -> Result<TrialStats> {
    if results.is_empty() {
        return Err(Error::invalid("cannot summarise an empty batch"));
    }
    let n = results.len() as f64;
    let mean_cut = results.iter().map(|r| r.final_cut).sum::<f64>() / n;
    let std_cut = if results.len() > 1 {
        let ss: f64 = results.iter().map(|r| (r.final_cut - mean_cut).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(TrialStats {
        mean_cut,
        std_cut,
        normalized_mean_cut: best_known.map(|b| mean_cut / b as f64),
        mean_final_energy: results.iter().map(|r| r.final_energy).sum::<f64>() / n,
        mean_best_cut: results.iter().map(|r| r.best_cut).sum::<f64>() / n,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary {
    pub spec: ExperimentSpec,
    pub stats: TrialStats,
    /// Wall-clock seconds spent annealing; informational only.
    pub anneal_seconds: f64,
    pub results: Vec<TrialResult>,
}

impl ExperimentSummary {
    pub fn mean_cut(&self) -> f64 {
        self.stats.mean_cut
    }

    pub fn std_cut(&self) -> f64 {
        self.stats.std_cut
    }

    pub fn normalized_mean_cut(&self) -> Option<f64> {
        self.stats.normalized_mean_cut
    }

    /// Standard error of the mean final cut.
    pub fn std_error(&self) -> f64 {
        self.stats.std_cut / (self.results.len() as f64).sqrt()
    }
}

/// Variability parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    SigmaLambda,
    SigmaDelta,
    SigmaNu,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::SigmaLambda => "sigma_lambda",
            SweepAxis::SigmaDelta => "sigma_delta",
            SweepAxis::SigmaNu => "sigma_nu",
        }
    }

    pub fn apply(self, cfg: &mut VariabilityConfig, value: f64) {
        match self {
            SweepAxis::SigmaLambda => cfg.sigma_lambda = value,
            SweepAxis::SigmaDelta => cfg.sigma_delta = value,
            SweepAxis::SigmaNu => cfg.sigma_nu = value,
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "sigma_lambda" | "lambda" => Ok(SweepAxis::SigmaLambda),
            "sigma_delta" | "delta" => Ok(SweepAxis::SigmaDelta),
            "sigma_nu" | "nu" => Ok(SweepAxis::SigmaNu),
            other => Err(Error::invalid(format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// A benchmark graph ready for annealing.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: MaxCutGraph,
    pub model: IsingModel,
    pub best_known: Option<u64>,
}

/// Named graphs plus the machinery to run batches on them.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    instances: BTreeMap<String, Instance>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_graph(&mut self, name: impl Into<String>, graph: MaxCutGraph, best_known: Option<u64>) {
        let model = graph.to_ising();
        self.instances.insert(
            name.into(),
            Instance {
                graph,
                model,
                best_known,
            },
        );
    }

    /// Registers a parsed G-set file under its own name.
    pub fn add_gset(&mut self, file: &GsetFile, registry: Option<&BestKnownRegistry>) -> Result<()> {
        let graph = file.to_graph()?;
        let best = registry.and_then(|r| r.get(&file.name));
        self.add_graph(file.name.clone(), graph, best);
        Ok(())
    }

    pub fn instance(&self, name: &str) -> Result<&Instance> {
        self.instances
            .get(name)
            .ok_or_else(|| Error::UnknownGraph(name.to_string()))
    }

    pub fn schedule(&self, spec: &ExperimentSpec) -> Result<AnnealSchedule> {
        let inst = self.instance(&spec.graph)?;
        derive_schedule(&inst.model, spec.cycles, spec.variability.t_res)
    }

    pub fn run_trials(&self, spec: &ExperimentSpec) -> Result<ExperimentSummary> {
        spec.validate()?;
        let inst = self.instance(&spec.graph)?;
        let schedule = derive_schedule(&inst.model, spec.cycles, spec.variability.t_res)?;
        let n = inst.model.n();

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.threads)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;

        let run_one = |k: usize| -> Result<TrialResult> {
            let profile = spec.trial_profile(k, n)?;
            run_anneal(&inst.model, &schedule, &spec.algo, &profile, spec.trial_seed(k))
                .map_err(|e| Error::Trial {
                    trial: k,
                    source: Box::new(e),
                })
        };

        let start = Instant::now();
        let results: Result<Vec<TrialResult>> =
            pool.install(|| (0..spec.trials).into_par_iter().map(run_one).collect());
        let anneal_seconds = start.elapsed().as_secs_f64();
        let results = results?;

        let stats = summarize(&results, inst.best_known)?;
        Ok(ExperimentSummary {
            spec: spec.clone(),
            stats,
            anneal_seconds,
            results,
        })
    }

    /// One batch per value of `axis`, all sharing the base seed.
    pub fn sweep(&self, base: &ExperimentSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<ExperimentSummary>> {
        if values.is_empty() {
            return Err(Error::invalid("sweep needs at least one value"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!("sweep value {v} must be finite and >= 0")));
        }
        values
            .iter()
            .map(|&v| {
                let mut spec = base.clone();
                axis.apply(&mut spec.variability, v);
                self.run_trials(&spec)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annealer::Algorithm;
    use crate::model::SpinState;

    fn fake(cuts: &[f64]) -> Vec<TrialResult> {
        cuts.iter()
            .map(|&c| TrialResult {
                trace: vec![],
                final_state: SpinState::uniform(1, 1).unwrap(),
                final_energy: -c,
                final_cut: c,
                best_cut: c,
                updates: 0,
            })
            .collect()
    }

    fn toy_engine() -> Engine {
        let mut e = Engine::new();
        let g = MaxCutGraph::new(
            6,
            [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1), (0, 3, 1)],
        )
        .unwrap();
        e.add_graph("hex", g, Some(7));
        e
    }

    #[test]
    fn summary_arithmetic() {
        let s = summarize(&fake(&[10.0, 10.0]), Some(10)).unwrap();
        assert_eq!(s.mean_cut, 10.0);
        assert_eq!(s.std_cut, 0.0);
        assert_eq!(s.normalized_mean_cut, Some(1.0));
        let s = summarize(&fake(&[8.0, 12.0]), None).unwrap();
        assert_eq!(s.mean_cut, 10.0);
        assert!((s.std_cut - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.normalized_mean_cut, None);
        assert!(summarize(&[], Some(3)).is_err());
    }

    #[test]
    fn summary_matches_statrs() {
        use statrs::statistics::Statistics;
        let cuts: Vec<f64> = (0..100).map(|k| ((k * 37) % 101) as f64 + 0.5).collect();
        let s = summarize(&fake(&cuts), Some(200)).unwrap();
        let mean = cuts.as_slice().mean();
        let sd = cuts.as_slice().std_dev();
        assert!((s.mean_cut - mean).abs() < 1e-12);
        assert!((s.std_cut - sd).abs() < 1e-12);
        assert!((s.normalized_mean_cut.unwrap() - mean / 200.0).abs() < 1e-15);
    }

    #[test]
    fn single_trial_summary() {
        let e = toy_engine();
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Tapsa));
        spec.trials = 1;
        spec.cycles = 50;
        let s = e.run_trials(&spec).unwrap();
        assert_eq!(s.mean_cut(), s.results[0].final_cut);
        assert_eq!(s.std_cut(), 0.0);
    }

    #[test]
    fn unknown_graph_is_an_error() {
        let e = toy_engine();
        let spec = ExperimentSpec::new("nope", AlgorithmConfig::new(Algorithm::Psa));
        assert!(matches!(e.run_trials(&spec), Err(Error::UnknownGraph(_))));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let e = toy_engine();
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Psa));
        spec.trials = 0;
        assert!(e.run_trials(&spec).is_err());
        spec.trials = 1;
        spec.cycles = 1;
        assert!(e.run_trials(&spec).is_err());
        spec.cycles = 10;
        assert!(e.sweep(&spec, SweepAxis::SigmaNu, &[]).is_err());
        assert!(e.sweep(&spec, SweepAxis::SigmaNu, &[-1.0]).is_err());
    }

    #[test]
    fn seed_isolation() {
        let e = toy_engine();
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Psa));
        spec.cycles = 20;
        spec.trials = 5;
        spec.variability = VariabilityConfig::new(0.5, 0.5, 0.5, 10).unwrap();
        let five = e.run_trials(&spec).unwrap();
        spec.trials = 3;
        let three = e.run_trials(&spec).unwrap();
        assert_eq!(&five.results[..3], &three.results[..]);
    }

    #[test]
    fn thread_budget_does_not_change_results() {
        let e = toy_engine();
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Spsa));
        spec.cycles = 40;
        spec.trials = 16;
        spec.variability = VariabilityConfig::new(0.2, 0.2, 0.7, 10).unwrap();
        let mut runs = Vec::new();
        for threads in [1, 2, 0] {
            spec.threads = threads;
            runs.push(e.run_trials(&spec).unwrap());
        }
        for r in &runs[1..] {
            assert_eq!(r.results, runs[0].results);
            assert_eq!(r.stats, runs[0].stats);
        }
    }

    #[test]
    fn fixed_realisation_is_shared() {
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Psa));
        spec.variability = VariabilityConfig::new(0.5, 0.5, 0.5, 10).unwrap();
        assert_ne!(spec.trial_profile(0, 6).unwrap(), spec.trial_profile(1, 6).unwrap());
        spec.resample_variability = false;
        assert_eq!(spec.trial_profile(0, 6).unwrap(), spec.trial_profile(1, 6).unwrap());
    }

    #[test]
    fn sweep_of_zero_matches_direct_run() {
        let e = toy_engine();
        let mut spec = ExperimentSpec::new("hex", AlgorithmConfig::new(Algorithm::Tapsa));
        spec.cycles = 30;
        spec.trials = 8;
        let direct = e.run_trials(&spec).unwrap();
        let swept = e.sweep(&spec, SweepAxis::SigmaDelta, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(swept.len(), 3);
        for s in &swept {
            assert_eq!(s.results, direct.results);
            assert_eq!(s.stats, direct.stats);
        }
    }

    /// Dense, single-threaded TApSA written directly from the update rule,
    /// drawing from the same per-(trial, p-bit, sub-step) streams.
    fn reference_tapsa(g: &MaxCutGraph, cycles: usize, alpha: usize, seed: u64) -> f64 {
        use crate::rng::Purpose;
        use std::collections::VecDeque;
        let n = g.n();
        let mut j = vec![vec![0.0; n]; n];
        for &(a, b, w) in g.edges() {
            j[a][b] = -(w as f64);
            j[b][a] = -(w as f64);
        }
        let s: Vec<f64> = j
            .iter()
            .map(|row| {
                let m = row.iter().sum::<f64>() / n as f64;
                let var = row.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
                ((n - 1) as f64 * var).sqrt()
            })
            .collect();
        let mean_s = s.iter().sum::<f64>() / n as f64;
        let (lo, hi) = (0.1 / mean_s, 10.0 / mean_s);
        let key = TrialKey::new(seed);
        let mut spins: Vec<f64> = (0..n)
            .map(|i| if key.stream(Purpose::InitialSpin, i, 0).next_bool() { 1.0 } else { -1.0 })
            .collect();
        let mut hist: Vec<VecDeque<f64>> = vec![VecDeque::new(); n];
        for c in 0..cycles {
            let i0 = lo * (hi / lo).powf(c as f64 / (cycles - 1) as f64);
            // ideal devices: everyone updates on the first sub-step of the cycle
            let count = (c * 10) as u64;
            let old = spins.clone();
            for i in 0..n {
                let raw: f64 = (0..n).map(|k| j[i][k] * old[k]).sum();
                hist[i].push_back(raw);
                if hist[i].len() > alpha {
                    hist[i].pop_front();
                }
                let input = i0 * hist[i].iter().sum::<f64>() / hist[i].len() as f64;
                let r = key.stream(Purpose::Update, i, count).next_signed_unit();
                spins[i] = if r + input.tanh() >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        g.edges()
            .iter()
            .filter(|&&(a, b, _)| spins[a] != spins[b])
            .map(|&(_, _, w)| w as f64)
            .sum()
    }

    #[test]
    fn batch_mean_matches_sequential_reference() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(12);
        let mut edges = Vec::new();
        for a in 0..12 {
            for b in (a + 1)..12 {
                if rng.random_bool(0.4) {
                    edges.push((a, b, if rng.random_bool(0.5) { 1 } else { -1 }));
                }
            }
        }
        let g = MaxCutGraph::new(12, edges).unwrap();
        let mut e = Engine::new();
        e.add_graph("toy12", g.clone(), None);
        let mut spec = ExperimentSpec::new("toy12", AlgorithmConfig::new(Algorithm::Tapsa));
        spec.cycles = 200;
        spec.trials = 100;
        spec.base_seed = 5;
        let summary = e.run_trials(&spec).unwrap();
        let reference: f64 = (0..100)
            .map(|k| reference_tapsa(&g, spec.cycles, 4, spec.trial_seed(k)))
            .sum::<f64>()
            / 100.0;
        assert!((summary.mean_cut() - reference).abs() <= 1.0, "{} vs {reference}", summary.mean_cut());
        assert_eq!(e.run_trials(&spec).unwrap().results, summary.results);
        assert!(summary.normalized_mean_cut().is_none());
    }

    #[test]
    fn axis_names_parse() {
        for axis in [SweepAxis::SigmaLambda, SweepAxis::SigmaDelta, SweepAxis::SigmaNu] {
            assert_eq!(axis.name().parse::<SweepAxis>().unwrap(), axis);
        }
        assert!("sigma_x".parse::<SweepAxis>().is_err());
    }
}
