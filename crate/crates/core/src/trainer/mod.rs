//! Binary cross-entropy and SPSA training over shared word parameters.

use std::f64::consts::TAU;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compile, slot_table, AnsatzConfig, CircuitError, ParameterizedCircuit, SlotTable};
use crate::dataset::{DatasetEntry, Splits};
use crate::diagram::{build_model_diagram, Combination, DiagramError, Model};
use crate::qsim::{distribution, predict, ClassDistribution};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("empty split")]
    EmptySplit,
    #[error("parameter vector has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("bad SPSA configuration: {0}")]
    Config(String),
    #[error("entry '{entry}': {source}")]
    Diagram { entry: String, source: DiagramError },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    /// Stability constant; `None` means 1% of `iterations`.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Elementwise bound on the gradient estimate.
    pub clip: f64,
    /// Wrap parameters into `[0, 2pi)` after each update.
    pub wrap: bool,
    /// Length of one optimizer unit in parameter space. With `2pi` the
    /// gains and perturbations are measured in full turns.
    pub unit: f64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: 0.05,
            c: 0.06,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
            iterations: 100,
            seed: 0,
            clip: 10.0,
            wrap: true,
            unit: TAU,
        }
    }
}

impl SpsaConfig {
    pub fn stability(&self) -> f64 {
        self.big_a.unwrap_or(0.01 * self.iterations as f64)
    }

    /// Step size at iteration `k` (zero-based).
    pub fn gain(&self, k: usize) -> f64 {
        self.a / (self.stability() + k as f64 + 1.0).powf(self.alpha)
    }

    /// Perturbation size at iteration `k`.
    pub fn perturbation(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }

    fn check(&self) -> Result<(), TrainError> {
        if !(self.a > 0.0 && self.c > 0.0) {
            return Err(TrainError::Config("a and c must be positive".into()));
        }
        if !(self.stability() >= 0.0 && self.clip > 0.0 && self.unit > 0.0) {
            return Err(TrainError::Config("A must be non-negative, clip positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainState {
    pub theta: Vec<f64>,
    pub history: Vec<HistoryPoint>,
    pub rng: ChaCha8Rng,
}

impl TrainState {
    pub fn new(theta: Vec<f64>, seed: u64) -> Self {
        Self {
            theta,
            history: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// `dim` angles drawn uniformly from `[0, 2pi)`.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Uniform::new(0.0, TAU);
        let theta = (0..dim).map(|_| u.sample(&mut rng)).collect();
        Self {
            theta,
            history: Vec::new(),
            rng,
        }
    }
}

pub fn bce_loss(dist: &ClassDistribution, label: u8) -> f64 {
    -dist.prob(label).ln()
}

fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// One SPSA update at iteration `k`, calling `loss` exactly twice.
/// Returns the losses at the two perturbed points.
pub fn spsa_step(
    state: &mut TrainState,
    k: usize,
    cfg: &SpsaConfig,
    mut loss: impl FnMut(&[f64]) -> f64,
) -> (f64, f64) {
    let dim = state.theta.len();
    let delta: Vec<f64> = (0..dim)
        .map(|_| if state.rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let ck = cfg.perturbation(k);
    let ak = cfg.gain(k);
    let shift = ck * cfg.unit;
    let plus: Vec<f64> = state.theta.iter().zip(&delta).map(|(t, d)| t + shift * d).collect();
    let minus: Vec<f64> = state.theta.iter().zip(&delta).map(|(t, d)| t - shift * d).collect();
    let (lp, lm) = (loss(&plus), loss(&minus));
    let diff = lp - lm;
    for (t, d) in state.theta.iter_mut().zip(&delta) {
        let g = (diff / (2.0 * ck * d)).clamp(-cfg.clip, cfg.clip);
        *t -= ak * g * cfg.unit;
        if cfg.wrap {
            *t = wrap_angle(*t);
        }
    }
    (lp, lm)
}

/// Compiled circuits of one split, with their slots located in the global
/// table.
#[derive(Clone, Debug)]
pub struct CompiledSplit {
    pub circuits: Vec<ParameterizedCircuit>,
    pub slots: Vec<Vec<usize>>,
    pub labels: Vec<u8>,
}

impl CompiledSplit {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn distributions(&self, theta: &[f64]) -> Result<Vec<ClassDistribution>, CircuitError> {
        let mut local = Vec::new();
        self.circuits
            .iter()
            .zip(&self.slots)
            .map(|(c, idx)| {
                local.clear();
                local.extend(idx.iter().map(|&i| theta[i]));
                distribution(&c.bind_local(&local)?)
            })
            .collect()
    }

    /// Mean cross-entropy and accuracy at `theta`.
    pub fn score(&self, theta: &[f64]) -> Result<HistoryPoint, CircuitError> {
        let dists = self.distributions(theta)?;
        let n = self.len() as f64;
        let mut loss = 0.0;
        let mut correct = 0usize;
        for (d, &y) in dists.iter().zip(&self.labels) {
            loss += bce_loss(d, y);
            correct += usize::from(predict(d) == y);
        }
        Ok(HistoryPoint {
            loss: loss / n,
            accuracy: correct as f64 / n,
        })
    }
}

/// Circuits for one model cell over all three splits.
#[derive(Clone, Debug)]
pub struct Task {
    pub model: Model,
    pub combination: Combination,
    pub table: SlotTable,
    pub train: CompiledSplit,
    pub test: CompiledSplit,
    pub val: CompiledSplit,
}

pub fn compile_entries(
    entries: &[DatasetEntry],
    model: Model,
    op: Combination,
    k0: usize,
    ansatz: &AnsatzConfig,
) -> Result<Vec<ParameterizedCircuit>, TrainError> {
    entries
        .iter()
        .map(|e| {
            let d = build_model_diagram(e, model, op, k0).map_err(|source| TrainError::Diagram {
                entry: e.sentence(),
                source,
            })?;
            Ok(compile(&d, ansatz)?)
        })
        .collect()
}

impl Task {
    pub fn new(
        splits: &Splits,
        model: Model,
        combination: Combination,
        k0: usize,
        ansatz: &AnsatzConfig,
    ) -> Result<Self, TrainError> {
        let parts = [&splits.train, &splits.test, &splits.val]
            .map(|entries| compile_entries(entries, model, combination, k0, ansatz));
        let [train, test, val] = parts;
        let (train, test, val) = (train?, test?, val?);
        let table = slot_table(train.iter().chain(&test).chain(&val));
        let locate = |circuits: Vec<ParameterizedCircuit>, entries: &[DatasetEntry]| {
            let slots = circuits.iter().map(|c| table.locate(c)).collect::<Result<_, _>>()?;
            Ok::<_, CircuitError>(CompiledSplit {
                circuits,
                slots,
                labels: entries.iter().map(|e| e.label).collect(),
            })
        };
        Ok(Self {
            model,
            combination,
            train: locate(train, &splits.train)?,
            test: locate(test, &splits.test)?,
            val: locate(val, &splits.val)?,
            table,
        })
    }

    /// Name such as `4a`.
    pub fn name(&self) -> String {
        format!("{}{}", self.model, self.combination.letter())
    }
}

/// Trains from a uniform random start on the training split.
pub fn train(task: &Task, cfg: &SpsaConfig) -> Result<TrainState, TrainError> {
    train_split(&task.train, task.table.len(), cfg)
}

pub fn train_split(split: &CompiledSplit, dim: usize, cfg: &SpsaConfig) -> Result<TrainState, TrainError> {
    cfg.check()?;
    if split.is_empty() {
        return Err(TrainError::EmptySplit);
    }
    let mut state = TrainState::random(dim, cfg.seed);
    for k in 0..cfg.iterations {
        let mut scores = Vec::with_capacity(2);
        let mut failure = None;
        spsa_step(&mut state, k, cfg, |theta| match split.score(theta) {
            Ok(p) => {
                scores.push(p);
                p.loss
            }
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        });
        if let Some(e) = failure {
            return Err(e.into());
        }
        state.history.push(HistoryPoint {
            loss: (scores[0].loss + scores[1].loss) / 2.0,
            accuracy: (scores[0].accuracy + scores[1].accuracy) / 2.0,
        });
    }
    Ok(state)
}

pub fn evaluate(theta: &[f64], split: &CompiledSplit) -> Result<f64, TrainError> {
    if split.is_empty() {
        return Err(TrainError::EmptySplit);
    }
    Ok(split.score(theta)?.accuracy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub test_accuracy: f64,
    pub val_accuracy: f64,
    pub train_loss: f64,
    pub train_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    pub loss: Vec<f64>,
    pub acc: Vec<f64>,
}

/// One model/combination cell averaged over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub model: u8,
    pub combination: Combination,
    pub seeds: usize,
    pub curves: Curves,
    pub test_accuracy_mean: f64,
    pub test_accuracy_std: f64,
    #[serde(skip)]
    pub runs: Vec<SeedResult>,
}

impl CellResult {
    pub fn name(&self) -> String {
        format!("{}{}", self.model, self.combination.letter())
    }
}

/// Seed of run `i` in a cell started from `base`.
pub fn run_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Trains `seeds` independent runs of one cell; runs execute in parallel
/// and are reported in seed order.
pub fn run_cell(task: &Task, cfg: &SpsaConfig, seeds: usize) -> Result<CellResult, TrainError> {
    if seeds == 0 {
        return Err(TrainError::Config("at least one seed".into()));
    }
    let runs: Vec<(SeedResult, Vec<HistoryPoint>)> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = run_seed(cfg.seed, i);
            let state = train(task, &SpsaConfig { seed, ..*cfg })?;
            let last = state.history.last().copied().unwrap_or(HistoryPoint {
                loss: f64::NAN,
                accuracy: f64::NAN,
            });
            Ok((
                SeedResult {
                    seed,
                    test_accuracy: evaluate(&state.theta, &task.test)?,
                    val_accuracy: evaluate(&state.theta, &task.val)?,
                    train_loss: last.loss,
                    train_accuracy: last.accuracy,
                },
                state.history,
            ))
        })
        .collect::<Result<_, TrainError>>()?;
    let n = seeds as f64;
    let mut curves = Curves {
        loss: vec![0.0; cfg.iterations],
        acc: vec![0.0; cfg.iterations],
    };
    for (_, history) in &runs {
        for (k, p) in history.iter().enumerate() {
            curves.loss[k] += p.loss / n;
            curves.acc[k] += p.accuracy / n;
        }
    }
    let accs: Vec<f64> = runs.iter().map(|(r, _)| r.test_accuracy).collect();
    let mean = accs.iter().sum::<f64>() / n;
    let std = (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CellResult {
        model: task.model.number(),
        combination: task.combination,
        seeds,
        curves,
        test_accuracy_mean: mean,
        test_accuracy_std: std,
        runs: runs.into_iter().map(|(r, _)| r).collect(),
    })
}

/// Every requested cell, in the given order.
pub fn run_experiment_matrix(
    splits: &Splits,
    cells: &[(Model, Combination)],
    cfg: &SpsaConfig,
    seeds: usize,
    k0: usize,
    ansatz: &AnsatzConfig,
) -> Result<Vec<CellResult>, TrainError> {
    cells
        .iter()
        .map(|&(m, op)| run_cell(&Task::new(splits, m, op, k0, ansatz)?, cfg, seeds))
        .collect()
}

pub fn all_cells() -> Vec<(Model, Combination)> {
    Model::ALL
        .iter()
        .flat_map(|&m| Combination::ALL.iter().map(move |&op| (m, op)))
        .collect()
}

/// CSV with one row per (model, combination, seed).
pub fn write_results_csv<W: std::io::Write>(results: &[CellResult], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "model",
        "combination",
        "seed",
        "test_accuracy",
        "val_accuracy",
        "train_loss",
        "train_accuracy",
    ])?;
    for r in results {
        for s in &r.runs {
            wr.write_record([
                r.model.to_string(),
                r.combination.to_string(),
                s.seed.to_string(),
                s.test_accuracy.to_string(),
                s.val_accuracy.to_string(),
                s.train_loss.to_string(),
                s.train_accuracy.to_string(),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}
