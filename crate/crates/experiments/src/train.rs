use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{BinnedDataset, PosteriorTable, BINS};
use crate::error::{ExperimentError, Result};

const INPUTS: usize = 8;
const CLASSES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    pub gamma: f64,
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            hidden_width: 64,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            batch_size: 64,
            epochs: 30,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainRun {
    pub config: TrainConfig,
    /// Softmax output for every `(f1, f2)` cell.
    pub posterior: PosteriorTable,
    /// Mean training loss per epoch.
    pub loss_trajectory: Vec<f64>,
}

/// Per-sample focal loss `(1-p_c)^gamma ln(1/p_c)` of a softmax over `logits`
/// and its gradient with respect to the logits.
pub fn focal_logit_grad(gamma: f64, logits: &[f64], class: usize) -> (f64, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    let p: Vec<f64> = logits.iter().map(|z| (z - lse).exp()).collect();
    let nll = lse - logits[class];
    let q: f64 = p.iter().enumerate().filter(|&(j, _)| j != class).map(|(_, v)| v).sum();
    let (loss, s) = if gamma == 0.0 {
        (nll, -1.0)
    } else if q == 0.0 {
        (0.0, 0.0)
    } else {
        let pc = p[class];
        (q.powf(gamma) * nll, -q.powf(gamma - 1.0) * (gamma * pc * nll + q))
    };
    let grad = (0..logits.len())
        .map(|j| if j == class { s * q } else { -s * p[j] })
        .collect();
    (loss, grad)
}

/// One-hot `(f1, f2)` inputs, a rectified hidden layer and a 2-way softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    hidden: usize,
    /// `w1 | b1 | w2 | b2`, row-major.
    params: Vec<f64>,
}

impl Network {
    fn new(hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut params = Vec::with_capacity(hidden * (INPUTS + 1) + CLASSES * (hidden + 1));
        let b1 = 1.0 / (INPUTS as f64).sqrt();
        let b2 = 1.0 / (hidden as f64).sqrt();
        params.extend((0..hidden * (INPUTS + 1)).map(|_| rng.gen_range(-b1..b1)));
        params.extend((0..CLASSES * (hidden + 1)).map(|_| rng.gen_range(-b2..b2)));
        Self { hidden, params }
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let h = self.hidden;
        (h * INPUTS, h * (INPUTS + 1), h * (INPUTS + 1) + CLASSES * h)
    }

    fn hidden_pre(&self, f1: u8, f2: u8) -> Vec<f64> {
        let (b1, _, _) = self.offsets();
        (0..self.hidden)
            .map(|j| self.params[j * INPUTS + f1 as usize] + self.params[j * INPUTS + 4 + f2 as usize] + self.params[b1 + j])
            .collect()
    }

    fn logits_from(&self, act: &[f64]) -> [f64; CLASSES] {
        let (_, w2, b2) = self.offsets();
        let h = self.hidden;
        [0, 1].map(|k| {
            self.params[b2 + k] + act.iter().enumerate().map(|(j, a)| self.params[w2 + k * h + j] * a).sum::<f64>()
        })
    }

    pub fn logits(&self, f1: u8, f2: u8) -> [f64; CLASSES] {
        let act: Vec<f64> = self.hidden_pre(f1, f2).into_iter().map(|v| v.max(0.0)).collect();
        self.logits_from(&act)
    }

    pub fn posterior(&self) -> PosteriorTable {
        let rows = (0..BINS)
            .map(|i| {
                let z = self.logits((i / 4) as u8, (i % 4) as u8);
                let m = z[0].max(z[1]);
                let e = [(z[0] - m).exp(), (z[1] - m).exp()];
                let s = e[0] + e[1];
                Some([e[0] / s, e[1] / s])
            })
            .collect();
        PosteriorTable { rows }
    }

    /// Adds the gradient of one sample's loss to `grad` and returns the loss.
    fn accumulate(&self, gamma: f64, f1: u8, f2: u8, c: u8, grad: &mut [f64]) -> f64 {
        let (b1, w2, b2) = self.offsets();
        let h = self.hidden;
        let pre = self.hidden_pre(f1, f2);
        let act: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
        let (loss, dz) = focal_logit_grad(gamma, &self.logits_from(&act), c as usize);
        for k in 0..CLASSES {
            grad[b2 + k] += dz[k];
            for j in 0..h {
                grad[w2 + k * h + j] += dz[k] * act[j];
            }
        }
        for j in 0..h {
            if pre[j] <= 0.0 {
                continue;
            }
            let da: f64 = (0..CLASSES).map(|k| dz[k] * self.params[w2 + k * h + j]).sum();
            grad[j * INPUTS + f1 as usize] += da;
            grad[j * INPUTS + 4 + f2 as usize] += da;
            grad[b1 + j] += da;
        }
        loss
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn step(&mut self, cfg: &TrainConfig, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * grad[i];
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            params[i] -= cfg.learning_rate * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + cfg.adam_eps);
        }
    }
}

/// Trains with mean per-sample focal loss and reports the learned posterior.
///
/// `observe` is called after every epoch with the epoch index and network.
pub fn train_classifier_observed(
    data: &BinnedDataset,
    config: &TrainConfig,
    mut observe: impl FnMut(usize, &Network),
) -> Result<TrainRun> {
    if data.is_empty() {
        return Err(ExperimentError::Invalid("empty dataset".into()));
    }
    if config.batch_size == 0 || config.hidden_width == 0 || !(config.gamma >= 0.0) {
        return Err(ExperimentError::Invalid(format!("bad training configuration {:?}", config)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = Network::new(config.hidden_width, &mut rng);
    let mut adam = Adam {
        m: vec![0.0; net.params.len()],
        v: vec![0.0; net.params.len()],
        t: 0,
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = vec![0.0; net.params.len()];
    let mut trajectory = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch, idx) in order.chunks(config.batch_size).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut loss = 0.0;
            for &i in idx {
                let s = data.samples[i];
                loss += net.accumulate(config.gamma, s.f1, s.f2, s.c, &mut grad);
            }
            if !loss.is_finite() {
                return Err(ExperimentError::NonFinite { epoch, batch, loss });
            }
            let scale = 1.0 / idx.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(config, &mut net.params, &grad);
            epoch_loss += loss;
        }
        let mean = epoch_loss / data.len() as f64;
        log::debug!("seed {} epoch {} loss {:.6}", config.seed, epoch, mean);
        trajectory.push(mean);
        observe(epoch, &net);
    }
    Ok(TrainRun {
        config: config.clone(),
        posterior: net.posterior(),
        loss_trajectory: trajectory,
    })
}

pub fn train_classifier(data: &BinnedDataset, config: &TrainConfig) -> Result<TrainRun> {
    train_classifier_observed(data, config, |_, _| {})
}

/// Independent runs that differ only in seed, executed concurrently.
pub fn train_seeds(data: &BinnedDataset, config: &TrainConfig, seeds: &[u64]) -> Result<Vec<TrainRun>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = TrainConfig { seed, ..config.clone() };
            train_classifier(data, &cfg)
        })
        .collect()
}
