//! Monte Carlo link simulation of shadowing-based antenna selection.
//!
//! Trials are split into `partitions` contiguous chunks. Chunk i owns three
//! ChaCha8 streams keyed by `sub_seed(seed, i)`: stream 0 draws the channel,
//! stream 1 the feedback bit errors, stream 2 the random-policy choice. The
//! channel stream consumes the same number of variates whatever the feedback
//! does, so runs that differ only in `pe` see identical channels. Chunks run
//! in parallel and are merged in index order, which makes every estimate a
//! pure function of (config, options), independent of thread count.
//!
//! Channels are drawn at 0 dB and scaled: α_ℓ ∝ E_s/N_0 and the argmax is
//! scale-free, so one set of trials serves a whole SNR sweep.

use crate::closed_form::Modulation;
use crate::config::{db_to_linear, ChannelConfig, Link};
use crate::error::{Error, Result};
use crate::specfun::gaussian_q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

/// Antenna choice rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Largest shadowing power.
    Ssi,
    /// Uniform, ignoring the channel.
    Random,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Ssi => "ssi",
            Policy::Random => "random",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ssi" => Some(Policy::Ssi),
            "random" => Some(Policy::Random),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub trials: u64,
    pub seed: u64,
    pub policy: Policy,
    /// Power correlation between shadowing powers, in [0, 1).
    pub rho: f64,
    /// Feedback bit-error probability, in [0, 1).
    pub pe: f64,
    pub partitions: usize,
}

/// Smallest accepted trial count.
pub const MIN_TRIALS: u64 = 10_000;

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions { trials: 1_000_000, seed: 1, policy: Policy::Ssi, rho: 0.0, pe: 0.0, partitions: 16 }
    }
}

impl SimulationOptions {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::validation("sim.trials", format!("{} is below {MIN_TRIALS}", self.trials)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::validation("sim.rho", format!("{} must lie in [0, 1)", self.rho)));
        }
        if !(0.0..1.0).contains(&self.pe) {
            return Err(Error::validation("sim.pe", format!("{} must lie in [0, 1)", self.pe)));
        }
        if self.partitions == 0 || self.partitions as u64 > self.trials {
            return Err(Error::validation("sim.partitions", "must be between 1 and trials"));
        }
        Ok(())
    }

    /// Trials assigned to chunk `i`.
    pub fn partition_trials(&self, i: usize) -> u64 {
        let p = self.partitions as u64;
        self.trials / p + u64::from((i as u64) < self.trials % p)
    }
}

/// A Monte Carlo estimate with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub partitions: usize,
    pub policy: Policy,
}

impl SimulationEstimate {
    /// Seed derivation and interpretation notes for run metadata.
    pub fn provenance(&self) -> String {
        format!(
            "seed={} partitions={} sub_seed=splitmix64(seed+(i+1)*0x9E3779B97F4A7C15) streams=channel:0,feedback:1,policy:2 \
             policy={} feedback_index=modulo_L",
            self.seed,
            self.partitions,
            self.policy.name()
        )
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of chunk `i`.
pub fn sub_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// The three streams of chunk `i`.
pub struct Streams {
    pub channel: ChaCha8Rng,
    pub feedback: ChaCha8Rng,
    pub policy: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64, i: usize) -> Self {
        let s = sub_seed(seed, i);
        let stream = |k: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            r.set_stream(k);
            r
        };
        Streams { channel: stream(0), feedback: stream(1), policy: stream(2) }
    }
}

/// Gamma(shape, scale) variate.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, scale).expect("shape and scale validated > 0").sample(rng)
}

/// Flips each of ⌈log₂ L⌉ index bits with probability `pe` and maps the
/// result back into range modulo L. One uniform is drawn per bit.
pub fn feedback_corrupt<R: Rng + ?Sized>(r: usize, l: usize, pe: f64, rng: &mut R) -> usize {
    let bits = feedback_bits(l);
    let mut idx = r;
    for b in 0..bits {
        if rng.random::<f64>() < pe {
            idx ^= 1 << b;
        }
    }
    idx % l
}

/// ⌈log₂ L⌉.
pub fn feedback_bits(l: usize) -> u32 {
    if l <= 1 {
        0
    } else {
        usize::BITS - (l - 1).leading_zeros()
    }
}

/// Shadowing powers with pairwise power correlation `rho` built from shared
/// and private Gaussian components: α_ℓ = (γ̃_ℓ/2m) Σ_{j<2m} Z_{ℓj}² with
/// Z_{ℓj} = ρ^{1/4} W_j + √(1 − √ρ) E_{ℓj}. Needs equal m_α on all links.
pub fn correlated_shadow_draw<R: Rng + ?Sized>(links: &[Link], rho: f64, rng: &mut R) -> Result<Vec<f64>> {
    let m = links[0].m_alpha;
    if links.iter().any(|l| l.m_alpha != m) {
        return Err(Error::Unsupported("correlated shadowing needs equal m_alpha on every link".into()));
    }
    let mut out = vec![0.0; links.len()];
    correlated_into(links, rho, m, rng, &mut out);
    Ok(out)
}

fn correlated_into<R: Rng + ?Sized>(links: &[Link], rho: f64, m: u32, rng: &mut R, out: &mut [f64]) {
    let shared = rho.sqrt().sqrt();
    let private = (1.0 - rho.sqrt()).sqrt();
    out.iter_mut().for_each(|x| *x = 0.0);
    for _ in 0..2 * m {
        let w: f64 = StandardNormal.sample(rng);
        for o in out.iter_mut() {
            let e: f64 = StandardNormal.sample(rng);
            let z = shared * w + private * e;
            *o += z * z;
        }
    }
    for (o, l) in out.iter_mut().zip(links) {
        *o *= l.mean_snr / (2.0 * m as f64);
    }
}

/// Outcome of one trial at the sampler's reference SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    /// Antenna the receiver picked.
    pub chosen: usize,
    /// Antenna actually used after feedback.
    pub used: usize,
    pub gamma: f64,
}

/// Per-link distributions and scratch space for repeated draws.
pub struct TrialSampler {
    links: Vec<Link>,
    alpha: Vec<Gamma<f64>>,
    beta: Vec<Gamma<f64>>,
    opts: SimulationOptions,
    scratch_alpha: Vec<f64>,
    scratch_beta: Vec<f64>,
}

impl TrialSampler {
    pub fn new(links: Vec<Link>, opts: SimulationOptions) -> Result<Self> {
        if opts.rho > 0.0 && links.iter().any(|l| l.m_alpha != links[0].m_alpha) {
            return Err(Error::Unsupported("correlated shadowing needs equal m_alpha on every link".into()));
        }
        let gamma = |shape: f64, scale: f64| {
            Gamma::new(shape, scale).map_err(|e| Error::domain("sample_gamma", e.to_string()))
        };
        let alpha = links.iter().map(|l| gamma(l.m_alpha as f64, l.mean_snr / l.m_alpha as f64)).collect::<Result<_>>()?;
        let beta = links.iter().map(|l| gamma(l.m_beta, 1.0 / l.m_beta)).collect::<Result<_>>()?;
        let l = links.len();
        Ok(TrialSampler { links, alpha, beta, opts, scratch_alpha: vec![0.0; l], scratch_beta: vec![0.0; l] })
    }

    /// Draws one trial. The channel stream always consumes L shadowing and
    /// L fading variates.
    pub fn draw(&mut self, streams: &mut Streams) -> Trial {
        let l = self.links.len();
        if self.opts.rho > 0.0 {
            correlated_into(&self.links, self.opts.rho, self.links[0].m_alpha, &mut streams.channel, &mut self.scratch_alpha);
        } else {
            for i in 0..l {
                self.scratch_alpha[i] = self.alpha[i].sample(&mut streams.channel);
            }
        }
        for i in 0..l {
            self.scratch_beta[i] = self.beta[i].sample(&mut streams.channel);
        }
        let chosen = match self.opts.policy {
            Policy::Ssi => {
                // lowest index wins ties
                let mut best = 0;
                for i in 1..l {
                    if self.scratch_alpha[i] > self.scratch_alpha[best] {
                        best = i;
                    }
                }
                best
            }
            Policy::Random => streams.policy.random_range(0..l),
        };
        let used = if self.opts.pe > 0.0 {
            feedback_corrupt(chosen, l, self.opts.pe, &mut streams.feedback)
        } else {
            chosen
        };
        Trial { chosen, used, gamma: self.scratch_alpha[used] * self.scratch_beta[used] }
    }
}

/// Draws one trial for `cfg` at its reference SNR.
pub fn draw_trial(cfg: &ChannelConfig, opts: &SimulationOptions, streams: &mut Streams) -> Result<Trial> {
    Ok(TrialSampler::new(cfg.links(), *opts)?.draw(streams))
}

/// Count, sum and sum of squares; merged in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// √(sample variance / n).
    pub fn stderr_mean(&self) -> f64 {
        let n = self.count as f64;
        let mean = self.mean();
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    /// √(p̂(1 − p̂)/n) for 0/1 samples.
    pub fn stderr_proportion(&self) -> f64 {
        let p = self.mean();
        (p * (1.0 - p) / self.count as f64).sqrt()
    }
}

/// Per-trial statistic: fills one value per output slot.
pub trait Statistic: Sync {
    fn slots(&self) -> usize;
    fn record(&self, trial: &Trial, out: &mut [Accumulator]);
}

/// Runs chunk `i` of `opts` for links drawn at 0 dB.
pub fn run_partition<S: Statistic>(
    links: &[Link],
    opts: &SimulationOptions,
    i: usize,
    stat: &S,
) -> Result<Vec<Accumulator>> {
    let mut sampler = TrialSampler::new(links.to_vec(), *opts)?;
    let mut streams = Streams::new(opts.seed, i);
    let mut acc = vec![Accumulator::default(); stat.slots()];
    for _ in 0..opts.partition_trials(i) {
        let t = sampler.draw(&mut streams);
        stat.record(&t, &mut acc);
    }
    Ok(acc)
}

/// All chunks in parallel, merged in index order.
pub fn run<S: Statistic>(links: &[Link], opts: &SimulationOptions, stat: &S) -> Result<Vec<Accumulator>> {
    opts.validate()?;
    let parts: Vec<Vec<Accumulator>> =
        (0..opts.partitions).into_par_iter().map(|i| run_partition(links, opts, i, stat)).collect::<Result<_>>()?;
    Ok(merge_partitions(&parts, stat.slots()))
}

/// Merges chunk results in the order given.
pub fn merge_partitions(parts: &[Vec<Accumulator>], slots: usize) -> Vec<Accumulator> {
    let mut total = vec![Accumulator::default(); slots];
    for p in parts {
        for (t, a) in total.iter_mut().zip(p) {
            t.merge(a);
        }
    }
    total
}

/// Links at 0 dB, the drawing reference.
pub fn base_links(cfg: &ChannelConfig) -> Result<Vec<Link>> {
    Ok(cfg.at_snr_db(0.0)?.links())
}

/// Indicator γ·g_k < γ_th for each SNR gain g_k.
pub struct OutageStat {
    pub gains: Vec<f64>,
    pub gamma_th: f64,
}

impl Statistic for OutageStat {
    fn slots(&self) -> usize {
        self.gains.len()
    }
    fn record(&self, t: &Trial, out: &mut [Accumulator]) {
        for (a, g) in out.iter_mut().zip(&self.gains) {
            a.push(if t.gamma * g < self.gamma_th { 1.0 } else { 0.0 });
        }
    }
}

/// a Q(√(2b γ g_k)) for each SNR gain g_k.
pub struct SepStat {
    pub gains: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl Statistic for SepStat {
    fn slots(&self) -> usize {
        self.gains.len()
    }
    fn record(&self, t: &Trial, out: &mut [Accumulator]) {
        for (acc, g) in out.iter_mut().zip(&self.gains) {
            acc.push(self.a * gaussian_q((2.0 * self.b * t.gamma * g).sqrt()));
        }
    }
}

/// (γ g_k)^p for each SNR gain g_k.
pub struct MomentStat {
    pub gains: Vec<f64>,
    pub p: i32,
}

impl Statistic for MomentStat {
    fn slots(&self) -> usize {
        self.gains.len()
    }
    fn record(&self, t: &Trial, out: &mut [Accumulator]) {
        for (acc, g) in out.iter_mut().zip(&self.gains) {
            acc.push((t.gamma * g).powi(self.p));
        }
    }
}

/// Indicator of each antenna being the one chosen.
pub struct SelectionStat {
    pub links: usize,
}

impl Statistic for SelectionStat {
    fn slots(&self) -> usize {
        self.links
    }
    fn record(&self, t: &Trial, out: &mut [Accumulator]) {
        for (i, acc) in out.iter_mut().enumerate() {
            acc.push(if t.chosen == i { 1.0 } else { 0.0 });
        }
    }
}

fn gains(points_db: &[f64]) -> Vec<f64> {
    points_db.iter().map(|&d| db_to_linear(d)).collect()
}

fn estimates(acc: Vec<Accumulator>, opts: &SimulationOptions, proportion: bool) -> Vec<SimulationEstimate> {
    acc.into_iter()
        .map(|a| SimulationEstimate {
            value: a.mean(),
            stderr: if proportion { a.stderr_proportion() } else { a.stderr_mean() },
            trials: a.count,
            seed: opts.seed,
            partitions: opts.partitions,
            policy: opts.policy,
        })
        .collect()
}

/// P(γ < γ_th) at every SNR in `points_db`, from one set of trials.
pub fn estimate_outage_sweep(
    cfg: &ChannelConfig,
    opts: &SimulationOptions,
    gamma_th: f64,
    points_db: &[f64],
) -> Result<Vec<SimulationEstimate>> {
    let stat = OutageStat { gains: gains(points_db), gamma_th };
    Ok(estimates(run(&base_links(cfg)?, opts, &stat)?, opts, true))
}

/// Semi-analytic SEP E[a Q(√(2bγ))] at every SNR in `points_db`.
pub fn estimate_sep_sweep(
    cfg: &ChannelConfig,
    opts: &SimulationOptions,
    modulation: &Modulation,
    points_db: &[f64],
) -> Result<Vec<SimulationEstimate>> {
    let stat = SepStat { gains: gains(points_db), a: modulation.a(), b: modulation.b() };
    Ok(estimates(run(&base_links(cfg)?, opts, &stat)?, opts, false))
}

/// E[γ^p] at every SNR in `points_db`.
pub fn estimate_moments_sweep(
    cfg: &ChannelConfig,
    opts: &SimulationOptions,
    p: u32,
    points_db: &[f64],
) -> Result<Vec<SimulationEstimate>> {
    if p == 0 {
        return Err(Error::domain("estimate_moments", "order p must be ≥ 1"));
    }
    let stat = MomentStat { gains: gains(points_db), p: p as i32 };
    Ok(estimates(run(&base_links(cfg)?, opts, &stat)?, opts, false))
}

fn first(v: Vec<SimulationEstimate>) -> SimulationEstimate {
    v.into_iter().next().expect("one SNR point")
}

/// Outage at the config's reference SNR.
pub fn estimate_outage(cfg: &ChannelConfig, opts: &SimulationOptions, gamma_th: f64) -> Result<SimulationEstimate> {
    estimate_outage_sweep(cfg, opts, gamma_th, &[cfg.snr_db().reference_db()]).map(first)
}

pub fn estimate_sep(cfg: &ChannelConfig, opts: &SimulationOptions, modulation: &Modulation) -> Result<SimulationEstimate> {
    estimate_sep_sweep(cfg, opts, modulation, &[cfg.snr_db().reference_db()]).map(first)
}

pub fn estimate_moments(cfg: &ChannelConfig, opts: &SimulationOptions, p: u32) -> Result<SimulationEstimate> {
    estimate_moments_sweep(cfg, opts, p, &[cfg.snr_db().reference_db()]).map(first)
}

/// Empirical frequency with which each antenna is chosen.
pub fn estimate_selection(cfg: &ChannelConfig, opts: &SimulationOptions) -> Result<Vec<SimulationEstimate>> {
    let stat = SelectionStat { links: cfg.links_count() };
    Ok(estimates(run(&base_links(cfg)?, opts, &stat)?, opts, true))
}
