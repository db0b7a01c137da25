//! Statistical comparison of real signing against the ideal simulator.
//!
//! The simulator draws `x ~ D_{Z^m, s}` and `e ~ U(Z_p^n)` independently.
//! Every presampling attempt made while signing `trials` messages feeds the
//! statistics (rejected attempts included, since restarts are themselves
//! measured). Trial `i` uses the rng derived from the master seed and `i`.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::scheme::{SecretKey, SIGN_ATTEMPT_GUARD};
use crate::xof::ShakeRng;

pub const REPORT_VERSION: u32 = 1;

pub const VARIANCE_TOLERANCE: f64 = 0.03;
pub const MEAN_SE_BOUND: f64 = 4.0;
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;
pub const CORRELATION_FACTOR: f64 = 4.0;
pub const RESTART_RANGE: (f64, f64) = (0.002, 0.03);

#[derive(Debug, Clone)]
pub struct StatConfig {
    pub trials: usize,
    pub seed: [u8; 32],
    /// Multiplies the reference deviation; anything but 1 is a negative control.
    pub reference_scale: f64,
}

impl StatConfig {
    pub fn new(trials: usize, seed: [u8; 32]) -> Self {
        Self { trials, seed, reference_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// The worst observed value of the checked quantity.
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub version: u32,
    pub paramset: String,
    pub trials: usize,
    pub attempts: usize,
    pub restarts: usize,
    pub reference_std: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl StatReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Coordinate pairs whose correlation is tracked, for preimages of length `m = k n`.
pub fn correlation_pairs(n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut pairs = vec![(0, 1), (1, 2), (n / 2, n / 2 + 1), (0, n), (1, n + 1), (n - 1, n), (0, m - 1), (n / 3, m - 1 - n / 3)];
    if m >= 3 * n {
        pairs.extend([(0, 2 * n), (n, 2 * n), (n - 1, 2 * n + 1)]);
    }
    pairs
}

/// Accumulates moment statistics of `(x, e)` samples.
#[derive(Debug, Clone)]
pub struct Accumulator {
    p: i64,
    count: usize,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    pair_sum: Vec<f64>,
    e_hist: Vec<u64>,
}

impl Accumulator {
    pub fn new(n: usize, m: usize, p: i64) -> Self {
        let pairs = correlation_pairs(n, m);
        Self {
            p,
            count: 0,
            sum: vec![0.0; m],
            sum_sq: vec![0.0; m],
            pair_sum: vec![0.0; pairs.len()],
            pairs,
            e_hist: vec![0; p as usize],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, x: &[i64], e: &[i64]) {
        self.count += 1;
        for (i, &v) in x.iter().enumerate() {
            let v = v as f64;
            self.sum[i] += v;
            self.sum_sq[i] += v * v;
        }
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            self.pair_sum[k] += x[a] as f64 * x[b] as f64;
        }
        for &ei in e {
            self.e_hist[ei.rem_euclid(self.p) as usize] += 1;
        }
    }

    fn mean_var(&self, i: usize) -> (f64, f64) {
        let n = self.count as f64;
        let mean = self.sum[i] / n;
        (mean, (self.sum_sq[i] / n - mean * mean) * n / (n - 1.0))
    }

    /// Largest relative deviation of a coordinate variance from `reference_std^2`.
    pub fn variance_check(&self, reference_std: f64) -> CheckResult {
        let target = reference_std * reference_std;
        let (mut worst, mut at) = (0.0f64, 0);
        for i in 0..self.sum.len() {
            let dev = (self.mean_var(i).1 / target - 1.0).abs();
            if dev > worst {
                worst = dev;
                at = i;
            }
        }
        CheckResult {
            name: "variance",
            passed: worst <= VARIANCE_TOLERANCE,
            observed: worst,
            threshold: VARIANCE_TOLERANCE,
            detail: format!("max |var/s^2 - 1| at coordinate {at}, s^2 = {target:.1}"),
        }
    }

    /// Largest `|mean| / standard error` over coordinates.
    pub fn mean_check(&self) -> CheckResult {
        let n = self.count as f64;
        let (mut worst, mut at) = (0.0f64, 0);
        for i in 0..self.sum.len() {
            let (mean, var) = self.mean_var(i);
            let z = mean.abs() / (var / n).sqrt();
            if z > worst {
                worst = z;
                at = i;
            }
        }
        CheckResult {
            name: "mean",
            passed: worst <= MEAN_SE_BOUND,
            observed: worst,
            threshold: MEAN_SE_BOUND,
            detail: format!("max |mean|/SE at coordinate {at}"),
        }
    }

    /// Chi-square of the pooled error histogram against `U(Z_p)`; `observed` is the p-value.
    pub fn uniformity_check(&self) -> CheckResult {
        let total: u64 = self.e_hist.iter().sum();
        let expected = total as f64 / self.p as f64;
        let stat: f64 = self.e_hist.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p_value = 1.0 - ChiSquared::new((self.p - 1) as f64).map(|d| d.cdf(stat)).unwrap_or(1.0);
        CheckResult {
            name: "e_uniformity",
            passed: p_value > CHI_SQUARE_ALPHA,
            observed: p_value,
            threshold: CHI_SQUARE_ALPHA,
            detail: format!("chi2 = {stat:.1} with {} dof over {total} error coordinates", self.p - 1),
        }
    }

    /// Largest `|rho|` over the tracked pairs, against `4 / sqrt(N)`.
    pub fn correlation_check(&self) -> CheckResult {
        let n = self.count as f64;
        let bound = CORRELATION_FACTOR / n.sqrt();
        let (mut worst, mut at) = (0.0f64, (0, 0));
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            let (ma, va) = self.mean_var(a);
            let (mb, vb) = self.mean_var(b);
            let cov = (self.pair_sum[k] / n - ma * mb) * n / (n - 1.0);
            let rho = (cov / (va * vb).sqrt()).abs();
            if rho > worst {
                worst = rho;
                at = (a, b);
            }
        }
        CheckResult {
            name: "correlation",
            passed: worst < bound,
            observed: worst,
            threshold: bound,
            detail: format!("max |rho| over {} pairs at {at:?}", self.pairs.len()),
        }
    }
}

/// Restarts per emitted signature.
pub fn restart_check(signatures: usize, restarts: usize) -> CheckResult {
    let rate = restarts as f64 / signatures as f64;
    CheckResult {
        name: "restart_rate",
        passed: (RESTART_RANGE.0..=RESTART_RANGE.1).contains(&rate),
        observed: rate,
        threshold: RESTART_RANGE.1,
        detail: format!("{restarts} restarts over {signatures} signatures; accepted range [{}, {}]", RESTART_RANGE.0, RESTART_RANGE.1),
    }
}

/// Sign `cfg.trials` messages and compare against the simulator.
pub fn run(sk: &dyn SecretKey, cfg: &StatConfig) -> Result<StatReport> {
    if cfg.trials < 2 {
        return Err(Error::InvalidParameter("stattest needs at least two trials".into()));
    }
    let params = sk.params();
    let n = params.n;
    let m = n * params.scheme.preimage_blocks();
    let mut acc = Accumulator::new(n, m, params.p);
    let mut restarts = 0usize;
    for i in 0..cfg.trials {
        let mut rng = ShakeRng::derive(&cfg.seed, i as u64);
        let msg = (i as u64).to_be_bytes();
        let mut done = false;
        for _ in 0..SIGN_ATTEMPT_GUARD {
            let a = sk.attempt(&msg, &mut rng)?;
            acc.push(&a.presample.x, &a.presample.e);
            if a.accepted {
                done = true;
                break;
            }
            restarts += 1;
        }
        if !done {
            return Err(Error::SigningExhausted { attempts: SIGN_ATTEMPT_GUARD });
        }
    }
    let reference_std = params.s * cfg.reference_scale;
    let checks = vec![
        acc.variance_check(reference_std),
        acc.mean_check(),
        acc.uniformity_check(),
        acc.correlation_check(),
        restart_check(cfg.trials, restarts),
    ];
    Ok(StatReport {
        version: REPORT_VERSION,
        paramset: params.name.clone(),
        trials: cfg.trials,
        attempts: acc.count(),
        restarts,
        reference_std,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
