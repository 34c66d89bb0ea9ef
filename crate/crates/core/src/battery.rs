//! Seeded statistical battery: sampler fit, challenge uniformity, real versus
//! simulated signature marginals, rejection rate, and the toy regularity check.

use std::fmt::Write as _;

use sha3::digest::{ExtendableOutput, Update};
use sha3::Shake128;

use crate::challenge::expand_challenge;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::sampler::{
    sample_ring_gaussian, sample_uniform_vector, sample_z_gaussian, GaussParams, RandomSource,
};
use crate::scheme::{open_commitment, sign_detailed, sign_keygen, ver_keygen, Simulator};
use crate::stats::{chi_squared_uniform, ks_one_sample_discrete, ks_two_sample, TestResult};

pub const SIGNIFICANCE: f64 = 0.001;
pub const MIN_SAMPLES: usize = 10_000;
/// Coefficients taken from each signature for the marginal comparisons.
const COEFFS_PER_SIGNATURE: usize = 1_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryEntry {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

impl BatteryEntry {
    fn new(name: &'static str, r: TestResult) -> Self {
        Self {
            name,
            statistic: r.statistic,
            p_value: r.p_value,
            pass: r.p_value > SIGNIFICANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryReport {
    pub profile: String,
    pub samples: usize,
    /// Width used for the commitment noise in Sign when it differs from `sigma_p`.
    pub sigma_sim_override: Option<f64>,
    pub entries: Vec<BatteryEntry>,
}

impl BatteryReport {
    pub fn entry(&self, name: &str) -> Option<&BatteryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "statistical battery (profile {}, {} samples, significance {SIGNIFICANCE})\n",
            self.profile, self.samples
        );
        if let Some(s) = self.sigma_sim_override {
            let _ = writeln!(
                out,
                "negative control: Sign noise width {s} instead of sigma_p"
            );
        }
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<20} stat={:<12.6} p={:<12.6e} {}",
                e.name,
                e.statistic,
                e.p_value,
                if e.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }

    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "stats.profile={}\nstats.samples={}\n",
            self.profile, self.samples
        );
        if let Some(s) = self.sigma_sim_override {
            let _ = writeln!(out, "stats.sigma_sim={s}");
        }
        for e in &self.entries {
            let _ = writeln!(out, "stats.{}.statistic={}", e.name, e.statistic);
            let _ = writeln!(out, "stats.{}.p_value={}", e.name, e.p_value);
            let _ = writeln!(
                out,
                "stats.{}.result={}",
                e.name,
                if e.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

/// Runs every test with `samples` draws each. `sigma_sim_override` replaces
/// the Sign noise width (the scheme uses `sigma_p`) for a negative control.
pub fn run_battery(
    pp: &Params,
    samples: usize,
    rng: &mut RandomSource,
    sigma_sim_override: Option<f64>,
) -> Result<BatteryReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "the battery needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let mut entries = vec![
        gaussian_fit(&mut rng.fork("battery/gauss"), samples)?,
        challenge_positions(pp, samples)?,
    ];
    let (z, e, rate) = sign_versus_simulate(
        pp,
        samples,
        &mut rng.fork("battery/nt"),
        sigma_sim_override.unwrap_or(pp.sigma_p),
    )?;
    entries.extend([z, e, rate]);
    entries.push(regularity_toy(
        &mut rng.fork("battery/regularity"),
        samples,
    )?);
    Ok(BatteryReport {
        profile: pp.spec.name.clone(),
        samples,
        sigma_sim_override,
        entries,
    })
}

/// One-sample KS of `D_{Z, 3.2}` draws against the exact truncated CDF.
pub fn gaussian_fit(rng: &mut RandomSource, samples: usize) -> Result<BatteryEntry> {
    let g = GaussParams::centered(3.2)?;
    let (lo, probs) = g.probabilities();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let draws: Vec<i64> = (0..samples).map(|_| sample_z_gaussian(rng, &g)).collect();
    let r = ks_one_sample_discrete(&draws, |x| {
        if x < lo {
            0.0
        } else {
            cdf.get((x - lo) as usize).copied().unwrap_or(1.0)
        }
    });
    Ok(BatteryEntry::new("gauss.ks", r))
}

/// Chi-squared uniformity of challenge positions over `samples` challenges.
pub fn challenge_positions(pp: &Params, samples: usize) -> Result<BatteryEntry> {
    let mut counts = vec![0u64; pp.n];
    for i in 0..samples as u64 {
        let mut h = Shake128::default();
        h.update(b"battery/challenge");
        h.update(&i.to_be_bytes());
        let c = expand_challenge(&mut h.finalize_xof(), pp.n, pp.q, pp.kappa)?;
        for (p, _) in c.positions() {
            counts[p] += 1;
        }
    }
    Ok(BatteryEntry::new(
        "challenge.chi2",
        chi_squared_uniform(&counts),
    ))
}

fn strided(coeffs: Vec<i64>, out: &mut Vec<f64>, want: usize) {
    let stride = (coeffs.len() / COEFFS_PER_SIGNATURE).max(1);
    out.extend(
        coeffs
            .into_iter()
            .step_by(stride)
            .take(want.saturating_sub(out.len()))
            .map(|c| c as f64),
    );
}

/// Two-sample KS on pooled coefficients of `z` and of the opened commitment
/// noise `e`, real signatures against simulated ones, plus the empirical
/// rejection-sampling acceptance rate of the real signer against `1/M`.
pub fn sign_versus_simulate(
    pp: &Params,
    samples: usize,
    rng: &mut RandomSource,
    sigma_sim: f64,
) -> Result<(BatteryEntry, BatteryEntry, BatteryEntry)> {
    let signer = sign_keygen(&mut rng.fork("signer"), pp)?;
    let verifier = ver_keygen(&mut rng.fork("verifier"), pp)?;
    let simulator = Simulator::new(pp, &verifier.secret, &verifier.public)?;
    let mut sign_rng = rng.fork("sign");
    let mut sim_rng = rng.fork("simulate");
    let (mut z_real, mut e_real) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    let (mut z_sim, mut e_sim) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    let (mut attempts, mut passed) = (0usize, 0usize);
    let mut i = 0u64;
    while z_real.len() < samples || z_sim.len() < samples {
        let mu = i.to_be_bytes();
        i += 1;
        let (sig, stats) =
            sign_detailed(&mut sign_rng, pp, &signer, &verifier.public, &mu, sigma_sim)?;
        attempts += stats.attempts;
        passed += stats.attempts - stats.rejected;
        let (_, e) = open_commitment(pp, &verifier.secret, &verifier.public, &sig.c0)?;
        strided(sig.z.centered_coeffs(), &mut z_real, samples);
        strided(e.centered_coeffs(), &mut e_real, samples);

        let fake = simulator.simulate(&mut sim_rng, &signer.public, &mu)?;
        let (_, e) = open_commitment(pp, &verifier.secret, &verifier.public, &fake.c0)?;
        strided(fake.z.centered_coeffs(), &mut z_sim, samples);
        strided(e.centered_coeffs(), &mut e_sim, samples);
    }
    let z = BatteryEntry::new("nt.z.ks", ks_two_sample(&z_real, &z_sim));
    let e = BatteryEntry::new("nt.e.ks", ks_two_sample(&e_real, &e_sim));
    Ok((z, e, acceptance_rate_entry(passed, attempts, pp.m)))
}

/// Two-sided normal approximation to the binomial test of `passed / attempts = 1/M`.
fn acceptance_rate_entry(passed: usize, attempts: usize, m: f64) -> BatteryEntry {
    let p0 = 1.0 / m;
    let rate = passed as f64 / attempts as f64;
    let se = (p0 * (1.0 - p0) / attempts as f64).sqrt();
    let zscore = (rate - p0) / se;
    BatteryEntry::new(
        "rejection.rate",
        TestResult {
            statistic: rate,
            p_value: libm::erfc(zscore.abs() / std::f64::consts::SQRT_2),
        },
    )
}

/// `a0^T r` over fresh Gaussian `r` at `n = 4, q = 16, l = 8` against the
/// uniform distribution on all `16^4` ring elements.
pub fn regularity_toy(rng: &mut RandomSource, samples: usize) -> Result<BatteryEntry> {
    let (n, q, l, sigma) = (4, 16u32, 8, 3.2);
    let a0 = sample_uniform_vector(rng, l, n, q);
    let mut counts = vec![0u64; 1 << 16];
    for _ in 0..samples {
        let r = sample_ring_gaussian(rng, n, q, sigma, l)?;
        let b = a0.inner_product(&r)?;
        let idx = b
            .coeffs()
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * 16 + c as usize);
        counts[idx] += 1;
    }
    Ok(BatteryEntry::new(
        "regularity.chi2",
        chi_squared_uniform(&counts),
    ))
}
