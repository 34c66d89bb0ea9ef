//! Wall-clock benchmark of the protocol operations.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use lasdvs_core::codec::SizeReport;
use lasdvs_core::sampler::RandomSource;
use lasdvs_core::{sign_detailed, sign_keygen, ver_keygen, verify, Params, Result, Simulator};

/// Allowed distance between the measured restart rate and `1 - 1/M`.
const RATE_TOLERANCE: f64 = 0.05;

pub struct BenchReport {
    profile: String,
    trials: usize,
    medians: Vec<(&'static str, Duration)>,
    restart_rate: f64,
    expected_restart_rate: f64,
    verified: usize,
    size: SizeReport,
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn timed<T>(samples: &mut Vec<Duration>, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    samples.push(start.elapsed());
    out
}

pub fn run(pp: &Params, trials: usize, rng: &mut RandomSource) -> Result<BenchReport> {
    let mut rng = rng.fork("bench");
    let names = [
        "keygen_signer",
        "keygen_verifier",
        "sign",
        "verify",
        "simulate",
    ];
    let mut times: Vec<Vec<Duration>> = vec![Vec::with_capacity(trials); names.len()];
    let (mut attempts, mut restarts, mut verified) = (0usize, 0usize, 0usize);
    for i in 0..trials {
        let mu = (i as u64).to_be_bytes();
        let signer = timed(&mut times[0], || sign_keygen(&mut rng, pp))?;
        let verifier = timed(&mut times[1], || ver_keygen(&mut rng, pp))?;
        let (sig, stats) = timed(&mut times[2], || {
            sign_detailed(&mut rng, pp, &signer, &verifier.public, &mu, pp.sigma_p)
        })?;
        attempts += stats.attempts;
        restarts += stats.attempts - 1;
        let ok = timed(&mut times[3], || {
            verify(
                pp,
                &verifier.secret,
                &signer.public,
                &verifier.public,
                &sig,
                &mu,
            )
        });
        let simulator = Simulator::new(pp, &verifier.secret, &verifier.public)?;
        let fake = timed(&mut times[4], || {
            simulator.simulate(&mut rng, &signer.public, &mu)
        })?;
        let ok_fake = verify(
            pp,
            &verifier.secret,
            &signer.public,
            &verifier.public,
            &fake,
            &mu,
        );
        verified += ok as usize + ok_fake as usize;
    }
    Ok(BenchReport {
        profile: pp.spec.name.clone(),
        trials,
        medians: names
            .iter()
            .copied()
            .zip(times.into_iter().map(median))
            .collect(),
        restart_rate: restarts as f64 / attempts as f64,
        expected_restart_rate: 1.0 - 1.0 / pp.m,
        verified,
        size: SizeReport::measure(pp, &mut rng.fork("bench/size"))?,
    })
}

impl BenchReport {
    fn rate_ok(&self) -> bool {
        (self.restart_rate - self.expected_restart_rate).abs() <= RATE_TOLERANCE
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("bench (profile {}, {} trials)\n", self.profile, self.trials);
        for (name, d) in &self.medians {
            let _ = writeln!(out, "{name:<16} median {:>10.3} ms", d.as_secs_f64() * 1e3);
        }
        let _ = writeln!(
            out,
            "restart rate {:.4} (expected {:.4} +- {RATE_TOLERANCE}) {}",
            self.restart_rate,
            self.expected_restart_rate,
            if self.rate_ok() { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(out, "verified {}/{}", self.verified, 2 * self.trials);
        out.push_str(&self.size.to_text());
        out
    }

    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "bench.profile={}\nbench.trials={}\n",
            self.profile, self.trials
        );
        for (name, d) in &self.medians {
            let _ = writeln!(out, "bench.{name}.median_ms={:.6}", d.as_secs_f64() * 1e3);
        }
        let _ = writeln!(out, "bench.restart_rate={}", self.restart_rate);
        let _ = writeln!(
            out,
            "bench.restart_rate.expected={}",
            self.expected_restart_rate
        );
        let _ = writeln!(
            out,
            "bench.restart_rate.result={}",
            if self.rate_ok() { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(out, "bench.verified={}", self.verified);
        out.push_str(&self.size.to_kv());
        out
    }
}
