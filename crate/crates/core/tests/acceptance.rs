//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use lasdvs_core::battery::{regularity_toy, run_battery, sign_versus_simulate, SIGNIFICANCE};
use lasdvs_core::codec::{self, ChallengeLayout, SizeReport, HEADER_LEN};
use lasdvs_core::gadget::{
    gadget_decode, ring_gen_trap_fresh, ring_invert, trapdoor_identity_holds, GadgetVector,
    PreimageSampler, TaggedPublicVector, TrapdoorMatrix,
};
use lasdvs_core::ring::{coeff_bits, RingElement, RingVector};
use lasdvs_core::sampler::{
    sample_ring_gaussian, sample_uniform_ring, sample_uniform_vector, RandomSource,
};
use lasdvs_core::stats::ks_one_sample_discrete;
use lasdvs_core::{
    open_commitment, sign_detailed, sign_keygen, simulate, ver_keygen, verify, Params, ProfileSpec,
    Simulator,
};

type Outcome = (bool, String);

fn seeded(label: &str) -> RandomSource {
    RandomSource::from_seed([0x5a; 32]).fork(label)
}

fn toy() -> Params {
    Params::standard(ProfileSpec::toy()).unwrap()
}

fn desk() -> Params {
    Params::standard(ProfileSpec::desk()).unwrap()
}

fn completeness() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for pp in [toy(), desk()] {
        let name = pp.spec.name.clone();
        let mut rng = seeded(&format!("completeness/{name}"));
        let signer = sign_keygen(&mut rng, &pp).unwrap();
        let verifier = ver_keygen(&mut rng, &pp).unwrap();
        let simulator = Simulator::new(&pp, &verifier.secret, &verifier.public).unwrap();
        let (mut real, mut fake) = (0, 0);
        for i in 0..10_000u32 {
            let mu = format!("message {i}");
            let (sig, _) = sign_detailed(
                &mut rng,
                &pp,
                &signer,
                &verifier.public,
                mu.as_bytes(),
                pp.sigma_p,
            )
            .unwrap();
            real += verify(
                &pp,
                &verifier.secret,
                &signer.public,
                &verifier.public,
                &sig,
                mu.as_bytes(),
            ) as usize;
            let sig = simulator
                .simulate(&mut rng, &signer.public, mu.as_bytes())
                .unwrap();
            fake += verify(
                &pp,
                &verifier.secret,
                &signer.public,
                &verifier.public,
                &sig,
                mu.as_bytes(),
            ) as usize;
        }
        ok &= real == 10_000 && fake == 10_000;
        detail.push(format!("{name}: sign {real}/10000, simulate {fake}/10000"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= 600.0;
    detail.push(format!("{secs:.1} s"));
    (ok, detail.join("; "))
}

fn trapdoor_identity() -> Outcome {
    let pp = desk();
    let mut rng = seeded("identity");
    let one = RingElement::one(pp.n, pp.q);
    let mut held = 0;
    for _ in 0..1_000 {
        let (a, r) = ring_gen_trap_fresh(&mut rng, pp.n, pp.q, pp.l, &one, pp.sigma_e).unwrap();
        held += trapdoor_identity_holds(&a, &r) as usize;
    }
    (held == 1_000, format!("{held}/1000 identities at desk"))
}

/// `(a0, g)` with the all-zero trapdoor block, the only trapdoor under which
/// every error of infinity norm 1 stays inside the decoding radius at q = 8.
fn zero_trapdoor(
    rng: &mut RandomSource,
    n: usize,
    q: u32,
    l: usize,
) -> (TaggedPublicVector, TrapdoorMatrix) {
    let g = GadgetVector::for_modulus(q).unwrap();
    let a0 = sample_uniform_vector(rng, l, n, q);
    let a = a0.concat(&g.as_ring_vector(n, q)).unwrap();
    let rows = vec![vec![RingElement::zero(n, q); g.len()]; l];
    (
        TaggedPublicVector::new(a, l).unwrap(),
        TrapdoorMatrix::new(rows, RingElement::one(n, q)).unwrap(),
    )
}

fn ternary_vectors(len: usize, n: usize, q: u32) -> Vec<RingVector> {
    (0..3usize.pow((len * n) as u32))
        .map(|mut idx| {
            let coeffs: Vec<i64> = (0..len * n)
                .map(|_| {
                    let c = (idx % 3) as i64 - 1;
                    idx /= 3;
                    c
                })
                .collect();
            RingVector::new(
                coeffs
                    .chunks(n)
                    .map(|c| RingElement::from_signed(q, c).unwrap())
                    .collect(),
            )
            .unwrap()
        })
        .collect()
}

fn inversion() -> Outcome {
    let pp = desk();
    let mut rng = seeded("inversion");
    let one = RingElement::one(pp.n, pp.q);
    let mut recovered = 0;
    for _ in 0..10 {
        let (a, r) = ring_gen_trap_fresh(&mut rng, pp.n, pp.q, pp.l, &one, pp.sigma_e).unwrap();
        for _ in 0..1_000 {
            let s = sample_uniform_ring(&mut rng, pp.n, pp.q);
            let e = sample_ring_gaussian(&mut rng, pp.n, pp.q, pp.sigma_p, pp.width()).unwrap();
            let b = a.vector().scalar_mul(&s).unwrap().checked_add(&e).unwrap();
            if ring_invert(&r, &a, &b).ok() == Some((s, e)) {
                recovered += 1;
            }
        }
    }

    let (n, q, l) = (2, 8u32, 1);
    let (a, r) = zero_trapdoor(&mut rng, n, q, l);
    let g = GadgetVector::for_modulus(q).unwrap().as_ring_vector(n, q);
    let (full, gadget_only) = (ternary_vectors(l + 3, n, q), ternary_vectors(3, n, q));
    let (mut exhaustive, mut decoded, mut total) = (0usize, 0usize, 0usize);
    for s0 in 0..8 {
        for s1 in 0..8 {
            let s = RingElement::from_signed(q, &[s0, s1]).unwrap();
            let b0 = a.vector().scalar_mul(&s).unwrap();
            for e in &full {
                total += 1;
                let b = b0.checked_add(e).unwrap();
                exhaustive +=
                    (ring_invert(&r, &a, &b).ok() == Some((s.clone(), e.clone()))) as usize;
            }
            let gs = g.scalar_mul(&s).unwrap();
            for e in &gadget_only {
                let b = gs.checked_add(e).unwrap();
                decoded += (gadget_decode(&b).ok() == Some((s.clone(), e.clone()))) as usize;
            }
        }
    }
    let ok = recovered == 10_000 && exhaustive == total && decoded == 64 * gadget_only.len();
    (
        ok,
        format!(
            "desk {recovered}/10000; n=2 q=8 ring_invert {exhaustive}/{total}, gadget decode {decoded}/{}",
            64 * gadget_only.len()
        ),
    )
}

/// Exact CDF of `D_{Z, sigma}` with `rho(x) = exp(-pi x^2 / sigma^2)`.
fn gaussian_cdf(sigma: f64) -> (i64, Vec<f64>) {
    let bound = (14.0 * sigma / (2.0 * std::f64::consts::PI).sqrt()).ceil() as i64;
    let weights: Vec<f64> = (-bound..=bound)
        .map(|x| (-std::f64::consts::PI * (x * x) as f64 / (sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let cdf = weights
        .into_iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect();
    (-bound, cdf)
}

fn preimage_sampling() -> Outcome {
    let pp = desk();
    let mut rng = seeded("preimage");
    let verifier = ver_keygen(&mut rng, &pp).unwrap();
    let sampler = PreimageSampler::new(
        &verifier.secret.r1,
        &verifier.public.b1,
        pp.preimage_widths(),
    )
    .unwrap();
    let per = 10;
    let mut hits = 0;
    let mut coeffs = Vec::with_capacity(10_000 * per);
    for i in 0..10_000usize {
        let u = sample_uniform_ring(&mut rng, pp.n, pp.q);
        let x = sampler.sample(&mut rng, &u).unwrap();
        hits += (verifier.public.b1.vector().inner_product(&x).unwrap() == u) as usize;
        let c = x.centered_coeffs();
        let stride = c.len() / per;
        coeffs.extend((0..per).map(|j| c[(j * stride + i) % c.len()]));
    }
    let (lo, cdf) = gaussian_cdf(pp.sigma_p);
    let ks = ks_one_sample_discrete(&coeffs, |x| {
        if x < lo {
            0.0
        } else {
            cdf.get((x - lo) as usize).copied().unwrap_or(1.0)
        }
    });
    (
        hits == 10_000 && ks.p_value > SIGNIFICANCE,
        format!(
            "syndromes {hits}/10000; KS vs D_sigma_p over {} coefficients D={:.5} p={:.4}",
            coeffs.len(),
            ks.statistic,
            ks.p_value
        ),
    )
}

/// Flips bit `bit` of the signature region starting at byte `start` of length `len`.
fn flip(bytes: &[u8], start: usize, len: usize, bit: usize) -> Vec<u8> {
    let mut out = bytes.to_vec();
    let bit = bit % (len * 8);
    out[start + bit / 8] ^= 1 << (bit % 8);
    out
}

fn tamper() -> Outcome {
    let pp = desk();
    let mut rng = seeded("tamper");
    let signer = sign_keygen(&mut rng, &pp).unwrap();
    let verifier = ver_keygen(&mut rng, &pp).unwrap();
    let logq = coeff_bits(pp.q);
    let c0_bits = pp.width() * pp.n * logq;
    let c1_bits = pp.kappa * (ceil_log2(pp.n) + 1);
    assert!(c0_bits.is_multiple_of(8) && c1_bits.is_multiple_of(8));
    let regions = [
        ("c0", HEADER_LEN, c0_bits / 8),
        ("c1", HEADER_LEN + c0_bits / 8, c1_bits / 8),
        (
            "z",
            HEADER_LEN + (c0_bits + c1_bits) / 8,
            pp.width() * pp.n * logq / 8,
        ),
    ];
    let accepts = |bytes: &[u8], mu: &[u8]| match codec::decode_signature(&pp, bytes) {
        Ok(sig) => verify(
            &pp,
            &verifier.secret,
            &signer.public,
            &verifier.public,
            &sig,
            mu,
        ),
        Err(_) => false,
    };
    let mut counts = [0usize; 4];
    let mut accepted = [0usize; 4];
    for i in 0..100usize {
        let mu = format!("tamper {i}").into_bytes();
        let sig = simulate_or_sign(&mut rng, &pp, &signer, &verifier, &mu, i % 2 == 0);
        let bytes = codec::encode_signature(&pp, &sig, ChallengeLayout::Sparse);
        assert!(accepts(&bytes, &mu));
        assert_eq!(bytes.len(), regions[2].1 + regions[2].2);
        for j in 0..10 {
            let bit = rng.uniform_below(u32::MAX) as usize;
            for (slot, &(_, start, len)) in regions.iter().enumerate() {
                counts[slot] += 1;
                accepted[slot] += accepts(&flip(&bytes, start, len, bit + j), &mu) as usize;
            }
            let mut m = mu.clone();
            let at = bit % m.len();
            m[at] ^= 1 << (j % 8);
            counts[3] += 1;
            accepted[3] += accepts(&bytes, &m) as usize;
        }
    }
    let names = ["c0", "c1", "z", "mu"];
    let detail: Vec<String> = names
        .iter()
        .zip(counts.iter().zip(&accepted))
        .map(|(n, (c, a))| format!("{n} {a}/{c} accepted"))
        .collect();
    (
        counts.iter().all(|&c| c == 1_000) && accepted.iter().all(|&a| a == 0),
        detail.join(", "),
    )
}

fn simulate_or_sign(
    rng: &mut RandomSource,
    pp: &Params,
    signer: &lasdvs_core::SignerKeyPair,
    verifier: &lasdvs_core::VerifierKeyPair,
    mu: &[u8],
    real: bool,
) -> lasdvs_core::Signature {
    if real {
        sign_detailed(rng, pp, signer, &verifier.public, mu, pp.sigma_p)
            .unwrap()
            .0
    } else {
        simulate(
            rng,
            pp,
            &verifier.secret,
            &signer.public,
            &verifier.public,
            mu,
        )
        .unwrap()
    }
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn rejection_rate() -> Outcome {
    let pp = desk();
    let mut rng = seeded("rate");
    let signer = sign_keygen(&mut rng, &pp).unwrap();
    let verifier = ver_keygen(&mut rng, &pp).unwrap();
    let (mut attempts, mut passed, mut i) = (0usize, 0usize, 0u64);
    while attempts < 10_000 {
        let (_, stats) = sign_detailed(
            &mut rng,
            &pp,
            &signer,
            &verifier.public,
            &i.to_be_bytes(),
            pp.sigma_p,
        )
        .unwrap();
        attempts += stats.attempts;
        passed += stats.attempts - stats.rejected;
        i += 1;
    }
    let rate = passed as f64 / attempts as f64;
    let target = 1.0 / pp.m;
    (
        (rate - target).abs() <= 0.02,
        format!("acceptance {rate:.4} over {attempts} attempts, 1/M = {target:.4}"),
    )
}

fn non_transferability() -> Outcome {
    let pp = desk();
    let (z, e, _) = sign_versus_simulate(&pp, 100_000, &mut seeded("nt"), pp.sigma_p).unwrap();
    let (nz, ne, _) = sign_versus_simulate(&pp, 100_000, &mut seeded("nt"), pp.sigma_e).unwrap();
    let control_fails = !ne.pass || !nz.pass;
    (
        z.pass && e.pass && control_fails,
        format!(
            "z p={:.4}, e p={:.4}; negative control (sigma_sim = sigma_e) z p={:.3e}, e p={:.3e}",
            z.p_value, e.p_value, nz.p_value, ne.p_value
        ),
    )
}

fn sizes() -> Outcome {
    let pp = desk();
    let report = SizeReport::measure(&pp, &mut seeded("size/desk")).unwrap();
    let (n, l, k, logq) = (pp.n, pp.l, pp.k, coeff_bits(pp.q));
    let secret_bits = (2 * pp.d as usize + 1).next_power_of_two().trailing_zeros() as usize;
    let expected = [
        (report.sk_s_bits, (l + k) * secret_bits),
        (report.sk_v_bits, 2 * (l * k) * (n * logq)),
        (report.sig_dense_bits, 2 * (l + k) * n * logq + n * logq),
    ];
    let exact = expected.iter().all(|&(m, f)| m == f) && report.files_consistent;
    let wide = Params::standard(ProfileSpec::wide()).unwrap();
    let wide_report = SizeReport::measure(&wide, &mut seeded("size/wide")).unwrap();
    let ratio = wide_report.sig_dense_bits as f64 / report.sig_dense_bits as f64;
    (
        exact && (ratio - 2.0).abs() <= 0.01,
        format!(
            "sk_S {} sk_V {} sig {} bits (formulas {} {} {}); sparse sig {} bits; n 128->256 ratio {ratio:.4}",
            report.sk_s_bits,
            report.sk_v_bits,
            report.sig_dense_bits,
            expected[0].1,
            expected[1].1,
            expected[2].1,
            report.sig_sparse_bits
        ),
    )
}

fn regularity() -> Outcome {
    let entry = regularity_toy(&mut seeded("regularity"), 100_000).unwrap();
    (
        entry.pass,
        format!(
            "chi2 over 16^4 bins = {:.1}, p={:.4}",
            entry.statistic, entry.p_value
        ),
    )
}

fn run_once(seed: [u8; 32]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for pp in [toy(), desk()] {
        let mut rng = RandomSource::from_seed(seed);
        let signer = sign_keygen(&mut rng.fork("signer"), &pp).unwrap();
        let verifier = ver_keygen(&mut rng.fork("verifier"), &pp).unwrap();
        let mut srng = rng.fork("sign");
        let sig = simulate_or_sign(&mut srng, &pp, &signer, &verifier, b"determinism", true);
        let fake = simulate_or_sign(&mut srng, &pp, &signer, &verifier, b"determinism", false);
        out.push(codec::encode_signer_public(&pp, &signer.public));
        out.push(codec::encode_signer_secret(&pp, &signer.secret).unwrap());
        out.push(codec::encode_verifier_public(&pp, &verifier.public));
        out.push(codec::encode_verifier_secret(&pp, &verifier.secret).unwrap());
        out.push(codec::encode_signature(&pp, &sig, ChallengeLayout::Sparse));
        out.push(codec::encode_signature(&pp, &fake, ChallengeLayout::Dense));
        let (s, e) = open_commitment(&pp, &verifier.secret, &verifier.public, &sig.c0).unwrap();
        out.push([s.to_bytes(), e.to_bytes()].concat());
    }
    let report = run_battery(&toy(), 10_000, &mut RandomSource::from_seed(seed), None).unwrap();
    out.push(report.to_kv().into_bytes());
    out
}

fn determinism() -> Outcome {
    let first = run_once([7; 32]);
    let second = run_once([7; 32]);
    let other = run_once([8; 32]);
    let same = first == second;
    let differs = first.iter().zip(&other).filter(|(a, b)| a != b).count();
    (
        same && differs == first.len(),
        format!(
            "{} artifacts identical across runs: {same}; {differs}/{} differ under another seed",
            first.len(),
            first.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("completeness", completeness),
        ("trapdoor identity", trapdoor_identity),
        ("inversion", inversion),
        ("preimage sampling", preimage_sampling),
        ("tamper rejection", tamper),
        ("rejection-sampling rate", rejection_rate),
        ("non-transferability", non_transferability),
        ("size formulas", sizes),
        ("regularity", regularity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += !ok as usize;
        println!(
            "acceptance {:>2} {:<24} {} ({detail}) [{:.1} s]",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
