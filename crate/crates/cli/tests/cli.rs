use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SEED: &str = "0101010101010101010101010101010101010101010101010101010101010101";

fn lasdvs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lasdvs"))
        .args(args)
        .env_remove("LASDVS_SEED")
        .output()
        .expect("spawn lasdvs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

struct Setup {
    dir: TempDir,
    profile: &'static str,
}

impl Setup {
    fn new(profile: &'static str) -> Self {
        let dir = TempDir::new().unwrap();
        let s = Self { dir, profile };
        for role in ["signer", "verifier"] {
            let out = lasdvs(&[
                "--profile",
                profile,
                "--seed",
                SEED,
                "keygen",
                role,
                "--out",
                &s.path(role),
            ]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        }
        fs::write(s.dir.path().join("msg"), b"attack at dawn").unwrap();
        s
    }

    fn path(&self, name: &str) -> String {
        p(self.dir.path(), name)
    }

    fn sign(&self, out: &str, extra: &[&str]) -> Output {
        let mut args = vec!["--profile", self.profile, "--seed", SEED, "sign"];
        let (sk, pk, vpk, msg, out) = (
            self.path("signer.sk"),
            self.path("signer.pk"),
            self.path("verifier.pk"),
            self.path("msg"),
            self.path(out),
        );
        args.extend([
            "--sk", &sk, "--pk", &pk, "--vpk", &vpk, "--in", &msg, "--out", &out,
        ]);
        args.extend(extra);
        lasdvs(&args)
    }

    fn simulate(&self, out: &str) -> Output {
        lasdvs(&[
            "--profile",
            self.profile,
            "--seed",
            SEED,
            "simulate",
            "--vsk",
            &self.path("verifier.sk"),
            "--pk",
            &self.path("signer.pk"),
            "--vpk",
            &self.path("verifier.pk"),
            "--in",
            &self.path("msg"),
            "--out",
            &self.path(out),
        ])
    }

    fn verify_with(&self, profile: &str, vsk: &str, msg: &str, sig: &str) -> Output {
        lasdvs(&[
            "--profile",
            profile,
            "verify",
            "--vsk",
            vsk,
            "--pk",
            &self.path("signer.pk"),
            "--vpk",
            &self.path("verifier.pk"),
            "--in",
            msg,
            "--sig",
            sig,
        ])
    }

    fn verify(&self, sig: &str) -> Output {
        self.verify_with(
            self.profile,
            &self.path("verifier.sk"),
            &self.path("msg"),
            &self.path(sig),
        )
    }
}

#[test]
fn sign_then_verify_accepts() {
    let s = Setup::new("toy");
    let out = s.sign("sig", &[]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("attempts="));
    let out = s.verify("sig");
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ACCEPT");

    assert_eq!(code(&s.sign("dense", &["--dense"])), 0);
    assert_eq!(code(&s.verify("dense")), 0);
    let (sparse, dense) = (
        fs::metadata(s.path("sig")).unwrap().len(),
        fs::metadata(s.path("dense")).unwrap().len(),
    );
    assert!(sparse < dense);
}

#[test]
fn simulate_then_verify_accepts() {
    let s = Setup::new("toy");
    assert_eq!(code(&s.simulate("sim")), 0);
    let out = s.verify("sim");
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ACCEPT");
}

#[test]
fn desk_round_trip() {
    let s = Setup::new("desk");
    assert_eq!(code(&s.sign("sig", &[])), 0);
    assert_eq!(code(&s.verify("sig")), 0);
    assert_eq!(code(&s.simulate("sim")), 0);
    assert_eq!(code(&s.verify("sim")), 0);
}

#[test]
fn tampered_message_rejects() {
    let s = Setup::new("toy");
    assert_eq!(code(&s.sign("sig", &[])), 0);
    let other = s.path("other");
    fs::write(&other, b"attack at dusk").unwrap();
    let out = s.verify_with("toy", &s.path("verifier.sk"), &other, &s.path("sig"));
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("REJECT"));
}

#[test]
fn truncated_signature_is_malformed() {
    let s = Setup::new("toy");
    assert_eq!(code(&s.sign("sig", &[])), 0);
    let bytes = fs::read(s.path("sig")).unwrap();
    fs::write(s.path("short"), &bytes[..bytes.len() - 1]).unwrap();
    assert_eq!(code(&s.verify("short")), 2);
    fs::write(s.path("empty"), b"").unwrap();
    assert_eq!(code(&s.verify("empty")), 2);
}

#[test]
fn mixed_profiles_are_rejected_with_exit_2() {
    let toy = Setup::new("toy");
    let desk = Setup::new("desk");
    assert_eq!(code(&toy.sign("sig", &[])), 0);
    // Verifier secret from desk with everything else from toy.
    let out = toy.verify_with(
        "toy",
        &desk.path("verifier.sk"),
        &toy.path("msg"),
        &toy.path("sig"),
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatch"));
    // Toy files read under the desk profile.
    let out = toy.verify_with(
        "desk",
        &toy.path("verifier.sk"),
        &toy.path("msg"),
        &toy.path("sig"),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn keygen_is_deterministic_under_a_seed() {
    let a = Setup::new("toy");
    let b = Setup::new("toy");
    for f in ["signer.pk", "signer.sk", "verifier.pk", "verifier.sk"] {
        assert_eq!(
            fs::read(a.path(f)).unwrap(),
            fs::read(b.path(f)).unwrap(),
            "{f}"
        );
    }
    assert_eq!(code(&a.sign("sig", &[])), 0);
    assert_eq!(code(&b.sign("sig", &[])), 0);
    assert_eq!(
        fs::read(a.path("sig")).unwrap(),
        fs::read(b.path("sig")).unwrap()
    );
}

#[test]
fn seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_lasdvs"))
            .args([
                "--profile",
                "toy",
                "keygen",
                "signer",
                "--out",
                &p(dir.path(), name),
            ])
            .env("LASDVS_SEED", SEED)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        fs::read(dir.path().join(format!("{name}.pk"))).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn keygen_into_missing_directory_fails() {
    let dir = TempDir::new().unwrap();
    let target: PathBuf = dir.path().join("no/such/dir/key");
    let out = lasdvs(&[
        "--profile",
        "toy",
        "keygen",
        "signer",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_ne!(code(&out), 0);
}

#[test]
fn verifier_key_sizes_match_size_report() {
    let s = Setup::new("toy");
    let out = lasdvs(&["--profile", "toy", "--seed", SEED, "--format", "kv", "size"]);
    assert_eq!(code(&out), 0);
    let kv = String::from_utf8(out.stdout).unwrap();
    let header: u64 = kv_value(&kv, "size.header_bytes");
    let bits: u64 = kv_value(&kv, "size.sk_V.measured_bits");
    let len = fs::metadata(s.path("verifier.sk")).unwrap().len();
    assert_eq!(len, header + bits.div_ceil(8));
}

fn kv_value(kv: &str, key: &str) -> u64 {
    kv.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("{key} missing from\n{kv}"))
        .parse()
        .unwrap()
}

#[test]
fn params_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let params = p(dir.path(), "pp");
    assert_eq!(
        code(&lasdvs(&["--profile", "toy", "setup", "--out", &params])),
        0
    );
    let key = p(dir.path(), "k");
    let out = lasdvs(&[
        "--params", &params, "--seed", SEED, "keygen", "signer", "--out", &key,
    ]);
    assert_eq!(code(&out), 0);
    // Standard toy params and the written file share a fingerprint.
    let std_key = p(dir.path(), "s");
    assert_eq!(
        code(&lasdvs(&[
            "--profile",
            "toy",
            "--seed",
            SEED,
            "keygen",
            "signer",
            "--out",
            &std_key
        ])),
        0
    );
    assert_eq!(
        fs::read(format!("{key}.pk")).unwrap(),
        fs::read(format!("{std_key}.pk")).unwrap()
    );
}

#[test]
fn stats_is_seeded_and_negative_control_fails() {
    let run = |extra: &[&str]| {
        let mut args = vec![
            "--profile",
            "toy",
            "--seed",
            SEED,
            "--format",
            "kv",
            "stats",
            "--samples",
            "10000",
        ];
        args.extend(extra);
        lasdvs(&args)
    };
    let (a, b) = (run(&[]), run(&[]));
    assert_eq!(a.stdout, b.stdout);
    let neg = run(&["--negative-control"]);
    assert_eq!(code(&neg), 1);
    assert!(String::from_utf8_lossy(&neg.stdout).contains("stats.nt.e.ks.result=FAIL"));
}

#[test]
fn bench_reports_all_sections() {
    let out = lasdvs(&[
        "--profile",
        "toy",
        "--seed",
        SEED,
        "--format",
        "kv",
        "bench",
        "--trials",
        "200",
    ]);
    assert_eq!(code(&out), 0);
    let kv = String::from_utf8(out.stdout).unwrap();
    for key in [
        "keygen_signer",
        "keygen_verifier",
        "sign",
        "verify",
        "simulate",
    ] {
        assert!(kv.contains(&format!("bench.{key}.median_ms=")), "{key}");
    }
    assert!(kv.contains("bench.restart_rate="));
    assert_eq!(kv_value(&kv, "bench.verified"), 400);
    assert!(!kv.contains("FAIL"));
    assert_ne!(
        code(&lasdvs(&["--profile", "toy", "bench", "--trials", "0"])),
        0
    );
}

#[test]
fn unknown_profile_and_bad_seed_fail() {
    assert_eq!(code(&lasdvs(&["--profile", "huge", "size"])), 2);
    assert_eq!(
        code(&lasdvs(&["--profile", "toy", "--seed", "abc", "size"])),
        2
    );
}
