//! `lasdvs`: key generation, signing, simulation, verification, size and
//! statistics reports for the designated-verifier signature scheme.

mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lasdvs_core::battery::run_battery;
use lasdvs_core::codec::{self, ChallengeLayout, SizeReport};
use lasdvs_core::sampler::RandomSource;
use lasdvs_core::{
    sign_detailed, sign_keygen, ver_keygen, verify_detailed, Error, Params, ProfileSpec, Simulator,
};

const EXIT_REJECT: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "lasdvs",
    version,
    about = "Lattice-based strong designated-verifier signatures"
)]
struct Cli {
    /// Parameter profile: toy, desk, wide, or custom:<file>.
    #[arg(long, global = true, default_value = "desk")]
    profile: String,

    /// Parameter file written by `setup`; overrides --profile.
    #[arg(long, global = true)]
    params: Option<PathBuf>,

    /// 64 hex characters; system entropy when absent.
    #[arg(long, global = true, env = "LASDVS_SEED")]
    seed: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Role {
    Signer,
    Verifier,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a parameter file. With --seed the public vector is freshly
    /// sampled; otherwise the profile's standard vector is used.
    Setup {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a key pair, writing <out>.pk and <out>.sk.
    Keygen {
        #[arg(value_enum)]
        role: Role,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a message file.
    Sign {
        /// Signer secret key.
        #[arg(long)]
        sk: PathBuf,
        /// Signer public key.
        #[arg(long)]
        pk: PathBuf,
        /// Verifier public key.
        #[arg(long)]
        vpk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Store the challenge as a full ring element.
        #[arg(long)]
        dense: bool,
    },
    /// Produce a simulated signature with the verifier's secret key.
    Simulate {
        #[arg(long)]
        vsk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        vpk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dense: bool,
    },
    /// Check a signature; exit 0 on ACCEPT, 1 on REJECT, 2 on malformed input.
    Verify {
        #[arg(long)]
        vsk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        vpk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Measured versus closed-form artifact sizes.
    Size,
    /// Timings, rejection rate and size report.
    Bench {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Statistical battery.
    Stats {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Sign with commitment noise of width sigma_e instead of sigma_p;
        /// the real-versus-simulated noise test is expected to fail.
        #[arg(long)]
        negative_control: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn load_params(cli: &Cli) -> CliResult<Params> {
    if let Some(path) = &cli.params {
        return Ok(codec::decode_params(&read(path)?)?);
    }
    let spec = match cli.profile.strip_prefix("custom:") {
        Some(file) => {
            let path = Path::new(file);
            let text = String::from_utf8(read(path)?)
                .map_err(|_| Error::InvalidParameter("profile file is not UTF-8".into()))?;
            ProfileSpec::parse_custom(&text)?
        }
        None => ProfileSpec::by_name(&cli.profile)?,
    };
    Ok(Params::standard(spec)?)
}

fn rng(cli: &Cli) -> CliResult<RandomSource> {
    Ok(match &cli.seed {
        Some(hex) => RandomSource::from_hex(hex)?,
        None => RandomSource::from_entropy()?,
    })
}

fn layout(dense: bool) -> ChallengeLayout {
    if dense {
        ChallengeLayout::Dense
    } else {
        ChallengeLayout::Sparse
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Setup { out } => {
            let pp = match &cli.seed {
                Some(_) => {
                    let spec = load_params(cli)?.spec;
                    Params::setup(spec, &mut rng(cli)?.fork("setup"))?
                }
                None => load_params(cli)?,
            };
            let bytes = codec::encode_params(&pp);
            write(out, &bytes)?;
            println!("{pp}");
            println!(
                "params fingerprint {}",
                hex::encode(codec::fingerprint(&pp))
            );
        }
        Command::Keygen { role, out } => {
            let pp = load_params(cli)?;
            let mut rng = rng(cli)?;
            let (pk, sk) = match role {
                Role::Signer => {
                    let kp = sign_keygen(&mut rng.fork("keygen/signer"), &pp)?;
                    (
                        codec::encode_signer_public(&pp, &kp.public),
                        codec::encode_signer_secret(&pp, &kp.secret)?,
                    )
                }
                Role::Verifier => {
                    let kp = ver_keygen(&mut rng.fork("keygen/verifier"), &pp)?;
                    (
                        codec::encode_verifier_public(&pp, &kp.public),
                        codec::encode_verifier_secret(&pp, &kp.secret)?,
                    )
                }
            };
            let (pk_path, sk_path) = (with_extension(out, "pk"), with_extension(out, "sk"));
            write(&pk_path, &pk)?;
            write(&sk_path, &sk)?;
            println!(
                "{} ({} bytes) fingerprint {}",
                pk_path.display(),
                pk.len(),
                hex::encode(codec::short_fingerprint(&pk))
            );
            println!("{} ({} bytes)", sk_path.display(), sk.len());
        }
        Command::Sign {
            sk,
            pk,
            vpk,
            input,
            out,
            dense,
        } => {
            let pp = load_params(cli)?;
            let signer = lasdvs_core::SignerKeyPair {
                secret: codec::decode_signer_secret(&pp, &read(sk)?)?,
                public: codec::decode_signer_public(&pp, &read(pk)?)?,
            };
            if pp.a.inner_product(&signer.secret.s)? != signer.public.t {
                return Err(Error::InvalidParameter(
                    "signer public key does not match the secret key".into(),
                )
                .into());
            }
            let pk_v = codec::decode_verifier_public(&pp, &read(vpk)?)?;
            let mu = read(input)?;
            let (sig, stats) = sign_detailed(
                &mut rng(cli)?.fork("sign"),
                &pp,
                &signer,
                &pk_v,
                &mu,
                pp.sigma_p,
            )?;
            write(out, &codec::encode_signature(&pp, &sig, layout(*dense)))?;
            eprintln!(
                "sign: attempts={} rejected={} norm_restarts={}",
                stats.attempts, stats.rejected, stats.norm_restarts
            );
        }
        Command::Simulate {
            vsk,
            pk,
            vpk,
            input,
            out,
            dense,
        } => {
            let pp = load_params(cli)?;
            let sk_v = codec::decode_verifier_secret(&pp, &read(vsk)?)?;
            let pk_s = codec::decode_signer_public(&pp, &read(pk)?)?;
            let pk_v = codec::decode_verifier_public(&pp, &read(vpk)?)?;
            let mu = read(input)?;
            let sig = Simulator::new(&pp, &sk_v, &pk_v)?.simulate(
                &mut rng(cli)?.fork("simulate"),
                &pk_s,
                &mu,
            )?;
            write(out, &codec::encode_signature(&pp, &sig, layout(*dense)))?;
        }
        Command::Verify {
            vsk,
            pk,
            vpk,
            input,
            sig,
        } => {
            let pp = load_params(cli)?;
            let sk_v = codec::decode_verifier_secret(&pp, &read(vsk)?)?;
            let pk_s = codec::decode_signer_public(&pp, &read(pk)?)?;
            let pk_v = codec::decode_verifier_public(&pp, &read(vpk)?)?;
            let signature = codec::decode_signature(&pp, &read(sig)?)?;
            let mu = read(input)?;
            return Ok(
                match verify_detailed(&pp, &sk_v, &pk_s, &pk_v, &signature, &mu) {
                    Ok(()) => {
                        println!("ACCEPT");
                        0
                    }
                    Err(reason) => {
                        println!("REJECT ({reason:?})");
                        EXIT_REJECT
                    }
                },
            );
        }
        Command::Size => {
            let pp = load_params(cli)?;
            let report = SizeReport::measure(&pp, &mut rng(cli)?.fork("size"))?;
            print!("{}", render(cli.format, report.to_text(), report.to_kv()));
            if !report.passes() {
                return Ok(EXIT_REJECT);
            }
        }
        Command::Bench { trials } => {
            if *trials == 0 {
                return Err(Error::InvalidParameter("--trials must be at least 1".into()).into());
            }
            let pp = load_params(cli)?;
            let report = bench::run(&pp, *trials, &mut rng(cli)?)?;
            print!("{}", render(cli.format, report.to_text(), report.to_kv()));
        }
        Command::Stats {
            samples,
            negative_control,
        } => {
            let pp = load_params(cli)?;
            let sigma = negative_control.then_some(pp.sigma_e);
            let report = run_battery(&pp, *samples, &mut rng(cli)?.fork("stats"), sigma)?;
            print!("{}", render(cli.format, report.to_text(), report.to_kv()));
            if !report.all_pass() {
                return Ok(EXIT_REJECT);
            }
        }
    }
    Ok(0)
}

fn render(format: Format, text: String, kv: String) -> String {
    match format {
        Format::Text => text,
        Format::Kv => kv,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
