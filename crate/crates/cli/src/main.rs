//! `gadgetforge`: key generation, signing, verification, statistical self-tests and benchmarks.
//!
//! Exit codes: 0 accept or success, 1 reject or failed self-test,
//! 2 malformed input file, 3 configuration, usage or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gadgetforge::codec::{unwrap_file, wrap_file, FileKind};
use gadgetforge::stattest::{self, StatConfig};
use gadgetforge::xof::ShakeRng;
use gadgetforge::{instantiate, Error, ParamSet, PerturbMode, Registry, Scheme, SchemeKind, SecretKey};
use rand::RngCore;
use serde_json::json;

const EXIT_OK: u8 = 0;
const EXIT_REJECT: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "gadgetforge", version, about = "Robin and Eagle hash-and-sign signatures over compact gadget trapdoors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write `<out>.{r,e}pk` and `<out>.{r,e}sk`.
    Keygen {
        #[command(flatten)]
        set: SetArgs,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sign the contents of `--in` with a secret key file.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify a signature on the contents of `--in`.
    Verify {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare real signing statistics against the ideal simulator.
    Stattest {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Debug: scale the reference deviation (anything but 1 is a negative control).
        #[arg(long, default_value_t = 1.0, hide = true)]
        debug_s_scale: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Report key generation, signing and verification throughput.
    Bench {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the registered parameter sets.
    Params {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SetArgs {
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long)]
    paramset: String,
}

#[derive(Args)]
struct CommonArgs {
    /// Hex seed; all randomness is derived from it when present.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, default_value = "spectral")]
    perturb: PerturbMode,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Malformed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedEncoding(_) => CliError::Malformed(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Malformed(m)) => {
            eprintln!("malformed input: {m}");
            ExitCode::from(EXIT_MALFORMED)
        }
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let registry = Registry::from_env()?;
    match cli.command {
        Command::Keygen { set, out, common } => keygen(&registry, &set, &out, &common),
        Command::Sign { key, input, out, common } => sign(&registry, &key, &input, &out, &common),
        Command::Verify { key, input, sig, json } => verify(&registry, &key, &input, &sig, json),
        Command::Stattest { set, trials, debug_s_scale, common } => stat(&registry, &set, trials, debug_s_scale, &common),
        Command::Bench { set, trials, common } => bench(&registry, &set, trials, &common),
        Command::Params { json } => list(&registry, json),
    }
}

fn resolve<'r>(registry: &'r Registry, set: &SetArgs) -> CliResult<&'r ParamSet> {
    let params = registry.get(&set.paramset)?;
    if params.scheme != set.scheme {
        return Err(CliError::Config(format!("parameter set {} belongs to {}, not {}", params.name, params.scheme, set.scheme)));
    }
    Ok(params)
}

fn seed_bytes(seed: &Option<String>) -> CliResult<Vec<u8>> {
    match seed {
        Some(h) => hex::decode(h.trim()).map_err(|e| CliError::Config(format!("invalid --seed: {e}"))),
        None => {
            let mut s = vec![0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut s);
            Ok(s)
        }
    }
}

fn master_seed(seed: &Option<String>) -> CliResult<[u8; 32]> {
    let mut material = b"master".to_vec();
    material.extend(seed_bytes(seed)?);
    let mut out = [0u8; 32];
    ShakeRng::from_seed_bytes(&material).fill_bytes(&mut out);
    Ok(out)
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, data: &[u8]) -> CliResult<()> {
    fs::write(path, data).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn load_secret(registry: &Registry, path: &Path, mode: PerturbMode) -> CliResult<(Box<dyn Scheme>, Box<dyn SecretKey>)> {
    let data = read(path)?;
    let (params, payload) = unwrap_file(&data, FileKind::SecretKey, registry)?;
    let scheme = instantiate(params, mode)?;
    let sk = scheme.secret_key_from_bytes(payload)?;
    Ok((scheme, sk))
}

fn keygen(registry: &Registry, set: &SetArgs, out: &Path, common: &CommonArgs) -> CliResult<u8> {
    let params = resolve(registry, set)?;
    let scheme = instantiate(params, common.perturb)?;
    let mut rng = ShakeRng::from_seed_bytes(&seed_bytes(&common.seed)?);
    let (sk, report) = scheme.keygen(&mut rng)?;
    let pk_path = with_extension(out, FileKind::PublicKey.extension(params.scheme));
    let sk_path = with_extension(out, FileKind::SecretKey.extension(params.scheme));
    let pk_payload = sk.public_key().to_bytes();
    let pk_bytes = wrap_file(params, FileKind::PublicKey, &pk_payload);
    write(&pk_path, &pk_bytes)?;
    write(&sk_path, &wrap_file(params, FileKind::SecretKey, &sk.to_bytes()))?;
    if common.json {
        let v = json!({
            "paramset": params.name,
            "quality": report.quality,
            "restarts": report.restarts,
            "galois_index": report.galois_index,
            "public_key": pk_path,
            "secret_key": sk_path,
            "public_key_bytes": pk_payload.len(),
            "public_key_file_bytes": pk_bytes.len(),
        });
        println!("{v}");
    } else {
        println!("{}: quality {:.3} after {} restarts", params.name, report.quality, report.restarts);
        println!("public key {} ({}-byte key, {}-byte file)", pk_path.display(), pk_payload.len(), pk_bytes.len());
        println!("secret key {}", sk_path.display());
    }
    Ok(EXIT_OK)
}

fn sign(registry: &Registry, key: &Path, input: &Path, out: &Path, common: &CommonArgs) -> CliResult<u8> {
    let (scheme, sk) = load_secret(registry, key, common.perturb)?;
    let msg = read(input)?;
    let mut rng = ShakeRng::from_seed_bytes(&seed_bytes(&common.seed)?);
    let signed = sk.sign(&msg, &mut rng)?;
    let file = wrap_file(sk.params(), FileKind::Signature, &scheme.encode_signature(&signed.signature)?);
    write(out, &file)?;
    if common.json {
        println!("{}", json!({ "paramset": sk.params().name, "signature_bytes": file.len(), "restarts": signed.restarts }));
    } else {
        println!("signature {} ({} bytes, {} restarts)", out.display(), file.len(), signed.restarts);
    }
    Ok(EXIT_OK)
}

fn verify(registry: &Registry, key: &Path, input: &Path, sig: &Path, json: bool) -> CliResult<u8> {
    let pk_data = read(key)?;
    let sig_data = read(sig)?;
    let msg = read(input)?;
    let (params, pk_payload) = unwrap_file(&pk_data, FileKind::PublicKey, registry)?;
    let (sig_params, sig_payload) = unwrap_file(&sig_data, FileKind::Signature, registry)?;
    if sig_params.id != params.id {
        return Err(CliError::Malformed(format!("signature is for {}, key is for {}", sig_params.name, params.name)));
    }
    let scheme = instantiate(params, PerturbMode::Spectral)?;
    let pk = scheme.public_key_from_bytes(pk_payload)?;
    let signature = scheme.decode_signature(sig_payload)?;
    let verdict = pk.verify(&msg, &signature);
    if json {
        println!("{}", json!({ "paramset": params.name, "verdict": verdict.to_string() }));
    } else {
        println!("{verdict}");
    }
    Ok(if verdict.is_accept() { EXIT_OK } else { EXIT_REJECT })
}

fn stat(registry: &Registry, set: &SetArgs, trials: usize, scale: f64, common: &CommonArgs) -> CliResult<u8> {
    let params = resolve(registry, set)?;
    let scheme = instantiate(params, common.perturb)?;
    let master = master_seed(&common.seed)?;
    let (sk, _) = scheme.keygen(&mut ShakeRng::derive(&master, u64::MAX))?;
    let cfg = StatConfig { trials, seed: master, reference_scale: scale };
    let report = stattest::run(sk.as_ref(), &cfg)?;
    if common.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?);
    } else {
        println!("{}: {} signatures, {} attempts", report.paramset, report.trials, report.attempts);
        for c in &report.checks {
            println!("{:<13} {}  observed {:.6}  threshold {:.6}  ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.observed, c.threshold, c.detail);
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_REJECT })
}

fn bench(registry: &Registry, set: &SetArgs, trials: usize, common: &CommonArgs) -> CliResult<u8> {
    let params = resolve(registry, set)?;
    let trials = trials.max(1);
    let scheme = instantiate(params, common.perturb)?;
    let master = master_seed(&common.seed)?;
    let start = Instant::now();
    let (sk, report) = scheme.keygen(&mut ShakeRng::derive(&master, 0))?;
    let keygen_secs = start.elapsed().as_secs_f64();

    let mut rng = ShakeRng::derive(&master, 1);
    let msgs: Vec<[u8; 8]> = (0..trials as u64).map(u64::to_be_bytes).collect();
    let start = Instant::now();
    let mut sigs = Vec::with_capacity(trials);
    let mut restarts = 0;
    for m in &msgs {
        let out = sk.sign(m, &mut rng)?;
        restarts += out.restarts;
        sigs.push(out.signature);
    }
    let sign_secs = start.elapsed().as_secs_f64();

    let pk = sk.public_key();
    let start = Instant::now();
    let accepted = msgs.iter().zip(&sigs).filter(|(m, s)| pk.verify(&m[..], s).is_accept()).count();
    let verify_secs = start.elapsed().as_secs_f64();
    let bytes: usize = sigs.iter().map(|s| scheme.encode_signature(s).map(|b| b.len())).sum::<Result<usize, _>>()?;

    let sign_ops = trials as f64 / sign_secs;
    let verify_ops = trials as f64 / verify_secs;
    if common.json {
        let v = json!({
            "paramset": params.name,
            "perturb": common.perturb.name(),
            "trials": trials,
            "keygen_seconds": keygen_secs,
            "keygen_restarts": report.restarts,
            "sign_ops_per_second": sign_ops,
            "verify_ops_per_second": verify_ops,
            "sign_restarts": restarts,
            "mean_signature_payload_bytes": bytes as f64 / trials as f64,
            "verified": accepted,
        });
        println!("{v}");
    } else {
        println!("{} ({} perturbation, {trials} messages)", params.name, common.perturb);
        println!("keygen  {keygen_secs:.3} s ({} restarts)", report.restarts);
        println!("sign    {sign_ops:.1} ops/s ({restarts} restarts)");
        println!("verify  {verify_ops:.1} ops/s ({accepted}/{trials} accepted)");
        println!("mean signature payload {:.1} bytes", bytes as f64 / trials as f64);
    }
    Ok(if accepted == trials { EXIT_OK } else { EXIT_REJECT })
}

fn list(registry: &Registry, json: bool) -> CliResult<u8> {
    if json {
        let v: Vec<_> = registry
            .iter()
            .map(|p| json!({ "name": p.name, "id": p.id, "scheme": p.scheme.name(), "n": p.n, "modulus": p.modulus, "p": p.p, "q": p.q, "r": p.r, "s": p.s }))
            .collect();
        println!("{}", serde_json::Value::Array(v));
    } else {
        for p in registry.iter() {
            println!("{:<12} {} n={} Q={} p={} q={} r={} s={}", p.name, p.scheme, p.n, p.modulus, p.p, p.q, p.r, p.s);
        }
    }
    Ok(EXIT_OK)
}
