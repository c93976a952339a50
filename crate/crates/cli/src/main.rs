use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use partrap::cipher::config::CipherConfig;
use partrap::cipher::{is_proper, is_strongly_proper, theorem_hypotheses_report, TbCipher, TheoremId};
use partrap::f2lin::{BlockLayout, Subspace};
use partrap::io::{load_matrix, load_sbox};
use partrap::permgroup::{PermSet, Primitivity};
use partrap::sbox::SBox;
use partrap::trapdoor::{
    self, search_trapdoor, validate_lemma, validate_theorem, Ablation, LemmaId, LemmaParams, SearchScope,
    TheoremOptions,
};
use partrap::Error;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "partrap", version, about = "Partition trapdoors and primitivity of translation-based ciphers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differential and structural properties of one S-box.
    SboxAnalyze {
        /// `builtin:inv<m>` or a table file.
        sbox: String,
        /// Anti-invariance level to test (default: the uniformity exponent r and r-1).
        #[arg(long)]
        r: Option<usize>,
    },
    /// Wall conditions of a mixing layer.
    MixlayerCheck {
        matrix: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        m: usize,
    },
    /// Independence properties of a key schedule.
    KeyscheduleCheck { config: PathBuf },
    /// Which primitivity theorems apply to a cipher.
    CipherCheck { config: PathBuf },
    /// Search for partitions mapped onto each other by every encryption function.
    TrapdoorSearch {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "affine")]
        scope: ScopeArg,
        /// Directory for A.part, B.part and chain.json when a witness is found.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Primitivity of the group generated by sampled encryption functions.
    PrimitivityCheck {
        config: PathBuf,
        #[arg(long, default_value_t = 64)]
        sample_keys: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the block system when imprimitive.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Write a control cipher configuration.
    BuildControl {
        #[arg(long, value_enum)]
        kind: ControlKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a theorem or lemma conclusion on a cipher.
    Validate {
        /// `th-mainme`, `cor-...`, `lm1` ... `lm33`.
        id: String,
        config: PathBuf,
        /// Round whose S-box layer a lemma is run on (default: first nonlinear round).
        #[arg(long)]
        round: Option<usize>,
        /// Run even when the hypotheses fail.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 64)]
        sample_keys: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Linear,
    Affine,
    Tiny,
}

#[derive(Clone, Copy, ValueEnum)]
enum ControlKind {
    Trapdoored,
    WallPreserving,
    Compliant,
    BlockwiseMixing,
    AffineComponent,
    ShortKeyBox,
}

impl ControlKind {
    fn build(self, seed: u64) -> TbCipher {
        match self {
            ControlKind::Trapdoored => trapdoor::trapdoored6(seed),
            ControlKind::WallPreserving => trapdoor::wall_preserving(seed),
            ControlKind::Compliant => trapdoor::compliant8(seed),
            ControlKind::BlockwiseMixing => trapdoor::ablated8(seed, Ablation::BlockwiseMixing),
            ControlKind::AffineComponent => trapdoor::ablated8(seed, Ablation::AffineComponent),
            ControlKind::ShortKeyBox => trapdoor::ablated8(seed, Ablation::ShortKeyBox),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ControlKind::Trapdoored => "trapdoored",
            ControlKind::WallPreserving => "wall-preserving",
            ControlKind::Compliant => "compliant",
            ControlKind::BlockwiseMixing => "blockwise-mixing",
            ControlKind::AffineComponent => "affine-component",
            ControlKind::ShortKeyBox => "short-key-box",
        }
    }
}

#[derive(Serialize)]
struct Envelope {
    schema: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'static str,
    config_hash: String,
    result: Value,
}

struct Outcome {
    command: &'static str,
    input: Vec<u8>,
    result: Value,
    code: u8,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_config(path: &Path) -> anyhow::Result<(Vec<u8>, TbCipher)> {
    let bytes = read_bytes(path)?;
    let (cfg, base) = CipherConfig::load(path)?;
    Ok((bytes, cfg.build(&base)?))
}

#[derive(Serialize)]
struct AntiInvarianceOut {
    r: usize,
    holds: bool,
    witness: Option<(Subspace, Subspace)>,
}

fn sbox_analyze(spec: &str, r: Option<usize>) -> anyhow::Result<Outcome> {
    let (input, s) = if spec.starts_with("builtin:") {
        (spec.as_bytes().to_vec(), SBox::builtin(spec)?)
    } else {
        let path = Path::new(spec);
        (read_bytes(path)?, load_sbox(path)?)
    };
    let m = s.m();
    let delta = s.differential_uniformity();
    let r_delta = (32 - delta.saturating_sub(1).leading_zeros()) as usize;
    let (normal, shift) = s.normalize_zero();
    let levels: Vec<usize> = match r {
        Some(r) => vec![r],
        None => [r_delta.checked_sub(1), Some(r_delta)].into_iter().flatten().collect(),
    };
    let mut anti = Vec::new();
    for rr in levels.into_iter().filter(|&rr| rr < m) {
        let a = normal.strong_anti_invariance(rr)?;
        anti.push(AntiInvarianceOut {
            r: a.r,
            holds: a.holds,
            witness: a.witness,
        });
    }
    let min_image = (1..s.size() as u32).map(|u| s.derivative_image(u).len()).min().unwrap_or(0);
    let result = json!({
        "m": m,
        "bijective": s.is_bijective(),
        "fixes_zero": shift == 0,
        "delta": delta,
        "r": r_delta,
        "n_hat": s.n_hat(),
        "nonlinearity": s.nonlinearity(),
        "min_derivative_image": min_image,
        "anti_invariance_on_zero_fixing_form": anti,
    });
    Ok(Outcome {
        command: "sbox-analyze",
        input,
        result,
        code: 0,
    })
}

fn mixlayer_check(path: &Path, b: usize, m: usize) -> anyhow::Result<Outcome> {
    let input = read_bytes(path)?;
    let lambda = load_matrix(path)?;
    let layout = BlockLayout::new(b, m)?;
    if lambda.dim() != layout.n() {
        bail!(Error::DimensionMismatch {
            expected: layout.n(),
            got: lambda.dim()
        });
    }
    let proper = is_proper(&lambda, &layout);
    let strong = is_strongly_proper(&lambda, &layout);
    let code = if strong.holds { 0 } else { 1 };
    let result = json!({
        "n": layout.n(),
        "b": b,
        "m": m,
        "proper": proper.holds,
        "strongly_proper": strong.holds,
        "proper_witness": proper.witness,
        "strongly_proper_witness": strong.witness,
    });
    Ok(Outcome {
        command: "mixlayer-check",
        input,
        result,
        code,
    })
}

fn keyschedule_check(path: &Path) -> anyhow::Result<Outcome> {
    let (input, c) = load_config(path)?;
    let ks = c.schedule();
    let mut three_round = Vec::new();
    for i in 2..ks.rounds() {
        if ks.is_3round_independent(i)? {
            three_round.push(i);
        }
    }
    let almost = ks.independence_witnesses();
    let code = if three_round.is_empty() && almost.is_empty() { 1 } else { 0 };
    let result = json!({
        "variant": ks.variant_name(),
        "rounds": ks.rounds(),
        "key_count": ks.key_count(),
        "three_round_independent": three_round,
        "almost_independent": almost,
        "key_box": ks.key_box(),
    });
    Ok(Outcome {
        command: "keyschedule-check",
        input,
        result,
        code,
    })
}

fn cipher_check(path: &Path) -> anyhow::Result<Outcome> {
    let (input, c) = load_config(path)?;
    let report = theorem_hypotheses_report(&c);
    let code = if report.verdict.is_some() { 0 } else { 1 };
    Ok(Outcome {
        command: "cipher-check",
        input,
        result: serde_json::to_value(&report)?,
        code,
    })
}

fn trapdoor_search(path: &Path, scope: ScopeArg, witness_dir: Option<&Path>) -> anyhow::Result<Outcome> {
    let (input, c) = load_config(path)?;
    let scope = match scope {
        ScopeArg::Linear => SearchScope::linear(),
        ScopeArg::Affine => SearchScope::affine(),
        ScopeArg::Tiny => SearchScope::tiny(),
    };
    let witness = search_trapdoor(&c, &scope)?;
    if let (Some(dir), Some(w)) = (witness_dir, &witness) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        fs::write(dir.join("A.part"), w.a.to_block_file())?;
        fs::write(dir.join("B.part"), w.b.to_block_file())?;
        let chain = serde_json::to_string_pretty(&w.chain)? + "\n";
        fs::write(dir.join("chain.json"), chain)?;
    }
    let code = if witness.is_some() { 1 } else { 0 };
    Ok(Outcome {
        command: "trapdoor-search",
        input,
        result: json!({ "scope": scope, "witness": witness }),
        code,
    })
}

fn primitivity_check(path: &Path, sample_keys: usize, seed: u64, witness: Option<&Path>) -> anyhow::Result<Outcome> {
    let (input, c) = load_config(path)?;
    let keys = c.schedule().sample(seed, sample_keys);
    let gens = keys.iter().map(|k| c.materialize(k)).collect::<partrap::Result<Vec<_>>>()?;
    let generators = gens.len();
    let verdict = PermSet::new(c.n(), gens)?.is_primitive();
    let code = match &verdict {
        Primitivity::Primitive => 0,
        Primitivity::Imprimitive { blocks, .. } => {
            if let Some(p) = witness {
                fs::write(p, blocks.to_block_file()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            1
        }
        Primitivity::Intransitive { .. } => 2,
    };
    Ok(Outcome {
        command: "primitivity-check",
        input,
        result: json!({ "generators": generators, "seed": seed, "primitivity": verdict }),
        code,
    })
}

fn build_control(kind: ControlKind, seed: u64, out: &Path) -> anyhow::Result<Outcome> {
    let c = kind.build(seed);
    let cfg = CipherConfig::describe(&c)?;
    let text = serde_json::to_string_pretty(&cfg)? + "\n";
    fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(Outcome {
        command: "build-control",
        input: format!("{}:{seed}", kind.name()).into_bytes(),
        result: json!({
            "kind": kind.name(),
            "seed": seed,
            "n": c.n(),
            "rounds": c.round_count(),
            "schedule": c.schedule().variant_name(),
            "output_hash": sha256_hex(text.as_bytes()),
        }),
        code: 0,
    })
}

fn hypotheses_unmet(id: &str, message: String) -> Value {
    json!({ "id": id, "status": "HYPOTHESES_NOT_MET", "message": message })
}

fn validate(id: &str, path: &Path, round: Option<usize>, opts: TheoremOptions) -> anyhow::Result<Outcome> {
    let (input, c) = load_config(path)?;
    let outcome = |result: Value, pass: bool| Outcome {
        command: "validate",
        input: input.clone(),
        result,
        code: if pass { 0 } else { 1 },
    };
    if let Ok(which) = id.parse::<TheoremId>() {
        return Ok(match validate_theorem(&c, which, &opts) {
            Ok(rep) => {
                let mut v = serde_json::to_value(&rep)?;
                v["status"] = json!(if rep.pass { "PASS" } else { "FAIL" });
                outcome(v, rep.pass)
            }
            Err(Error::Hypotheses(msg)) => outcome(hypotheses_unmet(id, msg), false),
            Err(e) => return Err(e.into()),
        });
    }
    let lemma: LemmaId = id.parse().map_err(|_| anyhow::anyhow!("unknown theorem or lemma {id:?}"))?;
    let h = match round {
        Some(h) if (1..=c.round_count()).contains(&h) => h,
        Some(h) => bail!(Error::OutOfRange(format!("round {h} not in 1..={}", c.round_count()))),
        None => (1..=c.round_count())
            .find(|&h| c.round(h).gamma.boxes().iter().any(|s| s.table().iter().enumerate().any(|(x, &y)| x as u32 != y)))
            .context("every round has an identity S-box layer")?,
    };
    let gamma = &c.round(h).gamma;
    Ok(match validate_lemma(gamma, lemma, &LemmaParams::default()) {
        Ok(rep) => {
            let mut v = serde_json::to_value(&rep)?;
            v["round"] = json!(h);
            v["status"] = json!(if rep.holds { "PASS" } else { "FAIL" });
            outcome(v, rep.holds)
        }
        Err(Error::Hypotheses(msg)) if !opts.force => outcome(hypotheses_unmet(id, msg), false),
        Err(Error::Hypotheses(msg)) => bail!("{msg} (lemma scans cannot be forced)"),
        Err(e) => return Err(e.into()),
    })
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::SboxAnalyze { sbox, r } => sbox_analyze(&sbox, r),
        Command::MixlayerCheck { matrix, b, m } => mixlayer_check(&matrix, b, m),
        Command::KeyscheduleCheck { config } => keyschedule_check(&config),
        Command::CipherCheck { config } => cipher_check(&config),
        Command::TrapdoorSearch {
            config,
            scope,
            witness_dir,
        } => trapdoor_search(&config, scope, witness_dir.as_deref()),
        Command::PrimitivityCheck {
            config,
            sample_keys,
            seed,
            witness,
        } => primitivity_check(&config, sample_keys, seed, witness.as_deref()),
        Command::BuildControl { kind, seed, out } => build_control(kind, seed, &out),
        Command::Validate {
            id,
            config,
            round,
            force,
            sample_keys,
            seed,
        } => {
            let opts = TheoremOptions {
                force,
                sample_keys,
                seed,
                scope: None,
            };
            validate(&id, &config, round, opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = cli.report.clone();
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let envelope = Envelope {
        schema: SCHEMA,
        tool: "partrap",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: outcome.command,
        config_hash: sha256_hex(&outcome.input),
        result: outcome.result,
    };
    let text = serde_json::to_string_pretty(&envelope).expect("report serializes") + "\n";
    match report {
        Some(p) => {
            if let Err(e) = fs::write(&p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.code)
}
