//! Command-line front end: `score` one input, `arecibo` an aspect-ratio
//! scan, `batch` a directory with mean/std summary.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lcc::arecibo::{load_arecibo_fixture, random_baseline, scan_aspect_ratios, ScanOptions};
use lcc::cluster::ModelCostMode;
use lcc::coding::CostBreakdown;
use lcc::discrete::{decode, encoding_cost, greedy_alias_search, SearchOptions};
use lcc::frontends::{self, Payload, StftConfig};
use lcc::generate;
use lcc::hierarchy::{lcc_continuous, DataTensor, HierarchyConfig};
use lcc::report::{
    mean_std, CodebookDetail, LevelDetail, RunReport, CODEBOOK_COST_FORMULA, REPORT_SCHEMA,
};
use lcc::Error;

#[derive(Parser)]
#[command(name = "lcc", about = "Local compositional complexity scoring", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one input (file or generator) and emit a run report.
    Score(ScoreArgs),
    /// Scan a bit file over aspect ratios and compare with a random baseline.
    Arecibo(AreciboArgs),
    /// Score every file in a directory and print per-file rows plus a
    /// mean (std) summary.
    Batch(BatchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Text,
    Image,
    Audio,
    Bits,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostMode {
    Full,
    MeansOnly,
}

impl From<CostMode> for ModelCostMode {
    fn from(m: CostMode) -> Self {
        match m {
            CostMode::Full => ModelCostMode::Full,
            CostMode::MeansOnly => ModelCostMode::MeansOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonScoring {
    /// Patch sizes per level, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 2, 2])]
    levels: Vec<usize>,
    /// Component cap per level.
    #[arg(long, default_value_t = 15)]
    kmax: usize,
    /// Longest substring considered by the text search.
    #[arg(long, default_value_t = 10)]
    max_sublen: usize,
    /// RNG seed; falls back to the LCC_SEED environment variable, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// What the per-component model cost charges.
    #[arg(long, value_enum, default_value = "full")]
    model_cost_mode: CostMode,
    /// Force the accounting precision in bits (otherwise inferred).
    #[arg(long)]
    precision: Option<u32>,
    /// Overlapping patches (stride p/2) with multiplicity-scaled costs.
    #[arg(long, default_value_t = false)]
    overlap: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Input kind; generator specs are written as gen:NAME.
    #[arg(long)]
    kind: String,
    /// Input path (omitted for generators).
    path: Option<PathBuf>,
    /// Character budget for text inputs.
    #[arg(long, default_value_t = frontends::DEFAULT_TEXT_BUDGET)]
    budget: usize,
    /// Grid for --kind bits, e.g. 73x23.
    #[arg(long)]
    ratio: Option<String>,
    /// Generated sequence length for text generators.
    #[arg(long, default_value_t = 7500)]
    gen_len: usize,
    /// Repeat-unit length for gen:repeat-k.
    #[arg(long, default_value_t = 2)]
    gen_k: usize,
    /// Image size for image generators.
    #[arg(long, default_value_t = 32)]
    gen_rows: usize,
    #[arg(long, default_value_t = 32)]
    gen_cols: usize,
    /// Stripe width for gen:stripes.
    #[arg(long, default_value_t = 4)]
    gen_width: usize,
    /// Angle (0, 45 or 90) for gen:stripes / gen:halves.
    #[arg(long, default_value_t = 0)]
    gen_angle: u32,
    /// Primes for gen:prime-modulo.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Input sequence for gen:prime-modulo.
    #[arg(long, value_delimiter = ',')]
    inp: Option<Vec<u64>>,
    /// STFT window for audio.
    #[arg(long, default_value_t = 1024)]
    window: usize,
    /// STFT hop for audio.
    #[arg(long, default_value_t = 512)]
    hop: usize,
    #[command(flatten)]
    common: CommonScoring,
}

#[derive(Args)]
struct AreciboArgs {
    /// Bit file (ASCII 0/1, whitespace ignored).
    path: PathBuf,
    /// Explicit ratios like 73x23,77x22; default scans every fitting height.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<String>>,
    /// Bit file is packed bytes rather than ASCII.
    #[arg(long, default_value_t = false)]
    packed: bool,
    #[arg(long, default_value_t = 20)]
    baseline_trials: usize,
    /// Skip the random baseline.
    #[arg(long, default_value_t = false)]
    no_baseline: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Padding cap as a fraction of the sequence length.
    #[arg(long, default_value_t = 0.05)]
    pad_cap: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a ratio,lcc,total CSV for plotting.
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = frontends::DEFAULT_TEXT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1024)]
    window: usize,
    #[arg(long, default_value_t = 512)]
    hop: usize,
    #[command(flatten)]
    common: CommonScoring,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(args) => cmd_score(args),
        Command::Arecibo(args) => cmd_arecibo(args),
        Command::Batch(args) => cmd_batch(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn seed_of(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("LCC_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

fn parse_ratio(s: &str) -> Result<(usize, usize), Error> {
    let (h, w) = s
        .split_once('x')
        .ok_or_else(|| Error::Config(format!("--ratio expects HxW, got {s:?}")))?;
    let h = h
        .parse()
        .map_err(|_| Error::Config(format!("--ratio height {h:?} is not a number")))?;
    let w = w
        .parse()
        .map_err(|_| Error::Config(format!("--ratio width {w:?} is not a number")))?;
    Ok((h, w))
}

fn hierarchy_config(common: &CommonScoring, seed: u64) -> HierarchyConfig {
    HierarchyConfig {
        patch_sizes: common.levels.clone(),
        k_max: common.kmax,
        precision: common.precision,
        mode: common.model_cost_mode.into(),
        seed,
        overlap: common.overlap,
    }
}

fn config_echo(common: &CommonScoring, seed: u64, extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert(
        "levels".into(),
        common
            .levels
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    c.insert("kmax".into(), common.kmax.to_string());
    c.insert("max_sublen".into(), common.max_sublen.to_string());
    c.insert("seed".into(), seed.to_string());
    c.insert(
        "model_cost_mode".into(),
        match common.model_cost_mode {
            CostMode::Full => "full".into(),
            CostMode::MeansOnly => "means-only".to_string(),
        },
    );
    c.insert(
        "precision".into(),
        common
            .precision
            .map(|p| p.to_string())
            .unwrap_or_else(|| "inferred".into()),
    );
    c.insert("overlap".into(), common.overlap.to_string());
    c.insert("codebook_cost_formula".into(), CODEBOOK_COST_FORMULA.into());
    for (k, v) in extra {
        c.insert((*k).into(), v.clone());
    }
    c
}

fn emit(report: &RunReport, format: Format, out: Option<&PathBuf>) -> Result<(), Error> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

enum Scored {
    Text {
        breakdown: CostBreakdown,
        codebook: CodebookDetail,
        decode_ok: bool,
    },
    Tensor {
        breakdown: CostBreakdown,
        levels: Vec<LevelDetail>,
        decode_ok: bool,
    },
}

fn score_text_symbols(
    symbols: &lcc::SymbolString,
    common: &CommonScoring,
) -> Result<Scored, Error> {
    let enc = greedy_alias_search(
        symbols,
        &SearchOptions {
            max_len: common.max_sublen,
            log_decisions: false,
        },
    );
    let breakdown = encoding_cost(&enc);
    let decode_ok = decode(&enc).map(|d| d == *symbols).unwrap_or(false);
    Ok(Scored::Text {
        breakdown,
        codebook: CodebookDetail {
            entries: enc.codebook.len(),
            value_symbols: enc.codebook.entries.iter().map(|e| e.value.len()).sum(),
            index_length: enc.index.len(),
            residual_length: enc.residual.len(),
            cost_formula: CODEBOOK_COST_FORMULA.into(),
        },
        decode_ok,
    })
}

fn score_tensor(tensor: &DataTensor, common: &CommonScoring, seed: u64) -> Result<Scored, Error> {
    let enc = lcc_continuous(tensor, &hierarchy_config(common, seed))?;
    let exact = lcc::hierarchy::decode_hierarchy(&enc, lcc::hierarchy::DecodeMode::Exact, 0)?;
    let decode_ok = exact.data == enc.original.data;
    let levels = enc
        .levels
        .iter()
        .map(|l| LevelDetail {
            level: l.index.level,
            patch: l.patch,
            components: l.partition.components.len(),
            embed_dim: l.embed_dim,
            x_count: l
                .partition
                .labels
                .iter()
                .filter(|&&x| x == lcc::cluster::X_LABEL)
                .count(),
            leftover_cells: l.leftover_cells,
            costs: (&l.costs).into(),
        })
        .collect();
    Ok(Scored::Tensor {
        breakdown: enc.breakdown,
        levels,
        decode_ok,
    })
}

fn generated_input(args: &ScoreArgs, name: &str, seed: u64) -> Result<(Payload, BTreeMap<String, String>), Error> {
    let mut prov = BTreeMap::new();
    prov.insert("generator".into(), name.to_string());
    prov.insert("seed".into(), seed.to_string());
    let payload = match name {
        "rand-text" => {
            prov.insert("len".into(), args.gen_len.to_string());
            prov.insert("alphabet".into(), "26 letters + space".into());
            let text = generate::rand_text(args.gen_len, seed);
            Payload::Text(text_symbols(&text, args.budget))
        }
        "repeat-k" => {
            if args.gen_k < 1 {
                return Err(Error::Config("--gen-k must be >= 1".into()));
            }
            prov.insert("len".into(), args.gen_len.to_string());
            prov.insert("k".into(), args.gen_k.to_string());
            let text = generate::repeat_text(args.gen_k, args.gen_len, seed);
            Payload::Text(text_symbols(&text, args.budget))
        }
        "simp-en" => {
            prov.insert("len".into(), args.gen_len.to_string());
            prov.insert("words".into(), generate::SIMPLE_WORDS.join(","));
            let text = generate::simple_english(args.gen_len, seed);
            Payload::Text(text_symbols(&text, args.budget))
        }
        "prime-modulo" => {
            let primes = args
                .primes
                .clone()
                .ok_or_else(|| Error::Config("gen:prime-modulo needs --primes".into()))?;
            let inp = args
                .inp
                .clone()
                .ok_or_else(|| Error::Config("gen:prime-modulo needs --inp".into()))?;
            prov.insert("primes".into(), format!("{primes:?}"));
            prov.insert("inp".into(), format!("{inp:?}"));
            let text = generate::prime_modulo_text(&primes, &inp);
            Payload::Text(text_symbols(&text, args.budget))
        }
        "white-noise-image" => {
            prov.insert("rows".into(), args.gen_rows.to_string());
            prov.insert("cols".into(), args.gen_cols.to_string());
            Payload::Tensor(generate::white_noise_image(args.gen_rows, args.gen_cols, seed))
        }
        "stripes" => {
            prov.insert("width".into(), args.gen_width.to_string());
            prov.insert("angle".into(), args.gen_angle.to_string());
            Payload::Tensor(generate::stripes_image(
                args.gen_rows,
                args.gen_cols,
                args.gen_width,
                args.gen_angle,
                seed,
            ))
        }
        "halves" => {
            prov.insert("angle".into(), args.gen_angle.to_string());
            Payload::Tensor(generate::halves_image(
                args.gen_rows,
                args.gen_cols,
                args.gen_angle,
                seed,
            ))
        }
        "scene" => {
            prov.insert("rows".into(), args.gen_rows.to_string());
            prov.insert("cols".into(), args.gen_cols.to_string());
            Payload::Tensor(generate::scene_image(args.gen_rows, args.gen_cols, seed))
        }
        other => {
            return Err(Error::Config(format!(
                "--kind gen:{other} is not a known generator"
            )))
        }
    };
    Ok((payload, prov))
}

fn text_symbols(text: &str, budget: usize) -> lcc::SymbolString {
    match frontends::text_to_symbols(text, Some(budget)).payload {
        Payload::Text(t) => t,
        _ => unreachable!(),
    }
}

fn cmd_score(args: ScoreArgs) -> Result<(), Error> {
    let start = Instant::now();
    let seed = seed_of(args.common.seed);

    let (payload, mut input) = if let Some(gen) = args.kind.strip_prefix("gen:") {
        generated_input(&args, gen, seed)?
    } else {
        let kind = match args.kind.as_str() {
            "text" => Kind::Text,
            "image" => Kind::Image,
            "audio" => Kind::Audio,
            "bits" => Kind::Bits,
            other => {
                return Err(Error::Config(format!(
                    "--kind must be text|image|audio|bits|gen:NAME, got {other:?}"
                )))
            }
        };
        let path = args
            .path
            .as_ref()
            .ok_or_else(|| Error::Config("--kind needs an input path".into()))?;
        let source = match kind {
            Kind::Text => frontends::load_text(path, Some(args.budget))?,
            Kind::Image => frontends::load_image(path)?,
            Kind::Audio => frontends::load_audio(
                path,
                &StftConfig {
                    window: args.window,
                    hop: args.hop,
                    ..StftConfig::default()
                },
            )?,
            Kind::Bits => {
                let bits = frontends::load_bits(path, false)?;
                let ratio = args
                    .ratio
                    .as_deref()
                    .ok_or_else(|| Error::Config("--kind bits needs --ratio HxW".into()))?;
                let (h, w) = parse_ratio(ratio)?;
                if h * w < bits.len() {
                    return Err(Error::Config(format!(
                        "--ratio {h}x{w} cannot hold {} bits",
                        bits.len()
                    )));
                }
                let ones = bits.iter().filter(|&&b| b == 1).count();
                let p = ones as f64 / bits.len() as f64;
                let mut prov = BTreeMap::new();
                prov.insert("path".into(), path.display().to_string());
                prov.insert("ratio".into(), format!("{h}x{w}"));
                prov.insert("pad".into(), (h * w - bits.len()).to_string());
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut data: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
                while data.len() < h * w {
                    data.push(if rng.gen_bool(p) { 1.0 } else { 0.0 });
                }
                let tensor = DataTensor::new(vec![h, w], 1, data)?;
                frontends::SignalSource {
                    kind: "bits".into(),
                    payload: Payload::Tensor(tensor),
                    provenance: prov,
                }
            }
        };
        (source.payload, source.provenance)
    };
    input.insert("kind".into(), args.kind.clone());

    let scored = match &payload {
        Payload::Text(symbols) => score_text_symbols(symbols, &args.common)?,
        Payload::Tensor(tensor) => score_tensor(tensor, &args.common, seed)?,
        Payload::Bits(_) => unreachable!("bits become tensors above"),
    };
    let (cost, levels, codebook, decode_ok) = match scored {
        Scored::Text {
            breakdown,
            codebook,
            decode_ok,
        } => ((&breakdown).into(), None, Some(codebook), decode_ok),
        Scored::Tensor {
            breakdown,
            levels,
            decode_ok,
        } => ((&breakdown).into(), Some(levels), None, decode_ok),
    };

    let report = RunReport {
        schema: REPORT_SCHEMA.into(),
        input,
        config: config_echo(&args.common, seed, &[("budget", args.budget.to_string())]),
        cost,
        levels,
        codebook,
        decode_check: decode_ok,
        timing_ms: start.elapsed().as_millis(),
    };
    emit(&report, args.common.format, args.common.out.as_ref())
}

fn cmd_arecibo(args: AreciboArgs) -> Result<(), Error> {
    let seed = seed_of(args.seed);
    let bits = if args.path.extension().is_some_and(|e| e == "bits") && !args.packed {
        match load_arecibo_fixture(&args.path) {
            Ok(b) => b,
            Err(_) => frontends::load_bits(&args.path, args.packed)?,
        }
    } else {
        frontends::load_bits(&args.path, args.packed)?
    };
    let ratio_set = match &args.ratios {
        Some(rs) => Some(
            rs.iter()
                .map(|r| parse_ratio(r))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let opts = ScanOptions {
        ratio_set,
        pad_cap_fraction: args.pad_cap,
        seed,
    };
    let scan = scan_aspect_ratios(&bits, &opts)?;
    let baseline = if args.no_baseline {
        None
    } else {
        Some(random_baseline(bits.len(), &opts, args.baseline_trials, seed)?)
    };

    if let Some(csv_path) = &args.csv_out {
        let mut csv = String::from("height,width,pad_bits,lcc_score,total_cost\n");
        for r in &scan.records {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.height, r.width, r.pad_bits, r.lcc_score, r.total_cost
            ));
        }
        std::fs::write(csv_path, csv)?;
    }

    let output = serde_json::json!({
        "schema": REPORT_SCHEMA,
        "scan": scan,
        "baseline": baseline,
    });
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&output).expect("serialises"),
        Format::Csv => {
            let mut csv = String::from("height,width,pad_bits,lcc_score,total_cost\n");
            for r in &scan.records {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.height, r.width, r.pad_bits, r.lcc_score, r.total_cost
                ));
            }
            csv
        }
    };
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_batch(args: BatchArgs) -> Result<(), Error> {
    let seed = seed_of(args.common.seed);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!(
            "directory {} holds no files",
            args.dir.display()
        )));
    }
    let expected: &[&str] = match args.kind {
        Kind::Text => &["txt"],
        Kind::Image => &["png", "ppm", "pgm", "pnm"],
        Kind::Audio => &["wav"],
        Kind::Bits => &["bits"],
    };
    for p in &paths {
        let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !expected.contains(&ext) {
            return Err(Error::Config(format!(
                "{} does not match --kind (expected one of {expected:?})",
                p.display()
            )));
        }
    }

    let mut rows: Vec<(String, CostBreakdown)> = Vec::new();
    for p in &paths {
        let breakdown = match args.kind {
            Kind::Text => {
                let source = frontends::load_text(p, Some(args.budget))?;
                match source.payload {
                    Payload::Text(symbols) => match score_text_symbols(&symbols, &args.common)? {
                        Scored::Text { breakdown, .. } => breakdown,
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                }
            }
            Kind::Image => {
                let source = frontends::load_image(p)?;
                match source.payload {
                    Payload::Tensor(t) => match score_tensor(&t, &args.common, seed)? {
                        Scored::Tensor { breakdown, .. } => breakdown,
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                }
            }
            Kind::Audio => {
                let source = frontends::load_audio(
                    p,
                    &StftConfig {
                        window: args.window,
                        hop: args.hop,
                        ..StftConfig::default()
                    },
                )?;
                match source.payload {
                    Payload::Tensor(t) => match score_tensor(&t, &args.common, seed)? {
                        Scored::Tensor { breakdown, .. } => breakdown,
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                }
            }
            Kind::Bits => {
                return Err(Error::Config(
                    "batch scoring of bit files is not supported; use the arecibo command".into(),
                ))
            }
        };
        rows.push((p.display().to_string(), breakdown));
    }

    let mut out = String::from("file,model_cost,idx_cost,lcc_score,residual_cost\n");
    for (name, b) in &rows {
        out.push_str(&format!(
            "{name},{:.2},{:.2},{:.2},{:.2}\n",
            b.model_cost, b.idx_cost, b.lcc_score, b.residual_cost
        ));
    }
    let col = |f: fn(&CostBreakdown) -> f64| -> (f64, f64) {
        mean_std(&rows.iter().map(|(_, b)| f(b)).collect::<Vec<_>>())
    };
    let (m_model, s_model) = col(|b| b.model_cost);
    let (m_idx, s_idx) = col(|b| b.idx_cost);
    let (m_lcc, s_lcc) = col(|b| b.lcc_score);
    let (m_res, s_res) = col(|b| b.residual_cost);
    out.push_str(&format!(
        "summary,{m_model:.2} ({s_model:.2}),{m_idx:.2} ({s_idx:.2}),{m_lcc:.2} ({s_lcc:.2}),{m_res:.2} ({s_res:.2})\n"
    ));
    match &args.common.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}
