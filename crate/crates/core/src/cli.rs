//! Command-line front end: instance generation, MRIP checks, gaps and sweeps.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{gap_from_enumeration, sweep_from_enumeration, GapThresholds};
use crate::circuits::{Circuit, DcOracle, ThreeLevelCircuit};
use crate::engine::{
    evaluate_family, max_enum, run_protocol, Bits, CoinSpace, Deviation, Enumeration, Evaluation, ExplicitProfile,
    MripCheck, Profile, Protocol,
};
use crate::error::{MripError, Result};
use crate::gen;
use crate::oracle3sat::{decide_oracle3sat, Oracle3SatInstance};
use crate::protocols::two_five::alter;
use crate::protocols::{
    complement_wrap, lifted_family, make_fig_expmrip, make_fig_expnexp, make_fig_scoring, make_fig_simple,
    two_five_wrap, CommittedOracleProfile, ComplementProfile, GateOracleProfile, LiftedProfile, MipVariant,
    NexpGateProfile, SignFlip, SimpleProfile,
};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Parser)]
#[command(name = "mrip", version, about = "Exact checks of rational interactive proofs on small inputs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances or circuits.
    Gen(GenArgs),
    /// Enumerate a strategy family and check both MRIP conditions.
    Verify(ExperimentArgs),
    /// Payment-interval sweep: decide from the highest non-empty interval.
    Sweep(ExperimentArgs),
    /// Utility gap between the best profile and the best wrong-answer profile.
    Gap(ExperimentArgs),
    /// Run one coin outcome with the honest profile and print the transcript.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Instance,
    Circuit,
    ThreeLevel,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of files; with more than one, `--out` is a directory.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    #[arg(long, default_value_t = 4)]
    pub clauses: usize,
    /// Circuit inputs.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Total gate count of a generated circuit, or level-3 logic gates.
    #[arg(long, default_value_t = 6)]
    pub gates: usize,
    /// NEXP gates of a three-level circuit.
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub protocol: String,
    /// `structured` (alias `committed-oracle`, `gate-oracle`), `honest`, `deviations=K` or `file:PATH`.
    #[arg(long, default_value = "structured")]
    pub family: String,
    #[arg(long, default_value_t = 64)]
    pub intervals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Circuit input as a bit string; all inputs when omitted.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Input files or directories of `.json` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub protocol: String,
    /// Comma-separated coin vector.
    #[arg(long, value_delimiter = ',')]
    pub coins: Vec<u64>,
    #[arg(long)]
    pub x: Option<String>,
    /// `honest` or `file:PATH`.
    #[arg(long, default_value = "honest")]
    pub profile: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    pub input: PathBuf,
}

pub const PROTOCOLS: [&str; 10] = [
    "simple",
    "simple-b",
    "scoring",
    "complement-simple",
    "complement-scoring",
    "broken-scoring",
    "two-five-simple",
    "two-five-scoring",
    "expmrip",
    "expnexp",
];

/// One protocol on one input, with its structured family and ground truth.
pub struct Case {
    pub id: String,
    pub protocol: Arc<dyn Protocol<Rational>>,
    pub structured: Vec<Profile>,
    pub honest: Profile,
    pub truth: bool,
    pub size: u64,
}

fn arc<P: Protocol<Rational> + 'static>(p: P) -> Arc<dyn Protocol<Rational>> {
    Arc::new(p)
}

fn instance_case(protocol: &str, id: String, inst: Oracle3SatInstance) -> Result<Case> {
    let member = decide_oracle3sat(&inst)?.member;
    let size = inst.size() as u64;
    let simple = |mip| {
        Ok::<_, MripError>((
            make_fig_simple(inst.clone(), mip),
            SimpleProfile::family(&inst),
            Arc::new(SimpleProfile::honest(&inst)?) as Profile,
        ))
    };
    let scoring = || {
        Ok::<_, MripError>((
            make_fig_scoring(inst.clone()),
            CommittedOracleProfile::family(&inst),
            Arc::new(CommittedOracleProfile::honest(&inst)?) as Profile,
        ))
    };
    let case = |protocol, structured, honest, truth| Case {
        id: id.clone(),
        protocol,
        structured,
        honest,
        truth,
        size,
    };
    Ok(match protocol {
        "simple" | "simple-b" => {
            let mip = if protocol == "simple" {
                MipVariant::Exhaustive
            } else {
                MipVariant::sampled()
            };
            let (p, fam, honest) = simple(mip)?;
            case(arc(p), fam, honest, member)
        }
        "scoring" => {
            let (p, fam, honest) = scoring()?;
            case(arc(p), fam, honest, member)
        }
        "broken-scoring" => {
            let (p, fam, honest) = scoring()?;
            case(arc(SignFlip::new(p)), fam, honest, member)
        }
        "complement-simple" => {
            let (p, fam, honest) = simple(MipVariant::Exhaustive)?;
            let honest: Profile = Arc::new(ComplementProfile::new(honest));
            case(arc(complement_wrap(p)), ComplementProfile::family(&fam), honest, !member)
        }
        "complement-scoring" => {
            let (p, fam, honest) = scoring()?;
            let honest: Profile = Arc::new(ComplementProfile::new(honest));
            case(arc(complement_wrap(p)), ComplementProfile::family(&fam), honest, !member)
        }
        "two-five-simple" => {
            let (p, fam, honest) = simple(MipVariant::Exhaustive)?;
            let w = two_five_wrap(p);
            let lifted = lifted_family::<Rational, _>(&w, &fam)?;
            let honest: Profile = Arc::new(LiftedProfile::<Rational, _>::honest(&w, honest));
            case(arc(w), lifted, honest, member)
        }
        "two-five-scoring" => {
            let (p, fam, honest) = scoring()?;
            let w = two_five_wrap(p);
            let lifted = lifted_family::<Rational, _>(&w, &fam)?;
            let honest: Profile = Arc::new(LiftedProfile::<Rational, _>::honest(&w, honest));
            case(arc(w), lifted, honest, member)
        }
        other => return Err(unknown_protocol(other)),
    })
}

fn unknown_protocol(name: &str) -> MripError {
    MripError::Config(format!("unknown protocol {name:?}; expected one of {}", PROTOCOLS.join(", ")))
}

pub fn parse_x(bits: &str) -> Result<Vec<bool>> {
    bits.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(MripError::Config(format!("input {bits:?} is not a bit string"))),
        })
        .collect()
}

fn render_bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn inputs_for(n: usize, x: Option<&str>) -> Result<Vec<Vec<bool>>> {
    if let Some(x) = x {
        let x = parse_x(x)?;
        if x.len() != n {
            return Err(MripError::Config(format!("input has {} bits, circuit needs {n}", x.len())));
        }
        return Ok(vec![x]);
    }
    if n > 16 {
        return Err(MripError::Config(format!("{n} inputs; pass --x to pick one")));
    }
    Ok((0..1u32 << n)
        .map(|v| (0..n).map(|j| (v >> (n - 1 - j)) & 1 == 1).collect())
        .collect())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| MripError::Config(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        MripError::Parse { line, message } => MripError::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Every case the protocol yields on the file at `path`.
pub fn load_cases(protocol: &str, path: &Path, x: Option<&str>) -> Result<Vec<Case>> {
    let text = read(path)?;
    let id = stem(path);
    match protocol {
        "expmrip" => {
            let circuit = Arc::new(with_path(path, Circuit::from_json_str(&text))?);
            inputs_for(circuit.n(), x)?
                .into_iter()
                .map(|x| {
                    let values = circuit.eval(&x)?;
                    let p = make_fig_expmrip(DcOracle::new((*circuit).clone()), x.clone())?;
                    Ok(Case {
                        id: format!("{id}#x={}", render_bits(&x)),
                        protocol: arc(p),
                        structured: GateOracleProfile::family(circuit.clone()),
                        honest: Arc::new(GateOracleProfile::honest(circuit.clone(), &x)?),
                        truth: values.get(circuit.size()),
                        size: circuit.size() as u64,
                    })
                })
                .collect()
        }
        "expnexp" => {
            let tlc = Arc::new(with_path(path, ThreeLevelCircuit::from_json_str(&text))?);
            inputs_for(tlc.n(), x)?
                .into_iter()
                .map(|x| {
                    let truth = tlc.eval(&x)?.final_bit;
                    let p = make_fig_expnexp(tlc.clone(), x.clone(), MipVariant::Exhaustive)?;
                    Ok(Case {
                        id: format!("{id}#x={}", render_bits(&x)),
                        protocol: arc(p),
                        structured: NexpGateProfile::family(tlc.clone(), &x)?,
                        honest: Arc::new(NexpGateProfile::honest(tlc.clone(), &x)?),
                        truth,
                        size: tlc.size() as u64,
                    })
                })
                .collect()
        }
        p if PROTOCOLS.contains(&p) => {
            let inst = with_path(path, Oracle3SatInstance::from_json_str(&text))?;
            Ok(vec![instance_case(p, id, inst)?])
        }
        other => Err(unknown_protocol(other)),
    }
}

/// One entry of an explicit profile file.
#[derive(Debug, Clone, Deserialize)]
pub struct ProfileEntry {
    /// 1-based prover index.
    pub prover: usize,
    pub transcript: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProfileSpec {
    pub name: String,
    pub entries: Vec<ProfileEntry>,
}

/// Reads `[{"name": .., "entries": [{"prover", "transcript", "message"}]}]`.
pub fn load_profiles(path: &Path) -> Result<Vec<Profile>> {
    let text = read(path)?;
    let specs: Vec<ProfileSpec> = serde_json::from_str(&text).map_err(|e| MripError::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })?;
    specs
        .into_iter()
        .map(|spec| {
            let mut p = ExplicitProfile::new(spec.name);
            for e in spec.entries {
                if e.prover == 0 {
                    return Err(MripError::Config("prover indices start at 1".into()));
                }
                let parse = |s: &str| s.parse().map_err(|e: MripError| e);
                let tr = e.transcript.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
                p = p.with(e.prover - 1, tr, parse(&e.message)?);
            }
            Ok(Arc::new(p) as Profile)
        })
        .collect()
}

/// `count` honest profiles with one prover message altered on a random run.
pub fn random_deviations<T: Scalar, P: Protocol<T> + ?Sized>(
    protocol: &P,
    honest: &Profile,
    count: usize,
    seed: u64,
) -> Result<Vec<Profile>> {
    let mut rng = gen::rng(seed);
    let radices = protocol.coin_radices();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(MripError::Config("could not draw coins with positive weight".into()));
        }
        let coins: Vec<u64> = radices.iter().map(|&r| rng.gen_range(0..r)).collect();
        if protocol.coin_weight(&coins) == 0 {
            continue;
        }
        let run = run_protocol::<T, P>(protocol, &coins, honest.as_ref())?;
        let cells: Vec<(usize, usize)> = (0..run.transcripts.len())
            .flat_map(|k| (0..run.transcripts[k].len()).step_by(2).map(move |j| (k, j)))
            .filter(|&(k, j)| engaged(protocol, &run.transcripts[k], k, j))
            .collect();
        let Some(&(k, j)) = cells.get(rng.gen_range(0..cells.len().max(1))) else {
            continue;
        };
        let tr = &run.transcripts[k];
        out.push(Arc::new(Deviation::new(honest.clone()).with(k, tr[..j].to_vec(), alter(&tr[j]))) as Profile);
    }
    Ok(out)
}

/// Whether prover `k` certainly spoke at transcript index `j`. A prover left
/// out of an exchange receives and sends empty messages.
fn engaged<T: Scalar, P: Protocol<T> + ?Sized>(protocol: &P, tr: &[Bits], k: usize, j: usize) -> bool {
    if j == 0 {
        protocol.speaks_first(k)
    } else {
        !tr[j].is_empty() || !tr[j - 1].is_empty()
    }
}

pub fn family_for(case: &Case, spec: &str, seed: u64) -> Result<Vec<Profile>> {
    if spec == "structured" || spec == "committed-oracle" || spec == "gate-oracle" {
        return Ok(case.structured.clone());
    }
    if spec == "honest" {
        return Ok(vec![case.honest.clone()]);
    }
    if let Some(k) = spec.strip_prefix("deviations=") {
        let k: usize = k
            .parse()
            .map_err(|_| MripError::Config(format!("bad deviation count in {spec:?}")))?;
        let mut fam = case.structured.clone();
        fam.extend(random_deviations(case.protocol.as_ref(), &case.honest, k, seed)?);
        return Ok(fam);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return load_profiles(Path::new(path));
    }
    Err(MripError::Config(format!(
        "unknown family {spec:?}; expected structured, honest, deviations=K or file:PATH"
    )))
}

/// Configuration embedded in every report header.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub protocol: String,
    pub family: String,
    pub intervals: Option<usize>,
    pub seed: u64,
    pub x: Option<String>,
    pub inputs: Vec<String>,
    pub max_enum: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub instance_id: String,
    pub protocol: String,
    pub ground_truth: bool,
    pub family_size: usize,
    pub max_utility: String,
    pub maximizers: Vec<String>,
    pub cond1: bool,
    pub cond2: bool,
    pub best_utility: String,
    pub best_wrong_utility: Option<String>,
    pub gap: Option<String>,
    pub alpha_class: Option<String>,
    pub decision: Option<String>,
    pub intervals: Option<usize>,
    pub ambiguous: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Verify,
    Sweep,
    Gap,
}

fn decision_of_maximizers(check: &MripCheck<Rational>) -> String {
    let ones = check.maximizers.iter().filter(|r| r.c).count();
    match ones {
        0 => "0".into(),
        n if n == check.maximizers.len() => "1".into(),
        _ => "ambiguous".into(),
    }
}

fn row_for(case: &Case, e: &Enumeration<Rational>, mode: Mode, intervals: usize) -> Result<Row> {
    let check = MripCheck::from_enumeration(e, case.truth);
    let report = check.report();
    let gap = gap_from_enumeration(e, case.truth, case.size, &GapThresholds::default());
    let (decision, intervals, ambiguous) = match mode {
        Mode::Sweep => {
            let s = sweep_from_enumeration(e, intervals)?;
            (Some(s.decision_label().to_string()), Some(intervals), Some(s.ambiguous))
        }
        Mode::Gap => (Some(decision_of_maximizers(&check)), None, None),
        Mode::Verify => (None, None, None),
    };
    Ok(Row {
        instance_id: case.id.clone(),
        protocol: case.protocol.name(),
        ground_truth: case.truth,
        family_size: e.ranked.len(),
        max_utility: report.max_utility,
        maximizers: report.maximizers,
        cond1: report.cond1,
        cond2: report.cond2,
        best_utility: gap.best_utility.render(),
        best_wrong_utility: gap.best_wrong_utility.map(|u| u.render()),
        gap: gap.gap.map(|g| g.render()),
        alpha_class: gap.alpha_class.map(|a| a.as_str().to_string()),
        decision,
        intervals,
        ambiguous,
    })
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| MripError::Config(format!("{}: {e}", path.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(path.clone());
        }
    }
    Ok(out)
}

fn opt(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("")
}

fn write_csv(out: &mut dyn Write, config: &ExperimentConfig, rows: &[Row], mode: Mode) -> Result<()> {
    let io_err = |e: &dyn std::fmt::Display| MripError::Config(format!("write failed: {e}"));
    let header = serde_json::to_string(config).map_err(|e| io_err(&e))?;
    writeln!(out, "# config: {header}").map_err(|e| io_err(&e))?;
    let mut w = csv::Writer::from_writer(out);
    let result = if mode == Mode::Verify {
        w.write_record([
            "instance_id",
            "protocol",
            "ground_truth",
            "max_utility",
            "cond1",
            "cond2",
            "best_utility",
            "best_wrong_utility",
            "gap",
            "alpha_class",
            "maximizers",
        ])
        .and_then(|_| {
            rows.iter().try_for_each(|r| {
                w.write_record([
                    r.instance_id.as_str(),
                    &r.protocol,
                    if r.ground_truth { "1" } else { "0" },
                    &r.max_utility,
                    &r.cond1.to_string(),
                    &r.cond2.to_string(),
                    &r.best_utility,
                    opt(&r.best_wrong_utility),
                    opt(&r.gap),
                    opt(&r.alpha_class),
                    &r.maximizers.join(" | "),
                ])
            })
        })
    } else {
        w.write_record([
            "instance_id",
            "protocol",
            "best_utility",
            "best_wrong_utility",
            "gap",
            "decision",
            "intervals",
        ])
        .and_then(|_| {
            rows.iter().try_for_each(|r| {
                w.write_record([
                    r.instance_id.as_str(),
                    &r.protocol,
                    &r.best_utility,
                    opt(&r.best_wrong_utility),
                    opt(&r.gap),
                    opt(&r.decision),
                    &r.intervals.map(|k| k.to_string()).unwrap_or_default(),
                ])
            })
        })
    };
    result.map_err(|e| io_err(&e))?;
    w.flush().map_err(|e| io_err(&e))
}

fn write_json(out: &mut dyn Write, config: &ExperimentConfig, rows: &[Row]) -> Result<()> {
    let doc = json!({ "config": config, "rows": rows });
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| MripError::Config(format!("write failed: {e}")))?;
    writeln!(out).map_err(|e| MripError::Config(format!("write failed: {e}")))
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| MripError::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs an experiment command; returns the rows and whether every check passed.
fn experiment(args: &ExperimentArgs, mode: Mode) -> Result<(ExperimentConfig, Vec<Row>)> {
    let files = expand_inputs(&args.inputs)?;
    let config = ExperimentConfig {
        command: format!("{mode:?}").to_lowercase(),
        protocol: args.protocol.clone(),
        family: args.family.clone(),
        intervals: (mode == Mode::Sweep).then_some(args.intervals),
        seed: args.seed,
        x: args.x.clone(),
        inputs: files.iter().map(|p| p.display().to_string()).collect(),
        max_enum: max_enum().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut rows = Vec::new();
    for path in &files {
        for case in load_cases(&args.protocol, path, args.x.as_deref())? {
            let family = family_for(&case, &args.family, args.seed)?;
            let e = evaluate_family(case.protocol.as_ref(), &family, Evaluation::Auto)?;
            rows.push(row_for(&case, &e, mode, args.intervals)?);
        }
    }
    Ok((config, rows))
}

fn run_experiment(args: &ExperimentArgs, mode: Mode) -> Result<bool> {
    let (config, rows) = experiment(args, mode)?;
    let format = args.format.unwrap_or(if mode == Mode::Verify { Format::Json } else { Format::Csv });
    let mut out = open_out(&args.out)?;
    match format {
        Format::Csv => write_csv(&mut out, &config, &rows, mode)?,
        Format::Json => write_json(&mut out, &config, &rows)?,
    }
    out.flush().map_err(|e| MripError::Config(format!("write failed: {e}")))?;
    Ok(rows.iter().all(|r| r.cond1 && r.cond2))
}

fn run_gen(args: &GenArgs) -> Result<()> {
    let mut rng = gen::rng(args.seed);
    let mut docs = Vec::with_capacity(args.count);
    for _ in 0..args.count {
        docs.push(match args.kind {
            GenKind::Instance => gen::gen_instance(args.r, args.s, args.clauses, &mut rng)?.to_json_string(),
            GenKind::Circuit => gen::gen_circuit(args.n, args.gates, &mut rng)?.to_json_string(),
            GenKind::ThreeLevel => gen::gen_three_level(args.n, args.q, args.gates, &mut rng)?.to_json_string(),
        });
    }
    let fail = |p: &Path, e: io::Error| MripError::Config(format!("{}: {e}", p.display()));
    match (&args.out, args.count) {
        (Some(dir), n) if n > 1 => {
            fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
            let kind = serde_json::to_value(args.kind).ok();
            let kind = kind.as_ref().and_then(|v| v.as_str()).unwrap_or("item");
            for (i, doc) in docs.iter().enumerate() {
                let path = dir.join(format!("{kind}-{:03}.json", i + 1));
                fs::write(&path, format!("{doc}\n")).map_err(|e| fail(&path, e))?;
            }
        }
        (Some(path), _) => fs::write(path, format!("{}\n", docs.join("\n"))).map_err(|e| fail(path, e))?,
        (None, _) => {
            for doc in docs {
                println!("{doc}");
            }
        }
    }
    Ok(())
}

fn run_one(args: &RunArgs) -> Result<()> {
    let cases = load_cases(&args.protocol, &args.input, args.x.as_deref())?;
    let [case] = <[Case; 1]>::try_from(cases)
        .map_err(|_| MripError::Config("circuit protocols need --x for a single run".into()))?;
    let profile = match args.profile.as_str() {
        "honest" => case.honest.clone(),
        spec => match spec.strip_prefix("file:") {
            Some(path) => load_profiles(Path::new(path))?
                .into_iter()
                .next()
                .ok_or(MripError::EmptyFamily)?,
            None => return Err(MripError::Config(format!("unknown profile {spec:?}"))),
        },
    };
    let radices = case.protocol.coin_radices();
    let space = CoinSpace::new(radices.clone());
    let coins = if args.coins.is_empty() && radices.is_empty() {
        Vec::new()
    } else {
        args.coins.clone()
    };
    if coins.len() != radices.len() || coins.iter().zip(&radices).any(|(c, r)| c >= r) {
        return Err(MripError::Config(format!(
            "coins must be {} values below {:?}",
            radices.len(),
            space.radices()
        )));
    }
    let outcome = run_protocol(case.protocol.as_ref(), &coins, profile.as_ref())?;
    let transcripts: Vec<Vec<String>> = outcome
        .transcripts
        .iter()
        .map(|t| t.iter().map(|m| m.to_string()).collect())
        .collect();
    let doc = json!({
        "instance_id": case.id,
        "protocol": case.protocol.descriptor(),
        "profile": profile.describe(),
        "coins": coins,
        "coin_weight": case.protocol.coin_weight(&coins),
        "transcripts": transcripts,
        "payment": outcome.payment.render(),
        "c": outcome.c,
    });
    let mut out = open_out(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| MripError::Config(format!("write failed: {e}")))?;
    writeln!(out).map_err(|e| MripError::Config(format!("write failed: {e}")))
}

/// Exit status: 0 when every check passes, 1 when a check fails, 2 on errors.
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(args) => run_gen(args).map(|_| true),
        Command::Verify(args) => run_experiment(args, Mode::Verify),
        Command::Sweep(args) => run_experiment(args, Mode::Sweep),
        Command::Gap(args) => run_experiment(args, Mode::Gap),
        Command::Run(args) => run_one(args).map(|_| true),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
