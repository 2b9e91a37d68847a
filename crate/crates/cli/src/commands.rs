use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use dynlab_core::adversary::Strategy;
use dynlab_core::instrumentation::Sigma2Source;
use dynlab_core::lab::{
    self, default_max_rounds, fit_scaling, property_suite, Engine, ExperimentSpec,
    InitialCondition, PropertyId, ScalingPoint, StopRule, SuiteParams, TraceOptions, TrialResult,
};
use dynlab_core::{Error, OpinionId, ProtocolVariant};
use serde::Serialize;

use crate::args::{DynamicsArgs, RunArgs, SweepArgs, TraceArgs, VerifyArgs};

pub const SCHEMA: &str = "# schema=1";
pub const RUN_HEADER: &str = "trial,seed,rounds,winner,winner_valid,epochs,peak_invalid_fraction";
pub const SWEEP_HEADER: &str = "n,k,trials,converged,median_rounds,mean_rounds,stddev_rounds";

/// Why a command stopped early; each maps to one exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    NonConvergence(String),
    PropertyFailed(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::PropertyFailed(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Io(m)
            | Failure::NonConvergence(m)
            | Failure::PropertyFailed(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required")))
}

pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| usage(format!("bad {what} value {x:?}")))
        })
        .collect()
}

fn parse_variant(name: Option<&str>, exclude_self: bool) -> Result<ProtocolVariant, Failure> {
    let v = match name.unwrap_or("two-sample-own") {
        "two-sample-own" => ProtocolVariant::two_sample_plus_own(),
        "three-random" => ProtocolVariant::three_sample_random(),
        other => return Err(usage(format!("unknown variant {other:?}"))),
    };
    Ok(if exclude_self { v.excluding_self() } else { v })
}

fn parse_initial(s: Option<&str>) -> Result<InitialCondition, Failure> {
    let s = s.unwrap_or("uniform");
    if s == "uniform" {
        return Ok(InitialCondition::Uniform);
    }
    if let Some(g) = s.strip_prefix("plurality:") {
        let gap = g
            .parse()
            .map_err(|_| usage(format!("bad plurality gap {g:?}")))?;
        return Ok(InitialCondition::OnePlurality { gap });
    }
    if let Some(c) = s.strip_prefix("counts:") {
        return Ok(InitialCondition::Custom(parse_list(c, "count")?));
    }
    Err(usage(format!("unknown initial condition {s:?}")))
}

fn parse_engine(s: Option<&str>) -> Result<Engine, Failure> {
    match s.unwrap_or("auto") {
        "auto" => Ok(Engine::Auto),
        "agent" => Ok(Engine::Agent),
        "aggregate" => Ok(Engine::Aggregate),
        other => Err(usage(format!("unknown engine {other:?}"))),
    }
}

fn build_spec(
    n: u64,
    k: usize,
    initial: Option<&str>,
    d: &DynamicsArgs,
) -> Result<ExperimentSpec, Failure> {
    if k == 0 || n < k as u64 {
        return Err(usage(format!("need n >= k >= 1, got n = {n}, k = {k}")));
    }
    let mut spec = ExperimentSpec::new(n, k)
        .with_variant(parse_variant(d.variant.as_deref(), d.exclude_self)?)
        .with_initial(parse_initial(initial)?)
        .with_seed(d.seed.unwrap_or(0))
        .with_max_rounds(d.max_rounds.unwrap_or_else(|| default_max_rounds(n, k)))
        .with_engine(parse_engine(d.engine.as_deref())?)
        .with_stop(StopRule { slack: d.slack });
    if let Some(delta) = d.delta {
        spec = spec.with_delta(delta);
    }
    let strategy: Strategy = d.adversary.as_deref().unwrap_or("none").parse()?;
    if strategy != Strategy::None || d.budget.is_some() {
        spec = spec.with_adversary(strategy, d.epsilon.unwrap_or(0.1), d.budget)?;
    } else if d.epsilon.is_some() {
        return Err(usage("--epsilon needs --adversary"));
    }
    spec.validate()?;
    Ok(spec)
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run_row(r: &TrialResult, seed: u64) -> String {
    let epochs: Vec<String> = r
        .epoch_transcript
        .iter()
        .map(|e| format!("{}:{}", e.epoch_index, e.rounds))
        .collect();
    format!(
        "{},{},{},{},{},{},{}",
        r.trial_index,
        seed,
        r.rounds_to_consensus
            .rounds()
            .map(|x| x.to_string())
            .unwrap_or_default(),
        r.winner.map(|w| w.to_string()).unwrap_or_default(),
        r.winner_valid,
        epochs.join(";"),
        r.peak_invalid_fraction
    )
}

pub fn run(args: RunArgs) -> CmdResult {
    let n = required(args.n, "n")?;
    let k = required(args.k, "k")?;
    let spec = build_spec(n, k, args.initial.as_deref(), &args.dynamics)?
        .with_trials(args.trials.unwrap_or(1));
    spec.validate()?;
    let format = args.format.as_deref().unwrap_or("csv");
    if format != "csv" && format != "json" {
        return Err(usage(format!("unknown format {format:?}")));
    }
    let results = lab::run_trials(&spec)?;
    let text = if format == "csv" {
        let mut t = format!("{SCHEMA}\n{RUN_HEADER}\n");
        for r in &results {
            t.push_str(&run_row(r, spec.seed));
            t.push('\n');
        }
        t
    } else {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: u32,
            spec: &'a ExperimentSpec,
            trials: &'a [TrialResult],
        }
        let mut t = serde_json::to_string_pretty(&Doc {
            schema: 1,
            spec: &spec,
            trials: &results,
        })
        .map_err(|e| Failure::Io(e.to_string()))?;
        t.push('\n');
        t
    };
    emit(args.out.as_deref(), &text)?;
    let missed = results.iter().filter(|r| !r.converged()).count();
    if args.strict && missed > 0 {
        return Err(Failure::NonConvergence(format!(
            "{missed} of {} trials did not converge",
            results.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub k: usize,
    pub trials: u64,
    pub converged: u64,
    pub median: f64,
    pub mean: f64,
    pub stddev: f64,
}

/// The sweep table with its fit footer.
pub fn sweep_table(rows: &[SweepRow]) -> Result<String, Failure> {
    let points: Vec<ScalingPoint> = rows
        .iter()
        .map(|r| ScalingPoint {
            n: r.n,
            k: r.k,
            median_rounds: r.median,
        })
        .collect();
    let fit = fit_scaling(&points)?;
    let mut t = format!("{SCHEMA}\n{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            t,
            "{},{},{},{},{},{},{}",
            r.n, r.k, r.trials, r.converged, r.median, r.mean, r.stddev
        )
        .unwrap();
    }
    writeln!(t, "# fit predictor={}", fit.predictor).unwrap();
    writeln!(t, "slope,{}", fit.slope).unwrap();
    writeln!(t, "intercept,{}", fit.intercept).unwrap();
    writeln!(t, "r_squared,{}", fit.r_squared).unwrap();
    Ok(t)
}

/// Data rows of a sweep table; comments, header and fit rows are skipped.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepRow>, Failure> {
    let mut rows = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') || line == SWEEP_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() == 2 && ["slope", "intercept", "r_squared"].contains(&f[0]) {
            continue;
        }
        if f.len() != 7 {
            return Err(usage(format!("malformed sweep row {line:?}")));
        }
        let bad = || usage(format!("malformed sweep row {line:?}"));
        rows.push(SweepRow {
            n: f[0].parse().map_err(|_| bad())?,
            k: f[1].parse().map_err(|_| bad())?,
            trials: f[2].parse().map_err(|_| bad())?,
            converged: f[3].parse().map_err(|_| bad())?,
            median: f[4].parse().map_err(|_| bad())?,
            mean: f[5].parse().map_err(|_| bad())?,
            stddev: f[6].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

pub fn sweep(args: SweepArgs) -> CmdResult {
    if let Some(path) = &args.replay {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        return emit(args.out.as_deref(), &sweep_table(&parse_sweep(&text)?)?);
    }
    let ns: Vec<u64> = parse_list(
        args.n_list
            .as_deref()
            .ok_or_else(|| usage("--n-list is required"))?,
        "n",
    )?;
    let ks: Vec<usize> = parse_list(args.k_list.as_deref().unwrap_or("2"), "k")?;
    let trials = args.trials.unwrap_or(20);
    let mut grid = Vec::new();
    for &n in &ns {
        for &k in &ks {
            grid.push((n, k));
        }
    }
    // reject a degenerate design before simulating anything
    let probe: Vec<ScalingPoint> = grid
        .iter()
        .map(|&(n, k)| ScalingPoint {
            n,
            k,
            median_rounds: 0.0,
        })
        .collect();
    fit_scaling(&probe).map_err(|e| usage(format!("degenerate grid: {e}")))?;
    let mut rows = Vec::with_capacity(grid.len());
    for &(n, k) in &grid {
        let spec = build_spec(n, k, None, &args.dynamics)?.with_trials(trials);
        let results = lab::run_trials(&spec)?;
        let s = lab::summarize(&results, spec.max_rounds);
        rows.push(SweepRow {
            n,
            k,
            trials,
            converged: s.converged as u64,
            median: s.median,
            mean: s.mean,
            stddev: s.stddev,
        });
    }
    emit(args.out.as_deref(), &sweep_table(&rows)?)
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let selection = args.property.as_deref().unwrap_or("all");
    let properties: Vec<PropertyId> = if selection == "all" {
        PropertyId::ALL.to_vec()
    } else {
        selection
            .split(',')
            .map(|s| s.trim().parse::<PropertyId>())
            .collect::<Result<_, _>>()?
    };
    let params = SuiteParams {
        quick: args.quick,
        seed: args.seed.unwrap_or(0),
        n: args.n,
        k: args.k,
        trials: args.trials,
        delta: args.delta,
        gap: args.gap,
        variant: parse_variant(args.variant.as_deref(), false)?,
    };
    let started = Instant::now();
    let reports = properties
        .iter()
        .map(|&p| property_suite(p, &params))
        .collect::<Result<Vec<_>, _>>()?;
    let elapsed = started.elapsed().as_secs_f64();
    eprintln!("verify: {} properties in {elapsed:.2}s", reports.len());
    let passed = reports.iter().all(|r| r.passed);

    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        quick: bool,
        seed: u64,
        passed: bool,
        reports: &'a [lab::PropertyReport],
        #[serde(skip_serializing_if = "Option::is_none")]
        wall_clock_seconds: Option<f64>,
    }
    let doc = Doc {
        schema: 1,
        quick: params.quick,
        seed: params.seed,
        passed,
        reports: &reports,
        wall_clock_seconds: args.timing.then_some(elapsed),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.property.to_string())
            .collect();
        Err(Failure::PropertyFailed(format!(
            "failed: {}",
            failed.join(", ")
        )))
    }
}

pub fn trace(args: TraceArgs) -> CmdResult {
    let n = required(args.n, "n")?;
    let k = required(args.k, "k")?;
    let spec = build_spec(n, k, args.initial.as_deref(), &args.dynamics)?;
    let track: Vec<OpinionId> = match args.track.as_deref() {
        Some(s) => parse_list::<u32>(s, "opinion id")?
            .into_iter()
            .map(|id| {
                if id == 0 {
                    Err(usage("opinion ids start at 1"))
                } else {
                    Ok(OpinionId::new(id))
                }
            })
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let sigma2_source = match args.sigma2.as_deref().unwrap_or("full") {
        "full" => Sigma2Source::FullConfiguration,
        "clear" => Sigma2Source::ClearMasses,
        other => return Err(usage(format!("unknown sigma2 source {other:?}"))),
    };
    let options = TraceOptions {
        track,
        sigma2_source,
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    let mut io_error = None;
    lab::trace(&spec, &options, |row| {
        if io_error.is_none() {
            let res = serde_json::to_writer(&mut w, row)
                .map_err(io::Error::from)
                .and_then(|_| w.write_all(b"\n"));
            io_error = res.err();
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}
