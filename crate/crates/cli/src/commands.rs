use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use sha2::{Digest, Sha256};

use nhood_core::experiment::{
    generate_messages, neighborhood_size_table, run_experiment, saturation_threshold, write_neighborhood_csv,
    ExperimentConfig,
};
use nhood_core::mobility::{generate, CommunityConfig, MobilityConfig, MobilityRegistry, ModelParams};
use nhood_core::overhead::{write_ledgers_csv, ProbeJob, StrategyConfig, StrategyRegistry, DEFAULT_INTERVAL};
use nhood_core::protocols::{write_records_csv, MessageSpec, Ttl};
use nhood_core::trace_io::{parse_trace, trace_stats, write_trace, ContactTrace, TraceFormat};
use nhood_core::vicinity::{classify_all, PairKind};
use nhood_core::{HopDistance, NodeId, TemporalGraph};

use crate::settings::Settings;
use crate::{AnalyzeArgs, Cli, CliError, Command, GenArgs, OverheadArgs, SimulateArgs};

const SATURATION_EPSILON: f64 = 0.05;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.common.config.as_deref())?;
    let ctx = RunContext {
        seed: settings.resolve("seed", cli.common.seed, 1)?,
        out: settings.resolve_opt("out", cli.common.out.clone())?,
        format: match cli.common.format {
            Some(f) => f,
            None => settings.resolve("format", None, "intervals".to_string())?.parse()?,
        },
        verbose: cli.common.verbose,
        settings,
    };
    match cli.command {
        Command::Validate { trace } => validate(&ctx, &trace),
        Command::Gen(args) => gen(&ctx, &args),
        Command::Analyze(args) => analyze(&ctx, &args),
        Command::Simulate(args) => simulate(&ctx, &args),
        Command::Overhead(args) => overhead(&ctx, &args),
    }
}

struct RunContext {
    settings: Settings,
    seed: u64,
    out: Option<PathBuf>,
    format: TraceFormat,
    verbose: u8,
}

impl RunContext {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

struct LoadedTrace {
    trace: ContactTrace,
    digest: String,
}

fn load_trace(ctx: &RunContext, path: &Path) -> Result<LoadedTrace, CliError> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Data)?;
    let trace = parse_trace(bytes.as_slice(), ctx.format)
        .with_context(|| format!("{}", path.display()))
        .map_err(CliError::Data)?;
    ctx.log(format!("loaded {}: {}", path.display(), trace_stats(&trace)));
    Ok(LoadedTrace {
        trace,
        digest: hex::encode(Sha256::digest(&bytes)),
    })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn validate(ctx: &RunContext, path: &Path) -> Result<(), CliError> {
    let loaded = load_trace(ctx, path)?;
    println!("{}", trace_stats(&loaded.trace));
    Ok(())
}

fn gen(ctx: &RunContext, args: &GenArgs) -> Result<(), CliError> {
    let s = &ctx.settings;
    let registry = MobilityRegistry::with_defaults();
    let base = if args.model == "community" {
        CommunityConfig::default().mobility
    } else {
        MobilityConfig::default()
    };
    let defaults = ModelParams::default();
    let params = ModelParams {
        cell_rows: s.resolve("rows", args.rows, defaults.cell_rows)?,
        cell_cols: s.resolve("cols", args.cols, defaults.cell_cols)?,
        home_bias: s.resolve("bias", args.bias, defaults.home_bias)?,
    };
    let cfg = MobilityConfig {
        node_count: s.resolve("nodes", args.nodes, base.node_count)?,
        width: s.resolve("width", args.width, base.width)?,
        height: s.resolve("height", args.height, base.height)?,
        v_min: s.resolve("vmin", args.vmin, base.v_min)?,
        v_max: s.resolve("vmax", args.vmax, base.v_max)?,
        comm_range: s.resolve("range", args.range, base.comm_range)?,
        duration: s.resolve("duration", args.duration, base.duration)?,
        tick: s.resolve("tick", args.tick, base.tick)?,
        seed: ctx.seed,
    };
    let mut model = registry.create(&args.model, &params)?;
    let trace = generate(model.as_mut(), &cfg)?;

    let mut header = format!(
        "# nhood gen {} seed={} nodes={} width={} height={} vmin={} vmax={} range={} duration={} tick={}",
        model.name(),
        cfg.seed,
        cfg.node_count,
        cfg.width,
        cfg.height,
        cfg.v_min,
        cfg.v_max,
        cfg.comm_range,
        cfg.duration,
        cfg.tick
    );
    if model.name() == "community" {
        let _ = write!(
            header,
            " rows={} cols={} bias={}",
            params.cell_rows, params.cell_cols, params.home_bias
        );
    }
    let write_all = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(out, "{header}")?;
        write_trace(&trace, &mut *out)?;
        out.flush()
    };
    match &ctx.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            write_all(&mut BufWriter::new(File::create(path)?))?;
            ctx.log(format!("wrote {}: {}", path.display(), trace_stats(&trace)));
        }
        None => write_all(&mut io::stdout().lock())?,
    }
    Ok(())
}

/// Parses `1-5,8,inf`; `inf` stands for `node_count - 1`. Sorted, deduplicated.
fn parse_t_values(spec: &str, node_count: usize) -> Result<Vec<u32>, CliError> {
    let unbounded = node_count.saturating_sub(1).max(1) as u32;
    let bad = || usage(format!("invalid T list `{spec}`"));
    let one = |tok: &str| -> Result<u32, CliError> {
        match tok.trim() {
            "inf" => Ok(unbounded),
            t => match t.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(bad()),
            },
        }
    };
    let mut values = Vec::new();
    for part in spec.split(',') {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (one(lo)?, one(hi)?);
                if lo > hi {
                    return Err(bad());
                }
                values.extend(lo..=hi);
            }
            None => values.push(one(part)?),
        }
    }
    values.sort_unstable();
    values.dedup();
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

fn create_in(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn analyze(ctx: &RunContext, args: &AnalyzeArgs) -> Result<(), CliError> {
    let loaded = load_trace(ctx, &args.trace)?;
    if loaded.trace.node_count() < 2 {
        return Err(CliError::Data(nhood_core::Error::TooFewNodes.into()));
    }
    let tmax: String = ctx.settings.resolve("tmax", args.tmax.clone(), "8".to_string())?;
    let t_values = parse_t_values(&format!("1-{tmax}"), loaded.trace.node_count())?;
    let g = TemporalGraph::build(&loaded.trace);

    let classes = classify_all(&g, HopDistance::Infinite);
    let table = neighborhood_size_table(&g, &t_values);
    let dir = ctx.out_dir();
    let mut w = create_in(&dir, "pair_classes.csv")?;
    classes.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create_in(&dir, "neigh_size_by_T.csv")?;
    write_neighborhood_csv(&table, &mut w)?;
    w.flush()?;

    println!("{}", trace_stats(&loaded.trace));
    for kind in PairKind::ALL {
        println!(
            "{kind}: {} pairs ({:.1}%)",
            classes.count(kind),
            100.0 * classes.fraction(kind)
        );
    }
    let row: Vec<String> = table.iter().map(|(t, m)| format!("T={t}: {m:.2}")).collect();
    println!("mean neighborhood size: {}", row.join(", "));
    if table.len() >= 2 {
        let means: Vec<f64> = table.iter().map(|(_, m)| *m).collect();
        let tt = saturation_threshold(&means, SATURATION_EPSILON)?;
        println!(
            "saturation threshold (growth < {:.0}%): T = {tt}",
            SATURATION_EPSILON * 100.0
        );
    }
    Ok(())
}

fn strategy_config(name: &str, interval: f64, threshold: u32) -> Option<StrategyConfig> {
    (name != "none").then(|| StrategyConfig::new(name, threshold).with_interval(interval))
}

fn simulate(ctx: &RunContext, args: &SimulateArgs) -> Result<(), CliError> {
    let s = &ctx.settings;
    let loaded = load_trace(ctx, &args.trace)?;
    let n = loaded.trace.node_count();
    if n < 2 {
        return Err(CliError::Data(nhood_core::Error::TooFewNodes.into()));
    }
    let t_spec: String = s.resolve("t-values", args.t_values.clone(), "1-5".to_string())?;
    let ttl: Ttl = s.resolve("ttl", args.ttl.clone(), "inf".to_string())?.parse()?;
    let strategy: String = s.resolve("strategy", args.strategy.clone(), "ts".to_string())?;
    let interval = s.resolve("interval", args.interval, DEFAULT_INTERVAL)?;
    let cfg = ExperimentConfig {
        t_values: parse_t_values(&t_spec, n)?,
        messages_per_pair: s.resolve("messages-per-pair", args.messages_per_pair, 10)?,
        seed: ctx.seed,
        ttl,
        strategy: strategy_config(&strategy, interval, 1),
        fixed_creation_time: s.resolve_opt("t0", args.t0)?,
    };
    if let Some(sc) = &cfg.strategy {
        StrategyRegistry::with_defaults().get(&sc.strategy)?;
    }

    let g = TemporalGraph::build(&loaded.trace);
    let output = run_experiment(&g, &cfg)?;
    let dir = ctx.out_dir();
    output.report.write_dir(&dir)?;
    let mut w = create_in(&dir, "messages.csv")?;
    write_records_csv(&output.records, &mut w)?;
    w.flush()?;

    let mut manifest = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(manifest, "{k} = {v}");
    };
    kv("command", "simulate".into());
    kv("version", env!("CARGO_PKG_VERSION").into());
    kv("input", args.trace.display().to_string());
    kv("input_sha256", loaded.digest.clone());
    kv("format", format!("{:?}", ctx.format).to_lowercase());
    kv("nodes", n.to_string());
    kv("horizon", loaded.trace.horizon().to_string());
    kv("seed", cfg.seed.to_string());
    kv(
        "t_values",
        cfg.t_values.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
    );
    kv("messages_per_pair", cfg.messages_per_pair.to_string());
    kv("ttl", cfg.ttl.to_string());
    kv("strategy", strategy.clone());
    kv("interval", interval.to_string());
    kv(
        "t0",
        cfg.fixed_creation_time.map_or("uniform".to_string(), |t| t.to_string()),
    );
    kv("averaging", "per-message over delivered messages".into());
    fs::write(dir.join("manifest.txt"), manifest)?;

    for row in &output.report.waiting {
        println!(
            "T={}: delivered {}/{}, mean wait {}",
            row.threshold,
            row.delivered,
            row.delivered + row.dropped,
            row.mean_wait
        );
    }
    ctx.log(format!("reports written to {}", dir.display()));
    Ok(())
}

fn parse_nodes(spec: &str) -> Result<Vec<NodeId>, CliError> {
    spec.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("invalid node id `{t}`"))))
        .collect()
}

fn parse_pairs(spec: &str) -> Result<Vec<(NodeId, NodeId)>, CliError> {
    spec.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| usage(format!("invalid pair `{p}`, expected src:dst")))?;
            let node = |t: &str| t.trim().parse().map_err(|_| usage(format!("invalid node id `{t}`")));
            Ok((node(a)?, node(b)?))
        })
        .collect()
}

fn overhead(ctx: &RunContext, args: &OverheadArgs) -> Result<(), CliError> {
    let s = &ctx.settings;
    let loaded = load_trace(ctx, &args.trace)?;
    let g = TemporalGraph::build(&loaded.trace);
    let registry = StrategyRegistry::with_defaults();
    let name: String = s.resolve("strategy", args.strategy.clone(), "cs".to_string())?;
    let strategy = registry.get(&name)?;
    let cfg = StrategyConfig::new(name, s.resolve("t", args.threshold, 1)?).with_interval(s.resolve(
        "interval",
        args.interval,
        DEFAULT_INTERVAL,
    )?);
    cfg.validate()?;

    let mut ledgers = Vec::new();
    if strategy.per_message() {
        let ttl: Ttl = s.resolve("ttl", args.ttl.clone(), "inf".to_string())?.parse()?;
        let specs: Vec<MessageSpec> = match s.resolve_opt::<String>("pairs", args.pairs.clone())? {
            Some(pairs) => {
                let t0 = s.resolve("t0", args.t0, 0.0)?;
                parse_pairs(&pairs)?
                    .into_iter()
                    .map(|(a, b)| MessageSpec::new(a, b, t0, cfg.threshold).with_ttl(ttl))
                    .collect()
            }
            None => {
                let exp = ExperimentConfig {
                    t_values: vec![cfg.threshold],
                    messages_per_pair: s.resolve("messages-per-pair", args.messages_per_pair, 1)?,
                    seed: ctx.seed,
                    ttl,
                    strategy: None,
                    fixed_creation_time: s.resolve_opt("t0", args.t0)?,
                };
                generate_messages(&g, &exp)?
                    .into_iter()
                    .map(|m| MessageSpec {
                        threshold: cfg.threshold,
                        ..m
                    })
                    .collect()
            }
        };
        for spec in &specs {
            let run = strategy.run(&g, &ProbeJob::message(spec), cfg.interval, cfg.threshold)?;
            if let Some(r) = &run.record {
                eprintln!(
                    "{} -> {} T={} created {}: {} waiting {} ({} probes, N_o {})",
                    spec.src,
                    spec.dst,
                    spec.threshold,
                    spec.created_at,
                    r.outcome,
                    r.waiting_time,
                    run.ledger.events.len(),
                    run.ledger.total()
                );
            }
            ledgers.push(run.ledger);
        }
    } else {
        let nodes = match s.resolve_opt::<String>("node", args.node.clone())? {
            Some(spec) => parse_nodes(&spec)?,
            None => g.nodes().to_vec(),
        };
        let start = s.resolve("window-start", args.window_start, 0.0)?;
        let end = s.resolve("window-end", args.window_end, g.horizon())?;
        for node in nodes {
            let job = ProbeJob::window(node, start, end);
            ledgers.push(strategy.run(&g, &job, cfg.interval, cfg.threshold)?.ledger);
        }
    }

    match &ctx.out {
        Some(dir) => {
            let mut w = create_in(dir, "ledger.csv")?;
            write_ledgers_csv(&ledgers, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            write_ledgers_csv(&ledgers, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
