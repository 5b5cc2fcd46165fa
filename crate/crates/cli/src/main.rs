mod args;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use callpath::bench::{emit_report, load_scenario, run_scenario_with, ReportFormat, RunOptions};
use callpath::graph::InMemoryGraph;
use callpath::ingest::{
    classify_counts, export_jsonl, generate_synthetic, import_jsonl, reachable_count, EdgeModel, SyntheticSpec,
};
use callpath::search::{KindSet, TraceAction};
use callpath::store::{build_store, DiskGraph, MAGIC};
use callpath::{
    search, Algorithm, CacheConfig, CallGraph, ClassKind, Direction, FrontierPolicy, NodeId, SearchConfig,
    SearchResult, SearchStatus,
};
use clap::Parser;
use serde_json::json;

use args::*;

/// Exit 2: bad invocation, detected before touching any input.
/// Exit 1: the inputs or the operation failed.
enum Failure {
    Usage(String),
    Domain(String),
}

type Outcome = Result<(), Failure>;

/// `println!` that ends the process quietly when stdout is a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

fn emit(text: &str) {
    let mut stdout = io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        exit_on_stdout_error(e);
    }
}

fn exit_on_stdout_error(e: io::Error) -> ! {
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    eprintln!("error: stdout: {e}");
    std::process::exit(1);
}

fn domain(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Failure {
    Failure::Domain(format!("{context}: {err}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let default_level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level)).init();

    let result = validate(&cli).and_then(|()| dispatch(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn validate(cli: &Cli) -> Outcome {
    let format = cli.format;
    let allow = |ok: &[OutputFormat]| match format {
        Some(f) if !ok.contains(&f) => {
            Err(Failure::Usage(format!("--format {} is not available for this command", format_name(f))))
        }
        _ => Ok(()),
    };
    match &cli.command {
        Command::Import(_) | Command::BuildStore(_) | Command::Generate(_) => {
            allow(&[OutputFormat::Text, OutputFormat::Json])
        }
        Command::Reach(_) => allow(&[OutputFormat::Text, OutputFormat::Json]),
        Command::Path(p) => {
            allow(&[OutputFormat::Text, OutputFormat::Json])?;
            search_config(p).map(|_| ())
        }
        Command::Bench(b) => {
            if format == Some(OutputFormat::Text) {
                return Err(Failure::Usage("bench reports are csv, json or markdown".into()));
            }
            bench_format(format, b.out.as_deref()).map(|_| ())
        }
    }
}

fn format_name(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Text => "text",
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
        OutputFormat::Markdown => "markdown",
    }
}

fn is_json(cli: &Cli) -> bool {
    cli.format == Some(OutputFormat::Json)
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Import(a) => cmd_import(cli, a),
        Command::Generate(a) => cmd_generate(cli, a),
        Command::BuildStore(a) => cmd_build_store(cli, a),
        Command::Reach(a) => cmd_reach(cli, a),
        Command::Path(a) => cmd_path(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
    }
}

fn search_config(p: &PathArgs) -> Result<SearchConfig, Failure> {
    let postpone = p.algo == AlgoArg::Postpone;
    if !postpone {
        for (set, flag) in [
            (p.delay.is_some(), "--delay"),
            (p.probe_only, "--probe-only"),
            (p.postpone_kinds.is_some(), "--postpone-kinds"),
        ] {
            if set {
                return Err(Failure::Usage(format!("{flag} requires --algo postpone")));
            }
        }
    }
    if p.algo == AlgoArg::Uni && p.frontier.is_some() {
        return Err(Failure::Usage("--frontier applies to bidirectional searches only".into()));
    }
    if p.probe_only && p.delay.is_some() {
        return Err(Failure::Usage("--probe-only never holds nodes; drop --delay".into()));
    }
    let mut config = match p.algo {
        AlgoArg::Uni => SearchConfig::unidirectional(),
        AlgoArg::Balanced => SearchConfig::a4(),
        AlgoArg::Postpone if p.probe_only => SearchConfig::a3(),
        AlgoArg::Postpone => SearchConfig::a1(),
    };
    if let Some(d) = p.delay {
        config.delay_steps = d;
    }
    if let Some(kinds) = &p.postpone_kinds {
        let mut set = KindSet::default();
        for part in kinds.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            set.insert(part.parse::<ClassKind>().map_err(|e| Failure::Usage(format!("--postpone-kinds: {e}")))?);
        }
        config.postpone_kinds = set;
    }
    if let Some(f) = p.frontier {
        config.frontier_policy = match f {
            FrontierArg::Larger => FrontierPolicy::LargerFirst,
            FrontierArg::Smaller => FrontierPolicy::SmallerFirst,
        };
    }
    config.trace = p.trace;
    Ok(config)
}

fn bench_format(format: Option<OutputFormat>, out: Option<&Path>) -> Result<ReportFormat, Failure> {
    Ok(match format {
        Some(OutputFormat::Csv) => ReportFormat::Csv,
        Some(OutputFormat::Json) => ReportFormat::Json,
        Some(OutputFormat::Markdown) => ReportFormat::Markdown,
        Some(OutputFormat::Text) => return Err(Failure::Usage("bench reports are csv, json or markdown".into())),
        None => match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) => ext.parse().unwrap_or(ReportFormat::Csv),
            None => ReportFormat::Csv,
        },
    })
}

enum Loaded {
    Memory(InMemoryGraph),
    Disk(Box<DiskGraph>),
}

impl Loaded {
    fn graph(&self) -> &dyn CallGraph {
        match self {
            Loaded::Memory(g) => g,
            Loaded::Disk(g) => g.as_ref(),
        }
    }
}

fn is_store(path: &Path) -> Result<bool, Failure> {
    let mut file = File::open(path).map_err(|e| domain(path.display(), e))?;
    let mut head = [0u8; 4];
    let mut filled = 0;
    while filled < head.len() {
        match file.read(&mut head[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) => return Err(domain(path.display(), e)),
        }
    }
    Ok(filled == 4 && head == MAGIC)
}

fn load_jsonl(path: &Path) -> Result<InMemoryGraph, Failure> {
    let file = File::open(path).map_err(|e| domain(path.display(), e))?;
    import_jsonl(BufReader::new(file)).map_err(|e| domain(path.display(), e))
}

fn load(path: &Path, cache: CacheConfig) -> Result<Loaded, Failure> {
    if is_store(path)? {
        DiskGraph::open(path, cache).map(|d| Loaded::Disk(Box::new(d))).map_err(|e| Failure::Domain(e.to_string()))
    } else {
        load_jsonl(path).map(Loaded::Memory)
    }
}

fn resolve(graph: &dyn CallGraph, flag: &str, text: &str) -> Result<NodeId, Failure> {
    let fail = |e: &dyn std::fmt::Display| Failure::Domain(format!("{flag} `{text}`: {e}"));
    if !text.contains('.') {
        if let Ok(id) = text.parse::<u32>() {
            graph.check_node(NodeId(id)).map_err(|e| fail(&e))?;
            return Ok(NodeId(id));
        }
    }
    graph.resolve_name(text).map_err(|e| fail(&e))
}

fn name_of(graph: &dyn CallGraph, id: NodeId) -> Result<String, Failure> {
    graph.method_meta(id).map(|m| m.qualified_name()).map_err(|e| Failure::Domain(e.to_string()))
}

fn write_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    let describe = |p: Option<&Path>| p.map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into());
    let result = match path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            if let Err(e) = write(&mut w).and_then(|()| w.flush()) {
                exit_on_stdout_error(e);
            }
            Ok(())
        }
    };
    result.map_err(|e| domain(describe(path), e))
}

fn print_json(value: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn cmd_import(cli: &Cli, a: &ImportArgs) -> Outcome {
    let g = load_jsonl(&a.input)?;
    if let Some(out) = &a.output {
        let file = File::create(out).map_err(|e| domain(out.display(), e))?;
        export_jsonl(&g, BufWriter::new(file)).map_err(|e| domain(out.display(), e))?;
    }
    if is_json(cli) {
        print_json(&json!({"nodes": g.node_count(), "edges": g.edge_count()}));
    } else if !cli.quiet {
        out!("{}: {} nodes, {} edges", a.input.display(), g.node_count(), g.edge_count());
    }
    Ok(())
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs) -> Outcome {
    let edges = match (a.edge_prob, a.out_degree) {
        (Some(p), None) => EdgeModel::EdgeProbability(p),
        (None, Some(k)) => EdgeModel::OutDegree(k),
        _ => return Err(Failure::Usage("give exactly one of --edge-prob and --out-degree".into())),
    };
    let hub_kind = a.hub_kind.parse::<ClassKind>().map_err(|e| Failure::Usage(format!("--hub-kind: {e}")))?;
    let spec = SyntheticSpec {
        node_count: a.nodes,
        edges,
        hub_count: a.hubs,
        hub_indegree: a.hub_indegree,
        hub_kind,
        seed: a.seed,
        acyclic: a.acyclic,
    };
    let out = generate_synthetic(&spec).map_err(|e| domain("generate", e))?;
    write_output(a.output.as_deref(), |w| export_jsonl(&out.graph, w).map_err(|e| io::Error::other(e.to_string())))?;
    if a.output.is_some() {
        let hubs: Vec<u32> = out.hubs.iter().map(|h| h.0).collect();
        if is_json(cli) {
            print_json(&json!({"nodes": out.graph.node_count(), "edges": out.graph.edge_count(), "hubs": hubs}));
        } else if !cli.quiet {
            out!("{} nodes, {} edges, {} hubs", out.graph.node_count(), out.graph.edge_count(), hubs.len());
        }
    }
    Ok(())
}

fn cmd_build_store(cli: &Cli, a: &BuildStoreArgs) -> Outcome {
    let loaded = load(&a.graph, CacheConfig::default())?;
    let summary = build_store(loaded.graph(), &a.output).map_err(|e| Failure::Domain(e.to_string()))?;
    if is_json(cli) {
        print_json(&json!({
            "nodes": summary.node_count,
            "edges": summary.edge_count,
            "bytes": summary.byte_size,
        }));
    } else if !cli.quiet {
        out!(
            "{}: {} nodes, {} edges, {} bytes",
            a.output.display(),
            summary.node_count,
            summary.edge_count,
            summary.byte_size
        );
    }
    Ok(())
}

fn cmd_reach(cli: &Cli, a: &ReachArgs) -> Outcome {
    let loaded = load(&a.graph, CacheConfig::default())?;
    let g = loaded.graph();
    let count = |id, dir| reachable_count(g, id, dir).map_err(|e| Failure::Domain(e.to_string()));
    if let Some(node) = &a.node {
        let id = resolve(g, "--node", node)?;
        let (f, b) = (count(id, Direction::Forward)?, count(id, Direction::Backward)?);
        let name = name_of(g, id)?;
        if is_json(cli) {
            print_json(&json!({"node": name, "id": id.0, "forward": f, "backward": b}));
        } else {
            out!("{name}: forward {f}, backward {b}");
        }
        return Ok(());
    }
    let (from, to) = (a.from.as_deref().unwrap_or_default(), a.to.as_deref().unwrap_or_default());
    let (s, t) = (resolve(g, "--from", from)?, resolve(g, "--to", to)?);
    let (f, b) = (count(s, Direction::Forward)?, count(t, Direction::Backward)?);
    let regime = classify_counts(f, b, g.node_count());
    let (sn, tn) = (name_of(g, s)?, name_of(g, t)?);
    if is_json(cli) {
        print_json(&json!({
            "from": sn, "from_id": s.0, "forward": f,
            "to": tn, "to_id": t.0, "backward": b,
            "regime": regime.as_str(), "node_count": g.node_count(),
        }));
    } else {
        out!("from {sn}: forward {f}");
        out!("to {tn}: backward {b}");
        out!("regime: {regime} (of {} nodes)", g.node_count());
    }
    Ok(())
}

fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Unidirectional => "unidirectional",
        Algorithm::BidirBalanced => "bidir_balanced",
        Algorithm::BidirPostpone => "bidir_postpone",
    }
}

fn cmd_path(cli: &Cli, a: &PathArgs) -> Outcome {
    let config = search_config(a)?;
    let mut cache = CacheConfig::default();
    if let Some(n) = a.cache_size {
        cache.max_cached_nodes = n;
    }
    if let Some(us) = a.latency_us {
        cache.latency_per_miss = Duration::from_micros(us);
    }
    let loaded = load(&a.graph, cache)?;
    if matches!(loaded, Loaded::Memory(_)) && (a.cache_size.is_some() || a.latency_us.is_some()) {
        log::warn!("{}: cache flags apply to store files only", a.graph.display());
    }
    let g = loaded.graph();
    let (s, t) = (resolve(g, "--from", &a.from)?, resolve(g, "--to", &a.to)?);
    let r = search(g, s, t, &config).map_err(|e| Failure::Domain(e.to_string()))?;
    let stats = match &loaded {
        Loaded::Disk(d) => Some(d.access_stats()),
        Loaded::Memory(_) => None,
    };
    if is_json(cli) {
        print_json(&path_json(g, &config, &r, stats)?);
    } else {
        print_path_text(g, &config, &r, stats)?;
    }
    Ok(())
}

fn path_json(
    g: &dyn CallGraph,
    config: &SearchConfig,
    r: &SearchResult,
    stats: Option<callpath::AccessStats>,
) -> Result<serde_json::Value, Failure> {
    let mut edges = Vec::new();
    for e in &r.path {
        edges.push(json!({
            "caller": name_of(g, e.caller)?, "caller_id": e.caller.0,
            "callee": name_of(g, e.callee)?, "callee_id": e.callee.0,
        }));
    }
    let meeting = match r.meeting_point {
        Some(m) => json!(name_of(g, m)?),
        None => serde_json::Value::Null,
    };
    let mut v = json!({
        "status": r.status.as_str(),
        "algorithm": algorithm_name(config.algorithm),
        "frontier_policy": config.frontier_policy.as_str(),
        "length": r.length,
        "path": edges,
        "meeting_point": meeting,
        "visited_forward": r.visited_forward,
        "visited_backward": r.visited_backward,
        "postponements": r.postponements,
        "probe_count": r.probe_count,
        "steps": r.steps,
    });
    if config.trace {
        v["trace"] = serde_json::to_value(&r.trace).expect("trace serializes");
    }
    if let Some(s) = stats {
        v["store"] = json!({
            "meta_reads": s.meta_reads,
            "adjacency_reads": s.adjacency_reads,
            "cache_hits": s.cache_hits,
            "cache_misses": s.cache_misses,
        });
    }
    Ok(v)
}

fn print_path_text(
    g: &dyn CallGraph,
    config: &SearchConfig,
    r: &SearchResult,
    stats: Option<callpath::AccessStats>,
) -> Outcome {
    out!("status: {}", r.status.as_str());
    out!("length: {}", r.length);
    for e in &r.path {
        out!("  {} -> {}", name_of(g, e.caller)?, name_of(g, e.callee)?);
    }
    if r.status == SearchStatus::Found {
        if let Some(m) = r.meeting_point {
            out!("meeting_point: {}", name_of(g, m)?);
        }
    }
    out!("visited_forward: {}", r.visited_forward);
    out!("visited_backward: {}", r.visited_backward);
    out!("postponements: {}", r.postponements);
    out!("probe_count: {}", r.probe_count);
    out!("steps: {}", r.steps);
    if let Some(s) = stats {
        out!(
            "store: meta_reads {}, adjacency_reads {}, cache_hits {}, cache_misses {}",
            s.meta_reads,
            s.adjacency_reads,
            s.cache_hits,
            s.cache_misses
        );
    }
    if config.trace {
        for e in &r.trace {
            let dir = match e.direction {
                Direction::Forward => "forward",
                Direction::Backward => "backward",
            };
            let action = match e.action {
                TraceAction::Expanded => "expanded".to_string(),
                TraceAction::Postponed => "postponed".to_string(),
                TraceAction::Waiting { remaining } => format!("waiting ({remaining} left)"),
            };
            out!("step {} {dir} {} {action}", e.step, name_of(g, e.node)?);
        }
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Outcome {
    let format = bench_format(cli.format, a.out.as_deref())?;
    let scenario = load_scenario(&a.scenario).map_err(|e| Failure::Domain(e.to_string()))?;
    let report = run_scenario_with(&scenario, RunOptions { parallel: a.parallel })
        .map_err(|e| domain(a.scenario.display(), e))?;
    let text = emit_report(&report, format);
    match &a.out {
        Some(out) => {
            write_file(out, &text)?;
            if !cli.quiet {
                eprintln!("{}: {} rows", out.display(), report.rows.len());
            }
        }
        None => emit(&text),
    }
    Ok(())
}

fn write_file(path: &PathBuf, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| domain(path.display(), e))
}
