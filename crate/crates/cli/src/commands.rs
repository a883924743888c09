use std::fmt::Write as _;
use std::path::Path;

use multijames::ingest::{build_standings, EventRecord, Standings, TiesPolicy};
use multijames::sim::{abandonment_bound, estimate_p_n, SimConfig};
use multijames::tree::{propagate_percentages, validate_tree, CompetitorId};
use multijames::verify::{
    check_all, tabulate, uniform_axis, CandidateFamily, CanonicalFamily, CheckReport,
    Counterexample, GridFamily, GridFile, SampleSpec, GRID_TOLERANCE,
};
use multijames::{
    evaluate, p_n, Contest, ContestClass, Method, MethodOptions, Partition, WinPct,
    DEFAULT_TOLERANCE,
};
use serde_json::{json, Value};

use crate::error::{CliError, EXIT_FAILED};
use crate::formats::{parse_edges, parse_events, read_to_string};
use crate::{
    Cli, Command, GlobalArgs, InferTreeArgs, IngestArgs, OutputFormat, PredictArgs, PropagateArgs,
    SimulateArgs, TabulateArgs, Ties, VerifyArgs,
};

/// What a command prints, in both formats, and its exit code.
pub struct Outcome {
    pub json: Value,
    pub table: String,
    pub exit: u8,
}

impl Outcome {
    fn ok(json: Value, table: String) -> Self {
        Outcome {
            json,
            table,
            exit: 0,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            OutputFormat::Table => self.table.clone(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Predict(args) => predict(g, args),
        Command::Simulate(args) => simulate(g, args),
        Command::InferTree(args) => infer_tree(args),
        Command::Propagate(args) => propagate(args),
        Command::Ingest(args) => ingest(args),
        Command::Verify(args) => verify(g, args),
        Command::Tabulate(args) => tabulate_cmd(args),
    }
}

fn num(x: f64) -> String {
    format!("{x:.15}")
}

fn parse_pct(s: &str) -> Result<WinPct, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("`{s}` is not a number")))?;
    Ok(WinPct::new(x)?)
}

fn ties(t: Ties) -> TiesPolicy {
    match t {
        Ties::Reject => TiesPolicy::Reject,
        Ties::Half => TiesPolicy::Half,
    }
}

fn load_standings(path: &Path, policy: TiesPolicy) -> Result<Standings, CliError> {
    let origin = path.display().to_string();
    let events = parse_events(&read_to_string(path)?, &origin)?;
    let records: Vec<EventRecord> = events.iter().map(|(e, _)| e.clone()).collect();
    build_standings(&records, policy).map_err(|e| {
        let line = events
            .iter()
            .find(|(ev, _)| e.to_string().contains(&format!("`{}`", ev.event_id)))
            .map(|(_, line)| *line);
        match line {
            Some(line) => CliError::Parse(format!("{origin}: line {line}: {e}")),
            None => CliError::Parse(format!("{origin}: {e}")),
        }
    })
}

fn contest_from_args(args: &PredictArgs) -> Result<Contest, CliError> {
    if let Some(path) = &args.events {
        let standings = load_standings(path, ties(args.ties))?;
        for w in standings.warnings() {
            eprintln!("warning: {w}");
        }
        let id = |s: &str| CompetitorId::new(s.trim()).map_err(CliError::from);
        let protagonist = id(&args.protagonist)?;
        let opponents = args
            .opponents
            .iter()
            .map(|s| id(s))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(standings.contest_for(&protagonist, &opponents)?);
    }
    let a = parse_pct(&args.protagonist)?;
    let b = args
        .opponents
        .iter()
        .map(|s| parse_pct(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Contest::new(a, b)?)
}

fn contest_json(c: &Contest) -> (Value, Value) {
    (
        json!(c.protagonist().value()),
        json!(c.opponents().iter().map(|b| b.value()).collect::<Vec<_>>()),
    )
}

fn predict(g: &GlobalArgs, args: &PredictArgs) -> Result<Outcome, CliError> {
    let c = contest_from_args(args)?;
    if let ContestClass::Undefined(reason) = c.classify() {
        return Err(CliError::Undefined(reason));
    }
    let options = MethodOptions {
        pivot: args.pivot.map(WinPct::new).transpose()?,
        partition: args
            .partition
            .as_deref()
            .map(|s| Partition::parse_one_based(s, c.n()))
            .transpose()?,
    };
    let (a, b) = contest_json(&c);

    if !args.all_methods {
        let method: Method = args.method.parse()?;
        let p = evaluate(method, &c, &options)?.value();
        let table = format!("method       {method}\nprobability  {}\n", num(p));
        let json =
            json!({"protagonist": a, "opponents": b, "method": method.name(), "probability": p});
        return Ok(Outcome::ok(json, table));
    }

    let mut results = Vec::new();
    let mut table = String::new();
    let mut values = Vec::new();
    for m in Method::ALL {
        match evaluate(m, &c, &options) {
            Ok(p) => {
                values.push(p.value());
                writeln!(table, "{:<13}{}", m.name(), num(p.value())).unwrap();
                results.push(json!({"method": m.name(), "probability": p.value()}));
            }
            Err(e) => {
                writeln!(table, "{:<13}n/a ({e})", m.name()).unwrap();
                results
                    .push(json!({"method": m.name(), "probability": null, "error": e.to_string()}));
            }
        }
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let discrepancy = max - min;
    let tol = g.tol.unwrap_or(DEFAULT_TOLERANCE);
    writeln!(table, "max discrepancy {discrepancy:e}").unwrap();
    let json = json!({
        "protagonist": a,
        "opponents": b,
        "results": results,
        "max_discrepancy": discrepancy,
        "tolerance": tol,
    });
    let mut outcome = Outcome::ok(json, table);
    if discrepancy > tol {
        outcome.exit = EXIT_FAILED;
    }
    Ok(outcome)
}

fn simulate(g: &GlobalArgs, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let c = Contest::from_values(args.protagonist, &args.opponents)?;
    if let ContestClass::Undefined(reason) = c.classify() {
        return Err(CliError::Undefined(reason));
    }
    let cfg = SimConfig::with_max_rounds(args.trials, args.max_rounds, g.seed)?;
    let r = estimate_p_n(&c, &cfg)?;
    let closed = p_n(&c)?.value();
    let estimate = r.win_probability_estimate.value();
    let z = (r.standard_error > 0.0).then(|| (estimate - closed) / r.standard_error);

    let mut competitors = Vec::new();
    let mut table = String::new();
    writeln!(table, "estimate         {}", num(estimate)).unwrap();
    writeln!(table, "standard error   {}", num(r.standard_error)).unwrap();
    writeln!(table, "closed form      {}", num(closed)).unwrap();
    match z {
        Some(z) => writeln!(table, "z-score          {z:.3}").unwrap(),
        None => writeln!(table, "z-score          n/a").unwrap(),
    }
    writeln!(table, "trials completed {}", r.trials_completed).unwrap();
    writeln!(table, "trials abandoned {}", r.trials_abandoned).unwrap();
    writeln!(
        table,
        "competitor  pct                frequency          closed form"
    )
    .unwrap();
    for (i, s) in c.competitors().enumerate() {
        let expected = p_n(&c.rotate(i))?.value();
        let freq = r.frequency(i);
        writeln!(
            table,
            "{i:<12}{:<19}{:<19}{}",
            num(s.value()),
            num(freq),
            num(expected)
        )
        .unwrap();
        competitors.push(json!({
            "index": i,
            "pct": s.value(),
            "wins": r.per_competitor_wins[i],
            "frequency": freq,
            "standard_error": r.frequency_standard_error(i),
            "closed_form": expected,
        }));
    }
    let (a, b) = contest_json(&c);
    let json = json!({
        "protagonist": a,
        "opponents": b,
        "seed": g.seed,
        "trials": cfg.trials,
        "max_rounds": cfg.max_rounds_per_trial,
        "estimate": estimate,
        "standard_error": r.standard_error,
        "closed_form": closed,
        "z_score": z,
        "trials_completed": r.trials_completed,
        "trials_abandoned": r.trials_abandoned,
        "abandonment_bound": abandonment_bound(&c, cfg.max_rounds_per_trial),
        "competitors": competitors,
    });
    Ok(Outcome::ok(json, table))
}

fn load_graph(path: &Path) -> Result<multijames::CompetitionGraph, CliError> {
    parse_edges(&read_to_string(path)?, &path.display().to_string())
}

fn infer_tree(args: &InferTreeArgs) -> Result<Outcome, CliError> {
    let mut graph = load_graph(&args.edges)?;
    if let Some(root) = &args.root {
        graph = graph.with_root(CompetitorId::new(root.as_str())?)?;
    }
    let tree = validate_tree(&graph)?;
    let p = tree.win_probability().value();
    let order: Vec<&str> = tree.order().iter().map(CompetitorId::as_str).collect();
    let table = format!(
        "root         {}\ncompetitors  {}\nprobability  {}\n",
        graph.root(),
        order.len(),
        num(p)
    );
    let json = json!({"root": graph.root(), "competitors": order, "probability": p});
    Ok(Outcome::ok(json, table))
}

fn propagate(args: &PropagateArgs) -> Result<Outcome, CliError> {
    let (name, pct) = args.anchor.split_once('=').ok_or_else(|| {
        CliError::Parse(format!(
            "--anchor must look like NAME=PCT, got `{}`",
            args.anchor
        ))
    })?;
    let anchor = CompetitorId::new(name.trim())?;
    let pct = parse_pct(pct)?;
    let graph = load_graph(&args.edges)?;
    let solved = propagate_percentages(&graph, &anchor, pct)?;
    let mut table = String::new();
    let mut rows = Vec::new();
    for (id, p) in solved.solved() {
        writeln!(table, "{:<16}{}", id.as_str(), num(p.value())).unwrap();
        rows.push(json!({"competitor": id, "pct": p.value()}));
    }
    let json = json!({"anchor": anchor, "anchor_pct": pct.value(), "percentages": rows});
    Ok(Outcome::ok(json, table))
}

fn ingest(args: &IngestArgs) -> Result<Outcome, CliError> {
    let policy = ties(args.ties);
    let standings = load_standings(&args.events, policy)?;
    let warnings = standings.warnings();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let rows = standings.rows();
    let mut table = String::from("competitor      wins     losses   pct\n");
    for r in &rows {
        let pct = r.pct.map(num).unwrap_or_else(|| "n/a".to_string());
        writeln!(
            table,
            "{:<16}{:<9}{:<9}{pct}",
            r.competitor.as_str(),
            r.wins,
            r.losses
        )
        .unwrap();
    }
    let json = json!({
        "ties": policy,
        "tied_games": standings.tied_games(),
        "competitors": rows,
        "pairwise": standings.pair_rows(),
        "warnings": warnings,
    });
    Ok(Outcome::ok(json, table))
}

enum FamilySource {
    Builtin,
    Grid(GridFamily),
    Counterexample(Counterexample),
}

impl FamilySource {
    fn parse(spec: &str, allow_grid: bool) -> Result<Self, CliError> {
        if spec == "builtin" {
            return Ok(FamilySource::Builtin);
        }
        if let Some(name) = spec.strip_prefix("counterexample:") {
            return Ok(FamilySource::Counterexample(name.parse()?));
        }
        if let Some(path) = spec.strip_prefix("grid:") {
            if !allow_grid {
                return Err(CliError::Parse("grid families cannot be tabulated".into()));
            }
            let text = read_to_string(Path::new(path))?;
            let file: GridFile = serde_json::from_str(&text).map_err(|e| {
                CliError::Parse(format!(
                    "{path}: line {}, column {}: {e}",
                    e.line(),
                    e.column()
                ))
            })?;
            return Ok(FamilySource::Grid(GridFamily::new(path, file)?));
        }
        Err(CliError::Parse(format!(
            "unknown family `{spec}` (expected builtin, grid:PATH or counterexample:NAME)"
        )))
    }

    fn family(&self) -> &dyn CandidateFamily {
        match self {
            FamilySource::Builtin => &CanonicalFamily,
            FamilySource::Grid(g) => g,
            FamilySource::Counterexample(c) => c,
        }
    }
}

fn verify(g: &GlobalArgs, args: &VerifyArgs) -> Result<Outcome, CliError> {
    let source = FamilySource::parse(&args.family, true)?;
    let family = source.family();
    let (default_min, default_max, default_tol) = match family.supported_sizes() {
        Some(sizes) => (
            sizes.iter().copied().min().unwrap_or(1),
            sizes.iter().copied().max().unwrap_or(1),
            GRID_TOLERANCE,
        ),
        None => (1, 8, DEFAULT_TOLERANCE),
    };
    let spec = SampleSpec::new(
        args.n_min.unwrap_or(default_min),
        args.n_max.unwrap_or(default_max),
        args.samples,
        g.seed,
        g.tol.unwrap_or(default_tol),
    )?;
    let reports = check_all(family, &spec);
    let passed = reports.iter().all(|r| r.passed);
    let mut table = String::new();
    for r in &reports {
        writeln!(table, "{}", report_line(r)).unwrap();
    }
    writeln!(
        table,
        "{}: {} of {} checks passed",
        family.name(),
        reports.iter().filter(|r| r.passed).count(),
        reports.len()
    )
    .unwrap();
    let json = json!({
        "family": family.name(),
        "sampling": spec,
        "checks": reports,
        "passed": passed,
    });
    let mut outcome = Outcome::ok(json, table);
    if !passed {
        outcome.exit = EXIT_FAILED;
    }
    Ok(outcome)
}

fn report_line(r: &CheckReport) -> String {
    let status = if r.passed { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{status} {:<22} max_violation={:<24e} samples={}",
        r.name, r.max_violation, r.samples
    );
    if !r.passed {
        if let Some(w) = &r.worst {
            write!(line, " witness: {w}").unwrap();
        }
        if let Some(e) = &r.error {
            write!(line, " error: {e}").unwrap();
        }
    }
    line
}

fn tabulate_cmd(args: &TabulateArgs) -> Result<Outcome, CliError> {
    let source = FamilySource::parse(&args.family, false)?;
    if args.points < 2 {
        return Err(CliError::Parse("--points must be at least 2".into()));
    }
    if args.sizes.iter().any(|&n| n == 0 || n > 3) {
        return Err(CliError::Parse(
            "grid tables are supported for n in 1..=3".into(),
        ));
    }
    let axis = uniform_axis(args.points);
    let file = GridFile {
        tables: args
            .sizes
            .iter()
            .map(|&n| tabulate(source.family(), n, &axis))
            .collect(),
    };
    let text = serde_json::to_string(&file).expect("grid serializes");
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let summary = format!(
                "wrote {} table(s) with {} points per axis to {}\n",
                file.tables.len(),
                args.points,
                path.display()
            );
            Ok(Outcome::ok(
                json!({"path": path.display().to_string(), "tables": file.tables.len(), "points": args.points}),
                summary,
            ))
        }
        None => {
            let value: Value = serde_json::from_str(&text).expect("just serialized");
            Ok(Outcome::ok(value, text + "\n"))
        }
    }
}
