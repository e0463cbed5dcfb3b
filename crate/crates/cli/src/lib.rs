//! Argument handling and dispatch for the `gapforge` binary.
//!
//! [`run`] returns the process exit code: 0 on success with every verdict
//! holding, 1 when a verify/scan/enumerate/cheeger verdict fails, 2 on usage or
//! input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gapforge::bottleneck::{self, cheeger_check};
use gapforge::bounds;
use gapforge::coupling::{
    build_kernel, coalescence_tail, common_neighbor_pairs, coupling_dominates_tv, d2, simulate_coupling,
    verify_marginals, CouplingKind,
};
use gapforge::numfmt;
use gapforge::report::{plot_data, reports_to_csv, CSV_HEADER};
use gapforge::scan::{scan, ScanConfig, ScanSummary, Sweep};
use gapforge::spectra;
use gapforge::{build_family, parse_edge_list, BoundReport, Error, Graph, GraphFamilySpec, TheoremId};

pub const DEFAULT_TMAX: usize = 50;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser, Debug)]
#[command(name = "gapforge", version, about = "Spectral gaps of random walks on graphs and their complements")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Spectral gap of the walk.
    Gap {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Use the lazy walk.
        #[arg(long)]
        lazy: bool,
    },
    /// Eigenvalues, gap, λ* and stationary distribution.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        lazy: bool,
    },
    /// Complement graph.
    Complement {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact bottleneck ratio and the Cheeger sandwich.
    Cheeger {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coupling kernel: marginal check and coalescence tail.
    Coupling {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Start pair `x,y` (default `0,n-1`).
        #[arg(long, value_parser = parse_pair)]
        start: Option<(usize, usize)>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Check one theorem on one instance.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        params: CheckParams,
        #[arg(long)]
        id: TheoremId,
        /// Split point for `--id join` on an input graph.
        #[arg(long)]
        n1: Option<usize>,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Run checks over a sweep of instances.
    Scan(ScanArgs),
    /// Run checks over every labelled graph on `n` vertices.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        check: Vec<TheoremId>,
        #[command(flatten)]
        params: CheckParams,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a named family and print it.
    Family {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// Named family, e.g. complete, path, g_rm, erdos_renyi.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Edge-list file.
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long = "type", default_value = "1", value_parser = parse_kind)]
    kind: CouplingKind,
    #[arg(long = "set", value_enum, default_value_t = PairSetChoice::D2)]
    set: PairSetChoice,
    #[arg(long, default_value_t = DEFAULT_TMAX)]
    tmax: usize,
}

#[derive(Args, Debug)]
struct CheckParams {
    #[arg(long = "L", default_value_t = 0.25)]
    l: f64,
    #[arg(long = "U", default_value_t = 0.75)]
    u: f64,
    /// `k_cap` for the large-degree check.
    #[arg(long = "K", default_value_t = 2)]
    k_cap: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Family to sweep; list-valued parameters are crossed.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_parser = parse_list)]
    k: Option<List>,
    #[arg(long, value_parser = parse_list)]
    r: Option<List>,
    #[arg(long, value_parser = parse_list)]
    m: Option<List>,
    #[arg(long, value_parser = parse_list)]
    n: Option<List>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random instances to draw.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Single theorem; required for grm, counterexample_family and join.
    #[arg(long, conflicts_with = "check")]
    id: Option<TheoremId>,
    #[arg(long, value_delimiter = ',')]
    check: Vec<TheoremId>,
    #[command(flatten)]
    params: CheckParams,
    /// Emit two-column plot data `x,y` instead of reports.
    #[arg(long, value_parser = parse_plot)]
    plot: Option<(String, String)>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PairSetChoice {
    D2,
    Common,
}

fn parse_kind(s: &str) -> Result<CouplingKind, String> {
    match s {
        "1" => Ok(CouplingKind::Type1),
        "2" => Ok(CouplingKind::Type2),
        _ => Err(format!("expected 1 or 2, got `{s}`")),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `x,y`")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_plot(s: &str) -> Result<(String, String), String> {
    let (a, b) = s.split_once(',').ok_or("expected `x,y`")?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

#[derive(Clone, Debug)]
struct List(Vec<usize>);

/// `3`, `3,5,8` or `4..=7` / `4..7` (inclusive).
fn parse_list(s: &str) -> Result<List, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok(List((a..=b).collect()));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(List)
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure(msg.into()))
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.ok_or_else(|| Failure(format!("family `{family}` needs --{flag}")))
}

fn family_spec(name: &str, input: &InputArgs) -> CliResult<GraphFamilySpec> {
    let k = || need(input.k, "k", name);
    Ok(match name {
        "empty" => GraphFamilySpec::Empty { k: k()? },
        "complete" => GraphFamilySpec::Complete { k: k()? },
        "path" => GraphFamilySpec::Path { k: k()? },
        "cycle" => GraphFamilySpec::Cycle { k: k()? },
        "star" => GraphFamilySpec::Star { k: k()? },
        "wheel" => GraphFamilySpec::Wheel { k: k()? },
        "complete_bipartite" => GraphFamilySpec::CompleteBipartite { s1: k()?, s2: need(input.m, "m", name)? },
        "two_cliques" | "two_cliques_shared_vertex" => GraphFamilySpec::TwoCliquesSharedVertex { k: k()? },
        "lollipop" => GraphFamilySpec::Lollipop { k: k()?, r: need(input.r, "r", name)? },
        "barbell" => GraphFamilySpec::Barbell { k: k()?, r: need(input.r, "r", name)? },
        "grm" | "g_rm" => GraphFamilySpec::Grm { r: need(input.r, "r", name)?, m: need(input.m, "m", name)? },
        "join" => GraphFamilySpec::Join {
            left: Box::new(GraphFamilySpec::Empty { k: k()? }),
            right: Box::new(GraphFamilySpec::Empty { k: need(input.m, "m", name)? }),
        },
        "erdos_renyi" => GraphFamilySpec::ErdosRenyi {
            n: need(input.n, "n", name)?,
            p: need(input.p, "p", name)?,
            seed: input.seed,
        },
        other => return usage(format!("unknown family `{other}`")),
    })
}

fn load_graph(input: &InputArgs) -> CliResult<Graph> {
    match (&input.family, &input.input) {
        (Some(_), Some(_)) => usage("give exactly one of --family and --in"),
        (None, None) => usage("no input: give --family or --in"),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))?;
            Ok(parse_edge_list(&text)?)
        }
        (Some(name), None) => Ok(build_family(&family_spec(name, input)?)?),
    }
}

fn has_input(input: &InputArgs) -> bool {
    input.family.is_some() || input.input.is_some()
}

/// Minimal JSON object writer that keeps the fixed-precision number rendering.
#[derive(Default)]
struct JsonObject(Vec<(String, String)>);

impl JsonObject {
    fn raw(mut self, key: &str, json: String) -> Self {
        self.0.push((key.to_string(), json));
        self
    }

    fn num(self, key: &str, x: f64) -> Self {
        self.raw(key, numfmt::json_number(x))
    }

    fn int(self, key: &str, x: impl std::fmt::Display) -> Self {
        self.raw(key, x.to_string())
    }

    fn text(self, key: &str, s: &str) -> Self {
        self.raw(key, serde_json::to_string(s).expect("string serializes"))
    }

    fn finish(self) -> String {
        let body: Vec<String> = self
            .0
            .into_iter()
            .map(|(k, v)| format!("{}:{v}", serde_json::to_string(&k).expect("key serializes")))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

fn report_text(r: &BoundReport) -> String {
    format!(
        "{} n={} hypothesis_ok={} bound={} measured={} margin={} holds={} {}\n",
        r.theorem_id,
        r.n,
        r.hypothesis_ok,
        numfmt::csv_cell(r.bound_value),
        numfmt::csv_cell(r.measured_value),
        numfmt::csv_cell(r.margin),
        r.holds,
        r.params_cell()
    )
}

fn render_reports(reports: &[BoundReport], format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Json => reports.iter().map(|r| r.to_json() + "\n").collect(),
        Format::Csv => reports_to_csv(reports)?,
        Format::Text => reports.iter().map(report_text).collect(),
    })
}

fn edges_json(g: &Graph) -> String {
    let e: Vec<String> = g.edges().map(|(u, v)| format!("[{u},{v}]")).collect();
    format!("[{}]", e.join(","))
}

fn render_graph(g: &Graph, label: Option<&str>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut o = JsonObject::default();
            if let Some(l) = label {
                o = o.text("family", l);
            }
            o.int("n", g.n()).int("edges_count", g.edge_count()).raw("edges", edges_json(g)).finish() + "\n"
        }
        Format::Csv => {
            let mut s = String::from("u,v\n");
            for (u, v) in g.edges() {
                let _ = writeln!(s, "{u},{v}");
            }
            s
        }
        Format::Text => g.to_edge_list(),
    }
}

struct Emitted {
    text: String,
    ok: bool,
}

fn emitted(text: String, ok: bool) -> CliResult<Emitted> {
    Ok(Emitted { text, ok })
}

fn cmd_gap(input: &InputArgs, format: Format, lazy: bool) -> CliResult<Emitted> {
    let g = load_graph(input)?;
    let s = spectra::spectrum(&g, lazy)?;
    let text = match format {
        Format::Json => JsonObject::default()
            .int("n", g.n())
            .int("lazy", lazy)
            .num("gap", s.gap)
            .num("relaxation_time", 1.0 / s.gap)
            .finish()
            + "\n",
        Format::Csv => format!("n,lazy,gap\n{},{lazy},{}\n", g.n(), numfmt::csv_cell(s.gap)),
        Format::Text => format!("gap = {}\n", numfmt::csv_cell(s.gap)),
    };
    emitted(text, true)
}

fn cmd_spectrum(input: &InputArgs, format: Format, lazy: bool) -> CliResult<Emitted> {
    let g = load_graph(input)?;
    let s = spectra::spectrum(&g, lazy)?;
    let text = match format {
        Format::Json => s.to_json() + "\n",
        Format::Csv => {
            let mut out = String::from("index,eigenvalue,stationary\n");
            for (i, (l, p)) in s.eigenvalues.iter().zip(&s.stationary).enumerate() {
                let _ = writeln!(out, "{i},{},{}", numfmt::csv_cell(*l), numfmt::csv_cell(*p));
            }
            out
        }
        Format::Text => {
            let ev: Vec<String> = s.eigenvalues.iter().map(|&l| numfmt::csv_cell(l)).collect();
            format!(
                "eigenvalues = {}\ngap = {}\nlambda_star = {}\n",
                ev.join(" "),
                numfmt::csv_cell(s.gap),
                numfmt::csv_cell(s.lambda_star)
            )
        }
    };
    emitted(text, true)
}

fn cmd_complement(input: &InputArgs, format: Format) -> CliResult<Emitted> {
    let g = load_graph(input)?;
    emitted(render_graph(&g.complement(), None, format), true)
}

fn cmd_family(input: &InputArgs, format: Format) -> CliResult<Emitted> {
    let Some(name) = &input.family else {
        return usage("family needs --family");
    };
    if input.input.is_some() {
        return usage("family takes no --in");
    }
    let spec = family_spec(name, input)?;
    let g = build_family(&spec)?;
    emitted(render_graph(&g, Some(&spec.to_string()), format), true)
}

fn cmd_cheeger(input: &InputArgs, format: Format) -> CliResult<Emitted> {
    let g = load_graph(input)?;
    let report = cheeger_check(&g)?;
    let text = match format {
        Format::Json => {
            let cert = bottleneck::bottleneck_exact(&g)?;
            JsonObject::default()
                .raw("certificate", cert.to_json())
                .raw("report", report.to_json())
                .finish()
                + "\n"
        }
        other => render_reports(std::slice::from_ref(&report), other)?,
    };
    emitted(text, report.holds)
}

fn pair_set(g: &Graph, choice: PairSetChoice) -> gapforge::PairSet {
    match choice {
        PairSetChoice::D2 => d2(g),
        PairSetChoice::Common => common_neighbor_pairs(g),
    }
}

fn cmd_coupling(
    input: &InputArgs,
    format: Format,
    kernel: &KernelArgs,
    start: Option<(usize, usize)>,
    trials: u64,
) -> CliResult<Emitted> {
    let g = load_graph(input)?;
    if g.n() == 0 {
        return usage("empty graph");
    }
    let k = build_kernel(&g, &pair_set(&g, kernel.set), kernel.kind)?;
    let start = start.unwrap_or((0, g.n() - 1));
    let exact = coalescence_tail(&k, start, kernel.tmax)?;
    let mc = if trials > 0 {
        Some(simulate_coupling(&k, start, trials, input.seed, kernel.tmax)?)
    } else {
        None
    };
    let marginal_error = verify_marginals(&k);
    let text = match format {
        Format::Json => {
            let mut o = JsonObject::default()
                .int("n", g.n())
                .text("type", if kernel.kind == CouplingKind::Type1 { "1" } else { "2" })
                .text("set", if kernel.set == PairSetChoice::D2 { "d2" } else { "common" })
                .num("marginal_error", marginal_error)
                .raw("exact", exact.to_json());
            if let Some(mc) = &mc {
                o = o.raw("monte_carlo", mc.to_json());
            }
            o.finish() + "\n"
        }
        Format::Csv => {
            let mut out = String::from("t,exact,tail,stderr\n");
            for t in 0..=kernel.tmax {
                let (tail, se) = match &mc {
                    Some(mc) => (
                        numfmt::csv_cell(mc.tail[t]),
                        numfmt::csv_cell(mc.stderr.as_ref().expect("monte carlo has stderr")[t]),
                    ),
                    None => (String::new(), String::new()),
                };
                let _ = writeln!(out, "{t},{},{tail},{se}", numfmt::csv_cell(exact.tail[t]));
            }
            out
        }
        Format::Text => {
            let mut out = format!("marginal_error = {}\n", numfmt::csv_cell(marginal_error));
            for t in 0..=kernel.tmax {
                let _ = write!(out, "t={t} exact={}", numfmt::csv_cell(exact.tail[t]));
                if let Some(mc) = &mc {
                    let _ = write!(out, " mc={}", numfmt::csv_cell(mc.tail[t]));
                }
                out.push('\n');
            }
            out
        }
    };
    emitted(text, true)
}

fn cmd_verify(
    input: &InputArgs,
    format: Format,
    params: &CheckParams,
    id: TheoremId,
    n1: Option<usize>,
    kernel: &KernelArgs,
) -> CliResult<Emitted> {
    let report = match id {
        TheoremId::Grm => {
            if input.input.is_some() {
                return usage("grm takes --r and --m, not --in");
            }
            bounds::verify_grm(need(input.r, "r", "grm")?, need(input.m, "m", "grm")?)?
        }
        TheoremId::CounterexampleFamily => {
            if has_input(input) {
                return usage("counterexample_family takes only --n");
            }
            bounds::verify_counterexample_family(need(input.n, "n", "counterexample_family")?)?
        }
        TheoremId::Join => {
            let g = load_graph(input)?;
            let split = match (n1, input.family.as_deref()) {
                (Some(s), _) => s,
                (None, Some("join")) => need(input.k, "k", "join")?,
                _ => return usage("join on an input graph needs --n1"),
            };
            let (a, b) = bounds::split_join(&g, split)?;
            bounds::verify_join(&a, &b)?
        }
        _ => {
            let g = load_graph(input)?;
            match id {
                TheoremId::Main1 => bounds::verify_main1(&g)?,
                TheoremId::Diam2 => bounds::verify_diam2(&g)?,
                TheoremId::Diam3 => bounds::verify_diam3(&g)?,
                TheoremId::LargeDegree => bounds::verify_large_degree(&g, params.k_cap)?,
                TheoremId::DegreeWindow => bounds::verify_degree_window(&g, params.l, params.u)?,
                TheoremId::KemenySandwich => bounds::verify_kemeny_sandwich(&g)?,
                TheoremId::Cheeger => cheeger_check(&g)?,
                TheoremId::CouplingTv => {
                    let k = build_kernel(&g, &pair_set(&g, kernel.set), kernel.kind)?;
                    coupling_dominates_tv(&g, &k, kernel.tmax)?
                }
                TheoremId::Grm | TheoremId::CounterexampleFamily | TheoremId::Join => unreachable!(),
            }
        }
    };
    let ok = report.holds;
    emitted(render_reports(std::slice::from_ref(&report), format)?, ok)
}

fn summary_json(s: &ScanSummary) -> String {
    JsonObject::default()
        .int("instances", s.instances)
        .int("reports", s.reports)
        .int("holding", s.holding)
        .int("failing", s.failing)
        .int("not_applicable", s.not_applicable)
        .finish()
}

fn scan_sweep(args: &ScanArgs) -> CliResult<(Sweep, Vec<TheoremId>)> {
    let list = |v: &Option<List>, flag: &str| {
        v.clone().map(|l| l.0).ok_or_else(|| Failure(format!("this sweep needs --{flag}")))
    };
    match args.id {
        Some(TheoremId::CounterexampleFamily) => {
            return Ok((Sweep::Counterexample { ns: list(&args.n, "n")? }, vec![]));
        }
        Some(TheoremId::Grm) => {
            let (r, m) = (list(&args.r, "r")?, list(&args.m, "m")?);
            if r.len() != m.len() {
                return usage("--r and --m lists must have equal length");
            }
            return Ok((Sweep::Grm { pairs: r.into_iter().zip(m).collect() }, vec![]));
        }
        Some(TheoremId::Join) => {
            let max_n = list(&args.n, "n")?.into_iter().max().unwrap_or(0);
            return Ok((Sweep::RandomJoins { max_n, p: args.p.unwrap_or(0.5), count: args.count }, vec![]));
        }
        _ => {}
    }
    let checks = match args.id {
        Some(id) => vec![id],
        None if args.check.is_empty() => return usage("scan needs --id or --check"),
        None => args.check.clone(),
    };
    let Some(name) = args.family.as_deref() else {
        return usage("scan over graphs needs --family");
    };
    if name == "erdos_renyi" {
        let ns = list(&args.n, "n")?;
        let (n_min, n_max) = (*ns.iter().min().unwrap(), *ns.iter().max().unwrap());
        let p = args.p.ok_or_else(|| Failure("erdos_renyi sweep needs --p".into()))?;
        let count = args.count;
        let sweep = if checks == [TheoremId::DegreeWindow] {
            Sweep::DegreeWindow { n_min, n_max, p, count }
        } else {
            Sweep::Random { n_min, n_max, p, count }
        };
        return Ok((sweep, checks));
    }
    // cross every list-valued parameter that was given
    let one = |v: &Option<List>| v.clone().map(|x| x.0.into_iter().map(Some).collect()).unwrap_or(vec![None]);
    let mut specs = Vec::new();
    for &k in &one(&args.k) {
        for &r in &one(&args.r) {
            for &m in &one(&args.m) {
                let input = InputArgs { family: None, k, r, m, n: None, p: None, seed: args.seed, input: None };
                specs.push(family_spec(name, &input)?);
            }
        }
    }
    Ok((Sweep::Families(specs), checks))
}

fn run_scan(sweep: Sweep, checks: Vec<TheoremId>, params: &CheckParams, seed: u64, format: Format, plot: Option<&(String, String)>) -> CliResult<Emitted> {
    let config = ScanConfig { sweep, checks, seed, l: params.l, u: params.u, k_cap: params.k_cap };
    let mut reports = Vec::new();
    let summary = scan(&config, |r| reports.push(r.clone()))?;
    let text = match plot {
        Some((x, y)) => plot_data(&reports, x, y)?,
        None => render_reports(&reports, format)?,
    };
    let text = if reports.is_empty() && plot.is_none() && format == Format::Csv {
        CSV_HEADER.join(",") + "\n"
    } else {
        text
    };
    Ok(Emitted { text, ok: summary.all_hold() })
}

fn cmd_enumerate(n: usize, checks: Vec<TheoremId>, params: &CheckParams, format: Format) -> CliResult<Emitted> {
    let config = ScanConfig {
        sweep: Sweep::Enumerate { ns: vec![n] },
        checks,
        seed: DEFAULT_SEED,
        l: params.l,
        u: params.u,
        k_cap: params.k_cap,
    };
    let mut failures = Vec::new();
    let mut all = Vec::new();
    let keep_all = format == Format::Csv;
    let summary = scan(&config, |r| {
        if !r.holds {
            failures.push(r.clone());
        }
        if keep_all {
            all.push(r.clone());
        }
    })?;
    let text = match format {
        Format::Json => {
            let f: Vec<String> = failures.iter().map(BoundReport::to_json).collect();
            JsonObject::default()
                .int("n", n)
                .raw("summary", summary_json(&summary))
                .raw("failures", format!("[{}]", f.join(",")))
                .finish()
                + "\n"
        }
        Format::Csv => reports_to_csv(&all)?,
        Format::Text => {
            let mut s = format!(
                "n={n}: {} graphs, {} verdicts, {} holding, {} failing, {} not applicable\n",
                summary.instances, summary.reports, summary.holding, summary.failing, summary.not_applicable
            );
            for r in &failures {
                s.push_str(&report_text(r));
            }
            s
        }
    };
    Ok(Emitted { text, ok: summary.all_hold() })
}

fn dispatch(verb: Verb) -> CliResult<(Emitted, OutputArgs)> {
    Ok(match verb {
        Verb::Gap { input, output, lazy } => (cmd_gap(&input, output.format, lazy)?, output),
        Verb::Spectrum { input, output, lazy } => (cmd_spectrum(&input, output.format, lazy)?, output),
        Verb::Complement { input, output } => (cmd_complement(&input, output.format)?, output),
        Verb::Family { input, output } => (cmd_family(&input, output.format)?, output),
        Verb::Cheeger { input, output } => (cmd_cheeger(&input, output.format)?, output),
        Verb::Coupling { input, output, kernel, start, trials } => {
            (cmd_coupling(&input, output.format, &kernel, start, trials)?, output)
        }
        Verb::Verify { input, output, params, id, n1, kernel } => {
            (cmd_verify(&input, output.format, &params, id, n1, &kernel)?, output)
        }
        Verb::Scan(args) => {
            let (sweep, checks) = scan_sweep(&args)?;
            let e = run_scan(sweep, checks, &args.params, args.seed, args.output.format, args.plot.as_ref())?;
            (e, args.output)
        }
        Verb::Enumerate { n, check, params, output } => (cmd_enumerate(n, check, &params, output.format)?, output),
    })
}

fn configure_threads() {
    if let Some(t) = std::env::var("GAPFORGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}

/// Runs the command line `argv` (including the program name), writing the
/// result to `stdout` or the `--out` path and diagnostics to `stderr`.
pub fn run<I, S>(argv: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.verb) {
        Ok((emitted, output)) => {
            let written = match &output.out {
                Some(path) => fs::write(path, &emitted.text).map_err(|e| format!("{path}: {e}")),
                None => stdout.write_all(emitted.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            if emitted.ok {
                0
            } else {
                1
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}
