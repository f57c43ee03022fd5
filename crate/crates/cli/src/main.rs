//! `entwit`: run entanglement criteria (PPT, realignment, positive-map
//! witnesses) on bipartite state documents, test maps for complete
//! positivity, and generate the worked example states.
//!
//! Exit codes are the machine contract: 0 = separable-consistent / CP,
//! 1 = entangled-detected / not CP, 2 = input or usage error. Report text
//! layout is informational only; `--json` output follows
//! docs/report.schema.json.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use entwit_core::document::{parse_real_list, MatrixDocument};
use entwit_core::linalg::{hermitian_eig, DEFAULT_TOL};
use entwit_core::maps::{
    delta_t_map, gamma_map, gamma_prime_map, prop51_map, reduction_map, transpose_map,
    ElementaryOperator, NcpFilterReport,
};
use entwit_core::states::{
    self, default_battery, BipartiteState, CriterionReport, Side, Verdict,
};

#[derive(Parser)]
#[command(name = "entwit", version, about = "Entanglement criteria for bipartite states via positive maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the criteria battery (PPT, realignment, map witnesses) on a state
    Analyze(AnalyzeArgs),
    /// Complete-positivity verdict for a map document (Choi matrix test)
    Choi(ChoiArgs),
    /// Single positive-map witness test against a state
    Witness(WitnessArgs),
    /// Generate state documents (rho, rho1, separable, bell)
    Gen(GenArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State document path, or "-" for stdin
    state: String,
    /// Additional witness map document(s) to append to the default battery
    #[arg(long = "map")]
    maps: Vec<String>,
    /// Verdict tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Emit the structured JSON report instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ChoiArgs {
    /// Map document path, or "-" for stdin
    map: String,
    /// Verdict tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Emit a JSON verdict
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct WitnessArgs {
    /// State document path, or "-" for stdin
    state: String,
    /// Builtin map name (transpose, reduction, delta-t, gamma, gamma-prime,
    /// prop51) or a map document path
    map: String,
    /// Factor the map acts on
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    side: SideArg,
    /// Verdict tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print the full spectrum of the witnessed operator
    #[arg(long)]
    spectrum: bool,
    /// Emit a JSON verdict
    #[arg(long)]
    json: bool,
    /// Dimension for builtin maps (defaults to the acted factor dimension)
    #[arg(long)]
    n: Option<usize>,
    /// Parameter t for the delta-t builtin
    #[arg(long)]
    t: Option<f64>,
    /// Plus-family coefficient row for the prop51 builtin (comma-separated
    /// reals; repeat the flag for several rows)
    #[arg(long = "arow")]
    arows: Vec<String>,
    /// Minus-family coefficient row for the prop51 builtin
    #[arg(long = "brow")]
    brows: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    /// Which state to generate
    #[arg(value_enum)]
    name: GenName,
    /// Parameter a for rho
    #[arg(long)]
    a: Option<f64>,
    /// Parameter b for rho
    #[arg(long)]
    b: Option<f64>,
    /// Factor dimensions for separable states
    #[arg(long, num_args = 2, value_names = ["DIM_A", "DIM_B"])]
    dims: Option<Vec<usize>>,
    /// Number of product terms in a separable mixture
    #[arg(long, default_value_t = 4)]
    terms: usize,
    /// RNG seed for separable states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenName {
    Rho,
    Rho1,
    Separable,
    Bell,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Choi(args) => cmd_choi(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn load_state(path: &str) -> Result<BipartiteState, String> {
    let text = read_input(path)?;
    MatrixDocument::parse(&text)
        .and_then(MatrixDocument::into_state)
        .map_err(|e| e.to_string())
}

fn load_map(path: &str) -> Result<ElementaryOperator, String> {
    let text = read_input(path)?;
    MatrixDocument::parse(&text)
        .and_then(MatrixDocument::into_map)
        .map_err(|e| e.to_string())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode, String> {
    let state = load_state(&args.state)?;
    let mut battery = default_battery(state.dim_a(), state.dim_b());
    for path in &args.maps {
        let map = load_map(path)?;
        let side = if map.dim_in() == state.dim_b() {
            Side::Right
        } else if map.dim_in() == state.dim_a() {
            Side::Left
        } else {
            return Err(format!(
                "map {} acts on dimension {}, which matches neither factor ({}x{})",
                map.label(),
                map.dim_in(),
                state.dim_a(),
                state.dim_b()
            ));
        };
        battery.push((map, side));
    }
    let report = state
        .run_battery(&battery, args.tol)
        .map_err(|e| e.to_string())?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report_json(&state, &report, args.tol))
                .expect("report serializes")
        );
    } else {
        print_report(&state, &report);
    }
    Ok(match report.overall {
        Verdict::SeparableConsistent => ExitCode::SUCCESS,
        Verdict::EntangledDetected => ExitCode::from(1),
    })
}

fn report_json(state: &BipartiteState, report: &CriterionReport, tol: f64) -> serde_json::Value {
    json!({
        "state": {"dim_a": state.dim_a(), "dim_b": state.dim_b()},
        "tolerance": tol,
        "ppt": {
            "min_eigenvalue": report.ppt.min_eigenvalue,
            "verdict": if report.ppt.pass { "pass" } else { "fail" },
        },
        "realignment": {
            "trace_norm": report.realignment.trace_norm,
            "verdict": if report.realignment.pass { "pass" } else { "fail" },
        },
        "witnesses": report.witnesses.iter().map(|w| json!({
            "map": w.map_label,
            "side": w.side.as_str(),
            "min_eigenvalue": w.min_eigenvalue,
            "verdict": if w.pass { "pass" } else { "fail" },
        })).collect::<Vec<_>>(),
        "overall": report.overall.as_str(),
    })
}

fn print_report(state: &BipartiteState, report: &CriterionReport) {
    println!(
        "state: {}x{} on C^{}",
        state.dim_a(),
        state.dim_b(),
        state.dim_a() * state.dim_b()
    );
    println!(
        "ppt:          min eigenvalue {:+.6e}  [{}]",
        report.ppt.min_eigenvalue,
        pass_str(report.ppt.pass)
    );
    println!(
        "realignment:  trace norm    {:.6}  [{}]",
        report.realignment.trace_norm,
        pass_str(report.realignment.pass)
    );
    for w in &report.witnesses {
        println!(
            "witness {:<16} ({:>5}): min eigenvalue {:+.6e}  [{}]",
            w.map_label,
            w.side.as_str(),
            w.min_eigenvalue,
            pass_str(w.pass)
        );
    }
    println!("overall: {}", report.overall.as_str());
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_choi(args: ChoiArgs) -> Result<ExitCode, String> {
    let map = load_map(&args.map)?;
    let verdict = map.is_completely_positive(args.tol);
    let filters = map.ncp_quick_filters();
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "label": map.label(),
                "dim_in": map.dim_in(),
                "dim_out": map.dim_out(),
                "min_choi_eigenvalue": verdict.min_choi_eigenvalue,
                "completely_positive": verdict.completely_positive,
                "filters": filters_json(&filters),
            }))
            .expect("verdict serializes")
        );
    } else {
        println!("map: {} ({} -> {})", map.label(), map.dim_in(), map.dim_out());
        println!("min Choi eigenvalue: {:+.6e}", verdict.min_choi_eigenvalue);
        println!(
            "verdict: {}",
            if verdict.completely_positive {
                "completely positive"
            } else {
                "not completely positive"
            }
        );
        print_filters(&filters);
    }
    Ok(if verdict.completely_positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn filters_json(f: &NcpFilterReport) -> serde_json::Value {
    json!({
        "plus_count": f.plus_count,
        "plus_span_dim": f.plus_span_dim,
        "cp_if_positive_small_family": f.cp_if_positive_small_family,
        "cp_if_positive_small_span": f.cp_if_positive_small_span,
        "cp_if_positive_independent_images": f.cp_if_positive_independent_images,
        "ncp_possible": f.ncp_possible(),
    })
}

fn print_filters(f: &NcpFilterReport) {
    println!(
        "plus family: k = {}, span dimension = {}",
        f.plus_count, f.plus_span_dim
    );
    println!(
        "filters: k<=2 {}; span<=2 {}; independent images {}; NCP possible {}",
        yes_no(f.cp_if_positive_small_family),
        yes_no(f.cp_if_positive_small_span),
        yes_no(f.cp_if_positive_independent_images),
        yes_no(f.ncp_possible())
    );
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn resolve_witness_map(args: &WitnessArgs, acted_dim: usize) -> Result<ElementaryOperator, String> {
    let n = args.n.unwrap_or(acted_dim);
    let build = |r: entwit_core::Result<ElementaryOperator>| r.map_err(|e| e.to_string());
    match args.map.as_str() {
        "transpose" => build(transpose_map(n)),
        "reduction" => build(reduction_map(n)),
        "delta-t" => {
            let t = args
                .t
                .ok_or_else(|| "the delta-t builtin requires --t".to_string())?;
            build(delta_t_map(n, t))
        }
        "gamma" => Ok(gamma_map()),
        "gamma-prime" => Ok(gamma_prime_map()),
        "prop51" => {
            let parse_rows = |rows: &[String]| -> Result<Vec<Vec<f64>>, String> {
                rows.iter()
                    .map(|r| parse_real_list(r).map_err(|e| e.to_string()))
                    .collect()
            };
            let arows = parse_rows(&args.arows)?;
            let brows = parse_rows(&args.brows)?;
            if arows.is_empty() || brows.is_empty() {
                return Err(
                    "the prop51 builtin requires at least one --arow and one --brow".to_string(),
                );
            }
            build(prop51_map(n, &arows, &brows))
        }
        path => load_map(path),
    }
}

fn cmd_witness(args: WitnessArgs) -> Result<ExitCode, String> {
    let state = load_state(&args.state)?;
    let side: Side = args.side.into();
    let acted_dim = match side {
        Side::Right => state.dim_b(),
        Side::Left => state.dim_a(),
    };
    let map = resolve_witness_map(&args, acted_dim)?;
    let witnessed = state
        .apply_map_side(&map, side)
        .map_err(|e| e.to_string())?;
    let herm_tol = 1e-9 * witnessed.max_abs().max(1.0);
    let eig = hermitian_eig(&witnessed, herm_tol.max(args.tol)).map_err(|e| e.to_string())?;
    let min = eig.values[0];
    let pass = min >= -args.tol;
    if args.json {
        let mut body = json!({
            "state": {"dim_a": state.dim_a(), "dim_b": state.dim_b()},
            "map": map.label(),
            "side": side.as_str(),
            "tolerance": args.tol,
            "min_eigenvalue": min,
            "verdict": if pass { "pass" } else { "fail" },
        });
        if args.spectrum {
            body["spectrum"] = json!(eig.values);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&body).expect("verdict serializes")
        );
    } else {
        println!(
            "witness {} ({}): min eigenvalue {:+.6e}  [{}]",
            map.label(),
            side.as_str(),
            min,
            pass_str(pass)
        );
        if args.spectrum {
            let rendered: Vec<String> = eig.values.iter().map(|v| format!("{v:+.9e}")).collect();
            println!("spectrum: [{}]", rendered.join(", "));
        }
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    let state = match args.name {
        GenName::Rho => {
            let a = args.a.ok_or_else(|| "gen rho requires --a".to_string())?;
            let b = args.b.ok_or_else(|| "gen rho requires --b".to_string())?;
            states::rho_state(a, b).map_err(|e| e.to_string())?
        }
        GenName::Rho1 => states::rho1_state(),
        GenName::Bell => states::bell_state(),
        GenName::Separable => {
            let dims = args.dims.clone().unwrap_or_else(|| vec![3, 3]);
            if args.terms == 0 {
                return Err("--terms must be at least 1".to_string());
            }
            states::random_separable(dims[0], dims[1], args.terms, args.seed)
                .map_err(|e| e.to_string())?
        }
    };
    let text = MatrixDocument::from_state(&state).serialize();
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
