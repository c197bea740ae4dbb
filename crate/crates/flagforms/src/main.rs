use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flagforms::checks::{self, Check, Options};
use flagforms::json::{ChernPolyJson, CurvatureTensorJson, ExtFormJson, SchurVectorJson, SegrePolyJson};
use flagforms::ledger::{ledger, ConventionLedger};
use flagforms::{mc, paper, parse};
use flagforms_core::charpoly::{gen_schur, schur, schur_decompose, segre_polys};
use flagforms_core::combinat::{relative_dimension, IntSequence, Partition};
use flagforms_core::conegeom::{builtin_family, cone_membership_2d, describe, ray, ray_hull_2d, BUILTIN_FAMILIES};
use flagforms_core::flagnum::{curvature_at, curvature_center_coeffs, ChartPoint, FlagChart, FD_STEP};
use flagforms_core::formlab::chern_forms;
use flagforms_core::gysin::{pushforward_dp, Oracle};
use flagforms_core::rootcalc::expand_expression;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "flagforms", version, about = "Characteristic forms and push-forwards on flag bundles")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for Monte Carlo suites.
    #[arg(long, global = true, env = mc::THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schur polynomial S_σ in Chern classes.
    Schur {
        /// Partition, e.g. 2,1.
        #[arg(allow_hyphen_values = true)]
        partition: String,
        #[arg(long)]
        rank: usize,
        /// Read the entries as an arbitrary integer sequence (generalized Schur).
        #[arg(long)]
        general: bool,
    },
    /// Segre classes s_1..s_k in Chern classes.
    Segre {
        degree: usize,
        #[arg(long)]
        rank: usize,
    },
    /// Push forward an expression in universal Chern classes.
    Pushforward {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        expr: String,
        /// Also run the symmetrizer oracle.
        #[arg(long)]
        check: bool,
    },
    /// Schur-basis coordinates of a Chern polynomial.
    SchurDecompose {
        /// Polynomial in c1..cr, e.g. "c1^3 + 2*c1*c2 - c3".
        poly: String,
        #[arg(long)]
        rank: usize,
    },
    /// Is a target ray inside the sampled hull of ray families?
    Cone {
        /// Comma-separated family names.
        #[arg(long)]
        family: String,
        /// Target ray as x,y.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 64)]
        grid: i64,
    },
    /// Curvature of a universal bundle at the chart center.
    Curvature {
        #[arg(long)]
        rho: String,
        /// Bundle symbol, e.g. U2/U1 or Q1.
        #[arg(long)]
        spec: String,
        /// Curvature tensor JSON file.
        #[arg(long)]
        tensor: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        /// identities, oracle, curvature, gysin-numeric or positivity.
        #[arg(long)]
        suite: String,
        /// Base seed for random tensors and sampling [default: 20240601].
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo samples per fiber integral [default: 1000000].
        #[arg(long)]
        samples: Option<u64>,
        /// Require an explicit seed for stochastic suites.
        #[arg(long)]
        ci: bool,
    },
    /// The four r=n=4 identities against their published forms.
    ExamplesPaper,
    /// Print the convention ledger.
    Ledger {
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
    },
}

enum Failure {
    Usage(String),
    Check,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Print a line; a closed stdout is not an error.
fn out(line: &str) {
    let _ = writeln!(io::stdout().lock(), "{line}");
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        out(&serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        out(&text());
    }
}

fn partition_arg(text: &str) -> Result<Vec<usize>, String> {
    if text.trim().is_empty() || text.trim() == "()" {
        return Ok(Vec::new());
    }
    parse::parse_list(text).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Outcome {
    mc::configure_threads(cli.threads)?;
    let json = cli.json;
    match cli.command {
        Command::Schur { partition, rank, general } => {
            let p = if general {
                let seq: Vec<i64> = partition
                    .split(',')
                    .map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad entry '{t}'")))
                    .collect::<Result<_, _>>()?;
                gen_schur(&IntSequence::new(seq), rank)
            } else {
                schur(&Partition::new(partition_arg(&partition)?)?, rank)
            };
            emit(json, &ChernPolyJson::from(&p), || p.to_string());
        }
        Command::Segre { degree, rank } => {
            let s = segre_polys(rank, degree);
            let rows: Vec<ChernPolyJson> = s.iter().skip(1).map(ChernPolyJson::from).collect();
            emit(json, &rows, || {
                s.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, p)| format!("s{k} = {p}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
        }
        Command::Pushforward { rho, expr, check } => {
            let rho = parse::parse_rho(&rho)?;
            let e = parse::parse_checked(&expr, &rho)?;
            let roots = expand_expression(&e, &rho)?;
            if !roots.is_block_symmetric(&rho) {
                eprintln!("warning: the expanded root polynomial is not block-symmetric");
            }
            let phi = pushforward_dp(&roots, &rho);
            let coords = checks::schur_coordinates(&phi);
            let oracle_ok = if check {
                let mut o = Oracle::new(&rho)?;
                Some(o.push(&roots)?.value == phi)
            } else {
                None
            };
            let report = json!({
                "rho": rho.values(),
                "expr": e.to_string(),
                "relative_dimension": relative_dimension(&rho),
                "chern": ChernPolyJson::from(&phi),
                "segre": SegrePolyJson::from(&phi.to_segre()),
                "schur": coords.as_ref().map(SchurVectorJson::from),
                "oracle_agrees": oracle_ok,
                "ledger": ledger(rho.rank().min(4)),
            });
            emit(json, &report, || {
                let mut out = vec![phi.to_string(), format!("segre: {}", phi.to_segre())];
                if let Some(v) = &coords {
                    out.push(format!("schur: {v}"));
                }
                if let Some(ok) = oracle_ok {
                    out.push(format!("oracle: {}", if ok { "agrees" } else { "DISAGREES" }));
                }
                out.join("\n")
            });
            if oracle_ok == Some(false) {
                return Err(Failure::Check);
            }
        }
        Command::SchurDecompose { poly, rank } => {
            let p = parse::parse_chern_poly(&poly, rank)?;
            let k = p
                .weighted_degree()
                .ok_or_else(|| "polynomial is zero or not homogeneous".to_string())?;
            let v = schur_decompose(&p, k)?;
            emit(json, &SchurVectorJson::from(&v), || v.to_string());
        }
        Command::Cone { family, target, grid } => {
            let fams = family
                .split(',')
                .map(|n| {
                    builtin_family(n.trim())
                        .ok_or_else(|| format!("unknown family '{n}' (known: {})", BUILTIN_FAMILIES.join(", ")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let t: Vec<i64> = target
                .split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|_| format!("bad target entry '{v}'")))
                .collect::<Result<_, _>>()?;
            if t.len() != 2 {
                return Err(Failure::Usage("target must be x,y".into()));
            }
            if grid < 1 {
                return Err(Failure::Usage("grid must be positive".into()));
            }
            let hull = ray_hull_2d(&fams, grid)?;
            let m = cone_membership_2d(&ray(t[0], t[1]), &hull)?;
            let report = json!({
                "families": family.split(',').map(str::trim).collect::<Vec<_>>(),
                "grid": grid,
                "hull": describe(&hull),
                "opening": hull.opening(),
                "target": t,
                "inside": m.inside,
                "margin": m.margin,
            });
            emit(json, &report, || {
                format!(
                    "hull: {}\ntarget ({},{}) {} (margin {:.6})",
                    describe(&hull),
                    t[0],
                    t[1],
                    if m.inside { "inside" } else { "outside" },
                    m.margin
                )
            });
        }
        Command::Curvature { rho, spec, tensor } => {
            let rho = parse::parse_rho(&rho)?;
            let bundle = parse::parse_bundle(&spec)?;
            let spec = bundle.resolve(&rho)?;
            let text = fs::read_to_string(&tensor).map_err(|e| format!("{}: {e}", tensor.display()))?;
            let tj: CurvatureTensorJson = serde_json::from_str(&text)?;
            let c = tj.to_tensor()?;
            if c.r() != rho.rank() {
                return Err(Failure::Usage(format!("tensor has rank {}, ρ has rank {}", c.r(), rho.rank())));
            }
            let chart = FlagChart::new(rho.clone(), c.n())?;
            let exact = curvature_center_coeffs(&chart, &spec, &c)?;
            let fd = curvature_at(&chart, &spec, &c, &ChartPoint::center(&chart), FD_STEP)?;
            let rel = fd.coeffs.sub(&exact).max_abs() / exact.max_abs().max(f64::MIN_POSITIVE);
            let fm = exact.to_form_matrix();
            let entries: Vec<Vec<ExtFormJson>> = fm.entries.iter().map(|row| row.iter().map(ExtFormJson::from).collect()).collect();
            let cs: Vec<ExtFormJson> = chern_forms(&fm).iter().map(ExtFormJson::from).collect();
            let report = json!({
                "rho": rho.values(),
                "bundle": bundle.to_string(),
                "generators": { "base": chart.n(), "fiber_pairs": chart.pairs() },
                "curvature": entries,
                "chern_forms": cs,
                "fd_relative_error": rel,
                "fd_hermitian_defect": fd.hermitian_defect,
            });
            emit(json, &report, || {
                let mut out = Vec::new();
                for (i, row) in fm.entries.iter().enumerate() {
                    for (j, f) in row.iter().enumerate() {
                        out.push(format!("Θ[{}][{}] = {}", i + 1, j + 1, format_form(f)));
                    }
                }
                out.push(format!("finite-difference relative error {rel:.2e}"));
                out.join("\n")
            });
            if rel > 1e-5 {
                return Err(Failure::Check);
            }
        }
        Command::Verify { suite, seed, samples, ci } => {
            let stochastic = matches!(suite.as_str(), "curvature" | "gysin-numeric" | "positivity");
            if ci && stochastic && seed.is_none() {
                return Err(Failure::Usage(format!("--seed is required for suite '{suite}' with --ci")));
            }
            let mut opts = Options::default();
            if let Some(s) = seed {
                opts.seed = s;
            }
            if let Some(n) = samples {
                opts.samples = n;
            }
            let checks = checks::run_suite(&suite, &opts)
                .ok_or_else(|| format!("unknown suite '{suite}' (known: {})", checks::SUITES.join(", ")))?;
            report_checks(json, &suite, &opts, &checks)?;
        }
        Command::ExamplesPaper => {
            let mut rows = Vec::new();
            let mut all = true;
            for id in &paper::IDENTITIES {
                let res = paper::run_identity(id)?;
                all &= res.pass();
                rows.push(json!({
                    "s": id.s,
                    "expr": id.expr,
                    "chern": ChernPolyJson::from(&res.chern),
                    "segre": res.segre,
                    "schur": SchurVectorJson::from(&res.schur),
                    "pass": res.pass(),
                }));
                if !json {
                    out(&format!(
                        "{} s={} {} -> {} = {} = {}",
                        if res.pass() { "PASS" } else { "FAIL" },
                        id.s,
                        id.expr,
                        res.chern,
                        res.segre,
                        res.schur
                    ));
                }
            }
            if json {
                emit(true, &json!({ "rank": paper::RANK, "identities": rows, "pass": all }), String::new);
            }
            if !all {
                return Err(Failure::Check);
            }
        }
        Command::Ledger { max_rank } => {
            let l = ledger(max_rank);
            emit(json, &l, || ledger_text(&l));
        }
    }
    Ok(())
}

fn format_form(f: &flagforms_core::formlab::ExtForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.terms()
        .map(|(s, t, c)| {
            let idx = |m: u32| {
                flagforms::json::index_list(m)
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            format!("({:+.6}{:+.6}i) dy[{}]^dybar[{}]", c.re, c.im, idx(s), idx(t))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn ledger_text(l: &ConventionLedger) -> String {
    let mut out = vec![
        format!("segre: {}", l.segre),
        format!("roots: {}", l.chern_roots),
        format!(
            "epsilon: {}",
            l.epsilon.iter().map(|e| format!("r={}:{:+}", e.r, e.epsilon)).collect::<Vec<_>>().join(" ")
        ),
        format!(
            "oracle signs (lift/coset): {}",
            l.oracle_signs
                .iter()
                .map(|o| format!("{:?}:{:+}/{:+}", o.rho, o.lift, o.coset))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        format!("curvature: {}", l.curvature),
        format!("chern forms: {}", l.chern_forms),
        format!("fiber volume: {}", l.fiber_volume),
    ];
    out.push(format!(
        "kappa: {}",
        l.positivity_kappa
            .iter()
            .map(|k| format!("k={}:{:+}{:+}i", k.k, k.re, k.im))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    out.join("\n")
}

fn report_checks(json: bool, suite: &str, opts: &Options, checks: &[Check]) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    if json {
        let report = json!({
            "suite": suite,
            "options": opts,
            "ledger": ledger(4),
            "checks": checks,
            "pass": pass,
        });
        out(&serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for c in checks {
            out(&c.line());
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
