mod format;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sr_expmap::batch::{scan_rays, Execution};
use sr_expmap::grushin::{grushin_exp, GrushinBase, GrushinCovector};
use sr_expmap::singularity::{
    fold_witness_with, ConjugateRecord, GrushinAdapter, SingularityClass, Sl2Adapter, StructureAdapter, Su2Adapter,
    Tolerances,
};
use sr_expmap::sl2::{sl2_exp, Sl2Covector};
use sr_expmap::su2::{su2_exp, Su2Covector};
use sr_expmap::verify::{run_selftest, Comparison, SelfTestConfig};

use format::{joined, json_num, json_nums, num};

const CSV_HEADER: &str = "s,stratum,order,class,k1,k2,k3,f0,f1";

#[derive(Parser)]
#[command(name = "srexp", version, about = "Sub-Riemannian exponential maps and their conjugate loci")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Endpoint and momentum of a geodesic.
    Expmap(ExpmapArgs),
    /// Conjugate covectors along rays, with their singularity class.
    #[command(alias = "conj_scan")]
    ConjScan(ScanArgs),
    /// Runs the invariant suite; exit code 1 on any failure.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum StructureArg {
    Grushin,
    Su2,
    Sl2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    structure: StructureArg,
    /// Grushin exponent.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Grushin base point `x0,y0`.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ExpmapArgs {
    #[command(flatten)]
    common: Common,
    /// Initial covector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    covector: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Ray direction, comma separated; repeat for several rays.
    #[arg(long, alias = "covector", required = true, allow_hyphen_values = true)]
    direction: Vec<String>,
    #[arg(long, default_value_t = 20.0)]
    s_max: f64,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long)]
    root_tol: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    transversality_tol: Option<f64>,
    #[arg(long)]
    second_order_min: Option<f64>,
    #[arg(long)]
    witness_tol: Option<f64>,
    /// Search a non-injectivity witness of this radius at every fold.
    #[arg(long)]
    witness_delta: Option<f64>,
    /// Scan rays one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replace every upper-bound threshold by this value.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<String>,
}

/// Invalid user input; reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_list(name: &str, s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|_| usage(format!("--{name}: cannot parse '{p}' as a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("--{name}: values must be finite")))
            }
        })
        .collect()
}

fn fiber_dim(s: StructureArg) -> usize {
    match s {
        StructureArg::Grushin => 2,
        _ => 3,
    }
}

fn parse_fiber(name: &str, s: &str, structure: StructureArg) -> anyhow::Result<Vec<f64>> {
    let v = parse_list(name, s)?;
    let n = fiber_dim(structure);
    if v.len() != n {
        bail!(usage(format!("--{name}: expected {n} coordinates for this structure, got {}", v.len())));
    }
    Ok(v)
}

fn grushin_base(c: &Common) -> anyhow::Result<GrushinBase> {
    let base = match &c.base {
        Some(b) => parse_list("base", b)?,
        None => vec![0.0, 0.0],
    };
    if base.len() != 2 {
        bail!(usage(format!("--base: expected 2 coordinates, got {}", base.len())));
    }
    if !(c.alpha >= 1.0 && c.alpha.is_finite()) {
        bail!(usage("--alpha must be a finite number >= 1"));
    }
    GrushinBase::new(c.alpha, base[0], base[1]).map_err(|e| usage(e.to_string()))
}

fn check_group_args(c: &Common) -> anyhow::Result<()> {
    if c.structure != StructureArg::Grushin && c.base.is_some() {
        bail!(usage("--base applies to grushin only; group geodesics start at the identity"));
    }
    Ok(())
}

fn config_json(c: &Common) -> Value {
    let mut v = json!({ "structure": c.structure, "format": c.format });
    if c.structure == StructureArg::Grushin {
        v["alpha"] = json_num(c.alpha);
        v["base"] = Value::String(c.base.clone().unwrap_or_else(|| "0,0".into()));
    }
    v
}

fn versions() -> Value {
    json!({ "srexp": env!("CARGO_PKG_VERSION"), "sr-expmap": sr_expmap::VERSION })
}

fn emit(out: &Option<String>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_expmap(a: &ExpmapArgs) -> anyhow::Result<bool> {
    let c = &a.common;
    check_group_args(c)?;
    let cov = parse_fiber("covector", &a.covector, c.structure)?;
    if !a.t.is_finite() {
        bail!(usage("--t must be finite"));
    }
    let (names, values): (Vec<&str>, Vec<f64>) = match c.structure {
        StructureArg::Grushin => {
            let base = grushin_base(c)?;
            let s = grushin_exp(&base, GrushinCovector::from_slice(&cov), a.t);
            (vec!["x", "y", "u", "v"], vec![s.x, s.y, s.u, s.v])
        }
        StructureArg::Su2 => {
            let s = su2_exp(Su2Covector::from_slice(&cov), a.t);
            let p = s.point.to_array();
            (
                vec!["alpha_re", "alpha_im", "beta_re", "beta_im", "u", "v", "w"],
                vec![p[0], p[1], p[2], p[3], s.u, s.v, s.w],
            )
        }
        StructureArg::Sl2 => {
            let s = sl2_exp(Sl2Covector::from_slice(&cov), a.t);
            let m = s.matrix.to_array();
            (vec!["m11", "m12", "m21", "m22", "u", "v", "w"], vec![m[0], m[1], m[2], m[3], s.u, s.v, s.w])
        }
    };
    let text = match c.format {
        OutputFormat::Json => {
            let mut config = config_json(c);
            config["covector"] = json_nums(&cov);
            config["t"] = json_num(a.t);
            let results: serde_json::Map<String, Value> =
                names.iter().zip(&values).map(|(n, &v)| (n.to_string(), json_num(v))).collect();
            let doc = json!({
                "config": config,
                "results": results,
                "versions": versions(),
                "tolerances": {},
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        OutputFormat::Csv => format!("t,{}\n{},{}\n", names.join(","), num(a.t), joined(&values)),
        OutputFormat::Text => names.iter().zip(&values).map(|(n, &v)| format!("{n} = {}\n", num(v))).collect(),
    };
    emit(&c.out, &text)?;
    Ok(true)
}

fn tolerances(a: &ScanArgs) -> anyhow::Result<Tolerances> {
    let mut t = Tolerances::default();
    if let Some(v) = a.scan_points {
        t.scan_points = v;
    }
    for (name, src, dst) in [
        ("root-tol", a.root_tol, &mut t.root_tol),
        ("rank-tol", a.rank_tol, &mut t.rank_tol),
        ("transversality-tol", a.transversality_tol, &mut t.transversality_tol),
        ("second-order-min", a.second_order_min, &mut t.second_order_min),
        ("witness-tol", a.witness_tol, &mut t.witness_tol),
    ] {
        if let Some(v) = src {
            if !(v > 0.0 && v.is_finite()) {
                bail!(usage(format!("--{name} must be positive")));
            }
            *dst = v;
        }
    }
    if t.rank_tol >= 1.0 {
        bail!(usage("--rank-tol must be below 1"));
    }
    if t.scan_points < 2 {
        bail!(usage("--scan-points must be at least 2"));
    }
    Ok(t)
}

fn record_kernel(r: &ConjugateRecord) -> Vec<f64> {
    r.kernel().unwrap_or_default()
}

fn record_json(r: &ConjugateRecord, witness: Option<Value>) -> Value {
    let mut v = json!({
        "s": json_num(r.s),
        "covector": json_nums(&r.covector),
        "stratum": r.stratum.label(),
        "order": r.order,
        "class": r.class.label(),
        "kernel": json_nums(&record_kernel(r)),
        "f_values": json_nums(&r.f_values),
    });
    if let Some(w) = witness {
        v["witness"] = w;
    }
    v
}

fn csv_row(r: &ConjugateRecord) -> String {
    let k = record_kernel(r);
    let cell = |v: Option<&f64>| v.map(|&x| num(x)).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        num(r.s),
        r.stratum.label(),
        r.order,
        r.class.label(),
        cell(k.first()),
        cell(k.get(1)),
        cell(k.get(2)),
        cell(r.f_values.first()),
        cell(r.f_values.get(1)),
    )
}

fn cmd_conj_scan(a: &ScanArgs) -> anyhow::Result<bool> {
    let c = &a.common;
    check_group_args(c)?;
    let dirs =
        a.direction.iter().map(|d| parse_fiber("direction", d, c.structure)).collect::<anyhow::Result<Vec<_>>>()?;
    if dirs.iter().any(|d| d.iter().all(|&x| x == 0.0)) {
        bail!(usage("--direction must be nonzero"));
    }
    if !(a.s_max > 0.0 && a.s_max.is_finite()) {
        bail!(usage("--s-max must be positive"));
    }
    if let Some(d) = a.witness_delta {
        if !(d > 0.0 && d.is_finite()) {
            bail!(usage("--witness-delta must be positive"));
        }
    }
    let tol = tolerances(a)?;
    let adapter: Box<dyn StructureAdapter> = match c.structure {
        StructureArg::Grushin => Box::new(GrushinAdapter::new(grushin_base(c)?)),
        StructureArg::Su2 => Box::new(Su2Adapter),
        StructureArg::Sl2 => Box::new(Sl2Adapter),
    };
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let scans = scan_rays(adapter.as_ref(), &dirs, a.s_max, &tol, exec).into_iter().collect::<Result<Vec<_>, _>>()?;

    let witness = |r: &ConjugateRecord| -> Option<Value> {
        let delta = a.witness_delta?;
        if r.class != SingularityClass::Fold {
            return None;
        }
        Some(match fold_witness_with(adapter.as_ref(), r, delta, &tol) {
            Ok(w) => json!({
                "lambda1": json_nums(&w.lambda1),
                "lambda2": json_nums(&w.lambda2),
                "image_distance": json_num(w.image_distance),
                "separation": json_num(w.separation),
            }),
            Err(e) => json!({ "error": e.to_string() }),
        })
    };

    let text = match c.format {
        OutputFormat::Json => {
            let mut config = config_json(c);
            config["directions"] = Value::Array(dirs.iter().map(|d| json_nums(d)).collect());
            config["s_max"] = json_num(a.s_max);
            if let Some(d) = a.witness_delta {
                config["witness_delta"] = json_num(d);
            }
            let results: Vec<Value> = dirs
                .iter()
                .zip(&scans)
                .map(|(d, recs)| {
                    json!({
                        "direction": json_nums(d),
                        "records": recs.iter().map(|r| record_json(r, witness(r))).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({
                "config": config,
                "results": results,
                "versions": versions(),
                "tolerances": {
                    "scan_points": tol.scan_points,
                    "root_tol": tol.root_tol,
                    "rank_tol": tol.rank_tol,
                    "transversality_tol": tol.transversality_tol,
                    "second_order_min": tol.second_order_min,
                    "witness_tol": tol.witness_tol,
                },
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        OutputFormat::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in scans.iter().flatten() {
                s.push_str(&csv_row(r));
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for (d, recs) in dirs.iter().zip(&scans) {
                s.push_str(&format!("direction ({}): {} conjugate covector(s)\n", joined(d), recs.len()));
                for r in recs {
                    s.push_str(&format!(
                        "  s = {:<16} {:<5} order {} {:<12} kernel ({})  f = ({})\n",
                        num(r.s),
                        r.stratum.label(),
                        r.order,
                        r.class.label(),
                        joined(&record_kernel(r)),
                        joined(&r.f_values),
                    ));
                    if let Some(w) = witness(r) {
                        s.push_str(&format!("    witness {w}\n"));
                    }
                }
            }
            s
        }
    };
    emit(&c.out, &text)?;
    Ok(true)
}

fn cmd_selftest(a: &SelftestArgs) -> anyhow::Result<bool> {
    if let Some(t) = a.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            bail!(usage("--tolerance must be a finite non-negative number"));
        }
    }
    let cfg = SelfTestConfig { seed: a.seed, tolerance: a.tolerance };
    let checks = run_selftest(&cfg);
    let passed = checks.iter().filter(|c| c.passed).count();
    let ok = passed == checks.len();
    let text = match a.format {
        OutputFormat::Json => {
            let doc = json!({
                "config": { "seed": a.seed, "tolerance": a.tolerance },
                "results": checks.iter().map(|c| json!({
                    "name": c.name,
                    "value": json_num(c.value),
                    "threshold": json_num(c.threshold),
                    "comparison": match c.comparison { Comparison::AtMost => "<=", Comparison::AtLeast => ">=" },
                    "passed": c.passed,
                })).collect::<Vec<_>>(),
                "versions": versions(),
                "tolerances": { "override": a.tolerance },
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("name,value,comparison,threshold,passed\n");
            for c in &checks {
                let cmp = match c.comparison {
                    Comparison::AtMost => "<=",
                    Comparison::AtLeast => ">=",
                };
                s.push_str(&format!("\"{}\",{},{cmp},{},{}\n", c.name, num(c.value), num(c.threshold), c.passed));
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for c in &checks {
                let cmp = match c.comparison {
                    Comparison::AtMost => "<=",
                    Comparison::AtLeast => ">=",
                };
                s.push_str(&format!(
                    "{:<4} {:<44} {:>20} {cmp} {}\n",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name,
                    num(c.value),
                    num(c.threshold)
                ));
            }
            s.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
            s
        }
    };
    emit(&a.out, &text)?;
    Ok(ok)
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("SREXP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| usage(format!("SREXP_THREADS: cannot parse '{v}'")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Expmap(a) => cmd_expmap(a),
        Command::ConjScan(a) => cmd_conj_scan(a),
        Command::Selftest(a) => cmd_selftest(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
