//! The four subcommands. Each writes its data file, then its manifest.

use crate::config::{BetaSpec, CurveConfig, Format, TableConfig, ZERO_TEMPERATURE_BETA};
use crate::format::{format_number, round_significant};
use crate::Failure;
use ecp_core::correlator::{ModelParams, ThermalState};
use ecp_core::coulomb::{curve as potential_curve, PotentialCurve};
use ecp_core::groundstate::{
    constant_c, cubic_frequency_root, default_c_truncation, default_rs_truncation, optimize_ground_state,
    resummation_coefficient, rs_second_order_coefficient, VariationalOrder,
};
use ecp_core::selfcheck::{self, CheckOutcome};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

const P: ModelParams = ModelParams::ATOMIC;

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    engine_version: &'static str,
    data_file: String,
    config: Value,
    wall_time_seconds: f64,
    warnings: &'a [String],
    points: Vec<Value>,
}

/// `data.csv` → `data.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Computation(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write_outputs(
    command: &'static str,
    out: &Path,
    data: &str,
    config: Value,
    started: Instant,
    warnings: &[String],
    points: Vec<Value>,
) -> Result<(), Failure> {
    write_file(out, data)?;
    let manifest = Manifest {
        command,
        engine_version: ecp_core::VERSION,
        data_file: out.display().to_string(),
        config,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        warnings,
        points,
    };
    write_file(&manifest_path(out), &to_json(&manifest))
}

#[derive(Serialize)]
struct CurveRow {
    r0: f64,
    #[serde(rename = "omega_T")]
    omega_t: Option<f64>,
    #[serde(rename = "omega_L")]
    omega_l: Option<f64>,
    #[serde(rename = "W")]
    w: Option<f64>,
    opt_mode: &'static str,
}

#[derive(Serialize)]
struct CurveDocument {
    order: u8,
    beta: f64,
    mode: &'static str,
    points: Vec<CurveRow>,
}

fn curve_rows(c: &PotentialCurve, digits: usize) -> Vec<CurveRow> {
    let round = |x: f64| round_significant(x, digits);
    c.entries
        .iter()
        .map(|e| match &e.result {
            Ok(p) => CurveRow {
                r0: round(e.r0),
                omega_t: Some(round(p.frequencies.omega_t)),
                omega_l: Some(round(p.frequencies.omega_l)),
                w: Some(round(p.value)),
                opt_mode: p.optimization_mode.label(),
            },
            Err(_) => CurveRow { r0: round(e.r0), omega_t: None, omega_l: None, w: None, opt_mode: "failed" },
        })
        .collect()
}

fn curve_csv(rows: &[CurveRow], digits: usize) -> String {
    let cell = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |v| format_number(v, digits));
    let mut s = String::from("r0,omega_T,omega_L,W,opt_mode\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            format_number(r.r0, digits),
            cell(r.omega_t),
            cell(r.omega_l),
            cell(r.w),
            r.opt_mode
        ));
    }
    s
}

pub fn curve(cfg: &CurveConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let beta = cfg.beta.effective();
    let thermal = ThermalState::finite(beta).map_err(|e| Failure::Usage(e.to_string()))?;
    let grid = cfg.grid.points();
    let result = potential_curve(cfg.order, thermal, &grid, cfg.mode, &P).map_err(|e| Failure::Usage(e.to_string()))?;

    let rows = curve_rows(&result, cfg.precision);
    let data = match cfg.format {
        Format::Csv => curve_csv(&rows, cfg.precision),
        Format::Json => {
            to_json(&CurveDocument { order: cfg.order.as_u8(), beta, mode: cfg.mode.label(), points: rows })
        }
    };

    let mut warnings = Vec::new();
    if cfg.beta == BetaSpec::Zero {
        warnings.push(format!(
            "zero temperature requested; curve computed at beta = {ZERO_TEMPERATURE_BETA} (finite-temperature proxy)"
        ));
    }
    let points = result
        .entries
        .iter()
        .map(|e| match &e.result {
            Ok(p) => json!({ "r0": e.r0, "status": "ok", "opt_mode": p.optimization_mode.label() }),
            Err(msg) => json!({ "r0": e.r0, "status": "failed", "error": msg }),
        })
        .collect();
    let config = json!({
        "order": cfg.order.as_u8(),
        "beta": match cfg.beta { BetaSpec::Zero => json!("zero"), BetaSpec::Finite(b) => json!(b) },
        "beta_effective": beta,
        "r0": cfg.grid,
        "mode": cfg.mode.label(),
        "out": cfg.out.display().to_string(),
        "format": cfg.format,
        "precision": cfg.precision,
    });
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_outputs("curve", &cfg.out, &data, config, started, &warnings, points)?;

    let failed = result.failures();
    if failed > 0 {
        return Err(Failure::Computation(format!(
            "{failed} of {} grid points failed; see {}",
            result.entries.len(),
            manifest_path(&cfg.out).display()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct GroundStateRow {
    #[serde(rename = "N")]
    n: u8,
    omega: f64,
    gamma: f64,
    energy: f64,
}

#[derive(Serialize)]
struct GroundStateDocument {
    states: Vec<GroundStateRow>,
    gamma_exact: f64,
}

pub fn ground_state(cfg: &TableConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let round = |x: f64| round_significant(x, cfg.precision);
    let mut states = Vec::new();
    for order in VariationalOrder::ALL {
        let r = optimize_ground_state(order, &P)
            .map_err(|e| Failure::Computation(format!("order {}: {e}", order.as_u8())))?;
        states.push(GroundStateRow {
            n: order.as_u8(),
            omega: round(r.omega_star),
            gamma: round(r.gamma),
            energy: round(r.energy),
        });
    }
    let points = states.iter().map(|s| json!({ "N": s.n, "status": "ok" })).collect();
    let doc = GroundStateDocument { states, gamma_exact: 0.5 };
    let config = json!({ "out": cfg.out.display().to_string(), "precision": cfg.precision });
    write_outputs("ground-state", &cfg.out, &to_json(&doc), config, started, &[], points)
}

#[derive(Serialize)]
struct TruncationRecord {
    max_terms: usize,
    tail_tol: f64,
    method: &'static str,
}

#[derive(Serialize)]
struct TruncationProvenance {
    c: TruncationRecord,
    rs_second_order: TruncationRecord,
}

#[derive(Serialize)]
struct ConstantsDocument {
    c: f64,
    c_prime: f64,
    rs_second_order: f64,
    resum_5_16: f64,
    resum_21_32: f64,
    truncation: TruncationProvenance,
}

pub fn constants(cfg: &TableConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let round = |x: f64| round_significant(x, cfg.precision);
    let fail = |what: &str, e: ecp_core::groundstate::GroundStateError| Failure::Computation(format!("{what}: {e}"));
    let (ct, rt) = (default_c_truncation(), default_rs_truncation());
    let c = constant_c(ct).map_err(|e| fail("c", e))?;
    let c_prime = cubic_frequency_root(c).map_err(|e| fail("c_prime", e))?;
    let rs = rs_second_order_coefficient(rt).map_err(|e| fail("rs_second_order", e))?;
    let r516 = resummation_coefficient(Ratio::new(1, 2), 3).map_err(|e| fail("resum_5_16", e))?;
    let r2132 = resummation_coefficient(Ratio::new(1, 4), 2).map_err(|e| fail("resum_21_32", e))?;
    let doc = ConstantsDocument {
        c: round(c),
        c_prime: round(c_prime),
        rs_second_order: round(rs),
        resum_5_16: round(ratio_to_f64(r516)),
        resum_21_32: round(ratio_to_f64(r2132)),
        truncation: TruncationProvenance {
            c: TruncationRecord {
                max_terms: ct.max_terms,
                tail_tol: ct.tail_tol,
                method: "double sum truncated at N and N/2, Richardson-extrapolated with exponent 3/2",
            },
            rs_second_order: TruncationRecord {
                max_terms: rt.max_terms,
                tail_tol: rt.tail_tol,
                method: "partial sum plus integral tail estimate",
            },
        },
    };
    let points = ["c", "c_prime", "rs_second_order", "resum_5_16", "resum_21_32"]
        .iter()
        .map(|q| json!({ "quantity": q, "status": "ok" }))
        .collect();
    let config = json!({ "out": cfg.out.display().to_string(), "precision": cfg.precision });
    write_outputs("constants", &cfg.out, &to_json(&doc), config, started, &[], points)
}

fn report_line(o: &CheckOutcome) -> String {
    let measured = match (o.residual, &o.error) {
        (Some(r), _) => format!("residual {r:.3e}"),
        (None, Some(e)) => format!("error: {e}"),
        (None, None) => "no result".to_string(),
    };
    format!(
        "{} {:<12} {:<62} {}  tolerance {:.0e}",
        if o.passed() { "PASS" } else { "FAIL" },
        o.module,
        o.name,
        measured,
        o.tolerance
    )
}

pub fn selfcheck(tolerance: Option<f64>, out: &mut impl Write) -> Result<(), Failure> {
    let outcomes = selfcheck::run_all(tolerance);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let io = |e: std::io::Error| Failure::Computation(format!("cannot write report: {e}"));
    for o in &outcomes {
        writeln!(out, "{}", report_line(o)).map_err(io)?;
    }
    writeln!(out, "{} of {} checks passed", outcomes.len() - failed, outcomes.len()).map_err(io)?;
    if failed > 0 {
        return Err(Failure::Computation(format!("{failed} self-checks failed")));
    }
    Ok(())
}
