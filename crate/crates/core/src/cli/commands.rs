use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asympt::{convergence_check_designs, expansion_check, limiting_design};
use crate::cheb::{is_chebyshev_system, remez, ChebyshevSolution, RemezOptions};
use crate::design::{c_from, estar_from, Design};
use crate::error::Result;
use crate::model::ModelSpec;
use crate::optimal::{
    brute_force_c, brute_force_e, efficiencies, eig_ratio_sweep, min_eigenvalue, verify_c,
    verify_e_with, OracleOptions, VerificationReport, VerifyOptions,
};

use super::config::{AsymptConfig, AsymptMode, CriterionConfig, Curve, JobConfig, SweepConfig};
use super::tables::{format_value, table1, table2, Table, TABLE_Z};
use super::CliError;

/// A command result as JSON document and CSV rendering.
pub struct Output {
    pub json: Value,
    pub csv: String,
}

impl Output {
    fn new(json: Value, csv: String) -> Self {
        Self { json, csv }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn remez_options(cfg: &JobConfig) -> RemezOptions {
    RemezOptions::default().with_grid_size(cfg.numeric.grid_size)
}

fn verify_options(cfg: &JobConfig) -> VerifyOptions {
    VerifyOptions {
        grid_size: cfg.numeric.grid_size,
        tol: cfg.numeric.tol,
    }
}

const CHEBYSHEV_TRIALS: usize = 2000;

#[derive(Serialize)]
struct Solved {
    design: Design,
    source: &'static str,
    verification: VerificationReport,
    lambda_min: f64,
    efficiencies: Option<Vec<f64>>,
    chebyshev: ChebyshevSolution,
    chebyshev_check: crate::cheb::ChebyshevCheck,
}

fn solve_e(
    model: &ModelSpec,
    cheb: &ChebyshevSolution,
    vopts: &VerifyOptions,
) -> Result<(Design, &'static str, VerificationReport)> {
    if let Ok(cand) = estar_from(model, cheb.clone()) {
        let report = verify_e_with(model, &cand.design, cheb, vopts)?;
        if report.is_optimal() {
            return Ok((cand.design, "chebyshev", report));
        }
    }
    let design = brute_force_e(model, &OracleOptions::default())?;
    let report = verify_e_with(model, &design, cheb, vopts)?;
    Ok((design, "oracle", report))
}

fn solve_c(
    model: &ModelSpec,
    cheb: &ChebyshevSolution,
    c: &[f64],
    vopts: &VerifyOptions,
) -> Result<(Design, &'static str, VerificationReport)> {
    if let Ok(cand) = c_from(model, cheb.clone(), c) {
        if let Ok(report) = verify_c(model, &cand.design, c, vopts) {
            if report.is_optimal() {
                return Ok((cand.design, "chebyshev", report));
            }
        }
    }
    let oracle = brute_force_c(model, c, &OracleOptions::default())?;
    let report = verify_c(model, &oracle.design, c, vopts)?;
    Ok((oracle.design, "oracle", report))
}

pub fn solve(cfg: &JobConfig) -> Result<Output, CliError> {
    let model = cfg.model()?;
    let criterion = cfg.criterion()?.clone();
    if let CriterionConfig::C { c } = &criterion {
        if c.len() != model.m() || c.iter().all(|&v| v == 0.0) {
            return Err(CliError::Config(format!(
                "c must be a non-zero vector of length m = {}",
                model.m()
            )));
        }
    }
    let vopts = verify_options(cfg);
    let cheb = remez(&model, &remez_options(cfg))?;
    let (design, source, verification) = match &criterion {
        CriterionConfig::E => solve_e(&model, &cheb, &vopts)?,
        CriterionConfig::C { c } => solve_c(&model, &cheb, c, &vopts)?,
    };
    let solved = Solved {
        lambda_min: min_eigenvalue(&model, &design)?,
        efficiencies: efficiencies(&model, &design, &cheb, &vopts).ok(),
        chebyshev_check: is_chebyshev_system(&model, CHEBYSHEV_TRIALS, cfg.numeric.seed)?,
        chebyshev: cheb,
        design,
        source,
        verification,
    };
    let csv = solved.design.to_csv();
    Ok(Output::new(to_value(&solved), csv))
}

fn table_z(cfg: &JobConfig) -> Vec<f64> {
    cfg.z.clone().unwrap_or_else(|| TABLE_Z.to_vec())
}

fn table_output(table: Table, round: bool) -> Output {
    let csv = table.to_csv(round);
    let shown = if round { table.rounded() } else { table };
    Output::new(to_value(&shown), csv)
}

fn check_z(z: &[f64]) -> Result<(), CliError> {
    match z.iter().find(|&&z| !(z > 0.0 && z < 1.0)) {
        Some(z) => Err(CliError::Config(format!("z = {z} must lie in (0, 1)"))),
        None => Ok(()),
    }
}

pub fn table_one(cfg: &JobConfig, round: bool) -> Result<Output, CliError> {
    let z = table_z(cfg);
    check_z(&z)?;
    Ok(table_output(table1(&z), round))
}

pub fn table_two(cfg: &JobConfig, round: bool) -> Result<Output, CliError> {
    let z = table_z(cfg);
    check_z(&z)?;
    Ok(table_output(table2(&z)?, round))
}

#[derive(Serialize)]
struct SweepPoint {
    b: f64,
    values: Option<Vec<f64>>,
    error: Option<String>,
}

fn sweep_models(model: &ModelSpec, sweep: &SweepConfig) -> Result<Vec<Vec<f64>>, CliError> {
    if sweep.index >= model.k() {
        return Err(CliError::Config(format!(
            "sweep index {} out of range for k = {}",
            sweep.index,
            model.k()
        )));
    }
    Ok(sweep
        .values()
        .into_iter()
        .map(|v| {
            let mut b = model.b().to_vec();
            b[sweep.index] = v;
            b
        })
        .collect())
}

pub fn sweep(cfg: &JobConfig, round: bool) -> Result<Output, CliError> {
    let model = cfg.model()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a sweep block".into()))?;
    let bs = sweep_models(&model, sweep)?;
    let ropts = remez_options(cfg);
    let vopts = verify_options(cfg);
    let (names, points): (Vec<String>, Vec<SweepPoint>) = match sweep.curve {
        Curve::EigRatio => {
            let rows = eig_ratio_sweep(&model, &bs, &ropts);
            let points = rows
                .into_iter()
                .map(|r| SweepPoint {
                    b: r.b[sweep.index],
                    values: r.ratio.map(|v| vec![v]),
                    error: r.error,
                })
                .collect();
            (vec!["ratio".into()], points)
        }
        Curve::Efficiency => {
            let points = bs
                .par_iter()
                .map(|b| {
                    let res = model.with_b(b.clone()).and_then(|m| {
                        let cheb = remez(&m, &ropts)?;
                        let d = estar_from(&m, cheb.clone())?;
                        efficiencies(&m, &d.design, &cheb, &vopts)
                    });
                    SweepPoint {
                        b: b[sweep.index],
                        error: res.as_ref().err().map(|e| e.to_string()),
                        values: res.ok(),
                    }
                })
                .collect();
            ((1..=model.m()).map(|i| format!("eff{i}")).collect(), points)
        }
    };
    let mut csv = format!("b,{},status\n", names.join(","));
    for p in &points {
        csv.push_str(&format!("{:?}", p.b));
        match &p.values {
            Some(v) => v.iter().for_each(|x| {
                csv.push(',');
                csv.push_str(&format_value(*x, round));
            }),
            None => names.iter().for_each(|_| csv.push(',')),
        }
        csv.push(',');
        csv.push_str(&p.error.as_deref().unwrap_or("ok").replace([',', '\n'], ";"));
        csv.push('\n');
    }
    let doc = json!({ "curve": names, "points": to_value(&points) });
    Ok(Output::new(doc, csv))
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn flag_cell(f: &Option<String>) -> String {
    f.as_deref().unwrap_or("ok").replace([',', '\n'], ";")
}

pub fn asympt(cfg: &JobConfig) -> Result<Output, CliError> {
    let model = cfg.model()?;
    let a: &AsymptConfig = cfg
        .asympt
        .as_ref()
        .ok_or_else(|| CliError::Config("asympt needs an asympt block".into()))?;
    if a.r.len() != model.k() {
        return Err(CliError::Config(format!(
            "r has {} entries but the model has k = {}",
            a.r.len(),
            model.k()
        )));
    }
    match a.mode {
        AsymptMode::Expansion => {
            let design = limiting_design(&model, a.x, None)?.design;
            let rows = expansion_check(&model, a.x, &a.r, &design, &a.deltas)?;
            let mut csv = String::from("delta,error,identity_residual,status\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{:?},{},{},{}\n",
                    r.delta,
                    opt_cell(r.error),
                    opt_cell(r.identity_residual),
                    flag_cell(&r.flag)
                ));
            }
            Ok(Output::new(json!({ "design": design, "rows": rows }), csv))
        }
        AsymptMode::Convergence => {
            let rows = convergence_check_designs(&model, a.x, &a.r, a.c.as_deref(), &a.deltas)?;
            let mut csv = String::from("delta,dist_estar,dist_c,status\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{:?},{},{},{}\n",
                    r.delta,
                    opt_cell(r.dist_estar),
                    opt_cell(r.dist_c),
                    flag_cell(&r.flag)
                ));
            }
            Ok(Output::new(json!({ "rows": rows }), csv))
        }
    }
}

fn read_design(path: &std::path::Path) -> Result<Design, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        Design::from_csv(&text)
    } else {
        Design::from_json(&text)
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn check(cfg: &JobConfig, design: Option<&std::path::Path>) -> Result<Output, CliError> {
    let model = cfg.model()?;
    let path = design
        .or(cfg.design.as_deref())
        .ok_or_else(|| CliError::Config("check needs a design file (--design)".into()))?;
    let design = read_design(path)?;
    design
        .check_interval(&model.interval())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let vopts = verify_options(cfg);
    let report = match cfg.criterion()? {
        CriterionConfig::E => {
            let cheb = remez(&model, &remez_options(cfg))?;
            verify_e_with(&model, &design, &cheb, &vopts)?
        }
        CriterionConfig::C { c } => {
            if c.len() != model.m() {
                return Err(CliError::Config(format!(
                    "c has length {}, expected m = {}",
                    c.len(),
                    model.m()
                )));
            }
            verify_c(&model, &design, c, &vopts)?
        }
    };
    let verdict = to_value(&report.verdict);
    let csv = format!(
        "verdict,lambda_min,lambda_2,max_violation,argmax_point,multiplicity\n{},{:?},{:?},{:?},{:?},{}\n",
        verdict.as_str().unwrap_or_default(),
        report.lambda_min,
        report.lambda_2,
        report.max_violation,
        report.argmax_point,
        report.multiplicity
    );
    Ok(Output::new(json!({ "design": design, "verification": report }), csv))
}
