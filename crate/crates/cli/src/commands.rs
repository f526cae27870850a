use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cokernel_core::dihedral::{burnside_dim, harmonic_coinvariant_dim};
use cokernel_core::johnson::{
    calibrate as run_calibration, check_stable, cokernel_quotient, default_signs, figure_panels, verify_diagram,
    verify_theorem, CalibrationReport, DiagramReport, Signs,
};
use cokernel_core::rep::{dihedral_multiplicities, gl_dim, predict_top_piece, sp_dim};
use cokernel_core::{Error, Q};

use crate::Params;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SignArg {
    Auto,
    Fixed(i8),
}

impl FromStr for SignArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "auto" => Ok(SignArg::Auto),
            "1" | "+1" => Ok(SignArg::Fixed(1)),
            "-1" => Ok(SignArg::Fixed(-1)),
            other => Err(format!("expected 1, -1 or auto, got {other:?}")),
        }
    }
}

impl fmt::Display for SignArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignArg::Auto => write!(f, "auto"),
            SignArg::Fixed(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Infeasible(_) | Error::Parse(_) | Error::Position(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

/// A finished command: the JSON report, a flat table for csv/table output,
/// stderr notes and the exit code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub messages: Vec<String>,
    pub exit: u8,
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn row(k: &str, v: impl ToString) -> Vec<String> {
    vec![k.to_string(), v.to_string()]
}

/// (σ, ε) as requested; None means auto.
fn requested_signs(p: &Params) -> Result<(Option<i8>, Option<i8>), CliError> {
    let fixed = |s: SignArg| match s {
        SignArg::Auto => None,
        SignArg::Fixed(x) => Some(x),
    };
    let mut sigma = fixed(p.edge_sign);
    let mut eps = fixed(p.reflection_sign);
    if let Some(spec) = &p.signs {
        if spec.trim() != "auto" {
            let parts: Vec<&str> = spec.split(',').collect();
            let [s, e] = parts.as_slice() else {
                return Err(CliError::Usage(format!("--signs expects auto or SIGMA,EPSILON, got {spec:?}")));
            };
            let parse = |x: &str| match x.parse::<SignArg>() {
                Ok(SignArg::Fixed(v)) => Ok(Some(v)),
                Ok(SignArg::Auto) => Ok(None),
                Err(m) => Err(CliError::Usage(m)),
            };
            sigma = sigma.or(parse(s)?);
            eps = eps.or(parse(e)?);
        }
    }
    Ok((sigma, eps))
}

fn degree(p: &Params, min: usize) -> Result<(usize, usize), CliError> {
    if p.d < min {
        return Err(CliError::Usage(format!("--d must be at least {min}")));
    }
    let g = p.g.unwrap_or(p.d);
    if g == 0 {
        return Err(CliError::Usage("--g must be at least 1".into()));
    }
    Ok((p.d, g))
}

fn diagram_json(r: &DiagramReport) -> Value {
    json!({
        "sigma": r.sigma,
        "exhaustive": r.exhaustive,
        "checked": r.checked,
        "skipped_trivial": r.skipped_trivial,
        "left_failures": r.left_failures,
        "right_failures": r.right_failures,
        "pass": r.pass(),
    })
}

fn calibration_json(r: &CalibrationReport) -> Value {
    json!({
        "d": r.d,
        "g": r.g,
        "chosen": { "sigma": r.chosen.sigma, "epsilon": r.chosen.epsilon },
        "candidates": r.candidates.iter().map(|c| json!({
            "sigma": c.sigma,
            "epsilon": c.epsilon,
            "diagram": c.diagram,
            "chain": c.chain,
            "reflection": c.reflection,
            "pass": c.pass(),
        })).collect::<Vec<_>>(),
        "diagrams": r.diagrams.iter().map(|d| json!({
            "sigma": d.sigma,
            "checked": d.checked,
            "left_failures": d.left_failures.len(),
            "right_failures": d.right_failures.len(),
        })).collect::<Vec<_>>(),
    })
}

fn rejection_log(r: &CalibrationReport) -> Vec<String> {
    r.candidates
        .iter()
        .filter(|c| !c.pass())
        .map(|c| {
            let mut why = Vec::new();
            if !c.diagram {
                why.push("diagram fails");
            }
            if !c.chain {
                why.push("loop chain fails");
            }
            if !c.reflection {
                why.push("reflection sign inconsistent with loop automorphism");
            }
            format!("rejected sigma={:+} epsilon={:+}: {}", c.sigma, c.epsilon, why.join(", "))
        })
        .collect()
}

pub fn verify(p: &Params, timing: bool) -> CmdResult {
    let start = Instant::now();
    let (d, g) = degree(p, 2)?;
    let (sigma_req, eps_req) = requested_signs(p)?;
    let mut messages = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    if g < d {
        messages.push(format!("warning: g = {g} is below the stable-range default g = d = {d}"));
    }

    let mut calibration = None;
    let signs = if sigma_req.is_some() && eps_req.is_some() {
        Signs { sigma: sigma_req.unwrap(), epsilon: eps_req.unwrap() }
    } else {
        if p.trials == 0 {
            return Err(CliError::Usage("calibration needs --trials > 0".into()));
        }
        let fallback = default_signs(d);
        match run_calibration(d, g.max(d), p.trials, p.seed) {
            Ok(r) => {
                let s = Signs { sigma: sigma_req.unwrap_or(r.chosen.sigma), epsilon: eps_req.unwrap_or(r.chosen.epsilon) };
                calibration = Some(r);
                s
            }
            Err(Error::Calibration(m)) => {
                failures.push(format!("calibration: {m}"));
                Signs { sigma: sigma_req.unwrap_or(fallback.sigma), epsilon: eps_req.unwrap_or(fallback.epsilon) }
            }
            Err(e) => return Err(e.into()),
        }
    };

    let reused = calibration
        .as_ref()
        .filter(|c| c.g == g)
        .and_then(|c| c.diagrams.iter().find(|r| r.sigma == signs.sigma).cloned());
    let diagram = match reused {
        Some(r) => r,
        None => verify_diagram(d, g, p.trials, p.seed, signs.sigma)?,
    };
    if diagram.checked == 0 {
        failures.push("diagram: no nontrivial tripod tuples at this genus".into());
    } else if !diagram.pass() {
        failures.push(format!(
            "diagram: {} left and {} right failures in {} checked",
            diagram.left_failures.len(),
            diagram.right_failures.len(),
            diagram.checked
        ));
    }

    let (report, scan) = match check_stable(d, g, signs.sigma) {
        Ok(scan) => (scan.reports[0].clone(), Some(scan)),
        Err(Error::StableRange { g, d, reason }) => {
            failures.push(format!("stable range (d = {d}, g = {g}): {reason}"));
            (cokernel_quotient(d, g, signs.sigma)?, None)
        }
        Err(e) => return Err(e.into()),
    };
    let stable = scan.as_ref().is_some_and(|s| s.stable);
    let cokernel_agree = report.agree;
    if let Some(scan) = &scan {
        if !report.agree {
            failures.push(format!(
                "cokernel: tree quotient {} vs graph quotient {}",
                report.dim_quotient_tree, report.dim_quotient_graph
            ));
        }
        if !scan.stable {
            failures.push(format!("stabilization: decomposition changes between g = {g} and g = {}", g + 1));
        }
    }
    let (dims_tree, dims_graph) = (json!(report.dim_quotient_tree), json!(report.dim_quotient_graph));
    let cokernel = match scan {
        Some(scan) => json!({ "reports": scan.reports, "stable": scan.stable }),
        None => json!({ "reports": [report], "stable": false }),
    };

    let theorem = verify_theorem(d, g, signs)?;
    failures.extend(theorem.failures.iter().map(|f| format!("theorem: {f}")));

    let runtime = timing.then(|| start.elapsed().as_millis());
    let mut out = theorem.to_json(runtime);
    out["dims"]["quotient_tree"] = dims_tree;
    out["dims"]["quotient_graph"] = dims_graph;
    out["checks"]["diagram"] = json!(diagram.pass());
    out["checks"]["cokernel_agree"] = json!(cokernel_agree);
    out["checks"]["stable"] = json!(stable);
    out["failures"] = json!(failures);
    out["diagram"] = diagram_json(&diagram);
    out["cokernel"] = cokernel;
    out["calibration"] = calibration.as_ref().map(calibration_json).unwrap_or(Value::Null);

    let rows = vec![
        row("d", d),
        row("g", g),
        row("sigma", signs.sigma),
        row("epsilon", signs.epsilon),
        row("dim_top", theorem.dim_top),
        row("dim_target", theorem.dim_target),
        row("quotient_tree", &out["dims"]["quotient_tree"]),
        row("quotient_graph", &out["dims"]["quotient_graph"]),
        row("well_defined", theorem.well_defined),
        row("surjective", theorem.surjective),
        row("isomorphism", theorem.isomorphism),
        row("diagram", diagram.pass()),
        row("cokernel_agree", cokernel_agree),
        row("stable", stable),
        row("kappa", theorem.kappa.clone().unwrap_or_else(|| "none".into())),
    ];
    for f in &failures {
        messages.push(format!("failed {f}"));
    }
    let exit = if failures.is_empty() { 0 } else { 1 };
    Ok(Outcome { json: out, header: strings(&["key", "value"]), rows, messages, exit })
}

pub fn decompose(p: &Params) -> CmdResult {
    let (d, g) = degree(p, 1)?;
    let (_, eps_req) = requested_signs(p)?;
    let eps = eps_req.unwrap_or(default_signs(d).epsilon);
    let mult = dihedral_multiplicities(d, eps)?;
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for (lambda, m) in &mult {
        let (gl, sp) = (gl_dim(lambda, 2 * g), sp_dim(lambda, g));
        table.push(json!({ "partition": lambda.to_string(), "multiplicity": m, "gl_dim": gl, "sp_dim": sp }));
        rows.push(vec![lambda.to_string(), m.to_string(), gl.to_string(), sp.to_string()]);
    }
    let mut checks = Vec::new();
    let mut messages = Vec::new();
    let mut ok = true;
    for n in 1..=6 {
        let sum: u64 = mult.iter().map(|(l, m)| m * gl_dim(l, n)).sum();
        let b = burnside_dim(n, d, eps)?;
        let agree = Q::int(sum as i64) == b;
        ok &= agree;
        if !agree {
            messages.push(format!("failed burnside check at n = {n}: {sum} vs {b}"));
        }
        checks.push(json!({ "n": n, "sum": sum, "burnside": b.to_string(), "agree": agree }));
    }
    let out = json!({
        "d": d,
        "g": g,
        "epsilon": eps,
        "multiplicities": table,
        "burnside_check": checks,
        "predicted_top_dim": predict_top_piece(d, eps, g)?,
    });
    Ok(Outcome {
        json: out,
        header: strings(&["partition", "multiplicity", "gl_dim", "sp_dim"]),
        rows,
        messages,
        exit: if ok { 0 } else { 1 },
    })
}

pub fn calibrate(p: &Params) -> CmdResult {
    let (d, g) = degree(p, 2)?;
    if p.trials == 0 {
        return Err(CliError::Usage("insufficient evidence: calibration needs --trials > 0".into()));
    }
    let (sigma_req, eps_req) = requested_signs(p)?;
    let r = run_calibration(d, g, p.trials, p.seed)?;
    let mut messages = rejection_log(&r);
    let forced_ok = sigma_req.is_none_or(|s| s == r.chosen.sigma) && eps_req.is_none_or(|e| e == r.chosen.epsilon);
    if !forced_ok {
        messages.push(format!(
            "failed forced signs sigma={} epsilon={}: calibration selects sigma={:+} epsilon={:+}",
            sigma_req.map_or("auto".into(), |s| format!("{s:+}")),
            eps_req.map_or("auto".into(), |e| format!("{e:+}")),
            r.chosen.sigma,
            r.chosen.epsilon
        ));
    }
    let mut out = calibration_json(&r);
    out["forced_ok"] = json!(forced_ok);
    let rows = r
        .candidates
        .iter()
        .map(|c| {
            vec![
                c.sigma.to_string(),
                c.epsilon.to_string(),
                c.diagram.to_string(),
                c.chain.to_string(),
                c.reflection.to_string(),
                c.pass().to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        json: out,
        header: strings(&["sigma", "epsilon", "diagram", "chain", "reflection", "pass"]),
        rows,
        messages,
        exit: if forced_ok { 0 } else { 1 },
    })
}

pub fn figures(p: &Params) -> CmdResult {
    let (sigma, _) = requested_signs(p)?;
    let sigma = sigma.unwrap_or(default_signs(3).sigma);
    let panels = figure_panels(sigma)?;
    let ok = panels.iter().all(|x| x.pass);
    let messages =
        panels.iter().filter(|x| !x.pass).map(|x| format!("failed panel {}: {}", x.panel, x.name)).collect();
    let rows = panels.iter().map(|x| vec![x.panel.to_string(), x.pass.to_string(), x.name.clone()]).collect();
    Ok(Outcome {
        json: json!({ "sigma": sigma, "panels": panels, "pass": ok }),
        header: strings(&["panel", "pass", "name"]),
        rows,
        messages,
        exit: if ok { 0 } else { 1 },
    })
}

pub fn dims(p: &Params, timing: bool) -> CmdResult {
    let start = Instant::now();
    let (d, g) = degree(p, 2)?;
    let (sigma_req, eps_req) = requested_signs(p)?;
    let def = default_signs(d);
    let (sigma, eps) = (sigma_req.unwrap_or(def.sigma), eps_req.unwrap_or(def.epsilon));
    let report = cokernel_quotient(d, g, sigma)?;
    let target = harmonic_coinvariant_dim(g, d, eps)?;
    let predicted = predict_top_piece(d, eps, g)?;
    let mut rows = vec![
        row("dim_t", report.dim_t),
        row("rank_br", report.rank_br),
        row("quotient_tree", report.dim_quotient_tree),
        row("quotient_graph", report.dim_quotient_graph),
        row("target", target),
        row("predicted_top", predicted),
    ];
    for s in &report.strata {
        rows.push(row(&format!("stratum_hairs_{}", s.hairs), s.dim));
    }
    let out = json!({
        "d": d,
        "g": g,
        "signs": { "sigma": sigma, "epsilon": eps },
        "cokernel": report,
        "target": target,
        "predicted_top": predicted,
        "runtime_ms": timing.then(|| start.elapsed().as_millis()),
    });
    Ok(Outcome { json: out, header: strings(&["key", "value"]), rows, messages: Vec::new(), exit: 0 })
}
