use std::path::{Path, PathBuf};

use monogamy_core::hamiltonians::HamiltonianKind;
use monogamy_core::protocol::{
    appendix_b_study, default_t_max, default_tp_max, explore_measure_vs_squeezing, invert, linspace,
    monotonicity_score, reference_states, AppendixBConfig, CalibrationCurve, CalibrationPoint, ExploreConfig,
    ProtocolConfig, ProtocolSystem, ProtocolTrace, ReferencePoint, DRIFT_TOL, REFERENCE_TOL,
};
use monogamy_core::sampling::{fig2_dataset, fig3_dataset, region_check};
use serde_json::{json, Value};

use crate::config::{parse_list, ConfigFile};
use crate::error::{CliError, EXIT_AMBIGUOUS, EXIT_OK, EXIT_VIOLATION};
use crate::output::{flag, fmt_f, manifest_path, Run, Table};
use crate::{AppendixBArgs, ExploreArgs, Fig2Args, Fig3Args, InvertArgs, ProtocolArgs, ProtocolSetup};

pub const FIG2_HEADER: [&str; 4] = ["c_ab", "c_a1a2", "bound", "violation"];
pub const FIG3_HEADER: [&str; 7] = ["l1", "l2", "l3", "l4", "n_ab", "n_max", "class"];
pub const PROTOCOL_HEADER: [&str; 6] = ["t", "s_l_ab", "xi2_ab", "min_xi2_a", "argmin_tp", "nonmonotone_flag"];
pub const EXPLORE_HEADER: [&str; 3] = ["tp", "xi2_a", "n_a"];
pub const APPENDIX_B_HEADER: [&str; 3] = ["t", "s_l_a", "xi2_a"];

/// Largest number of qubits on either side of a protocol run.
pub const MAX_SIDE: usize = 5;
/// `S_L` levels of the reference states.
pub const REFERENCE_LOW: f64 = 0.1;
pub const REFERENCE_HIGH: f64 = 0.7;
/// Largest accepted difference between the two mixed-state evolution paths.
pub const PATH_TOL: f64 = 1e-9;

fn report(violations: &[String]) -> u8 {
    for v in violations {
        eprintln!("violation: {v}");
    }
    if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

pub fn fig2(args: &Fig2Args, file: &ConfigFile) -> Result<u8, CliError> {
    let samples: usize = file.resolve(args.samples, "samples", 3000)?;
    let seed: u64 = file.resolve(args.seed, "seed", 0)?;
    if samples == 0 {
        return Err(CliError::Parse("--samples must be at least 1".into()));
    }
    let mut run = Run::start("fig2");
    let mut records = fig2_dataset(samples, seed)?;
    if let Some(offset) = args.bound_offset {
        for r in &mut records {
            r.bound = r.bound.map(|b| b - offset);
        }
    }
    let mut table = Table::new(&FIG2_HEADER);
    let mut violations = 0usize;
    for r in &records {
        let bound = r.bound.expect("concurrence records carry a bound");
        let v = r.violates_bound();
        violations += usize::from(v);
        table.row(&[fmt_f(r.x), fmt_f(r.y), fmt_f(bound), flag(v).to_string()]);
    }
    run.write(&args.out, table.as_bytes())?;
    run.finish(
        &manifest_path(&args.out),
        seed,
        json!({ "samples": samples, "seed": seed, "c_ab": "2 sqrt(l1 l2) from the two largest eigenvalues of rho_A" }),
        json!({ "violations": violations }),
    )?;
    let msgs: Vec<String> = (violations > 0).then(|| format!("{violations} points above the bound")).into_iter().collect();
    Ok(report(&msgs))
}

pub fn fig3(args: &Fig3Args, file: &ConfigFile) -> Result<u8, CliError> {
    let samples: usize = file.resolve(args.samples, "samples", 100_000)?;
    let seed: u64 = file.resolve(args.seed, "seed", 0)?;
    if samples == 0 {
        return Err(CliError::Parse("--samples must be at least 1".into()));
    }
    let mut run = Run::start("fig3");
    let records = fig3_dataset(samples, seed)?;
    let mut table = Table::new(&FIG3_HEADER);
    for r in &records {
        let mut cells: Vec<String> = r.spectrum.values().iter().map(|&l| fmt_f(l)).collect();
        cells.push(fmt_f(r.x));
        cells.push(fmt_f(r.y));
        cells.push(if r.marker.is_some() { "marker".into() } else { r.class.name().into() });
        table.row(&cells);
    }
    run.write(&args.out, table.as_bytes())?;
    let check = region_check(&records);
    let markers: Vec<Value> = records
        .iter()
        .filter_map(|r| r.marker.map(|m| json!({ "marker": m.name(), "n_ab": r.x, "n_max": r.y })))
        .collect();
    run.finish(
        &manifest_path(&args.out),
        seed,
        json!({ "samples": samples, "seed": seed }),
        json!({
            "off_curve": check.off_curve,
            "above_threshold": check.above_threshold,
            "marker_mismatch": check.marker_mismatch,
            "markers": markers,
        }),
    )?;
    let mut msgs = Vec::new();
    if check.off_curve > 0 {
        msgs.push(format!("{} two_nonzero rows off the rescaled curve", check.off_curve));
    }
    if check.above_threshold > 0 {
        msgs.push(format!("{} rows above the threshold with nonzero n_max", check.above_threshold));
    }
    if check.marker_mismatch > 0 {
        msgs.push(format!("{} marker rows off their expected point", check.marker_mismatch));
    }
    Ok(report(&msgs))
}

/// Resolved protocol settings shared by `protocol` and `explore`.
#[derive(Debug, Clone)]
struct Setup {
    n_a: usize,
    n_b: usize,
    h_ab: HamiltonianKind,
    h_a: HamiltonianKind,
    t_steps: usize,
    tp_steps: usize,
    t_max: Option<f64>,
    tp_max: Option<f64>,
    transverse_ratio: f64,
    refine_tol: f64,
    seed: u64,
}

impl Setup {
    fn resolve(a: &ProtocolSetup, file: &ConfigFile, h_a_default: HamiltonianKind) -> Result<Self, CliError> {
        let s = Self {
            n_a: file.resolve(a.na, "na", 2)?,
            n_b: file.resolve(a.nb, "nb", 2)?,
            h_ab: file.resolve(a.hab, "hab", HamiltonianKind::Oat)?,
            h_a: file.resolve(a.ha, "ha", h_a_default)?,
            t_steps: file.resolve(a.t_steps, "t-steps", monogamy_core::protocol::DEFAULT_T_STEPS)?,
            tp_steps: file.resolve(a.tp_steps, "tp-steps", monogamy_core::protocol::DEFAULT_TP_STEPS)?,
            t_max: a.t_max.map(Ok).or_else(|| file.get("t-max").transpose()).transpose()?,
            tp_max: a.tp_max.map(Ok).or_else(|| file.get("tp-max").transpose()).transpose()?,
            transverse_ratio: file.resolve(a.transverse_ratio, "transverse-ratio", 1.0)?,
            refine_tol: file.resolve(a.refine_tol, "refine-tol", 1e-6)?,
            seed: file.resolve(a.seed, "seed", 0)?,
        };
        if s.n_a > MAX_SIDE || s.n_b > MAX_SIDE {
            return Err(CliError::ResourceCap(format!(
                "at most {MAX_SIDE} qubits per side are supported, got {} + {}",
                s.n_a, s.n_b
            )));
        }
        Ok(s)
    }

    fn config(&self, h_a: HamiltonianKind) -> ProtocolConfig {
        let mut cfg = ProtocolConfig::new(self.n_a, self.n_b, self.h_ab, h_a);
        cfg.t_grid = linspace(0.0, self.t_max.unwrap_or(default_t_max(self.h_ab)), self.t_steps);
        cfg.tp_grid = linspace(0.0, self.tp_max.unwrap_or(default_tp_max(h_a)), self.tp_steps);
        cfg.transverse_ratio = self.transverse_ratio;
        cfg.refine_tol = self.refine_tol;
        cfg.seed = self.seed;
        cfg
    }

    fn echo(&self, cfg: &ProtocolConfig) -> Value {
        json!({
            "na": self.n_a,
            "nb": self.n_b,
            "hab": self.h_ab.name(),
            "ha": cfg.h_a_kind.name(),
            "t_steps": self.t_steps,
            "tp_steps": self.tp_steps,
            "t_max": cfg.t_grid.last(),
            "tp_max": cfg.tp_grid.last(),
            "transverse_ratio": self.transverse_ratio,
            "refine_tol": self.refine_tol,
            "drift_points": cfg.drift_points,
            "seed": self.seed,
            "partition": {
                "a": (0..self.n_a).collect::<Vec<_>>(),
                "b": (self.n_a..self.n_a + self.n_b).collect::<Vec<_>>(),
            },
        })
    }
}

fn run_trace(cfg: ProtocolConfig) -> Result<(ProtocolSystem, ProtocolTrace), CliError> {
    let sys = ProtocolSystem::new(cfg)?;
    let trace = sys.run()?;
    Ok((sys, trace))
}

fn reference_json(p: Option<ReferencePoint>) -> Value {
    match p {
        Some(p) => json!({ "row": p.index, "t": p.t, "s_l_ab": p.s_l_ab, "within_tol": p.within_tol }),
        None => Value::Null,
    }
}

fn score_json(trace: &ProtocolTrace) -> Result<Value, CliError> {
    Ok(match monotonicity_score(&trace.calibration()?) {
        Ok(s) => json!(s),
        Err(e) => json!({ "undefined": e.to_string() }),
    })
}

pub fn protocol(args: &ProtocolArgs, file: &ConfigFile) -> Result<u8, CliError> {
    let setup = Setup::resolve(&args.setup, file, HamiltonianKind::Tf)?;
    let mut run = Run::start("protocol");
    let cfg = setup.config(setup.h_a);
    let analytic = cfg.is_analytic_ghz();
    let echo = setup.echo(&cfg);
    let (_, trace) = run_trace(cfg)?;

    let mut table = Table::new(&PROTOCOL_HEADER);
    for r in &trace.rows {
        table.row(&[
            fmt_f(r.t),
            fmt_f(r.s_l_ab),
            fmt_f(r.xi2_ab),
            fmt_f(r.min_xi2_a),
            fmt_f(r.argmin_tp),
            flag(r.nonmonotone).to_string(),
        ]);
    }
    run.write(&args.out, table.as_bytes())?;

    let mut scores = serde_json::Map::new();
    for kind in HamiltonianKind::ALL {
        let value = if kind == setup.h_a {
            score_json(&trace)?
        } else {
            score_json(&run_trace(setup.config(kind))?.1)?
        };
        scores.insert(kind.name().to_string(), value);
    }
    let refs = reference_states(&trace, REFERENCE_LOW, REFERENCE_HIGH, REFERENCE_TOL);
    let drift = trace.max_negativity_drift();
    run.finish(
        &manifest_path(&args.out),
        setup.seed,
        echo,
        json!({
            "analytic_inversion": analytic,
            "monotonicity_scores": scores,
            "max_negativity_drift": drift,
            "flagged_rows": trace.rows.iter().filter(|r| r.nonmonotone).count(),
            "reference_states": {
                "levels": [REFERENCE_LOW, REFERENCE_HIGH],
                "tolerance": REFERENCE_TOL,
                "p1": reference_json(refs.p1),
                "p2": reference_json(refs.p2),
                "p3": reference_json(refs.p3),
            },
        }),
    )?;
    let msgs: Vec<String> = (!(drift < DRIFT_TOL))
        .then(|| format!("A|B negativity drifted by {drift:e} along a local sweep"))
        .into_iter()
        .collect();
    Ok(report(&msgs))
}

pub fn explore(args: &ExploreArgs, file: &ConfigFile) -> Result<u8, CliError> {
    let reference_setup = ProtocolSetup {
        na: Some(file.resolve(args.na, "na", 4)?),
        nb: Some(file.resolve(args.nb, "nb", 4)?),
        hab: args.hab,
        ha: Some(file.resolve(args.ref_ha, "ref-ha", HamiltonianKind::Tf)?),
        t_steps: args.t_steps,
        tp_steps: args.tp_steps,
        t_max: args.t_max,
        tp_max: None,
        transverse_ratio: args.transverse_ratio,
        refine_tol: None,
        seed: args.seed,
    };
    let mut setup = Setup::resolve(&reference_setup, file, HamiltonianKind::Tf)?;
    setup.tp_max = None;
    let mut run = Run::start("explore");

    let at: Option<f64> = args.at.map(Ok).or_else(|| file.get("at").transpose()).transpose()?;
    let reference: String = file.resolve(args.reference.clone(), "reference", "p1".to_string())?;
    let ref_cfg = setup.config(setup.h_a);
    let echo_ref = setup.echo(&ref_cfg);
    let (sys, t, source) = match at {
        Some(t) => (ProtocolSystem::new(ref_cfg)?, t, json!({ "at": t })),
        None => {
            let (sys, trace) = run_trace(ref_cfg)?;
            let refs = reference_states(&trace, REFERENCE_LOW, REFERENCE_HIGH, REFERENCE_TOL);
            let p = match reference.as_str() {
                "p1" => refs.p1,
                "p2" => refs.p2,
                "p3" => refs.p3,
                other => return Err(CliError::Parse(format!("unknown reference state `{other}`"))),
            }
            .ok_or_else(|| CliError::Parse(format!("the trace has no {reference} state")))?;
            (sys, p.t, json!({ "reference": reference, "state": reference_json(Some(p)) }))
        }
    };
    let rho_a = sys.rho_a_at(t)?;
    let s_l_ab = sys.s_l_at(t)?;

    let explore_kind: HamiltonianKind = file.resolve(args.ha, "ha", HamiltonianKind::Tf)?;
    let mut cfg = ExploreConfig::new(explore_kind);
    cfg.transverse_ratio = setup.transverse_ratio;
    cfg.t_max = file.resolve(args.tp_max, "tp-max", cfg.t_max)?;
    cfg.steps = file.resolve(args.steps, "steps", cfg.steps)?;
    let split: Option<String> = args.split.clone().map(Ok).or_else(|| file.get("split").transpose()).transpose()?;
    cfg.split = split.as_deref().map(parse_list::<usize>).transpose()?;
    let trace = explore_measure_vs_squeezing(&rho_a, &cfg)?;

    let mut table = Table::new(&EXPLORE_HEADER);
    for r in &trace.rows {
        table.row(&[fmt_f(r.tp), fmt_f(r.xi2_a), fmt_f(r.n_a)]);
    }
    run.write(&args.out, table.as_bytes())?;
    let split_b: Vec<usize> = (0..setup.n_a).filter(|q| !trace.split.contains(q)).collect();
    run.finish(
        &manifest_path(&args.out),
        setup.seed,
        json!({
            "state_source": source,
            "protocol": echo_ref,
            "ha": explore_kind.name(),
            "tp_max": cfg.t_max,
            "steps": cfg.steps,
            "transverse_ratio": cfg.transverse_ratio,
            "split": { "a": trace.split, "b": split_b },
        }),
        json!({
            "t": t,
            "s_l_ab": s_l_ab,
            "min_xi2_a": trace.min_xi2_a,
            "argmin_tp": trace.argmin_tp,
            "max_n_a": trace.max_n_a,
            "n_a_at_argmin": trace.n_a_at_argmin,
            "relative_gap": trace.relative_gap(),
            "path_discrepancy": trace.path_discrepancy,
        }),
    )?;
    let msgs: Vec<String> = (!(trace.path_discrepancy < PATH_TOL))
        .then(|| format!("evolution paths differ by {:e}", trace.path_discrepancy))
        .into_iter()
        .collect();
    Ok(report(&msgs))
}

pub fn appendix_b(args: &AppendixBArgs, file: &ConfigFile) -> Result<u8, CliError> {
    let defaults = AppendixBConfig::default();
    let sizes: Option<String> = args.sizes.clone().map(Ok).or_else(|| file.get("sizes").transpose()).transpose()?;
    let kinds: Option<String> = args.kinds.clone().map(Ok).or_else(|| file.get("kinds").transpose()).transpose()?;
    let cfg = AppendixBConfig {
        sizes: sizes.as_deref().map(parse_list).transpose()?.unwrap_or(defaults.sizes),
        kinds: kinds.as_deref().map(parse_list).transpose()?.unwrap_or(defaults.kinds),
        transverse_ratio: file.resolve(args.transverse_ratio, "transverse-ratio", defaults.transverse_ratio)?,
        t_max: file.resolve(args.t_max, "t-max", defaults.t_max)?,
        steps: file.resolve(args.steps, "steps", defaults.steps)?,
    };
    let seed: u64 = file.resolve(args.seed, "seed", 0)?;
    let mut run = Run::start("appendix-b");
    let study = appendix_b_study(&cfg)?;
    let mut summaries = Vec::new();
    for t in &study.traces {
        let mut table = Table::new(&APPENDIX_B_HEADER);
        for &(time, s_l, xi2) in &t.rows {
            table.row(&[fmt_f(time), fmt_f(s_l), fmt_f(xi2)]);
        }
        let name = format!("appendix_b_n{}_{}.csv", t.size, t.kind.name());
        run.write(&args.out_dir.join(&name), table.as_bytes())?;
        summaries.push(json!({
            "file": name,
            "size": t.size,
            "kind": t.kind.name(),
            "min_xi2": t.min_xi2,
            "s_l_at_argmin": t.s_l_at_argmin,
            "max_s_l": t.max_s_l,
            "entropy_ratio": t.entropy_ratio(),
        }));
    }
    let violations = study.trend_violations();
    run.finish(
        &args.out_dir.join("manifest.json"),
        seed,
        json!({
            "sizes": cfg.sizes,
            "kinds": cfg.kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
            "transverse_ratio": cfg.transverse_ratio,
            "t_max": cfg.t_max,
            "steps": cfg.steps,
            "initial_state": "all down",
            "split": "first half of the register",
        }),
        json!({
            "traces": summaries,
            "size2_coincidence": study.coincidence(2),
            "trend_violations": violations,
        }),
    )?;
    Ok(report(&violations))
}

/// Reads a protocol CSV back into calibration points.
pub fn read_curve(path: &Path) -> Result<Vec<CalibrationPoint>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != PROTOCOL_HEADER.join(",") {
        return Err(CliError::Parse(format!("{}: unexpected header `{header}`", path.display())));
    }
    let mut points = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != PROTOCOL_HEADER.len() {
            return Err(CliError::Parse(format!("{}: line {}: expected 6 columns", path.display(), n + 2)));
        }
        let num = |i: usize| {
            cells[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Parse(format!("{}: line {}: {e}", path.display(), n + 2)))
        };
        points.push(CalibrationPoint { t: num(0)?, s_l: num(1)?, min_xi2: num(3)? });
    }
    Ok(points)
}

/// Whether the sidecar manifest of `curve` describes the closed-form GHZ run.
fn sidecar_is_analytic(curve: &Path) -> Result<bool, CliError> {
    let path: PathBuf = manifest_path(curve);
    if !path.exists() {
        return Ok(false);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let c = &v["config"];
    Ok(c["na"] == json!(2) && c["nb"] == json!(2) && c["hab"] == json!("ghz") && c["ha"] == json!("ghz"))
}

pub fn invert_cmd(args: &InvertArgs) -> Result<u8, CliError> {
    let curve = CalibrationCurve::new(read_curve(&args.curve)?, sidecar_is_analytic(&args.curve)?)?;
    let inv = invert(&curve, args.xi2)?;
    for c in &inv.candidates {
        println!("s_l_ab={}", fmt_f(*c));
    }
    println!("status={}", if inv.ambiguous { "ambiguous" } else { "unique" });
    Ok(if inv.ambiguous { EXIT_AMBIGUOUS } else { EXIT_OK })
}
