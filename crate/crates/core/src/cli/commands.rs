use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::report::{digest, Body, Outcome, RunReport, Timer};
use super::svg::render_cover;
use super::{
    AsdimArgs, CayleyCommand, CayleySmallArgs, CayleyTransferArgs, ClaimsArgs, Command, CoverArgs, Expectation,
    RenderArgs, Settings, SmallArgs,
};
use crate::cayley::{cayley_ball, group_smallness_demo, transfer_coloring, GroupSpec, MAX_GROUP_WINDOW};
use crate::coarse::{PointSet, Space, Window, WindowSpec};
use crate::coloring::{asdim_oracle_on, widest_mono_component, Coloring, OracleAnswer, OracleConfig};
use crate::error::{input, refused, Error, Result};
use crate::scale::Scale;
use crate::smallness::{phi_witness, small_verdict, PhiTable, Verdict};
use crate::triangulation::{
    build_cover, claim4_check, claim6_check, kuhn_simplices, lip_sweep, phi_demand, sample_b_primes, CoverConfig, Probe,
};

/// Most violators or points quoted in a witness.
const WITNESS_LIMIT: usize = 10;

pub(super) fn read_json_file(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{} is not valid JSON: {e}", path.display())))
}

/// Inline JSON when the argument starts with `{` or `[`, a file path otherwise.
fn load_json(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| Error::Input(format!("bad inline JSON: {e}")))
    } else {
        read_json_file(Path::new(arg))
    }
}

fn write_text(path: &Path, text: &str) -> Result<String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn write_json(path: &Path, v: &Value) -> Result<String> {
    let text = serde_json::to_string_pretty(&super::canonical(v)).expect("values serialize");
    write_text(path, &(text + "\n"))
}

fn window_spec(arg: &str) -> Result<WindowSpec> {
    serde_json::from_value(load_json(arg)?).map_err(|e| Error::Input(format!("bad window spec: {e}")))
}

fn truncated(items: Vec<Value>) -> Value {
    Value::Array(items.into_iter().take(WITNESS_LIMIT).collect())
}

pub(super) fn dispatch(cmd: &Command, s: &Settings) -> Result<RunReport> {
    let mut timer = Timer::new();
    let (name, inputs, body) = match cmd {
        Command::AsdimWitness(a) => ("asdim-witness", asdim_inputs(a, s)?, asdim_witness(a, s, &mut timer)),
        Command::CoverBuild(a) => ("cover-build", cover_inputs(a, s)?, cover_build(a, s, &mut timer)),
        Command::SmallCheck(a) => ("small-check", small_inputs(a)?, small_check(a, &mut timer)),
        Command::ClaimsVerify(a) => ("claims-verify", claims_inputs(a, s), claims_verify(a, s, &mut timer)),
        Command::Cayley { action } => match action {
            CayleyCommand::Ball { group, radius, out } => (
                "cayley ball",
                json!({ "group": group, "radius": radius }),
                cayley_ball_cmd(group, *radius, out.as_deref()),
            ),
            CayleyCommand::Small(a) => ("cayley small", cayley_small_inputs(a, s)?, cayley_small(a, s, &mut timer)),
            CayleyCommand::Transfer(a) => ("cayley transfer", transfer_inputs(a)?, cayley_transfer(a)),
        },
        Command::RenderSvg(a) => ("render-svg", json!({ "input": load_json(&a.input)? }), render_svg(a)),
    };
    let body = match body {
        Ok(b) => b,
        Err(Error::Refused(msg)) => Body {
            outcome: Outcome::Refused,
            metrics: json!({}),
            witness: None,
            artifacts: Vec::new(),
            message: Some(msg),
        },
        Err(e) => return Err(e),
    };
    debug_assert!(body.outcome != Outcome::Fail || body.witness.is_some());
    Ok(RunReport {
        command: name.to_string(),
        inputs_digest: digest(&json!({ "command": name, "inputs": inputs })),
        outcome: body.outcome,
        metrics: body.metrics,
        witness: body.witness,
        artifacts: body.artifacts,
        message: body.message,
        timings: s.timings.then(|| timer.to_json()),
    })
}

fn asdim_inputs(a: &AsdimArgs, s: &Settings) -> Result<Value> {
    Ok(json!({
        "window": window_spec(&a.window)?,
        "set": a.set.as_deref().map(load_json).transpose()?,
        "r": a.r, "n": a.n, "d": a.d,
        "coloring": a.coloring.as_deref().map(load_json).transpose()?,
        "max_search": s.max_search,
    }))
}

fn asdim_witness(a: &AsdimArgs, s: &Settings, timer: &mut Timer) -> Result<Body> {
    let w = Window::from_spec(&window_spec(&a.window)?)?;
    let core = w.core();
    let domain = match &a.set {
        Some(v) => PointSet::decode(&w, &load_json(v)?)?.intersection(&core),
        None => core,
    };
    timer.lap("load");
    let mut metrics = json!({
        "window_points": w.len(),
        "domain_points": domain.len(),
        "r": a.r, "n": a.n, "d": a.d,
    });
    if let Some(path) = &a.coloring {
        let mut v = load_json(path)?;
        // a stale certificate is re-derived below rather than trusted
        if let Some(o) = v.as_object_mut() {
            o.remove("certified");
        }
        let mut chi = Coloring::from_json(&w, &v)?;
        if chi.n() > a.n {
            return Ok(Body::fail(
                metrics,
                json!({ "palette": chi.n() }),
                format!("colouring uses colours 0..={}", chi.n()),
            ));
        }
        if let Some(p) = domain.iter().find(|&p| chi.get(p).is_none()) {
            return Ok(Body::fail(metrics, json!({ "uncolored": w.encode(p) }), "a domain point has no colour"));
        }
        let widest = widest_mono_component(&w, &chi, a.r);
        timer.lap("verify");
        let measured = widest.as_ref().map_or(Scale::ZERO, |b| b.0);
        metrics["measured_d"] = json!(measured);
        if measured > a.d {
            let (d, color, comp) = widest.expect("a component exceeds d");
            let witness = json!({ "color": color, "diameter": d, "size": comp.len(), "component": truncated(comp.iter().map(|p| w.encode(p)).collect()) });
            return Ok(Body::fail(metrics, witness, format!("a monochrome {}-component has diameter {d}", a.r)));
        }
        chi.certify(&w, a.r, a.d)?;
        let arts = a.out.as_deref().map(|p| write_json(p, &chi.to_json(&w))).transpose()?;
        return Ok(Body::pass(metrics).with_artifacts(arts.into_iter().collect()));
    }
    let cfg = OracleConfig { max_search: s.max_search };
    let answer = asdim_oracle_on(&w, &domain, a.r, a.n, a.d, &cfg)?;
    timer.lap("oracle");
    match answer {
        OracleAnswer::Colorable(chi) => {
            metrics["measured_d"] = json!(widest_mono_component(&w, &chi, a.r).map_or(Scale::ZERO, |b| b.0));
            let arts = a.out.as_deref().map(|p| write_json(p, &chi.to_json(&w))).transpose()?;
            Ok(Body::pass(metrics).with_artifacts(arts.into_iter().collect()))
        }
        OracleAnswer::NotColorable { component } => {
            let witness = json!({
                "uncolorable_component_size": component.len(),
                "component": truncated(component.iter().map(|p| w.encode(p)).collect()),
            });
            Ok(Body::fail(metrics, witness, format!("no colouring with colours 0..={} exists", a.n)))
        }
    }
}

fn cover_config(s: &Settings) -> CoverConfig {
    CoverConfig { sweep_density: s.sweep_density, max_doublings: s.max_doublings }
}

fn cover_inputs(a: &CoverArgs, s: &Settings) -> Result<Value> {
    Ok(json!({
        "window": window_spec(&a.window)?,
        "set": load_json(&a.set)?,
        "delta": a.delta,
        "phi": a.phi.as_deref().map(load_json).transpose()?,
        "phi_max": a.phi_max,
        "sweep_density": s.sweep_density,
        "max_doublings": s.max_doublings,
    }))
}

fn cover_build(a: &CoverArgs, s: &Settings, timer: &mut Timer) -> Result<Body> {
    let spec = window_spec(&a.window)?;
    if a.svg.is_some() && spec.dim != 2 {
        return input("an SVG can only be drawn for a planar window");
    }
    let w = Window::from_spec(&spec)?;
    let set = PointSet::decode(&w, &load_json(&a.set)?)?;
    let mut phi = match &a.phi {
        Some(p) => PhiTable::from_json(&load_json(p)?)?,
        None => PhiTable::new(),
    };
    let cfg = cover_config(s);
    let demand = phi_demand(w.dim(), a.delta, &cfg)?;
    let mut extended = false;
    if phi.get(demand).is_none() {
        if let Some(max) = a.phi_max {
            if let Some(p) = phi_witness(&w, &set, demand, max)? {
                phi.insert(demand, p)?;
                extended = true;
            }
        }
    }
    timer.lap("phi");
    let res = build_cover(&w, &set, a.delta, &phi, &cfg)?;
    timer.lap("cover");
    let r = &res.report;
    let metrics = json!({
        "n": r.n, "delta": r.delta, "eps": crate::scale::QJson(r.eps), "side": crate::scale::QJson(r.side),
        "L": crate::scale::QJson(r.l), "lip_constant": crate::scale::QJson(r.sweep.c),
        "l_delta": demand, "phi_at_l_delta": r.phi_at_l_delta, "phi_extended": extended,
        "mesh": r.mesh, "mesh_bound": crate::scale::QJson(r.mesh_bound),
        "a_multiplicity": r.a_multiplicity, "core_multiplicity": r.core_multiplicity,
        "stars_contained": r.stars_contained, "parts": r.parts,
        "simplices": r.simplices, "relevant_simplices": r.relevant_simplices,
        "fallback_simplices": r.fallback_simplices, "set_points": set.len(),
    });
    let mut artifacts = Vec::new();
    let json_path: Option<PathBuf> = a.out.clone().or_else(|| {
        a.svg.as_ref().map(|p| {
            let mut os = p.clone().into_os_string();
            os.push(".json");
            PathBuf::from(os)
        })
    });
    if let Some(path) = &json_path {
        let artifact = json!({
            "window": spec,
            "set": set.encode(&w),
            "delta": a.delta,
            "phi": phi.to_json(),
            "simplices": res.simplices.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "cover": res.cover.to_json(&w),
            "report": serde_json::to_value(r).expect("reports serialize"),
        });
        artifacts.push(write_json(path, &artifact)?);
        if let Some(svg) = &a.svg {
            artifacts.push(write_text(svg, &render_cover(&artifact)?)?);
        }
        timer.lap("write");
    }
    if r.holds() {
        return Ok(Body::pass(metrics).with_artifacts(artifacts));
    }
    let witness = json!({
        "a_witness": r.a_witness,
        "a_multiplicity": r.a_multiplicity,
        "core_multiplicity": r.core_multiplicity,
        "mesh": r.mesh,
        "stars_contained": r.stars_contained,
    });
    Ok(Body::fail(metrics, witness, "the cover misses one of its bounds").with_artifacts(artifacts))
}

fn small_inputs(a: &SmallArgs) -> Result<Value> {
    Ok(json!({
        "window": window_spec(&a.window)?,
        "set": load_json(&a.set)?,
        "delta": a.delta,
        "phi_max": a.phi_max,
        "expect": a.expect.map(Expectation::label),
    }))
}

fn default_phi_max(space: &dyn Space, deltas: &[Scale]) -> Result<Scale> {
    let top = deltas.iter().copied().max().unwrap_or(Scale::ZERO);
    space
        .margin()
        .checked_sub(top)
        .ok_or_else(|| Error::Input(format!("δ = {top} exceeds the margin {}", space.margin())))
}

/// Pass when the verdict matches the expectation, or is decisive if none is given.
fn verdict_body(verdict: &Verdict, expect: Option<Expectation>, metrics: Value, detail: Value) -> Body {
    let label = verdict.label();
    let ok = match expect {
        Some(e) => e.label() == label,
        None => !matches!(verdict, Verdict::Inconclusive(_)),
    };
    if ok {
        Body::pass(metrics)
    } else {
        let msg = match expect {
            Some(e) => format!("expected {}, got {label}", e.label()),
            None => "neither a φ-witness nor a certificate was found".to_string(),
        };
        Body::fail(metrics, detail, msg)
    }
}

fn small_check(a: &SmallArgs, timer: &mut Timer) -> Result<Body> {
    let w = Window::from_spec(&window_spec(&a.window)?)?;
    let set = PointSet::decode(&w, &load_json(&a.set)?)?;
    let phi_max = match a.phi_max {
        Some(p) => p,
        None => default_phi_max(&w, &a.delta)?,
    };
    let verdict = small_verdict(&w, &set, &a.delta, phi_max)?;
    timer.lap("verdict");
    let detail = verdict.to_json(&w);
    let metrics = json!({
        "verdict": verdict.label(),
        "deltas": a.delta,
        "phi_max": phi_max,
        "set_points": set.len(),
        "window_points": w.len(),
        "detail": detail,
    });
    let arts = a.out.as_deref().map(|p| write_json(p, &detail)).transpose()?;
    Ok(verdict_body(&verdict, a.expect, metrics, detail).with_artifacts(arts.into_iter().collect()))
}

/// Largest simplex dimension checked on dense grids.
const MAX_CLAIMS_DIM: usize = 3;

fn claims_inputs(a: &ClaimsArgs, s: &Settings) -> Value {
    json!({
        "n": a.n, "eps": a.eps, "density": a.density,
        "sweep_density": a.sweep_density.unwrap_or(s.sweep_density),
    })
}

fn claims_verify(a: &ClaimsArgs, s: &Settings, timer: &mut Timer) -> Result<Body> {
    if a.n == 0 {
        return input("n must be positive");
    }
    if a.eps.is_empty() || a.eps.iter().any(|e| e.value() <= 0.into()) {
        return input("every ε must be positive");
    }
    if a.n > MAX_CLAIMS_DIM {
        return refused(format!("dense claim grids are limited to n ≤ {MAX_CLAIMS_DIM}"));
    }
    let probe = Probe::Grid { denominator: a.density };
    let mut violators = Vec::new();
    let mut claim4 = Vec::new();
    for &eps in &a.eps {
        let r = claim4_check(a.n, eps, &probe)?;
        claim4.push(json!({
            "eps": eps, "probes": r.probes, "near_all": r.near_all,
            "worst_ratio": crate::scale::QJson(r.worst_ratio), "violators": r.violators.len(),
        }));
        if !r.holds() {
            violators.push(
                json!({ "claim": 4, "eps": eps, "points": serde_json::to_value(&r).expect("serializes")["violators"] }),
            );
        }
    }
    timer.lap("claim4");
    let sweep = lip_sweep(a.n, a.sweep_density.unwrap_or(s.sweep_density))?;
    let l = sweep.l();
    timer.lap("sweep");
    let mut claim6 = Vec::new();
    for (si, sigma) in kuhn_simplices(a.n)?.iter().enumerate() {
        for (bi, bp) in sample_b_primes(sigma, &sweep).iter().enumerate() {
            for &eps in &a.eps {
                let r = claim6_check(sigma, bp, eps, l, &probe)?;
                claim6.push(json!({
                    "simplex": si, "b_prime": bi, "eps": eps, "probes": r.probes,
                    "outside_ball": r.outside_ball, "exact_checks": r.exact_checks,
                    "violators": r.violators.len(),
                }));
                if !r.holds() {
                    let pts = serde_json::to_value(&r).expect("serializes")["violators"].clone();
                    violators.push(json!({ "claim": 6, "simplex": si, "b_prime": bi, "eps": eps, "points": pts }));
                }
            }
        }
    }
    timer.lap("claim6");
    let metrics = json!({
        "n": a.n, "density": a.density,
        "sweep": serde_json::to_value(&sweep).expect("serializes"),
        "L": crate::scale::QJson(l.value()),
        "claim4": claim4, "claim6": claim6,
    });
    if violators.is_empty() {
        Ok(Body::pass(metrics))
    } else {
        Ok(Body::fail(metrics, truncated(violators), "a claim has violators"))
    }
}

fn cayley_ball_cmd(group: &str, radius: u64, out: Option<&Path>) -> Result<Body> {
    let g: GroupSpec = group.parse()?;
    let w = cayley_ball(g, radius, 0, MAX_GROUP_WINDOW)?;
    let mut sizes = Vec::new();
    let mut mismatch = None;
    for r in 0..=radius {
        let count = (0..w.len()).filter(|&p| w.word_length_of(p) <= r).count();
        let expected = g.ball_size(r);
        if mismatch.is_none() && expected.is_some_and(|e| e != count as u128) {
            mismatch = Some(json!({ "r": r, "count": count, "expected": expected.map(|e| e.to_string()) }));
        }
        sizes.push(json!({ "r": r, "count": count, "expected": expected.map(|e| e.to_string()) }));
    }
    let metrics = json!({ "group": g.to_string(), "radius": radius, "elements": w.len(), "sizes": sizes });
    let arts = match out {
        Some(p) => vec![write_json(p, &Value::Array((0..w.len()).map(|i| w.encode(i)).collect()))?],
        None => Vec::new(),
    };
    Ok(match mismatch {
        None => Body::pass(metrics),
        Some(m) => Body::fail(metrics, m, "ball size differs from the closed form"),
    }
    .with_artifacts(arts))
}

fn cayley_small_inputs(a: &CayleySmallArgs, s: &Settings) -> Result<Value> {
    Ok(json!({
        "group": a.group, "sub": load_json(&a.sub)?, "radius": a.radius, "margin": a.margin,
        "delta": a.delta, "phi_max": a.phi_max, "r": a.r, "n": a.n, "d": a.d,
        "expect": a.expect.map(Expectation::label), "max_search": s.max_search,
    }))
}

fn cayley_small(a: &CayleySmallArgs, s: &Settings, timer: &mut Timer) -> Result<Body> {
    let g: GroupSpec = a.group.parse()?;
    let sub_v = load_json(&a.sub)?;
    let Some(items) = sub_v.as_array() else {
        return input("--sub must be a JSON list of elements");
    };
    let sub = items.iter().map(|v| g.decode(v)).collect::<Result<Vec<_>>>()?;
    let phi_max = match a.phi_max {
        Some(p) => p,
        None => {
            let top = a.delta.iter().copied().max().unwrap_or(Scale::ZERO);
            Scale::int(a.margin as u32)
                .checked_sub(top)
                .ok_or_else(|| Error::Input(format!("δ = {top} exceeds the margin {}", a.margin)))?
        }
    };
    let triples = match (a.r, a.n, a.d) {
        (Some(r), Some(n), Some(d)) => vec![(r, n, d)],
        _ => Vec::new(),
    };
    let cfg = OracleConfig { max_search: s.max_search };
    let demo = group_smallness_demo(g, &sub, a.radius, a.margin, &a.delta, phi_max, &triples, &cfg)?;
    timer.lap("demo");
    let detail = demo.to_json();
    let mut metrics = detail.clone();
    metrics["phi_max"] = json!(phi_max);
    let arts = a.out.as_deref().map(|p| write_json(p, &detail)).transpose()?;
    Ok(verdict_body(&demo.verdict, a.expect, metrics, detail["verdict"].clone())
        .with_artifacts(arts.into_iter().collect()))
}

fn element_arg(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn transfer_inputs(a: &CayleyTransferArgs) -> Result<Value> {
    Ok(json!({
        "group": a.group, "radius": a.radius, "source_radius": a.source_radius.unwrap_or(a.radius),
        "coloring": load_json(&a.coloring)?, "set": load_json(&a.set)?, "x0": element_arg(&a.x0), "r": a.r,
    }))
}

fn cayley_transfer(a: &CayleyTransferArgs) -> Result<Body> {
    let g: GroupSpec = a.group.parse()?;
    let h = cayley_ball(g, a.source_radius.unwrap_or(a.radius), 0, MAX_GROUP_WINDOW)?;
    let w = cayley_ball(g, a.radius, 0, MAX_GROUP_WINDOW)?;
    let chi_h = Coloring::from_json(&h, &load_json(&a.coloring)?)?;
    let f = PointSet::decode(&w, &load_json(&a.set)?)?;
    let x0 = w.decode(&element_arg(&a.x0))?;
    let chi = transfer_coloring(&h, &chi_h, &w, &f, x0, a.r)?;
    let measured = widest_mono_component(&w, &chi, a.r).map_or(Scale::ZERO, |b| b.0);
    let metrics = json!({
        "group": g.to_string(),
        "set_points": f.len(),
        "certified": chi.certified().map(|c| json!({ "r": c.r, "d": c.d })),
        "measured_d": measured,
    });
    let arts = a.out.as_deref().map(|p| write_json(p, &chi.to_json(&w))).transpose()?;
    Ok(Body::pass(metrics).with_artifacts(arts.into_iter().collect()))
}

fn render_svg(a: &RenderArgs) -> Result<Body> {
    let artifact = load_json(&a.input)?;
    let svg = render_cover(&artifact)?;
    let simplices = artifact["simplices"].as_array().map_or(0, Vec::len);
    let path = write_text(&a.svg, &svg)?;
    Ok(Body::pass(json!({ "simplices": simplices, "bytes": svg.len() })).with_artifacts(vec![path]))
}
