use anyhow::{Context, Result};
use num_complex::Complex64 as C64;
use qteich::acceptance;
use qteich::intertwiners::{
    intertwining_residual, pa::torus_demo, pa_invariant, path_steps, solve_intertwiner_mats, verify_pentagon,
    IntertwinerSet, PaOptions, ProjectiveMap,
};
use qteich::quantum_algebra::phi_elementary;
use qteich::representations::{invariants, invariants_from_roots, local_rep_matrices, LocalRepResolved};
use qteich::surface_topology::{
    dual_graph, flip_path, sigma_form, IdealTriangulation, MappingClass, Move, TriangulationSpec, DEFAULT_SEARCH_BUDGET,
};
use serde_json::{json, Value};

use crate::input::{self, Input};
use crate::{usage, Command, Opts};

pub struct Outcome {
    pub value: Value,
    /// False when the command ran but its check failed (exit code 1).
    pub ok: bool,
}

fn done(value: Value) -> Result<Outcome> {
    Ok(Outcome { value, ok: true })
}

fn cjson(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn tri_json(l: &IdealTriangulation) -> Value {
    serde_json::to_value(TriangulationSpec::from(l.clone())).expect("serializable")
}

fn parse_move(s: &str) -> Result<Move> {
    s.parse::<Move>().map_err(|e| usage(e.to_string()))
}

pub fn run(cmd: Command, opts: &Opts) -> Result<Outcome> {
    if !(opts.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let inp = input::read(opts)?;
    match cmd {
        Command::Triangulate => triangulate(&inp),
        Command::Sigma => sigma(&inp),
        Command::DualGraph => dual(&inp),
        Command::FlipPath => path(&inp),
        Command::RepBuild => rep_build(&inp, opts),
        Command::RepInvariants => rep_invariants(&inp, opts),
        Command::Intertwine => intertwine(&inp, opts),
        Command::PentagonCheck => pentagon(&inp, opts),
        Command::Orbit => orbit(&inp, opts),
        Command::PaInvariant => pa(&inp, opts),
        Command::Selftest => selftest(),
    }
}

fn triangulate(inp: &Input) -> Result<Outcome> {
    let l = inp.require_triangulation()?;
    let kinds: Vec<Value> = l.edge_kinds().iter().map(|k| serde_json::to_value(k).expect("serializable")).collect();
    done(json!({
        "triangulation": tri_json(&l),
        "surface": l.surface(),
        "n": l.n(),
        "m": l.m(),
        "edge_kinds": kinds,
        "internal_edges": l.internal_edges(),
    }))
}

fn sigma(inp: &Input) -> Result<Outcome> {
    let l = inp.require_triangulation()?;
    let s = sigma_form(&l);
    done(json!({ "n": l.n(), "sigma": s.entries }))
}

fn dual(inp: &Input) -> Result<Outcome> {
    let l = inp.require_triangulation()?;
    let g = dual_graph(&l);
    done(json!({
        "vertices": g.vertices,
        "edges": g.edges,
        "epsilon": g.epsilon,
        "components": g.components(),
        "betti1": g.betti1(),
    }))
}

fn path(inp: &Input) -> Result<Outcome> {
    let (from, to) = match (&inp.from, &inp.to) {
        (Some(a), Some(b)) => (a.build()?, b.build()?),
        _ => return Err(usage("flip-path needs \"from\" and \"to\"")),
    };
    let budget = inp.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let moves = flip_path(&from, &to, budget)?;
    let names: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
    done(json!({ "moves": names, "length": moves.len() }))
}

fn rep_build(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let l = inp.triangulation_or("square")?;
    let r = inp.rep(&l, opts)?;
    let m = local_rep_matrices(&r);
    done(json!({
        "triangulation": tri_json(&l),
        "rep": r.to_json(),
        "dim": r.dim(),
        "relation_error": m.relation_error(),
        "images": m.to_json()["images"],
    }))
}

fn rep_invariants(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let l = inp.triangulation_or("square")?;
    let r = inp.rep(&l, opts)?;
    let inv = invariants(&local_rep_matrices(&r), opts.tol)?;
    let agree = inv.approx_eq(&invariants_from_roots(&r), opts.tol);
    done(json!({
        "N": r.order,
        "x": inv.x.iter().map(|z| cjson(*z)).collect::<Vec<_>>(),
        "h": cjson(inv.h),
        "matches_roots": agree,
    }))
}

/// The elementary move requested, defaulting to the flip of the first
/// internal edge.
fn requested_move(inp: &Input, l: &IdealTriangulation) -> Result<Move> {
    match &inp.mv {
        Some(s) => parse_move(s),
        None => l.internal_edges().first().map(|&e| Move::Flip(e)).ok_or_else(|| usage("no internal edge to flip")),
    }
}

fn one_step(inp: &Input, opts: &Opts) -> Result<(LocalRepResolved, Move, LocalRepResolved, ProjectiveMap, f64)> {
    let l = inp.triangulation_or("torus")?;
    let r = inp.rep(&l, opts)?;
    let mv = requested_move(inp, &l)?;
    let steps = path_steps(&r, std::slice::from_ref(&mv), None, None)?;
    let step = steps.into_iter().next().context("empty path")?;
    let src = phi_elementary(&l, &mv, r.order)?.evaluate_all(&local_rep_matrices(&r))?;
    let tgt = local_rep_matrices(&step.target);
    let map = match inp.method.as_deref().unwrap_or("elementary") {
        "elementary" => ProjectiveMap::new(step.map),
        "solver" => solve_intertwiner_mats(&src, tgt.images())?,
        other => return Err(usage(format!("unknown method '{other}' (elementary or solver)"))),
    };
    let residual = intertwining_residual(map.matrix(), &src, tgt.images());
    Ok((r, mv, step.target, map, residual))
}

fn intertwine(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let (r, mv, target, map, residual) = one_step(inp, opts)?;
    Ok(Outcome {
        ok: residual <= opts.tol,
        value: json!({
            "move": mv.to_string(),
            "source_rep": r.to_json(),
            "target_triangulation": tri_json(&target.lambda),
            "target_rep": target.to_json(),
            "intertwiner": map.to_json(),
            "residual": residual,
        }),
    })
}

fn orbit(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let (r, mv, target, map, residual) = one_step(inp, opts)?;
    let set = IntertwinerSet { source: r, target, base: map };
    let els = set.elements();
    let mut gap = f64::INFINITY;
    for a in 0..els.len() {
        for b in 0..a {
            gap = gap.min(els[a].1.distance(&els[b].1));
        }
    }
    let elements: Vec<Value> =
        els.iter().map(|(c, l)| json!({ "class": c.coeffs, "intertwiner": l.to_json() })).collect();
    Ok(Outcome {
        ok: residual <= opts.tol && (els.len() < 2 || gap > opts.tol),
        value: json!({
            "move": mv.to_string(),
            "size": els.len(),
            "min_pairwise_distance": if gap.is_finite() { json!(gap) } else { Value::Null },
            "base_residual": residual,
            "elements": elements,
        }),
    })
}

fn pentagon(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let l = inp.triangulation_or("pentagon")?;
    let r = inp.rep(&l, opts)?;
    let rep = verify_pentagon(&r, inp.i.unwrap_or(0), inp.j.unwrap_or(1))?;
    let pass = rep.deviation <= opts.tol && rep.action_deviation <= opts.tol;
    Ok(Outcome {
        ok: pass,
        value: json!({
            "N": r.order,
            "moves": rep.moves.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "deviation": rep.deviation,
            "action_deviation": rep.action_deviation,
            "orbit_size": rep.orbit_size,
            "shift": rep.shift.coeffs,
            "pass": pass,
        }),
    })
}

fn pa(inp: &Input, opts: &Opts) -> Result<Outcome> {
    let (l, mc) = match (&inp.triangulation, &inp.moves) {
        (None, None) => torus_demo(),
        (_, Some(ms)) => {
            let l = inp.triangulation_or("torus")?;
            let moves = ms.iter().map(|s| parse_move(s)).collect::<Result<Vec<_>>>()?;
            let mc = match &inp.edge_map {
                Some(e) => MappingClass::from_moves_with_edges(&l, moves, e)?,
                None => MappingClass::from_moves(&l, moves)?,
            };
            (l, mc)
        }
        (Some(_), None) => return Err(usage("pa-invariant needs \"moves\" with a custom triangulation")),
    };
    let shadow: Option<Vec<C64>> = inp.shadow.as_ref().map(|v| v.iter().map(|p| C64::new(p[0], p[1])).collect());
    let popts = PaOptions { tol: opts.tol.min(1e-9), seed: opts.seed, ..PaOptions::default() };
    let inv = pa_invariant(&l, &mc, input::order(opts)?, shadow.as_deref(), inp.k.unwrap_or(0), &popts)?;
    done(json!({
        "triangulation": tri_json(&l),
        "moves": mc.moves.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "edge_map": mc.edge_map(),
        "invariant": inv.summary(),
    }))
}

fn selftest() -> Result<Outcome> {
    let results = acceptance::run_all();
    for r in &results {
        eprintln!("{}", acceptance::format_line(r));
    }
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(Outcome {
        ok: passed == results.len(),
        value: json!({ "criteria": results, "passed": passed, "total": results.len() }),
    })
}
