use std::time::Instant;

use tdspec::analysis::{model_check, run_trace, SystemModel, VerdictKind};
use tdspec::compile::{compile_spec, CompileOptions};
use tdspec::automata::Dfa;
use tdspec::syntax::{parse_spec_file, SpecFile};
use tdspec::synth::{synthesize_spec, Controller, Convention};

#[path = "stack.rs"]
mod stack;
pub use stack::stacks;

const MINEPUMP: &str = include_str!("../../fixtures/minepump.spec");
const ARBITER: &str = include_str!("../../fixtures/arbiter.spec");
const ARBITER_SYNTH: &str = include_str!("../../fixtures/arbiter_synth.spec");
const ARBITER_MODEL: &str = include_str!("../../fixtures/arbiter.model.json");

fn spec(text: &str) -> Result<SpecFile, String> {
    parse_spec_file(text).map_err(|e| e.to_string())
}

fn requirement(s: &SpecFile) -> Result<Dfa, String> {
    compile_spec(s, CompileOptions::default()).map(|r| r.0).map_err(|e| e.to_string())
}

fn closed_loop(c: &Controller, req: &Dfa) -> Result<(), String> {
    let v = model_check(&c.to_model(), req).map_err(|e| e.to_string())?;
    match v.kind {
        VerdictKind::Holds => Ok(()),
        k => Err(format!("closed loop {k}: {}", v.witness.map(|w| w.to_trace()).unwrap_or_default())),
    }
}

fn synthesize(s: &SpecFile) -> Result<(Controller, f64), String> {
    let t = Instant::now();
    let (c, _) = synthesize_spec(s, &[], Convention::Mealy, CompileOptions::default()).map_err(|e| e.to_string())?;
    Ok((c, t.elapsed().as_secs_f64()))
}

pub fn minepump_synthesis() -> Result<String, String> {
    let s = spec(MINEPUMP)?;
    let (c, secs) = synthesize(&s)?;
    let req = requirement(&s)?;
    closed_loop(&c, &req)?;
    Ok(format!(
        "realizable, closed loop holds against the {}-state monitor; {} controller states in {secs:.2} s",
        req.num_states, c.num_states
    ))
}

pub fn arbiter_synthesis() -> Result<String, String> {
    let s = spec(ARBITER_SYNTH)?;
    let (c, secs) = synthesize(&s)?;
    let req = requirement(&s)?;
    closed_loop(&c, &req)?;
    let bit = |names: &[String], v: &str| 1u64 << names.iter().position(|n| n == v).expect("declared");
    let mut arms = 0;
    for st in 0..c.num_states {
        for x in 0..1u64 << c.inputs.len() {
            let (y, _) = c.step(st, x);
            arms += 1;
            if y.count_ones() > 1 {
                return Err(format!("state {st}, input {x}: two acknowledgements"));
            }
            for k in 1..=3 {
                let (req, ack) = (bit(&c.inputs, &format!("req{k}")), bit(&c.outputs, &format!("ack{k}")));
                if y & ack != 0 && x & req == 0 {
                    return Err(format!("state {st}, input {x}: spurious ack{k}"));
                }
            }
        }
    }
    Ok(format!(
        "realizable, closed loop holds; exclusion and no spurious ack on all {arms} arms; {} controller states in {secs:.2} s",
        c.num_states
    ))
}

/// Verdict of the model against the fixture with the given bounds, and
/// whether a counterexample replays through both model and monitor.
fn arbiter(model: &SystemModel, dead: u64, r: [u64; 3]) -> Result<(bool, bool), String> {
    let line = "constant dead = 3, r1 = 3, r2 = 6, r3 = 6;";
    assert!(ARBITER.contains(line));
    let text = ARBITER.replace(line, &format!("constant dead = {dead}, r1 = {}, r2 = {}, r3 = {};", r[0], r[1], r[2]));
    let req = requirement(&spec(&text)?)?;
    let v = model_check(model, &req).map_err(|e| e.to_string())?;
    let Some(w) = v.witness else { return Ok((v.kind == VerdictKind::Holds, false)) };
    let inputs = w.project(&model.inputs).letters;
    let replays = model.simulate(&inputs) == w
        && run_trace(&req, &w).map_err(|e| e.to_string())?.kind == VerdictKind::Fails;
    Ok((false, replays))
}

pub fn arbiter_model_checking() -> Result<String, String> {
    let model = SystemModel::from_json_str(ARBITER_MODEL).map_err(|e| e.to_string())?;
    let (dead, r) = (3, [3, 6, 6]);
    if !arbiter(&model, dead, r)?.0 {
        return Err("deadtime 3 with response 3/6/6 fails".into());
    }
    let mut tighter = vec![("deadtime".to_string(), dead - 1, r)];
    for k in 0..3 {
        let mut rk = r;
        rk[k] -= 1;
        tighter.push((format!("response{}", k + 1), dead, rk));
    }
    for (what, d, rk) in tighter {
        match arbiter(&model, d, rk)? {
            (true, _) => return Err(format!("{what} one below the bound still holds")),
            (false, false) => return Err(format!("{what} counterexample does not replay")),
            (false, true) => {}
        }
    }
    Ok("deadtime 3 and response 3/6/6 hold; deadtime 2 and response 2/6/6, 3/5/6, 3/6/5 fail with replayed counterexamples".into())
}
