use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tdspec::analysis::{equiv_dfa, model_check, run_trace, sat_dfa, valid_dfa, AnalysisError, Verdict};
use tdspec::codegen::{emit_controller, emit_monitor, CodegenError, Format};
use tdspec::compile::{CompilationReport, CompileError, CompileOptions};
use tdspec::gen::Gen;
use tdspec::semantics::Word;
use tdspec::syntax::{classify_fragment, parse_prop};
use tdspec::synth::{synthesize_spec, Convention, SynthError};
use tdspec::timing_diagram::{export_wavedrom, xi};
use tdspec::translate::aleph;

mod input;

use input::{load, Input};

#[derive(Parser)]
#[command(name = "tdspec", version, about = "Timing diagrams and QDDC requirements: compile, check, monitor, synthesize")]
struct Cli {
    /// Report errors on stderr as JSON objects.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Seed for randomized trace generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// State cap for automaton construction (overrides TDSPEC_STATE_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Alphabet of a formula file, comma separated; inferred when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    sigma: Option<Vec<String>>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an input and print a JSON summary.
    Parse { file: PathBuf },
    /// Print the timing-diagram, SeCeNL and QDDC stages of a translation.
    Translate { file: PathBuf },
    /// Compile to a minimal DFA (JSON); the report goes to stderr or `--report`.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    CheckSat { file: PathBuf },
    CheckValid { file: PathBuf },
    CheckEquiv { left: PathBuf, right: PathBuf },
    /// Check a trace file, or `--random N` seeded traces, against a requirement.
    CheckTrace {
        file: PathBuf,
        trace: Option<PathBuf>,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 20)]
        length: usize,
    },
    /// Check a synchronous model (JSON) against a requirement.
    ModelCheck { model: PathBuf, file: PathBuf },
    /// Synthesize a controller for a spec file.
    Synth {
        file: PathBuf,
        /// Soft requirement, highest priority first; repeatable.
        #[arg(long)]
        soft: Vec<String>,
        #[arg(long)]
        moore: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a monitor or controller as json, smv-observer or dot.
    Emit {
        file: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    RenderWavedrom { file: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Resource(_) => "resource",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Resource(m) => m,
        }
    }

    pub fn from_compile(e: CompileError) -> CliError {
        if e.is_resource() {
            CliError::Resource(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }

    fn from_analysis(e: AnalysisError) -> CliError {
        if e.is_resource() {
            CliError::Resource(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }

    fn from_codegen(e: CodegenError) -> CliError {
        match e {
            CodegenError::Unsupported(..) => CliError::Usage(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Input(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn report_json(r: &CompilationReport) -> Value {
    let nodes: Vec<Value> =
        r.nodes.iter().map(|n| json!({"path": n.path, "kind": n.kind, "states": n.states})).collect();
    json!({
        "final_states": r.final_states,
        "peak_states": r.peak_states,
        "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
        "nodes": nodes,
    })
}

/// Print a verdict; exit 0 on a positive one.
fn verdict(v: &Verdict) -> Result<u8, CliError> {
    write_out(None, &pretty(&v.to_json()))?;
    Ok(if v.is_positive() { 0 } else { 1 })
}

struct Ctx {
    opts: CompileOptions,
    sigma: Option<Vec<String>>,
    seed: u64,
}

impl Ctx {
    fn load(&self, p: &Path) -> Result<Input, CliError> {
        load(p, self.sigma.as_deref())
    }

    fn monitor(&self, p: &Path) -> Result<tdspec::automata::Dfa, CliError> {
        self.load(p)?.monitor(self.opts).map(|r| r.0)
    }
}

fn parse_summary(inp: &Input) -> Value {
    match inp {
        Input::Spec(s) => json!({
            "kind": "spec",
            "name": s.name,
            "inputs": s.inputs,
            "outputs": s.outputs,
            "auxvars": s.auxvars,
            "constants": s.constants,
            "assumptions": s.assumes.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "requirements": s.reqs.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "soft": s.softreqs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }),
        Input::Qddc { formula, sigma } => json!({
            "kind": "qddc",
            "sigma": sigma,
            "formula": formula.to_string(),
            "fragment": classify_fragment(formula).fragment.to_string(),
            "size": formula.size(),
        }),
        Input::Secenl { formula, sigma } => json!({
            "kind": "secenl", "sigma": sigma, "formula": formula.to_string(), "size": formula.size(),
        }),
        Input::Diagram { diagram, sigma } => json!({
            "kind": "timing-diagram",
            "sigma": sigma,
            "diagram": diagram.to_string(),
            "nominals": diagram.nominals(),
            "size": diagram.size(),
        }),
        Input::Dfa(d) => json!({"kind": "dfa", "alphabet": d.vars, "states": d.num_states}),
        Input::Controller(c) => json!({
            "kind": "controller", "inputs": c.inputs, "outputs": c.outputs, "states": c.num_states,
        }),
        Input::Model(m) => json!({
            "kind": "model",
            "inputs": m.inputs,
            "latches": m.latches.iter().map(|l| &l.name).collect::<Vec<_>>(),
            "outputs": m.outputs.iter().map(|o| &o.name).collect::<Vec<_>>(),
        }),
    }
}

fn translate(inp: &Input) -> Result<Value, CliError> {
    let mut out = serde_json::Map::new();
    if let Input::Diagram { diagram, .. } = inp {
        out.insert("timing_diagram".into(), json!(diagram.to_string()));
        out.insert("xi".into(), json!(xi(diagram).to_string()));
    }
    match inp {
        Input::Qddc { formula, .. } => {
            out.insert("qddc".into(), json!(formula.to_string()));
        }
        _ => {
            let z = inp.secenl().ok_or_else(|| CliError::Usage(format!("cannot translate a {}", inp.kind())))?;
            out.insert("secenl".into(), json!(z.to_string()));
            out.insert("qddc".into(), json!(aleph(&z).to_string()));
        }
    }
    Ok(Value::Object(out))
}

fn check_trace(ctx: &Ctx, file: &Path, trace: Option<&Path>, random: Option<usize>, length: usize) -> Result<u8, CliError> {
    let d = ctx.monitor(file)?;
    match (trace, random) {
        (Some(t), None) => {
            let w = Word::parse_trace(&input::read(t)?).map_err(|e| CliError::Input(format!("{}: {e}", t.display())))?;
            verdict(&run_trace(&d, &w).map_err(CliError::from_analysis)?)
        }
        (None, Some(n)) => {
            let mut g = Gen::new(ctx.seed);
            let mut all = vec![];
            let mut failed = false;
            for _ in 0..n {
                let w = g.word(&d.vars, length.max(1));
                let v = run_trace(&d, &w).map_err(CliError::from_analysis)?;
                failed |= !v.is_positive();
                let mut j = v.to_json();
                j["trace"] = json!(w.to_trace());
                all.push(j);
            }
            write_out(None, &pretty(&Value::Array(all)))?;
            Ok(failed as u8)
        }
        _ => Err(CliError::Usage("give either a trace file or --random N".into())),
    }
}

fn synth(ctx: &Ctx, file: &Path, soft: &[String], moore: bool, output: Option<&Path>) -> Result<u8, CliError> {
    let Input::Spec(spec) = ctx.load(file)? else {
        return Err(CliError::Usage("synth needs a spec file with an interface".into()));
    };
    let sigma = spec.sigma();
    let names: Vec<String> = sigma.iter().cloned().chain(sigma.iter().map(|v| format!("Y{v}"))).collect();
    let prefs = soft
        .iter()
        .map(|s| parse_prop(s, &names).map_err(|e| CliError::Usage(format!("--soft `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let conv = if moore { Convention::Moore } else { Convention::Mealy };
    match synthesize_spec(&spec, &prefs, conv, ctx.opts) {
        Ok((c, r)) => {
            eprintln!(
                "controller: {} states; monitor {} states, {} winning; compile {:.3} s, solve {:.3} s",
                c.num_states,
                r.monitor_states,
                r.winning_nodes,
                r.compile_time.as_secs_f64(),
                r.solve_time.as_secs_f64()
            );
            write_out(output, &c.to_json_string())?;
            Ok(0)
        }
        Err(SynthError::Unrealizable(ex)) => {
            let v = json!({
                "realizable": false,
                "explanation": ex.to_string(),
                "open_loop": ex.open_loop,
                "inputs": ex.inputs.to_trace(),
                "outputs": ex.outputs.as_ref().map(Word::to_trace),
            });
            write_out(None, &pretty(&v))?;
            Ok(1)
        }
        Err(e) if e.is_resource() => Err(CliError::Resource(e.to_string())),
        Err(SynthError::Preference(p)) => Err(CliError::Usage(format!("soft requirement `{p}` may only read outputs and Y values"))),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut opts = CompileOptions::default();
    if let Some(c) = cli.cap {
        opts.cap = c;
    }
    let ctx = Ctx { opts, sigma: cli.sigma, seed: cli.seed };
    match cli.cmd {
        Cmd::Parse { file } => {
            write_out(None, &pretty(&parse_summary(&ctx.load(&file)?)))?;
            Ok(0)
        }
        Cmd::Translate { file } => {
            write_out(None, &pretty(&translate(&ctx.load(&file)?)?))?;
            Ok(0)
        }
        Cmd::Compile { file, output, report } => {
            let (d, r) = ctx.load(&file)?.monitor(ctx.opts)?;
            write_out(output.as_deref(), &d.to_json_string())?;
            if let Some(r) = r {
                let j = report_json(&r);
                match report {
                    Some(p) => write_out(Some(&p), &pretty(&j))?,
                    None => eprintln!(
                        "{} states (peak {}) in {:.3} s",
                        r.final_states,
                        r.peak_states,
                        r.elapsed.as_secs_f64()
                    ),
                }
            }
            Ok(0)
        }
        Cmd::CheckSat { file } => {
            let d = ctx.monitor(&file)?;
            verdict(&sat_dfa(&d, &d.vars).map_err(CliError::from_analysis)?)
        }
        Cmd::CheckValid { file } => {
            let d = ctx.monitor(&file)?;
            verdict(&valid_dfa(&d, &d.vars).map_err(CliError::from_analysis)?)
        }
        Cmd::CheckEquiv { left, right } => {
            let (a, b) = (ctx.monitor(&left)?, ctx.monitor(&right)?);
            let mut order = a.vars.clone();
            order.extend(b.vars.iter().filter(|v| !a.vars.contains(v)).cloned());
            verdict(&equiv_dfa(&a, &b, &order).map_err(CliError::from_analysis)?)
        }
        Cmd::CheckTrace { file, trace, random, length } => check_trace(&ctx, &file, trace.as_deref(), random, length),
        Cmd::ModelCheck { model, file } => {
            let Input::Model(m) = ctx.load(&model)? else {
                return Err(CliError::Usage(format!("{} is not a model", model.display())));
            };
            let d = ctx.monitor(&file)?;
            verdict(&model_check(&m, &d).map_err(CliError::from_analysis)?)
        }
        Cmd::Synth { file, soft, moore, output } => synth(&ctx, &file, &soft, moore, output.as_deref()),
        Cmd::Emit { file, format, output } => {
            let f: Format = format.parse().map_err(CliError::Usage)?;
            let text = match ctx.load(&file)? {
                Input::Controller(c) => emit_controller(&c, f),
                other => emit_monitor(&other.monitor(ctx.opts)?.0, f),
            }
            .map_err(CliError::from_codegen)?;
            write_out(output.as_deref(), &text)?;
            Ok(0)
        }
        Cmd::RenderWavedrom { file } => match ctx.load(&file)? {
            Input::Diagram { diagram, .. } => {
                write_out(None, &(export_wavedrom(&diagram) + "\n"))?;
                Ok(0)
            }
            other => Err(CliError::Usage(format!("render-wavedrom needs a timing diagram, got a {}", other.kind()))),
        },
    }
}

fn fail(json_errors: bool, e: &CliError) -> ExitCode {
    if json_errors {
        eprintln!("{}", json!({"error": e.kind(), "message": e.message()}));
    } else {
        eprintln!("error: {}", e.message());
    }
    ExitCode::from(e.code())
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if json_errors => return fail(true, &CliError::Usage(e.to_string().trim().to_string())),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => fail(json_errors, &e),
    }
}
