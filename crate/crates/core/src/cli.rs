//! Command-line front end. Every report is JSON on standard output.
//!
//! Exit codes: 0 success or the property holds, 1 the property fails or the
//! diagram does not extend, 2 input error.

use std::io::Read;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::diagram::{
    compatible_isomorphism, validate_diagram1, validate_extension, DiagramContext, DiagramError,
    ObstructionReport, Violation,
};
use crate::document::{self, DocumentModel};
use crate::ext::{ext_module, ExtClass};
use crate::fgmod::{ModuleMorphism, PresentedModule};
use crate::fuzz::{run_fuzz, FuzzConfig};
use crate::hexagon::{solve_hexagon, validate_frame, HexagonError};
use crate::linalg::{ExactMatrix, Int, RingSpec};
use crate::oracle::{brute_ext1, brute_ext1_by_middles, EnumerationBudget, OracleError};

#[derive(Parser, Debug)]
#[command(name = "hexext", version, about = "Ext groups and 3x3 diagram extensions over Z and Z/m")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ext^i(Q, P) with its invariant factors.
    Ext {
        doc: String,
        #[arg(short = 'i', value_parser = clap::value_parser!(u8).range(0..=2))]
        degree: u8,
        q: String,
        p: String,
    },
    /// The obstruction class of a diagram in Ext²(Q, P).
    Obstruction { doc: String, diagram: String },
    /// Extend a diagram to a full 3x3 grid.
    Extend { doc: String, diagram: String },
    /// Whether the extension is unique up to compatible isomorphism.
    Unique { doc: String, diagram: String },
    /// A compatible isomorphism between two extensions of a diagram.
    Iso {
        doc: String,
        diagram: String,
        ext1: String,
        ext2: String,
    },
    /// Hexagon frames.
    Hexagon {
        #[command(subcommand)]
        command: HexagonCommand,
    },
    /// Check a named module, morphism, diagram, frame or extension.
    Validate { doc: String, name: String },
    /// Compare |Ext¹(Q, P)| with brute-force enumeration.
    OracleCompare { doc: String, q: String, p: String },
    /// Seeded property run over random diagrams.
    Fuzz {
        #[arg(long, value_parser = parse_ring)]
        ring: RingSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 16)]
        max_order: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum HexagonCommand {
    /// Find the center and diagonals of a frame.
    Solve { doc: String, frame: String },
}

fn parse_ring(s: &str) -> Result<RingSpec, String> {
    if s == "Z" {
        return Ok(RingSpec::Integers);
    }
    let m = s
        .strip_prefix("Zmod")
        .and_then(|m| m.parse::<u64>().ok())
        .ok_or_else(|| format!("expected Z or ZmodN, got '{s}'"))?;
    RingSpec::zmod(m).map_err(|e| e.to_string())
}

/// Standard output and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn report(v: Value, code: i32) -> Outcome {
    Outcome {
        stdout: document::to_json_text(&v),
        code,
    }
}

fn input_error(msg: impl ToString) -> Outcome {
    report(json!({ "error": msg.to_string() }), 2)
}

pub fn int_json(v: &Int) -> Value {
    let d: document::JsonInt = document::JsonInt(v.clone());
    serde_json::to_value(d).expect("integers serialize")
}

fn ints_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn matrix_json(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| ints_json(&m.row(r))).collect())
}

pub fn class_json(c: &ExtClass) -> Value {
    json!({
        "coords": ints_json(c.coords()),
        "invariants": ints_json(c.parent().orders()),
    })
}

fn module_json(m: &PresentedModule) -> Value {
    json!({
        "generators": m.generators(),
        "relations": Value::Array(m.relations().columns().iter().map(|c| ints_json(c)).collect()),
        "invariants": ints_json(&m.invariant_factors()),
    })
}

fn morphism_json(f: &ModuleMorphism) -> Value {
    matrix_json(f.matrix())
}

fn violations_json(v: &[Violation]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| json!({ "location": x.location, "detail": x.detail }))
            .collect(),
    )
}

fn obstruction_json(r: &ObstructionReport) -> Value {
    json!({
        "yonedaEF": class_json(&r.yoneda_ef),
        "yonedaHG": class_json(&r.yoneda_hg),
        "baerSum": class_json(&r.baer_sum),
        "isZero": r.is_zero,
    })
}

fn load(path: &str, stdin: &mut dyn Read) -> Result<DocumentModel, Outcome> {
    let text = if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(input_error)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| input_error(format!("{path}: {e}")))?
    };
    document::parse(&text).map_err(input_error)
}

fn context(model: &DocumentModel, name: &str) -> Result<DiagramContext, Outcome> {
    let d = model
        .diagrams
        .get(name)
        .ok_or_else(|| input_error(format!("unknown diagram '{name}'")))?;
    DiagramContext::new(d).map_err(input_error)
}

fn module<'a>(model: &'a DocumentModel, name: &str) -> Result<&'a PresentedModule, Outcome> {
    model
        .modules
        .get(name)
        .ok_or_else(|| input_error(format!("unknown module '{name}'")))
}

/// Parse `args` (without the program name) and run.
pub fn run_args<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("hexext")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome {
                stdout: e.to_string(),
                code,
            }
        }
    }
}

pub fn run(cli: Cli, stdin: &mut dyn Read) -> Outcome {
    match execute(cli, stdin) {
        Ok(o) | Err(o) => o,
    }
}

fn execute(cli: Cli, stdin: &mut dyn Read) -> Result<Outcome, Outcome> {
    match cli.command {
        Command::Ext { doc, degree, q, p } => {
            let model = load(&doc, stdin)?;
            let e = ext_module(degree as usize, module(&model, &q)?, module(&model, &p)?).map_err(input_error)?;
            Ok(report(
                json!({
                    "degree": degree,
                    "Q": q,
                    "P": p,
                    "invariants": ints_json(e.orders()),
                    "order": e.order().map_or(Value::String("infinite".into()), |o| int_json(&o)),
                }),
                0,
            ))
        }
        Command::Obstruction { doc, diagram } => {
            let model = load(&doc, stdin)?;
            let ctx = context(&model, &diagram)?;
            let mut v = obstruction_json(&ctx.report);
            v["diagram"] = json!(diagram);
            Ok(report(v, if ctx.report.is_zero { 0 } else { 1 }))
        }
        Command::Extend { doc, diagram } => {
            let model = load(&doc, stdin)?;
            let ctx = context(&model, &diagram)?;
            match ctx.xi() {
                Ok(xi) => {
                    let ext = ctx.extension_from_class(&xi);
                    let v = validate_extension(&ctx.diagram, &ext);
                    Ok(report(
                        json!({
                            "diagram": diagram,
                            "extendable": true,
                            "class": class_json(&xi),
                            "X": module_json(&ext.x),
                            "i": morphism_json(&ext.i),
                            "j": morphism_json(&ext.j),
                            "m": morphism_json(&ext.m),
                            "n": morphism_json(&ext.n),
                            "violations": violations_json(&v),
                        }),
                        if v.is_empty() { 0 } else { 1 },
                    ))
                }
                Err(DiagramError::NotExtendable(r)) => Ok(report(
                    json!({
                        "diagram": diagram,
                        "extendable": false,
                        "obstruction": obstruction_json(&r),
                    }),
                    1,
                )),
                Err(e) => Err(input_error(e)),
            }
        }
        Command::Unique { doc, diagram } => {
            let model = load(&doc, stdin)?;
            let ctx = context(&model, &diagram)?;
            let u = crate::diagram::uniqueness_in(&ctx);
            Ok(report(
                json!({
                    "diagram": diagram,
                    "unique": u.unique,
                    "alpha": morphism_json(&u.alpha),
                    "cokernelInvariants": ints_json(&u.cokernel.invariant_factors()),
                }),
                if u.unique { 0 } else { 1 },
            ))
        }
        Command::Iso {
            doc,
            diagram,
            ext1,
            ext2,
        } => {
            let model = load(&doc, stdin)?;
            let ctx = context(&model, &diagram)?;
            let get = |name: &str| {
                match model.extensions.get(name) {
                    Some((d, e)) if *d == diagram => Ok(e.clone()),
                    Some(_) => Err(input_error(format!("extension '{name}' belongs to another diagram"))),
                    None => Err(input_error(format!("unknown extension '{name}'"))),
                }
            };
            let (e1, e2) = (get(&ext1)?, get(&ext2)?);
            for (name, e) in [(&ext1, &e1), (&ext2, &e2)] {
                let v = validate_extension(&ctx.diagram, e);
                if !v.is_empty() {
                    return Err(report(
                        json!({ "error": format!("extension '{name}' is invalid"), "violations": violations_json(&v) }),
                        2,
                    ));
                }
            }
            let base = json!({ "diagram": diagram, "ext1": ext1, "ext2": ext2 });
            let mut v = base;
            match catch_unwind(AssertUnwindSafe(|| compatible_isomorphism(&ctx, &e1, &e2))) {
                Ok(Ok(phi)) => {
                    v["isomorphism"] = morphism_json(&phi);
                    Ok(report(v, 0))
                }
                Ok(Err(e)) => {
                    v["failure"] = json!(e.to_string());
                    Ok(report(v, 1))
                }
                Err(_) => {
                    v["failure"] = json!("compatibility equations fail");
                    Ok(report(v, 1))
                }
            }
        }
        Command::Hexagon {
            command: HexagonCommand::Solve { doc, frame },
        } => {
            let model = load(&doc, stdin)?;
            let f = model
                .frames
                .get(&frame)
                .ok_or_else(|| input_error(format!("unknown frame '{frame}'")))?;
            match solve_hexagon(f) {
                Ok(h) => Ok(report(
                    json!({
                        "frame": frame,
                        "solved": true,
                        "center": module_json(&h.center),
                        "i": morphism_json(&h.i),
                        "j": morphism_json(&h.j),
                        "c": morphism_json(&h.c),
                        "curv": morphism_json(&h.curv),
                        "violations": violations_json(&crate::hexagon::verify_hexagon(&h)),
                    }),
                    0,
                )),
                Err(HexagonError::Diagram(DiagramError::NotExtendable(r))) => Ok(report(
                    json!({ "frame": frame, "solved": false, "obstruction": obstruction_json(&r) }),
                    1,
                )),
                Err(e) => Err(input_error(e)),
            }
        }
        Command::Validate { doc, name } => {
            let model = load(&doc, stdin)?;
            let (kind, v) = if let Some(d) = model.diagrams.get(&name) {
                ("diagram", validate_diagram1(d))
            } else if let Some(f) = model.frames.get(&name) {
                ("frame", validate_frame(f))
            } else if let Some((d, e)) = model.extensions.get(&name) {
                let diagram = &model.diagrams[d];
                let mut v = validate_diagram1(diagram);
                if v.is_empty() {
                    v = validate_extension(diagram, e);
                }
                ("extension", v)
            } else if model.morphisms.contains_key(&name) {
                ("morphism", vec![])
            } else if model.modules.contains_key(&name) {
                ("module", vec![])
            } else {
                return Err(input_error(format!("unknown name '{name}'")));
            };
            Ok(report(
                json!({
                    "name": name,
                    "kind": kind,
                    "valid": v.is_empty(),
                    "violations": violations_json(&v),
                }),
                if v.is_empty() { 0 } else { 1 },
            ))
        }
        Command::OracleCompare { doc, q, p } => {
            let model = load(&doc, stdin)?;
            let (qm, pm) = (module(&model, &q)?, module(&model, &p)?);
            let e = ext_module(1, qm, pm).map_err(input_error)?;
            let budget = EnumerationBudget::from_env();
            let lifts = match brute_ext1(qm, pm, &budget) {
                Ok(n) => n,
                Err(e @ (OracleError::BudgetExceeded(_) | OracleError::Infinite | OracleError::Overflow)) => {
                    return Err(input_error(format!("oracle: {e}")))
                }
            };
            let middles = brute_ext1_by_middles(qm, pm, &budget).ok();
            let computed = e.order();
            let agree = computed.as_ref() == Some(&Int::from(lifts))
                && middles.is_none_or(|n| Int::from(n) == Int::from(lifts));
            Ok(report(
                json!({
                    "Q": q,
                    "P": p,
                    "invariants": ints_json(e.orders()),
                    "order": computed.map_or(Value::String("infinite".into()), |o| int_json(&o)),
                    "bruteByLifts": lifts,
                    "bruteByMiddles": middles,
                    "agree": agree,
                }),
                if agree { 0 } else { 1 },
            ))
        }
        Command::Fuzz {
            ring,
            seed,
            count,
            max_order,
        } => {
            let r = run_fuzz(&FuzzConfig {
                ring,
                seed,
                count,
                max_order,
            });
            let code = if r.failures == 0 { 0 } else { 1 };
            Ok(report(serde_json::to_value(&r).expect("fuzz reports serialize"), code))
        }
    }
}
