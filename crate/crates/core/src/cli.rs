//! The `wcycles` command line. Exit codes: 0 pass, 1 theorem violation,
//! 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fold::fold;
use crate::graph::{Graph, GraphMorphism, VertexId};
use crate::harness::{run_harness, Bounds};
use crate::pullback::pullback_loop;
use crate::render::{graph_dot, morphism_dot, stacking_svg};
use crate::stacking::{construct_stacking, Side};
use crate::theorems::{
    npi_check, relator_lifts, replay_certificate, verify_main_theorem, wcycles_check, OneRelatorComplex, Verdict,
};
use crate::word::{Loop, Word};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wcycles", version, about = "Immersions, pullbacks and stackings of primitive loops in graphs")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Take words exactly as given: no cyclic reduction.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fold generators into an immersion over the base graph.
    Fold {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Keep hanging trees instead of trimming to the core.
        #[arg(long)]
        no_trim: bool,
    },
    /// Stack a primitive loop by cyclic tower lifting.
    Stack {
        word: String,
        #[command(flatten)]
        base: BaseArgs,
        /// Also write the stacking as an SVG picture.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Pull the relator back along the folded immersion.
    Pullback {
        #[command(flatten)]
        inst: InstanceArgs,
    },
    /// Degree bound and circle count on each instance.
    Verify {
        #[command(flatten)]
        inst: InstanceArgs,
    },
    /// Circle count only.
    Wcycles {
        #[command(flatten)]
        inst: InstanceArgs,
    },
    /// Nonpositivity certificate for the complex built from the instance.
    Npi {
        #[command(flatten)]
        inst: InstanceArgs,
    },
    /// Random instances through every check.
    Harness {
        /// Master seed; each instance gets its own seed derived from it.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Longest relator before reduction.
        #[arg(long, default_value_t = 20)]
        max_word_len: usize,
        #[arg(long, default_value_t = 12)]
        max_gen_len: usize,
        /// Most subgroup generators per instance.
        #[arg(long, default_value_t = 4)]
        max_gens: usize,
        /// Only plain roses as base graphs.
        #[arg(long)]
        no_subdivide: bool,
    },
    /// Graphviz DOT for the folded immersion (or the base graph alone).
    ExportDot {
        #[command(flatten)]
        inst: InstanceArgs,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct BaseArgs {
    /// Rose of this rank as base graph.
    #[arg(long)]
    pub rank: Option<u32>,
    /// Base graph as JSON.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    /// Instance file: one InstanceSpec or a list of them.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["rank", "graph"])]
    pub spec: Option<PathBuf>,
    /// Relator word.
    #[arg(long)]
    pub word: Option<String>,
    /// Subgroup generators, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gens: Option<Vec<String>>,
    /// Base vertex the generators are read from (default 0).
    #[arg(long)]
    pub basepoint: Option<u32>,
    /// Immersion Γ′ → Γ as JSON, instead of folding generators.
    #[arg(long, value_name = "FILE")]
    pub morphism: Option<PathBuf>,
}

/// One instance as read from a file. Words are letter strings naming edge
/// ids (`a` is e0). Without `generators` or `morphism` the immersion is
/// the identity of the base. `attachments` are words over the edges of
/// Γ′, used by `npi`; without them every degree-one lift of the relator is
/// attached.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<Graph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<GraphMorphism>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attachments: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpecFile {
    One(Box<InstanceSpec>),
    Many(Vec<InstanceSpec>),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_specs(path: &Path) -> Result<Vec<InstanceSpec>> {
    Ok(match read_json::<SpecFile>(path)? {
        SpecFile::One(s) => vec![*s],
        SpecFile::Many(v) => v,
    })
}

impl InstanceArgs {
    fn specs(&self) -> Result<Vec<InstanceSpec>> {
        if let Some(p) = &self.spec {
            return read_specs(p);
        }
        Ok(vec![InstanceSpec {
            name: None,
            rank: self.base.rank,
            graph: self.base.graph.as_deref().map(read_json).transpose()?,
            relator: self.word.clone(),
            generators: self.gens.clone(),
            basepoint: self.basepoint,
            morphism: self.morphism.as_deref().map(read_json).transpose()?,
            attachments: None,
        }])
    }
}

/// An instance with every part resolved and checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub base: Graph,
    pub rho: GraphMorphism,
    pub relator: Option<Loop>,
    pub basepoint: Option<VertexId>,
}

fn parse_loop(g: &Graph, word: &str, strict: bool) -> Result<Loop> {
    let parsed = Word::parse(word)?;
    let w = if strict {
        if parsed.is_empty() || !parsed.is_cyclically_reduced() {
            return Err(Error::NotCyclicallyReduced(word.to_string()));
        }
        parsed
    } else {
        // free reduction, then cancel matching ends; no rotation
        let mut w = parsed.free_reduce().0;
        while w.len() >= 2 && w[0] == w[w.len() - 1].reversed() {
            w.pop();
            w.remove(0);
        }
        Word(w)
    };
    if w.is_empty() {
        return Err(Error::InvalidLoop(format!("{word:?} reduces to the empty word")));
    }
    let l = Loop::new(w.0);
    l.validate(g)?;
    Ok(l)
}

impl InstanceSpec {
    pub fn resolve(&self, strict: bool, fallback_name: &str) -> Result<Resolved> {
        let base = match (&self.graph, self.rank) {
            (Some(_), Some(_)) => return Err(Error::Usage("give either rank or graph, not both".into())),
            (Some(g), None) => g.clone(),
            (None, r) => Graph::rose(r.unwrap_or(2)),
        };
        base.ensure_valid()?;
        let relator = self.relator.as_deref().map(|w| parse_loop(&base, w, strict)).transpose()?;
        let bp = VertexId(self.basepoint.unwrap_or_else(|| base.vertices().next().map_or(0, |v| v.0)));
        let (rho, basepoint) = match (&self.morphism, &self.generators) {
            (Some(_), Some(_)) => return Err(Error::Usage("give either generators or a morphism, not both".into())),
            (Some(m), None) => {
                if m.codomain != base {
                    return Err(Error::CodomainMismatch);
                }
                if let Some(v) = m.validate().first() {
                    return Err(Error::InvalidMorphism(v.to_string()));
                }
                (m.clone(), None)
            }
            (None, Some(gens)) => {
                let paths = gens
                    .iter()
                    .filter(|g| !g.trim().is_empty())
                    .map(|g| Word::parse(g).map(|w| w.0))
                    .collect::<Result<Vec<_>>>()?;
                let f = fold(&base, bp, &paths, true)?;
                (f.immersion, f.basepoint)
            }
            (None, None) => (GraphMorphism::identity(&base), Some(bp)),
        };
        let name = self.name.clone().unwrap_or_else(|| {
            let w = relator.as_ref().map(|l| Word(l.path.clone()).to_string()).unwrap_or_default();
            match &self.generators {
                Some(g) => format!("<{}>/{w}", g.join(",")),
                None => format!("{fallback_name}/{w}"),
            }
        });
        Ok(Resolved { name, base, rho, relator, basepoint })
    }
}

fn need_relator(r: &Resolved) -> Result<&Loop> {
    r.relator.as_ref().ok_or_else(|| Error::Usage("a relator word is required (--word)".into()))
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
    strict: bool,
}

impl Io<'_> {
    fn emit_json(&mut self, v: &impl Serialize) -> Result<()> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(v)?)?;
        Ok(())
    }

    fn line(&mut self, v: &impl Serialize, text: String) -> Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(v)?)?;
        } else {
            writeln!(self.out, "{text}")?;
        }
        Ok(())
    }

    fn input_error(&mut self, name: &str, e: &Error) -> Result<()> {
        if self.json {
            writeln!(self.out, "{}", json!({ "instance": name, "error": e.to_string() }))?;
        } else {
            writeln!(self.out, "ERROR {name}: {e}")?;
        }
        Ok(())
    }
}

fn verdict_text(v: &Verdict) -> String {
    let status = if v.pass { "PASS" } else { "FAIL" };
    let detail = match v.check {
        crate::theorems::Check::DegreeBound => match v.neg_chi_image {
            Some(img) => format!(
                "{:?}: deg σ = {}, −χ(image) = {img}, −χ(Γ′) = {}",
                v.branch, v.deg_sigma, v.neg_chi
            ),
            None => format!("{:?}: 𝕊 is empty", v.branch),
        },
        crate::theorems::Check::Wcycles => {
            format!("{:?}: {} circles, rank(Γ′) = {}", v.branch, v.circles, v.rank)
        }
    };
    format!("{status} {} {:?} {detail}", v.instance, v.check)
}

/// Runs verifiers over instances; input errors are reported and skipped.
fn run_checks(io: &mut Io, inst: &InstanceArgs, main: bool) -> Result<i32> {
    let mut code = EXIT_PASS;
    let mut input_errors = false;
    for (k, spec) in inst.specs()?.iter().enumerate() {
        let fallback = format!("instance{k}");
        let verdicts = spec.resolve(io.strict, &fallback).and_then(|r| {
            let w = need_relator(&r)?;
            let mut out = Vec::new();
            if main {
                out.push(verify_main_theorem(&r.name, &r.rho, w)?);
            }
            out.push(wcycles_check(&r.name, &r.rho, w)?);
            Ok(out)
        });
        match verdicts {
            Ok(vs) => {
                for v in vs {
                    if !v.pass {
                        code = EXIT_VIOLATION;
                    }
                    io.line(&v, verdict_text(&v))?;
                }
            }
            Err(e) => {
                input_errors = true;
                io.input_error(spec.name.as_deref().unwrap_or(&fallback), &e)?;
            }
        }
    }
    Ok(if code == EXIT_PASS && input_errors { EXIT_INPUT } else { code })
}

fn run_npi(io: &mut Io, inst: &InstanceArgs) -> Result<i32> {
    let mut code = EXIT_PASS;
    let mut input_errors = false;
    for (k, spec) in inst.specs()?.iter().enumerate() {
        let fallback = format!("instance{k}");
        let result = spec.resolve(io.strict, &fallback).and_then(|r| {
            let w = need_relator(&r)?.clone();
            let attachments = match &spec.attachments {
                Some(words) => words
                    .iter()
                    .map(|a| parse_loop(&r.rho.domain, a, true))
                    .collect::<Result<Vec<_>>>()?,
                None => relator_lifts(&r.rho, &w)?,
            };
            let y = OneRelatorComplex { graph: r.rho.domain.clone(), attachments };
            let v = npi_check(&y, &r.rho, &w)?;
            Ok((r.name, v))
        });
        match result {
            Ok((name, v)) => {
                let replay = replay_certificate(&v.certificate);
                let ok = v.pass && replay == Ok((v.chi, v.trivial_pi1));
                if !ok {
                    code = EXIT_VIOLATION;
                }
                let text = format!(
                    "{} {name} χ(Y) = {}{}{}",
                    if ok { "PASS" } else { "FAIL" },
                    v.chi,
                    if v.trivial_pi1 { ", collapses to a point" } else { "" },
                    match &replay {
                        Ok(_) => String::new(),
                        Err(e) => format!(", replay failed: {e}"),
                    }
                );
                let record = json!({ "instance": name, "verdict": v, "replay_ok": replay.is_ok() });
                io.line(&record, text)?;
            }
            Err(e) => {
                input_errors = true;
                io.input_error(spec.name.as_deref().unwrap_or(&fallback), &e)?;
            }
        }
    }
    Ok(if code == EXIT_PASS && input_errors { EXIT_INPUT } else { code })
}

fn single(inst: &InstanceArgs, strict: bool) -> Result<Resolved> {
    let specs = inst.specs()?;
    match specs.as_slice() {
        [one] => one.resolve(strict, "instance"),
        _ => Err(Error::Usage("this command takes exactly one instance".into())),
    }
}

fn execute(cli: &Cli, io: &mut Io) -> Result<i32> {
    match &cli.command {
        Command::Fold { inst, no_trim } => {
            let specs = inst.specs()?;
            let [spec] = specs.as_slice() else {
                return Err(Error::Usage("fold takes exactly one instance".into()));
            };
            let base = match (&spec.graph, spec.rank) {
                (Some(g), _) => g.clone(),
                (None, r) => Graph::rose(r.unwrap_or(2)),
            };
            let bp = VertexId(spec.basepoint.unwrap_or(0));
            let paths = spec
                .generators
                .iter()
                .flatten()
                .filter(|g| !g.trim().is_empty())
                .map(|g| Word::parse(g).map(|w| w.0))
                .collect::<Result<Vec<_>>>()?;
            let f = fold(&base, bp, &paths, !no_trim)?;
            let chi = f.immersion.domain.euler_characteristic()?;
            io.emit_json(&json!({ "immersion": f.immersion, "basepoint": f.basepoint, "euler_characteristic": chi }))?;
            Ok(EXIT_PASS)
        }
        Command::Stack { word, base, svg } => {
            let spec = InstanceSpec { rank: base.rank, graph: base.graph.as_deref().map(read_json).transpose()?, ..Default::default() };
            let r = spec.resolve(io.strict, "stack")?;
            let l = parse_loop(&r.base, word, io.strict)?;
            let (s, trace) = construct_stacking(&r.base, &l)?;
            if let Some(path) = svg {
                std::fs::write(path, stacking_svg(&s)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            let (image, _) = s.subject.image_subgraph();
            io.emit_json(&json!({
                "word": Word(l.path.clone()).to_string(),
                "stacking": s.orders(),
                "arcs_above": s.count_open_arcs(Side::Above)?,
                "arcs_below": s.count_open_arcs(Side::Below)?,
                "neg_chi_image": -image.euler_characteristic()?,
                "good": s.is_good()?,
                "depth": trace.depth(),
                "trace": trace,
            }))?;
            Ok(EXIT_PASS)
        }
        Command::Pullback { inst } => {
            let r = single(inst, io.strict)?;
            let w = need_relator(&r)?;
            let pb = pullback_loop(&r.rho, w)?;
            let circles: Vec<String> = pb.circles.loops.iter().map(|c| Word(c.path.clone()).to_string()).collect();
            io.emit_json(&json!({
                "instance": r.name,
                "report": pb.report(),
                "circles_in_domain": circles,
                "fiber_product": { "vertices": pb.product.total.num_vertices(), "edges": pb.product.total.num_edges() },
            }))?;
            Ok(EXIT_PASS)
        }
        Command::Verify { inst } => run_checks(io, inst, true),
        Command::Wcycles { inst } => run_checks(io, inst, false),
        Command::Npi { inst } => run_npi(io, inst),
        Command::Harness { seed, count, max_word_len, max_gen_len, max_gens, no_subdivide } => {
            let bounds = Bounds {
                max_word_len: *max_word_len,
                max_gen_len: *max_gen_len,
                max_gens: *max_gens,
                subdivide_one_in: if *no_subdivide { 0 } else { Bounds::default().subdivide_one_in },
                ..Bounds::default()
            };
            let started = Instant::now();
            let (summary, _) = run_harness(*seed, *count, &bounds)?;
            let elapsed = started.elapsed();
            if io.json {
                io.emit_json(&summary)?;
            } else {
                let b = &summary.branches;
                writeln!(io.out, "seed {} count {}: {}/{} pass", summary.seed, summary.count, summary.passed, summary.count)?;
                writeln!(
                    io.out,
                    "degree bound: {} vacuous, {} reducible, {} bound holds, {} violated",
                    b.vacuous, b.reducible, b.bound_holds, b.violated
                )?;
                writeln!(
                    io.out,
                    "wcycles {} / stacking {} / npi {} pass; {} subdivided bases; max tower depth {}; {} towers with a stage keeping its edge count",
                    summary.wcycles_passed,
                    summary.stacking_passed,
                    summary.npi_passed,
                    summary.subdivided,
                    summary.max_depth,
                    summary.edge_count_stalls
                )?;
                for f in &summary.failures {
                    writeln!(io.out, "FAIL {f}")?;
                }
            }
            writeln!(io.err, "harness: {} instances in {:.2?}", summary.count, elapsed)?;
            Ok(if summary.failed == 0 { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Command::ExportDot { inst } => {
            let r = single(inst, io.strict)?;
            let dot = if inst.gens.is_some() || inst.morphism.is_some() || inst.spec.is_some() {
                morphism_dot(&r.rho, &r.name)
            } else {
                graph_dot(&r.base, &r.name)
            };
            write!(io.out, "{dot}")?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let mut io = Io { out, err, json: cli.json, strict: cli.strict };
    match execute(&cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
