//! `akbl`: parse, explore and check AspectKBL networks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aspectkbl::mc_exhaustive::{check_lts, Verdict};
use aspectkbl::mc_static::{check_network, StaticVerdict};
use aspectkbl::model::{validate, Net, Obligation, ValidationMode};
use aspectkbl::report;
use aspectkbl::semantics::{build_lts, candidate_steps, Limits, Lts};
use aspectkbl::SourceFile;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OK: u8 = 0;
const VIOLATED: u8 = 1;
const UNKNOWN: u8 = 2;
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "akbl", version, about = "Explore and verify AspectKBL networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one or more `AG` obligations against a network.
    Check(CheckArgs),
    /// Build the transition system and print its size.
    Lts(LtsArgs),
    /// Print one maximal run of the network.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Static,
    Exhaustive,
    /// Static first, exhaustive for obligations it cannot certify.
    Auto,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = Limits::default().max_states)]
    max_states: usize,
    #[arg(long, default_value_t = Limits::default().max_depth)]
    max_depth: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits { max_states: self.max_states, max_depth: self.max_depth }
    }
}

#[derive(Args)]
struct CheckArgs {
    net: PathBuf,
    #[arg(required = true)]
    obligations: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    #[command(flatten)]
    limits: LimitArgs,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the transition system as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct LtsArgs {
    net: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Print the transition system as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct TraceArgs {
    net: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File of step indices (whitespace separated) to follow before the seed takes over.
    #[arg(long)]
    choices: Option<PathBuf>,
    /// List the actions blocked by policies at each state.
    #[arg(long)]
    explain_denied: bool,
    #[arg(long, default_value_t = Limits::default().max_depth)]
    max_depth: usize,
}

/// An error already rendered for the user.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_source(path: &Path) -> Result<SourceFile, Failure> {
    SourceFile::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_net(path: &Path, mode: ValidationMode) -> Result<Net, Failure> {
    let src = read_source(path)?;
    let net = src.parse_net().map_err(|d| Failure(src.render(&d)))?;
    let diags = validate(&net, mode);
    if diags.iter().any(|d| d.is_error()) {
        return Err(Failure(src.render(&diags)));
    }
    Ok(net)
}

fn load_obligation(path: &Path) -> Result<Obligation, Failure> {
    let src = read_source(path)?;
    src.parse_obligation().map_err(|d| Failure(src.render(&d)))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

struct Outcome {
    path: String,
    obligation: Obligation,
    static_verdict: Option<StaticVerdict>,
    exhaustive: Option<Verdict>,
}

impl Outcome {
    fn code(&self) -> u8 {
        match (&self.exhaustive, &self.static_verdict) {
            (Some(v), _) if !v.holds => VIOLATED,
            (Some(_), _) => OK,
            (None, Some(s)) if !s.certified => UNKNOWN,
            _ => OK,
        }
    }

    fn json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "path": self.path });
        if let Some(s) = &self.static_verdict {
            v["static"] = report::static_value(&self.obligation, s);
        }
        if let Some(e) = &self.exhaustive {
            v["exhaustive"] = report::verdict_value(&self.obligation, e);
        }
        v
    }

    fn print_text(&self) {
        println!("{}: {}", self.path, self.obligation);
        if let Some(s) = &self.static_verdict {
            println!("  static: {}", if s.certified { "certified" } else { "not certified" });
            for r in &s.per_action {
                print!("    {} :: {}  {}", r.action.source, r.action.action, r.outcome.as_str());
                if let Some(t) = &r.theta0 {
                    print!("  theta0 = {t}");
                }
                println!();
                for c in &r.constraints {
                    println!("      granted only if {c}");
                }
                if let Some(n) = &r.note {
                    println!("      {n}");
                }
            }
        }
        if let Some(e) = &self.exhaustive {
            let status = if e.holds { "holds" } else { "violated" };
            println!(
                "  exhaustive: {status} ({} states, {} transitions checked)",
                e.states_explored, e.transitions_checked
            );
            if let Some(w) = &e.witness {
                println!("  witness:");
                for (i, l) in w.path.iter().enumerate() {
                    println!("    {}. {l}", i + 1);
                }
                println!("    theta = {}", w.theta);
                if let Some(bp) = &w.failing_bp {
                    println!("    false: {bp}");
                }
            }
        }
    }
}

fn cmd_check(a: &CheckArgs) -> Result<u8, Failure> {
    let net = load_net(&a.net, ValidationMode::Check)?;
    let obligations = a
        .obligations
        .iter()
        .map(|p| Ok((p.display().to_string(), load_obligation(p)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut lts: Option<Lts> = None;
    let get_lts = |lts: &mut Option<Lts>| -> Result<(), Failure> {
        if lts.is_none() {
            *lts = Some(build_lts(&net, a.limits.limits())?);
        }
        Ok(())
    };
    let mut outcomes = Vec::new();
    for (path, obligation) in obligations {
        let static_verdict = match a.mode {
            Mode::Static | Mode::Auto => Some(check_network(&net, &obligation)?),
            Mode::Exhaustive => None,
        };
        let run_exhaustive = match a.mode {
            Mode::Exhaustive => true,
            Mode::Auto => !static_verdict.as_ref().is_some_and(|s| s.certified),
            Mode::Static => false,
        };
        let exhaustive = if run_exhaustive {
            get_lts(&mut lts)?;
            Some(check_lts(lts.as_ref().expect("built above"), &obligation)?)
        } else {
            None
        };
        outcomes.push(Outcome { path, obligation, static_verdict, exhaustive });
    }
    if let Some(dot) = &a.dot {
        get_lts(&mut lts)?;
        write_file(dot, &report::lts_dot(lts.as_ref().expect("built above")))?;
    }
    if a.json {
        let doc: Vec<serde_json::Value> = outcomes.iter().map(Outcome::json).collect();
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for o in &outcomes {
            o.print_text();
        }
    }
    Ok(outcomes.iter().map(Outcome::code).max().unwrap_or(OK))
}

fn cmd_lts(a: &LtsArgs) -> Result<u8, Failure> {
    let net = load_net(&a.net, ValidationMode::Check)?;
    let lts = build_lts(&net, a.limits.limits())?;
    if let Some(dot) = &a.dot {
        write_file(dot, &report::lts_dot(&lts))?;
    }
    if a.json {
        println!("{}", report::lts_json(&lts));
    } else {
        println!("states: {}", lts.states.len());
        println!("transitions: {}", lts.transitions.len());
        println!("final states: {}", lts.final_states().len());
        let paths = lts.maximal_paths(10_000);
        println!("maximal paths: {}", paths.len());
    }
    Ok(OK)
}

fn read_choices(path: &Path) -> Result<Vec<usize>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    text.split_whitespace()
        .map(|w| w.parse().map_err(|_| Failure(format!("{}: `{w}` is not a step index", path.display()))))
        .collect()
}

fn cmd_trace(a: &TraceArgs) -> Result<u8, Failure> {
    let mut net = load_net(&a.net, ValidationMode::ParseOnly)?;
    let mut choices = match &a.choices {
        Some(p) => read_choices(p)?,
        None => Vec::new(),
    }
    .into_iter();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut step = 0;
    loop {
        let candidates = candidate_steps(&net)?;
        if a.explain_denied {
            for c in candidates.iter().filter(|c| !c.granted()) {
                println!(
                    "  denied: {}  (source {}, target {}, combined {})",
                    c.label,
                    c.source_value,
                    c.target_value,
                    c.value()
                );
            }
        }
        let enabled: Vec<_> = candidates.into_iter().filter(|c| c.granted()).collect();
        if enabled.is_empty() {
            println!("no enabled steps after {step} step(s)");
            break;
        }
        if step == a.max_depth {
            println!("stopped at depth limit {step}");
            break;
        }
        let pick = match choices.next() {
            Some(i) if i < enabled.len() => i,
            Some(i) => return Err(Failure(format!("step {}: choice {i} out of range 0..{}", step + 1, enabled.len()))),
            None => rng.random_range(0..enabled.len()),
        };
        step += 1;
        let chosen = enabled.into_iter().nth(pick).expect("index checked");
        println!("{step}. {}", chosen.label);
        net = chosen.next;
    }
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Lts(a) => cmd_lts(a),
        Command::Trace(a) => cmd_trace(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
