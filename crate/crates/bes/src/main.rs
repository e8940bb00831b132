//! Command-line surface: formula checking, support and derivability
//! decisions, flattening and clause emission, countermodel search, and
//! the differential crosscheck harness.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bes::trace::TraceNode;
use bes::{
    crosscheck, curated, derives, flatten, instantiate_system, kripke_refute, mints_system,
    modified_system, normalize_bot, parse_base, parse_formula, random_formulas, supports, valid,
    Atom, Base, ClauseSystem, Context, Formula, KripkeModel, SupportQuery,
};

#[derive(Parser)]
#[command(name = "bes", version, about = "Support in a base, decided through clauses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a formula is valid.
    Check {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a base and context support a formula.
    Support {
        #[arg(long)]
        base: PathBuf,
        /// Context formulas, separated by `;`.
        #[arg(long)]
        context: Option<String>,
        formula: String,
        /// Print the derivation certificate on positive verdicts.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a base derives an atom from atomic assumptions.
    Derive {
        #[arg(long)]
        base: PathBuf,
        /// Assumed atoms, separated by `,`.
        #[arg(long)]
        assume: Option<String>,
        atom: String,
        /// Print the derivation on positive verdicts.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the naming map that flattens a formula.
    Flatten {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Emit a clause system for a formula.
    EmitClauses {
        formula: String,
        /// Which translation to emit.
        #[arg(long, value_enum)]
        system: SystemKind,
        /// Atoms to instantiate schematic clauses over (system `n` only),
        /// separated by `,`.
        #[arg(long)]
        universe: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the decision procedure against the sequent prover.
    Crosscheck {
        /// File with one formula per line; `#` starts a comment.
        #[arg(long, conflicts_with = "random")]
        corpus: Option<PathBuf>,
        /// Append this many random formulas to the built-in list.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, requires = "random", default_value_t = 42)]
        seed: u64,
        /// Largest connective count of random formulas.
        #[arg(long, requires = "random", default_value_t = 8)]
        max_size: usize,
        /// Number of distinct atom names in random formulas.
        #[arg(long, requires = "random", default_value_t = 3)]
        atoms: usize,
        /// Worker count; omit for one worker per core.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a Kripke countermodel to a formula.
    Refute {
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum SystemKind {
    /// The guarded translation with instantiated eliminations.
    Mints,
    /// The schematic translation with open elimination slots.
    N,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { formula, json } => run_check(&formula, json),
        Command::Support { base, context, formula, trace, json } => {
            run_support(&base, context.as_deref(), &formula, trace, json)
        }
        Command::Derive { base, assume, atom, trace, json } => {
            run_derive(&base, assume.as_deref(), &atom, trace, json)
        }
        Command::Flatten { formula, json } => run_flatten(&formula, json),
        Command::EmitClauses { formula, system, universe, json } => {
            run_emit(&formula, system, universe.as_deref(), json)
        }
        Command::Crosscheck { corpus, random, seed, max_size, atoms, jobs, json } => {
            run_crosscheck(corpus.as_deref(), random, seed, max_size, atoms, jobs, json)
        }
        Command::Refute { formula, max_worlds, json } => run_refute(&formula, max_worlds, json),
    }
}

fn parse_formula_arg(text: &str) -> Result<Formula, String> {
    parse_formula(text).map_err(|e| format!("cannot parse formula `{text}`: {e}"))
}

fn parse_atom_arg(text: &str) -> Result<Atom, String> {
    Atom::new(text.trim()).map_err(|e| format!("cannot parse atom `{text}`: {e}"))
}

fn load_base(path: &Path) -> Result<Base, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read base file `{}`: {e}", path.display()))?;
    parse_base(&text).map_err(|e| format!("cannot parse base file `{}`: {e}", path.display()))
}

fn parse_context_arg(text: Option<&str>) -> Result<Context, String> {
    let mut context = Context::new();
    if let Some(text) = text {
        for part in text.split(';') {
            let part = part.trim();
            if !part.is_empty() {
                context.insert(parse_formula_arg(part)?);
            }
        }
    }
    Ok(context)
}

fn parse_universe_arg(text: &str) -> Result<Vec<Atom>, String> {
    let atoms: Vec<Atom> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_atom_arg)
        .collect::<Result<_, _>>()?;
    if atoms.is_empty() {
        return Err("the instantiation universe must name at least one atom".into());
    }
    Ok(atoms)
}

fn emit_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string(value).expect("output serializes"));
}

fn verdict_exit(verdict: bool) -> ExitCode {
    ExitCode::from(if verdict { 0 } else { 1 })
}

fn run_check(formula: &str, json: bool) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct CheckOut {
        formula: String,
        valid: bool,
    }
    let formula = parse_formula_arg(formula)?;
    let verdict = valid(&Context::new(), &formula);
    if json {
        emit_json(&CheckOut { formula: formula.to_string(), valid: verdict });
    } else {
        println!("{}", if verdict { "valid" } else { "invalid" });
    }
    Ok(verdict_exit(verdict))
}

fn run_support(
    base: &Path,
    context: Option<&str>,
    formula: &str,
    trace: bool,
    json: bool,
) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct SupportOut {
        formula: String,
        context: Vec<String>,
        verdict: bool,
        goal: String,
        universe: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<TraceNode>,
    }
    let query = SupportQuery {
        base: load_base(base)?,
        context: parse_context_arg(context)?,
        formula: parse_formula_arg(formula)?,
    };
    let result = supports(&query);
    let certificate = result
        .certificate
        .as_ref()
        .filter(|_| trace)
        .map(|d| d.to_trace(&result.hypotheses));
    if json {
        emit_json(&SupportOut {
            formula: query.formula.to_string(),
            context: query.context.iter().map(Formula::to_string).collect(),
            verdict: result.verdict,
            goal: result.goal.to_string(),
            universe: result.universe.iter().map(Atom::to_string).collect(),
            trace: certificate,
        });
    } else {
        println!("{}", if result.verdict { "supported" } else { "unsupported" });
        if let Some(node) = certificate {
            print!("{node}");
        }
    }
    Ok(verdict_exit(result.verdict))
}

fn run_derive(
    base: &Path,
    assume: Option<&str>,
    atom: &str,
    trace: bool,
    json: bool,
) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct DeriveOut {
        assumptions: Vec<String>,
        goal: String,
        derivable: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<TraceNode>,
    }
    let base = load_base(base)?;
    let mut assumptions = BTreeSet::new();
    if let Some(list) = assume {
        for part in list.split(',') {
            let part = part.trim();
            if !part.is_empty() {
                assumptions.insert(parse_atom_arg(part)?);
            }
        }
    }
    let goal = parse_atom_arg(atom)?;
    let (derivable, derivation) = derives(&base, &assumptions, &goal);
    let node = derivation.as_ref().filter(|_| trace).map(|d| d.to_trace(&assumptions));
    if json {
        emit_json(&DeriveOut {
            assumptions: assumptions.iter().map(Atom::to_string).collect(),
            goal: goal.to_string(),
            derivable,
            trace: node,
        });
    } else {
        println!("{}", if derivable { "derivable" } else { "underivable" });
        if let Some(node) = node {
            print!("{node}");
        }
    }
    Ok(verdict_exit(derivable))
}

fn run_flatten(formula: &str, json: bool) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct Entry {
        atom: String,
        formula: String,
    }
    #[derive(Serialize)]
    struct FlattenOut {
        formula: String,
        normalized: String,
        entries: Vec<Entry>,
        absurdity_atom: String,
        reserved_atom: String,
    }
    let formula = parse_formula_arg(formula)?;
    let normalized = normalize_bot(&formula);
    let map = flatten(&normalized).expect("normalized formulas flatten");
    let entries: Vec<Entry> = map
        .entries()
        .iter()
        .map(|(sub, atom)| Entry { atom: atom.to_string(), formula: sub.to_string() })
        .collect();
    if json {
        emit_json(&FlattenOut {
            formula: formula.to_string(),
            normalized: normalized.to_string(),
            entries,
            absurdity_atom: map.bot_atom().to_string(),
            reserved_atom: map.fresh_y().to_string(),
        });
    } else {
        if normalized != formula {
            println!("normalized: {normalized}");
        }
        for entry in &entries {
            println!("{} := {}", entry.atom, entry.formula);
        }
        println!("absurdity atom: {}", map.bot_atom());
        println!("reserved atom: {}", map.fresh_y());
    }
    Ok(ExitCode::from(0))
}

fn run_emit(
    formula: &str,
    kind: SystemKind,
    universe: Option<&str>,
    json: bool,
) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct EmitOut {
        formula: String,
        system: &'static str,
        goal: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        universe: Option<Vec<String>>,
        #[serde(flatten)]
        clauses: ClauseSystem,
    }
    let formula = parse_formula_arg(formula)?;
    let normalized = normalize_bot(&formula);
    let (system, goal, name, universe) = match kind {
        SystemKind::Mints => {
            if universe.is_some() {
                return Err("--universe applies only to --system n".into());
            }
            let (system, goal) = mints_system(&normalized).expect("normalized formulas flatten");
            (system, goal, "mints", None)
        }
        SystemKind::N => {
            let schematic = modified_system(&normalized).expect("normalized formulas flatten");
            let map = flatten(&normalized).expect("normalized formulas flatten");
            let goal = map.flat(&normalized).expect("the formula was flattened").clone();
            match universe {
                Some(text) => {
                    let atoms = parse_universe_arg(text)?;
                    let concrete = instantiate_system(&schematic, &atoms)
                        .expect("the universe was checked to be nonempty");
                    (concrete, goal, "n", Some(atoms))
                }
                None => (schematic, goal, "n", None),
            }
        }
    };
    if json {
        emit_json(&EmitOut {
            formula: formula.to_string(),
            system: name,
            goal: goal.to_string(),
            universe: universe.map(|u| u.iter().map(Atom::to_string).collect()),
            clauses: system,
        });
    } else {
        println!("goal: {goal}");
        for clause in &system.clauses {
            println!("{clause}");
        }
        for schematic in &system.schematics {
            println!("{schematic}");
        }
    }
    Ok(ExitCode::from(0))
}

fn load_corpus(path: &Path) -> Result<Vec<Formula>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read corpus file `{}`: {e}", path.display()))?;
    let mut formulas = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let formula = parse_formula(line).map_err(|e| {
            format!("cannot parse corpus line {}: {e}", number + 1)
        })?;
        formulas.push(formula);
    }
    Ok(formulas)
}

fn run_crosscheck(
    corpus: Option<&Path>,
    random: Option<usize>,
    seed: u64,
    max_size: usize,
    atoms: usize,
    jobs: Option<usize>,
    json: bool,
) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct Summary {
        total: usize,
        mismatches: usize,
    }
    let mut formulas: Vec<Formula> = curated().into_iter().map(|e| e.formula).collect();
    if let Some(path) = corpus {
        formulas.extend(load_corpus(path)?);
    }
    if let Some(count) = random {
        if atoms == 0 {
            return Err("--atoms must be at least 1".into());
        }
        formulas.extend(random_formulas(seed, count, max_size, atoms));
    }
    let report = crosscheck(&formulas, jobs.unwrap_or(0));
    if json {
        for record in &report.records {
            emit_json(record);
        }
        emit_json(&Summary { total: report.total(), mismatches: report.mismatches });
    } else {
        for record in &report.records {
            let status = if record.agree { "ok" } else { "MISMATCH" };
            let worlds = match record.kripke {
                Some(n) => format!(" refuted:{n}w"),
                None => String::new(),
            };
            println!(
                "{status} bes:{} oracle:{}{worlds} {}",
                record.bes, record.oracle, record.formula
            );
        }
        println!("checked {} formulas, {} mismatches", report.total(), report.mismatches);
    }
    Ok(ExitCode::from(if report.mismatches == 0 { 0 } else { 1 }))
}

fn render_model(model: &KripkeModel) -> String {
    let mut out = format!("worlds: {} (root {})\n", model.worlds, model.root);
    let mut pairs = Vec::new();
    for lower in 0..model.worlds {
        for upper in 0..model.worlds {
            if lower != upper && model.order[lower][upper] {
                pairs.push(format!("{lower} <= {upper}"));
            }
        }
    }
    out.push_str(&format!(
        "order: {}\n",
        if pairs.is_empty() { "discrete".to_string() } else { pairs.join(", ") }
    ));
    for (world, atoms) in model.valuation.iter().enumerate() {
        let names: Vec<&str> = atoms.iter().map(Atom::name).collect();
        out.push_str(&format!(
            "world {world}: {}\n",
            if names.is_empty() { "(no atoms)".to_string() } else { names.join(", ") }
        ));
    }
    out
}

fn run_refute(formula: &str, max_worlds: usize, json: bool) -> Result<ExitCode, String> {
    #[derive(Serialize)]
    struct RefuteOut {
        formula: String,
        max_worlds: usize,
        model: Option<KripkeModel>,
    }
    if max_worlds == 0 || max_worlds > bes::prover::MAX_ENUMERATED_WORLDS {
        return Err(format!(
            "--max-worlds must be between 1 and {}",
            bes::prover::MAX_ENUMERATED_WORLDS
        ));
    }
    let formula = parse_formula_arg(formula)?;
    let model = kripke_refute(&formula, max_worlds);
    let found = model.is_some();
    if json {
        emit_json(&RefuteOut { formula: formula.to_string(), max_worlds, model });
    } else {
        match &model {
            Some(model) => print!("{}", render_model(model)),
            None => println!("none"),
        }
    }
    Ok(verdict_exit(found))
}
