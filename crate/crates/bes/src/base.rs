//! Atomic rules, bases, and derivability of atoms from a base.
//!
//! A base is a finite set of atomic rules. A rule
//! `(P1 => p1), ..., (Pn => pn) => c` concludes `c` once each head `pi`
//! has been derived under the current assumptions extended with the
//! hypothesis set `Pi`; rules with no premises conclude `c` outright.
//! Derivability is the least relation closed under assumptions, premise-
//! free rules, and rule application.
//!
//! The text format is one rule per line:
//!
//! ```text
//! # lines starting with `#` and blank lines are ignored
//! => c                    # premise-free rule
//! a, b => r               # bare atoms are premises with no hypotheses
//! (a => b), c => d        # parenthesized premises discharge hypotheses
//! ```
//!
//! The engine tables judgments `(assumption set, atom)` demanded by the
//! query, then propagates rule firings to a least fixpoint, so cyclic
//! rule sets cannot send it into a loop. Successful queries yield a
//! [`Derivation`] that an independent checker can replay.

use std::collections::hash_map::Entry;
use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Atom, ABSURDITY_TOKEN};
use crate::trace::{render_judgment, TraceNode};

/// One premise of an atomic rule: derive `head` under the extra
/// hypotheses in `hypotheses`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RulePremise {
    pub hypotheses: BTreeSet<Atom>,
    pub head: Atom,
}

impl RulePremise {
    pub fn flat(head: Atom) -> RulePremise {
        RulePremise { hypotheses: BTreeSet::new(), head }
    }

    pub fn new<I: IntoIterator<Item = Atom>>(hypotheses: I, head: Atom) -> RulePremise {
        RulePremise { hypotheses: hypotheses.into_iter().collect(), head }
    }
}

impl fmt::Display for RulePremise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hypotheses.is_empty() {
            write!(f, "{}", self.head)
        } else {
            let hyps: Vec<String> = self.hypotheses.iter().map(Atom::to_string).collect();
            write!(f, "({} => {})", hyps.join(", "), self.head)
        }
    }
}

/// An atomic rule over basic sentences. Rule identity is structural, so
/// the premise list keeps its order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomicRule {
    pub premises: Vec<RulePremise>,
    pub conclusion: Atom,
}

impl AtomicRule {
    pub fn nullary(conclusion: Atom) -> AtomicRule {
        AtomicRule { premises: Vec::new(), conclusion }
    }

    pub fn new(premises: Vec<RulePremise>, conclusion: Atom) -> AtomicRule {
        AtomicRule { premises, conclusion }
    }

    /// All atoms mentioned by the rule, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for premise in &self.premises {
            out.extend(premise.hypotheses.iter().cloned());
            out.insert(premise.head.clone());
        }
        out.insert(self.conclusion.clone());
        out
    }
}

impl fmt::Display for AtomicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            write!(f, "=> {}", self.conclusion)
        } else {
            let premises: Vec<String> = self.premises.iter().map(RulePremise::to_string).collect();
            write!(f, "{} => {}", premises.join(", "), self.conclusion)
        }
    }
}

/// A finite set of atomic rules.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Base {
    pub rules: BTreeSet<AtomicRule>,
}

impl Base {
    pub fn new() -> Base {
        Base::default()
    }

    pub fn insert(&mut self, rule: AtomicRule) {
        self.rules.insert(rule);
    }

    pub fn is_subset(&self, other: &Base) -> bool {
        self.rules.is_subset(&other.rules)
    }

    /// Union of two bases (the smallest common extension).
    pub fn union(&self, other: &Base) -> Base {
        let mut rules = self.rules.clone();
        rules.extend(other.rules.iter().cloned());
        Base { rules }
    }

    /// All atoms mentioned by any rule, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for rule in &self.rules {
            out.extend(rule.atoms());
        }
        out
    }
}

impl FromIterator<AtomicRule> for Base {
    fn from_iter<I: IntoIterator<Item = AtomicRule>>(iter: I) -> Base {
        Base { rules: iter.into_iter().collect() }
    }
}

/// Failure while reading the one-rule-per-line base format.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseParseError {
    #[error("line {line}, byte {offset}: expected {expected}, found {found}")]
    Unexpected {
        line: usize,
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}, byte {offset}: `{ABSURDITY_TOKEN}` cannot name an atom in a rule")]
    ReservedAtom { line: usize, offset: usize },
    #[error("line {line}, byte {offset}: stray {found:?}")]
    BadChar { line: usize, offset: usize, found: char },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RuleToken {
    Ident(String),
    Reserved,
    LParen,
    RParen,
    Comma,
    Arrow,
}

impl RuleToken {
    fn describe(&self) -> String {
        match self {
            RuleToken::Ident(name) => format!("`{name}`"),
            RuleToken::Reserved => format!("`{ABSURDITY_TOKEN}`"),
            RuleToken::LParen => "`(`".into(),
            RuleToken::RParen => "`)`".into(),
            RuleToken::Comma => "`,`".into(),
            RuleToken::Arrow => "`=>`".into(),
        }
    }
}

struct RuleParser<'a> {
    line: usize,
    tokens: Vec<(usize, RuleToken)>,
    pos: usize,
    end: usize,
    _text: &'a str,
}

impl<'a> RuleParser<'a> {
    fn lex(line: usize, text: &'a str) -> Result<RuleParser<'a>, BaseParseError> {
        let bytes = text.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] as char {
                ' ' | '\t' | '\r' => i += 1,
                '(' => {
                    tokens.push((i, RuleToken::LParen));
                    i += 1;
                }
                ')' => {
                    tokens.push((i, RuleToken::RParen));
                    i += 1;
                }
                ',' => {
                    tokens.push((i, RuleToken::Comma));
                    i += 1;
                }
                '=' if bytes.get(i + 1) == Some(&b'>') => {
                    tokens.push((i, RuleToken::Arrow));
                    i += 2;
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    let word = &text[start..i];
                    if word == ABSURDITY_TOKEN {
                        tokens.push((start, RuleToken::Reserved));
                    } else {
                        tokens.push((start, RuleToken::Ident(word.to_owned())));
                    }
                }
                other => return Err(BaseParseError::BadChar { line, offset: i, found: other }),
            }
        }
        Ok(RuleParser { line, tokens, pos: 0, end: text.len(), _text: text })
    }

    fn peek(&self) -> Option<&RuleToken> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn unexpected(&self, expected: &'static str) -> BaseParseError {
        match self.tokens.get(self.pos) {
            Some((offset, RuleToken::Reserved)) => {
                BaseParseError::ReservedAtom { line: self.line, offset: *offset }
            }
            Some((offset, tok)) => BaseParseError::Unexpected {
                line: self.line,
                offset: *offset,
                expected,
                found: tok.describe(),
            },
            None => BaseParseError::Unexpected {
                line: self.line,
                offset: self.end,
                expected,
                found: "end of line".into(),
            },
        }
    }

    fn atom(&mut self, expected: &'static str) -> Result<Atom, BaseParseError> {
        match self.tokens.get(self.pos) {
            Some((_, RuleToken::Ident(name))) => {
                let atom = Atom::internal(name.clone());
                self.pos += 1;
                Ok(atom)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn eat(&mut self, want: RuleToken, expected: &'static str) -> Result<(), BaseParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn rule(&mut self) -> Result<AtomicRule, BaseParseError> {
        let mut premises = Vec::new();
        if self.peek() == Some(&RuleToken::Arrow) {
            self.pos += 1;
        } else {
            loop {
                premises.push(self.premise()?);
                match self.peek() {
                    Some(RuleToken::Comma) => self.pos += 1,
                    Some(RuleToken::Arrow) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `=>`")),
                }
            }
        }
        let conclusion = self.atom("a conclusion atom")?;
        if self.pos != self.tokens.len() {
            return Err(self.unexpected("end of line"));
        }
        Ok(AtomicRule::new(premises, conclusion))
    }

    fn premise(&mut self) -> Result<RulePremise, BaseParseError> {
        match self.peek() {
            Some(RuleToken::LParen) => {
                self.pos += 1;
                self.grouped_premise()
            }
            Some(RuleToken::Ident(_)) => Ok(RulePremise::flat(self.atom("a premise atom")?)),
            _ => Err(self.unexpected("a premise")),
        }
    }

    fn grouped_premise(&mut self) -> Result<RulePremise, BaseParseError> {
        let mut hypotheses = BTreeSet::new();
        if self.peek() != Some(&RuleToken::Arrow) {
            loop {
                hypotheses.insert(self.atom("a hypothesis atom")?);
                match self.peek() {
                    Some(RuleToken::Comma) => self.pos += 1,
                    Some(RuleToken::Arrow) => break,
                    _ => return Err(self.unexpected("`,` or `=>`")),
                }
            }
        }
        self.eat(RuleToken::Arrow, "`=>`")?;
        let head = self.atom("a premise head atom")?;
        self.eat(RuleToken::RParen, "`)`")?;
        Ok(RulePremise { hypotheses, head })
    }
}

/// Parses the one-rule-per-line base format. `#` starts a comment; blank
/// lines are skipped.
pub fn parse_base(text: &str) -> Result<Base, BaseParseError> {
    let mut base = Base::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let mut parser = RuleParser::lex(line, body)?;
        base.insert(parser.rule()?);
    }
    Ok(base)
}

/// Canonical text for a base, one rule per line in sorted order.
/// `parse_base` on the output reproduces the base exactly.
pub fn print_base(base: &Base) -> String {
    let mut out = String::new();
    for rule in &base.rules {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    out
}

/// A replayable witness that an atom is derivable in a base from
/// assumptions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Derivation {
    /// The goal is among the current assumptions.
    Hypothesis(Atom),
    /// A premise-free rule concludes the goal.
    Nullary(AtomicRule),
    /// A rule application; the i-th subderivation establishes the i-th
    /// premise head under the premise's hypotheses.
    Apply {
        rule: AtomicRule,
        premises: Vec<Derivation>,
    },
}

/// Why a derivation failed to replay.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("hypothesis {atom} is not among the assumptions")]
    UnknownHypothesis { atom: Atom },
    #[error("rule `{rule}` is not in the base")]
    UnknownRule { rule: String },
    #[error("rule `{rule}` expects {expected} subderivations, found {found}")]
    PremiseCount { rule: String, expected: usize, found: usize },
    #[error("subderivation concludes {found}, premise requires {expected}")]
    PremiseHead { expected: Atom, found: Atom },
    #[error("derivation concludes {found}, expected {expected}")]
    WrongConclusion { expected: Atom, found: Atom },
}

impl Derivation {
    /// The atom this derivation concludes.
    pub fn conclusion(&self) -> &Atom {
        match self {
            Derivation::Hypothesis(atom) => atom,
            Derivation::Nullary(rule) => &rule.conclusion,
            Derivation::Apply { rule, .. } => &rule.conclusion,
        }
    }

    /// Checks every step against `base` starting from `assumptions` and
    /// confirms the conclusion is `goal`.
    pub fn replay(
        &self,
        base: &Base,
        assumptions: &BTreeSet<Atom>,
        goal: &Atom,
    ) -> Result<(), ReplayError> {
        let concluded = self.replay_inner(base, assumptions)?;
        if concluded == *goal {
            Ok(())
        } else {
            Err(ReplayError::WrongConclusion { expected: goal.clone(), found: concluded })
        }
    }

    fn replay_inner(
        &self,
        base: &Base,
        assumptions: &BTreeSet<Atom>,
    ) -> Result<Atom, ReplayError> {
        match self {
            Derivation::Hypothesis(atom) => {
                if assumptions.contains(atom) {
                    Ok(atom.clone())
                } else {
                    Err(ReplayError::UnknownHypothesis { atom: atom.clone() })
                }
            }
            Derivation::Nullary(rule) => {
                if !base.rules.contains(rule) {
                    return Err(ReplayError::UnknownRule { rule: rule.to_string() });
                }
                if !rule.premises.is_empty() {
                    return Err(ReplayError::PremiseCount {
                        rule: rule.to_string(),
                        expected: rule.premises.len(),
                        found: 0,
                    });
                }
                Ok(rule.conclusion.clone())
            }
            Derivation::Apply { rule, premises } => {
                if !base.rules.contains(rule) {
                    return Err(ReplayError::UnknownRule { rule: rule.to_string() });
                }
                if rule.premises.len() != premises.len() {
                    return Err(ReplayError::PremiseCount {
                        rule: rule.to_string(),
                        expected: rule.premises.len(),
                        found: premises.len(),
                    });
                }
                for (spec, sub) in rule.premises.iter().zip(premises) {
                    let mut extended = assumptions.clone();
                    extended.extend(spec.hypotheses.iter().cloned());
                    let head = sub.replay_inner(base, &extended)?;
                    if head != spec.head {
                        return Err(ReplayError::PremiseHead {
                            expected: spec.head.clone(),
                            found: head,
                        });
                    }
                }
                Ok(rule.conclusion.clone())
            }
        }
    }

    /// Renders the derivation with the judgment each node establishes.
    pub fn to_trace(&self, assumptions: &BTreeSet<Atom>) -> TraceNode {
        let judgment = render_judgment(
            assumptions.iter().map(Atom::to_string),
            self.conclusion().name(),
        );
        match self {
            Derivation::Hypothesis(_) => TraceNode {
                judgment,
                rule: "hypothesis".into(),
                premises: Vec::new(),
            },
            Derivation::Nullary(rule) => TraceNode {
                judgment,
                rule: format!("rule `{rule}`"),
                premises: Vec::new(),
            },
            Derivation::Apply { rule, premises } => {
                let subs = rule
                    .premises
                    .iter()
                    .zip(premises)
                    .map(|(spec, sub)| {
                        let mut extended = assumptions.clone();
                        extended.extend(spec.hypotheses.iter().cloned());
                        sub.to_trace(&extended)
                    })
                    .collect();
                TraceNode {
                    judgment,
                    rule: format!("rule `{rule}`"),
                    premises: subs,
                }
            }
        }
    }
}

/// Replays `d` and renders it as pretty JSON. Errors out rather than
/// printing a trace that does not check.
pub fn derivation_trace(
    d: &Derivation,
    base: &Base,
    assumptions: &BTreeSet<Atom>,
) -> Result<String, ReplayError> {
    d.replay(base, assumptions, d.conclusion())?;
    Ok(d.to_trace(assumptions).to_json())
}

/// Judgment-tabling engine for one base, reusable across queries.
///
/// Judgments `(assumption set, atom)` are demanded on request; rule
/// firings then propagate to a least fixpoint over the demanded space.
/// Judgments proved true stay cached between queries on the same base.
pub struct DerivEngine {
    rules: Vec<(Vec<(usize, u32)>, u32)>,
    by_conclusion: FxHashMap<u32, Vec<usize>>,
    rule_hyp_sets: Vec<Vec<Vec<u32>>>,
    source: Vec<AtomicRule>,
    atom_ids: FxHashMap<Atom, u32>,
    atom_names: Vec<Atom>,
    sets: Vec<Vec<u32>>,
    set_ids: FxHashMap<Vec<u32>, usize>,
    unions: FxHashMap<(usize, (usize, usize)), usize>,
    demanded: FxHashMap<(usize, u32), usize>,
    truth: Vec<bool>,
    just: Vec<Option<Just>>,
    instances: Vec<Instance>,
    watchers: FxHashMap<(usize, u32), Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
enum Just {
    Hypothesis,
    Fired(usize),
}

struct Instance {
    rule: usize,
    set: usize,
    remaining: usize,
}

impl DerivEngine {
    pub fn new(base: &Base) -> DerivEngine {
        let mut engine = DerivEngine {
            rules: Vec::new(),
            by_conclusion: FxHashMap::default(),
            rule_hyp_sets: Vec::new(),
            source: Vec::new(),
            atom_ids: FxHashMap::default(),
            atom_names: Vec::new(),
            sets: Vec::new(),
            set_ids: FxHashMap::default(),
            unions: FxHashMap::default(),
            demanded: FxHashMap::default(),
            truth: Vec::new(),
            just: Vec::new(),
            instances: Vec::new(),
            watchers: FxHashMap::default(),
        };
        for rule in &base.rules {
            let conclusion = engine.atom_id(&rule.conclusion);
            let mut premises = Vec::new();
            let mut hyp_sets = Vec::new();
            for premise in &rule.premises {
                let head = engine.atom_id(&premise.head);
                let hyps: Vec<u32> =
                    premise.hypotheses.iter().map(|a| engine.atom_id(a)).collect();
                premises.push((hyp_sets.len(), head));
                hyp_sets.push(hyps);
            }
            let index = engine.rules.len();
            engine.rules.push((premises, conclusion));
            engine.rule_hyp_sets.push(hyp_sets);
            engine.source.push(rule.clone());
            engine.by_conclusion.entry(conclusion).or_default().push(index);
        }
        engine
    }

    fn atom_id(&mut self, atom: &Atom) -> u32 {
        if let Some(&id) = self.atom_ids.get(atom) {
            return id;
        }
        let id = self.atom_names.len() as u32;
        self.atom_names.push(atom.clone());
        self.atom_ids.insert(atom.clone(), id);
        id
    }

    fn set_id(&mut self, sorted: Vec<u32>) -> usize {
        if let Some(&id) = self.set_ids.get(&sorted) {
            return id;
        }
        let id = self.sets.len();
        self.set_ids.insert(sorted.clone(), id);
        self.sets.push(sorted);
        id
    }

    fn union_set(&mut self, set: usize, rule: usize, hyp_slot: usize) -> usize {
        if self.rule_hyp_sets[rule][hyp_slot].is_empty() {
            return set;
        }
        if let Some(&id) = self.unions.get(&(set, (rule, hyp_slot))) {
            return id;
        }
        let mut merged: Vec<u32> = self.sets[set].clone();
        merged.extend(self.rule_hyp_sets[rule][hyp_slot].iter().copied());
        merged.sort_unstable();
        merged.dedup();
        let id = self.set_id(merged);
        self.unions.insert((set, (rule, hyp_slot)), id);
        id
    }

    /// Ensures the judgment and everything it can depend on is tabled.
    /// Returns its slot. Newly fireable facts propagate immediately.
    fn demand(&mut self, set: usize, atom: u32) -> usize {
        if let Some(&slot) = self.demanded.get(&(set, atom)) {
            return slot;
        }
        let mut queue = vec![(set, atom)];
        let mut newly_true = Vec::new();
        while let Some((s, p)) = queue.pop() {
            match self.demanded.entry((s, p)) {
                Entry::Occupied(_) => continue,
                Entry::Vacant(v) => v.insert(self.truth.len()),
            };
            let is_hyp = self.sets[s].binary_search(&p).is_ok();
            self.truth.push(is_hyp);
            self.just.push(is_hyp.then_some(Just::Hypothesis));
            if is_hyp {
                newly_true.push((s, p));
            }
            for rule_idx in self.by_conclusion.get(&p).cloned().unwrap_or_default() {
                let premise_specs = self.rules[rule_idx].0.clone();
                let mut remaining = 0;
                let mut watch = Vec::new();
                for (hyp_slot, head) in &premise_specs {
                    let target = self.union_set(s, rule_idx, *hyp_slot);
                    queue.push((target, *head));
                    watch.push((target, *head));
                }
                let instance_idx = self.instances.len();
                for key in &watch {
                    if !self.judgment_true(*key) {
                        remaining += 1;
                        self.watchers.entry(*key).or_default().push(instance_idx);
                    }
                }
                self.instances.push(Instance { rule: rule_idx, set: s, remaining });
                if remaining == 0 {
                    self.fire(instance_idx, &mut newly_true);
                }
            }
        }
        for key in newly_true {
            self.propagate(key);
        }
        self.demanded[&(set, atom)]
    }

    fn judgment_true(&self, key: (usize, u32)) -> bool {
        match self.demanded.get(&key) {
            Some(&slot) => self.truth[slot],
            None => self.sets[key.0].binary_search(&key.1).is_ok(),
        }
    }

    fn fire(&mut self, instance_idx: usize, newly_true: &mut Vec<(usize, u32)>) {
        let Instance { rule, set, .. } = self.instances[instance_idx];
        let conclusion = self.rules[rule].1;
        let key = (set, conclusion);
        if let Some(&slot) = self.demanded.get(&key) {
            if !self.truth[slot] {
                self.truth[slot] = true;
                self.just[slot] = Some(Just::Fired(instance_idx));
                newly_true.push(key);
            }
        }
    }

    fn propagate(&mut self, start: (usize, u32)) {
        let mut queue = vec![start];
        while let Some(key) = queue.pop() {
            let Some(watching) = self.watchers.remove(&key) else { continue };
            for instance_idx in watching {
                self.instances[instance_idx].remaining -= 1;
                if self.instances[instance_idx].remaining == 0 {
                    let mut newly = Vec::new();
                    self.fire(instance_idx, &mut newly);
                    queue.extend(newly);
                }
            }
        }
    }

    /// Decides `assumptions |- goal` in this engine's base.
    pub fn derivable(&mut self, assumptions: &BTreeSet<Atom>, goal: &Atom) -> bool {
        let goal_id = self.atom_id(goal);
        let mut set: Vec<u32> = assumptions.iter().map(|a| self.atom_id(a)).collect();
        set.sort_unstable();
        set.dedup();
        let set_id = self.set_id(set);
        let slot = self.demand(set_id, goal_id);
        self.truth[slot]
    }

    /// Like [`DerivEngine::derivable`], returning a replayable witness.
    pub fn derivation(
        &mut self,
        assumptions: &BTreeSet<Atom>,
        goal: &Atom,
    ) -> Option<Derivation> {
        if !self.derivable(assumptions, goal) {
            return None;
        }
        let goal_id = self.atom_id(goal);
        let mut set: Vec<u32> = assumptions.iter().map(|a| self.atom_id(a)).collect();
        set.sort_unstable();
        set.dedup();
        let set_id = self.set_id(set);
        Some(self.extract(set_id, goal_id))
    }

    fn extract(&self, set: usize, atom: u32) -> Derivation {
        let slot = self.demanded[&(set, atom)];
        match self.just[slot].expect("extracting a judgment that never fired") {
            Just::Hypothesis => Derivation::Hypothesis(self.atom_names[atom as usize].clone()),
            Just::Fired(instance_idx) => {
                let instance = &self.instances[instance_idx];
                let rule = &self.rules[instance.rule];
                if rule.0.is_empty() {
                    return Derivation::Nullary(self.source[instance.rule].clone());
                }
                let premises = rule
                    .0
                    .iter()
                    .map(|(hyp_slot, head)| {
                        let target = if self.rule_hyp_sets[instance.rule][*hyp_slot].is_empty() {
                            instance.set
                        } else {
                            self.unions[&(instance.set, (instance.rule, *hyp_slot))]
                        };
                        self.extract(target, *head)
                    })
                    .collect();
                Derivation::Apply { rule: self.source[instance.rule].clone(), premises }
            }
        }
    }
}

/// Decides whether `goal` is derivable in `base` from `assumptions`,
/// returning a replayable witness when it is.
pub fn derives(
    base: &Base,
    assumptions: &BTreeSet<Atom>,
    goal: &Atom,
) -> (bool, Option<Derivation>) {
    let mut engine = DerivEngine::new(base);
    match engine.derivation(assumptions, goal) {
        Some(d) => (true, Some(d)),
        None => (false, None),
    }
}
