//! A single JSON shape for every proof object the crate produces.
//!
//! Rule derivations and sequent-calculus proofs both render to a tree of
//! nodes carrying the judgment they establish, the rule that closed it,
//! and the subproofs for the rule's premises. Each node states its full
//! judgment, so a consumer can replay a trace without reconstructing any
//! bookkeeping.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    /// Rendered judgment, e.g. `a, b |- r`.
    pub judgment: String,
    /// Name of the rule that concluded the judgment.
    pub rule: String,
    /// Subproofs, one per rule premise.
    pub premises: Vec<TraceNode>,
}

impl TraceNode {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }
}

impl fmt::Display for TraceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(node: &TraceNode, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(f, "{:indent$}{}   [{}]", "", node.judgment, node.rule, indent = depth * 2)?;
            for premise in &node.premises {
                go(premise, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// Renders `h1, h2 |- c` with hypotheses in the given order.
pub fn render_judgment<I: IntoIterator<Item = String>>(hypotheses: I, conclusion: &str) -> String {
    let hyps: Vec<String> = hypotheses.into_iter().collect();
    if hyps.is_empty() {
        format!("|- {conclusion}")
    } else {
        format!("{} |- {conclusion}", hyps.join(", "))
    }
}
