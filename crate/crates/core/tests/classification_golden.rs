use std::collections::BTreeMap;

use reftrace_core::code_model::LexState;
use reftrace_core::diff::{classify_lines, ChangeType};
use serde_json::Value;

struct Case {
    old: String,
    new: String,
    expected: String,
    old_state: Option<String>,
    new_state: Option<String>,
    diagnostic: bool,
}

fn case(v: &Value) -> Case {
    let text = |k: &str| v.get(k).and_then(Value::as_str).map(String::from);
    Case {
        old: text("old").expect("old"),
        new: text("new").expect("new"),
        expected: text("expected").expect("expected"),
        old_state: text("old_state"),
        new_state: text("new_state"),
        diagnostic: v.get("diagnostic").and_then(Value::as_bool).unwrap_or(false),
    }
}

fn state(s: &Option<String>) -> LexState {
    match s.as_deref() {
        None | Some("code") => LexState::Code,
        Some("block-comment") => LexState::BlockComment,
        Some("text-block") => LexState::TextBlock,
        Some(other) => panic!("unknown state {other}"),
    }
}

#[test]
fn hand_labeled_pairs_agree() {
    let raw: Vec<Value> = serde_json::from_str(include_str!("data/classification_golden.json")).unwrap();
    let cases: Vec<Case> = raw.iter().map(case).collect();
    assert!(cases.len() >= 30);

    let mut per_type: BTreeMap<ChangeType, usize> = BTreeMap::new();
    let mut disagreements = Vec::new();
    for c in &cases {
        let expected = ChangeType::parse(&c.expected).expect("known label");
        *per_type.entry(expected).or_default() += 1;
        let got = classify_lines(&c.old, &c.new, (state(&c.old_state), state(&c.new_state)));
        if got.change_type != expected || got.diagnostic != c.diagnostic {
            disagreements.push(format!("{:?} -> {:?}: expected {expected}, got {}", c.old, c.new, got.change_type));
        }
    }
    for t in ChangeType::ALL {
        assert!(per_type.get(&t).copied().unwrap_or(0) >= 2, "{t} has fewer than two cases");
    }
    assert!(disagreements.is_empty(), "{}", disagreements.join("\n"));
}
