use reftrace_core::code_model::extract_declarations;
use reftrace_core::corpus::{check_sampling_criteria, compute_absolute_metrics, AbsoluteMetrics};
use reftrace_core::variantgen::{make_meaningless, strip_comments};

const PINNED: &str = include_str!("data/MaximumSumOfNonAdjacentElements.java");

#[test]
fn version_zero_counts() {
    let m = compute_absolute_metrics(PINNED);
    assert_eq!(
        m,
        AbsoluteMetrics {
            total_lines: 95,
            code_lines: 41,
            comment_lines: 35,
            inline_comments: 3,
            empty_lines: 19,
            methods: 2,
        }
    );
    assert!(check_sampling_criteria(&m).accepted);
}

#[test]
fn declarations() {
    let idx = extract_declarations(PINNED).unwrap();
    let methods: Vec<&str> = idx.methods.iter().map(|m| m.name.as_str()).collect();
    assert_eq!(methods, ["getMaxSumApproach1", "getMaxSumApproach2"]);
    assert_eq!(idx.constructors.len(), 1);
    assert_eq!(idx.classes.len(), 1);
}

#[test]
fn variants_keep_structure() {
    let (meaningless, _) = make_meaningless(PINNED).unwrap();
    let m = compute_absolute_metrics(&meaningless);
    assert_eq!((m.total_lines, m.methods, m.comment_lines, m.code_lines), (95, 2, 35, 41));
    let n = compute_absolute_metrics(&strip_comments(PINNED));
    assert_eq!((n.comment_lines, n.inline_comments, n.code_lines, n.methods), (0, 0, 41, 2));
}
