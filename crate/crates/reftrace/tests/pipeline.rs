mod support;

use std::collections::BTreeMap;
use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use proptest::prelude::*;
use reftrace::cli::{run_cli, EXIT_OK, EXIT_PROVIDER};
use reftrace::config::ProviderKind;
use reftrace::orchestrator::{build_request, run_pipeline, PipelineSettings};
use reftrace::provider::{
    content_digest, request_digest, ChatRequest, ChatResponse, Provider, ProviderError, ReplayProvider, RetryPolicy,
};
use reftrace::store::{InstanceKey, SnapshotStore};
use reftrace_core::diff::{compare_snippets, ChangeType, ComparisonKey};
use reftrace_core::prompts::PromptId;
use reftrace_core::variantgen::VariantId;
use support::replay;

const ADDER: &str = "public class Adder {\n    public int add(int a, int b) {\n        return a + b;\n    }\n}\n";

fn seed_store(store: &SnapshotStore, snippet: &str, src: &str) {
    for v in VariantId::ALL {
        for p in PromptId::ALL {
            store.write(&InstanceKey::new(snippet, v, p, 0), src).unwrap();
        }
    }
}

fn settings(iterations: u32, jobs: usize) -> PipelineSettings {
    PipelineSettings {
        iterations,
        prompts: PromptId::ALL.to_vec(),
        model: replay::MODEL.into(),
        temperature: 0.0,
        retry: RetryPolicy { attempts: 3, base_delay: Duration::ZERO },
        jobs,
    }
}

fn echo_script(src: &str) -> BTreeMap<String, String> {
    PromptId::ALL.iter().map(|p| (content_digest(&format!("{}\n\n{src}", p.text())), src.to_string())).collect()
}

#[test]
fn echo_replay_keeps_every_version_identical() {
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path());
    seed_store(&store, "Adder", ADDER);
    let provider = ReplayProvider::new(echo_script(ADDER));
    let report = run_pipeline(&store, &provider, &settings(3, 4), &|_| {}).unwrap();
    assert_eq!(report.generated, 27);
    for k in 0..=3 {
        assert_eq!(store.read(&InstanceKey::new("Adder", VariantId::NoComment, PromptId::Comments, k)).unwrap(), ADDER);
    }
}

#[test]
fn one_snippet_one_iteration_makes_nine_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path());
    seed_store(&store, "Adder", ADDER);
    let provider = ReplayProvider::new(echo_script(ADDER));
    let report = run_pipeline(&store, &provider, &settings(1, 1), &|_| {}).unwrap();
    assert_eq!((report.requested, report.generated, report.failures.len()), (9, 9, 0));
}

#[test]
fn scripted_one_line_rename_is_one_rename() {
    let renamed = ADDER.replace("int add(", "int sum(");
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path());
    seed_store(&store, "Adder", ADDER);
    let script = PromptId::ALL
        .iter()
        .map(|p| (content_digest(&format!("{}\n\n{ADDER}", p.text())), format!("```java\n{renamed}```")))
        .collect();
    run_pipeline(&store, &ReplayProvider::new(script), &settings(1, 2), &|_| {}).unwrap();
    let v1 = store.read(&InstanceKey::new("Adder", VariantId::Original, PromptId::General, 1)).unwrap();
    let key = ComparisonKey {
        snippet: "Adder".into(),
        variant_a: VariantId::Original,
        variant_b: VariantId::Original,
        version_a: 0,
        version_b: 1,
        prompt: PromptId::General,
    };
    let r = compare_snippets(ADDER, &v1, key);
    assert_eq!(r.count(ChangeType::Rename), 1);
    assert_eq!(r.pair_count(), 1);
    assert_eq!(r.unchanged, 4);
}

#[test]
fn resume_requests_only_missing_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path().join("store"));
    let (name, src) = support::synth::snippet(3);
    seed_store(&store, &name, &src);
    let script = replay::build_script(&store, &PromptId::ALL, 5);

    // First pass stops after two iterations, as if interrupted.
    let first = ReplayProvider::new(script.clone());
    run_pipeline(&store, &first, &settings(2, 3), &|_| {}).unwrap();
    assert_eq!(first.calls(), 18);

    // Lose a couple of snapshots inside the finished range too.
    fs::remove_file(store.path(&InstanceKey::new(&name, VariantId::Meaningless, PromptId::Meaning, 2))).unwrap();
    fs::remove_file(store.path(&InstanceKey::new(&name, VariantId::Original, PromptId::General, 2))).unwrap();

    let second = ReplayProvider::new(script);
    let report = run_pipeline(&store, &second, &settings(5, 3), &|_| {}).unwrap();
    let missing = 9 * 3 + 2;
    assert_eq!(second.calls(), missing);
    assert_eq!((report.requested, report.generated, report.skipped), (missing, missing, 9 * 5 - missing));
    assert!(report.failures.is_empty());
}

/// Fails with a transport error a fixed number of times, then echoes.
struct Flaky {
    failures_left: AtomicUsize,
}

impl Provider for Flaky {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Replay
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let left = self.failures_left.load(Ordering::SeqCst);
        if left > 0 {
            self.failures_left.store(left - 1, Ordering::SeqCst);
            return Err(ProviderError::Transport("connection reset".into()));
        }
        let source = request.user_content().split_once("\n\n").unwrap().1;
        Ok(ChatResponse { text: source.to_string(), ..Default::default() })
    }
}

#[test]
fn transport_errors_are_retried_with_backoff() {
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path());
    store.write(&InstanceKey::new("Adder", VariantId::Original, PromptId::General, 0), ADDER).unwrap();
    let mut s = settings(1, 1);
    s.prompts = vec![PromptId::General];
    s.retry.base_delay = Duration::from_millis(2);
    let slept = std::sync::Mutex::new(Vec::new());
    let provider = Flaky { failures_left: AtomicUsize::new(2) };
    let report = run_pipeline(&store, &provider, &s, &|d| slept.lock().unwrap().push(d)).unwrap();
    assert_eq!(report.generated, 1);
    assert_eq!(*slept.lock().unwrap(), [Duration::from_millis(2), Duration::from_millis(4)]);
    let meta = store.read_meta("Adder", VariantId::Original, PromptId::General).unwrap().unwrap();
    assert_eq!(meta.requests[0].attempts, 3);

    // Three straight failures exhaust the budget and truncate the trajectory.
    let store = SnapshotStore::new(dir.path().join("second"));
    store.write(&InstanceKey::new("Adder", VariantId::Original, PromptId::General, 0), ADDER).unwrap();
    let provider = Flaky { failures_left: AtomicUsize::new(3) };
    s.iterations = 3;
    let report = run_pipeline(&store, &provider, &s, &|_| {}).unwrap();
    assert_eq!(report.generated, 0);
    assert_eq!(store.versions("Adder", VariantId::Original, PromptId::General), [0]);
}

#[test]
fn cli_run_reports_provider_failures_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let store = SnapshotStore::new(d.join("store"));
    seed_store(&store, "Adder", ADDER);
    let full = replay::build_script(&store, &PromptId::ALL, 2);
    // Drop the answers for the second step: every trajectory stops at v1.
    let partial: BTreeMap<String, String> = full
        .iter()
        .filter(|(k, _)| PromptId::ALL.iter().any(|p| **k == content_digest(&format!("{}\n\n{ADDER}", p.text()))))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    replay::save_script(&d.join("partial.json"), &partial);
    replay::save_script(&d.join("full.json"), &full);

    let args = |script: &str| {
        vec![
            "reftrace".to_string(),
            "run".into(),
            format!("--store-dir={}", d.join("store").display()),
            "--provider=replay".into(),
            format!("--script={}", d.join(script).display()),
            "--iterations=2".into(),
            "--jobs=2".into(),
        ]
    };
    assert_eq!(run_cli(args("partial.json")), EXIT_PROVIDER);
    assert_eq!(store.versions("Adder", VariantId::Meaningless, PromptId::Meaning), [0, 1]);
    let meta = store.read_meta("Adder", VariantId::Meaningless, PromptId::Meaning).unwrap().unwrap();
    assert_eq!(meta.requests.iter().map(|r| r.status.as_str()).collect::<Vec<_>>(), ["ok", "failed"]);

    assert_eq!(run_cli(args("full.json")), EXIT_OK);
    assert_eq!(store.versions("Adder", VariantId::Meaningless, PromptId::Meaning), [0, 1, 2]);
    let meta = store.read_meta("Adder", VariantId::Meaningless, PromptId::Meaning).unwrap().unwrap();
    assert!(meta.requests.iter().all(|r| r.status == "ok"));
}

#[test]
fn sample_is_idempotent_and_variants_copy_comment_free_sources() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus");
    fs::create_dir_all(&corpus).unwrap();
    let src =
        fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/corpus/WordCounter.java")).unwrap();
    let plain = reftrace_core::variantgen::strip_comments(&src);
    fs::write(corpus.join("Plain.java"), &plain).unwrap();
    let run = |cmd: &str| {
        run_cli([
            "reftrace".to_string(),
            cmd.into(),
            format!("--corpus-dir={}", corpus.display()),
            format!("--output-dir={}", d.join("out").display()),
            format!("--store-dir={}", d.join("store").display()),
        ])
    };
    assert_eq!(run("sample"), EXIT_OK);
    let first = fs::read(d.join("out/corpus_manifest.csv")).unwrap();
    assert_eq!(run("sample"), EXIT_OK);
    assert_eq!(fs::read(d.join("out/corpus_manifest.csv")).unwrap(), first);

    assert_eq!(run("variants"), EXIT_OK);
    let store = SnapshotStore::new(d.join("store"));
    let read = |v| store.read(&InstanceKey::new("Plain", v, PromptId::General, 0)).unwrap();
    assert_eq!(read(VariantId::NoComment), read(VariantId::Original));
    assert_eq!(replay::tree(&d.join("store")).keys().filter(|k| k.ends_with("v0.java")).count(), 9);
}

proptest! {
    #[test]
    fn request_body_depends_only_on_prompt_and_source(src in "[ -~\n]{0,200}", p in 0usize..3) {
        let prompt = PromptId::ALL[p];
        let a = build_request(prompt, &src, "model", 0.0);
        let b = build_request(prompt, &src, "model", 0.0);
        prop_assert_eq!(a.body(), b.body());
        prop_assert_eq!(a.messages.len(), 1);
        prop_assert_eq!(a.user_content(), format!("{}\n\n{}", prompt.text(), src));
        prop_assert_eq!(request_digest(&a), content_digest(a.user_content()));
    }
}
