//! Builds replay scripts by simulating the pipeline over a store that holds
//! only v0 files, answering each new request with a scripted refactoring.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use reftrace::orchestrator::{build_request, extract_code};
use reftrace::provider::request_digest;
use reftrace::store::{InstanceKey, SnapshotStore};
use reftrace_core::prompts::PromptId;
use reftrace_core::variantgen::VariantId;

use super::synth::scripted_refactor;

pub const MODEL: &str = "replay";

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Three response shapes a chat model produces.
fn wrap(code: &str, seed: u64) -> String {
    match seed % 3 {
        0 => format!("Here is the refactored code:\n\n```java\n{code}```\n\nNames and comments were tidied."),
        1 => format!("```\n{code}```\n"),
        _ => format!("\n{code}\n"),
    }
}

/// A scripted refactoring that actually changes something; later seeds are
/// tried when an edit turns out to be a no-op.
fn changed_refactor(src: &str, seed: u64) -> String {
    (0..32).map(|i| scripted_refactor(src, seed.wrapping_add(i))).find(|s| s != src).unwrap_or_else(|| src.to_string())
}

/// Walk every trajectory to `iterations`. The Original/Meaning trajectory
/// reverts to its previous version at step 3, so it oscillates from then on.
pub fn build_script(store: &SnapshotStore, prompts: &[PromptId], iterations: u32) -> BTreeMap<String, String> {
    let mut script = BTreeMap::new();
    for snippet in store.snippets().unwrap() {
        for variant in VariantId::ALL {
            for &prompt in prompts {
                let mut history = vec![store.read(&InstanceKey::new(&snippet, variant, prompt, 0)).unwrap()];
                for k in 0..iterations {
                    let cur = history.last().unwrap().clone();
                    let digest = request_digest(&build_request(prompt, &cur, MODEL, 0.0));
                    let seed = fnv(&format!("{snippet}/{variant}/{prompt}/{k}"));
                    let response = script
                        .entry(digest)
                        .or_insert_with(|| {
                            let next = if k == 2 && variant == VariantId::Original && prompt == PromptId::Meaning {
                                history[k as usize - 1].clone()
                            } else {
                                changed_refactor(&cur, seed)
                            };
                            wrap(&next, seed)
                        })
                        .clone();
                    let mut next = extract_code(&response).unwrap();
                    next.push('\n');
                    history.push(next);
                }
            }
        }
    }
    script
}

pub fn save_script(path: &Path, script: &BTreeMap<String, String>) {
    let mut json = serde_json::to_string_pretty(script).unwrap();
    json.push('\n');
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, json).unwrap();
}

/// Every file under `root`, keyed by `/`-separated relative path.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(root).unwrap();
            let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            (rel, fs::read(e.path()).unwrap())
        })
        .collect()
}
