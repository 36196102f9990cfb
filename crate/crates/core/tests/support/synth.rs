//! Seeded generator of small, compilable-looking Java classes and of
//! scripted "refactorings" applied to them.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NOUNS: &[&str] = &[
    "count", "total", "index", "limit", "value", "result", "buffer", "offset", "weight", "score", "width", "height",
    "amount", "level", "step", "cursor", "length", "depth", "sum", "best",
];
const TYPES: &[&str] = &["Ledger", "Counter", "Grid", "Matrix", "Window", "Tracker", "Queue", "Parser"];
const VERBS: &[&str] = &["compute", "update", "scan", "reduce", "collect", "measure", "shift", "merge"];
const REMARKS: &[&str] = &[
    "keep the running state small",
    "guard against empty input",
    "walk the array once",
    "the caller owns the buffer",
    "values are never negative here",
    "bail out early when done",
    "cheap check before the loop",
];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().unwrap()
}

fn cap(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

/// Distinct nouns for one method so no two locals share a name.
fn nouns(rng: &mut ChaCha8Rng, n: usize) -> Vec<&'static str> {
    let mut all: Vec<&str> = NOUNS.to_vec();
    let mut out = Vec::new();
    for _ in 0..n {
        let k = rng.random_range(0..all.len());
        out.push(all.swap_remove(k));
    }
    out
}

fn comment(rng: &mut ChaCha8Rng, indent: &str, out: &mut Vec<String>) {
    match rng.random_range(0..4) {
        0 => out.push(format!("{indent}// {}", pick(rng, REMARKS))),
        1 => {
            out.push(format!("{indent}/*"));
            out.push(format!("{indent} * {}", pick(rng, REMARKS)));
            out.push(format!("{indent} */"));
        }
        2 => out.push(format!("{indent}/* {} */", pick(rng, REMARKS))),
        _ => {}
    }
}

fn inline(rng: &mut ChaCha8Rng, line: String) -> String {
    if rng.random_bool(0.25) {
        format!("{line} // {}", pick(rng, REMARKS))
    } else {
        line
    }
}

fn method(rng: &mut ChaCha8Rng, field: &str, taken: &mut Vec<String>) -> Vec<String> {
    let mut name;
    loop {
        name = format!("{}{}", pick(rng, VERBS), cap(pick(rng, NOUNS)));
        if !taken.contains(&name) {
            break;
        }
    }
    taken.push(name.clone());
    let v = nouns(rng, 4);
    let mut out = Vec::new();
    if rng.random_bool(0.6) {
        out.push("    /**".into());
        out.push(format!("     * {}.", cap(pick(rng, REMARKS))));
        out.push(format!("     * @param {} the input", v[0]));
        out.push("     */".into());
    }
    let lit = rng.random_range(1..9);
    match rng.random_range(0..4) {
        0 => {
            out.push(format!("    public int {name}(int[] {}) {{", v[0]));
            out.push(format!("        int {} = 0;", v[1]));
            comment(rng, "        ", &mut out);
            out.push(format!("        for (int {} = 0; {} < {}.length; {}++) {{", v[2], v[2], v[0], v[2]));
            out.push(inline(rng, format!("            {} += {}[{}] * {lit};", v[1], v[0], v[2])));
            out.push("        }".into());
            out.push(format!("        return {};", v[1]));
            out.push("    }".into());
        }
        1 => {
            out.push(format!("    public boolean {name}(int {}, int {}) {{", v[0], v[1]));
            out.push(inline(rng, format!("        if ({} > {} + {lit}) {{", v[0], v[1])));
            out.push(format!("            {field} = {} - {};", v[0], v[1]));
            out.push("            return true;".into());
            out.push("        }".into());
            comment(rng, "        ", &mut out);
            out.push(format!("        {field} = {};", v[1]));
            out.push("        return false;".into());
            out.push("    }".into());
        }
        2 => {
            out.push(format!("    private static long {name}(long {}) {{", v[0]));
            out.push(format!("        long {} = 1;", v[1]));
            out.push(format!("        while ({} > {lit}) {{", v[0]));
            out.push(inline(rng, format!("            {} = {} * {};", v[1], v[1], v[0])));
            out.push(format!("            {}--;", v[0]));
            out.push("        }".into());
            comment(rng, "        ", &mut out);
            out.push(format!("        return {};", v[1]));
            out.push("    }".into());
        }
        _ => {
            out.push(format!("    public String {name}(String {}) {{", v[0]));
            out.push(format!("        StringBuilder {} = new StringBuilder();", v[1]));
            out.push(inline(rng, format!("        {}.append({}).append({field});", v[1], v[0])));
            comment(rng, "        ", &mut out);
            out.push(format!("        return {}.toString();", v[1]));
            out.push("    }".into());
        }
    }
    out
}

/// One synthetic class. Every snippet has a class comment, one field, a
/// constructor and two to four methods.
pub fn snippet(seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = format!("{}{}", pick(&mut rng, TYPES), seed);
    let field = pick(&mut rng, NOUNS);
    let mut lines: Vec<String> = vec!["package synth;".into(), String::new()];
    lines.push("/**".into());
    lines.push(format!(" * {}.", cap(pick(&mut rng, REMARKS))));
    lines.push(" */".into());
    lines.push(format!("public class {class} {{"));
    lines.push(String::new());
    comment(&mut rng, "    ", &mut lines);
    lines.push(format!("    private int {field};"));
    lines.push(String::new());
    lines.push(format!("    public {class}(int start) {{"));
    lines.push(inline(&mut rng, format!("        this.{field} = start;")));
    lines.push("    }".into());
    let mut taken = Vec::new();
    for _ in 0..rng.random_range(2..=4) {
        lines.push(String::new());
        lines.extend(method(&mut rng, field, &mut taken));
    }
    lines.push("}".into());
    let mut src = lines.join("\n");
    src.push('\n');
    (class, src)
}

pub fn corpus(n: usize, seed: u64) -> Vec<(String, String)> {
    (0..n as u64).map(|i| snippet(seed.wrapping_mul(1_000).wrapping_add(i))).collect()
}

/// A deterministic stand-in for one refactoring response: a handful of
/// line edits of the kinds a model tends to make, chosen from `seed`.
pub fn scripted_refactor(src: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines: Vec<String> = src.lines().map(String::from).collect();
    if lines.is_empty() {
        return String::new();
    }
    for _ in 0..rng.random_range(1..=3) {
        let i = rng.random_range(0..lines.len());
        match rng.random_range(0..6) {
            0 => {
                // Rename one local-looking word everywhere.
                let words: Vec<&str> = NOUNS.iter().copied().filter(|w| lines[i].contains(*w)).collect();
                if let Some(&w) = words.first() {
                    let to = format!("{w}Value");
                    for l in &mut lines {
                        *l = replace_word(l, w, &to);
                    }
                }
            }
            1 => {
                let indent: String = lines[i].chars().take_while(|c| c.is_whitespace()).collect();
                lines.insert(i, format!("{indent}// {}", pick(&mut rng, REMARKS)));
            }
            2 => {
                if lines[i].trim().is_empty() || lines[i].trim_start().starts_with("//") {
                    lines.remove(i);
                }
            }
            3 => {
                if let Some(pos) = lines[i].find(|c: char| c.is_ascii_digit()) {
                    let d = lines[i].as_bytes()[pos] - b'0';
                    let nd = (d + 1) % 10;
                    lines[i].replace_range(pos..pos + 1, &nd.to_string());
                }
            }
            4 => {
                lines[i] = lines[i].replace(" = ", "=").replace("=", " = ").replace("  =  ", " = ");
            }
            _ => {
                if let Some(p) = lines[i].find(" // ") {
                    lines[i].truncate(p);
                }
            }
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn replace_word(line: &str, from: &str, to: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < line.len() {
        let boundary_before = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
        if boundary_before && line[i..].starts_with(from) {
            let end = i + from.len();
            let boundary_after = end == line.len() || !(bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_');
            if boundary_after {
                out.push_str(to);
                i = end;
                continue;
            }
        }
        let ch = line[i..].chars().next().unwrap();
        out.push(ch);
        i += ch.len_utf8();
    }
    out
}
