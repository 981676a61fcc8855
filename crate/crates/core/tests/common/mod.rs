//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn load_json(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Checks that braces balance, ignoring escaped characters and comments.
pub fn braces_balanced(tex: &str) -> bool {
    let mut depth: i64 = 0;
    for line in tex.lines() {
        let mut chars = line.chars();
        while let Some(c) = chars.next() {
            match c {
                '\\' => {
                    chars.next();
                }
                '%' => break,
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    depth == 0
}

/// Checks that every `\begin{env}` is closed by a matching `\end{env}`.
pub fn environments_matched(tex: &str) -> bool {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = tex;
    while let Some(pos) = rest.find(['\\']) {
        rest = &rest[pos + 1..];
        let (is_begin, tail) = if let Some(t) = rest.strip_prefix("begin{") {
            (true, t)
        } else if let Some(t) = rest.strip_prefix("end{") {
            (false, t)
        } else {
            // skip the escaped character
            let skip = rest.chars().next().map_or(0, char::len_utf8);
            rest = &rest[skip..];
            continue;
        };
        let Some(close) = tail.find('}') else {
            return false;
        };
        let name = tail[..close].to_string();
        if is_begin {
            stack.push(name);
        } else if stack.pop().as_deref() != Some(name.as_str()) {
            return false;
        }
        rest = &tail[close + 1..];
    }
    stack.is_empty()
}

/// First TeX engine found on PATH, if any.
pub fn tex_engine() -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    for dir in std::env::split_paths(&path) {
        for name in ["pdflatex", "lualatex", "xelatex"] {
            let p = dir.join(name);
            if p.is_file() {
                return Some(p);
            }
        }
    }
    None
}

/// Wraps a fragment in a minimal document and compiles it.
pub fn compile_fragment(
    engine: &Path,
    fragment: &Path,
    partial_table_cols: Option<&str>,
) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let body = match partial_table_cols {
        Some(cols) => format!(
            "\\begin{{tabular}}{{{cols}}}\n\\input{{{}}}\n\\end{{tabular}}",
            fragment.display()
        ),
        None => format!("\\input{{{}}}", fragment.display()),
    };
    let doc = format!(
        "\\documentclass{{article}}\n\\usepackage{{tikz}}\n\\usepackage[margin=1cm,paperwidth=60cm,paperheight=60cm]{{geometry}}\n\\begin{{document}}\n{body}\n\\end{{document}}\n"
    );
    let main = dir.path().join("wrap.tex");
    std::fs::write(&main, doc).map_err(|e| e.to_string())?;
    let out = std::process::Command::new(engine)
        .args(["-interaction=nonstopmode", "-halt-on-error", "wrap.tex"])
        .current_dir(dir.path())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stdout)
            .lines()
            .rev()
            .take(15)
            .collect::<Vec<_>>()
            .join("\n"))
    }
}

/// Number of acceptance criteria that failed so far.
pub static FAILED: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);

/// Prints one result line for an acceptance criterion and counts it in
/// [`FAILED`] when the body reports failure.
pub fn criterion(n: u32, name: &str, body: impl FnOnce() -> Result<String, String>) {
    let start = std::time::Instant::now();
    let outcome =
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(body)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("criterion {n:>2} [{name}]: PASS ({secs:.2} s) {detail}"),
        Err(why) => {
            println!("criterion {n:>2} [{name}]: FAIL ({secs:.2} s) {why}");
            FAILED.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        }
    }
}

/// `Err` with a message unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
