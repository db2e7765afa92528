//! Deterministic protocol server used by the test suites.
//!
//! Logits for a text are `[h, -h]` where `h` is derived from a hash of the
//! text. Flags alter behaviour to exercise failure paths:
//! `--classes N`, `--hang-on-predict`, `--garbage`, `--crash-after N`,
//! `--reject-hello`.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

fn score(text: &str) -> f64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h % 2001) as f64 / 1000.0 - 1.0
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let flag = |name: &str| args.iter().any(|a| a == name);
    let value = |name: &str| {
        args.iter()
            .position(|a| a == name)
            .and_then(|i| args.get(i + 1))
            .and_then(|v| v.parse::<usize>().ok())
    };
    let classes = value("--classes").unwrap_or(2);
    let crash_after = value("--crash-after");
    let mut predicts = 0usize;

    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let reply = match serde_json::from_str::<Value>(&line) {
            Err(e) => json!({"ok": false, "error": format!("bad json: {e}")}),
            Ok(req) => match req.get("op").and_then(Value::as_str) {
                Some("hello") if flag("--reject-hello") => {
                    json!({"ok": false, "error": "model failed to load"})
                }
                Some("hello") => json!({"ok": true, "num_classes": classes, "name": "stub"}),
                Some("shutdown") => std::process::exit(0),
                Some("predict") => {
                    predicts += 1;
                    if crash_after.is_some_and(|n| predicts > n) {
                        std::process::exit(3);
                    }
                    if flag("--hang-on-predict") {
                        std::thread::sleep(std::time::Duration::from_secs(3600));
                    }
                    if flag("--garbage") {
                        writeln!(out, "this is not json").ok();
                        out.flush().ok();
                        continue;
                    }
                    match req.get("texts").and_then(Value::as_array) {
                        Some(texts) => {
                            let rows: Vec<Vec<f64>> = texts
                                .iter()
                                .map(|t| {
                                    let h = score(t.as_str().unwrap_or(""));
                                    (0..classes).map(|c| if c == 0 { h } else { -h / c as f64 }).collect()
                                })
                                .collect();
                            json!({"ok": true, "logits": rows})
                        }
                        None => json!({"ok": false, "error": "texts must be an array"}),
                    }
                }
                _ => json!({"ok": false, "error": "unknown op"}),
            },
        };
        writeln!(out, "{reply}").ok();
        out.flush().ok();
    }
}
