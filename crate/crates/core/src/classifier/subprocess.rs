//! Classifier backed by an external process speaking line-delimited JSON.
//!
//! ```text
//! -> {"op":"hello"}                      <- {"ok":true,"num_classes":C,"name":"..."}
//! -> {"op":"predict","texts":["..",".."]} <- {"ok":true,"logits":[[..],[..]]}
//! -> {"op":"shutdown"}                   <- process exits 0
//! ```
//! Failures are reported as `{"ok":false,"error":"..."}`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Backend, Classifier};
use crate::error::{Error, Result};
use crate::Logits;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Request<'a> {
    Hello,
    Predict { texts: &'a [String] },
    Shutdown,
}

#[derive(Debug, Deserialize)]
struct Reply {
    ok: bool,
    #[serde(default)]
    error: Option<String>,
    #[serde(default)]
    num_classes: Option<usize>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    logits: Option<Vec<Vec<Value>>>,
}

struct Pipe {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    dead: Option<String>,
}

pub struct SubprocessClassifier {
    pipe: Mutex<Pipe>,
    command: Vec<String>,
    num_classes: usize,
    name: String,
    timeout: Duration,
}

impl std::fmt::Debug for SubprocessClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubprocessClassifier")
            .field("command", &self.command)
            .field("name", &self.name)
            .finish()
    }
}

impl SubprocessClassifier {
    /// Starts `command` and completes the hello handshake.
    pub fn spawn(command: &[String], timeout: Duration) -> Result<Self> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| Error::Config("empty subprocess command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::BackendUnavailable {
                completed: 0,
                requested: 0,
                reason: format!("failed to start {program:?}: {e}"),
            })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut pipe = Pipe {
            child,
            stdin,
            lines: rx,
            dead: None,
        };
        let reply = exchange(&mut pipe, &Request::Hello, timeout, 0)?;
        if !reply.ok {
            return Err(Error::Protocol(format!(
                "hello rejected: {}",
                reply.error.unwrap_or_else(|| "no reason given".into())
            )));
        }
        let num_classes = reply
            .num_classes
            .ok_or_else(|| Error::Protocol("hello reply lacks num_classes".into()))?;
        if num_classes < 2 {
            return Err(Error::Protocol(format!("backend reports {num_classes} classes")));
        }
        Ok(SubprocessClassifier {
            pipe: Mutex::new(pipe),
            command: command.to_vec(),
            num_classes,
            name: reply.name.unwrap_or_default(),
            timeout,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

fn exchange(pipe: &mut Pipe, req: &Request<'_>, timeout: Duration, requested: usize) -> Result<Reply> {
    let unavailable = |reason: String| Error::BackendUnavailable {
        completed: 0,
        requested,
        reason,
    };
    if let Some(reason) = &pipe.dead {
        return Err(unavailable(reason.clone()));
    }
    let mut line = serde_json::to_string(req)?;
    line.push('\n');
    let stdin = pipe.stdin.as_mut().ok_or_else(|| unavailable("stdin closed".into()))?;
    if let Err(e) = stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()) {
        pipe.dead = Some(format!("write failed: {e}"));
        return Err(unavailable(format!("write failed: {e}")));
    }
    let raw = match pipe.lines.recv_timeout(timeout) {
        Ok(Ok(l)) => l,
        Ok(Err(e)) => {
            pipe.dead = Some(format!("read failed: {e}"));
            return Err(unavailable(format!("read failed: {e}")));
        }
        Err(RecvTimeoutError::Timeout) => {
            let _ = pipe.child.kill();
            let reason = format!("no reply within {:.1}s", timeout.as_secs_f64());
            pipe.dead = Some(reason.clone());
            return Err(unavailable(reason));
        }
        Err(RecvTimeoutError::Disconnected) => {
            pipe.dead = Some("backend exited".into());
            return Err(unavailable("backend exited".into()));
        }
    };
    serde_json::from_str(&raw).map_err(|e| Error::Protocol(format!("unparseable reply {raw:?}: {e}")))
}

impl Classifier for SubprocessClassifier {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn fingerprint(&self) -> String {
        format!("subprocess:{}:{}", self.name, self.command.join(" "))
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<Logits>> {
        let mut pipe = self.pipe.lock().expect("pipe lock");
        let reply = exchange(&mut pipe, &Request::Predict { texts }, self.timeout, texts.len())?;
        if !reply.ok {
            return Err(Error::Protocol(format!(
                "backend error: {}",
                reply.error.unwrap_or_else(|| "no reason given".into())
            )));
        }
        let rows = reply
            .logits
            .ok_or_else(|| Error::Protocol("predict reply lacks logits".into()))?;
        if rows.len() != texts.len() {
            return Err(Error::Protocol(format!("{} rows for {} texts", rows.len(), texts.len())));
        }
        rows.into_iter()
            .map(|row| {
                if row.len() != self.num_classes {
                    return Err(Error::Shape {
                        expected: self.num_classes,
                        found: row.len(),
                    });
                }
                let vals = row
                    .iter()
                    .map(|v| v.as_f64().ok_or_else(|| Error::Protocol(format!("non-numeric logit {v}"))))
                    .collect::<Result<Vec<f64>>>()?;
                Logits::new(vals).map_err(|e| Error::Protocol(e.to_string()))
            })
            .collect()
    }

    fn backend(&self) -> Backend {
        Backend::Subprocess
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("name".to_string(), self.name.clone()),
            ("command".to_string(), self.command.join(" ")),
        ])
    }
}

impl Drop for SubprocessClassifier {
    fn drop(&mut self) {
        let Ok(pipe) = self.pipe.get_mut() else { return };
        if pipe.dead.is_none() {
            if let Some(stdin) = pipe.stdin.as_mut() {
                let _ = stdin.write_all(b"{\"op\":\"shutdown\"}\n");
                let _ = stdin.flush();
            }
        }
        pipe.stdin = None;
        for _ in 0..50 {
            if let Ok(Some(_)) = pipe.child.try_wait() {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = pipe.child.kill();
        let _ = pipe.child.wait();
    }
}
