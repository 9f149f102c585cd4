use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::protocol::decode_response;
use super::{Translate, TranslationRequest, TranslatorError};

/// A translator process speaking newline-delimited JSON on stdin/stdout.
pub struct Subprocess {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
    poisoned: Option<TranslatorError>,
}

impl Subprocess {
    pub fn spawn(
        command: &str,
        args: &[String],
        env: &[(String, String)],
        timeout: Duration,
    ) -> Result<Self, TranslatorError> {
        let mut child = Command::new(command)
            .args(args)
            .envs(env.iter().map(|(k, v)| (k, v)))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| TranslatorError::Start(format!("spawning {command}: {e}")))?;
        let stdout = child.stdout.take().expect("piped stdout");
        let stdin = child.stdin.take();
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let failed = line.is_err();
                if tx.send(line).is_err() || failed {
                    break;
                }
            }
        });
        Ok(Subprocess {
            child,
            stdin,
            lines: rx,
            timeout,
            poisoned: None,
        })
    }

    fn exchange(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| TranslatorError::ProcessExited("stdin closed".into()))?;
        let mut line = serde_json::to_string(request).expect("request serializes");
        line.push('\n');
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| TranslatorError::ProcessExited(format!("writing request: {e}")))?;
        loop {
            match self.lines.recv_timeout(self.timeout) {
                Ok(Ok(reply)) if reply.trim().is_empty() => continue,
                Ok(Ok(reply)) => return decode_response(&reply, request),
                Ok(Err(e)) => {
                    return Err(TranslatorError::ProtocolViolation(format!(
                        "reading response: {e}"
                    )))
                }
                Err(RecvTimeoutError::Timeout) => {
                    return Err(TranslatorError::Timeout(self.timeout))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let status = self.exit_status(Duration::from_secs(1));
                    let detail =
                        status.map_or_else(|| "closed stdout".to_string(), |s| s.to_string());
                    return Err(TranslatorError::ProcessExited(detail));
                }
            }
        }
    }

    /// Polls for the exit status for at most `grace`.
    fn exit_status(&mut self, grace: Duration) -> Option<std::process::ExitStatus> {
        let deadline = std::time::Instant::now() + grace;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return Some(status),
                Ok(None) if std::time::Instant::now() < deadline => {
                    thread::sleep(Duration::from_millis(10))
                }
                _ => return None,
            }
        }
    }
}

impl Translate for Subprocess {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        if let Some(e) = &self.poisoned {
            return Err(e.clone());
        }
        let result = self.exchange(request);
        if let Err(e) = &result {
            if e.is_fatal() {
                // the stream may be out of step with our requests now
                self.poisoned = Some(e.clone());
                self.stdin = None;
                let _ = self.child.kill();
            }
        }
        result
    }
}

impl Drop for Subprocess {
    fn drop(&mut self) {
        self.stdin = None;
        if matches!(self.child.try_wait(), Ok(None)) {
            thread::sleep(Duration::from_millis(20));
            if matches!(self.child.try_wait(), Ok(None)) {
                let _ = self.child.kill();
            }
        }
        let _ = self.child.wait();
    }
}
