//! Running external tools with a timeout.

use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("failed to start `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("`{0}` timed out")]
    Timeout(String),
    #[error("i/o error talking to `{command}`: {source}")]
    Io {
        command: String,
        source: std::io::Error,
    },
}

/// Runs `command` through `sh -c`, returning its stdout. The child is
/// killed once `timeout` elapses.
pub fn run_shell(command: &str, timeout: Duration) -> Result<String, ProcessError> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| ProcessError::Spawn {
            command: command.to_string(),
            source,
        })?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut buf = String::new();
        stdout.read_to_string(&mut buf).map(|_| buf)
    });
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(ProcessError::Timeout(command.to_string()));
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(source) => {
                return Err(ProcessError::Io {
                    command: command.to_string(),
                    source,
                })
            }
        }
    }
    reader
        .join()
        .expect("reader thread panicked")
        .map_err(|source| ProcessError::Io {
            command: command.to_string(),
            source,
        })
}

/// Substitutes `{file}` in a command template with a shell-quoted path.
pub fn fill_template(template: &str, path: &std::path::Path) -> String {
    let quoted = format!("'{}'", path.display().to_string().replace('\'', r"'\''"));
    template.replace("{file}", &quoted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_stdout() {
        let out = run_shell("echo hello", Duration::from_secs(5)).unwrap();
        assert_eq!(out.trim(), "hello");
    }

    #[test]
    fn kills_on_timeout() {
        let err = run_shell("sleep 5", Duration::from_millis(50)).unwrap_err();
        assert!(matches!(err, ProcessError::Timeout(_)));
    }

    #[test]
    fn template_quotes_path() {
        let cmd = fill_template("cat {file}", std::path::Path::new("/tmp/it's"));
        assert_eq!(cmd, r"cat '/tmp/it'\''s'");
    }
}
