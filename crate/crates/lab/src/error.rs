use std::fmt;

/// A failed command: a short machine-readable code and a one-line message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new("usage", message)
    }

    /// The `E:<code>:<message>` line, with newlines folded so it stays one line.
    pub fn line(&self) -> String {
        let msg: String = self
            .message
            .chars()
            .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        format!("E:{}:{}", self.code, msg.trim())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<csflab_core::Error> for CliError {
    fn from(e: csflab_core::Error) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
