use std::fmt;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Failure = 1,
    Input = 2,
    Resource = 3,
    Infeasible = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: Code::Input,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: Code::Failure,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<cutdens::Error> for CliError {
    fn from(e: cutdens::Error) -> Self {
        use cutdens::Error as E;
        let code = match e {
            E::Input(_) | E::Domain(_) | E::Constraint(_) => Code::Input,
            E::Resource { .. } => Code::Resource,
            E::Infeasible(_) => Code::Infeasible,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::failure(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Problems found before any computation runs. All of them are reported
/// together.
#[derive(Debug, Default)]
pub struct Diagnostics {
    input: Vec<String>,
    infeasible: Vec<String>,
}

impl Diagnostics {
    pub fn input(&mut self, msg: impl Into<String>) {
        self.input.push(msg.into());
    }

    pub fn infeasible(&mut self, msg: impl Into<String>) {
        self.infeasible.push(msg.into());
    }

    /// Record a library error under the matching category.
    pub fn record(&mut self, e: cutdens::Error) {
        match e {
            cutdens::Error::Infeasible(m) => self.infeasible(m),
            cutdens::Error::Input(m) => self.input(m),
            other => self.input(other.to_string()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty() && self.infeasible.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.input
            .iter()
            .map(|m| format!("invalid: {m}"))
            .chain(self.infeasible.iter().map(|m| format!("infeasible: {m}")))
            .collect()
    }

    pub fn finish(self) -> CliResult<()> {
        if self.is_empty() {
            return Ok(());
        }
        let code = if self.input.is_empty() { Code::Infeasible } else { Code::Input };
        Err(CliError {
            code,
            message: self.lines().join("\n"),
        })
    }
}
