//! Experiment drivers behind the `purikit` binary.
//!
//! Each command reads/writes files only through the functions here so that
//! integration tests can call them in-process; the binary is a thin argument
//! parser on top. All randomness flows from explicit seeds through ChaCha
//! streams and every reduction runs in fixed index order, so reruns with the
//! same flags are bit-identical regardless of the worker-thread count.

pub mod commands;
pub mod csvio;
pub mod manifest;

use std::fmt;

/// Error type carrying the intended process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag combinations and other usage errors (exit 2).
    Usage(String),
    /// Filesystem problems (exit 1).
    Io(String),
    /// Numerical failures inside the toolkit (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<purikit::Error> for CliError {
    fn from(e: purikit::Error) -> Self {
        match e {
            purikit::Error::Io(io) => CliError::Io(io.to_string()),
            purikit::Error::Format(m) => CliError::Io(m),
            purikit::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs `f` inside a rayon pool capped at `threads` workers when given
/// (flag first, then the PURIKIT_THREADS environment variable).
pub fn with_thread_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let from_env = std::env::var("PURIKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    match threads.or(from_env) {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}
