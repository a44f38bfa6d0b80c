use std::path::PathBuf;

use crate::frontend::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: not a regular file", .0.display())]
    NotAFile(PathBuf),
    #[error("{}: not valid UTF-8", .0.display())]
    Utf8(PathBuf),
    #[error("{}: expected a .py file", .0.display())]
    NotPython(PathBuf),
    #[error("{} is not under {}", file.display(), root.display())]
    OutsideRoot { file: PathBuf, root: PathBuf },
    #[error("rewriting did not converge after {0} passes")]
    IterationLimit(usize),
    #[error("transform `{name}` failed: {message}")]
    Hook { name: String, message: String },
    #[error("{0}")]
    Invalid(String),
}
