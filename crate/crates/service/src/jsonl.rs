use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::ServiceError;

pub(crate) fn append<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut line = serde_json::to_string(value).map_err(io::Error::other)?;
    line.push('\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(line.as_bytes())?;
    f.flush()
}

pub(crate) fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ServiceError> {
    let text = fs::read_to_string(path).map_err(|source| ServiceError::Io { path: path.to_path_buf(), source })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| ServiceError::Log { path: path.to_path_buf(), line: i + 1, reason: e.to_string() }))
        .collect()
}
