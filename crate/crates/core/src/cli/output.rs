use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::numerics::{read_dump, FeatureMap};

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails unless `path` could be created: its directory must exist.
pub fn check_output(path: Option<&Path>) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(Error::arg(format!("output directory {} does not exist", dir.display())));
    }
    if path.is_dir() {
        return Err(Error::arg(format!("output {} is a directory", path.display())));
    }
    Ok(())
}

pub fn check_input(path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if !p.is_file() => Err(Error::arg(format!("input {} is not a readable file", p.display()))),
        _ => Ok(()),
    }
}

pub fn read_map(path: &Path) -> Result<FeatureMap> {
    read_dump(io::BufReader::new(File::open(path)?))
}

/// Writes through a temporary file in the target directory, renamed into
/// place once `body` succeeds.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let tmp = tempfile::NamedTempFile::new_in(parent_dir(path))?;
    let mut w = BufWriter::new(tmp);
    body(&mut w)?;
    let tmp = w.into_inner().map_err(|e| e.into_error())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// To `path` atomically, or to stdout.
pub fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, body),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, |w| Ok(w.write_all(b"new")?)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn failed_body_keeps_the_old_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        std::fs::write(&path, "old").unwrap();
        assert!(write_atomic(&path, |_| Err(Error::arg("boom"))).is_err());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "old");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn path_checks() {
        let dir = tempfile::tempdir().unwrap();
        assert!(check_output(Some(&dir.path().join("x.csv"))).is_ok());
        assert!(check_output(Some(&dir.path().join("missing/x.csv"))).is_err());
        assert!(check_output(Some(dir.path())).is_err());
        assert!(check_output(None).is_ok());
        assert!(check_input(Some(&dir.path().join("nope.radt"))).is_err());
    }
}
