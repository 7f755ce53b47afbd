//! File-open audit hook.
//!
//! All readers in this crate open files through [`open`]. When recording is
//! enabled, every opened path is appended to a process-wide log so callers can
//! check that a code path never touched a given file (e.g. test-side labels
//! during zero-shot selection).

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};

static RECORDING: AtomicBool = AtomicBool::new(false);
static LOG: Mutex<Vec<PathBuf>> = Mutex::new(Vec::new());

pub fn start_recording() {
    LOG.lock().unwrap().clear();
    RECORDING.store(true, Ordering::SeqCst);
}

/// Stops recording and returns every path opened since [`start_recording`].
pub fn stop_recording() -> Vec<PathBuf> {
    RECORDING.store(false, Ordering::SeqCst);
    std::mem::take(&mut *LOG.lock().unwrap())
}

pub fn open(path: &Path) -> Result<File> {
    if RECORDING.load(Ordering::SeqCst) {
        LOG.lock().unwrap().push(path.to_path_buf());
    }
    File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    use std::io::Read;
    let mut buf = Vec::new();
    open(path)?.read_to_end(&mut buf).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(buf)
}

pub fn read_string(path: &Path) -> Result<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| Error::CorruptFile(format!("{} is not UTF-8", path.display())))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
