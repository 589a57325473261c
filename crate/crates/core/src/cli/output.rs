use std::fs;
use std::path::{Path, PathBuf};

use super::CliError;

/// Named file contents, produced in full before anything touches disk.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Write every file under a temporary name, then rename them into
    /// place. On failure the temporaries are removed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |context: String| move |source| CliError::Io { context, source };
        fs::create_dir_all(dir).map_err(io(format!("creating {}", dir.display())))?;
        let mut staged = Vec::new();
        let result = (|| {
            for (name, bytes) in &self.files {
                let tmp = dir.join(format!(".{name}.partial"));
                staged.push(tmp.clone());
                fs::write(&tmp, bytes).map_err(io(format!("writing {}", tmp.display())))?;
            }
            Ok::<(), CliError>(())
        })();
        if let Err(e) = result {
            for tmp in &staged {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        let mut out = Vec::new();
        for ((name, _), tmp) in self.files.iter().zip(&staged) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest).map_err(io(format!("renaming to {}", dest.display())))?;
            out.push(dest);
        }
        Ok(out)
    }
}
