use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use csv::{Writer, WriterBuilder};

/// Output directory handle; every CSV it writes starts with the config hash.
pub struct OutDir {
    pub dir: PathBuf,
    hash: String,
}

impl OutDir {
    pub fn create(dir: PathBuf, hash: String) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir { dir, hash })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> Result<Writer<File>> {
        csv_writer(&self.path(name), &self.hash, header)
    }

    pub fn json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        write_json(&path, value)?;
        Ok(path)
    }
}

pub fn csv_writer(path: &Path, hash: &str, header: &[&str]) -> Result<Writer<File>> {
    use std::io::Write;
    let mut file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(file, "# config sha256:{hash}")?;
    let mut w = WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header)?;
    Ok(w)
}

pub fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Shortest round-trip float text.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Empty when absent.
pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}
