use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use mdlvol_core::experiments::{write_csv, write_svg, LineChart};
use mdlvol_core::Error;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-", env!("MDLVOL_GIT_DESCRIBE"));

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag values or config contents (exit 2).
    Usage(String),
    /// Filesystem problems (exit 3).
    Io(PathBuf, std::io::Error),
    /// Errors from the numerical core (exit 4 for numeric failures).
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(..) => 3,
            Failure::Core(Error::Io { .. }) => 3,
            Failure::Core(e) if e.is_numeric() => 4,
            Failure::Core(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

pub type RunResult<T> = Result<T, Failure>;

/// Reads a JSON config, or the type's defaults without a file.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> RunResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_echo: serde_json::Value,
    pub seed: u64,
    pub tool_version: String,
    pub wall_time_ms: u128,
}

/// Output directory plus progress reporting.
pub struct Sink {
    dir: PathBuf,
    quiet: bool,
}

impl Sink {
    pub fn create(dir: &Path, quiet: bool) -> RunResult<Self> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            quiet,
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    pub fn note(&self, msg: impl fmt::Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn wrote(&self, path: &Path) {
        self.note(format_args!("wrote {}", path.display()));
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> RunResult<()> {
        let path = self.dir.join(format!("{name}.csv"));
        write_csv(&path, header, rows)?;
        self.wrote(&path);
        Ok(())
    }

    pub fn svg(&self, name: &str, chart: &LineChart) -> RunResult<()> {
        let path = self.dir.join(format!("{name}.svg"));
        write_svg(chart, &path)?;
        self.wrote(&path);
        Ok(())
    }

    pub fn manifest(&self, name: &str, manifest: &RunManifest) -> RunResult<()> {
        let path = self.dir.join(format!("{name}.manifest.json"));
        let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Failure::Io(path.clone(), e))?;
        self.wrote(&path);
        Ok(())
    }
}
