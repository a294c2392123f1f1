//! Text interchange formats.
//!
//! * Sparse matrix: header `rows cols`, then one `r c` pair per line, 0-indexed.
//! * Schedule: one line per gate level, whitespace-separated `check:qubit` pairs.
//! * Code bundle: a JSON manifest naming the matrix and schedule files, with
//!   paths relative to the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::code::{validate_css, CssCode};
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::schedule::{Schedule, Schedules};

fn parse_err(source_name: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn format_matrix(m: &BinaryMatrix) -> String {
    let mut s = String::with_capacity(12 * (m.nnz() + 1));
    writeln!(s, "{} {}", m.rows(), m.cols()).unwrap();
    for (r, c) in m.entries() {
        writeln!(s, "{r} {c}").unwrap();
    }
    s
}

/// Parses the sparse-matrix format. `source_name` is used in error messages.
pub fn parse_matrix(text: &str, source_name: &str) -> Result<BinaryMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(source_name, 1, "missing `rows cols` header"))?;
    let (rows, cols) = parse_pair(header).ok_or_else(|| parse_err(source_name, hl + 1, "expected `rows cols`"))?;
    let mut row_support = vec![Vec::new(); rows];
    for (i, line) in lines {
        let (r, c) = parse_pair(line).ok_or_else(|| parse_err(source_name, i + 1, format!("expected `r c`, got `{line}`")))?;
        if r >= rows || c >= cols {
            return Err(parse_err(
                source_name,
                i + 1,
                format!("coordinate ({r}, {c}) outside {rows}x{cols}"),
            ));
        }
        row_support[r].push((c, i + 1));
    }
    let mut supports = Vec::with_capacity(rows);
    for mut s in row_support {
        s.sort_unstable();
        if let Some(w) = s.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(parse_err(source_name, w[1].1, format!("duplicate coordinate in column {}", w[0].0)));
        }
        supports.push(s.into_iter().map(|(c, _)| c).collect());
    }
    BinaryMatrix::from_rows(cols, supports)
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn load_matrix(path: &Path) -> Result<BinaryMatrix> {
    parse_matrix(&read(path)?, &path.display().to_string())
}

pub fn save_matrix(path: &Path, m: &BinaryMatrix) -> Result<()> {
    write(path, &format_matrix(m))
}

pub fn format_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    for level in s.levels() {
        let line: Vec<String> = level.iter().map(|(c, q)| format!("{c}:{q}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_schedule(text: &str, source_name: &str) -> Result<Schedule> {
    let mut levels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut level = Vec::new();
        for tok in line.split_whitespace() {
            let pair = tok
                .split_once(':')
                .and_then(|(c, q)| Some((c.parse().ok()?, q.parse().ok()?)))
                .ok_or_else(|| parse_err(source_name, i + 1, format!("expected `check:qubit`, got `{tok}`")))?;
            level.push(pair);
        }
        levels.push(level);
    }
    Ok(Schedule::from_levels(levels))
}

pub fn load_schedule(path: &Path) -> Result<Schedule> {
    parse_schedule(&read(path)?, &path.display().to_string())
}

pub fn save_schedule(path: &Path, s: &Schedule) -> Result<()> {
    write(path, &format_schedule(s))
}

/// Schedule files for the two check types. `x` is absent for codes without
/// X checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub name: String,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub d: Option<usize>,
    pub h_x: String,
    pub h_z: String,
    pub schedules: BTreeMap<String, ScheduleFiles>,
}

/// A code with its named measurement schedules, loaded from disk.
#[derive(Clone, Debug)]
pub struct CodeBundle {
    pub manifest: BundleManifest,
    pub code: CssCode,
    pub root: PathBuf,
}

impl CodeBundle {
    /// Loads and validates a bundle from its manifest path (or the directory
    /// holding `manifest.json`).
    pub fn load(path: &Path) -> Result<Self> {
        let manifest_path = if path.is_dir() { path.join("manifest.json") } else { path.to_path_buf() };
        let root = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
        let text = read(&manifest_path)?;
        let manifest: BundleManifest = serde_json::from_str(&text).map_err(|e| {
            parse_err(&manifest_path.display().to_string(), e.line(), e.to_string())
        })?;
        let h_x = load_matrix(&root.join(&manifest.h_x))?;
        let h_z = load_matrix(&root.join(&manifest.h_z))?;
        let code = validate_css(h_x, h_z)?.with_distance(manifest.d);
        if code.n() != manifest.n || code.k() != manifest.k {
            return Err(Error::Config(format!(
                "bundle `{}` declares [[{}, {}]] but the matrices give [[{}, {}]]",
                manifest.name,
                manifest.n,
                manifest.k,
                code.n(),
                code.k()
            )));
        }
        Ok(Self { manifest, code, root })
    }

    pub fn schedule_names(&self) -> impl Iterator<Item = &str> {
        self.manifest.schedules.keys().map(String::as_str)
    }

    /// Files referenced by the bundle, manifest excluded, in a stable order.
    pub fn referenced_files(&self) -> Vec<PathBuf> {
        let mut files = vec![self.root.join(&self.manifest.h_x), self.root.join(&self.manifest.h_z)];
        for s in self.manifest.schedules.values() {
            files.extend(s.x.iter().chain(&s.z).map(|f| self.root.join(f)));
        }
        files
    }

    /// Loads and validates a named schedule pair.
    pub fn schedules(&self, name: &str) -> Result<Schedules> {
        let files = self.manifest.schedules.get(name).ok_or_else(|| {
            Error::Config(format!(
                "bundle `{}` has no schedule `{name}` (available: {})",
                self.manifest.name,
                self.schedule_names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        let load = |f: &Option<String>, h: &BinaryMatrix| -> Result<Option<Schedule>> {
            match f {
                None if h.is_zero() => Ok(None),
                None => Err(Error::Config(format!("schedule `{name}` misses a file for a nonempty check matrix"))),
                Some(f) => {
                    let s = load_schedule(&self.root.join(f))?;
                    s.validate(h)?;
                    Ok(Some(s))
                }
            }
        };
        Ok(Schedules {
            x: load(&files.x, self.code.h_x())?,
            z: load(&files.z, self.code.h_z())?,
        })
    }

    /// Writes a bundle directory: matrices, schedules and `manifest.json`.
    pub fn write(dir: &Path, name: &str, code: &CssCode, schedules: &[(&str, Schedules)]) -> Result<BundleManifest> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        save_matrix(&dir.join("hx.txt"), code.h_x())?;
        save_matrix(&dir.join("hz.txt"), code.h_z())?;
        let mut map = BTreeMap::new();
        for (sname, s) in schedules {
            let mut files = ScheduleFiles { x: None, z: None };
            if let Some(x) = &s.x {
                let f = format!("schedule_{sname}_x.txt");
                save_schedule(&dir.join(&f), x)?;
                files.x = Some(f);
            }
            if let Some(z) = &s.z {
                let f = format!("schedule_{sname}_z.txt");
                save_schedule(&dir.join(&f), z)?;
                files.z = Some(f);
            }
            map.insert(sname.to_string(), files);
        }
        let manifest = BundleManifest {
            name: name.to_string(),
            n: code.n(),
            k: code.k(),
            d: code.d(),
            h_x: "hx.txt".into(),
            h_z: "hz.txt".into(),
            schedules: map,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        write(&dir.join("manifest.json"), &(json + "\n"))?;
        Ok(manifest)
    }
}

/// Convenience: `CodeBundle::load(path)?.code`.
pub fn load_code(path: &Path) -> Result<CssCode> {
    Ok(CodeBundle::load(path)?.code)
}
