//! On-disk pipeline state. Each stage records the hash of its inputs and
//! of its own output files in `manifest.txt`; loading a stage whose inputs
//! changed, or whose files were edited, is refused.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bimodule::{Catalog, FusionBimodule};
use crate::fusionring::builtin::builtin_ring;
use crate::fusionring::FusionRing;
use crate::groupoid::DerivationStep;
use crate::io::{self, IoError};
use crate::multcompat::{bimodule_table, module_table, MapOptions, ProductTable};
use crate::nimrep::{FusionModule, Side};
use crate::subfactors::SubfactorRecord;

pub const ROOT_ENV: &str = "FUSIONBP_WORKSPACE";
pub const TOOL: &str = concat!("fusionbp ", env!("CARGO_PKG_VERSION"));
pub const AH_RINGS: [&str; 3] = ["AH1", "AH2", "AH3"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Rings,
    Catalog,
    Tables,
    Facts,
    Records,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Rings, Stage::Catalog, Stage::Tables, Stage::Facts, Stage::Records];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Rings => "rings",
            Stage::Catalog => "catalog",
            Stage::Tables => "tables",
            Stage::Facts => "facts",
            Stage::Records => "records",
        }
    }

    fn upstream(self) -> Option<Stage> {
        match self {
            Stage::Rings => None,
            Stage::Catalog => Some(Stage::Rings),
            Stage::Tables => Some(Stage::Catalog),
            Stage::Facts => Some(Stage::Tables),
            Stage::Records => Some(Stage::Facts),
        }
    }

    /// Directories (relative to the root) owned by the stage.
    fn dirs(self) -> &'static [&'static str] {
        match self {
            Stage::Rings => &["rings"],
            Stage::Catalog => &["modules", "bimodules"],
            Stage::Tables => &["compat"],
            Stage::Facts => &["facts"],
            Stage::Records => &["subfactors"],
        }
    }
}

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{0}: {1}")]
    Fs(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, IoError),
    #[error("stage `{0}` has not been run")]
    Missing(&'static str),
    #[error("stage `{0}` is stale: {1}")]
    Stale(&'static str, String),
    #[error("malformed manifest line {0}: {1}")]
    Manifest(usize, String),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, WorkspaceError>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageRecord {
    pub inputs: String,
    pub output: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub tool: String,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Manifest {
    fn render(&self) -> String {
        let mut s = format!("tool {}\n", self.tool);
        for st in Stage::ALL {
            if let Some(r) = self.stages.get(st.name()) {
                s.push_str(&format!("stage {} {} {}\n", st.name(), r.inputs, r.output));
            }
        }
        s
    }

    fn parse(text: &str) -> Result<Self> {
        let mut tool = None;
        let mut stages = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if let Some(t) = line.strip_prefix("tool ") {
                tool = Some(t.to_string());
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            match parts.as_slice() {
                ["stage", name, inputs, output] => {
                    stages.insert(
                        name.to_string(),
                        StageRecord {
                            inputs: inputs.to_string(),
                            output: output.to_string(),
                        },
                    );
                }
                _ => return Err(WorkspaceError::Manifest(i + 1, line.to_string())),
            }
        }
        Ok(Manifest {
            tool: tool.ok_or_else(|| WorkspaceError::Manifest(1, "missing tool line".into()))?,
            stages,
        })
    }
}

pub struct Workspace {
    root: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| WorkspaceError::Fs(path.to_path_buf(), e))
}

/// Writes through a temporary file and a rename, so a killed run never
/// leaves a truncated file behind.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| WorkspaceError::Fs(dir.to_path_buf(), e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| WorkspaceError::Fs(tmp.clone(), e))?;
    fs::rename(&tmp, path).map_err(|e| WorkspaceError::Fs(path.to_path_buf(), e))
}

fn parse_err(path: &Path) -> impl FnOnce(IoError) -> WorkspaceError + '_ {
    move |e| WorkspaceError::Parse(path.to_path_buf(), e)
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    /// `explicit`, else `$FUSIONBP_WORKSPACE`, else `./workspace`.
    pub fn locate(explicit: Option<PathBuf>) -> Self {
        let root = explicit
            .or_else(|| std::env::var_os(ROOT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("workspace"));
        Workspace::new(root)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn manifest(&self) -> Result<Manifest> {
        let p = self.path("manifest.txt");
        if !p.exists() {
            return Ok(Manifest {
                tool: TOOL.to_string(),
                stages: BTreeMap::new(),
            });
        }
        Manifest::parse(&read(&p)?)
    }

    fn files(&self, stage: Stage) -> Result<Vec<(String, PathBuf)>> {
        let mut out = Vec::new();
        for d in stage.dirs() {
            let dir = self.path(d);
            if !dir.exists() {
                continue;
            }
            let rd = fs::read_dir(&dir).map_err(|e| WorkspaceError::Fs(dir.clone(), e))?;
            for entry in rd {
                let entry = entry.map_err(|e| WorkspaceError::Fs(dir.clone(), e))?;
                let name = entry.file_name().to_string_lossy().to_string();
                if name.ends_with(".tmp") {
                    continue;
                }
                out.push((format!("{d}/{name}"), entry.path()));
            }
        }
        out.sort();
        Ok(out)
    }

    /// SHA-256 over the stage's files, in path order.
    pub fn stage_hash(&self, stage: Stage) -> Result<String> {
        let mut h = Sha256::new();
        for (rel, p) in self.files(stage)? {
            let bytes = fs::read(&p).map_err(|e| WorkspaceError::Fs(p.clone(), e))?;
            h.update(rel.as_bytes());
            h.update([0]);
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        Ok(hex::encode(h.finalize()))
    }

    fn inputs_hash(&self, stage: Stage) -> Result<String> {
        match stage.upstream() {
            None => Ok(hex::encode(Sha256::digest(TOOL.as_bytes()))),
            Some(up) => self.stage_hash(up),
        }
    }

    /// Checks a stage and everything upstream of it.
    pub fn check(&self, stage: Stage) -> Result<()> {
        if let Some(up) = stage.upstream() {
            self.check(up)?;
        }
        let m = self.manifest()?;
        let rec = m.stages.get(stage.name()).ok_or(WorkspaceError::Missing(stage.name()))?;
        if rec.inputs != self.inputs_hash(stage)? {
            return Err(WorkspaceError::Stale(stage.name(), "inputs changed since it was built".into()));
        }
        if rec.output != self.stage_hash(stage)? {
            return Err(WorkspaceError::Stale(stage.name(), "its files were modified".into()));
        }
        Ok(())
    }

    pub fn is_current(&self, stage: Stage) -> bool {
        self.check(stage).is_ok()
    }

    fn record(&self, stage: Stage) -> Result<()> {
        let mut m = self.manifest()?;
        m.tool = TOOL.to_string();
        let rec = StageRecord {
            inputs: self.inputs_hash(stage)?,
            output: self.stage_hash(stage)?,
        };
        m.stages.insert(stage.name().to_string(), rec);
        write_atomic(&self.path("manifest.txt"), &m.render())
    }

    fn clear(&self, stage: Stage) -> Result<()> {
        for d in stage.dirs() {
            let dir = self.path(d);
            if dir.exists() {
                fs::remove_dir_all(&dir).map_err(|e| WorkspaceError::Fs(dir.clone(), e))?;
            }
        }
        Ok(())
    }

    /// Writes ring files for the named built-in rings.
    pub fn init_rings(&self, names: &[&str]) -> Result<()> {
        self.clear(Stage::Rings)?;
        for n in names {
            let r = builtin_ring(n).map_err(|e| WorkspaceError::Invalid(e.to_string()))?;
            write_atomic(&self.path(&format!("rings/{n}.ring")), &io::render_ring(&r))?;
        }
        self.record(Stage::Rings)
    }

    /// Rings in file-name order.
    pub fn rings(&self) -> Result<Vec<Arc<FusionRing>>> {
        self.check(Stage::Rings)?;
        let mut out = Vec::new();
        for (_, p) in self.files(Stage::Rings)? {
            let r = io::parse_ring(&read(&p)?).map_err(parse_err(&p))?;
            out.push(Arc::new(r));
        }
        Ok(out)
    }

    pub fn build_catalog(&self) -> Result<Catalog> {
        let rings = self.rings()?;
        let cat = Catalog::build(&rings);
        self.clear(Stage::Catalog)?;
        for r in &rings {
            for side in [Side::Left, Side::Right] {
                let text = io::render_modules(cat.modules(r.name(), side));
                write_atomic(&self.path(&format!("modules/{}-{side}.txt", r.name())), &text)?;
            }
        }
        for a in &rings {
            for b in &rings {
                let text = io::render_bimodules(cat.bimodules(a.name(), b.name()));
                write_atomic(&self.path(&format!("bimodules/{}-{}.txt", a.name(), b.name())), &text)?;
            }
        }
        self.record(Stage::Catalog)?;
        Ok(cat)
    }

    pub fn catalog(&self) -> Result<Catalog> {
        self.check(Stage::Catalog)?;
        let rings = self.rings()?;
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        let mut bims: BTreeMap<(String, String), Vec<FusionBimodule>> = BTreeMap::new();
        for r in &rings {
            for side in [Side::Left, Side::Right] {
                let p = self.path(&format!("modules/{}-{side}.txt", r.name()));
                let ms: Vec<FusionModule> = io::parse_modules(&read(&p)?, &rings).map_err(parse_err(&p))?;
                if ms.iter().any(|m| m.side() != side || m.ring().name() != r.name()) {
                    return Err(WorkspaceError::Invalid(format!("{} lists foreign modules", p.display())));
                }
                match side {
                    Side::Left => left.insert(r.name().to_string(), ms),
                    Side::Right => right.insert(r.name().to_string(), ms),
                };
            }
        }
        for a in &rings {
            for b in &rings {
                let p = self.path(&format!("bimodules/{}-{}.txt", a.name(), b.name()));
                let bs = io::parse_bimodules(&read(&p)?, &rings).map_err(parse_err(&p))?;
                bims.insert((a.name().to_string(), b.name().to_string()), bs);
            }
        }
        Ok(Catalog::from_parts(rings, left, right, bims))
    }

    fn checkpoint_header(&self) -> Result<String> {
        Ok(format!("# inputs {}\n", self.stage_hash(Stage::Catalog)?))
    }

    /// Product tables, one checkpoint file per ring triple and per module
    /// pair. Files from an interrupted run with matching inputs are reused.
    /// With `budget`, at most that many new files are computed before
    /// returning `Ok(None)`.
    pub fn build_tables(&self, budget: Option<usize>) -> Result<Option<ProductTable>> {
        let cat = self.catalog()?;
        let head = self.checkpoint_header()?;
        let names: Vec<String> = cat.rings().iter().map(|r| r.name().to_string()).collect();
        let mut jobs: Vec<(String, Vec<String>)> = Vec::new();
        for a in &names {
            for b in &names {
                for c in &names {
                    jobs.push((format!("compat/bim-{a}-{b}-{c}.txt"), vec![a.clone(), b.clone(), c.clone()]));
                }
            }
        }
        for a in &names {
            for b in &names {
                jobs.push((format!("compat/mod-{a}-{b}.txt"), vec![a.clone(), b.clone()]));
            }
        }
        let dir = self.path("compat");
        if dir.exists() {
            let keep: Vec<String> = jobs.iter().map(|j| j.0.clone()).collect();
            for (rel, p) in self.files(Stage::Tables)? {
                if !keep.contains(&rel) {
                    fs::remove_file(&p).map_err(|e| WorkspaceError::Fs(p.clone(), e))?;
                }
            }
        }
        let mut fresh = 0;
        let mut tables = ProductTable::default();
        for (rel, key) in jobs {
            let p = self.path(&rel);
            let reusable = p.exists() && read(&p)?.starts_with(&head);
            let table = if reusable {
                self.parse_table(&cat, &p, &key)?
            } else {
                if budget.is_some_and(|b| fresh >= b) {
                    return Ok(None);
                }
                fresh += 1;
                let (t, text) = if let [a, b, c] = key.as_slice() {
                    let t = bimodule_table(&cat, a, b, c);
                    let text = io::render_compat_triple(a, b, c, &t);
                    (t, text)
                } else {
                    let t = module_table(&cat, &key[0], &key[1], MapOptions::MODULE);
                    let text = io::render_compat_modules(&key[0], &key[1], &t);
                    (t, text)
                };
                write_atomic(&p, &format!("{head}{text}"))?;
                t
            };
            insert_table(&mut tables, &key, table);
        }
        if !tables.is_duality_consistent(&cat) {
            return Err(WorkspaceError::Invalid("product table is not closed under duality".into()));
        }
        self.record(Stage::Tables)?;
        Ok(Some(tables))
    }

    fn parse_table(&self, cat: &Catalog, p: &Path, key: &[String]) -> Result<Vec<Vec<Vec<usize>>>> {
        let text = read(p)?;
        let (prefixes, nk, nl) = match key {
            [a, b, c] => (
                [format!("{a}-{b}"), format!("{b}-{c}"), format!("{a}-{c}")],
                cat.bimodules(a, b).len(),
                cat.bimodules(b, c).len(),
            ),
            [a, b] => (
                [format!("{a}-right"), format!("{a}-{b}"), format!("{b}-right")],
                cat.modules(a, Side::Right).len(),
                cat.bimodules(a, b).len(),
            ),
            _ => unreachable!(),
        };
        let pre = [prefixes[0].as_str(), prefixes[1].as_str(), prefixes[2].as_str()];
        io::parse_compat(&text, pre, nk, nl).map_err(parse_err(p))
    }

    pub fn tables(&self, cat: &Catalog) -> Result<ProductTable> {
        self.check(Stage::Tables)?;
        let mut tables = ProductTable::default();
        for (rel, p) in self.files(Stage::Tables)? {
            let stem = rel.trim_start_matches("compat/").trim_end_matches(".txt");
            let parts: Vec<String> = stem.split('-').map(|s| s.to_string()).collect();
            let key = match parts.first().map(|s| s.as_str()) {
                Some("bim") | Some("mod") => parts[1..].to_vec(),
                _ => return Err(WorkspaceError::Invalid(format!("unexpected table file {rel}"))),
            };
            let t = self.parse_table(cat, &p, &key)?;
            insert_table(&mut tables, &key, t);
        }
        Ok(tables)
    }

    pub fn write_facts(&self, log: &[DerivationStep]) -> Result<()> {
        self.check(Stage::Tables)?;
        self.clear(Stage::Facts)?;
        write_atomic(&self.path("facts/facts.txt"), &io::render_facts(log))?;
        self.record(Stage::Facts)
    }

    pub fn facts(&self) -> Result<Vec<DerivationStep>> {
        self.check(Stage::Facts)?;
        let p = self.path("facts/facts.txt");
        io::parse_facts(&read(&p)?).map_err(parse_err(&p))
    }

    pub fn write_records(&self, records: &[SubfactorRecord], summary: &str) -> Result<()> {
        self.check(Stage::Facts)?;
        self.clear(Stage::Records)?;
        write_atomic(&self.path("subfactors/records.txt"), &io::render_records(records))?;
        write_atomic(&self.path("subfactors/summary.txt"), summary)?;
        self.record(Stage::Records)
    }

    pub fn records_text(&self) -> Result<String> {
        self.check(Stage::Records)?;
        read(&self.path("subfactors/records.txt"))
    }
}

fn insert_table(tables: &mut ProductTable, key: &[String], t: Vec<Vec<Vec<usize>>>) {
    match key {
        [a, b, c] => {
            tables.bimodule.insert((a.clone(), b.clone(), c.clone()), t);
        }
        [a, b] => {
            tables.module.insert((a.clone(), b.clone()), t);
        }
        _ => unreachable!(),
    }
}
