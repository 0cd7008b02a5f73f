//! Breadth-first exploration of a switching class.
//!
//! Starting from a seed, every graph of the current frontier is expanded by
//! all valid switches; the switched graphs are canonicalised, and those not
//! yet in the total store form the next frontier. Levels are written to a
//! checkpoint directory as they complete:
//!
//! ```text
//! metadata.json      seed, switch, config hash, per-level counters and hashes
//! stats.csv          depth,new,total
//! level-<j>.g6       sorted canonical graph6 lines of the graphs first seen at depth j
//! level-<j>.prov     for each line of level-<j>.g6: "<parent line> <partition>"
//! ```
//!
//! `metadata.json` is written last and atomically, so a level exists exactly
//! when the metadata lists it.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalKey};
use crate::graph::Graph;
use crate::graph6::parse_graph6;
use crate::srg::{verify_srg, NotSrg, SrgParams};
use crate::switching::{check_applicable, partitions_with_lead, Partition, SwitchError, SwitchKind};

pub const DEFAULT_MAX_TOTAL: u64 = 10_000_000;
const FORMAT_VERSION: u32 = 1;
const METADATA: &str = "metadata.json";
const STATS: &str = "stats.csv";

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("seed is not a strongly regular graph: {0}")]
    NotSrg(#[from] NotSrg),
    #[error(transparent)]
    Switch(#[from] SwitchError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("integrity check failed for {path}: {reason}")]
    Integrity { path: PathBuf, reason: String },
    #[error("{path}: malformed metadata: {reason}")]
    Metadata { path: PathBuf, reason: String },
    #[error("configuration mismatch: checkpoint uses {stored}, requested {requested}")]
    ConfigMismatch { stored: String, requested: String },
    #[error("{0} already holds an exploration; resume it or choose another directory")]
    AlreadyExists(PathBuf),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("switched graph fails the seed parameters: {0}")]
    Internal(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExploreError + '_ {
    move |source| ExploreError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug)]
pub struct ExplorationConfig {
    pub switch: SwitchKind,
    /// `None` explores until closure.
    pub max_depth: Option<usize>,
    pub max_total: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    /// Width of the in-memory key digests. Only lowered in tests, to force
    /// digest collisions.
    #[doc(hidden)]
    pub digest_bits: u32,
}

impl ExplorationConfig {
    pub fn new(switch: SwitchKind, out_dir: impl Into<PathBuf>) -> Self {
        ExplorationConfig {
            switch,
            max_depth: None,
            max_total: DEFAULT_MAX_TOTAL,
            workers: 1,
            out_dir: out_dir.into(),
            digest_bits: 64,
        }
    }

    pub fn depth(mut self, d: usize) -> Self {
        self.max_depth = Some(d);
        self
    }

    pub fn workers(mut self, w: usize) -> Self {
        self.workers = w;
        self
    }

    pub fn max_total(mut self, m: u64) -> Self {
        self.max_total = m;
        self
    }

    fn validate(&self) -> Result<(), ExploreError> {
        if self.max_total < 1 {
            return Err(ExploreError::Config("max total must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(ExploreError::Config("worker count must be at least 1".into()));
        }
        if !(1..=64).contains(&self.digest_bits) {
            return Err(ExploreError::Config("digest width must be 1..=64 bits".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// The last level produced no new graphs: the class is complete.
    Closed,
    /// The depth bound was reached with a nonempty frontier.
    DepthReached,
    /// A level would have exceeded the graph limit and was not stored.
    Truncated,
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunStatus::Closed => "closed",
            RunStatus::DepthReached => "depth-reached",
            RunStatus::Truncated => "truncated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub depth: usize,
    pub new: u64,
    pub total: u64,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub format: u32,
    pub seed_key: String,
    pub params: SrgParams,
    pub switch: SwitchKind,
    pub config_hash: String,
    pub max_depth: Option<usize>,
    pub max_total: u64,
    pub status: RunStatus,
    pub levels: Vec<LevelRecord>,
    /// Switched graphs canonicalised so far, summed over levels.
    pub switched_graphs: u64,
    /// Valid partitions found, before reduction by automorphisms.
    pub partitions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorationState {
    pub dir: PathBuf,
    pub metadata: Metadata,
}

impl ExplorationState {
    pub fn totals(&self) -> Vec<u64> {
        self.metadata.levels.iter().map(|l| l.total).collect()
    }

    pub fn news(&self) -> Vec<u64> {
        self.metadata.levels.iter().map(|l| l.new).collect()
    }

    pub fn status(&self) -> RunStatus {
        self.metadata.status
    }

    pub fn total(&self) -> u64 {
        self.metadata.levels.last().map_or(0, |l| l.total)
    }

    pub fn level_path(&self, depth: usize) -> PathBuf {
        self.dir.join(level_name(depth))
    }
}

pub fn level_name(depth: usize) -> String {
    format!("level-{depth}.g6")
}

fn prov_name(depth: usize) -> String {
    format!("level-{depth}.prov")
}

/// Identifies a run by switch and seed so that a checkpoint is never resumed
/// under a different configuration.
pub fn config_hash(switch: SwitchKind, seed_key: &str) -> String {
    let h = Sha256::digest(format!("switch={switch}\nseed={seed_key}\n").as_bytes());
    hex(&h[..8])
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExploreError> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

// ---------------------------------------------------------------------------
// The store of all keys seen so far.

#[derive(Clone, Copy)]
struct Location {
    level: u32,
    line: u32,
}

/// Keys live on disk in the level files; memory holds a digest per key and
/// each level's line offsets. Full keys are read back only when digests
/// collide.
struct KeyIndex {
    dir: PathBuf,
    mask: u64,
    digests: HashMap<u64, Vec<Location>>,
    offsets: Vec<Vec<u64>>,
}

impl KeyIndex {
    fn new(dir: &Path, bits: u32) -> Self {
        let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
        KeyIndex { dir: dir.to_path_buf(), mask, digests: HashMap::new(), offsets: Vec::new() }
    }

    fn digest(&self, key: &[u8]) -> u64 {
        let h = Sha256::digest(key);
        u64::from_le_bytes(h[..8].try_into().unwrap()) & self.mask
    }

    fn read_line(&self, loc: Location) -> Result<Vec<u8>, ExploreError> {
        let path = self.dir.join(level_name(loc.level as usize));
        let mut f = File::open(&path).map_err(io_err(&path))?;
        let offsets = &self.offsets[loc.level as usize];
        let start = offsets[loc.line as usize];
        f.seek(SeekFrom::Start(start)).map_err(io_err(&path))?;
        let mut line = Vec::new();
        BufReader::new(f).read_until(b'\n', &mut line).map_err(io_err(&path))?;
        if line.last() == Some(&b'\n') {
            line.pop();
        }
        Ok(line)
    }

    fn contains(&self, key: &[u8]) -> Result<bool, ExploreError> {
        let Some(locs) = self.digests.get(&self.digest(key)) else { return Ok(false) };
        for &loc in locs {
            if self.read_line(loc)? == key {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Registers the keys of a level file that has just been written.
    fn add_level(&mut self, level: usize, keys: &[CanonicalKey]) {
        assert_eq!(self.offsets.len(), level);
        let mut offs = Vec::with_capacity(keys.len());
        let mut pos = 0u64;
        for (line, k) in keys.iter().enumerate() {
            offs.push(pos);
            pos += k.as_bytes().len() as u64 + 1;
            let d = self.digest(k.as_bytes());
            self.digests.entry(d).or_default().push(Location { level: level as u32, line: line as u32 });
        }
        self.offsets.push(offs);
    }
}

// ---------------------------------------------------------------------------
// Expansion of one graph.

/// The switched graphs of one parent: `(key, partition index, partition)`,
/// one entry per distinct key, keeping the earliest partition.
struct Expansion {
    children: Vec<(CanonicalKey, usize, Partition)>,
    partitions: u64,
    switched: u64,
}

fn expand(g: &Graph, kind: SwitchKind, params: SrgParams) -> Result<Expansion, ExploreError> {
    let per_lead: Vec<Vec<Partition>> =
        (0..g.n()).into_par_iter().map(|lead| partitions_with_lead(g, kind, lead)).collect::<Result<_, _>>()?;
    let parts: Vec<Partition> = per_lead.into_iter().flatten().collect();
    let reps = orbit_representatives(g, &parts);

    let switched: Vec<(CanonicalKey, usize)> = reps
        .par_iter()
        .map(|&i| -> Result<_, ExploreError> {
            let h = parts[i].apply(g)?;
            match verify_srg(&h) {
                Ok(p) if p == params => {}
                other => return Err(ExploreError::Internal(format!("{} gave {other:?}", parts[i]))),
            }
            Ok((canonical_form(&h).key, i))
        })
        .collect::<Result<_, _>>()?;

    let mut first: HashMap<CanonicalKey, usize> = HashMap::new();
    for (k, i) in &switched {
        first.entry(k.clone()).and_modify(|j| *j = (*j).min(*i)).or_insert(*i);
    }
    let mut children: Vec<(CanonicalKey, usize, Partition)> =
        first.into_iter().map(|(k, i)| (k, i, parts[i].clone())).collect();
    children.sort_by_key(|c| c.1);
    Ok(Expansion { children, partitions: parts.len() as u64, switched: reps.len() as u64 })
}

/// Indices of the first partition in each orbit of `Aut(g)` on `parts`.
/// Partitions in one orbit give isomorphic switched graphs.
fn orbit_representatives(g: &Graph, parts: &[Partition]) -> Vec<usize> {
    let gens = canonical_form(g).aut.generators;
    if gens.is_empty() || parts.len() < 2 {
        return (0..parts.len()).collect();
    }
    let index: HashMap<(Vec<usize>, Vec<usize>), usize> = parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (a, b) = p.blocks();
            ((a.to_vec(), b.to_vec()), i)
        })
        .collect();
    let mut uf: Vec<usize> = (0..parts.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for gen in &gens {
        for (i, p) in parts.iter().enumerate() {
            let image = p.blocks_under(gen);
            let j = *index.get(&image).expect("automorphisms map partitions to partitions");
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri != rj {
                uf[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    (0..parts.len()).filter(|&i| find(&mut uf, i) == i).collect()
}

// ---------------------------------------------------------------------------
// Driver.

struct Run {
    dir: PathBuf,
    cfg: ExplorationConfig,
    meta: Metadata,
    index: KeyIndex,
    frontier: Vec<CanonicalKey>,
}

/// Explores the switching class of `seed` into `cfg.out_dir`.
pub fn explore(seed: &Graph, cfg: &ExplorationConfig) -> Result<ExplorationState, ExploreError> {
    cfg.validate()?;
    let params = verify_srg(seed)?;
    check_applicable(seed, cfg.switch)?;
    let dir = cfg.out_dir.clone();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    if dir.join(METADATA).exists() {
        return Err(ExploreError::AlreadyExists(dir));
    }
    let seed_key = canonical_form(seed).key;
    let seed_text = seed_key.to_string();
    let meta = Metadata {
        format: FORMAT_VERSION,
        seed_key: seed_text.clone(),
        params,
        switch: cfg.switch,
        config_hash: config_hash(cfg.switch, &seed_text),
        max_depth: cfg.max_depth,
        max_total: cfg.max_total,
        status: RunStatus::DepthReached,
        levels: Vec::new(),
        switched_graphs: 0,
        partitions: 0,
    };
    let mut run = Run { index: KeyIndex::new(&dir, cfg.digest_bits), dir, cfg: cfg.clone(), meta, frontier: Vec::new() };
    run.commit_level(vec![(seed_key, None)])?;
    run.go()
}

/// Explores until the class closes or the graph limit is hit.
pub fn closure(seed: &Graph, cfg: &ExplorationConfig) -> Result<ExplorationState, ExploreError> {
    let mut cfg = cfg.clone();
    cfg.max_depth = None;
    explore(seed, &cfg)
}

/// Settings that may change when a checkpoint is resumed.
#[derive(Clone, Debug, Default)]
pub struct ResumeOptions {
    /// If given, must match the stored switch.
    pub switch: Option<SwitchKind>,
    pub max_depth: Option<Option<usize>>,
    pub max_total: Option<u64>,
    pub workers: Option<usize>,
}

pub fn read_metadata(dir: &Path) -> Result<Metadata, ExploreError> {
    let path = dir.join(METADATA);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| ExploreError::Metadata { path, reason: e.to_string() })
}

/// Checks every level file listed in the metadata: line count and SHA-256.
pub fn verify_checkpoint(dir: &Path, meta: &Metadata) -> Result<(), ExploreError> {
    for (j, lvl) in meta.levels.iter().enumerate() {
        let path = dir.join(&lvl.file);
        let bad = |reason: String| ExploreError::Integrity { path: path.clone(), reason };
        if lvl.depth != j || lvl.file != level_name(j) {
            return Err(bad(format!("metadata lists it as depth {}", lvl.depth)));
        }
        let mut bytes = Vec::new();
        File::open(&path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| bad(e.to_string()))?;
        let lines = bytes.iter().filter(|&&b| b == b'\n').count() as u64;
        if lines != lvl.new {
            return Err(bad(format!("{lines} lines, expected {}", lvl.new)));
        }
        if hex(&Sha256::digest(&bytes)) != lvl.sha256 {
            return Err(bad("SHA-256 mismatch".into()));
        }
    }
    Ok(())
}

/// Continues a checkpointed exploration.
pub fn resume(dir: &Path, opts: &ResumeOptions) -> Result<ExplorationState, ExploreError> {
    let mut meta = read_metadata(dir)?;
    if meta.format != FORMAT_VERSION {
        return Err(ExploreError::Metadata { path: dir.join(METADATA), reason: format!("unknown format {}", meta.format) });
    }
    if meta.config_hash != config_hash(meta.switch, &meta.seed_key) {
        return Err(ExploreError::Integrity { path: dir.join(METADATA), reason: "config hash does not match".into() });
    }
    if let Some(sw) = opts.switch {
        if sw != meta.switch {
            return Err(ExploreError::ConfigMismatch { stored: meta.switch.to_string(), requested: sw.to_string() });
        }
    }
    verify_checkpoint(dir, &meta)?;
    if meta.status == RunStatus::Closed {
        return Ok(ExplorationState { dir: dir.to_path_buf(), metadata: meta });
    }
    if let Some(d) = opts.max_depth {
        meta.max_depth = d;
    }
    if let Some(m) = opts.max_total {
        meta.max_total = m;
    }
    let mut cfg = ExplorationConfig::new(meta.switch, dir);
    cfg.max_depth = meta.max_depth;
    cfg.max_total = meta.max_total;
    cfg.workers = opts.workers.unwrap_or(1);
    cfg.validate()?;

    let mut index = KeyIndex::new(dir, cfg.digest_bits);
    let mut frontier = Vec::new();
    for lvl in &meta.levels {
        let path = dir.join(&lvl.file);
        frontier = read_keys(&path)?;
        index.add_level(lvl.depth, &frontier);
    }
    let mut run = Run { dir: dir.to_path_buf(), cfg, meta, index, frontier };
    run.go()
}

fn read_keys(path: &Path) -> Result<Vec<CanonicalKey>, ExploreError> {
    let f = File::open(path).map_err(io_err(path))?;
    BufReader::new(f)
        .split(b'\n')
        .map(|l| l.map(CanonicalKey::from_bytes_unchecked).map_err(io_err(path)))
        .collect()
}

/// Reads the graphs stored at one depth of a checkpoint.
pub fn read_level(dir: &Path, depth: usize) -> Result<Vec<Graph>, ExploreError> {
    let path = dir.join(level_name(depth));
    read_keys(&path)?
        .iter()
        .enumerate()
        .map(|(i, k)| {
            parse_graph6(k.as_bytes())
                .map_err(|e| ExploreError::Integrity { path: path.clone(), reason: format!("line {}: {e}", i + 1) })
        })
        .collect()
}

/// Re-derives line `line` (0-based) of level `depth` from its recorded parent
/// and partition, and returns the parent's line in the previous level.
pub fn replay_step(dir: &Path, depth: usize, line: usize) -> Result<usize, ExploreError> {
    let prov_path = dir.join(prov_name(depth));
    let bad = |reason: String| ExploreError::Integrity { path: prov_path.clone(), reason };
    let text = fs::read_to_string(&prov_path).map_err(io_err(&prov_path))?;
    let entry = text.lines().nth(line).ok_or_else(|| bad(format!("no line {}", line + 1)))?;
    let (parent, part) = entry.split_once(' ').ok_or_else(|| bad(format!("malformed line {}", line + 1)))?;
    let parent: usize = parent.parse().map_err(|_| bad(format!("malformed line {}", line + 1)))?;
    let parents = read_level(dir, depth - 1)?;
    let pg = parents.get(parent).ok_or_else(|| bad(format!("parent {parent} out of range")))?;
    let child = Partition::from_text(pg, part)?.apply(pg)?;
    let expected = read_keys(&dir.join(level_name(depth)))?;
    if canonical_form(&child).key != expected[line] {
        return Err(bad(format!("line {} does not reproduce its graph", line + 1)));
    }
    Ok(parent)
}

impl Run {
    fn go(&mut self) -> Result<ExplorationState, ExploreError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.cfg.workers)
            .build()
            .map_err(|e| ExploreError::Config(e.to_string()))?;
        loop {
            let depth = self.meta.levels.len() - 1;
            if self.cfg.max_depth.is_some_and(|d| depth >= d) {
                self.meta.status = RunStatus::DepthReached;
                break;
            }
            match pool.install(|| self.next_level())? {
                Some(level) if level.is_empty() => {
                    self.meta.status = RunStatus::Closed;
                    break;
                }
                Some(level) => self.commit_level(level)?,
                None => {
                    self.meta.status = RunStatus::Truncated;
                    break;
                }
            }
        }
        self.write_metadata()?;
        Ok(ExplorationState { dir: self.dir.clone(), metadata: self.meta.clone() })
    }

    /// New graphs of the next level with their provenance, or `None` when the
    /// graph limit would be exceeded.
    #[allow(clippy::type_complexity)]
    fn next_level(&mut self) -> Result<Option<Vec<(CanonicalKey, Option<(usize, Partition)>)>>, ExploreError> {
        let kind = self.meta.switch;
        let params = self.meta.params;
        let room = self.meta.max_total.saturating_sub(self.total());
        let mut new: HashMap<CanonicalKey, (usize, Partition)> = HashMap::new();
        let chunk = (4 * self.cfg.workers).max(1);
        let frontier = std::mem::take(&mut self.frontier);
        for (c, keys) in frontier.chunks(chunk).enumerate() {
            let expansions: Vec<Expansion> = keys
                .par_iter()
                .map(|k| {
                    let g = parse_graph6(k.as_bytes())
                        .map_err(|e| ExploreError::Internal(format!("stored key {k} does not parse: {e}")))?;
                    expand(&g, kind, params)
                })
                .collect::<Result<_, _>>()?;
            for (i, e) in expansions.into_iter().enumerate() {
                let parent = c * chunk + i;
                self.meta.partitions += e.partitions;
                self.meta.switched_graphs += e.switched;
                for (key, _, part) in e.children {
                    if new.contains_key(&key) || self.index.contains(key.as_bytes())? {
                        continue;
                    }
                    new.insert(key, (parent, part));
                }
            }
            if new.len() as u64 > room {
                self.frontier = frontier;
                return Ok(None);
            }
        }
        self.frontier = frontier;
        let mut level: Vec<(CanonicalKey, Option<(usize, Partition)>)> =
            new.into_iter().map(|(k, p)| (k, Some(p))).collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Some(level))
    }

    fn total(&self) -> u64 {
        self.meta.levels.last().map_or(0, |l| l.total)
    }

    fn commit_level(&mut self, level: Vec<(CanonicalKey, Option<(usize, Partition)>)>) -> Result<(), ExploreError> {
        let depth = self.meta.levels.len();
        let mut g6 = Vec::new();
        let mut prov = String::new();
        for (k, p) in &level {
            g6.extend_from_slice(k.as_bytes());
            g6.push(b'\n');
            if let Some((parent, part)) = p {
                prov.push_str(&format!("{parent} {part}\n"));
            }
        }
        let file = level_name(depth);
        write_atomic(&self.dir.join(&file), &g6)?;
        if depth > 0 {
            write_atomic(&self.dir.join(prov_name(depth)), prov.as_bytes())?;
        }
        let keys: Vec<CanonicalKey> = level.into_iter().map(|(k, _)| k).collect();
        let new = keys.len() as u64;
        self.meta.levels.push(LevelRecord { depth, new, total: self.total() + new, file, sha256: hex(&Sha256::digest(&g6)) });
        self.index.add_level(depth, &keys);
        self.frontier = keys;
        self.write_metadata()
    }

    fn write_metadata(&self) -> Result<(), ExploreError> {
        let json = serde_json::to_string_pretty(&self.meta).expect("metadata serialises");
        let mut csv = String::from("depth,new,total\n");
        for l in &self.meta.levels {
            csv.push_str(&format!("{},{},{}\n", l.depth, l.new, l.total));
        }
        write_atomic(&self.dir.join(STATS), csv.as_bytes())?;
        write_atomic(&self.dir.join(METADATA), json.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{sp_graph, vo_minus_f2};

    #[test]
    fn pentagon_is_closed_at_depth_zero() {
        let dir = tempfile::tempdir().unwrap();
        let st = explore(&Graph::cycle(5), &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(3)).unwrap();
        assert_eq!(st.totals(), vec![1]);
        assert_eq!(st.status(), RunStatus::Closed);
        let st = closure(&Graph::cycle(5), &ExplorationConfig::new(SwitchKind::Gm4, dir.path().join("c"))).unwrap();
        assert_eq!(st.totals(), vec![1]);
    }

    #[test]
    fn refuses_non_srg_and_existing_dir() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(1);
        assert!(matches!(explore(&Graph::path(5), &cfg), Err(ExploreError::NotSrg(_))));
        assert!(matches!(explore(&Graph::complete(5), &cfg), Err(ExploreError::NotSrg(_))));
        explore(&Graph::cycle(5), &cfg).unwrap();
        assert!(matches!(explore(&Graph::cycle(5), &cfg), Err(ExploreError::AlreadyExists(_))));
    }

    #[test]
    fn sp62_depth_one_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let g = sp_graph(3, 2).unwrap();
        let st = explore(&g, &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(1)).unwrap();
        assert_eq!(st.totals(), vec![1, 3]);
        assert_eq!(st.status(), RunStatus::DepthReached);
        let bad = ResumeOptions { switch: Some(SwitchKind::Wqh(3)), ..Default::default() };
        assert!(matches!(resume(dir.path(), &bad), Err(ExploreError::ConfigMismatch { .. })));
        // a level left behind by an interrupted run is ignored
        fs::write(dir.path().join("level-2.g6"), b"garbage\n").unwrap();
        let st = resume(dir.path(), &ResumeOptions { max_depth: Some(Some(2)), ..Default::default() }).unwrap();
        assert_eq!(st.totals(), vec![1, 3, 55]);
        for line in 0..2 {
            assert_eq!(replay_step(dir.path(), 1, line).unwrap(), 0);
        }
        let p = replay_step(dir.path(), 2, 30).unwrap();
        assert!(p < 2);
    }

    #[test]
    fn corrupt_level_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let g = sp_graph(3, 2).unwrap();
        explore(&g, &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(1)).unwrap();
        let path = dir.path().join("level-1.g6");
        let mut text = fs::read(&path).unwrap();
        text[3] ^= 1;
        fs::write(&path, text).unwrap();
        match resume(dir.path(), &ResumeOptions { max_depth: Some(Some(2)), ..Default::default() }) {
            Err(ExploreError::Integrity { path: p, .. }) => assert_eq!(p, path),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_is_reported_and_not_persisted() {
        let dir = tempfile::tempdir().unwrap();
        let g = sp_graph(3, 2).unwrap();
        let st = explore(&g, &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(2).max_total(10)).unwrap();
        assert_eq!(st.status(), RunStatus::Truncated);
        assert_eq!(st.totals(), vec![1, 3]);
        assert!(!dir.path().join("level-2.g6").exists());
        let st = resume(dir.path(), &ResumeOptions { max_total: Some(100), ..Default::default() }).unwrap();
        assert_eq!(st.totals(), vec![1, 3, 55]);
    }

    #[test]
    fn weak_digests_do_not_change_results() {
        let dir = tempfile::tempdir().unwrap();
        let g = vo_minus_f2(6).unwrap();
        let mut cfg = ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(2);
        cfg.digest_bits = 2;
        assert_eq!(explore(&g, &cfg).unwrap().totals(), vec![1, 3, 46]);
    }

    #[test]
    fn closed_run_resumes_immediately() {
        let dir = tempfile::tempdir().unwrap();
        explore(&Graph::cycle(5), &ExplorationConfig::new(SwitchKind::Gm4, dir.path())).unwrap();
        let st = resume(dir.path(), &ResumeOptions { max_depth: Some(Some(9)), ..Default::default() }).unwrap();
        assert_eq!(st.status(), RunStatus::Closed);
        assert_eq!(st.totals(), vec![1]);
    }
}
