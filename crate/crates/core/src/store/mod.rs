//! Persistent annotation store.
//!
//! Layout under the data directory:
//!
//! ```text
//! records/<sha256(uri)>.nt     canonical N-Triples of the stored graph
//! records/<sha256(uri)>.json   {"uri", "ingested_at", "source_uri"}
//! index/entries.jsonl          search projection, one JSON object per line;
//!                              later lines for a URI supersede earlier ones
//! ```
//!
//! The record files are authoritative. The index file is append-only between
//! rebuilds and is checked against the records on open.

mod index;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{Annotation, ModelError, Violation, Vocabulary, validate};
use crate::rdf::{self, Graph, Iri, RdfError, RdfFormat};
use crate::time::Timestamp;

pub use index::SearchQuery;
use index::{Index, IndexEntry};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("annotation <{uri}> failed validation: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ValidationFailed { uri: String, violations: Vec<Violation> },
    #[error("graph does not reproduce annotation <{uri}>: {reason}")]
    GraphMismatch { uri: String, reason: String },
    #[error("no annotation stored at <{0}>")]
    NotFound(String),
    #[error("search query has no criteria")]
    EmptyQuery,
    #[error("region search needs a target URI")]
    RegionWithoutTarget,
    #[error("corrupt record {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoreRecord {
    pub annotation: Annotation,
    pub raw_graph: Graph,
    pub ingested_at: Timestamp,
    pub source_uri: Option<Iri>,
}

impl StoreRecord {
    /// The stored bytes.
    pub fn canonical(&self) -> String {
        rdf::serialize(&self.raw_graph, RdfFormat::NTriples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PutOutcome {
    Inserted,
    /// Same URI and an identical canonical graph.
    Unchanged,
    Replaced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadNode {
    pub uri: Iri,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ThreadNode>,
}

impl ThreadNode {
    pub fn len(&self) -> usize {
        1 + self.children.iter().map(ThreadNode::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Depth-first pre-order URIs.
    pub fn uris(&self) -> Vec<&Iri> {
        let mut out = vec![&self.uri];
        for c in &self.children {
            out.extend(c.uris());
        }
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordMeta {
    uri: Iri,
    ingested_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_uri: Option<Iri>,
}

#[derive(Default)]
struct State {
    records: BTreeMap<Iri, StoreRecord>,
    index: Index,
}

pub struct Store {
    root: Option<PathBuf>,
    vocab: Vocabulary,
    state: RwLock<State>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("root", &self.root)
            .field("len", &self.len())
            .finish()
    }
}

fn record_stem(uri: &Iri) -> String {
    hex::encode(Sha256::digest(uri.as_str().as_bytes()))
}

fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

impl Store {
    /// A store that lives only in memory.
    pub fn in_memory(vocab: Vocabulary) -> Self {
        Store {
            root: None,
            vocab,
            state: RwLock::new(State::default()),
        }
    }

    /// Opens (creating if needed) a store rooted at `dir`, loading every
    /// record. A stale or missing index file is rebuilt.
    pub fn open(dir: impl Into<PathBuf>, vocab: Vocabulary) -> Result<Self, StoreError> {
        let store = Store {
            root: Some(dir.into()),
            vocab,
            state: RwLock::new(State::default()),
        };
        fs::create_dir_all(store.records_dir().unwrap())?;
        fs::create_dir_all(store.index_dir().unwrap())?;
        let records = store.load_records()?;
        let mut index = Index::default();
        for r in records.values() {
            index.insert(IndexEntry::of(&r.annotation));
        }
        if store.read_index_file()?.as_ref() != Some(&index) {
            store.write_index_file(&index)?;
        }
        *store.state.write() = State { records, index };
        Ok(store)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn records_dir(&self) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join("records"))
    }

    fn index_dir(&self) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join("index"))
    }

    fn index_file(&self) -> Option<PathBuf> {
        self.index_dir().map(|d| d.join("entries.jsonl"))
    }

    fn load_records(&self) -> Result<BTreeMap<Iri, StoreRecord>, StoreError> {
        let mut records = BTreeMap::new();
        let Some(dir) = self.records_dir() else {
            return Ok(records);
        };
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.sort();
        for meta_path in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "json")) {
            let corrupt = |reason: String| StoreError::Corrupt {
                path: meta_path.clone(),
                reason,
            };
            let meta: RecordMeta =
                serde_json::from_str(&fs::read_to_string(meta_path)?).map_err(|e| corrupt(e.to_string()))?;
            if meta_path.file_stem().and_then(|s| s.to_str()) != Some(record_stem(&meta.uri).as_str()) {
                return Err(corrupt(format!("file name does not match <{}>", meta.uri)));
            }
            let nt_path = meta_path.with_extension("nt");
            let text = fs::read_to_string(&nt_path)?;
            let raw = rdf::parse(&text, RdfFormat::NTriples).map_err(|e: RdfError| corrupt(e.to_string()))?;
            let annotation = self
                .vocab
                .from_graph(&raw, &meta.uri)
                .map_err(|e: ModelError| corrupt(e.to_string()))?;
            records.insert(
                meta.uri.clone(),
                StoreRecord {
                    annotation,
                    raw_graph: raw,
                    ingested_at: meta.ingested_at,
                    source_uri: meta.source_uri,
                },
            );
        }
        Ok(records)
    }

    fn read_index_file(&self) -> Result<Option<Index>, StoreError> {
        let Some(path) = self.index_file() else {
            return Ok(None);
        };
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut index = Index::default();
        for line in BufReader::new(file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<IndexEntry>(&line) {
                Ok(entry) => index.insert(entry),
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(index))
    }

    fn write_index_file(&self, index: &Index) -> Result<(), StoreError> {
        let Some(path) = self.index_file() else {
            return Ok(());
        };
        let mut out = String::new();
        for e in index.entries() {
            out.push_str(&serde_json::to_string(e).expect("index entries serialize"));
            out.push('\n');
        }
        write_atomic(&path, out.as_bytes())?;
        Ok(())
    }

    fn append_index_line(&self, entry: &IndexEntry) -> Result<(), StoreError> {
        let Some(path) = self.index_file() else {
            return Ok(());
        };
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", serde_json::to_string(entry).expect("index entries serialize"))?;
        Ok(())
    }

    fn persist(&self, record: &StoreRecord, graph_changed: bool) -> Result<(), StoreError> {
        let Some(dir) = self.records_dir() else {
            return Ok(());
        };
        let stem = record_stem(&record.annotation.uri);
        if graph_changed {
            write_atomic(&dir.join(format!("{stem}.nt")), record.canonical().as_bytes())?;
        }
        let meta = RecordMeta {
            uri: record.annotation.uri.clone(),
            ingested_at: record.ingested_at,
            source_uri: record.source_uri.clone(),
        };
        let json = serde_json::to_string_pretty(&meta).expect("record metadata serializes");
        write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())?;
        Ok(())
    }

    /// Stores `a` with the graph it was read from. The graph must decode back
    /// to exactly `a`.
    ///
    /// An identical graph under the same URI leaves the record alone apart
    /// from recording the newer `source`; a different graph replaces it.
    pub fn put(&self, a: &Annotation, raw: &Graph, source: Option<Iri>) -> Result<PutOutcome, StoreError> {
        self.put_at(a, raw, source, Timestamp::now())
    }

    pub fn put_at(
        &self,
        a: &Annotation,
        raw: &Graph,
        source: Option<Iri>,
        ingested_at: Timestamp,
    ) -> Result<PutOutcome, StoreError> {
        let violations = validate(a);
        if !violations.is_empty() {
            return Err(StoreError::ValidationFailed {
                uri: a.uri.to_string(),
                violations,
            });
        }
        let mismatch = |reason: String| StoreError::GraphMismatch {
            uri: a.uri.to_string(),
            reason,
        };
        match self.vocab.from_graph(raw, &a.uri) {
            Ok(decoded) if &decoded == a => {}
            Ok(_) => return Err(mismatch("decoded annotation differs".into())),
            Err(e) => return Err(mismatch(e.to_string())),
        }

        let mut state = self.state.write();
        if let Some(existing) = state.records.get_mut(&a.uri)
            && existing.raw_graph == *raw
        {
            if source.is_some() && existing.source_uri != source {
                existing.source_uri = source;
                let snapshot = existing.clone();
                self.persist(&snapshot, false)?;
            }
            return Ok(PutOutcome::Unchanged);
        }
        let record = StoreRecord {
            annotation: a.clone(),
            raw_graph: raw.clone(),
            ingested_at,
            source_uri: source,
        };
        self.persist(&record, true)?;
        let entry = IndexEntry::of(a);
        self.append_index_line(&entry)?;
        state.index.insert(entry);
        let previous = state.records.insert(a.uri.clone(), record);
        Ok(if previous.is_some() {
            PutOutcome::Replaced
        } else {
            PutOutcome::Inserted
        })
    }

    pub fn get(&self, uri: &Iri) -> Result<StoreRecord, StoreError> {
        self.state
            .read()
            .records
            .get(uri)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(uri.to_string()))
    }

    pub fn contains(&self, uri: &Iri) -> bool {
        self.state.read().records.contains_key(uri)
    }

    pub fn len(&self) -> usize {
        self.state.read().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn uris(&self) -> Vec<Iri> {
        self.state.read().records.keys().cloned().collect()
    }

    pub fn annotations(&self) -> Vec<Annotation> {
        self.state
            .read()
            .records
            .values()
            .map(|r| r.annotation.clone())
            .collect()
    }

    /// Matching annotation URIs ordered by creation time (undated first),
    /// then URI.
    pub fn search(&self, q: &SearchQuery) -> Result<Vec<Iri>, StoreError> {
        q.check()?;
        Ok(self.state.read().index.search(q))
    }

    /// Replies to `root`, recursively. An annotation appears at most once,
    /// under the first parent reached depth-first.
    pub fn thread(&self, root: &Iri) -> Result<ThreadNode, StoreError> {
        let state = self.state.read();
        if state.index.get(root).is_none() {
            return Err(StoreError::NotFound(root.to_string()));
        }
        let mut visited = BTreeSet::new();
        Ok(build_thread(&state.index, root, &mut visited))
    }

    /// Reloads every record from disk and rewrites the index file from
    /// scratch. Returns the number of records.
    pub fn reindex(&self) -> Result<usize, StoreError> {
        let mut state = self.state.write();
        if self.root.is_some() {
            state.records = self.load_records()?;
        }
        let mut index = Index::default();
        for r in state.records.values() {
            index.insert(IndexEntry::of(&r.annotation));
        }
        self.write_index_file(&index)?;
        state.index = index;
        Ok(state.records.len())
    }
}

fn build_thread(index: &Index, uri: &Iri, visited: &mut BTreeSet<Iri>) -> ThreadNode {
    visited.insert(uri.clone());
    let mut children = Vec::new();
    for reply in index.replies(uri) {
        if !visited.contains(&reply.uri) {
            children.push(build_thread(index, &reply.uri, visited));
        }
    }
    ThreadNode {
        uri: uri.clone(),
        children,
    }
}
