use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use oac_core::model::{Annotation, EquivalenceMap, ModelError, Violation, Vocabulary, resolve_references};
use oac_core::rdf::{Graph, Iri};
use oac_core::store::{PutOutcome, Store, StoreError};
use oac_core::temporal::{Memento, TemporalError, TimeGateRegistry};
use oac_core::time::Timestamp;

use crate::config::Config;

#[derive(Debug, thiserror::Error)]
pub enum StateError {
    #[error("cannot read vocabulary table {path}: {reason}")]
    Vocabulary { path: PathBuf, reason: String },
    #[error("corrupt {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("document violates the model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Archived representation served at `/mementos/{id}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MementoContent {
    pub content_type: String,
    pub content: String,
}

pub struct AppState {
    base: String,
    data_dir: Option<PathBuf>,
    pub store: Store,
    registry: RwLock<TimeGateRegistry>,
    contents: RwLock<BTreeMap<Iri, MementoContent>>,
    equivalences: Mutex<EquivalenceMap>,
    feed_locks: Mutex<HashMap<Iri, Arc<tokio::sync::Mutex<()>>>>,
    pub ui_dir: Option<PathBuf>,
    pub http: reqwest::Client,
}

/// Path-safe identifier for a URN: the UUID of a `urn:uuid:`, otherwise a
/// digest.
pub fn local_id(urn: &Iri) -> String {
    let s = urn.as_str();
    if let Some(uuid) = s.strip_prefix("urn:uuid:")
        && !uuid.is_empty()
        && uuid.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
    {
        return uuid.to_ascii_lowercase();
    }
    digest(s)[..32].to_string()
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(tmp, path)
}

impl AppState {
    /// Opens the data directory named by `config`.
    ///
    /// ```text
    /// <data_dir>/store/          annotation records and index
    /// <data_dir>/mementos.txt    registry snapshot
    /// <data_dir>/mementos/       archived representations
    /// <data_dir>/equivalences.tsv
    /// ```
    pub fn open(config: &Config) -> Result<Self, StateError> {
        let vocab = match &config.vocabulary {
            Some(path) => {
                let err = |reason: String| StateError::Vocabulary {
                    path: path.clone(),
                    reason,
                };
                let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
                Vocabulary::from_toml(&text).map_err(|e| err(e.to_string()))?
            }
            None => Vocabulary::default(),
        };
        let dir = &config.data_dir;
        fs::create_dir_all(dir.join("mementos"))?;
        let store = Store::open(dir.join("store"), vocab)?;

        let registry = match fs::read_to_string(dir.join("mementos.txt")) {
            Ok(text) => TimeGateRegistry::import(&text).map_err(|e| StateError::Corrupt {
                path: dir.join("mementos.txt"),
                reason: e.to_string(),
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => TimeGateRegistry::new(),
            Err(e) => return Err(e.into()),
        };
        let mut contents = BTreeMap::new();
        for m in registry
            .originals()
            .flat_map(|o| registry.mementos(o).unwrap_or_default())
        {
            let path = dir
                .join("mementos")
                .join(format!("{}.json", digest(m.memento_uri.as_str())));
            if let Ok(text) = fs::read_to_string(&path) {
                let c: MementoContent = serde_json::from_str(&text).map_err(|e| StateError::Corrupt {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                contents.insert(m.memento_uri.clone(), c);
            }
        }

        let mut equivalences = EquivalenceMap::new();
        let eq_path = dir.join("equivalences.tsv");
        match fs::read_to_string(&eq_path) {
            Ok(text) => {
                for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                    let corrupt = |reason: String| StateError::Corrupt {
                        path: eq_path.clone(),
                        reason: format!("line {}: {reason}", n + 1),
                    };
                    let (urn, http) = line
                        .split_once('\t')
                        .ok_or_else(|| corrupt("expected two columns".into()))?;
                    let urn = Iri::parse(urn).map_err(|e| corrupt(e.to_string()))?;
                    let http = Iri::parse(http).map_err(|e| corrupt(e.to_string()))?;
                    equivalences = equivalences.register(urn, http).map_err(|e| corrupt(e.to_string()))?;
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }

        Ok(AppState {
            base: config.base_url(),
            data_dir: Some(dir.clone()),
            store,
            registry: RwLock::new(registry),
            contents: RwLock::new(contents),
            equivalences: Mutex::new(equivalences),
            feed_locks: Mutex::new(HashMap::new()),
            ui_dir: config.ui_dir.clone(),
            http: http_client(),
        })
    }

    /// State without persistence.
    pub fn in_memory(base_url: &str, vocab: Vocabulary) -> Self {
        AppState {
            base: base_url.trim_end_matches('/').to_string(),
            data_dir: None,
            store: Store::in_memory(vocab),
            registry: RwLock::new(TimeGateRegistry::new()),
            contents: RwLock::new(BTreeMap::new()),
            equivalences: Mutex::new(EquivalenceMap::new()),
            feed_locks: Mutex::new(HashMap::new()),
            ui_dir: None,
            http: http_client(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        self.store.vocabulary()
    }

    pub fn annotation_uri(&self, id: &str) -> Option<Iri> {
        Iri::parse(format!("{}/annotations/{id}", self.base)).ok()
    }

    pub fn timegate_uri(&self, original: &Iri) -> String {
        format!(
            "{}/timegate/{}",
            self.base,
            percent_encoding::utf8_percent_encode(original.as_str(), percent_encoding::NON_ALPHANUMERIC)
        )
    }

    pub fn equivalences(&self) -> EquivalenceMap {
        self.equivalences.lock().clone()
    }

    /// Decodes the annotation `uri` from `g`, applies URN equivalences and
    /// stores it. With `mint`, a URN annotation or body identifier is bound
    /// to a fresh URI under this service first.
    pub fn ingest(
        &self,
        g: &Graph,
        uri: &Iri,
        mint: bool,
        source: Option<Iri>,
    ) -> Result<(Annotation, PutOutcome), IngestError> {
        let vocab = self.vocabulary();
        let violations = vocab.validate_graph(g, uri);
        if !violations.is_empty() {
            return Err(IngestError::Invalid(violations));
        }
        let a = vocab.from_graph(g, uri)?;

        let resolved = {
            let mut map = self.equivalences.lock();
            let mut next = map.clone();
            for (urn, http) in &a.equivalences {
                next = next.register(urn.clone(), http.clone())?;
            }
            if mint {
                for (urn, kind) in [(&a.uri, "annotations"), (a.body.id(), "bodies")] {
                    if urn.is_urn() && next.get(urn).is_none() {
                        let http = Iri::parse(format!("{}/{kind}/{}", self.base, local_id(urn)))
                            .expect("base URL forms absolute IRIs");
                        next = next.register(urn.clone(), http)?;
                    }
                }
            }
            if next != *map {
                self.persist_equivalences(&next)?;
                *map = next;
            }
            resolve_references(&a, &map)
        };
        let raw = vocab.to_graph(&resolved);
        let outcome = self.store.put(&resolved, &raw, source)?;
        Ok((resolved, outcome))
    }

    fn persist_equivalences(&self, map: &EquivalenceMap) -> std::io::Result<()> {
        let Some(dir) = &self.data_dir else { return Ok(()) };
        let mut out = String::new();
        for (urn, http) in map.iter() {
            out.push_str(&format!("{urn}\t{http}\n"));
        }
        write_atomic(&dir.join("equivalences.tsv"), out.as_bytes())
    }

    pub fn registry(&self) -> parking_lot::RwLockReadGuard<'_, TimeGateRegistry> {
        self.registry.read()
    }

    /// Memento URI minted for `original` at `datetime` when the caller does
    /// not name one.
    pub fn minted_memento_uri(&self, original: &Iri, datetime: Timestamp) -> Iri {
        let id = &digest(&format!("{original} {datetime}"))[..24];
        Iri::parse(format!("{}/mementos/{id}", self.base)).expect("base URL forms absolute IRIs")
    }

    pub fn register_memento(&self, m: Memento, content: Option<MementoContent>) -> Result<(), IngestError> {
        let mut registry = self.registry.write();
        let mut next = registry.clone();
        next.register(m.clone())?;
        if let Some(dir) = &self.data_dir {
            if let Some(c) = &content {
                let path = dir
                    .join("mementos")
                    .join(format!("{}.json", digest(m.memento_uri.as_str())));
                write_atomic(&path, serde_json::to_string(c).expect("serializes").as_bytes())?;
            }
            write_atomic(&dir.join("mementos.txt"), next.export().as_bytes())?;
        }
        if let Some(c) = content {
            self.contents.write().insert(m.memento_uri.clone(), c);
        }
        *registry = next;
        Ok(())
    }

    pub fn memento_content(&self, memento_uri: &Iri) -> Option<MementoContent> {
        self.contents.read().get(memento_uri).cloned()
    }

    pub(crate) fn feed_lock(&self, feed: &Iri) -> Arc<tokio::sync::Mutex<()>> {
        self.feed_locks.lock().entry(feed.clone()).or_default().clone()
    }
}

fn http_client() -> reqwest::Client {
    reqwest::Client::builder()
        .timeout(std::time::Duration::from_secs(30))
        .build()
        .expect("HTTP client builds")
}
