use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::api::CreateRequest;
use crate::session::{build_artifacts, robot_reply, Session, SessionError};

#[derive(Debug, Clone)]
pub struct StoreConfig {
    /// Sessions kept in memory before the least recently used is evicted.
    pub capacity: usize,
    /// Where evicted sessions are written; eviction drops them when unset.
    pub snapshot_dir: Option<PathBuf>,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            capacity: 64,
            snapshot_dir: None,
        }
    }
}

/// What an evicted session is restored from: synthesis is recomputed from
/// the request and the human actions are replayed.
#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    id: String,
    created: u64,
    request: CreateRequest,
    human_actions: Vec<String>,
}

/// In-memory LRU registry of sessions. Insertion order of the map is the
/// recency order, most recent last.
#[derive(Debug)]
pub struct SessionStore {
    config: StoreConfig,
    sessions: Mutex<IndexMap<String, Arc<Session>>>,
}

impl SessionStore {
    pub fn new(config: StoreConfig) -> SessionStore {
        SessionStore {
            config,
            sessions: Mutex::new(IndexMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, session: Session) -> Arc<Session> {
        let session = Arc::new(session);
        let evicted = {
            let mut map = self.sessions.lock().expect("store lock");
            map.insert(session.id.clone(), session.clone());
            let mut out = Vec::new();
            while map.len() > self.config.capacity.max(1) {
                if let Some((_, s)) = map.shift_remove_index(0) {
                    out.push(s);
                }
            }
            out
        };
        for s in evicted {
            self.persist(&s);
        }
        session
    }

    fn persist(&self, s: &Session) {
        let Some(dir) = &self.config.snapshot_dir else {
            return;
        };
        // a session mid-update keeps its previous snapshot-free state
        let Ok(live) = s.live.try_lock() else {
            return;
        };
        let snap = Snapshot {
            id: s.id.clone(),
            created: s.created,
            request: s.artifacts.request.clone(),
            human_actions: Session::human_actions(&live),
        };
        let _ = std::fs::create_dir_all(dir);
        if let Ok(text) = serde_json::to_string(&snap) {
            let _ = std::fs::write(dir.join(format!("{}.json", s.id)), text);
        }
    }

    fn snapshot_path(&self, id: &str) -> Option<PathBuf> {
        // ids are uuids; anything else cannot name a snapshot
        if !id.chars().all(|c| c.is_ascii_hexdigit() || c == '-') {
            return None;
        }
        let path = self.config.snapshot_dir.as_ref()?.join(format!("{id}.json"));
        path.exists().then_some(path)
    }

    /// Looks a session up and marks it most recently used. Evicted sessions
    /// are restored from their snapshot.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        {
            let mut map = self.sessions.lock().expect("store lock");
            if let Some(i) = map.get_index_of(id) {
                let last = map.len() - 1;
                map.move_index(i, last);
                return map.get(id).cloned();
            }
        }
        let path = self.snapshot_path(id)?;
        let snap: Snapshot = serde_json::from_str(&std::fs::read_to_string(&path).ok()?).ok()?;
        let restored = restore(snap).ok()?;
        let _ = std::fs::remove_file(path);
        Some(self.insert(restored))
    }

    pub fn remove(&self, id: &str) -> bool {
        let removed = self.sessions.lock().expect("store lock").shift_remove(id).is_some();
        let on_disk = self.snapshot_path(id).map(std::fs::remove_file).is_some();
        removed || on_disk
    }
}

fn restore(snap: Snapshot) -> Result<Session, SessionError> {
    let artifacts = build_artifacts(snap.request)?;
    let mut session = Session::start(snap.id, artifacts)?;
    session.created = snap.created;
    {
        let live = session.live.get_mut();
        for a in &snap.human_actions {
            live.play.human(&session.artifacts.product, a)?;
            live.last_robot_action = robot_reply(&session.artifacts, &mut live.play)?.or(live.last_robot_action.take());
        }
    }
    Ok(session)
}
