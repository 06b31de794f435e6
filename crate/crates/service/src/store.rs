//! Live sessions keyed by id, each behind its own lock.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime};

use fracq_core::harness::SessionLog;
use fracq_core::Learner;
use parking_lot::{Mutex, RwLock};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug)]
pub struct Session {
    pub learner: Learner,
    pub log: SessionLog,
    pub created_at: SystemTime,
    pub last_active: Instant,
}

impl Session {
    pub fn new(learner: Learner) -> Self {
        let log = SessionLog::new(&learner, None, None);
        Session {
            learner,
            log,
            created_at: SystemTime::now(),
            last_active: Instant::now(),
        }
    }
}

pub type SessionHandle = Arc<Mutex<Session>>;

/// The map lock is only held to look up or insert a handle; work on a
/// session happens under that session's own mutex.
#[derive(Debug)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SessionHandle>>,
    idle_timeout: Duration,
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT)
    }
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        SessionStore {
            sessions: RwLock::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }

    pub fn insert(&self, session: Session) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.sessions
            .write()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    /// Looks up a live session. A session idle past the timeout is dropped
    /// and reported as missing.
    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        let handle = self.sessions.read().get(id).cloned()?;
        let expired = handle.lock().last_active.elapsed() > self.idle_timeout;
        if expired {
            self.sessions.write().remove(id);
            tracing::info!(session_id = id, "session expired");
            None
        } else {
            Some(handle)
        }
    }

    pub fn remove(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.write().remove(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops every session idle for longer than the timeout as of `now`.
    /// Returns how many were dropped.
    pub fn sweep(&self, now: Instant) -> usize {
        let mut map = self.sessions.write();
        let before = map.len();
        map.retain(|_, s| now.saturating_duration_since(s.lock().last_active) <= self.idle_timeout);
        before - map.len()
    }
}
