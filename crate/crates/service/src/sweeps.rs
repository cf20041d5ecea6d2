//! Background sweep jobs polled by id.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, MutexGuard};

use cyclekit::solver::SweepTable;
use serde::Serialize;

/// Finished jobs kept for polling; the oldest finished job is dropped first.
const MAX_FINISHED: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Job {
    pub id: u64,
    pub parameter: String,
    pub state: JobState,
    pub completed: usize,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<SweepTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Default)]
struct Table {
    next: u64,
    jobs: BTreeMap<u64, Job>,
}

#[derive(Debug, Clone, Default)]
pub struct Jobs(Arc<Mutex<Table>>);

impl Jobs {
    fn lock(&self) -> MutexGuard<'_, Table> {
        // A poisoned table only means a worker panicked mid-update; the entries are still usable.
        self.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn start(&self, parameter: &str, total: usize) -> u64 {
        let mut t = self.lock();
        t.next += 1;
        let id = t.next;
        t.jobs.insert(id, Job { id, parameter: parameter.to_string(), state: JobState::Running, completed: 0, total, table: None, error: None });
        id
    }

    pub fn progress(&self, id: u64, completed: usize) {
        if let Some(j) = self.lock().jobs.get_mut(&id) {
            j.completed = completed;
        }
    }

    pub fn finish(&self, id: u64, outcome: Result<SweepTable, String>) {
        let mut t = self.lock();
        if let Some(j) = t.jobs.get_mut(&id) {
            match outcome {
                Ok(table) => {
                    j.state = JobState::Done;
                    j.completed = j.total;
                    j.table = Some(table);
                }
                Err(e) => {
                    j.state = JobState::Error;
                    j.error = Some(e);
                }
            }
        }
        let finished: Vec<u64> = t.jobs.values().filter(|j| j.state != JobState::Running).map(|j| j.id).collect();
        for id in finished.iter().take(finished.len().saturating_sub(MAX_FINISHED)) {
            t.jobs.remove(id);
        }
    }

    pub fn get(&self, id: u64) -> Option<Job> {
        self.lock().jobs.get(&id).cloned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finished_jobs_are_bounded() {
        let jobs = Jobs::default();
        let running = jobs.start("p", 1);
        let ids: Vec<u64> = (0..MAX_FINISHED + 5).map(|_| jobs.start("p", 1)).collect();
        for &id in &ids {
            jobs.finish(id, Err("x".into()));
        }
        assert!(jobs.get(ids[0]).is_none());
        assert!(jobs.get(*ids.last().unwrap()).is_some());
        assert_eq!(jobs.get(running).unwrap().state, JobState::Running);
    }
}
