//! Cooperative time budgets.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Self(None)
    }

    pub fn after(d: Duration) -> Self {
        Self(Some(Instant::now() + d))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}
