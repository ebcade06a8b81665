use std::time::{Duration, Instant};

/// Source of elapsed-time measurements. `Frozen` reports zero for every
/// interval, which keeps traces byte-identical across scripted runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Clock {
    #[default]
    Wall,
    Frozen,
}

impl Clock {
    pub fn start(self) -> Timer {
        Timer {
            started: match self {
                Clock::Wall => Some(Instant::now()),
                Clock::Frozen => None,
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Timer {
    started: Option<Instant>,
}

impl Timer {
    pub fn elapsed(&self) -> Duration {
        self.started.map_or(Duration::ZERO, |s| s.elapsed())
    }
}
