//! Seeded, parallel event generation with deterministic merging.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::coincidence::{CoincidenceStats, CoincidenceTally};
use crate::error::{Error, Result};
use crate::model::{generate_pair, EventPair, ModelParams};
use crate::stream::StreamKey;
use crate::vector::UnitVector3;

/// Events per work item. Fixed so the chunk layout never depends on the
/// worker count.
pub const CHUNK_EVENTS: u64 = 1 << 15;

/// Events `range` of the stream `key` for one pair of settings.
pub fn events(
    key: StreamKey,
    a1: UnitVector3,
    a2: UnitVector3,
    params: ModelParams,
    range: std::ops::Range<u64>,
) -> impl Iterator<Item = EventPair> {
    let mut rng = key.pair_rng(range.start);
    range.map(move |_| generate_pair(&mut rng, &a1, &a2, &params))
}

pub struct Simulator {
    pool: ThreadPool,
    workers: usize,
}

impl Simulator {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
        Ok(Simulator { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn tally(
        &self,
        key: StreamKey,
        a1: UnitVector3,
        a2: UnitVector3,
        params: &ModelParams,
        n_events: u64,
    ) -> CoincidenceTally {
        let chunks = n_events.div_ceil(CHUNK_EVENTS);
        let params = *params;
        self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let start = c * CHUNK_EVENTS;
                    let end = (start + CHUNK_EVENTS).min(n_events);
                    let mut tally = CoincidenceTally::default();
                    for pair in events(key, a1, a2, params, start..end) {
                        tally.record(&pair, &params);
                    }
                    tally
                })
                .reduce(CoincidenceTally::default, CoincidenceTally::merge)
        })
    }

    pub fn run(
        &self,
        key: StreamKey,
        a1: UnitVector3,
        a2: UnitVector3,
        params: &ModelParams,
        n_events: u64,
    ) -> Result<CoincidenceStats> {
        params.validate()?;
        CoincidenceStats::from_tally(self.tally(key, a1, a2, params, n_events), params)
    }
}
