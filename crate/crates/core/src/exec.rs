//! Sequential or data-parallel evaluation of independent index ranges.
//!
//! Results are always returned in index order, so outputs never depend on the
//! worker count. Without the `parallel` feature every mode runs sequentially.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// `workers == 0` uses the global pool.
    Parallel { workers: usize },
    #[default]
    #[serde(skip)]
    Auto,
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { workers }
        }
    }

    pub(crate) fn executor(self) -> Result<Executor> {
        Executor::new(self)
    }
}

pub(crate) struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<Option<rayon::ThreadPool>>,
}

impl Executor {
    #[cfg(feature = "parallel")]
    fn new(mode: Execution) -> Result<Self> {
        let pool = match mode {
            Execution::Sequential => None,
            Execution::Auto | Execution::Parallel { workers: 0 } => Some(None),
            Execution::Parallel { workers } => Some(Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?,
            )),
        };
        Ok(Self { pool })
    }

    #[cfg(not(feature = "parallel"))]
    fn new(mode: Execution) -> Result<Self> {
        if let Execution::Parallel { workers } = mode {
            if workers > 1 {
                return Err(Error::Config(
                    "built without the `parallel` feature; use one worker".into(),
                ));
            }
        }
        Ok(Self {})
    }

    /// Evaluates `f(state, i)` for every `i` in `range`, with one `init()`
    /// state per worker.
    pub(crate) fn map<T, S, I, F>(&self, range: Range<usize>, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let run = || range.clone().into_par_iter().map_init(&init, &f).collect();
            match &self.pool {
                None => {}
                Some(None) => return run(),
                Some(Some(pool)) => return pool.install(run),
            }
        }
        let mut state = init();
        range.map(|i| f(&mut state, i)).collect()
    }
}
