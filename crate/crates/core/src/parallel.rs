use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers, or on the global rayon
/// pool when `threads` is `None`.
pub(crate) fn install<R, F>(threads: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::param("threads", "need at least one thread")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::param("threads", e.to_string())),
    }
}
