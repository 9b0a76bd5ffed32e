//! Monotonic-time abstraction so the core stays `no_std`.
//!
//! Long-running operations (the reduction controller, the training loop)
//! take a `&dyn Clock` for budgets and log timestamps. The companion crate
//! provides a wall clock; [`NullClock`] disables time budgets entirely and
//! keeps logs deterministic.

pub trait Clock {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

/// Clock that always reads zero: time budgets never fire and logged
/// durations are all zero.
pub struct NullClock;

impl Clock for NullClock {
    fn now(&self) -> f64 {
        0.0
    }
}
