//! Fault injection used to check that the verification suite actually
//! detects broken physics. Faults are scoped to the calling thread, so tests
//! running in parallel never observe each other's injected faults.

use std::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Kick factor uses `exp(+i k m^2 / 2j)` instead of `exp(-i k m^2 / 2j)`.
    TorsionSign,
    /// The reduced-state combinatorics use `C(2j, 1) + 1` in place of `C(2j, 1)`.
    BinomialWeight,
}

thread_local! {
    static ACTIVE: Cell<Option<Fault>> = const { Cell::new(None) };
}

/// Run `body` with `fault` active on this thread.
pub fn inject<R>(fault: Fault, body: impl FnOnce() -> R) -> R {
    struct Reset(Option<Fault>);
    impl Drop for Reset {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let _reset = Reset(ACTIVE.with(|a| a.replace(Some(fault))));
    body()
}

pub(crate) fn current() -> Option<Fault> {
    ACTIVE.with(|a| a.get())
}

/// Run `body` with the fault state `fault` (possibly none), e.g. on a worker
/// thread that should see the spawning thread's fault.
pub(crate) fn propagate<R>(fault: Option<Fault>, body: impl FnOnce() -> R) -> R {
    match fault {
        Some(f) => inject(f, body),
        None => body(),
    }
}

pub(crate) fn active(fault: Fault) -> bool {
    ACTIVE.with(|a| a.get()) == Some(fault)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scoped_to_closure() {
        assert!(!active(Fault::TorsionSign));
        inject(Fault::TorsionSign, || {
            assert!(active(Fault::TorsionSign));
            assert!(!active(Fault::BinomialWeight));
        });
        assert!(!active(Fault::TorsionSign));
    }
}
