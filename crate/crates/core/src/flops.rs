//! Arithmetic instrumentation.
//!
//! The update kernels are written once against [`Scalar`]. Instantiated with `f64` they compile
//! to plain arithmetic; instantiated with [`Counted`] every add, subtract, multiply and divide is
//! tallied in a thread-local [`OpCounter`]. Fused operations are never used, and negation never
//! appears in a kernel, so the tally is exactly the number of IEEE operations performed.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use serde::Serialize;

/// The arithmetic a kernel is allowed to use.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} flops ({} add, {} sub, {} mul, {} div)",
            self.total(),
            self.adds,
            self.subs,
            self.muls,
            self.divs
        )
    }
}

thread_local! {
    static COUNTER: Cell<OpCounter> = const { Cell::new(OpCounter { adds: 0, subs: 0, muls: 0, divs: 0 }) };
}

fn bump(f: impl FnOnce(&mut OpCounter)) {
    COUNTER.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// Runs `f` and returns the operations performed on [`Counted`] values on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounter) {
    let saved = COUNTER.with(|c| c.replace(OpCounter::default()));
    let out = f();
    let ops = COUNTER.with(|c| c.replace(saved));
    (out, ops)
}

/// An `f64` that reports each arithmetic operation to the thread's [`OpCounter`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl Scalar for Counted {
    fn from_f64(v: f64) -> Self {
        Counted(v)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
}

impl Add for Counted {
    type Output = Counted;
    fn add(self, rhs: Counted) -> Counted {
        bump(|c| c.adds += 1);
        Counted(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for Counted {
    type Output = Counted;
    fn sub(self, rhs: Counted) -> Counted {
        bump(|c| c.subs += 1);
        Counted(self.0 - rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Counted {
    type Output = Counted;
    fn mul(self, rhs: Counted) -> Counted {
        bump(|c| c.muls += 1);
        Counted(self.0 * rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Counted {
    type Output = Counted;
    fn div(self, rhs: Counted) -> Counted {
        bump(|c| c.divs += 1);
        Counted(self.0 / rhs.0)
    }
}
