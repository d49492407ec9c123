//! Multiply-add counter for the DG assembly loops.
//!
//! The counter tracks only the coefficient-assembly work (volume quadrature
//! sums, face moment sums, and face scatter), which is the part that scales
//! with the number of output modes; trace evaluation and flux formulas are
//! shared between the two operator levels and are not counted.

use std::cell::Cell;

thread_local! {
    static MADD_COUNT: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn add(n: u64) {
    MADD_COUNT.with(|c| c.set(c.get() + n));
}

pub fn reset() {
    MADD_COUNT.with(|c| c.set(0));
}

pub fn get() -> u64 {
    MADD_COUNT.with(|c| c.get())
}
