//! Hafnian of a complex symmetric matrix.
//!
//! Recursive expansion along the lowest remaining index: the lowest index is
//! paired with every other remaining index and the rest is expanded again.
//! Sub-results are memoized on the bitmask of remaining indices once the
//! matrix is large enough for sharing to pay off.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MEMO_MIN_DIM: usize = 12;
const MAX_DIM: usize = 64;

pub fn hafnian(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(hafnian_unchecked(m))
}

/// Hafnian without the shape checks; odd dimension gives 0.
pub(crate) fn hafnian_unchecked(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    assert!(n <= MAX_DIM, "hafnian dimension {n} exceeds {MAX_DIM}");
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if n < MEMO_MIN_DIM {
        expand(m, full)
    } else {
        let mut memo = HashMap::new();
        expand_memo(m, full, &mut memo)
    }
}

fn expand(m: &DMatrix<Complex64>, mask: u64) -> Complex64 {
    if mask == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & (mask - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut partners = rest;
    while partners != 0 {
        let j = partners.trailing_zeros() as usize;
        partners &= partners - 1;
        let w = m[(i, j)];
        if w != Complex64::new(0.0, 0.0) {
            acc += w * expand(m, rest & !(1u64 << j));
        }
    }
    acc
}

fn expand_memo(m: &DMatrix<Complex64>, mask: u64, memo: &mut HashMap<u64, Complex64>) -> Complex64 {
    if mask.count_ones() < MEMO_MIN_DIM as u32 {
        return expand(m, mask);
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & (mask - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut partners = rest;
    while partners != 0 {
        let j = partners.trailing_zeros() as usize;
        partners &= partners - 1;
        let w = m[(i, j)];
        if w != Complex64::new(0.0, 0.0) {
            acc += w * expand_memo(m, rest & !(1u64 << j), memo);
        }
    }
    memo.insert(mask, acc);
    acc
}
