//! Bessel functions of the first kind for integer order.
//!
//! Small arguments with low order use the ascending power series; everything
//! else goes through Miller's downward recurrence normalized with
//! `J_0 + 2 Σ J_{2k} = 1`.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: i32 = 64;

/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 10.0;

const SERIES_MAX_X: f64 = 2.0;
const SERIES_MAX_ORDER: usize = 8;
const RESCALE_THRESHOLD: f64 = 1e200;

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Domain(format!(
            "Bessel argument must lie in [0, {MAX_ARGUMENT}], got {x}"
        )));
    }
    Ok(())
}

fn check_order(n: i32) -> Result<()> {
    if n.abs() > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order must satisfy |n| <= {MAX_ORDER}, got {n}"
        )));
    }
    Ok(())
}

/// `J_n(x)` for integer `n` with `|n| <= 64` and `0 <= x <= 10`.
///
/// Negative orders use `J_{-n}(x) = (-1)^n J_n(x)`, so the parity relation
/// holds bit for bit.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    check_order(n)?;
    check_argument(x)?;
    let order = n.unsigned_abs() as usize;
    let value = bessel_j_nonneg(order, x);
    Ok(if n < 0 && order % 2 == 1 { -value } else { value })
}

/// `J'_n(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`.
pub fn bessel_j_derivative(n: i32, x: f64) -> Result<f64> {
    check_order(n)?;
    check_order(n - 1)?;
    check_order(n + 1)?;
    Ok(0.5 * (bessel_j(n - 1, x)? - bessel_j(n + 1, x)?))
}

/// `J_0(x) ..= J_{n_max}(x)` from a single downward recurrence.
pub fn bessel_j_table(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if n_max > MAX_ORDER as usize {
        return Err(Error::Domain(format!(
            "table order must not exceed {MAX_ORDER}, got {n_max}"
        )));
    }
    check_argument(x)?;
    let mut table = if x == 0.0 {
        let mut t = vec![0.0; n_max + 1];
        t[0] = 1.0;
        t
    } else {
        miller_table(n_max, x)
    };
    if x < SERIES_MAX_X {
        for (order, slot) in table.iter_mut().enumerate().take(SERIES_MAX_ORDER + 1) {
            *slot = power_series(order, x);
        }
    }
    Ok(table)
}

fn bessel_j_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if (x < SERIES_MAX_X && n <= SERIES_MAX_ORDER) || x < 1e-20 {
        power_series(n, x)
    } else {
        miller_single(n, x)
    }
}

fn power_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= -q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller_start(n: usize, x: f64) -> usize {
    let anchor = (n as f64).max(x.ceil());
    let start = anchor as usize + 20 + (40.0 * anchor.max(1.0)).sqrt() as usize;
    start + start % 2
}

fn miller_single(n: usize, x: f64) -> f64 {
    let start = miller_start(n, x);
    let two_over_x = 2.0 / x;
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut norm = 2.0 * cur;
    let mut result = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order == n {
            result = cur;
        }
        if order == 0 {
            norm += cur;
        } else if order % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_THRESHOLD {
            let s = 1.0 / RESCALE_THRESHOLD;
            cur *= s;
            next *= s;
            norm *= s;
            result *= s;
        }
    }
    result / norm
}

fn miller_table(n_max: usize, x: f64) -> Vec<f64> {
    let start = miller_start(n_max, x);
    let two_over_x = 2.0 / x;
    let mut values = vec![0.0; start + 2];
    values[start] = 1e-30;
    let mut norm = 2.0 * values[start];
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * values[k] - values[k + 1];
        values[k - 1] = prev;
        let order = k - 1;
        if order == 0 {
            norm += prev;
        } else if order % 2 == 0 {
            norm += 2.0 * prev;
        }
        if prev.abs() > RESCALE_THRESHOLD {
            let s = 1.0 / RESCALE_THRESHOLD;
            for v in &mut values[k - 1..] {
                *v *= s;
            }
            norm *= s;
        }
    }
    values.truncate(n_max + 1);
    values.iter_mut().for_each(|v| *v /= norm);
    values
}
