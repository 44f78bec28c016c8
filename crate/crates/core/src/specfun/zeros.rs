use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use super::bessel::{bessel_j_unchecked, j_and_derivative};
use crate::error::{domain, Result};

// Zeros memoized per order (keyed by the bit pattern of the order), grown on demand.
static ZERO_TABLE: OnceLock<RwLock<HashMap<u64, Vec<f64>>>> = OnceLock::new();

fn table() -> &'static RwLock<HashMap<u64, Vec<f64>>> {
    ZERO_TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// k-th positive zero `j_{index,k}` of `J_index`, `k >= 1`.
pub fn bessel_zero(index: f64, k: usize) -> Result<f64> {
    Ok(bessel_zeros(index, k)?[k - 1])
}

/// First `count` positive zeros of `J_index`, ascending.
pub fn bessel_zeros(index: f64, count: usize) -> Result<Vec<f64>> {
    if !(index >= 0.0) || !index.is_finite() {
        return domain(format!("bessel_zero: order must be finite and >= 0, got {index}"));
    }
    if count == 0 {
        return domain("bessel_zero: k must be >= 1");
    }
    let key = index.to_bits();
    {
        let guard = table().read().unwrap_or_else(|e| e.into_inner());
        if let Some(zeros) = guard.get(&key) {
            if zeros.len() >= count {
                return Ok(zeros[..count].to_vec());
            }
        }
    }
    let mut guard = table().write().unwrap_or_else(|e| e.into_inner());
    let zeros = guard.entry(key).or_default();
    while zeros.len() < count {
        let k = zeros.len() + 1;
        let prev = zeros.last().copied();
        zeros.push(locate_zero(index, k, prev));
    }
    Ok(zeros[..count].to_vec())
}

/// McMahon's large-k expansion of `j_{ν,k}`.
pub(crate) fn mcmahon(index: f64, k: usize) -> f64 {
    let mu = 4.0 * index * index;
    let beta = (k as f64 + 0.5 * index - 0.25) * PI;
    let b8 = 8.0 * beta;
    let m1 = mu - 1.0;
    beta - m1 / b8
        - 4.0 * m1 * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * m1 * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

fn locate_zero(index: f64, k: usize, prev: Option<f64>) -> f64 {
    let floor = prev.map_or(1e-6, |p| p + 1e-6);
    let guess = mcmahon(index, k);
    let mut lo = (guess - 0.5 * PI).max(floor);
    let mut hi = (guess + 0.5 * PI).max(lo + 0.5 * PI);
    let mut f_lo = bessel_j_unchecked(index, lo);
    let f_hi = bessel_j_unchecked(index, hi);
    if f_lo * f_hi > 0.0 {
        // expansion too crude here; scan forward from the previous zero
        let step = 0.05;
        lo = floor;
        f_lo = bessel_j_unchecked(index, lo);
        loop {
            hi = lo + step;
            if f_lo * bessel_j_unchecked(index, hi) <= 0.0 {
                break;
            }
            lo = hi;
            f_lo = bessel_j_unchecked(index, lo);
        }
    }
    // bisect to a narrow bracket, then polish with Newton inside it
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let f_mid = bessel_j_unchecked(index, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let width = hi - lo;
    let (lo, hi) = (lo - width, hi + width);
    for _ in 0..20 {
        let (j, dj) = j_and_derivative(index, x);
        if dj == 0.0 {
            break;
        }
        let next = x - j / dj;
        if !(next > lo && next < hi) {
            break;
        }
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x;
        x = next;
        if done {
            break;
        }
    }
    x
}
