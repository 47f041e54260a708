use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

/// J_ν(x) for integer ν ≥ 0 and x ≥ 0 by Miller's backward recurrence,
/// normalised with J₀ + 2ΣJ₂ₖ = 1.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x < 1e-8 {
        // Leading series term.
        let mut term = 1.0;
        for k in 1..=nu {
            term *= x / (2.0 * k as f64);
        }
        return term;
    }
    let n = nu as usize;
    let top = n.max(x.ceil() as usize);
    let mut m = top + 20 + (40.0 * top as f64).sqrt() as usize;
    m += m % 2;
    let (mut j_next, mut j) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=m).rev() {
        let j_prev = 2.0 * k as f64 / x * j - j_next;
        j_next = j;
        j = j_prev;
        // `j` now holds J_{k-1}.
        if k - 1 == n {
            result = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    norm += j;
    result / norm
}

fn cache() -> &'static RwLock<HashMap<(u32, u32), f64>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// n-th positive zero of J_|l|, memoised.
pub fn bessel_zero(l: i32, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidMode("Bessel zero index n must be >= 1".into()));
    }
    let key = (l.unsigned_abs(), n);
    if let Some(z) = cache().read().expect("bessel cache poisoned").get(&key) {
        return Ok(*z);
    }
    let z = find_zero(key.0, n);
    cache().write().expect("bessel cache poisoned").insert(key, z);
    Ok(z)
}

fn find_zero(nu: u32, n: u32) -> f64 {
    const STEP: f64 = 0.1;
    // J_ν has no positive zero below ν.
    let mut a = (nu as f64).max(STEP);
    let mut fa = bessel_j(nu, a);
    let mut found = 0;
    loop {
        let b = a + STEP;
        let fb = bessel_j(nu, b);
        if fa == 0.0 {
            found += 1;
            if found == n {
                return a;
            }
        } else if fa * fb < 0.0 {
            found += 1;
            if found == n {
                return bisect(nu, a, b, fa);
            }
        }
        a = b;
        fa = fb;
    }
}

fn bisect(nu: u32, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-14 * b.max(1.0) {
        let mid = 0.5 * (a + b);
        let fm = bessel_j(nu, mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}
