//! Truncated power series in one variable, as coefficient vectors.

use crate::poly::{C64, ZERO};

pub(crate) fn mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reciprocal of a series with nonzero constant term.
pub(crate) fn inv(a: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    let i0 = a[0].inv();
    out[0] = i0;
    for n in 1..len {
        let mut s = ZERO;
        for k in 1..=n.min(a.len() - 1) {
            s += a[k] * out[n - k];
        }
        out[n] = -s * i0;
    }
    out
}

pub(crate) fn pow(a: &[C64], k: usize, len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    out[0] = crate::poly::ONE;
    for _ in 0..k {
        out = mul(&out, a, len);
    }
    out
}

/// `Σ uᵢ sⁱ` for a series `s` without constant term.
pub(crate) fn substitute(u: &[C64], s: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    let mut sk = vec![ZERO; len];
    sk[0] = crate::poly::ONE;
    for (k, &uk) in u.iter().enumerate() {
        if k > 0 {
            sk = mul(&sk, s, len);
            if sk.iter().all(|&c| c == ZERO) {
                break;
            }
        }
        if uk != ZERO {
            for i in 0..len {
                out[i] += uk * sk[i];
            }
        }
    }
    out
}
