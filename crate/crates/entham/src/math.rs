//! Small combinatorial helpers shared by the calculators.

use num_bigint::BigUint;
use num_traits::One;

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// log2(n!) by direct summation.
pub fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k)
}

/// Exact binomial coefficient, saturating at u128::MAX.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i as u64;
    }
    acc
}

pub fn factorial_u64(n: usize) -> u64 {
    (2..=n as u64).product()
}

/// log2 of a big integer, exact enough for reporting.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top = x >> shift;
    let v: u64 = top.iter_u64_digits().next().unwrap_or(0);
    (v as f64).log2() + shift as f64
}

/// Advances `c` to the next k-combination of 0..n in lexicographic order.
pub fn next_combination(c: &mut [u32], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if (c[i] as usize) < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every k-combination of 0..n in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[u32])) {
    if k > n {
        return;
    }
    let mut c: Vec<u32> = (0..k as u32).collect();
    loop {
        f(&c);
        if !next_combination(&mut c, n) {
            break;
        }
    }
}

/// Calls `f` on every ordering of `items`, in lexicographic order of positions.
pub fn for_each_permutation(items: &[u32], mut f: impl FnMut(&[u32])) {
    let mut p = items.to_vec();
    p.sort_unstable();
    loop {
        f(&p);
        // next lexicographic permutation
        let len = p.len();
        if len < 2 {
            return;
        }
        let mut i = len - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        let mut j = len - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}
