//! Small integer and rational helpers shared across the crate.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::Integer;

/// Floor of the integer square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// Tests whether `n` is a perfect square, returning the root if so.
pub fn perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n);
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Tests whether a rational is the square of a rational, returning the root.
pub fn perfect_square_rational(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = perfect_square(q.numer())?;
    let d = perfect_square(q.denom())?;
    Some(BigRational::new(n, d))
}

/// Squarefree factorization n = f^2 * d with d squarefree (n > 0).
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive());
    let mut f = BigInt::one();
    let mut d = n.clone();
    let mut p = BigInt::from(2u32);
    // trial division is enough at the scales this crate works with
    while &p * &p * &p * &p <= *n || &p * &p <= d {
        let p2 = &p * &p;
        while (&d % &p2).is_zero() {
            d /= &p2;
            f *= &p;
        }
        p += 1u32;
    }
    (f, d)
}

/// Prime factorization of a positive integer by trial division.
///
/// Returns (prime, exponent) pairs in increasing prime order. Intended for
/// the desk-scale integers arising from element norms and ideal norms.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n.is_positive(), "factor_integer requires a positive integer");
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2u32);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            let mut e = 0u32;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

/// Primes dividing numerator or denominator of a non-zero rational.
pub fn rational_prime_support(q: &BigRational) -> Vec<BigInt> {
    let mut primes = Vec::new();
    for part in [q.numer().abs(), q.denom().clone()] {
        if part.is_one() || part.is_zero() {
            continue;
        }
        for (p, _) in factor_integer(&part) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort();
    primes
}

/// p-adic valuation of a non-zero integer.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    assert!(!n.is_zero());
    let mut v = 0i64;
    let mut m = n.abs();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of a non-zero rational.
pub fn rat_valuation(q: &BigRational, p: &BigInt) -> i64 {
    int_valuation(q.numer(), p) - int_valuation(q.denom(), p)
}

/// Parses "p/q" or "p" into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Renders a rational as "p" or "p/q".
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(qs: &[BigRational]) -> BigInt {
    let mut l = BigInt::one();
    for q in qs {
        l = l.lcm(q.denom());
    }
    l
}

/// Exact conversion of a rational to f64 (nearest), safe for desk-scale values.
pub fn rat_to_f64(q: &BigRational) -> f64 {
    // num's ToPrimitive on BigRational is correctly rounded for values
    // representable in f64 range, which covers everything this crate emits.
    use num::ToPrimitive;
    q.to_f64().expect("rational out of f64 range")
}

pub fn big_to_f64(n: &BigInt) -> f64 {
    use num::ToPrimitive;
    n.to_f64().expect("integer out of f64 range")
}

pub fn rat_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sign of a rational as -1, 0, or 1.
pub fn rat_sign(q: &BigRational) -> i32 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        let (f, d) = squarefree_decompose(&BigInt::from(40u32));
        assert_eq!(f, BigInt::from(2u32));
        assert_eq!(d, BigInt::from(10u32));
        let (f, d) = squarefree_decompose(&BigInt::from(5u32));
        assert_eq!(f, BigInt::one());
        assert_eq!(d, BigInt::from(5u32));
    }

    #[test]
    fn factorization_roundtrip() {
        let n = BigInt::from(2u32 * 2 * 3 * 5 * 5 * 41);
        let fs = factor_integer(&n);
        let mut m = BigInt::one();
        for (p, e) in fs {
            m *= p.pow(e);
        }
        assert_eq!(m, n);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4"), Some(BigRational::new(3.into(), 4.into())));
        assert_eq!(parse_rational("-7"), Some(rat_from_i64(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&BigRational::new(6.into(), (-4).into())), "-3/2");
    }

    #[test]
    fn valuations() {
        let p = BigInt::from(5u32);
        assert_eq!(rat_valuation(&BigRational::new(50.into(), 4.into()), &p), 2);
        assert_eq!(rat_valuation(&BigRational::new(3.into(), 25.into()), &p), -2);
    }
}

/// Determinant of a small dense f64 matrix by partial-pivot elimination.
pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        if a[p][c].abs() < 1e-300 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    det
}

/// Inverse of a small dense f64 matrix; `None` when numerically singular.
pub fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c];
        for j in 0..n {
            a[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r][c];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    Some(inv)
}
