//! Rational interval arithmetic and real root isolation.
//!
//! The exact layer of the crate: sign decisions and embedding enclosures are
//! made with intervals whose endpoints are arbitrary-precision rationals, so
//! they can be refined until a decision is unambiguous. Roots of the minimal
//! polynomial are isolated with Sturm sequences and narrowed by bisection.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::numutil::{rat_sign, rat_to_f64};

/// A closed interval with rational endpoints, lo <= hi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if unambiguous: 1 (all positive), -1 (all negative), 0 otherwise.
    pub fn definite_sign(&self) -> i32 {
        if self.lo.is_positive() {
            1
        } else if self.hi.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn scale(&self, c: &BigRational) -> RatInterval {
        if c.is_negative() {
            RatInterval::new(&self.hi * c, &self.lo * c)
        } else {
            RatInterval::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        RatInterval::new(lo, hi)
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }
}

/// Polynomial with rational coefficients, ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        QPoly { coeffs }
    }

    pub fn from_int(coeffs: &[BigInt]) -> Self {
        QPoly::new(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Interval evaluation by Horner with interval arithmetic.
    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&RatInterval::point(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.degree() == 0 {
            return QPoly::new(vec![BigRational::zero()]);
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean remainder of self by other (other non-zero).
    pub fn rem(&self, other: &QPoly) -> QPoly {
        assert!(!other.is_zero());
        let d = other.degree();
        if d == 0 {
            return QPoly::new(vec![BigRational::zero()]);
        }
        let lead = other.coeffs[d].clone();
        let mut r = self.coeffs.clone();
        while r.len() > d {
            let top = r.len() - 1;
            let f = &r[top] / &lead;
            if !f.is_zero() {
                for i in 0..=d {
                    let t = &f * &other.coeffs[i];
                    r[top - d + i] -= t;
                }
            }
            r.pop();
        }
        QPoly::new(r)
    }
}

/// Sturm chain of a squarefree polynomial.
pub struct SturmChain {
    chain: Vec<QPoly>,
}

impl SturmChain {
    pub fn new(p: &QPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[k - 2].rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(QPoly::new(r.coeffs.iter().map(|c| -c.clone()).collect()));
        }
        SturmChain { chain }
    }

    fn variations_at(&self, x: &BigRational) -> usize {
        let mut last = 0i32;
        let mut v = 0usize;
        for p in &self.chain {
            let s = rat_sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        let va = self.variations_at(a);
        let vb = self.variations_at(b);
        va.saturating_sub(vb)
    }
}

/// Cauchy bound: all real roots lie in [-b, b].
pub fn root_bound(p: &QPoly) -> BigRational {
    let d = p.degree();
    let lead = p.coeffs[d].clone();
    let mut m = BigRational::zero();
    for c in &p.coeffs[..d] {
        let a = (c / &lead).abs();
        if a > m {
            m = a;
        }
    }
    m + BigRational::one()
}

/// Isolates all real roots of a squarefree polynomial.
///
/// Returns disjoint isolating intervals in increasing order, each containing
/// exactly one real root.
pub fn isolate_real_roots(p: &QPoly) -> Vec<RatInterval> {
    let chain = SturmChain::new(p);
    let b = root_bound(p);
    let mut stack = vec![RatInterval::new(-b.clone(), b)];
    let mut found = Vec::new();
    while let Some(iv) = stack.pop() {
        let k = chain.count_roots(&iv.lo, &iv.hi);
        if k == 0 {
            continue;
        }
        if k == 1 {
            found.push(iv);
            continue;
        }
        let mid = iv.midpoint();
        // nudge off a root: an exact hit would make one side open-ended
        let mid = if p.eval(&mid).is_zero() {
            (&mid + &iv.hi) / BigRational::from_integer(BigInt::from(2))
        } else {
            mid
        };
        stack.push(RatInterval::new(iv.lo.clone(), mid.clone()));
        stack.push(RatInterval::new(mid, iv.hi.clone()));
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    found
}

/// Narrows an isolating interval by bisection until its width is below 2^-bits.
///
/// The polynomial must have exactly one simple root in the interval and
/// opposite signs at the endpoints are established internally.
pub fn refine_root(p: &QPoly, iv: &RatInterval, bits: u32) -> RatInterval {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let mut s_lo = rat_sign(&p.eval(&lo));
    if s_lo == 0 {
        return RatInterval::point(lo);
    }
    let s_hi = rat_sign(&p.eval(&hi));
    if s_hi == 0 {
        return RatInterval::point(hi);
    }
    debug_assert!(s_lo != s_hi, "not a sign-changing isolating interval");
    while &hi - &lo > target {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let s_mid = rat_sign(&p.eval(&mid));
        if s_mid == 0 {
            return RatInterval::point(mid);
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
            let _ = s_lo;
            s_lo = -s_hi;
        }
    }
    RatInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::rat_from_i64;

    fn poly(v: &[i64]) -> QPoly {
        QPoly::new(v.iter().map(|&x| rat_from_i64(x)).collect())
    }

    #[test]
    fn sturm_counts_roots() {
        // x^2 - x - 1: roots ~ 1.618, -0.618
        let p = poly(&[-1, -1, 1]);
        let chain = SturmChain::new(&p);
        assert_eq!(chain.count_roots(&rat_from_i64(-10), &rat_from_i64(10)), 2);
        assert_eq!(chain.count_roots(&rat_from_i64(0), &rat_from_i64(10)), 1);
    }

    #[test]
    fn isolates_golden_ratio_roots() {
        let p = poly(&[-1, -1, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 2);
        let r1 = refine_root(&p, &roots[1], 80);
        let mid = r1.mid_f64();
        assert!((mid - 1.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn isolates_cubic_roots() {
        // x^3 - x^2 - 2x + 1, all roots real (-2cos(2pi k/7))
        let p = poly(&[1, -2, -1, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        let vals: Vec<f64> = roots
            .iter()
            .map(|iv| refine_root(&p, iv, 60).mid_f64())
            .collect();
        assert!((vals[0] + 1.246979603717467).abs() < 1e-10);
        assert!((vals[1] - 0.44504186791262884).abs() < 1e-10);
        assert!((vals[2] - 1.8019377358048383).abs() < 1e-10);
    }

    #[test]
    fn no_real_roots_for_definite_poly() {
        let p = poly(&[1, 0, 1]); // x^2 + 1
        assert!(isolate_real_roots(&p).is_empty());
    }

    #[test]
    fn interval_refinement_width() {
        let p = poly(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p);
        let r = refine_root(&p, &roots[1], 128);
        let w = r.width();
        assert!(w <= BigRational::new(BigInt::one(), BigInt::one() << 128));
        let prod = r.mul(&r);
        assert!(prod.contains(&rat_from_i64(2)));
    }
}
