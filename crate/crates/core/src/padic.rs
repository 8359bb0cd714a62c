//! p-adic valuations and norms on rationals and vectors, and Haar measures
//! of balls and spheres, plain and power-weighted.
//!
//! Points of `Q_p^n` are rational vectors; norms depend only on valuations,
//! which rational factorization gives exactly, so the digit expansion of a
//! p-adic number is never materialized. Conventions: `B_k` is the ball of
//! radius `p^k` centered at 0, `S_k` its boundary sphere, `|B_0| = 1`,
//! `|B_k| = p^{nk}`, `|S_k| = p^{nk}(1 - p^{-n})`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result, Tail};
use crate::scalar::{geometric_tail_sum, rat_pow_of_int, PowExpr, Precision, Scalar};

/// Ambient structure: the prime `p` and the dimension `n` of `Q_p^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PAdicParams {
    p: u32,
    n: u32,
}

impl PAdicParams {
    /// `p` must pass a deterministic primality check and `n >= 1`.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("p = {} is not prime", p)));
        }
        if n < 1 {
            return Err(Error::InvalidParameter(format!(
                "dimension n must be >= 1, got {}",
                n
            )));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.n))
    }

    /// `1 - p^{-n}`, the sphere-to-ball measure ratio.
    pub fn kappa(&self) -> BigRational {
        BigRational::one() - rat_pow_of_int(self.p, -(self.n as i64))
    }
}

/// Deterministic trial division; `u32` range needs divisors up to 2^16 only.
fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Ball/sphere radius exponent: the radius itself is `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RadiusExp(pub i64);

impl From<i64> for RadiusExp {
    fn from(k: i64) -> Self {
        RadiusExp(k)
    }
}

/// Power weight `w(x) = |x|_p^gamma`. Weighted measures and norms require
/// `n + gamma > 0`, enforced at the use sites.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    gamma: BigRational,
}

impl WeightSpec {
    pub fn new(gamma: BigRational) -> Self {
        Self { gamma }
    }

    pub fn unweighted() -> Self {
        Self {
            gamma: BigRational::zero(),
        }
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    /// `n + gamma`, the weighted homogeneity exponent of sphere measures.
    pub fn sphere_exponent(&self, params: &PAdicParams) -> BigRational {
        params.n_rational() + &self.gamma
    }
}

/// The p-adic valuation `k(x)`: `x = (s/t) p^k` with `s, t` coprime to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    /// Valuation of zero.
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }
}

/// Valuation of a rational, by repeated division of numerator and
/// denominator separately (they are coprime, so at most one side divides).
pub fn padic_valuation(x: &BigRational, p: u32) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let vn = int_valuation(x.numer(), p);
    let vd = int_valuation(x.denom(), p);
    Valuation::Finite(vn - vd)
}

fn int_valuation(x: &BigInt, p: u32) -> i64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// `|x|_p = p^{-k(x)}`, with `|0|_p = 0`. Always exact.
pub fn padic_norm(x: &BigRational, p: u32) -> Scalar {
    match padic_valuation(x, p) {
        Valuation::Infinite => Scalar::zero(),
        Valuation::Finite(k) => Scalar::exact(rat_pow_of_int(p, -k)),
    }
}

/// `|x|_p = max_j |x_j|_p` on `Q_p^n`.
pub fn vector_norm(xs: &[BigRational], params: &PAdicParams) -> Result<Scalar> {
    if xs.len() != params.n() as usize {
        return Err(Error::DimensionMismatch {
            expected: params.n() as usize,
            got: xs.len(),
        });
    }
    let mut best = Scalar::zero();
    for x in xs {
        let nx = padic_norm(x, params.p());
        if nx.cmp_value(&best).is_gt() {
            best = nx;
        }
    }
    Ok(best)
}

/// Haar measure of the ball `B_k`: exactly `p^{nk}`.
pub fn ball_measure(k: RadiusExp, params: &PAdicParams) -> Scalar {
    Scalar::exact(rat_pow_of_int(params.p(), params.n() as i64 * k.0))
}

/// Haar measure of the sphere `S_k`: exactly `p^{nk}(1 - p^{-n})`.
pub fn sphere_measure(k: RadiusExp, params: &PAdicParams) -> Scalar {
    Scalar::exact(rat_pow_of_int(params.p(), params.n() as i64 * k.0) * params.kappa())
}

/// Weighted sphere measure `int_{S_k} |x|_p^gamma dx = p^{k(n+gamma)}(1 - p^{-n})`.
///
/// Exact when `k(n+gamma)` is an integer; otherwise demotes to `Approx`
/// (readable off the returned mode).
pub fn sphere_weighted_measure(
    k: RadiusExp,
    weight: &WeightSpec,
    params: &PAdicParams,
    prec: Precision,
) -> Scalar {
    sphere_weighted_monomial(k, weight, params).to_scalar(prec)
}

/// The same measure kept in monomial form, for exact comparisons.
pub(crate) fn sphere_weighted_monomial(
    k: RadiusExp,
    weight: &WeightSpec,
    params: &PAdicParams,
) -> PowExpr {
    let s = weight.sphere_exponent(params);
    PowExpr::new(
        params.p(),
        params.kappa(),
        s * BigRational::from_integer(BigInt::from(k.0)),
    )
}

/// Weighted ball measure `sum_{j <= k}` of the weighted sphere measures,
/// in closed form `p^{k(n+gamma)} (1-p^{-n}) / (1-p^{-(n+gamma)})`.
///
/// Diverges unless `n + gamma > 0`.
pub fn ball_weighted_measure(
    k: RadiusExp,
    weight: &WeightSpec,
    params: &PAdicParams,
    prec: Precision,
) -> Result<Scalar> {
    let s = weight.sphere_exponent(params);
    if !s.is_positive() {
        return Err(Error::DivergentNorm {
            tail: Tail::Inner,
            detail: format!("weighted ball measure requires n + gamma > 0, got {}", s),
        });
    }
    let first = sphere_weighted_measure(k, weight, params, prec);
    let ratio = PowExpr::new(params.p(), BigRational::one(), -s).to_scalar(prec);
    geometric_tail_sum(&ratio, &first)
}
