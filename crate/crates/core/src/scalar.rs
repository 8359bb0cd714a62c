//! Numeric substrate: exact rationals with a demotable high-precision mode,
//! and exact `p`-power monomials.
//!
//! [`Scalar`] is either `Exact` (a big rational, closed under `+ - * /` and
//! integer powers) or `Approx` (a rational approximant carrying at least a
//! stated number of significant decimal digits). The only lossy primitive is
//! root extraction: [`Scalar::pow_rational`] stays exact for integer
//! exponents and for perfect powers, and otherwise demotes to `Approx` at the
//! precision supplied by the caller. The mode of a value is the demotion
//! flag; callers read it through [`Scalar::is_exact`].
//!
//! [`PowExpr`] represents `coefficient * p^exponent` with exact rational
//! coefficient and exponent. Products of same-base monomials are exact, and
//! two monomials compare exactly by cross-powering, so suprema over `p`-power
//! grids can be resolved without ever leaving the rational field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of significant decimal digits carried by demoted values.
///
/// Passed explicitly wherever an operation may demote; there is no global
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 60;
    /// Below this the tolerance derivations in `verify` stop making sense.
    pub const MIN_DIGITS: u32 = 12;

    pub fn new(digits: u32) -> Self {
        Self {
            digits: digits.max(Self::MIN_DIGITS),
        }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

/// An exact rational or a rational approximant with tracked precision.
#[derive(Debug, Clone)]
pub enum Scalar {
    /// Exact value; arithmetic on exact scalars never loses information.
    Exact(BigRational),
    /// Approximant accurate to at least `digits` significant decimal digits.
    Approx { value: BigRational, digits: u32 },
}

/// Extra digits kept when trimming oversized approximants.
const TRIM_GUARD: u32 = 10;

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn exact(value: BigRational) -> Self {
        Scalar::Exact(value)
    }

    pub fn approx(value: BigRational, digits: u32) -> Self {
        Scalar::Approx { value, digits }
    }

    /// The underlying rational: the value itself in `Exact` mode, the
    /// approximant in `Approx` mode.
    pub fn value(&self) -> &BigRational {
        match self {
            Scalar::Exact(v) => v,
            Scalar::Approx { value, .. } => value,
        }
    }

    pub fn into_value(self) -> BigRational {
        match self {
            Scalar::Exact(v) => v,
            Scalar::Approx { value, .. } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Significant digits of an `Approx` value; `None` for exact values.
    pub fn digits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx { digits, .. } => Some(*digits),
        }
    }

    fn digits_or_max(&self) -> u32 {
        self.digits().unwrap_or(u32::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.value().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.value().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.value().is_negative()
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Total order on values; mixed exact/approx pairs compare through the
    /// approximant, which is the exact operand promoted at full precision.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        self.value().cmp(other.value())
    }

    /// Build an `Approx` scalar, trimming the approximant if its bignum
    /// representation has grown far past what `digits` justifies.
    fn approx_trimmed(value: BigRational, digits: u32) -> Scalar {
        let keep_digits = digits.min(Precision::DEFAULT_DIGITS * 50) + TRIM_GUARD;
        // ~3.33 bits per decimal digit, kept on each side of the fraction
        let keep_bits = (keep_digits as u64 * 10) / 3;
        let nb = value.numer().bits();
        let db = value.denom().bits();
        if nb + db <= 2 * keep_bits + 32 {
            return Scalar::Approx { value, digits };
        }
        // drop a common power of two: cheap and preserves the value to a
        // relative error below 2^{1-keep_bits}
        let drop = (nb.saturating_sub(keep_bits)).min(db.saturating_sub(keep_bits));
        if drop > 0 {
            let trimmed =
                BigRational::new_raw(value.numer() >> drop, value.denom() >> drop);
            return Scalar::Approx {
                value: trimmed,
                digits,
            };
        }
        // lopsided fraction (huge integer part or tiny magnitude): fall back
        // to decimal rounding
        Scalar::Approx {
            value: round_to_digits(&value, keep_digits),
            digits,
        }
    }

    /// Exact operands use the canonical reducing operators; approximants use
    /// raw (non-reducing) fraction arithmetic, which is value-correct under
    /// num-rational's comparison semantics and skips per-op gcd work. Size
    /// control comes from `approx_trimmed` instead.
    fn combine(
        &self,
        other: &Scalar,
        exact_op: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        raw_op: impl FnOnce(&BigRational, &BigRational) -> BigRational,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact_op(a, b)),
            _ => {
                let digits = self.digits_or_max().min(other.digits_or_max());
                Scalar::approx_trimmed(raw_op(self.value(), other.value()), digits)
            }
        }
    }

    /// Integer power, exactness-preserving. `0^0 = 1` by the integer-power
    /// convention; use [`Scalar::pow_rational`] for the guarded form.
    pub fn pow_int(&self, exp: i64) -> Result<Scalar> {
        if self.is_zero() && exp < 0 {
            return Err(Error::Domain("0 raised to a negative power".into()));
        }
        let v = rat_pow(self.value(), exp);
        Ok(match self {
            Scalar::Exact(_) => Scalar::Exact(v),
            Scalar::Approx { digits, .. } => Scalar::approx_trimmed(v, *digits),
        })
    }

    /// `self^exp` for rational `exp`.
    ///
    /// Exact whenever `exp` is an integer or the base is a perfect power for
    /// the denominator of `exp`; otherwise demotes to `Approx` at `prec`.
    /// Negative base with fractional exponent and `0^e` with `e <= 0` are
    /// domain errors.
    pub fn pow_rational(&self, exp: &BigRational, prec: Precision) -> Result<Scalar> {
        if self.is_zero() {
            if exp.is_positive() {
                return Ok(match self {
                    Scalar::Exact(_) => Scalar::zero(),
                    Scalar::Approx { digits, .. } => Scalar::Approx {
                        value: BigRational::zero(),
                        digits: *digits,
                    },
                });
            }
            return Err(Error::Domain(format!(
                "0 raised to the power {} is undefined",
                exp
            )));
        }
        if exp.is_integer() {
            let e = exp
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Domain("integer exponent magnitude too large".into()))?;
            return self.pow_int(e);
        }
        if self.is_negative() {
            return Err(Error::Domain(format!(
                "negative base {} under fractional exponent {}",
                self.value(),
                exp
            )));
        }
        let a = exp
            .numer()
            .to_i64()
            .ok_or_else(|| Error::Domain("exponent numerator too large".into()))?;
        let b = exp
            .denom()
            .to_u32()
            .ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
        let y = rat_pow(self.value(), a);
        match self {
            Scalar::Exact(_) => {
                if let Some(root) = perfect_nth_root(&y, b) {
                    Ok(Scalar::Exact(root))
                } else {
                    let digits = prec.digits();
                    Ok(Scalar::Approx {
                        value: nth_root_approx(&y, b, digits),
                        digits,
                    })
                }
            }
            Scalar::Approx { digits, .. } => {
                let d = (*digits).min(prec.digits());
                Ok(Scalar::Approx {
                    value: nth_root_approx(&y, b, d),
                    digits: d,
                })
            }
        }
    }

    /// Reciprocal; error on zero.
    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(match self {
            Scalar::Exact(v) => Scalar::Exact(v.recip()),
            Scalar::Approx { value, digits } => {
                Scalar::approx_trimmed(raw_recip(value), *digits)
            }
        })
    }

    /// Decimal rendering rounded to `digits` significant digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        decimal_string(self.value(), digits)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.value() == other.value()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

// Exact values print as canonical rationals, approximants as decimals at
// their carried precision.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(v) => write!(f, "{}", format_rational(v)),
            Scalar::Approx { value, digits } => {
                write!(f, "{}", decimal_string(value, *digits))
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<u32> for Scalar {
    fn from(v: u32) -> Self {
        Scalar::from_int(v as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::Exact(v)
    }
}

/// Non-reducing fraction arithmetic; denominators stay positive.
fn raw_add(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new_raw(
        a.numer() * b.denom() + b.numer() * a.denom(),
        a.denom() * b.denom(),
    )
}

fn raw_sub(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new_raw(
        a.numer() * b.denom() - b.numer() * a.denom(),
        a.denom() * b.denom(),
    )
}

fn raw_mul(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new_raw(a.numer() * b.numer(), a.denom() * b.denom())
}

fn raw_div(a: &BigRational, b: &BigRational) -> BigRational {
    assert!(!b.is_zero(), "division by zero");
    let num = a.numer() * b.denom();
    let den = a.denom() * b.numer();
    if den.is_negative() {
        BigRational::new_raw(-num, -den)
    } else {
        BigRational::new_raw(num, den)
    }
}

macro_rules! impl_scalar_binop {
    ($trait:ident, $method:ident, $op:tt, $raw:ident) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.combine(rhs, |a, b| a $op b, $raw)
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

impl_scalar_binop!(Add, add, +, raw_add);
impl_scalar_binop!(Sub, sub, -, raw_sub);
impl_scalar_binop!(Mul, mul, *, raw_mul);
impl_scalar_binop!(Div, div, /, raw_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(v) => Scalar::Exact(-v),
            Scalar::Approx { value, digits } => Scalar::Approx {
                value: -value,
                digits: *digits,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact sum of the geometric series `first_term * ratio^k` over `k >= 0`,
/// i.e. `first_term / (1 - ratio)`. Requires `0 < ratio < 1`.
pub fn geometric_tail_sum(ratio: &Scalar, first_term: &Scalar) -> Result<Scalar> {
    if !ratio.is_positive() {
        return Err(Error::Domain(format!(
            "geometric ratio must be positive, got {}",
            ratio
        )));
    }
    if ratio.value() >= &BigRational::one() {
        return Err(Error::DivergentSeries {
            ratio: ratio.to_string(),
        });
    }
    Ok(first_term / &(Scalar::one() - ratio.clone()))
}

/// `coefficient * base^exponent` with exact rational coefficient and
/// exponent over a fixed integer base `>= 2`.
///
/// Zero is normalized to exponent 0 so that equality is structural.
#[derive(Debug, Clone)]
pub struct PowExpr {
    base: u32,
    coeff: BigRational,
    exp: BigRational,
}

// Equality is by value, consistent with the ordering: `2 * p^1` equals
// `4 * p^0` over base 2. Different bases never compare equal.
impl PartialEq for PowExpr {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.cmp_value(other) == Ordering::Equal
    }
}

impl PowExpr {
    pub fn new(base: u32, coeff: BigRational, exp: BigRational) -> Self {
        assert!(base >= 2, "PowExpr base must be >= 2");
        if coeff.is_zero() {
            Self {
                base,
                coeff,
                exp: BigRational::zero(),
            }
        } else {
            Self { base, coeff, exp }
        }
    }

    pub fn from_rational(base: u32, coeff: BigRational) -> Self {
        Self::new(base, coeff, BigRational::zero())
    }

    pub fn zero(base: u32) -> Self {
        Self::new(base, BigRational::zero(), BigRational::zero())
    }

    pub fn one(base: u32) -> Self {
        Self::new(base, BigRational::one(), BigRational::zero())
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn exp(&self) -> &BigRational {
        &self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn abs(&self) -> PowExpr {
        PowExpr::new(self.base, self.coeff.abs(), self.exp.clone())
    }

    /// Exact product; both operands must share a base.
    pub fn mul(&self, other: &PowExpr) -> PowExpr {
        assert_eq!(self.base, other.base, "PowExpr bases differ");
        PowExpr::new(
            self.base,
            &self.coeff * &other.coeff,
            &self.exp + &other.exp,
        )
    }

    pub fn mul_rational(&self, c: &BigRational) -> PowExpr {
        PowExpr::new(self.base, &self.coeff * c, self.exp.clone())
    }

    /// Multiply by `base^delta`, i.e. shift the exponent.
    pub fn shift_exp(&self, delta: &BigRational) -> PowExpr {
        if self.coeff.is_zero() {
            return self.clone();
        }
        PowExpr::new(self.base, self.coeff.clone(), &self.exp + delta)
    }

    /// Exact integer power. Negative exponents require a nonzero coefficient.
    pub fn pow_int(&self, e: i64) -> PowExpr {
        if self.coeff.is_zero() {
            assert!(e > 0, "0^e requires e > 0 in PowExpr::pow_int");
            return self.clone();
        }
        PowExpr::new(
            self.base,
            rat_pow(&self.coeff, e),
            &self.exp * BigRational::from_integer(BigInt::from(e)),
        )
    }

    /// Exact value comparison by cross-powering to clear the exponent gap.
    pub fn cmp_value(&self, other: &PowExpr) -> Ordering {
        assert_eq!(self.base, other.base, "PowExpr bases differ");
        let (sa, sb) = (rat_sign(&self.coeff), rat_sign(&other.coeff));
        if sa != sb {
            return sa.cmp(&sb);
        }
        match sa {
            0 => Ordering::Equal,
            1 => cmp_positive_monomials(self, other),
            _ => cmp_positive_monomials(&other.abs(), &self.abs()),
        }
    }

    /// Lower to a `Scalar`: exact when the exponent is an integer (or the
    /// power is perfect), otherwise `Approx` at `prec`.
    pub fn to_scalar(&self, prec: Precision) -> Scalar {
        if self.coeff.is_zero() {
            return Scalar::zero();
        }
        let base = Scalar::from_int(self.base as i64);
        let p = base
            .pow_rational(&self.exp, prec)
            .expect("positive base power cannot fail");
        p * Scalar::Exact(self.coeff.clone())
    }
}

impl PartialOrd for PowExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base {
            return None;
        }
        Some(self.cmp_value(other))
    }
}

impl fmt::Display for PowExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_zero() {
            write!(f, "{}", format_rational(&self.coeff))
        } else {
            write!(
                f,
                "{} * {}^({})",
                format_rational(&self.coeff),
                self.base,
                format_rational(&self.exp)
            )
        }
    }
}

fn rat_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Compare `a.coeff * p^a.exp` with `b.coeff * p^b.exp`, both positive:
/// with `delta = b.exp - a.exp = m/d` in lowest terms, the comparison is
/// equivalent to `a.coeff^d  vs  b.coeff^d * p^m`, which is rational.
fn cmp_positive_monomials(a: &PowExpr, b: &PowExpr) -> Ordering {
    let delta = b.exp() - a.exp();
    if delta.is_zero() {
        return a.coeff().cmp(b.coeff());
    }
    let d = delta
        .denom()
        .to_i64()
        .expect("exponent denominator too large");
    let m = delta
        .numer()
        .to_i64()
        .expect("exponent numerator too large");
    let lhs = rat_pow(a.coeff(), d);
    let rhs = rat_pow(b.coeff(), d) * rat_pow_of_int(a.base(), m);
    lhs.cmp(&rhs)
}

/// `base^e` as an exact rational for integer `e` of either sign.
pub fn rat_pow_of_int(base: u32, e: i64) -> BigRational {
    let mag = BigInt::from(base).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new_raw(BigInt::one(), mag)
    }
}

/// Reciprocal keeping the denominator positive; input must be nonzero.
fn raw_recip(r: &BigRational) -> BigRational {
    if r.numer().is_negative() {
        BigRational::new_raw(-r.denom(), -r.numer())
    } else {
        BigRational::new_raw(r.denom().clone(), r.numer().clone())
    }
}

/// `r^e` for integer `e` of either sign; powers preserve reducedness, and
/// for unreduced approximants the result is simply unreduced too.
pub fn rat_pow(r: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let ue = u32::try_from(e.unsigned_abs()).expect("exponent magnitude too large");
    let num = r.numer().pow(ue);
    let den = r.denom().pow(ue);
    let p = BigRational::new_raw(num, den);
    if e < 0 {
        raw_recip(&p)
    } else {
        p
    }
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u32).pow(u32::try_from(e).expect("decimal exponent too large"))
}

/// Largest `E` with `10^E <= |r|`; `r` must be nonzero.
fn decimal_magnitude(r: &BigRational) -> i64 {
    debug_assert!(!r.is_zero());
    let num = r.numer().abs();
    let den = r.denom().clone();
    // bits * log10(2) estimate, then correct by exact comparison
    let approx = (num.bits() as i64 - den.bits() as i64) * 30103 / 100000;
    let mut e = approx;
    while !magnitude_at_least(&num, &den, e) {
        e -= 1;
    }
    while magnitude_at_least(&num, &den, e + 1) {
        e += 1;
    }
    e
}

/// `num/den >= 10^e`?
fn magnitude_at_least(num: &BigInt, den: &BigInt, e: i64) -> bool {
    if e >= 0 {
        *num >= den * pow10(e as u64)
    } else {
        num * pow10((-e) as u64) >= *den
    }
}

/// Round to `digits` significant decimal digits, half away from zero.
pub(crate) fn round_to_digits(r: &BigRational, digits: u32) -> BigRational {
    if r.is_zero() {
        return BigRational::zero();
    }
    let (m, e) = decimal_mantissa(r, digits);
    if e >= 0 {
        BigRational::from_integer(m * pow10(e as u64))
    } else {
        BigRational::new(m, pow10((-e) as u64))
    }
}

/// Signed mantissa/exponent pair with `r ~= m * 10^e` and `|m|` carrying
/// `digits` significant digits (one more if rounding carried over).
fn decimal_mantissa(r: &BigRational, digits: u32) -> (BigInt, i64) {
    debug_assert!(!r.is_zero());
    let digits = digits.max(1);
    let mag = decimal_magnitude(r);
    let shift = digits as i64 - 1 - mag;
    let (num, den) = (r.numer().abs(), r.denom().clone());
    let (sn, sd) = if shift >= 0 {
        (num * pow10(shift as u64), den)
    } else {
        (num, den * pow10((-shift) as u64))
    };
    // round half away from zero
    let m = (2u8 * sn + &sd).div_floor(&(2u8 * &sd));
    let m = if r.is_negative() { -m } else { m };
    (m, -shift)
}

/// Canonical decimal string with `digits` significant digits.
pub fn decimal_string(r: &BigRational, digits: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let (m, e) = decimal_mantissa(r, digits);
    let neg = m.is_negative();
    let mut ms = m.abs().to_string();
    let mut e = e;
    // canonical: strip trailing zeros into the exponent
    while ms.len() > 1 && ms.ends_with('0') {
        ms.pop();
        e += 1;
    }
    let len = ms.len() as i64;
    let point = len + e; // digits before the decimal point
    let body = if e >= 0 && point <= len + 27 {
        // integer with e trailing zeros
        let mut s = ms;
        s.extend(std::iter::repeat('0').take(e as usize));
        s
    } else if point > 0 && point <= len {
        if point == len {
            ms
        } else {
            format!("{}.{}", &ms[..point as usize], &ms[point as usize..])
        }
    } else if point <= 0 && point > -6 {
        format!("0.{}{}", "0".repeat((-point) as usize), ms)
    } else {
        // scientific
        let exp = point - 1;
        if ms.len() == 1 {
            format!("{}e{}", ms, exp)
        } else {
            format!("{}.{}e{}", &ms[..1], &ms[1..], exp)
        }
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

/// Canonical rational rendering: `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"a"` or `"a/b"`. Decimal literals are rejected so precision is
/// never silently lost at an input boundary.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty rational literal".into()));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::InvalidParameter(format!(
            "decimal literals are not accepted, use an integer or a/b form: {:?}",
            s
        )));
    }
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidParameter(format!("invalid integer {:?}", t)))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "zero denominator in {:?}",
                    s
                )));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Exact `r^(1/n)` if both numerator and denominator are perfect `n`-th
/// powers; `r` must be positive.
fn perfect_nth_root(r: &BigRational, n: u32) -> Option<BigRational> {
    debug_assert!(r.is_positive());
    let rn = r.numer().nth_root(n);
    if &rn.pow(n) != r.numer() {
        return None;
    }
    let rd = r.denom().nth_root(n);
    if &rd.pow(n) != r.denom() {
        return None;
    }
    Some(BigRational::new_raw(rn, rd))
}

/// `r^(1/n)` to `digits` significant digits.
///
/// Small `n` goes through the integer `n`-th root of the decimally scaled
/// numerator (a directed floor approximant). Large `n` would blow the scaled
/// integer up to `n * digits` decimal digits, so it switches to a
/// fixed-point binary search with truncated powers instead.
fn nth_root_approx(r: &BigRational, n: u32, digits: u32) -> BigRational {
    debug_assert!(r.is_positive() && n >= 2);
    if n <= 64 {
        let g = digits as i64 + 6;
        let root_mag = decimal_magnitude(r).div_euclid(n as i64);
        let s = (g - root_mag).max(1) as u64;
        let scaled = (r.numer() * pow10(n as u64 * s)).div_floor(r.denom());
        BigRational::new(scaled.nth_root(n), pow10(s))
    } else {
        nth_root_bisect(r, n, digits)
    }
}

/// Binary search for `r^(1/n)` on mantissas of `keep` digits, comparing
/// truncated square-and-multiply powers against `r`. All intermediates stay
/// near `keep` digits: magnitudes are tracked in a separate decimal
/// exponent, never materialized as powers of ten.
fn nth_root_bisect(r: &BigRational, n: u32, digits: u32) -> BigRational {
    let keep = digits + 24;
    let e = decimal_magnitude(r);
    let e0 = e.div_euclid(n as i64);
    // candidate root = m * 10^{e0 - keep}, m in [10^keep, 10^{keep+1}]
    let scale_exp = e0 - keep as i64;
    let mut lo = pow10(keep as u64);
    let mut hi = &lo * BigInt::from(10u8);
    // the predicate compares m^n * 10^{n*scale_exp} against r ~= r_mant * 10^{r_exp}
    let (r_mant, r_exp) = decimal_mantissa(r, keep + 10);
    let nse = n as i64 * scale_exp;
    let two = BigInt::from(2u8);
    while &hi - &lo > BigInt::one() {
        let mid = (&lo + &hi).div_floor(&two);
        if truncated_pow_leq(&mid, n, keep + 6, &r_mant, r_exp - nse) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if scale_exp >= 0 {
        BigRational::from_integer(lo * pow10(scale_exp as u64))
    } else {
        BigRational::new(lo, pow10((-scale_exp) as u64))
    }
}

/// `m^n <= t_mant * 10^{t_exp}`, with the power computed by
/// square-and-multiply on mantissas truncated to `keep` digits.
fn truncated_pow_leq(m: &BigInt, n: u32, keep: u32, t_mant: &BigInt, t_exp: i64) -> bool {
    let keep_bits = (keep as u64 + 2) * 10 / 3;
    let trim = |v: &mut BigInt, drop: &mut i64| {
        let bits = v.bits();
        if bits > keep_bits + 16 {
            // chop whole decimal digits, rounding down
            let excess_digits =
                ((bits - keep_bits) as f64 * std::f64::consts::LOG10_2).ceil() as u64 + 1;
            *v = v.div_floor(&pow10(excess_digits));
            *drop += excess_digits as i64;
        }
    };
    let mut acc = BigInt::one();
    let mut acc_drop = 0i64;
    let mut base = m.clone();
    let mut base_drop = 0i64;
    let mut exp = n;
    loop {
        if exp & 1 == 1 {
            acc *= &base;
            acc_drop += base_drop;
            trim(&mut acc, &mut acc_drop);
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        base = &base * &base;
        base_drop *= 2;
        trim(&mut base, &mut base_drop);
    }
    // acc * 10^{acc_drop} <= t_mant * 10^{t_exp}: align the small exponent
    // gap and compare integers
    let delta = acc_drop - t_exp;
    let digit_gap = |v: &BigInt| (v.bits() as f64 * std::f64::consts::LOG10_2) as i64;
    let lhs_mag = digit_gap(&acc) + delta;
    let rhs_mag = digit_gap(t_mant);
    if lhs_mag < rhs_mag - 2 {
        return true;
    }
    if lhs_mag > rhs_mag + 2 {
        return false;
    }
    if delta >= 0 {
        acc * pow10(delta as u64) <= *t_mant
    } else {
        acc <= t_mant * pow10((-delta) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn default_prec() -> Precision {
        Precision::default()
    }

    #[test]
    fn exact_arithmetic_roundtrip() {
        let a = Scalar::from_ratio(22, 7);
        let b = Scalar::from_ratio(-355, 113);
        let sum = &a + &b;
        assert_eq!(&sum - &b, a);
        let prod = &a * &b;
        assert_eq!(&prod / &b, a);
        assert!(sum.is_exact() && prod.is_exact());
    }

    #[test]
    fn pow_rational_perfect_square() {
        let r = Scalar::from_int(4)
            .pow_rational(&rat(1, 2), default_prec())
            .unwrap();
        assert_eq!(r, Scalar::from_int(2));
        assert!(r.is_exact());
    }

    #[test]
    fn pow_rational_identity_base() {
        let r = Scalar::one()
            .pow_rational(&rat(-7, 3), default_prec())
            .unwrap();
        assert_eq!(r, Scalar::one());
        assert!(r.is_exact());
    }

    #[test]
    fn pow_rational_perfect_cube_with_numerator() {
        // (8/27)^(2/3) = 4/9, exactly
        let r = Scalar::from_ratio(8, 27)
            .pow_rational(&rat(2, 3), default_prec())
            .unwrap();
        assert_eq!(r, Scalar::from_ratio(4, 9));
        assert!(r.is_exact());
    }

    // Reference value computed independently by bisection (see below) and
    // frozen: (2/3)^(1/4) to 70 digits.
    const TWO_THIRDS_QUARTER_ROOT: &str =
        "0.9036020036098448319622180528914441902220170406031435157043229529134364";

    #[test]
    fn pow_rational_demotes_to_sixty_digits() {
        let r = Scalar::from_ratio(2, 3)
            .pow_rational(&rat(1, 4), default_prec())
            .unwrap();
        assert!(!r.is_exact());
        assert_eq!(r.digits(), Some(60));
        let rendered = r.to_decimal_string(58);
        assert_eq!(rendered, &TWO_THIRDS_QUARTER_ROOT[..60]);
        // independent oracle: bisection on x^4 = 2/3 with exact comparisons
        let target = rat(2, 3);
        let (mut lo, mut hi) = (rat(0, 1), rat(1, 1));
        for _ in 0..220 {
            let mid = (&lo + &hi) / rat(2, 1);
            if rat_pow(&mid, 4) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = (r.value() - &lo).abs();
        assert!(err < rat(1, 1_000_000) * rat_pow(&rat(1, 10), 52));
    }

    #[test]
    fn pow_rational_domain_errors() {
        assert!(Scalar::from_int(-2)
            .pow_rational(&rat(1, 2), default_prec())
            .is_err());
        assert!(Scalar::zero()
            .pow_rational(&rat(0, 1), default_prec())
            .is_err());
        assert!(Scalar::zero()
            .pow_rational(&rat(-1, 2), default_prec())
            .is_err());
        assert_eq!(
            Scalar::zero()
                .pow_rational(&rat(3, 2), default_prec())
                .unwrap(),
            Scalar::zero()
        );
        // negative base with integer exponent is fine
        assert_eq!(
            Scalar::from_int(-2)
                .pow_rational(&rat(3, 1), default_prec())
                .unwrap(),
            Scalar::from_int(-8)
        );
    }

    #[test]
    fn pow_additivity_in_approx_mode() {
        let x = Scalar::from_ratio(7, 5);
        let e1 = rat(1, 3);
        let e2 = rat(1, 4);
        let lhs = x.pow_rational(&(&e1 + &e2), default_prec()).unwrap();
        let rhs = x.pow_rational(&e1, default_prec()).unwrap()
            * x.pow_rational(&e2, default_prec()).unwrap();
        let diff = (lhs.value() - rhs.value()).abs();
        let tol = rat_pow(&rat(1, 10), (Precision::DEFAULT_DIGITS - 5) as i64);
        assert!(diff < tol, "additivity violated by {}", diff);
    }

    #[test]
    fn geometric_tail_sum_classical() {
        let s = geometric_tail_sum(&Scalar::from_ratio(1, 2), &Scalar::one()).unwrap();
        assert_eq!(s, Scalar::from_int(2));
        assert!(s.is_exact());
    }

    #[test]
    fn geometric_tail_sum_matches_partial_sums() {
        // ratio 1/4, first 3/4: partial sums converge to 1
        let ratio = rat(1, 4);
        let first = rat(3, 4);
        let closed = geometric_tail_sum(
            &Scalar::Exact(ratio.clone()),
            &Scalar::Exact(first.clone()),
        )
        .unwrap();
        assert_eq!(closed, Scalar::one());

        let mut partial = BigRational::zero();
        let mut term = first.clone();
        for _ in 0..200 {
            partial += &term;
            term *= &ratio;
        }
        // |closed - partial| <= ratio^200 * first/(1-ratio)
        let bound = rat_pow(&ratio, 200) * &first / (BigRational::one() - &ratio);
        assert!((closed.value() - &partial).abs() <= bound);
    }

    #[test]
    fn geometric_tail_sum_padic_cell() {
        // ratio p^-(n+gamma) with p=2, n=1, gamma=2; first term 1/2
        let s = geometric_tail_sum(&Scalar::from_ratio(1, 8), &Scalar::from_ratio(1, 2)).unwrap();
        assert_eq!(s, Scalar::from_ratio(4, 7));
        // cross-check by 100-term partial sum
        let mut partial = BigRational::zero();
        let mut term = rat(1, 2);
        for _ in 0..100 {
            partial += &term;
            term *= rat(1, 8);
        }
        assert!((s.value() - &partial).abs() < rat_pow(&rat(1, 10), 80));
    }

    #[test]
    fn geometric_tail_sum_rejects_bad_ratio() {
        assert!(matches!(
            geometric_tail_sum(&Scalar::one(), &Scalar::one()),
            Err(Error::DivergentSeries { .. })
        ));
        assert!(matches!(
            geometric_tail_sum(&Scalar::from_ratio(3, 2), &Scalar::one()),
            Err(Error::DivergentSeries { .. })
        ));
        assert!(geometric_tail_sum(&Scalar::zero(), &Scalar::one()).is_err());
        assert!(geometric_tail_sum(&Scalar::from_int(-1), &Scalar::one()).is_err());
    }

    #[test]
    fn mixed_mode_comparison_promotes() {
        let exact = Scalar::from_ratio(1, 3);
        let approx = Scalar::approx(rat(333_333, 1_000_000), 6);
        assert_eq!(exact.cmp_value(&approx), Ordering::Greater);
        assert!(!(&exact * &approx).is_exact());
        assert_eq!((&exact * &approx).digits(), Some(6));
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(Scalar::from_int(2).to_decimal_string(60), "2");
        assert_eq!(Scalar::from_ratio(1, 4).to_decimal_string(60), "0.25");
        assert_eq!(Scalar::from_ratio(-1, 4).to_decimal_string(60), "-0.25");
        assert_eq!(Scalar::zero().to_decimal_string(60), "0");
        assert_eq!(Scalar::from_ratio(1, 3).to_decimal_string(5), "0.33333");
        assert_eq!(Scalar::from_ratio(2, 3).to_decimal_string(5), "0.66667");
        assert_eq!(Scalar::from_int(1500).to_decimal_string(2), "1500");
        // far-out magnitudes go scientific
        let tiny = Scalar::Exact(rat_pow(&rat(1, 10), 50) * rat(3, 1));
        assert_eq!(tiny.to_decimal_string(3), "3e-50");
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rational(" 10/-4 ").unwrap(), rat(-5, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_rational_canonical() {
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-3, 9)), "-1/3");
    }

    #[test]
    fn powexpr_multiplication_is_exact() {
        let a = PowExpr::new(2, rat(3, 5), rat(1, 2));
        let b = PowExpr::new(2, rat(5, 3), rat(3, 2));
        let c = a.mul(&b);
        assert_eq!(c.coeff(), &rat(1, 1));
        assert_eq!(c.exp(), &rat(2, 1));
        assert_eq!(c.to_scalar(Precision::default()), Scalar::from_int(4));
    }

    #[test]
    fn powexpr_cross_power_comparison() {
        // 3 * 2^(1/2) ~ 4.2426 vs 2 * 2^1 = 4
        let a = PowExpr::new(2, rat(3, 1), rat(1, 2));
        let b = PowExpr::new(2, rat(2, 1), rat(1, 1));
        assert_eq!(a.cmp_value(&b), Ordering::Greater);
        // 2^(1/2) vs 3/2: 1.414... < 1.5
        let c = PowExpr::new(2, rat(1, 1), rat(1, 2));
        let d = PowExpr::from_rational(2, rat(3, 2));
        assert_eq!(c.cmp_value(&d), Ordering::Less);
        // signs dominate
        let neg = PowExpr::new(2, rat(-5, 1), rat(10, 1));
        assert_eq!(neg.cmp_value(&c), Ordering::Less);
        assert_eq!(PowExpr::zero(2).cmp_value(&neg), Ordering::Greater);
    }

    #[test]
    fn powexpr_equality_is_by_value() {
        // same value in different monomial presentations
        let a = PowExpr::new(2, rat(2, 1), rat(1, 1));
        let b = PowExpr::new(2, rat(4, 1), rat(0, 1));
        let c = PowExpr::new(2, rat(1, 1), rat(2, 1));
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.partial_cmp(&b), Some(Ordering::Equal));
        assert_ne!(a, PowExpr::new(2, rat(4, 1), rat(1, 1)));
        // different bases are never equal, even with equal nominal value
        assert_ne!(PowExpr::one(2), PowExpr::new(3, rat(1, 1), rat(0, 1)).mul_rational(&rat(1, 1)).shift_exp(&rat(0, 1)));
        assert_eq!(PowExpr::zero(2), PowExpr::new(2, rat(0, 1), rat(5, 1)));
    }

    #[test]
    fn powexpr_lowering_modes() {
        let integral = PowExpr::new(3, rat(2, 1), rat(-2, 1));
        let lowered = integral.to_scalar(Precision::default());
        assert_eq!(lowered, Scalar::from_ratio(2, 9));
        assert!(lowered.is_exact());

        let fractional = PowExpr::new(3, rat(1, 1), rat(1, 2));
        let lowered = fractional.to_scalar(Precision::default());
        assert!(!lowered.is_exact());
        // 3^(1/2) = 1.7320508...
        assert_eq!(&lowered.to_decimal_string(8), "1.7320508");
    }

    #[test]
    fn approx_trimming_keeps_precision() {
        // force a long chain of multiplications; magnitude must stay right
        let step = Scalar::approx(rat(999_999, 1_000_000), 40);
        let mut acc = Scalar::approx(rat(1, 1), 40);
        for _ in 0..2000 {
            acc = &acc * &step;
        }
        // true value (1 - 1e-6)^2000 = 0.9980019986...; rounds to 0.99800200
        let s = acc.to_decimal_string(8);
        assert_eq!(s, "0.998002");
        let bits = acc.value().numer().bits() + acc.value().denom().bits();
        assert!(bits < 4000, "approximant failed to trim: {} bits", bits);
    }
}
