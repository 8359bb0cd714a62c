//! The p-adic fractional Hardy operator in closed form.
//!
//! For `0 <= alpha < n` the operator averages over the ball of radius
//! `|x|_p`:
//!
//! ```text
//! H_alpha f(x) = |x|_p^{alpha - n} * int_{|y|_p <= |x|_p} f(y) dy,   x != 0.
//! ```
//!
//! On the sphere `|x|_p = p^k` the image value is `p^{-k(n-alpha)} M(k)`
//! with `M` the cumulative mass of `f`, so applying the operator to a radial
//! step function is exact. The image is generally *not* a step function: it
//! behaves like `inner_value * p^{k alpha}` on the inner tail and like
//! `M_total * p^{-k(n-alpha)}` outside the window, so it is stored as a mass
//! profile plus those two analytic power laws, and norms consume that form
//! directly. The origin `x = 0` is excluded from the domain.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::PAdicParams;
use crate::radial::{MassProfile, RadialStepFunction};
use crate::scalar::{PowExpr, Precision, Scalar};

/// Operator parameters: the ambient `(p, n)` and the order `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyParams {
    params: PAdicParams,
    alpha: BigRational,
}

impl HardyParams {
    /// Requires `0 <= alpha < n`.
    pub fn new(params: PAdicParams, alpha: BigRational) -> Result<Self> {
        if alpha.is_negative() || alpha >= params.n_rational() {
            return Err(Error::InvalidParameter(format!(
                "alpha must satisfy 0 <= alpha < n = {}, got {}",
                params.n(),
                alpha
            )));
        }
        Ok(Self { params, alpha })
    }

    /// The plain Hardy operator, `alpha = 0`.
    pub fn plain(params: PAdicParams) -> Self {
        Self {
            params,
            alpha: BigRational::zero(),
        }
    }

    pub fn params(&self) -> &PAdicParams {
        &self.params
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// Image decay exponent `alpha - n < 0`: outside the window the image
    /// falls off like `p^{k(alpha-n)}`.
    pub fn outer_slope(&self) -> BigRational {
        &self.alpha - self.params.n_rational()
    }
}

/// Closed-form image of a radial step function under `H_alpha`.
#[derive(Debug, Clone)]
pub struct RadialHardyImage {
    hardy: HardyParams,
    mass: MassProfile,
}

impl RadialHardyImage {
    pub fn hardy(&self) -> &HardyParams {
        &self.hardy
    }

    pub fn params(&self) -> &PAdicParams {
        self.hardy.params()
    }

    pub fn mass(&self) -> &MassProfile {
        &self.mass
    }

    pub fn inner_exp(&self) -> i64 {
        self.mass.inner_exp()
    }

    pub fn jmax(&self) -> i64 {
        self.mass.jmax()
    }

    /// Image value on the sphere `|x|_p = p^k`, as an exact monomial
    /// `M(k) * p^{k(alpha - n)}`.
    pub fn value(&self, k: i64) -> PowExpr {
        let exp = self.hardy.outer_slope() * BigRational::from_integer(BigInt::from(k));
        PowExpr::new(self.params().p(), self.mass.at(k), exp)
    }

    /// Image value lowered to a scalar: exact whenever `k(n - alpha)` is an
    /// integer, `Approx` otherwise.
    pub fn value_scalar(&self, k: i64, prec: Precision) -> Scalar {
        self.value(k).to_scalar(prec)
    }

    /// Signed coefficient of the inner tail: for `k <= j0` the image is
    /// `inner_value * p^{k alpha}`.
    pub fn inner_coeff(&self) -> &BigRational {
        self.mass.inner_value()
    }

    /// Signed coefficient of the outer tail: for `k >= jmax` the image is
    /// `M_total * p^{k(alpha - n)}`.
    pub fn outer_coeff(&self) -> &BigRational {
        self.mass.total()
    }

    pub fn is_zero(&self) -> bool {
        self.mass.inner_value().is_zero() && {
            let j0 = self.mass.inner_exp();
            let jmax = self.mass.jmax();
            (j0..=jmax).all(|k| self.mass.at(k).is_zero())
        }
    }
}

/// Apply `H_alpha` to a radial step function.
pub fn hardy_apply(f: &RadialStepFunction, hardy: &HardyParams) -> Result<RadialHardyImage> {
    if f.params() != hardy.params() {
        return Err(Error::ParamMismatch {
            f_p: f.params().p(),
            f_n: f.params().n(),
            o_p: hardy.params().p(),
            o_n: hardy.params().n(),
        });
    }
    Ok(RadialHardyImage {
        hardy: hardy.clone(),
        mass: f.cumulative_mass(),
    })
}

/// Pointwise domination check on a window of spheres:
///
/// * `|H_alpha f(x)| <= |x|_p^{-(n-alpha)} ||f||_{L^1}` always, and
/// * `|H f(x)| <= |x|_p^{n lambda} ||f||_B` when a central-Morrey context
///   `(lambda, ||f||_B)` is supplied (the Hoelder bound at `alpha = 0`).
///
/// Comparisons are exact in the monomial domain.
pub fn pointwise_upper_bound_check(
    f: &RadialStepFunction,
    hardy: &HardyParams,
    window: std::ops::RangeInclusive<i64>,
    morrey: Option<(&BigRational, &Scalar)>,
) -> Result<bool> {
    let image = hardy_apply(f, hardy)?;
    let p = f.params().p();
    let n = f.params().n_rational();
    let l1 = f.l1_norm().into_value();
    for k in window {
        let lhs = image.value(k).abs();
        let bound = PowExpr::new(
            p,
            l1.clone(),
            hardy.outer_slope() * BigRational::from_integer(BigInt::from(k)),
        );
        if lhs.cmp_value(&bound).is_gt() {
            return Ok(false);
        }
        if let Some((lambda, morrey_norm)) = morrey {
            // p^{k n lambda} * ||f||_B, compared through the approximant
            // when the Morrey norm is itself approximate
            let exp = &n * lambda * BigRational::from_integer(BigInt::from(k));
            let envelope = PowExpr::new(p, BigRational::from_integer(BigInt::from(1)), exp);
            let lhs_s = lhs.to_scalar(Precision::default());
            let rhs_s = envelope.to_scalar(Precision::default()) * morrey_norm.clone();
            if lhs_s.cmp_value(&rhs_s).is_gt() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dilation covariance: `H_alpha(dilate(f, m))(p^k) = p^{-m alpha} *
/// (H_alpha f)(p^{k+m})`, exactly, for every sphere in the window.
pub fn dilation_covariance_check(
    f: &RadialStepFunction,
    hardy: &HardyParams,
    m: i64,
    window: std::ops::RangeInclusive<i64>,
) -> Result<bool> {
    let image = hardy_apply(f, hardy)?;
    let dilated_image = hardy_apply(&f.dilate(m), hardy)?;
    let shift = -(&BigRational::from_integer(BigInt::from(m)) * hardy.alpha());
    for k in window {
        let lhs = dilated_image.value(k);
        let rhs = image.value(k + m).shift_exp(&shift);
        if !lhs.cmp_value(&rhs).is_eq() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{random_function, RandomFnConfig, SignMode};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn params(p: u32, n: u32) -> PAdicParams {
        PAdicParams::new(p, n).unwrap()
    }

    fn fractional(p: u32, n: u32, a: (i64, i64)) -> HardyParams {
        HardyParams::new(params(p, n), rat(a.0, a.1)).unwrap()
    }

    #[test]
    fn alpha_validation() {
        assert!(HardyParams::new(params(2, 1), rat(1, 2)).is_ok());
        assert!(HardyParams::new(params(2, 1), rat(0, 1)).is_ok());
        assert!(HardyParams::new(params(2, 1), rat(1, 1)).is_err()); // alpha = n
        assert!(HardyParams::new(params(2, 1), rat(-1, 2)).is_err());
        assert!(HardyParams::new(params(2, 3), rat(5, 2)).is_ok()); // 5/2 < 3
    }

    #[test]
    fn extremizer_image_fractional() {
        // H_alpha chi_{B_0}: p^{k alpha} for k <= 0, p^{k(alpha - n)} for k > 0
        let h = fractional(2, 1, (1, 2));
        let f0 = RadialStepFunction::unit_ball_indicator(params(2, 1));
        let image = hardy_apply(&f0, &h).unwrap();
        for k in -6..=0 {
            let expect = PowExpr::new(2, rat(1, 1), rat(k, 2));
            assert!(image.value(k).cmp_value(&expect).is_eq(), "k = {}", k);
        }
        for k in 1..=6 {
            let expect = PowExpr::new(2, rat(1, 1), rat(-k, 2));
            assert!(image.value(k).cmp_value(&expect).is_eq(), "k = {}", k);
        }
        // scalar lowering demotes only on fractional exponents
        assert!(image.value_scalar(2, Precision::default()).is_exact());
        assert!(!image.value_scalar(1, Precision::default()).is_exact());
    }

    #[test]
    fn extremizer_image_plain() {
        // alpha = 0: value 1 for k <= 0, p^{-kn} for k > 0; |H f0| <= 1
        let pa = params(3, 2);
        let h = HardyParams::plain(pa);
        let f0 = RadialStepFunction::unit_ball_indicator(pa);
        let image = hardy_apply(&f0, &h).unwrap();
        for k in -5..=0 {
            assert_eq!(image.value_scalar(k, Precision::default()), Scalar::one());
        }
        for k in 1..=5 {
            assert_eq!(
                image.value_scalar(k, Precision::default()),
                Scalar::exact(crate::scalar::rat_pow_of_int(3, -2 * k))
            );
        }
        for k in -8..=8 {
            assert!(image
                .value_scalar(k, Precision::default())
                .abs()
                .cmp_value(&Scalar::one())
                .is_le());
        }
    }

    #[test]
    fn zero_function_image() {
        let h = fractional(2, 1, (1, 2));
        let z = RadialStepFunction::zero(params(2, 1));
        let image = hardy_apply(&z, &h).unwrap();
        assert!(image.is_zero());
        for k in -5..=5 {
            assert!(image.value(k).is_zero());
        }
    }

    #[test]
    fn param_mismatch_rejected() {
        let h = fractional(2, 1, (1, 2));
        let f = RadialStepFunction::unit_ball_indicator(params(3, 1));
        assert!(matches!(
            hardy_apply(&f, &h),
            Err(Error::ParamMismatch { .. })
        ));
    }

    #[test]
    fn pointwise_bound_extremizer() {
        for (p, n, a) in [(2u32, 1u32, (1i64, 2i64)), (3, 2, (1, 1)), (5, 3, (3, 2))] {
            let h = fractional(p, n, a);
            let f0 = RadialStepFunction::unit_ball_indicator(*h.params());
            assert!(pointwise_upper_bound_check(&f0, &h, -20..=20, None).unwrap());
        }
    }

    #[test]
    fn pointwise_bound_strict_for_cancelling_rings() {
        // inner -1 on B_0, ring +1 at k=1: cancellation makes the bound strict
        let pa = params(2, 1);
        let h = HardyParams::plain(pa);
        let f = RadialStepFunction::new(pa, 0, rat(-1, 1), [(1, rat(1, 1))]).unwrap();
        assert!(pointwise_upper_bound_check(&f, &h, -10..=10, None).unwrap());
        let image = hardy_apply(&f, &h).unwrap();
        // at k = 1 the mass is -1 + 1*2*(1/2) = 0 while l1 * p^{-1} = 1: strict
        assert!(image.value(1).is_zero());
        assert!(!f.l1_norm().is_zero());
    }

    #[test]
    fn pointwise_bound_with_morrey_context() {
        // at alpha = 0: |H f(x)| <= |x|_p^{n lambda} ||f||_B
        let pa = params(2, 1);
        let h = HardyParams::plain(pa);
        let f0 = RadialStepFunction::unit_ball_indicator(pa);
        let lambda = rat(-1, 4);
        let morrey_norm = Scalar::one(); // ||f0||_B = 1 for every valid (q, lambda)
        assert!(
            pointwise_upper_bound_check(&f0, &h, -15..=15, Some((&lambda, &morrey_norm)))
                .unwrap()
        );
        // an undersized claimed norm must be caught
        let too_small = Scalar::from_ratio(1, 2);
        assert!(
            !pointwise_upper_bound_check(&f0, &h, -15..=15, Some((&lambda, &too_small)))
                .unwrap()
        );
    }

    #[test]
    fn pointwise_bound_zero_function() {
        let pa = params(2, 1);
        let h = HardyParams::plain(pa);
        let z = RadialStepFunction::zero(pa);
        assert!(pointwise_upper_bound_check(&z, &h, -10..=10, None).unwrap());
    }

    #[test]
    fn dilation_covariance_examples() {
        let pa = params(2, 1);
        let h = HardyParams::plain(pa);
        let f0 = RadialStepFunction::unit_ball_indicator(pa);
        assert!(dilation_covariance_check(&f0, &h, 0, -8..=8).unwrap());
        assert!(dilation_covariance_check(&f0, &h, 3, -8..=8).unwrap());
        let hf = fractional(2, 1, (1, 2));
        assert!(dilation_covariance_check(&f0, &hf, -2, -8..=8).unwrap());
    }

    #[test]
    fn dilation_covariance_random_sweep() {
        let pa = params(3, 1);
        let h = fractional(3, 1, (1, 3));
        let cfg = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for seed in 0..100 {
            let f = random_function(seed, &cfg, pa);
            let m = (seed as i64 % 11) - 5;
            assert!(
                dilation_covariance_check(&f, &h, m, -10..=10).unwrap(),
                "seed {} m {}",
                seed,
                m
            );
        }
    }

    #[test]
    fn linearity_on_window() {
        let pa = params(2, 1);
        let h = fractional(2, 1, (1, 2));
        let cfg = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for seed in 0..50 {
            let f = random_function(seed, &cfg, pa);
            let g = random_function(seed + 1000, &cfg, pa);
            let (a, b) = (rat(2, 3), rat(-5, 4));
            let combo = f.add_scaled(&a, &g, &b).unwrap();
            let image_combo = hardy_apply(&combo, &h).unwrap();
            let image_f = hardy_apply(&f, &h).unwrap();
            let image_g = hardy_apply(&g, &h).unwrap();
            for k in -8..=8 {
                let lhs = image_combo.value(k);
                let combined_mass =
                    image_f.mass().at(k) * &a + image_g.mass().at(k) * &b;
                let rhs = PowExpr::new(2, combined_mass, rat(-k, 2));
                assert!(lhs.cmp_value(&rhs).is_eq(), "seed {} k {}", seed, k);
            }
        }
    }

    #[test]
    fn image_dominated_by_image_of_abs() {
        // |H f| <= H |f| pointwise
        let pa = params(2, 1);
        let h = HardyParams::plain(pa);
        let cfg = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for seed in 0..100 {
            let f = random_function(seed, &cfg, pa);
            let abs_f = RadialStepFunction::new(
                pa,
                f.inner_exp(),
                f.inner_value().abs(),
                f.rings().iter().map(|(k, v)| (*k, v.abs())),
            )
            .unwrap();
            let image = hardy_apply(&f, &h).unwrap();
            let image_abs = hardy_apply(&abs_f, &h).unwrap();
            for k in -8..=8 {
                assert!(
                    image.value(k).abs().cmp_value(&image_abs.value(k)).is_le(),
                    "seed {} k {}",
                    seed,
                    k
                );
            }
        }
    }

    #[test]
    fn monotone_in_data() {
        // 0 <= f <= g spherewise implies image(f) <= image(g)
        let pa = params(3, 1);
        let h = fractional(3, 1, (1, 2));
        let cfg = RandomFnConfig::default(); // nonnegative
        for seed in 0..50 {
            let f = random_function(seed, &cfg, pa);
            let bump = random_function(seed + 500, &cfg, pa);
            let g = f.add(&bump).unwrap();
            let image_f = hardy_apply(&f, &h).unwrap();
            let image_g = hardy_apply(&g, &h).unwrap();
            for k in -8..=8 {
                assert!(image_f.value(k).cmp_value(&image_g.value(k)).is_le());
            }
        }
    }

    #[test]
    fn outer_tail_carries_total_mass() {
        let pa = params(2, 1);
        let h = fractional(2, 1, (1, 2));
        let f = RadialStepFunction::new(pa, -1, rat(3, 1), [(1, rat(1, 2)), (2, rat(5, 3))])
            .unwrap();
        let image = hardy_apply(&f, &h).unwrap();
        let total = f.cumulative_mass().total().clone();
        for k in image.jmax()..=(image.jmax() + 10) {
            // value(k) * p^{k(n-alpha)} = M_total
            let back = image
                .value(k)
                .shift_exp(&(rat(1, 2) * BigRational::from_integer(BigInt::from(k))));
            assert!(back
                .cmp_value(&PowExpr::from_rational(2, total.clone()))
                .is_eq());
        }
        assert_eq!(image.outer_coeff(), &total);
    }
}
