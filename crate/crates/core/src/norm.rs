//! The four norm functionals: weighted `L^q`, weighted weak `L^q`, central
//! Morrey, and weak central Morrey, for radial step functions and Hardy
//! images.
//!
//! Everything is computed on the sphere grid. A radial function enters as a
//! [`RadialProfile`]: explicit monomial values on a window `[j0, jmax]` plus
//! two analytic power-law tails `coeff * p^{slope*k}`. Superlevel sets of
//! such profiles are finite unions of sphere-index segments, so their
//! weighted measures have exact closed forms, and weak-norm suprema reduce to
//! maxima over candidate threshold levels (the distinct values `|f|` takes)
//! plus, on a critical tail, an explicit limit candidate.
//!
//! Exactness strategy: every supremum is compared through the `q`-th power.
//! With `q = u/w` in lowest terms, the weak-norm objective `t W(t)^{1/q}` is
//! ordered by the key `t^u W(t)^w`, a monomial `coeff * p^exp` whose
//! coefficient stays an exact rational whenever the weighted measures do.
//! The `1/u`-th root is taken once, at the very end, with perfect-power
//! detection, so suprema that are genuinely rational (the Morrey extremizer
//! value 1, for instance) come out in `Exact` mode.
//!
//! Derivation notes for the boundary cases the implementation relies on:
//!
//! * Weak `L^q(|x|^gamma)` of a profile with outer decay `p^{bk}` (`b < 0`)
//!   diverges iff `q|b| < n + gamma`. At criticality `q|b| = n + gamma` the
//!   objective tends, as the threshold goes to 0, to the limit key
//!   `|B|^u ((1-p^{-n})/(1-p^{-(n+gamma)}))^w`, and no candidate exceeds it:
//!   a superlevel set with top sphere `k*` is contained in the ball `B_{k*}`,
//!   which forces `t^u W^w <= |B|^u ((1-p^{-n})/(1-p^{-(n+gamma)}))^w` as
//!   soon as `k*` lies on the outer tail. The supremum is therefore an exact,
//!   finite maximum.
//! * The central Morrey objective over balls `B_g` with `g <= j0` is the
//!   monomial `c * p^{g u (a - n lambda)}` with `a - n lambda > 0`, so that
//!   branch is maximized at `g = j0`; the `g -> +infinity` branch decays
//!   whenever `lambda > -1/q` and reduces to the global (weak) `L^q` norm at
//!   `lambda = -1/q`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result, Tail};
use crate::hardy::RadialHardyImage;
use crate::padic::{PAdicParams, WeightSpec};
use crate::radial::RadialStepFunction;
use crate::scalar::{rat_pow, PowExpr, Precision, Scalar};

/// Which norm functional a [`NormSpec`] denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Lq,
    WeakLq,
    CentralMorrey,
    WeakCentralMorrey,
}

/// A fully parameterized norm: kind, exponent `q >= 1`, power weight (for
/// the Lebesgue kinds), and `lambda` in `[-1/q, 0)` (for the Morrey kinds).
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    kind: NormKind,
    q: BigRational,
    weight: WeightSpec,
    lambda: Option<BigRational>,
}

impl NormSpec {
    fn check_q(q: &BigRational) -> Result<()> {
        if q < &BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "norm exponent q must be >= 1, got {}",
                q
            )));
        }
        Ok(())
    }

    fn check_lambda(q: &BigRational, lambda: &BigRational) -> Result<()> {
        let lower = -q.recip();
        if lambda < &lower || !lambda.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [-1/q, 0) = [{}, 0), got {}",
                lower, lambda
            )));
        }
        Ok(())
    }

    pub fn lq(q: BigRational, weight: WeightSpec) -> Result<Self> {
        Self::check_q(&q)?;
        Ok(Self {
            kind: NormKind::Lq,
            q,
            weight,
            lambda: None,
        })
    }

    pub fn weak_lq(q: BigRational, weight: WeightSpec) -> Result<Self> {
        Self::check_q(&q)?;
        Ok(Self {
            kind: NormKind::WeakLq,
            q,
            weight,
            lambda: None,
        })
    }

    pub fn central_morrey(q: BigRational, lambda: BigRational) -> Result<Self> {
        Self::check_q(&q)?;
        Self::check_lambda(&q, &lambda)?;
        Ok(Self {
            kind: NormKind::CentralMorrey,
            q,
            weight: WeightSpec::unweighted(),
            lambda: Some(lambda),
        })
    }

    pub fn weak_central_morrey(q: BigRational, lambda: BigRational) -> Result<Self> {
        Self::check_q(&q)?;
        Self::check_lambda(&q, &lambda)?;
        Ok(Self {
            kind: NormKind::WeakCentralMorrey,
            q,
            weight: WeightSpec::unweighted(),
            lambda: Some(lambda),
        })
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn lambda(&self) -> Option<&BigRational> {
        self.lambda.as_ref()
    }
}

/// A power-law tail `value(k) = coeff * p^{slope * k}` on a ray of spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct TailLaw {
    pub coeff: BigRational,
    pub slope: BigRational,
}

impl TailLaw {
    fn zero() -> Self {
        TailLaw {
            coeff: BigRational::zero(),
            slope: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn value(&self, p: u32, k: i64) -> PowExpr {
        PowExpr::new(
            p,
            self.coeff.clone(),
            &self.slope * BigRational::from_integer(BigInt::from(k)),
        )
    }
}

/// Unified view of a radial function: explicit monomial values on the window
/// `[j0, jmax]`, power-law tails outside. Step functions have constant tails
/// (slope 0 inside, zero outside); Hardy images have slopes `alpha` and
/// `alpha - n`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    params: PAdicParams,
    j0: i64,
    window: Vec<PowExpr>,
    inner: TailLaw,
    outer: TailLaw,
}

/// Anything the norm functionals accept.
pub trait NormValue {
    fn profile(&self) -> RadialProfile;
}

impl NormValue for RadialStepFunction {
    fn profile(&self) -> RadialProfile {
        RadialProfile::from(self)
    }
}

impl NormValue for RadialHardyImage {
    fn profile(&self) -> RadialProfile {
        RadialProfile::from(self)
    }
}

impl NormValue for RadialProfile {
    fn profile(&self) -> RadialProfile {
        self.clone()
    }
}

impl From<&RadialStepFunction> for RadialProfile {
    fn from(f: &RadialStepFunction) -> Self {
        let p = f.params().p();
        let j0 = f.inner_exp();
        let jmax = f.jmax();
        let window = (j0..=jmax)
            .map(|k| PowExpr::from_rational(p, f.value_at(k).clone()))
            .collect();
        RadialProfile {
            params: *f.params(),
            j0,
            window,
            inner: TailLaw {
                coeff: f.inner_value().clone(),
                slope: BigRational::zero(),
            },
            outer: TailLaw::zero(),
        }
    }
}

impl From<&RadialHardyImage> for RadialProfile {
    fn from(img: &RadialHardyImage) -> Self {
        let j0 = img.inner_exp();
        let jmax = img.jmax();
        let window = (j0..=jmax).map(|k| img.value(k)).collect();
        RadialProfile {
            params: *img.params(),
            j0,
            window,
            inner: TailLaw {
                coeff: img.inner_coeff().clone(),
                slope: img.hardy().alpha().clone(),
            },
            outer: TailLaw {
                coeff: img.outer_coeff().clone(),
                slope: img.hardy().outer_slope(),
            },
        }
    }
}

impl RadialProfile {
    pub fn params(&self) -> &PAdicParams {
        &self.params
    }

    pub fn inner_exp(&self) -> i64 {
        self.j0
    }

    pub fn jmax(&self) -> i64 {
        self.j0 + self.window.len() as i64 - 1
    }

    pub fn inner_law(&self) -> &TailLaw {
        &self.inner
    }

    pub fn outer_law(&self) -> &TailLaw {
        &self.outer
    }

    /// Value on the sphere `|x|_p = p^k` as an exact monomial.
    pub fn value(&self, k: i64) -> PowExpr {
        let p = self.params.p();
        if k < self.j0 {
            self.inner.value(p, k)
        } else if k > self.jmax() {
            self.outer.value(p, k)
        } else {
            self.window[(k - self.j0) as usize].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
            && self.outer.is_zero()
            && self.window.iter().all(|v| v.is_zero())
    }
}

/// Exact description of a superlevel set `{ x : |f(x)| > t }` (or `>= t`)
/// of a radial profile, with its weighted measure.
#[derive(Debug, Clone)]
pub struct SuperlevelGeometry {
    pub threshold: Scalar,
    /// Whole inner ball `B_k` contained in the set (constant inner tail).
    pub inner_ball: Option<i64>,
    /// Finite inner-tail segment `[lo, hi]` of sphere indices.
    pub inner_segment: Option<(i64, i64)>,
    /// Window spheres in the set.
    pub window_spheres: Vec<i64>,
    /// Outer-tail segment `[lo, hi]`.
    pub outer_segment: Option<(i64, i64)>,
    /// Total weighted measure of the set.
    pub weighted_measure: Scalar,
}

impl SuperlevelGeometry {
    /// Largest sphere index in the set, if the set is nonempty.
    pub fn top_sphere(&self) -> Option<i64> {
        self.outer_segment
            .map(|(_, hi)| hi)
            .or_else(|| self.window_spheres.last().copied())
            .or_else(|| self.inner_segment.map(|(_, hi)| hi))
            .or(self.inner_ball)
    }

    pub fn is_empty(&self) -> bool {
        self.inner_ball.is_none()
            && self.inner_segment.is_none()
            && self.window_spheres.is_empty()
            && self.outer_segment.is_none()
    }
}

/// Result of a norm evaluation, with the attaining data the weak norms and
/// Morrey suprema produce.
#[derive(Debug, Clone)]
pub struct NormOutcome {
    pub value: Scalar,
    /// Ball index attaining a Morrey supremum.
    pub ball_index: Option<i64>,
    /// Threshold level attaining a weak-norm supremum.
    pub level: Option<Scalar>,
    /// The supremum is a tail limit, not attained at a finite candidate.
    pub at_limit: bool,
}

impl NormOutcome {
    fn plain(value: Scalar) -> Self {
        NormOutcome {
            value,
            ball_index: None,
            level: None,
            at_limit: false,
        }
    }
}

/// `q`-th-power comparison key: `coeff * p^exp` with a possibly-demoted
/// coefficient. Ordering is exact whenever the coefficient is exact.
#[derive(Debug, Clone)]
struct Key {
    base: u32,
    coeff: Scalar,
    exp: BigRational,
}

impl Key {
    fn zero(base: u32) -> Self {
        Key {
            base,
            coeff: Scalar::zero(),
            exp: BigRational::zero(),
        }
    }

    fn from_pow(v: &PowExpr) -> Self {
        Key {
            base: v.base(),
            coeff: Scalar::exact(v.coeff().clone()),
            exp: v.exp().clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn mul_scalar(&self, s: &Scalar) -> Self {
        Key {
            base: self.base,
            coeff: &self.coeff * s,
            exp: self.exp.clone(),
        }
    }

    fn cmp(&self, other: &Key, prec: Precision) -> Ordering {
        debug_assert_eq!(self.base, other.base);
        match (&self.coeff, &other.coeff) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                PowExpr::new(self.base, a.clone(), self.exp.clone()).cmp_value(&PowExpr::new(
                    other.base,
                    b.clone(),
                    other.exp.clone(),
                ))
            }
            _ => {
                let guard = Precision::new(prec.digits() + 8);
                self.lower(guard).cmp_value(&other.lower(guard))
            }
        }
    }

    fn lower(&self, prec: Precision) -> Scalar {
        if self.coeff.is_zero() {
            return Scalar::zero();
        }
        let p = Scalar::from_int(self.base as i64)
            .pow_rational(&self.exp, prec)
            .expect("positive base power cannot fail");
        &self.coeff * &p
    }

    /// `(coeff * p^exp)^{1/u}`, exactness-preserving: integral monomials are
    /// rooted as one rational so perfect powers are detected on the whole
    /// value.
    fn root(&self, u: i64, prec: Precision) -> Scalar {
        debug_assert!(u >= 1);
        if self.coeff.is_zero() {
            return Scalar::zero();
        }
        let inv_u = BigRational::new(BigInt::one(), BigInt::from(u));
        if self.exp.is_integer() {
            let whole = self.coeff.clone()
                * Scalar::exact(crate::scalar::rat_pow_of_int(
                    self.base,
                    self.exp.to_integer().to_i64().expect("exponent too large"),
                ));
            return whole
                .pow_rational(&inv_u, prec)
                .expect("nonnegative key root cannot fail");
        }
        let coeff_root = self
            .coeff
            .pow_rational(&inv_u, prec)
            .expect("nonnegative key root cannot fail");
        let exp_root = Scalar::from_int(self.base as i64)
            .pow_rational(&(&self.exp * &inv_u), prec)
            .expect("positive base power cannot fail");
        coeff_root * exp_root
    }
}

/// `q = u/w` in lowest terms, as small integers.
fn split_exponent(q: &BigRational) -> Result<(i64, i64)> {
    let u = q
        .numer()
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("q numerator too large".into()))?;
    let w = q
        .denom()
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("q denominator too large".into()))?;
    Ok((u, w))
}

/// Shared per-evaluation context.
struct Ctx<'a> {
    profile: &'a RadialProfile,
    p: u32,
    /// weighted sphere exponent `s = n + gamma` (`gamma = 0` for Morrey)
    s: BigRational,
    kappa: BigRational,
    /// `kappa / (1 - p^{-s})`: ball-measure coefficient (scalar; exact when
    /// `s` is an integer)
    cball: Scalar,
    u: i64,
    w: i64,
    q: BigRational,
    prec: Precision,
}

impl<'a> Ctx<'a> {
    fn new(
        profile: &'a RadialProfile,
        q: &BigRational,
        weight: &WeightSpec,
        prec: Precision,
    ) -> Result<Self> {
        let params = profile.params();
        let s = weight.sphere_exponent(params);
        if !s.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "weighted norms require n + gamma > 0, got {}",
                s
            )));
        }
        let (u, w) = split_exponent(q)?;
        let kappa = params.kappa();
        let p_pow = PowExpr::new(params.p(), BigRational::one(), -s.clone()).to_scalar(prec);
        let cball = Scalar::exact(kappa.clone()) / (Scalar::one() - p_pow);
        Ok(Ctx {
            profile,
            p: params.p(),
            s,
            kappa,
            cball,
            u,
            w,
            q: q.clone(),
            prec,
        })
    }

    fn rat(&self, k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    /// `p^{k s}` as a scalar.
    fn pks(&self, k: i64) -> Scalar {
        PowExpr::new(self.p, BigRational::one(), &self.s * self.rat(k)).to_scalar(self.prec)
    }

    /// Weighted measure of the ball `B_k`: `kappa p^{ks} / (1 - p^{-s})`.
    fn ball_w(&self, k: i64) -> Scalar {
        &self.cball * &self.pks(k)
    }

    /// Weighted measure of the sphere segment `lo..=hi`.
    fn segment_w(&self, lo: i64, hi: i64) -> Scalar {
        debug_assert!(lo <= hi);
        // kappa (p^{(hi+1)s} - p^{lo s}) / (p^s - 1) = ball_w(hi) - ball_w(lo-1)
        self.ball_w(hi) - self.ball_w(lo - 1)
    }

    /// Weighted measure of a single sphere.
    fn sphere_w(&self, k: i64) -> Scalar {
        Scalar::exact(self.kappa.clone()) * self.pks(k)
    }

    /// Superlevel set `{k : |f(p^k)| > v}` (strict) or `>= v`, truncated to
    /// spheres `<= cap` when given. `v` must be positive.
    fn superlevel(&self, v: &PowExpr, geq: bool, cap: Option<i64>) -> Result<SuperlevelGeometry> {
        debug_assert!(v.is_positive());
        let profile = self.profile;
        let j0 = profile.inner_exp();
        let jmax = profile.jmax();
        let above = |x: &PowExpr| -> bool {
            match x.abs().cmp_value(v) {
                Ordering::Greater => true,
                Ordering::Equal => geq,
                Ordering::Less => false,
            }
        };

        let mut geom = SuperlevelGeometry {
            threshold: v.to_scalar(self.prec),
            inner_ball: None,
            inner_segment: None,
            window_spheres: Vec::new(),
            outer_segment: None,
            weighted_measure: Scalar::zero(),
        };
        let mut measure = Scalar::zero();

        // inner tail: spheres k <= j0 - 1 (only when not cut off by the cap)
        let inner_hi = cap.map_or(j0 - 1, |c| c.min(j0 - 1));
        let law = &profile.inner;
        if !law.is_zero() && inner_hi > i64::MIN {
            match law.slope.cmp(&BigRational::zero()) {
                Ordering::Equal => {
                    if above(&PowExpr::from_rational(self.p, law.coeff.clone())) {
                        geom.inner_ball = Some(inner_hi);
                        measure = measure + self.ball_w(inner_hi);
                    }
                }
                Ordering::Greater => {
                    // values decay toward -inf: segment [k_in, inner_hi]
                    if let Some(k_in) = least_on_ray(law, self.p, v, geq) {
                        if k_in <= inner_hi {
                            geom.inner_segment = Some((k_in, inner_hi));
                            measure = measure + self.segment_w(k_in, inner_hi);
                        }
                    }
                }
                Ordering::Less => {
                    // values grow toward -inf: whole sub-ray (unreachable
                    // from the public constructors, but kept correct)
                    if let Some(k_hi) = greatest_on_ray(law, self.p, v, geq) {
                        let hi = k_hi.min(inner_hi);
                        if hi >= inner_hi || hi < inner_hi {
                            geom.inner_ball = Some(hi);
                            measure = measure + self.ball_w(hi);
                        }
                    }
                }
            }
        }

        // window spheres
        let win_hi = cap.map_or(jmax, |c| c.min(jmax));
        for k in j0..=win_hi {
            let val = profile.value(k);
            if !val.is_zero() && above(&val) {
                geom.window_spheres.push(k);
                measure = measure + self.sphere_w(k);
            }
        }

        // outer tail: spheres k >= jmax + 1
        let law = &profile.outer;
        if !law.is_zero() {
            if law.slope >= BigRational::zero() {
                // non-decaying tail: the superlevel set is an infinite
                // outward ray as soon as any tail sphere qualifies
                let qualifies = if law.slope.is_zero() {
                    above(&PowExpr::from_rational(self.p, law.coeff.clone()))
                } else {
                    true
                };
                if qualifies && cap.is_none() {
                    return Err(Error::DivergentNorm {
                        tail: Tail::Outer,
                        detail: format!(
                            "superlevel set at threshold {} has infinite weighted measure \
                             (outer tail does not decay)",
                            geom.threshold
                        ),
                    });
                }
                if qualifies {
                    let hi = cap.unwrap();
                    if hi > jmax {
                        geom.outer_segment = Some((jmax + 1, hi));
                        measure = measure + self.segment_w(jmax + 1, hi);
                    }
                }
            } else if let Some(k_out) = greatest_on_ray(law, self.p, v, geq) {
                let hi = cap.map_or(k_out, |c| c.min(k_out));
                if hi > jmax {
                    geom.outer_segment = Some((jmax + 1, hi));
                    measure = measure + self.segment_w(jmax + 1, hi);
                }
            }
        }

        geom.weighted_measure = measure;
        Ok(geom)
    }

    /// Comparison key `v^u * W^w` for a candidate threshold `v` with
    /// superlevel measure `W`.
    fn key(&self, v: &PowExpr, w_measure: &Scalar) -> Key {
        let vu = v.abs().pow_int(self.u);
        Key::from_pow(&vu).mul_scalar(
            &w_measure
                .pow_int(self.w)
                .expect("nonnegative measure power cannot fail"),
        )
    }
}

/// Least `k` with `|coeff| p^{slope k} >= v` (`> v` when `geq` is false) on
/// a decaying-toward-minus-infinity ray (`slope > 0`).
fn least_on_ray(law: &TailLaw, p: u32, v: &PowExpr, geq: bool) -> Option<i64> {
    debug_assert!(law.slope.is_positive());
    ray_search(law, p, v, geq, true)
}

/// Greatest `k` with `|coeff| p^{slope k} >= v` on a decaying-toward-
/// plus-infinity ray (`slope < 0`).
fn greatest_on_ray(law: &TailLaw, p: u32, v: &PowExpr, geq: bool) -> Option<i64> {
    debug_assert!(law.slope.is_negative());
    ray_search(law, p, v, geq, false)
}

/// Exact monotone threshold search along a tail law. The f64 seed is only a
/// guess; the answer is fixed up with exact monomial comparisons.
fn ray_search(law: &TailLaw, p: u32, v: &PowExpr, geq: bool, ascending: bool) -> Option<i64> {
    let above = |k: i64| -> bool {
        let val = law.value(p, k).abs();
        match val.cmp_value(v) {
            Ordering::Greater => true,
            Ordering::Equal => geq,
            Ordering::Less => false,
        }
    };
    // f64 guess of log_p(v / |coeff|) / slope
    let ln_p = (p as f64).ln();
    let ln_v = rough_ln(v.coeff()) + v.exp().to_f64().unwrap_or(0.0) * ln_p;
    let ln_c = rough_ln(&law.coeff);
    let slope = law.slope.to_f64().unwrap_or(if ascending { 1.0 } else { -1.0 });
    let guess = ((ln_v - ln_c) / (slope * ln_p)).round();
    let mut k = if guess.is_finite() && guess.abs() < 1e15 {
        guess as i64
    } else {
        0
    };
    // walk to the boundary with exact comparisons
    let cap = 200_000;
    if ascending {
        // predicate `above` is increasing in k: find the least true k
        let mut steps = 0;
        if above(k) {
            while above(k - 1) {
                k -= 1;
                steps += 1;
                assert!(steps < cap, "ray search failed to converge");
            }
            Some(k)
        } else {
            while !above(k) {
                k += 1;
                steps += 1;
                assert!(steps < cap, "ray search failed to converge");
            }
            Some(k)
        }
    } else {
        // predicate is decreasing in k: find the greatest true k
        let mut steps = 0;
        if above(k) {
            while above(k + 1) {
                k += 1;
                steps += 1;
                assert!(steps < cap, "ray search failed to converge");
            }
            Some(k)
        } else {
            while !above(k) {
                k -= 1;
                steps += 1;
                if steps >= cap {
                    return None; // threshold above the whole ray
                }
            }
            Some(k)
        }
    }
}

/// Crude natural log of a nonzero rational, good enough to seed the exact
/// ray search.
fn rough_ln(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let ln2 = std::f64::consts::LN_2;
    (r.numer().bits() as f64 - r.denom().bits() as f64) * ln2
}

/// Public superlevel geometry of `{ |f| > t }` (strict), with its weighted
/// measure.
pub fn superlevel_geometry<F: NormValue>(
    f: &F,
    threshold: &Scalar,
    weight: &WeightSpec,
    prec: Precision,
) -> Result<SuperlevelGeometry> {
    let profile = f.profile();
    if !threshold.is_positive() {
        return Err(Error::Domain(format!(
            "superlevel threshold must be positive, got {}",
            threshold
        )));
    }
    let one = BigRational::one();
    let ctx = Ctx::new(&profile, &one, weight, prec)?;
    let v = PowExpr::from_rational(
        profile.params().p(),
        threshold.value().clone(),
    );
    ctx.superlevel(&v, false, None)
}

/// Weighted `L^q` norm: `( sum_k |f(p^k)|^q mu_k )^{1/q}` with the `q`-th
/// power evaluated first and the root taken last.
pub fn lq_norm<F: NormValue>(f: &F, spec: &NormSpec, prec: Precision) -> Result<Scalar> {
    debug_assert!(matches!(spec.kind(), NormKind::Lq));
    let profile = f.profile();
    lq_norm_profile(&profile, spec.q(), spec.weight(), prec)
}

fn lq_norm_profile(
    profile: &RadialProfile,
    q: &BigRational,
    weight: &WeightSpec,
    prec: Precision,
) -> Result<Scalar> {
    let ctx = Ctx::new(profile, q, weight, prec)?;
    if profile.is_zero() {
        return Ok(Scalar::zero());
    }
    let total = lq_integral(&ctx, None)?;
    let inv_q = BigRational::new(
        BigInt::from(ctx.w),
        BigInt::from(ctx.u),
    );
    total.pow_rational(&inv_q, prec)
}

/// `sum_k |f(p^k)|^q mu_k`, over all spheres (or up to `cap`).
fn lq_integral(ctx: &Ctx<'_>, cap: Option<i64>) -> Result<Scalar> {
    let profile = ctx.profile;
    let j0 = profile.inner_exp();
    let jmax = profile.jmax();
    let mut total = Scalar::zero();

    // inner tail: sum_{k <= j0-1} |A|^q p^{(aq+s)k} * kappa
    let law = &profile.inner;
    let inner_hi = cap.map_or(j0 - 1, |c| c.min(j0 - 1));
    if !law.is_zero() {
        let sigma = &law.slope * &ctx.q + &ctx.s;
        if !sigma.is_positive() {
            return Err(Error::DivergentNorm {
                tail: Tail::Inner,
                detail: format!(
                    "L^q integral needs q*slope + n + gamma > 0 on the inner tail, got {}",
                    sigma
                ),
            });
        }
        let aq = abs_pow_q(ctx, &law.coeff)?;
        // kappa p^{inner_hi * sigma} / (1 - p^{-sigma})
        let head = PowExpr::new(ctx.p, ctx.kappa.clone(), &sigma * ctx.rat(inner_hi))
            .to_scalar(ctx.prec);
        let ratio = PowExpr::new(ctx.p, BigRational::one(), -sigma).to_scalar(ctx.prec);
        let tail_sum = crate::scalar::geometric_tail_sum(&ratio, &head)?;
        total = total + aq * tail_sum;
    }

    // window
    let win_hi = cap.map_or(jmax, |c| c.min(jmax));
    for k in j0..=win_hi {
        let v = profile.value(k);
        if v.is_zero() {
            continue;
        }
        let cq = abs_pow_q(ctx, v.coeff())?;
        let mono = PowExpr::new(
            ctx.p,
            ctx.kappa.clone(),
            v.exp() * &ctx.q + &ctx.s * ctx.rat(k),
        )
        .to_scalar(ctx.prec);
        total = total + cq * mono;
    }

    // outer tail
    let law = &profile.outer;
    if !law.is_zero() && cap.is_none() {
        let sigma = &law.slope * &ctx.q + &ctx.s;
        if !sigma.is_negative() {
            return Err(Error::DivergentNorm {
                tail: Tail::Outer,
                detail: format!(
                    "L^q integral needs q*(n - alpha) > n + gamma on the outer tail \
                     (exponent {} must be negative)",
                    sigma
                ),
            });
        }
        let bq = abs_pow_q(ctx, &law.coeff)?;
        let head = PowExpr::new(ctx.p, ctx.kappa.clone(), &sigma * ctx.rat(jmax + 1))
            .to_scalar(ctx.prec);
        let ratio = PowExpr::new(ctx.p, BigRational::one(), sigma).to_scalar(ctx.prec);
        let tail_sum = crate::scalar::geometric_tail_sum(&ratio, &head)?;
        total = total + bq * tail_sum;
    } else if !law.is_zero() {
        let cap = cap.unwrap();
        for k in (jmax + 1)..=cap {
            let v = profile.value(k);
            if v.is_zero() {
                continue;
            }
            let cq = abs_pow_q(ctx, v.coeff())?;
            let mono = PowExpr::new(
                ctx.p,
                ctx.kappa.clone(),
                v.exp() * &ctx.q + &ctx.s * ctx.rat(k),
            )
            .to_scalar(ctx.prec);
            total = total + cq * mono;
        }
    }

    Ok(total)
}

/// `|c|^q` as a scalar (exact for integer `q` or perfect powers).
fn abs_pow_q(ctx: &Ctx<'_>, c: &BigRational) -> Result<Scalar> {
    Scalar::exact(c.abs()).pow_rational(&ctx.q, ctx.prec)
}

/// Weighted weak `L^q` norm: `sup_{t>0} t * W(t)^{1/q}` with
/// `W(t) = w({|f| > t})`, resolved by exact candidate enumeration.
pub fn weak_lq_norm<F: NormValue>(f: &F, spec: &NormSpec, prec: Precision) -> Result<Scalar> {
    Ok(weak_lq_outcome(f, spec, prec)?.value)
}

pub fn weak_lq_outcome<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<NormOutcome> {
    debug_assert!(matches!(spec.kind(), NormKind::WeakLq));
    let profile = f.profile();
    let ctx = Ctx::new(&profile, spec.q(), spec.weight(), prec)?;
    let (key, level, at_limit) = weak_key(&ctx)?;
    let value = key.root(ctx.u, prec);
    Ok(NormOutcome {
        value,
        ball_index: None,
        level,
        at_limit,
    })
}

/// The weak-norm supremum in key form `max_v v^u W(>=v)^w`, together with
/// the attaining level.
fn weak_key(ctx: &Ctx<'_>) -> Result<(Key, Option<Scalar>, bool)> {
    let profile = ctx.profile;
    if profile.is_zero() {
        return Ok((Key::zero(ctx.p), None, false));
    }
    let j0 = profile.inner_exp();
    let jmax = profile.jmax();
    let outer = &profile.outer;
    let inner = &profile.inner;

    // outer-tail divergence trichotomy: with decay p^{bk}, b < 0, the weak
    // norm is finite iff q|b| >= s
    let mut critical = false;
    if !outer.is_zero() {
        debug_assert!(outer.slope.is_negative());
        let crit = -(&outer.slope) * &ctx.q; // q|b|
        match crit.cmp(&ctx.s) {
            Ordering::Less => {
                return Err(Error::DivergentNorm {
                    tail: Tail::Outer,
                    detail: format!(
                        "weak L^q needs q(n - alpha) >= n + gamma; got q|slope| = {} < {}",
                        crit, ctx.s
                    ),
                });
            }
            Ordering::Equal => critical = true,
            Ordering::Greater => {}
        }
    }

    let mut best = Key::zero(ctx.p);
    let mut best_level: Option<Scalar> = None;
    let mut at_limit = false;

    let consider = |ctx: &Ctx<'_>,
                        v: &PowExpr,
                        best: &mut Key,
                        best_level: &mut Option<Scalar>,
                        at_limit: &mut bool|
     -> Result<()> {
        let geom = ctx.superlevel(v, true, None)?;
        let key = ctx.key(v, &geom.weighted_measure);
        if key.cmp(best, ctx.prec).is_gt() {
            *best = key;
            *best_level = Some(v.to_scalar(ctx.prec));
            *at_limit = false;
        }
        Ok(())
    };

    // window candidates
    for k in j0..=jmax {
        let v = profile.value(k);
        if !v.is_zero() {
            consider(ctx, &v.abs(), &mut best, &mut best_level, &mut at_limit)?;
        }
    }

    // inner plateau (constant inner tail)
    if !inner.is_zero() && inner.slope.is_zero() {
        let v = PowExpr::from_rational(ctx.p, inner.coeff.abs());
        consider(ctx, &v, &mut best, &mut best_level, &mut at_limit)?;
    }

    if critical {
        // limit candidate |B|^u (kappa/(1-p^{-s}))^w; all candidates whose
        // superlevel reaches the outer tail are dominated by it
        let l_coeff = Scalar::exact(rat_pow(&outer.coeff.abs(), ctx.u))
            * ctx
                .cball
                .pow_int(ctx.w)
                .expect("ball coefficient power cannot fail");
        let l_key = Key {
            base: ctx.p,
            coeff: l_coeff,
            exp: BigRational::zero(),
        };
        if l_key.cmp(&best, ctx.prec).is_gt() {
            best = l_key;
            best_level = None;
            at_limit = true;
        }
        // inner-ray candidates above the outer edge level
        if !inner.is_zero() && inner.slope.is_positive() {
            let edge = outer.value(ctx.p, jmax + 1).abs();
            let mut k = j0 - 1;
            loop {
                let v = inner.value(ctx.p, k).abs();
                if v.cmp_value(&edge).is_lt() {
                    break;
                }
                consider(ctx, &v, &mut best, &mut best_level, &mut at_limit)?;
                k -= 1;
            }
        }
        return Ok((best, best_level, at_limit));
    }

    // supercritical (or no outer tail): enumerate rays with certified
    // decreasing envelopes
    let mut outer_stop = jmax; // deepest outer sphere whose envelope was not yet dominated
    if !outer.is_zero() {
        let env_exp_step = &outer.slope * BigRational::from_integer(BigInt::from(ctx.u))
            + &ctx.s * BigRational::from_integer(BigInt::from(ctx.w));
        debug_assert!(env_exp_step.is_negative());
        let env_coeff = Scalar::exact(rat_pow(&outer.coeff.abs(), ctx.u))
            * ctx
                .cball
                .pow_int(ctx.w)
                .expect("ball coefficient power cannot fail");
        let mut k = jmax + 1;
        loop {
            let envelope = Key {
                base: ctx.p,
                coeff: env_coeff.clone(),
                exp: &env_exp_step * ctx.rat(k),
            };
            if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                break;
            }
            let v = outer.value(ctx.p, k).abs();
            consider(ctx, &v, &mut best, &mut best_level, &mut at_limit)?;
            outer_stop = k;
            k += 1;
            assert!(k - jmax < 200_000, "outer enumeration failed to converge");
        }
    }

    if !inner.is_zero() && inner.slope.is_positive() {
        // candidates below the outer frontier level are dominated (their
        // superlevel top lies beyond the frontier); without an outer tail
        // use the decaying bound v^u W_total^w
        let frontier = if outer.is_zero() {
            None
        } else {
            Some(outer.value(ctx.p, outer_stop + 1).abs())
        };
        let w_total = if outer.is_zero() {
            let tiny = smallest_positive_level(ctx);
            Some(
                ctx.superlevel(&tiny, true, None)?
                    .weighted_measure
                    .pow_int(ctx.w)
                    .expect("measure power cannot fail"),
            )
        } else {
            None
        };
        let mut k = j0 - 1;
        loop {
            let v = inner.value(ctx.p, k).abs();
            match (&frontier, &w_total) {
                (Some(edge), _) => {
                    if v.cmp_value(edge).is_lt() {
                        break;
                    }
                }
                (None, Some(wt)) => {
                    let envelope = Key::from_pow(&v.pow_int(ctx.u)).mul_scalar(wt);
                    if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                        break;
                    }
                }
                (None, None) => unreachable!(),
            }
            consider(ctx, &v, &mut best, &mut best_level, &mut at_limit)?;
            k -= 1;
            assert!(j0 - k < 200_000, "inner enumeration failed to converge");
        }
    }

    Ok((best, best_level, at_limit))
}

/// The smallest positive level the profile attains on window or inner ray
/// start; used only to size the total-measure bound when there is no outer
/// tail.
fn smallest_positive_level(ctx: &Ctx<'_>) -> PowExpr {
    let profile = ctx.profile;
    let mut smallest: Option<PowExpr> = None;
    for k in profile.inner_exp()..=profile.jmax() {
        let v = profile.value(k).abs();
        if v.is_zero() {
            continue;
        }
        smallest = Some(match smallest {
            None => v,
            Some(s) if v.cmp_value(&s).is_lt() => v,
            Some(s) => s,
        });
    }
    if !profile.inner.is_zero() {
        let v = profile.inner.value(ctx.p, profile.inner_exp() - 1).abs();
        smallest = Some(match smallest {
            None => v,
            Some(s) if v.cmp_value(&s).is_lt() => v,
            Some(s) => s,
        });
    }
    smallest.unwrap_or_else(|| PowExpr::one(ctx.p))
}

/// Central Morrey norm: `sup_g |B_g|^{-lambda-1/q} (int_{B_g} |f|^q)^{1/q}`.
pub fn central_morrey_norm<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<Scalar> {
    Ok(central_morrey_outcome(f, spec, prec)?.value)
}

pub fn central_morrey_outcome<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<NormOutcome> {
    debug_assert!(matches!(spec.kind(), NormKind::CentralMorrey));
    let profile = f.profile();
    let lambda = spec.lambda().expect("Morrey spec carries lambda");
    if profile.is_zero() {
        return Ok(NormOutcome::plain(Scalar::zero()));
    }
    let unweighted = WeightSpec::unweighted();
    let ctx = Ctx::new(&profile, spec.q(), &unweighted, prec)?;

    // lambda = -1/q: |B|^{-lambda-1/q} = 1 and the sup over balls is the
    // monotone limit, the global L^q norm
    if is_boundary(lambda, ctx.u, ctx.w) {
        let value = lq_norm_profile(&profile, spec.q(), &unweighted, prec)?;
        return Ok(NormOutcome {
            value,
            ball_index: None,
            level: None,
            at_limit: true,
        });
    }

    // exponent of p^{-n gamma_ball} in the key: eta = n (lambda u + w) > 0
    let eta = morrey_eta(&ctx, lambda);
    let j0 = profile.inner_exp();
    let jmax = profile.jmax();

    let mut best = Key::zero(ctx.p);
    let mut best_ball: Option<i64> = None;
    let mut at_limit = false;

    let consider = |ctx: &Ctx<'_>, g: i64, best: &mut Key, best_ball: &mut Option<i64>, at_limit: &mut bool| -> Result<()> {
        let integral = lq_integral(ctx, Some(g))?;
        let key = Key {
            base: ctx.p,
            coeff: integral
                .pow_int(ctx.w)
                .expect("nonnegative integral power cannot fail"),
            exp: -(&eta) * ctx.rat(g),
        };
        if key.cmp(best, ctx.prec).is_gt() {
            *best = key;
            *best_ball = Some(g);
            *at_limit = false;
        }
        Ok(())
    };

    // branch g <= j0: the key is c * p^{g u (a - n lambda)} with positive
    // exponent, so g = j0 dominates the branch
    consider(&ctx, j0, &mut best, &mut best_ball, &mut at_limit)?;
    for g in (j0 + 1)..=jmax {
        consider(&ctx, g, &mut best, &mut best_ball, &mut at_limit)?;
    }

    // branch g > jmax
    let outer = profile.outer_law().clone();
    if outer.is_zero() {
        // integral is constant beyond jmax; the p-factor strictly decays
    } else {
        let sigma = &outer.slope * &ctx.q + &ctx.s; // outer integrand exponent
        match sigma.cmp(&BigRational::zero()) {
            Ordering::Less => {
                // integral converges to I_inf: decreasing envelope
                let i_inf = lq_integral(&ctx, None)?;
                let env_coeff = i_inf
                    .pow_int(ctx.w)
                    .expect("nonnegative integral power cannot fail");
                let mut g = jmax + 1;
                loop {
                    let envelope = Key {
                        base: ctx.p,
                        coeff: env_coeff.clone(),
                        exp: -(&eta) * ctx.rat(g),
                    };
                    if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                        break;
                    }
                    consider(&ctx, g, &mut best, &mut best_ball, &mut at_limit)?;
                    g += 1;
                    assert!(g - jmax < 200_000, "Morrey enumeration failed to converge");
                }
            }
            Ordering::Equal => {
                // linear growth: enumerate until the first decrease (the
                // step ratio is monotone decreasing)
                let mut g = jmax + 1;
                let mut prev = None::<Key>;
                loop {
                    let integral = lq_integral(&ctx, Some(g))?;
                    let key = Key {
                        base: ctx.p,
                        coeff: integral
                            .pow_int(ctx.w)
                            .expect("nonnegative integral power cannot fail"),
                        exp: -(&eta) * ctx.rat(g),
                    };
                    if key.cmp(&best, ctx.prec).is_gt() {
                        best = key.clone();
                        best_ball = Some(g);
                        at_limit = false;
                    }
                    if let Some(p) = prev {
                        if key.cmp(&p, ctx.prec).is_le() {
                            break;
                        }
                    }
                    prev = Some(key);
                    g += 1;
                    assert!(g - jmax < 200_000, "Morrey enumeration failed to converge");
                }
            }
            Ordering::Greater => {
                // geometric growth p^{g sigma}: the key behaves like
                // p^{g u (slope - n lambda)}
                let xi = BigRational::from_integer(BigInt::from(ctx.u))
                    * (&outer.slope - profile.params().n_rational() * lambda);
                match xi.cmp(&BigRational::zero()) {
                    Ordering::Greater => {
                        return Err(Error::DivergentNorm {
                            tail: Tail::Outer,
                            detail: format!(
                                "central Morrey norm diverges: local integrals grow like \
                                 p^(g*{}) against |B_g|^(-lambda-1/q)",
                                xi
                            ),
                        });
                    }
                    Ordering::Equal => {
                        // the key tends to D^w: take max(first candidate, limit)
                        consider(&ctx, jmax + 1, &mut best, &mut best_ball, &mut at_limit)?;
                        let d = morrey_growth_coefficient(&ctx, &outer, &sigma)?;
                        let l_key = Key {
                            base: ctx.p,
                            coeff: d
                                .pow_int(ctx.w)
                                .expect("nonnegative coefficient power cannot fail"),
                            exp: -(&eta) * ctx.rat(jmax + 1)
                                + &sigma * BigRational::from_integer(BigInt::from(ctx.w))
                                    * ctx.rat(jmax + 1),
                        };
                        // normalize: D p^{g sigma} against p^{-g eta} is
                        // g-independent at xi = 0, so evaluate at any g
                        if l_key.cmp(&best, ctx.prec).is_gt() {
                            best = l_key;
                            best_ball = None;
                            at_limit = true;
                        }
                    }
                    Ordering::Less => {
                        // decaying: envelope I_g <= C' p^{g sigma}
                        let d = morrey_growth_coefficient(&ctx, &outer, &sigma)?;
                        let i_jmax = lq_integral(&ctx, Some(jmax))?;
                        let c_prime = &d + &i_jmax; // coarse but decreasing bound
                        let env_coeff = c_prime
                            .pow_int(ctx.w)
                            .expect("nonnegative coefficient power cannot fail");
                        let wsigma = &sigma * BigRational::from_integer(BigInt::from(ctx.w));
                        let mut g = jmax + 1;
                        loop {
                            let envelope = Key {
                                base: ctx.p,
                                coeff: env_coeff.clone(),
                                exp: &wsigma * ctx.rat(g) - &eta * ctx.rat(g),
                            };
                            if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                                break;
                            }
                            consider(&ctx, g, &mut best, &mut best_ball, &mut at_limit)?;
                            g += 1;
                            assert!(
                                g - jmax < 200_000,
                                "Morrey enumeration failed to converge"
                            );
                        }
                    }
                }
            }
        }
    }

    let value = best.root(ctx.u, prec);
    Ok(NormOutcome {
        value,
        ball_index: best_ball,
        level: None,
        at_limit,
    })
}

/// `lambda == -1/q`?
fn is_boundary(lambda: &BigRational, u: i64, w: i64) -> bool {
    lambda * BigRational::from_integer(BigInt::from(u))
        == -BigRational::from_integer(BigInt::from(w))
}

/// `eta = n (lambda u + w)`: the Morrey keys carry `p^{-eta g}`.
fn morrey_eta(ctx: &Ctx<'_>, lambda: &BigRational) -> BigRational {
    ctx.profile.params().n_rational()
        * (lambda * BigRational::from_integer(BigInt::from(ctx.u))
            + BigRational::from_integer(BigInt::from(ctx.w)))
}

/// Leading coefficient `D` of the divergent local integral
/// `I_g ~ D p^{g sigma}`: `D = |B|^q kappa p^sigma / (p^sigma - 1)`.
fn morrey_growth_coefficient(
    ctx: &Ctx<'_>,
    outer: &TailLaw,
    sigma: &BigRational,
) -> Result<Scalar> {
    let bq = abs_pow_q(ctx, &outer.coeff)?;
    let p_sigma = PowExpr::new(ctx.p, BigRational::one(), sigma.clone()).to_scalar(ctx.prec);
    let denom = &p_sigma - &Scalar::one();
    Ok(bq * Scalar::exact(ctx.kappa.clone()) * p_sigma / denom)
}

/// Weak central Morrey norm:
/// `sup_g |B_g|^{-lambda-1/q} sup_t t |{x in B_g : |f(x)| > t}|^{1/q}`.
pub fn weak_central_morrey_norm<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<Scalar> {
    Ok(weak_central_morrey_outcome(f, spec, prec)?.value)
}

pub fn weak_central_morrey_outcome<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<NormOutcome> {
    debug_assert!(matches!(spec.kind(), NormKind::WeakCentralMorrey));
    let profile = f.profile();
    let lambda = spec.lambda().expect("Morrey spec carries lambda");
    if profile.is_zero() {
        return Ok(NormOutcome::plain(Scalar::zero()));
    }
    let unweighted = WeightSpec::unweighted();
    let ctx = Ctx::new(&profile, spec.q(), &unweighted, prec)?;

    // boundary lambda = -1/q: reduces to the global weak L^q norm
    if is_boundary(lambda, ctx.u, ctx.w) {
        let (key, level, at_limit) = weak_key(&ctx)?;
        return Ok(NormOutcome {
            value: key.root(ctx.u, prec),
            ball_index: None,
            level,
            at_limit,
        });
    }

    let eta = morrey_eta(&ctx, lambda);
    let j0 = profile.inner_exp();
    let jmax = profile.jmax();
    let inner = profile.inner_law().clone();
    let outer = profile.outer_law().clone();
    let n_lambda = profile.params().n_rational() * lambda;

    let mut best = Key::zero(ctx.p);
    let mut best_ball: Option<i64> = None;
    let mut best_level: Option<Scalar> = None;
    let mut at_limit = false;

    // evaluate all pairs (level v, ball g) with g a jump sphere of the
    // superlevel set of v
    let consider_level = |ctx: &Ctx<'_>,
                              v: &PowExpr,
                              best: &mut Key,
                              best_ball: &mut Option<i64>,
                              best_level: &mut Option<Scalar>,
                              at_limit: &mut bool|
     -> Result<()> {
        let geom = ctx.superlevel(v, true, None)?;
        let mut balls: Vec<i64> = Vec::new();
        if let Some(top) = geom.inner_ball {
            balls.push(top);
        }
        if let Some((lo, hi)) = geom.inner_segment {
            balls.extend(lo..=hi);
        }
        balls.extend(geom.window_spheres.iter().copied());
        if let Some((lo, hi)) = geom.outer_segment {
            balls.extend(lo..=hi);
        }
        let vu = Key::from_pow(&v.abs().pow_int(ctx.u));
        for &g in &balls {
            let truncated = ctx.superlevel(v, true, Some(g))?;
            let key = Key {
                base: ctx.p,
                coeff: vu.coeff.clone()
                    * truncated
                        .weighted_measure
                        .pow_int(ctx.w)
                        .expect("nonnegative measure power cannot fail"),
                exp: &vu.exp - &eta * ctx.rat(g),
            };
            if key.cmp(best, ctx.prec).is_gt() {
                *best = key;
                *best_ball = Some(g);
                *best_level = Some(v.to_scalar(ctx.prec));
                *at_limit = false;
            }
        }
        Ok(())
    };

    // window levels
    for k in j0..=jmax {
        let v = profile.value(k);
        if !v.is_zero() {
            consider_level(
                &ctx,
                &v.abs(),
                &mut best,
                &mut best_ball,
                &mut best_level,
                &mut at_limit,
            )?;
        }
    }

    // inner plateau level
    if !inner.is_zero() && inner.slope.is_zero() {
        let v = PowExpr::from_rational(ctx.p, inner.coeff.abs());
        consider_level(
            &ctx,
            &v,
            &mut best,
            &mut best_ball,
            &mut best_level,
            &mut at_limit,
        )?;
    }

    // outer-ray levels, with the per-sphere envelope |B|^u p^{k u (b - n lambda)}
    let mut outer_stop = jmax;
    if !outer.is_zero() {
        debug_assert!(outer.slope.is_negative());
        let step = BigRational::from_integer(BigInt::from(ctx.u)) * (&outer.slope - &n_lambda);
        match step.cmp(&BigRational::zero()) {
            Ordering::Greater => {
                return Err(Error::DivergentNorm {
                    tail: Tail::Outer,
                    detail: format!(
                        "weak central Morrey norm diverges: outer levels dominate the \
                         ball normalization (exponent {} per sphere)",
                        step
                    ),
                });
            }
            Ordering::Equal => {
                // limit candidate |B|^u; every candidate whose superlevel
                // reaches the outer tail is dominated by it
                let l_key = Key {
                    base: ctx.p,
                    coeff: Scalar::exact(rat_pow(&outer.coeff.abs(), ctx.u)),
                    exp: BigRational::zero(),
                };
                if l_key.cmp(&best, ctx.prec).is_gt() {
                    best = l_key;
                    best_ball = None;
                    best_level = None;
                    at_limit = true;
                }
            }
            Ordering::Less => {
                let env_coeff = Scalar::exact(rat_pow(&outer.coeff.abs(), ctx.u));
                let mut k = jmax + 1;
                loop {
                    let envelope = Key {
                        base: ctx.p,
                        coeff: env_coeff.clone(),
                        exp: &step * ctx.rat(k),
                    };
                    if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                        break;
                    }
                    let v = outer.value(ctx.p, k).abs();
                    consider_level(
                        &ctx,
                        &v,
                        &mut best,
                        &mut best_ball,
                        &mut best_level,
                        &mut at_limit,
                    )?;
                    outer_stop = k;
                    k += 1;
                    assert!(
                        k - jmax < 200_000,
                        "weak Morrey enumeration failed to converge"
                    );
                }
            }
        }
    }

    // inner-ray levels (decaying toward the origin)
    if !inner.is_zero() && inner.slope.is_positive() {
        let frontier = if outer.is_zero() {
            None
        } else {
            Some(outer.value(ctx.p, outer_stop + 1).abs())
        };
        // without an outer tail: obj <= v^u p^{-n jmax lambda u} decays in v
        let cap_exp = -(profile.params().n_rational())
            * lambda
            * BigRational::from_integer(BigInt::from(ctx.u))
            * ctx.rat(jmax.max(j0));
        let mut k = j0 - 1;
        loop {
            let v = inner.value(ctx.p, k).abs();
            match &frontier {
                Some(edge) => {
                    if v.cmp_value(edge).is_lt() {
                        break;
                    }
                }
                None => {
                    let envelope = Key {
                        base: ctx.p,
                        coeff: Key::from_pow(&v.pow_int(ctx.u)).coeff,
                        exp: v.exp() * BigRational::from_integer(BigInt::from(ctx.u)) + &cap_exp,
                    };
                    if !best.is_zero() && envelope.cmp(&best, ctx.prec).is_le() {
                        break;
                    }
                }
            }
            consider_level(
                &ctx,
                &v,
                &mut best,
                &mut best_ball,
                &mut best_level,
                &mut at_limit,
            )?;
            k -= 1;
            assert!(
                j0 - k < 200_000,
                "weak Morrey enumeration failed to converge"
            );
        }
    }

    let value = best.root(ctx.u, prec);
    Ok(NormOutcome {
        value,
        ball_index: best_ball,
        level: best_level,
        at_limit,
    })
}

/// Dispatch on the spec kind, returning the attaining data.
pub fn norm_outcome<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    prec: Precision,
) -> Result<NormOutcome> {
    match spec.kind() {
        NormKind::Lq => Ok(NormOutcome::plain(lq_norm(f, spec, prec)?)),
        NormKind::WeakLq => weak_lq_outcome(f, spec, prec),
        NormKind::CentralMorrey => central_morrey_outcome(f, spec, prec),
        NormKind::WeakCentralMorrey => weak_central_morrey_outcome(f, spec, prec),
    }
}

/// Geometric grid for the brute-force weak-norm oracle.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub t_min: Scalar,
    pub t_max: Scalar,
    pub steps: u32,
}

/// Brute-force lower bound on the weak `L^q` norm: maximize
/// `t * W_window(t)^{1/q}` over a geometric grid of thresholds, with the
/// superlevel measure summed over the window only (no analytic tails).
///
/// Independent of the candidate-enumeration path; always `<=` the true weak
/// norm.
pub fn weak_norm_grid_oracle<F: NormValue>(
    f: &F,
    spec: &NormSpec,
    grid: &GridSpec,
    window: std::ops::RangeInclusive<i64>,
    prec: Precision,
) -> Result<Scalar> {
    if !matches!(spec.kind(), NormKind::WeakLq) {
        return Err(Error::InvalidParameter(
            "the grid oracle evaluates weak L^q norms only".into(),
        ));
    }
    if grid.steps < 2 {
        return Err(Error::InvalidParameter(
            "grid must have at least 2 steps".into(),
        ));
    }
    if !grid.t_min.is_positive() || grid.t_max.cmp_value(&grid.t_min).is_lt() {
        return Err(Error::InvalidParameter(
            "grid thresholds must satisfy 0 < t_min <= t_max".into(),
        ));
    }
    let profile = f.profile();
    let ctx = Ctx::new(&profile, spec.q(), spec.weight(), prec)?;

    // sorted distinct positive levels with measures of {|f| >= level},
    // restricted to the window
    let levels: Vec<(Scalar, Scalar)> = {
        let mut values: Vec<(Scalar, Scalar)> = Vec::new();
        for k in window.clone() {
            let v = profile.value(k).abs();
            if !v.is_zero() {
                values.push((v.to_scalar(prec), ctx.sphere_w(k)));
            }
        }
        values.sort_by(|a, b| a.0.cmp_value(&b.0));
        // suffix-sum measures over distinct levels
        let mut acc = Scalar::zero();
        let mut distinct: Vec<(Scalar, Scalar)> = Vec::new();
        for (v, mu) in values.into_iter().rev() {
            acc = acc + mu;
            match distinct.last_mut() {
                Some((lv, lm)) if lv.cmp_value(&v).is_eq() => *lm = acc.clone(),
                _ => distinct.push((v, acc.clone())),
            }
        }
        distinct.reverse();
        distinct
    };
    if levels.is_empty() {
        return Ok(Scalar::zero());
    }

    // W_window(t) = measure of levels strictly above t
    let window_measure = |t: &Scalar| -> Scalar {
        // binary search the first level > t
        let mut lo = 0usize;
        let mut hi = levels.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if levels[mid].0.cmp_value(t).is_gt() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo < levels.len() {
            levels[lo].1.clone()
        } else {
            Scalar::zero()
        }
    };

    let steps = grid.steps as i64;
    let ratio = (&grid.t_max / &grid.t_min).pow_rational(
        &BigRational::new(BigInt::one(), BigInt::from(steps - 1)),
        prec,
    )?;
    let ratio_q = ratio.pow_rational(&ctx.q, prec)?;
    let mut t = grid.t_min.clone();
    let mut tq = grid.t_min.pow_rational(&ctx.q, prec)?;
    let mut best_obj = Scalar::zero();
    for _ in 0..steps {
        let w = window_measure(&t);
        if !w.is_zero() {
            let obj = &tq * &w;
            if obj.cmp_value(&best_obj).is_gt() {
                best_obj = obj;
            }
        }
        t = t * ratio.clone();
        tq = tq * ratio_q.clone();
    }
    let inv_q = BigRational::new(BigInt::from(ctx.w), BigInt::from(ctx.u));
    best_obj.pow_rational(&inv_q, prec)
}
