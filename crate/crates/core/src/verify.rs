//! Sharp-constant verification: extremizer equality, randomized
//! non-exceedance sweeps, and hill-climbing sharpness searches.
//!
//! Two results are checked. The weak endpoint bound: for `0 < alpha < n` and
//! `n + gamma > 0`,
//!
//! ```text
//! || H_alpha f ||_{L^{q,inf}(|x|^gamma)} <= C ||f||_{L^1},
//! q = (n+gamma)/(n-alpha),
//! C = ((1-p^{-n})/(1-p^{-(n+gamma)}))^{(n-alpha)/(n+gamma)},
//! ```
//!
//! with equality approached by the unit-ball indicator. And the weak
//! central-Morrey bound: for `1 <= q < infinity` and `-1/q <= lambda < 0`,
//! `||H f||_{W B^{q,lambda}} <= ||f||_{B^{q,lambda}}` with sharp constant 1,
//! attained by the same extremizer.
//!
//! Derivation notes (the implemented forms):
//!
//! * The exponent on the endpoint constant is `(n-alpha)/(n+gamma)`: it is
//!   forced by the superlevel chain, where the weighted measure of the ball
//!   `{|x|_p < (C_1/t)^{1/(n-alpha)}}` scales like `(C_1/t)^{(n+gamma)/(n-alpha)}`
//!   and the weak norm takes the `(n-alpha)/(n+gamma)` root of it.
//! * The right-hand side of the endpoint bound carries the *unweighted*
//!   `L^1` norm: the pointwise bound `|H_alpha f(x)| <= |x|^{alpha-n} ||f||_1`
//!   that seeds the chain integrates `f` against plain Haar measure.
//! * For thresholds `0 < t < 1`, the superlevel set of `H_alpha` applied to
//!   the unit-ball indicator is `{ t^{1/alpha} < |x|_p < t^{-1/(n-alpha)} }`:
//!   on the inner branch the image equals `|x|_p^alpha`, so the inner radius
//!   is `t^{1/alpha}` (not `t^{1/n}`).
//!
//! All sweeps are deterministic functions of the config, including its seed;
//! trial order never changes results (max-reduction is order-independent).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hardy::{hardy_apply, HardyParams};
use crate::norm::{weak_central_morrey_norm, weak_lq_norm, central_morrey_norm, NormSpec};
use crate::padic::{PAdicParams, WeightSpec};
use crate::radial::{random_function, RadialStepFunction, RandomFnConfig, SignMode};
use crate::scalar::{rat_pow, PowExpr, Precision, Scalar};

/// Parameters for a weak-endpoint verification run.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub params: PAdicParams,
    pub alpha: BigRational,
    pub gamma: BigRational,
    pub trials: u32,
    pub seed: u64,
}

impl EndpointConfig {
    /// Enforces `0 < alpha < n`, `n + gamma > 0`, and (because the norm
    /// layer restricts to `q >= 1`) `gamma >= -alpha`.
    pub fn new(
        params: PAdicParams,
        alpha: BigRational,
        gamma: BigRational,
        trials: u32,
        seed: u64,
    ) -> Result<Self> {
        if !alpha.is_positive() || alpha >= params.n_rational() {
            return Err(Error::InvalidParameter(format!(
                "endpoint check requires 0 < alpha < n = {}, got alpha = {}",
                params.n(),
                alpha
            )));
        }
        let s = params.n_rational() + &gamma;
        if !s.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "endpoint check requires n + gamma > 0, got {}",
                s
            )));
        }
        if gamma < -alpha.clone() {
            return Err(Error::InvalidParameter(format!(
                "gamma = {} gives q = (n+gamma)/(n-alpha) < 1, outside the supported range",
                gamma
            )));
        }
        Ok(Self {
            params,
            alpha,
            gamma,
            trials,
            seed,
        })
    }

    /// The endpoint exponent `q = (n+gamma)/(n-alpha)`.
    pub fn q(&self) -> BigRational {
        (self.params.n_rational() + &self.gamma) / (self.params.n_rational() - &self.alpha)
    }
}

/// Parameters for a weak central-Morrey verification run.
#[derive(Debug, Clone)]
pub struct MorreyConfig {
    pub params: PAdicParams,
    pub q: BigRational,
    pub lambda: BigRational,
    pub trials: u32,
    pub seed: u64,
}

impl MorreyConfig {
    /// Enforces `q >= 1` and `-1/q <= lambda < 0`.
    pub fn new(
        params: PAdicParams,
        q: BigRational,
        lambda: BigRational,
        trials: u32,
        seed: u64,
    ) -> Result<Self> {
        // constructing the specs performs the range checks
        NormSpec::central_morrey(q.clone(), lambda.clone())?;
        Ok(Self {
            params,
            q,
            lambda,
            trials,
            seed,
        })
    }
}

/// Equality and non-exceedance tolerances derived from the working
/// precision: `tol_eq = 10^-(digits-20)`, `tol_excess = 10^-(digits-30)`.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub eq: Scalar,
    pub excess: Scalar,
}

impl Tolerances {
    pub fn for_precision(prec: Precision) -> Self {
        let d = prec.digits();
        let eq_digits = d.saturating_sub(20).max(1) as i64;
        let excess_digits = d.saturating_sub(30).max(1) as i64;
        let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
        Tolerances {
            eq: Scalar::exact(rat_pow(&tenth, eq_digits)),
            excess: Scalar::exact(rat_pow(&tenth, excess_digits)),
        }
    }
}

/// Which theorem a report verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremKind {
    WeakEndpoint,
    WeakCentralMorrey,
}

/// Outcome of one verification run.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub kind: TheoremKind,
    pub params: PAdicParams,
    /// `(alpha, gamma)` for the endpoint check, `(q, lambda)` for Morrey.
    pub exponents: (BigRational, BigRational),
    pub trials: u32,
    pub seed: u64,
    pub precision_digits: u32,
    pub theoretical_constant: Scalar,
    pub extremizer_ratio: Scalar,
    /// Max ratio over the nonnegative random population.
    pub max_random_ratio: Scalar,
    /// Max ratio over the signed random population.
    pub max_signed_ratio: Scalar,
    /// Function spec (JSON) of the nonnegative argmax.
    pub argmax_spec: Option<String>,
    /// Zero draws that were redrawn.
    pub redraws: u32,
    pub tolerances: Tolerances,
    pub extremizer_ok: bool,
    pub non_exceedance_ok: bool,
    pub pass: bool,
}

impl VerificationReport {
    /// JSON rendering: every scalar appears as a decimal string with an
    /// exactness flag.
    pub fn to_json(&self) -> Value {
        let digits = self.precision_digits;
        let scalar = |s: &Scalar| -> Value {
            json!({
                "decimal": s.to_decimal_string(digits),
                "exact": s.is_exact(),
            })
        };
        let (e1, e2) = (&self.exponents.0, &self.exponents.1);
        let (k1, k2) = match self.kind {
            TheoremKind::WeakEndpoint => ("alpha", "gamma"),
            TheoremKind::WeakCentralMorrey => ("q", "lambda"),
        };
        json!({
            "theorem": match self.kind {
                TheoremKind::WeakEndpoint => "weak-endpoint",
                TheoremKind::WeakCentralMorrey => "weak-central-morrey",
            },
            "p": self.params.p(),
            "n": self.params.n(),
            k1: crate::scalar::format_rational(e1),
            k2: crate::scalar::format_rational(e2),
            "trials": self.trials,
            "seed": self.seed,
            "precision_digits": digits,
            "theoretical_constant": scalar(&self.theoretical_constant),
            "extremizer_ratio": scalar(&self.extremizer_ratio),
            "max_random_ratio": scalar(&self.max_random_ratio),
            "max_signed_ratio": scalar(&self.max_signed_ratio),
            "argmax_spec": self.argmax_spec.as_ref()
                .and_then(|s| serde_json::from_str::<Value>(s).ok())
                .unwrap_or(Value::Null),
            "redraws": self.redraws,
            "tolerance_eq": self.tolerances.eq.to_decimal_string(3),
            "tolerance_excess": self.tolerances.excess.to_decimal_string(3),
            "extremizer_ok": self.extremizer_ok,
            "non_exceedance_ok": self.non_exceedance_ok,
            "pass": self.pass,
        })
    }
}

/// The sharp endpoint constant
/// `((1 - p^{-n}) / (1 - p^{-(n+gamma)}))^{(n-alpha)/(n+gamma)}`.
pub fn endpoint_sharp_constant(
    params: &PAdicParams,
    alpha: &BigRational,
    gamma: &BigRational,
    prec: Precision,
) -> Scalar {
    let n = params.n_rational();
    let s = &n + gamma;
    let denom = Scalar::one() - PowExpr::new(params.p(), BigRational::one(), -s.clone())
        .to_scalar(prec);
    let base = Scalar::exact(params.kappa()) / denom;
    let expo = (&n - alpha) / &s;
    base.pow_rational(&expo, prec)
        .expect("positive base power cannot fail")
}

/// Mix a trial index into the sweep seed (splitmix64 step).
fn trial_seed(base: u64, stream: u64, trial: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(trial.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shape of the random populations used by the sweeps. Fixed so that a
/// config (with its seed) fully determines the report.
fn sweep_shape(sign_mode: SignMode) -> RandomFnConfig {
    RandomFnConfig {
        j0_range: (-3, 1),
        jmax_range: (-2, 4),
        max_numer: 8,
        max_denom: 4,
        sign_mode,
    }
}

/// One ratio evaluation for the endpoint theorem:
/// `weak L^q(|x|^gamma) of H_alpha f` over `||f||_1`.
fn endpoint_ratio(
    f: &RadialStepFunction,
    hardy: &HardyParams,
    spec: &NormSpec,
    prec: Precision,
) -> Result<Scalar> {
    let image = hardy_apply(f, hardy)?;
    let numer = weak_lq_norm(&image, spec, prec)?;
    let denom = f.l1_norm();
    Ok(&numer / &denom)
}

/// One ratio evaluation for the Morrey theorem:
/// `weak central Morrey of H f` over `central Morrey of f`.
fn morrey_ratio(
    f: &RadialStepFunction,
    hardy: &HardyParams,
    weak_spec: &NormSpec,
    strong_spec: &NormSpec,
    prec: Precision,
) -> Result<Scalar> {
    let image = hardy_apply(f, hardy)?;
    let numer = weak_central_morrey_norm(&image, weak_spec, prec)?;
    let denom = central_morrey_norm(f, strong_spec, prec)?;
    Ok(&numer / &denom)
}

struct SweepOutcome {
    max_ratio: Scalar,
    argmax: Option<RadialStepFunction>,
    redraws: u32,
}

/// Run `trials` seeded draws of a population, maximizing the ratio.
fn sweep(
    trials: u32,
    seed: u64,
    stream: u64,
    sign_mode: SignMode,
    params: PAdicParams,
    mut ratio: impl FnMut(&RadialStepFunction) -> Result<Scalar>,
) -> Result<SweepOutcome> {
    let shape = sweep_shape(sign_mode);
    let mut max_ratio = Scalar::zero();
    let mut argmax = None;
    let mut redraws = 0u32;
    for trial in 0..trials {
        let mut attempt = 0u64;
        let f = loop {
            let s = trial_seed(seed, stream, trial as u64 + (attempt << 32));
            let f = random_function(s, &shape, params);
            if !f.is_zero() {
                break f;
            }
            redraws += 1;
            attempt += 1;
            if attempt > 64 {
                return Err(Error::InvalidParameter(
                    "random population keeps drawing the zero function".into(),
                ));
            }
        };
        let r = ratio(&f)?;
        if r.cmp_value(&max_ratio).is_gt() {
            max_ratio = r;
            argmax = Some(f);
        }
    }
    Ok(SweepOutcome {
        max_ratio,
        argmax,
        redraws,
    })
}

/// Verify the weak endpoint bound: extremizer equality within `tol_eq` and
/// randomized non-exceedance within `tol_excess`, over nonnegative and
/// signed populations.
pub fn verify_endpoint(config: &EndpointConfig, prec: Precision) -> Result<VerificationReport> {
    let params = config.params;
    let hardy = HardyParams::new(params, config.alpha.clone())?;
    let spec = NormSpec::weak_lq(config.q(), WeightSpec::new(config.gamma.clone()))?;
    let tol = Tolerances::for_precision(prec);

    let constant = endpoint_sharp_constant(&params, &config.alpha, &config.gamma, prec);
    let f0 = RadialStepFunction::unit_ball_indicator(params);
    let extremizer_ratio = endpoint_ratio(&f0, &hardy, &spec, prec)?;

    let extremizer_ok = {
        let diff = (&extremizer_ratio - &constant).abs();
        diff.cmp_value(&tol.eq).is_le()
    };

    let nonneg = sweep(
        config.trials,
        config.seed,
        1,
        SignMode::NonNegative,
        params,
        |f| endpoint_ratio(f, &hardy, &spec, prec),
    )?;
    let signed = sweep(
        config.trials,
        config.seed,
        2,
        SignMode::Signed,
        params,
        |f| endpoint_ratio(f, &hardy, &spec, prec),
    )?;

    let ceiling = &constant * &(Scalar::one() + tol.excess.clone());
    let non_exceedance_ok = nonneg.max_ratio.cmp_value(&ceiling).is_le()
        && signed.max_ratio.cmp_value(&ceiling).is_le();

    Ok(VerificationReport {
        kind: TheoremKind::WeakEndpoint,
        params,
        exponents: (config.alpha.clone(), config.gamma.clone()),
        trials: config.trials,
        seed: config.seed,
        precision_digits: prec.digits(),
        theoretical_constant: constant,
        extremizer_ratio,
        max_random_ratio: nonneg.max_ratio,
        max_signed_ratio: signed.max_ratio,
        argmax_spec: nonneg.argmax.map(|f| f.to_spec_json()),
        redraws: nonneg.redraws + signed.redraws,
        tolerances: tol,
        extremizer_ok,
        non_exceedance_ok,
        pass: extremizer_ok && non_exceedance_ok,
    })
}

/// Verify the weak central-Morrey bound (`alpha = 0`, sharp constant 1).
pub fn verify_morrey(config: &MorreyConfig, prec: Precision) -> Result<VerificationReport> {
    let params = config.params;
    let hardy = HardyParams::plain(params);
    let weak_spec = NormSpec::weak_central_morrey(config.q.clone(), config.lambda.clone())?;
    let strong_spec = NormSpec::central_morrey(config.q.clone(), config.lambda.clone())?;
    let tol = Tolerances::for_precision(prec);

    let constant = Scalar::one();
    let f0 = RadialStepFunction::unit_ball_indicator(params);
    let extremizer_ratio = morrey_ratio(&f0, &hardy, &weak_spec, &strong_spec, prec)?;

    let extremizer_ok = {
        let diff = (&extremizer_ratio - &constant).abs();
        diff.cmp_value(&tol.eq).is_le()
    };

    let nonneg = sweep(
        config.trials,
        config.seed,
        1,
        SignMode::NonNegative,
        params,
        |f| morrey_ratio(f, &hardy, &weak_spec, &strong_spec, prec),
    )?;
    let signed = sweep(
        config.trials,
        config.seed,
        2,
        SignMode::Signed,
        params,
        |f| morrey_ratio(f, &hardy, &weak_spec, &strong_spec, prec),
    )?;

    let ceiling = &constant * &(Scalar::one() + tol.excess.clone());
    let non_exceedance_ok = nonneg.max_ratio.cmp_value(&ceiling).is_le()
        && signed.max_ratio.cmp_value(&ceiling).is_le();

    Ok(VerificationReport {
        kind: TheoremKind::WeakCentralMorrey,
        params,
        exponents: (config.q.clone(), config.lambda.clone()),
        trials: config.trials,
        seed: config.seed,
        precision_digits: prec.digits(),
        theoretical_constant: constant,
        extremizer_ratio,
        max_random_ratio: nonneg.max_ratio,
        max_signed_ratio: signed.max_ratio,
        argmax_spec: nonneg.argmax.map(|f| f.to_spec_json()),
        redraws: nonneg.redraws + signed.redraws,
        tolerances: tol,
        extremizer_ok,
        non_exceedance_ok,
        pass: extremizer_ok && non_exceedance_ok,
    })
}

/// A sharpness search over either theorem.
#[derive(Debug, Clone)]
pub enum SearchSpace {
    Endpoint(EndpointConfig),
    Morrey(MorreyConfig),
}

/// Where the hill climb starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStart {
    Extremizer,
    Random,
}

/// Outcome of a sharpness search.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub generations: u32,
    pub theoretical_constant: Scalar,
    pub start_ratio: Scalar,
    pub best_ratio: Scalar,
    pub best_spec: String,
    /// Best ratio never exceeds the constant (with excess tolerance).
    pub pass: bool,
}

impl SearchReport {
    pub fn to_json(&self, digits: u32) -> Value {
        let scalar = |s: &Scalar| -> Value {
            json!({
                "decimal": s.to_decimal_string(digits),
                "exact": s.is_exact(),
            })
        };
        json!({
            "generations": self.generations,
            "theoretical_constant": scalar(&self.theoretical_constant),
            "start_ratio": scalar(&self.start_ratio),
            "best_ratio": scalar(&self.best_ratio),
            "best_spec": serde_json::from_str::<Value>(&self.best_spec)
                .unwrap_or(Value::Null),
            "pass": self.pass,
        })
    }
}

struct RatioEnv {
    params: PAdicParams,
    constant: Scalar,
    seed: u64,
    generations: u32,
}

type RatioFn = Box<dyn Fn(&RadialStepFunction) -> Result<Scalar>>;

fn search_env(
    space: &SearchSpace,
    prec: Precision,
    generations: u32,
) -> Result<(RatioEnv, RatioFn)> {
    match space {
        SearchSpace::Endpoint(cfg) => {
            let hardy = HardyParams::new(cfg.params, cfg.alpha.clone())?;
            let spec = NormSpec::weak_lq(cfg.q(), WeightSpec::new(cfg.gamma.clone()))?;
            let constant = endpoint_sharp_constant(&cfg.params, &cfg.alpha, &cfg.gamma, prec);
            let env = RatioEnv {
                params: cfg.params,
                constant,
                seed: cfg.seed,
                generations,
            };
            Ok((
                env,
                Box::new(move |f| endpoint_ratio(f, &hardy, &spec, prec)),
            ))
        }
        SearchSpace::Morrey(cfg) => {
            let hardy = HardyParams::plain(cfg.params);
            let weak_spec =
                NormSpec::weak_central_morrey(cfg.q.clone(), cfg.lambda.clone())?;
            let strong_spec = NormSpec::central_morrey(cfg.q.clone(), cfg.lambda.clone())?;
            let env = RatioEnv {
                params: cfg.params,
                constant: Scalar::one(),
                seed: cfg.seed,
                generations,
            };
            Ok((
                env,
                Box::new(move |f| morrey_ratio(f, &hardy, &weak_spec, &strong_spec, prec)),
            ))
        }
    }
}

/// Deterministic one-step perturbations of a step function: ring add or
/// remove, value tweaks, and inner-exponent shifts.
fn perturbations(f: &RadialStepFunction) -> Vec<RadialStepFunction> {
    let params = *f.params();
    let mut out = Vec::new();
    let tweaks = [
        BigRational::new(BigInt::from(3), BigInt::from(2)),
        BigRational::new(BigInt::from(2), BigInt::from(3)),
        BigRational::new(BigInt::from(-1), BigInt::from(1)),
    ];
    let deltas = [
        BigRational::new(BigInt::from(1), BigInt::from(2)),
        BigRational::new(BigInt::from(-1), BigInt::from(2)),
        BigRational::one(),
    ];
    let rebuild = |j0: i64,
                   inner: BigRational,
                   rings: Vec<(i64, BigRational)>|
     -> Option<RadialStepFunction> {
        RadialStepFunction::new(params, j0, inner, rings).ok()
    };
    let rings_vec = |f: &RadialStepFunction| -> Vec<(i64, BigRational)> {
        f.rings().iter().map(|(k, v)| (*k, v.clone())).collect()
    };

    // inner value tweaks
    for t in &tweaks {
        out.extend(rebuild(
            f.inner_exp(),
            f.inner_value() * t,
            rings_vec(f),
        ));
    }
    for d in &deltas {
        out.extend(rebuild(
            f.inner_exp(),
            f.inner_value() + d,
            rings_vec(f),
        ));
    }
    // inner exponent shifts (dilations of the inner ball only)
    for dj in [-1i64, 1] {
        let j0 = f.inner_exp() + dj;
        if f.rings().keys().all(|&k| k > j0) {
            out.extend(rebuild(j0, f.inner_value().clone(), rings_vec(f)));
        }
    }
    // ring value tweaks and removals
    for (&k, v) in f.rings() {
        for t in &tweaks {
            let mut rings = rings_vec(f);
            for r in rings.iter_mut() {
                if r.0 == k {
                    r.1 = v * t;
                }
            }
            out.extend(rebuild(f.inner_exp(), f.inner_value().clone(), rings));
        }
        let rings: Vec<_> = rings_vec(f).into_iter().filter(|r| r.0 != k).collect();
        out.extend(rebuild(f.inner_exp(), f.inner_value().clone(), rings));
    }
    // ring additions just above the support
    for delta in [1i64, 2] {
        let k = f.jmax() + delta;
        for d in &deltas {
            let mut rings = rings_vec(f);
            rings.push((k, d.clone()));
            out.extend(rebuild(f.inner_exp(), f.inner_value().clone(), rings));
        }
    }
    out.retain(|g| !g.is_zero());
    out
}

/// Hill-climb over function-spec perturbations, maximizing the ratio.
/// Seeded from the extremizer the climb must go nowhere; seeded from a
/// random function the best ratio is non-decreasing and stays below the
/// constant.
pub fn sharpness_search(
    space: &SearchSpace,
    generations: u32,
    start: SearchStart,
    prec: Precision,
) -> Result<SearchReport> {
    if generations < 1 {
        return Err(Error::InvalidParameter(
            "sharpness search needs at least one generation".into(),
        ));
    }
    let (env, ratio) = search_env(space, prec, generations)?;
    let mut current = match start {
        SearchStart::Extremizer => RadialStepFunction::unit_ball_indicator(env.params),
        SearchStart::Random => {
            let mut attempt = 0u64;
            loop {
                let s = trial_seed(env.seed, 7, attempt);
                let f = random_function(s, &sweep_shape(SignMode::NonNegative), env.params);
                if !f.is_zero() {
                    break f;
                }
                attempt += 1;
            }
        }
    };
    let start_ratio = ratio(&current)?;
    let mut best_ratio = start_ratio.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(env.seed ^ 0xA5A5_5A5A_D00D_F00D);

    for _ in 0..env.generations {
        let candidates = perturbations(&current);
        if candidates.is_empty() {
            break;
        }
        // deterministic sampling of a candidate batch
        let batch: Vec<_> = (0..candidates.len().min(24))
            .map(|_| rng.gen_range(0..candidates.len()))
            .collect();
        let mut improved = false;
        for idx in batch {
            let cand = &candidates[idx];
            let r = ratio(cand)?;
            if r.cmp_value(&best_ratio).is_gt() {
                best_ratio = r;
                current = cand.clone();
                improved = true;
            }
        }
        if !improved {
            // exhaust the full neighborhood before declaring a local max
            let mut any = false;
            for cand in &candidates {
                let r = ratio(cand)?;
                if r.cmp_value(&best_ratio).is_gt() {
                    best_ratio = r;
                    current = cand.clone();
                    any = true;
                    break;
                }
            }
            if !any {
                break;
            }
        }
    }

    let tol = Tolerances::for_precision(prec);
    let ceiling = &env.constant * &(Scalar::one() + tol.excess);
    Ok(SearchReport {
        generations,
        theoretical_constant: env.constant,
        start_ratio,
        best_ratio: best_ratio.clone(),
        best_spec: current.to_spec_json(),
        pass: best_ratio.cmp_value(&ceiling).is_le(),
    })
}

/// Exhaustive one-step check that no perturbation of the extremizer
/// improves the ratio.
pub fn extremizer_is_local_max(space: &SearchSpace, prec: Precision) -> Result<bool> {
    let (env, ratio) = search_env(space, prec, 1)?;
    let f0 = RadialStepFunction::unit_ball_indicator(env.params);
    let base = ratio(&f0)?;
    let tol = Tolerances::for_precision(prec);
    let ceiling = &base * &(Scalar::one() + tol.excess);
    for cand in perturbations(&f0) {
        let r = ratio(&cand)?;
        if r.cmp_value(&ceiling).is_gt() {
            return Ok(false);
        }
    }
    Ok(true)
}
