//! Differential tests: the candidate-enumeration norms against wide-window
//! brute force that shares no pruning, domination, or limit-candidate logic
//! with the implementation — only scalar arithmetic and profile evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use ultrametric::hardy::{hardy_apply, HardyParams};
use ultrametric::norm::{
    weak_central_morrey_outcome, weak_lq_norm, NormSpec, NormValue, RadialProfile,
};
use ultrametric::padic::{ball_weighted_measure, sphere_weighted_measure, RadiusExp};
use ultrametric::radial::{random_function, RandomFnConfig, SignMode};
use ultrametric::scalar::{rat_pow, rat_pow_of_int};
use ultrametric::{PAdicParams, Precision, Scalar, WeightSpec};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn prec() -> Precision {
    Precision::default()
}

/// Brute-force weak L^q norm over the sphere window `[-200, 200]`:
/// enumerate every level the profile attains there, sum superlevel measures
/// sphere by sphere, and add the exact below-window inner-ball remainder.
/// At critical outer decay the finite candidates at depth 200 sit within
/// ~p^{-190(n+gamma)} of the true supremum, far below the tolerance.
fn brute_weak_lq(
    profile: &RadialProfile,
    q: &BigRational,
    weight: &WeightSpec,
) -> Scalar {
    let params = *profile.params();
    let window = -200i64..=200;

    // per-sphere |value| and weighted measure
    let mut spheres: Vec<(Scalar, Scalar)> = Vec::new();
    for k in window.clone() {
        let v = profile.value(k).abs().to_scalar(prec());
        if v.is_zero() {
            continue;
        }
        let mu = sphere_weighted_measure(RadiusExp(k), weight, &params, prec());
        spheres.push((v, mu));
    }
    if spheres.is_empty() {
        return Scalar::zero();
    }
    // the inner plateau of a step function extends below the window
    let plateau = {
        let law = profile.inner_law();
        if !law.coeff.is_zero() && law.slope.is_zero() {
            Some((
                Scalar::exact(law.coeff.abs()),
                ball_weighted_measure(RadiusExp(-201), weight, &params, prec()).unwrap(),
            ))
        } else {
            None
        }
    };

    // sort by level descending and suffix-sum the measures, so W(>= v) is
    // a prefix of the sorted order
    spheres.sort_by(|a, b| b.0.cmp_value(&a.0));
    let mut best = Scalar::zero();
    let mut w = Scalar::zero();
    let mut i = 0;
    while i < spheres.len() {
        let v = spheres[i].0.clone();
        // absorb every sphere at this level
        while i < spheres.len() && spheres[i].0.cmp_value(&v).is_eq() {
            w = w + spheres[i].1.clone();
            i += 1;
        }
        let mut w_total = w.clone();
        if let Some((pv, pm)) = &plateau {
            if pv.cmp_value(&v).is_ge() {
                w_total = w_total + pm.clone();
            }
        }
        let obj = v.pow_rational(q, prec()).unwrap() * w_total;
        if obj.cmp_value(&best).is_gt() {
            best = obj;
        }
    }
    // the plateau level itself is a candidate even when no window sphere
    // attains it
    if let Some((pv, pm)) = &plateau {
        let mut w_total = pm.clone();
        for (sv, mu) in &spheres {
            if sv.cmp_value(pv).is_ge() {
                w_total = w_total + mu.clone();
            }
        }
        let obj = pv.pow_rational(q, prec()).unwrap() * w_total;
        if obj.cmp_value(&best).is_gt() {
            best = obj;
        }
    }
    best.pow_rational(&q.recip(), prec()).unwrap()
}

#[test]
fn weak_lq_matches_brute_force_on_step_functions() {
    let specs = [
        (rat(1, 1), rat(0, 1)),
        (rat(2, 1), rat(1, 1)),
        (rat(3, 2), rat(1, 2)),
        (rat(3, 1), rat(2, 1)),
    ];
    let tol = rat_pow(&rat(1, 10), 45);
    for p in [2u32, 3] {
        let params = PAdicParams::new(p, 1).unwrap();
        let shape = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for seed in 0..30u64 {
            let f = random_function(99_000 + seed, &shape, params);
            if f.is_zero() {
                continue;
            }
            let profile = f.profile();
            for (q, gamma) in &specs {
                let spec =
                    NormSpec::weak_lq(q.clone(), WeightSpec::new(gamma.clone())).unwrap();
                let analytic = weak_lq_norm(&f, &spec, prec()).unwrap();
                let brute = brute_weak_lq(&profile, q, &WeightSpec::new(gamma.clone()));
                let scale = analytic.value().max(brute.value()).clone();
                let diff = (analytic.value() - brute.value()).abs();
                assert!(
                    diff <= &scale * &tol,
                    "p={} seed={} q={} gamma={}: analytic {} vs brute {}",
                    p,
                    seed,
                    q,
                    gamma,
                    analytic,
                    brute
                );
            }
        }
    }
}

#[test]
fn weak_lq_matches_brute_force_on_hardy_images() {
    let tol = rat_pow(&rat(1, 10), 45);
    let mut runs = 0;
    for (p, n, alpha) in [
        (2u32, 1u32, rat(0, 1)),
        (2, 1, rat(1, 2)),
        (3, 2, rat(1, 1)),
        (5, 2, rat(1, 2)),
    ] {
        let params = PAdicParams::new(p, n).unwrap();
        let h = HardyParams::new(params, alpha.clone()).unwrap();
        let shape = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for gamma in [rat(0, 1), rat(1, 1)] {
            let nr = rat(n as i64, 1);
            // critical exponent and a supercritical one
            let q_crit = (&nr + &gamma) / (&nr - &alpha);
            for q in [q_crit.clone(), &q_crit + rat(1, 1)] {
                if q < rat(1, 1) {
                    continue;
                }
                let spec =
                    NormSpec::weak_lq(q.clone(), WeightSpec::new(gamma.clone())).unwrap();
                for seed in 0..10u64 {
                    let f = random_function(77_000 + seed, &shape, params);
                    if f.is_zero() {
                        continue;
                    }
                    let image = hardy_apply(&f, &h).unwrap();
                    let analytic = weak_lq_norm(&image, &spec, prec()).unwrap();
                    let brute =
                        brute_weak_lq(&image.profile(), &q, &WeightSpec::new(gamma.clone()));
                    let scale = analytic.value().max(brute.value()).clone();
                    let diff = (analytic.value() - brute.value()).abs();
                    if scale.is_zero() {
                        continue; // cancellation wiped the image
                    }
                    assert!(
                        diff <= &scale * &tol,
                        "p={} n={} alpha={} gamma={} q={} seed={}: {} vs {}",
                        p,
                        n,
                        alpha,
                        gamma,
                        q,
                        seed,
                        analytic,
                        brute
                    );
                    runs += 1;
                }
            }
        }
    }
    assert!(runs > 100, "differential sweep too small: {}", runs);
}

/// Brute-force weak central Morrey norm: triple loop over ball indices in
/// `[-30, 50]` and every level in the sphere window `[-60, 50]`, with exact
/// below-window ball remainders. Only valid away from the `lambda = -1/q`
/// boundary (where the supremum moves to the `gamma -> inf` limit).
fn brute_weak_morrey(
    profile: &RadialProfile,
    q: &BigRational,
    lambda: &BigRational,
) -> Scalar {
    let params = *profile.params();
    let n = rat(params.n() as i64, 1);
    let unweighted = WeightSpec::unweighted();

    let mut spheres: Vec<(i64, Scalar, Scalar)> = Vec::new();
    for k in -60i64..=50 {
        let v = profile.value(k).abs().to_scalar(prec());
        if v.is_zero() {
            continue;
        }
        let mu = sphere_weighted_measure(RadiusExp(k), &unweighted, &params, prec());
        spheres.push((k, v, mu));
    }
    if spheres.is_empty() {
        return Scalar::zero();
    }
    let plateau = {
        let law = profile.inner_law();
        if !law.coeff.is_zero() && law.slope.is_zero() {
            Some((
                Scalar::exact(law.coeff.abs()),
                ball_weighted_measure(RadiusExp(-61), &unweighted, &params, prec()).unwrap(),
            ))
        } else {
            None
        }
    };

    // candidate levels: every value the profile attains in the window,
    // plus the plateau level
    let mut levels: Vec<Scalar> = spheres.iter().map(|(_, v, _)| v.clone()).collect();
    if let Some((pv, _)) = &plateau {
        levels.push(pv.clone());
    }
    levels.sort_by(|a, b| b.cmp_value(a));
    levels.dedup_by(|a, b| a.cmp_value(b).is_eq());

    let mut best = Scalar::zero();
    for g in -30i64..=50 {
        // spheres inside B_g, sorted by level descending with running sums
        let mut inside: Vec<(Scalar, Scalar)> = spheres
            .iter()
            .filter(|(k, _, _)| *k <= g)
            .map(|(_, v, mu)| (v.clone(), mu.clone()))
            .collect();
        inside.sort_by(|a, b| b.0.cmp_value(&a.0));
        // |B_g|^{-lambda - 1/q} = p^{-n g (lambda + 1/q)}
        let norm_exp = -(&n) * rat(g, 1) * (lambda + q.recip());
        let norm_factor = Scalar::from_int(params.p() as i64)
            .pow_rational(&norm_exp, prec())
            .unwrap();
        let mut w = Scalar::zero();
        let mut idx = 0;
        for v in &levels {
            while idx < inside.len() && inside[idx].0.cmp_value(v).is_ge() {
                w = w + inside[idx].1.clone();
                idx += 1;
            }
            let mut w_total = w.clone();
            if let Some((pv, pm)) = &plateau {
                if pv.cmp_value(v).is_ge() {
                    w_total = w_total + pm.clone();
                }
            }
            if w_total.is_zero() {
                continue;
            }
            let obj = &norm_factor
                * &(v.clone() * w_total.pow_rational(&q.recip(), prec()).unwrap());
            if obj.cmp_value(&best).is_gt() {
                best = obj;
            }
        }
    }
    best
}

#[test]
fn weak_morrey_matches_brute_force() {
    let tol = rat_pow(&rat(1, 10), 40);
    let mut runs = 0;
    for (p, n) in [(2u32, 1u32), (3, 2)] {
        let params = PAdicParams::new(p, n).unwrap();
        let h = HardyParams::plain(params);
        let shape = RandomFnConfig {
            sign_mode: SignMode::Signed,
            ..RandomFnConfig::default()
        };
        for (q, lambda) in [
            (rat(1, 1), rat(-1, 2)),
            (rat(2, 1), rat(-1, 4)),
            (rat(2, 1), rat(-1, 8)),
            (rat(3, 1), rat(-1, 6)),
        ] {
            let spec = NormSpec::weak_central_morrey(q.clone(), lambda.clone()).unwrap();
            for seed in 0..8u64 {
                let f = random_function(55_000 + seed, &shape, params);
                if f.is_zero() {
                    continue;
                }
                for as_image in [false, true] {
                    let (outcome, profile) = if as_image {
                        let image = hardy_apply(&f, &h).unwrap();
                        (
                            weak_central_morrey_outcome(&image, &spec, prec()).unwrap(),
                            image.profile(),
                        )
                    } else {
                        (
                            weak_central_morrey_outcome(&f, &spec, prec()).unwrap(),
                            f.profile(),
                        )
                    };
                    if outcome.value.is_zero() {
                        continue;
                    }
                    // the brute window must contain the attaining ball
                    let g = outcome.ball_index.expect("attained away from boundary");
                    assert!((-25..=45).contains(&g), "argmax ball {} out of range", g);
                    let brute = brute_weak_morrey(&profile, &q, &lambda);
                    let scale = outcome.value.value().max(brute.value()).clone();
                    let diff = (outcome.value.value() - brute.value()).abs();
                    assert!(
                        diff <= &scale * &tol,
                        "p={} n={} q={} lambda={} seed={} image={}: {} vs {}",
                        p,
                        n,
                        q,
                        lambda,
                        seed,
                        as_image,
                        outcome.value,
                        brute
                    );
                    runs += 1;
                }
            }
        }
    }
    assert!(runs > 60, "differential sweep too small: {}", runs);
}

#[test]
fn central_morrey_matches_direct_sup() {
    // strong Morrey: sup over balls of |B_g|^{-lambda-1/q} (int |f|^q)^{1/q},
    // brute-forced with direct sphere sums
    let tol = rat_pow(&rat(1, 10), 45);
    let params = PAdicParams::new(2, 1).unwrap();
    let shape = RandomFnConfig {
        sign_mode: SignMode::Signed,
        ..RandomFnConfig::default()
    };
    for (q, lambda) in [(rat(1, 1), rat(-1, 2)), (rat(2, 1), rat(-1, 4))] {
        let spec = NormSpec::central_morrey(q.clone(), lambda.clone()).unwrap();
        let qi = q.numer().try_into().unwrap();
        for seed in 0..25u64 {
            let f = random_function(33_000 + seed, &shape, params);
            if f.is_zero() {
                continue;
            }
            let analytic =
                ultrametric::norm::central_morrey_norm(&f, &spec, prec()).unwrap();
            let mut best = Scalar::zero();
            for g in -40i64..=40 {
                // int_{B_g} |f|^q: exact rational for integer q
                let mut integral = BigRational::zero();
                for k in -200i64..=g {
                    let v = f.evaluate(k).into_value().abs();
                    if v.is_zero() {
                        continue;
                    }
                    integral += rat_pow(&v, qi)
                        * rat_pow_of_int(2, k)
                        * (BigRational::one() - rat(1, 2));
                }
                let norm_exp = -rat(g, 1) * (&lambda + q.recip());
                let obj = Scalar::from_int(2)
                    .pow_rational(&norm_exp, prec())
                    .unwrap()
                    * Scalar::exact(integral)
                        .pow_rational(&q.recip(), prec())
                        .unwrap();
                if obj.cmp_value(&best).is_gt() {
                    best = obj;
                }
            }
            let diff = (analytic.value() - best.value()).abs();
            let scale = analytic.value().max(best.value()).clone();
            assert!(
                diff <= &scale * &tol,
                "q={} lambda={} seed={}: {} vs {}",
                q,
                lambda,
                seed,
                analytic,
                best
            );
        }
    }
}
