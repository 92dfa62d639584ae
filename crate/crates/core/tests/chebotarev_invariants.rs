use capitula::arith;
use capitula::chebotarev::{
    check_conditions, check_conditions_with_root, find_auxiliary_prime, find_prime, scan_all, AuxiliaryOutcome,
    ClassMatch, FieldContext, LambdaSpec, SearchOutcome,
};
use capitula_oracles::{field_disc, forms, is_kth_power_brute, is_squarefree_naive, order_brute};
use proptest::prelude::*;

fn fields_with(p: u64, lo: i64, hi: i64, count: usize) -> Vec<i64> {
    (lo..=hi)
        .filter(|&d| is_squarefree_naive(d as u64))
        .filter(|&d| forms::class_numbers(field_disc(d)).0 % p == 0)
        .take(count)
        .collect()
}

fn generator(ctx: &FieldContext, p: u64) -> Vec<u64> {
    ctx.class_group.sylow_generator(p).expect("p divides h")
}

#[test]
fn implication_holds_on_every_candidate() {
    let ctx = FieldContext::new(79).unwrap();
    let target = generator(&ctx, 3);
    let spec = LambdaSpec::new(3, 1);
    let all = scan_all(&ctx, spec, &target, 100_000).unwrap();
    assert!(all.len() > 9000);
    assert!(all.iter().all(|c| c.implication_holds()));
    let SearchOutcome::Exhausted { stats } = find_prime(&ctx, spec, &ctx.class_group.identity(), 0).unwrap() else {
        panic!("empty range must be exhausted");
    };
    assert_eq!(stats.implication_violations, 0);
}

#[test]
fn conditions_agree_with_brute_force() {
    for d in fields_with(3, 2, 400, 5) {
        let ctx = FieldContext::new(d).unwrap();
        let target = generator(&ctx, 3);
        let spec = LambdaSpec::new(3, 1);
        let disc = ctx.field.disc();
        for cand in scan_all(&ctx, spec, &target, 3000).unwrap() {
            let q = cand.q;
            assert!(cand.cond1);
            assert_eq!(cand.cond2, q % 3 == 1, "d={d} q={q}");
            assert_eq!(cand.cond3, is_kth_power_brute(q - 1, q, 3), "d={d} q={q}");
            let split = (1..q).any(|x| (x * x) as i64 % q as i64 == disc.rem_euclid(q as i64));
            assert_eq!(cand.cond4, split, "d={d} q={q}");
            match &cand.witness.symbol {
                Some(sym) => {
                    assert_eq!(sym.order, order_brute(sym.value, q), "d={d} q={q}");
                    assert_eq!(cand.cond5, sym.order == 3);
                }
                None => assert!(!cand.cond5),
            }
            if cand.cond4 {
                // class(q_L) = target or its inverse, by the form oracle
                let b = cand.witness.ideal_b.unwrap();
                let ideal = capitula::quadfield::QuadIdeal::new(&ctx.field, q as i64, b).unwrap();
                let t = ctx.class_group.ideal_of(&target);
                let mut matched = false;
                for other in [t.conj(&ctx.field), t.clone()] {
                    let prod = ideal.mul(&ctx.field, &other).primitive_part();
                    let bb = -(2 * prod.b + ctx.field.omega_trace());
                    matched |= forms::ideal_is_principal(disc, prod.a, bb);
                }
                assert_eq!(cand.cond6, matched, "d={d} q={q}");
            } else {
                assert!(!cand.cond6);
            }
        }
    }
}

#[test]
fn conjugate_prime_gives_the_same_flags() {
    // N(eps) = +1 here, so conj(eps) = eps^-1 and the symbol order is unchanged
    let ctx = FieldContext::new(79).unwrap();
    let target = generator(&ctx, 3);
    let spec = LambdaSpec::new(3, 1);
    for q in arith::primes_in_range(5, 5000) {
        if q == 79 || arith::kronecker(ctx.field.disc(), q as i64) != 1 {
            continue;
        }
        let a = check_conditions(&ctx, spec, q, &target).unwrap();
        let r = a.witness.sqrt_d.unwrap();
        let b = check_conditions_with_root(&ctx, spec, q, &target, Some(q - r)).unwrap();
        assert_eq!(a.flags(), b.flags(), "q={q}");
        if let (Some(x), Some(y)) = (a.witness.class_match, b.witness.class_match) {
            assert_ne!(x, y, "q={q}");
        }
    }
}

#[test]
fn found_prime_is_the_least_qualifying_one() {
    for d in fields_with(3, 2, 500, 6) {
        let ctx = FieldContext::new(d).unwrap();
        let target = generator(&ctx, 3);
        let spec = LambdaSpec::new(3, 1);
        let bound = 20_000;
        let first = scan_all(&ctx, spec, &target, bound).unwrap().into_iter().find(|c| c.all());
        match find_prime(&ctx, spec, &target, bound).unwrap() {
            SearchOutcome::Found { candidate, .. } => assert_eq!(Some(candidate.q), first.map(|c| c.q), "d={d}"),
            SearchOutcome::Exhausted { .. } => assert!(first.is_none(), "d={d}"),
        }
    }
}

#[test]
fn stats_partition_the_candidates() {
    let ctx = FieldContext::new(229).unwrap();
    let target = generator(&ctx, 3);
    let out = find_prime(&ctx, LambdaSpec::new(3, 1), &target, 5_000).unwrap();
    let stats = out.stats();
    let failed: u64 = stats.failed_at.iter().sum();
    let found = u64::from(out.candidate().is_some());
    assert_eq!(failed + found, stats.candidates);
    for i in 0..6 {
        assert!(stats.failed_each[i] >= stats.failed_at[i]);
    }
}

#[test]
fn density_of_qualifying_primes() {
    // informational: the proportion of primes meeting all six conditions
    let ctx = FieldContext::new(79).unwrap();
    let target = generator(&ctx, 3);
    let all = scan_all(&ctx, LambdaSpec::new(3, 1), &target, 200_000).unwrap();
    let hits = all.iter().filter(|c| c.all()).count();
    println!("d=79 p=3 n=1: {hits} / {} primes qualify ({:.4})", all.len(), hits as f64 / all.len() as f64);
    assert!(hits > 0);
}

#[test]
fn auxiliary_prime_for_79() {
    let ctx = FieldContext::new(79).unwrap();
    let target = generator(&ctx, 3);
    let AuxiliaryOutcome::Found(aux) = find_auxiliary_prime(&ctx, 3, 1, &target, 100_000).unwrap() else {
        panic!("no auxiliary prime");
    };
    assert_eq!(aux.q % 6, 1);
    assert_eq!(arith::kronecker(ctx.field.disc(), aux.q as i64), 1);
    let expected = match aux.class_match {
        ClassMatch::Target => target.clone(),
        ClassMatch::Inverse => ctx.class_group.inverse(&target),
    };
    assert_eq!(aux.class, expected);
    // no smaller prime qualifies
    for q in arith::primes_in_range(3, aux.q - 1) {
        if q % 6 != 1 || arith::kronecker(ctx.field.disc(), q as i64) != 1 {
            continue;
        }
        let c = ctx.class_group.class_of(&ctx.field.prime_ideal_above(q).unwrap());
        assert!(c != target && ctx.class_group.inverse(&c) != target, "q={q}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(32) })]

    #[test]
    fn conditions_are_deterministic(q_idx in 0usize..2000, n in 1u32..3) {
        let ctx = FieldContext::new(79).unwrap();
        let target = generator(&ctx, 3);
        let primes = arith::primes_in_range(5, 40_000);
        let q = primes[q_idx % primes.len()];
        prop_assume!(q != 79);
        let spec = LambdaSpec::new(3, n);
        let a = check_conditions(&ctx, spec, q, &target).unwrap();
        let b = check_conditions(&ctx, spec, q, &target).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.implication_holds());
        // n = 2 is stricter in condition (2)
        if n == 2 {
            let one = check_conditions(&ctx, LambdaSpec::new(3, 1), q, &target).unwrap();
            prop_assert!(!a.cond2 || one.cond2);
        }
    }
}
