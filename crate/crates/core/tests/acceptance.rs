//! Acceptance run: one PASS/FAIL line per criterion, with timings. Exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use tightsurg::contact::{
    count_structures, n_alpha_diagram, translate_contact_surgery, witness_nonisomorphic, DEFAULT_WITNESS_BOUND,
};
use tightsurg::floer::{lspace_propagate, vanishing_predicate, vk_surface, SlopeKnowledge};
use tightsurg::kirby::{plumbing_presentation, Definiteness};
use tightsurg::lattice::{
    donaldson_certificate, embed_bound, embed_in_diagonal, lambda_gram, short_vectors,
};
use tightsurg::{neg_cf_eval, neg_cf_expand, GramLattice, IntegerMatrix, KnotInfo, LegendrianKnot, NegCF, PlumbingTree, Rational};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let trefoil = KnotInfo::torus(3, 2).map_err(|e| e.to_string())?;
    let t = translate_contact_surgery(&LegendrianKnot::max_tb(&trefoil), &q("2"), None).map_err(|e| e.to_string())?;
    let cf = NegCF::new([3]).unwrap();
    let count = count_structures(&cf);
    let elapsed = start.elapsed();
    ensure(t.plus_ones == 1, || format!("{} (+1) pushoffs", t.plus_ones))?;
    let neg = t.negative.as_ref().ok_or("no negative part")?;
    ensure(neg.budgets == vec![1], || format!("stabilization budgets {:?}", neg.budgets))?;
    ensure(t.choices() == BigInt::from(2) && count == BigInt::from(2), || format!("{} choices", t.choices()))?;
    let pres = t.first_presentation().map_err(|e| e.to_string())?;
    ensure(pres.count(1) == 1 && pres.count(-1) == 1, || "presentation signs".into())?;
    let d = pres.diagram();
    let minus = &d.components()[1].knot;
    ensure(minus.stab_pos + minus.stab_neg == 1 && minus.tb() == 0, || format!("(-1) component {minus:?}"))?;
    within(elapsed, Duration::from_millis(1), "translation")?;
    Ok(format!("1 (+1) pushoff, 1 (-1) with 1 stabilization, 2 variants ({elapsed:?})"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    for alpha in 1..=50u64 {
        let d = n_alpha_diagram(alpha, 0).map_err(|e| e.to_string())?;
        let h = d.h1();
        let expected = BigInt::from(2 * alpha + 3);
        ensure(h.free_rank == 0 && h.invariant_factors == vec![expected.clone()], || {
            format!("alpha = {alpha}: H1 = {h}, expected Z/{expected}")
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "H1 sweep")?;
    Ok(format!("H1(N_alpha) = Z/(2 alpha + 3) for alpha in 1..=50 ({elapsed:?})"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let w = witness_nonisomorphic(2, DEFAULT_WITNESS_BOUND).map_err(|e| e.to_string())?;
    w.verify().map_err(|e| e.to_string())?;
    let idx: Vec<BigInt> = w.entries.iter().map(|e| e.index.clone()).collect();
    let orders: Vec<BigInt> = w.entries.iter().map(|e| e.order.clone()).collect();
    ensure(w.primes == vec![3, 5], || format!("primes {:?}", w.primes))?;
    ensure(w.alpha == BigInt::from(6), || format!("alpha {}", w.alpha))?;
    ensure(idx == vec![BigInt::from(5), BigInt::from(4)], || format!("indices {idx:?}"))?;
    ensure(orders == vec![BigInt::from(3), BigInt::from(5)], || format!("orders {orders:?}"))?;
    let mut summary = Vec::new();
    for m in 1..=6 {
        let w = witness_nonisomorphic(m, DEFAULT_WITNESS_BOUND).map_err(|e| format!("m = {m}: {e}"))?;
        w.verify().map_err(|e| format!("m = {m}: {e}"))?;
        let mut o: Vec<&BigInt> = w.entries.iter().map(|e| &e.order).collect();
        o.sort();
        o.dedup();
        ensure(o.len() as u64 == m, || format!("m = {m}: orders not distinct"))?;
        summary.push(format!("m={m}: alpha={}", w.alpha));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "witnesses")?;
    Ok(format!("primes (3,5), alpha 6, i (5,4), orders (3,5); {} ({elapsed:?})", summary.join(", ")))
}

/// Twelve reduced slopes in `[2n-1, 4n)` with denominator at most 5, spread
/// evenly and including the left endpoint.
fn sample_slopes(n: i64) -> Vec<Rational> {
    let all: Vec<Rational> =
        reduced_slopes(2 * n - 1, 4 * n, 5).into_iter().filter(|r| *r < Rational::from_int(4 * n)).collect();
    (0..12).map(|i| all[i * (all.len() - 1) / 11].clone()).collect()
}

fn criterion_4() -> Check {
    let mut worst = Duration::ZERO;
    let mut cases = 0;
    for n in 1..=3u64 {
        let slopes = sample_slopes(n as i64);
        ensure(slopes.len() == 12, || "fewer than 12 slopes".into())?;
        for r in slopes {
            let start = Instant::now();
            let p = plumbing_presentation(n, &r).map_err(|e| format!("n = {n}, r = {r}: {e}"))?;
            let elapsed = start.elapsed();
            worst = worst.max(elapsed);
            ensure(p.determinant.abs() == r.numer().abs(), || format!("n = {n}, r = {r}: det {}", p.determinant))?;
            ensure(p.definiteness == Definiteness::PositiveDefinite, || {
                format!("n = {n}, r = {r}: {:?}", p.definiteness)
            })?;
            within(elapsed, Duration::from_secs(1), &format!("plumbing n = {n}, r = {r}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} plumbings with |det| = |p|, positive definite (slowest {worst:?})"))
}

fn criterion_5() -> Check {
    let mut worst = Duration::ZERO;
    for a1 in 2..=4u64 {
        for n in 1..=3u64 {
            let l = lambda_gram(a1, n).map_err(|e| e.to_string())?;
            let m = embed_bound(&l).map_err(|e| e.to_string())? as usize;
            let start = Instant::now();
            let w = embed_in_diagonal(&l, m).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            worst = worst.max(elapsed);
            ensure(w.is_none(), || format!("Lambda({a1},{n}) embeds in D_{m}"))?;
            within(elapsed, Duration::from_secs(60), &format!("Lambda({a1},{n})"))?;
        }
    }
    let start = Instant::now();
    for k in 1..=10usize {
        let a = GramLattice::of_plumbing(&PlumbingTree::chain(&vec![-2; k])).map_err(|e| e.to_string())?;
        let w = embed_in_diagonal(&a, k + 1).map_err(|e| e.to_string())?.ok_or(format!("A_{k} does not embed"))?;
        ensure(w.verify_diagonal(a.gram()), || format!("A_{k} witness invalid"))?;
    }
    let chains = start.elapsed();
    within(chains, Duration::from_secs(1), "A_k chains")?;
    Ok(format!("9 Lambda lattices do not embed (slowest {worst:?}); A_1..A_10 embed ({chains:?})"))
}

fn criterion_6() -> Check {
    let mut parts = Vec::new();
    for r in ["2", "7/2"] {
        let start = Instant::now();
        let c = donaldson_certificate(1, &q(r)).map_err(|e| format!("r = {r}: {e}"))?;
        c.verify().map_err(|e| format!("r = {r}: {e}"))?;
        let w = &c.sublattice.witness;
        ensure(w.verify(c.sublattice.target.gram(), c.sublattice.lambda.gram()), || "witness".into())?;
        let elapsed = start.elapsed();
        within(elapsed, Duration::from_secs(120), &format!("certificate r = {r}"))?;
        parts.push(format!("r={r}: a1={} m={} ({elapsed:?})", c.plumbing.a1, c.diagonal.m));
    }
    Ok(format!("four-part certificates: {}", parts.join(", ")))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for t in (1..=19u64).step_by(2) {
        for k in 1..=20u64 {
            let s = vk_surface(t, k).map_err(|e| e.to_string())?;
            let slack = s.self_intersection - (2 * s.genus as i64 - 1);
            ensure(slack == (t * k) as i64, || format!("t = {t}, k = {k}: slack {slack}"))?;
            ensure(vanishing_predicate(&s) == Ok(true), || format!("t = {t}, k = {k}: no vanishing"))?;
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(10), "surface sweep")?;
    Ok(format!("{count} surfaces with S.S - (2g - 1) = tk, all vanishing ({elapsed:?})"))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let kb = SlopeKnowledge::from_knot(&KnotInfo::torus(3, 2).unwrap());
    let mut derived = 0;
    for r in reduced_slopes(1, 10, 10) {
        let c = lspace_propagate(&kb, &r).map_err(|e| e.to_string())?.ok_or(format!("{r} not derivable"))?;
        c.verify(&kb).map_err(|e| format!("{r}: {e}"))?;
        derived += 1;
    }
    // the reduced p/q with 1 <= p, q <= 10: those >= 1 derive, the rest do not
    let (mut above, mut below) = (0, 0);
    for p in 1..=10i64 {
        for qq in 1..=10i64 {
            if num_integer::gcd(p, qq) != 1 {
                continue;
            }
            let r = Rational::new(p, qq).unwrap();
            let got = lspace_propagate(&kb, &r).map_err(|e| e.to_string())?.is_some();
            ensure(got == (p >= qq), || format!("{r}: derivable = {got}"))?;
            if got {
                above += 1;
            } else {
                below += 1;
            }
        }
    }
    ensure(above + below == 63, || format!("{} fractions", above + below))?;
    ensure(lspace_propagate(&kb, &q("1/2")).unwrap().is_none(), || "1/2 derivable".into())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "L-space sweep")?;
    Ok(format!(
        "{derived} reduced slopes in [1,10] (q <= 10) derivable and replayed; of the 63 with p, q <= 10, {above} derive and {below} below 1 do not; 1/2 not derivable ({elapsed:?})"
    ))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for i in 0..500 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, rows, cols, 9);
        check_snf(&a).map_err(|e| format!("SNF trial {i}: {e}"))?;
    }

    let mut trials = 0;
    let mut by_move = std::collections::BTreeMap::new();
    while trials < 200 {
        let d = random_diagram(&mut rng);
        let Some((name, e)) = random_move(&mut rng, &d) else { continue };
        let (before, after) = (presentation_det(&d), presentation_det(&e));
        let ord = |x: &tightsurg::GraphDiagram| x.h1_order().unwrap_or_default();
        ensure(before == after && ord(&d) == before && ord(&e) == after, || {
            format!("{name} changed |H1|: {before} -> {after}\n{d}\n{e}")
        })?;
        *by_move.entry(name).or_insert(0) += 1;
        trials += 1;
    }

    let mut cf_count = 0;
    for r in reduced_slopes(1, 10, 30).into_iter().filter(|r| *r > Rational::from_int(1)) {
        let cf = neg_cf_expand(&r).map_err(|e| e.to_string())?;
        ensure(cf.terms().iter().all(|a| *a >= BigInt::from(2)), || format!("{r}: term below 2"))?;
        ensure(eval_chain(cf.terms()) == r && neg_cf_eval(&cf) == r, || format!("{r}: round trip"))?;
        cf_count += 1;
    }

    let mut sv = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let g = random_positive_definite(&mut rng, n);
        let lat = GramLattice::new(IntegerMatrix::from_rows(&g).unwrap()).unwrap();
        for t in 1..=8 {
            let got = short_vectors(&lat, t).map_err(|e| e.to_string())?;
            ensure(got == brute_force_vectors(&g, t), || format!("short vectors of {g:?} at {t}"))?;
            let neg = short_vectors(&lat.negated(), -t).map_err(|e| e.to_string())?;
            ensure(neg == got, || "negated lattice disagrees".into())?;
            sv += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30), "property suites")?;
    Ok(format!(
        "500 SNF, 200 Kirby moves {by_move:?}, {cf_count} continued fractions, {sv} short-vector sets ({elapsed:?})"
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Check); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (i, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {i}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i}: FAIL  {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
