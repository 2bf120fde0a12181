//! Acceptance gate. Runs every criterion at its stated tolerance (exact
//! rational comparison throughout) and prints one PASS/FAIL line each.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use l0_simons::format::parse_instance;
use l0_simons::generate::{generate, Shape};
use l0_simons::instance::{
    attaining_selection, check_hypothesis, distinct_functions, BaseFunction, Hypothesis,
    HypothesisMode, Instance, DEFAULT_SELECTION_CAP,
};
use l0_simons::l0::{ess_inf, ess_sup, rv_leq, Event, EventuallyPeriodicSeq, ProbSpace, Rv};
use l0_simons::minimax::{essinf_over_hull, MixtureWeights};
use l0_simons::oracle::{brute_lhs, brute_rhs, GridSpec};
use l0_simons::rational::{fmt_q, int, q};
use l0_simons::verifier::{
    choose_lambda, compute_lhs, compute_rhs, gamma_n, lambda_residual, trace_proof, verify,
    TraceOptions, VerifyOptions,
};
use l0_simons::Q;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn seeded(seeds: std::ops::Range<u64>, shape: impl Fn(u64) -> Shape) -> Vec<(u64, Instance)> {
    seeds
        .map(|s| {
            (
                s,
                generate(s, shape(s)).expect("generator shapes are within caps"),
            )
        })
        .collect()
}

fn show(v: &Rv) -> String {
    v.values().iter().map(fmt_q).collect::<Vec<_>>().join(", ")
}

fn first_failure<T: Sync>(
    items: &[T],
    check: impl Fn(&T) -> Option<String> + Sync + Send,
) -> Option<String> {
    items.par_iter().find_map_first(check)
}

fn inequality_sweep() -> Outcome {
    let cases = seeded(0..1000, |s| Shape::random(s, 4, 4, 5));
    let fail = first_failure(&cases, |(seed, inst)| {
        match verify(inst, &VerifyOptions::default()) {
            Ok(r) if r.holds && r.applicable && r.slack.is_nonnegative() => None,
            Ok(r) => Some(format!(
                "seed {seed}: lhs [{}] rhs [{}]",
                show(&r.lhs),
                show(&r.rhs)
            )),
            Err(e) => Some(format!("seed {seed}: {e}")),
        }
    });
    fail.map_or(Ok("1000/1000 instances hold".into()), Err)
}

fn lhs_equivalence() -> Outcome {
    let cases = seeded(1000..1200, |s| Shape::random(s, 3, 3, 4));
    let fail = first_failure(&cases, |(seed, inst)| {
        let (solver, brute) = match (
            compute_lhs(inst, DEFAULT_SELECTION_CAP),
            brute_lhs(inst, DEFAULT_SELECTION_CAP),
        ) {
            (Ok(s), Ok(b)) => (s, b),
            (Err(e), _) | (_, Err(e)) => return Some(format!("seed {seed}: {e}")),
        };
        (solver != brute).then(|| {
            format!(
                "seed {seed}: solver [{}] brute [{}]",
                show(&solver),
                show(&brute)
            )
        })
    });
    fail.map_or(Ok("200/200 equal".into()), Err)
}

fn rhs_sandwich() -> Outcome {
    const K: i64 = 200;
    let cases = seeded(2000..2200, |s| Shape::random(s, 3, 3, 3));
    let grid = GridSpec::new(K as u32).unwrap();
    let fail = first_failure(&cases, |(seed, inst)| {
        let (exact, _) = match compute_rhs(inst) {
            Ok(v) => v,
            Err(e) => return Some(format!("seed {seed}: {e}")),
        };
        let brute = match brute_rhs(inst, grid) {
            Ok(v) => v,
            Err(e) => return Some(format!("seed {seed}: {e}")),
        };
        for atom in 0..inst.n_atoms() {
            let entries: Vec<&Q> = inst
                .functions()
                .items()
                .flat_map(|f| f.table().iter().map(move |rv| rv.at(atom)))
                .collect();
            let range = *entries.iter().max().unwrap() - *entries.iter().min().unwrap();
            let gap = brute.at(atom) - exact.at(atom);
            if gap < Q::zero() || gap > range / int(K) {
                return Some(format!("seed {seed} atom {atom}: gap {}", fmt_q(&gap)));
            }
        }
        None
    });
    fail.map_or(Ok("200/200 within range/200".into()), Err)
}

fn equality_tightness() -> Outcome {
    for seed in 4000..4100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Shape::new(rng.gen_range(1..=4), rng.gen_range(1..=4), 0, 1);
        let base = generate(seed, shape).unwrap();
        let f = base.functions().cycle()[0].clone();
        let (p, c) = (rng.gen_range(0..=3), rng.gen_range(1..=3));
        let inst = base
            .with_functions(EventuallyPeriodicSeq::new(vec![f.clone(); p], vec![f; c]).unwrap())
            .unwrap();
        let r =
            verify(&inst, &VerifyOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        if !r.slack.is_zero() {
            return Err(format!("seed {seed}: slack [{}]", show(&r.slack)));
        }
    }
    Ok("100/100 with zero slack".into())
}

fn lambda_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    for case in 0..100 {
        let space = ProbSpace::uniform(rng.gen_range(1..=4)).unwrap();
        let draw = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| {
            Q::new(
                rng.gen_range(lo..=hi).into(),
                rng.gen_range(1..=12i64).into(),
            )
        };
        let m = Rv::from_fn(&space, |_| draw(&mut rng, -30, 30));
        let big_m = &m
            + &Rv::from_fn(&space, |_| {
                if rng.gen_bool(0.2) {
                    Q::zero()
                } else {
                    draw(&mut rng, 0, 40)
                }
            });
        let delta = Rv::from_fn(&space, |_| draw(&mut rng, 1, 20));
        let lambda = choose_lambda(&m, &big_m, &delta).map_err(|e| format!("case {case}: {e}"))?;
        let residual = lambda_residual(&m, &big_m, &delta, &lambda);
        let in_range = lambda
            .values()
            .iter()
            .all(|l| *l > Q::zero() && *l <= q(1, 3));
        if !residual.is_zero() || !in_range {
            return Err(format!(
                "case {case}: lambda [{}] residual [{}]",
                show(&lambda),
                show(&residual)
            ));
        }
    }
    Ok("100/100 residual 0, lambda in (0, 1/3]".into())
}

fn trace_soundness() -> Outcome {
    let cases = seeded(6000..6100, |s| Shape::random(s, 4, 4, 5));
    let fail = first_failure(&cases, |(seed, inst)| {
        let t = match trace_proof(inst, &TraceOptions::default()) {
            Ok(t) => t,
            Err(e) => return Some(format!("seed {seed}: {e}")),
        };
        let gaps_zero = t.steps.iter().all(|s| s.g.optimality_gap.is_zero());
        let failed: Vec<String> = t
            .checks()
            .into_iter()
            .filter(|c| !c.passes)
            .map(|c| c.name)
            .collect();
        (!gaps_zero || !failed.is_empty()).then(|| format!("seed {seed}: failed {failed:?}"))
    });
    fail.map_or(
        Ok("100/100 traces with every slack >= 0 and optimality gaps exactly 0".into()),
        Err,
    )
}

fn scalar_reduction() -> Outcome {
    let cases = seeded(7000..7050, |s| Shape {
        atoms: 1,
        ..Shape::random(s, 1, 4, 5)
    });
    for (seed, inst) in &cases {
        let r = verify(inst, &VerifyOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        // real-valued problem: sup over x of limsup f_n(x) against the game value
        let cycle = inst.functions().cycle();
        let classical_lhs = (0..inst.n_base())
            .flat_map(|b| cycle.iter().map(move |f| f.at(b, 0).clone()))
            .max()
            .unwrap();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for f in inst.functions().items() {
            let row: Vec<Q> = (0..inst.n_base()).map(|b| f.at(b, 0).clone()).collect();
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        let (classical_rhs, _) = common::vertex_game_value(&rows);
        if *r.lhs.at(0) != classical_lhs
            || *r.rhs.at(0) != classical_rhs
            || classical_lhs < classical_rhs
        {
            return Err(format!(
                "seed {seed}: verifier ({}, {}) classical ({}, {})",
                fmt_q(r.lhs.at(0)),
                fmt_q(r.rhs.at(0)),
                fmt_q(&classical_lhs),
                fmt_q(&classical_rhs)
            ));
        }
    }
    Ok("50/50 match the classical check".into())
}

fn random_rv(rng: &mut ChaCha8Rng, space: &std::sync::Arc<ProbSpace>) -> Rv {
    Rv::from_fn(space, |_| {
        Q::new(
            rng.gen_range(-20..=20i64).into(),
            rng.gen_range(1..=6i64).into(),
        )
    })
}

fn random_weights(
    rng: &mut ChaCha8Rng,
    space: &std::sync::Arc<ProbSpace>,
    ids: &[usize],
) -> MixtureWeights {
    let weights = (0..space.len())
        .map(|_| {
            let mut raw: Vec<i64> = ids.iter().map(|_| rng.gen_range(0..=5)).collect();
            if raw.iter().all(|&r| r == 0) {
                raw[0] = 1;
            }
            let total: i64 = raw.iter().sum();
            raw.iter().map(|&r| q(r, total)).collect()
        })
        .collect();
    MixtureWeights::new(space, ids.to_vec(), weights).unwrap()
}

fn lattice_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8000);
    for case in 0..500 {
        let space = ProbSpace::uniform(rng.gen_range(1..=5)).unwrap();
        let fam: Vec<Rv> = (0..rng.gen_range(1..=6))
            .map(|_| random_rv(&mut rng, &space))
            .collect();
        let sup = ess_sup(&fam).unwrap();

        // idempotence
        let doubled: Vec<Rv> = fam.iter().chain(fam.iter()).cloned().collect();
        if ess_sup(&doubled).unwrap() != sup || ess_sup([&sup, &sup]).unwrap() != sup {
            return Err(format!("idempotence, case {case}"));
        }
        // monotonicity
        let bumped: Vec<Rv> = fam
            .iter()
            .map(|x| x + &Rv::from_fn(&space, |_| Q::new(rng.gen_range(0..=4i64).into(), 3.into())))
            .collect();
        if !rv_leq(&sup, &ess_sup(&bumped).unwrap()).unwrap()
            || !fam.iter().all(|x| rv_leq(x, &sup).unwrap())
        {
            return Err(format!("monotonicity, case {case}"));
        }
        // duality
        let negated: Vec<Rv> = fam.iter().map(|x| -x).collect();
        if ess_inf(&fam).unwrap() != -ess_sup(&negated).unwrap() {
            return Err(format!("duality, case {case}"));
        }
    }

    for case in 0..500u64 {
        let inst = generate(8500 + case, Shape::random(8500 + case, 4, 4, 5)).unwrap();
        let df = distinct_functions(inst.functions());
        let space = inst.space();
        let n = rng.gen_range(1..=3);
        let lambda = Rv::from_fn(space, |_| q(1, rng.gen_range(3..=9)));
        let prefix: Vec<MixtureWeights> = (1..n)
            .map(|p| random_weights(&mut rng, space, &df.ids_from(p)))
            .collect();
        let ids = df.ids_from(n);
        let g = random_weights(&mut rng, space, &ids);
        let g2 = random_weights(&mut rng, space, &ids);
        let gamma = |h: &MixtureWeights| gamma_n(&inst, &df, n, &prefix, h, &lambda).unwrap();
        let (a, b) = (gamma(&g), gamma(&g2));
        let first = Event::where_(space, |atom| a.at(atom) <= b.at(atom));
        let glued =
            MixtureWeights::concatenate(&[first.clone(), first.complement()], &[g, g2]).unwrap();
        if gamma(&glued) != ess_inf([&a, &b]).unwrap() {
            return Err(format!("directedness, case {case}"));
        }
    }
    Ok("500 cases each: idempotence, monotonicity, duality, directedness".into())
}

/// Per-atom payoff of a constant mixture `w` over `rows` (one table per row).
fn constant_mixture_value(rows: &[&BaseFunction], w: &[Q], n_base: usize, atom: usize) -> Q {
    (0..n_base)
        .map(|b| {
            rows.iter()
                .zip(w)
                .map(|(f, c)| c * f.at(b, atom))
                .sum::<Q>()
        })
        .max()
        .unwrap()
}

fn lattice_weights(rows: usize, k: i64) -> Vec<Vec<Q>> {
    fn rec(left: usize, rem: i64, k: i64, cur: &mut Vec<Q>, out: &mut Vec<Vec<Q>>) {
        if left == 1 {
            cur.push(q(rem, k));
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for i in 0..=rem {
            cur.push(q(i, k));
            rec(left - 1, rem - i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rows, k, k, &mut Vec::new(), &mut out);
    out
}

/// The constant weight on a `{i/k}` lattice minimising the expected payoff,
/// with its per-atom values.
fn best_constant(inst: &Instance, k: i64) -> Vec<Q> {
    let mut rows: Vec<&BaseFunction> = Vec::new();
    for f in inst.functions().items() {
        if !rows.contains(&f) {
            rows.push(f);
        }
    }
    let masses = inst.space().masses();
    lattice_weights(rows.len(), k)
        .into_iter()
        .map(|w| {
            (0..inst.n_atoms())
                .map(|atom| constant_mixture_value(&rows, &w, inst.n_base(), atom))
                .collect::<Vec<Q>>()
        })
        .min_by(|x, y| {
            let ex: Q = x.iter().zip(masses).map(|(v, p)| v * p).sum();
            let ey: Q = y.iter().zip(masses).map(|(v, p)| v * p).sum();
            ex.cmp(&ey)
        })
        .unwrap()
}

fn hull_matrices_value(inst: &Instance) -> Rv {
    let df = distinct_functions(inst.functions());
    let columns = vec![(0..inst.n_base()).collect::<Vec<_>>(); inst.n_atoms()];
    let matrices = df.payoff_matrices(&df.all_ids(), &columns).unwrap();
    essinf_over_hull(inst.space(), &matrices).unwrap().0
}

fn hull_dominance() -> Outcome {
    let cases = seeded(9000..9100, |s| Shape {
        atoms: 2,
        ..Shape::random(s, 2, 4, 3)
    });
    for (seed, inst) in &cases {
        let hull = hull_matrices_value(inst);
        let constant = best_constant(inst, 12);
        if (0..2).any(|atom| hull.at(atom) > &constant[atom]) {
            return Err(format!("seed {seed}: hull [{}]", show(&hull)));
        }
    }
    let fixture =
        parse_instance(&common::fixture("two_atom_hull.json")).map_err(|d| format!("{d:?}"))?;
    let hull = hull_matrices_value(&fixture);
    let constant = best_constant(&fixture, 12);
    if hull.values() != [q(1, 2), int(0)] || !(0..2).any(|atom| *hull.at(atom) < constant[atom]) {
        return Err(format!("fixture: hull [{}]", show(&hull)));
    }
    Ok(format!(
        "100/100 dominated; fixture hull [{}] vs constant [{}]",
        show(&hull),
        constant.iter().map(fmt_q).collect::<Vec<_>>().join(", ")
    ))
}

fn hypothesis_checker() -> Outcome {
    let inst = parse_instance(&common::fixture("pennies_constant_a.json"))
        .map_err(|d| format!("{d:?}"))?;
    let df = distinct_functions(inst.functions());
    let Hypothesis::Fails { witness, sup } =
        check_hypothesis(&inst, HypothesisMode::default()).map_err(|e| e.to_string())?
    else {
        return Err("pennies with S = {X = a} not refuted".into());
    };
    // witness check straight from the tables
    let w = witness.at(0);
    let total: Q = w.iter().sum();
    let value = |b: usize| -> Q {
        witness
            .ids()
            .iter()
            .zip(w)
            .map(|(&id, c)| c * df.functions[id].at(b, 0))
            .sum()
    };
    let best = value(0).max(value(1));
    if !witness.is_strictly_positive() || !total.is_one() || *sup.at(0) != best || value(0) >= best
    {
        return Err(format!("witness does not verify: sup {}", show(&sup)));
    }
    let documented =
        MixtureWeights::new(inst.space(), vec![0, 1], vec![vec![q(1, 4), q(3, 4)]]).unwrap();
    if attaining_selection(&inst, &df, &documented).is_some() {
        return Err("weights (1/4, 3/4) attained in S".into());
    }

    let mut all =
        vec![parse_instance(&common::fixture("matching_pennies.json"))
            .map_err(|d| format!("{d:?}"))?];
    all.extend(
        seeded(10_000..10_200, |s| Shape::random(s, 4, 4, 5))
            .into_iter()
            .map(|(_, i)| i),
    );
    for (i, inst) in all.iter().enumerate() {
        for mode in [HypothesisMode::ExactForAll, HypothesisMode::default()] {
            if !matches!(check_hypothesis(inst, mode), Ok(Hypothesis::Holds { .. })) {
                return Err(format!("S = ALL case {i} not HOLDS"));
            }
        }
    }
    Ok(format!(
        "FAILS with witness ({}) sup {}; S = ALL gives HOLDS on 201/201",
        w.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
        show(&sup)
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 inequality sweep", inequality_sweep),
        ("2 lhs oracle equivalence", lhs_equivalence),
        ("3 rhs oracle sandwich", rhs_sandwich),
        ("4 equality tightness", equality_tightness),
        ("5 lambda certificate", lambda_certificate),
        ("6 proof-trace soundness", trace_soundness),
        ("7 scalar reduction", scalar_reduction),
        ("8 lattice laws", lattice_laws),
        ("9 hull dominance", hull_dominance),
        ("10 hypothesis checker", hypothesis_checker),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {}/10 criteria pass", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
