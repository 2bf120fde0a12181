//! Both sides of the random Simons inequality, and the constructive argument
//! run as an algorithm with every intermediate inequality recorded.
//!
//! For an instance with function sequence `f_n`, radius `ε` and selections
//! `S`, the verifier computes
//!
//! * `lhs = esssup_{Z∈S} esslimsup_n f_n(Z)`,
//! * `rhs = m = essinf_{f ∈ co_{L⁰}(f_n)} esssup_{X∈E} f(X)`,
//!
//! and [`trace_proof`] builds the sequence `g_n ∈ C_n = co_{L⁰}{f_p : p ≥ n}`,
//! the partial sums `s_n`, the maximiser `Z₀`, and checks each step exactly.
//! The only approximation is the truncation of `s = Σ λ^{n-1} g_n` after `N`
//! terms; its effect is bounded by `τ = ε λ^N / (1 − λ)` and every check that
//! depends on it carries that allowance.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{
    check_hypothesis, distinct_functions, evaluate, validate, DistinctFunctions, Hypothesis,
    HypothesisMode, Instance, Selection, SelectionSet, DEFAULT_SELECTION_CAP,
};
use crate::l0::{ess_limsup, ess_sup, rv_leq, Event, Rv};
use crate::minimax::{essinf_over_hull, game_value, MixtureWeights, PayoffMatrix};
use crate::rational::{int, q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub cap: u128,
    pub hypothesis: HypothesisMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: DEFAULT_SELECTION_CAP,
            hypothesis: HypothesisMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierResult {
    pub lhs: Rv,
    pub rhs: Rv,
    pub rhs_weights: MixtureWeights,
    pub hypothesis: Hypothesis,
    /// `lhs ≥ rhs` at every atom, exactly.
    pub holds: bool,
    /// False when the attainment hypothesis fails; the inequality is then
    /// not guaranteed and a violation is not a counterexample.
    pub applicable: bool,
    /// `lhs − rhs`.
    pub slack: Rv,
}

fn ensure_valid(instance: &Instance) -> Result<()> {
    let diags = validate(instance);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(diags))
    }
}

/// `esssup_{Z∈S} esslimsup_n f_n(Z)`.
pub fn compute_lhs(instance: &Instance, cap: u128) -> Result<Rv> {
    let limsups = instance
        .selections(cap)?
        .iter()
        .map(|z| ess_limsup(&instance.functions().try_map(|f| evaluate(f, z))?))
        .collect::<Result<Vec<_>>>()?;
    ess_sup(&limsups)
}

/// `m`, over the L⁰-convex hull of every distinct function (preamble and
/// cycle), with supremum over all of `E`. Returns the attaining weights.
pub fn compute_rhs(instance: &Instance) -> Result<(Rv, MixtureWeights)> {
    let df = distinct_functions(instance.functions());
    let columns = vec![(0..instance.n_base()).collect::<Vec<_>>(); instance.n_atoms()];
    let matrices = df.payoff_matrices(&df.all_ids(), &columns)?;
    essinf_over_hull(instance.space(), &matrices)
}

/// `M = esssup_n esssup_{X∈E} f_n`.
#[allow(non_snake_case)]
pub fn compute_M(instance: &Instance) -> Rv {
    let df = distinct_functions(instance.functions());
    Rv::from_fn(instance.space(), |atom| {
        df.functions
            .iter()
            .flat_map(|f| (0..instance.n_base()).map(move |b| f.at(b, atom)))
            .max()
            .expect("nonempty")
            .clone()
    })
}

/// `λ = δ / (M − m + 3δ)`, the solution of
/// `m − δ(1+λ) − Mλ = (m − 2δ)(1 − λ)`; lies in `(0, 1/3]`.
pub fn choose_lambda(m: &Rv, big_m: &Rv, delta: &Rv) -> Result<Rv> {
    if !delta.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive { what: "delta" });
    }
    if !rv_leq(m, big_m)? {
        return Err(Error::Domain("M must dominate m".into()));
    }
    let denom = big_m - m + delta.scale(&int(3));
    Ok(delta.zip_with(&denom, |d, den| d / den))
}

/// `[m − δ(1+λ) − Mλ] − (m − 2δ)(1 − λ)`; nonnegative iff the λ-condition holds.
pub fn lambda_residual(m: &Rv, big_m: &Rv, delta: &Rv, lambda: &Rv) -> Rv {
    let one = Rv::constant(m.space(), Q::one());
    let lhs = m - &(delta * &(&one + lambda)) - big_m * lambda;
    let rhs = (m - &delta.scale(&int(2))) * (&one - lambda);
    lhs - rhs
}

/// Default `δ = (M − m + 1) / 10`.
pub fn default_delta(m: &Rv, big_m: &Rv) -> Rv {
    (big_m - m).map(|g| (g + Q::one()) / int(10))
}

fn lambda_powers(lambda: &Rv, upto: usize) -> Vec<Rv> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(Rv::constant(lambda.space(), Q::one()));
    for k in 1..=upto {
        out.push(&out[k - 1] * lambda);
    }
    out
}

/// `γ_n(h) = esssup_{Z∈S} (Σ_{p≤n−1} λ^{p−1} g_p(Z) + λ^{n−1} h(Z))`.
///
/// Each summand at atom `ω` depends on `Z` only through `Z(ω)`, so the
/// supremum is taken over the base points `S` reaches at `ω`.
pub fn gamma_n(
    instance: &Instance,
    df: &DistinctFunctions,
    n: usize,
    prefix: &[MixtureWeights],
    h: &MixtureWeights,
    lambda: &Rv,
) -> Result<Rv> {
    if n == 0 || prefix.len() != n - 1 {
        return Err(Error::LengthMismatch {
            expected: n.saturating_sub(1),
            got: prefix.len(),
        });
    }
    let powers = lambda_powers(lambda, n - 1);
    let points = instance.available_points();
    Ok(Rv::from_fn(instance.space(), |atom| {
        points[atom]
            .iter()
            .map(|&b| {
                let past: Q = prefix
                    .iter()
                    .enumerate()
                    .map(|(p, g)| powers[p].at(atom) * df.mixture_at(g, b, atom))
                    .sum();
                past + powers[n - 1].at(atom) * df.mixture_at(h, b, atom)
            })
            .max()
            .expect("S reaches at least one base point")
    }))
}

/// One step of the `g_n` construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GStep {
    pub n: usize,
    /// `g_n` as per-atom weights over the ids of `C_n`.
    pub weights: MixtureWeights,
    /// `γ_n(g_n)`.
    pub gamma: Rv,
    /// `essinf_{g∈C_n} γ_n(g)`, the exact per-atom LP optimum.
    pub essinf_gamma: Rv,
    /// `γ_n(g_n) − essinf γ_n`; zero because the optimum is attained.
    pub optimality_gap: Rv,
    /// `essinf γ_n + δ(λ/2)^n − γ_n(g_n)`.
    pub near_optimality_slack: Rv,
}

/// Builds `g_1, …, g_N`. At step `n` the per-atom minimisers `w^{(k)}` of the
/// `γ_n` objective are turned into candidates `h_k` (weights `w^{(k)}` at
/// every atom), and `g_n` is glued from them over the partition
/// `A_k = {γ_n(h_k) ≤ essinf γ_n} \ (A_1 ∪ … ∪ A_{k−1})`.
pub fn construct_g_sequence(
    instance: &Instance,
    df: &DistinctFunctions,
    delta: &Rv,
    lambda: &Rv,
    steps: usize,
) -> Result<Vec<GStep>> {
    if steps == 0 {
        return Err(Error::Domain("at least one step is required".into()));
    }
    let space = instance.space();
    let points = instance.available_points();
    let powers = lambda_powers(lambda, steps);
    let half_lambda = lambda.scale(&q(1, 2));
    // offsets[atom][k] = s_{n-1}(b_k)(atom) for b_k = points[atom][k]
    let mut offsets: Vec<Vec<Q>> = points.iter().map(|p| vec![Q::zero(); p.len()]).collect();
    let mut out: Vec<GStep> = Vec::with_capacity(steps);

    for n in 1..=steps {
        let ids = df.ids_from(n);
        let matrices = (0..space.len())
            .map(|atom| {
                let scale = powers[n - 1].at(atom);
                let entries = ids
                    .iter()
                    .map(|&id| {
                        points[atom]
                            .iter()
                            .zip(&offsets[atom])
                            .map(|(&b, off)| off + scale * df.value(id, b, atom))
                            .collect()
                    })
                    .collect();
                PayoffMatrix::new(ids.clone(), points[atom].clone(), entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let solutions: Vec<_> = matrices.iter().map(game_value).collect();
        let essinf_gamma = Rv::new(space, solutions.iter().map(|s| s.value.clone()).collect())?;

        let prefix: Vec<MixtureWeights> = out.iter().map(|s| s.weights.clone()).collect();
        let mut cells: Vec<Event> = Vec::new();
        let mut candidates: Vec<MixtureWeights> = Vec::new();
        let mut covered = Event::from_indices(space, [])?;
        for sol in &solutions {
            let h = MixtureWeights::constant(space, ids.clone(), sol.weights.clone())?;
            let gamma_h = gamma_n(instance, df, n, &prefix, &h, lambda)?;
            let good = Event::where_(space, |atom| gamma_h.at(atom) <= essinf_gamma.at(atom));
            cells.push(good.minus(&covered));
            covered = covered.union(&good);
            candidates.push(h);
        }
        let g = MixtureWeights::concatenate(&cells, &candidates)?;
        let gamma = gamma_n(instance, df, n, &prefix, &g, lambda)?;
        let optimality_gap = &gamma - &essinf_gamma;
        let allowance = delta * &half_lambda.pow(n as i64);
        let near_optimality_slack = &(&essinf_gamma + &allowance) - &gamma;

        for (atom, offs) in offsets.iter_mut().enumerate() {
            let scale = powers[n - 1].at(atom);
            for (off, &b) in offs.iter_mut().zip(&points[atom]) {
                *off += scale * df.mixture_at(&g, b, atom);
            }
        }
        out.push(GStep {
            n,
            weights: g,
            gamma,
            essinf_gamma,
            optimality_gap,
            near_optimality_slack,
        });
    }
    Ok(out)
}

/// `τ = ε λ^N / (1 − λ)`.
pub fn tail_bound(epsilon: &Rv, lambda: &Rv, steps: usize) -> Rv {
    let one = Rv::constant(lambda.space(), Q::one());
    let denom = &one - lambda;
    (epsilon * &lambda.pow(steps as i64)).zip_with(&denom, |a, b| a / b)
}

/// Smallest `N` past the preamble with `τ < δ` at every atom.
pub fn required_steps(epsilon: &Rv, lambda: &Rv, delta: &Rv, preamble_len: usize) -> usize {
    let mut n = preamble_len + 1;
    loop {
        let tau = tail_bound(epsilon, lambda, n);
        if tau.values().iter().zip(delta.values()).all(|(t, d)| t < d) {
            return n;
        }
        n += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceOptions {
    /// Defaults to [`default_delta`].
    pub delta: Option<Rv>,
    /// Defaults to [`required_steps`].
    pub steps: Option<usize>,
    pub cap: u128,
    pub hypothesis: HypothesisMode,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            delta: None,
            steps: None,
            cap: DEFAULT_SELECTION_CAP,
            hypothesis: HypothesisMode::default(),
        }
    }
}

/// Per-step record of a proof run. Slack fields are "right side minus left
/// side" of the named inequality and must be nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub n: usize,
    pub g: GStep,
    /// `esssup_S s_n` (equals `γ_n(g_n)`).
    pub sup_s: Rv,
    /// `γ_n((g_n + λ g_{n+1})/(1+λ)) + δ(λ/2)^n − γ_n(g_n)`; absent at `n = N`.
    pub blend_slack: Option<Rv>,
    /// `λ^{1−n}(esssup s_n − esssup s_{n−1}) − (m − δ(1+λ))`.
    pub telescoping_slack: Rv,
    /// `esssup s̃ − esssup s_{n−1} + τ − λ^{n−1}(m − δ(1+λ))/(1−λ)`.
    pub partial_sum_slack: Rv,
    pub s_at_z0: Rv,
    pub g_at_z0: Rv,
    /// `g_n(Z₀) − (m − 2δ − 2τ)`.
    pub g_at_z0_slack: Rv,
    /// `esssup_{p≥n} f_p(Z₀) − g_n(Z₀)`.
    pub tail_sup_slack: Rv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub hypothesis: Hypothesis,
    pub delta: Rv,
    pub lambda: Rv,
    pub m: Rv,
    pub big_m: Rv,
    pub m_weights: MixtureWeights,
    /// Exactly zero by the choice of λ.
    pub lambda_residual: Rv,
    pub steps: Vec<TraceStep>,
    pub truncation: usize,
    pub tail_bound: Rv,
    /// `esssup_S s_1 − m`, the base of the induction.
    pub base_slack: Rv,
    /// `esssup_S s̃` for the truncated sum.
    pub sup_s_total: Rv,
    pub z0: Selection,
    pub limsup_at_z0: Rv,
    /// `esslimsup f_n(Z₀) − (m − 2δ − 2τ)`.
    pub limsup_slack: Rv,
    /// Some function id gets zero aggregated weight in `(1−λ)s̃` at some
    /// atom, so the strictly-positive attainment hypothesis does not apply
    /// verbatim; `Z₀` is extracted constructively instead.
    pub positive_mixture_gap: bool,
}

/// A named slack vector with its check outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackCheck<'a> {
    pub name: String,
    pub value: &'a Rv,
    pub passes: bool,
}

impl ProofTrace {
    /// Every recorded check, in trace order.
    pub fn checks(&self) -> Vec<SlackCheck<'_>> {
        let nonneg = |v: &Rv| v.is_nonnegative();
        let mut out = vec![
            SlackCheck {
                name: "lambda_residual".into(),
                value: &self.lambda_residual,
                passes: self.lambda_residual.is_zero(),
            },
            SlackCheck {
                name: "base".into(),
                value: &self.base_slack,
                passes: nonneg(&self.base_slack),
            },
        ];
        for s in &self.steps {
            let n = s.n;
            out.push(SlackCheck {
                name: format!("optimality_gap[{n}]"),
                value: &s.g.optimality_gap,
                passes: s.g.optimality_gap.is_zero(),
            });
            out.push(SlackCheck {
                name: format!("near_optimality[{n}]"),
                value: &s.g.near_optimality_slack,
                passes: nonneg(&s.g.near_optimality_slack),
            });
            if let Some(v) = &s.blend_slack {
                out.push(SlackCheck {
                    name: format!("blend[{n}]"),
                    value: v,
                    passes: nonneg(v),
                });
            }
            out.push(SlackCheck {
                name: format!("telescoping[{n}]"),
                value: &s.telescoping_slack,
                passes: nonneg(&s.telescoping_slack),
            });
            out.push(SlackCheck {
                name: format!("partial_sum[{n}]"),
                value: &s.partial_sum_slack,
                passes: nonneg(&s.partial_sum_slack),
            });
            out.push(SlackCheck {
                name: format!("g_at_z0[{n}]"),
                value: &s.g_at_z0_slack,
                passes: nonneg(&s.g_at_z0_slack),
            });
            out.push(SlackCheck {
                name: format!("tail_sup[{n}]"),
                value: &s.tail_sup_slack,
                passes: nonneg(&s.tail_sup_slack),
            });
        }
        out.push(SlackCheck {
            name: "limsup_at_z0".into(),
            value: &self.limsup_slack,
            passes: nonneg(&self.limsup_slack),
        });
        out
    }

    pub fn all_slacks_pass(&self) -> bool {
        self.checks().iter().all(|c| c.passes)
    }
}

/// Runs the constructive argument end to end.
pub fn trace_proof(instance: &Instance, opts: &TraceOptions) -> Result<ProofTrace> {
    ensure_valid(instance)?;
    let hypothesis = check_hypothesis(instance, opts.hypothesis)?;
    if let Hypothesis::Fails { witness, .. } = &hypothesis {
        return Err(Error::HypothesisFails(format!(
            "mixture with weights {:?} is not attained in S",
            (0..witness.space().len())
                .map(|a| witness
                    .at(a)
                    .iter()
                    .map(crate::rational::fmt_q)
                    .collect::<Vec<_>>())
                .collect::<Vec<_>>()
        )));
    }
    let space = Arc::clone(instance.space());
    let df = distinct_functions(instance.functions());
    let (m, m_weights) = compute_rhs(instance)?;
    let big_m = compute_M(instance);
    let delta = match &opts.delta {
        Some(d) => d.clone(),
        None => default_delta(&m, &big_m),
    };
    let lambda = choose_lambda(&m, &big_m, &delta)?;
    let lambda_res = lambda_residual(&m, &big_m, &delta, &lambda);

    let required = required_steps(
        instance.epsilon(),
        &lambda,
        &delta,
        instance.functions().preamble().len(),
    );
    let truncation = match opts.steps {
        Some(given) if given < required => return Err(Error::StepsTooSmall { required, given }),
        Some(given) => given,
        None => required,
    };
    let tau = tail_bound(instance.epsilon(), &lambda, truncation);
    let gs = construct_g_sequence(instance, &df, &delta, &lambda, truncation)?;

    let one = Rv::constant(&space, Q::one());
    let one_minus_lambda = &one - &lambda;
    let k = &m - &(&delta * &(&one + &lambda));
    let powers = lambda_powers(&lambda, truncation);
    let zero = Rv::zero(&space);
    let sup_s_total = gs.last().expect("at least one step").gamma.clone();
    let base_slack = &gs[0].gamma - &m;

    // Z₀: maximiser of the truncated sum over S
    let s_tilde = |b: usize, atom: usize| -> Q {
        gs.iter()
            .map(|g| powers[g.n - 1].at(atom) * df.mixture_at(&g.weights, b, atom))
            .sum()
    };
    let z0 = match instance.selection_set() {
        SelectionSet::All => Selection::new(
            (0..space.len())
                .map(|atom| {
                    (0..instance.n_base())
                        .find(|&b| s_tilde(b, atom) == *sup_s_total.at(atom))
                        .expect("supremum over E is attained")
                })
                .collect(),
        ),
        SelectionSet::Explicit(list) => list
            .iter()
            .find(|z| {
                (0..space.len()).all(|atom| s_tilde(z.at(atom), atom) == *sup_s_total.at(atom))
            })
            .cloned()
            .ok_or_else(|| {
                Error::HypothesisFails(
                    "no selection in S attains esssup of the truncated sum".into(),
                )
            })?,
    };

    let two_delta_tau = (&delta + &tau).scale(&int(2));
    let floor = &m - &two_delta_tau;
    let mut steps = Vec::with_capacity(gs.len());
    let mut s_at_z0 = zero.clone();
    for (i, g) in gs.iter().enumerate() {
        let n = g.n;
        let prev_sup = if i == 0 {
            zero.clone()
        } else {
            gs[i - 1].gamma.clone()
        };
        let blend_slack = match gs.get(i + 1) {
            Some(next) => {
                let t = lambda.zip_with(&(&one + &lambda), |l, d| l / d);
                let blended = g.weights.blend(&next.weights, &t)?;
                let prefix: Vec<MixtureWeights> =
                    gs[..i].iter().map(|s| s.weights.clone()).collect();
                let rhs = gamma_n(instance, &df, n, &prefix, &blended, &lambda)?;
                let allowance = &delta * &lambda.scale(&q(1, 2)).pow(n as i64);
                Some(rhs + allowance - g.gamma.clone())
            }
            None => None,
        };
        let increment = &g.gamma - &prev_sup;
        let telescoping_slack = (&increment * &lambda.pow(1 - n as i64)) - k.clone();
        let partial_sum_bound = (&powers[n - 1] * &k).zip_with(&one_minus_lambda, |a, b| a / b);
        let partial_sum_slack = &(&(&sup_s_total - &prev_sup) + &tau) - &partial_sum_bound;

        let g_at_z0 = df.eval_mixture(&g.weights, &z0);
        s_at_z0 = &s_at_z0 + &(&powers[n - 1] * &g_at_z0);
        let g_at_z0_slack = &g_at_z0 - &floor;
        let ids = df.ids_from(n);
        let tail_sup = Rv::from_fn(&space, |atom| {
            ids.iter()
                .map(|&id| df.value(id, z0.at(atom), atom))
                .max()
                .expect("nonempty")
                .clone()
        });
        let tail_sup_slack = &tail_sup - &g_at_z0;
        steps.push(TraceStep {
            n,
            g: g.clone(),
            sup_s: g.gamma.clone(),
            blend_slack,
            telescoping_slack,
            partial_sum_slack,
            s_at_z0: s_at_z0.clone(),
            g_at_z0,
            g_at_z0_slack,
            tail_sup_slack,
        });
    }
    debug_assert_eq!(s_at_z0, sup_s_total);

    let limsup_at_z0 = ess_limsup(&instance.functions().try_map(|f| evaluate(f, &z0))?)?;
    let limsup_slack = &limsup_at_z0 - &floor;

    let positive_mixture_gap = df.all_ids().into_iter().any(|id| {
        let aggregate = gs.iter().fold(zero.clone(), |acc, g| {
            &acc + &(&powers[g.n - 1] * &g.weights.weight_of(id))
        });
        !aggregate.is_strictly_positive()
    });

    Ok(ProofTrace {
        hypothesis,
        delta,
        lambda,
        m,
        big_m,
        m_weights,
        lambda_residual: lambda_res,
        steps,
        truncation,
        tail_bound: tau,
        base_slack,
        sup_s_total,
        z0,
        limsup_at_z0,
        limsup_slack,
        positive_mixture_gap,
    })
}

/// Computes both sides of the inequality and compares them exactly.
pub fn verify(instance: &Instance, opts: &VerifyOptions) -> Result<VerifierResult> {
    ensure_valid(instance)?;
    let hypothesis = check_hypothesis(instance, opts.hypothesis)?;
    let lhs = compute_lhs(instance, opts.cap)?;
    let (rhs, rhs_weights) = compute_rhs(instance)?;
    let holds = rv_leq(&rhs, &lhs)?;
    let slack = &lhs - &rhs;
    let applicable = !hypothesis.is_fails();
    Ok(VerifierResult {
        lhs,
        rhs,
        rhs_weights,
        hypothesis,
        holds,
        applicable,
        slack,
    })
}
