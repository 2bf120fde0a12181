//! Machine-readable reports. Every rational is emitted as a `"p/q"` string;
//! the only floats are in `approx_f64_display_only` columns.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::Result;
use crate::format::instance_digest;
use crate::instance::{Hypothesis, Instance, Selection};
use crate::l0::Rv;
use crate::minimax::MixtureWeights;
use crate::oracle::{brute_lhs, brute_rhs, GridSpec};
use crate::rational::{fmt_q, Q};
use crate::verifier::{compute_lhs, compute_rhs, ProofTrace, VerifierResult};

fn rv(v: &Rv) -> Vec<String> {
    v.values().iter().map(fmt_q).collect()
}

fn approx(v: &Rv) -> Vec<f64> {
    v.values()
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightsReport {
    pub ids: Vec<usize>,
    /// One row per atom, aligned with `ids`.
    pub per_atom: Vec<Vec<String>>,
}

impl From<&MixtureWeights> for WeightsReport {
    fn from(w: &MixtureWeights) -> Self {
        WeightsReport {
            ids: w.ids().to_vec(),
            per_atom: (0..w.space().len())
                .map(|a| w.at(a).iter().map(fmt_q).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WeightsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_sup: Option<Vec<String>>,
}

impl From<&Hypothesis> for HypothesisReport {
    fn from(h: &Hypothesis) -> Self {
        let mut r = HypothesisReport {
            verdict: h.label(),
            reason: None,
            samples: None,
            seed: None,
            witness: None,
            witness_sup: None,
        };
        match h {
            Hypothesis::Holds { reason } => r.reason = Some(reason.clone()),
            Hypothesis::HoldsOnSamples { samples, seed } => {
                r.samples = Some(*samples);
                r.seed = Some(*seed);
            }
            Hypothesis::Fails { witness, sup } => {
                r.witness = Some(witness.into());
                r.witness_sup = Some(rv(sup));
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxColumns {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyBlock {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub slack: Vec<String>,
    pub rhs_weights: WeightsReport,
    pub holds: bool,
    pub applicable: bool,
    pub approx_f64_display_only: ApproxColumns,
}

impl From<&VerifierResult> for VerifyBlock {
    fn from(r: &VerifierResult) -> Self {
        VerifyBlock {
            lhs: rv(&r.lhs),
            rhs: rv(&r.rhs),
            slack: rv(&r.slack),
            rhs_weights: (&r.rhs_weights).into(),
            holds: r.holds,
            applicable: r.applicable,
            approx_f64_display_only: ApproxColumns {
                lhs: approx(&r.lhs),
                rhs: approx(&r.rhs),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStepReport {
    pub n: usize,
    pub g_weights: WeightsReport,
    pub gamma: Vec<String>,
    pub essinf_gamma: Vec<String>,
    pub optimality_gap: Vec<String>,
    pub near_optimality_slack: Vec<String>,
    pub blend_slack: Option<Vec<String>>,
    pub sup_s: Vec<String>,
    pub telescoping_slack: Vec<String>,
    pub partial_sum_slack: Vec<String>,
    pub s_at_z0: Vec<String>,
    pub g_at_z0: Vec<String>,
    pub g_at_z0_slack: Vec<String>,
    pub tail_sup_slack: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceBlock {
    pub delta: Vec<String>,
    pub lambda: Vec<String>,
    pub m: Vec<String>,
    #[serde(rename = "M")]
    pub big_m: Vec<String>,
    pub m_weights: WeightsReport,
    pub lambda_residual: Vec<String>,
    pub truncation: usize,
    pub tail_bound: Vec<String>,
    pub base_slack: Vec<String>,
    pub sup_s_total: Vec<String>,
    pub z0: Vec<String>,
    pub limsup_at_z0: Vec<String>,
    pub limsup_slack: Vec<String>,
    pub positive_mixture_gap: bool,
    pub failed_checks: Vec<String>,
    pub all_slacks_pass: bool,
    pub steps: Vec<TraceStepReport>,
}

fn selection_labels(instance: &Instance, z: &Selection) -> Vec<String> {
    z.assignment()
        .iter()
        .map(|&b| instance.base_points()[b].clone())
        .collect()
}

impl TraceBlock {
    pub fn new(instance: &Instance, t: &ProofTrace) -> Self {
        TraceBlock {
            delta: rv(&t.delta),
            lambda: rv(&t.lambda),
            m: rv(&t.m),
            big_m: rv(&t.big_m),
            m_weights: (&t.m_weights).into(),
            lambda_residual: rv(&t.lambda_residual),
            truncation: t.truncation,
            tail_bound: rv(&t.tail_bound),
            base_slack: rv(&t.base_slack),
            sup_s_total: rv(&t.sup_s_total),
            z0: selection_labels(instance, &t.z0),
            limsup_at_z0: rv(&t.limsup_at_z0),
            limsup_slack: rv(&t.limsup_slack),
            positive_mixture_gap: t.positive_mixture_gap,
            failed_checks: t
                .checks()
                .into_iter()
                .filter(|c| !c.passes)
                .map(|c| c.name)
                .collect(),
            all_slacks_pass: t.all_slacks_pass(),
            steps: t
                .steps
                .iter()
                .map(|s| TraceStepReport {
                    n: s.n,
                    g_weights: (&s.g.weights).into(),
                    gamma: rv(&s.g.gamma),
                    essinf_gamma: rv(&s.g.essinf_gamma),
                    optimality_gap: rv(&s.g.optimality_gap),
                    near_optimality_slack: rv(&s.g.near_optimality_slack),
                    blend_slack: s.blend_slack.as_ref().map(rv),
                    sup_s: rv(&s.sup_s),
                    telescoping_slack: rv(&s.telescoping_slack),
                    partial_sum_slack: rv(&s.partial_sum_slack),
                    s_at_z0: rv(&s.s_at_z0),
                    g_at_z0: rv(&s.g_at_z0),
                    g_at_z0_slack: rv(&s.g_at_z0_slack),
                    tail_sup_slack: rv(&s.tail_sup_slack),
                })
                .collect(),
        }
    }
}

/// Solver values next to brute-force values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBlock {
    pub grid: u32,
    pub lhs_solver: Vec<String>,
    pub lhs_brute: Vec<String>,
    pub lhs_equal: bool,
    pub rhs_solver: Vec<String>,
    pub rhs_brute: Vec<String>,
    /// `brute − solver`.
    pub rhs_gap: Vec<String>,
    /// `(max entry − min entry) / k` per atom.
    pub rhs_gap_bound: Vec<String>,
    pub sandwich_holds: bool,
}

impl OracleBlock {
    pub fn pass(&self) -> bool {
        self.lhs_equal && self.sandwich_holds
    }
}

/// Per-atom spread of the payoff entries over every stored function and base point.
pub fn entry_range(instance: &Instance) -> Rv {
    Rv::from_fn(instance.space(), |atom| {
        let vals = instance
            .functions()
            .items()
            .flat_map(|f| f.table().iter().map(move |rv| rv.at(atom)));
        let (lo, hi) = vals.fold((None::<&Q>, None::<&Q>), |(lo, hi), v| {
            (
                Some(lo.map_or(v, |l| l.min(v))),
                Some(hi.map_or(v, |h| h.max(v))),
            )
        });
        hi.expect("nonempty") - lo.expect("nonempty")
    })
}

/// Runs solver and brute force side by side and checks the sandwich
/// `0 ≤ brute − solver ≤ range/k` and exact LHS equality.
pub fn oracle_comparison(instance: &Instance, grid: GridSpec, cap: u128) -> Result<OracleBlock> {
    let lhs_solver = compute_lhs(instance, cap)?;
    let lhs_brute = brute_lhs(instance, cap)?;
    let (rhs_solver, _) = compute_rhs(instance)?;
    let rhs_brute = brute_rhs(instance, grid)?;
    let gap = &rhs_brute - &rhs_solver;
    let bound = entry_range(instance).map(|r| r / Q::from_integer(grid.resolution().into()));
    let sandwich_holds = gap.is_nonnegative() && crate::l0::rv_leq(&gap, &bound)?;
    Ok(OracleBlock {
        grid: grid.resolution(),
        lhs_equal: lhs_solver == lhs_brute,
        lhs_solver: rv(&lhs_solver),
        lhs_brute: rv(&lhs_brute),
        rhs_solver: rv(&rhs_solver),
        rhs_brute: rv(&rhs_brute),
        rhs_gap: rv(&gap),
        rhs_gap_bound: rv(&bound),
        sandwich_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub instance_digest: String,
    pub atoms: Vec<String>,
    pub base_points: Vec<String>,
    pub hypothesis: HypothesisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    pub pass: bool,
}

impl Report {
    pub fn new(mode: &'static str, instance: &Instance, hypothesis: &Hypothesis) -> Self {
        Report {
            mode,
            instance_digest: instance_digest(instance),
            atoms: instance.space().labels().to_vec(),
            base_points: instance.base_points().to_vec(),
            hypothesis: hypothesis.into(),
            verify: None,
            trace: None,
            oracle: None,
            pass: false,
        }
    }
}

/// Reports for a seed range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub mode: &'static str,
    pub shape: String,
    pub seeds: Vec<u64>,
    pub reports: Vec<Report>,
    pub pass: bool,
}
