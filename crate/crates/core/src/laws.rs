//! Law verifiers: each one turns a [`Transition`] into a [`LawReport`]
//! with explicit left/right sides, slack, verdict, and a narrative
//! carrying every intermediate quantity.
//!
//! Heats follow the crate-wide sign ledger (see [`crate::thermo`]):
//! `heat_absorbed_by_system = T * dS(S|B) = -T * dS_B` under entropy
//! preservation, `heat_dissipated_to_bath` is its negation, and the
//! energetic heat `-dE_B` is reported separately. Every report prints
//! both signed heats with explicit labels.
//!
//! There is no standalone checker for converting absorbed heat into work
//! as the sole effect of a process: that bookkeeping is exactly the
//! `dW_S` versus `dQ` split carried by every [`first_law_report`]
//! narrative, so a separate verdict would be redundant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteLayout, Keep, DIM_CAP};
use crate::process::{check_entropy_preserving, Transition, DEFAULT_ENTROPY_TOL};
use crate::states::{gibbs, DensityMatrix, Hamiltonian};
use crate::thermo::{self, EnergyValue};

/// Default tolerance for identity-type verdicts (exact bookkeeping).
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-9;

/// Default tolerance for inequality- and equality-type law verdicts;
/// an order of magnitude above what the eigensolver can drift.
pub const DEFAULT_LAW_TOL: f64 = 1e-7;

/// Trace-distance tolerance for accepting a marginal as thermal.
pub const THERMALITY_TOL: f64 = 1e-6;

/// Mutual-information decrease (in nats) below which the coefficient of
/// performance is treated as undefined: the ratio `dQ / (-T dI)` is
/// numerically meaningless as `dI` approaches zero.
pub const COP_FEASIBILITY_CUT: f64 = 1e-6;

/// Heat threshold above which a cold-to-hot flow is flagged as anomalous.
pub const ANOMALY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    First,
    InfoSecond,
    ClausiusGeneralized,
    Cop,
    LandauerClassic,
    LandauerGeneralized,
    ClausiusChain,
    Zeroth,
}

/// Structured verdict for one law on one transition. `verdict` is pass
/// exactly when `slack >= -tol`; every number in `quantities` and the
/// narrative is recomputable from the transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: Law,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub verdict: bool,
    pub quantities: BTreeMap<String, f64>,
    pub narrative: String,
}

impl LawReport {
    fn build(
        law: Law,
        lhs: f64,
        rhs: f64,
        slack: f64,
        tol: f64,
        quantities: BTreeMap<String, f64>,
        narrative: String,
    ) -> Self {
        Self {
            law,
            lhs,
            rhs,
            slack,
            tol,
            verdict: slack >= -tol,
            quantities,
            narrative,
        }
    }
}

/// Entropic and energetic bookkeeping of a transition, computed once and
/// shared by the verifiers.
#[derive(Debug, Clone)]
pub struct TransitionLedger {
    pub e_first_initial: f64,
    pub e_first_final: f64,
    pub e_second_initial: f64,
    pub e_second_final: f64,
    pub s_first_initial: f64,
    pub s_first_final: f64,
    pub s_second_initial: f64,
    pub s_second_final: f64,
    pub s_joint_initial: f64,
    pub s_joint_final: f64,
    pub cond_initial: f64,
    pub cond_final: f64,
    pub mi_initial: f64,
    pub mi_final: f64,
}

impl TransitionLedger {
    pub fn compute(t: &Transition) -> Result<Self> {
        let layout = t.layout;
        let s_joint_initial = thermo::entropy(&t.initial)?.nats;
        let s_joint_final = thermo::entropy(&t.final_state)?.nats;
        let first_i = t.initial_first()?;
        let first_f = t.final_first()?;
        let second_i = t.initial_second()?;
        let second_f = t.final_second()?;
        let s_first_initial = thermo::entropy(&first_i)?.nats;
        let s_first_final = thermo::entropy(&first_f)?.nats;
        let s_second_initial = thermo::entropy(&second_i)?.nats;
        let s_second_final = thermo::entropy(&second_f)?.nats;
        let _ = layout;
        Ok(Self {
            e_first_initial: thermo::internal_energy(&first_i, &t.h_first)?.value,
            e_first_final: thermo::internal_energy(&first_f, &t.h_first)?.value,
            e_second_initial: thermo::internal_energy(&second_i, &t.h_second)?.value,
            e_second_final: thermo::internal_energy(&second_f, &t.h_second)?.value,
            s_first_initial,
            s_first_final,
            s_second_initial,
            s_second_final,
            s_joint_initial,
            s_joint_final,
            cond_initial: s_joint_initial - s_second_initial,
            cond_final: s_joint_final - s_second_final,
            mi_initial: s_first_initial + s_second_initial - s_joint_initial,
            mi_final: s_first_final + s_second_final - s_joint_final,
        })
    }

    pub fn d_e_first(&self) -> f64 {
        self.e_first_final - self.e_first_initial
    }
    pub fn d_e_second(&self) -> f64 {
        self.e_second_final - self.e_second_initial
    }
    pub fn d_s_first(&self) -> f64 {
        self.s_first_final - self.s_first_initial
    }
    pub fn d_s_second(&self) -> f64 {
        self.s_second_final - self.s_second_initial
    }
    pub fn d_s_joint(&self) -> f64 {
        self.s_joint_final - self.s_joint_initial
    }
    pub fn d_cond(&self) -> f64 {
        self.cond_final - self.cond_initial
    }
    pub fn d_mi(&self) -> f64 {
        self.mi_final - self.mi_initial
    }
}

fn insert_entropy(map: &mut BTreeMap<String, f64>, key: &str, nats: f64) {
    map.insert(format!("{key}_nats"), nats);
    map.insert(format!("{key}_bits"), nats / std::f64::consts::LN_2);
}

fn ensure_entropy_preserving(t: &Transition) -> Result<()> {
    let check = check_entropy_preserving(t, DEFAULT_ENTROPY_TOL)?;
    if !check.preserved {
        return Err(Error::NotEntropyPreserving {
            drift: check.drift,
            tol: DEFAULT_ENTROPY_TOL,
        });
    }
    Ok(())
}

fn ensure_marginal_thermal(
    marginal: &DensityMatrix,
    h: &Hamiltonian,
    temperature: f64,
) -> Result<()> {
    let reference = gibbs(h, temperature)?;
    let distance = thermo::trace_distance(marginal, &reference)?;
    if distance > THERMALITY_TOL {
        return Err(Error::BathNotThermal {
            distance,
            tol: THERMALITY_TOL,
        });
    }
    Ok(())
}

/// First law: `dE_S = -dW_S + dQ` with `dW_S = -(dE_S - T dS(S|B))`,
/// `dQ = T dS(S|B)` (heat absorbed by the system), and
/// `dF_B = dE_B - T dS_B >= 0` when the bath starts thermal.
///
/// The verdict folds both conditions: the identity residual must stay
/// within `tol` and the work performed on the bath must not be negative
/// beyond `tol`.
pub fn first_law_report(t: &Transition) -> Result<LawReport> {
    first_law_report_with_tol(t, DEFAULT_IDENTITY_TOL)
}

pub fn first_law_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    ensure_entropy_preserving(t)?;
    ensure_marginal_thermal(&t.initial_second()?, &t.h_second, t.t_second)?;
    let ledger = TransitionLedger::compute(t)?;
    let temp = t.t_second;

    let heat_absorbed = temp * ledger.d_cond();
    let heat_dissipated = -heat_absorbed;
    let work_extractable = -(ledger.d_e_first() - temp * ledger.d_cond());
    let work_on_bath = ledger.d_e_second() - temp * ledger.d_s_second();

    let lhs = ledger.d_e_first();
    let rhs = -work_extractable + heat_absorbed;
    let residual = lhs - rhs;
    let slack = (-residual.abs()).min(work_on_bath);

    let mut q = BTreeMap::new();
    q.insert("delta_energy_system".into(), ledger.d_e_first());
    q.insert("delta_energy_bath".into(), ledger.d_e_second());
    insert_entropy(&mut q, "delta_entropy_system", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_bath", ledger.d_s_second());
    insert_entropy(&mut q, "delta_conditional_entropy", ledger.d_cond());
    insert_entropy(&mut q, "delta_mutual_information", ledger.d_mi());
    q.insert("heat_absorbed_by_system".into(), heat_absorbed);
    q.insert("heat_dissipated_to_bath".into(), heat_dissipated);
    q.insert(
        "heat_absorbed_by_system_energetic".into(),
        -ledger.d_e_second(),
    );
    q.insert("work_extractable_from_system".into(), work_extractable);
    q.insert("work_performed_on_bath".into(), work_on_bath);
    q.insert("identity_residual".into(), residual);

    let narrative = format!(
        "dE_S = {:+.9e} must equal -dW_S + dQ = {:+.9e}; \
         dW_S = {:+.9e}, heat_absorbed_by_system = {:+.9e}, \
         heat_dissipated_to_bath = {:+.9e}, dF_B = {:+.9e} (must be >= 0), \
         dS_B = {:+.9e} nats, dS(S|B) = {:+.9e} nats",
        lhs,
        rhs,
        work_extractable,
        heat_absorbed,
        heat_dissipated,
        work_on_bath,
        ledger.d_s_second(),
        ledger.d_cond(),
    );
    Ok(LawReport::build(
        Law::First,
        lhs,
        rhs,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Informational second law: `dS_B = -dS(S|B)` for entropy-preserving
/// transitions. The classical rendering `dS_B >= -dS_S` is evaluated
/// alongside and flagged when violated (expected for correlated initial
/// states); the verdict covers only the generalized equality.
pub fn info_second_law_report(t: &Transition) -> Result<LawReport> {
    info_second_law_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn info_second_law_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    let ledger = TransitionLedger::compute(t)?;
    let lhs = ledger.d_s_second();
    let rhs = -ledger.d_cond();
    let slack = -(lhs - rhs).abs();

    let classical_slack = ledger.d_s_second() + ledger.d_s_first();
    let classical_violated = classical_slack < -tol;

    let mut q = BTreeMap::new();
    insert_entropy(&mut q, "delta_entropy_system", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_bath", ledger.d_s_second());
    insert_entropy(&mut q, "delta_conditional_entropy", ledger.d_cond());
    insert_entropy(&mut q, "classical_form_slack", classical_slack);
    q.insert(
        "classical_form_violated".into(),
        if classical_violated { 1.0 } else { 0.0 },
    );
    q.insert("entropy_drift".into(), ledger.d_s_joint());

    let narrative = format!(
        "generalized form: dS_B = {:+.9e} vs -dS(S|B) = {:+.9e}; \
         classical form dS_B >= -dS_S has slack {:+.9e} nats and is {}",
        lhs,
        rhs,
        classical_slack,
        if classical_violated {
            "VIOLATED"
        } else {
            "respected"
        },
    );
    Ok(LawReport::build(
        Law::InfoSecond,
        lhs,
        rhs,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Generalized erasure bookkeeping: the heat absorbed by the system is
/// `T dS(S|B)`, cross-checked against the bath-entropy route `-T dS_B`.
/// For complete erasure (final system pure and decorrelated) the heat
/// must also equal `-T S(S|B)_initial`. The classical bound
/// `heat_dissipated >= -T dS_S` is evaluated and flagged, not enforced.
pub fn landauer_report(t: &Transition) -> Result<LawReport> {
    landauer_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn landauer_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    let ledger = TransitionLedger::compute(t)?;
    let temp = t.t_second;

    let heat_via_cond = temp * ledger.d_cond();
    let heat_via_bath = -temp * ledger.d_s_second();
    let mut slack = -(heat_via_cond - heat_via_bath).abs();

    let complete_erasure = ledger.s_first_final <= 1e-9 && ledger.mi_final.abs() <= 1e-9;
    let mut complete_erasure_residual = 0.0;
    if complete_erasure {
        let expected = -temp * ledger.cond_initial;
        complete_erasure_residual = heat_via_cond - expected;
        slack = slack.min(-complete_erasure_residual.abs());
    }

    let classic_slack = temp * ledger.d_s_second() + temp * ledger.d_s_first();
    let classic_violated = classic_slack < -tol;

    let mut q = BTreeMap::new();
    q.insert("heat_absorbed_by_system".into(), heat_via_cond);
    q.insert("heat_dissipated_to_bath".into(), -heat_via_cond);
    q.insert("heat_absorbed_via_bath_entropy".into(), heat_via_bath);
    insert_entropy(&mut q, "delta_entropy_system", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_bath", ledger.d_s_second());
    insert_entropy(&mut q, "delta_conditional_entropy", ledger.d_cond());
    insert_entropy(&mut q, "conditional_entropy_initial", ledger.cond_initial);
    q.insert(
        "complete_erasure".into(),
        if complete_erasure { 1.0 } else { 0.0 },
    );
    q.insert(
        "complete_erasure_residual".into(),
        complete_erasure_residual,
    );
    q.insert("classic_bound_slack".into(), classic_slack);
    q.insert(
        "classic_bound_violated".into(),
        if classic_violated { 1.0 } else { 0.0 },
    );

    let narrative = format!(
        "heat_absorbed_by_system = T dS(S|B) = {:+.9e} (bath-entropy route {:+.9e}); \
         heat_dissipated_to_bath = {:+.9e}; {} \
         classic bound (dissipated >= -T dS_S) slack = {:+.9e}, {}",
        heat_via_cond,
        heat_via_bath,
        -heat_via_cond,
        if complete_erasure {
            format!(
                "complete erasure: heat must equal -T S(S|B)_initial = {:+.9e}; ",
                -temp * ledger.cond_initial
            )
        } else {
            String::new()
        },
        classic_slack,
        if classic_violated {
            "VIOLATED"
        } else {
            "respected"
        },
    );
    Ok(LawReport::build(
        Law::LandauerGeneralized,
        heat_via_cond,
        heat_via_bath,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Classical erasure bound as a standalone verdict:
/// `heat_dissipated_to_bath >= -T dS_S`, i.e. `dS_B >= -dS_S`. For
/// erasure processes on initially uncorrelated states this is the usual
/// statement that erasing entropy costs at least that much dissipated
/// heat; correlated initial states can and do break it.
pub fn classic_landauer_report(t: &Transition) -> Result<LawReport> {
    classic_landauer_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn classic_landauer_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    let ledger = TransitionLedger::compute(t)?;
    let temp = t.t_second;
    let lhs = temp * ledger.d_s_second();
    let rhs = -temp * ledger.d_s_first();
    let slack = lhs - rhs;

    let mut q = BTreeMap::new();
    q.insert("heat_dissipated_to_bath".into(), lhs);
    q.insert("required_dissipation".into(), rhs);
    insert_entropy(&mut q, "delta_entropy_system", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_bath", ledger.d_s_second());

    let narrative = format!(
        "heat_dissipated_to_bath = {:+.9e} must cover -T dS_S = {:+.9e}; slack {:+.9e}",
        lhs, rhs, slack,
    );
    Ok(LawReport::build(
        Law::LandauerClassic,
        lhs,
        rhs,
        slack,
        tol,
        q,
        narrative,
    ))
}

fn two_bath_preconditions(t: &Transition) -> Result<(f64, f64, TransitionLedger, f64)> {
    let t_a = t.t_first.ok_or(Error::MissingFirstTemperature)?;
    let t_b = t.t_second;
    ensure_entropy_preserving(t)?;
    ensure_marginal_thermal(&t.initial_first()?, &t.h_first, t_a)?;
    ensure_marginal_thermal(&t.initial_second()?, &t.h_second, t_b)?;
    let energy_drift = t.total_energy_change()?;
    if energy_drift > DEFAULT_IDENTITY_TOL {
        return Err(Error::EnergyIncrease {
            delta: energy_drift,
            tol: DEFAULT_IDENTITY_TOL,
        });
    }
    let ledger = TransitionLedger::compute(t)?;
    Ok((t_a, t_b, ledger, energy_drift))
}

/// Generalized Clausius statement for two initially thermal baths:
/// `-dQ_A (T_B - T_A) >= T_A T_B dI(A:B)` with `dQ_A = -T_A dS_A` the
/// heat extracted from the first bath. A positive `dQ_A` with
/// `T_A < T_B` is flagged as an anomalous (cold-to-hot) flow; it is
/// admissible exactly when correlations are consumed (`dI < 0`).
pub fn clausius_report(t: &Transition) -> Result<LawReport> {
    clausius_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn clausius_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    let (t_a, t_b, ledger, energy_drift) = two_bath_preconditions(t)?;

    let dq_a = -t_a * ledger.d_s_first();
    let d_mi = ledger.d_mi();
    let lhs = -dq_a * (t_b - t_a);
    let rhs = t_a * t_b * d_mi;
    let slack = lhs - rhs;
    let anomalous = dq_a > ANOMALY_THRESHOLD && t_a < t_b;
    let energy_preserving = energy_drift.abs() <= DEFAULT_IDENTITY_TOL;

    let mut q = BTreeMap::new();
    q.insert("heat_extracted_from_first".into(), dq_a);
    insert_entropy(&mut q, "delta_entropy_first", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_second", ledger.d_s_second());
    insert_entropy(&mut q, "delta_mutual_information", d_mi);
    q.insert("total_energy_drift".into(), energy_drift);
    q.insert(
        "energy_preserving".into(),
        if energy_preserving { 1.0 } else { 0.0 },
    );
    q.insert(
        "anomalous_heat_flow".into(),
        if anomalous { 1.0 } else { 0.0 },
    );

    let narrative = format!(
        "-dQ_A (T_B - T_A) = {:+.9e} must dominate T_A T_B dI = {:+.9e}; \
         dQ_A = {:+.9e}, dI = {:+.9e} nats, total energy drift {:+.3e} \
         (map is {}); anomalous cold-to-hot flow: {}",
        lhs,
        rhs,
        dq_a,
        d_mi,
        energy_drift,
        if energy_preserving {
            "energy preserving"
        } else {
            "energy non-increasing"
        },
        if anomalous { "YES" } else { "no" },
    );
    Ok(LawReport::build(
        Law::ClausiusGeneralized,
        lhs,
        rhs,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Coefficient of performance of the correlation-driven refrigerator:
/// `eta = dQ_A / (-T_B dI)`, bounded by the Carnot value
/// `T_A / (T_B - T_A)`. Requires correlations to be consumed; when `dI`
/// is not below `-`[`COP_FEASIBILITY_CUT`] the ratio is signaled as
/// undefined rather than reported as zero.
pub fn cop_report(t: &Transition) -> Result<LawReport> {
    cop_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn cop_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    let (t_a, t_b, ledger, _) = two_bath_preconditions(t)?;
    if t_b <= t_a {
        return Err(Error::ScenarioConstraint {
            reason: format!(
                "refrigeration benchmark needs T_first < T_second, got {t_a} and {t_b}"
            ),
        });
    }
    let d_mi = ledger.d_mi();
    if d_mi >= -COP_FEASIBILITY_CUT {
        return Err(Error::CopUndefined {
            delta_i: d_mi,
            cut: COP_FEASIBILITY_CUT,
        });
    }
    let dq_a = -t_a * ledger.d_s_first();
    let work_from_correlations = -t_b * d_mi;
    let eta = dq_a / work_from_correlations;
    let bound = t_a / (t_b - t_a);
    let slack = bound - eta;

    let mut q = BTreeMap::new();
    q.insert("cop".into(), eta);
    q.insert("carnot_bound".into(), bound);
    q.insert("heat_extracted_from_first".into(), dq_a);
    q.insert(
        "work_drawn_from_correlations".into(),
        work_from_correlations,
    );
    insert_entropy(&mut q, "delta_mutual_information", d_mi);

    let narrative = format!(
        "eta = dQ_A / (-T_B dI) = {:+.9e} must not exceed Carnot bound \
         T_A/(T_B - T_A) = {:+.9e}; dQ_A = {:+.9e}, work drawn from \
         correlations = {:+.9e}",
        eta, bound, dq_a, work_from_correlations,
    );
    Ok(LawReport::build(
        Law::Cop,
        bound,
        eta,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Heat-definition chain on initially uncorrelated transitions:
/// `-dE_B <= -T dS_B <= T dS_S`. The first deficit is the work stored in
/// the bath (`dF_B`), the second the correlations built up (`T dI`);
/// both must come out non-negative.
pub fn clausius_chain_report(t: &Transition) -> Result<LawReport> {
    clausius_chain_report_with_tol(t, DEFAULT_LAW_TOL)
}

pub fn clausius_chain_report_with_tol(t: &Transition, tol: f64) -> Result<LawReport> {
    ensure_entropy_preserving(t)?;
    ensure_marginal_thermal(&t.initial_second()?, &t.h_second, t.t_second)?;
    let product = t.initial_first()?.product(&t.initial_second()?)?;
    let distance = thermo::trace_distance(&t.initial, &product)?;
    if distance > THERMALITY_TOL {
        return Err(Error::CorrelatedInitialState { distance });
    }

    let ledger = TransitionLedger::compute(t)?;
    let temp = t.t_second;
    let heat_energetic = -ledger.d_e_second();
    let heat_entropic = -temp * ledger.d_s_second();
    let system_bound = temp * ledger.d_s_first();

    let deficit_bath_free_energy = heat_entropic - heat_energetic;
    let deficit_correlation = system_bound - heat_entropic;
    let slack = deficit_bath_free_energy.min(deficit_correlation);

    let mut q = BTreeMap::new();
    q.insert("heat_absorbed_by_system_energetic".into(), heat_energetic);
    q.insert("heat_absorbed_by_system".into(), heat_entropic);
    q.insert("heat_dissipated_to_bath".into(), -heat_entropic);
    q.insert("system_entropy_bound".into(), system_bound);
    q.insert("deficit_bath_free_energy".into(), deficit_bath_free_energy);
    q.insert("deficit_correlation".into(), deficit_correlation);
    insert_entropy(&mut q, "delta_entropy_system", ledger.d_s_first());
    insert_entropy(&mut q, "delta_entropy_bath", ledger.d_s_second());
    insert_entropy(&mut q, "delta_mutual_information", ledger.d_mi());

    let narrative = format!(
        "chain -dE_B <= -T dS_B <= T dS_S: {:+.9e} <= {:+.9e} <= {:+.9e}; \
         deficits dF_B = {:+.9e} and T dI = {:+.9e} (both must be >= 0)",
        heat_energetic, heat_entropic, system_bound, deficit_bath_free_energy, deficit_correlation,
    );
    Ok(LawReport::build(
        Law::ClausiusChain,
        heat_energetic,
        system_bound,
        slack,
        tol,
        q,
        narrative,
    ))
}

/// Why a collection of parties fails to be in mutual thermal equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum EquilibriumFailure {
    /// The joint state is not the product of its marginals.
    CorrelationsPresent { distance: f64 },
    /// A marginal is not thermal at any temperature.
    MarginalNotThermal { party: usize, distance: f64 },
    /// A marginal is thermal, but at a different temperature than asked.
    TemperatureMismatch { party: usize, fitted: f64 },
}

/// Verdict of the mutual-equilibrium test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumVerdict {
    pub in_equilibrium: bool,
    pub reasons: Vec<EquilibriumFailure>,
    /// `T` times the total correlation (multi-information): the work that
    /// entropy-preserving operations can draw from the collection.
    pub work_witness: EnergyValue,
}

fn party_marginal(rho: &DensityMatrix, dims: &[usize], party: usize) -> Result<DensityMatrix> {
    match (dims.len(), party) {
        (1, 0) => Ok(rho.clone()),
        (2, 0) => rho.marginal(BipartiteLayout::new(dims[0], dims[1]), Keep::First),
        (2, 1) => rho.marginal(BipartiteLayout::new(dims[0], dims[1]), Keep::Second),
        (3, 0) => rho.marginal(
            BipartiteLayout::new(dims[0], dims[1] * dims[2]),
            Keep::First,
        ),
        (3, 1) => rho
            .marginal(
                BipartiteLayout::new(dims[0], dims[1] * dims[2]),
                Keep::Second,
            )?
            .marginal(BipartiteLayout::new(dims[1], dims[2]), Keep::First),
        (3, 2) => rho.marginal(
            BipartiteLayout::new(dims[0] * dims[1], dims[2]),
            Keep::Second,
        ),
        _ => Err(Error::PartyCount {
            max: 3,
            actual: dims.len(),
        }),
    }
}

/// Fits a temperature to a marginal by matching internal energy (which is
/// monotone in temperature), then accepts it only if the fitted Gibbs
/// state is within trace distance [`THERMALITY_TOL`].
fn fit_temperature(h: &Hamiltonian, rho: &DensityMatrix) -> Result<Option<f64>> {
    let e_target = thermo::internal_energy(rho, h)?.value;
    let spectrum = crate::linalg::herm_eig(h.matrix())?;
    let e_min = *spectrum.eigenvalues.last().expect("non-empty spectrum");
    let e_mean = spectrum.eigenvalues.iter().sum::<f64>() / spectrum.eigenvalues.len() as f64;
    if e_target <= e_min + 1e-12 || e_target >= e_mean - 1e-12 {
        return Ok(None);
    }
    let mut lo = 1e-9f64;
    let mut hi = 1e9f64;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let e_mid = thermo::internal_energy(&gibbs(h, mid)?, h)?.value;
        if e_mid < e_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let fitted = (lo * hi).sqrt();
    let distance = thermo::trace_distance(&gibbs(h, fitted)?, rho)?;
    Ok((distance <= THERMALITY_TOL).then_some(fitted))
}

/// Mutual thermal equilibrium of up to three parties: every marginal must
/// be thermal at the reference temperature and the joint state must carry
/// no correlations. The work witness `T * (sum_X S_X - S_joint)` is
/// reported either way.
pub fn zeroth_law_check(
    rho: &DensityMatrix,
    dims: &[usize],
    hamiltonians: &[Hamiltonian],
    temperature: f64,
) -> Result<EquilibriumVerdict> {
    if dims.is_empty() || dims.len() > 3 {
        return Err(Error::PartyCount {
            max: 3,
            actual: dims.len(),
        });
    }
    if hamiltonians.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            actual: hamiltonians.len(),
        });
    }
    let joint_dim: usize = dims.iter().product();
    if joint_dim > DIM_CAP {
        return Err(Error::DimensionOverflow {
            dim: joint_dim,
            cap: DIM_CAP,
        });
    }
    if joint_dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: joint_dim,
            actual: rho.dim(),
        });
    }
    for (k, h) in hamiltonians.iter().enumerate() {
        if h.dim() != dims[k] {
            return Err(Error::DimensionMismatch {
                expected: dims[k],
                actual: h.dim(),
            });
        }
    }

    let mut reasons = Vec::new();
    let mut marginals = Vec::with_capacity(dims.len());
    for (party, h) in hamiltonians.iter().enumerate() {
        let marginal = party_marginal(rho, dims, party)?;
        let reference = gibbs(h, temperature)?;
        let distance = thermo::trace_distance(&marginal, &reference)?;
        if distance > THERMALITY_TOL {
            match fit_temperature(h, &marginal)? {
                Some(fitted) => {
                    reasons.push(EquilibriumFailure::TemperatureMismatch { party, fitted })
                }
                None => reasons.push(EquilibriumFailure::MarginalNotThermal { party, distance }),
            }
        }
        marginals.push(marginal);
    }

    let mut product = marginals[0].clone();
    for marginal in &marginals[1..] {
        product = product.product(marginal)?;
    }
    let product_distance = thermo::trace_distance(rho, &product)?;
    if product_distance > THERMALITY_TOL {
        reasons.push(EquilibriumFailure::CorrelationsPresent {
            distance: product_distance,
        });
    }

    let mut multi_information = -thermo::entropy(rho)?.nats;
    for marginal in &marginals {
        multi_information += thermo::entropy(marginal)?.nats;
    }

    Ok(EquilibriumVerdict {
        in_equilibrium: reasons.is_empty(),
        reasons,
        work_witness: EnergyValue::new(temperature * multi_information),
    })
}

/// Wraps [`zeroth_law_check`] into a [`LawReport`] whose verdict is the
/// internal consistency of the work witness: `T` times the total
/// correlation must equal the joint-vs-product free-energy difference.
pub fn zeroth_report(
    rho: &DensityMatrix,
    dims: &[usize],
    hamiltonians: &[Hamiltonian],
    temperature: f64,
) -> Result<LawReport> {
    zeroth_report_with_tol(rho, dims, hamiltonians, temperature, DEFAULT_IDENTITY_TOL)
}

pub fn zeroth_report_with_tol(
    rho: &DensityMatrix,
    dims: &[usize],
    hamiltonians: &[Hamiltonian],
    temperature: f64,
    tol: f64,
) -> Result<LawReport> {
    let verdict = zeroth_law_check(rho, dims, hamiltonians, temperature)?;

    // Independent route: F(joint) - sum_X F(marginal_X).
    let mut h_total = hamiltonians[0].clone();
    for h in &hamiltonians[1..] {
        h_total = h_total.joint_with(h)?;
    }
    let f_joint = thermo::free_energy(rho, &h_total, temperature)?.value;
    let mut f_product = 0.0;
    for (party, h) in hamiltonians.iter().enumerate() {
        let marginal = party_marginal(rho, dims, party)?;
        f_product += thermo::free_energy(&marginal, h, temperature)?.value;
    }
    let free_energy_route = f_joint - f_product;

    let lhs = verdict.work_witness.value;
    let rhs = free_energy_route;
    let slack = -(lhs - rhs).abs();

    let mut q = BTreeMap::new();
    q.insert("work_witness".into(), lhs);
    q.insert("free_energy_excess".into(), rhs);
    q.insert(
        "in_equilibrium".into(),
        if verdict.in_equilibrium { 1.0 } else { 0.0 },
    );
    insert_entropy(&mut q, "multi_information", lhs / temperature);

    let narrative = format!(
        "work witness T * I_total = {:+.9e} vs free-energy excess \
         F(joint) - sum F(marginals) = {:+.9e}; collection is {}: {:?}",
        lhs,
        rhs,
        if verdict.in_equilibrium {
            "in mutual equilibrium"
        } else {
            "NOT in equilibrium"
        },
        verdict.reasons,
    );
    Ok(LawReport::build(
        Law::Zeroth,
        lhs,
        rhs,
        slack,
        tol,
        q,
        narrative,
    ))
}
