//! Bipartition-local reduction of a connected hypergraph state to an
//! elementary one, `|G_κ^μ⟩ ⊗ |q_1⟩ ⋯ |q_{n−κ}⟩`.
//!
//! The working hypergraph keeps its original labels throughout: a measured
//! qudit stays in the vertex set, isolated, so every snapshot in a trace is
//! directly comparable with the input and the bipartition never needs
//! relabelling. Each round:
//!
//! 1. select the largest crossing edge `e` (lexicographic tie-break);
//! 2. measure every live vertex outside `e`, ascending;
//! 3. remove each crossing `e ∖ {k}` with `(X_k^†)^q`, or, if one cannot be
//!    removed, measure that `k` and restart;
//! 4. delete non-crossing edges with local controlled-`Z` gates;
//! 5. stop if `e` is alone, otherwise measure the smallest vertex of `e`
//!    outside the largest remaining crossing edge, prune other components,
//!    and restart.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{lower_bound, max_common_divisor, tighter_lower_bound, BoundSpec};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{
    random_connected, Bipartition, Edge, MultiHypergraph, RandomHypergraphOptions,
};
use crate::modarith::solve_linear_congruence;
use crate::statevec::{
    bipartite_entanglement, build_state, multipartite_entanglement, Caps, AMPLITUDE_TOL,
};

/// Slack allowed when comparing entanglement values.
pub const MONOTONE_TOL: f64 = 1e-9;
pub const DEFAULT_BRANCH_CAP: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    SelectEdge,
    MeasureOutside,
    RemoveXdagger,
    MeasureIrremovable,
    RemoveInternalCz,
    MeasureInner,
    PruneDisconnected,
}

impl StepKind {
    pub fn is_measurement(self) -> bool {
        matches!(
            self,
            Self::MeasureOutside
                | Self::MeasureIrremovable
                | Self::MeasureInner
                | Self::PruneDisconnected
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SelectEdge => "select-edge",
            Self::MeasureOutside => "measure-outside",
            Self::RemoveXdagger => "remove-xdagger",
            Self::MeasureIrremovable => "measure-irremovable",
            Self::RemoveInternalCz => "remove-internal-cz",
            Self::MeasureInner => "measure-inner",
            Self::PruneDisconnected => "prune-disconnected",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    /// Measured qudit, or the `k` of an `X_k^†`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    /// Selected edge, the edge removed by `X^†`, or the edge cancelled by `Z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<u64>,
    /// Gate power for `X^†` and `Z` steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<u64>,
    /// State after the step; measured qudits remain as isolated vertices.
    pub hypergraph: MultiHypergraph,
}

impl ReductionStep {
    fn new(kind: StepKind, hypergraph: &MultiHypergraph) -> Self {
        Self {
            kind,
            vertex: None,
            edge: None,
            outcome: None,
            times: None,
            hypergraph: hypergraph.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub qudit: usize,
    pub outcome: u64,
}

/// `|G_κ^μ⟩` on `edge`, with the other qudits left in the recorded basis states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalState {
    pub kappa: usize,
    pub mu: u64,
    pub edge: Edge,
    pub outcomes: Vec<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub input: MultiHypergraph,
    pub bipartition: Bipartition,
    pub steps: Vec<ReductionStep>,
    #[serde(rename = "final")]
    pub final_state: FinalState,
}

impl ReductionTrace {
    pub fn final_hypergraph(&self) -> &MultiHypergraph {
        self.steps.last().map_or(&self.input, |s| &s.hypergraph)
    }

    /// The final state restricted to the surviving edge, relabelled to `1..=κ`.
    pub fn final_elementary(&self) -> Result<MultiHypergraph> {
        MultiHypergraph::elementary(self.input.d(), self.final_state.kappa, self.final_state.mu)
    }

    /// Restarts, i.e. how many times an edge was selected.
    pub fn rounds(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::SelectEdge)
            .count()
    }

    pub fn measurements(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind.is_measurement())
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomePolicy {
    /// Every measurement reports `q` (reduced mod `d`).
    Fixed(u64),
    /// Outcomes drawn uniformly from a ChaCha stream.
    SeededRandom(u64),
}

impl Default for OutcomePolicy {
    fn default() -> Self {
        Self::Fixed(1)
    }
}

trait OutcomeSource {
    fn next(&mut self, d: u64) -> u64;
}

struct FixedSource(u64);

impl OutcomeSource for FixedSource {
    fn next(&mut self, d: u64) -> u64 {
        self.0 % d
    }
}

struct RandomSource(ChaCha8Rng);

impl OutcomeSource for RandomSource {
    fn next(&mut self, d: u64) -> u64 {
        self.0.random_range(0..d)
    }
}

/// Follows `prefix`, then answers 0; records what it handed out.
struct ReplaySource {
    prefix: Vec<u64>,
    taken: Vec<u64>,
    arities: Vec<u64>,
}

impl OutcomeSource for ReplaySource {
    fn next(&mut self, d: u64) -> u64 {
        let q = self.prefix.get(self.taken.len()).copied().unwrap_or(0);
        self.taken.push(q);
        self.arities.push(d);
        q
    }
}

/// `q` with `m_f + q·m_e ≡ 0 (mod d)`, so that `(X_k^†)^q` cancels
/// `f = e ∖ {k}`; `None` when no such `q` exists.
pub fn try_remove_cardinality_minus_one(
    h: &MultiHypergraph,
    e: &Edge,
    f: &Edge,
) -> Result<Option<(usize, u64)>> {
    let k = match e.vertices().iter().find(|&&v| !f.contains(v)) {
        Some(&k) if f.is_subset_of(e) && f.len() + 1 == e.len() => k,
        _ => return invalid(format!("{f} is not {e} minus one vertex")),
    };
    let (me, mf) = (h.multiplicity(e), h.multiplicity(f));
    if me == 0 || mf == 0 {
        return invalid(format!("both {e} and {f} must be present"));
    }
    Ok(solve_linear_congruence(me, mf, h.d()).map(|q| (k, q)))
}

struct Runner<'a> {
    b: &'a Bipartition,
    h: MultiHypergraph,
    measured: BTreeSet<usize>,
    outcomes: Vec<Outcome>,
    steps: Vec<ReductionStep>,
    source: &'a mut dyn OutcomeSource,
}

impl Runner<'_> {
    fn measure(&mut self, v: usize, kind: StepKind) -> Result<()> {
        let q = self.source.next(self.h.d());
        self.h = self.h.project_z(v, q)?;
        self.measured.insert(v);
        self.outcomes.push(Outcome {
            qudit: v,
            outcome: q,
        });
        let mut step = ReductionStep::new(kind, &self.h);
        step.vertex = Some(v);
        step.outcome = Some(q);
        self.steps.push(step);
        Ok(())
    }

    fn largest_crossing(&self) -> Result<Option<(Edge, u64)>> {
        Ok(self.h.crossing_edges(self.b)?.into_iter().next())
    }

    /// Removes every edge outside the component of `keep`, one measurement
    /// per offending edge, smallest vertex first.
    fn prune(&mut self, keep: &Edge) -> Result<()> {
        loop {
            let component: BTreeSet<usize> = self
                .h
                .components()
                .into_iter()
                .find(|c| c.contains(&keep.vertices()[0]))
                .unwrap_or_default()
                .into_iter()
                .collect();
            let next = self
                .h
                .edges()
                .filter(|(g, _)| !g.vertices().iter().any(|v| component.contains(v)))
                .map(|(g, _)| g.vertices()[0])
                .min();
            match next {
                Some(v) => self.measure(v, StepKind::PruneDisconnected)?,
                None => return Ok(()),
            }
        }
    }

    fn run(mut self, input: &MultiHypergraph) -> Result<ReductionTrace> {
        let d = self.h.d();
        let n = self.h.n();
        let k_max = input.k_max();
        let mut previous: Option<usize> = None;
        while self.h.edge_count() > 1 {
            let (e, _) = self
                .largest_crossing()?
                .ok_or_else(|| Error::PolicyExhausted("no crossing edge left".into()))?;
            if previous.is_some_and(|kappa| e.len() >= kappa) {
                return Err(Error::PolicyExhausted(format!(
                    "selected edge {e} did not shrink below cardinality {}",
                    previous.unwrap()
                )));
            }
            previous = Some(e.len());
            let mut step = ReductionStep::new(StepKind::SelectEdge, &self.h);
            step.edge = Some(e.clone());
            self.steps.push(step);

            for v in 1..=n {
                if !self.measured.contains(&v) && !e.contains(v) {
                    self.measure(v, StepKind::MeasureOutside)?;
                }
            }

            let mut removals = Vec::new();
            let mut blocked = None;
            for &k in e.vertices() {
                let f = e
                    .without(k)
                    .expect("selected edge crosses, so has >= 2 vertices");
                if !self.b.crosses(&f) || self.h.multiplicity(&f) == 0 {
                    continue;
                }
                match try_remove_cardinality_minus_one(&self.h, &e, &f)? {
                    Some(found) => removals.push(found),
                    None => {
                        blocked = Some(k);
                        break;
                    }
                }
            }
            if let Some(k) = blocked {
                self.measure(k, StepKind::MeasureIrremovable)?;
                continue;
            }
            for (k, q) in removals {
                self.h = self.h.apply_x_dagger(k, q)?;
                let mut step = ReductionStep::new(StepKind::RemoveXdagger, &self.h);
                step.vertex = Some(k);
                step.edge = e.without(k);
                step.times = Some(q);
                self.steps.push(step);
            }

            let internal: Vec<(Edge, u64)> = self
                .h
                .edges()
                .filter(|(g, _)| **g != e && !self.b.crosses(g))
                .map(|(g, m)| (g.clone(), m))
                .collect();
            for (g, m) in internal {
                self.h = self.h.apply_controlled_z(&g, d - m)?;
                let mut step = ReductionStep::new(StepKind::RemoveInternalCz, &self.h);
                step.edge = Some(g);
                step.times = Some(d - m);
                self.steps.push(step);
            }

            if self.h.edge_count() == 1 {
                break;
            }
            let f = self
                .h
                .crossing_edges(self.b)?
                .into_iter()
                .map(|(g, _)| g)
                .find(|g| *g != e)
                .ok_or_else(|| {
                    Error::PolicyExhausted("extra edges survived but none cross".into())
                })?;
            let k = *e
                .vertices()
                .iter()
                .find(|&&v| !f.contains(v))
                .ok_or_else(|| Error::PolicyExhausted(format!("{f} is not inside {e}")))?;
            self.measure(k, StepKind::MeasureInner)?;
            let (next, _) = self.largest_crossing()?.ok_or_else(|| {
                Error::PolicyExhausted("no crossing edge after inner measurement".into())
            })?;
            self.prune(&next)?;
        }

        let (edge, mu) = self
            .h
            .sole_edge()
            .map(|(e, m)| (e.clone(), m))
            .ok_or_else(|| Error::PolicyExhausted("reduction ended without an edge".into()))?;
        if !self.b.crosses(&edge) || edge.len() < 2 || edge.len() > k_max {
            return Err(Error::PolicyExhausted(format!(
                "final edge {edge} violates the elementary crossing form"
            )));
        }
        Ok(ReductionTrace {
            input: input.clone(),
            bipartition: self.b.clone(),
            steps: self.steps,
            final_state: FinalState {
                kappa: edge.len(),
                mu,
                edge,
                outcomes: self.outcomes,
            },
        })
    }
}

fn run_with(
    h: &MultiHypergraph,
    b: &Bipartition,
    source: &mut dyn OutcomeSource,
) -> Result<ReductionTrace> {
    if b.n() != h.n() {
        return invalid(format!(
            "bipartition is over {} qudits, state has {}",
            b.n(),
            h.n()
        ));
    }
    if h.n() < 2 || !h.is_connected() {
        return Err(Error::Disconnected);
    }
    if h.crossing_edges(b)?.is_empty() {
        return Err(Error::NoCrossingEdge);
    }
    Runner {
        b,
        h: h.clone(),
        measured: BTreeSet::new(),
        outcomes: Vec::new(),
        steps: Vec::new(),
        source,
    }
    .run(h)
}

/// Reduces `h` to an elementary state crossing `b`, drawing measurement
/// outcomes from `policy`.
pub fn reduce(
    h: &MultiHypergraph,
    b: &Bipartition,
    policy: OutcomePolicy,
) -> Result<ReductionTrace> {
    match policy {
        OutcomePolicy::Fixed(q) => run_with(h, b, &mut FixedSource(q)),
        OutcomePolicy::SeededRandom(seed) => {
            run_with(h, b, &mut RandomSource(ChaCha8Rng::seed_from_u64(seed)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub outcomes: Vec<u64>,
    /// Every Z measurement of a hypergraph state is uniform, so this is
    /// `d^{-#measurements}`.
    pub probability: BigRational,
    pub trace: ReductionTrace,
}

/// Runs the reduction once per sequence of measurement outcomes, in
/// lexicographic order of the sequences.
pub fn reduce_all_outcomes(
    h: &MultiHypergraph,
    b: &Bipartition,
    max_branches: usize,
) -> Result<Vec<Branch>> {
    let d = h.d();
    let mut branches = Vec::new();
    let mut prefix = Vec::new();
    loop {
        let mut source = ReplaySource {
            prefix,
            taken: Vec::new(),
            arities: Vec::new(),
        };
        let trace = run_with(h, b, &mut source)?;
        if branches.len() == max_branches {
            return Err(Error::CapExceeded {
                what: "outcome branches",
                needed: max_branches as u128 + 1,
                cap: max_branches as u128,
            });
        }
        let depth = source.taken.len();
        branches.push(Branch {
            outcomes: source.taken.clone(),
            probability: BigRational::new(BigInt::one(), BigInt::from(d).pow(depth as u32)),
            trace,
        });
        let (mut next, arities) = (source.taken, source.arities);
        while let Some(last) = next.pop() {
            if last + 1 < arities[next.len()] {
                next.push(last + 1);
                break;
            }
        }
        if next.is_empty() {
            return Ok(branches);
        }
        prefix = next;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub step: usize,
    pub kind: StepKind,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    /// `E^{AB}` of the input, then after each step.
    pub values: Vec<f64>,
    pub violations: Vec<Violation>,
    /// Steps whose rewrite disagrees with the numeric transformation.
    pub rewrite_mismatches: Vec<usize>,
    /// Measurement steps whose outcome probability is not `1/d`.
    pub probability_defects: Vec<usize>,
    /// `E^{AB}` of `G_κ^μ` across the induced split, computed afresh.
    pub final_elementary: f64,
}

impl MonotoneReport {
    pub fn final_matches(&self) -> bool {
        (self.values.last().copied().unwrap_or(f64::NAN) - self.final_elementary).abs()
            <= MONOTONE_TOL
    }

    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.is_monotone()
            && self.rewrite_mismatches.is_empty()
            && self.probability_defects.is_empty()
            && self.final_matches()
    }
}

/// The live part of a snapshot: unmeasured qudits, relabelled, with the
/// induced bipartition.
struct Live {
    h: MultiHypergraph,
    b: Option<Bipartition>,
    relabel: std::collections::BTreeMap<usize, usize>,
}

fn live(h: &MultiHypergraph, b: &Bipartition, measured: &BTreeSet<usize>) -> Result<Live> {
    let kept: Vec<usize> = (1..=h.n()).filter(|v| !measured.contains(v)).collect();
    let (g, relabel) = h.induced(&kept)?;
    Ok(Live {
        h: g,
        b: b.restrict(&kept),
        relabel,
    })
}

fn split_entanglement(l: &Live, caps: &Caps) -> Result<f64> {
    match &l.b {
        Some(b) => bipartite_entanglement(&build_state(&l.h, caps)?, b, caps),
        None => Ok(0.0),
    }
}

/// Recomputes `E^{AB}` on the surviving qudits after every step and checks
/// that no step increases it, that each rewrite agrees with the numeric
/// gate or projection, and that every outcome has probability `1/d`.
pub fn verify_trace_monotone(trace: &ReductionTrace, caps: &Caps) -> Result<MonotoneReport> {
    let b = &trace.bipartition;
    let d = trace.input.d();
    let mut measured = BTreeSet::new();
    let mut current = live(&trace.input, b, &measured)?;
    let mut values = vec![split_entanglement(&current, caps)?];
    let mut violations = Vec::new();
    let mut rewrite_mismatches = Vec::new();
    let mut probability_defects = Vec::new();

    for (i, step) in trace.steps.iter().enumerate() {
        let before = build_state(&current.h, caps)?;
        let expected = match step.kind {
            StepKind::SelectEdge => Some(before.clone()),
            StepKind::RemoveXdagger => {
                let k = step.vertex.and_then(|v| current.relabel.get(&v).copied());
                match (k, step.times) {
                    (Some(k), Some(q)) => Some(before.apply_x_dagger(k, q)?),
                    _ => None,
                }
            }
            StepKind::RemoveInternalCz => {
                let edge: Option<Vec<usize>> = step.edge.as_ref().and_then(|e| {
                    e.vertices()
                        .iter()
                        .map(|v| current.relabel.get(v).copied())
                        .collect()
                });
                match (edge, step.times) {
                    (Some(e), Some(t)) => Some(before.apply_controlled_phase(&e, t)?),
                    _ => None,
                }
            }
            _ => {
                let k = step.vertex.and_then(|v| current.relabel.get(&v).copied());
                match (k, step.outcome) {
                    (Some(k), Some(q)) if before.n() >= 2 => {
                        let (p, post) = before.condition(k, q)?;
                        if (p - 1.0 / d as f64).abs() > MONOTONE_TOL {
                            probability_defects.push(i);
                        }
                        measured.insert(step.vertex.unwrap());
                        post
                    }
                    _ => None,
                }
            }
        };
        let next = live(&step.hypergraph, b, &measured)?;
        let after_state = build_state(&next.h, caps)?;
        match expected {
            Some(psi) if psi.approx_eq_up_to_phase(&after_state, AMPLITUDE_TOL) => {}
            _ => rewrite_mismatches.push(i),
        }
        let after = split_entanglement(&next, caps)?;
        let prev = *values.last().unwrap();
        if after > prev + MONOTONE_TOL {
            violations.push(Violation {
                step: i,
                kind: step.kind,
                before: prev,
                after,
            });
        }
        values.push(after);
        current = next;
    }

    let fin = &trace.final_state;
    let kept: Vec<usize> = fin.edge.vertices().to_vec();
    let final_elementary = match b.restrict(&kept) {
        Some(split) => bipartite_entanglement(
            &build_state(&MultiHypergraph::elementary(d, fin.kappa, fin.mu)?, caps)?,
            &split,
            caps,
        )?,
        None => 0.0,
    };
    Ok(MonotoneReport {
        values,
        violations,
        rewrite_mismatches,
        probability_defects,
        final_elementary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub hypergraph: MultiHypergraph,
    pub k_max: usize,
    pub entanglement: f64,
    pub lower_bound: f64,
    pub m_star: u64,
    /// Only when `m* > 1`.
    pub tighter_bound: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub checks: Vec<BoundCheck>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Compares the numeric multipartite entanglement of a connected state with
/// the closed-form bounds for its `k_max` and common divisor.
pub fn bound_check(h: &MultiHypergraph, caps: &Caps) -> Result<BoundCheck> {
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let k_max = h.k_max();
    let bound = to_f64(&lower_bound(h.d(), k_max as u32)?);
    let m_star = max_common_divisor(h)?;
    let tighter = if m_star > 1 {
        Some(to_f64(&tighter_lower_bound(&BoundSpec::new(
            h.d(),
            k_max as u32,
            m_star,
        )?)?))
    } else {
        None
    };
    let e = multipartite_entanglement(&build_state(h, caps)?, caps)?.entanglement();
    let passed = e >= bound - MONOTONE_TOL && tighter.is_none_or(|t| e >= t - MONOTONE_TOL);
    Ok(BoundCheck {
        hypergraph: h.clone(),
        k_max,
        entanglement: e,
        lower_bound: bound,
        m_star,
        tighter_bound: tighter,
        passed,
    })
}

/// Checks `h` and `trials` random connected hypergraphs of the same `d`
/// and `n`, sampled from `seed`.
pub fn check_lower_bound(
    h: &MultiHypergraph,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<LowerBoundReport> {
    let mut checks = vec![bound_check(h, caps)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = RandomHypergraphOptions::default();
    for _ in 0..trials {
        let g = random_connected(h.d(), h.n(), &mut rng, &opts)?;
        checks.push(bound_check(&g, caps)?);
    }
    Ok(LowerBoundReport { checks })
}

/// `trials` random connected hypergraphs on `Z_d`, each with `n` drawn
/// uniformly from `n_range`, checked against the bounds. Sampling is
/// sequential so the set of states depends only on `seed`.
pub fn sample_bound_checks(
    d: u64,
    n_range: RangeInclusive<usize>,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<LowerBoundReport> {
    if n_range.is_empty() || *n_range.start() < 2 {
        return invalid(format!("sample sizes {n_range:?} must be >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = RandomHypergraphOptions::default();
    let samples: Vec<MultiHypergraph> = (0..trials)
        .map(|_| {
            let n = rng.random_range(n_range.clone());
            random_connected(d, n, &mut rng, &opts)
        })
        .collect::<Result<_>>()?;
    let checks = samples
        .par_iter()
        .map(|h| bound_check(h, caps))
        .collect::<Result<_>>()?;
    Ok(LowerBoundReport { checks })
}
