//! The bound engine: memoized recursion over canonical forms, driven by the
//! rule registry, plus the named single-step operations and the top-level
//! pipelines.
//!
//! Entries are cached in canonical coordinates and translated back through
//! the isomorphism on every hit, so isomorphic subproblems are solved once.
//! Matchings are materialized on demand by replaying the same (deterministic)
//! plan selection, which keeps the critical-cell count of the explicit
//! matching equal to the recursively computed bound.

use super::rules::{Plan, Registry};
use super::{combine_product, Bundle, FiberReport, MorseCertificate, MorseMatching, TraceStep};
use crate::bounds::product_bound;
use crate::canon::canonical_form;
use crate::complex::{build_complex_capped, Face, DEFAULT_FACE_CAP};
use crate::cycles;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lucas::lucas;
use dashmap::DashMap;
use num_bigint::BigInt;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Materialized complexes may not exceed this many faces.
    pub face_cap: usize,
    /// Exhaustive induced-cycle search only up to this many vertices.
    pub cycle_cap: usize,
    /// Exact minimum feedback sets only up to this many vertices.
    pub feedback_cap: usize,
    /// Attachment sets larger than this disqualify cycle removal.
    pub attach_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            face_cap: DEFAULT_FACE_CAP,
            cycle_cap: cycles::EXACT_CYCLE_CAP,
            feedback_cap: cycles::EXACT_FEEDBACK_CAP,
            attach_cap: 16,
        }
    }
}

/// Memoized result for one canonical graph.
#[derive(Clone, Debug)]
struct Entry {
    bound: u128,
    heuristic: bool,
    trace: Vec<TraceStep>,
}

impl Entry {
    fn mapped(&self, map: &[usize]) -> Entry {
        let f = |v: usize| map[v];
        Entry {
            bound: self.bound,
            heuristic: self.heuristic,
            trace: self.trace.iter().map(|t| t.mapped(&f)).collect(),
        }
    }
}

fn prefix(step: TraceStep, sub: Entry) -> Entry {
    let mut trace = vec![step];
    trace.extend(sub.trace);
    Entry { bound: sub.bound, heuristic: sub.heuristic, trace }
}

fn cert(e: Entry) -> MorseCertificate {
    MorseCertificate {
        bound: e.bound,
        critical: None,
        matching: None,
        trace: e.trace,
        heuristic: e.heuristic,
    }
}

fn lucas_u128(n: usize) -> Result<u128> {
    Ok(lucas(n as i64)? as u128)
}

/// Shared engine restricted to the non-branching forest rules; backs every
/// `Forest` step so forest subproblems are memoized globally.
fn forest_engine() -> &'static Engine {
    static FOREST: OnceLock<Engine> = OnceLock::new();
    FOREST.get_or_init(|| Engine::with_registry(Registry::forest_rules()))
}

pub struct Engine {
    cfg: EngineConfig,
    registry: Registry,
    memo: DashMap<Vec<u64>, Arc<Entry>>,
}

/// Result of the full pipeline: the certificate next to the theorem-level
/// product cap it is measured against.
#[derive(Clone, Debug)]
pub struct MainBoundReport {
    pub certificate: MorseCertificate,
    /// Size of the disjoint-cycle packing used for the cap (exact when
    /// `packing_exact`, otherwise a certified upper estimate).
    pub disjoint_cycles: usize,
    pub packing_exact: bool,
    /// The product cap over the effective-girth table.
    pub theorem_cap: BigInt,
    /// Whether the computed bound stayed under the cap.
    pub cap_holds: bool,
}

impl Serialize for MainBoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("disjoint_cycles", &self.disjoint_cycles)?;
        m.serialize_entry("packing_exact", &self.packing_exact)?;
        m.serialize_entry("theorem_cap", &self.theorem_cap.to_string())?;
        m.serialize_entry("cap_holds", &self.cap_holds)?;
        m.serialize_entry("certificate", &self.certificate)?;
        m.end()
    }
}

impl Engine {
    pub fn standard() -> Engine {
        Engine::with_registry(Registry::standard())
    }

    pub fn with_registry(registry: Registry) -> Engine {
        Engine::with_config(EngineConfig::default(), registry)
    }

    pub fn with_config(cfg: EngineConfig, registry: Registry) -> Engine {
        Engine { cfg, registry, memo: DashMap::new() }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    /// The bound with its derivation trace, no explicit matching.
    pub fn bound(&self, g: &Graph) -> Result<MorseCertificate> {
        Ok(cert(self.entry(g)?))
    }

    /// The bound together with the explicit acyclic matching realizing it.
    /// The number of critical faces equals the bound.
    pub fn bound_with_matching(&self, g: &Graph) -> Result<MorseCertificate> {
        let e = self.entry(g)?;
        let bundle = self.materialize(g)?;
        debug_assert_eq!(bundle.critical.len() as u128, e.bound);
        let complex = build_complex_capped(g, self.cfg.face_cap)?;
        let mut critical = bundle.critical;
        critical.sort_unstable_by_key(|f| (f.count_ones(), *f));
        Ok(MorseCertificate {
            bound: e.bound,
            critical: Some(critical),
            matching: Some(MorseMatching::new(complex, bundle.pairs)),
            trace: e.trace,
            heuristic: e.heuristic,
        })
    }

    fn entry(&self, g: &Graph) -> Result<Entry> {
        let canon = canonical_form(g);
        if let Some(hit) = self.memo.get(&canon.key).map(|r| Arc::clone(r.value())) {
            return Ok(hit.mapped(&canon.from_canonical));
        }
        let computed = self.compute(&canon.graph)?;
        let out = computed.mapped(&canon.from_canonical);
        self.memo.insert(canon.key, Arc::new(computed));
        Ok(out)
    }

    fn compute(&self, g: &Graph) -> Result<Entry> {
        let (plan, heuristic) = self.registry.select(g, &self.cfg)?;
        self.execute(g, plan, heuristic)
    }

    fn execute(&self, g: &Graph, plan: Plan, selected_heuristic: bool) -> Result<Entry> {
        let entry = match plan {
            Plan::Empty => {
                Entry { bound: 1, heuristic: false, trace: vec![TraceStep::Empty] }
            }
            Plan::IsoVertex(v) => {
                Entry { bound: 0, heuristic: false, trace: vec![TraceStep::IsoVertex(v)] }
            }
            Plan::Forest => prefix(TraceStep::Forest, forest_engine().entry(g)?),
            Plan::IsoEdge(u, v) => prefix(
                TraceStep::IsoEdge(u, v),
                self.entry(&g.delete_vertices(VertexSet::singleton(u).with(v)))?,
            ),
            Plan::Fold(u, v) => prefix(
                TraceStep::Fold(u, v),
                self.entry(&g.delete_vertices(VertexSet::singleton(u)))?,
            ),
            Plan::Product(parts) => {
                let mut bound: u128 = 1;
                let mut heuristic = false;
                let mut trace = vec![TraceStep::DisjointProduct];
                for part in parts {
                    let sub = self.entry(&g.induced(part))?;
                    bound = bound
                        .checked_mul(sub.bound)
                        .ok_or(Error::Overflow("disjoint product bound"))?;
                    heuristic |= sub.heuristic;
                    trace.extend(sub.trace);
                }
                Entry { bound, heuristic, trace }
            }
            Plan::Link(u) => {
                let kept = self.entry(&g.delete_vertices(VertexSet::singleton(u)))?;
                let dropped =
                    self.entry(&g.delete_vertices(g.neighbourhood(u)?.with(u)))?;
                let bound = kept
                    .bound
                    .checked_add(dropped.bound)
                    .ok_or(Error::Overflow("link bound"))?;
                let mut trace = vec![TraceStep::Link(u)];
                trace.extend(kept.trace);
                trace.extend(dropped.trace);
                Entry { bound, heuristic: kept.heuristic || dropped.heuristic, trace }
            }
            Plan::RemoveCycle { walk, attach } => self.exec_remove_cycle(g, &walk, attach)?,
        };
        Ok(Entry { heuristic: entry.heuristic || selected_heuristic, ..entry })
    }

    /// Fiberwise cycle removal: faces are classified by their intersection
    /// with the attachment set, and each class contributes the bound of its
    /// fiber graph (arc interiors survive as path components and kill the
    /// fiber whenever an effective arc length is 1 mod 3).
    fn exec_remove_cycle(&self, g: &Graph, walk: &[usize], attach: VertexSet) -> Result<Entry> {
        let fa = FiberAnalysis::prepare(g, walk, attach, self.cfg.attach_cap)?;
        let mut bound: u128 = 0;
        let mut heuristic = false;
        let mut reports = Vec::new();
        let mut survivors = 0usize;
        let mut children = Vec::new();
        for p in fa.patterns(g) {
            let report = fa.report(&p);
            let fiber =
                g.delete_vertices(fa.attach_set.union(g.neighbourhood_of_set(p.sigma)));
            let sub = self.entry(&fiber)?;
            debug_assert!(!report.dies || sub.bound == 0, "dead fibers must bound to zero");
            bound = bound
                .checked_add(sub.bound)
                .ok_or(Error::Overflow("cycle-removal bound"))?;
            heuristic |= sub.heuristic;
            if !report.dies {
                survivors += 1;
                children.extend(sub.trace);
            }
            reports.push(report);
        }
        let cap = lucas_u128(fa.order.len())?;
        debug_assert!(survivors as u128 <= cap, "survivor count must respect the Lucas cap");
        let mut trace = vec![TraceStep::RemoveCycle {
            cycle: walk.to_vec(),
            attach: fa.order.clone(),
            fibers: reports,
            survivors,
            pattern_cap: cap as u64,
        }];
        trace.extend(children);
        Ok(Entry { bound, heuristic, trace })
    }

    /// The plan the engine would follow on `g`, in `g`'s own labels.
    fn plan_for(&self, g: &Graph) -> Result<Plan> {
        let canon = canonical_form(g);
        let (plan, _) = self.registry.select(&canon.graph, &self.cfg)?;
        Ok(plan.mapped(&|v| canon.from_canonical[v]))
    }

    /// Replay the recursion and build the matching itself. Mirrors `execute`
    /// arm by arm so the critical count equals the computed bound.
    fn materialize(&self, g: &Graph) -> Result<Bundle> {
        match self.plan_for(g)? {
            Plan::Empty => Ok(Bundle { pairs: Vec::new(), critical: vec![0] }),
            Plan::IsoVertex(v) => {
                let rest = build_complex_capped(
                    &g.delete_vertices(VertexSet::singleton(v)),
                    self.cfg.face_cap,
                )?;
                Ok(Bundle {
                    pairs: rest.faces().map(|f| (f, f | 1 << v)).collect(),
                    critical: Vec::new(),
                })
            }
            Plan::Forest => forest_engine().materialize(g),
            Plan::IsoEdge(u, v) => {
                let rest_graph = g.delete_vertices(VertexSet::singleton(u).with(v));
                let rest = self.materialize(&rest_graph)?;
                let rest_faces: Vec<Face> =
                    build_complex_capped(&rest_graph, self.cfg.face_cap)?.faces().collect();
                let edge = Bundle { pairs: vec![(0, 1 << u)], critical: vec![1 << v] };
                Ok(combine_product(&rest_faces, &rest, &edge))
            }
            Plan::Fold(u, v) => {
                // faces avoiding u inherit the recursive matching; faces
                // holding u pair off along the witness v
                let mut bundle =
                    self.materialize(&g.delete_vertices(VertexSet::singleton(u)))?;
                let free = build_complex_capped(
                    &g.delete_vertices(g.neighbourhood(u)?.with(u)),
                    self.cfg.face_cap,
                )?;
                for f in free.faces() {
                    if f & 1 << v == 0 {
                        bundle.pairs.push((f | 1 << u, f | 1 << u | 1 << v));
                    }
                }
                Ok(bundle)
            }
            Plan::Product(parts) => {
                let first = g.induced(parts[0]);
                let mut acc = self.materialize(&first)?;
                let mut acc_faces: Vec<Face> =
                    build_complex_capped(&first, self.cfg.face_cap)?.faces().collect();
                for &part in &parts[1..] {
                    let rg = g.induced(part);
                    let right = self.materialize(&rg)?;
                    let right_faces: Vec<Face> =
                        build_complex_capped(&rg, self.cfg.face_cap)?.faces().collect();
                    acc = combine_product(&acc_faces, &acc, &right);
                    let mut next = Vec::with_capacity(acc_faces.len() * right_faces.len());
                    for &t in &acc_faces {
                        for &s in &right_faces {
                            next.push(t | s);
                        }
                    }
                    acc_faces = next;
                }
                Ok(acc)
            }
            Plan::Link(u) => {
                let kept = self.materialize(&g.delete_vertices(VertexSet::singleton(u)))?;
                let dropped = self
                    .materialize(&g.delete_vertices(g.neighbourhood(u)?.with(u)))?
                    .shifted(1 << u);
                Ok(Bundle {
                    pairs: kept.pairs.into_iter().chain(dropped.pairs).collect(),
                    critical: kept.critical.into_iter().chain(dropped.critical).collect(),
                })
            }
            Plan::RemoveCycle { walk, attach } => {
                let fa = FiberAnalysis::prepare(g, &walk, attach, self.cfg.attach_cap)?;
                let mut pairs = Vec::new();
                let mut critical = Vec::new();
                for p in fa.patterns(g) {
                    let fiber = g
                        .delete_vertices(fa.attach_set.union(g.neighbourhood_of_set(p.sigma)));
                    let sub = self.materialize(&fiber)?.shifted(p.sigma.bits());
                    pairs.extend(sub.pairs);
                    critical.extend(sub.critical);
                }
                Ok(Bundle { pairs, critical })
            }
        }
    }

    /// Split on one vertex: faces avoiding u keep the bound of g minus u,
    /// faces holding u contribute the bound of g minus its closed
    /// neighbourhood. With `emit`, the glued matching comes along.
    pub fn bound_by_link(&self, g: &Graph, u: usize, emit: bool) -> Result<MorseCertificate> {
        if !g.vertices().contains(u) {
            return Err(Error::UnknownVertex(u));
        }
        let kept_graph = g.delete_vertices(VertexSet::singleton(u));
        let dropped_graph = g.delete_vertices(g.neighbourhood(u)?.with(u));
        let kept = self.entry(&kept_graph)?;
        let dropped = self.entry(&dropped_graph)?;
        let bound = kept
            .bound
            .checked_add(dropped.bound)
            .ok_or(Error::Overflow("link bound"))?;
        let heuristic = kept.heuristic || dropped.heuristic;
        let mut trace = vec![TraceStep::Link(u)];
        trace.extend(kept.trace);
        trace.extend(dropped.trace);
        let (matching, critical) = if emit {
            let kb = self.materialize(&kept_graph)?;
            let db = self.materialize(&dropped_graph)?.shifted(1 << u);
            let mut critical: Vec<Face> =
                kb.critical.iter().chain(db.critical.iter()).copied().collect();
            critical.sort_unstable_by_key(|f| (f.count_ones(), *f));
            let pairs = kb.pairs.into_iter().chain(db.pairs).collect();
            let complex = build_complex_capped(g, self.cfg.face_cap)?;
            (Some(MorseMatching::new(complex, pairs)), Some(critical))
        } else {
            (None, None)
        };
        Ok(MorseCertificate { bound, critical, matching, trace, heuristic })
    }

    /// Fold away u against a witness v with N(v) inside N(u): the bound of g
    /// equals the bound of g minus u.
    pub fn bound_by_fold(&self, g: &Graph, u: usize, v: usize) -> Result<MorseCertificate> {
        for w in [u, v] {
            if !g.vertices().contains(w) {
                return Err(Error::UnknownVertex(w));
            }
        }
        if u == v {
            return Err(Error::Precondition("fold vertices must differ".into()));
        }
        if !g.neighbourhood(v)?.is_subset_of(g.neighbourhood(u)?) {
            return Err(Error::Precondition(format!(
                "N({v}) must be contained in N({u})"
            )));
        }
        let sub = self.entry(&g.delete_vertices(VertexSet::singleton(u)))?;
        Ok(cert(prefix(TraceStep::Fold(u, v), sub)))
    }

    /// Forests reduce to zero or one critical cell.
    pub fn bound_forest(&self, g: &Graph) -> Result<MorseCertificate> {
        if !g.is_forest() {
            return Err(Error::NotAForest);
        }
        let sub = forest_engine().entry(g)?;
        debug_assert!(sub.bound <= 1);
        Ok(cert(prefix(TraceStep::Forest, sub)))
    }

    /// The feedback-set bound 2^|U|: summing over subsets S of U, each
    /// residual graph g minus U minus N(S) is a forest and contributes at
    /// most one critical cell.
    pub fn bound_feedback(&self, g: &Graph, set: VertexSet) -> Result<MorseCertificate> {
        if let Some(v) = set.difference(g.vertices()).min() {
            return Err(Error::UnknownVertex(v));
        }
        let rest = g.delete_vertices(set);
        if !rest.is_forest() {
            let witness =
                cycles::find_short_cycle(&rest).expect("a non-forest contains a cycle");
            return Err(Error::NotAFeedbackSet(witness));
        }
        if set.len() > 16 {
            return Err(Error::Resource(
                "feedback certificate enumeration is capped at 16 vertices".into(),
            ));
        }
        Ok(cert(self.feedback_exec(g, set)?))
    }

    fn feedback_exec(&self, g: &Graph, set: VertexSet) -> Result<Entry> {
        let members = set.to_vec();
        let k = members.len();
        let mut trace = vec![TraceStep::Feedback(members.clone())];
        let mut heuristic = false;
        let mut realized: u128 = 0;
        for mask in 0..(1u64 << k) {
            let mut sigma = VertexSet::EMPTY;
            for (i, &v) in members.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    sigma.insert(v);
                }
            }
            let reduced = g.delete_vertices(set.union(g.neighbourhood_of_set(sigma)));
            let sub = forest_engine().entry(&reduced)?;
            realized += sub.bound;
            heuristic |= sub.heuristic;
            trace.extend(sub.trace);
        }
        let bound = 1u128 << k;
        debug_assert!(realized <= bound);
        Ok(Entry { bound, heuristic, trace })
    }

    /// The standalone cycle-removal bound c * l(|attach|), where c is the
    /// largest bound among the outside parts g minus the cycle minus N(S)
    /// over attachment patterns S. The trace carries the derivation of the
    /// extremal fiber.
    pub fn remove_cycle_bound(
        &self,
        g: &Graph,
        walk: &[usize],
        attach: VertexSet,
    ) -> Result<MorseCertificate> {
        Ok(cert(self.rc_entry(g, walk, attach)?))
    }

    fn rc_entry(&self, g: &Graph, walk: &[usize], attach: VertexSet) -> Result<Entry> {
        let fa = FiberAnalysis::prepare(g, walk, attach, self.cfg.attach_cap)?;
        let mut c: u128 = 0;
        let mut extremal: Vec<TraceStep> = Vec::new();
        let mut heuristic = false;
        let mut reports = Vec::new();
        let mut survivors = 0usize;
        for (ix, p) in fa.patterns(g).into_iter().enumerate() {
            let report = fa.report(&p);
            if !report.dies {
                survivors += 1;
            }
            let outside =
                g.delete_vertices(fa.cycle_set.union(g.neighbourhood_of_set(p.sigma)));
            let sub = self.entry(&outside)?;
            heuristic |= sub.heuristic;
            if ix == 0 || sub.bound > c {
                c = sub.bound;
                extremal = sub.trace;
            }
            reports.push(report);
        }
        let cap = lucas_u128(fa.order.len())?;
        let bound = c.checked_mul(cap).ok_or(Error::Overflow("cycle-removal bound"))?;
        let mut trace = vec![TraceStep::RemoveCycle {
            cycle: walk.to_vec(),
            attach: fa.order.clone(),
            fibers: reports,
            survivors,
            pattern_cap: cap as u64,
        }];
        trace.extend(extremal);
        Ok(Entry { bound, heuristic, trace })
    }

    /// Full pipeline: compute the bound and compare it against the product
    /// cap taken over the effective-girth table at the packing number.
    pub fn main_bound(&self, g: &Graph) -> Result<MainBoundReport> {
        let packing = cycles::cycle_packing(g)?;
        let k = packing.upper;
        let theorem_cap = product_bound(k)?;
        let e = self.entry(g)?;
        let cap_holds = BigInt::from(e.bound) <= theorem_cap;
        let mut trace = vec![TraceStep::MainRecursion(k)];
        trace.extend(e.trace);
        Ok(MainBoundReport {
            certificate: MorseCertificate {
                bound: e.bound,
                critical: None,
                matching: None,
                trace,
                heuristic: e.heuristic,
            },
            disjoint_cycles: k,
            packing_exact: packing.exact,
            theorem_cap,
            cap_holds,
        })
    }

    /// At most four critical cells for graphs without two vertex-disjoint
    /// cycles. Refuses (with a witness) when the hypothesis fails.
    pub fn bound_no_two_disjoint_cycles(&self, g: &Graph) -> Result<MorseCertificate> {
        let packing = cycles::cycle_packing(g)?;
        if packing.lower >= 2 {
            return Err(Error::DisjointCyclesFound(
                packing.witness[0].clone(),
                packing.witness[1].clone(),
            ));
        }
        if !packing.exact {
            return Err(Error::Resource(
                "cannot verify the no-two-disjoint-cycles hypothesis at this size".into(),
            ));
        }
        let e = self.ntd(g)?;
        debug_assert!(e.bound <= 4);
        Ok(cert(e))
    }

    fn ntd(&self, g: &Graph) -> Result<Entry> {
        if g.vertex_count() == 0 {
            return Ok(Entry { bound: 1, heuristic: false, trace: vec![TraceStep::Empty] });
        }
        if let Some(v) = g.isolated_vertex() {
            return Ok(Entry {
                bound: 0,
                heuristic: false,
                trace: vec![TraceStep::IsoVertex(v)],
            });
        }
        if g.is_forest() {
            return Ok(prefix(TraceStep::Forest, forest_engine().entry(g)?));
        }
        if let Some((u, v)) = g.isolated_edge() {
            let sub = self.ntd(&g.delete_vertices(VertexSet::singleton(u).with(v)))?;
            return Ok(prefix(TraceStep::IsoEdge(u, v), sub));
        }
        if let Some((u, v)) = g.find_fold() {
            let sub = self.ntd(&g.delete_vertices(VertexSet::singleton(u)))?;
            return Ok(prefix(TraceStep::Fold(u, v), sub));
        }
        let parts = g.components();
        if parts.len() > 1 {
            // at most one part is cyclic, or the hypothesis gate would have
            // rejected the graph
            let mut bound: u128 = 1;
            let mut heuristic = false;
            let mut trace = vec![TraceStep::DisjointProduct];
            for part in parts {
                let sub = self.ntd(&g.induced(part))?;
                bound = bound
                    .checked_mul(sub.bound)
                    .ok_or(Error::Overflow("disjoint product bound"))?;
                heuristic |= sub.heuristic;
                trace.extend(sub.trace);
            }
            return Ok(Entry { bound, heuristic, trace });
        }
        // connected with minimum degree two from here on
        match g.contract_degree_two() {
            Err(Error::CycleComponent(_)) => {
                // a bare cycle: one feedback vertex suffices
                let v = g.vertices().min().expect("nonempty graph");
                self.feedback_exec(g, VertexSet::singleton(v))
            }
            Err(e) => Err(e),
            Ok(contraction) => {
                let low = cycles::best_induced_cycle(g)?.ok_or_else(|| {
                    Error::Precondition("expected a cycle in a non-forest".into())
                })?;
                if low.attachments.len() <= 3 {
                    // low effective girth: remove that cycle. Every outside
                    // part is a forest, so c <= 1 and the bound is at most
                    // l(3) = 4.
                    let mut attach = low.attachments;
                    let set: VertexSet = low.cycle.iter().copied().collect();
                    let mut pad = set.difference(attach).iter();
                    while attach.len() < 2 {
                        attach.insert(pad.next().expect("cycle longer than its attachments"));
                    }
                    let mut entry = self.rc_entry(g, &low.cycle, attach)?;
                    entry.heuristic |= low.heuristic;
                    Ok(entry)
                } else {
                    // high effective girth: two branch vertices of the
                    // contraction meet every cycle, giving 2^2 = 4
                    let support = contraction.graph.vertices().to_vec();
                    let mut found = None;
                    'outer: for (i, &a) in support.iter().enumerate() {
                        for &b in &support[i + 1..] {
                            let residue =
                                g.delete_vertices(VertexSet::singleton(a).with(b));
                            if residue.is_forest() {
                                found = Some((a, b));
                                break 'outer;
                            }
                        }
                    }
                    match found {
                        Some((a, b)) => self.feedback_exec(g, VertexSet::singleton(a).with(b)),
                        None => {
                            let e = self.entry(g)?;
                            if e.bound <= 4 {
                                Ok(e)
                            } else {
                                Err(Error::Precondition(
                                    "could not certify the bound of four".into(),
                                ))
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Validated cycle-removal context: the attachment vertices in cyclic walk
/// order and the interior gap lengths between consecutive ones.
struct FiberAnalysis {
    cycle_set: VertexSet,
    attach_set: VertexSet,
    order: Vec<usize>,
    gaps: Vec<i64>,
}

/// One attachment pattern: the independent subset of attachment vertices a
/// face may use.
struct Pattern {
    sigma: VertexSet,
    y: Vec<u8>,
}

impl FiberAnalysis {
    fn prepare(
        g: &Graph,
        walk: &[usize],
        attach: VertexSet,
        attach_cap: usize,
    ) -> Result<FiberAnalysis> {
        let cycle_set: VertexSet = walk.iter().copied().collect();
        if walk.len() < 3 || cycle_set.len() != walk.len() {
            return Err(Error::Precondition(
                "cycle walk must visit three or more distinct vertices".into(),
            ));
        }
        for &v in walk {
            if !g.vertices().contains(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        for i in 0..walk.len() {
            let (a, b) = (walk[i], walk[(i + 1) % walk.len()]);
            if !g.has_edge(a, b) {
                return Err(Error::Precondition(format!("walk edge ({a}, {b}) is missing")));
            }
        }
        if !cycles::is_induced_cycle(g, cycle_set) {
            return Err(Error::Precondition("the cycle must be induced (no chords)".into()));
        }
        if !attach.is_subset_of(cycle_set) {
            return Err(Error::Precondition(
                "attachment vertices must lie on the cycle".into(),
            ));
        }
        if !cycles::attachments(g, cycle_set).is_subset_of(attach) {
            return Err(Error::Precondition(
                "every cycle vertex with outside neighbours must be marked".into(),
            ));
        }
        if attach.len() < 2 {
            return Err(Error::Precondition(
                "mark at least two attachment vertices".into(),
            ));
        }
        if attach.len() > attach_cap {
            return Err(Error::Resource(format!(
                "attachment enumeration is capped at {attach_cap} vertices"
            )));
        }
        let positions: Vec<usize> =
            (0..walk.len()).filter(|&i| attach.contains(walk[i])).collect();
        let order: Vec<usize> = positions.iter().map(|&i| walk[i]).collect();
        let k = positions.len();
        let len = walk.len() as i64;
        let gaps: Vec<i64> = (0..k)
            .map(|i| {
                let here = positions[i] as i64;
                let next = positions[(i + 1) % k] as i64;
                (next - here - 1).rem_euclid(len)
            })
            .collect();
        Ok(FiberAnalysis { cycle_set, attach_set: attach, order, gaps })
    }

    /// All independent attachment patterns, in mask order over `order`.
    fn patterns(&self, g: &Graph) -> Vec<Pattern> {
        let k = self.order.len();
        let mut out = Vec::new();
        'mask: for mask in 0..(1u64 << k) {
            let mut sigma = VertexSet::EMPTY;
            for (i, &v) in self.order.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for u in sigma.iter() {
                        if g.has_edge(u, v) {
                            continue 'mask;
                        }
                    }
                    sigma.insert(v);
                }
            }
            let y: Vec<u8> = (0..k).map(|i| (mask >> i & 1) as u8).collect();
            out.push(Pattern { sigma, y });
        }
        out
    }

    fn report(&self, p: &Pattern) -> FiberReport {
        let k = self.order.len();
        let mut dies = false;
        let path_lengths: Vec<i64> = (0..k)
            .map(|i| {
                let raw = self.gaps[i] - i64::from(p.y[i]) - i64::from(p.y[(i + 1) % k]);
                let actual = raw.max(0);
                if actual % 3 == 1 {
                    dies = true;
                }
                actual
            })
            .collect();
        FiberReport { y: p.y.clone(), path_lengths, dies }
    }
}
