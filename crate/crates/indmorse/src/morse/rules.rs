//! Reduction rules behind a common trait, registered by name and selected
//! at runtime. Immediate rules fire first in registry order; weighted rules
//! compete by estimated bound, smallest bid first.

use super::engine::EngineConfig;
use crate::cycles;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lucas;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// Strict improvement at no cost; first applicable rule wins.
    Immediate,
    /// Branching step; applicable rules bid and the cheapest executes.
    Weighted,
}

/// What to do with the current graph. Vertex arguments are labels of that
/// graph.
#[derive(Clone, Debug)]
pub enum Plan {
    Empty,
    IsoVertex(usize),
    Forest,
    IsoEdge(usize, usize),
    Fold(usize, usize),
    Product(Vec<VertexSet>),
    Link(usize),
    RemoveCycle { walk: Vec<usize>, attach: VertexSet },
}

impl Plan {
    pub(crate) fn mapped(&self, f: &dyn Fn(usize) -> usize) -> Plan {
        let map_set = |s: &VertexSet| s.iter().map(f).collect::<VertexSet>();
        match self {
            Plan::Empty => Plan::Empty,
            Plan::Forest => Plan::Forest,
            Plan::IsoVertex(v) => Plan::IsoVertex(f(*v)),
            Plan::IsoEdge(u, v) => Plan::IsoEdge(f(*u), f(*v)),
            Plan::Fold(u, v) => Plan::Fold(f(*u), f(*v)),
            Plan::Product(parts) => Plan::Product(parts.iter().map(map_set).collect()),
            Plan::Link(u) => Plan::Link(f(*u)),
            Plan::RemoveCycle { walk, attach } => Plan::RemoveCycle {
                walk: walk.iter().map(|&v| f(v)).collect(),
                attach: map_set(attach),
            },
        }
    }
}

pub struct Proposal {
    pub plan: Plan,
    /// Estimated resulting bound; u128::MAX for last-resort rules.
    pub bid: u128,
    /// The choice ran past an exactness cap and is not certified minimal.
    pub heuristic: bool,
}

impl Proposal {
    fn immediate(plan: Plan) -> Option<Proposal> {
        Some(Proposal { plan, bid: 0, heuristic: false })
    }
}

pub trait ReductionRule: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn tier(&self) -> Tier;
    fn propose(&self, g: &Graph, cfg: &EngineConfig) -> Result<Option<Proposal>>;
}

struct EmptyRule;
impl ReductionRule for EmptyRule {
    fn name(&self) -> &'static str {
        "empty"
    }
    fn summary(&self) -> &'static str {
        "the empty graph has exactly one critical cell, the empty face"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok((g.vertex_count() == 0).then(|| Proposal::immediate(Plan::Empty)).flatten())
    }
}

struct IsoVertexRule;
impl ReductionRule for IsoVertexRule {
    fn name(&self) -> &'static str {
        "isolated-vertex"
    }
    fn summary(&self) -> &'static str {
        "an isolated vertex induces a complete matching: zero critical cells"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok(g.isolated_vertex().and_then(|v| Proposal::immediate(Plan::IsoVertex(v))))
    }
}

struct ForestRule;
impl ReductionRule for ForestRule {
    fn name(&self) -> &'static str {
        "forest"
    }
    fn summary(&self) -> &'static str {
        "forests reduce to at most one critical cell via edge elimination"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok((g.vertex_count() > 0 && g.is_forest())
            .then(|| Proposal::immediate(Plan::Forest))
            .flatten())
    }
}

struct IsoEdgeRule;
impl ReductionRule for IsoEdgeRule {
    fn name(&self) -> &'static str {
        "isolated-edge"
    }
    fn summary(&self) -> &'static str {
        "an isolated edge contributes a factor one: drop both endpoints"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok(g.isolated_edge().and_then(|(u, v)| Proposal::immediate(Plan::IsoEdge(u, v))))
    }
}

struct FoldRule;
impl ReductionRule for FoldRule {
    fn name(&self) -> &'static str {
        "fold"
    }
    fn summary(&self) -> &'static str {
        "if N(v) is contained in N(u), the faces holding u pair off along v"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok(g.find_fold().and_then(|(u, v)| Proposal::immediate(Plan::Fold(u, v))))
    }
}

struct ProductRule;
impl ReductionRule for ProductRule {
    fn name(&self) -> &'static str {
        "disjoint-product"
    }
    fn summary(&self) -> &'static str {
        "bounds of connected components multiply"
    }
    fn tier(&self) -> Tier {
        Tier::Immediate
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        let parts = g.components();
        Ok((parts.len() >= 2).then(|| Proposal::immediate(Plan::Product(parts))).flatten())
    }
}

struct FeedbackRule;
impl ReductionRule for FeedbackRule {
    fn name(&self) -> &'static str {
        "feedback"
    }
    fn summary(&self) -> &'static str {
        "link away a feedback vertex set; at most 2^|U| forests remain"
    }
    fn tier(&self) -> Tier {
        Tier::Weighted
    }
    fn propose(&self, g: &Graph, cfg: &EngineConfig) -> Result<Option<Proposal>> {
        let (set, heuristic) = if g.vertex_count() <= cfg.feedback_cap {
            (cycles::min_feedback_set(g)?, false)
        } else {
            (cycles::greedy_feedback_set(g), true)
        };
        if set.is_empty() || set.len() >= 127 {
            return Ok(None);
        }
        let u = set.min().expect("nonempty feedback set");
        Ok(Some(Proposal { plan: Plan::Link(u), bid: 1u128 << set.len(), heuristic }))
    }
}

struct RemoveCycleRule;
impl ReductionRule for RemoveCycleRule {
    fn name(&self) -> &'static str {
        "remove-cycle"
    }
    fn summary(&self) -> &'static str {
        "fiber over the attachment patterns of a low-attachment induced cycle"
    }
    fn tier(&self) -> Tier {
        Tier::Weighted
    }
    fn propose(&self, g: &Graph, cfg: &EngineConfig) -> Result<Option<Proposal>> {
        if g.vertex_count() > cfg.cycle_cap {
            // a shortest cycle is still induced; only minimality is lost
            let Some(walk) = cycles::find_short_cycle(g) else {
                return Ok(None);
            };
            let set: VertexSet = walk.iter().copied().collect();
            let attach = cycles::attachments(g, set);
            if attach.len() < 2 || attach.len() > cfg.attach_cap {
                return Ok(None);
            }
            let bid = lucas::lucas(attach.len() as i64)? as u128;
            return Ok(Some(Proposal {
                plan: Plan::RemoveCycle { walk, attach },
                bid,
                heuristic: true,
            }));
        }
        let Some(low) = cycles::best_induced_cycle(g)? else {
            return Ok(None);
        };
        if low.attachments.len() < 2 || low.attachments.len() > cfg.attach_cap {
            return Ok(None);
        }
        let bid = lucas::lucas(low.attachments.len() as i64)? as u128;
        Ok(Some(Proposal {
            plan: Plan::RemoveCycle { walk: low.cycle, attach: low.attachments },
            bid,
            heuristic: low.heuristic,
        }))
    }
}

struct LinkRule;
impl ReductionRule for LinkRule {
    fn name(&self) -> &'static str {
        "link"
    }
    fn summary(&self) -> &'static str {
        "split on the busiest vertex: kept plus dropped neighbourhood"
    }
    fn tier(&self) -> Tier {
        Tier::Weighted
    }
    fn propose(&self, g: &Graph, _: &EngineConfig) -> Result<Option<Proposal>> {
        Ok(g.max_degree_vertex().map(|u| Proposal {
            plan: Plan::Link(u),
            bid: u128::MAX,
            heuristic: false,
        }))
    }
}

static EMPTY: EmptyRule = EmptyRule;
static ISO_VERTEX: IsoVertexRule = IsoVertexRule;
static FOREST: ForestRule = ForestRule;
static ISO_EDGE: IsoEdgeRule = IsoEdgeRule;
static FOLD: FoldRule = FoldRule;
static PRODUCT: ProductRule = ProductRule;
static FEEDBACK: FeedbackRule = FeedbackRule;
static REMOVE_CYCLE: RemoveCycleRule = RemoveCycleRule;
static LINK: LinkRule = LinkRule;

/// Every known rule, in the standard firing order.
pub const CATALOG: &[(&str, &(dyn ReductionRule + 'static))] = &[
    ("empty", &EMPTY),
    ("isolated-vertex", &ISO_VERTEX),
    ("forest", &FOREST),
    ("isolated-edge", &ISO_EDGE),
    ("fold", &FOLD),
    ("disjoint-product", &PRODUCT),
    ("feedback", &FEEDBACK),
    ("remove-cycle", &REMOVE_CYCLE),
    ("link", &LINK),
];

/// Rule names used when reducing forests: the tools of the edge-induction
/// proof, nothing that branches.
pub const FOREST_RULE_NAMES: &[&str] =
    &["empty", "isolated-vertex", "isolated-edge", "fold"];

#[derive(Clone)]
pub struct Registry {
    rules: Vec<&'static (dyn ReductionRule + 'static)>,
}

impl Registry {
    pub fn standard() -> Registry {
        Registry { rules: CATALOG.iter().map(|&(_, r)| r).collect() }
    }

    pub fn forest_rules() -> Registry {
        Registry::by_names(FOREST_RULE_NAMES).expect("forest rule names are in the catalog")
    }

    pub fn by_names(names: &[&str]) -> Result<Registry> {
        let mut rules = Vec::with_capacity(names.len());
        for name in names {
            let rule = CATALOG
                .iter()
                .find(|(n, _)| n == name)
                .map(|&(_, r)| r)
                .ok_or_else(|| Error::UnknownRule((*name).into()))?;
            rules.push(rule);
        }
        Ok(Registry { rules })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.rules.iter().map(|r| r.name()).collect()
    }

    pub fn rules(&self) -> impl Iterator<Item = &'static (dyn ReductionRule + 'static)> + '_ {
        self.rules.iter().copied()
    }

    /// First applicable immediate rule, else the cheapest weighted bid
    /// (ties broken by registry order).
    pub(crate) fn select(&self, g: &Graph, cfg: &EngineConfig) -> Result<(Plan, bool)> {
        let mut best: Option<Proposal> = None;
        for rule in &self.rules {
            match rule.tier() {
                Tier::Immediate => {
                    if let Some(p) = rule.propose(g, cfg)? {
                        return Ok((p.plan, p.heuristic));
                    }
                }
                Tier::Weighted => {
                    if let Some(p) = rule.propose(g, cfg)? {
                        if best.as_ref().is_none_or(|b| p.bid < b.bid) {
                            best = Some(p);
                        }
                    }
                }
            }
        }
        best.map(|p| (p.plan, p.heuristic)).ok_or(Error::NoApplicableRule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn catalog_and_lookup() {
        let std = Registry::standard();
        assert_eq!(std.names().len(), CATALOG.len());
        assert_eq!(Registry::forest_rules().names(), FOREST_RULE_NAMES);
        assert!(Registry::by_names(&["fold", "link"]).is_ok());
        assert!(matches!(
            Registry::by_names(&["no-such-rule"]),
            Err(Error::UnknownRule(_))
        ));
    }

    #[test]
    fn selection_on_examples() {
        let cfg = EngineConfig::default();
        let std = Registry::standard();

        let (plan, _) = std.select(&Graph::empty(0).unwrap(), &cfg).unwrap();
        assert!(matches!(plan, Plan::Empty));

        // bare cycle: no induced cycle qualifies (no attachments), the
        // feedback set {0} wins with bid 2
        let (plan, h) = std.select(&family::cycle(5).unwrap(), &cfg).unwrap();
        assert!(matches!(plan, Plan::Link(0)));
        assert!(!h);

        // K5: the triangle bid l(3)=4 beats the feedback bid 2^3=8
        let (plan, _) = std.select(&family::complete(5).unwrap(), &cfg).unwrap();
        match plan {
            Plan::RemoveCycle { walk, attach } => {
                assert_eq!(walk, vec![0, 1, 2]);
                assert_eq!(attach.len(), 3);
            }
            other => panic!("expected a cycle removal, got {other:?}"),
        }

        let (plan, _) = std.select(&family::k5_copies(2).unwrap(), &cfg).unwrap();
        assert!(matches!(plan, Plan::Product(ref parts) if parts.len() == 2));

        // star: a forest, and the forest rule outranks fold
        let (plan, _) = std.select(&family::star(3).unwrap(), &cfg).unwrap();
        assert!(matches!(plan, Plan::Forest));

        // forests under the restricted registry fold instead
        let (plan, _) =
            Registry::forest_rules().select(&family::path(3).unwrap(), &cfg).unwrap();
        assert!(matches!(plan, Plan::Fold(2, 0)));

        // the restricted registry has nothing for a fold-free cycle
        assert!(matches!(
            Registry::forest_rules().select(&family::cycle(5).unwrap(), &cfg),
            Err(Error::NoApplicableRule)
        ));
    }

    use crate::graph::Graph;
}
