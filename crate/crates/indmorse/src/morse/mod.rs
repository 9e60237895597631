//! Discrete Morse matchings on independence complexes: validation of the
//! matching axioms, acyclicity certification, and the elementary matching
//! constructions the bound pipeline assembles.

pub mod engine;
pub mod rules;

pub use engine::{Engine, EngineConfig, MainBoundReport};
pub use rules::{Plan, Proposal, ReductionRule, Registry, Tier};

use crate::complex::{build_complex, face_vertices, Face, IndComplex};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::homology::total_betti;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::{HashMap, HashSet, VecDeque};

/// One derivation step. Vertex arguments always refer to labels of the graph
/// as it looked when the step fired; deletions never relabel, so steps from
/// nested reductions stay meaningful.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceStep {
    Empty,
    IsoVertex(usize),
    Link(usize),
    IsoEdge(usize, usize),
    /// Fold(removed, witness): N(witness) is contained in N(removed).
    Fold(usize, usize),
    Forest,
    Feedback(Vec<usize>),
    DisjointProduct,
    RemoveCycle {
        cycle: Vec<usize>,
        attach: Vec<usize>,
        fibers: Vec<FiberReport>,
        /// Attachment patterns that no arc kills; never exceeds pattern_cap.
        survivors: usize,
        /// The Lucas number l(|attach|).
        pattern_cap: u64,
    },
    MainRecursion(usize),
}

/// Per-pattern record of the cycle-removal analysis. `y` marks which
/// attachment vertices the pattern uses, in the order listed by the step;
/// `path_lengths` are the formal arc lengths t_i - y_i - y_{i+1} read
/// clockwise (an arc of length 1 mod 3 kills the fiber).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub y: Vec<u8>,
    pub path_lengths: Vec<i64>,
    pub dies: bool,
}

impl TraceStep {
    pub fn lemma(&self) -> &'static str {
        match self {
            TraceStep::Empty => "Empty",
            TraceStep::IsoVertex(_) => "IsoVertex",
            TraceStep::Link(_) => "Link",
            TraceStep::IsoEdge(..) => "IsoEdge",
            TraceStep::Fold(..) => "Fold",
            TraceStep::Forest => "Forest",
            TraceStep::Feedback(_) => "Feedback",
            TraceStep::DisjointProduct => "DisjointProduct",
            TraceStep::RemoveCycle { .. } => "RemoveCycle",
            TraceStep::MainRecursion(_) => "MainRecursion",
        }
    }

    /// Rewrite vertex arguments through a label map. Counts and fiber data
    /// are positional and stay as they are.
    pub(crate) fn mapped(&self, f: &dyn Fn(usize) -> usize) -> TraceStep {
        match self {
            TraceStep::IsoVertex(v) => TraceStep::IsoVertex(f(*v)),
            TraceStep::Link(v) => TraceStep::Link(f(*v)),
            TraceStep::IsoEdge(u, v) => TraceStep::IsoEdge(f(*u), f(*v)),
            TraceStep::Fold(u, v) => TraceStep::Fold(f(*u), f(*v)),
            TraceStep::Feedback(us) => TraceStep::Feedback(us.iter().map(|&u| f(u)).collect()),
            TraceStep::RemoveCycle { cycle, attach, fibers, survivors, pattern_cap } => {
                TraceStep::RemoveCycle {
                    cycle: cycle.iter().map(|&u| f(u)).collect(),
                    attach: attach.iter().map(|&u| f(u)).collect(),
                    fibers: fibers.clone(),
                    survivors: *survivors,
                    pattern_cap: *pattern_cap,
                }
            }
            other => other.clone(),
        }
    }
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("lemma", self.lemma())?;
        match self {
            TraceStep::Empty | TraceStep::Forest | TraceStep::DisjointProduct => {
                m.serialize_entry("args", &[] as &[usize])?;
            }
            TraceStep::IsoVertex(v) | TraceStep::Link(v) => {
                m.serialize_entry("args", &[*v])?;
            }
            TraceStep::IsoEdge(u, v) | TraceStep::Fold(u, v) => {
                m.serialize_entry("args", &[*u, *v])?;
            }
            TraceStep::Feedback(us) => {
                m.serialize_entry("args", us)?;
            }
            TraceStep::MainRecursion(k) => {
                m.serialize_entry("args", &[*k])?;
            }
            TraceStep::RemoveCycle { cycle, attach, fibers, survivors, pattern_cap } => {
                m.serialize_entry("args", &(cycle, attach))?;
                m.serialize_entry("fibers", fibers)?;
                m.serialize_entry("survivors", survivors)?;
                m.serialize_entry("pattern_cap", pattern_cap)?;
            }
        }
        m.end()
    }
}

/// A matching on the face poset: pairs (small, large) where large adds one
/// vertex to small, no face used twice.
#[derive(Clone, Debug)]
pub struct MorseMatching {
    complex: IndComplex,
    pairs: Vec<(Face, Face)>,
}

impl MorseMatching {
    pub fn new(complex: IndComplex, mut pairs: Vec<(Face, Face)>) -> Self {
        pairs.sort_unstable_by_key(|&(s, l)| (s.count_ones(), s, l));
        MorseMatching { complex, pairs }
    }

    pub fn complex(&self) -> &IndComplex {
        &self.complex
    }

    pub fn pairs(&self) -> &[(Face, Face)] {
        &self.pairs
    }

    /// Faces of the complex not used by any pair, in (cardinality, bits)
    /// order.
    pub fn critical_faces(&self) -> Vec<Face> {
        let used: HashSet<Face> =
            self.pairs.iter().flat_map(|&(s, l)| [s, l]).collect();
        self.complex.faces().filter(|f| !used.contains(f)).collect()
    }
}

impl Serialize for MorseMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = self
            .pairs
            .iter()
            .map(|&(a, b)| (face_vertices(a).to_vec(), face_vertices(b).to_vec()))
            .collect();
        m.serialize_entry("pairs", &pairs)?;
        m.end()
    }
}

/// A certified upper bound on the minimal number of critical cells, with the
/// derivation that produced it and, on demand, the explicit matching.
#[derive(Clone, Debug)]
pub struct MorseCertificate {
    pub bound: u128,
    /// Unmatched faces; present exactly when the matching was materialized.
    pub critical: Option<Vec<Face>>,
    pub matching: Option<MorseMatching>,
    pub trace: Vec<TraceStep>,
    /// Some selection ran past an exactness cap (greedy feedback set,
    /// uncertified cycle choice). The bound itself is still valid.
    pub heuristic: bool,
}

impl Serialize for MorseCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        if let Ok(small) = u64::try_from(self.bound) {
            m.serialize_entry("bound", &small)?;
        } else {
            m.serialize_entry("bound", &self.bound.to_string())?;
        }
        if let Some(critical) = &self.critical {
            let faces: Vec<Vec<usize>> =
                critical.iter().map(|&f| face_vertices(f).to_vec()).collect();
            m.serialize_entry("critical", &faces)?;
        }
        m.serialize_entry("trace", &self.trace)?;
        if let Some(matching) = &self.matching {
            m.serialize_entry("matching", matching)?;
        }
        if self.heuristic {
            m.serialize_entry("heuristic", &true)?;
        }
        m.end()
    }
}

/// True iff every pair is a cover relation (large = small plus one vertex)
/// and no face is reused. Faces outside the complex are an input error, not
/// a false.
pub fn is_valid_matching(m: &MorseMatching) -> Result<bool> {
    let mut used: HashSet<Face> = HashSet::with_capacity(2 * m.pairs.len());
    for &(small, large) in &m.pairs {
        for f in [small, large] {
            if !m.complex.contains(f) {
                return Err(Error::InvalidMatching(format!(
                    "face {:?} is not in the complex",
                    face_vertices(f)
                )));
            }
        }
        if large.count_ones() != small.count_ones() + 1 || small & !large != 0 {
            return Ok(false);
        }
        if !used.insert(small) || !used.insert(large) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the digraph on pairs, with an arc from p to q whenever
/// large(p) strictly contains small(q), has no directed cycle. Any cycle
/// keeps the small cardinality constant, so only cover containments can
/// participate; those are the arcs enumerated here. Validity gates first.
pub fn is_acyclic(m: &MorseMatching) -> Result<bool> {
    if !is_valid_matching(m)? {
        return Err(Error::InvalidMatching(
            "acyclicity is only defined for valid matchings".into(),
        ));
    }
    let index: HashMap<Face, usize> =
        m.pairs.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect();
    let n = m.pairs.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (i, &(_, large)) in m.pairs.iter().enumerate() {
        for v in face_vertices(large).iter() {
            if let Some(&j) = index.get(&(large & !(1 << v))) {
                if j != i {
                    succ[i].push(j);
                    indegree[j] += 1;
                }
            }
        }
    }
    let mut queue: VecDeque<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop_front() {
        seen += 1;
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    Ok(seen == n)
}

/// Total reduced Betti number against the critical-cell count: the bound
/// must hold, and when all critical faces share one cardinality it must be
/// an equality.
pub fn morse_inequality_check(g: &Graph, m: &MorseMatching) -> Result<bool> {
    if m.complex.source() != g {
        return Err(Error::Precondition(
            "matching lives on a different graph's complex".into(),
        ));
    }
    if !is_acyclic(m)? {
        return Err(Error::Precondition("matching must be acyclic".into()));
    }
    let total = total_betti(g)?;
    let critical = m.critical_faces();
    if total > critical.len() {
        return Ok(false);
    }
    let uniform = critical
        .windows(2)
        .all(|w| w[0].count_ones() == w[1].count_ones());
    Ok(!uniform || critical.is_empty() || total == critical.len())
}

/// The complete matching an isolated vertex induces: every face avoiding v
/// is paired with itself plus v. No critical faces remain.
pub fn match_isolated_vertex(g: &Graph, v: usize) -> Result<MorseMatching> {
    if !g.vertices().contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    if g.degree(v) != 0 {
        return Err(Error::Precondition(format!("vertex {v} is not isolated")));
    }
    let complex = build_complex(g)?;
    let rest = build_complex(&g.delete_vertices(VertexSet::singleton(v)))?;
    let pairs = rest.faces().map(|f| (f, f | 1 << v)).collect();
    Ok(MorseMatching::new(complex, pairs))
}

/// Pairs plus criticals of a matching under construction, before it is
/// attached to a complex. Faces use the ambient graph's labels throughout.
#[derive(Clone, Debug, Default)]
pub(crate) struct Bundle {
    pub pairs: Vec<(Face, Face)>,
    pub critical: Vec<Face>,
}

impl Bundle {
    pub fn shifted(&self, extra: Face) -> Bundle {
        Bundle {
            pairs: self.pairs.iter().map(|&(s, l)| (s | extra, l | extra)).collect(),
            critical: self.critical.iter().map(|&f| f | extra).collect(),
        }
    }
}

pub(crate) fn remap_face(f: Face, map: &[usize]) -> Face {
    face_vertices(f).iter().fold(0, |acc, v| acc | 1 << map[v])
}

/// Disjoint-union combination: fibers over the right-hand matching. Matched
/// right pairs sweep out complete matchings across every left face; critical
/// right faces carry a copy of the left matching. Critical cells are exactly
/// the unions of critical cells.
pub(crate) fn combine_product(left_faces: &[Face], left: &Bundle, right: &Bundle) -> Bundle {
    let mut pairs = Vec::new();
    for &(s, l) in &right.pairs {
        for &t in left_faces {
            pairs.push((t | s, t | l));
        }
    }
    let mut critical = Vec::new();
    for &sc in &right.critical {
        for &(a, b) in &left.pairs {
            pairs.push((a | sc, b | sc));
        }
        for &tc in &left.critical {
            critical.push(tc | sc);
        }
    }
    Bundle { pairs, critical }
}

/// The product bound with its explicit matching. Both inputs must carry
/// matchings; the result lives on the disjoint union of the two source
/// graphs (left part keeps low labels).
pub fn product_matching(gm: &MorseCertificate, hm: &MorseCertificate) -> Result<MorseCertificate> {
    let (Some(left), Some(right)) = (&gm.matching, &hm.matching) else {
        return Err(Error::Precondition(
            "product construction needs explicit matchings on both factors".into(),
        ));
    };
    let (union, lmap, rmap) =
        left.complex().source().disjoint_union(right.complex().source())?;
    let left_faces: Vec<Face> =
        left.complex().faces().map(|f| remap_face(f, &lmap)).collect();
    let lb = Bundle {
        pairs: left
            .pairs()
            .iter()
            .map(|&(s, l)| (remap_face(s, &lmap), remap_face(l, &lmap)))
            .collect(),
        critical: left.critical_faces().iter().map(|&f| remap_face(f, &lmap)).collect(),
    };
    let rb = Bundle {
        pairs: right
            .pairs()
            .iter()
            .map(|&(s, l)| (remap_face(s, &rmap), remap_face(l, &rmap)))
            .collect(),
        critical: right.critical_faces().iter().map(|&f| remap_face(f, &rmap)).collect(),
    };
    let bundle = combine_product(&left_faces, &lb, &rb);
    let bound = gm
        .bound
        .checked_mul(hm.bound)
        .ok_or(Error::Overflow("product bound"))?;
    let lmap_fn = |v: usize| lmap[v];
    let rmap_fn = |v: usize| rmap[v];
    let mut trace = vec![TraceStep::DisjointProduct];
    trace.extend(gm.trace.iter().map(|t| t.mapped(&lmap_fn)));
    trace.extend(hm.trace.iter().map(|t| t.mapped(&rmap_fn)));
    let complex = build_complex(&union)?;
    let mut critical = bundle.critical.clone();
    critical.sort_unstable_by_key(|f| (f.count_ones(), *f));
    Ok(MorseCertificate {
        bound,
        critical: Some(critical),
        matching: Some(MorseMatching::new(complex, bundle.pairs)),
        trace,
        heuristic: gm.heuristic || hm.heuristic,
    })
}

/// Serialize a face list as sorted vertex arrays (used by reports).
pub fn faces_as_vertex_lists(faces: &[Face]) -> Vec<Vec<usize>> {
    faces.iter().map(|&f| face_vertices(f).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    fn matching_on(g: &Graph, pairs: Vec<(Face, Face)>) -> MorseMatching {
        MorseMatching::new(build_complex(g).unwrap(), pairs)
    }

    #[test]
    fn validity_examples() {
        let point = Graph::empty(1).unwrap();
        let m = matching_on(&point, vec![(0, 0b1)]);
        assert!(is_valid_matching(&m).unwrap());

        let two = Graph::empty(2).unwrap();
        let reused = matching_on(&two, vec![(0, 0b01), (0, 0b10)]);
        assert!(!is_valid_matching(&reused).unwrap());

        let three = Graph::empty(3).unwrap();
        let gap = matching_on(&three, vec![(0b001, 0b111)]);
        assert!(!is_valid_matching(&gap).unwrap());

        let unknown = matching_on(&family::complete(3).unwrap(), vec![(0b011, 0b111)]);
        assert!(is_valid_matching(&unknown).is_err());
    }

    #[test]
    fn acyclicity_examples() {
        let point = Graph::empty(1).unwrap();
        assert!(is_acyclic(&matching_on(&point, vec![(0, 0b1)])).unwrap());

        // two isolated vertices u=0, v=1: pairs (∅,{u}), ({v},{u,v})
        let two = Graph::empty(2).unwrap();
        let m = matching_on(&two, vec![(0, 0b01), (0b10, 0b11)]);
        assert!(is_acyclic(&m).unwrap());

        // invalid matching: the validity gate errors before acyclicity
        let edge = family::path(2).unwrap();
        let invalid = matching_on(&edge, vec![(0b01, 0b11), (0b10, 0b11)]);
        assert!(is_acyclic(&invalid).is_err());

        // classic directed 3-cycle: (a,ab), (b,bc), (c,ca) on 3 loose points
        let three = Graph::empty(3).unwrap();
        let cyclic = matching_on(
            &three,
            vec![(0b001, 0b011), (0b010, 0b110), (0b100, 0b101)],
        );
        assert!(is_valid_matching(&cyclic).unwrap());
        assert!(!is_acyclic(&cyclic).unwrap());
    }

    #[test]
    fn isolated_vertex_matching() {
        let point = Graph::empty(1).unwrap();
        let m = match_isolated_vertex(&point, 0).unwrap();
        assert_eq!(m.pairs(), &[(0, 0b1)]);
        assert!(m.critical_faces().is_empty());

        // K5 plus an isolated sixth vertex: all 6 faces of Ind(K5) pair up
        let k5 = family::complete(5).unwrap();
        let g = Graph::from_edges(6, &k5.edges()).unwrap();
        let m = match_isolated_vertex(&g, 5).unwrap();
        assert_eq!(m.pairs().len(), 6);
        assert!(m.critical_faces().is_empty());
        assert!(is_acyclic(&m).unwrap());

        let two = Graph::empty(2).unwrap();
        let m = match_isolated_vertex(&two, 0).unwrap();
        assert_eq!(m.pairs().len(), 2);
        assert!(m.critical_faces().is_empty());

        assert!(match_isolated_vertex(&family::path(2).unwrap(), 0).is_err());
    }

    #[test]
    fn inequality_check() {
        // empty matching on Ind(K5): 4 <= 6, mixed cardinalities
        let k5 = family::complete(5).unwrap();
        let empty = matching_on(&k5, vec![]);
        assert!(morse_inequality_check(&k5, &empty).unwrap());

        // complete matching on a single vertex: 0 <= 0
        let point = Graph::empty(1).unwrap();
        let m = match_isolated_vertex(&point, 0).unwrap();
        assert!(morse_inequality_check(&point, &m).unwrap());

        // complete matching on two isolated vertices
        let two = Graph::empty(2).unwrap();
        let m = match_isolated_vertex(&two, 0).unwrap();
        assert!(morse_inequality_check(&two, &m).unwrap());
    }

    #[test]
    fn product_of_matchings() {
        // P2 certificate by hand: pair (∅,{0}), critical {1}
        let p2 = family::path(2).unwrap();
        let cert = MorseCertificate {
            bound: 1,
            critical: Some(vec![0b10]),
            matching: Some(matching_on(&p2, vec![(0, 0b01)])),
            trace: vec![TraceStep::Forest],
            heuristic: false,
        };
        let prod = product_matching(&cert, &cert).unwrap();
        assert_eq!(prod.bound, 1);
        let m = prod.matching.as_ref().unwrap();
        assert!(is_acyclic(m).unwrap());
        assert_eq!(m.critical_faces().len(), 1);
        // the surviving face is {1} from each factor: vertices 1 and 3
        assert_eq!(m.critical_faces(), vec![0b1010]);
        assert!(morse_inequality_check(m.complex().source(), m).unwrap());

        let bare = MorseCertificate {
            bound: 1,
            critical: None,
            matching: None,
            trace: vec![],
            heuristic: false,
        };
        assert!(product_matching(&bare, &cert).is_err());
    }

    #[test]
    fn trace_serialization() {
        let step = TraceStep::Fold(4, 1);
        let json = serde_json::to_string(&step).unwrap();
        assert_eq!(json, r#"{"lemma":"Fold","args":[4,1]}"#);

        let step = TraceStep::RemoveCycle {
            cycle: vec![0, 1, 2],
            attach: vec![0, 2],
            fibers: vec![FiberReport { y: vec![0, 0], path_lengths: vec![0, 1], dies: true }],
            survivors: 3,
            pattern_cap: 3,
        };
        let json = serde_json::to_string(&step).unwrap();
        assert!(json.starts_with(r#"{"lemma":"RemoveCycle","args":[[0,1,2],[0,2]]"#));
        assert!(json.contains(r#""survivors":3"#));

        let json = serde_json::to_string(&TraceStep::MainRecursion(2)).unwrap();
        assert_eq!(json, r#"{"lemma":"MainRecursion","args":[2]}"#);
    }
}
