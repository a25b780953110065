//! Symbolic qudit multi-hypergraphs and their rewrite rules.
//!
//! A [`MultiHypergraph`] stores each hyperedge once with its multiplicity in
//! `1..d`; an edge whose multiplicity reaches `0 (mod d)` is removed. Empty
//! hyperedges produced by rewriting a loop are global phases and are dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modarith::divisors;

/// A non-empty, strictly increasing set of 1-based vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Edge(Vec<usize>);

impl Edge {
    /// Builds an edge from any vertex list, sorting it. Rejects empty lists,
    /// repeated vertices and the label 0.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return invalid("hyperedges must be non-empty");
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("hyperedge {vertices:?} repeats a vertex"));
        }
        if vertices[0] == 0 {
            return invalid("vertex labels are 1-based");
        }
        Ok(Self(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &Edge) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    /// `e ∖ {k}`; `None` when that is the empty set.
    pub fn without(&self, k: usize) -> Option<Edge> {
        let rest: Vec<usize> = self.0.iter().copied().filter(|&v| v != k).collect();
        (!rest.is_empty()).then_some(Edge(rest))
    }
}

impl TryFrom<Vec<usize>> for Edge {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Edge::new(v)
    }
}

impl From<Edge> for Vec<usize> {
    fn from(e: Edge) -> Self {
        e.0
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Split of `1..=n` into two non-empty sides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, side_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let a: BTreeSet<usize> = side_a.into_iter().collect();
        if let Some(&v) = a.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::UnknownVertex { vertex: v, n });
        }
        if a.is_empty() || a.len() == n {
            return invalid(format!(
                "side A must be a non-empty proper subset of 1..={n}"
            ));
        }
        let side_b = (1..=n).filter(|v| !a.contains(v)).collect();
        Ok(Self {
            n,
            side_a: a.into_iter().collect(),
            side_b,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn in_a(&self, v: usize) -> bool {
        self.side_a.binary_search(&v).is_ok()
    }

    /// The side with fewer vertices (side A on ties).
    pub fn smaller_side(&self) -> &[usize] {
        if self.side_b.len() < self.side_a.len() {
            &self.side_b
        } else {
            &self.side_a
        }
    }

    /// True when `e` has a vertex on each side.
    pub fn crosses(&self, e: &Edge) -> bool {
        let a = e.vertices().iter().filter(|&&v| self.in_a(v)).count();
        a > 0 && a < e.len()
    }

    /// The bipartition induced on `kept` (old labels, any order), relabelled
    /// to `1..=kept.len()` in increasing order of the old labels. `None` when
    /// one side would be empty.
    pub fn restrict(&self, kept: &[usize]) -> Option<Bipartition> {
        let mut kept = kept.to_vec();
        kept.sort_unstable();
        let a = kept
            .iter()
            .enumerate()
            .filter(|(_, &v)| self.in_a(v))
            .map(|(i, _)| i + 1);
        Bipartition::new(kept.len(), a).ok()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[usize]| {
            s.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}|{{{}}}", join(&self.side_a), join(&self.side_b))
    }
}

/// Result of a computational-basis measurement on one qudit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qudit: usize,
    /// The qudit is left in `|outcome⟩`.
    pub outcome: u64,
    /// Old label to new label for the surviving vertices.
    pub relabel: BTreeMap<usize, usize>,
}

/// Serializes as the JSON hypergraph file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "HypergraphFile", try_from = "HypergraphFile")]
pub struct MultiHypergraph {
    d: u64,
    n: usize,
    edges: BTreeMap<Edge, u64>,
}

impl MultiHypergraph {
    /// The empty hypergraph on `n` vertices, i.e. `|+⟩^{⊗n}`.
    pub fn new(d: u64, n: usize) -> Result<Self> {
        if d < 2 {
            return invalid(format!("dimension must be >= 2, got {d}"));
        }
        if n < 1 {
            return invalid("a hypergraph needs at least one vertex");
        }
        Ok(Self {
            d,
            n,
            edges: BTreeMap::new(),
        })
    }

    /// Builds a hypergraph from `(vertices, multiplicity)` pairs. Repeated
    /// edges accumulate.
    pub fn from_edges<I, V>(d: u64, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, u64)>,
        V: Into<Vec<usize>>,
    {
        let mut h = Self::new(d, n)?;
        for (vs, m) in edges {
            let e = Edge::new(vs.into())?;
            h.check_edge(&e)?;
            h.shift(e, m);
        }
        Ok(h)
    }

    /// The elementary hypergraph: one edge on all `n` vertices.
    pub fn elementary(d: u64, n: usize, m: u64) -> Result<Self> {
        Self::from_edges(d, n, [((1..=n).collect::<Vec<_>>(), m)])
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, u64)> + '_ {
        self.edges.iter().map(|(e, &m)| (e, m))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, e: &Edge) -> u64 {
        self.edges.get(e).copied().unwrap_or(0)
    }

    /// Largest hyperedge cardinality, 0 for the empty hypergraph.
    pub fn k_max(&self) -> usize {
        self.edges.keys().map(Edge::len).max().unwrap_or(0)
    }

    /// A single hyperedge covering every vertex.
    pub fn is_elementary(&self) -> bool {
        self.edges.len() == 1 && self.k_max() == self.n
    }

    /// The single stored edge, if there is exactly one.
    pub fn sole_edge(&self) -> Option<(&Edge, u64)> {
        match self.edges.len() {
            1 => self.edges().next(),
            _ => None,
        }
    }

    fn check_vertex(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::UnknownVertex {
                vertex: k,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn check_edge(&self, e: &Edge) -> Result<()> {
        e.vertices().iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// Adds `by` to the multiplicity of `e`, mod `d`.
    fn shift(&mut self, e: Edge, by: u64) {
        let m = (self.multiplicity(&e) + by % self.d) % self.d;
        if m == 0 {
            self.edges.remove(&e);
        } else {
            self.edges.insert(e, m);
        }
    }

    /// `Z_e^times`.
    pub fn apply_controlled_z(&self, e: &Edge, times: u64) -> Result<Self> {
        self.check_edge(e)?;
        let mut out = self.clone();
        out.shift(e.clone(), times);
        Ok(out)
    }

    /// `(X_k^†)^times`: every edge `e ∋ k` adds `times·m_e` to `e ∖ {k}`.
    pub fn apply_x_dagger(&self, k: usize, times: u64) -> Result<Self> {
        self.check_vertex(k)?;
        let mut out = self.clone();
        let shifts: Vec<(Edge, u64)> = self
            .edges()
            .filter(|(e, _)| e.contains(k))
            .filter_map(|(e, m)| e.without(k).map(|f| (f, (times % self.d) * m)))
            .collect();
        for (f, by) in shifts {
            out.shift(f, by);
        }
        Ok(out)
    }

    /// Projects qudit `k` onto `|q⟩` without removing the vertex: every edge
    /// `e ∋ k` is replaced by `e ∖ {k}` with multiplicity `q·m_e`, leaving `k`
    /// isolated.
    pub fn project_z(&self, k: usize, q: u64) -> Result<Self> {
        self.check_vertex(k)?;
        if q >= self.d {
            return invalid(format!("outcome {q} is not in Z_{}", self.d));
        }
        let mut out = Self {
            d: self.d,
            n: self.n,
            edges: BTreeMap::new(),
        };
        for (e, m) in self.edges() {
            if e.contains(k) {
                if let Some(f) = e.without(k) {
                    out.shift(f, q * m);
                }
            } else {
                out.shift(e.clone(), m);
            }
        }
        Ok(out)
    }

    /// Computational-basis measurement of qudit `k` with outcome `q`. The
    /// remaining vertices are relabelled to `1..n-1` in increasing order.
    pub fn measure_z(&self, k: usize, q: u64) -> Result<(MeasurementRecord, Self)> {
        if self.n < 2 {
            return invalid("cannot measure away the only vertex");
        }
        let projected = self.project_z(k, q)?;
        let kept: Vec<usize> = (1..=self.n).filter(|&v| v != k).collect();
        let (h, relabel) = projected.induced(&kept)?;
        Ok((
            MeasurementRecord {
                qudit: k,
                outcome: q,
                relabel,
            },
            h,
        ))
    }

    /// The sub-hypergraph on `kept`, relabelled to `1..=kept.len()` in
    /// increasing order. Fails if an edge touches a dropped vertex.
    pub fn induced(&self, kept: &[usize]) -> Result<(Self, BTreeMap<usize, usize>)> {
        let mut kept = kept.to_vec();
        kept.sort_unstable();
        kept.dedup();
        for &v in &kept {
            self.check_vertex(v)?;
        }
        let relabel: BTreeMap<usize, usize> =
            kept.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
        let mut out = Self::new(self.d, kept.len())?;
        for (e, m) in self.edges() {
            let mapped: Option<Vec<usize>> = e
                .vertices()
                .iter()
                .map(|v| relabel.get(v).copied())
                .collect();
            let mapped = mapped
                .ok_or_else(|| Error::InvalidInput(format!("edge {e} touches a dropped vertex")))?;
            out.shift(Edge(mapped), m);
        }
        Ok((out, relabel))
    }

    /// Vertices that appear in at least one edge.
    pub fn support(&self) -> BTreeSet<usize> {
        self.edges
            .keys()
            .flat_map(|e| e.0.iter().copied())
            .collect()
    }

    /// Connected components of the "share a hyperedge" relation over all
    /// vertices, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in self.edges.keys() {
            let first = e.0[0];
            for &v in &e.0[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 1..=self.n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Edges meeting both sides of `b`, largest first, ties in lexicographic
    /// order of the vertex sets.
    pub fn crossing_edges(&self, b: &Bipartition) -> Result<Vec<(Edge, u64)>> {
        if b.n() != self.n {
            return invalid(format!(
                "bipartition is over {} vertices, hypergraph has {}",
                b.n(),
                self.n
            ));
        }
        let mut out: Vec<(Edge, u64)> = self
            .edges()
            .filter(|(e, _)| b.crosses(e))
            .map(|(e, m)| (e.clone(), m))
            .collect();
        out.sort_by(|(x, _), (y, _)| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
        Ok(out)
    }

    /// Parses the JSON hypergraph file format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: HypergraphFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&HypergraphFile::from(self)).expect("plain data serializes")
    }
}

impl fmt::Display for MultiHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "|+>^{} (d={})", self.n, self.d);
        }
        let parts: Vec<String> = self
            .edges()
            .map(|(e, m)| {
                if m == 1 {
                    format!("Z{e}")
                } else {
                    format!("Z^{m}{e}")
                }
            })
            .collect();
        write!(f, "{} |+>^{} (d={})", parts.join(" "), self.n, self.d)
    }
}

/// On-disk form: `{"d": int, "n": int, "edges": [{"vertices": [..], "multiplicity": int}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub d: u64,
    pub n: usize,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub vertices: Vec<usize>,
    pub multiplicity: u64,
}

impl TryFrom<HypergraphFile> for MultiHypergraph {
    type Error = Error;

    fn try_from(file: HypergraphFile) -> Result<Self> {
        let parse = |msg: String| Err(Error::Parse(msg));
        if file.d < 2 {
            return parse(format!("d must be >= 2, got {}", file.d));
        }
        if file.n < 1 {
            return parse("n must be >= 1".into());
        }
        let mut h = Self::new(file.d, file.n)?;
        for entry in file.edges {
            let vs = &entry.vertices;
            if vs.is_empty() {
                return parse("empty hyperedge".into());
            }
            if vs.windows(2).any(|w| w[0] >= w[1]) {
                return parse(format!("vertices {vs:?} must be strictly increasing"));
            }
            if vs[0] == 0 || *vs.last().unwrap() > file.n {
                return parse(format!("vertices {vs:?} must lie in 1..={}", file.n));
            }
            if entry.multiplicity == 0 || entry.multiplicity >= file.d {
                return parse(format!(
                    "multiplicity {} of {vs:?} must lie in 1..{}",
                    entry.multiplicity, file.d
                ));
            }
            let e = Edge(entry.vertices);
            if h.edges.contains_key(&e) {
                return parse(format!("duplicate hyperedge {e}"));
            }
            h.edges.insert(e, entry.multiplicity);
        }
        Ok(h)
    }
}

impl From<MultiHypergraph> for HypergraphFile {
    fn from(h: MultiHypergraph) -> Self {
        Self::from(&h)
    }
}

impl From<&MultiHypergraph> for HypergraphFile {
    fn from(h: &MultiHypergraph) -> Self {
        Self {
            d: h.d,
            n: h.n,
            edges: h
                .edges()
                .map(|(e, m)| EdgeEntry {
                    vertices: e.0.clone(),
                    multiplicity: m,
                })
                .collect(),
        }
    }
}

/// Knobs for [`random_connected`].
#[derive(Clone, Debug)]
pub struct RandomHypergraphOptions {
    /// Extra edges beyond the spanning ones, drawn from `0..=extra_edges`.
    pub extra_edges: usize,
    /// Probability of adding a loop on some vertex.
    pub loop_probability: f64,
    /// Probability of drawing every multiplicity as a multiple of one proper
    /// divisor `m* > 1` of `d` (when `d` has one).
    pub common_divisor_probability: f64,
}

impl Default for RandomHypergraphOptions {
    fn default() -> Self {
        Self {
            extra_edges: 3,
            loop_probability: 0.2,
            common_divisor_probability: 0.3,
        }
    }
}

/// Samples a connected hypergraph on `n >= 2` vertices.
///
/// Vertices are visited in random order; each spanning edge joins at least
/// one already-covered vertex with at least one new one, so the result is
/// connected by construction.
pub fn random_connected<R: Rng + ?Sized>(
    d: u64,
    n: usize,
    rng: &mut R,
    opts: &RandomHypergraphOptions,
) -> Result<MultiHypergraph> {
    if n < 2 {
        return invalid("a random connected hypergraph needs n >= 2");
    }
    let mut h = MultiHypergraph::new(d, n)?;
    let proper: Vec<u64> = divisors(d)
        .into_iter()
        .filter(|&m| m > 1 && m < d)
        .collect();
    let step = if !proper.is_empty() && rng.random_bool(opts.common_divisor_probability) {
        proper[rng.random_range(0..proper.len())]
    } else {
        1
    };
    let draw_mult = |rng: &mut R| step * rng.random_range(1..d / step);

    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut covered = vec![order[0]];
    let mut next = 1;
    while next < n {
        let fresh = rng.random_range(1..=(n - next).min(3));
        let old = rng.random_range(1..=covered.len().min(3));
        let mut vs: Vec<usize> = covered.choose_multiple(rng, old).copied().collect();
        vs.extend(&order[next..next + fresh]);
        covered.extend(&order[next..next + fresh]);
        next += fresh;
        let m = draw_mult(rng);
        h.shift(Edge::new(vs)?, m);
    }
    for _ in 0..rng.random_range(0..=opts.extra_edges) {
        let size = rng.random_range(2..=n);
        let vs: Vec<usize> = order.choose_multiple(rng, size).copied().collect();
        let m = draw_mult(rng);
        h.shift(Edge::new(vs)?, m);
    }
    if rng.random_bool(opts.loop_probability) {
        let v = rng.random_range(1..=n);
        let m = draw_mult(rng);
        h.shift(Edge::new(vec![v])?, m);
    }
    // Cancellations can in principle disconnect the sample; resample then.
    if h.is_connected() {
        Ok(h)
    } else {
        random_connected(d, n, rng, opts)
    }
}

/// Every connected hypergraph on `n` vertices whose edges have at least
/// `min_edge` vertices, each edge carrying any multiplicity in `0..d`.
/// Fails if there would be more than `cap` candidates to scan.
pub fn enumerate_connected(
    d: u64,
    n: usize,
    min_edge: usize,
    cap: u128,
) -> Result<Vec<MultiHypergraph>> {
    if !(1..=16).contains(&n) {
        return invalid(format!("enumeration supports 1..=16 vertices, got {n}"));
    }
    let candidates: Vec<Edge> = (1u32..1 << n)
        .filter(|mask| mask.count_ones() as usize >= min_edge.max(1))
        .map(|mask| Edge((1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect()))
        .collect();
    let total = (d as u128)
        .checked_pow(candidates.len() as u32)
        .unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::CapExceeded {
            what: "hypergraph enumeration",
            needed: total,
            cap,
        });
    }
    let mut digits = vec![0u64; candidates.len()];
    let mut out = Vec::new();
    loop {
        let mut h = MultiHypergraph::new(d, n)?;
        for (e, &m) in candidates.iter().zip(&digits) {
            if m > 0 {
                h.edges.insert(e.clone(), m);
            }
        }
        if h.is_connected() {
            out.push(h);
        }
        match digits.iter().position(|&m| m + 1 < d) {
            Some(i) => {
                digits[i] += 1;
                digits[..i].iter_mut().for_each(|m| *m = 0);
            }
            None => return Ok(out),
        }
    }
}
