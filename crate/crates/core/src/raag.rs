//! Right-angled Artin groups: words, normal forms and the truncated Magnus
//! map into the free partially commutative power series algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Finite simple undirected graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge {u}-{v} uses a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("repeated edge {u}-{v}")));
            }
        }
        Ok(Self {
            vertex_count,
            edges: set,
        })
    }

    pub fn edgeless(n: usize) -> Self {
        Self::new(n, &[]).expect("no edges")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).expect("simple graph")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("simple graph")
    }

    /// First line the vertex count, then one `u v` edge per line (0-based).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|_| Error::Parse("vertex count must be a nonnegative integer".into()))?;
        let mut edges = Vec::new();
        for line in lines {
            let ends: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad vertex `{t}`"))))
                .collect::<Result<_>>()?;
            let [u, v] = ends[..] else {
                return Err(Error::Parse(format!("expected `u v`, got `{line}`")));
            };
            edges.push((u, v));
        }
        Self::new(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.vertex_count)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// `⟨V | [u, v] for every edge {u, v}⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaagPresentation {
    graph: Graph,
}

impl RaagPresentation {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn generator_count(&self) -> usize {
        self.graph.vertex_count
    }

    /// Pairs of generators that commute.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        self.graph.edges().collect()
    }

    pub fn commute(&self, u: usize, v: usize) -> bool {
        u == v || self.graph.adjacent(u, v)
    }
}

pub fn raag_from_graph(g: &Graph) -> RaagPresentation {
    RaagPresentation { graph: g.clone() }
}

/// Word as a sequence of syllables `v^e`, with `e ≠ 0` and no two adjacent
/// syllables on the same vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaagWord {
    letters: Vec<(usize, i64)>,
}

impl RaagWord {
    pub fn new(letters: &[(usize, i64)]) -> Self {
        let mut w = Self::default();
        for &(v, e) in letters {
            w.push(v, e);
        }
        w
    }

    pub fn identity() -> Self {
        Self::default()
    }

    fn push(&mut self, v: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((u, f)) if *u == v => {
                *f += e;
                if *f == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push((v, e)),
        }
    }

    /// Fails when a letter names a vertex outside `g`.
    pub fn check(&self, g: &Graph) -> Result<()> {
        match self.letters.iter().find(|(v, _)| *v >= g.vertex_count) {
            Some((v, _)) => Err(Error::InvalidGraph(format!(
                "word uses vertex {} but the graph has {} vertices",
                vertex_name(*v),
                g.vertex_count
            ))),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Sum of the absolute values of the exponents.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &(v, e) in &other.letters {
            w.push(v, e);
        }
        w
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|&(v, e)| (v, -e)).collect(),
        }
    }

    /// Comma-separated tokens such as `a`, `b^-1`, `c^2`. Vertices are letters
    /// `a`, `b`, … or explicit indices `v0`, `v1`, ….
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split(',').map(str::trim) {
            if token.is_empty() {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => (
                    name.trim(),
                    exp.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?,
                ),
                None => (token, 1),
            };
            letters.push((parse_vertex(name)?, exp));
        }
        Ok(Self::new(&letters))
    }
}

fn parse_vertex(name: &str) -> Result<usize> {
    let bad = || Error::Parse(format!("bad vertex name `{name}`"));
    if let Some(rest) = name.strip_prefix('v') {
        if !rest.is_empty() {
            return rest.parse().map_err(|_| bad());
        }
    }
    match name.as_bytes() {
        [c] if c.is_ascii_lowercase() => Ok((c - b'a') as usize),
        _ => name.parse().map_err(|_| bad()),
    }
}

fn vertex_name(v: usize) -> String {
    if v < 26 {
        ((b'a' + v as u8) as char).to_string()
    } else {
        format!("v{v}")
    }
}

impl fmt::Display for RaagWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    vertex_name(v)
                } else {
                    format!("{}^{e}", vertex_name(v))
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Repeatedly takes the smallest item that commutes past everything before it.
fn lex_least<T: Copy>(items: &[T], vertex: impl Fn(&T) -> usize, commute: impl Fn(usize, usize) -> bool) -> Vec<T> {
    let mut rest: Vec<T> = items.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            let v = vertex(&rest[i]);
            if rest[..i].iter().all(|x| vertex(x) != v && commute(vertex(x), v))
                && best.is_none_or(|b| v < vertex(&rest[b]))
            {
                best = Some(i);
            }
        }
        let i = best.expect("the first item can always move to the front");
        out.push(rest.remove(i));
    }
    out
}

/// Canonical representative: free and commutation-assisted cancellation,
/// then the lexicographically least arrangement of commuting syllables.
pub fn normal_form(g: &Graph, w: &RaagWord) -> RaagWord {
    let mut syl: Vec<(usize, i64)> = Vec::new();
    for &(v, e) in &w.letters {
        // merge with the last syllable on v that commutes to the end
        let mut hit = None;
        for i in (0..syl.len()).rev() {
            let u = syl[i].0;
            if u == v {
                hit = Some(i);
                break;
            }
            if !g.adjacent(u, v) {
                break;
            }
        }
        match hit {
            Some(i) => {
                syl[i].1 += e;
                if syl[i].1 == 0 {
                    syl.remove(i);
                }
            }
            None => syl.push((v, e)),
        }
    }
    let ordered = lex_least(&syl, |s| s.0, |a, b| g.adjacent(a, b));
    RaagWord { letters: ordered }
}

/// Element of the free partially commutative power series algebra over `Q`,
/// truncated above `degree`. Monomials are stored as their lexicographically
/// least rearrangement under commutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    degree: usize,
    coefficients: BTreeMap<Vec<usize>, BigRational>,
}

impl TruncatedSeries {
    pub fn one(degree: usize) -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(Vec::new(), BigRational::one());
        Self {
            degree,
            coefficients,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.degree)
    }

    pub fn coefficient(&self, g: &Graph, monomial: &[usize]) -> BigRational {
        self.coefficients
            .get(&canonical_monomial(g, monomial))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Nonzero terms in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &BigRational)> {
        self.coefficients.iter().map(|(m, c)| (m.as_slice(), c))
    }

    /// `(1 + X_v)^e` truncated, via generalized binomial coefficients.
    fn vertex_power(degree: usize, v: usize, e: i64) -> Self {
        let mut coefficients = BTreeMap::new();
        let mut c = BigRational::one();
        for k in 0..=degree {
            if c.is_zero() {
                break;
            }
            coefficients.insert(vec![v; k], c.clone());
            let k = k as i64;
            c *= BigRational::new(BigInt::from(e - k), BigInt::from(k + 1));
        }
        Self {
            degree,
            coefficients,
        }
    }

    pub fn mul(&self, other: &Self, g: &Graph) -> Self {
        let degree = self.degree.min(other.degree);
        let mut coefficients: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
        for (a, x) in &self.coefficients {
            for (b, y) in &other.coefficients {
                if a.len() + b.len() > degree {
                    continue;
                }
                let mut m = a.clone();
                m.extend_from_slice(b);
                let entry = coefficients
                    .entry(canonical_monomial(g, &m))
                    .or_insert_with(BigRational::zero);
                *entry += x * y;
            }
        }
        coefficients.retain(|_, c| !c.is_zero());
        Self {
            degree,
            coefficients,
        }
    }

    /// Terms as `coefficient*monomial`, e.g. `1*1 + -1*XbXa`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|(m, c)| {
                let name = if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter().map(|&v| format!("X{}", vertex_name(v))).collect::<Vec<_>>().join("")
                };
                format!("{c}*{name}")
            })
            .collect();
        parts.join(" + ")
    }
}

fn canonical_monomial(g: &Graph, m: &[usize]) -> Vec<usize> {
    lex_least(m, |&v| v, |a, b| g.adjacent(a, b))
}

/// Image of `w` under `v ↦ 1 + X_v`, truncated above degree `d`.
pub fn magnus_image(g: &Graph, w: &RaagWord, d: usize) -> TruncatedSeries {
    w.letters
        .iter()
        .fold(TruncatedSeries::one(d), |acc, &(v, e)| {
            acc.mul(&TruncatedSeries::vertex_power(d, v, e), g)
        })
}

pub const RTFN_MAX_VERTICES: usize = 4;
pub const RTFN_MAX_LEN: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtfnReport {
    pub max_len: usize,
    pub words_checked: usize,
    /// Distinct nontrivial normal forms among the enumerated words.
    pub nontrivial_elements: usize,
    /// A nontrivial element whose truncated image is 1, if any.
    pub counterexample: Option<RaagWord>,
    pub pass: bool,
}

/// Checks that every nontrivial element given by a word of length at most
/// `max_len` has truncated Magnus image different from 1 at degree `max_len`.
pub fn rtfn_witness(g: &Graph, max_len: usize) -> Result<RtfnReport> {
    if max_len == 0 {
        return Err(Error::ResourceLimit("max_len must be at least 1".into()));
    }
    if g.vertex_count > RTFN_MAX_VERTICES || max_len > RTFN_MAX_LEN {
        return Err(Error::ResourceLimit(format!(
            "at most {RTFN_MAX_VERTICES} vertices and length {RTFN_MAX_LEN} are supported"
        )));
    }
    let alphabet: Vec<(usize, i64)> = (0..g.vertex_count)
        .flat_map(|v| [(v, 1), (v, -1)])
        .collect();
    let mut words = vec![Vec::<(usize, i64)>::new()];
    let mut layer = words.clone();
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    let forms: BTreeSet<RaagWord> = words
        .par_iter()
        .map(|w| normal_form(g, &RaagWord::new(w)))
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let forms: Vec<RaagWord> = forms.into_iter().collect();
    let counterexample = forms
        .par_iter()
        .find_first(|w| magnus_image(g, w, max_len).is_one())
        .cloned();
    Ok(RtfnReport {
        max_len,
        words_checked: words.len(),
        nontrivial_elements: forms.len(),
        pass: counterexample.is_none(),
        counterexample,
    })
}
