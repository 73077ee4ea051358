//! Kochen-Specker ray sets, their orthogonality structure, and an exhaustive
//! {0,1}-colouring search.
//!
//! A colouring assigns each ray 0 or 1 so that no orthogonal pair has two 1s
//! and every orthogonal triple has exactly one 1. A set with no such
//! colouring is a Kochen-Specker set.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Ray3;

pub const BUILTIN_SETS: [&str; 2] = ["peres33", "axes3"];

#[derive(Debug, Clone, PartialEq)]
pub struct RaySet {
    name: String,
    rays: Vec<Ray3>,
}

impl RaySet {
    /// Build a set, dropping rays equal (up to sign) to an earlier one.
    pub fn new(name: impl Into<String>, rays: impl IntoIterator<Item = Ray3>) -> Self {
        let mut kept: Vec<Ray3> = Vec::new();
        for r in rays {
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        RaySet {
            name: name.into(),
            rays: kept,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rays(&self) -> &[Ray3] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Parse the ray-file format: a `name: <text>` header, then one ray per
    /// line as three decimal components separated by whitespace or commas.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name: Option<String> = None;
        let mut rays = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if name.is_none() {
                let rest = line.strip_prefix("name:").ok_or_else(|| Error::RayFile {
                    line: i + 1,
                    msg: "expected `name:` header".into(),
                })?;
                name = Some(rest.trim().to_string());
                continue;
            }
            let parts: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if parts.len() != 3 {
                return Err(Error::RayFile {
                    line: i + 1,
                    msg: format!("expected 3 components, got {}", parts.len()),
                });
            }
            let mut c = [0.0; 3];
            for (slot, p) in c.iter_mut().zip(&parts) {
                *slot = p.parse().map_err(|_| Error::RayFile {
                    line: i + 1,
                    msg: format!("bad number `{p}`"),
                })?;
            }
            let ray = Ray3::from_components(c).map_err(|e| Error::RayFile {
                line: i + 1,
                msg: e.to_string(),
            })?;
            rays.push(ray);
        }
        let name = name.ok_or(Error::RayFile {
            line: 0,
            msg: "missing `name:` header".into(),
        })?;
        Ok(RaySet::new(name, rays))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    /// Serialise in the ray-file format with 17 significant digits.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("name: {}\n", self.name);
        for r in &self.rays {
            let c = r.components();
            let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", c[0], c[1], c[2]);
        }
        s
    }
}

/// The Peres 33-ray set: rays whose squared components are a permutation of
/// (0,0,1), (0,1,1), (0,1,2) or (1,1,2), i.e. components in {0, ±1, ±√2}.
fn peres33() -> RaySet {
    let values = [0.0, 1.0, -1.0, 2f64.sqrt(), -(2f64.sqrt())];
    let patterns: [[u8; 3]; 4] = [[0, 0, 1], [0, 1, 1], [0, 1, 2], [1, 1, 2]];
    let mut rays = Vec::new();
    for &x in &values {
        for &y in &values {
            for &z in &values {
                let mut sq = [x, y, z].map(|v: f64| (v * v).round() as u8);
                sq.sort_unstable();
                if patterns.contains(&sq) {
                    rays.push(Ray3::new(x, y, z).expect("nonzero by pattern"));
                }
            }
        }
    }
    RaySet::new("peres33", rays)
}

pub fn builtin_rayset(name: &str) -> Result<RaySet> {
    match name {
        "peres33" => Ok(peres33()),
        "axes3" => Ok(RaySet::new("axes3", (0..3).map(Ray3::axis))),
        other => Err(Error::UnknownSet(other.to_string())),
    }
}

/// Orthogonal pairs and triples of a ray set, as index tuples in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoStructure {
    pub pairs: Vec<(usize, usize)>,
    pub triples: Vec<(usize, usize, usize)>,
}

pub fn ortho_structure(set: &RaySet) -> OrthoStructure {
    let rays = set.rays();
    let n = rays.len();
    let mut adj = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rays[i].is_orthogonal(&rays[j]) {
                adj[i][j] = true;
                adj[j][i] = true;
                pairs.push((i, j));
            }
        }
    }
    let mut triples = Vec::new();
    for &(i, j) in &pairs {
        for k in (j + 1)..n {
            if adj[i][k] && adj[j][k] {
                triples.push((i, j, k));
            }
        }
    }
    OrthoStructure { pairs, triples }
}

impl OrthoStructure {
    /// Every triple's three pairs are present in `pairs`.
    pub fn is_consistent(&self) -> bool {
        self.triples.iter().all(|&(i, j, k)| {
            [(i, j), (i, k), (j, k)]
                .iter()
                .all(|p| self.pairs.binary_search(p).is_ok())
        })
    }

    /// Number of constraint violations of a full assignment.
    pub fn violations(&self, colour: &[bool]) -> usize {
        let pair_bad = self
            .pairs
            .iter()
            .filter(|&&(i, j)| colour[i] && colour[j])
            .count();
        let triple_bad = self
            .triples
            .iter()
            .filter(|&&(i, j, k)| {
                [colour[i], colour[j], colour[k]]
                    .iter()
                    .filter(|&&c| c)
                    .count()
                    != 1
            })
            .count();
        pair_bad + triple_bad
    }

    /// A uniformly random orthogonal pair in random order.
    pub fn pick_pair<R: Rng + ?Sized>(&self, set: &RaySet, rng: &mut R) -> Result<(Ray3, Ray3)> {
        if self.pairs.is_empty() {
            return Err(Error::NoOrthogonalPair);
        }
        let (i, j) = self.pairs[rng.random_range(0..self.pairs.len())];
        let (a, b) = (set.rays()[i], set.rays()[j]);
        Ok(if rng.random::<bool>() { (b, a) } else { (a, b) })
    }
}

pub fn pick_orthogonal_pair<R: Rng + ?Sized>(set: &RaySet, rng: &mut R) -> Result<(Ray3, Ray3)> {
    ortho_structure(set).pick_pair(set, rng)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColouringResult {
    Colourable { assignment: Vec<bool> },
    Uncolourable { nodes_explored: u64 },
}

impl ColouringResult {
    pub fn is_colourable(&self) -> bool {
        matches!(self, ColouringResult::Colourable { .. })
    }
}

struct Search<'a> {
    triples: &'a [(usize, usize, usize)],
    neighbours: Vec<Vec<usize>>,
    triples_of: Vec<Vec<usize>>,
    nodes: u64,
}

impl Search<'_> {
    /// Set `v := val` and propagate; returns false on conflict.
    fn assign(&self, colour: &mut [Option<bool>], v: usize, val: bool) -> bool {
        let mut queue = vec![(v, val)];
        while let Some((v, val)) = queue.pop() {
            match colour[v] {
                Some(c) if c == val => continue,
                Some(_) => return false,
                None => colour[v] = Some(val),
            }
            if val {
                for &n in &self.neighbours[v] {
                    match colour[n] {
                        Some(true) => return false,
                        Some(false) => {}
                        None => queue.push((n, false)),
                    }
                }
            }
            for &t in &self.triples_of[v] {
                let (a, b, c) = self.triples[t];
                let members = [a, b, c];
                let ones = members.iter().filter(|&&m| colour[m] == Some(true)).count();
                let open: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&m| colour[m].is_none())
                    .collect();
                match (ones, open.len()) {
                    (n, _) if n > 1 => return false,
                    (0, 0) => return false,
                    (0, 1) => queue.push((open[0], true)),
                    (1, _) => queue.extend(open.iter().map(|&m| (m, false))),
                    _ => {}
                }
            }
        }
        true
    }

    fn run(&mut self, colour: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
        self.nodes += 1;
        // Branch on a ray of some triple that still lacks its 1.
        let pivot = self.triples.iter().find_map(|&(a, b, c)| {
            let m = [a, b, c];
            if m.iter().any(|&x| colour[x] == Some(true)) {
                None
            } else {
                m.iter().copied().find(|&x| colour[x].is_none())
            }
        });
        let Some(v) = pivot else {
            return Some(colour);
        };
        for val in [true, false] {
            let mut next = colour.clone();
            if self.assign(&mut next, v, val) {
                if let Some(done) = self.run(next) {
                    return Some(done);
                }
            }
        }
        None
    }
}

/// Exhaustive backtracking with constraint propagation. `Uncolourable` is
/// only returned after every branch has been refuted.
pub fn colouring_search(set: &RaySet) -> ColouringResult {
    let structure = ortho_structure(set);
    colouring_search_with(set.len(), &structure)
}

pub fn colouring_search_with(n: usize, structure: &OrthoStructure) -> ColouringResult {
    let mut neighbours = vec![Vec::new(); n];
    for &(i, j) in &structure.pairs {
        neighbours[i].push(j);
        neighbours[j].push(i);
    }
    let mut triples_of = vec![Vec::new(); n];
    for (t, &(i, j, k)) in structure.triples.iter().enumerate() {
        triples_of[i].push(t);
        triples_of[j].push(t);
        triples_of[k].push(t);
    }
    let mut search = Search {
        triples: &structure.triples,
        neighbours,
        triples_of,
        nodes: 0,
    };
    match search.run(vec![None; n]) {
        Some(colour) => ColouringResult::Colourable {
            assignment: colour.into_iter().map(|c| c.unwrap_or(false)).collect(),
        },
        None => ColouringResult::Uncolourable {
            nodes_explored: search.nodes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};

    #[test]
    fn axes3_structure() {
        let s = builtin_rayset("axes3").unwrap();
        assert_eq!(s.len(), 3);
        let o = ortho_structure(&s);
        assert_eq!(o.pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(o.triples, vec![(0, 1, 2)]);
    }

    #[test]
    fn non_orthogonal_pair_has_no_structure() {
        let s = RaySet::new("two", [Ray3::axis(0), Ray3::new(1.0, 1.0, 0.0).unwrap()]);
        let o = ortho_structure(&s);
        assert!(o.pairs.is_empty() && o.triples.is_empty());
        assert_eq!(
            colouring_search(&s),
            ColouringResult::Colourable {
                assignment: vec![false, false]
            }
        );
    }

    #[test]
    fn unknown_set() {
        assert!(matches!(
            builtin_rayset("cabello18"),
            Err(Error::UnknownSet(_))
        ));
    }

    #[test]
    fn dedup_is_sign_insensitive() {
        let s = RaySet::new(
            "d",
            [
                Ray3::axis(0),
                Ray3::new(-1.0, 0.0, 0.0).unwrap(),
                Ray3::axis(1),
            ],
        );
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn axes3_colouring() {
        let s = builtin_rayset("axes3").unwrap();
        match colouring_search(&s) {
            ColouringResult::Colourable { assignment } => {
                assert_eq!(assignment.iter().filter(|&&c| c).count(), 1);
                assert_eq!(ortho_structure(&s).violations(&assignment), 0);
            }
            other => panic!("axes3 should be colourable, got {other:?}"),
        }
    }

    #[test]
    fn empty_set_is_colourable() {
        let s = RaySet::new("empty", []);
        assert_eq!(
            colouring_search(&s),
            ColouringResult::Colourable { assignment: vec![] }
        );
    }

    #[test]
    fn independent_triples_stay_colourable() {
        // A rotated frame sharing no orthogonality with the axes.
        let c = 0.6;
        let s = 0.8;
        let rot = [
            Ray3::new(c, s, 0.0).unwrap(),
            Ray3::new(-s * 0.6, c * 0.6, 0.8).unwrap(),
            Ray3::new(s * 0.8, -c * 0.8, 0.6).unwrap(),
        ];
        let set = RaySet::new("axes+rot", (0..3).map(Ray3::axis).chain(rot));
        let o = ortho_structure(&set);
        assert_eq!(o.triples.len(), 2);
        match colouring_search(&set) {
            ColouringResult::Colourable { assignment } => assert_eq!(o.violations(&assignment), 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn file_round_trip() {
        let s = builtin_rayset("peres33").unwrap();
        let back = RaySet::parse(&s.to_file_string()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn file_parse_errors() {
        assert!(RaySet::parse("1 0 0\n").is_err());
        assert!(RaySet::parse("name: x\n1 0\n").is_err());
        assert!(RaySet::parse("name: x\n1 0 zz\n").is_err());
        assert!(RaySet::parse("name: x\n0 0 0\n").is_err());
        let s = RaySet::parse("# comment\nname: tri\n1, 0, 0 # x\n0 1 0\n\n0 0 1\n").unwrap();
        assert_eq!(s.name(), "tri");
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn pick_pair_determinism() {
        let s = builtin_rayset("axes3").unwrap();
        let a = pick_orthogonal_pair(&s, &mut substream(5, Stream::Game)).unwrap();
        let b = pick_orthogonal_pair(&s, &mut substream(5, Stream::Game)).unwrap();
        assert_eq!(a, b);
        assert!(a.0.is_orthogonal(&a.1));
        let lonely = RaySet::new("one", [Ray3::axis(0)]);
        assert!(matches!(
            pick_orthogonal_pair(&lonely, &mut substream(5, Stream::Game)),
            Err(Error::NoOrthogonalPair)
        ));
    }
}
