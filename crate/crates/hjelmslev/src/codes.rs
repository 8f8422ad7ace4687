//! Ring-linear codes from arcs: homogeneous weight enumerators, line
//! k-types, the generalized Gray map, linearity and distance checks, and the
//! one-step Griesmer residual.
//!
//! An arc of n points yields a rank-3 code of length n over R: the
//! normalized point coordinates become the columns of the generator matrix
//! and the codewords are the R-linear combinations of its three rows. The
//! Gray map sends each symbol to a q^{m-1}-tuple over the residue field and
//! turns homogeneous weight exactly into Hamming weight.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::par;
use crate::plane::{dot, Plane};
use crate::ring::{Elem, GaloisRing};

/// Default cap on full message-space enumeration.
pub const DEFAULT_MAX_CODEWORDS: u64 = 1 << 22;

/// A rank-3 code over R given by the columns of its generator matrix.
pub struct RingLinearCode {
    ring: GaloisRing,
    columns: Vec<[Elem; 3]>,
}

/// Census of codewords by homogeneous weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEnumerator {
    pub counts: BTreeMap<u64, u64>,
}

impl WeightEnumerator {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Minimum nonzero weight; the homogeneous minimum distance of a free
    /// linear code.
    pub fn min_nonzero(&self) -> Option<u64> {
        self.counts.keys().copied().find(|&w| w > 0)
    }
}

impl RingLinearCode {
    /// Columns are the arc points in ascending index order, repeated by
    /// multiplicity for multiarcs.
    pub fn from_arc(points: &[(u32, u32)], plane: &Plane) -> Result<RingLinearCode> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty arc yields no code".into()));
        }
        let mut columns = Vec::new();
        for &(p, mult) in points {
            if p as usize >= plane.num_points() {
                return Err(Error::InvalidParameter(format!(
                    "point index {} out of range",
                    p
                )));
            }
            for _ in 0..mult {
                columns.push(*plane.point(p as usize));
            }
        }
        Ok(RingLinearCode {
            ring: plane.ring().clone(),
            columns,
        })
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn length(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self) -> usize {
        3
    }

    /// Number of messages, q^{3m}; equals the code size for free codes.
    pub fn message_count(&self) -> u64 {
        let n = self.ring.order();
        n * n * n
    }

    /// Message by enumeration index (three base-|R| digits).
    fn message(&self, idx: u64) -> [Elem; 3] {
        let n = self.ring.order();
        let elems = self.ring.elements();
        [
            elems[(idx / (n * n)) as usize],
            elems[(idx / n % n) as usize],
            elems[(idx % n) as usize],
        ]
    }

    fn codeword(&self, msg: &[Elem; 3]) -> Vec<Elem> {
        self.columns
            .iter()
            .map(|col| dot(&self.ring, msg, col))
            .collect()
    }

    /// Exact weight census by full message-space enumeration.
    pub fn hom_weight_enumerator(&self, max_codewords: u64) -> Result<WeightEnumerator> {
        let total = self.message_count();
        if total > max_codewords {
            return Err(Error::EnumerationBudget(format!(
                "{} messages exceed cap {}",
                total, max_codewords
            )));
        }
        // per-element weight lookup to keep the inner loop cheap
        let weight_of: Vec<u64> = self
            .ring
            .elements()
            .iter()
            .map(|&e| self.ring.hom_weight(e))
            .collect();
        let chunk = 256u64;
        let chunks: Vec<u64> = (0..total.div_ceil(chunk)).collect();
        let counts = par::map_reduce(
            &chunks,
            |&c| {
                let mut local: BTreeMap<u64, u64> = BTreeMap::new();
                for idx in c * chunk..((c + 1) * chunk).min(total) {
                    let msg = self.message(idx);
                    let w: u64 = self
                        .columns
                        .iter()
                        .map(|col| weight_of[self.ring.index_of(dot(&self.ring, &msg, col)) as usize])
                        .sum();
                    *local.entry(w).or_insert(0) += 1;
                }
                local
            },
            BTreeMap::new,
            |mut a, b| {
                for (w, c) in b {
                    *a.entry(w).or_insert(0) += c;
                }
                a
            },
        );
        Ok(WeightEnumerator { counts })
    }
}

/// The k-type of a line: a_i counts arc points (with multiplicity) whose
/// functional value against the line has p-adic height i; a_m counts the
/// points on the line.
pub fn line_ktype(points: &[(u32, u32)], line: usize, plane: &Plane) -> Vec<u64> {
    let ring = plane.ring();
    let m = ring.chain_length() as usize;
    let mut a = vec![0u64; m + 1];
    let l = plane.line(line);
    for &(p, mult) in points {
        let v = dot(ring, l, plane.point(p as usize));
        a[ring.height(v) as usize] += mult as u64;
    }
    a
}

/// Census of lines by k-type.
pub fn ktype_census(points: &[(u32, u32)], plane: &Plane) -> BTreeMap<Vec<u64>, u64> {
    let mut census = BTreeMap::new();
    for l in 0..plane.num_lines() {
        *census.entry(line_ktype(points, l, plane)).or_insert(0u64) += 1;
    }
    census
}

/// Reconstruct the weight enumerator from line k-types (chain length 2).
///
/// Nonzero messages are unit multiples of line functionals (weight
/// (q-1) a_0 + q a_1, with q^2 - q of them per line) or p times a unit
/// multiple (weight q a_0, with q - 1 per line neighborhood class, a_0
/// being constant on classes).
pub fn enumerator_from_ktypes(points: &[(u32, u32)], plane: &Plane) -> Result<WeightEnumerator> {
    let ring = plane.ring();
    if ring.chain_length() != 2 {
        return Err(Error::InvalidParameter(
            "k-type reconstruction is implemented for chain length 2".into(),
        ));
    }
    let q = ring.q();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    counts.insert(0, 1);
    let mut class_rep: HashMap<usize, usize> = HashMap::new();
    for l in 0..plane.num_lines() {
        let a = line_ktype(points, l, plane);
        let w = (q - 1) * a[0] + q * a[1];
        *counts.entry(w).or_insert(0) += q * q - q;
        class_rep.entry(plane.line_neighbor_class(l)).or_insert(l);
    }
    for &l in class_rep.values() {
        let a = line_ktype(points, l, plane);
        *counts.entry(q * a[0]).or_insert(0) += q - 1;
    }
    Ok(WeightEnumerator { counts })
}

/// The generalized Gray map on one symbol: for m = 2 and a = t0 + p t1,
/// the q-tuple (residue(t1) + residue(t0) u) indexed by u in F_q; for m = 1
/// the identity. Symbols are indices into the residue field enumeration.
pub fn gray_map(ring: &GaloisRing, a: Elem) -> Result<Vec<u8>> {
    if ring.q() > 256 {
        return Err(Error::InvalidParameter(
            "Gray symbols are stored as bytes; residue fields beyond F_256 are unsupported".into(),
        ));
    }
    match ring.chain_length() {
        1 => Ok(vec![ring.index_of(a) as u8]),
        2 => {
            let rr = ring.residue_ring();
            let digits = ring.teichmuller_decompose(a);
            let t0 = ring.residue_of(digits[0]);
            let t1 = ring.residue_of(digits[1]);
            Ok(rr
                .elements()
                .iter()
                .map(|&u| rr.index_of(rr.add(t1, rr.mul(t0, u))) as u8)
                .collect())
        }
        m => Err(Error::UnsupportedGray { m }),
    }
}

/// ψ applied to every ring element once, indexed by element index.
fn gray_table(ring: &GaloisRing) -> Result<Vec<Vec<u8>>> {
    ring.elements()
        .iter()
        .map(|&e| gray_map(ring, e))
        .collect()
}

/// The Gray image of a code: one word over F_q per message.
pub struct GrayImage {
    pub q: u64,
    pub length: usize,
    pub words: Vec<Vec<u8>>,
    pub distance_invariant: bool,
    /// Whether distance invariance was checked over all words or a sample.
    pub full_distance_check: bool,
    /// Minimum Hamming distance between distinct words. Exact under the full
    /// check; under sampling it is the minimum nonzero weight.
    pub min_distance: u64,
}

fn hamming(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Sample size threshold: codes up to this size get the all-pairs distance
/// check, larger ones a deterministic sample of base words.
const FULL_CHECK_LIMIT: usize = 8192;

pub fn gray_image(code: &RingLinearCode, max_codewords: u64) -> Result<GrayImage> {
    let ring = code.ring();
    let total = code.message_count();
    if total > max_codewords {
        return Err(Error::EnumerationBudget(format!(
            "{} messages exceed cap {}",
            total, max_codewords
        )));
    }
    let table = gray_table(ring)?;
    let symbol_len = table[0].len();
    let words: Vec<Vec<u8>> = par::indexed_map_collect(total as usize, |idx| {
        let msg = code.message(idx as u64);
        let mut word = Vec::with_capacity(code.length() * symbol_len);
        for coord in code.codeword(&msg) {
            word.extend_from_slice(&table[ring.index_of(coord) as usize]);
        }
        word
    });

    // weight distribution = distance distribution from the zero word
    let length = code.length() * symbol_len;
    let zero = vec![0u8; length];
    debug_assert_eq!(words[0], zero);
    let mut reference = vec![0u64; length + 1];
    for w in &words {
        reference[hamming(w, &zero) as usize] += 1;
    }

    let full = words.len() <= FULL_CHECK_LIMIT;
    let base_indices: Vec<usize> = if full {
        (0..words.len()).collect()
    } else {
        let step = words.len() / 64;
        (0..64).map(|i| i * step).collect()
    };
    let results = par::map_collect(&base_indices, |&i| {
        let mut hist = vec![0u64; length + 1];
        let mut min_d = u64::MAX;
        for (j, w) in words.iter().enumerate() {
            let d = hamming(&words[i], w);
            hist[d as usize] += 1;
            if j != i && d < min_d {
                min_d = d;
            }
        }
        (hist == reference, min_d)
    });
    let distance_invariant = results.iter().all(|&(ok, _)| ok);
    let min_distance = if full {
        results.iter().map(|&(_, d)| d).min().unwrap_or(0)
    } else {
        reference
            .iter()
            .enumerate()
            .skip(1)
            .find(|&(_, &c)| c > 0)
            .map(|(d, _)| d as u64)
            .unwrap_or(0)
    };
    Ok(GrayImage {
        q: ring.q(),
        length,
        words,
        distance_invariant,
        full_distance_check: full,
        min_distance,
    })
}

/// Exact linearity check over F_q: the word set must be closed under scalar
/// multiplication and coordinatewise addition. Exits on the first violation.
pub fn is_linear(image: &GrayImage, ring: &GaloisRing) -> bool {
    let rr = ring.residue_ring();
    let q = rr.order() as usize;
    let mut add = vec![vec![0u8; q]; q];
    let mut mul = vec![vec![0u8; q]; q];
    for (i, &a) in rr.elements().iter().enumerate() {
        for (j, &b) in rr.elements().iter().enumerate() {
            add[i][j] = rr.index_of(rr.add(a, b)) as u8;
            mul[i][j] = rr.index_of(rr.mul(a, b)) as u8;
        }
    }
    let set: HashSet<&[u8]> = image.words.iter().map(|w| w.as_slice()).collect();
    let mut buf = vec![0u8; image.length];
    for w in &image.words {
        for lambda in 1..q {
            for (o, &s) in buf.iter_mut().zip(w.iter()) {
                *o = mul[lambda][s as usize];
            }
            if !set.contains(buf.as_slice()) {
                return false;
            }
        }
    }
    for (i, a) in image.words.iter().enumerate() {
        for b in &image.words[i..] {
            for (o, (&x, &y)) in buf.iter_mut().zip(a.iter().zip(b.iter())) {
                *o = add[x as usize][y as usize];
            }
            if !set.contains(buf.as_slice()) {
                return false;
            }
        }
    }
    true
}

/// One step of the Griesmer bound: a linear `[n,k,d]` code over F_q implies a
/// linear `[n-d, k-1, ceil(d/q)]` code.
pub fn griesmer_step(q: u64, n: u64, k: u64, d: u64) -> Result<(u64, u64, u64)> {
    if q < 2 || k < 2 || d < 1 || n < d {
        return Err(Error::InvalidParameter(format!(
            "griesmer step needs q >= 2, k >= 2, 1 <= d <= n, got ({},{},{},{})",
            q, n, k, d
        )));
    }
    Ok((n - d, k - 1, d.div_ceil(q)))
}

/// Iterated Griesmer residuals down to k = 1.
pub fn griesmer_chain(q: u64, mut n: u64, mut k: u64, mut d: u64) -> Vec<(u64, u64, u64)> {
    let mut chain = Vec::new();
    while k >= 2 && d >= 1 && n >= d {
        let (n2, k2, d2) = match griesmer_step(q, n, k, d) {
            Ok(t) => t,
            Err(_) => break,
        };
        chain.push((n2, k2, d2));
        n = n2;
        k = k2;
        d = d2;
    }
    chain
}
