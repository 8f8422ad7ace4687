//! Prescribed subgroups of GL(3,R): point/line actions, orbit computation
//! and the condensed incidence system.
//!
//! A matrix A acts on points by x -> normalize(A x) and on lines by
//! l -> normalize(l A^{-1}), which preserves incidence because
//! (l A^{-1}) (A x) = l x. Orbits are computed as generator closures on
//! indices; groups are never enumerated.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::Mat3;
use crate::plane::{normalize, Plane};
use crate::ring::{Elem, GaloisRing};

/// How the prescribed group is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupDirective {
    Trivial,
    Singer,
    Explicit(Vec<Mat3>),
}

impl GroupDirective {
    /// Resolve to a generator list for the given ring.
    pub fn generators(&self, ring: &GaloisRing) -> Result<Vec<Mat3>> {
        match self {
            GroupDirective::Trivial => Ok(Vec::new()),
            GroupDirective::Singer => Ok(vec![singer_lift(ring)?]),
            GroupDirective::Explicit(gens) => {
                for g in gens {
                    if !g.is_invertible(ring) {
                        return Err(Error::SingularMatrix);
                    }
                }
                Ok(gens.clone())
            }
        }
    }
}

/// Image of a point index under A.
pub fn act_on_point(plane: &Plane, a: &Mat3, point: usize) -> Result<usize> {
    let ring = plane.ring();
    if !a.is_invertible(ring) {
        return Err(Error::SingularMatrix);
    }
    let v = a.mul_vec(ring, plane.point(point));
    let n = normalize(ring, &v)?;
    Ok(plane.point_index(&n).expect("action image is a plane point"))
}

/// Image of a line index under A (dual coordinates times A^{-1}).
pub fn act_on_line(plane: &Plane, a: &Mat3, line: usize) -> Result<usize> {
    let ring = plane.ring();
    let inv = a.inverse(ring)?;
    let v = inv.vec_mul(ring, plane.line(line));
    let n = normalize(ring, &v)?;
    Ok(plane.line_index(&n).expect("action image is a plane line"))
}

/// The full point permutation induced by A.
pub fn point_permutation(plane: &Plane, a: &Mat3) -> Result<Vec<u32>> {
    let ring = plane.ring();
    if !a.is_invertible(ring) {
        return Err(Error::SingularMatrix);
    }
    let mut perm = Vec::with_capacity(plane.num_points());
    for p in 0..plane.num_points() {
        let v = a.mul_vec(ring, plane.point(p));
        let n = normalize(ring, &v)?;
        perm.push(plane.point_index(&n).expect("plane point") as u32);
    }
    Ok(perm)
}

/// The full line permutation induced by A.
pub fn line_permutation(plane: &Plane, a: &Mat3) -> Result<Vec<u32>> {
    let ring = plane.ring();
    let inv = a.inverse(ring)?;
    let mut perm = Vec::with_capacity(plane.num_lines());
    for l in 0..plane.num_lines() {
        let v = inv.vec_mul(ring, plane.line(l));
        let n = normalize(ring, &v)?;
        perm.push(plane.line_index(&n).expect("plane line") as u32);
    }
    Ok(perm)
}

/// Orbits of the generated group on points and lines. Orbit ids are assigned
/// by smallest member index, so the numbering is deterministic.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub point_orbits: Vec<Vec<u32>>,
    pub line_orbits: Vec<Vec<u32>>,
    pub point_orbit_of: Vec<u32>,
    pub line_orbit_of: Vec<u32>,
}

fn close_orbits(n: usize, perms: &[Vec<u32>]) -> (Vec<Vec<u32>>, Vec<u32>) {
    let mut orbit_of = vec![u32::MAX; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        let mut members = vec![start as u32];
        orbit_of[start] = id;
        let mut frontier = vec![start as u32];
        while let Some(x) = frontier.pop() {
            for perm in perms {
                let y = perm[x as usize];
                if orbit_of[y as usize] == u32::MAX {
                    orbit_of[y as usize] = id;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    (orbits, orbit_of)
}

/// Generator closure on point and line indices. Errors if the point and line
/// orbit counts disagree (they cannot for a group action on a finite plane
/// with equal point/line counts and preserved incidence, so a mismatch
/// signals a broken generator set).
pub fn orbits(generators: &[Mat3], plane: &Plane) -> Result<OrbitPartition> {
    let mut point_perms = Vec::with_capacity(generators.len());
    let mut line_perms = Vec::with_capacity(generators.len());
    for g in generators {
        point_perms.push(point_permutation(plane, g)?);
        line_perms.push(line_permutation(plane, g)?);
    }
    let (point_orbits, point_orbit_of) = close_orbits(plane.num_points(), &point_perms);
    let (line_orbits, line_orbit_of) = close_orbits(plane.num_lines(), &line_perms);
    if point_orbits.len() != line_orbits.len() {
        return Err(Error::OrbitCountMismatch {
            points: point_orbits.len(),
            lines: line_orbits.len(),
        });
    }
    Ok(OrbitPartition {
        point_orbits,
        line_orbits,
        point_orbit_of,
        line_orbit_of,
    })
}

/// The condensed incidence system M^G: rows are line orbits, columns point
/// orbits, entries count the points of one line representative inside each
/// point orbit.
#[derive(Clone, Debug)]
pub struct CondensedSystem {
    pub matrix: Vec<Vec<u32>>,
    pub point_orbit_sizes: Vec<u64>,
    pub line_orbit_sizes: Vec<u64>,
}

impl CondensedSystem {
    pub fn num_orbits(&self) -> usize {
        self.point_orbit_sizes.len()
    }
}

pub fn condense(plane: &Plane, partition: &OrbitPartition) -> CondensedSystem {
    let k = partition.line_orbits.len();
    let mut matrix = vec![vec![0u32; partition.point_orbits.len()]; k];
    for (i, orbit) in partition.line_orbits.iter().enumerate() {
        let rep = orbit[0] as usize;
        for &p in plane.points_on_line(rep) {
            matrix[i][partition.point_orbit_of[p as usize] as usize] += 1;
        }
    }
    CondensedSystem {
        matrix,
        point_orbit_sizes: partition.point_orbits.iter().map(|o| o.len() as u64).collect(),
        line_orbit_sizes: partition.line_orbits.iter().map(|o| o.len() as u64).collect(),
    }
}

// ---------------------------------------------------------------------------
// Singer lift
// ---------------------------------------------------------------------------

/// Arithmetic in the cubic extension S = R[Y]/(h) with h monic of degree 3
/// and irreducible over the residue field. Elements are coordinate triples
/// over R in the basis (1, Y, Y^2).
struct CubicExt<'a> {
    ring: &'a GaloisRing,
    /// h0, h1, h2 of h = Y^3 + h2 Y^2 + h1 Y + h0.
    h: [Elem; 3],
}

type ExtElem = [Elem; 3];

impl<'a> CubicExt<'a> {
    fn one(&self) -> ExtElem {
        [self.ring.one(), self.ring.zero(), self.ring.zero()]
    }

    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let rg = self.ring;
        let mut prod = [rg.zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = rg.add(prod[i + j], rg.mul(a[i], b[j]));
            }
        }
        for d in (3..5).rev() {
            let lead = prod[d];
            if lead == rg.zero() {
                continue;
            }
            prod[d] = rg.zero();
            for j in 0..3 {
                prod[d - 3 + j] = rg.sub(prod[d - 3 + j], rg.mul(lead, self.h[j]));
            }
        }
        [prod[0], prod[1], prod[2]]
    }

    fn pow(&self, x: &ExtElem, mut e: u64) -> ExtElem {
        let mut base = *x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A lifted Singer cycle: a matrix A in GL(3,R) whose residue image
/// generates a Singer cycle of PG(2,F_q) and whose induced collineation of
/// PHG(2,R) has order exactly s = q^2 + q + 1.
///
/// Construction: multiplication by a generator of the Teichmüller group of
/// the cubic extension S = `R[Y]/(h)`, written as a matrix in the basis
/// (1, Y, Y^2). The Teichmüller group of S is cyclic of order q^3 - 1 and
/// meets the scalars of R exactly in the Teichmüller group of R (order
/// q - 1), so the induced collineation has order (q^3-1)/(q-1) = s. Note
/// that A^s is a unit scalar matrix, not the identity: a matrix of order s
/// reducing to a Singer generator cannot exist, since the residue of A
/// must have matrix order (q-1)s.
pub fn singer_lift(ring: &GaloisRing) -> Result<Mat3> {
    let q = ring.q();
    let s = q * q + q + 1;
    let rr = ring.residue_ring();

    // monic cubic over R with coefficients lifted from F_q, irreducible mod p
    // (a cubic over a field is irreducible iff it has no root)
    let lifts: Vec<Elem> = rr
        .elements()
        .iter()
        .map(|&e| ring.from_coeffs(&e.coeffs(rr.extension_degree())).unwrap())
        .collect();
    let mut modulus = None;
    'search: for &h0 in &lifts {
        for &h1 in &lifts {
            for &h2 in &lifts {
                if !ring.is_unit(h0) {
                    continue 'search; // constant term 0 mod p means root 0
                }
                let has_root = rr.elements().iter().any(|&t| {
                    // t^3 + h2 t^2 + h1 t + h0 over F_q
                    let t2 = rr.mul(t, t);
                    let t3 = rr.mul(t2, t);
                    let mut v = t3;
                    v = rr.add(v, rr.mul(ring.residue_of(h2), t2));
                    v = rr.add(v, rr.mul(ring.residue_of(h1), t));
                    v = rr.add(v, ring.residue_of(h0));
                    v == rr.zero()
                });
                if !has_root {
                    modulus = Some([h0, h1, h2]);
                    break 'search;
                }
            }
        }
    }
    let h = modulus
        .ok_or_else(|| Error::SingerConstruction("no irreducible cubic found".into()))?;
    let ext = CubicExt { ring, h };

    // Teichmüller group of S: the nonzero fixed points of t -> t^(q^3),
    // cyclic of order q^3 - 1. Find a generator.
    let q3 = q * q * q;
    let factors = prime_factors(q3 - 1);
    let mut tau = None;
    'gen: for &a0 in ring.elements() {
        for &a1 in ring.elements() {
            for &a2 in ring.elements() {
                let t = [a0, a1, a2];
                if t == [ring.zero(); 3] {
                    continue;
                }
                if ext.pow(&t, q3) != t {
                    continue;
                }
                let full_order = factors
                    .iter()
                    .all(|&f| ext.pow(&t, (q3 - 1) / f) != ext.one());
                if full_order {
                    tau = Some(t);
                    break 'gen;
                }
            }
        }
    }
    let tau =
        tau.ok_or_else(|| Error::SingerConstruction("no Teichmüller generator found".into()))?;

    // matrix of x -> tau * x in the basis (1, Y, Y^2); column j = tau * Y^j
    let y = [ring.zero(), ring.one(), ring.zero()];
    let mut cols = [tau, ext.mul(&tau, &y), [ring.zero(); 3]];
    cols[2] = ext.mul(&cols[1], &y);
    let mut e = [[ring.zero(); 3]; 3];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..3 {
            e[i][j] = col[i];
        }
    }
    let a = Mat3::from_rows(e);

    // verify the collineation order and the residue Singer action
    if !a.is_invertible(ring) {
        return Err(Error::SingerConstruction("lift is singular".into()));
    }
    let mut power = a;
    for t in 1..s {
        if power.is_unit_scalar(ring) {
            return Err(Error::SingerConstruction(format!(
                "collineation order {} < {}",
                t, s
            )));
        }
        power = power.mul(ring, &a);
    }
    if !power.is_unit_scalar(ring) {
        return Err(Error::SingerConstruction(format!(
            "collineation order exceeds {}",
            s
        )));
    }
    let abar = a.residue(ring);
    let mut seen = std::collections::HashSet::new();
    let mut v = [rr.one(), rr.zero(), rr.zero()];
    for _ in 0..s {
        seen.insert(v);
        v = normalize(rr, &abar.mul_vec(rr, &v))?;
    }
    if seen.len() as u64 != s {
        return Err(Error::SingerConstruction(
            "residue action is not transitive on PG(2,F_q)".into(),
        ));
    }
    Ok(a)
}

/// Convenience: orbit sizes as a sorted histogram (size -> count).
pub fn orbit_size_histogram(partition: &OrbitPartition) -> HashMap<usize, usize> {
    let mut h = HashMap::new();
    for o in &partition.point_orbits {
        *h.entry(o.len()).or_insert(0) += 1;
    }
    h
}
