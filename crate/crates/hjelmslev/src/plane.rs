//! The projective Hjelmslev plane PHG(2,R).
//!
//! Points are the free rank-1 submodules of R^3 and lines the free rank-2
//! submodules, with incidence given by inclusion. Both are represented by
//! normalized unimodular coordinate triples: a point by a generator, a line
//! by a dual (annihilating) functional. A triple is normalized by scaling
//! with the inverse of its leftmost unit coordinate, so representatives are
//! unique and enumeration order is reproducible.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ring::{Elem, GaloisRing};

pub type Vector3 = [Elem; 3];

/// Scale a unimodular triple so its leftmost unit coordinate becomes 1.
pub fn normalize(ring: &GaloisRing, v: &Vector3) -> Result<Vector3> {
    let pos = v
        .iter()
        .position(|&c| ring.is_unit(c))
        .ok_or(Error::NotUnimodular)?;
    let u = ring.inverse(v[pos]).expect("leftmost unit coordinate");
    Ok([ring.mul(u, v[0]), ring.mul(u, v[1]), ring.mul(u, v[2])])
}

/// PHG(2,R) with its full incidence structure precomputed.
pub struct Plane {
    ring: GaloisRing,
    points: Vec<Vector3>,
    lines: Vec<Vector3>,
    point_ids: HashMap<Vector3, u32>,
    line_ids: HashMap<Vector3, u32>,
    points_on_line: Vec<Vec<u32>>,
    lines_through_point: Vec<Vec<u32>>,
    residue_plane: Option<Box<Plane>>,
    point_class: Vec<u32>,
    line_class: Vec<u32>,
}

/// All normalized unimodular triples, sorted lexicographically by the ring's
/// element order. Nonunits in front of the leading 1 guarantee uniqueness.
fn enumerate_normalized(ring: &GaloisRing) -> Vec<Vector3> {
    let one = ring.one();
    let elems = ring.elements();
    let nonunits: Vec<Elem> = elems.iter().copied().filter(|&e| !ring.is_unit(e)).collect();
    let mut out = Vec::new();
    for &a in elems {
        for &b in elems {
            out.push([one, a, b]);
        }
    }
    for &z in &nonunits {
        for &b in elems {
            out.push([z, one, b]);
        }
    }
    for &z1 in &nonunits {
        for &z2 in &nonunits {
            out.push([z1, z2, one]);
        }
    }
    out.sort_unstable();
    out
}

impl Plane {
    pub fn new(ring: &GaloisRing) -> Result<Plane> {
        let reps = enumerate_normalized(ring);
        let points = reps.clone();
        let lines = reps;
        let point_ids: HashMap<Vector3, u32> = points
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let line_ids = point_ids.clone();

        let mut points_on_line = vec![Vec::new(); lines.len()];
        let mut lines_through_point = vec![Vec::new(); points.len()];
        for (li, l) in lines.iter().enumerate() {
            for (pi, p) in points.iter().enumerate() {
                if dot(ring, l, p) == ring.zero() {
                    points_on_line[li].push(pi as u32);
                    lines_through_point[pi].push(li as u32);
                }
            }
        }

        let (residue_plane, point_class, line_class) = if ring.chain_length() > 1 {
            let rp = Plane::new(ring.residue_ring())?;
            let class_of = |v: &Vector3| -> Result<u32> {
                let rv = [
                    ring.residue_of(v[0]),
                    ring.residue_of(v[1]),
                    ring.residue_of(v[2]),
                ];
                let norm = normalize(ring.residue_ring(), &rv)?;
                Ok(rp.point_ids[&norm])
            };
            let pc: Result<Vec<u32>> = points.iter().map(&class_of).collect();
            let lc: Result<Vec<u32>> = lines.iter().map(&class_of).collect();
            (Some(Box::new(rp)), pc?, lc?)
        } else {
            let ids: Vec<u32> = (0..points.len() as u32).collect();
            (None, ids.clone(), ids)
        };

        Ok(Plane {
            ring: ring.clone(),
            points,
            lines,
            point_ids,
            line_ids,
            points_on_line,
            lines_through_point,
            residue_plane,
            point_class,
            line_class,
        })
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn point(&self, idx: usize) -> &Vector3 {
        &self.points[idx]
    }

    pub fn line(&self, idx: usize) -> &Vector3 {
        &self.lines[idx]
    }

    pub fn point_index(&self, v: &Vector3) -> Option<usize> {
        self.point_ids.get(v).map(|&i| i as usize)
    }

    pub fn line_index(&self, v: &Vector3) -> Option<usize> {
        self.line_ids.get(v).map(|&i| i as usize)
    }

    pub fn incident(&self, point: usize, line: usize) -> bool {
        dot(&self.ring, &self.lines[line], &self.points[point]) == self.ring.zero()
    }

    pub fn points_on_line(&self, line: usize) -> &[u32] {
        &self.points_on_line[line]
    }

    pub fn lines_through_point(&self, point: usize) -> &[u32] {
        &self.lines_through_point[point]
    }

    /// Constant number of points per line (checked across lines in tests).
    pub fn points_per_line(&self) -> usize {
        self.points_on_line[0].len()
    }

    /// 0/1 incidence matrix; rows are lines, columns are points.
    pub fn incidence_matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.points.len()]; self.lines.len()];
        for (li, row) in m.iter_mut().enumerate() {
            for &pi in &self.points_on_line[li] {
                row[pi as usize] = 1;
            }
        }
        m
    }

    /// Neighborhood class of a point: the index of its residue image in
    /// PG(2, F_q). For m = 1 every point is its own class.
    pub fn neighbor_class(&self, point: usize) -> usize {
        self.point_class[point] as usize
    }

    pub fn line_neighbor_class(&self, line: usize) -> usize {
        self.line_class[line] as usize
    }

    pub fn num_neighbor_classes(&self) -> usize {
        match &self.residue_plane {
            Some(rp) => rp.num_points(),
            None => self.points.len(),
        }
    }

    pub fn residue_plane(&self) -> Option<&Plane> {
        self.residue_plane.as_deref()
    }

    /// Debug/certificate dump: one `idx: (c0,c1,c2)` line per point or line.
    pub fn dump(&self, lines: bool) -> String {
        let reps = if lines { &self.lines } else { &self.points };
        let mut out = String::new();
        for (i, v) in reps.iter().enumerate() {
            let coords: Vec<String> = v.iter().map(|&c| self.ring.format_elem(c)).collect();
            let _ = writeln!(out, "{}: ({})", i, coords.join(","));
        }
        out
    }
}

pub fn dot(ring: &GaloisRing, a: &Vector3, b: &Vector3) -> Elem {
    let mut acc = ring.zero();
    for i in 0..3 {
        acc = ring.add(acc, ring.mul(a[i], b[i]));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, r: usize, m: u32) -> GaloisRing {
        GaloisRing::new(p, r, m, None).unwrap()
    }

    fn expected_size(ring: &GaloisRing) -> usize {
        let q = ring.q();
        let m = ring.chain_length();
        ((q * q + q + 1) * q.pow(2 * (m - 1))) as usize
    }

    #[test]
    fn plane_cardinalities() {
        for (p, r, m, pts) in [(2u64, 1usize, 2u32, 28), (3, 1, 2, 117), (2, 2, 2, 336)] {
            let rg = ring(p, r, m);
            let plane = Plane::new(&rg).unwrap();
            assert_eq!(plane.num_points(), pts);
            assert_eq!(plane.num_lines(), pts);
            assert_eq!(plane.num_points(), expected_size(&rg));
        }
    }

    #[test]
    fn normalize_examples() {
        let g = ring(2, 2, 2);
        let x = g.from_coeffs(&[0, 1]).unwrap();
        let v = [x, g.one(), g.zero()];
        let n = normalize(&g, &v).unwrap();
        assert_eq!(n, [g.one(), g.from_coeffs(&[3, 3]).unwrap(), g.zero()]);
        // already normalized stays put
        let w = [g.one(), g.int(2), x];
        assert_eq!(normalize(&g, &w).unwrap(), w);
        // non-unimodular rejected
        let z4 = ring(2, 1, 2);
        let bad = [z4.int(2), z4.int(2), z4.int(2)];
        assert!(matches!(normalize(&z4, &bad), Err(Error::NotUnimodular)));
    }

    #[test]
    fn normalize_is_a_quotient_map() {
        for g in [ring(2, 2, 2), ring(2, 1, 3)] {
            let units: Vec<Elem> = g
                .elements()
                .iter()
                .copied()
                .filter(|&e| g.is_unit(e))
                .collect();
            let mut state = 0x1234_5678_9abc_def0u64;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let elems = g.elements();
            let mut tried = 0;
            while tried < 500 {
                let v = [
                    elems[(next() % g.order()) as usize],
                    elems[(next() % g.order()) as usize],
                    elems[(next() % g.order()) as usize],
                ];
                if !v.iter().any(|&c| g.is_unit(c)) {
                    continue;
                }
                tried += 1;
                let s = units[(next() % units.len() as u64) as usize];
                let sv = [g.mul(s, v[0]), g.mul(s, v[1]), g.mul(s, v[2])];
                assert_eq!(normalize(&g, &v).unwrap(), normalize(&g, &sv).unwrap());
                // idempotent
                let n = normalize(&g, &v).unwrap();
                assert_eq!(normalize(&g, &n).unwrap(), n);
            }
        }
    }

    #[test]
    fn incidence_basics() {
        let g = ring(2, 2, 2);
        let plane = Plane::new(&g).unwrap();
        let p = plane.point_index(&[g.one(), g.zero(), g.zero()]).unwrap();
        let l_yes = plane.line_index(&[g.zero(), g.zero(), g.one()]).unwrap();
        let l_no = plane.line_index(&[g.one(), g.zero(), g.zero()]).unwrap();
        assert!(plane.incident(p, l_yes));
        assert!(!plane.incident(p, l_no));
        // every line of PHG(2,GR(16,4)) carries exactly 20 points
        for li in 0..plane.num_lines() {
            assert_eq!(plane.points_on_line(li).len(), 20);
        }
    }

    #[test]
    fn z4_incidence_matrix_row_sums() {
        let z4 = ring(2, 1, 2);
        let plane = Plane::new(&z4).unwrap();
        let m = plane.incidence_matrix();
        assert_eq!(m.len(), 28);
        assert_eq!(m[0].len(), 28);
        for row in &m {
            assert_eq!(row.iter().map(|&x| x as usize).sum::<usize>(), 6);
        }
        // duality: multiset of row sums equals multiset of column sums
        let mut col_sums = vec![0usize; 28];
        for row in &m {
            for (j, &x) in row.iter().enumerate() {
                col_sums[j] += x as usize;
            }
        }
        let mut row_sums: Vec<usize> = m
            .iter()
            .map(|r| r.iter().map(|&x| x as usize).sum())
            .collect();
        row_sums.sort_unstable();
        col_sums.sort_unstable();
        assert_eq!(row_sums, col_sums);
    }

    #[test]
    fn points_per_line_matches_brute_force_formula() {
        // q^{m-1}(q+1), derived by counting on constructed planes
        for (p, r, m) in [(2u64, 1usize, 2u32), (3, 1, 2), (2, 2, 2)] {
            let g = ring(p, r, m);
            let plane = Plane::new(&g).unwrap();
            let expect = (g.q().pow(g.chain_length() - 1) * (g.q() + 1)) as usize;
            for li in 0..plane.num_lines() {
                assert_eq!(plane.points_on_line(li).len(), expect);
            }
            for pi in 0..plane.num_points() {
                assert_eq!(plane.lines_through_point(pi).len(), expect);
            }
        }
    }

    #[test]
    fn neighbor_classes_partition_points() {
        let g = ring(2, 2, 2);
        let plane = Plane::new(&g).unwrap();
        assert_eq!(plane.num_neighbor_classes(), 21);
        let mut counts = vec![0usize; plane.num_neighbor_classes()];
        for p in 0..plane.num_points() {
            counts[plane.neighbor_class(p)] += 1;
        }
        assert!(counts.iter().all(|&c| c == 16));

        let z9 = ring(3, 1, 2);
        let plane9 = Plane::new(&z9).unwrap();
        assert_eq!(plane9.num_neighbor_classes(), 13);
        let mut counts9 = [0usize; 13];
        for p in 0..plane9.num_points() {
            counts9[plane9.neighbor_class(p)] += 1;
        }
        assert!(counts9.iter().all(|&c| c == 9));

        // residue-equal points share a class
        for p in 0..plane.num_points() {
            for q in 0..plane.num_points() {
                let rp: Vec<Elem> = plane.point(p).iter().map(|&c| g.residue_of(c)).collect();
                let rq: Vec<Elem> = plane.point(q).iter().map(|&c| g.residue_of(c)).collect();
                if rp == rq {
                    assert_eq!(plane.neighbor_class(p), plane.neighbor_class(q));
                }
            }
        }
    }

    #[test]
    fn two_lines_can_meet_in_more_than_one_point() {
        let z4 = ring(2, 1, 2);
        let plane = Plane::new(&z4).unwrap();
        let mut witnessed = false;
        'outer: for l1 in 0..plane.num_lines() {
            for l2 in (l1 + 1)..plane.num_lines() {
                let s1: std::collections::HashSet<u32> =
                    plane.points_on_line(l1).iter().copied().collect();
                let common = plane
                    .points_on_line(l2)
                    .iter()
                    .filter(|p| s1.contains(p))
                    .count();
                if common > 1 {
                    witnessed = true;
                    break 'outer;
                }
            }
        }
        assert!(witnessed, "m >= 2 plane must have non-projective line pairs");
    }

    #[test]
    fn line_point_sets_are_free_rank_two_modules() {
        let z4 = ring(2, 1, 2);
        let plane = Plane::new(&z4).unwrap();
        for li in 0..plane.num_lines() {
            let pts = plane.points_on_line(li);
            // find two points with independent residues
            let x = *plane.point(pts[0] as usize);
            let rx: Vec<Elem> = x.iter().map(|&c| z4.residue_of(c)).collect();
            let mut basis = None;
            for &pj in &pts[1..] {
                let y = *plane.point(pj as usize);
                let ry: Vec<Elem> = y.iter().map(|&c| z4.residue_of(c)).collect();
                if ry != rx {
                    basis = Some(y);
                    break;
                }
            }
            let y = basis.expect("line has points in two residue classes");
            let mut span = std::collections::HashSet::new();
            for &a in z4.elements() {
                for &b in z4.elements() {
                    let v = [
                        z4.add(z4.mul(a, x[0]), z4.mul(b, y[0])),
                        z4.add(z4.mul(a, x[1]), z4.mul(b, y[1])),
                        z4.add(z4.mul(a, x[2]), z4.mul(b, y[2])),
                    ];
                    span.insert(v);
                }
            }
            // free of rank 2: the span has |R|^2 distinct vectors
            assert_eq!(span.len(), 16);
            // and its unimodular members normalize exactly to the line's points
            let mut found = std::collections::HashSet::new();
            for v in &span {
                if v.iter().any(|&c| z4.is_unit(c)) {
                    let n = normalize(&z4, v).unwrap();
                    found.insert(plane.point_index(&n).unwrap() as u32);
                }
            }
            let expect: std::collections::HashSet<u32> = pts.iter().copied().collect();
            assert_eq!(found, expect);
        }
    }

    #[test]
    fn dump_format() {
        let z4 = ring(2, 1, 2);
        let plane = Plane::new(&z4).unwrap();
        let dump = plane.dump(false);
        let first = dump.lines().next().unwrap();
        assert_eq!(first, "0: (0,0,1)");
    }
}
