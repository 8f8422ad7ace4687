//! 3x3 matrices over a Galois ring, with the adjugate-based inverse used for
//! the line action of GL(3,R).

use crate::error::{Error, Result};
use crate::ring::{Elem, GaloisRing};

/// Row-major 3x3 matrix; `e[row][col]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat3 {
    pub e: [[Elem; 3]; 3],
}

impl Mat3 {
    pub fn identity(ring: &GaloisRing) -> Mat3 {
        let mut e = [[ring.zero(); 3]; 3];
        for i in 0..3 {
            e[i][i] = ring.one();
        }
        Mat3 { e }
    }

    pub fn from_rows(rows: [[Elem; 3]; 3]) -> Mat3 {
        Mat3 { e: rows }
    }

    pub fn mul(&self, ring: &GaloisRing, other: &Mat3) -> Mat3 {
        let mut e = [[ring.zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = ring.zero();
                for k in 0..3 {
                    acc = ring.add(acc, ring.mul(self.e[i][k], other.e[k][j]));
                }
                e[i][j] = acc;
            }
        }
        Mat3 { e }
    }

    /// Column-vector action A * x.
    pub fn mul_vec(&self, ring: &GaloisRing, x: &[Elem; 3]) -> [Elem; 3] {
        let mut out = [ring.zero(); 3];
        for i in 0..3 {
            let mut acc = ring.zero();
            for k in 0..3 {
                acc = ring.add(acc, ring.mul(self.e[i][k], x[k]));
            }
            out[i] = acc;
        }
        out
    }

    /// Row-vector action x * A (used for dual coordinates).
    pub fn vec_mul(&self, ring: &GaloisRing, x: &[Elem; 3]) -> [Elem; 3] {
        let mut out = [ring.zero(); 3];
        for j in 0..3 {
            let mut acc = ring.zero();
            for k in 0..3 {
                acc = ring.add(acc, ring.mul(x[k], self.e[k][j]));
            }
            out[j] = acc;
        }
        out
    }

    pub fn det(&self, ring: &GaloisRing) -> Elem {
        let e = &self.e;
        let m = |a: Elem, b: Elem| ring.mul(a, b);
        let t1 = m(e[0][0], ring.sub(m(e[1][1], e[2][2]), m(e[1][2], e[2][1])));
        let t2 = m(e[0][1], ring.sub(m(e[1][0], e[2][2]), m(e[1][2], e[2][0])));
        let t3 = m(e[0][2], ring.sub(m(e[1][0], e[2][1]), m(e[1][1], e[2][0])));
        ring.add(ring.sub(t1, t2), t3)
    }

    pub fn is_invertible(&self, ring: &GaloisRing) -> bool {
        ring.is_unit(self.det(ring))
    }

    /// `adj(A)[j][i] = (-1)^(i+j) minor(i,j)`; A * adj(A) = det(A) * I.
    pub fn adjugate(&self, ring: &GaloisRing) -> Mat3 {
        let e = &self.e;
        let minor = |i: usize, j: usize| {
            let rows: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            ring.sub(
                ring.mul(e[rows[0]][cols[0]], e[rows[1]][cols[1]]),
                ring.mul(e[rows[0]][cols[1]], e[rows[1]][cols[0]]),
            )
        };
        let mut out = [[ring.zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let c = minor(i, j);
                out[j][i] = if (i + j) % 2 == 0 { c } else { ring.neg(c) };
            }
        }
        Mat3 { e: out }
    }

    /// Inverse via adjugate and determinant; errors when det is not a unit.
    pub fn inverse(&self, ring: &GaloisRing) -> Result<Mat3> {
        let det = self.det(ring);
        let det_inv = ring.inverse(det).map_err(|_| Error::SingularMatrix)?;
        let adj = self.adjugate(ring);
        let mut e = [[ring.zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = ring.mul(adj.e[i][j], det_inv);
            }
        }
        Ok(Mat3 { e })
    }

    pub fn pow(&self, ring: &GaloisRing, mut n: u64) -> Mat3 {
        let mut base = *self;
        let mut acc = Mat3::identity(ring);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(ring, &base);
            }
            base = base.mul(ring, &base);
            n >>= 1;
        }
        acc
    }

    /// Entrywise residue image over the residue field.
    pub fn residue(&self, ring: &GaloisRing) -> Mat3 {
        let mut e = [[ring.residue_ring().zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = ring.residue_of(self.e[i][j]);
            }
        }
        Mat3 { e }
    }

    /// True iff the matrix is a unit scalar multiple of the identity.
    pub fn is_unit_scalar(&self, ring: &GaloisRing) -> bool {
        let d = self.e[0][0];
        if !ring.is_unit(d) {
            return false;
        }
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { d } else { ring.zero() };
                if self.e[i][j] != expect {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_identity_holds() {
        let ring = GaloisRing::new(2, 2, 2, None).unwrap();
        let elems = ring.elements();
        let mut state = 0xabcdef12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut tested = 0;
        while tested < 20 {
            let mut e = [[ring.zero(); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    e[i][j] = elems[(next() % ring.order()) as usize];
                }
            }
            let a = Mat3::from_rows(e);
            let det = a.det(&ring);
            let prod = a.mul(&ring, &a.adjugate(&ring));
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { det } else { ring.zero() };
                    assert_eq!(prod.e[i][j], expect);
                }
            }
            if a.is_invertible(&ring) {
                let inv = a.inverse(&ring).unwrap();
                assert_eq!(a.mul(&ring, &inv), Mat3::identity(&ring));
                assert_eq!(inv.mul(&ring, &a), Mat3::identity(&ring));
                tested += 1;
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let ring = GaloisRing::new(2, 1, 2, None).unwrap();
        let mut e = [[ring.zero(); 3]; 3];
        e[0][0] = ring.int(2); // det = 0 mod 4 once a row is non-unit scaled
        let a = Mat3::from_rows(e);
        assert!(!a.is_invertible(&ring));
        assert!(matches!(a.inverse(&ring), Err(Error::SingularMatrix)));
    }
}
