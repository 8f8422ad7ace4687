//! Exact arithmetic in Galois rings GR(q^m, p^m) = `Z_(p^m)[X]/(f)`.
//!
//! The ring is parameterized by a prime p, an extension degree r and a chain
//! length m, with q = p^r. The modulus f is a monic degree-r polynomial over
//! Z_{p^m} that is irreducible modulo p. Elements are canonical coefficient
//! vectors of length r with entries in [0, p^m).
//!
//! Both degenerate shapes are supported: m = 1 gives the finite field F_q
//! and r = 1 gives the integers mod p^m.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the extension degree (coefficients are stored inline).
pub const MAX_DEGREE: usize = 4;

/// Hard cap on the ring order; everything here enumerates elements.
pub const MAX_ORDER: u64 = 1 << 20;

/// A Galois ring element in canonical form: coefficient `c[i]` of X^i,
/// reduced mod p^m, with `c[i] = 0` for i >= r.
///
/// The derived ordering is lexicographic on the coefficient vector with
/// `c[0]` most significant; this is also the ring's enumeration order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem {
    c: [u32; MAX_DEGREE],
}

impl Elem {
    pub fn coeff(&self, i: usize) -> u64 {
        self.c[i] as u64
    }

    /// Coefficient vector (c0, ..., c_{r-1}).
    pub fn coeffs(&self, r: usize) -> Vec<u64> {
        self.c[..r].iter().map(|&c| c as u64).collect()
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&c| c != 0).map_or(0, |i| i);
        let parts: Vec<String> = self.c[..=last].iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A Galois ring GR(q^m, p^m) together with its element enumeration.
#[derive(Clone)]
pub struct GaloisRing {
    p: u64,
    r: usize,
    m: u32,
    q: u64,
    characteristic: u64, // p^m
    order: u64,          // q^m
    modulus: Vec<u64>,   // length r+1, monic
    elems: Vec<Elem>,
    teich: Vec<Elem>,
    teich_by_residue: HashMap<Elem, Elem>,
    residue_ring: Option<Box<GaloisRing>>,
}

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GR({},{})", self.order, self.characteristic)
    }
}

impl PartialEq for GaloisRing {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for GaloisRing {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > MAX_ORDER * MAX_ORDER {
            return None;
        }
    }
    Some(acc)
}

/// Polynomial arithmetic over F_p on plain vectors, used only for the
/// irreducibility check of the modulus.
mod fp_poly {
    /// Remainder of a mod b over F_p; b must be monic.
    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a: Vec<u64> = a.iter().map(|c| c % p).collect();
        let db = b.len() - 1;
        while a.len() > db {
            let lead = *a.last().unwrap();
            let shift = a.len() - 1 - db;
            if lead != 0 {
                for j in 0..=db {
                    a[shift + j] = (a[shift + j] + p - (lead * (b[j] % p)) % p) % p;
                }
            }
            a.pop();
        }
        a
    }
}

/// True iff the monic polynomial `f` (coefficients already reduced mod p) is
/// irreducible over F_p: no monic factor of degree 1..=deg/2 divides it.
fn irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    let mut divisor = vec![0u64; 0];
    for d in 1..=deg / 2 {
        // enumerate all monic degree-d polynomials over F_p
        let count = p.pow(d as u32);
        for code in 0..count {
            divisor.clear();
            let mut c = code;
            for _ in 0..d {
                divisor.push(c % p);
                c /= p;
            }
            divisor.push(1);
            let rem = fp_poly::rem(f, &divisor, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic degree-r polynomial over Z_{p^m} that is
/// irreducible mod p. Coefficients are searched in [0, p^m) with c0 most
/// significant, so the result is deterministic for every (p, r, m).
fn default_modulus(p: u64, r: usize, m: u32) -> Vec<u64> {
    let pm = p.pow(m);
    let mut coeffs = vec![0u64; r]; // c0..c_{r-1}
    loop {
        let mut f: Vec<u64> = coeffs.clone();
        f.push(1);
        let fbar: Vec<u64> = f.iter().map(|c| c % p).collect();
        if irreducible_mod_p(&fbar, p) {
            return f;
        }
        // increment the coefficient vector, c_{r-1} least significant
        let mut i = r;
        loop {
            if i == 0 {
                unreachable!("no irreducible polynomial of degree {} mod {}", r, p);
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < pm {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

impl GaloisRing {
    /// Build GR(q^m, p^m) with q = p^r. When `modulus` is omitted the
    /// lexicographically smallest monic degree-r polynomial over Z_{p^m}
    /// that is irreducible mod p is used.
    pub fn new(p: u64, r: usize, m: u32, modulus: Option<Vec<u64>>) -> Result<GaloisRing> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !(1..=MAX_DEGREE).contains(&r) {
            return Err(Error::UnsupportedDegree { r, max: MAX_DEGREE });
        }
        if m < 1 {
            return Err(Error::InvalidParameter("chain length m must be >= 1".into()));
        }
        let characteristic = checked_pow(p, m)
            .filter(|&c| c <= MAX_ORDER)
            .ok_or(Error::RingTooLarge { order: u64::MAX, cap: MAX_ORDER })?;
        let order = checked_pow(characteristic, r as u32)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(Error::RingTooLarge { order: u64::MAX, cap: MAX_ORDER })?;
        let q = p.pow(r as u32);

        let modulus = match modulus {
            Some(mut f) => {
                if f.len() != r + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected degree {}, got degree {}",
                        r,
                        f.len().saturating_sub(1)
                    )));
                }
                if *f.last().unwrap() % characteristic != 1 {
                    return Err(Error::InvalidModulus("polynomial is not monic".into()));
                }
                for c in f.iter_mut() {
                    *c %= characteristic;
                }
                let fbar: Vec<u64> = f.iter().map(|c| c % p).collect();
                if !irreducible_mod_p(&fbar, p) {
                    return Err(Error::InvalidModulus(format!(
                        "polynomial is reducible mod {}",
                        p
                    )));
                }
                f
            }
            None => default_modulus(p, r, m),
        };

        let mut ring = GaloisRing {
            p,
            r,
            m,
            q,
            characteristic,
            order,
            modulus,
            elems: Vec::new(),
            teich: Vec::new(),
            teich_by_residue: HashMap::new(),
            residue_ring: None,
        };

        // element enumeration, lexicographic with c0 most significant
        let mut elems = Vec::with_capacity(order as usize);
        let mut c = [0u32; MAX_DEGREE];
        'outer: loop {
            elems.push(Elem { c });
            let mut i = r;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                c[i] += 1;
                if (c[i] as u64) < characteristic {
                    break;
                }
                c[i] = 0;
            }
        }
        debug_assert_eq!(elems.len() as u64, order);
        ring.elems = elems;

        if m > 1 {
            let fbar: Vec<u64> = ring.modulus.iter().map(|c| c % p).collect();
            ring.residue_ring = Some(Box::new(GaloisRing::new(p, r, 1, Some(fbar))?));
        }

        // Teichmüller set: the q fixed points of t -> t^q
        let teich: Vec<Elem> = ring
            .elems
            .iter()
            .copied()
            .filter(|&t| ring.pow(t, q) == t)
            .collect();
        let mut by_residue = HashMap::new();
        for &t in &teich {
            by_residue.insert(ring.residue_of(t), t);
        }
        ring.teich = teich;
        ring.teich_by_residue = by_residue;
        Ok(ring)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn extension_degree(&self) -> usize {
        self.r
    }
    pub fn chain_length(&self) -> u32 {
        self.m
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn unit_count(&self) -> u64 {
        if self.m == 1 {
            self.order - 1
        } else {
            self.order - self.order / self.q
        }
    }

    /// The residue field F_q as a Galois ring with m = 1 (self when m = 1).
    pub fn residue_ring(&self) -> &GaloisRing {
        match &self.residue_ring {
            Some(rr) => rr,
            None => self,
        }
    }

    /// All q^m elements in enumeration (lexicographic) order.
    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    /// Position of `x` in the element enumeration.
    pub fn index_of(&self, x: Elem) -> u64 {
        let mut idx = 0u64;
        for i in 0..self.r {
            idx = idx * self.characteristic + x.c[i] as u64;
        }
        idx
    }

    pub fn zero(&self) -> Elem {
        Elem::default()
    }

    pub fn one(&self) -> Elem {
        self.int(1)
    }

    /// The constant polynomial v mod p^m.
    pub fn int(&self, v: u64) -> Elem {
        let mut c = [0u32; MAX_DEGREE];
        c[0] = (v % self.characteristic) as u32;
        Elem { c }
    }

    /// Canonical element from an arbitrary coefficient list (reduced mod p^m,
    /// truncated/zero-padded to degree < r). Errors if too many coefficients.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        if coeffs.len() > self.r {
            return Err(Error::InvalidParameter(format!(
                "element has {} coefficients but ring degree is {}",
                coeffs.len(),
                self.r
            )));
        }
        let mut c = [0u32; MAX_DEGREE];
        for (i, &v) in coeffs.iter().enumerate() {
            c[i] = (v % self.characteristic) as u32;
        }
        Ok(Elem { c })
    }

    fn debug_check(&self, x: Elem) {
        debug_assert!(
            x.c[..self.r].iter().all(|&c| (c as u64) < self.characteristic)
                && x.c[self.r..].iter().all(|&c| c == 0),
            "element {:?} does not belong to {:?}",
            x,
            self
        );
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.debug_check(x);
        self.debug_check(y);
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.r {
            c[i] = ((x.c[i] as u64 + y.c[i] as u64) % self.characteristic) as u32;
        }
        Elem { c }
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn neg(&self, x: Elem) -> Elem {
        self.debug_check(x);
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.r {
            c[i] = ((self.characteristic - x.c[i] as u64) % self.characteristic) as u32;
        }
        Elem { c }
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.debug_check(x);
        self.debug_check(y);
        let r = self.r;
        let pm = self.characteristic;
        let mut prod = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..r {
            if x.c[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + x.c[i] as u64 * y.c[j] as u64) % pm;
            }
        }
        // fold X^d for d >= r using X^r = -(f0 + ... + f_{r-1} X^{r-1})
        for d in (r..2 * r - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..r {
                let sub = (lead * self.modulus[j]) % pm;
                prod[d - r + j] = (prod[d - r + j] + pm - sub) % pm;
            }
        }
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..r {
            c[i] = prod[i] as u32;
        }
        Elem { c }
    }

    pub fn pow(&self, x: Elem, mut e: u64) -> Elem {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// A unit is an element whose residue mod p is nonzero.
    pub fn is_unit(&self, x: Elem) -> bool {
        x.c[..self.r].iter().any(|&c| c as u64 % self.p != 0)
    }

    /// Multiplicative inverse, computed as x^(|R*| - 1).
    pub fn inverse(&self, x: Elem) -> Result<Elem> {
        if !self.is_unit(x) {
            return Err(Error::NonUnit);
        }
        let inv = self.pow(x, self.unit_count() - 1);
        debug_assert_eq!(self.mul(x, inv), self.one());
        Ok(inv)
    }

    /// Coefficientwise reduction mod p; the result is an element of
    /// `residue_ring()`. This is the ring homomorphism onto F_q.
    pub fn residue_of(&self, x: Elem) -> Elem {
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.r {
            c[i] = (x.c[i] as u64 % self.p) as u32;
        }
        Elem { c }
    }

    /// Largest j <= m with p^j dividing every coefficient (height of 0 is m).
    pub fn height(&self, x: Elem) -> u32 {
        let mut h = 0;
        let mut pj = 1u64;
        while h < self.m {
            pj *= self.p;
            if x.c[..self.r].iter().any(|&c| c as u64 % pj != 0) {
                return h;
            }
            h += 1;
        }
        self.m
    }

    /// Homogeneous weight: 0 on zero, q^{m-1} on the nonzero minimal ideal
    /// p^{m-1}R, and (q-1) q^{m-2} elsewhere.
    pub fn hom_weight(&self, x: Elem) -> u64 {
        let h = self.height(x);
        if h == self.m {
            0
        } else if h == self.m - 1 {
            self.q.pow(self.m - 1)
        } else {
            (self.q - 1) * self.q.pow(self.m - 2)
        }
    }

    /// The q solutions of t^q = t, in enumeration order.
    pub fn teichmuller_set(&self) -> &[Elem] {
        &self.teich
    }

    /// Digits (t_0, ..., t_{m-1}) of the Teichmüller decomposition
    /// x = sum_i p^i t_i with every t_i in the Teichmüller set.
    ///
    /// Digit i depends only on x mod p^{i+1}, so peeling canonical
    /// representatives digit by digit yields the unique decomposition; the
    /// residual after the last digit is annihilated by p^m.
    pub fn teichmuller_decompose(&self, x: Elem) -> Vec<Elem> {
        let mut digits = Vec::with_capacity(self.m as usize);
        let mut rest = x;
        for _ in 0..self.m {
            let t = self.teich_by_residue[&self.residue_of(rest)];
            digits.push(t);
            let diff = self.sub(rest, t);
            // every coefficient of rest - t is divisible by p; peel one digit
            let mut c = [0u32; MAX_DEGREE];
            for i in 0..self.r {
                debug_assert_eq!(diff.c[i] as u64 % self.p, 0);
                c[i] = (diff.c[i] as u64 / self.p) as u32;
            }
            rest = Elem { c };
        }
        digits
    }

    /// Inverse of `teichmuller_decompose`: sum_i p^i t_i.
    pub fn teichmuller_reconstruct(&self, digits: &[Elem]) -> Elem {
        let mut acc = self.zero();
        let mut pi = 1u64;
        for &t in digits {
            acc = self.add(acc, self.mul(self.int(pi), t));
            pi *= self.p;
        }
        acc
    }

    /// Text form used in config files and certificates:
    /// `GR(p^m=4,q=4,f=[1,1,1])`.
    pub fn spec_string(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!(
            "GR(p^m={},q={},f=[{}])",
            self.characteristic,
            self.q,
            coeffs.join(",")
        )
    }

    /// Parse the `spec_string` form back into a ring.
    pub fn from_spec_string(s: &str) -> Result<GaloisRing> {
        let bad = |msg: &str| Error::InvalidParameter(format!("ring spec '{}': {}", s, msg));
        let inner = s
            .strip_prefix("GR(")
            .and_then(|t| t.strip_suffix(")"))
            .ok_or_else(|| bad("expected GR(...)"))?;
        let mut pm_val: Option<u64> = None;
        let mut q_val: Option<u64> = None;
        let mut f_val: Option<Vec<u64>> = None;
        // split on commas that are not inside the f=[...] list
        let mut parts = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        for ch in inner.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    cur.push(ch);
                }
                ']' => {
                    depth -= 1;
                    cur.push(ch);
                }
                ',' if depth == 0 => {
                    parts.push(std::mem::take(&mut cur));
                }
                _ => cur.push(ch),
            }
        }
        if !cur.is_empty() {
            parts.push(cur);
        }
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match key {
                "p^m" => pm_val = Some(value.parse().map_err(|_| bad("bad p^m"))?),
                "q" => q_val = Some(value.parse().map_err(|_| bad("bad q"))?),
                "f" => {
                    let list = value
                        .strip_prefix('[')
                        .and_then(|t| t.strip_suffix(']'))
                        .ok_or_else(|| bad("f must be [c0,c1,...]"))?;
                    let coeffs: std::result::Result<Vec<u64>, _> =
                        list.split(',').map(|t| t.trim().parse()).collect();
                    f_val = Some(coeffs.map_err(|_| bad("bad coefficient in f"))?);
                }
                _ => return Err(bad(&format!("unknown key '{}'", key))),
            }
        }
        let pm = pm_val.ok_or_else(|| bad("missing p^m"))?;
        let q = q_val.ok_or_else(|| bad("missing q"))?;
        let f = f_val.ok_or_else(|| bad("missing f"))?;
        let (p, m) = split_prime_power(pm).ok_or_else(|| bad("p^m is not a prime power"))?;
        let (qp, r) = split_prime_power(q).ok_or_else(|| bad("q is not a prime power"))?;
        if qp != p {
            return Err(bad("p^m and q have different prime bases"));
        }
        GaloisRing::new(p, r as usize, m, Some(f))
    }

    /// Element rendered as a coefficient tuple, `5` for r = 1 and `(1,3)`
    /// otherwise.
    pub fn format_elem(&self, x: Elem) -> String {
        if self.r == 1 {
            format!("{}", x.c[0])
        } else {
            let parts: Vec<String> = x.c[..self.r].iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Short human name: `Z8` for r = 1, `F4` for m = 1, `GR(16,4)` else.
    pub fn display_name(&self) -> String {
        if self.r == 1 {
            format!("Z{}", self.characteristic)
        } else if self.m == 1 {
            format!("F{}", self.q)
        } else {
            format!("GR({},{})", self.order, self.characteristic)
        }
    }
}

/// Parse a ring name as used on the command line: `Z8`, `F9`, `GR(16,4)`
/// (order, characteristic) or a full `GR(p^m=..,q=..,f=[..])` spec string.
/// Named forms use the default modulus.
pub fn ring_from_name(name: &str) -> Result<GaloisRing> {
    let name = name.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse ring name '{}'", name));
    if name.starts_with("GR(p^m=") {
        return GaloisRing::from_spec_string(name);
    }
    if let Some(rest) = name.strip_prefix('Z').or_else(|| name.strip_prefix('z')) {
        let n: u64 = rest.parse().map_err(|_| bad())?;
        let (p, m) = split_prime_power(n).ok_or_else(bad)?;
        return GaloisRing::new(p, 1, m, None);
    }
    if let Some(rest) = name.strip_prefix('F').or_else(|| name.strip_prefix('f')) {
        let q: u64 = rest.parse().map_err(|_| bad())?;
        let (p, r) = split_prime_power(q).ok_or_else(bad)?;
        return GaloisRing::new(p, r as usize, 1, None);
    }
    if let Some(inner) = name
        .strip_prefix("GR(")
        .and_then(|t| t.strip_suffix(')'))
    {
        let (order_s, char_s) = inner.split_once(',').ok_or_else(bad)?;
        let order: u64 = order_s.trim().parse().map_err(|_| bad())?;
        let characteristic: u64 = char_s.trim().parse().map_err(|_| bad())?;
        let (p, m) = split_prime_power(characteristic).ok_or_else(bad)?;
        let (po, rm) = split_prime_power(order).ok_or_else(bad)?;
        if po != p || rm % m != 0 {
            return Err(bad());
        }
        return GaloisRing::new(p, (rm / m) as usize, m, None);
    }
    Err(bad())
}

/// Decompose n = p^k with p prime; returns (p, k).
pub fn split_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            let mut rest = n;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            return if rest == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}
