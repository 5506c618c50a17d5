//! Finite fields of order q <= 256.
//!
//! Prime fields use residues mod p. A prime power q = p^k is represented as
//! F_p[X]/(m(X)); an element is encoded as the integer sum c_i p^i of its
//! coefficients on 1, X, ..., X^{k-1}. When no modulus is supplied, the
//! lexicographically smallest monic irreducible of degree k is used
//! (coefficients compared from the constant term upward, as a base-p number).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

pub struct FieldTables {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Cheap handle on an interned finite field.
#[derive(Clone, Copy)]
pub struct Fq(&'static FieldTables);

static FIELDS: OnceLock<Mutex<Vec<&'static FieldTables>>> = OnceLock::new();

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

// Dense polynomial helpers over F_p, used only to build the tables.
fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv_lc = fp_inv(m[dm], p);
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            let c = lead * inv_lc % p;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u32;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn is_irreducible_fp(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    // trial division by every monic polynomial of degree 1..=deg/2
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut f: Vec<u32> = (0..d).map(|i| code / p.pow(i as u32) % p).collect();
            f.push(1);
            if fp_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, k: u32) -> Vec<u8> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    for code in 0..count {
        let mut m: Vec<u32> = (0..k).map(|i| code / p.pow(i) % p).collect();
        m.push(1);
        if m[0] != 0 && is_irreducible_fp(&m, p) {
            return m.into_iter().map(|c| c as u8).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldTables {
    fn build(p: u32, k: u32, modulus: Vec<u8>) -> FieldTables {
        let q = p.pow(k);
        let qs = q as usize;
        let digits = |v: u32| -> Vec<u32> { (0..k).map(|i| v / p.pow(i) % p).collect() };
        let encode = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let m32: Vec<u32> = modulus.iter().map(|&c| c as u32).collect();
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&s) as u8;
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = if k == 1 {
                    vec![prod[0]]
                } else {
                    fp_rem(&prod, &m32, p)
                };
                r.resize(k as usize, 0);
                mul[(a * q + b) as usize] = encode(&r) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        FieldTables {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        }
    }
}

impl Fq {
    /// Field of order `q` with the table-selected modulus.
    pub fn new(q: u32) -> Result<Fq> {
        let (p, k) = match prime_power(q) {
            Some(pk) if q <= 256 => pk,
            _ => return Err(Error::BadFieldOrder(q)),
        };
        Self::intern(p, k, default_modulus(p, k))
    }

    /// Field F_p[X]/(modulus) for a user-supplied monic irreducible modulus
    /// (little-endian coefficients in F_p).
    pub fn with_modulus(p: u32, modulus: &[u8]) -> Result<Fq> {
        if prime_power(p) != Some((p, 1)) || modulus.len() < 2 {
            return Err(Error::BadFieldOrder(p));
        }
        let k = (modulus.len() - 1) as u32;
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 256)
            .ok_or(Error::BadFieldOrder(p))?;
        let m32: Vec<u32> = modulus.iter().map(|&c| c as u32 % p).collect();
        if m32[k as usize] != 1 || !is_irreducible_fp(&m32, p) {
            return Err(Error::Invalid(format!(
                "modulus is not monic irreducible over F_{p}"
            )));
        }
        let _ = q;
        let m: Vec<u8> = m32.iter().map(|&c| c as u8).collect();
        Self::intern(p, k, if k == 1 { vec![0, 1] } else { m })
    }

    fn intern(p: u32, k: u32, modulus: Vec<u8>) -> Result<Fq> {
        let registry = FIELDS.get_or_init(|| Mutex::new(Vec::new()));
        let mut fields = registry.lock().expect("field registry poisoned");
        if let Some(f) = fields
            .iter()
            .find(|f| f.p == p && f.k == k && f.modulus == modulus)
        {
            return Ok(Fq(f));
        }
        let tables: &'static FieldTables = Box::leak(Box::new(FieldTables::build(p, k, modulus)));
        fields.push(tables);
        Ok(Fq(tables))
    }

    pub fn q(self) -> u32 {
        self.0.q
    }
    pub fn characteristic(self) -> u32 {
        self.0.p
    }
    pub fn degree(self) -> u32 {
        self.0.k
    }
    pub fn modulus(self) -> &'static [u8] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        self.add(a, self.0.neg[b as usize])
    }
    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }
    /// Inverse of a nonzero element; `inv(0)` is 0.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        self.0.inv[a as usize]
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        (0..self.0.q).map(|v| v as u8)
    }

    pub fn elem(self, value: u32) -> FqElem {
        FqElem {
            field: self,
            value: (value % self.0.q) as u8,
        }
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.q.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.q)
        } else {
            write!(f, "F_{}[X]/{:?}", self.0.p, self.0.modulus)
        }
    }
}

/// An element of a finite field together with its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FqElem {
    field: Fq,
    value: u8,
}

impl FqElem {
    pub fn field(self) -> Fq {
        self.field
    }
    pub fn value(self) -> u8 {
        self.value
    }
    pub fn is_zero(self) -> bool {
        self.value == 0
    }
    pub fn inv(self) -> Result<FqElem> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FqElem {
            field: self.field,
            value: self.field.inv(self.value),
        })
    }
}

impl Add for FqElem {
    type Output = FqElem;
    fn add(self, rhs: FqElem) -> FqElem {
        FqElem {
            field: self.field,
            value: self.field.add(self.value, rhs.value),
        }
    }
}
impl Sub for FqElem {
    type Output = FqElem;
    fn sub(self, rhs: FqElem) -> FqElem {
        FqElem {
            field: self.field,
            value: self.field.sub(self.value, rhs.value),
        }
    }
}
impl Mul for FqElem {
    type Output = FqElem;
    fn mul(self, rhs: FqElem) -> FqElem {
        FqElem {
            field: self.field,
            value: self.field.mul(self.value, rhs.value),
        }
    }
}
impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        FqElem {
            field: self.field,
            value: self.field.neg(self.value),
        }
    }
}
