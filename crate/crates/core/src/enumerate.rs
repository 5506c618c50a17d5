//! Exhaustive enumeration of primitive lattices of fixed covolume.
//!
//! Every primitive lattice is produced once, as its column Hermite basis.
//! The search space is the box of Hermite forms with all entries of degree at
//! most the covolume exponent `e`; candidates are filtered by primitivity,
//! exact covolume, and the congruence condition `Lambda in R^d x I^n`.
//!
//! Sharding: shard `k/n` keeps the lattices whose fold
//! `acc = (acc * q + c) mod n` over the first basis column (entries top to
//! bottom, each padded to `e + 1` coefficients, low degree first) equals `k`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::latmod::{maximal_minors, orthogonal_lattice, subsets, MatR, PartialLattice};
use crate::scalars::{Fq, IdealR, Poly};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug)]
pub struct EnumSpec {
    pub q: u32,
    pub big_d: usize,
    pub d: usize,
    pub covol_exp: i64,
    pub ideal: IdealR,
    pub dualize: bool,
}

impl EnumSpec {
    pub fn new(q: u32, big_d: usize, d: usize, covol_exp: i64) -> Result<EnumSpec> {
        let f = Fq::new(q)?;
        let spec = EnumSpec {
            q,
            big_d,
            d,
            covol_exp,
            ideal: IdealR::unit(f),
            dualize: false,
        };
        spec.validate()?;
        Ok(spec)
    }
    pub fn with_ideal(mut self, ideal: IdealR) -> Result<EnumSpec> {
        self.ideal = ideal;
        self.validate()?;
        Ok(self)
    }
    pub fn field(&self) -> Fq {
        self.ideal.field()
    }
    pub fn corank(&self) -> usize {
        self.big_d - self.d
    }
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d >= self.big_d {
            return Err(Error::Invalid(format!(
                "need 1 <= d < D, got d={} D={}",
                self.d, self.big_d
            )));
        }
        if self.covol_exp < 0 {
            return Err(Error::Invalid(
                "covolume exponent must be nonnegative".into(),
            ));
        }
        if self.ideal.field().q() != self.q {
            return Err(Error::FieldMismatch);
        }
        if self.dualize && self.d + 1 != self.big_d {
            return Err(Error::Invalid("duality enumeration needs d = D - 1".into()));
        }
        Ok(())
    }
    /// The congruence condition: last `n` coordinates of every basis vector in `I`.
    pub fn is_horizontal(&self, l: &PartialLattice) -> bool {
        if self.ideal.is_unit() {
            return true;
        }
        let b = l.basis();
        (self.d..self.big_d).all(|i| (0..b.cols()).all(|j| self.ideal.contains(&b[(i, j)])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shard {
    pub index: u64,
    pub count: u64,
}

impl Shard {
    pub const ALL: Shard = Shard { index: 0, count: 1 };

    pub fn of(&self, l: &PartialLattice) -> bool {
        self.count <= 1 || shard_key(l, self.count) == self.index
    }
}

impl FromStr for Shard {
    type Err = Error;
    fn from_str(s: &str) -> Result<Shard> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("shard must be k/n, got {s}")))?;
        let index: u64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad shard index {a}")))?;
        let count: u64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad shard count {b}")))?;
        if count == 0 || index >= count {
            return Err(Error::Parse(format!("shard {index}/{count} out of range")));
        }
        Ok(Shard { index, count })
    }
}

/// Shard index of a lattice among `count` shards.
pub fn shard_key(l: &PartialLattice, count: u64) -> u64 {
    let q = l.field().q() as u64;
    let width = l.covol_exp().max(0) as usize + 1;
    let b = l.basis();
    let mut acc = 0u64;
    for i in 0..b.rows() {
        for k in 0..width {
            acc = (acc * q + b[(i, 0)].coeff(k) as u64) % count;
        }
    }
    acc
}

/// Pivot configurations of the Hermite box: pivot rows and pivot degrees.
fn pivot_configs(spec: &EnumSpec) -> Vec<(Vec<usize>, Vec<usize>)> {
    let e = spec.covol_exp as usize;
    let mut out = Vec::new();
    for rows in subsets(spec.big_d, spec.d) {
        let mut degs = vec![0usize; spec.d];
        loop {
            if degs.iter().sum::<usize>() <= e {
                out.push((rows.clone(), degs.clone()));
            }
            let mut k = 0;
            loop {
                if k == spec.d {
                    break;
                }
                degs[k] += 1;
                if degs[k] <= e {
                    break;
                }
                degs[k] = 0;
                k += 1;
            }
            if k == spec.d {
                break;
            }
        }
    }
    out
}

/// Free coefficient count per entry of a Hermite form with these pivots:
/// `None` for forced zeros, `Some((len, monic))` otherwise.
fn entry_slots(spec: &EnumSpec, rows: &[usize], degs: &[usize]) -> Vec<Option<(usize, bool)>> {
    let e = spec.covol_exp as usize;
    let (big_d, d) = (spec.big_d, spec.d);
    let mut slots = vec![None; big_d * d];
    for j in 0..d {
        for r in 0..big_d {
            let slot = if r < rows[j] {
                None
            } else if r == rows[j] {
                Some((degs[j], true))
            } else if let Some(jj) = rows.iter().position(|&p| p == r) {
                // left of a later pivot: reduced modulo it
                if jj > j {
                    Some((degs[jj], false))
                } else {
                    None
                }
            } else {
                Some((e + 1, false))
            };
            slots[r * d + j] = slot;
        }
    }
    slots
}

/// Number of candidates the Hermite box would visit.
pub fn node_estimate(spec: &EnumSpec) -> u128 {
    let q = spec.q as u128;
    let mut total: u128 = 0;
    for (rows, degs) in pivot_configs(spec) {
        let mut prod: u128 = 1;
        for (len, _) in entry_slots(spec, &rows, &degs).into_iter().flatten() {
            prod = prod.saturating_mul(q.saturating_pow(len as u32));
        }
        total = total.saturating_add(prod);
    }
    total
}

fn check_budget(spec: &EnumSpec, budget: u128) -> Result<()> {
    let needed = node_estimate(spec);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

/// Visit every primitive lattice of the spec in a fixed order; returns the
/// number visited.
pub fn for_each_primitive(
    spec: &EnumSpec,
    shard: Shard,
    budget: u128,
    mut visit: impl FnMut(PartialLattice),
) -> Result<u64> {
    spec.validate()?;
    check_budget(spec, budget)?;
    if spec.dualize {
        let mut dual = spec.clone();
        dual.d = 1;
        dual.dualize = false;
        dual.ideal = IdealR::unit(spec.field());
        let mut count = 0;
        for_each_box(&dual, Shard::ALL, &mut |v: PartialLattice| {
            let l = orthogonal_lattice(&v).expect("rank-1 census is primitive");
            if spec.is_horizontal(&l) && shard.of(&l) {
                count += 1;
                visit(l);
            }
        })?;
        return Ok(count);
    }
    let mut count = 0;
    for_each_box(spec, shard, &mut |l: PartialLattice| {
        count += 1;
        visit(l);
    })?;
    Ok(count)
}

fn for_each_box(
    spec: &EnumSpec,
    shard: Shard,
    visit: &mut dyn FnMut(PartialLattice),
) -> Result<()> {
    if spec.d == 1 {
        return rank_one(spec, shard, visit);
    }
    let f = spec.field();
    let e = spec.covol_exp;
    let (big_d, d) = (spec.big_d, spec.d);
    for (rows, degs) in pivot_configs(spec) {
        let slots = entry_slots(spec, &rows, &degs);
        let live: Vec<(usize, usize, bool)> = slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|(len, monic)| (i, len, monic)))
            .collect();
        let sizes: Vec<u64> = live
            .iter()
            .map(|&(_, len, _)| (f.q() as u64).pow(len as u32))
            .collect();
        let mut idx = vec![0u64; live.len()];
        loop {
            let mut data = vec![Poly::zero(f); big_d * d];
            for (k, &(pos, len, monic)) in live.iter().enumerate() {
                let mut p = Poly::from_code(f, idx[k], len);
                if monic {
                    p = &p + &Poly::monomial(f, 1, len);
                }
                data[pos] = p;
            }
            let b = MatR::from_vec(f, big_d, d, data);
            let minors = maximal_minors(&b);
            let top = minors.iter().filter_map(|(_, m)| m.degree()).max();
            if top == Some(e as usize) {
                let g = minors
                    .iter()
                    .fold(Poly::zero(f), |g, (_, m)| Poly::gcd(&g, m));
                if g.is_one() {
                    let l = PartialLattice::from_hermite(b, e);
                    if spec.is_horizontal(&l) && shard.of(&l) {
                        visit(l);
                    }
                }
            }
            // odometer
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(())
}

/// Rank one: vectors whose first nonzero entry is monic, entries of degree at
/// most `e` with maximum exactly `e`, coprime entries.
fn rank_one(spec: &EnumSpec, shard: Shard, visit: &mut dyn FnMut(PartialLattice)) -> Result<()> {
    let f = spec.field();
    let q = f.q() as u64;
    let e = spec.covol_exp as usize;
    let big_d = spec.big_d;
    let full = q.pow(e as u32 + 1);
    for p in 0..big_d {
        for k in 0..=e {
            let tail = big_d - p - 1;
            let total = q.pow(k as u32) * full.pow(tail as u32);
            for code in 0..total {
                let mut v = vec![Poly::zero(f); big_d];
                let mut c = code;
                let low = Poly::from_code(f, c % q.pow(k as u32), k);
                c /= q.pow(k as u32);
                v[p] = &low + &Poly::monomial(f, 1, k);
                for entry in v.iter_mut().skip(p + 1) {
                    *entry = Poly::from_code(f, c % full, e + 1);
                    c /= full;
                }
                if k != e && v.iter().all(|x| x.degree().is_none_or(|dg| dg < e)) {
                    continue;
                }
                let g = v.iter().fold(
                    Poly::zero(f),
                    |g, x| if g.is_one() { g } else { Poly::gcd(&g, x) },
                );
                if !g.is_one() {
                    continue;
                }
                let l = PartialLattice::from_hermite(MatR::from_vec(f, big_d, 1, v), e as i64);
                if spec.is_horizontal(&l) && shard.of(&l) {
                    visit(l);
                }
            }
        }
    }
    Ok(())
}

/// All lattices of the spec, in enumeration order.
pub fn enum_primitive(spec: &EnumSpec, shard: Shard, budget: u128) -> Result<Vec<PartialLattice>> {
    let mut out = Vec::new();
    for_each_primitive(spec, shard, budget, |l| out.push(l))?;
    Ok(out)
}

/// Rank `D-1` lattices as orthogonals of the rank-1 census.
pub fn enum_by_duality(spec: &EnumSpec, shard: Shard, budget: u128) -> Result<Vec<PartialLattice>> {
    let mut s = spec.clone();
    s.dualize = true;
    enum_primitive(&s, shard, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(q: u32, big_d: usize, d: usize, e: i64) -> usize {
        enum_primitive(
            &EnumSpec::new(q, big_d, d, e).unwrap(),
            Shard::ALL,
            DEFAULT_BUDGET,
        )
        .unwrap()
        .len()
    }

    #[test]
    fn small_censuses() {
        assert_eq!(count(2, 2, 1, 1), 6);
        assert_eq!(count(3, 2, 1, 1), 24);
        assert_eq!(count(2, 3, 1, 2), 336);
        assert_eq!(count(2, 2, 1, 0), 3);
    }

    #[test]
    fn listed_lattices() {
        let spec = EnumSpec::new(2, 2, 1, 1).unwrap();
        let mut got: Vec<Vec<Vec<u8>>> = enum_primitive(&spec, Shard::ALL, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .map(|l| {
                l.basis()
                    .entries()
                    .iter()
                    .map(|p| p.coeffs().to_vec())
                    .collect()
            })
            .collect();
        got.sort();
        let mut want = vec![
            vec![vec![0, 1], vec![1]],
            vec![vec![0, 1], vec![1, 1]],
            vec![vec![1, 1], vec![1]],
            vec![vec![1, 1], vec![0, 1]],
            vec![vec![1], vec![0, 1]],
            vec![vec![1], vec![1, 1]],
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn generic_path_matches_duality() {
        let spec = EnumSpec::new(2, 3, 2, 2).unwrap();
        let mut a = enum_primitive(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        let mut b = enum_by_duality(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a.len(), 336);
        assert_eq!(a, b);
    }

    #[test]
    fn shards_partition() {
        let spec = EnumSpec::new(3, 2, 1, 2).unwrap();
        let all = enum_primitive(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        let mut union = Vec::new();
        for k in 0..4 {
            union.extend(
                enum_primitive(&spec, Shard { index: k, count: 4 }, DEFAULT_BUDGET).unwrap(),
            );
        }
        let (mut a, mut b) = (all, union);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!("3/2".parse::<Shard>().is_err());
        assert_eq!(
            "1/2".parse::<Shard>().unwrap(),
            Shard { index: 1, count: 2 }
        );
    }

    #[test]
    fn budget_refusal() {
        let spec = EnumSpec::new(2, 3, 1, 2).unwrap();
        assert!(matches!(
            enum_primitive(&spec, Shard::ALL, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn congruence_subset() {
        let f = Fq::new(2).unwrap();
        let spec = EnumSpec::new(2, 2, 1, 2).unwrap();
        let y = spec
            .clone()
            .with_ideal(IdealR::new(Poly::y(f)).unwrap())
            .unwrap();
        let all = enum_primitive(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        let sub = enum_primitive(&y, Shard::ALL, DEFAULT_BUDGET).unwrap();
        assert!(sub.iter().all(|l| all.contains(l)));
        assert!(sub.len() < all.len());
    }
}
