//! Zeta values, measure masses, and index constants as exact rationals,
//! together with brute-force counts over finite rings used to check them.

use num::{BigInt, One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalars::{int, q_pow, Fq, IdealR, Poly, Rational};

fn qi_minus_one(q: u32, i: u32) -> Rational {
    q_pow(q, i as i64) - Rational::one()
}

/// Zeta function of the projective line over F_q:
/// `1 / ((1 - q^{-s}) (1 - q^{1-s}))`.
pub fn zeta_k(s: i64, q: u32) -> Result<Rational> {
    if s == 0 || s == 1 {
        return Err(Error::ZetaPole(s));
    }
    let one = Rational::one();
    let a = &one - q_pow(q, -s);
    let b = &one - q_pow(q, 1 - s);
    Ok(one / (a * b))
}

/// Ideal sum over F_q[Y]: `sum_I N(I)^{-s} = 1 / (1 - q^{1-s})`.
pub fn zeta_affine(s: i64, q: u32) -> Result<Rational> {
    if s == 1 {
        return Err(Error::ZetaPole(s));
    }
    Ok(Rational::one() / (Rational::one() - q_pow(q, 1 - s)))
}

/// `c_1 = q^{dn} prod_{i<=d}(q^i-1) prod_{i<=n}(q^i-1) / prod_{i<=D}(q^i-1)`.
pub fn c1(d: u32, n: u32, q: u32) -> Rational {
    let prod = |k: u32| (1..=k).fold(Rational::one(), |acc, i| acc * qi_minus_one(q, i));
    q_pow(q, (d * n) as i64) * prod(d) * prod(n) / prod(d + n)
}

/// `[Gamma : Gamma_I]` for the subgroup with lower-left `n x d` block in `I`.
pub fn index_gamma_i(d: u32, n: u32, ideal: &IdealR) -> Rational {
    let q = ideal.field().q();
    let norm = Rational::from_integer(ideal.norm());
    let mut out = pow_rat(&norm, (d * n) as i64);
    for (p, _) in ideal.factors() {
        let np = q_pow(q, p.degree().unwrap() as i64);
        for i in 1..=d {
            let npi = pow_rat(&np, i as i64);
            out *= (&npi - pow_rat(&np, -(n as i64))) / (&npi - Rational::one());
        }
    }
    out
}

fn pow_rat(x: &Rational, e: i64) -> Rational {
    let p = num::pow(x.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// `c_I = q^{-(D^2-1-dn)} prod_{i=1}^{D-1} zeta(i+1)/(q^i-1) [Gamma:Gamma_I]`.
pub fn c_i(d: u32, n: u32, ideal: &IdealR) -> Rational {
    let q = ideal.field().q();
    let big_d = d + n;
    let mut out = q_pow(q, -((big_d * big_d - 1 - d * n) as i64));
    for i in 1..big_d {
        out *= zeta_k(i as i64 + 1, q).unwrap() / qi_minus_one(q, i);
    }
    out * index_gamma_i(d, n, ideal)
}

/// `c' = (q-1) c_R`.
pub fn c_prime(d: u32, n: u32, q: u32) -> Result<Rational> {
    let unit = IdealR::unit(Fq::new(q)?);
    Ok(int(q as i64 - 1) * c_i(d, n, &unit))
}

fn lat_factors(k: u32, q: u32) -> Rational {
    (1..k).fold(Rational::one(), |acc, i| {
        acc * zeta_k(-(i as i64), q).unwrap() / qi_minus_one(q, i)
    })
}

/// `||mu_{Lat^1_k}|| = 1/(q-1) prod_{i=1}^{k-1} zeta(-i)/(q^i-1)`.
pub fn lat_mass(k: u32, q: u32) -> Rational {
    lat_factors(k, q) / int(q as i64 - 1)
}

/// `||mu_{Lat^1_{d,n}}|| = 1/(q-1) prod_{i<d} (..) prod_{i<n} (..)`.
pub fn lat_pair_mass(d: u32, n: u32, q: u32) -> Rational {
    lat_factors(d, q) * lat_factors(n, q) / int(q as i64 - 1)
}

/// `[G(O) : H_N] = q^{N(D^2-1) - D(D+1)/2 + 1} prod_{i=2}^D (q^i-1)`.
pub fn reduction_index(big_d: u32, q: u32, level: u32) -> Rational {
    let e = level as i64 * (big_d as i64 * big_d as i64 - 1) - (big_d * (big_d + 1) / 2) as i64 + 1;
    (2..=big_d).fold(q_pow(q, e), |acc, i| acc * qi_minus_one(q, i))
}

/// `|GL_k(F_q)|`.
pub fn gl_order(k: u32, q: u32) -> BigInt {
    let qk = BigInt::from(q).pow(k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (&qk - BigInt::from(q).pow(i)))
}

/// Every constant for one parameter set, computed from the closed forms.
#[derive(Clone, Debug)]
pub struct ConstantsBundle {
    pub q: u32,
    pub d: u32,
    pub n: u32,
    pub ideal: IdealR,
    pub zeta: Vec<(i64, Rational)>,
    pub zeta_affine: Vec<(i64, Rational)>,
    pub c1: Rational,
    pub index: Rational,
    pub c_i: Rational,
    pub c_r: Rational,
    pub c_prime: Rational,
    pub lat_mass_d: Rational,
    pub lat_mass_n: Rational,
    pub lat_mass_big_d: Rational,
    pub lat_pair_mass: Rational,
    /// Shape masses as pushforwards of the lattice masses.
    pub sh_mass_d: Rational,
    pub sh_mass_n: Rational,
    pub reduction_index: Rational,
}

pub fn constants_bundle(d: u32, n: u32, ideal: &IdealR) -> Result<ConstantsBundle> {
    if d == 0 || n == 0 {
        return Err(Error::Invalid("d and n must be positive".into()));
    }
    let q = ideal.field().q();
    let big_d = d + n;
    let unit = IdealR::unit(ideal.field());
    let mut zeta = Vec::new();
    let mut zeta_aff = Vec::new();
    for s in (-(big_d as i64)..=big_d as i64).filter(|&s| s != 0 && s != 1) {
        zeta.push((s, zeta_k(s, q)?));
        zeta_aff.push((s, zeta_affine(s, q)?));
    }
    let c_r = c_i(d, n, &unit);
    Ok(ConstantsBundle {
        q,
        d,
        n,
        ideal: ideal.clone(),
        zeta,
        zeta_affine: zeta_aff,
        c1: c1(d, n, q),
        index: index_gamma_i(d, n, ideal),
        c_i: c_i(d, n, ideal),
        c_prime: int(q as i64 - 1) * &c_r,
        c_r,
        lat_mass_d: lat_mass(d, q),
        lat_mass_n: lat_mass(n, q),
        lat_mass_big_d: lat_mass(big_d, q),
        lat_pair_mass: lat_pair_mass(d, n, q),
        sh_mass_d: lat_mass(d, q),
        sh_mass_n: lat_mass(n, q),
        reduction_index: reduction_index(big_d, q, 1),
    })
}

pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with a fixed number of digits (round half away from zero).
pub fn rational_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded < BigInt::zero();
    let abs = if neg { -rounded } else { rounded };
    let int_part = &abs / &scale;
    let frac = (&abs % &scale).to_string();
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{frac:0>digits$}")
}

impl ConstantsBundle {
    /// Flat JSON object; every value is an exact fraction string.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("q".into(), self.q.into());
        m.insert("d".into(), self.d.into());
        m.insert("n".into(), self.n.into());
        m.insert("D".into(), (self.d + self.n).into());
        m.insert(
            "ideal".into(),
            Value::from(self.ideal.generator().coeffs().to_vec()),
        );
        let mut put = |k: String, v: &Rational| {
            m.insert(k, Value::String(rational_string(v)));
        };
        for (s, v) in &self.zeta {
            put(format!("zeta_K({s})"), v);
        }
        for (s, v) in &self.zeta_affine {
            put(format!("zeta_affine({s})"), v);
        }
        put("c1".into(), &self.c1);
        put("index_gamma_I".into(), &self.index);
        put("c_I".into(), &self.c_i);
        put("c_R".into(), &self.c_r);
        put("c_prime".into(), &self.c_prime);
        put("lat_mass_d".into(), &self.lat_mass_d);
        put("lat_mass_n".into(), &self.lat_mass_n);
        put("lat_mass_D".into(), &self.lat_mass_big_d);
        put("lat_pair_mass".into(), &self.lat_pair_mass);
        put("sh_mass_d".into(), &self.sh_mass_d);
        put("sh_mass_n".into(), &self.sh_mass_n);
        put("reduction_index_N1".into(), &self.reduction_index);
        Value::Object(m)
    }
}

/// Direct counts over finite rings.
pub mod oracle {
    use super::*;

    /// Determinant of a small matrix over the ring `R/(m)`, entries reduced.
    fn det_mod(a: &[Vec<Poly>], m: &Poly) -> Poly {
        let k = a.len();
        if k == 1 {
            return a[0][0].rem(m).unwrap();
        }
        let f = m.field();
        let mut acc = Poly::zero(f);
        for j in 0..k {
            let minor: Vec<Vec<Poly>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][j] * &det_mod(&minor, m);
            acc = if j % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
        }
        acc.rem(m).unwrap()
    }

    /// All `k x k` matrices over `R/(m)` with determinant 1, visited by `visit`.
    fn for_each_sl(k: usize, m: &Poly, mut visit: impl FnMut(&[Vec<Poly>])) {
        let f = m.field();
        let elems: Vec<Poly> = Poly::all_up_to(f, m.degree().unwrap() - 1).collect();
        let total = elems.len().pow((k * k) as u32);
        let one = Poly::one(f).rem(m).unwrap();
        let mut a = vec![vec![Poly::zero(f); k]; k];
        for code in 0..total {
            let mut c = code;
            for i in 0..k {
                for j in 0..k {
                    a[i][j] = elems[c % elems.len()].clone();
                    c /= elems.len();
                }
            }
            if det_mod(&a, m) == one {
                visit(&a);
            }
        }
    }

    /// `|SL_k(F_q)|` by exhaustive enumeration.
    pub fn sl_order(k: usize, q: u32) -> Result<u64> {
        let f = Fq::new(q)?;
        let mut count = 0u64;
        for_each_sl(k, &Poly::y(f), |_| count += 1);
        Ok(count)
    }

    /// `|SL_D(R/I)| / |{g : lower-left block = 0 mod I}|`.
    pub fn index_gamma_i(d: usize, n: usize, ideal: &IdealR) -> Rational {
        let m = ideal.generator();
        if m.degree() == Some(0) {
            return Rational::one();
        }
        let (mut all, mut sub) = (0u64, 0u64);
        for_each_sl(d + n, m, |a| {
            all += 1;
            if (d..d + n).all(|i| (0..d).all(|j| a[i][j].is_zero())) {
                sub += 1;
            }
        });
        Rational::new(BigInt::from(all), BigInt::from(sub))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn unit(q: u32) -> IdealR {
        IdealR::unit(Fq::new(q).unwrap())
    }
    fn y_ideal(q: u32) -> IdealR {
        IdealR::new(Poly::y(Fq::new(q).unwrap())).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_k(2, 2).unwrap(), rat(8, 3));
        assert_eq!(zeta_k(-1, 2).unwrap(), rat(1, 3));
        assert_eq!(zeta_k(3, 2).unwrap(), rat(32, 21));
        assert_eq!(zeta_k(1, 2), Err(Error::ZetaPole(1)));
        assert_eq!(zeta_k(0, 3), Err(Error::ZetaPole(0)));
        assert_eq!(zeta_affine(2, 2).unwrap(), rat(2, 1));
    }

    #[test]
    fn functional_equation() {
        for q in [2, 3, 4] {
            for i in 1..=6 {
                let lhs = zeta_k(-i, q).unwrap();
                let rhs = q_pow(q, -(1 + 2 * i)) * zeta_k(1 + i, q).unwrap();
                assert_eq!(lhs, rhs);
                assert!(lhs > Rational::zero());
            }
        }
    }

    #[test]
    fn c1_values() {
        assert_eq!(c1(1, 1, 2), rat(2, 3));
        assert_eq!(c1(1, 1, 3), rat(3, 4));
        assert_eq!(c1(1, 2, 2), rat(4, 7));
        for q in [2, 3, 4] {
            for (d, n) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
                assert!(c1(d, n, q) <= Rational::one());
            }
        }
    }

    #[test]
    fn index_values() {
        assert_eq!(index_gamma_i(1, 1, &y_ideal(2)), int(3));
        assert_eq!(index_gamma_i(1, 1, &unit(2)), int(1));
        assert_eq!(index_gamma_i(1, 2, &y_ideal(2)), int(7));
    }

    #[test]
    fn index_matches_brute_force() {
        let f2 = Fq::new(2).unwrap();
        let f3 = Fq::new(3).unwrap();
        let ideals = [
            y_ideal(2),
            y_ideal(3),
            IdealR::new(Poly::new(f2, vec![0, 0, 1])).unwrap(),
            IdealR::new(Poly::new(f2, vec![0, 1, 1])).unwrap(),
            IdealR::new(Poly::new(f2, vec![1, 1, 1])).unwrap(),
            IdealR::new(Poly::new(f3, vec![2, 0, 1])).unwrap(),
        ];
        for i in &ideals {
            assert_eq!(
                index_gamma_i(1, 1, i),
                oracle::index_gamma_i(1, 1, i),
                "{i:?}"
            );
        }
        assert_eq!(oracle::index_gamma_i(1, 2, &y_ideal(2)), int(7));
        assert_eq!(
            oracle::index_gamma_i(2, 1, &y_ideal(2)),
            index_gamma_i(2, 1, &y_ideal(2))
        );
    }

    #[test]
    fn index_multiplicative() {
        let f = Fq::new(3).unwrap();
        let a = IdealR::new(Poly::new(f, vec![0, 1])).unwrap();
        let b = IdealR::new(Poly::new(f, vec![1, 0, 1])).unwrap();
        for (d, n) in [(1, 1), (1, 2), (2, 1)] {
            assert_eq!(
                index_gamma_i(d, n, &a.product(&b)),
                index_gamma_i(d, n, &a) * index_gamma_i(d, n, &b)
            );
        }
    }

    #[test]
    fn reduction_index_values() {
        assert_eq!(reduction_index(2, 2, 1), int(6));
        assert_eq!(reduction_index(2, 3, 1), int(24));
        assert_eq!(reduction_index(2, 2, 2), int(48));
        assert_eq!(oracle::sl_order(2, 2).unwrap(), 6);
        assert_eq!(oracle::sl_order(2, 3).unwrap(), 24);
        assert_eq!(
            reduction_index(3, 2, 1),
            int(oracle::sl_order(3, 2).unwrap() as i64)
        );
    }

    #[test]
    fn bundle_values() {
        let b = constants_bundle(1, 1, &unit(2)).unwrap();
        assert_eq!(
            (b.c_prime.clone(), b.c_i.clone(), b.lat_mass_d.clone()),
            (rat(2, 3), rat(2, 3), int(1))
        );
        let b = constants_bundle(1, 2, &unit(2)).unwrap();
        assert_eq!(
            (b.c_i.clone(), b.c1.clone(), b.lat_pair_mass.clone()),
            (rat(4, 189), rat(4, 7), rat(1, 3))
        );
        let b = constants_bundle(1, 1, &unit(3)).unwrap();
        assert_eq!((b.c_i.clone(), b.c_prime.clone()), (rat(3, 32), rat(3, 16)));
        let b = constants_bundle(1, 1, &y_ideal(2)).unwrap();
        assert_eq!(b.c_i, &b.index * &b.c_r);
    }

    #[test]
    fn pair_mass_identity() {
        for q in [2, 3, 4] {
            for (d, n) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
                assert_eq!(
                    lat_pair_mass(d, n, q),
                    int(q as i64 - 1) * lat_mass(d, q) * lat_mass(n, q)
                );
            }
        }
    }

    #[test]
    fn decimals() {
        assert_eq!(rational_decimal(&rat(2, 3), 4), "0.6667");
        assert_eq!(rational_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(rational_decimal(&int(6), 3), "6.000");
        assert_eq!(rational_string(&rat(4, 2)), "2");
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), BigInt::from(6));
        assert_eq!(gl_order(1, 3), BigInt::from(2));
        assert_eq!(gl_order(3, 2), BigInt::from(168));
    }
}
