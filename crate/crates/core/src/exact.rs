//! Exact scalars: arbitrary-precision rationals, cyclotomic numbers in the
//! field Q(w) for a primitive root of unity w of a fixed order, Bernoulli
//! numbers and polynomials, zeta values at negative odd integers, and the
//! generalized binomial coefficient.
//!
//! Convention: the first Bernoulli number is B_1 = -1/2, i.e. the exponential
//! generating function is u/(e^u - 1).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::sync::{Mutex, OnceLock};

use crate::{CalcError, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Always prints an explicit denominator, e.g. `-3/2`, `5/1`.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n
        .parse()
        .map_err(|_| CalcError::BadConfig(format!("bad rational `{s}`")))?;
    let den: BigInt = d
        .parse()
        .map_err(|_| CalcError::BadConfig(format!("bad rational `{s}`")))?;
    if den.is_zero() {
        return Err(CalcError::BadConfig(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(num, den))
}

pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// binom(a, k) = a (a-1) ... (a-k+1) / k! for arbitrary rational a.
pub fn binom_general(a: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= a - rat_int(j as i64);
    }
    acc / factorial(k)
}

pub fn binom_int(n: i64, k: u64) -> Rat {
    binom_general(&rat_int(n), k)
}

static BERNOULLI: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();

/// Bernoulli number B_n, memoized. Recurrence: sum_{k=0}^{n} C(n+1,k) B_k = 0
/// for n >= 1, with B_0 = 1; this fixes B_1 = -1/2.
pub fn bernoulli(n: usize) -> Rat {
    let cell = BERNOULLI.get_or_init(|| Mutex::new(vec![Rat::one()]));
    let mut table = cell.lock().unwrap();
    while table.len() <= n {
        let m = table.len(); // computing B_m
        let mut acc = Rat::zero();
        for (k, bk) in table.iter().enumerate() {
            acc += binom_int((m + 1) as i64, k as u64) * bk;
        }
        let bm = -acc / rat_int((m + 1) as i64);
        table.push(bm);
    }
    table[n].clone()
}

/// Bernoulli polynomial B_n(x) = sum_k C(n,k) B_k x^{n-k}.
pub fn bernoulli_poly(n: usize, x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let mut xpow = Rat::one();
    // accumulate from k = n down to 0 so xpow tracks x^{n-k}
    for k in (0..=n).rev() {
        acc += binom_int(n as i64, k as u64) * bernoulli(k) * &xpow;
        xpow *= x;
    }
    acc
}

/// zeta(-1 - 2r) = -B_{2r+2} / (2r + 2), the values entering the normal
/// ordering shifts of the Virasoro-type generators.
pub fn zeta_negative(r: usize) -> Rat {
    -bernoulli(2 * r + 2) / rat_int(2 * (r as i64) + 2)
}

// ---------------------------------------------------------------------------
// dense polynomials over Q, little-endian; helpers for the cyclotomic field
// ---------------------------------------------------------------------------

fn poly_trim(p: &mut Vec<Rat>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Quotient and remainder of a by b; b need not be monic.
fn poly_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem: Vec<Rat> = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    let mut quo = vec![Rat::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let c = rem[dr].clone() / lead;
        quo[dr - db] = c.clone();
        for i in 0..=db {
            let t = &b[i] * &c;
            rem[dr - db + i] -= t;
        }
        poly_trim(&mut rem);
        if rem.len() > dr {
            unreachable!("division did not reduce degree");
        }
    }
    poly_trim(&mut quo);
    (quo, rem)
}

fn euler_phi(n: i64) -> usize {
    let mut n = n as u64;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi as usize
}

static CYCLO: OnceLock<Mutex<std::collections::HashMap<i64, Vec<Rat>>>> = OnceLock::new();

/// The ord-th cyclotomic polynomial, little-endian and monic, obtained by
/// exact division of x^ord - 1 by the product of the lower cyclotomics.
pub fn cyclotomic_poly(ord: i64) -> Vec<Rat> {
    assert!(ord >= 1, "cyclotomic order must be positive");
    {
        let cache = CYCLO.get_or_init(|| Mutex::new(Default::default()));
        if let Some(p) = cache.lock().unwrap().get(&ord) {
            return p.clone();
        }
    }
    let result = if ord == 1 {
        vec![-Rat::one(), Rat::one()] // x - 1
    } else {
        let mut xn_minus_1 = vec![Rat::zero(); ord as usize + 1];
        xn_minus_1[0] = -Rat::one();
        xn_minus_1[ord as usize] = Rat::one();
        let mut denom = vec![Rat::one()];
        for d in 1..ord {
            if ord % d == 0 {
                denom = poly_mul(&denom, &cyclotomic_poly(d));
            }
        }
        let (quo, rem) = poly_divrem(&xn_minus_1, &denom);
        assert!(rem.is_empty(), "cyclotomic division must be exact");
        quo
    };
    assert_eq!(result.len(), euler_phi(ord) + 1);
    let cache = CYCLO.get_or_init(|| Mutex::new(Default::default()));
    cache.lock().unwrap().insert(ord, result.clone());
    result
}

// ---------------------------------------------------------------------------
// cyclotomic numbers
// ---------------------------------------------------------------------------

/// An element of Q(w), w a fixed primitive ord-th root of unity, stored as
/// the canonical representative of degree < phi(ord) modulo the ord-th
/// cyclotomic polynomial. All scalars in a given computation share one order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycNum {
    ord: i64,
    c: Vec<Rat>,
}

impl CycNum {
    pub fn zero(ord: i64) -> Self {
        CycNum {
            ord,
            c: vec![Rat::zero(); euler_phi(ord)],
        }
    }

    pub fn one(ord: i64) -> Self {
        Self::from_rat(ord, Rat::one())
    }

    pub fn from_rat(ord: i64, r: Rat) -> Self {
        let mut z = Self::zero(ord);
        z.c[0] = r;
        z
    }

    pub fn from_int(ord: i64, n: i64) -> Self {
        Self::from_rat(ord, rat_int(n))
    }

    pub fn order(&self) -> i64 {
        self.ord
    }

    /// w^k for the fixed primitive ord-th root w, any integer k.
    pub fn root_of_unity(ord: i64, k: i64) -> Self {
        let e = k.rem_euclid(ord) as usize;
        let mut raw = vec![Rat::zero(); e + 1];
        raw[e] = Rat::one();
        Self::reduce(ord, raw)
    }

    fn reduce(ord: i64, raw: Vec<Rat>) -> Self {
        let phi = euler_phi(ord);
        let mut c = if raw.len() > phi {
            let (_, rem) = poly_divrem(&raw, &cyclotomic_poly(ord));
            rem
        } else {
            raw
        };
        c.resize(phi, Rat::zero());
        CycNum { ord, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Some(r) when the value lies in Q.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.ord, o.ord, "mixed cyclotomic orders");
        CycNum {
            ord: self.ord,
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CycNum {
            ord: self.ord,
            c: self.c.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.ord, o.ord, "mixed cyclotomic orders");
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.ord);
        }
        Self::reduce(self.ord, poly_mul(&self.c, &o.c))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycNum {
            ord: self.ord,
            c: self.c.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the cyclotomic polynomial; None for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let modulus = cyclotomic_poly(self.ord);
        let mut a: Vec<Rat> = self.c.clone();
        poly_trim(&mut a);
        // Bezout: s*a + t*modulus = gcd; track s only.
        let (mut r0, mut r1) = (modulus, a);
        let (mut s0, mut s1) = (vec![], vec![Rat::one()]);
        while r1.len() > 1 {
            let (q, r2) = poly_divrem(&r0, &r1);
            let qs1 = poly_mul(&q, &s1);
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs1.len()), Rat::zero());
            for (i, v) in qs1.iter().enumerate() {
                s2[i] -= v;
            }
            poly_trim(&mut s2);
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        assert!(!r1.is_empty(), "cyclotomic polynomial must be coprime to nonzero element");
        let lead = r1[0].clone();
        let inv: Vec<Rat> = s1.iter().map(|x| x / &lead).collect();
        Some(Self::reduce(self.ord, inv))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::one(self.ord);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coordinates in the power basis 1, w, ..., w^{phi-1}.
    pub fn coords(&self) -> &[Rat] {
        &self.c
    }
}

impl std::fmt::Display for CycNum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_rat() {
            Some(r) => write!(f, "{}", fmt_rat(&r)),
            None => {
                let parts: Vec<String> = self.c.iter().map(fmt_rat).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl std::cmp::PartialOrd for CycNum {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::cmp::Ord for CycNum {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ord
            .cmp(&other.ord)
            .then_with(|| self.c.cmp(&other.c))
    }
}

/// Convenience sum with an explicit order for the empty case.
pub fn cyc_sum(ord: i64, it: impl IntoIterator<Item = CycNum>) -> CycNum {
    it.into_iter().fold(CycNum::zero(ord), |a, b| a.add(&b))
}

pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}
