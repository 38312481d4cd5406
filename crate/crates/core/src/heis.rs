//! Rank-d Heisenberg algebra data: the bilinear form, a finite-order
//! isometry, its eigenspace decomposition, and the Fock modules.
//!
//! All mode numbers are kept as integer numerators over the fixed denominator
//! p, for the untwisted and twisted module alike; untwisted modes are the
//! multiples of p. A basis vector of the eigenspace with eigenvalue w^r
//! carries modes whose numerator is congruent to r mod p, and its creation
//! modes therefore have numerators congruent to -r.

use crate::exact::{rat, rat_int, CycNum, Rat};
use crate::{CalcError, Result};
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

// ---------------------------------------------------------------------------
// rational and cyclotomic matrices
// ---------------------------------------------------------------------------

pub type RMat = Vec<Vec<Rat>>;
pub type CMat = Vec<Vec<CycNum>>;

pub fn rmat_identity(d: usize) -> RMat {
    (0..d)
        .map(|i| (0..d).map(|j| rat_int((i == j) as i64)).collect())
        .collect()
}

pub fn rmat_mul(a: &RMat, b: &RMat) -> RMat {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).fold(rat_int(0), |acc, k| acc + &a[i][k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

fn rmat_is_symmetric(a: &RMat) -> bool {
    let d = a.len();
    (0..d).all(|i| (0..d).all(|j| a[i][j] == a[j][i]))
}

/// Gauss-Jordan inverse; None when singular.
pub fn rmat_inverse(a: &RMat) -> Option<RMat> {
    let d = a.len();
    let mut m: Vec<Vec<Rat>> = a.clone();
    let mut inv = rmat_identity(d);
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = m[col][col].clone();
        for j in 0..d {
            m[col][j] = &m[col][j] / &s;
            inv[col][j] = &inv[col][j] / &s;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..d {
                    let t = &m[col][j] * &f;
                    m[r][j] = &m[r][j] - &t;
                    let t = &inv[col][j] * &f;
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
    }
    Some(inv)
}

pub fn cmat_from_rmat(ord: i64, a: &RMat) -> CMat {
    a.iter()
        .map(|row| row.iter().map(|x| CycNum::from_rat(ord, x.clone())).collect())
        .collect()
}

pub fn cmat_inverse(a: &CMat, ord: i64) -> Option<CMat> {
    let d = a.len();
    let mut m = a.clone();
    let mut inv: CMat = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { CycNum::one(ord) } else { CycNum::zero(ord) })
                .collect()
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = m[col][col].inv().unwrap();
        for j in 0..d {
            m[col][j] = m[col][j].mul(&s);
            inv[col][j] = inv[col][j].mul(&s);
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..d {
                    let t = m[col][j].mul(&f);
                    m[r][j] = m[r][j].sub(&t);
                    let t = inv[col][j].mul(&f);
                    inv[r][j] = inv[r][j].sub(&t);
                }
            }
        }
    }
    Some(inv)
}

fn cmat_vec(a: &CMat, v: &[CycNum], ord: i64) -> Vec<CycNum> {
    a.iter()
        .map(|row| {
            let mut s = CycNum::zero(ord);
            for (x, y) in row.iter().zip(v) {
                s = s.add(&x.mul(y));
            }
            s
        })
        .collect()
}

// ---------------------------------------------------------------------------
// setup
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BasisVec {
    /// eigenvalue exponent: nu b = w^species b
    pub species: i64,
    pub ambient: Vec<CycNum>,
}

#[derive(Debug)]
pub struct SetupData {
    pub d: usize,
    pub p: i64,
    pub gram: RMat,
    pub gram_inv: RMat,
    pub nu: RMat,
    /// powers nu^0 .. nu^{p-1}
    pub nu_pows: Vec<RMat>,
    /// eigenbasis of the whole space, grouped by ascending species
    pub basis: Vec<BasisVec>,
    /// columns of the eigenbasis matrix inverse: ambient -> eigen coords
    pub eigen_inv: CMat,
    /// pair[i][j] = <b_i, b_j>
    pub pair: CMat,
    /// dual[i] = coords over `basis` of the vector dual to b_i
    pub dual: CMat,
    /// dim of each eigenspace, by species
    pub dims: Vec<usize>,
    basis_cache: Mutex<HashMap<(bool, i64), Arc<Vec<Mono>>>>,
}

pub type Setup = Arc<SetupData>;

impl SetupData {
    pub fn ord(&self) -> i64 {
        self.p
    }
}

pub fn setup_new(p: i64, gram: RMat, nu: RMat) -> Result<Setup> {
    let d = gram.len();
    if d == 0 || gram.iter().any(|r| r.len() != d) || nu.len() != d || nu.iter().any(|r| r.len() != d)
    {
        return Err(CalcError::BadConfig("form and isometry must be square of equal size".into()));
    }
    if p < 1 {
        return Err(CalcError::BadConfig("period must be positive".into()));
    }
    if !rmat_is_symmetric(&gram) {
        return Err(CalcError::NotSymmetric);
    }
    let gram_inv = rmat_inverse(&gram).ok_or(CalcError::Degenerate)?;
    // nu^T G nu = G
    let nut: RMat = (0..d).map(|i| (0..d).map(|j| nu[j][i].clone()).collect()).collect();
    if rmat_mul(&rmat_mul(&nut, &gram), &nu) != gram {
        return Err(CalcError::BadIsometry);
    }
    let mut nu_pows = vec![rmat_identity(d)];
    for _ in 1..p {
        nu_pows.push(rmat_mul(nu_pows.last().unwrap(), &nu));
    }
    if rmat_mul(nu_pows.last().unwrap(), &nu) != rmat_identity(d) {
        return Err(CalcError::BadIsometry);
    }

    // eigenspace bases from the averaging projectors, column-reduced
    let mut basis: Vec<BasisVec> = Vec::new();
    let mut dims = Vec::new();
    for r in 0..p {
        let mut proj: CMat = (0..d).map(|_| vec![CycNum::zero(p); d]).collect();
        for s in 0..p {
            let w = CycNum::root_of_unity(p, -r * s).scale(&rat(1, p));
            for i in 0..d {
                for j in 0..d {
                    let t = CycNum::from_rat(p, nu_pows[s as usize][i][j].clone()).mul(&w);
                    proj[i][j] = proj[i][j].add(&t);
                }
            }
        }
        let cols = column_space_basis(&proj);
        dims.push(cols.len());
        for v in cols {
            basis.push(BasisVec { species: r, ambient: v });
        }
    }
    if basis.len() != d {
        return Err(CalcError::BadIsometry);
    }
    let eigen: CMat = (0..d)
        .map(|i| (0..d).map(|j| basis[j].ambient[i].clone()).collect())
        .collect();
    let eigen_inv = cmat_inverse(&eigen, p).ok_or(CalcError::BadIsometry)?;
    let gram_c = cmat_from_rmat(p, &gram);
    let mut pair: CMat = (0..d).map(|_| vec![CycNum::zero(p); d]).collect();
    for i in 0..d {
        let gb = cmat_vec(&gram_c, &basis[i].ambient, p);
        for j in 0..d {
            let mut s = CycNum::zero(p);
            for a in 0..d {
                s = s.add(&basis[j].ambient[a].mul(&gb[a]));
            }
            pair[i][j] = s;
        }
    }
    let dual = cmat_inverse(&pair, p).ok_or(CalcError::Degenerate)?;
    Ok(Arc::new(SetupData {
        d,
        p,
        gram,
        gram_inv,
        nu,
        nu_pows,
        basis,
        eigen_inv,
        pair,
        dual,
        dims,
        basis_cache: Mutex::new(HashMap::new()),
    }))
}

fn column_space_basis(m: &CMat) -> Vec<Vec<CycNum>> {
    let d = m.len();
    let mut out: Vec<Vec<CycNum>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for j in 0..d {
        let mut col: Vec<CycNum> = (0..d).map(|i| m[i][j].clone()).collect();
        for (v, &pr) in out.iter().zip(&pivots) {
            if !col[pr].is_zero() {
                let f = col[pr].clone();
                for i in 0..d {
                    col[i] = col[i].sub(&v[i].mul(&f));
                }
            }
        }
        if let Some(pr) = (0..d).find(|&i| !col[i].is_zero()) {
            let s = col[pr].inv().unwrap();
            for x in col.iter_mut() {
                *x = x.mul(&s);
            }
            out.push(col);
            pivots.push(pr);
        }
    }
    out
}

/// Standard presets: the trivial isometry, negation, and the cyclic
/// coordinate shift of period d, all on the standard inner product.
pub fn preset(name: &str, d: usize) -> Result<Setup> {
    let gram = rmat_identity(d);
    match name {
        "identity" => setup_new(1, gram, rmat_identity(d)),
        "neg1" => {
            let nu: RMat = (0..d)
                .map(|i| (0..d).map(|j| rat_int(if i == j { -1 } else { 0 })).collect())
                .collect();
            setup_new(2, gram, nu)
        }
        "cyclic" => {
            let nu: RMat = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| rat_int(((j + 1) % d == i) as i64))
                        .collect()
                })
                .collect();
            setup_new(d as i64, gram, nu)
        }
        other => Err(CalcError::BadConfig(format!("unknown preset {other}"))),
    }
}

// ---------------------------------------------------------------------------
// coordinates and pairings
// ---------------------------------------------------------------------------

pub fn ambient_basis_vec(setup: &Setup, i: usize) -> Vec<CycNum> {
    (0..setup.d)
        .map(|j| {
            if i == j {
                CycNum::one(setup.p)
            } else {
                CycNum::zero(setup.p)
            }
        })
        .collect()
}

/// ambient coordinates -> coordinates over the eigenbasis list
pub fn to_eigen(setup: &Setup, ambient: &[CycNum]) -> Vec<CycNum> {
    cmat_vec(&setup.eigen_inv, ambient, setup.p)
}

pub fn from_eigen(setup: &Setup, coords: &[CycNum]) -> Vec<CycNum> {
    let p = setup.p;
    let mut out = vec![CycNum::zero(p); setup.d];
    for (j, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for i in 0..setup.d {
            out[i] = out[i].add(&setup.basis[j].ambient[i].mul(c));
        }
    }
    out
}

pub fn pair_ambient(setup: &Setup, a: &[CycNum], b: &[CycNum]) -> CycNum {
    let p = setup.p;
    let mut s = CycNum::zero(p);
    for i in 0..setup.d {
        for j in 0..setup.d {
            let g = CycNum::from_rat(p, setup.gram[i][j].clone());
            s = s.add(&a[i].mul(&g).mul(&b[j]));
        }
    }
    s
}

/// <a_(r), b> for the species-r projection of a
pub fn species_pair(setup: &Setup, a: &[CycNum], b: &[CycNum], r: i64) -> CycNum {
    let coords = to_eigen(setup, a);
    let p = setup.p;
    let rr = r.rem_euclid(p);
    let mut s = CycNum::zero(p);
    for (j, c) in coords.iter().enumerate() {
        if setup.basis[j].species == rr && !c.is_zero() {
            // <b_j, b> via the Gram form
            let mut t = CycNum::zero(p);
            let gb = cmat_vec(&cmat_from_rmat(p, &setup.gram), &setup.basis[j].ambient, p);
            for a in 0..setup.d {
                t = t.add(&gb[a].mul(&b[a]));
            }
            s = s.add(&c.mul(&t));
        }
    }
    s
}

pub fn nu_pow_ambient(setup: &Setup, s: i64, a: &[CycNum]) -> Vec<CycNum> {
    let p = setup.p;
    let m = &setup.nu_pows[s.rem_euclid(p) as usize];
    (0..setup.d)
        .map(|i| {
            let mut acc = CycNum::zero(p);
            for j in 0..setup.d {
                acc = acc.add(&CycNum::from_rat(p, m[i][j].clone()).mul(&a[j]));
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fock vectors
// ---------------------------------------------------------------------------

/// Product of creation modes applied to the vacuum: sorted list of
/// (mode numerator > 0, eigenbasis index), with repetition for multiplicity.
/// The stored numerator n means the creation operator b_idx(-n/p).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Mono(pub Vec<(i64, usize)>);

impl Mono {
    pub fn vacuum() -> Mono {
        Mono(Vec::new())
    }
    /// total mode numerator; weight above the vacuum is level/p
    pub fn level(&self) -> i64 {
        self.0.iter().map(|(n, _)| n).sum()
    }
    pub fn create(&self, n_num: i64, idx: usize) -> Mono {
        debug_assert!(n_num > 0);
        let mut v = self.0.clone();
        let pos = v.partition_point(|x| *x < (n_num, idx));
        v.insert(pos, (n_num, idx));
        Mono(v)
    }
    pub fn text(&self) -> String {
        if self.0.is_empty() {
            return "vac".to_string();
        }
        let mut s = String::new();
        for (n, i) in &self.0 {
            s.push_str(&format!("b{i}[-{n}]"));
        }
        s.push_str("vac");
        s
    }
}

#[derive(Clone, Debug)]
pub struct FockVector {
    pub ord: i64,
    pub terms: std::collections::BTreeMap<Mono, CycNum>,
}

impl FockVector {
    pub fn zero(ord: i64) -> FockVector {
        FockVector { ord, terms: Default::default() }
    }
    pub fn vacuum(ord: i64) -> FockVector {
        let mut v = FockVector::zero(ord);
        v.terms.insert(Mono::vacuum(), CycNum::one(ord));
        v
    }
    pub fn single(ord: i64, m: Mono) -> FockVector {
        let mut v = FockVector::zero(ord);
        v.terms.insert(m, CycNum::one(ord));
        v
    }
    pub fn add_term(&mut self, m: Mono, c: CycNum) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
    pub fn add(&self, o: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    pub fn sub(&self, o: &FockVector) -> FockVector {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> FockVector {
        FockVector {
            ord: self.ord,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
    pub fn scale(&self, k: &CycNum) -> FockVector {
        let mut out = FockVector::zero(self.ord);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }
    pub fn scale_rat(&self, k: &Rat) -> FockVector {
        self.scale(&CycNum::from_rat(self.ord, k.clone()))
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn max_level(&self) -> i64 {
        self.terms.keys().map(|m| m.level()).max().unwrap_or(0)
    }
    /// coefficient of a monomial, zero when absent
    pub fn coeff(&self, m: &Mono) -> CycNum {
        self.terms.get(m).cloned().unwrap_or_else(|| CycNum::zero(self.ord))
    }
    pub fn text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("({}) {}", c, m.text()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl crate::formal::Coeff for FockVector {
    fn add(&self, o: &Self) -> Self {
        FockVector::add(self, o)
    }
    fn neg(&self) -> Self {
        FockVector::neg(self)
    }
    fn scale(&self, k: &CycNum) -> Self {
        FockVector::scale(self, k)
    }
    fn is_zero(&self) -> bool {
        FockVector::is_zero(self)
    }
    fn text(&self) -> String {
        FockVector::text(self)
    }
}

/// Whether the eigenbasis vector has the mode with the given numerator in
/// the untwisted (p | n) or twisted (n congruent to the species) module.
pub fn mode_compatible(setup: &Setup, twisted: bool, idx: usize, mode_num: i64) -> bool {
    if twisted {
        (mode_num - setup.basis[idx].species).rem_euclid(setup.p) == 0
    } else {
        mode_num.rem_euclid(setup.p) == 0
    }
}

/// Action of the mode b_idx(mode_num/p). Creation prepends, annihilation
/// contracts through the commutation rule [a(m), b(n)] = <a,b> m at m+n = 0,
/// zero modes act as zero, incompatible modes act as zero.
pub fn apply_mode(
    setup: &Setup,
    twisted: bool,
    idx: usize,
    mode_num: i64,
    v: &FockVector,
) -> FockVector {
    let p = setup.p;
    let mut out = FockVector::zero(p);
    if !mode_compatible(setup, twisted, idx, mode_num) || mode_num == 0 {
        return out;
    }
    if mode_num < 0 {
        for (m, c) in &v.terms {
            out.add_term(m.create(-mode_num, idx), c.clone());
        }
        return out;
    }
    let mrat = rat(mode_num, p);
    for (m, c) in &v.terms {
        for (pos, &(n, j)) in m.0.iter().enumerate() {
            if n == mode_num {
                let g = &setup.pair[idx][j];
                if g.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                rest.remove(pos);
                out.add_term(Mono(rest), c.mul(g).scale(&mrat));
            }
        }
    }
    out
}

/// Mode of a general ambient vector: decompose over the eigenbasis and act
/// componentwise (non-compatible components contribute nothing).
pub fn apply_ambient_mode(
    setup: &Setup,
    twisted: bool,
    alpha: &[CycNum],
    mode_num: i64,
    v: &FockVector,
) -> FockVector {
    let coords = to_eigen(setup, alpha);
    let mut out = FockVector::zero(setup.p);
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out = out.add(&apply_mode(setup, twisted, i, mode_num, v).scale(c));
    }
    out
}

/// nu acting on the module: each eigenbasis creation operator is scaled by
/// its eigenvalue.
pub fn nu_apply(setup: &Setup, s: i64, v: &FockVector) -> FockVector {
    let p = setup.p;
    let mut out = FockVector::zero(p);
    for (m, c) in &v.terms {
        let tot: i64 = m.0.iter().map(|(_, i)| setup.basis[*i].species).sum();
        out.add_term(m.clone(), c.mul(&CycNum::root_of_unity(p, s * tot)));
    }
    out
}

/// All monomials of the given total level numerator, sorted.
pub fn graded_basis(setup: &Setup, twisted: bool, level_num: i64) -> Arc<Vec<Mono>> {
    if let Some(hit) = setup.basis_cache.lock().unwrap().get(&(twisted, level_num)) {
        return hit.clone();
    }
    let mut parts: Vec<(i64, usize)> = Vec::new();
    for n in 1..=level_num.max(0) {
        for i in 0..setup.d {
            if mode_compatible(setup, twisted, i, -n) {
                parts.push((n, i));
            }
        }
    }
    parts.sort();
    parts.reverse();
    let mut out: Vec<Mono> = Vec::new();
    let mut cur: Vec<(i64, usize)> = Vec::new();
    fn rec(
        parts: &[(i64, usize)],
        from: usize,
        remaining: i64,
        cur: &mut Vec<(i64, usize)>,
        out: &mut Vec<Mono>,
    ) {
        if remaining == 0 {
            let mut v = cur.clone();
            v.reverse();
            out.push(Mono(v));
            return;
        }
        for k in from..parts.len() {
            if parts[k].0 <= remaining {
                cur.push(parts[k]);
                rec(parts, k, remaining - parts[k].0, cur, out);
                cur.pop();
            }
        }
    }
    if level_num >= 0 {
        rec(&parts, 0, level_num, &mut cur, &mut out);
    }
    out.sort();
    let arc = Arc::new(out);
    setup
        .basis_cache
        .lock()
        .unwrap()
        .insert((twisted, level_num), arc.clone());
    arc
}

/// Conformal weight of the twisted vacuum:
/// sum_r r (p - r) dim h_(r) / (4 p^2).
pub fn vacuum_weight(setup: &Setup) -> Rat {
    let p = setup.p;
    let mut s = rat_int(0);
    for r in 1..p {
        s += rat(r * (p - r), 1) * rat_int(setup.dims[r as usize] as i64);
    }
    s * rat(1, 4 * p * p)
}

// ---------------------------------------------------------------------------
// quadratic operators
// ---------------------------------------------------------------------------

/// sum_i sum_{j+k=n} (j/p)^{pow_j} (k/p)^{pow_k} :b_i(j/p) b^dual_i(k/p): v
/// over all modes of the untwisted or twisted module. The sum is finite on
/// each monomial; zero modes inside the normal product act as zero.
pub fn quad_mode_op(
    setup: &Setup,
    twisted: bool,
    n_num: i64,
    pow_j: u32,
    pow_k: u32,
    v: &FockVector,
) -> FockVector {
    let p = setup.p;
    let mut out = FockVector::zero(p);
    for (m, c) in &v.terms {
        let single = FockVector::single(p, m.clone());
        let lv = m.level();
        let l_out = lv - n_num;
        if l_out < 0 {
            continue;
        }
        let j_lo = (n_num - lv).min(0);
        let j_hi = lv.max(0);
        for j_num in j_lo..=j_hi {
            let k_num = n_num - j_num;
            let wj = pow_rat(&rat(j_num, p), pow_j);
            let wk = pow_rat(&rat(k_num, p), pow_k);
            let w = wj * wk;
            if w.is_zero() {
                continue;
            }
            for i in 0..setup.d {
                // normal order: apply the annihilating factor first
                let t = if j_num > 0 {
                    let t1 = apply_mode(setup, twisted, i, j_num, &single);
                    if t1.is_zero() {
                        continue;
                    }
                    apply_dual_mode(setup, twisted, i, k_num, &t1)
                } else {
                    let t1 = apply_dual_mode(setup, twisted, i, k_num, &single);
                    if t1.is_zero() {
                        continue;
                    }
                    apply_mode(setup, twisted, i, j_num, &t1)
                };
                if !t.is_zero() {
                    out = out.add(&t.scale_rat(&w).scale(c));
                }
            }
        }
    }
    out
}

fn apply_dual_mode(
    setup: &Setup,
    twisted: bool,
    i: usize,
    mode_num: i64,
    v: &FockVector,
) -> FockVector {
    let mut out = FockVector::zero(setup.p);
    for j in 0..setup.d {
        let coef = &setup.dual[j][i];
        if coef.is_zero() {
            continue;
        }
        out = out.add(&apply_mode(setup, twisted, j, mode_num, v).scale(coef));
    }
    out
}

fn pow_rat(b: &Rat, e: u32) -> Rat {
    let mut out = rat_int(1);
    for _ in 0..e {
        out *= b;
    }
    out
}
