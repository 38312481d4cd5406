//! Formal multivariate series with exact coefficients.
//!
//! A `Series` stores finitely many terms of a (generally doubly infinite)
//! formal series together with a per-variable *faithful window*: inside the
//! window the stored coefficients are exactly the true ones, outside nothing
//! is claimed. Constructors of exact objects (polynomials, binomial series in
//! their lower-bounded direction) leave the window unbounded. Each series
//! also carries a per-variable *support box* certifying bounds on the true
//! support, which is what makes products checkable: a convolution is accepted
//! only when every output coefficient is provably a finite sum.
//!
//! Exponents are rational with a fixed per-variable denominator, stored as
//! integer numerators. The binomial convention throughout: `(a + b)^e` is
//! expanded in nonnegative integral powers of the *second* summand.

use crate::exact::{binom_general, rat, CycNum, Rat};
use crate::{CalcError, Result};
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDef {
    pub name: String,
    pub den: i64,
}

pub type Vars = Arc<Vec<VarDef>>;

pub fn vars(defs: &[(&str, i64)]) -> Vars {
    Arc::new(
        defs.iter()
            .map(|(n, d)| {
                assert!(*d >= 1);
                VarDef { name: n.to_string(), den: *d }
            })
            .collect(),
    )
}

pub type Exps = Vec<i64>;

/// Closed interval of exponent numerators; `None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Bound {
    pub const ALL: Bound = Bound { lo: None, hi: None };
    pub fn new(lo: i64, hi: i64) -> Bound {
        Bound { lo: Some(lo), hi: Some(hi) }
    }
    pub fn point(x: i64) -> Bound {
        Bound::new(x, x)
    }
    pub fn contains(&self, x: i64) -> bool {
        self.lo.map_or(true, |l| x >= l) && self.hi.map_or(true, |h| x <= h)
    }
    /// self a subset of other
    pub fn within(&self, other: &Bound) -> bool {
        let lo_ok = match (other.lo, self.lo) {
            (None, _) => true,
            (Some(ol), Some(sl)) => sl >= ol,
            (Some(_), None) => false,
        };
        let hi_ok = match (other.hi, self.hi) {
            (None, _) => true,
            (Some(oh), Some(sh)) => sh <= oh,
            (Some(_), None) => false,
        };
        lo_ok && hi_ok
    }
    pub fn intersect(&self, other: &Bound) -> Bound {
        Bound {
            lo: opt_max(self.lo, other.lo),
            hi: opt_min(self.hi, other.hi),
        }
    }
    pub fn hull(&self, other: &Bound) -> Bound {
        Bound {
            lo: match (self.lo, other.lo) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            },
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        }
    }
    pub fn shift(&self, by: i64) -> Bound {
        Bound { lo: self.lo.map(|x| x + by), hi: self.hi.map(|x| x + by) }
    }
}

fn dfloor(a: i64, b: i64) -> i64 {
    num_integer::Integer::div_floor(&a, &b)
}

fn dceil(a: i64, b: i64) -> i64 {
    num_integer::Integer::div_ceil(&a, &b)
}

fn opt_max(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

pub fn box_all(n: usize) -> Vec<Bound> {
    vec![Bound::ALL; n]
}

/// Coefficients the series engine can carry: an abelian group with an exact
/// scalar action of the cyclotomic field.
pub trait Coeff: Clone {
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, k: &CycNum) -> Self;
    fn is_zero(&self) -> bool;
    fn text(&self) -> String;
}

impl Coeff for CycNum {
    fn add(&self, o: &Self) -> Self {
        CycNum::add(self, o)
    }
    fn neg(&self) -> Self {
        CycNum::neg(self)
    }
    fn scale(&self, k: &CycNum) -> Self {
        self.mul(k)
    }
    fn is_zero(&self) -> bool {
        CycNum::is_zero(self)
    }
    fn text(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct Series<C: Coeff> {
    pub vars: Vars,
    terms: BTreeMap<Exps, C>,
    win: Vec<Bound>,
    supp: Vec<Bound>,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub exps: String,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    pub fn text(&self) -> String {
        format!("at ({}): lhs = {}, rhs = {}", self.exps, self.lhs, self.rhs)
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(vars: &Vars) -> Self {
        let n = vars.len();
        Series {
            vars: vars.clone(),
            terms: BTreeMap::new(),
            win: box_all(n),
            supp: vec![Bound::point(0); n],
        }
    }

    /// Exact single term; faithful everywhere.
    pub fn from_term(vars: &Vars, exps: Exps, c: C) -> Self {
        assert_eq!(exps.len(), vars.len());
        let supp = exps.iter().map(|&e| Bound::point(e)).collect();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Series { vars: vars.clone(), terms, win: box_all(vars.len()), supp }
    }

    /// Empty series faithful only on `win`; fill with `add_term`.
    pub fn new_windowed(vars: &Vars, win: Vec<Bound>) -> Self {
        assert_eq!(win.len(), vars.len());
        Series {
            vars: vars.clone(),
            terms: BTreeMap::new(),
            supp: win.clone(),
            win,
        }
    }

    /// Accumulate a term, silently dropping anything outside the window.
    pub fn add_term(&mut self, exps: Exps, c: C) {
        if c.is_zero() || !win_contains(&self.win, &exps) {
            return;
        }
        match self.terms.entry(exps) {
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

    pub fn window(&self) -> &[Bound] {
        &self.win
    }

    pub fn support(&self) -> &[Bound] {
        &self.supp
    }

    /// Declare tighter certified support bounds (caller's proof obligation).
    pub fn with_support(mut self, supp: Vec<Bound>) -> Self {
        assert_eq!(supp.len(), self.vars.len());
        self.supp = supp;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_vars(&self, o: &Series<C>) -> Result<()> {
        if self.vars == o.vars || *self.vars == *o.vars {
            Ok(())
        } else {
            Err(CalcError::VarMismatch)
        }
    }

    pub fn add(&self, o: &Series<C>) -> Result<Series<C>> {
        self.same_vars(o)?;
        let win: Vec<Bound> = self
            .win
            .iter()
            .zip(&o.win)
            .map(|(a, b)| a.intersect(b))
            .collect();
        let supp: Vec<Bound> = self
            .supp
            .iter()
            .zip(&o.supp)
            .map(|(a, b)| a.hull(b))
            .collect();
        let mut out = Series { vars: self.vars.clone(), terms: BTreeMap::new(), win, supp };
        for (e, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Series<C>) -> Result<Series<C>> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Series<C> {
        Series {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            win: self.win.clone(),
            supp: self.supp.clone(),
        }
    }

    pub fn scale(&self, k: &CycNum) -> Series<C> {
        if k.is_zero() {
            return Series::zero(&self.vars);
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let s = c.scale(k);
            if !s.is_zero() {
                terms.insert(e.clone(), s);
            }
        }
        Series { vars: self.vars.clone(), terms, win: self.win.clone(), supp: self.supp.clone() }
    }

    /// Multiply by a single exact monomial.
    pub fn shift(&self, dexps: &Exps, k: &CycNum) -> Series<C> {
        assert_eq!(dexps.len(), self.vars.len());
        let mut out = Series {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            win: self
                .win
                .iter()
                .zip(dexps)
                .map(|(b, d)| b.shift(*d))
                .collect(),
            supp: self
                .supp
                .iter()
                .zip(dexps)
                .map(|(b, d)| b.shift(*d))
                .collect(),
        };
        for (e, c) in &self.terms {
            let ne: Exps = e.iter().zip(dexps).map(|(a, d)| a + d).collect();
            let s = c.scale(k);
            if !s.is_zero() {
                out.terms.insert(ne, s);
            }
        }
        out
    }

    pub fn restrict(&self, win: &[Bound]) -> Series<C> {
        let nwin: Vec<Bound> = self.win.iter().zip(win).map(|(a, b)| a.intersect(b)).collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if win_contains(&nwin, e) {
                terms.insert(e.clone(), c.clone());
            }
        }
        Series { vars: self.vars.clone(), terms, win: nwin, supp: self.supp.clone() }
    }

    /// Exact coefficient; error when the requested exponent is outside the
    /// faithful window.
    pub fn coeff(&self, exps: &Exps) -> Result<Option<&C>> {
        if !win_contains(&self.win, exps) {
            return Err(CalcError::WindowTooSmall(format!(
                "coefficient at {:?} not covered",
                exps
            )));
        }
        Ok(self.terms.get(exps))
    }

    /// Extract the coefficient of var^{num/den} as a series over the
    /// remaining variables.
    pub fn extract_var(&self, idx: usize, num: i64) -> Result<Series<C>> {
        if !self.win[idx].contains(num) {
            return Err(CalcError::WindowTooSmall(format!(
                "exponent {num} of {} not covered",
                self.vars[idx].name
            )));
        }
        let nvars: Vars = Arc::new(
            self.vars
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, v)| v.clone())
                .collect(),
        );
        let drop_at = |v: &Vec<Bound>| -> Vec<Bound> {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, b)| *b)
                .collect()
        };
        let mut out = Series {
            vars: nvars,
            terms: BTreeMap::new(),
            win: drop_at(&self.win),
            supp: drop_at(&self.supp),
        };
        for (e, c) in &self.terms {
            if e[idx] == num {
                let ne: Exps = e
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != idx)
                    .map(|(_, x)| *x)
                    .collect();
                out.add_term(ne, c.clone());
            }
        }
        Ok(out)
    }

    /// Res_x: coefficient of x^{-1}.
    pub fn residue(&self, idx: usize) -> Result<Series<C>> {
        self.extract_var(idx, -self.vars[idx].den)
    }

    /// Keep only exponents of var congruent to q/den modulo 1 (numerators
    /// congruent to q mod den). Window and support carry over.
    pub fn project_congruent(&self, idx: usize, q: i64) -> Series<C> {
        let den = self.vars[idx].den;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if (e[idx] - q).rem_euclid(den) == 0 {
                terms.insert(e.clone(), c.clone());
            }
        }
        Series { vars: self.vars.clone(), terms, win: self.win.clone(), supp: self.supp.clone() }
    }

    /// x^{m/den} -> w^{s m} x^{m/den}: the substitution x^{1/den} -> w^s x^{1/den}.
    pub fn root_scale(&self, idx: usize, s: i64, ord: i64) -> Series<C> {
        let mut out = Series {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            win: self.win.clone(),
            supp: self.supp.clone(),
        };
        for (e, c) in &self.terms {
            let w = CycNum::root_of_unity(ord, s * e[idx]);
            let sc = c.scale(&w);
            if !sc.is_zero() {
                out.terms.insert(e.clone(), sc);
            }
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(e.clone(), d);
            }
        }
        Series { vars: self.vars.clone(), terms, win: self.win.clone(), supp: self.supp.clone() }
    }

    /// Line-based text form `exponent-tuple TAB coefficient`, exponents as
    /// reduced rationals, rows in lexicographic numerator order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, c) in &self.terms {
            let parts: Vec<String> = e
                .iter()
                .zip(self.vars.iter())
                .map(|(n, v)| {
                    let g = n.gcd(&v.den);
                    let (rn, rd) = (n / g, v.den / g);
                    if rd == 1 {
                        format!("{rn}")
                    } else {
                        format!("{rn}/{rd}")
                    }
                })
                .collect();
            out.push_str(&parts.join(","));
            out.push('\t');
            out.push_str(&c.text());
            out.push('\n');
        }
        out
    }
}

pub fn win_contains(win: &[Bound], exps: &Exps) -> bool {
    win.iter().zip(exps).all(|(b, e)| b.contains(*e))
}

pub fn win_subset(inner: &[Bound], outer: &[Bound]) -> bool {
    inner.iter().zip(outer).all(|(i, o)| i.within(o))
}

/// Compare two series on an explicit window, which must lie inside both
/// faithful windows. Returns the first differing exponent as a witness.
pub fn eq_on<C: Coeff>(a: &Series<C>, b: &Series<C>, win: &[Bound]) -> Result<Option<Witness>> {
    if a.vars != b.vars && *a.vars != *b.vars {
        return Err(CalcError::VarMismatch);
    }
    for (i, w) in win.iter().enumerate() {
        if !w.within(&a.win[i]) || !w.within(&b.win[i]) {
            return Err(CalcError::WindowTooSmall(format!(
                "comparison window exceeds faithful window of {}",
                a.vars[i].name
            )));
        }
    }
    let mut keys: std::collections::BTreeSet<&Exps> = std::collections::BTreeSet::new();
    for (e, _) in a.terms.iter() {
        if win_contains(win, e) {
            keys.insert(e);
        }
    }
    for (e, _) in b.terms.iter() {
        if win_contains(win, e) {
            keys.insert(e);
        }
    }
    for e in keys {
        let ca = a.terms.get(e);
        let cb = b.terms.get(e);
        let equal = match (ca, cb) {
            (Some(x), Some(y)) => x.add(&y.neg()).is_zero(),
            (Some(x), None) => x.is_zero(),
            (None, Some(y)) => y.is_zero(),
            (None, None) => true,
        };
        if !equal {
            let fmt = |c: Option<&C>| c.map_or("0".to_string(), |x| x.text());
            let es: Vec<String> = e
                .iter()
                .zip(a.vars.iter())
                .map(|(n, v)| format!("{}^({}/{})", v.name, n, v.den))
                .collect();
            return Ok(Some(Witness {
                exps: es.join(" "),
                lhs: fmt(ca),
                rhs: fmt(cb),
            }));
        }
    }
    Ok(None)
}

pub fn is_zero_on<C: Coeff>(a: &Series<C>, win: &[Bound]) -> Result<Option<Witness>> {
    let z = Series::zero(&a.vars);
    eq_on(a, &z, win)
}

// ---------------------------------------------------------------------------
// products
// ---------------------------------------------------------------------------

/// Checked product of a scalar series with a (possibly vector-valued) series.
/// Per variable, each output coefficient must be certified a finite sum via
/// the support boxes, and the output window is the largest box on which every
/// contributing pair lies inside both operand windows.
pub fn mul<C: Coeff>(a: &Series<CycNum>, b: &Series<C>) -> Result<Series<C>> {
    if *a.vars != *b.vars {
        return Err(CalcError::VarMismatch);
    }
    const NEG: i128 = i128::MIN / 4;
    const POS: i128 = i128::MAX / 4;
    let v = |x: Option<i64>, inf: i128| x.map_or(inf, |y| y as i128);
    let n = a.vars.len();
    let mut win = Vec::with_capacity(n);
    let mut supp = Vec::with_capacity(n);
    for i in 0..n {
        let (sa_lo, sa_hi) = (v(a.supp[i].lo, NEG), v(a.supp[i].hi, POS));
        let (sb_lo, sb_hi) = (v(b.supp[i].lo, NEG), v(b.supp[i].hi, POS));
        // fiber finiteness at every output exponent
        if !((sa_lo > NEG || sb_hi < POS) && (sa_hi < POS || sb_lo > NEG)) {
            return Err(CalcError::UnboundedConvolution(a.vars[i].name.clone()));
        }
        let (wa_lo, wa_hi) = (v(a.win[i].lo, NEG), v(a.win[i].hi, POS));
        let (wb_lo, wb_hi) = (v(b.win[i].lo, NEG), v(b.win[i].hi, POS));
        let mut elo = NEG;
        let mut ehi = POS;
        // contributing a-exponents live in [max(sa_lo, e-sb_hi), min(sa_hi, e-sb_lo)]
        if sa_lo < wa_lo {
            elo = elo.max(wa_lo.saturating_add(sb_hi));
        }
        if sa_hi > wa_hi {
            ehi = ehi.min(wa_hi.saturating_add(sb_lo));
        }
        if sb_lo < wb_lo {
            elo = elo.max(wb_lo.saturating_add(sa_hi));
        }
        if sb_hi > wb_hi {
            ehi = ehi.min(wb_hi.saturating_add(sa_lo));
        }
        let clamp = |x: i128| -> Option<i64> {
            if x <= NEG || x >= POS {
                None
            } else {
                Some(x as i64)
            }
        };
        win.push(Bound { lo: clamp(elo), hi: clamp(ehi) });
        supp.push(Bound {
            lo: if sa_lo > NEG && sb_lo > NEG { Some((sa_lo + sb_lo) as i64) } else { None },
            hi: if sa_hi < POS && sb_hi < POS { Some((sa_hi + sb_hi) as i64) } else { None },
        });
    }
    let mut out = Series { vars: a.vars.clone(), terms: BTreeMap::new(), win, supp };
    convolve_into(&mut out, a, b);
    Ok(out)
}

/// Product restricted to an explicit output window whose faithfulness the
/// caller has established (typically by building the operands with inflated
/// windows). Use `mul` whenever the support boxes suffice.
pub fn mul_within<C: Coeff>(a: &Series<CycNum>, b: &Series<C>, outwin: &[Bound]) -> Series<C> {
    let supp: Vec<Bound> = a
        .supp
        .iter()
        .zip(&b.supp)
        .map(|(x, y)| Bound {
            lo: match (x.lo, y.lo) {
                (Some(p), Some(q)) => Some(p + q),
                _ => None,
            },
            hi: match (x.hi, y.hi) {
                (Some(p), Some(q)) => Some(p + q),
                _ => None,
            },
        })
        .collect();
    let mut out = Series {
        vars: a.vars.clone(),
        terms: BTreeMap::new(),
        win: outwin.to_vec(),
        supp,
    };
    convolve_into(&mut out, a, b);
    out
}

fn convolve_into<C: Coeff>(out: &mut Series<C>, a: &Series<CycNum>, b: &Series<C>) {
    for (ea, ca) in a.terms.iter() {
        for (eb, cb) in b.terms.iter() {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if win_contains(&out.win, &e) {
                out.add_term(e, cb.scale(ca));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// binomial series and delta functions
// ---------------------------------------------------------------------------

/// (x_A + sign_B x_B)^(e_num/den_A), expanded in nonnegative integral powers
/// of x_B (at most `jmax` of them). When the exponent is a nonnegative
/// integer the result is an exact polynomial and the window is unbounded.
pub fn binom_expand(
    vs: &Vars,
    ord: i64,
    idx_a: usize,
    sign_b: i64,
    idx_b: usize,
    e_num: i64,
    jmax: i64,
) -> Series<CycNum> {
    assert!(idx_a != idx_b);
    assert!(sign_b == 1 || sign_b == -1);
    let den_a = vs[idx_a].den;
    let den_b = vs[idx_b].den;
    let integral = e_num >= 0 && e_num % den_a == 0;
    let jcap = if integral { e_num / den_a } else { jmax };
    let n = vs.len();
    let mut win = box_all(n);
    let mut supp = vec![Bound::point(0); n];
    if integral {
        supp[idx_a] = Bound::new(0, e_num);
        supp[idx_b] = Bound::new(0, (e_num / den_a) * den_b);
    } else {
        supp[idx_a] = Bound { lo: None, hi: Some(e_num) };
        supp[idx_b] = Bound { lo: Some(0), hi: None };
        win[idx_b] = Bound { lo: None, hi: Some(jcap * den_b) };
    }
    let mut out = Series { vars: vs.clone(), terms: BTreeMap::new(), win, supp };
    let e_rat = rat(e_num, den_a);
    for j in 0..=jcap {
        let mut c = binom_general(&e_rat, j as u64);
        if sign_b == -1 && j % 2 == 1 {
            c = -c;
        }
        let mut exps = vec![0i64; n];
        exps[idx_a] = e_num - j * den_a;
        exps[idx_b] = j * den_b;
        out.add_term(exps, CycNum::from_rat(ord, c));
    }
    out
}

/// Specification of a delta-function argument
/// w^s * ((first + sign_second * second) / (sign_den * den))^(1/q),
/// with `second` and the denominator optional.
#[derive(Clone, Debug)]
pub struct DeltaSpec {
    pub s: i64,
    pub q: i64,
    pub first: usize,
    pub second: Option<(i64, usize)>,
    pub den: Option<(i64, usize)>,
}

/// Sum over n of the n-th power of the delta argument, restricted to `win`
/// (which must bound the summation index through the denominator variable,
/// or the primary variable when there is no denominator).
pub fn delta_series(vs: &Vars, ord: i64, spec: &DeltaSpec, win: &[Bound]) -> Result<Series<CycNum>> {
    let nv = vs.len();
    assert_eq!(win.len(), nv);
    let q = spec.q;
    let den_first = vs[spec.first].den;
    if den_first % q != 0 {
        return Err(CalcError::BadConfig(
            "primary delta variable cannot carry the fractional exponents".into(),
        ));
    }
    // range of the summation index n: argument^n gives the denominator
    // variable exponent -n/q, and the primary variable exponent n/q - j.
    let (n_lo, n_hi) = match spec.den {
        Some((_, idx_c)) => {
            let den_c = vs[idx_c].den;
            if den_c % q != 0 {
                return Err(CalcError::BadConfig("denominator variable denominator".into()));
            }
            let b = win[idx_c];
            match (b.lo, b.hi) {
                (Some(lo), Some(hi)) => {
                    // exponent numerator is -n * den_c / q
                    let k = den_c / q;
                    (dceil(-hi, k), dfloor(-lo, k))
                }
                _ => {
                    return Err(CalcError::UnboundedConvolution(vs[idx_c].name.clone()));
                }
            }
        }
        None => {
            if spec.second.is_some() {
                return Err(CalcError::BadConfig(
                    "two-term delta argument needs a denominator variable".into(),
                ));
            }
            let b = win[spec.first];
            let k = den_first / q;
            match (b.lo, b.hi) {
                (Some(lo), Some(hi)) => (dceil(lo, k), dfloor(hi, k)),
                _ => return Err(CalcError::UnboundedConvolution(vs[spec.first].name.clone())),
            }
        }
    };
    let mut supp = vec![Bound::point(0); nv];
    supp[spec.first] = Bound::ALL;
    if let Some((_, idx_b)) = spec.second {
        supp[idx_b] = Bound { lo: Some(0), hi: None };
    }
    if let Some((_, idx_c)) = spec.den {
        supp[idx_c] = Bound::ALL;
    }
    let mut out = Series {
        vars: vs.clone(),
        terms: BTreeMap::new(),
        win: win.to_vec(),
        supp,
    };
    for n in n_lo..=n_hi {
        let w = CycNum::root_of_unity(ord, spec.s * n);
        // denominator factor (sign_c x_C)^{-n/q}
        let (den_coeff, den_exp, idx_c) = match spec.den {
            Some((sign_c, idx_c)) => {
                let mut c = Rat::from_integer(1.into());
                if sign_c == -1 {
                    if q != 1 {
                        return Err(CalcError::BadConfig(
                            "negative denominator with fractional root".into(),
                        ));
                    }
                    if n % 2 != 0 {
                        c = -c;
                    }
                }
                (c, -n * (vs[idx_c].den / q), Some(idx_c))
            }
            None => (Rat::from_integer(1.into()), 0, None),
        };
        match spec.second {
            None => {
                let mut exps = vec![0i64; nv];
                exps[spec.first] = n * (den_first / q);
                if let Some(ic) = idx_c {
                    exps[ic] += den_exp;
                }
                out.add_term(exps, w.scale(&den_coeff));
            }
            Some((sign_b, idx_b)) => {
                // (first + sign_b second)^{n/q}: expand in second
                let den_b = vs[idx_b].den;
                let e_rat = rat(n, q);
                // j bounded by the window of x_B and by the lower window of x_first
                let mut jcap = match win[idx_b].hi {
                    Some(h) => dfloor(h, den_b),
                    None => return Err(CalcError::UnboundedConvolution(vs[idx_b].name.clone())),
                };
                if let Some(lo_a) = win[spec.first].lo {
                    // exponent numerator of first: (n - j q)(den_first/q) >= lo_a
                    let k = den_first / q;
                    let j_from_a = dfloor(n * k - lo_a, q * k);
                    jcap = jcap.min(j_from_a);
                }
                if n >= 0 && n % q == 0 {
                    jcap = jcap.min(n / q); // polynomial case
                }
                for j in 0..=jcap {
                    let mut c = binom_general(&e_rat, j as u64) * &den_coeff;
                    if sign_b == -1 && j % 2 == 1 {
                        c = -c;
                    }
                    if c.is_zero() {
                        continue;
                    }
                    let mut exps = vec![0i64; nv];
                    exps[spec.first] = n * (den_first / q) - j * den_first;
                    exps[idx_b] = j * den_b;
                    if let Some(ic) = idx_c {
                        exps[ic] += den_exp;
                    }
                    out.add_term(exps, w.scale(&c));
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// substitution limits
// ---------------------------------------------------------------------------

/// Replace x^(m/den) by w^{s m} (sign_a x_A + x_B)^(m/den), expanding in
/// nonnegative integral powers of x_B, and drop the substituted variable.
/// x_A must share the substituted variable's exponent denominator; a negative
/// sign_a is only meaningful for integral exponents. The result is collected
/// on `outwin` (over the reduced variable list), whose faithfulness is the
/// caller's margin obligation; the summation over x_B powers must be capped
/// by `outwin`, otherwise the substitution is rejected as unbounded.
pub fn substitute_limit<C: Coeff>(
    src: &Series<C>,
    ord: i64,
    idx: usize,
    s: i64,
    sign_a: i64,
    idx_a: usize,
    idx_b: usize,
    outwin: &[Bound],
) -> Result<Series<C>> {
    assert!(idx != idx_a && idx != idx_b && idx_a != idx_b);
    let den = src.vars[idx].den;
    let den_a = src.vars[idx_a].den;
    let den_b = src.vars[idx_b].den;
    if den_a != den {
        return Err(CalcError::BadConfig(
            "substitution target must carry the fractional exponents".into(),
        ));
    }
    let nvars: Vars = Arc::new(
        src.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.clone())
            .collect(),
    );
    let reindex = |i: usize| -> usize {
        if i < idx {
            i
        } else {
            i - 1
        }
    };
    let (oa, ob) = (reindex(idx_a), reindex(idx_b));
    assert_eq!(outwin.len(), nvars.len());
    // honest support: x_A picks up m - j*den (unbounded below through j,
    // unless every substituted power is polynomial), x_B picks up +j*den_b
    let opt_add = |x: Option<i64>, y: Option<i64>| match (x, y) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let mut supp: Vec<Bound> = src
        .supp
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, b)| *b)
        .collect();
    let polynomial = matches!(src.supp[idx].lo, Some(l) if l >= 0);
    supp[oa] = Bound {
        lo: if polynomial { src.supp[idx_a].lo } else { None },
        hi: opt_add(src.supp[idx_a].hi, src.supp[idx].hi),
    };
    supp[ob] = Bound {
        lo: src.supp[idx_b].lo,
        hi: if polynomial { opt_add(src.supp[idx_b].hi, src.supp[idx].hi) } else { None },
    };
    let mut out = Series::new_windowed(&nvars, outwin.to_vec()).with_support(supp);
    for (e, c) in src.terms() {
        let m = e[idx];
        if sign_a == -1 && m.rem_euclid(den) != 0 {
            return Err(CalcError::BadConfig(
                "negative leading substitution summand needs integral exponents".into(),
            ));
        }
        let w = CycNum::root_of_unity(ord, s * m);
        let base: Exps = e
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, x)| *x)
            .collect();
        // j capped by the output window: x_B grows with j, x_A shrinks
        let mut jcap: Option<i64> = None;
        if let Some(hb) = outwin[ob].hi {
            jcap = Some(opt_min(jcap, Some(dfloor(hb - base[ob], den_b))).unwrap());
        }
        if let Some(la) = outwin[oa].lo {
            // exponent of A: base + m - j*den
            jcap = Some(opt_min(jcap, Some(dfloor(base[oa] + m - la, den))).unwrap());
        }
        if m >= 0 && m % den == 0 {
            jcap = Some(opt_min(jcap, Some(m / den)).unwrap());
        }
        let jcap = match jcap {
            Some(j) => j,
            None => return Err(CalcError::UnboundedConvolution(src.vars[idx_b].name.clone())),
        };
        let e_rat = rat(m, den);
        for j in 0..=jcap {
            let mut coef = binom_general(&e_rat, j as u64);
            if coef.is_zero() {
                continue;
            }
            if sign_a == -1 && (m / den - j) % 2 != 0 {
                coef = -coef;
            }
            let mut ne = base.clone();
            ne[oa] += m - j * den;
            ne[ob] += j * den_b;
            out.add_term(ne, c.scale(&w.scale(&coef)));
        }
    }
    Ok(out)
}

/// Drop a variable that occurs with exponent zero everywhere.
pub fn drop_var<C: Coeff>(src: &Series<C>, idx: usize) -> Series<C> {
    let nvars: Vars = Arc::new(
        src.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.clone())
            .collect(),
    );
    let strip = |v: &[Bound]| -> Vec<Bound> {
        v.iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, b)| *b)
            .collect()
    };
    let mut out = Series {
        vars: nvars,
        terms: BTreeMap::new(),
        win: strip(&src.win),
        supp: strip(&src.supp),
    };
    for (e, c) in src.terms() {
        assert_eq!(e[idx], 0, "drop_var on a live variable");
        let ne: Exps = e
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, x)| *x)
            .collect();
        out.terms.insert(ne, c.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// identity checks on the delta calculus
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn from_witness(w: Option<Witness>) -> Self {
        CheckResult { pass: w.is_none(), witness: w.map(|x| x.text()) }
    }
}

/// x2^{-1} d((x1-x0)/x2) = x1^{-1} d((x2+x0)/x1) compared for all exponents
/// with |numerator| <= radius in each variable.
pub fn check_delta_two_term(ord: i64, radius: i64) -> Result<CheckResult> {
    let vs = vars(&[("x0", 1), ("x1", 1), ("x2", 1)]);
    let r = radius;
    let build = Bound::new(-r - 1, r + 1);
    let win = vec![build; 3];
    let lhs = delta_series(
        &vs,
        ord,
        &DeltaSpec { s: 0, q: 1, first: 1, second: Some((-1, 0)), den: Some((1, 2)) },
        &win,
    )?
    .shift(&vec![0, 0, -1], &CycNum::one(ord));
    let rhs = delta_series(
        &vs,
        ord,
        &DeltaSpec { s: 0, q: 1, first: 2, second: Some((1, 0)), den: Some((1, 1)) },
        &win,
    )?
    .shift(&vec![0, -1, 0], &CycNum::one(ord));
    let cmp = vec![Bound::new(-r, r); 3];
    Ok(CheckResult::from_witness(eq_on(&lhs, &rhs, &cmp)?))
}

/// x0^{-1} d((x1-x2)/x0) - x0^{-1} d((x2-x1)/(-x0)) = x2^{-1} d((x1-x0)/x2).
pub fn check_delta_three_term(ord: i64, radius: i64) -> Result<CheckResult> {
    let vs = vars(&[("x0", 1), ("x1", 1), ("x2", 1)]);
    let r = radius;
    let win = vec![Bound::new(-r - 1, r + 1); 3];
    let t1 = delta_series(
        &vs,
        ord,
        &DeltaSpec { s: 0, q: 1, first: 1, second: Some((-1, 2)), den: Some((1, 0)) },
        &win,
    )?
    .shift(&vec![-1, 0, 0], &CycNum::one(ord));
    let t2 = delta_series(
        &vs,
        ord,
        &DeltaSpec { s: 0, q: 1, first: 2, second: Some((-1, 1)), den: Some((-1, 0)) },
        &win,
    )?
    .shift(&vec![-1, 0, 0], &CycNum::one(ord));
    let rhs = delta_series(
        &vs,
        ord,
        &DeltaSpec { s: 0, q: 1, first: 1, second: Some((-1, 0)), den: Some((1, 2)) },
        &win,
    )?
    .shift(&vec![0, 0, -1], &CycNum::one(ord));
    let lhs = t1.sub(&t2)?;
    let cmp = vec![Bound::new(-r, r); 3];
    Ok(CheckResult::from_witness(eq_on(&lhs, &rhs, &cmp)?))
}

/// d(x) = (1/p) sum_r d(w^r x^{1/p}) on a single fractional-exponent variable.
pub fn check_delta_fractional_split(p: i64, radius: i64) -> Result<CheckResult> {
    let vs = vars(&[("x", p)]);
    let win = vec![Bound::new(-radius * p, radius * p)];
    let lhs = delta_series(&vs, p, &DeltaSpec { s: 0, q: 1, first: 0, second: None, den: None }, &win)?;
    let mut rhs = Series::zero(&vs).restrict(&win);
    for r in 0..p {
        let t = delta_series(&vs, p, &DeltaSpec { s: r, q: p, first: 0, second: None, den: None }, &win)?;
        rhs = rhs.add(&t)?;
    }
    rhs = rhs.scale(&CycNum::from_rat(p, rat(1, p)));
    Ok(CheckResult::from_witness(eq_on(&lhs, &rhs, &win)?))
}

/// x2^{-1} d(w^r ((x1-x0)/x2)^{1/p}) = x1^{-1} d(w^{-r} ((x2+x0)/x1)^{1/p}).
pub fn check_delta_fractional_two_term(p: i64, r: i64, radius: i64) -> Result<CheckResult> {
    let vs = vars(&[("x0", 1), ("x1", p), ("x2", p)]);
    let rr = radius;
    let win = vec![
        Bound::new(-rr - 1, rr + 1),
        Bound::new((-rr - 1) * p, (rr + 1) * p),
        Bound::new((-rr - 1) * p, (rr + 1) * p),
    ];
    let lhs = delta_series(
        &vs,
        p,
        &DeltaSpec { s: r, q: p, first: 1, second: Some((-1, 0)), den: Some((1, 2)) },
        &win,
    )?
    .shift(&vec![0, 0, -p], &CycNum::one(p));
    let rhs = delta_series(
        &vs,
        p,
        &DeltaSpec { s: -r, q: p, first: 2, second: Some((1, 0)), den: Some((1, 1)) },
        &win,
    )?
    .shift(&vec![0, -p, 0], &CycNum::one(p));
    let cmp = vec![
        Bound::new(-rr, rr),
        Bound::new(-rr * p, rr * p),
        Bound::new(-rr * p, rr * p),
    ];
    Ok(CheckResult::from_witness(eq_on(&lhs, &rhs, &cmp)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(ord: i64, n: i64, d: i64) -> CycNum {
        CycNum::from_rat(ord, rat(n, d))
    }

    #[test]
    fn binom_expand_examples() {
        // (x + y)^{1/2} through y^2: x^{1/2} + (1/2) x^{-1/2} y - (1/8) x^{-3/2} y^2
        let vs = vars(&[("x", 2), ("y", 1)]);
        let s = binom_expand(&vs, 2, 0, 1, 1, 1, 2);
        assert_eq!(s.coeff(&vec![1, 0]).unwrap().unwrap(), &c(2, 1, 1));
        assert_eq!(s.coeff(&vec![-1, 1]).unwrap().unwrap(), &c(2, 1, 2));
        assert_eq!(s.coeff(&vec![-3, 2]).unwrap().unwrap(), &c(2, -1, 8));
        assert!(s.coeff(&vec![-1, 3]).is_err(), "outside the faithful window");
        // (x - y)^2 is exact
        let p = binom_expand(&vs, 2, 0, -1, 1, 4, 10);
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.coeff(&vec![2, 1]).unwrap().unwrap(), &c(2, -2, 1));
        assert!(p.coeff(&vec![0, 99]).unwrap().is_none(), "window unbounded");
    }

    #[test]
    fn geometric_telescope() {
        // (x1 - x2)^{-1} * (x1 - x2) = 1, with the binomial expanded in x2
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let inv = binom_expand(&vs, 1, 0, -1, 1, -1, 40);
        let lin = binom_expand(&vs, 1, 0, -1, 1, 1, 2);
        let prod = mul(&inv, &lin).unwrap();
        let one = Series::from_term(&vs, vec![0, 0], CycNum::one(1));
        let cmp = vec![Bound::new(-10, 10), Bound::new(0, 30)];
        assert!(eq_on(&prod, &one, &cmp).unwrap().is_none());
    }

    #[test]
    fn delta_kills_x1_minus_x2() {
        // d(x1/x2) * (x1 - x2) = 0
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let win = vec![Bound::new(-12, 12), Bound::new(-12, 12)];
        let d = delta_series(
            &vs,
            1,
            &DeltaSpec { s: 0, q: 1, first: 0, second: None, den: Some((1, 1)) },
            &win,
        )
        .unwrap();
        let lin = binom_expand(&vs, 1, 0, -1, 1, 1, 2);
        let prod = mul(&d, &lin).unwrap();
        let cmp = vec![Bound::new(-8, 8), Bound::new(-8, 8)];
        assert!(is_zero_on(&prod, &cmp).unwrap().is_none());
    }

    #[test]
    fn delta_substitution_property() {
        // d(x1/x2) f(x1) = d(x1/x2) f(x2) for the Laurent polynomial
        // f(x) = 3 x^2 - (1/2) x^{-1}
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let win = vec![Bound::new(-15, 15), Bound::new(-15, 15)];
        let d = delta_series(
            &vs,
            1,
            &DeltaSpec { s: 0, q: 1, first: 0, second: None, den: Some((1, 1)) },
            &win,
        )
        .unwrap();
        let mut f1 = Series::zero(&vs);
        f1.add_term(vec![2, 0], c(1, 3, 1));
        f1.add_term(vec![-1, 0], c(1, -1, 2));
        let mut f2 = Series::zero(&vs);
        f2.add_term(vec![0, 2], c(1, 3, 1));
        f2.add_term(vec![0, -1], c(1, -1, 2));
        let lhs = mul(&d, &f1).unwrap();
        let rhs = mul(&d, &f2).unwrap();
        let cmp = vec![Bound::new(-9, 9), Bound::new(-9, 9)];
        assert!(eq_on(&lhs, &rhs, &cmp).unwrap().is_none());
    }

    #[test]
    fn expansion_direction_matters() {
        // (x1 - x2)^{-1} expanded in x2 minus the expansion of (-x2 + x1)^{-1}
        // in x1 equals the two-sided delta support: coefficient 1 at every
        // x1^{-1-k} x2^k and x1^k x2^{-1-k}.
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let a = binom_expand(&vs, 1, 0, -1, 1, -1, 25); // sum x1^{-1-k} x2^k
        // (-x2 + x1)^{-1} = -(x2 - x1)^{-1}, expanded in x1
        let b = binom_expand(&vs, 1, 1, -1, 0, -1, 25).neg();
        let diff = a.sub(&b).unwrap();
        for k in 0..5i64 {
            assert_eq!(diff.coeff(&vec![-1 - k, k]).unwrap().unwrap(), &CycNum::one(1));
            assert_eq!(diff.coeff(&vec![k, -1 - k]).unwrap().unwrap(), &CycNum::one(1));
        }
        assert!(diff.coeff(&vec![0, 0]).unwrap().is_none());
    }

    #[test]
    fn residue_and_extract() {
        let vs = vars(&[("x", 2), ("y", 1)]);
        let mut s = Series::zero(&vs);
        s.add_term(vec![-2, 3], c(2, 7, 1)); // x^{-1} y^3
        s.add_term(vec![1, 3], c(2, 5, 1));
        let r = s.residue(0).unwrap();
        assert_eq!(r.coeff(&vec![3]).unwrap().unwrap(), &c(2, 7, 1));
        let e = s.extract_var(0, 1).unwrap();
        assert_eq!(e.coeff(&vec![3]).unwrap().unwrap(), &c(2, 5, 1));
    }

    #[test]
    fn project_congruent_matches_root_averaging() {
        // projection onto exponents in Z + q/p equals (1/p) sum_r w^{-qr} (x^{1/p} -> w^r x^{1/p})
        let p = 3i64;
        let vs = vars(&[("x", p)]);
        let mut s = Series::zero(&vs);
        for (e, n, d) in [(-4i64, 2i64, 1i64), (-2, 1, 3), (0, 5, 1), (1, -1, 2), (3, 7, 2), (5, 1, 1)] {
            s.add_term(vec![e], c(p, n, d));
        }
        for q in 0..p {
            let proj = s.project_congruent(0, q);
            let mut avg = Series::zero(&vs);
            for r in 0..p {
                let tw = s
                    .root_scale(0, r, p)
                    .scale(&CycNum::root_of_unity(p, -q * r));
                avg = avg.add(&tw).unwrap();
            }
            avg = avg.scale(&CycNum::from_rat(p, rat(1, p)));
            let cmp = vec![Bound::new(-6 * p, 6 * p)];
            assert!(eq_on(&proj, &avg, &cmp).unwrap().is_none(), "q = {q}");
        }
    }

    #[test]
    fn substitute_examples() {
        // x1 -> (x2 + x0): a single power x1^2 becomes x2^2 + 2 x2 x0 + x0^2
        let vs = vars(&[("x1", 1), ("x0", 1), ("x2", 1)]);
        let s = Series::from_term(&vs, vec![2, 0, 0], CycNum::one(1));
        let out = substitute_limit(&s, 1, 0, 0, 1, 2, 1, &[Bound::new(0, 9), Bound::new(0, 9)]).unwrap();
        assert_eq!(out.coeff(&vec![0, 2]).unwrap().unwrap(), &CycNum::one(1));
        assert_eq!(out.coeff(&vec![1, 1]).unwrap().unwrap(), &c(1, 2, 1));
        assert_eq!(out.coeff(&vec![2, 0]).unwrap().unwrap(), &CycNum::one(1));
        // fractional with root twist: x^{1/2} -> w (y + z)^{1/2}, w = -1
        let vs2 = vars(&[("x", 2), ("y", 2), ("z", 1)]);
        let s2 = Series::from_term(&vs2, vec![1, 0, 0], CycNum::one(2));
        let out2 =
            substitute_limit(&s2, 2, 0, 1, 1, 1, 2, &[Bound::new(-9, 9), Bound::new(0, 4)]).unwrap();
        assert_eq!(out2.coeff(&vec![1, 0]).unwrap().unwrap(), &c(2, -1, 1));
        assert_eq!(out2.coeff(&vec![-1, 1]).unwrap().unwrap(), &c(2, -1, 2));
    }

    #[test]
    fn resolving_factor_alone_has_limit_one() {
        // ((x1 - x2)/x0)^k under x1 -> x2 + x0 collapses to 1
        let vs = vars(&[("x1", 1), ("x2", 1), ("x0", 1)]);
        for k in 1..=4i64 {
            let pk = binom_expand(&vs, 1, 0, -1, 1, k, 10);
            let outwin = vec![Bound::new(-6, 6), Bound::new(-6, 12)];
            let sub = substitute_limit(&pk, 1, 0, 0, 1, 1, 2, &outwin).unwrap();
            // divide by x0^k: shift by -k
            let shifted = sub.shift(&vec![0, -k], &CycNum::one(1));
            let one = Series::from_term(&shifted.vars, vec![0, 0], CycNum::one(1));
            let cmp = vec![Bound::new(-4, 4), Bound::new(-4, 4)];
            assert!(eq_on(&shifted, &one, &cmp).unwrap().is_none(), "k = {k}");
        }
    }

    #[test]
    fn delta_identities_all_orders() {
        for p in [1i64, 2, 3] {
            assert!(check_delta_two_term(p, 3).unwrap().pass);
            assert!(check_delta_three_term(p, 3).unwrap().pass);
            assert!(check_delta_fractional_split(p, 3).unwrap().pass);
            for r in 0..p {
                assert!(check_delta_fractional_two_term(p, r, 3).unwrap().pass, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn fractional_two_term_spot_coefficient() {
        // p = 2, r = 1: on the left, the n = 1 term contributes
        // w * binom(1/2, 1) * (-1) = 1/2 at x1^{1/2} x0^1 x2^{-3/2}.
        let p = 2i64;
        let vs = vars(&[("x0", 1), ("x1", p), ("x2", p)]);
        let win = vec![Bound::new(-4, 4), Bound::new(-8, 8), Bound::new(-8, 8)];
        let lhs = delta_series(
            &vs,
            p,
            &DeltaSpec { s: 1, q: p, first: 1, second: Some((-1, 0)), den: Some((1, 2)) },
            &win,
        )
        .unwrap()
        .shift(&vec![0, 0, -p], &CycNum::one(p));
        assert_eq!(lhs.coeff(&vec![1, -1, -3]).unwrap().unwrap(), &c(2, 1, 2));
    }

    #[test]
    fn unbounded_products_rejected() {
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let win = vec![Bound::new(-6, 6), Bound::new(-6, 6)];
        let d = delta_series(
            &vs,
            1,
            &DeltaSpec { s: 0, q: 1, first: 0, second: None, den: Some((1, 1)) },
            &win,
        )
        .unwrap();
        match mul(&d, &d) {
            Err(CalcError::UnboundedConvolution(_)) => {}
            other => panic!("delta * delta must be rejected, got {other:?}"),
        }
    }

    #[test]
    fn window_bookkeeping_through_mul() {
        // multiply a lower-bounded geometric series by a polynomial and make
        // sure the faithful window shrinks exactly where it must
        let vs = vars(&[("x1", 1), ("x2", 1)]);
        let inv = binom_expand(&vs, 1, 0, -1, 1, -2, 12); // (x1-x2)^{-2}, x2-window [0,12]
        let lin = binom_expand(&vs, 1, 0, -1, 1, 2, 4);
        let prod = mul(&inv, &lin).unwrap();
        // (x1-x2)^{-2} (x1-x2)^2 = 1 and the x2 faithful window is [.., 12]
        assert!(prod.window()[1].hi.unwrap() >= 10);
        let one = Series::from_term(&vs, vec![0, 0], CycNum::one(1));
        let cmp = vec![Bound::new(-5, 5), Bound::new(0, 10)];
        assert!(eq_on(&prod, &one, &cmp).unwrap().is_none());
    }

    #[test]
    fn text_serialization_golden() {
        let vs = vars(&[("x", 2), ("y", 1)]);
        let mut s = Series::zero(&vs);
        s.add_term(vec![-3, 2], c(2, 1, 2));
        s.add_term(vec![2, 0], c(2, -4, 1));
        assert_eq!(s.to_text(), "-3/2,2\t1/2\n1,0\t-4/1\n");
    }

    #[test]
    fn golden_delta_line_format() {
        let vs = vars(&[("x", 1)]);
        let win = vec![Bound::new(-2, 2)];
        let d = delta_series(&vs, 1, &DeltaSpec { s: 0, q: 1, first: 0, second: None, den: None }, &win)
            .unwrap();
        assert_eq!(d.to_text(), "-2\t1/1\n-1\t1/1\n0\t1/1\n1\t1/1\n2\t1/1\n");
    }
}
