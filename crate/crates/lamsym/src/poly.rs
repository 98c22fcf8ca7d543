//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Indeterminates cover jet variables, parameters, opaque-function
//! derivatives, `exp` atoms and power products `base^p` for parameter
//! exponent directions. Monomials are ordered graded-lexicographically with
//! the variable order of the symbol table, which makes every iteration (and
//! hence rendering and equality) deterministic.
//!
//! The GCD is a primitive polynomial remainder sequence over a chosen main
//! variable, with contents handled recursively. Inputs here stay desk-sized,
//! so the classical algorithm is the right tool.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::symbol::{FuncId, SymbolId};

/// Atom admissible as the base of a power product with a parameter exponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PowBase {
    Sym(SymbolId),
    Func(FuncId, u32),
    Exp(SymbolId),
    Rat(BigRational),
}

/// One indeterminate of the polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indet {
    /// Jet variable or parameter, ordered by table position.
    Sym(SymbolId),
    /// k-th derivative of an opaque function.
    Func(FuncId, u32),
    /// `exp` of a base variable.
    Exp(SymbolId),
    /// `base^p` for a parameter direction `p`; algebraically independent of
    /// its base, which is sound for generic integer parameter values.
    Pow(PowBase, SymbolId),
}

impl Indet {
    /// The atom as a power-product base; `None` for an already-parametric
    /// power, whose re-exponentiation would leave the exponent lattice.
    pub fn to_pow_base(&self) -> Option<PowBase> {
        match self {
            Indet::Sym(s) => Some(PowBase::Sym(*s)),
            Indet::Func(f, k) => Some(PowBase::Func(*f, *k)),
            Indet::Exp(s) => Some(PowBase::Exp(*s)),
            Indet::Pow(..) => None,
        }
    }
}

/// Power product with non-negative exponents, sorted by indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Indet, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Indet) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds from unsorted factors, merging repeats and dropping zeros.
    pub fn from_powers(powers: impl IntoIterator<Item = (Indet, u32)>) -> Self {
        let mut out = Monomial::one();
        for (v, e) in powers {
            if e > 0 {
                out = out.mul(&Monomial(vec![(v, e)]));
            }
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn exponent_of(&self, v: &Indet) -> u32 {
        self.0
            .iter()
            .find(|(i, _)| i == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Indet, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Exact monomial quotient, `None` when any exponent would go negative.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() {
                out.push(self.0[i].clone());
                i += 1;
                continue;
            }
            if i == self.0.len() {
                return None;
            }
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => return None,
                Ordering::Equal => {
                    let (e, eb) = (self.0[i].1, other.0[j].1);
                    if eb > e {
                        return None;
                    }
                    if e > eb {
                        out.push((self.0[i].0.clone(), e - eb));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Splits off the named variable: returns its exponent and the rest.
    fn split(&self, v: &Indet) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(i, ex)| {
                if i == v {
                    e = *ex;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        // Lexicographic tie-break: larger exponent on the earliest
        // differing variable wins.
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match self.0[i].1.cmp(&other.0[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        match (i < self.0.len(), j < other.0.len()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; the zero polynomial has no terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(v: Indet) -> Self {
        MultiPoly::from_monomial(Monomial::var(v), BigRational::one())
    }

    pub fn from_monomial(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        if self.terms.is_empty() {
            return None;
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c);
            }
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.mul(m), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        // iterate over the smaller operand
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (m, c) in &small.terms {
            for (mm, cc) in &big.terms {
                out.add_term(m.mul(mm), c * cc);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// All indeterminates with a positive exponent somewhere.
    pub fn vars(&self) -> BTreeSet<Indet> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, _) in m.iter() {
                out.insert(i.clone());
            }
        }
        out
    }

    pub fn max_degree_in(&self, v: &Indet) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent_of(v))
            .max()
            .unwrap_or(0)
    }

    /// Signed rational content: `gcd(numerators)/lcm(denominators)` carrying
    /// the sign of the leading coefficient. Dividing by it yields coprime
    /// integer coefficients with a positive leading one.
    pub fn content(&self) -> BigRational {
        let Some((_, lead)) = self.leading() else {
            return BigRational::zero();
        };
        let mut num = BigInt::ZERO;
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mag = BigRational::new(num, den);
        if lead.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// `self / content`: coprime integer coefficients, positive leading one.
    pub fn primitive_part(&self) -> MultiPoly {
        if self.is_zero() {
            return MultiPoly::zero();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Exact polynomial quotient, `None` when the division has a remainder.
    pub fn exact_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading().unwrap();
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.try_div(dm)?;
            let c = rc / dc;
            rem = rem.sub(&d.mul_monomial(&m, &c));
            quo.add_term(m, c);
        }
        Some(quo)
    }
}

// ---------------------------------------------------------------------------
// GCD machinery: dense univariate views over a chosen main variable.
// ---------------------------------------------------------------------------

/// Dense-by-degree view of a polynomial in one main variable; coefficients
/// are polynomials free of that variable.
struct UniView {
    coeffs: Vec<MultiPoly>,
}

impl UniView {
    fn of(p: &MultiPoly, v: &Indet) -> UniView {
        let deg = p.max_degree_in(v) as usize;
        let mut coeffs = vec![MultiPoly::zero(); deg + 1];
        for (m, c) in &p.terms {
            let (e, rest) = m.split(v);
            coeffs[e as usize].add_term(rest, c.clone());
        }
        UniView { coeffs }
    }

    fn into_poly(self, v: &Indet) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (e, c) in self.coeffs.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut m = Monomial::one();
            if e > 0 {
                m = Monomial(vec![(v.clone(), e as u32)]);
            }
            for (mm, cc) in c.terms {
                out.add_term(mm.mul(&m), cc);
            }
        }
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lc(&self) -> &MultiPoly {
        self.coeffs.last().expect("non-empty view")
    }

    fn mul_coeff(&self, k: &MultiPoly) -> UniView {
        UniView {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
    }

    /// `self -= k * v^shift * b`
    fn sub_shifted(&mut self, b: &UniView, k: &MultiPoly, shift: usize) {
        let need = b.coeffs.len() + shift;
        if self.coeffs.len() < need {
            self.coeffs.resize(need, MultiPoly::zero());
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            self.coeffs[i + shift] = self.coeffs[i + shift].sub(&c.mul(k));
        }
        self.trim();
    }

    /// Content of the coefficient list (a polynomial in the other variables).
    fn content(&self) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            acc = gcd(&acc, c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn div_coeff_exact(&self, k: &MultiPoly) -> UniView {
        UniView {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.exact_div(k).expect("content division is exact"))
                .collect(),
        }
    }
}

/// Pseudo-remainder of `a` by `b` in the main variable (both views).
fn prem(a: &UniView, b: &UniView) -> UniView {
    let db = b.deg();
    let lcb = b.lc().clone();
    let mut r = UniView { coeffs: a.coeffs.clone() };
    r.trim();
    let mut needed = (a.deg() + 1).saturating_sub(db) as i64;
    while !r.is_zero() && r.deg() >= db {
        let dr = r.deg();
        let lr = r.lc().clone();
        // r := lcb*r - lr*v^(dr-db)*b; the leading terms cancel exactly
        r = r.mul_coeff(&lcb);
        r.sub_shifted(b, &lr, dr - db);
        needed -= 1;
    }
    if !r.is_zero() {
        for _ in 0..needed.max(0) {
            r = r.mul_coeff(&lcb);
        }
    }
    r
}

/// GCD of two polynomials, returned primitive with a positive leading
/// coefficient (the zero polynomial for two zero inputs).
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    let pa = a.primitive_part();
    let pb = b.primitive_part();
    if pa.as_constant().is_some() || pb.as_constant().is_some() {
        return MultiPoly::one();
    }
    if pa == pb {
        return pa;
    }
    // Denominators are almost always single monomials; their gcd is the
    // term-wise monomial gcd with no remainder sequence at all.
    if let Some(m) = monomial_shortcut(&pa, &pb) {
        return m;
    }
    if pb.exact_div(&pa).is_some() {
        return pa;
    }
    if pa.exact_div(&pb).is_some() {
        return pb;
    }
    let va = pa.vars();
    let vb = pb.vars();
    let common: Vec<&Indet> = va.intersection(&vb).collect();
    if common.is_empty() {
        return MultiPoly::one();
    }
    // Main variable heuristic: a single-term leading coefficient on the
    // divisor side makes every pseudo-division step a monomial scaling, so
    // that outranks the usual smallest-worst-degree rule.
    let v = common
        .into_iter()
        .min_by_key(|v| {
            let d1 = pa.max_degree_in(v);
            let d2 = pb.max_degree_in(v);
            let divisor = if d1 < d2 { &pa } else { &pb };
            let dd = d1.min(d2);
            let lcn = divisor
                .terms()
                .filter(|(m, _)| m.exponent_of(v) == dd)
                .count()
                .min(2);
            (lcn, d1.max(d2), d1.min(d2))
        })
        .unwrap()
        .clone();

    let ua = UniView::of(&pa, &v);
    let ub = UniView::of(&pb, &v);
    let ca = ua.content();
    let cb = ub.content();
    let mut f = ua.div_coeff_exact(&ca);
    let mut g = ub.div_coeff_exact(&cb);
    if f.deg() < g.deg() {
        std::mem::swap(&mut f, &mut g);
    }
    if proves_coprime(&f, &g) {
        return gcd(&ca, &cb);
    }
    // Subresultant remainder sequence. Each pseudo-remainder is divided by
    // a factor known in advance, so coefficient growth stays polynomial
    // without recursive content extraction at every step. Unit factors are
    // dropped throughout; a gcd is only determined up to units anyway.
    let mut psi = MultiPoly::one();
    let mut beta = MultiPoly::one();
    loop {
        let delta = f.deg() - g.deg();
        let r = prem(&f, &g);
        if r.is_zero() {
            break;
        }
        if r.deg() == 0 {
            g = UniView { coeffs: vec![MultiPoly::one()] };
            break;
        }
        let next = r.div_coeff_exact(&beta);
        let glc = g.lc().clone();
        if delta > 0 {
            psi = glc
                .pow(delta as u32)
                .exact_div(&psi.pow(delta as u32 - 1))
                .expect("remainder-sequence division is exact");
        }
        beta = glc.mul(&psi.pow((g.deg() - next.deg()) as u32));
        f = g;
        g = next;
    }
    let cont_gcd = gcd(&ca, &cb);
    let gp = g.into_poly(&v);
    let gview = UniView::of(&gp, &v);
    let gc = gview.content();
    let gp = gview.div_coeff_exact(&gc).into_poly(&v).primitive_part();
    cont_gcd.mul(&gp).primitive_part()
}

/// Term-wise gcd when either primitive part is a single monomial.
fn monomial_shortcut(pa: &MultiPoly, pb: &MultiPoly) -> Option<MultiPoly> {
    let (single, other) = if pa.term_count() == 1 {
        (pa, pb)
    } else if pb.term_count() == 1 {
        (pb, pa)
    } else {
        return None;
    };
    let (m0, _) = single.leading().expect("nonzero by construction");
    let mut acc = m0.clone();
    for (m, _) in other.terms() {
        acc = acc.gcd(m);
        if acc.is_one() {
            break;
        }
    }
    Some(MultiPoly::from_monomial(acc, BigRational::one()))
}

/// Sound coprimality proof by evaluation. Specializing every coefficient
/// variable at a point where a leading coefficient survives maps the gcd to
/// a divisor of the image gcd without dropping its degree, so a constant
/// image gcd forces the gcd of the content-free inputs to be constant too.
/// The points are fixed, keeping the whole gcd deterministic.
fn proves_coprime(f: &UniView, g: &UniView) -> bool {
    const POINTS: [i64; 12] = [2, -3, 5, -7, 11, -13, 17, -19, 23, -29, 31, -37];
    let mut vars = BTreeSet::new();
    for c in f.coeffs.iter().chain(&g.coeffs) {
        vars.extend(c.vars());
    }
    let vars: Vec<Indet> = vars.into_iter().collect();
    for attempt in 0..3usize {
        let vals: BTreeMap<&Indet, BigInt> = vars
            .iter()
            .enumerate()
            .map(|(j, var)| (var, BigInt::from(POINTS[(j + attempt) % POINTS.len()])))
            .collect();
        let eval = |p: &MultiPoly| -> BigRational {
            let mut acc = BigRational::zero();
            for (m, c) in p.terms() {
                let mut num = BigInt::one();
                for (i, e) in m.iter() {
                    num *= vals[i].pow(*e);
                }
                acc += c * BigRational::from_integer(num);
            }
            acc
        };
        if eval(f.lc()).is_zero() && eval(g.lc()).is_zero() {
            continue;
        }
        let image = |u: &UniView| -> Vec<BigRational> {
            let mut out: Vec<BigRational> = u.coeffs.iter().map(&eval).collect();
            while out.last().is_some_and(|c| c.is_zero()) {
                out.pop();
            }
            out
        };
        let (fi, gi) = (image(f), image(g));
        if fi.is_empty() || gi.is_empty() {
            continue;
        }
        if univariate_gcd_degree(fi, gi) == 0 {
            return true;
        }
    }
    false
}

fn univariate_gcd_degree(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> usize {
    while !b.is_empty() {
        let lb = b.last().expect("nonempty").clone();
        for c in &mut b {
            *c /= &lb;
        }
        while a.len() >= b.len() {
            let q = a.last().expect("nonempty").clone();
            let off = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                let t = &q * bc;
                a[off + i] -= t;
            }
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
