//! Canonical rational normal form and the decidable zero test.
//!
//! A [`NormalForm`] is a fully reduced fraction of sparse polynomials:
//! `gcd(num, den)` is constant and the denominator is primitive with a
//! positive leading coefficient under the graded-lexicographic order. Two
//! expressions denote the same rational function exactly when their normal
//! forms are componentwise equal, so `is_zero` on a difference is a sound
//! and complete equality test for the whole expression class.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::linexp::LinExp;
use crate::poly::{gcd, Indet, Monomial, MultiPoly, PowBase};
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    num: MultiPoly,
    den: MultiPoly,
}

impl NormalForm {
    /// Reduce an arbitrary fraction to canonical form.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<NormalForm> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(NormalForm::zero());
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        let c = den.content();
        if !c.is_one() {
            let inv = c.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(NormalForm { num, den })
    }

    pub fn from_poly(num: MultiPoly) -> NormalForm {
        NormalForm { num, den: MultiPoly::one() }
    }

    pub fn constant(c: BigRational) -> NormalForm {
        NormalForm::from_poly(MultiPoly::constant(c))
    }

    pub fn zero() -> NormalForm {
        NormalForm::from_poly(MultiPoly::zero())
    }

    pub fn one() -> NormalForm {
        NormalForm::from_poly(MultiPoly::one())
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn neg(&self) -> NormalForm {
        NormalForm { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let g = gcd(&self.den, &other.den);
        let (num, den) = if g.is_one() {
            (
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            )
        } else {
            let d1 = self.den.exact_div(&g).expect("gcd divides");
            let d2 = other.den.exact_div(&g).expect("gcd divides");
            let t = self.num.mul(&d2).add(&other.num.mul(&d1));
            let g2 = gcd(&t, &g);
            if g2.is_one() {
                (t, d1.mul(&other.den))
            } else {
                (
                    t.exact_div(&g2).expect("gcd divides"),
                    d1.mul(&other.den.exact_div(&g2).expect("gcd divides")),
                )
            }
        };
        if num.is_zero() {
            return NormalForm::zero();
        }
        NormalForm { num, den }
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        if self.is_zero() || other.is_zero() {
            return NormalForm::zero();
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let div = |p: &MultiPoly, g: &MultiPoly| {
            if g.is_one() {
                p.clone()
            } else {
                p.exact_div(g).expect("gcd divides")
            }
        };
        NormalForm {
            num: div(&self.num, &g1).mul(&div(&other.num, &g2)),
            den: div(&self.den, &g2).mul(&div(&other.den, &g1)),
        }
    }

    pub fn recip(&self) -> Result<NormalForm> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let c = self.num.content();
        let inv = c.recip();
        Ok(NormalForm {
            num: self.den.scale(&inv),
            den: self.num.scale(&inv),
        })
    }

    pub fn div(&self, other: &NormalForm) -> Result<NormalForm> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, k: i64) -> Result<NormalForm> {
        if k == 0 {
            return Ok(NormalForm::one());
        }
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = u32::try_from(k.unsigned_abs())
            .map_err(|_| Error::Validation("power exponent out of range".into()))?;
        Ok(NormalForm {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// True dependence on a symbol, after all cancellations: the symbol
    /// itself, an exponent parameter, or the base of an opaque atom.
    pub fn depends_on(&self, s: SymbolId, table: &SymbolTable) -> bool {
        let hit = |p: &MultiPoly| {
            p.terms().any(|(m, _)| {
                m.iter().any(|(v, _)| match v {
                    Indet::Sym(u) => *u == s,
                    Indet::Func(f, _) => table.func_decl(*f).base == s,
                    Indet::Exp(u) => *u == s,
                    Indet::Pow(b, p) => {
                        *p == s
                            || match b {
                                PowBase::Sym(u) => *u == s,
                                PowBase::Func(f, _) => table.func_decl(*f).base == s,
                                PowBase::Exp(u) => *u == s,
                                PowBase::Rat(_) => false,
                            }
                    }
                })
            })
        };
        hit(&self.num) || hit(&self.den)
    }
}

/// Normalize an expression tree to canonical form.
///
/// Subtrees are shared by reference all over derived expressions (a
/// prolongation clones the same λ into every level), so results are
/// memoized by node address for the duration of one call.
pub fn normalize(e: &Expr, table: &SymbolTable) -> Result<NormalForm> {
    let mut memo = HashMap::new();
    normalize_memo(e, table, &mut memo)
}

fn normalize_memo(
    e: &Expr,
    table: &SymbolTable,
    memo: &mut HashMap<usize, NormalForm>,
) -> Result<NormalForm> {
    let key = e.node() as *const Node as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let nf = match e.node() {
        Node::Rat(r) => NormalForm::constant(r.clone()),
        Node::Sym(s) => NormalForm::from_poly(MultiPoly::var(Indet::Sym(*s))),
        Node::Func(f, k) => NormalForm::from_poly(MultiPoly::var(Indet::Func(*f, *k))),
        Node::Exp(v) => NormalForm::from_poly(MultiPoly::var(Indet::Exp(*v))),
        Node::Sum(ts) => {
            let mut acc = NormalForm::zero();
            for t in ts {
                acc = acc.add(&normalize_memo(t, table, memo)?);
            }
            acc
        }
        Node::Prod(fs) => {
            let mut acc = NormalForm::one();
            for f in fs {
                if acc.is_zero() {
                    break;
                }
                acc = acc.mul(&normalize_memo(f, table, memo)?);
            }
            acc
        }
        Node::Quot(a, b) => {
            normalize_memo(a, table, memo)?.div(&normalize_memo(b, table, memo)?)?
        }
        Node::Pow(b, e) => pow_nf(&normalize_memo(b, table, memo)?, e)?,
    };
    memo.insert(key, nf.clone());
    Ok(nf)
}

/// Raise a normal form to a lattice exponent. An exponent with a parameter
/// part requires the base to be a single monomial with a positive rational
/// coefficient; the result is expressed through power-product atoms, one
/// per (atomic base, parameter) pair, with rational coefficients split into
/// primes so that, say, `4^n` and `(2^n)^2` normalize identically.
fn pow_nf(base: &NormalForm, e: &LinExp) -> Result<NormalForm> {
    if let Some(k) = e.as_int() {
        return base.powi(k);
    }
    if base.is_zero() {
        return Err(Error::SymbolicPowerBase);
    }
    let (num_m, c) = single_term(&base.num).ok_or(Error::SymbolicPowerBase)?;
    let (den_m, _) = single_term(&base.den).ok_or(Error::SymbolicPowerBase)?;
    if c.is_negative() {
        // sign-indefinite: (-2)^n has no canonical spot in a free monomial
        // group, so it is rejected rather than silently mishandled
        return Err(Error::SymbolicPowerBase);
    }

    // Signed atom exponents for the parameter part of the lattice exponent.
    let mut atoms: BTreeMap<(PowBase, SymbolId), i64> = BTreeMap::new();
    let primes = prime_powers(c);
    for (p, cp) in e.param_terms() {
        let mut push = |b: PowBase, k: i64| {
            let slot = atoms.entry((b, p)).or_insert(0);
            *slot += k;
        };
        for (v, m) in num_m.iter() {
            let b = v.to_pow_base().ok_or(Error::NonLatticeExponent)?;
            push(b, i64::from(*m) * cp);
        }
        for (v, m) in den_m.iter() {
            let b = v.to_pow_base().ok_or(Error::NonLatticeExponent)?;
            push(b, -i64::from(*m) * cp);
        }
        for (q, a) in &primes {
            push(PowBase::Rat(BigRational::from_integer(q.clone())), *a * cp);
        }
    }
    let mut up = Vec::new();
    let mut down = Vec::new();
    for ((b, p), k) in atoms {
        if k == 0 {
            continue;
        }
        let e = u32::try_from(k.unsigned_abs())
            .map_err(|_| Error::Validation("power exponent out of range".into()))?;
        let v = Indet::Pow(b, p);
        if k > 0 {
            up.push((v, e));
        } else {
            down.push((v, e));
        }
    }
    let sym_part = NormalForm {
        num: MultiPoly::from_monomial(Monomial::from_powers(up), BigRational::one()),
        den: MultiPoly::from_monomial(Monomial::from_powers(down), BigRational::one()),
    };
    Ok(base.powi(e.constant())?.mul(&sym_part))
}

fn single_term(p: &MultiPoly) -> Option<(&Monomial, &BigRational)> {
    if p.term_count() == 1 {
        p.terms().next()
    } else {
        None
    }
}

/// Prime factorization of a positive rational, denominator primes negated.
fn prime_powers(c: &BigRational) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    factor_into(c.numer().clone(), 1, &mut out);
    factor_into(c.denom().clone(), -1, &mut out);
    out
}

fn factor_into(mut n: BigInt, sign: i64, out: &mut Vec<(BigInt, i64)>) {
    debug_assert!(n.is_positive());
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut k = 0i64;
        while (&n % &d).is_zero() {
            n /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), sign * k));
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push((n, sign));
    }
}

/// Rebuild an expression tree from a polynomial. Inverse of normalization
/// up to arrangement: normalizing the result gives the argument back.
pub fn poly_to_expr(p: &MultiPoly) -> Expr {
    let mut terms = Vec::new();
    for (m, c) in p.terms().rev() {
        let mut factors = vec![Expr::rat(c.clone())];
        for (v, k) in m.iter() {
            factors.push(indet_expr(v, *k));
        }
        terms.push(Expr::product(factors));
    }
    Expr::sum(terms)
}

fn indet_expr(v: &Indet, k: u32) -> Expr {
    let (base, lin) = match v {
        Indet::Sym(s) => (Expr::sym(*s), LinExp::int(i64::from(k))),
        Indet::Func(f, o) => (Expr::func(*f, *o), LinExp::int(i64::from(k))),
        Indet::Exp(s) => (Expr::exp(*s), LinExp::int(i64::from(k))),
        Indet::Pow(b, p) => (pow_base_expr(b), LinExp::param(*p).scale(i64::from(k))),
    };
    Expr::pow(base, lin).expect("monomial exponents are positive")
}

fn pow_base_expr(b: &PowBase) -> Expr {
    match b {
        PowBase::Sym(s) => Expr::sym(*s),
        PowBase::Func(f, o) => Expr::func(*f, *o),
        PowBase::Exp(s) => Expr::exp(*s),
        PowBase::Rat(r) => Expr::rat(r.clone()),
    }
}

impl NormalForm {
    /// The normal form as an expression tree (a quotient unless the
    /// denominator is 1).
    pub fn to_expr(&self) -> Expr {
        let num = poly_to_expr(&self.num);
        if self.den.is_one() {
            num
        } else {
            Expr::div(num, poly_to_expr(&self.den))
                .expect("normal-form denominator is nonzero")
        }
    }
}

/// Decide whether an expression is identically zero.
pub fn is_zero(e: &Expr, table: &SymbolTable) -> Result<bool> {
    Ok(normalize(e, table)?.is_zero())
}

/// Decide whether two expressions denote the same rational function.
pub fn expr_eq(a: &Expr, b: &Expr, table: &SymbolTable) -> Result<bool> {
    Ok(normalize(a, table)?.sub(&normalize(b, table)?).is_zero())
}
