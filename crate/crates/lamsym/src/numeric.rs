//! Exact evaluation at random rational points: the cross-check oracle.
//!
//! Symbolic zero verdicts are validated by evaluating the expression tree
//! with `BigRational` arithmetic at randomly sampled points. Parameters get
//! small integers (they also appear in exponents), jet variables and opaque
//! atoms get nonzero rationals. A point that hits a denominator zero is
//! resampled. Everything stays exact; no floating point is involved.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::symbol::{FuncId, SymbolId, SymbolTable};

/// Small deterministic generator (SplitMix64); seeds make tests replayable.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    fn nonzero_in(&mut self, bound: i64) -> i64 {
        loop {
            let v = self.int_in(-bound, bound);
            if v != 0 {
                return v;
            }
        }
    }

    pub fn rational(&mut self) -> BigRational {
        BigRational::new(
            BigInt::from(self.nonzero_in(12)),
            BigInt::from(self.int_in(1, 12)),
        )
    }

    fn positive_rational(&mut self) -> BigRational {
        BigRational::new(
            BigInt::from(self.int_in(1, 9)),
            BigInt::from(self.int_in(1, 9)),
        )
    }
}

/// A full rational assignment for every atom of one expression.
#[derive(Debug, Clone)]
pub struct Point {
    pub syms: BTreeMap<SymbolId, BigRational>,
    pub params: BTreeMap<SymbolId, i64>,
    pub funcs: BTreeMap<(FuncId, u32), BigRational>,
    pub exps: BTreeMap<SymbolId, BigRational>,
}

#[derive(Debug, Default)]
struct Atoms {
    syms: BTreeSet<SymbolId>,
    params: BTreeSet<SymbolId>,
    funcs: BTreeSet<(FuncId, u32)>,
    exps: BTreeSet<SymbolId>,
}

fn collect(e: &Expr, table: &SymbolTable, out: &mut Atoms) {
    match e.node() {
        Node::Rat(_) => {}
        Node::Sym(s) => {
            if table.is_param(*s) {
                out.params.insert(*s);
            } else {
                out.syms.insert(*s);
            }
        }
        Node::Func(f, k) => {
            out.funcs.insert((*f, *k));
        }
        Node::Exp(v) => {
            out.exps.insert(*v);
        }
        Node::Sum(ts) | Node::Prod(ts) => {
            for t in ts {
                collect(t, table, out);
            }
        }
        Node::Quot(a, b) => {
            collect(a, table, out);
            collect(b, table, out);
        }
        Node::Pow(b, lin) => {
            collect(b, table, out);
            for (p, _) in lin.param_terms() {
                out.params.insert(p);
            }
        }
    }
}

/// Samples one point covering every atom of `e`. Parameter values are kept
/// small because they double as exponents.
pub fn sample_point(e: &Expr, table: &SymbolTable, rng: &mut Rng) -> Point {
    let mut atoms = Atoms::default();
    collect(e, table, &mut atoms);
    Point {
        syms: atoms
            .syms
            .into_iter()
            .map(|s| (s, rng.rational()))
            .collect(),
        params: atoms
            .params
            .into_iter()
            .map(|p| (p, rng.nonzero_in(3)))
            .collect(),
        funcs: atoms
            .funcs
            .into_iter()
            .map(|f| (f, rng.rational()))
            .collect(),
        exps: atoms
            .exps
            .into_iter()
            .map(|v| (v, rng.positive_rational()))
            .collect(),
    }
}

/// Exact value of `e` at the point; `None` when the point hits a pole.
pub fn eval(e: &Expr, table: &SymbolTable, point: &Point) -> Option<BigRational> {
    match e.node() {
        Node::Rat(r) => Some(r.clone()),
        Node::Sym(s) => {
            if let Some(k) = point.params.get(s) {
                return Some(BigRational::from_integer(BigInt::from(*k)));
            }
            point.syms.get(s).cloned()
        }
        Node::Func(f, k) => point.funcs.get(&(*f, *k)).cloned(),
        Node::Exp(v) => point.exps.get(v).cloned(),
        Node::Sum(ts) => {
            let mut acc = BigRational::zero();
            for t in ts {
                acc += eval(t, table, point)?;
            }
            Some(acc)
        }
        Node::Prod(fs) => {
            let mut acc = BigRational::from_integer(BigInt::from(1));
            for f in fs {
                acc *= eval(f, table, point)?;
            }
            Some(acc)
        }
        Node::Quot(a, b) => {
            let bv = eval(b, table, point)?;
            if bv.is_zero() {
                return None;
            }
            Some(eval(a, table, point)? / bv)
        }
        Node::Pow(b, lin) => {
            let bv = eval(b, table, point)?;
            let k = lin.eval(&point.params)?;
            if bv.is_zero() {
                return if k > 0 { Some(BigRational::zero()) } else { None };
            }
            let k = i32::try_from(k).ok()?;
            Some(bv.pow(k))
        }
    }
}

/// True if `e` evaluates to exactly 0 at `points` independently sampled
/// regular points. A symbolically-zero expression must pass; a nonzero one
/// fails with overwhelming probability.
pub fn vanishes_at_random_points(
    e: &Expr,
    table: &SymbolTable,
    points: usize,
    seed: u64,
) -> Result<bool> {
    let mut rng = Rng::new(seed);
    for _ in 0..points {
        let mut value = None;
        for _attempt in 0..400 {
            let point = sample_point(e, table, &mut rng);
            if let Some(v) = eval(e, table, &point) {
                value = Some(v);
                break;
            }
        }
        match value {
            Some(v) => {
                if !v.is_zero() {
                    return Ok(false);
                }
            }
            None => {
                return Err(Error::Validation(
                    "no regular point found for numeric evaluation".into(),
                ))
            }
        }
    }
    Ok(true)
}
