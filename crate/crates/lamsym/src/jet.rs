//! ODE problems, covering systems, the total derivative and restriction to
//! the solution manifold.
//!
//! `restrict` eliminates every derivative the equation determines: `x_n`
//! and above through `F` and its total derivatives, and (with a covering)
//! `w_1` and above through `H`. The composite `restrict ∘ D_t` is the
//! vector field `A` that generates the flow of the equation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::symbol::{SymbolId, SymbolTable, VarKind};

/// `x_n = F(t, x, x1, …, x_{n−1})` over a fixed symbol table.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    table: Arc<SymbolTable>,
    order: u16,
    rhs: Expr,
}

impl OdeProblem {
    pub fn new(table: Arc<SymbolTable>, order: u16, rhs: Expr) -> Result<OdeProblem> {
        if order == 0 {
            return Err(Error::Validation("equation order must be at least 1".into()));
        }
        if order > table.cap() {
            return Err(Error::JetCap { name: format!("x{order}"), cap: table.cap() });
        }
        for k in order..=table.cap() {
            if rhs.mentions(table.x(k)?, &table) {
                return Err(Error::Validation(format!(
                    "right-hand side of an order-{order} equation cannot mention x{k}"
                )));
            }
        }
        for j in 0..=table.cap() {
            if rhs.mentions(table.w(j)?, &table) {
                return Err(Error::Validation(
                    "right-hand side cannot mention the nonlocal chain".into(),
                ));
            }
        }
        Ok(OdeProblem { table, order, rhs })
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn table_arc(&self) -> Arc<SymbolTable> {
        Arc::clone(&self.table)
    }

    pub fn order(&self) -> u16 {
        self.order
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    /// Eliminates `x_n` and above; `w`-variables pass through untouched.
    pub fn restrict(&self, e: &Expr) -> Result<Expr> {
        restrict_impl(e, self, None)
    }

    /// The vector field associated to the equation: `A = restrict ∘ D_t`.
    pub fn apply_a(&self, e: &Expr) -> Result<Expr> {
        self.restrict(&total_derivative(e, &self.table)?)
    }
}

/// The auxiliary system `x2 = F, w1 = H(t, x, x1)` over a second-order base.
#[derive(Clone, Debug)]
pub struct Covering {
    base: OdeProblem,
    h: Expr,
}

impl Covering {
    pub fn new(base: OdeProblem, h: Expr) -> Result<Covering> {
        if base.order() != 2 {
            return Err(Error::Validation(
                "coverings are defined over second-order equations".into(),
            ));
        }
        let table = base.table();
        for k in 2..=table.cap() {
            if h.mentions(table.x(k)?, table) {
                return Err(Error::Validation(format!(
                    "the covering right-hand side cannot mention x{k}"
                )));
            }
        }
        for j in 0..=table.cap() {
            if h.mentions(table.w(j)?, table) {
                return Err(Error::Validation(
                    "the covering right-hand side cannot mention the nonlocal chain".into(),
                ));
            }
        }
        Ok(Covering { base, h })
    }

    pub fn base(&self) -> &OdeProblem {
        &self.base
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn table(&self) -> &SymbolTable {
        self.base.table()
    }

    /// Eliminates `x2` and above and `w1` and above.
    pub fn restrict(&self, e: &Expr) -> Result<Expr> {
        restrict_impl(e, &self.base, Some(&self.h))
    }

    /// `A` of the covering system: `restrict ∘ D_t` with both chains.
    pub fn apply_a(&self, e: &Expr) -> Result<Expr> {
        self.restrict(&total_derivative(e, self.table())?)
    }
}

/// `D_t e = e_t + Σ x_{i+1}·e_{x_i} + Σ w_{j+1}·e_{w_j}`. The next jet
/// variable is taken from the table on demand; running past the cap is an
/// error rather than silent truncation.
pub fn total_derivative(e: &Expr, table: &SymbolTable) -> Result<Expr> {
    let mut acc = e.diff(table.t(), table)?;
    for v in table.jet_vars() {
        if matches!(table.kind(v), VarKind::T) || !e.mentions(v, table) {
            continue;
        }
        let next = table
            .shift(v)?
            .expect("jet chains always shift to a successor");
        acc = Expr::add(acc, Expr::mul(Expr::sym(next), e.diff(v, table)?));
    }
    Ok(acc)
}

/// The jet variables an expression actually mentions, in table order.
pub fn jet_support(e: &Expr, table: &SymbolTable) -> Vec<SymbolId> {
    table.jet_vars().filter(|v| e.mentions(*v, table)).collect()
}

fn restrict_impl(e: &Expr, problem: &OdeProblem, h: Option<&Expr>) -> Result<Expr> {
    let table = problem.table();
    let n = problem.order();
    // replacement chains, fully restricted, built on demand:
    // x_{n+k} and w_{1+k} at index k
    let mut x_chain: Vec<Expr> = vec![problem.rhs().clone()];
    let mut w_chain: Vec<Expr> = match h {
        Some(h) => vec![h.clone()],
        None => Vec::new(),
    };

    let mut cur = e.clone();
    loop {
        let mut target: Option<(SymbolId, usize, bool)> = None;
        for k in (n..=table.cap()).rev() {
            let v = table.x(k)?;
            if cur.mentions(v, table) {
                target = Some((v, (k - n) as usize, true));
                break;
            }
        }
        if target.is_none() && h.is_some() {
            for j in (1..=table.cap()).rev() {
                let v = table.w(j)?;
                if cur.mentions(v, table) {
                    target = Some((v, (j - 1) as usize, false));
                    break;
                }
            }
        }
        let Some((v, idx, is_x)) = target else {
            return Ok(cur);
        };
        let chain: &mut Vec<Expr> = if is_x { &mut x_chain } else { &mut w_chain };
        while chain.len() <= idx {
            let prev = chain.last().expect("chain starts nonempty");
            let lifted = total_derivative(prev, table)?;
            let restricted = restrict_impl(&lifted, problem, h)?;
            chain.push(restricted);
        }
        cur = cur.substitute_one(v, &chain[idx], table)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::{expr_eq, is_zero};
    use crate::parse::parse;
    use num::BigRational;

    fn pinney_like() -> (Arc<SymbolTable>, OdeProblem) {
        // x2 = -x - 1/(2x) - t^2/(4x^3)
        let table = Arc::new(SymbolTable::builder().build().unwrap());
        let rhs = parse("-x - 1/(2*x) - t^2/(4*x^3)", &table).unwrap();
        let problem = OdeProblem::new(Arc::clone(&table), 2, rhs).unwrap();
        (table, problem)
    }

    #[test]
    fn total_derivative_chains() {
        let table = SymbolTable::builder().func("f", "x").build().unwrap();
        let x = parse("x", &table).unwrap();
        assert!(expr_eq(
            &total_derivative(&x, &table).unwrap(),
            &parse("x1", &table).unwrap(),
            &table
        )
        .unwrap());
        let e = parse("t*x1", &table).unwrap();
        assert!(expr_eq(
            &total_derivative(&e, &table).unwrap(),
            &parse("x1 + t*x2", &table).unwrap(),
            &table
        )
        .unwrap());
        // product/chain structure through opaque atoms
        let e = parse("x1/x - x*f'(x)", &table).unwrap();
        let want = parse("x2/x - x1^2/x^2 - x1*f'(x) - x*f''(x)*x1", &table).unwrap();
        assert!(expr_eq(&total_derivative(&e, &table).unwrap(), &want, &table).unwrap());
        // the w chain is part of the operator
        let e = parse("exp(w)", &table).unwrap();
        assert!(expr_eq(
            &total_derivative(&e, &table).unwrap(),
            &parse("w1*exp(w)", &table).unwrap(),
            &table
        )
        .unwrap());
    }

    #[test]
    fn restriction_eliminates_determined_derivatives() {
        let (table, problem) = pinney_like();
        let x2 = parse("x2", &table).unwrap();
        assert!(expr_eq(&problem.restrict(&x2).unwrap(), problem.rhs(), &table).unwrap());
        // below the order nothing changes
        let x1 = parse("x1", &table).unwrap();
        assert_eq!(problem.restrict(&x1).unwrap(), x1);
        // a third derivative goes through one lift of the chain; value frozen
        // by independent evaluation at (t,x,x1) = (1,2,3)
        let x3 = parse("x3", &table).unwrap();
        let r = problem.restrict(&x3).unwrap();
        let mut point = crate::numeric::Point {
            syms: Default::default(),
            params: Default::default(),
            funcs: Default::default(),
            exps: Default::default(),
        };
        let one = |k: i64| BigRational::from_integer(k.into());
        point.syms.insert(table.t(), one(1));
        point.syms.insert(table.x(0).unwrap(), one(2));
        point.syms.insert(table.x(1).unwrap(), one(3));
        let got = crate::numeric::eval(&r, &table, &point).unwrap();
        assert_eq!(got, BigRational::new((-163).into(), 64.into()));
    }

    #[test]
    fn restriction_is_idempotent_and_multiplicative() {
        let (table, problem) = pinney_like();
        let e = parse("x3*x2 + t*x2^2 - x1", &table).unwrap();
        let once = problem.restrict(&e).unwrap();
        let twice = problem.restrict(&once).unwrap();
        assert!(expr_eq(&once, &twice, &table).unwrap());

        let a = parse("x2 + x1", &table).unwrap();
        let b = parse("x2 - t", &table).unwrap();
        let prod = Expr::mul(a.clone(), b.clone());
        let lhs = problem.restrict(&prod).unwrap();
        let rhs = Expr::mul(problem.restrict(&a).unwrap(), problem.restrict(&b).unwrap());
        assert!(expr_eq(&lhs, &rhs, &table).unwrap());
    }

    #[test]
    fn covering_restriction_handles_both_chains() {
        let table = Arc::new(SymbolTable::builder().func("c", "t").build().unwrap());
        let rhs = parse("x1^2/x", &table).unwrap();
        let problem = OdeProblem::new(Arc::clone(&table), 2, rhs).unwrap();
        let h = parse("x1/x", &table).unwrap();
        let covering = Covering::new(problem, h).unwrap();
        let e = parse("w1*x2", &table).unwrap();
        let want = parse("(x1/x)*(x1^2/x)", &table).unwrap();
        assert!(expr_eq(&covering.restrict(&e).unwrap(), &want, &table).unwrap());
        // w2 is eliminated through the restricted derivative of H
        let w2 = parse("w2", &table).unwrap();
        let got = covering.restrict(&w2).unwrap();
        let want = parse("x2/x - x1^2/x^2", &table).unwrap();
        let want = covering.restrict(&want).unwrap();
        assert!(expr_eq(&got, &want, &table).unwrap());
        assert!(!got.mentions(table.w(1).unwrap(), &table));
    }

    #[test]
    fn a_field_examples() {
        let (table, problem) = pinney_like();
        // A(x1) = F
        let x1 = parse("x1", &table).unwrap();
        assert!(expr_eq(&problem.apply_a(&x1).unwrap(), problem.rhs(), &table).unwrap());
        // A(t) = 1
        let t = parse("t", &table).unwrap();
        assert!(is_zero(
            &Expr::sub(problem.apply_a(&t).unwrap(), Expr::one()),
            &table
        )
        .unwrap());
    }

    #[test]
    fn problem_validation() {
        let table = Arc::new(SymbolTable::builder().build().unwrap());
        let bad = parse("x2 + x", &table).unwrap();
        assert!(OdeProblem::new(Arc::clone(&table), 2, bad).is_err());
        let bad = parse("w1", &table).unwrap();
        assert!(OdeProblem::new(Arc::clone(&table), 2, bad).is_err());
        let rhs = parse("x", &table).unwrap();
        let p = OdeProblem::new(Arc::clone(&table), 2, rhs).unwrap();
        let h_bad = parse("x2", &table).unwrap();
        assert!(Covering::new(p, h_bad).is_err());
    }
}
