//! Equivalence of pairs up to the flow of the equation, first-order
//! invariants, and order reduction built from an invariant chain.
//!
//! Two pairs that produce the same reduced equation differ by a rescaling;
//! the quantity `λ + A(Q)/Q` with `Q = φ⁰ − ρ·x1` is a complete invariant
//! of that action, so equivalence and canonical forms both go through it.

use std::collections::BTreeMap;

use crate::checks::{apply_field, CheckReport};
use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::jet::OdeProblem;
use crate::normal::{is_zero, normalize, poly_to_expr};
use crate::poly::{Indet, Monomial, MultiPoly};
use crate::prolong::LambdaPair;
use crate::symbol::{SymbolId, SymbolTable};
use crate::transforms::InvariantPair;

/// `Q = φ⁰ − ρ·x1`, the coefficient of the pair written as an evolutionary
/// field. Never identically zero for a valid pair.
pub fn characteristic(table: &SymbolTable, pair: &LambdaPair) -> Result<Expr> {
    Ok(Expr::sub(
        pair.phi0().clone(),
        Expr::mul(pair.rho().clone(), Expr::sym(table.x(1)?)),
    ))
}

/// `λ + A(Q)/Q` restricted to the equation, as a normalized expression.
fn rescaling_invariant(problem: &OdeProblem, pair: &LambdaPair) -> Result<Expr> {
    let table = problem.table();
    let q = characteristic(table, pair)?;
    if is_zero(&q, table)? {
        return Err(Error::Degenerate(
            "the characteristic of the pair vanishes identically".into(),
        ));
    }
    let lam = problem.restrict(pair.lambda())?;
    Ok(Expr::add(lam, Expr::div(problem.apply_a(&q)?, q)?))
}

/// Whether two pairs on the same second-order equation are equivalent under
/// rescaling by functions of `(t, x, x1)`. The report carries the cleared
/// denominator so roots where the comparison degenerates stay visible.
pub fn a_equivalent(
    problem: &OdeProblem,
    first: &LambdaPair,
    second: &LambdaPair,
) -> Result<CheckReport> {
    let table = problem.table();
    if problem.order() != 2 {
        return Err(Error::Validation(
            "pair equivalence is stated for second-order equations".into(),
        ));
    }
    let difference = Expr::sub(
        rescaling_invariant(problem, first)?,
        rescaling_invariant(problem, second)?,
    );
    let nf = normalize(&problem.restrict(&difference)?, table)?;
    let cleared = if nf.den().is_one() {
        Vec::new()
    } else {
        vec![poly_to_expr(nf.den())]
    };
    CheckReport::from_residuals(
        None,
        vec![("invariant difference".into(), poly_to_expr(nf.num()))],
        cleared,
        table,
    )
}

/// The unique pair of the form `(∂x, λ̃)` equivalent to the given one:
/// `λ̃ = λ + A(Q)/Q`.
pub fn canonical_pair(problem: &OdeProblem, pair: &LambdaPair) -> Result<LambdaPair> {
    let table = problem.table();
    if problem.order() != 2 {
        return Err(Error::Validation(
            "canonical pairs are stated for second-order equations".into(),
        ));
    }
    let lam = normalize(&rescaling_invariant(problem, pair)?, table)?;
    LambdaPair::new(table, Expr::zero(), Expr::one(), lam.to_expr())
}

/// Whether `z(t, x)` is invariant under `X = ρ∂t + φ⁰∂x` and `ζ(t, x, x1)`
/// under its first prolongation.
pub fn check_invariants(
    table: &SymbolTable,
    pair: &LambdaPair,
    inv: &InvariantPair,
) -> Result<CheckReport> {
    let etas = pair.prolong(1, table)?;
    let on_z = apply_field(pair.rho(), &etas[..1], inv.z(), table)?;
    let on_zeta = apply_field(pair.rho(), &etas, inv.zeta(), table)?;
    CheckReport::from_residuals(
        None,
        vec![("z".into(), on_z), ("zeta".into(), on_zeta)],
        Vec::new(),
        table,
    )
}

/// `[ζ, A(ζ)/A(z), A(A(ζ)/A(z))/A(z), …]` up to index `upto`, each entry
/// normalized. Successive quotients are total derivatives with respect to
/// the new independent variable `z`, taken along the equation.
pub fn invariant_chain(
    problem: &OdeProblem,
    inv: &InvariantPair,
    upto: u16,
) -> Result<Vec<Expr>> {
    let table = problem.table();
    let az = problem.apply_a(inv.z())?;
    if is_zero(&az, table)? {
        return Err(Error::Degenerate(
            "z is constant along the equation, so it cannot serve as the new independent variable"
                .into(),
        ));
    }
    let mut chain = vec![normalize(inv.zeta(), table)?.to_expr()];
    for _ in 0..upto {
        let last = chain.last().expect("chain is seeded");
        let next = Expr::div(problem.apply_a(last)?, az.clone())?;
        chain.push(normalize(&next, table)?.to_expr());
    }
    Ok(chain)
}

/// A claimed reduced equation `ζ_{n−1} = body(z, ζ_0, …, ζ_{n−2})`, written
/// over parameter symbols so it can be compared against an invariant chain
/// or read as a lower-order equation in its own right.
#[derive(Clone, Debug)]
pub struct ReducedEquation {
    z: SymbolId,
    zetas: Vec<SymbolId>,
    body: Expr,
}

impl ReducedEquation {
    pub fn new(
        table: &SymbolTable,
        z: SymbolId,
        zetas: Vec<SymbolId>,
        body: Expr,
    ) -> Result<ReducedEquation> {
        if zetas.is_empty() {
            return Err(Error::Validation(
                "a reduced equation needs at least one dependent symbol".into(),
            ));
        }
        let mut seen = vec![z];
        for s in &zetas {
            if seen.contains(s) {
                return Err(Error::Validation(
                    "the symbols of a reduced equation must be distinct".into(),
                ));
            }
            seen.push(*s);
        }
        for s in &seen {
            if !table.is_param(*s) {
                return Err(Error::Validation(format!(
                    "{} is not a parameter symbol; reduced equations are written over fresh parameters",
                    table.name(*s)
                )));
            }
        }
        for v in table.jet_vars() {
            if body.mentions(v, table) {
                return Err(Error::Validation(format!(
                    "the reduced right-hand side must involve only the new variables, found {}",
                    table.name(v)
                )));
            }
        }
        Ok(ReducedEquation { z, zetas, body })
    }

    pub fn z(&self) -> SymbolId {
        self.z
    }

    pub fn zetas(&self) -> &[SymbolId] {
        &self.zetas
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }
}

/// Whether the invariant chain of `(z, ζ)` satisfies the claimed reduced
/// equation on the manifold: substitute `z ↦ z(t,x)`, `ζ_i ↦ chain_i` into
/// the body and compare with `chain_{n−1}`. The cleared denominator is
/// reported next to the residual numerator.
pub fn verify_reduction(
    problem: &OdeProblem,
    inv: &InvariantPair,
    reduced: &ReducedEquation,
) -> Result<CheckReport> {
    let table = problem.table();
    let n = problem.order();
    if reduced.zetas.len() != n as usize - 1 {
        return Err(Error::Validation(format!(
            "an order-{n} equation reduces in {} dependent symbols, got {}",
            n - 1,
            reduced.zetas.len()
        )));
    }
    let chain = invariant_chain(problem, inv, n - 1)?;
    let mut map = BTreeMap::new();
    bind(&mut map, reduced.z, inv.z());
    for (s, e) in reduced.zetas.iter().zip(&chain) {
        bind(&mut map, *s, e);
    }
    let claimed = reduced.body.substitute(&map, table)?;
    let residual = Expr::sub(chain[n as usize - 1].clone(), claimed);
    let nf = normalize(&residual, table)?;
    let cleared = if nf.den().is_one() {
        Vec::new()
    } else {
        vec![poly_to_expr(nf.den())]
    };
    CheckReport::from_residuals(
        None,
        vec![("reduction".into(), poly_to_expr(nf.num()))],
        cleared,
        table,
    )
}

/// Identity bindings are dropped: substituting a symbol by itself is a
/// no-op that the cycle detector would otherwise reject.
fn bind(map: &mut BTreeMap<SymbolId, Expr>, s: SymbolId, e: &Expr) {
    if matches!(e.node(), Node::Sym(v) if *v == s) {
        return;
    }
    map.insert(s, e.clone());
}

/// Derive the reduced first-order equation of a second-order problem from a
/// pair of invariants with `z = t`: solve `ζ = ζ(t, x, x1)` for `x1`, push
/// the substitution through `A(ζ)`, and rename `t` to the new symbol. Fails
/// with a diagnostic when the data leaves this class, in which case the
/// claimed reduction can still be checked with [`verify_reduction`].
pub fn derive_reduction(
    problem: &OdeProblem,
    inv: &InvariantPair,
    z_sym: SymbolId,
    zeta_sym: SymbolId,
) -> Result<ReducedEquation> {
    let table = problem.table();
    if problem.order() != 2 {
        return Err(Error::Validation(
            "automatic derivation handles second-order equations; check higher-order reductions with verify_reduction".into(),
        ));
    }
    let t = table.t();
    let x = table.x(0)?;
    let x1 = table.x(1)?;
    if !is_zero(&Expr::sub(inv.z().clone(), Expr::sym(t)), table)? {
        return Err(Error::Validation(
            "automatic derivation needs z = t; check other reductions with verify_reduction".into(),
        ));
    }
    let chain = invariant_chain(problem, inv, 1)?;

    let offset = Expr::sub(inv.zeta().clone(), Expr::sym(zeta_sym));
    let solved = solve_linear(normalize(&offset, table)?.num(), x1, table)?;
    let raw = chain[1]
        .substitute_one(x1, &solved, table)
        .map_err(|e| diagnose(e, "eliminating x1 from the chain"))?;
    let nf = normalize(&raw, table)?;
    if nf.depends_on(x, table) {
        return Err(Error::Validation(
            "the reduced right-hand side still involves x after eliminating x1; check the claimed reduction with verify_reduction".into(),
        ));
    }
    let body = nf
        .to_expr()
        .substitute_one(t, &Expr::sym(z_sym), table)
        .map_err(|e| diagnose(e, "renaming t to the new independent variable"))?;
    ReducedEquation::new(table, z_sym, vec![zeta_sym], body)
}

fn diagnose(e: Error, stage: &str) -> Error {
    match e {
        Error::OpaqueArgSubstitution { atom, .. } => Error::Validation(format!(
            "{atom} blocks {stage}; check the claimed reduction with verify_reduction instead"
        )),
        other => other,
    }
}

/// Write `p = c·x1 + d` with `c, d` free of `x1` and return `−d/c`.
fn solve_linear(p: &MultiPoly, x1: SymbolId, table: &SymbolTable) -> Result<Expr> {
    let v = Indet::Sym(x1);
    let mut lin = MultiPoly::zero();
    let mut cst = MultiPoly::zero();
    for (m, c) in p.terms() {
        for (ind, _) in m.iter() {
            let exotic = match ind {
                Indet::Sym(_) => false,
                Indet::Func(f, _) => table.func_decl(*f).base == x1,
                Indet::Exp(s) => *s == x1,
                Indet::Pow(base, _) => match base {
                    crate::poly::PowBase::Sym(s) => *s == x1,
                    crate::poly::PowBase::Func(f, _) => table.func_decl(*f).base == x1,
                    crate::poly::PowBase::Exp(s) => *s == x1,
                    crate::poly::PowBase::Rat(_) => false,
                },
            };
            if exotic {
                return Err(Error::Validation(
                    "zeta involves x1 through an opaque atom, so x1 cannot be eliminated; check the claimed reduction with verify_reduction".into(),
                ));
            }
        }
        match m.exponent_of(&v) {
            0 => cst.add_term(m.clone(), c.clone()),
            1 => {
                let stripped =
                    Monomial::from_powers(m.iter().filter(|(i, _)| *i != v).cloned());
                lin.add_term(stripped, c.clone());
            }
            _ => {
                return Err(Error::Validation(
                    "zeta is not linear in x1, so x1 cannot be eliminated; check the claimed reduction with verify_reduction".into(),
                ))
            }
        }
    }
    if lin.is_zero() {
        return Err(Error::Validation(
            "zeta does not involve x1, so it does not determine a reduction".into(),
        ));
    }
    Expr::div(Expr::neg(poly_to_expr(&cst)), poly_to_expr(&lin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::expr_eq;
    use crate::parse::parse;
    use std::sync::Arc;

    fn table() -> Arc<SymbolTable> {
        Arc::new(
            SymbolTable::builder()
                .func("a", "t")
                .params(["s", "u"])
                .build()
                .unwrap(),
        )
    }

    fn problem(table: &Arc<SymbolTable>, rhs: &str) -> OdeProblem {
        OdeProblem::new(Arc::clone(table), 2, parse(rhs, table).unwrap()).unwrap()
    }

    fn pair(table: &SymbolTable, rho: &str, phi0: &str, lam: &str) -> LambdaPair {
        LambdaPair::new(
            table,
            parse(rho, table).unwrap(),
            parse(phi0, table).unwrap(),
            parse(lam, table).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn equivalence_separates_pairs_on_the_free_particle() {
        let table = table();
        let p = problem(&table, "0");
        let vertical = pair(&table, "0", "1", "0");
        let scaling = pair(&table, "t", "x", "0");
        let deformed = pair(&table, "0", "1", "1/t");

        let r = a_equivalent(&p, &vertical, &scaling).unwrap();
        assert!(r.holds());
        assert!(r.cleared.is_empty());

        let r = a_equivalent(&p, &vertical, &deformed).unwrap();
        assert!(!r.holds());
        assert!(!r.cleared.is_empty());
    }

    #[test]
    fn canonical_form_collapses_rescalings() {
        let table = table();
        let p = problem(&table, "-x");
        let original = pair(&table, "0", "1", "x1/x");
        let rescaled = pair(&table, "0", "x", "0");
        assert!(a_equivalent(&p, &original, &rescaled).unwrap().holds());

        let c = canonical_pair(&p, &rescaled).unwrap();
        assert!(expr_eq(c.rho(), &Expr::zero(), &table).unwrap());
        assert!(expr_eq(c.phi0(), &Expr::one(), &table).unwrap());
        assert!(expr_eq(c.lambda(), original.lambda(), &table).unwrap());
        // already canonical pairs are fixed points
        let again = canonical_pair(&p, &c).unwrap();
        assert!(expr_eq(again.lambda(), c.lambda(), &table).unwrap());
    }

    #[test]
    fn invariance_of_z_and_zeta() {
        let table = table();
        let osc = pair(&table, "0", "1", "x1/x");
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1/x", &table).unwrap(),
        )
        .unwrap();
        assert!(check_invariants(&table, &osc, &inv).unwrap().holds());

        let bad = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1", &table).unwrap(),
        )
        .unwrap();
        let r = check_invariants(&table, &osc, &bad).unwrap();
        assert!(!r.holds());
        assert_eq!(r.residuals.len(), 2);

        // a nonvertical field with its own invariants
        let scaling = pair(&table, "t", "x", "0");
        let inv = InvariantPair::new(
            &table,
            parse("x/t", &table).unwrap(),
            parse("x1", &table).unwrap(),
        )
        .unwrap();
        assert!(check_invariants(&table, &scaling, &inv).unwrap().holds());
    }

    #[test]
    fn chains_differentiate_along_the_equation() {
        let table = table();
        let p = problem(&table, "-x");
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1/x", &table).unwrap(),
        )
        .unwrap();
        let chain = invariant_chain(&p, &inv, 2).unwrap();
        assert_eq!(chain.len(), 3);
        assert!(expr_eq(&chain[1], &parse("-1 - x1^2/x^2", &table).unwrap(), &table).unwrap());

        // chains with nontrivial z rescale by A(z)
        let free = problem(&table, "0");
        let inv = InvariantPair::new(
            &table,
            parse("t^2", &table).unwrap(),
            parse("x1", &table).unwrap(),
        )
        .unwrap();
        let chain = invariant_chain(&free, &inv, 1).unwrap();
        assert!(is_zero(&chain[1], &table).unwrap());
    }

    #[test]
    fn reductions_verify_against_the_chain() {
        let table = table();
        let p = problem(&table, "-x");
        let s = table.param("s").unwrap();
        let u = table.param("u").unwrap();

        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1/x", &table).unwrap(),
        )
        .unwrap();
        let red = ReducedEquation::new(
            &table,
            u,
            vec![s],
            parse("-1 - s^2", &table).unwrap(),
        )
        .unwrap();
        let r = verify_reduction(&p, &inv, &red).unwrap();
        assert!(r.holds());

        let wrong = ReducedEquation::new(&table, u, vec![s], parse("s^2", &table).unwrap())
            .unwrap();
        assert!(!verify_reduction(&p, &inv, &wrong).unwrap().holds());

        // conserved energy reduces to quadrature
        let energy = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1^2 + x^2", &table).unwrap(),
        )
        .unwrap();
        let quad = ReducedEquation::new(&table, u, vec![s], Expr::zero()).unwrap();
        assert!(verify_reduction(&p, &energy, &quad).unwrap().holds());

        // degenerate but legal data: zeta need not involve x1 at all
        let trivial = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("t", &table).unwrap(),
        )
        .unwrap();
        let one = ReducedEquation::new(&table, u, vec![s], Expr::one()).unwrap();
        assert!(verify_reduction(&p, &trivial, &one).unwrap().holds());

        // zeta spelled directly over the new symbol: the identity binding
        // must be dropped, not rejected as cyclic
        let direct = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("s", &table).unwrap(),
        )
        .unwrap();
        let flat = ReducedEquation::new(&table, u, vec![s], Expr::zero()).unwrap();
        assert!(verify_reduction(&p, &direct, &flat).unwrap().holds());
    }

    #[test]
    fn reduced_equation_validation() {
        let table = table();
        let s = table.param("s").unwrap();
        let u = table.param("u").unwrap();
        assert!(ReducedEquation::new(&table, u, vec![], Expr::zero()).is_err());
        assert!(ReducedEquation::new(&table, s, vec![s], Expr::zero()).is_err());
        assert!(ReducedEquation::new(&table, table.t(), vec![s], Expr::zero()).is_err());
        assert!(
            ReducedEquation::new(&table, u, vec![s], parse("x1", &table).unwrap()).is_err()
        );
        assert!(
            ReducedEquation::new(&table, u, vec![s], parse("a(t)", &table).unwrap()).is_err()
        );
    }

    #[test]
    fn derivation_recovers_the_oscillator_reduction() {
        let table = table();
        let p = problem(&table, "-x");
        let s = table.param("s").unwrap();
        let u = table.param("u").unwrap();
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1/x", &table).unwrap(),
        )
        .unwrap();
        let red = derive_reduction(&p, &inv, u, s).unwrap();
        assert!(expr_eq(red.body(), &parse("-1 - s^2", &table).unwrap(), &table).unwrap());
        assert!(verify_reduction(&p, &inv, &red).unwrap().holds());
    }

    #[test]
    fn derivation_diagnoses_its_limits() {
        let table = table();
        let p = problem(&table, "0");
        let s = table.param("s").unwrap();
        let u = table.param("u").unwrap();

        // z must be t
        let inv = InvariantPair::new(
            &table,
            parse("x", &table).unwrap(),
            parse("x1", &table).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            derive_reduction(&p, &inv, u, s),
            Err(Error::Validation(_))
        ));

        // functions of t survive into the body and block the renaming
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1 + a(t)", &table).unwrap(),
        )
        .unwrap();
        let err = derive_reduction(&p, &inv, u, s).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("verify_reduction")));

        // zeta quadratic in x1 is out of scope
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1^2", &table).unwrap(),
        )
        .unwrap();
        assert!(derive_reduction(&p, &inv, u, s).is_err());

        // x must drop out after the elimination
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x1 + x", &table).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            derive_reduction(&problem(&table, "x1"), &inv, u, s),
            Err(Error::Validation(ref m)) if m.contains("involves x")
        ));
    }
}
