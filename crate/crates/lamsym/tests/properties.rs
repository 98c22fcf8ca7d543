//! Randomized structural laws of the expression core and the jet-space
//! operators: normalization as a decision procedure, derivation rules,
//! symbolic exponents, restriction, and the numeric spot-check oracle.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use lamsym::expr::Expr;
use lamsym::jet::{total_derivative, OdeProblem};
use lamsym::linexp::LinExp;
use lamsym::normal::{expr_eq, is_zero, normalize};
use lamsym::numeric::vanishes_at_random_points;
use lamsym::parse::parse;
use lamsym::symbol::{SymbolId, SymbolTable};

fn shared() -> &'static Arc<SymbolTable> {
    static TABLE: OnceLock<Arc<SymbolTable>> = OnceLock::new();
    TABLE.get_or_init(|| {
        Arc::new(
            SymbolTable::builder()
                .func("c", "t")
                .func("g", "x")
                .param("n")
                .cap(4)
                .build()
                .expect("shared table"),
        )
    })
}

fn damped() -> &'static OdeProblem {
    static PROBLEM: OnceLock<OdeProblem> = OnceLock::new();
    PROBLEM.get_or_init(|| {
        let table = shared().clone();
        let rhs = parse("-x - c(t)*x1", &table).expect("rhs");
        OdeProblem::new(table, 2, rhs).expect("problem")
    })
}

/// Atoms up to jet order `top`, plus opaque functions and their marks.
fn leaves(top: u16) -> BoxedStrategy<Expr> {
    let table = shared();
    let mut atoms = vec![Expr::sym(table.t())];
    for i in 0..=top {
        atoms.push(Expr::sym(table.x(i).expect("jet var")));
    }
    let c = table.func("c").expect("c");
    let g = table.func("g").expect("g");
    atoms.push(Expr::func(c, 0));
    atoms.push(Expr::func(c, 1));
    atoms.push(Expr::func(g, 0));
    prop_oneof![
        2 => (-4i64..=4).prop_map(Expr::int),
        5 => proptest::sample::select(atoms),
    ]
    .boxed()
}

fn exprs(top: u16) -> BoxedStrategy<Expr> {
    leaves(top)
        .prop_recursive(3, 20, 2, |inner| {
            prop_oneof![
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                1 => inner.clone().prop_map(Expr::neg),
                1 => (inner.clone(), 2i64..=3)
                    .prop_map(|(a, k)| Expr::powi(a, k).expect("positive power")),
                1 => (inner.clone(), inner).prop_map(|(a, b)| guarded_div(a, b)),
            ]
        })
        .boxed()
}

/// Division, backing off to the numerator when the denominator is
/// syntactically or identically zero.
fn guarded_div(a: Expr, b: Expr) -> Expr {
    match Expr::div(a.clone(), b) {
        Ok(q) if normalize(&q, shared()).is_ok() => q,
        _ => a,
    }
}

fn jet_var(top: u16) -> BoxedStrategy<SymbolId> {
    let table = shared();
    let mut vars = vec![table.t()];
    for i in 0..=top {
        vars.push(table.x(i).expect("jet var"));
    }
    proptest::sample::select(vars).boxed()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn zero_test_decides_normal_form_equality(a in exprs(1), b in exprs(1)) {
        let table = shared();
        let same = normalize(&a, table).unwrap() == normalize(&b, table).unwrap();
        prop_assert_eq!(is_zero(&Expr::sub(a, b), table).unwrap(), same);
    }

    #[test]
    fn derivatives_commute(e in exprs(1), u in jet_var(1), v in jet_var(1)) {
        let table = shared();
        let uv = e.diff(u, table).unwrap().diff(v, table).unwrap();
        let vu = e.diff(v, table).unwrap().diff(u, table).unwrap();
        prop_assert!(expr_eq(&uv, &vu, table).unwrap());
    }

    #[test]
    fn derivation_satisfies_the_product_rule(a in exprs(1), b in exprs(1), v in jet_var(1)) {
        let table = shared();
        let lhs = Expr::mul(a.clone(), b.clone()).diff(v, table).unwrap();
        let rhs = Expr::add(
            Expr::mul(a.diff(v, table).unwrap(), b.clone()),
            Expr::mul(a, b.diff(v, table).unwrap()),
        );
        prop_assert!(expr_eq(&lhs, &rhs, table).unwrap());
    }

    /// An identity proved once with a symbolic exponent holds at every
    /// integer instantiation, and instantiation commutes with derivation.
    #[test]
    fn symbolic_exponents_specialize(a in exprs(1), k in -2i64..=3) {
        let table = shared();
        let n = table.param("n").expect("n");
        let x = table.x(0).unwrap();
        let shifted = Expr::pow(Expr::sym(x), LinExp::param(n).add(&LinExp::int(2))).unwrap();
        let split = Expr::mul(
            Expr::powi(Expr::sym(x), 2).unwrap(),
            Expr::pow(Expr::sym(x), LinExp::param(n)).unwrap(),
        );
        let diff = Expr::mul(a, Expr::sub(shifted.clone(), split));
        prop_assert!(is_zero(&diff, table).unwrap());
        let at_k = diff.substitute_one(n, &Expr::int(k), table).unwrap();
        prop_assert!(is_zero(&at_k, table).unwrap());

        let derived_then_fixed = shifted
            .diff(x, table)
            .unwrap()
            .substitute_one(n, &Expr::int(k), table)
            .unwrap();
        let fixed_then_derived = shifted
            .substitute_one(n, &Expr::int(k), table)
            .unwrap()
            .diff(x, table)
            .unwrap();
        prop_assert!(expr_eq(&derived_then_fixed, &fixed_then_derived, table).unwrap());
    }

    /// Identically-zero expressions evaluate to exactly 0 at every sampled
    /// rational point; a manifestly nonzero control does not.
    #[test]
    fn numeric_oracle_confirms_symbolic_zeros(a in exprs(1), b in exprs(1)) {
        let table = shared();
        let d = Expr::sub(
            Expr::mul(Expr::add(a.clone(), b.clone()), Expr::sub(a.clone(), b.clone())),
            Expr::sub(
                Expr::mul(a.clone(), a.clone()),
                Expr::mul(b.clone(), b.clone()),
            ),
        );
        prop_assert!(is_zero(&d, table).unwrap());
        prop_assert!(vanishes_at_random_points(&d, table, 20, 0xC0FFEE).unwrap());
    }

    #[test]
    fn restriction_is_idempotent(e in exprs(3)) {
        let problem = damped();
        let once = problem.restrict(&e).unwrap();
        let twice = problem.restrict(&once).unwrap();
        prop_assert!(expr_eq(&once, &twice, problem.table()).unwrap());
    }

    #[test]
    fn restriction_respects_sums_and_products(a in exprs(3), b in exprs(3)) {
        let problem = damped();
        let table = problem.table();
        let sum = problem.restrict(&Expr::add(a.clone(), b.clone())).unwrap();
        let sum_parts = Expr::add(problem.restrict(&a).unwrap(), problem.restrict(&b).unwrap());
        prop_assert!(expr_eq(&sum, &sum_parts, table).unwrap());
        let prod = problem.restrict(&Expr::mul(a.clone(), b.clone())).unwrap();
        let prod_parts = Expr::mul(problem.restrict(&a).unwrap(), problem.restrict(&b).unwrap());
        prop_assert!(expr_eq(&prod, &prod_parts, table).unwrap());
    }

    /// Below the order of the equation there is nothing to rewrite.
    #[test]
    fn restriction_fixes_low_order_expressions(e in exprs(1)) {
        let problem = damped();
        let restricted = problem.restrict(&e).unwrap();
        prop_assert!(expr_eq(&restricted, &e, problem.table()).unwrap());
    }

    /// On expressions free of x1 and higher, the restricted total
    /// derivative is the total derivative itself.
    #[test]
    fn vector_field_action_extends_total_derivative(e in exprs(0)) {
        let problem = damped();
        let via_field = problem.apply_a(&e).unwrap();
        let via_dt = total_derivative(&e, problem.table()).unwrap();
        prop_assert!(expr_eq(&via_field, &via_dt, problem.table()).unwrap());
    }
}

#[test]
fn numeric_oracle_rejects_a_nonzero_control() {
    let table = shared();
    let e = parse("x^2 - x1 + c(t)", table).expect("control");
    assert!(!vanishes_at_random_points(&e, table, 20, 0xC0FFEE).unwrap());
}
