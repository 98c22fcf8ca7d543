//! Conversions between symmetry representations: differential invariants to
//! λ-pairs, nonlocal covering symmetries to λ-pairs, telescopic fields to
//! λ-pairs, λ-pairs to coverings with their ∂w-obligation, the exponential
//! ansatz, and rescaling.

use num::BigRational;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{total_derivative, Covering, OdeProblem};
use crate::linexp::LinExp;
use crate::normal::{is_zero, normalize};
use crate::prolong::LambdaPair;
use crate::symbol::SymbolTable;

fn require_support(name: &str, e: &Expr, table: &SymbolTable, max_x: u16, allow_w: bool) -> Result<()> {
    for k in max_x + 1..=table.cap() {
        if e.mentions(table.x(k)?, table) {
            return Err(Error::Validation(format!(
                "{name} cannot depend on x{k}"
            )));
        }
    }
    let first_w = if allow_w { 1 } else { 0 };
    for j in first_w..=table.cap() {
        if e.mentions(table.w(j)?, table) {
            return Err(Error::Validation(format!(
                "{name} cannot depend on {}",
                table.name(table.w(j)?)
            )));
        }
    }
    Ok(())
}

/// Generalized symmetry data of a covering system:
/// `v = ξ∂t + η⁰∂x + η¹∂x1 + ψ⁰∂w` with the displayed coefficients given on
/// `(t, x, x1, w)` and `η¹`, `ψ¹` implied by prolongation. Whether ξ or η⁰
/// genuinely carries `w` decides if `v` projects to a point symmetry of the
/// base equation; that is tested where it matters (`nonlocal_to_lambda`),
/// not here, so plain local fields like ∂w stay expressible.
#[derive(Clone, Debug)]
pub struct NonlocalSymmetry {
    xi: Expr,
    eta0: Expr,
    psi0: Expr,
}

impl NonlocalSymmetry {
    pub fn new(table: &SymbolTable, xi: Expr, eta0: Expr, psi0: Expr) -> Result<NonlocalSymmetry> {
        for (name, e) in [("xi", &xi), ("eta0", &eta0), ("psi0", &psi0)] {
            require_support(name, e, table, 1, true)?;
        }
        if is_zero(&xi, table)? && is_zero(&eta0, table)? && is_zero(&psi0, table)? {
            return Err(Error::Validation("the zero field carries no symmetry".into()));
        }
        Ok(NonlocalSymmetry { xi, eta0, psi0 })
    }

    pub fn xi(&self) -> &Expr {
        &self.xi
    }

    pub fn eta0(&self) -> &Expr {
        &self.eta0
    }

    pub fn psi0(&self) -> &Expr {
        &self.psi0
    }
}

/// The one shape of `w`-dependence a symmetry of a covering `w1 = H(t,x)`
/// can have: `v = e^{Cw}(ρ∂t + φ⁰∂x + ψ(t)∂w) + C1·∂w`. `C` lives in the
/// integer-parameter exponent lattice and must be nonzero, otherwise the
/// exponential factor degenerates and `v` is local.
#[derive(Clone, Debug)]
pub struct ExponentialForm {
    c: LinExp,
    c1: BigRational,
    rho: Expr,
    phi0: Expr,
    psi: Expr,
}

impl ExponentialForm {
    pub fn new(
        table: &SymbolTable,
        c: LinExp,
        c1: BigRational,
        rho: Expr,
        phi0: Expr,
        psi: Expr,
    ) -> Result<ExponentialForm> {
        if c.is_zero() {
            return Err(Error::Validation(
                "C = 0 erases the exponential factor; the field would be local".into(),
            ));
        }
        require_support("rho", &rho, table, 0, false)?;
        require_support("phi0", &phi0, table, 0, false)?;
        require_support("psi", &psi, table, 0, false)?;
        if psi.mentions(table.x(0)?, table) {
            return Err(Error::Validation("psi can only depend on t".into()));
        }
        Ok(ExponentialForm { c, c1, rho, phi0, psi })
    }

    pub fn c(&self) -> &LinExp {
        &self.c
    }

    pub fn c1(&self) -> &BigRational {
        &self.c1
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    pub fn phi0(&self) -> &Expr {
        &self.phi0
    }

    pub fn psi(&self) -> &Expr {
        &self.psi
    }

    pub fn to_nonlocal(&self, table: &SymbolTable) -> Result<NonlocalSymmetry> {
        let ew = Expr::pow(Expr::exp(table.w(0)?), self.c.clone())?;
        NonlocalSymmetry::new(
            table,
            Expr::mul(ew.clone(), self.rho.clone()),
            Expr::mul(ew.clone(), self.phi0.clone()),
            Expr::add(Expr::mul(ew, self.psi.clone()), Expr::rat(self.c1.clone())),
        )
    }
}

/// Candidate invariants `z(t,x)` and `ζ(t,x,x1)` of a first λ-prolongation.
/// Only the variable supports are fixed here; the nondegeneracy `ζ_{x1} ≠ 0`
/// is required where a pair is rebuilt out of the invariants, so degenerate
/// sanity data stays usable with the reduction machinery.
#[derive(Clone, Debug)]
pub struct InvariantPair {
    z: Expr,
    zeta: Expr,
}

impl InvariantPair {
    pub fn new(table: &SymbolTable, z: Expr, zeta: Expr) -> Result<InvariantPair> {
        require_support("z", &z, table, 0, false)?;
        require_support("zeta", &zeta, table, 1, false)?;
        let z_t = z.diff(table.t(), table)?;
        let z_x = z.diff(table.x(0)?, table)?;
        if is_zero(&z_t, table)? && is_zero(&z_x, table)? {
            return Err(Error::Validation("z must be a nonconstant function of t and x".into()));
        }
        Ok(InvariantPair { z, zeta })
    }

    pub fn z(&self) -> &Expr {
        &self.z
    }

    pub fn zeta(&self) -> &Expr {
        &self.zeta
    }
}

/// Rebuilds the pair whose first prolongation annihilates both invariants:
/// `X = −z_x∂t + z_t∂x` and
/// `λ = (z_xζ_t − z_tζ_x)/(D_t(z)·ζ_{x1}) − (D_t(z_t) + D_t(z_x)·x1)/D_t(z)`.
pub fn invariants_to_lambda(table: &SymbolTable, inv: &InvariantPair) -> Result<LambdaPair> {
    let x1 = table.x(1)?;
    let zeta_x1 = inv.zeta().diff(x1, table)?;
    if is_zero(&zeta_x1, table)? {
        return Err(Error::Degenerate("ζ does not depend on x1".into()));
    }
    let z_t = inv.z().diff(table.t(), table)?;
    let z_x = inv.z().diff(table.x(0)?, table)?;
    let dz = total_derivative(inv.z(), table)?;
    if is_zero(&dz, table)? {
        return Err(Error::Degenerate("D_t z vanishes identically".into()));
    }
    let zeta_t = inv.zeta().diff(table.t(), table)?;
    let zeta_x = inv.zeta().diff(table.x(0)?, table)?;
    let first = Expr::div(
        Expr::sub(
            Expr::mul(z_x.clone(), zeta_t),
            Expr::mul(z_t.clone(), zeta_x),
        ),
        Expr::mul(dz.clone(), zeta_x1),
    )?;
    let second = Expr::div(
        Expr::add(
            total_derivative(&z_t, table)?,
            Expr::mul(total_derivative(&z_x, table)?, Expr::sym(x1)),
        ),
        dz,
    )?;
    LambdaPair::new(table, Expr::neg(z_x), z_t, Expr::sub(first, second))
}

/// Projects a symmetry of the covering down to a λ-pair of the base
/// equation. Case split on `ξ ≡ 0`; in both cases the quotient that becomes
/// `λ` (and, when `ξ ≠ 0`, the new ∂x coefficient `η⁰/ξ`) must come out free
/// of `w`, which is a hypothesis of the construction and is verified, not
/// assumed.
pub fn nonlocal_to_lambda(covering: &Covering, v: &NonlocalSymmetry) -> Result<LambdaPair> {
    let table = covering.table();
    let w0 = table.w(0)?;
    let xi_w = v.xi().diff(w0, table)?;
    let eta_w = v.eta0().diff(w0, table)?;
    if is_zero(&xi_w, table)? && is_zero(&eta_w, table)? {
        return Err(Error::Hypothesis(
            "neither ξ nor η⁰ depends on w; the field projects on a local symmetry".into(),
        ));
    }
    let (rho, phi0, lam) = if !is_zero(v.xi(), table)? {
        let q = normalize(&Expr::div(v.eta0().clone(), v.xi().clone())?, table)?;
        if q.depends_on(w0, table) {
            return Err(Error::Hypothesis("η⁰/ξ still depends on w".into()));
        }
        if q.depends_on(table.x(1)?, table) {
            return Err(Error::Hypothesis("η⁰/ξ depends on x1; the projection is not a point field".into()));
        }
        let lam = Expr::div(covering.apply_a(v.xi())?, v.xi().clone())?;
        (Expr::one(), q.to_expr(), lam)
    } else {
        let lam = Expr::div(covering.apply_a(v.eta0())?, v.eta0().clone())?;
        (Expr::zero(), Expr::one(), lam)
    };
    let lam = normalize(&lam, table)?;
    if lam.depends_on(w0, table) {
        return Err(Error::Hypothesis("the induced λ still depends on w".into()));
    }
    LambdaPair::new(table, rho, phi0, lam.to_expr())
}

/// `τ` as the λ-pair `(∂x, (γ⁽¹⁾ − α·x2)/(β − α·x1))`; supplying the
/// equation substitutes `x2 := F`, which lands `λ` on the first jet.
pub fn telescopic_to_lambda(
    table: &SymbolTable,
    tau: &crate::prolong::TelescopicField,
    problem: Option<&OdeProblem>,
) -> Result<LambdaPair> {
    let x2 = match problem {
        Some(p) => {
            if p.order() != 2 {
                return Err(Error::Validation(
                    "the x2 substitution needs a second-order equation".into(),
                ));
            }
            p.rhs().clone()
        }
        None => Expr::sym(table.x(2)?),
    };
    let num = Expr::sub(tau.gamma1().clone(), Expr::mul(tau.alpha().clone(), x2));
    let lambda = Expr::div(num, tau.pivot(table)?)?;
    LambdaPair::new(table, Expr::zero(), Expr::one(), lambda)
}

/// A λ-pair recast as the covering `w1 = λ` together with the shell of its
/// canonical nonlocal symmetry `e^w(ρ∂t + φ⁰∂x + ψ∂w)`. `ψ` stays unknown;
/// `obligation_rhs` is the right side of the linear PDE it has to satisfy
/// and `checks::verify_psi` discharges it for a candidate.
#[derive(Clone, Debug)]
pub struct LambdaCovering {
    covering: Covering,
    rho: Expr,
    phi0: Expr,
    obligation_rhs: Expr,
}

impl LambdaCovering {
    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    pub fn phi0(&self) -> &Expr {
        &self.phi0
    }

    pub fn obligation_rhs(&self) -> &Expr {
        &self.obligation_rhs
    }

    /// Completes the shell with a concrete ψ.
    pub fn nonlocal_with(&self, psi: Expr) -> Result<NonlocalSymmetry> {
        let table = self.covering.table();
        let ew = Expr::exp(table.w(0)?);
        NonlocalSymmetry::new(
            table,
            Expr::mul(ew.clone(), self.rho.clone()),
            Expr::mul(ew.clone(), self.phi0.clone()),
            Expr::mul(ew, psi),
        )
    }
}

/// The right side of the ψ-obligation `ψ_t + ψ_x·x1 + ψ_{x1}·F + ψ·λ = …`
/// for a pair on a second-order equation:
/// `D_t(ρ)·λ + ρ·λ² + X^{[λ,(1)]}(λ)`.
pub(crate) fn psi_obligation_rhs(
    problem: &OdeProblem,
    rho: &Expr,
    phi0: &Expr,
    lambda: &Expr,
    table: &SymbolTable,
) -> Result<Expr> {
    let etas = crate::prolong::lambda_prolong(rho, phi0, lambda, 1, table)?;
    let field = Expr::sum(vec![
        Expr::mul(rho.clone(), lambda.diff(table.t(), table)?),
        Expr::mul(etas[0].clone(), lambda.diff(table.x(0)?, table)?),
        Expr::mul(etas[1].clone(), lambda.diff(table.x(1)?, table)?),
    ]);
    let rhs = Expr::sum(vec![
        Expr::mul(total_derivative(rho, table)?, lambda.clone()),
        Expr::mul(rho.clone(), Expr::mul(lambda.clone(), lambda.clone())),
        field,
    ]);
    problem.restrict(&rhs)
}

pub fn lambda_to_covering(problem: &OdeProblem, pair: &LambdaPair) -> Result<LambdaCovering> {
    let table = problem.table();
    if pair.generalized() {
        return Err(Error::Validation(
            "the covering construction needs λ on (t, x, x1)".into(),
        ));
    }
    let covering = Covering::new(problem.clone(), pair.lambda().clone())?;
    let obligation_rhs =
        psi_obligation_rhs(problem, pair.rho(), pair.phi0(), pair.lambda(), table)?;
    Ok(LambdaCovering {
        covering,
        rho: pair.rho().clone(),
        phi0: pair.phi0().clone(),
        obligation_rhs,
    })
}

/// The λ-pair read off an exponential field over `w1 = H(t,x)`:
/// `(ρ∂t + φ⁰∂x, C·H)`. `H_x ≡ 0` means the field projects on a Lie point
/// symmetry and there is no λ to extract.
pub fn exponential_pair(
    table: &SymbolTable,
    rho: Expr,
    phi0: Expr,
    c: &LinExp,
    h: &Expr,
) -> Result<LambdaPair> {
    if c.is_zero() {
        return Err(Error::Validation("C = 0 erases the exponential factor".into()));
    }
    require_support("H", h, table, 0, false)?;
    let h_x = h.diff(table.x(0)?, table)?;
    if is_zero(&h_x, table)? {
        return Err(Error::Degenerate(
            "H_x vanishes identically: the field projects on a Lie point symmetry".into(),
        ));
    }
    let lambda = Expr::mul(Expr::from_linexp(c), h.clone());
    LambdaPair::new(table, rho, phi0, lambda)
}

/// `(X, λ) ↦ (f·X, λ − D_t(f)/f)` for a nonvanishing `f(t,x)`; prolongations
/// scale by `f`, so every verdict is preserved.
pub fn rescale_pair(table: &SymbolTable, pair: &LambdaPair, f: &Expr) -> Result<LambdaPair> {
    require_support("f", f, table, 0, false)?;
    if is_zero(f, table)? {
        return Err(Error::Degenerate("rescaling by an identically-zero factor".into()));
    }
    let lambda = Expr::sub(
        pair.lambda().clone(),
        Expr::div(total_derivative(f, table)?, f.clone())?,
    );
    LambdaPair::new(
        table,
        Expr::mul(f.clone(), pair.rho().clone()),
        Expr::mul(f.clone(), pair.phi0().clone()),
        lambda,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::expr_eq;
    use crate::parse::parse;
    use crate::prolong::TelescopicField;
    use num::Zero;
    use std::sync::Arc;

    fn table() -> Arc<SymbolTable> {
        Arc::new(
            SymbolTable::builder()
                .func("a", "t")
                .func("f", "x")
                .param("C")
                .build()
                .unwrap(),
        )
    }

    fn problem(table: &Arc<SymbolTable>, rhs: &str) -> OdeProblem {
        OdeProblem::new(Arc::clone(table), 2, parse(rhs, table).unwrap()).unwrap()
    }

    #[test]
    fn invariants_rebuild_known_pairs() {
        let table = table();
        let t = parse("t", &table).unwrap();
        let x1 = parse("x1", &table).unwrap();
        let inv = InvariantPair::new(&table, t.clone(), x1.clone()).unwrap();
        let pair = invariants_to_lambda(&table, &inv).unwrap();
        assert!(is_zero(pair.rho(), &table).unwrap());
        assert!(expr_eq(pair.phi0(), &Expr::one(), &table).unwrap());
        assert!(is_zero(pair.lambda(), &table).unwrap());

        let zeta = parse("x1/x + f(x)", &table).unwrap();
        let inv = InvariantPair::new(&table, t, zeta).unwrap();
        let pair = invariants_to_lambda(&table, &inv).unwrap();
        let want = parse("x1/x - x*f'(x)", &table).unwrap();
        assert!(expr_eq(pair.lambda(), &want, &table).unwrap());

        let inv = InvariantPair::new(
            &table,
            parse("x", &table).unwrap(),
            parse("x1", &table).unwrap(),
        )
        .unwrap();
        let pair = invariants_to_lambda(&table, &inv).unwrap();
        assert!(expr_eq(pair.rho(), &parse("-1", &table).unwrap(), &table).unwrap());
        assert!(is_zero(pair.phi0(), &table).unwrap());
        assert!(is_zero(pair.lambda(), &table).unwrap());
    }

    #[test]
    fn invariant_pair_validation() {
        let table = table();
        // z constant
        assert!(InvariantPair::new(
            &table,
            parse("3", &table).unwrap(),
            parse("x1", &table).unwrap()
        )
        .is_err());
        // zeta on the wrong jet level
        assert!(InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x2", &table).unwrap()
        )
        .is_err());
        // x1-free zeta is constructible but not invertible into a pair
        let inv = InvariantPair::new(
            &table,
            parse("t", &table).unwrap(),
            parse("x", &table).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            invariants_to_lambda(&table, &inv),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn covering_symmetry_projects_to_the_base_pair() {
        let table = table();
        let p = problem(&table, "x1^2/x");
        let h = parse("x1/x", &table).unwrap();
        let covering = Covering::new(p, h.clone()).unwrap();
        // ξ ≡ 0 case: v = e^w ∂x
        let v = NonlocalSymmetry::new(
            &table,
            Expr::zero(),
            Expr::exp(table.w(0).unwrap()),
            Expr::zero(),
        )
        .unwrap();
        let pair = nonlocal_to_lambda(&covering, &v).unwrap();
        assert!(is_zero(pair.rho(), &table).unwrap());
        assert!(expr_eq(pair.phi0(), &Expr::one(), &table).unwrap());
        assert!(expr_eq(pair.lambda(), &h, &table).unwrap());
        // ξ ≢ 0 case: v = e^w ∂t picks up the same λ
        let v = NonlocalSymmetry::new(
            &table,
            Expr::exp(table.w(0).unwrap()),
            Expr::zero(),
            Expr::zero(),
        )
        .unwrap();
        let pair = nonlocal_to_lambda(&covering, &v).unwrap();
        assert!(expr_eq(pair.rho(), &Expr::one(), &table).unwrap());
        assert!(is_zero(pair.phi0(), &table).unwrap());
        assert!(expr_eq(pair.lambda(), &h, &table).unwrap());
    }

    #[test]
    fn projection_hypotheses_are_enforced() {
        let table = table();
        let p = problem(&table, "x1^2/x");
        let covering = Covering::new(p, parse("x1/x", &table).unwrap()).unwrap();
        let ew = Expr::exp(table.w(0).unwrap());
        // w-free ξ and η⁰
        let v = NonlocalSymmetry::new(&table, Expr::zero(), Expr::one(), Expr::one()).unwrap();
        assert!(matches!(
            nonlocal_to_lambda(&covering, &v),
            Err(Error::Hypothesis(_))
        ));
        // η⁰/ξ depends on x1
        let v = NonlocalSymmetry::new(
            &table,
            ew.clone(),
            Expr::mul(ew.clone(), parse("x1", &table).unwrap()),
            Expr::zero(),
        )
        .unwrap();
        assert!(matches!(
            nonlocal_to_lambda(&covering, &v),
            Err(Error::Hypothesis(_))
        ));
        // λ keeps a w-dependence
        let v = NonlocalSymmetry::new(
            &table,
            Expr::zero(),
            Expr::add(ew, parse("t", &table).unwrap()),
            Expr::zero(),
        )
        .unwrap();
        assert!(matches!(
            nonlocal_to_lambda(&covering, &v),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn exponential_fields_expand_and_project() {
        let table = table();
        let c = LinExp::param(table.param("C").unwrap());
        let form = ExponentialForm::new(
            &table,
            c.clone(),
            BigRational::zero(),
            Expr::zero(),
            parse("a(t)*x", &table).unwrap(),
            Expr::zero(),
        )
        .unwrap();
        let v = form.to_nonlocal(&table).unwrap();
        // η⁰ = e^{Cw}·a·x and ξ = 0
        assert!(is_zero(v.xi(), &table).unwrap());
        let p = problem(&table, "x1^2/x");
        let h = parse("x + t", &table).unwrap();
        let covering = Covering::new(p, h.clone()).unwrap();
        let pair = nonlocal_to_lambda(&covering, &v).unwrap();
        // λ = A(η⁰)/η⁰ = a′/a + x1/x + C·H, all w-dependence gone
        let want = parse("a'(t)/a(t) + x1/x + C*(x + t)", &table).unwrap();
        assert!(expr_eq(pair.lambda(), &want, &table).unwrap());

        // the shortcut constructor agrees on the λ part it keeps
        let pair2 = exponential_pair(
            &table,
            Expr::zero(),
            parse("a(t)*x", &table).unwrap(),
            &c,
            &h,
        )
        .unwrap();
        assert!(expr_eq(pair2.lambda(), &parse("C*(x + t)", &table).unwrap(), &table).unwrap());
        // H without x-dependence projects on a point symmetry
        let err = exponential_pair(
            &table,
            Expr::zero(),
            parse("x", &table).unwrap(),
            &c,
            &parse("t", &table).unwrap(),
        );
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn telescopic_pair_with_and_without_the_equation() {
        let table = table();
        let tau = TelescopicField::new(
            &table,
            Expr::zero(),
            parse("x1", &table).unwrap(),
            parse("x", &table).unwrap(),
        )
        .unwrap();
        let pair = telescopic_to_lambda(&table, &tau, None).unwrap();
        assert!(expr_eq(pair.lambda(), &parse("x/x1", &table).unwrap(), &table).unwrap());
        assert!(!pair.generalized());

        let tau = TelescopicField::new(
            &table,
            Expr::one(),
            parse("x + x1", &table).unwrap(),
            Expr::zero(),
        )
        .unwrap();
        let free = telescopic_to_lambda(&table, &tau, None).unwrap();
        assert!(free.generalized());
        let p = problem(&table, "x1^2/x");
        let pinned = telescopic_to_lambda(&table, &tau, Some(&p)).unwrap();
        assert!(!pinned.generalized());
        let want = parse("-(x1^2/x)/x", &table).unwrap();
        assert!(expr_eq(pinned.lambda(), &want, &table).unwrap());
    }

    #[test]
    fn covering_shell_carries_the_obligation() {
        let table = table();
        let p = problem(&table, "x1^2/x");
        let lam = parse("x1/x", &table).unwrap();
        let pair = LambdaPair::new(&table, Expr::zero(), Expr::one(), lam.clone()).unwrap();
        let lc = lambda_to_covering(&p, &pair).unwrap();
        assert!(expr_eq(lc.covering().h(), &lam, &table).unwrap());
        // for X = ∂x the right side collapses to λ_x + λ·λ_{x1} = 0 here
        assert!(is_zero(lc.obligation_rhs(), &table).unwrap());
        let v = lc.nonlocal_with(parse("1/x", &table).unwrap()).unwrap();
        let ew = Expr::exp(table.w(0).unwrap());
        assert!(expr_eq(v.eta0(), &ew, &table).unwrap());
        // generalized λ has no covering
        let glam = parse("x2/x1", &table).unwrap();
        let gpair = LambdaPair::new(&table, Expr::zero(), Expr::one(), glam).unwrap();
        assert!(lambda_to_covering(&p, &gpair).is_err());
    }

    #[test]
    fn rescaling_is_a_group_action() {
        let table = table();
        let pair = LambdaPair::new(
            &table,
            Expr::zero(),
            Expr::one(),
            parse("x1/x", &table).unwrap(),
        )
        .unwrap();
        let f = parse("a(t)*x", &table).unwrap();
        let scaled = rescale_pair(&table, &pair, &f).unwrap();
        let want = parse("-a'(t)/a(t)", &table).unwrap();
        assert!(expr_eq(scaled.lambda(), &want, &table).unwrap());
        let back = rescale_pair(
            &table,
            &scaled,
            &Expr::div(Expr::one(), f).unwrap(),
        )
        .unwrap();
        assert!(expr_eq(back.rho(), pair.rho(), &table).unwrap());
        assert!(expr_eq(back.phi0(), pair.phi0(), &table).unwrap());
        assert!(expr_eq(back.lambda(), pair.lambda(), &table).unwrap());
        assert!(rescale_pair(&table, &pair, &Expr::zero()).is_err());
    }
}
