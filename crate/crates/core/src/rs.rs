//! Difference-operator Hamiltonians assembled from the dressed diagonal.
//!
//! The trace of the dressed braiding against the diagonal shift matrix
//! diag(T_1, .., T_n) produces the operator
//!
//!   H = sum_i c_i T_i,   c_i = prod_{k<i} (1 - [l][l+1] xi(u_i/u_k)),
//!
//! stored with the unshifted coefficients c_i; how a stored pair (c_i, T_i)
//! is read as an operator is a separate choice, see `TermOrder`. Conjugation
//! by the gauge function f turns H into the conjugated form
//!
//!   H^ = sum_i T_i c^_i,   c^_i = prod_{k!=i} (q^l x_i - q^{-l} x_k)/(x_i - x_k),
//!
//! with x_i = w_i^2. Which reading of each side makes the conjugation
//! identity true is not decided here by fiat: `check_gauge` tries all four
//! combinations and records the unique one that verifies.

use crate::diffop::{
    coupling_expr, op_equal, qint_expr, CoeffExpr, DiffOp, EqualityOptions,
};
use crate::dressed::dressed_diagonal;
use crate::report::{all_pass, Check};
use crate::scalars::{sample_point_with, Error, ParamPoint, Rat, WPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;

use CoeffExpr::{Q, W};

fn sub(a: CoeffExpr, b: CoeffExpr) -> CoeffExpr {
    CoeffExpr::sub(a, b)
}
fn mul(a: CoeffExpr, b: CoeffExpr) -> CoeffExpr {
    CoeffExpr::mul(a, b)
}
fn div(a: CoeffExpr, b: CoeffExpr) -> CoeffExpr {
    CoeffExpr::div(a, b)
}
fn pw(a: CoeffExpr, k: i64) -> CoeffExpr {
    CoeffExpr::pow(a, k)
}
fn one() -> CoeffExpr {
    CoeffExpr::one()
}

/// x_i = w_i^2.
fn x_expr(i: usize) -> CoeffExpr {
    pw(W(i), 2)
}

/// [l][l+1] symbolically in q.
fn ll1_expr(l: i64) -> CoeffExpr {
    mul(qint_expr(l), qint_expr(l + 1))
}

/// The coupling function at U = x_i/x_k = (w_i/w_k)^2:
/// (q - q^{-1})^2 q U / ((U - 1)(q^2 U - 1)).
fn xi_expr(i: usize, k: usize) -> CoeffExpr {
    let u = div(x_expr(i), x_expr(k));
    let num = mul(mul(pw(coupling_expr(), 2), Q), u.clone());
    let den = mul(sub(u.clone(), one()), sub(mul(pw(Q, 2), u), one()));
    div(num, den)
}

/// diag(T_1, .., T_n): the diagonal shift matrix whose trace against the
/// dressed diagonal assembles the Hamiltonian.
pub fn shift_matrix(n: usize) -> Vec<DiffOp> {
    assert!(n >= 2);
    (1..=n).map(|i| DiffOp::shift(n, i)).collect()
}

fn coeff_c(l: usize, i: usize) -> CoeffExpr {
    let mut acc = one();
    for k in 1..i {
        acc = mul(acc, sub(one(), mul(ll1_expr(l as i64), xi_expr(i, k))));
    }
    acc
}

/// H = sum_i c_i T_i with c_i = prod_{k<i}(1 - [l][l+1] xi(u_i/u_k));
/// c_1 = 1. Coefficients are stored unshifted; see `TermOrder` for how a
/// stored term is read.
pub fn hamiltonian(n: usize, l: usize) -> DiffOp {
    assert!(n >= 2 && l >= 1);
    let mut op = DiffOp::new(n);
    for i in 1..=n {
        let mut shift = vec![0i64; n];
        shift[i - 1] = 1;
        op.add_term(shift, coeff_c(l, i));
    }
    op
}

fn coeff_c_hat(n: usize, l: usize, i: usize) -> CoeffExpr {
    let mut acc = one();
    for k in 1..=n {
        if k == i {
            continue;
        }
        let num = sub(mul(pw(Q, l as i64), x_expr(i)), mul(pw(Q, -(l as i64)), x_expr(k)));
        let den = sub(x_expr(i), x_expr(k));
        acc = mul(acc, div(num, den));
    }
    acc
}

/// H^ = sum_i c^_i T_i with c^_i = prod_{k!=i}(q^l x_i - q^{-l} x_k)/(x_i - x_k),
/// stored unshifted like `hamiltonian`.
pub fn conjugated_hamiltonian(n: usize, l: usize) -> DiffOp {
    assert!(n >= 2 && l >= 1);
    let mut op = DiffOp::new(n);
    for i in 1..=n {
        let mut shift = vec![0i64; n];
        shift[i - 1] = 1;
        op.add_term(shift, coeff_c_hat(n, l, i));
    }
    op
}

/// The gauge function f = prod_{i<k} prod_{m=1}^{l} of one inverse factor
/// per pair and step, cleared of half-integer exponents:
/// w_i w_k / (q^m w_i^2 - q^{-m} w_k^2), identical to
/// (q^m w_i/w_k - q^{-m} w_k/w_i)^{-1}.
pub fn gauge_factor(n: usize, l: usize) -> CoeffExpr {
    assert!(n >= 2 && l >= 1);
    let mut acc = one();
    for i in 1..=n {
        for k in (i + 1)..=n {
            for m in 1..=(l as i64) {
                let den = sub(mul(pw(Q, m), x_expr(i)), mul(pw(Q, -m), x_expr(k)));
                acc = mul(acc, div(mul(W(i), W(k)), den));
            }
        }
    }
    acc
}

/// hamiltonian(2, l): exactly two terms, the second with the single-pair
/// coefficient 1 - [l][l+1] xi(u_2/u_1).
pub fn difference_lame_n2(l: usize) -> DiffOp {
    hamiltonian(2, l)
}

/// How a stored term (c, T^m) is read as an operator.
///
/// The normal form of `DiffOp` puts coefficients left of shifts, so
/// `CoeffLeft` reads the stored data as is, while `ShiftLeft` reads it as
/// T^m compose c and normalizes, replacing c by sigma^m(c).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermOrder {
    ShiftLeft,
    CoeffLeft,
}

impl fmt::Display for TermOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermOrder::ShiftLeft => write!(f, "shift-left"),
            TermOrder::CoeffLeft => write!(f, "coeff-left"),
        }
    }
}

/// Normal form of an operator whose stored terms are read under `order`.
pub fn realize(op: &DiffOp, order: TermOrder) -> DiffOp {
    match order {
        TermOrder::CoeffLeft => op.clone(),
        TermOrder::ShiftLeft => {
            let mut out = DiffOp::new(op.n);
            for (m, c) in &op.terms {
                out.add_term(m.clone(), c.sigma(m));
            }
            out
        }
    }
}

/// The Hamiltonian pair with the gauge data that links them.
#[derive(Clone, Debug)]
pub struct HamiltonianBundle {
    pub n: usize,
    pub l: usize,
    pub h: DiffOp,
    pub h_hat: DiffOp,
    pub gauge: CoeffExpr,
    /// Reading of `h` under which the gauge conjugation verifies.
    pub ordering: TermOrder,
    /// Reading of `h_hat` on the other side of the same identity.
    pub conjugated_ordering: TermOrder,
}

/// Result of the gauge discrimination: the report plus the unique passing
/// (H reading, H^ reading) pair, if exactly one passed.
#[derive(Clone, Debug)]
pub struct GaugeOutcome {
    pub checks: Vec<Check>,
    pub winner: Option<(TermOrder, TermOrder)>,
}

const ORDERS: [TermOrder; 2] = [TermOrder::CoeffLeft, TermOrder::ShiftLeft];

fn gauge_grid(
    h: &DiffOp,
    h_hat: &DiffOp,
    n: usize,
    l: usize,
    opts: &EqualityOptions,
) -> Result<GaugeOutcome, Error> {
    let f = gauge_factor(n, l);
    let m_f = DiffOp::multiplier(n, f.clone());
    let m_f_inv = DiffOp::multiplier(n, div(one(), f));
    let mut winners = Vec::new();
    let mut passing_checks = Vec::new();
    let mut failing_checks = Vec::new();
    let mut rejected = Vec::new();
    for ho in ORDERS {
        for co in ORDERS {
            let lhs = m_f.compose(&realize(h, ho)).compose(&m_f_inv);
            let rhs = realize(h_hat, co);
            let trial = op_equal(&lhs, &rhs, opts)?;
            let named: Vec<Check> = trial
                .into_iter()
                .map(|mut c| {
                    c.name = format!("gauge h={ho} hhat={co} {}", c.name);
                    c
                })
                .collect();
            if all_pass(&named) {
                winners.push((ho, co));
                passing_checks.extend(named);
            } else {
                rejected.push(Check::flag(format!("gauge_excluded h={ho} hhat={co}"), true));
                failing_checks.extend(named);
            }
        }
    }
    let unique = winners.len() == 1;
    let mut checks = passing_checks;
    checks.extend(rejected);
    checks.push(Check::flag("gauge_unique_ordering", unique));
    if !unique {
        // Hard failure: surface every residual so the grid outcome is
        // inspectable.
        checks.extend(failing_checks);
    }
    Ok(GaugeOutcome { checks, winner: if unique { Some(winners[0]) } else { None } })
}

/// Conjugates H by the gauge multiplier under all four (reading, reading)
/// combinations and verifies M_f H M_{f^{-1}} = H^ by exact sampling. The
/// report records which combinations are excluded and that exactly one
/// verifies; the winner is returned, not presumed.
pub fn check_gauge(n: usize, l: usize, opts: &EqualityOptions) -> Result<GaugeOutcome, Error> {
    gauge_grid(&hamiltonian(n, l), &conjugated_hamiltonian(n, l), n, l, opts)
}

/// Negative control for the gauge grid: widening the coefficient products
/// of H from k < i to k != i must make every combination fail.
pub fn check_gauge_negative_control(
    n: usize,
    l: usize,
    opts: &EqualityOptions,
) -> Result<Vec<Check>, Error> {
    let mut bad = DiffOp::new(n);
    for i in 1..=n {
        let mut acc = one();
        for k in 1..=n {
            if k != i {
                acc = mul(acc, sub(one(), mul(ll1_expr(l as i64), xi_expr(i, k))));
            }
        }
        let mut shift = vec![0i64; n];
        shift[i - 1] = 1;
        bad.add_term(shift, acc);
    }
    let outcome = gauge_grid(&bad, &conjugated_hamiltonian(n, l), n, l, opts)?;
    Ok(vec![Check::flag("gauge_negative_control", outcome.winner.is_none())])
}

/// Builds the bundle, running the gauge discrimination to fill in the
/// orderings. Fails if the grid does not isolate a unique pair.
pub fn hamiltonian_bundle(
    n: usize,
    l: usize,
    opts: &EqualityOptions,
) -> Result<HamiltonianBundle, Error> {
    let outcome = check_gauge(n, l, opts)?;
    let (ordering, conjugated_ordering) = outcome.winner.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "gauge grid did not isolate a unique ordering at n = {n}, l = {l}"
        ))
    })?;
    Ok(HamiltonianBundle {
        n,
        l,
        h: hamiltonian(n, l),
        h_hat: conjugated_hamiltonian(n, l),
        gauge: gauge_factor(n, l),
        ordering,
        conjugated_ordering,
    })
}

/// The Hamiltonian coefficients against the dressed diagonal: c_i evaluated
/// in the w coordinates must reproduce the partial diagonal entry R~_i^1
/// computed from the twist coefficients in the u coordinates. Two code
/// paths with no shared arithmetic.
pub fn check_trace_consistency(pt: &ParamPoint) -> Result<Vec<Check>, Error> {
    let diag = dressed_diagonal(&pt.u_point())?;
    let wpt = pt.w_point();
    let h = hamiltonian(pt.n, pt.l);
    let mut out = Vec::new();
    for i in 1..=pt.n {
        let mut shift = vec![0i64; pt.n];
        shift[i - 1] = 1;
        let c = h.terms[&shift].eval(&wpt)?;
        out.push(
            Check::exact(format!("trace_consistency i={i}"), (c - &diag.reduced[&(i, 1)]).abs())
                .with_point(pt),
        );
    }
    Ok(out)
}

/// Structure of the two-coordinate operator: exactly two terms, first
/// coefficient 1, second the single-pair coefficient.
pub fn check_lame_shape(l: usize) -> Vec<Check> {
    let op = difference_lame_n2(l);
    let mut out = Vec::new();
    out.push(Check::flag("lame_two_terms", op.terms.len() == 2));
    let t1 = op.terms.get(&vec![1, 0][..].to_vec());
    out.push(Check::flag("lame_first_coefficient", t1 == Some(&one())));
    let expected = sub(one(), mul(ll1_expr(l as i64), xi_expr(2, 1)));
    let t2 = op.terms.get(&vec![0, 1][..].to_vec());
    out.push(Check::flag("lame_second_coefficient", t2 == Some(&expected)));
    out
}

/// Entry checks of the diagonal shift matrix: size, action on constants,
/// and the bridge identity T_{i+1} T_i^{-1} scaling w_i/w_{i+1} by q^{-2},
/// which ties the shift normalization to the squared-coordinate ratios the
/// coefficients use.
pub fn check_shift_matrix(n: usize) -> Vec<Check> {
    let sm = shift_matrix(n);
    let mut out = Vec::new();
    out.push(Check::flag("shift_matrix_size", sm.len() == n));
    let pt = WPoint {
        n,
        q: Rat::new(3, 2),
        w: (0..n).map(|k| Rat::from_int(2 * k as i64 + 5)).collect(),
    };
    let constant = vec![0i64; n];
    for (i, t) in sm.iter().enumerate() {
        let applied = t.apply(&constant, &pt).unwrap();
        out.push(Check::exact(format!("shift_constant i={}", i + 1), applied - Rat::one()));
    }
    for i in 1..n {
        let mut op = DiffOp::new(n);
        let mut shift = vec![0i64; n];
        shift[i] = 1;
        shift[i - 1] = -1;
        op.add_term(shift, one());
        let mut mono = vec![0i64; n];
        mono[i - 1] = 1;
        mono[i] = -1;
        let applied = op.apply(&mono, &pt).unwrap();
        let direct = (&pt.w[i - 1] / &pt.w[i]) * pt.q.powi(-2);
        out.push(Check::exact(format!("shift_bridge i={i}"), applied - direct));
    }
    out
}

/// Classical behavior of one coefficient factor: at q = 1 + eps and
/// U = q^y the quantity [l][l+1] xi(U) tends to 4 l (l+1) / (y (y+2)) with
/// error O(eps). Exact rational evaluation; the check is that the slopes
/// error/eps stay within a factor 10 of each other across the eps list.
pub fn classical_limit_check(l: usize, y: i64, eps_list: &[Rat]) -> Vec<Check> {
    assert!(y >= 1 && l >= 1 && !eps_list.is_empty());
    let limit = Rat::new(4 * (l * (l + 1)) as i64, y * (y + 2));
    let mut slopes = Vec::new();
    let mut errors = Vec::new();
    for eps in eps_list {
        let q = Rat::one() + eps;
        let u = q.powi(y);
        let value = crate::scalars::qint(l as i64, &q)
            * crate::scalars::qint(l as i64 + 1, &q)
            * crate::dressed::xi(&u, &q).expect("U = (1+eps)^y > 1 is never singular");
        let err = (value - &limit).abs();
        slopes.push(&err / eps);
        errors.push(err);
    }
    let mut out = Vec::new();
    // No blow-up: along the shrinking eps list a slope may fall (the error
    // can be o(eps), as happens at l = 1, y = 1) but must never grow by
    // more than a factor 10.
    let bounded = slopes
        .windows(2)
        .all(|s| s[1] <= &s[0] * Rat::from_int(10));
    out.push(Check::flag(format!("classical_slope_bounded l={l} y={y}"), bounded));
    // Strictly decreasing, except that an exactly zero error (the prelimit
    // expression can already equal the limit, as at l = 1, y = 2) is
    // converged and cannot decrease further.
    let decreasing = errors.windows(2).all(|w| w[1] < w[0] || w[1].is_zero());
    out.push(Check::flag(format!("classical_error_decreases l={l} y={y}"), decreasing));
    out
}

/// The limit value itself, for anchors and decay checks.
pub fn classical_limit_value(l: usize, y: i64) -> Rat {
    Rat::new(4 * (l * (l + 1)) as i64, y * (y + 2))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All non-increasing exponent vectors with total absolute degree between 1
/// and `max_total`: the evaluation basis of symmetric Laurent monomials.
pub fn symmetric_test_exponents(n: usize, max_total: i64) -> Vec<Vec<i64>> {
    fn rec(
        n: usize,
        upper: i64,
        rem: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if cur.len() == n {
            if cur.iter().any(|&v| v != 0) {
                out.push(cur.clone());
            }
            return;
        }
        let mut v = upper.min(rem);
        while -v <= rem {
            if v.abs() <= rem {
                cur.push(v);
                rec(n, v, rem - v.abs(), cur, out);
                cur.pop();
            }
            v -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, max_total, max_total, &mut Vec::new(), &mut out);
    out
}

/// Exact value of the symmetric Laurent monomial m_lambda at the point:
/// the sum of w^mu over all distinct rearrangements mu of lambda.
pub fn eval_monomial_symmetric(lam: &[i64], pt: &WPoint) -> Result<Rat, Error> {
    let n = lam.len();
    assert_eq!(n, pt.n);
    let mut arrangements = BTreeSet::new();
    for p in permutations(n) {
        let arr: Vec<i64> = (0..n).map(|j| lam[p[j]]).collect();
        arrangements.insert(arr);
    }
    let mut total = Rat::zero();
    for arr in arrangements {
        let mut term = Rat::one();
        for (j, &e) in arr.iter().enumerate() {
            let p = pt.w[j].checked_powi(e).ok_or_else(|| {
                Error::SingularPoint("monomial at a zero coordinate".into())
            })?;
            term = term * p;
        }
        total = total + term;
    }
    Ok(total)
}

fn shifted_wpoint(pt: &WPoint, i: usize) -> WPoint {
    let mut w = pt.w.clone();
    w[i - 1] = &w[i - 1] * &pt.q;
    WPoint { n: pt.n, q: pt.q.clone(), w }
}

fn permuted_wpoint(pt: &WPoint, p: &[usize]) -> WPoint {
    WPoint { n: pt.n, q: pt.q.clone(), w: p.iter().map(|&j| pt.w[j].clone()).collect() }
}

/// Pole-free clearing of c^_i: multiplying by the squared-coordinate
/// alternant V = prod_{a<b}(x_a - x_b) turns c^_i into the polynomial
///
///   N_i = prod_{k!=i}(q^l x_i - q^{-l} x_k) * (-1)^{i-1}
///         * prod_{a<b, a!=i, b!=i}(x_a - x_b),
///
/// which stays evaluable on the hyperplanes w_a = w_b.
fn clearing_poly(n: usize, l: usize, i: usize) -> CoeffExpr {
    let mut acc = if i % 2 == 1 { one() } else { CoeffExpr::int(-1) };
    for k in 1..=n {
        if k != i {
            acc = mul(acc, sub(mul(pw(Q, l as i64), x_expr(i)), mul(pw(Q, -(l as i64)), x_expr(k))));
        }
    }
    for a in 1..=n {
        for b in (a + 1)..=n {
            if a != i && b != i {
                acc = mul(acc, sub(x_expr(a), x_expr(b)));
            }
        }
    }
    acc
}

fn vandermonde_x(n: usize) -> CoeffExpr {
    let mut acc = one();
    for a in 1..=n {
        for b in (a + 1)..=n {
            acc = mul(acc, sub(x_expr(a), x_expr(b)));
        }
    }
    acc
}

/// Applies the conjugated Hamiltonian to the symmetric monomial at a point:
/// sum_i c^_i(w) m_lambda(sigma_i w).
fn apply_h_hat(n: usize, l: usize, lam: &[i64], pt: &WPoint) -> Result<Rat, Error> {
    let mut total = Rat::zero();
    for i in 1..=n {
        let c = coeff_c_hat(n, l, i).eval(pt)?;
        total = total + c * eval_monomial_symmetric(lam, &shifted_wpoint(pt, i))?;
    }
    Ok(total)
}

/// Same application through the cleared polynomials: sum_i N_i(w)
/// m_lambda(sigma_i w), which must equal V * (H^ m_lambda) wherever V != 0
/// and vanish identically on the hyperplanes w_a = w_b.
fn apply_cleared(n: usize, l: usize, lam: &[i64], pt: &WPoint) -> Result<Rat, Error> {
    let mut total = Rat::zero();
    for i in 1..=n {
        let c = clearing_poly(n, l, i).eval(pt)?;
        total = total + c * eval_monomial_symmetric(lam, &shifted_wpoint(pt, i))?;
    }
    Ok(total)
}

/// Verifies that the conjugated Hamiltonian preserves symmetric Laurent
/// polynomials, by exact evaluation on every monomial symmetric function of
/// total absolute degree <= 3:
///
/// - the cleared application matches V times the direct application at
///   sampled points (denominators cancel against the alternant),
/// - the image is invariant under permuting the coordinates,
/// - the cleared application vanishes exactly on each hyperplane w_a = w_b,
/// - both statements survive near-coincident points w_b = w_a (1 + 10^-r).
pub fn check_symmetry_preservation(
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
    bound: i64,
) -> Result<Vec<Check>, Error> {
    let lams = symmetric_test_exponents(n, 3);
    let perms = permutations(n);
    let v = vandermonde_x(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut last_point: Option<WPoint> = None;
    for t in 0..trials {
        let pt = sample_point_with(&mut rng, n, l, bound)?;
        let wpt = pt.w_point();
        let mut cleared_residual = Rat::zero();
        let mut symmetric_residual = Rat::zero();
        for lam in &lams {
            let direct = apply_h_hat(n, l, lam, &wpt)?;
            let cleared = apply_cleared(n, l, lam, &wpt)?;
            cleared_residual = cleared_residual + (cleared - v.eval(&wpt)? * &direct).abs();
            for p in &perms {
                let image = apply_h_hat(n, l, lam, &permuted_wpoint(&wpt, p))?;
                symmetric_residual = symmetric_residual + (&image - &direct).abs();
            }
        }
        out.push(Check::exact(format!("sym_cleared t{t:02}"), cleared_residual).with_point(&pt));
        out.push(Check::exact(format!("sym_invariant t{t:02}"), symmetric_residual).with_point(&pt));
        last_point = Some(wpt);
    }
    let base = last_point.expect("trials >= 1");

    // Exact hyperplane points: w_b = w_a, remaining coordinates generic.
    for a in 1..=n {
        for b in (a + 1)..=n {
            let mut w = base.w.clone();
            w[b - 1] = w[a - 1].clone();
            let hp = WPoint { n, q: base.q.clone(), w };
            let mut residual = Rat::zero();
            for lam in &lams {
                residual = residual + apply_cleared(n, l, lam, &hp)?.abs();
            }
            out.push(Check::exact(format!("sym_hyperplane a={a} b={b}"), residual));
        }
    }

    // Near-coincident sequence approaching w_2 = w_1, all exact rationals.
    for r in [3u32, 6, 9] {
        let mut w = base.w.clone();
        let bump = Rat::one() + Rat::new(1, 10i64.pow(r));
        w[1] = &w[0] * &bump;
        let near = WPoint { n, q: base.q.clone(), w };
        let mut residual = Rat::zero();
        for lam in &lams {
            let direct = apply_h_hat(n, l, lam, &near)?;
            let cleared = apply_cleared(n, l, lam, &near)?;
            residual = residual + (cleared - v.eval(&near)? * &direct).abs();
            for p in &perms {
                let image = apply_h_hat(n, l, lam, &permuted_wpoint(&near, p))?;
                residual = residual + (image - &direct).abs();
            }
        }
        out.push(Check::exact(format!("sym_near r={r}"), residual));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressed::xi;
    use crate::scalars::sample_point;

    fn wpt53() -> WPoint {
        WPoint { n: 2, q: Rat::from_int(2), w: vec![Rat::from_int(5), Rat::from_int(3)] }
    }

    #[test]
    fn shift_matrix_checks_pass() {
        for n in [2, 3, 4] {
            assert!(all_pass(&check_shift_matrix(n)), "shift matrix checks at n={n}");
        }
    }

    #[test]
    fn gauge_factor_matches_ratio_form() {
        // n=2, l=1: f = (q w_1/w_2 - q^{-1} w_2/w_1)^{-1}.
        let pt = wpt53();
        let f = gauge_factor(2, 1).eval(&pt).unwrap();
        let ratio = &pt.w[0] / &pt.w[1];
        let direct = (pt.q.clone() * &ratio - pt.q.powi(-1) * ratio.recip().unwrap())
            .recip()
            .unwrap();
        assert_eq!(f, direct);
        assert_eq!(f, Rat::new(30, 91));
    }

    #[test]
    fn gauge_factor_counts_factors() {
        // Pair (i, k) contributes l factors; value check against a manual
        // product at a 3-coordinate point.
        let pt = WPoint {
            n: 3,
            q: Rat::from_int(2),
            w: vec![Rat::from_int(5), Rat::from_int(3), Rat::from_int(7)],
        };
        let f = gauge_factor(3, 2).eval(&pt).unwrap();
        let mut manual = Rat::one();
        for (i, k) in [(0usize, 1usize), (0, 2), (1, 2)] {
            for m in 1..=2i64 {
                let den = pt.q.powi(m) * pt.w[i].powi(2) - pt.q.powi(-m) * pt.w[k].powi(2);
                manual = manual * (&pt.w[i] * &pt.w[k]) * den.recip().unwrap();
            }
        }
        assert_eq!(f, manual);
    }

    #[test]
    fn hamiltonian_shape() {
        let h = hamiltonian(3, 1);
        assert_eq!(h.terms.len(), 3);
        assert_eq!(h.terms[&vec![1, 0, 0]], CoeffExpr::one());
        // Third coefficient: product over k = 1, 2.
        let pt = WPoint {
            n: 3,
            q: Rat::from_int(2),
            w: vec![Rat::from_int(5), Rat::from_int(3), Rat::from_int(7)],
        };
        let c3 = h.terms[&vec![0, 0, 1]].eval(&pt).unwrap();
        let s = Rat::new(5, 2);
        let u31 = Rat::new(49, 25);
        let u32 = Rat::new(49, 9);
        let manual = (Rat::one() - &s * xi(&u31, &pt.q).unwrap())
            * (Rat::one() - &s * xi(&u32, &pt.q).unwrap());
        assert_eq!(c3, manual);
    }

    #[test]
    fn lame_shape_and_values() {
        assert!(all_pass(&check_lame_shape(1)));
        assert!(all_pass(&check_lame_shape(2)));
        // Cross-check of the second coefficient at w = (1, 3), q = 2,
        // where u_2/u_1 = 9.
        let pt = WPoint { n: 2, q: Rat::from_int(2), w: vec![Rat::one(), Rat::from_int(3)] };
        let op = difference_lame_n2(1);
        let c2 = op.terms[&vec![0, 1]].eval(&pt).unwrap();
        assert_eq!(c2, Rat::new(143, 224));
        let direct = Rat::one() - Rat::new(5, 2) * xi(&Rat::from_int(9), &pt.q).unwrap();
        assert_eq!(c2, direct);
        // l = 2 uses [2][3] = 105/8.
        let op = difference_lame_n2(2);
        let c2 = op.terms[&vec![0, 1]].eval(&pt).unwrap();
        assert_eq!(c2, Rat::new(-115, 128));
        let direct = Rat::one() - Rat::new(105, 8) * xi(&Rat::from_int(9), &pt.q).unwrap();
        assert_eq!(c2, direct);
    }

    #[test]
    fn conjugated_coefficients() {
        let pt = wpt53();
        // i = 1 coefficient equals the quoted ratio form.
        let c1 = coeff_c_hat(2, 1, 1).eval(&pt).unwrap();
        let r = &pt.w[0] / &pt.w[1];
        let num = pt.q.clone() * &r - pt.q.powi(-1) * r.recip().unwrap();
        let den = &r - r.recip().unwrap();
        assert_eq!(c1, num / den);
        assert_eq!(c1, Rat::new(91, 32));
        // Swapping the coordinates swaps the coefficient family.
        let swapped = WPoint { n: 2, q: pt.q.clone(), w: vec![pt.w[1].clone(), pt.w[0].clone()] };
        let c2 = coeff_c_hat(2, 1, 2).eval(&pt).unwrap();
        assert_eq!(c2, coeff_c_hat(2, 1, 1).eval(&swapped).unwrap());
        assert_eq!(c2, Rat::new(-11, 32));
    }

    #[test]
    fn gauge_identity_pointwise_anchor() {
        // f c_i / sigma_i f = sigma_i chat_i at q = 2, w = (5, 3).
        let pt = wpt53();
        let f = gauge_factor(2, 1);
        for (i, expect) in [(1usize, Rat::new(391, 182)), (2, Rat::new(119, 22))] {
            let shift: Vec<i64> = (1..=2).map(|k| i64::from(k == i)).collect();
            let c = hamiltonian(2, 1).terms[&shift].eval(&pt).unwrap();
            let lhs = f.eval(&pt).unwrap() * c * f.sigma(&shift).eval(&pt).unwrap().recip().unwrap();
            assert_eq!(lhs, expect, "left side i={i}");
            let rhs = coeff_c_hat(2, 1, i).sigma(&shift).eval(&pt).unwrap();
            assert_eq!(rhs, expect, "right side i={i}");
        }
    }

    #[test]
    fn realize_applies_sigma() {
        let mut op = DiffOp::new(2);
        op.add_term(vec![1, 0], W(1));
        let shifted = realize(&op, TermOrder::ShiftLeft);
        assert_eq!(shifted.terms[&vec![1, 0]], mul(Q, W(1)));
        assert_eq!(realize(&op, TermOrder::CoeffLeft), op);
    }

    #[test]
    fn gauge_grid_isolates_one_ordering() {
        for (n, l, seed) in [(2usize, 1usize, 101u64), (2, 2, 102), (3, 1, 103)] {
            let opts = EqualityOptions { l, seed, trials: 6, bound: 16 };
            let outcome = check_gauge(n, l, &opts).unwrap();
            assert!(all_pass(&outcome.checks), "gauge grid failed at n={n} l={l}");
            assert_eq!(
                outcome.winner,
                Some((TermOrder::CoeffLeft, TermOrder::ShiftLeft)),
                "unexpected ordering at n={n} l={l}"
            );
        }
    }

    #[test]
    fn gauge_negative_control_fails_everywhere() {
        let opts = EqualityOptions { l: 1, seed: 7, trials: 4, bound: 16 };
        let checks = check_gauge_negative_control(2, 1, &opts).unwrap();
        assert!(all_pass(&checks));
    }

    #[test]
    fn bundle_records_orderings() {
        let opts = EqualityOptions { l: 1, seed: 5, trials: 4, bound: 16 };
        let b = hamiltonian_bundle(2, 1, &opts).unwrap();
        assert_eq!(b.ordering, TermOrder::CoeffLeft);
        assert_eq!(b.conjugated_ordering, TermOrder::ShiftLeft);
        assert_eq!(b.h.terms.len(), 2);
        assert_eq!(b.h_hat.terms.len(), 2);
    }

    #[test]
    fn trace_consistency_at_sampled_points() {
        for (n, l, seed) in [(2, 1, 111u64), (3, 1, 112), (3, 2, 113), (4, 2, 114)] {
            let pt = sample_point(n, l, seed, 16).unwrap();
            let checks = check_trace_consistency(&pt).unwrap();
            assert!(all_pass(&checks), "trace consistency failed at n={n} l={l}");
        }
    }

    #[test]
    fn classical_limit_anchors_and_checks() {
        assert_eq!(classical_limit_value(1, 1), Rat::new(8, 3));
        assert_eq!(classical_limit_value(2, 2), Rat::from_int(3));
        let eps: Vec<Rat> = [100, 1000, 10000].iter().map(|&d| Rat::new(1, d)).collect();
        for l in [1, 2] {
            for y in [1, 2, 3] {
                let checks = classical_limit_check(l, y, &eps);
                assert!(all_pass(&checks), "classical limit failed at l={l} y={y}");
            }
        }
        // Large y: the limit decays toward 0 (coefficient tends to 1).
        assert!(classical_limit_value(1, 50) < Rat::new(1, 100));
        assert!(classical_limit_value(1, 10) < classical_limit_value(1, 1));
    }

    #[test]
    fn exponent_basis_is_decreasing_and_bounded() {
        let lams = symmetric_test_exponents(2, 3);
        assert!(lams.contains(&vec![1, -1]));
        assert!(lams.contains(&vec![3, 0]));
        assert!(!lams.contains(&vec![0, 0]));
        for lam in &lams {
            assert!(lam.windows(2).all(|w| w[0] >= w[1]), "{lam:?} not sorted");
            let total: i64 = lam.iter().map(|v| v.abs()).sum();
            assert!(1 <= total && total <= 3);
        }
    }

    #[test]
    fn monomial_symmetric_values() {
        let pt = wpt53();
        // m_{(1,0)} = w_1 + w_2, m_{(1,1)} = w_1 w_2, m_{(1,-1)} = w_1/w_2 + w_2/w_1.
        assert_eq!(eval_monomial_symmetric(&[1, 0], &pt).unwrap(), Rat::from_int(8));
        assert_eq!(eval_monomial_symmetric(&[1, 1], &pt).unwrap(), Rat::from_int(15));
        assert_eq!(
            eval_monomial_symmetric(&[1, -1], &pt).unwrap(),
            Rat::new(5, 3) + Rat::new(3, 5)
        );
    }

    #[test]
    fn symmetry_preservation_small() {
        for (n, l, seed) in [(2usize, 1usize, 121u64), (3, 1, 122)] {
            let checks = check_symmetry_preservation(n, l, 4, seed, 16).unwrap();
            assert!(all_pass(&checks), "symmetry preservation failed at n={n} l={l}");
        }
    }
}
