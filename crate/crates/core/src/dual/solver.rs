//! Cutting-plane log-barrier method for the dual norm.
//!
//! For `y ≥ 0`, `‖y‖_*⁻² = min { ‖x‖² : x ≥ 0, ⟨y,x⟩ = 1 }` and
//! `‖x‖² = max_P q_P(x)` with `q_P(x) = Σ_{F∈P} (Σ_{i∈F} x_i)²` over allowed
//! families `P`. A finite working set of families gives the restricted problem
//!
//! ```text
//! min t   s.t.   q_P(x) ≤ t (P in the working set),  x ≥ 0,  ⟨y,x⟩ = 1
//! ```
//!
//! solved by a barrier method. The most violated family at the restricted
//! optimum is found with the subset DP and added; the loop stops when the
//! exact certificates meet. Floats only steer the search: both bounds are
//! rebuilt and checked in rational arithmetic.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::{from_f64_grid, sqrt_bounds, to_f64, Rational};
use crate::family::table::bits;
use crate::primal::{best_family_exact, Trace};

/// Grid for rounding the primal iterate before exact evaluation.
const WITNESS_BITS: u32 = 40;
/// Grid for rounding decomposition weights.
const SHARE_BITS: u32 = 52;
/// Families whose multiplier falls below this are dropped from the upper certificate.
const LAMBDA_FLOOR: f64 = 1e-14;
const MAX_ROUNDS: usize = 400;

/// A family of disjoint admissible blocks, as sorted bitmasks.
pub type Blocks = Vec<usize>;

#[derive(Debug, Clone)]
pub struct Bracket {
    pub lower: Rational,
    /// `x̂ ≥ 0` with `‖x̂‖ ≤ 1` and `⟨y, x̂⟩ = lower`.
    pub witness: Vec<Rational>,
    pub upper: Rational,
    /// `(P, y_P, bound_P)` with `Σ_P y_P = y` and `bound_P ≥ ‖y_P‖_{P,*}`.
    pub parts: Vec<(Blocks, Vec<Rational>, Rational)>,
    pub converged: bool,
    pub rounds: usize,
    pub newton_steps: usize,
}

pub struct Settings {
    pub tol: Rational,
    pub max_newton: usize,
}

/// Brackets `‖y‖_*` for non-negative `y` aligned with `trace.points()`.
pub fn bracket(trace: &Trace, y: &[Rational], settings: &Settings) -> Result<Bracket> {
    let n = y.len();
    assert_eq!(n, trace.len());
    let full = (1usize << n) - 1;
    let singletons: Blocks = (0..n).map(|i| 1usize << i).collect();

    // e_i at the largest coordinate, and the singleton split (an l2 bound)
    let (arg, _) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty support");
    let mut best = Bracket {
        lower: y[arg].clone(),
        witness: unit(n, arg),
        upper: Rational::zero(),
        parts: Vec::new(),
        converged: false,
        rounds: 0,
        newton_steps: 0,
    };
    let (upper, part) = exact_part(&singletons, y.to_vec());
    best.upper = upper;
    best.parts = vec![part];
    if trace.is_admissible(full) {
        let (upper, part) = exact_part(&vec![full], y.to_vec());
        if upper < best.upper {
            best.upper = upper;
            best.parts = vec![part];
        }
    }
    if best.upper.clone() - &best.lower <= settings.tol {
        best.converged = true;
        return Ok(best);
    }

    let scale = y.iter().max().map(to_f64).expect("non-empty");
    let yf: Vec<f64> = y.iter().map(|v| to_f64(v) / scale).collect();
    let mut families: Vec<Blocks> = vec![singletons];
    let mut known: HashSet<Blocks> = families.iter().cloned().collect();
    let (_, own) = trace.best_family(&yf);
    if known.insert(own.clone()) {
        families.push(own);
    }
    if trace.is_admissible(full) && known.insert(vec![full]) {
        families.push(vec![full]);
    }

    let total: f64 = yf.iter().sum();
    let mut x: Vec<f64> = vec![1.0 / total; n];
    while best.rounds < MAX_ROUNDS {
        best.rounds += 1;
        let budget = settings.max_newton.saturating_sub(best.newton_steps);
        if budget == 0 {
            break;
        }
        let sol = restricted(&yf, &families, &x, budget)?;
        best.newton_steps += sol.steps;
        x = sol.x;

        improve_lower(trace, y, &x, &mut best);
        improve_upper(y, &barrier_weights(&families, &sol.lambda, &x), &mut best);
        if let Some(weighted) = lp_weights(&yf, &families, &x) {
            improve_upper(y, &weighted, &mut best);
        }
        if best.upper.clone() - &best.lower <= settings.tol {
            best.converged = true;
            break;
        }
        let (worst, cut) = trace.best_family(&x);
        if worst <= sol.t * (1.0 + 1e-13) || !known.insert(cut.clone()) {
            break;
        }
        families.push(cut);
    }
    Ok(best)
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// Upper bound for a single part: `sqrt(Σ_F max_{i∈F} z_i²)` rounded up.
fn exact_part(blocks: &Blocks, z: Vec<Rational>) -> (Rational, (Blocks, Vec<Rational>, Rational)) {
    let sq: Rational = blocks
        .iter()
        .map(|&b| {
            let m = bits(b).map(|i| &z[i]).max().cloned().unwrap_or_else(Rational::zero);
            &m * &m
        })
        .sum();
    let bound = sqrt_bounds(&sq, 64).1;
    (bound.clone(), (blocks.clone(), z, bound))
}

fn improve_lower(trace: &Trace, y: &[Rational], x: &[f64], best: &mut Bracket) {
    let xr: Vec<Rational> = x.iter().map(|&v| from_f64_grid(v.max(0.0), WITNESS_BITS)).collect();
    if xr.iter().all(Zero::is_zero) {
        return;
    }
    let (norm_sq, _) = best_family_exact(trace, &xr);
    let inv = Rational::one() / norm_sq;
    let c = sqrt_bounds(&inv, 64).0;
    let witness: Vec<Rational> = xr.iter().map(|v| v * &c).collect();
    let lower: Rational = witness.iter().zip(y).map(|(a, b)| a * b).sum();
    if lower > best.lower {
        best.lower = lower;
        best.witness = witness;
    }
}

/// Stationarity weights `λ_P (M_P x)_i` from the barrier multipliers.
fn barrier_weights(families: &[Blocks], lambda: &[f64], x: &[f64]) -> Vec<(Blocks, Vec<f64>)> {
    families
        .iter()
        .zip(lambda)
        .filter(|(_, &l)| l >= LAMBDA_FLOOR)
        .map(|(p, &l)| (p.clone(), mx(x, p).into_iter().map(|v| l * v).collect()))
        .collect()
}

/// Best multipliers for a fixed `x`: minimise `Σ_P λ_P sqrt(q_P(x)) + Σ_i ρ_i`
/// subject to `Σ_P λ_P M_P x + ρ ≥ y`, `λ, ρ ≥ 0`. Any feasible point gives a
/// valid split; at the optimum of the restricted problem the value is exact,
/// and it moves only to second order with `x`. Barrier multipliers `1/(τ f_P)`
/// lose their digits once the slacks are near float resolution; `x` does not.
fn lp_weights(y: &[f64], families: &[Blocks], x: &[f64]) -> Option<Vec<(Blocks, Vec<f64>)>> {
    let n = y.len();
    let columns: Vec<Vec<f64>> = families.iter().map(|p| mx(x, p)).collect();
    let costs: Vec<f64> = families.iter().map(|p| q(x, p).sqrt()).collect();
    let duals = simplex_duals(y, &columns, &costs)?;
    let singletons: Blocks = (0..n).map(|i| 1usize << i).collect();
    let mut out: Vec<(Blocks, Vec<f64>)> = families
        .iter()
        .zip(&columns)
        .zip(&duals)
        .filter(|(_, &l)| l >= LAMBDA_FLOOR)
        .map(|((p, c), &l)| (p.clone(), c.iter().map(|v| l * v).collect()))
        .collect();
    let rho = duals[families.len()..].to_vec();
    if rho.iter().any(|&r| r >= LAMBDA_FLOOR) {
        out.push((singletons, rho));
    }
    Some(out)
}

/// Solves `max yᵀw` s.t. `columns[p]·w ≤ costs[p]`, `w ≤ 1`, `w ≥ 0` with a
/// dense tableau and Bland's rule, returning the row duals (the multipliers
/// of the covering problem), families first and then the unit rows.
fn simplex_duals(y: &[f64], columns: &[Vec<f64>], costs: &[f64]) -> Option<Vec<f64>> {
    const EPS: f64 = 1e-12;
    let n = y.len();
    let rows = columns.len() + n;
    let width = n + rows + 1;
    let mut tab = vec![vec![0.0f64; width]; rows + 1];
    for (r, (col, &c)) in columns.iter().zip(costs).enumerate() {
        tab[r][..n].copy_from_slice(col);
        tab[r][n + r] = 1.0;
        tab[r][width - 1] = c;
    }
    for i in 0..n {
        let r = columns.len() + i;
        tab[r][i] = 1.0;
        tab[r][n + r] = 1.0;
        tab[r][width - 1] = 1.0;
    }
    for i in 0..n {
        tab[rows][i] = -y[i];
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();
    for _ in 0..50 * (rows + n) {
        let Some(enter) = (0..width - 1).find(|&j| tab[rows][j] < -EPS) else {
            return Some((0..rows).map(|r| tab[rows][n + r].max(0.0)).collect());
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            let a = tab[r][enter];
            if a > EPS {
                let ratio = tab[r][width - 1] / a;
                let better = match leave {
                    None => true,
                    Some((l, best)) => ratio < best - EPS || (ratio <= best + EPS && basis[r] < basis[l]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (pivot_row, _) = leave?;
        let pivot = tab[pivot_row][enter];
        tab[pivot_row].iter_mut().for_each(|v| *v /= pivot);
        let row = tab[pivot_row].clone();
        for (r, line) in tab.iter_mut().enumerate() {
            if r != pivot_row {
                let factor = line[enter];
                if factor != 0.0 {
                    for (v, &p) in line.iter_mut().zip(&row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        basis[pivot_row] = enter;
    }
    None
}

/// Splits `y` in proportion to the given non-negative weights, one part per
/// family; coordinates no family covers go to a singleton part.
fn improve_upper(y: &[Rational], weighted: &[(Blocks, Vec<f64>)], best: &mut Bracket) {
    let n = y.len();
    let weights: Vec<Vec<Rational>> = weighted
        .iter()
        .map(|(_, w)| w.iter().map(|&v| from_f64_grid(v.max(0.0), SHARE_BITS)).collect())
        .collect();
    let mut totals = vec![Rational::zero(); n];
    for w in &weights {
        for i in 0..n {
            totals[i] += &w[i];
        }
    }
    let mut upper = Rational::zero();
    let mut parts = Vec::new();
    for ((blocks, _), w) in weighted.iter().zip(weights) {
        let z: Vec<Rational> = (0..n)
            .map(|i| {
                if totals[i].is_zero() {
                    Rational::zero()
                } else {
                    &y[i] * &w[i] / &totals[i]
                }
            })
            .collect();
        if z.iter().all(Zero::is_zero) {
            continue;
        }
        let (bound, part) = exact_part(blocks, z);
        upper += bound;
        parts.push(part);
    }
    let rest: Vec<Rational> = (0..n)
        .map(|i| if totals[i].is_zero() { y[i].clone() } else { Rational::zero() })
        .collect();
    if rest.iter().any(|v| !v.is_zero()) {
        let singletons: Blocks = (0..n).map(|i| 1usize << i).collect();
        let (bound, part) = exact_part(&singletons, rest);
        upper += bound;
        parts.push(part);
    }
    if upper < best.upper {
        best.upper = upper;
        best.parts = parts;
    }
}

struct Restricted {
    x: Vec<f64>,
    t: f64,
    lambda: Vec<f64>,
    steps: usize,
}

fn block_sums(x: &[f64], blocks: &Blocks) -> Vec<f64> {
    blocks.iter().map(|&b| bits(b).map(|i| x[i]).sum()).collect()
}

fn q(x: &[f64], blocks: &Blocks) -> f64 {
    block_sums(x, blocks).iter().map(|s| s * s).sum()
}

/// `M_P x`: each covered coordinate carries its block sum.
fn mx(x: &[f64], blocks: &Blocks) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (&b, s) in blocks.iter().zip(block_sums(x, blocks)) {
        for i in bits(b) {
            out[i] = s;
        }
    }
    out
}

fn barrier(tau: f64, x: &[f64], t: f64, families: &[Blocks]) -> f64 {
    let mut phi = tau * t;
    for p in families {
        let f = t - q(x, p);
        if f <= 0.0 {
            return f64::INFINITY;
        }
        phi -= f.ln();
    }
    for &v in x {
        if v <= 0.0 {
            return f64::INFINITY;
        }
        phi -= v.ln();
    }
    phi
}

/// Barrier path for the restricted problem, warm-started near `start`.
fn restricted(y: &[f64], families: &[Blocks], start: &[f64], budget: usize) -> Result<Restricted> {
    let n = y.len();
    let total: f64 = y.iter().sum();
    let mut x: Vec<f64> = start
        .iter()
        .map(|&v| 0.9 * v.max(0.0) + 0.1 / total)
        .collect();
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    x.iter_mut().for_each(|v| *v /= dot);
    let qmax = families.iter().map(|p| q(&x, p)).fold(0.0, f64::max);
    let mut t = 1.5 * qmax + 1e-12;
    let m = (families.len() + n) as f64;
    let mut tau = m / t;
    let mut steps = 0;
    let mut stalled = false;

    loop {
        // centering
        for _ in 0..200 {
            if steps >= budget {
                break;
            }
            steps += 1;
            let dim = n + 1;
            let np = families.len();
            let size = dim + np + 1;
            // augmented Newton system in (dz, u, w):
            //   H0 dz + Gᵀ u + a w = -grad,   G dz - diag(f²) u = 0,   aᵀ dz = residual
            // where G stacks ∇f_P = (-2 M_P x, 1); forming Gᵀ diag(f⁻²) G directly
            // would swamp the x-barrier once the slacks f_P are tiny
            let mut k = DMatrix::<f64>::zeros(size, size);
            let mut g = DVector::<f64>::zeros(dim);
            g[n] = tau;
            for (row, p) in families.iter().enumerate() {
                let f = t - q(&x, p);
                let grad_q: Vec<f64> = mx(&x, p).into_iter().map(|v| 2.0 * v).collect();
                let r = dim + row;
                for i in 0..n {
                    g[i] += grad_q[i] / f;
                    k[(r, i)] = -grad_q[i];
                    k[(i, r)] = -grad_q[i];
                }
                g[n] -= 1.0 / f;
                k[(r, n)] = 1.0;
                k[(n, r)] = 1.0;
                k[(r, r)] = -f * f;
                for &b in p {
                    for i in bits(b) {
                        for j in bits(b) {
                            k[(i, j)] += 2.0 / f;
                        }
                    }
                }
            }
            for i in 0..n {
                g[i] -= 1.0 / x[i];
                k[(i, i)] += 1.0 / (x[i] * x[i]);
                k[(i, size - 1)] = y[i];
                k[(size - 1, i)] = y[i];
            }
            let mut rhs = DVector::<f64>::zeros(size);
            for i in 0..dim {
                rhs[i] = -g[i];
            }
            let residual: f64 = 1.0 - x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
            rhs[size - 1] = residual;
            // symmetric Ruiz equilibration
            let mut d = vec![1.0f64; size];
            for _ in 0..4 {
                for i in 0..size {
                    let m = (0..size).map(|j| k[(i, j)].abs()).fold(0.0, f64::max);
                    let s = if m > 0.0 { 1.0 / m.sqrt() } else { 1.0 };
                    d[i] *= s;
                    for j in 0..size {
                        k[(i, j)] *= s;
                        k[(j, i)] *= s;
                    }
                }
            }
            for i in 0..size {
                rhs[i] *= d[i];
            }
            let Some(sol) = k.lu().solve(&rhs) else {
                stalled = true;
                break;
            };
            let dz: Vec<f64> = (0..dim).map(|i| sol[i] * d[i]).collect();
            let decrement: f64 = -(0..dim).map(|i| g[i] * dz[i]).sum::<f64>();
            if !decrement.is_finite() {
                stalled = true;
                break;
            }
            if decrement < 1e-14 && residual.abs() < 1e-14 {
                break;
            }
            let phi = barrier(tau, &x, t, families);
            let mut s = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let xn: Vec<f64> = (0..n).map(|i| x[i] + s * dz[i]).collect();
                let tn = t + s * dz[n];
                let phin = barrier(tau, &xn, tn, families);
                if phin.is_finite() && phin <= phi - 0.25 * s * decrement.max(0.0) {
                    x = xn;
                    t = tn;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if stalled || m / tau < 1e-9 * t || steps >= budget {
            break;
        }
        tau *= 8.0;
    }
    let lambda = families.iter().map(|p| 1.0 / (tau * (t - q(&x, p)))).collect();
    Ok(Restricted {
        x,
        t,
        lambda,
        steps,
    })
}
