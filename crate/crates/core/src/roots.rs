//! Univariate root finding for characteristic polynomials.
//!
//! Exact roots are found by polishing floating approximations, snapping them
//! to nearby Gaussian rationals and verifying the snap exactly; whatever
//! cannot be verified is handed back as a cofactor.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::coef::{GaussRat, RootSplit};

fn trim<C: Zero>(p: &mut Vec<C>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn eval_exact(p: &[GaussRat], x: &GaussRat) -> GaussRat {
    p.iter().rev().fold(GaussRat::zero(), |acc, c| &(&acc * x) + c)
}

/// Synthetic division by `(x - r)`; returns quotient, assumes exact divisibility.
fn deflate(p: &[GaussRat], r: &GaussRat) -> Vec<GaussRat> {
    let n = p.len() - 1;
    let mut q = vec![GaussRat::zero(); n];
    let mut carry = GaussRat::zero();
    for i in (1..=n).rev() {
        carry = &p[i] + &(&carry * r);
        q[i - 1] = carry.clone();
    }
    q
}

/// Split `p` (ascending coefficients) into Gaussian-rational roots and a remainder.
pub fn exact_roots(p: &[GaussRat]) -> RootSplit<GaussRat> {
    let mut p = p.to_vec();
    trim(&mut p);
    let mut roots: Vec<(GaussRat, u32)> = Vec::new();
    // normalize to monic
    if let Some(lead) = p.last().cloned() {
        if !lead.is_zero() {
            for c in p.iter_mut() {
                *c = &*c / &lead;
            }
        }
    }
    loop {
        let deg = p.len() - 1;
        if deg == 0 {
            break;
        }
        if deg == 1 {
            let r = -&p[0];
            push_root(&mut roots, r);
            p = vec![GaussRat::one()];
            break;
        }
        let approx = aberth(&p.iter().map(|c| c.to_c64()).collect::<Vec<_>>());
        let mut found = None;
        'outer: for z in approx {
            for den in [1_000_000_i64, 100_000, 1_000, 100] {
                if let Some(c) = GaussRat::rationalize(z, den) {
                    if eval_exact(&p, &c).is_zero() {
                        found = Some(c);
                        break 'outer;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                p = deflate(&p, &r);
                push_root(&mut roots, r);
            }
            None => break,
        }
    }
    RootSplit { roots, rest: p }
}

fn push_root(roots: &mut Vec<(GaussRat, u32)>, r: GaussRat) {
    if let Some(slot) = roots.iter_mut().find(|(x, _)| *x == r) {
        slot.1 += 1;
    } else {
        roots.push((r, 1));
    }
}

fn eval_c(p: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut d = Complex64::zero();
    for c in p.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

/// All complex roots by Aberth iteration followed by Newton polishing.
pub fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let p: Vec<Complex64> = p.iter().map(|c| c / lead).collect();
    // Cauchy bound for the initial circle
    let bound = 1.0 + p[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = bound.min(1e6) * 0.5 + 0.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval_c(&p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += Complex64::one() / diff;
                    }
                }
            }
            let step = ratio / (Complex64::one() - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let (v, d) = eval_c(&p, *zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.is_finite() || step.norm() < 1e-17 {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Floating roots with nearby approximations merged into multiplicities.
pub fn clustered_roots(p: &[Complex64]) -> Vec<(Complex64, u32)> {
    let z = aberth(p);
    let mut out: Vec<(Complex64, u32)> = Vec::new();
    for r in z {
        if let Some(slot) = out
            .iter_mut()
            .find(|(c, m)| (*c / *m as f64 - r).norm() < 1e-5 * (1.0 + r.norm()))
        {
            slot.0 += r;
            slot.1 += 1;
        } else {
            out.push((r, 1));
        }
    }
    out.into_iter().map(|(sum, m)| (sum / m as f64, m)).collect()
}
