//! Algebra constructors from generating rules.
//!
//! # Clifford algebras
//!
//! `clifford(p, q)` has `p + q` anticommuting generators `g_1 … g_{p+q}`;
//! the first `p` square to `+1`, the rest to `−1`. The basis is the set of
//! blades (products of distinct generators in increasing index order),
//! ordered by grade and then lexicographically by generator indices, scalar
//! first. With two generators that is `1, g1, g2, g1g2`.
//!
//! # Cayley–Dickson chains
//!
//! Starting from the reals, each step doubles the algebra with
//! `(a, b)(c, d) = (ac + γ d* b, da + b c*)` and conjugation
//! `(a, b)* = (a*, −b)`. The first γ applies to the first doubling. A pair
//! `(a, b)` is flattened as the coefficients of `a` followed by those of `b`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::Algebra;
use crate::error::{Error, Result};

pub const MAX_CLIFFORD_GENERATORS: usize = 4;
pub const MAX_CAYLEY_DICKSON_STEPS: usize = 3;

/// Blade bitmasks in basis order.
fn blade_order(generators: usize) -> Vec<u32> {
    let mut blades: Vec<u32> = (0..1u32 << generators).collect();
    let indices = |m: u32| -> Vec<u32> { (0..32).filter(|b| m & (1 << b) != 0).collect() };
    blades.sort_by(|&a, &b| {
        a.count_ones()
            .cmp(&b.count_ones())
            .then_with(|| indices(a).cmp(&indices(b)))
    });
    blades
}

// Sign from moving the generators of `b` past those of `a` into increasing order.
fn reorder_sign(a: u32, b: u32) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn blade_label(mask: u32) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut s = String::from("g");
    for b in 0..32 {
        if mask & (1 << b) != 0 {
            s.push_str(&format!("{}", b + 1));
        }
    }
    s
}

/// The Clifford algebra `Cl(p, q)` of dimension `2^(p+q)`.
pub fn clifford(p: usize, q: usize) -> Result<Algebra> {
    let r = p + q;
    if r > MAX_CLIFFORD_GENERATORS {
        return Err(Error::Size(format!(
            "Clifford algebras need p + q <= {MAX_CLIFFORD_GENERATORS}, got {r}"
        )));
    }
    let blades = blade_order(r);
    let n = blades.len();
    let mut position = vec![0usize; n];
    for (idx, &m) in blades.iter().enumerate() {
        position[m as usize] = idx;
    }
    let mut flat = vec![0.0; n * n * n];
    for (i, &a) in blades.iter().enumerate() {
        for (j, &b) in blades.iter().enumerate() {
            let mut sign = reorder_sign(a, b);
            let common = a & b;
            for g in 0..r {
                if common & (1 << g) != 0 && g >= p {
                    sign = -sign;
                }
            }
            let k = position[(a ^ b) as usize];
            flat[(i * n + j) * n + k] = sign;
        }
    }
    let labels = blades.iter().map(|&m| blade_label(m)).collect();
    Ok(Algebra::from_flat(n, flat, Some(labels))?.with_name(format!("Cl({p},{q})")))
}

fn cd_conj(x: &[f64]) -> Vec<f64> {
    if x.len() == 1 {
        return x.to_vec();
    }
    let h = x.len() / 2;
    let mut out = cd_conj(&x[..h]);
    out.extend(x[h..].iter().map(|v| -v));
    out
}

fn cd_mul(gammas: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
    let Some((&gamma, inner)) = gammas.split_last() else {
        return vec![x[0] * y[0]];
    };
    let h = x.len() / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cd_mul(inner, a, c);
    let db = cd_mul(inner, &cd_conj(d), b);
    let da = cd_mul(inner, d, a);
    let bc = cd_mul(inner, b, &cd_conj(c));
    let mut out: Vec<f64> = ac.iter().zip(&db).map(|(u, v)| u + gamma * v).collect();
    out.extend(da.iter().zip(&bc).map(|(u, v)| u + v));
    out
}

/// Repeated Cayley–Dickson doubling of the reals, one step per entry of
/// `gammas` (each ±1).
pub fn cayley_dickson_chain(gammas: &[f64]) -> Result<Algebra> {
    if gammas.len() > MAX_CAYLEY_DICKSON_STEPS {
        return Err(Error::Size(format!(
            "at most {MAX_CAYLEY_DICKSON_STEPS} doubling steps are supported, got {}",
            gammas.len()
        )));
    }
    if let Some(g) = gammas.iter().find(|&&g| g != 1.0 && g != -1.0) {
        return Err(Error::Validation(format!(
            "doubling parameters must be +1 or -1, got {g}"
        )));
    }
    let n = 1usize << gammas.len();
    let mut flat = vec![0.0; n * n * n];
    let mut ei = vec![0.0; n];
    let mut ej = vec![0.0; n];
    for i in 0..n {
        ei.iter_mut().for_each(|v| *v = 0.0);
        ei[i] = 1.0;
        for j in 0..n {
            ej.iter_mut().for_each(|v| *v = 0.0);
            ej[j] = 1.0;
            for (k, v) in cd_mul(gammas, &ei, &ej).into_iter().enumerate() {
                flat[(i * n + j) * n + k] = v;
            }
        }
    }
    let name = format!("CD{gammas:?}");
    Ok(Algebra::from_flat(n, flat, None)?.with_name(name))
}
