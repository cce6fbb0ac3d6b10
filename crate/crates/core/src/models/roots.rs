//! Root-set combinatorics for type A_{n−1}.

use serde::Serialize;

use crate::error::{Error, Result};

/// The root e_i − e_j (1-based, i ≠ j).
pub type Root = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSetReport {
    pub n: usize,
    pub phi: Root,
    pub e_phi: Vec<Root>,
    pub ebar_phi: Vec<Root>,
}

fn vector(n: usize, r: Root) -> Vec<i32> {
    let mut v = vec![0; n];
    v[r.0 - 1] += 1;
    v[r.1 - 1] -= 1;
    v
}

/// All roots of A_{n−1}, as vectors in Z^n.
pub fn all_roots(n: usize) -> Vec<Root> {
    let mut out = Vec::with_capacity(n * (n - 1));
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

fn is_root(n: usize, v: &[i32]) -> bool {
    all_roots(n).iter().any(|&r| vector(n, r) == v)
}

/// E_φ = {ψ : ψ+φ ∉ Φ, φ−ψ ∈ Φ}, Ē_φ = {ψ : ψ+φ ∉ Φ, φ−ψ ∉ Φ}, ψ ≠ ±φ.
pub fn roots_classify(n: usize, phi: Root) -> Result<RootSetReport> {
    if n < 3 {
        return Err(Error::NotARoot(format!("need n ≥ 3, got {n}")));
    }
    if phi.0 == phi.1 || !(1..=n).contains(&phi.0) || !(1..=n).contains(&phi.1) {
        return Err(Error::NotARoot(format!("e{}-e{}", phi.0, phi.1)));
    }
    let pv = vector(n, phi);
    let neg = (phi.1, phi.0);
    let mut e_phi = Vec::new();
    let mut ebar_phi = Vec::new();
    for psi in all_roots(n) {
        if psi == phi || psi == neg {
            continue;
        }
        let sv = vector(n, psi);
        let sum: Vec<i32> = pv.iter().zip(&sv).map(|(a, b)| a + b).collect();
        let diff: Vec<i32> = pv.iter().zip(&sv).map(|(a, b)| a - b).collect();
        if is_root(n, &sum) {
            continue;
        }
        if is_root(n, &diff) {
            e_phi.push(psi);
        } else {
            ebar_phi.push(psi);
        }
    }
    Ok(RootSetReport {
        n,
        phi,
        e_phi,
        ebar_phi,
    })
}
