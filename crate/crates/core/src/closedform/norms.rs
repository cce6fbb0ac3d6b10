//! L², Sobolev and directional norms of TermSums.

use super::eval::Evaluator;
use super::jet::C64;
use super::quad::{gate, integrate_squares, Domain, QuadSpec};
use super::termsum::{apply_operator, TermSum};
use crate::error::Result;
use crate::models::{generators, ModelSpec};
use crate::weyl::OperatorPoly;

fn coarse_fine(sums: &[&TermSum], dom: &Domain, nu: C64, quad: &QuadSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let ev = Evaluator::new(sums, nu)?;
    let coarse = integrate_squares(&ev, dom, nu, quad, 1)?;
    let fine = integrate_squares(&ev, dom, nu, quad, 2)?;
    Ok((coarse, fine))
}

/// Gated L² norms of several functions evaluated in one pass.
pub fn l2_norms(sums: &[&TermSum], dom: &Domain, nu: C64, quad: &QuadSpec) -> Result<Vec<f64>> {
    let (c, f) = coarse_fine(sums, dom, nu, quad)?;
    c.iter().zip(&f).map(|(a, b)| gate(*a, *b, quad.rel_tol)).collect()
}

pub fn l2_norm(f: &TermSum, dom: &Domain, nu: C64, quad: &QuadSpec) -> Result<f64> {
    Ok(l2_norms(&[f], dom, nu, quad)?[0])
}

/// Gated (Σ_k w_k ‖F_k‖²)^{1/2}.
pub fn weighted_norm(sums: &[&TermSum], weights: &[f64], dom: &Domain, nu: C64, quad: &QuadSpec) -> Result<f64> {
    let (c, f) = coarse_fine(sums, dom, nu, quad)?;
    let tc: f64 = c.iter().zip(weights).map(|(a, w)| a * w).sum();
    let tf: f64 = f.iter().zip(weights).map(|(a, w)| a * w).sum();
    gate(tc, tf, quad.rel_tol)
}

/// All words Z_{j1}…Z_{jm} f with m ≤ s over the model's generators, f first.
pub fn word_images(f: &TermSum, model: &ModelSpec, s: usize) -> Result<Vec<TermSum>> {
    let gens: Vec<OperatorPoly> = generators(model)?.into_iter().map(|(_, op)| op).collect();
    let mut out = vec![f.clone()];
    let mut layer = vec![f.clone()];
    for _ in 0..s {
        let mut next = Vec::with_capacity(layer.len() * gens.len());
        for g in &layer {
            for z in &gens {
                next.push(apply_operator(z, g)?);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// (‖f‖² + Σ_{m≤s} Σ_words ‖Z_{j1}…Z_{jm} f‖²)^{1/2}.
pub fn sobolev_norm(f: &TermSum, model: &ModelSpec, s: usize, nu: C64, quad: &QuadSpec, dom: &Domain) -> Result<f64> {
    let words = word_images(f, model, s)?;
    let refs: Vec<&TermSum> = words.iter().collect();
    weighted_norm(&refs, &vec![1.0; refs.len()], dom, nu, quad)
}

/// (Σ_k C(s,k) ‖u^k f‖²)^{1/2}.
pub fn directional_norm(
    f: &TermSum,
    u: &OperatorPoly,
    s: usize,
    nu: C64,
    quad: &QuadSpec,
    dom: &Domain,
) -> Result<f64> {
    let mut powers = vec![f.clone()];
    for k in 1..=s {
        powers.push(apply_operator(u, &powers[k - 1])?);
    }
    let weights: Vec<f64> = (0..=s).map(|k| binomial(s, k)).collect();
    let refs: Vec<&TermSum> = powers.iter().collect();
    weighted_norm(&refs, &weights, dom, nu, quad)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
