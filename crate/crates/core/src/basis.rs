//! Basis multi-indices of V^{⊗L} and their big-endian base-K linear order.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grading::Grading;

/// Tensor power V^{⊗factors} with dim V = k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Space {
    pub k: usize,
    pub factors: usize,
}

impl Space {
    pub fn new(k: usize, factors: usize) -> Self {
        Self { k, factors }
    }

    pub fn dim(&self) -> usize {
        self.k.pow(self.factors as u32)
    }

    /// 0-based digits of a linear index, most significant factor first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors];
        for slot in out.iter_mut().rev() {
            *slot = index % self.k;
            index /= self.k;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.k + d)
    }

    pub fn multi_index(&self, index: usize) -> MultiIndex {
        MultiIndex(self.digits(index))
    }
}

/// An ordered tuple (j₁,…,jₙ) of basis labels, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    /// From 1-based letters, as written in formulas.
    pub fn from_letters(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| if l == 0 { Err(Error::IndexOutOfRange { index: 0, max: usize::MAX }) } else { Ok(l - 1) })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn letters(&self) -> Vec<usize> {
        self.0.iter().map(|d| d + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter counts (M₁,…,M_K).
    pub fn weights(&self, k: usize) -> Vec<usize> {
        let mut m = vec![0; k];
        for &d in &self.0 {
            m[d] += 1;
        }
        m
    }

    /// p(J) = Σ p(j_k) mod 2.
    pub fn parity(&self, grading: &Grading) -> u8 {
        self.0.iter().map(|&d| grading.p(d)).sum::<u8>() % 2
    }

    pub fn linear(&self, k: usize) -> usize {
        Space::new(k, self.len()).index(&self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.letters().iter().map(|l| l.to_string()).collect();
        write!(f, "({})", body.join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters().serialize(s)
    }
}

pub fn check_weights(k: usize, weights: &[usize], n: usize) -> Result<()> {
    if weights.len() != k {
        return Err(Error::WeightCount { expected: k, got: weights.len() });
    }
    let sum: usize = weights.iter().sum();
    if sum != n {
        return Err(Error::WeightSum { sum, n });
    }
    Ok(())
}

/// All multi-indices with letter counts `weights`, in lexicographic order.
///
/// The first element is the minimal one, j₁ ≤ … ≤ jₙ.
pub fn weight_basis(k: usize, weights: &[usize], n: usize) -> Result<Vec<MultiIndex>> {
    check_weights(k, weights, n)?;
    let mut out = Vec::new();
    let mut remaining = weights.to_vec();
    let mut current = Vec::with_capacity(n);
    fill(&mut remaining, &mut current, n, &mut out);
    Ok(out)
}

fn fill(remaining: &mut [usize], current: &mut Vec<usize>, n: usize, out: &mut Vec<MultiIndex>) {
    if current.len() == n {
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in 0..remaining.len() {
        if remaining[a] > 0 {
            remaining[a] -= 1;
            current.push(a);
            fill(remaining, current, n, out);
            current.pop();
            remaining[a] += 1;
        }
    }
}

/// Every weight vector (M₁,…,M_K) with Σ M_a = n, lexicographically descending in M₁.
pub fn all_weights(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for m in (0..=left).rev() {
            cur.push(m);
            rec(k, left - m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Linear indices of a weight subspace inside V^{⊗n}, ascending.
pub fn block_indices(k: usize, weights: &[usize], n: usize) -> Result<Vec<usize>> {
    Ok(weight_basis(k, weights, n)?.iter().map(|j| j.linear(k)).collect())
}
