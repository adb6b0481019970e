//! Sparse operators and covectors on V^{⊗L}.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::json;

use crate::basis::{MultiIndex, Space};
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::scalar::{max_magnitude, Residual, Scalar, Value};

/// Parity content of an operator with respect to a grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpParity {
    Zero,
    Even,
    Odd,
    Mixed,
}

/// Sparse linear operator on V^{⊗L}, stored row-major.
///
/// Rows and columns are linear indices in the big-endian base-K order of
/// [`Space`]. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOp<S> {
    space: Space,
    rows: Vec<BTreeMap<usize, S>>,
}

impl<S: Scalar> GradedOp<S> {
    pub fn zeros(space: Space) -> Self {
        Self { space, rows: vec![BTreeMap::new(); space.dim()] }
    }

    pub fn identity(space: Space) -> Self {
        Self::diagonal(space, |_| S::one())
    }

    /// Diagonal operator whose entry on |J⟩ is `f(J)` (0-based digits).
    pub fn diagonal(space: Space, f: impl Fn(&[usize]) -> S) -> Self {
        let mut op = Self::zeros(space);
        for i in 0..space.dim() {
            let v = f(&space.digits(i));
            op.add_entry(i, i, v);
        }
        op
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        self.rows[row].get(&col).cloned().unwrap_or_else(S::zero)
    }

    pub fn row(&self, row: usize) -> &BTreeMap<usize, S> {
        &self.rows[row]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn add_entry(&mut self, row: usize, col: usize, value: S) {
        if value.is_zero() {
            return;
        }
        let slot = &mut self.rows[row];
        match slot.get_mut(&col) {
            Some(v) => {
                v.add_assign_ref(&value);
                if v.is_zero() {
                    slot.remove(&col);
                }
            }
            None => {
                slot.insert(col, value);
            }
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zeros(self.space);
        for (r, c, v) in self.entries() {
            out.add_entry(r, c, v.mul_ref(factor));
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        let mut out = Self::zeros(self.space);
        for (r, row) in self.rows.iter().enumerate() {
            let acc = &mut out.rows[r];
            for (k, a) in row {
                for (c, b) in &rhs.rows[*k] {
                    let term = a.mul_ref(b);
                    match acc.get_mut(c) {
                        Some(v) => v.add_assign_ref(&term),
                        None => {
                            acc.insert(*c, term);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
        }
        out
    }

    /// Ordered product of a non-empty list of operators.
    pub fn product<'a>(ops: impl IntoIterator<Item = &'a Self>) -> Option<Self> {
        let mut it = ops.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, op| acc.matmul(op)))
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Residual of [A, B] measured as AB against BA.
    pub fn commutator_residual(&self, rhs: &Self) -> Residual {
        self.matmul(rhs).residual_against(&rhs.matmul(self))
    }

    /// Max-norm of the entries.
    pub fn residual(&self) -> Residual {
        max_magnitude(self.rows.iter().flat_map(|r| r.values()))
    }

    pub fn residual_against(&self, other: &Self) -> Residual {
        let scale = self.residual().max(other.residual());
        (self - other).residual().relative_to(&scale)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn parity(&self, grading: &Grading) -> OpParity {
        let (mut even, mut odd) = (false, false);
        for (r, c, _) in self.entries() {
            let pr = self.space.multi_index(r).parity(grading);
            let pc = self.space.multi_index(c).parity(grading);
            if pr == pc {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (false, false) => OpParity::Zero,
            (true, false) => OpParity::Even,
            (false, true) => OpParity::Odd,
            (true, true) => OpParity::Mixed,
        }
    }

    pub fn is_even(&self, grading: &Grading) -> bool {
        matches!(self.parity(grading), OpParity::Even | OpParity::Zero)
    }

    /// True when every weight subspace is mapped into itself.
    pub fn preserves_weights(&self) -> bool {
        let k = self.space.k;
        self.entries().all(|(r, c, _)| self.space.multi_index(r).weights(k) == self.space.multi_index(c).weights(k))
    }

    /// str A = Σ_J (−1)^{p(J)} A_JJ.
    pub fn supertrace(&self, grading: &Grading) -> S {
        let mut acc = S::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(v) = row.get(&i) {
                if self.space.multi_index(i).parity(grading) == 0 {
                    acc.add_assign_ref(v);
                } else {
                    acc = acc - v.clone();
                }
            }
        }
        acc
    }

    /// Partial supertrace over the first tensor factor (the auxiliary space).
    ///
    /// The term with auxiliary label a carries (−1)^{p(a)} times the Koszul
    /// sign (−1)^{p(a)(p(J)+p(J'))} of moving ⟨e_a| past the block entry. The
    /// latter is trivial on even operators and makes
    /// `str₀(P₀ᵢ M⁽⁰⁾) = M⁽ⁱ⁾` hold for odd M as well.
    pub fn partial_supertrace_aux(&self, grading: &Grading) -> Result<Self> {
        if self.space.factors == 0 || grading.k() != self.space.k {
            return Err(Error::DimensionMismatch(format!(
                "partial supertrace needs an auxiliary factor of dimension {}, operator space is {:?}",
                grading.k(),
                self.space
            )));
        }
        let k = self.space.k;
        let inner = Space::new(k, self.space.factors - 1);
        let block = inner.dim();
        let mut out = Self::zeros(inner);
        for (r, c, v) in self.entries() {
            let (ar, jr) = (r / block, r % block);
            let (ac, jc) = (c / block, c % block);
            if ar != ac {
                continue;
            }
            let pa = grading.p(ar);
            let pj = (inner.multi_index(jr).parity(grading) + inner.multi_index(jc).parity(grading)) % 2;
            let sign = (pa + pa * pj) % 2;
            out.add_entry(jr, jc, if sign == 0 { v.clone() } else { -v.clone() });
        }
        Ok(out)
    }

    /// Dense restriction to the rows/columns in `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Vec<Vec<S>> {
        indices.iter().map(|&r| indices.iter().map(|&c| self.get(r, c)).collect()).collect()
    }

    /// Conjugation by the diagonal Koszul sign D_J = (−1)^{Σ_k (k−1) p(j_k)}.
    ///
    /// Maps the matrix of an element of End(V)^{⊗L} under grading `grading`
    /// to its matrix under the flipped grading with the same matrix-unit
    /// coefficients.
    pub fn koszul_flip(&self, grading: &Grading) -> Self {
        let mut out = Self::zeros(self.space);
        for (r, c, v) in self.entries() {
            let s = koszul_flip_sign(&self.space.digits(r), grading) + koszul_flip_sign(&self.space.digits(c), grading);
            out.add_entry(r, c, if s % 2 == 0 { v.clone() } else { -v.clone() });
        }
        out
    }

    /// Debug JSON: list of `[row, col, num, den]` (exact) or `[row, col, re, im]` (float).
    pub fn to_debug_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .entries()
            .map(|(r, c, v)| {
                let row = self.space.multi_index(r);
                let col = self.space.multi_index(c);
                match v.to_value() {
                    Value::Exact(q) => json!([row, col, q.numer().to_string(), q.denom().to_string()]),
                    Value::Complex(z) => json!([row, col, z.re, z.im]),
                }
            })
            .collect();
        serde_json::Value::Array(items)
    }
}

/// Parity of Σ_k (k−1)·p(j_k) over 0-based positions.
pub fn koszul_flip_sign(digits: &[usize], grading: &Grading) -> u8 {
    digits.iter().enumerate().map(|(pos, &d)| (pos as u8 % 2) * grading.p(d)).sum::<u8>() % 2
}

impl<S: Scalar> Add for &GradedOp<S> {
    type Output = GradedOp<S>;
    fn add(self, rhs: Self) -> GradedOp<S> {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        let mut out = self.clone();
        for (r, c, v) in rhs.entries() {
            out.add_entry(r, c, v.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &GradedOp<S> {
    type Output = GradedOp<S>;
    fn sub(self, rhs: Self) -> GradedOp<S> {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        let mut out = self.clone();
        for (r, c, v) in rhs.entries() {
            out.add_entry(r, c, -v.clone());
        }
        out
    }
}

impl<S: Scalar> Mul for &GradedOp<S> {
    type Output = GradedOp<S>;
    fn mul(self, rhs: Self) -> GradedOp<S> {
        self.matmul(rhs)
    }
}

impl<S: Scalar> Neg for &GradedOp<S> {
    type Output = GradedOp<S>;
    fn neg(self) -> GradedOp<S> {
        self.scale(&-S::one())
    }
}

/// Sparse linear functional ⟨Ω| = Σ_J Ω_J ⟨J|.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<S> {
    space: Space,
    coeffs: BTreeMap<usize, S>,
}

impl<S: Scalar> Covector<S> {
    pub fn zeros(space: Space) -> Self {
        Self { space, coeffs: BTreeMap::new() }
    }

    pub fn from_entries(space: Space, entries: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut out = Self::zeros(space);
        for (j, v) in entries {
            out.add_coeff(space.index(&j.0), v);
        }
        out
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn add_coeff(&mut self, index: usize, value: S) {
        if value.is_zero() {
            return;
        }
        let v = self.coeffs.entry(index).or_insert_with(S::zero);
        v.add_assign_ref(&value);
        if v.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn get(&self, j: &MultiIndex) -> S {
        self.coeffs.get(&self.space.index(&j.0)).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (MultiIndex, &S)> {
        self.coeffs.iter().map(|(i, v)| (self.space.multi_index(*i), v))
    }

    pub fn raw(&self) -> &BTreeMap<usize, S> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ⟨Ω|A, as a covector.
    pub fn apply(&self, op: &GradedOp<S>) -> Self {
        assert_eq!(self.space, op.space(), "covector and operator spaces differ");
        let mut acc: BTreeMap<usize, S> = BTreeMap::new();
        for (r, w) in &self.coeffs {
            for (c, a) in op.row(*r) {
                let term = w.mul_ref(a);
                match acc.get_mut(c) {
                    Some(v) => v.add_assign_ref(&term),
                    None => {
                        acc.insert(*c, term);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Self { space: self.space, coeffs: acc }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zeros(self.space);
        for (i, v) in &self.coeffs {
            out.add_coeff(*i, v.mul_ref(factor));
        }
        out
    }

    pub fn residual(&self) -> Residual {
        max_magnitude(self.coeffs.values())
    }

    pub fn residual_against(&self, other: &Self) -> Residual {
        let scale = self.residual().max(other.residual());
        (self - other).residual().relative_to(&scale)
    }

    /// The weight of the support, when it lies in a single weight subspace.
    pub fn weights(&self) -> Option<Vec<usize>> {
        let k = self.space.k;
        let mut it = self.coeffs.keys().map(|i| self.space.multi_index(*i).weights(k));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Koszul-signed grading flip, normalised so the minimal multi-index keeps its sign.
    ///
    /// Multiplies Ω_J by (−1)^{#inversions of J with exactly one fermionic letter}.
    /// That count is the same for `grading` and its flip.
    pub fn koszul_flip(&self, grading: &Grading) -> Self {
        let mut out = Self::zeros(self.space);
        for (i, v) in &self.coeffs {
            let j = self.space.multi_index(*i);
            let s = mixed_inversions(&j, grading) % 2;
            out.add_coeff(*i, if s == 0 { v.clone() } else { -v.clone() });
        }
        out
    }

    /// Debug JSON: list of `[multiindex, num, den]` (exact) or `[multiindex, re, im]`.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .coeffs()
            .map(|(j, v)| match v.to_value() {
                Value::Exact(q) => json!([j, q.numer().to_string(), q.denom().to_string()]),
                Value::Complex(z) => json!([j, z.re, z.im]),
            })
            .collect();
        serde_json::Value::Array(items)
    }
}

fn mixed_inversions(j: &MultiIndex, grading: &Grading) -> usize {
    let d = &j.0;
    let mut count = 0;
    for a in 0..d.len() {
        for b in a + 1..d.len() {
            if d[a] > d[b] && grading.p(d[a]) != grading.p(d[b]) {
                count += 1;
            }
        }
    }
    count
}

impl<S: Scalar> Sub for &Covector<S> {
    type Output = Covector<S>;
    fn sub(self, rhs: Self) -> Covector<S> {
        assert_eq!(self.space, rhs.space, "covector spaces differ");
        let mut out = self.clone();
        for (i, v) in &rhs.coeffs {
            out.add_coeff(*i, -v.clone());
        }
        out
    }
}

impl<S: Scalar> Add for &Covector<S> {
    type Output = Covector<S>;
    fn add(self, rhs: Self) -> Covector<S> {
        assert_eq!(self.space, rhs.space, "covector spaces differ");
        let mut out = self.clone();
        for (i, v) in &rhs.coeffs {
            out.add_coeff(*i, v.clone());
        }
        out
    }
}
