//! Local operators written as sums of matrix-unit monomials, and their
//! Koszul-signed embeddings into V^{⊗L}.
//!
//! A monomial e_{a₁b₁}⊗…⊗e_{a_m b_m} placed at sites (s₁,…,s_m) is the
//! ordered product E_{s₁}(e_{a₁b₁})⋯E_{s_m}(e_{a_m b_m}) of single-site
//! embeddings. A single-site e_ab at site s acts on e_{j₁}⊗…⊗e_{j_L} as
//! (−1)^{p(e_ab)(p(j₁)+…+p(j_{s−1}))} δ_{b,j_s}, replacing j_s by a.

use std::collections::BTreeMap;

use crate::basis::Space;
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::op::{GradedOp, OpParity};
use crate::scalar::Scalar;

/// Matrix-unit labels (a, b), 0-based, one pair per tensor factor.
pub type Units = Vec<(usize, usize)>;

/// Operator on V^{⊗m} as Σ c · e_{a₁b₁}⊗…⊗e_{a_m b_m}.
///
/// Each monomial has definite parity Σ p(a_k)+p(b_k), so the decomposition is
/// always homogeneous termwise. The coefficients do not depend on the grading.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp<S> {
    k: usize,
    arity: usize,
    terms: BTreeMap<Units, S>,
}

impl<S: Scalar> LocalOp<S> {
    pub fn zero(k: usize, arity: usize) -> Self {
        Self { k, arity, terms: BTreeMap::new() }
    }

    pub fn identity(k: usize, arity: usize) -> Self {
        let mut op = Self::zero(k, arity);
        let diag = Space::new(k, arity);
        for i in 0..diag.dim() {
            let units = diag.digits(i).into_iter().map(|a| (a, a)).collect();
            op.add_term(S::one(), units);
        }
        op
    }

    /// Graded permutation P = Σ_{a,b} (−1)^{p(b)} e_ab ⊗ e_ba.
    pub fn permutation(grading: &Grading) -> Self {
        let k = grading.k();
        let mut op = Self::zero(k, 2);
        for a in 0..k {
            for b in 0..k {
                op.add_term(S::sign_power(grading.p(b)), vec![(a, b), (b, a)]);
            }
        }
        op
    }

    /// Single-factor diagonal operator diag(d₁,…,d_K).
    pub fn diag(values: &[S]) -> Self {
        let mut op = Self::zero(values.len(), 1);
        for (a, v) in values.iter().enumerate() {
            op.add_term(v.clone(), vec![(a, a)]);
        }
        op
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn add_term(&mut self, coeff: S, units: Units) {
        assert_eq!(units.len(), self.arity, "monomial arity mismatch");
        assert!(units.iter().all(|&(a, b)| a < self.k && b < self.k), "label out of range");
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(units).or_insert_with(S::zero);
        slot.add_assign_ref(&coeff);
        if slot.is_zero() {
            // BTreeMap::entry cannot remove in place; the key is re-derived below
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coefficient(&self, units: &[(usize, usize)]) -> S {
        self.terms.get(units).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Units, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.k, self.arity);
        for (u, c) in &self.terms {
            out.add_term(c.mul_ref(factor), u.clone());
        }
        out
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        assert_eq!((self.k, self.arity), (rhs.k, rhs.arity));
        let mut out = self.clone();
        for (u, c) in &rhs.terms {
            out.add_term(c.clone(), u.clone());
        }
        out
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.scale(&-S::one()))
    }

    /// Largest coefficient magnitude of `self − rhs`, monomial by monomial.
    pub fn residual_against(&self, rhs: &Self) -> crate::scalar::Residual {
        let diff = self.minus(rhs);
        crate::scalar::max_magnitude(diff.terms.values())
    }

    /// Embeds the operator at 0-based factor positions `sites` of `space`.
    pub fn embed(&self, sites: &[usize], space: Space, grading: &Grading) -> Result<GradedOp<S>> {
        check_sites(sites, self.arity, space)?;
        if grading.k() != self.k || space.k != self.k {
            return Err(Error::DimensionMismatch(format!(
                "local operator on K={} embedded with grading K={} into space K={}",
                self.k,
                grading.k(),
                space.k
            )));
        }
        let mut out = GradedOp::zeros(space);
        let dim = space.dim();
        for (units, coeff) in &self.terms {
            for col in 0..dim {
                if let Some((row, sign)) = act_monomial(units, sites, &space.digits(col), grading) {
                    let v = if sign == 0 { coeff.clone() } else { -coeff.clone() };
                    out.add_entry(space.index(&row), col, v);
                }
            }
        }
        Ok(out)
    }
}

fn check_sites(sites: &[usize], arity: usize, space: Space) -> Result<()> {
    if sites.len() != arity {
        return Err(Error::DimensionMismatch(format!("{arity}-site operator given {} sites", sites.len())));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s >= space.factors {
            return Err(Error::IndexOutOfRange { index: s, max: space.factors.saturating_sub(1) });
        }
        if sites[..i].contains(&s) {
            return Err(Error::SiteCollision(s));
        }
    }
    Ok(())
}

#[inline]
fn prefix_parity(digits: &[usize], site: usize, grading: &Grading) -> u8 {
    digits[..site].iter().map(|&d| grading.p(d)).sum::<u8>() % 2
}

/// Action of one monomial on a basis vector: new digits and sign parity.
fn act_monomial(
    units: &[(usize, usize)],
    sites: &[usize],
    digits: &[usize],
    grading: &Grading,
) -> Option<(Vec<usize>, u8)> {
    let mut d = digits.to_vec();
    let mut sign = 0u8;
    for (&(a, b), &s) in units.iter().zip(sites).rev() {
        if d[s] != b {
            return None;
        }
        sign ^= grading.unit_parity(a, b) & prefix_parity(&d, s, grading);
        d[s] = a;
    }
    Some((d, sign))
}

/// Embeds a single-factor operator `op` (space with one factor) at `site`.
///
/// Linear in `op`; each entry carries the Koszul sign of its matrix unit.
pub fn embed_single<S: Scalar>(op: &GradedOp<S>, site: usize, space: Space, grading: &Grading) -> Result<GradedOp<S>> {
    if op.space().factors != 1 || op.space().k != space.k {
        return Err(Error::DimensionMismatch("expected a single-factor operator".into()));
    }
    check_sites(&[site], 1, space)?;
    let mut out = GradedOp::zeros(space);
    for col in 0..space.dim() {
        let d = space.digits(col);
        let b = d[site];
        let pre = prefix_parity(&d, site, grading);
        for a in 0..space.k {
            let v = op.get(a, b);
            if v.is_zero() {
                continue;
            }
            let mut nd = d.clone();
            nd[site] = a;
            let v = if grading.unit_parity(a, b) & pre == 1 { -v } else { v };
            out.add_entry(space.index(&nd), col, v);
        }
    }
    Ok(out)
}

/// Embeds A₁⊗…⊗A_m with A_t at `factors[t].0`, as the left-to-right product
/// of single-site embeddings. Every A_t must be homogeneous.
pub fn embed_factors<S: Scalar>(
    factors: &[(usize, &GradedOp<S>)],
    space: Space,
    grading: &Grading,
) -> Result<GradedOp<S>> {
    let sites: Vec<usize> = factors.iter().map(|f| f.0).collect();
    check_sites(&sites, sites.len(), space)?;
    let mut acc = GradedOp::identity(space);
    for (site, op) in factors {
        if op.parity(grading) == OpParity::Mixed {
            return Err(Error::NonHomogeneous);
        }
        acc = acc.matmul(&embed_single(op, *site, space, grading)?);
    }
    Ok(acc)
}

/// Single-factor operator from its nonzero entries (0-based labels).
pub fn single_op<S: Scalar>(k: usize, entries: &[(usize, usize, S)]) -> GradedOp<S> {
    let mut op = GradedOp::zeros(Space::new(k, 1));
    for (a, b, v) in entries {
        op.add_entry(*a, *b, v.clone());
    }
    op
}

/// Splits a single-factor operator into its even and odd parts.
pub fn homogeneous_parts<S: Scalar>(op: &GradedOp<S>, grading: &Grading) -> (GradedOp<S>, GradedOp<S>) {
    let mut even = GradedOp::zeros(op.space());
    let mut odd = GradedOp::zeros(op.space());
    for (a, b, v) in op.entries() {
        if grading.unit_parity(a, b) == 0 {
            even.add_entry(a, b, v.clone());
        } else {
            odd.add_entry(a, b, v.clone());
        }
    }
    (even, odd)
}

fn chain_site(site: usize, n: usize) -> Result<usize> {
    if site == 0 || site > n {
        return Err(Error::IndexOutOfRange { index: site, max: n });
    }
    Ok(site - 1)
}

/// Graded permutation P_ij on V^{⊗n}; sites 1-based.
pub fn permutation_op<S: Scalar>(i: usize, j: usize, n: usize, grading: &Grading) -> Result<GradedOp<S>> {
    if i == j {
        return Err(Error::SameSite(i));
    }
    let (si, sj) = (chain_site(i, n)?, chain_site(j, n)?);
    LocalOp::permutation(grading).embed(&[si, sj], Space::new(grading.k(), n), grading)
}

/// M_a = Σ_l e_aa^{(l)}; `a` is 1-based.
pub fn weight_operator<S: Scalar>(a: usize, n: usize, grading: &Grading) -> Result<GradedOp<S>> {
    let k = grading.k();
    if a == 0 || a > k {
        return Err(Error::IndexOutOfRange { index: a, max: k });
    }
    Ok(GradedOp::diagonal(Space::new(k, n), |d| S::from_int(d.iter().filter(|&&x| x == a - 1).count() as i64)))
}

/// Diagonal twist g acting on factor `factor` (0-based) of `space`.
pub fn twist_at<S: Scalar>(g: &[S], factor: usize, space: Space) -> GradedOp<S> {
    GradedOp::diagonal(space, |d| g[d[factor]].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::MultiIndex;
    use crate::scalar::{rat, Rational};

    fn g01() -> Grading {
        Grading::new(2, &[1]).unwrap()
    }

    #[test]
    fn e12_at_second_site_picks_up_sign() {
        // hand oracle: e_12 is odd, prefix e_2 is odd, so e2⊗e2 -> -e2⊗e1
        let g = g01();
        let sp = Space::new(2, 2);
        let e12 = single_op(2, &[(0, 1, rat(1, 1))]);
        let op = embed_single(&e12, 1, sp, &g).unwrap();
        let col = sp.index(&[1, 1]);
        let row = sp.index(&[1, 0]);
        assert_eq!(op.get(row, col), rat(-1, 1));
        assert_eq!(op.nnz(), 2);
        // e1⊗e2 -> +e1⊗e1
        assert_eq!(op.get(sp.index(&[0, 0]), sp.index(&[0, 1])), rat(1, 1));
    }

    #[test]
    fn identity_embeds_to_identity() {
        let g = g01();
        let sp = Space::new(2, 3);
        let id1 = GradedOp::<Rational>::identity(Space::new(2, 1));
        for s in 0..3 {
            assert_eq!(embed_single(&id1, s, sp, &g).unwrap(), GradedOp::identity(sp));
        }
        let id2 = LocalOp::<Rational>::identity(2, 2);
        assert_eq!(id2.embed(&[2, 0], sp, &g).unwrap(), GradedOp::identity(sp));
    }

    #[test]
    fn koszul_product_rule_sign() {
        // (A⊗B)(C⊗D) = (−1)^{p(B)p(C)} AC⊗BD with A=C=e12, B=D=e21
        let g = g01();
        let sp = Space::new(2, 2);
        let e12 = single_op(2, &[(0, 1, rat(1, 1))]);
        let e21 = single_op(2, &[(1, 0, rat(1, 1))]);
        let ab = embed_factors(&[(0, &e12), (1, &e21)], sp, &g).unwrap();
        let lhs = ab.matmul(&ab);
        let ac = e12.matmul(&e12);
        let bd = e21.matmul(&e21);
        let rhs = embed_factors(&[(0, &ac), (1, &bd)], sp, &g).unwrap().scale(&rat(-1, 1));
        assert_eq!(lhs, rhs);
        // both products vanish here, so also check a case with nonzero AC and BD
        let e11 = single_op(2, &[(0, 0, rat(1, 1))]);
        let x = embed_factors(&[(0, &e12), (1, &e21)], sp, &g).unwrap();
        let y = embed_factors(&[(0, &e21), (1, &e12)], sp, &g).unwrap();
        let lhs = x.matmul(&y);
        let e22 = single_op(2, &[(1, 1, rat(1, 1))]);
        let rhs = embed_factors(&[(0, &e11), (1, &e22)], sp, &g).unwrap().scale(&rat(-1, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn permutation_examples() {
        let g = g01();
        let sp = Space::new(2, 2);
        let p = permutation_op::<Rational>(1, 2, 2, &g).unwrap();
        // P e1⊗e2 = e2⊗e1
        assert_eq!(p.get(sp.index(&[1, 0]), sp.index(&[0, 1])), rat(1, 1));
        // P e2⊗e2 = −e2⊗e2
        assert_eq!(p.get(sp.index(&[1, 1]), sp.index(&[1, 1])), rat(-1, 1));
        assert!(matches!(permutation_op::<Rational>(2, 2, 2, &g), Err(Error::SameSite(2))));
    }

    #[test]
    fn permutation_squares_to_identity() {
        for k in 1..=3 {
            for g in Grading::all(k).unwrap() {
                let p = permutation_op::<Rational>(1, 2, 2, &g).unwrap();
                assert_eq!(p.matmul(&p), GradedOp::identity(Space::new(k, 2)), "{g}");
                assert_eq!(p, permutation_op(2, 1, 2, &g).unwrap());
            }
        }
    }

    #[test]
    fn graded_swap_rule() {
        // P x⊗y = (−1)^{p(x)p(y)} y⊗x on basis vectors, every K ≤ 3 grading
        for k in 1..=3 {
            for g in Grading::all(k).unwrap() {
                let sp = Space::new(k, 2);
                let p = permutation_op::<Rational>(1, 2, 2, &g).unwrap();
                for a in 0..k {
                    for b in 0..k {
                        let sign = if g.p(a) * g.p(b) == 1 { -1 } else { 1 };
                        assert_eq!(p.get(sp.index(&[b, a]), sp.index(&[a, b])), rat(sign, 1));
                    }
                }
            }
        }
    }

    #[test]
    fn weight_operator_counts() {
        let g = g01();
        let m1 = weight_operator::<Rational>(1, 3, &g).unwrap();
        let j = MultiIndex::from_letters(&[1, 1, 2]).unwrap();
        let i = j.linear(2);
        assert_eq!(m1.get(i, i), rat(2, 1));
        let m2 = weight_operator::<Rational>(2, 3, &g).unwrap();
        assert_eq!(&m1 + &m2, GradedOp::identity(Space::new(2, 3)).scale(&rat(3, 1)));
        assert!(weight_operator::<Rational>(3, 3, &g).is_err());
    }

    #[test]
    fn rejects_mixed_and_collisions() {
        let g = g01();
        let sp = Space::new(2, 2);
        let mixed = single_op(2, &[(0, 0, rat(1, 1)), (0, 1, rat(1, 1))]);
        let e11 = single_op(2, &[(0, 0, rat(1, 1))]);
        assert_eq!(embed_factors(&[(0, &mixed), (1, &e11)], sp, &g), Err(Error::NonHomogeneous));
        assert_eq!(embed_factors(&[(1, &e11), (1, &e11)], sp, &g), Err(Error::SiteCollision(1)));
        let p = LocalOp::<Rational>::permutation(&g);
        assert_eq!(p.embed(&[0, 0], sp, &g), Err(Error::SiteCollision(0)));
    }
}
