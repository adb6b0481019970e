//! The special covectors Ω (symmetric), Ω₋ (antisymmetric), Ω_q and Ω_{q−}.

use std::fmt;

use crate::basis::{check_weights, weight_basis, MultiIndex, Space};
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::linalg::nullity;
use crate::local::LocalOp;
use crate::op::{Covector, GradedOp};
use crate::report::CheckReport;
use crate::rmatrix::{build_r, g_correction, q_permutation, RFamily};
use crate::scalar::{Residual, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaKind<S> {
    /// ⟨Ω|P_ij = ⟨Ω|.
    SymPlus,
    /// ⟨Ω|P_ij = −⟨Ω|.
    SymMinus,
    /// ⟨Ω|P^q_{i,i−1} = ⟨Ω|.
    QPlus(S),
    /// ⟨Ω|P^q_{i,i−1} = −⟨Ω|.
    QMinus(S),
}

impl<S: Scalar> OmegaKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            OmegaKind::SymPlus => "sym-plus",
            OmegaKind::SymMinus => "sym-minus",
            OmegaKind::QPlus(_) => "q-plus",
            OmegaKind::QMinus(_) => "q-minus",
        }
    }

    /// True for the kinds with eigenvalue +1 under their permutation.
    pub fn is_plus(&self) -> bool {
        matches!(self, OmegaKind::SymPlus | OmegaKind::QPlus(_))
    }

    pub fn q(&self) -> Option<&S> {
        match self {
            OmegaKind::QPlus(q) | OmegaKind::QMinus(q) => Some(q),
            _ => None,
        }
    }

    /// The covector kind whose relations make R_{i,i−1}(x) act as ±P_{i,i−1}.
    ///
    /// TrigMinus at coupling q pairs with the q⁻¹-antisymmetric vector: its
    /// off-diagonal part is that of TrigPlus at q⁻¹ over the flipped grading.
    pub fn for_family(family: RFamily, coupling: &S) -> Result<Self> {
        Ok(match family {
            RFamily::RationalPlus => OmegaKind::SymPlus,
            RFamily::RationalMinus => OmegaKind::SymMinus,
            RFamily::TrigPlus => OmegaKind::QPlus(coupling.clone()),
            RFamily::TrigMinus => OmegaKind::QMinus(coupling.checked_inv()?),
        })
    }
}

impl<S: Scalar> fmt::Display for OmegaKind<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q() {
            Some(q) => write!(f, "{}(q={})", self.name(), q.to_value()),
            None => f.write_str(self.name()),
        }
    }
}

/// ℓ(J) = #{(k,l): k<l, j_k > j_l}.
pub fn inversion_count(j: &MultiIndex) -> usize {
    let d = &j.0;
    (0..d.len()).map(|a| d[a + 1..].iter().filter(|&&b| d[a] > b).count()).sum()
}

fn inversions_where(j: &MultiIndex, keep: impl Fn(usize, usize) -> bool) -> usize {
    let d = &j.0;
    let mut count = 0;
    for a in 0..d.len() {
        for b in a + 1..d.len() {
            if d[a] > d[b] && keep(d[a], d[b]) {
                count += 1;
            }
        }
    }
    count
}

/// Checks that the weight admits the kind: no repeated fermion for the
/// plus kinds, no repeated boson for the minus kinds.
pub fn check_admissible<S: Scalar>(kind: &OmegaKind<S>, grading: &Grading, weights: &[usize], n: usize) -> Result<()> {
    check_weights(grading.k(), weights, n)?;
    let forbidden_parity = if kind.is_plus() { 1 } else { 0 };
    for (a, &m) in weights.iter().enumerate() {
        if m > 1 && grading.p(a) == forbidden_parity {
            let what = if forbidden_parity == 1 { "fermion" } else { "boson" };
            return Err(Error::NoInvariantVector(format!(
                "{} needs no repeated {what}, but label {} appears {m} times under {grading}",
                kind.name(),
                a + 1
            )));
        }
    }
    Ok(())
}

pub fn is_admissible<S: Scalar>(kind: &OmegaKind<S>, grading: &Grading, weights: &[usize], n: usize) -> bool {
    check_admissible(kind, grading, weights, n).is_ok()
}

/// Builds the covector on the weight subspace, normalised to 1 on the
/// minimal multi-index.
///
/// SymPlus: (−1)^{#inversions between two fermions}. SymMinus:
/// (−1)^{#inversions not between two fermions}. QPlus: q^{ℓ(J)} times the
/// SymPlus sign. QMinus: QPlus over the flipped grading, carried back by the
/// Koszul flip.
pub fn build_omega<S: Scalar>(
    kind: &OmegaKind<S>,
    grading: &Grading,
    weights: &[usize],
    n: usize,
) -> Result<Covector<S>> {
    check_admissible(kind, grading, weights, n)?;
    if let OmegaKind::QMinus(q) = kind {
        let flipped = grading.flipped();
        let plus = build_omega(&OmegaKind::QPlus(q.clone()), &flipped, weights, n)?;
        return Ok(plus.koszul_flip(&flipped));
    }
    let space = Space::new(grading.k(), n);
    let basis = weight_basis(grading.k(), weights, n)?;
    let entries = basis.into_iter().map(|j| {
        let both_f = inversions_where(&j, |a, b| grading.is_fermion(a) && grading.is_fermion(b));
        let c = match kind {
            OmegaKind::SymPlus => S::sign_power((both_f % 2) as u8),
            OmegaKind::SymMinus => S::sign_power(((inversion_count(&j) - both_f) % 2) as u8),
            OmegaKind::QPlus(q) => q.powi(inversion_count(&j) as i64).mul_ref(&S::sign_power((both_f % 2) as u8)),
            OmegaKind::QMinus(_) => unreachable!(),
        };
        (j, c)
    });
    Ok(Covector::from_entries(space, entries))
}

fn adjacent<S: Scalar>(op: &LocalOp<S>, i: usize, n: usize, grading: &Grading) -> Result<GradedOp<S>> {
    // first factor at site i, second at site i−1 (1-based i ≥ 2)
    op.embed(&[i - 1, i - 2], Space::new(grading.k(), n), grading)
}

/// The relations that define the kind, as (name, operator, eigenvalue ±1).
fn defining_relations<S: Scalar>(
    kind: &OmegaKind<S>,
    grading: &Grading,
    n: usize,
) -> Result<Vec<(String, GradedOp<S>, S)>> {
    let sign = if kind.is_plus() { S::one() } else { -S::one() };
    let mut out = Vec::new();
    match kind.q() {
        None => {
            for i in 1..=n {
                for j in i + 1..=n {
                    let p = crate::local::permutation_op(i, j, n, grading)?;
                    out.push((format!("P_{i}{j}"), p, sign.clone()));
                }
            }
        }
        Some(q) => {
            let pq = q_permutation(grading, q)?;
            for i in 2..=n {
                out.push((format!("Pq_{i},{}", i - 1), adjacent(&pq, i, n, grading)?, sign.clone()));
            }
        }
    }
    Ok(out)
}

/// Dimension of the space of covectors on the weight subspace that satisfy
/// the defining relations of `kind`.
pub fn solution_dimension<S: Scalar>(
    kind: &OmegaKind<S>,
    grading: &Grading,
    weights: &[usize],
    n: usize,
) -> Result<usize> {
    let idx = crate::basis::block_indices(grading.k(), weights, n)?;
    let pos: std::collections::HashMap<usize, usize> = idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut rows = Vec::new();
    for (_, op, sign) in defining_relations(kind, grading, n)? {
        // Σ_r Ω_r (X_rc − σ δ_rc) = 0 for each column c of the block
        for &c in &idx {
            let mut row = vec![S::zero(); idx.len()];
            for &r in &idx {
                let mut v = op.get(r, c);
                if r == c {
                    v = v.sub_ref(&sign);
                }
                row[pos[&r]] = v;
            }
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
    }
    Ok(nullity(rows, idx.len()))
}

fn max_all(values: impl IntoIterator<Item = Residual>, backend: crate::scalar::Backend) -> Residual {
    values.into_iter().fold(Residual::zero(backend), |a, b| a.max(b))
}

/// Checks the defining relations of `omega` and the R-action they imply.
///
/// `samples` are spectral arguments x (multiplicative for the q kinds);
/// `eta` is the rational coupling used with the symmetric kinds.
pub fn validate_omega<S: Scalar>(
    omega: &Covector<S>,
    kind: &OmegaKind<S>,
    grading: &Grading,
    samples: &[S],
    eta: &S,
) -> CheckReport {
    let n = omega.space().factors;
    let config = format!("{kind} {grading} n={n} weights={:?}", omega.weights().unwrap_or_default());
    let mut report = CheckReport::new("omega", config);
    if let Err(e) = omega_into(&mut report, omega, kind, grading, samples, eta) {
        return CheckReport::from_error(report.name, report.config, &e);
    }
    report
}

fn omega_into<S: Scalar>(
    report: &mut CheckReport,
    omega: &Covector<S>,
    kind: &OmegaKind<S>,
    grading: &Grading,
    samples: &[S],
    eta: &S,
) -> Result<()> {
    let b = S::BACKEND;
    let n = omega.space().factors;
    report.require("support in one weight subspace", omega.weights().is_some());
    let mut rel = Vec::new();
    for (_, op, sign) in defining_relations(kind, grading, n)? {
        rel.push(omega.apply(&op).residual_against(&omega.scale(&sign)));
    }
    let rel_name = match kind {
        OmegaKind::SymPlus => "<O|P_ij = <O|",
        OmegaKind::SymMinus => "<O|P_ij = -<O|",
        OmegaKind::QPlus(_) => "<O|Pq_{i,i-1} = <O|",
        OmegaKind::QMinus(_) => "<O|Pq_{i,i-1} = -<O|",
    };
    report.part(rel_name, max_all(rel, b));

    let (family, coupling) = match kind {
        OmegaKind::SymPlus => (RFamily::RationalPlus, eta.clone()),
        OmegaKind::SymMinus => (RFamily::RationalMinus, eta.clone()),
        OmegaKind::QPlus(q) => (RFamily::TrigPlus, q.clone()),
        OmegaKind::QMinus(q) => (RFamily::TrigMinus, q.checked_inv()?),
    };
    let sign = if kind.is_plus() { S::one() } else { -S::one() };
    let p = LocalOp::permutation(grading);
    let (mut r_res, mut g_res) = (Vec::new(), Vec::new());
    for x in samples {
        let r = build_r(family, x, &coupling, grading)?;
        let g = if family.is_trig() { Some(g_correction(family, x, &coupling, grading)?) } else { None };
        for i in 2..=n {
            let lhs = omega.apply(&adjacent(&r, i, n, grading)?);
            let rhs = omega.apply(&adjacent(&p, i, n, grading)?).scale(&sign);
            r_res.push(lhs.residual_against(&rhs));
            if let Some(g) = &g {
                g_res.push(omega.apply(&adjacent(g, i, n, grading)?).residual());
            }
        }
    }
    let r_name = if kind.is_plus() { "<O|R_{i,i-1}(x) = <O|P_{i,i-1}" } else { "<O|R_{i,i-1}(x) = -<O|P_{i,i-1}" };
    report.part(r_name, max_all(r_res, b));
    if family.is_trig() {
        let g_name = if kind.is_plus() { "<O|G+_{i,i-1} = 0" } else { "<O|G-_{i,i-1} = 0" };
        report.part(g_name, max_all(g_res, b));
    }
    Ok(())
}
