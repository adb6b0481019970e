//! The four R-matrix families, their rescaled forms, the quantum permutation,
//! the diagonal corrections G±, the asymptotic matrices and the R axioms.
//!
//! Rational families take an additive argument x and coupling η. Trigonometric
//! families take a multiplicative argument z = e^x and coupling q = e^η, so
//! 2 sinh(x + kη) is z q^k − z⁻¹ q⁻ᵏ and every entry is a rational function.
//!
//! Both trig families share the numerator of R̃; they differ only in the
//! denominator sinh(x ± η). In particular TrigMinus at coupling q has the same
//! matrix-unit coefficients as TrigPlus at q⁻¹ over the flipped grading, and
//! decomposes as −P + (sinh x / sinh(x − η))(I + P^{q⁻¹}) + G⁻.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::basis::Space;
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::local::LocalOp;
use crate::op::GradedOp;
use crate::report::CheckReport;
use crate::scalar::{Backend, Residual, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RFamily {
    RationalPlus,
    RationalMinus,
    TrigPlus,
    TrigMinus,
}

impl RFamily {
    pub const ALL: [RFamily; 4] =
        [RFamily::RationalPlus, RFamily::RationalMinus, RFamily::TrigPlus, RFamily::TrigMinus];

    pub fn is_trig(self) -> bool {
        matches!(self, RFamily::TrigPlus | RFamily::TrigMinus)
    }

    /// ε = ±1, the sign of the coupling in the pole x = −εη.
    pub fn sign(self) -> i64 {
        match self {
            RFamily::RationalPlus | RFamily::TrigPlus => 1,
            RFamily::RationalMinus | RFamily::TrigMinus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self.sign() == 1
    }

    pub fn name(self) -> &'static str {
        match self {
            RFamily::RationalPlus => "rational-plus",
            RFamily::RationalMinus => "rational-minus",
            RFamily::TrigPlus => "trig-plus",
            RFamily::TrigMinus => "trig-minus",
        }
    }

    /// The family with the opposite coupling sign.
    pub fn opposite(self) -> Self {
        match self {
            RFamily::RationalPlus => RFamily::RationalMinus,
            RFamily::RationalMinus => RFamily::RationalPlus,
            RFamily::TrigPlus => RFamily::TrigMinus,
            RFamily::TrigMinus => RFamily::TrigPlus,
        }
    }
}

impl fmt::Display for RFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RFamily::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Couplings: (η, ħ) for rational families, (q, w) = (e^η, e^{ηħ}) for trig.
#[derive(Debug, Clone, PartialEq)]
pub struct RParams<S> {
    pub coupling: S,
    pub shift: S,
}

impl<S: Scalar> RParams<S> {
    pub fn new(coupling: S, shift: S) -> Self {
        Self { coupling, shift }
    }
}

/// x − y (rational) or x/y (trig).
pub fn arg_difference<S: Scalar>(family: RFamily, x: &S, y: &S) -> Result<S> {
    if family.is_trig() {
        Ok(x.mul_ref(&y.checked_inv()?))
    } else {
        Ok(x.sub_ref(y))
    }
}

/// −x (rational) or 1/x (trig).
pub fn arg_inverse<S: Scalar>(family: RFamily, x: &S) -> Result<S> {
    if family.is_trig() {
        x.checked_inv()
    } else {
        Ok(-x.clone())
    }
}

/// x + ηħ (rational) or x·w (trig).
pub fn arg_shifted<S: Scalar>(family: RFamily, x: &S, params: &RParams<S>) -> S {
    if family.is_trig() {
        x.mul_ref(&params.shift)
    } else {
        x.add_ref(&params.coupling.mul_ref(&params.shift))
    }
}

/// z − 1/z = 2 sinh x for z = e^x.
pub fn s<S: Scalar>(z: &S) -> Result<S> {
    Ok(z.sub_ref(&z.checked_inv()?))
}

/// 2 sinh(x + kη) = z q^k − z⁻¹ q⁻ᵏ.
fn s_shift<S: Scalar>(z: &S, q: &S, k: i64) -> Result<S> {
    s(&z.mul_ref(&q.powi(k)))
}

fn singular<S: Scalar>(family: RFamily, arg: &S, why: &str) -> Error {
    Error::SingularSpectralParameter(format!("{family} at argument {}: {why}", arg.to_value()))
}

fn check_trig_inputs<S: Scalar>(family: RFamily, z: &S, q: &S) -> Result<()> {
    if z.is_negligible() {
        return Err(singular(family, z, "multiplicative argument is zero"));
    }
    if q.is_negligible() {
        return Err(Error::SingularSpectralParameter("q must be nonzero".into()));
    }
    Ok(())
}

/// Denominator of R: x + εη, or 2 sinh(x + εη).
fn r_denominator<S: Scalar>(family: RFamily, arg: &S, coupling: &S) -> Result<S> {
    let d = if family.is_trig() {
        check_trig_inputs(family, arg, coupling)?;
        s_shift(arg, coupling, family.sign())?
    } else if family.is_plus() {
        arg.add_ref(coupling)
    } else {
        arg.sub_ref(coupling)
    };
    if d.is_negligible() {
        return Err(singular(family, arg, "pole of R"));
    }
    Ok(d)
}

/// Denominator of R̃: x, or 2 sinh x.
fn rescaled_denominator<S: Scalar>(family: RFamily, arg: &S, coupling: &S) -> Result<S> {
    let d = if family.is_trig() {
        check_trig_inputs(family, arg, coupling)?;
        s(arg)?
    } else {
        arg.clone()
    };
    if d.is_negligible() {
        return Err(singular(family, arg, "zero spectral parameter"));
    }
    Ok(d)
}

/// Common numerator of every family, as a local operator.
///
/// Rational: x·I + η·P. Trig: the hyperbolic numerator shared by both signs.
fn numerator<S: Scalar>(family: RFamily, arg: &S, coupling: &S, grading: &Grading) -> Result<LocalOp<S>> {
    let k = grading.k();
    if !family.is_trig() {
        let id = LocalOp::identity(k, 2).scale(arg);
        return Ok(id.plus(&LocalOp::permutation(grading).scale(coupling)));
    }
    let (z, q) = (arg, coupling);
    let zi = z.checked_inv()?;
    let sz = s(z)?;
    let sq = s(q)?;
    let mut op = LocalOp::zero(k, 2);
    for a in 0..k {
        let p = grading.p(a) as i64;
        let diag = z.mul_ref(&q.powi(1 - 2 * p)).sub_ref(&zi.mul_ref(&q.powi(2 * p - 1)));
        op.add_term(diag, vec![(a, a), (a, a)]);
        for b in 0..k {
            if a != b {
                op.add_term(sz.clone(), vec![(a, a), (b, b)]);
            }
        }
        for b in a + 1..k {
            let up = sq.mul_ref(z).mul_ref(&S::sign_power(grading.p(b)));
            let down = sq.mul_ref(&zi).mul_ref(&S::sign_power(grading.p(a)));
            op.add_term(up, vec![(a, b), (b, a)]);
            op.add_term(down, vec![(b, a), (a, b)]);
        }
    }
    Ok(op)
}

/// R(x) of the given family on V⊗V.
pub fn build_r<S: Scalar>(family: RFamily, arg: &S, coupling: &S, grading: &Grading) -> Result<LocalOp<S>> {
    let den = r_denominator(family, arg, coupling)?;
    Ok(numerator(family, arg, coupling, grading)?.scale(&den.checked_inv()?))
}

/// R̃(x) = f(x)·R(x), with f the scalar factor of [`rescaling_factor`].
pub fn build_r_rescaled<S: Scalar>(family: RFamily, arg: &S, coupling: &S, grading: &Grading) -> Result<LocalOp<S>> {
    let den = rescaled_denominator(family, arg, coupling)?;
    Ok(numerator(family, arg, coupling, grading)?.scale(&den.checked_inv()?))
}

/// f(x) = (x + εη)/x, or sinh(x + εη)/sinh x.
pub fn rescaling_factor<S: Scalar>(family: RFamily, arg: &S, coupling: &S) -> Result<S> {
    let num = if family.is_trig() {
        check_trig_inputs(family, arg, coupling)?;
        s_shift(arg, coupling, family.sign())?
    } else {
        arg.add_ref(&coupling.mul_ref(&S::from_int(family.sign())))
    };
    let den = rescaled_denominator(family, arg, coupling)?;
    Ok(num.mul_ref(&den.checked_inv()?))
}

/// P^q = Σ (−1)^{p(a)} e_aa⊗e_aa + q Σ_{a>b} (−1)^{p(b)} e_ab⊗e_ba + q⁻¹ Σ_{a<b} (−1)^{p(b)} e_ab⊗e_ba.
pub fn q_permutation<S: Scalar>(grading: &Grading, q: &S) -> Result<LocalOp<S>> {
    let qi = q.checked_inv()?;
    let k = grading.k();
    let mut op = LocalOp::zero(k, 2);
    for a in 0..k {
        for b in 0..k {
            let sign = S::sign_power(grading.p(b));
            let c = match a.cmp(&b) {
                std::cmp::Ordering::Equal => sign,
                std::cmp::Ordering::Greater => sign.mul_ref(q),
                std::cmp::Ordering::Less => sign.mul_ref(&qi),
            };
            op.add_term(c, vec![(a, b), (b, a)]);
        }
    }
    Ok(op)
}

/// G± on V⊗V: 2(cosh η − 1) sinh x / sinh(x ± η) on e_aa⊗e_aa for fermions
/// (G⁺, TrigPlus) or bosons (G⁻, TrigMinus), zero elsewhere.
pub fn g_correction<S: Scalar>(family: RFamily, arg: &S, q: &S, grading: &Grading) -> Result<LocalOp<S>> {
    if !family.is_trig() {
        return Err(Error::UnsupportedFamily { family: family.to_string(), what: "G correction".into() });
    }
    let den = r_denominator(family, arg, q)?;
    let c = q.add_ref(&q.checked_inv()?).sub_ref(&S::from_int(2));
    let entry = c.mul_ref(&s(arg)?).mul_ref(&den.checked_inv()?);
    let want = if family.is_plus() { 1 } else { 0 };
    let mut op = LocalOp::zero(grading.k(), 2);
    for a in 0..grading.k() {
        if grading.p(a) == want {
            op.add_term(entry.clone(), vec![(a, a), (a, a)]);
        }
    }
    Ok(op)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    PlusInfinity,
    MinusInfinity,
}

/// lim R̃(x) as x → ±∞ (z → ∞ or z → 0); the same for both trig families.
///
/// +∞: I + (q − q⁻¹) Σ_{a<b} (−1)^{p(b)} e_ab⊗e_ba + Σ_a (q^{1−2p(a)} − 1) e_aa⊗e_aa.
/// −∞: I + (q⁻¹ − q) Σ_{a<b} (−1)^{p(a)} e_ba⊗e_ab + Σ_a (q^{2p(a)−1} − 1) e_aa⊗e_aa.
pub fn r_asymptotic<S: Scalar>(family: RFamily, direction: Direction, q: &S, grading: &Grading) -> Result<LocalOp<S>> {
    if !family.is_trig() {
        return Err(Error::UnsupportedFamily { family: family.to_string(), what: "asymptotic R-matrix".into() });
    }
    let k = grading.k();
    let sq = s(q)?;
    let mut op = LocalOp::identity(k, 2);
    for a in 0..k {
        let p = grading.p(a) as i64;
        let e = if direction == Direction::PlusInfinity { 1 - 2 * p } else { 2 * p - 1 };
        op.add_term(q.powi(e).sub_ref(&S::one()), vec![(a, a), (a, a)]);
        for b in a + 1..k {
            match direction {
                Direction::PlusInfinity => op.add_term(sq.mul_ref(&S::sign_power(grading.p(b))), vec![(a, b), (b, a)]),
                Direction::MinusInfinity => {
                    op.add_term(-sq.mul_ref(&S::sign_power(grading.p(a))), vec![(b, a), (a, b)])
                }
            }
        }
    }
    Ok(op)
}

/// Objects that the grading-flip operator Q acts on.
pub trait GradingFlip {
    /// Re-expresses `self`, given over `grading`, over the flipped grading.
    fn grading_flip(&self, grading: &Grading) -> Self;
}

impl GradingFlip for Grading {
    fn grading_flip(&self, _grading: &Grading) -> Self {
        self.flipped()
    }
}

/// Q acts on labels: the matrix-unit coefficients are unchanged.
impl<S: Scalar> GradingFlip for LocalOp<S> {
    fn grading_flip(&self, _grading: &Grading) -> Self {
        self.clone()
    }
}

/// The same element of End(V)^{⊗L} written in the flipped grading's
/// Koszul embedding (conjugation by the diagonal Koszul sign).
impl<S: Scalar> GradingFlip for GradedOp<S> {
    fn grading_flip(&self, grading: &Grading) -> Self {
        self.koszul_flip(grading)
    }
}

impl<S: Scalar> GradingFlip for crate::op::Covector<S> {
    fn grading_flip(&self, grading: &Grading) -> Self {
        self.koszul_flip(grading)
    }
}

pub fn grading_flip<T: GradingFlip>(object: &T, grading: &Grading) -> T {
    object.grading_flip(grading)
}

fn embed2<S: Scalar>(r: &LocalOp<S>, i: usize, j: usize, factors: usize, grading: &Grading) -> Result<GradedOp<S>> {
    r.embed(&[i, j], Space::new(grading.k(), factors), grading)
}

/// Checks unitarity, graded Yang–Baxter and twist symmetry at each sample
/// pair (x, y) (multiplicative for trig families).
pub fn validate_r_axioms<S: Scalar>(
    family: RFamily,
    grading: &Grading,
    samples: &[(S, S)],
    coupling: &S,
    twist: &[S],
) -> CheckReport {
    let config = format!("{family} {grading} coupling={} samples={}", coupling.to_value(), samples.len());
    let mut report = CheckReport::new("r-axioms", config);
    if let Err(e) = r_axioms_into(&mut report, family, grading, samples, coupling, twist) {
        return CheckReport::from_error(report.name, report.config, &e);
    }
    report
}

fn r_axioms_into<S: Scalar>(
    report: &mut CheckReport,
    family: RFamily,
    grading: &Grading,
    samples: &[(S, S)],
    coupling: &S,
    twist: &[S],
) -> Result<()> {
    let k = grading.k();
    if twist.len() != k {
        return Err(Error::WeightCount { expected: k, got: twist.len() });
    }
    // reject singular samples before any evaluation
    let mut prepared = Vec::with_capacity(samples.len());
    for (x, y) in samples {
        let xy = arg_difference(family, x, y)?;
        let rx = build_r(family, x, coupling, grading)?;
        let rxi = build_r(family, &arg_inverse(family, x)?, coupling, grading)?;
        let ry = build_r(family, y, coupling, grading)?;
        let rxy = build_r(family, &xy, coupling, grading)?;
        prepared.push((rx, rxi, ry, rxy));
    }
    let id2 = GradedOp::identity(Space::new(k, 2));
    let p = embed2(&LocalOp::permutation(grading), 0, 1, 2, grading)?;
    let g1 = crate::local::twist_at(twist, 0, Space::new(k, 2));
    let g2 = crate::local::twist_at(twist, 1, Space::new(k, 2));
    let gg = g1.matmul(&g2);
    let (mut unit, mut ybe, mut tw) = (Vec::new(), Vec::new(), Vec::new());
    let mut even = Vec::new();
    for (rx, rxi, ry, rxy) in &prepared {
        let r12 = embed2(rx, 0, 1, 2, grading)?;
        let r21_inv = p.matmul(&embed2(rxi, 0, 1, 2, grading)?).matmul(&p);
        unit.push(r12.matmul(&r21_inv).residual_against(&id2));
        tw.push(gg.matmul(&r12).residual_against(&r12.matmul(&gg)));
        even.push(r12.preserves_weights() && r12.is_even(grading));

        let a12 = embed2(rxy, 0, 1, 3, grading)?;
        let a13 = embed2(rx, 0, 2, 3, grading)?;
        let a23 = embed2(ry, 1, 2, 3, grading)?;
        let lhs = a12.matmul(&a13).matmul(&a23);
        let rhs = a23.matmul(&a13).matmul(&a12);
        ybe.push(lhs.residual_against(&rhs));
    }
    report.part("unitarity", fold(unit, S::BACKEND));
    report.part("yang-baxter", fold(ybe, S::BACKEND));
    report.part("twist-symmetry", fold(tw, S::BACKEND));
    report.require("R is even and weight-preserving", even.iter().all(|&b| b));
    Ok(())
}

pub(crate) fn fold(values: Vec<Residual>, backend: Backend) -> Residual {
    values.into_iter().fold(Residual::zero(backend), |a, b| a.max(b))
}
