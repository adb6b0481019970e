//! qKZ operators, Gaudin and spin-chain Hamiltonians, and the transfer matrix.
//!
//! Chain sites are 1-based in the API. On V^{⊗n} site i is factor i−1; on the
//! enlarged space V₀⊗V^{⊗n} the auxiliary space is factor 0 and site i is
//! factor i.

use std::fmt;

use crate::basis::Space;
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::local::{permutation_op, twist_at, weight_operator, LocalOp};
use crate::op::GradedOp;
use crate::report::CheckReport;
use crate::rmatrix::{arg_difference, arg_shifted, build_r, build_r_rescaled, rescaling_factor, RFamily, RParams};
use crate::scalar::{Residual, Scalar};

/// Positions, twist and couplings of one chain.
///
/// Positions are additive x_i for rational families and multiplicative
/// u_i = e^{x_i} for trig ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig<S> {
    pub grading: Grading,
    pub family: RFamily,
    pub positions: Vec<S>,
    pub twist: Vec<S>,
    pub params: RParams<S>,
    pub kappa: S,
}

impl<S: Scalar> ChainConfig<S> {
    /// Validates the configuration: twist length K and distinct positions
    /// (every R̃_ij finite). See [`ChainConfig::check_generic`] for R poles.
    pub fn new(
        grading: Grading,
        family: RFamily,
        positions: Vec<S>,
        twist: Vec<S>,
        params: RParams<S>,
        kappa: S,
    ) -> Result<Self> {
        let cfg = Self { grading, family, positions, twist, params, kappa };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.grading.k();
        if self.twist.len() != k {
            return Err(Error::WeightCount { expected: k, got: self.twist.len() });
        }
        if self.positions.is_empty() {
            return Err(Error::Config("chain needs at least one site".into()));
        }
        if self.family.is_trig() {
            if self.params.coupling.is_negligible() || self.params.shift.is_negligible() {
                return Err(Error::SingularSpectralParameter("q and w must be nonzero".into()));
            }
            if let Some(i) = self.positions.iter().position(|u| u.is_negligible()) {
                return Err(Error::SingularSpectralParameter(format!("u_{} is zero", i + 1)));
            }
        }
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.positions[i] == self.positions[j] {
                    return Err(Error::CoincidentPositions(i.min(j) + 1, i.max(j) + 1));
                }
                let d = self.diff(i, j)?;
                build_r_rescaled(self.family, &d, &self.params.coupling, &self.grading)
                    .map_err(|_| Error::CoincidentPositions(i.min(j) + 1, i.max(j) + 1))?;
            }
        }
        Ok(())
    }

    /// Rejects configurations where some R_ij(x_i − x_j) of either coupling
    /// sign has a pole (x_i − x_j = ±η, or u_i/u_j = ±q^{±1}).
    ///
    /// R̃ products (H_i, T) stay finite there; K_i does not.
    pub fn check_generic(&self) -> Result<()> {
        let c = &self.params.coupling;
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i != j {
                    let d = self.diff(i, j)?;
                    build_r(self.family, &d, c, &self.grading)?;
                    build_r(self.family.opposite(), &d, c, &self.grading)?;
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn k(&self) -> usize {
        self.grading.k()
    }

    pub fn space(&self) -> Space {
        Space::new(self.k(), self.n())
    }

    pub fn aux_space(&self) -> Space {
        Space::new(self.k(), self.n() + 1)
    }

    /// x_i − x_j or u_i/u_j, 0-based sites.
    pub fn diff(&self, i: usize, j: usize) -> Result<S> {
        arg_difference(self.family, &self.positions[i], &self.positions[j])
    }

    /// The same chain with another family (positions reinterpreted as given).
    pub fn with_family(&self, family: RFamily) -> Result<Self> {
        Self::new(
            self.grading.clone(),
            family,
            self.positions.clone(),
            self.twist.clone(),
            self.params.clone(),
            self.kappa.clone(),
        )
    }

    /// The shift parameter that switches the ħ-shift off (ħ = 0 or w = 1).
    pub fn no_shift(&self) -> S {
        if self.family.is_trig() {
            S::one()
        } else {
            S::zero()
        }
    }

    fn site(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n() {
            return Err(Error::IndexOutOfRange { index: i, max: self.n() });
        }
        Ok(i - 1)
    }
}

impl<S: Scalar> fmt::Display for ChainConfig<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[S]| v.iter().map(|x| x.to_value().to_string()).collect::<Vec<_>>().join(",");
        let (c, s) = if self.family.is_trig() { ("q", "w") } else { ("eta", "hbar") };
        write!(
            f,
            "{} {} n={} x=({}) g=({}) {c}={} {s}={} kappa={}",
            self.family,
            self.grading,
            self.n(),
            list(&self.positions),
            list(&self.twist),
            self.params.coupling.to_value(),
            self.params.shift.to_value(),
            self.kappa.to_value()
        )
    }
}

fn embed_pair<S: Scalar>(r: &LocalOp<S>, a: usize, b: usize, space: Space, grading: &Grading) -> Result<GradedOp<S>> {
    r.embed(&[a, b], space, grading)
}

/// The ordered factors of K_i^{(shift)}:
/// R_{i,i−1}(x_i−x_{i−1}+ηħ), …, R_{i1}(x_i−x_1+ηħ), g⁽ⁱ⁾, R_{in}(x_i−x_n), …, R_{i,i+1}(x_i−x_{i+1}).
///
/// Factors R_ij with `rescaled(j)` true (1-based j) are replaced by R̃_ij,
/// which absorbs the scalar f(x_i − x_j) and stays finite at the poles of R.
pub fn k_factors<S: Scalar>(
    cfg: &ChainConfig<S>,
    i: usize,
    shift: &S,
    rescaled: impl Fn(usize) -> bool,
) -> Result<Vec<GradedOp<S>>> {
    let si = cfg.site(i)?;
    let params = RParams::new(cfg.params.coupling.clone(), shift.clone());
    let space = cfg.space();
    let g = &cfg.grading;
    let r_at = |j: usize, arg: &S| -> Result<GradedOp<S>> {
        let r = if rescaled(j + 1) {
            build_r_rescaled(cfg.family, arg, &params.coupling, g)?
        } else {
            build_r(cfg.family, arg, &params.coupling, g)?
        };
        embed_pair(&r, si, j, space, g)
    };
    let mut out = Vec::with_capacity(cfg.n());
    for j in (0..si).rev() {
        out.push(r_at(j, &arg_shifted(cfg.family, &cfg.diff(si, j)?, &params))?);
    }
    out.push(twist_at(&cfg.twist, si, space));
    for j in (si + 1..cfg.n()).rev() {
        out.push(r_at(j, &cfg.diff(si, j)?)?);
    }
    Ok(out)
}

/// K_i^{(shift)} = R_{i,i−1}(x_i−x_{i−1}+ηħ)⋯R_{i1}(x_i−x_1+ηħ) g⁽ⁱ⁾ R_{in}(x_i−x_n)⋯R_{i,i+1}(x_i−x_{i+1}).
///
/// `shift` is ħ (rational) or w (trig); [`ChainConfig::no_shift`] gives K_i^{(0)}.
pub fn k_operator<S: Scalar>(cfg: &ChainConfig<S>, i: usize, shift: &S) -> Result<GradedOp<S>> {
    let factors = k_factors(cfg, i, shift, |_| false)?;
    Ok(GradedOp::product(&factors).expect("K has at least the twist factor"))
}

/// H_i^G = g⁽ⁱ⁾ + κ Σ_{j≠i} P_ij/(x_i − x_j), rational positions.
pub fn gaudin_hamiltonian<S: Scalar>(cfg: &ChainConfig<S>, i: usize) -> Result<GradedOp<S>> {
    if cfg.family.is_trig() {
        return Err(Error::UnsupportedFamily { family: cfg.family.to_string(), what: "Gaudin Hamiltonian".into() });
    }
    let si = cfg.site(i)?;
    let mut h = twist_at(&cfg.twist, si, cfg.space());
    for j in 0..cfg.n() {
        if j == si {
            continue;
        }
        let d = cfg.positions[si].sub_ref(&cfg.positions[j]);
        let c = cfg.kappa.mul_ref(&d.checked_inv().map_err(|_| Error::CoincidentPositions(i, j + 1))?);
        h = &h + &permutation_op(i, j + 1, cfg.n(), &cfg.grading)?.scale(&c);
    }
    Ok(h)
}

/// H_i as the R̃ product R̃_{i,i−1}⋯R̃_{i1} g⁽ⁱ⁾ R̃_{in}⋯R̃_{i,i+1} at unshifted arguments.
pub fn chain_hamiltonian<S: Scalar>(cfg: &ChainConfig<S>, i: usize) -> Result<GradedOp<S>> {
    let factors = k_factors(cfg, i, &cfg.no_shift(), |_| true)?;
    Ok(GradedOp::product(&factors).expect("H has at least the twist factor"))
}

/// Π_{j≠i} f(x_i − x_j), with f = R̃/R for the family.
pub fn hamiltonian_prefactor<S: Scalar>(cfg: &ChainConfig<S>, i: usize) -> Result<S> {
    let si = cfg.site(i)?;
    let mut f = S::one();
    for j in 0..cfg.n() {
        if j != si {
            f = f.mul_ref(&rescaling_factor(cfg.family, &cfg.diff(si, j)?, &cfg.params.coupling)?);
        }
    }
    Ok(f)
}

/// H_i = K_i^{(0)} Π_{j≠i} f(x_i − x_j).
pub fn chain_hamiltonian_via_k<S: Scalar>(cfg: &ChainConfig<S>, i: usize) -> Result<GradedOp<S>> {
    Ok(k_operator(cfg, i, &cfg.no_shift())?.scale(&hamiltonian_prefactor(cfg, i)?))
}

/// T(x₀) = str₀(R̃₀ₙ(x₀−xₙ)⋯R̃₀₁(x₀−x₁) g⁽⁰⁾).
pub fn transfer_matrix<S: Scalar>(x0: &S, cfg: &ChainConfig<S>) -> Result<GradedOp<S>> {
    let space = cfg.aux_space();
    let g = &cfg.grading;
    let mut acc = GradedOp::identity(space);
    for j in (0..cfg.n()).rev() {
        let d = arg_difference(cfg.family, x0, &cfg.positions[j])?;
        let r = build_r_rescaled(cfg.family, &d, &cfg.params.coupling, g)?;
        acc = acc.matmul(&embed_pair(&r, 0, j + 1, space, g)?);
    }
    acc = acc.matmul(&twist_at(&cfg.twist, 0, space));
    acc.partial_supertrace_aux(g)
}

/// T(±∞) = Σ_{a∈𝔅} g_a q^{±M_a} − Σ_{a∈𝔉} g_a q^{∓M_a}, trig families only.
pub fn transfer_asymptotic<S: Scalar>(plus_infinity: bool, cfg: &ChainConfig<S>) -> Result<GradedOp<S>> {
    if !cfg.family.is_trig() {
        return Err(Error::UnsupportedFamily {
            family: cfg.family.to_string(),
            what: "asymptotic transfer matrix".into(),
        });
    }
    let q = &cfg.params.coupling;
    let g = &cfg.grading;
    let dir = if plus_infinity { 1 } else { -1 };
    Ok(GradedOp::diagonal(cfg.space(), |d| {
        let mut acc = S::zero();
        for a in 0..cfg.k() {
            let m = d.iter().filter(|&&x| x == a).count() as i64;
            let e = if g.is_boson(a) { dir * m } else { -dir * m };
            let term = cfg.twist[a].mul_ref(&q.powi(e));
            acc = if g.is_boson(a) { acc.add_ref(&term) } else { acc.sub_ref(&term) };
        }
        acc
    }))
}

/// Σ_a g_a M_a = Σ_i g⁽ⁱ⁾.
pub fn twist_weight_sum<S: Scalar>(cfg: &ChainConfig<S>) -> Result<GradedOp<S>> {
    let mut acc = GradedOp::zeros(cfg.space());
    for a in 0..cfg.k() {
        acc = &acc + &weight_operator(a + 1, cfg.n(), &cfg.grading)?.scale(&cfg.twist[a]);
    }
    Ok(acc)
}

/// sinh η = (q − q⁻¹)/2.
pub fn sinh_eta<S: Scalar>(q: &S) -> Result<S> {
    Ok(q.sub_ref(&q.checked_inv()?).mul_ref(&S::from_ratio(1, 2)))
}

/// coth(x − x_k) = (z² + u_k²)/(z² − u_k²).
pub fn coth_diff<S: Scalar>(z: &S, u: &S) -> Result<S> {
    let (z2, u2) = (z.mul_ref(z), u.mul_ref(u));
    Ok(z2.add_ref(&u2).mul_ref(&z2.sub_ref(&u2).checked_inv()?))
}

/// T(x) predicted by the pole expansion from the Hamiltonians `hs`.
///
/// Rational: str g + Σ η H_j/(x − x_j). Trig: C + sinh η Σ H_k coth(x − x_k)
/// with C = T(+∞) − sinh η Σ H_k.
pub fn transfer_expansion<S: Scalar>(x0: &S, cfg: &ChainConfig<S>, hs: &[GradedOp<S>]) -> Result<GradedOp<S>> {
    let space = cfg.space();
    let c = &cfg.params.coupling;
    if cfg.family.is_trig() {
        let sh = sinh_eta(c)?;
        let sum_h = hs.iter().fold(GradedOp::zeros(space), |a, h| &a + h);
        let constant = &transfer_asymptotic(true, cfg)? - &sum_h.scale(&sh);
        let mut acc = constant;
        for (h, u) in hs.iter().zip(&cfg.positions) {
            acc = &acc + &h.scale(&sh.mul_ref(&coth_diff(x0, u)?));
        }
        Ok(acc)
    } else {
        let str_g = cfg
            .twist
            .iter()
            .enumerate()
            .fold(S::zero(), |a, (i, g)| a.add_ref(&g.mul_ref(&S::sign_power(cfg.grading.p(i)))));
        let mut acc = GradedOp::identity(space).scale(&str_g);
        for (h, x) in hs.iter().zip(&cfg.positions) {
            let d = x0
                .sub_ref(x)
                .checked_inv()
                .map_err(|_| Error::SingularSpectralParameter("x0 equals a position".into()))?;
            acc = &acc + &h.scale(&c.mul_ref(&d));
        }
        Ok(acc)
    }
}

fn max_all(values: impl IntoIterator<Item = Residual>, backend: crate::scalar::Backend) -> Residual {
    values.into_iter().fold(Residual::zero(backend), |a, b| a.max(b))
}

/// Interrelations of K_i, H_i and T(x) on one chain.
///
/// `samples` are spectral points x₀ (multiplicative for trig) where T is evaluated.
pub fn validate_chain_identities<S: Scalar>(cfg: &ChainConfig<S>, samples: &[S]) -> CheckReport {
    let mut report = CheckReport::new("chain", cfg.to_string());
    if let Err(e) = chain_into(&mut report, cfg, samples) {
        return CheckReport::from_error(report.name, report.config, &e);
    }
    report
}

fn chain_into<S: Scalar>(report: &mut CheckReport, cfg: &ChainConfig<S>, samples: &[S]) -> Result<()> {
    let b = S::BACKEND;
    let n = cfg.n();
    let mut hs = Vec::with_capacity(n);
    let mut via_k = Vec::with_capacity(n);
    for i in 1..=n {
        let h = chain_hamiltonian(cfg, i)?;
        via_k.push(h.residual_against(&chain_hamiltonian_via_k(cfg, i)?));
        hs.push(h);
    }
    report.part("H product form = K scalar form", max_all(via_k, b));

    let mut comm = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            comm.push(hs[i].commutator_residual(&hs[j]));
        }
    }
    report.part("[H_i, H_j] = 0", max_all(comm, b));

    let weights: Vec<GradedOp<S>> =
        (1..=cfg.k()).map(|a| weight_operator(a, n, &cfg.grading)).collect::<Result<_>>()?;
    let mut wc = Vec::new();
    for h in &hs {
        for m in &weights {
            wc.push(h.commutator_residual(m));
        }
    }
    report.part("[H_i, M_a] = 0", max_all(wc, b));
    report.require("H_i even", hs.iter().all(|h| h.is_even(&cfg.grading)));

    let sum_h = hs.iter().fold(GradedOp::zeros(cfg.space()), |a, h| &a + h);
    if cfg.family.is_trig() {
        let sh = sinh_eta(&cfg.params.coupling)?;
        let tp = transfer_asymptotic(true, cfg)?;
        let tm = transfer_asymptotic(false, cfg)?;
        let lhs = sum_h.scale(&sh.mul_ref(&S::from_int(2)));
        report.part("2 sinh(eta) sum H = T(+inf) - T(-inf)", lhs.residual_against(&(&tp - &tm)));
        let c_plus = &tp - &sum_h.scale(&sh);
        let c_minus = &tm + &sum_h.scale(&sh);
        report.part("C from +inf = C from -inf", c_plus.residual_against(&c_minus));
    } else {
        report.part("sum H = sum g_a M_a", sum_h.residual_against(&twist_weight_sum(cfg)?));
    }

    let mut ts = Vec::with_capacity(samples.len());
    let mut expansion = Vec::new();
    for x0 in samples {
        let t = transfer_matrix(x0, cfg)?;
        expansion.push(t.residual_against(&transfer_expansion(x0, cfg, &hs)?));
        ts.push(t);
    }
    report.part("T(x) pole expansion", max_all(expansion, b));
    let mut tc = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            tc.push(ts[i].commutator_residual(&ts[j]));
        }
        for m in &weights {
            tc.push(ts[i].commutator_residual(m));
        }
    }
    report.part("[T(x), T(y)] = 0 and [T, M_a] = 0", max_all(tc, b));
    report.require("T even", ts.iter().all(|t| t.is_even(&cfg.grading)));
    Ok(())
}
