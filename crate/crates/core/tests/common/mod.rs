//! Brute-force oracles shared by the integration tests.
//!
//! Everything here works on dense matrices over exact rationals and applies
//! the graded sign rules directly to basis vectors, without going through
//! the sparse operators or the Koszul embedding of the library.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use superqkz_core::chain::gaudin_hamiltonian;
use superqkz_core::local::permutation_op;
use superqkz_core::{rat, ChainConfig, Covector, GradedOp, Grading, OmegaKind, Rational};

pub type Dense = Vec<Vec<Rational>>;

pub fn r(num: i64, den: i64) -> Rational {
    rat(num, den)
}

/// Base-K digits of a linear index over `n` factors, most significant first.
pub fn digits(mut index: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for d in out.iter_mut().rev() {
        *d = index % k;
        index /= k;
    }
    out
}

pub fn linear(ds: &[usize], k: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * k + d)
}

pub fn zeros(dim: usize) -> Dense {
    vec![vec![Rational::zero(); dim]; dim]
}

pub fn identity(dim: usize) -> Dense {
    let mut m = zeros(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let dim = a.len();
    let mut out = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..dim {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect()
}

pub fn scale(a: &Dense, c: &Rational) -> Dense {
    a.iter().map(|row| row.iter().map(|v| v * c).collect()).collect()
}

pub fn dense(op: &GradedOp<Rational>) -> Dense {
    let dim = op.dim();
    let mut out = zeros(dim);
    for (i, j, v) in op.entries() {
        out[i][j] = v.clone();
    }
    out
}

/// The graded swap of tensor factors `a` and `b` (0-based) on V^{⊗n}.
///
/// Moving letter x past the letters strictly between the two positions and
/// past y costs (−1) to the product of parities, applied pairwise.
pub fn swap(grading: &Grading, n: usize, a: usize, b: usize) -> Dense {
    let k = grading.k();
    let dim = k.pow(n as u32);
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let mut out = zeros(dim);
    for col in 0..dim {
        let ds = digits(col, k, n);
        let (x, y) = (grading.p(ds[a]), grading.p(ds[b]));
        let between: u8 = ds[a + 1..b].iter().map(|&d| grading.p(d)).sum();
        // x crosses the middle and y, then y crosses the middle back
        let exponent = x * between + x * y + y * between;
        let mut moved = ds.clone();
        moved.swap(a, b);
        out[linear(&moved, k)][col] = if exponent % 2 == 0 { Rational::one() } else { -Rational::one() };
    }
    out
}

/// Parses a golden coefficient "1", "-q", "q^3" and evaluates it at q.
pub fn eval_monomial(text: &str, q: &Rational) -> Rational {
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-Rational::one(), rest),
        None => (Rational::one(), text),
    };
    let power = match body {
        "1" => 0,
        "q" => 1,
        other => other.strip_prefix("q^").and_then(|p| p.parse::<i32>().ok()).expect("monomial"),
    };
    sign * q.pow(power)
}

pub fn letters(word: &str) -> Vec<usize> {
    word.chars().map(|c| c.to_digit(10).expect("digit") as usize).collect()
}

/// Lagrange interpolation of matrix-valued samples, evaluated at `at`.
pub fn lagrange(points: &[Rational], values: &[Dense], at: &Rational) -> Dense {
    let dim = values[0].len();
    let mut out = zeros(dim);
    for (i, xi) in points.iter().enumerate() {
        let mut w = Rational::one();
        for (j, xj) in points.iter().enumerate() {
            if i != j {
                w *= (at - xj) / (xi - xj);
            }
        }
        out = add(&out, &scale(&values[i], &w));
    }
    out
}

pub fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let pivot = m[c][c].clone();
        acc *= &pivot;
        for r in c + 1..n {
            let f = &m[r][c] / &pivot;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    acc
}

/// Hand-derived Ω coefficients stored under tests/golden.
pub struct Golden {
    pub file: &'static str,
    pub kind: fn(Rational) -> OmegaKind<Rational>,
    pub k: usize,
    pub bosons: &'static [usize],
    pub weights: &'static [usize],
}

pub const GOLDEN: &[Golden] = &[
    Golden { file: "omega_sym_plus_k2_n3.json", kind: |_| OmegaKind::SymPlus, k: 2, bosons: &[1], weights: &[2, 1] },
    Golden {
        file: "omega_sym_plus_k3_n3_one_boson.json",
        kind: |_| OmegaKind::SymPlus,
        k: 3,
        bosons: &[1],
        weights: &[1, 1, 1],
    },
    Golden {
        file: "omega_sym_plus_k3_n3_all_fermions.json",
        kind: |_| OmegaKind::SymPlus,
        k: 3,
        bosons: &[],
        weights: &[1, 1, 1],
    },
    Golden { file: "omega_sym_plus_k3_n4.json", kind: |_| OmegaKind::SymPlus, k: 3, bosons: &[1], weights: &[2, 1, 1] },
    Golden {
        file: "omega_sym_minus_k3_n3_all_fermions.json",
        kind: |_| OmegaKind::SymMinus,
        k: 3,
        bosons: &[],
        weights: &[1, 1, 1],
    },
    Golden {
        file: "omega_q_plus_k3_n3_one_boson.json",
        kind: OmegaKind::QPlus,
        k: 3,
        bosons: &[1],
        weights: &[1, 1, 1],
    },
    Golden {
        file: "omega_q_plus_k3_n3_all_fermions.json",
        kind: OmegaKind::QPlus,
        k: 3,
        bosons: &[],
        weights: &[1, 1, 1],
    },
];

pub fn load(file: &str) -> Vec<(String, String)> {
    let path = format!("{}/tests/golden/{file}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    serde_json::from_str(&text).unwrap()
}

pub fn as_map(omega: &Covector<Rational>) -> BTreeMap<Vec<usize>, Rational> {
    omega.coeffs().map(|(j, v)| (j.letters(), v.clone())).collect()
}

fn with_kappa(cfg: &ChainConfig<Rational>, kappa: Rational) -> ChainConfig<Rational> {
    ChainConfig::new(
        cfg.grading.clone(),
        cfg.family,
        cfg.positions.clone(),
        cfg.twist.clone(),
        cfg.params.clone(),
        kappa,
    )
    .unwrap()
}

/// Σᵢ ⟨Ω|(H_i)² + ħ⟨Ω|∂ᵢH_i − c Σ_{i≠j} (x_i−x_j)⁻² ⟨Ω| with H_i built at coupling κ.
pub fn calogero_lhs(
    cfg: &ChainConfig<Rational>,
    omega: &Covector<Rational>,
    kappa: &Rational,
    hbar: &Rational,
    c: &Rational,
) -> Covector<Rational> {
    let cfg = with_kappa(cfg, kappa.clone());
    let n = cfg.n();
    let x = &cfg.positions;
    let mut acc = Covector::zeros(omega.space());
    for i in 1..=n {
        let h = gaudin_hamiltonian(&cfg, i).unwrap();
        acc = &acc + &omega.apply(&h).apply(&h);
        let mut dh = GradedOp::zeros(cfg.space());
        for j in (1..=n).filter(|&j| j != i) {
            let d = &x[i - 1] - &x[j - 1];
            dh = &dh + &permutation_op(i, j, n, &cfg.grading).unwrap().scale(&(-kappa / (&d * &d)));
        }
        acc = &acc + &omega.apply(&dh).scale(hbar);
    }
    &acc - &omega.scale(&(c * inv_sq_sum(x)))
}

pub fn inv_sq_sum(x: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, a) in x.iter().enumerate() {
        for (j, b) in x.iter().enumerate() {
            if i != j {
                s += (a - b).pow(-2);
            }
        }
    }
    s
}
