use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Z₂-grading of the basis of ℂ^{N|M}: parity 0 marks a boson, 1 a fermion.
///
/// Labels are 1-based in the public API and 0-based in [`Grading::parity`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Grading {
    parity: Vec<u8>,
}

impl Grading {
    /// Builds the grading on `{1..k}` whose bosons are `bosons` (1-based).
    pub fn new(k: usize, bosons: &[usize]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGrading("K must be at least 1".into()));
        }
        let mut parity = vec![1u8; k];
        for &b in bosons {
            if b == 0 || b > k {
                return Err(Error::IndexOutOfRange { index: b, max: k });
            }
            parity[b - 1] = 0;
        }
        Ok(Self { parity })
    }

    pub fn from_parities(parity: Vec<u8>) -> Result<Self> {
        if parity.is_empty() {
            return Err(Error::InvalidGrading("K must be at least 1".into()));
        }
        if parity.iter().any(|&p| p > 1) {
            return Err(Error::InvalidGrading(format!("parities must be 0 or 1: {parity:?}")));
        }
        Ok(Self { parity })
    }

    pub fn bosonic(k: usize) -> Result<Self> {
        Self::from_parities(vec![0; k])
    }

    /// All 2^K gradings, ordered by the bitmask of fermionic labels.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        if k == 0 || k > 16 {
            return Err(Error::InvalidGrading(format!("cannot enumerate gradings for K={k}")));
        }
        Ok((0..1u32 << k).map(|mask| Self { parity: (0..k).map(|a| ((mask >> a) & 1) as u8).collect() }).collect())
    }

    pub fn k(&self) -> usize {
        self.parity.len()
    }

    /// Parity of the 0-based label `a`.
    #[inline]
    pub fn p(&self, a: usize) -> u8 {
        self.parity[a]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    pub fn is_boson(&self, a: usize) -> bool {
        self.parity[a] == 0
    }

    pub fn is_fermion(&self, a: usize) -> bool {
        self.parity[a] == 1
    }

    pub fn n_bosons(&self) -> usize {
        self.parity.iter().filter(|&&p| p == 0).count()
    }

    pub fn n_fermions(&self) -> usize {
        self.k() - self.n_bosons()
    }

    /// 1-based boson labels.
    pub fn bosons(&self) -> Vec<usize> {
        (0..self.k()).filter(|&a| self.is_boson(a)).map(|a| a + 1).collect()
    }

    /// Parity of the matrix unit e_ab (0-based labels).
    #[inline]
    pub fn unit_parity(&self, a: usize, b: usize) -> u8 {
        (self.parity[a] + self.parity[b]) % 2
    }

    /// The grading with every boson and fermion exchanged.
    pub fn flipped(&self) -> Self {
        Self { parity: self.parity.iter().map(|p| 1 - p).collect() }
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.parity.iter().map(|p| p.to_string()).collect();
        write!(f, "p=({})", body.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_boson_one_fermion() {
        let g = Grading::new(2, &[1]).unwrap();
        assert_eq!(g.parities(), &[0, 1]);
        assert_eq!((g.n_bosons(), g.n_fermions()), (1, 1));
    }

    #[test]
    fn extremes() {
        let all_b = Grading::new(3, &[1, 2, 3]).unwrap();
        assert_eq!(all_b.n_fermions(), 0);
        let all_f = Grading::new(3, &[]).unwrap();
        assert_eq!(all_f.parities(), &[1, 1, 1]);
        assert_eq!(all_f.n_bosons(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Grading::new(0, &[]), Err(Error::InvalidGrading(_))));
        assert!(matches!(Grading::new(2, &[3]), Err(Error::IndexOutOfRange { index: 3, max: 2 })));
        assert!(Grading::new(2, &[0]).is_err());
    }

    #[test]
    fn flip_and_enumeration() {
        let g = Grading::from_parities(vec![0, 1, 1]).unwrap();
        assert_eq!(g.flipped().parities(), &[1, 0, 0]);
        assert_eq!(g.flipped().flipped(), g);
        let all = Grading::all(2).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].parities(), &[0, 0]);
        assert_eq!(all[3].parities(), &[1, 1]);
    }
}
