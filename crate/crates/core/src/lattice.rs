//! Intersection lattices and divisor classes.
//!
//! A lattice is a finite named basis with a symmetric rational Gram matrix.
//! Classes hold an `Arc` to their lattice and two classes may only be combined
//! when they point at the *same* lattice allocation; structurally equal but
//! distinct lattices are deliberately not interchangeable.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::rational::{int, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("classes belong to different lattices")]
    Mismatch,
    #[error("gram matrix must be {rank}x{rank}")]
    Shape { rank: usize },
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("lattice must have positive rank")]
    Empty,
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, PartialEq, Eq)]
pub struct IntersectionLattice {
    labels: Vec<String>,
    gram: Vec<Vec<Q>>,
}

impl IntersectionLattice {
    pub fn new(labels: Vec<String>, gram: Vec<Vec<Q>>) -> Result<Arc<Self>, LatticeError> {
        let rank = labels.len();
        if rank == 0 {
            return Err(LatticeError::Empty);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        if gram.len() != rank || gram.iter().any(|row| row.len() != rank) {
            return Err(LatticeError::Shape { rank });
        }
        for i in 0..rank {
            for j in (i + 1)..rank {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Arc::new(Self { labels, gram }))
    }

    /// Picard lattice of the n-th Hirzebruch surface in the basis (G, F):
    /// `G^2 = -n`, `F^2 = 0`, `G.F = 1`.
    pub fn hirzebruch(n: u32) -> Arc<Self> {
        let n = int(n as i64);
        Self::new(
            vec!["G".into(), "F".into()],
            vec![vec![-n, int(1)], vec![int(1), int(0)]],
        )
        .expect("builtin lattice is valid")
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &Q {
        &self.gram[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Determinant by Gaussian elimination over Q.
    pub fn determinant(&self) -> Q {
        let n = self.rank();
        let mut m = self.gram.clone();
        let mut det = int(1);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return int(0);
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det *= &p;
            for r in (col + 1)..n {
                let factor = &m[r][col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = &m[col][c] * &factor;
                    m[r][c] -= v;
                }
            }
        }
        det
    }

    /// The lattice extended by one extra basis element orthogonal to the old
    /// ones with the given self-intersection.
    pub fn extended(&self, label: String, self_intersection: Q) -> Result<Arc<Self>, LatticeError> {
        let n = self.rank();
        let mut labels = self.labels.clone();
        labels.push(label);
        let mut gram: Vec<Vec<Q>> = self
            .gram
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(Q::zero());
                r
            })
            .collect();
        let mut last = vec![Q::zero(); n];
        last.push(self_intersection);
        gram.push(last);
        Self::new(labels, gram)
    }
}

#[derive(Debug, Clone)]
pub struct DivisorClass {
    lattice: Arc<IntersectionLattice>,
    coeffs: Vec<Q>,
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) && self.coeffs == other.coeffs
    }
}

impl Eq for DivisorClass {}

impl DivisorClass {
    pub fn new(lattice: &Arc<IntersectionLattice>, coeffs: Vec<Q>) -> Result<Self, LatticeError> {
        if coeffs.len() != lattice.rank() {
            return Err(LatticeError::WrongLength {
                expected: lattice.rank(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            lattice: Arc::clone(lattice),
            coeffs,
        })
    }

    pub fn zero(lattice: &Arc<IntersectionLattice>) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            coeffs: vec![Q::zero(); lattice.rank()],
        }
    }

    pub fn basis(lattice: &Arc<IntersectionLattice>, i: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coeffs[i] = int(1);
        c
    }

    pub fn by_label(lattice: &Arc<IntersectionLattice>, label: &str) -> Result<Self, LatticeError> {
        let i = lattice
            .index_of(label)
            .ok_or_else(|| LatticeError::UnknownLabel(label.to_string()))?;
        Ok(Self::basis(lattice, i))
    }

    pub fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice)
    }

    fn check(&self, other: &Self) -> Result<(), LatticeError> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(LatticeError::Mismatch)
        }
    }

    /// `a^T * gram * b`.
    pub fn intersect(&self, other: &Self) -> Result<Q, LatticeError> {
        self.check(other)?;
        let mut total = Q::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                total += a * self.lattice.entry(i, j) * b;
            }
        }
        Ok(total)
    }

    pub fn self_intersection(&self) -> Q {
        self.intersect(self).expect("a class shares its own lattice")
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, k: &Q) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, k: &Q, other: &Self) -> Result<Self, LatticeError> {
        self.check(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + k * b)
                .collect(),
        ))
    }

    fn with_coeffs(&self, coeffs: Vec<Q>) -> Self {
        Self {
            lattice: Arc::clone(&self.lattice),
            coeffs,
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (c, l) in self.coeffs.iter().zip(self.lattice.labels()) {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            write!(f, "({c}){l}")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
