//! Scalars over ℝ, ℂ and ℍ and the Hermitian inner product on `F^d`.
//!
//! Every scalar is stored as a quaternion `w + x i + y j + z k`. Reals and
//! complex numbers are the subalgebras `x = y = z = 0` and `y = z = 0`, so one
//! multiplication routine serves all three fields and never leaves the
//! subalgebra it started in.
//!
//! `F^d` is a right `F`-module: vectors are scaled from the right and the
//! inner product is conjugate-linear in the first slot,
//! `<u, v> = Σ_k conj(u_k) v_k`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The scalar field of a vector or matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::R, Field::C, Field::H];

    /// Number of real coefficients of one scalar.
    pub const fn real_dim(self) -> usize {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
        }
    }

    pub fn contains(self, s: &Scalar) -> bool {
        s.0[self.real_dim()..].iter().all(|c| *c == 0.0)
    }

    /// Smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self.real_dim() >= other.real_dim() {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Field::R),
            "C" | "c" => Ok(Field::C),
            "H" | "h" => Ok(Field::H),
            other => Err(Error::InvalidArgument(format!("unknown field `{other}`"))),
        }
    }
}

/// A quaternion `w + x i + y j + z k`, coefficients in that order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Scalar(pub [f64; 4]);

impl Scalar {
    pub const ZERO: Scalar = Scalar([0.0; 4]);
    pub const ONE: Scalar = Scalar([1.0, 0.0, 0.0, 0.0]);
    pub const I: Scalar = Scalar([0.0, 1.0, 0.0, 0.0]);
    pub const J: Scalar = Scalar([0.0, 0.0, 1.0, 0.0]);
    pub const K: Scalar = Scalar([0.0, 0.0, 0.0, 1.0]);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Scalar([w, x, y, z])
    }

    pub const fn real(w: f64) -> Self {
        Scalar([w, 0.0, 0.0, 0.0])
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Scalar([re, im, 0.0, 0.0])
    }

    /// Builds a scalar of `field` from exactly `field.real_dim()` coefficients.
    pub fn from_coefficients(field: Field, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != field.real_dim() {
            return Err(Error::InvalidArgument(format!(
                "a scalar over {field} needs {} coefficients, got {}",
                field.real_dim(),
                coeffs.len()
            )));
        }
        let mut c = [0.0; 4];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Scalar(c))
    }

    /// The leading `field.real_dim()` coefficients.
    pub fn coefficients(&self, field: Field) -> &[f64] {
        &self.0[..field.real_dim()]
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn conj(&self) -> Self {
        let [w, x, y, z] = self.0;
        Scalar([w, -x, -y, -z])
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        let [w, x, y, z] = self.0;
        w * w + x * x + y * y + z * z
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn scale(&self, t: f64) -> Self {
        let [w, x, y, z] = self.0;
        Scalar([w * t, x * t, y * t, z * t])
    }

    /// `conj(self) * other`, the summand of the inner product.
    #[inline]
    pub fn conj_mul(&self, other: &Scalar) -> Self {
        self.conj() * *other
    }

    pub fn inverse(&self) -> Option<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj().scale(1.0 / n2))
        }
    }

    /// Distance to `other` in the Euclidean norm on the coefficients.
    pub fn dist(&self, other: &Scalar) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, o: Scalar) -> Scalar {
        let (a, b) = (self.0, o.0);
        Scalar([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl AddAssign for Scalar {
    #[inline]
    fn add_assign(&mut self, o: Scalar) {
        *self = *self + o;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    #[inline]
    fn sub(self, o: Scalar) -> Scalar {
        let (a, b) = (self.0, o.0);
        Scalar([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }
}

impl SubAssign for Scalar {
    #[inline]
    fn sub_assign(&mut self, o: Scalar) {
        *self = *self - o;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    #[inline]
    fn neg(self) -> Scalar {
        self.scale(-1.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    /// Hamilton product: `i j = k`, `j k = i`, `k i = j`.
    #[inline]
    fn mul(self, o: Scalar) -> Scalar {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Scalar([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

impl Mul<f64> for Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, t: f64) -> Scalar {
        self.scale(t)
    }
}

/// `Σ_k conj(u_k) v_k` on raw slices. Callers check lengths.
#[inline]
pub fn inner_slices(u: &[Scalar], v: &[Scalar]) -> Scalar {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = Scalar::ZERO;
    for (a, b) in u.iter().zip(v) {
        acc += a.conj_mul(b);
    }
    acc
}

#[inline]
pub fn norm_sq_slice(u: &[Scalar]) -> f64 {
    u.iter().map(Scalar::norm_sq).sum()
}

/// A vector in `F^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FVector {
    field: Field,
    entries: Vec<Scalar>,
}

impl FVector {
    pub fn new(field: Field, entries: Vec<Scalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("a vector needs at least one entry".into()));
        }
        if let Some(pos) = entries.iter().position(|s| !field.contains(s)) {
            return Err(Error::FieldMismatch(format!("entry {pos} of the vector does not lie in {field}")));
        }
        Ok(FVector { field, entries })
    }

    pub fn zeros(field: Field, dim: usize) -> Self {
        FVector { field, entries: vec![Scalar::ZERO; dim] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FVector) -> Result<Scalar> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "inner product of vectors over {} and {}",
                self.field, other.field
            )));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of vectors of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(inner_slices(&self.entries, &other.entries))
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq_slice(&self.entries)
    }

    /// Right scalar multiplication `u · λ`.
    pub fn scale_right(&self, lambda: Scalar) -> Result<FVector> {
        if !self.field.contains(&lambda) {
            return Err(Error::FieldMismatch(format!("scalar does not lie in {}", self.field)));
        }
        Ok(FVector { field: self.field, entries: self.entries.iter().map(|s| *s * lambda).collect() })
    }

    pub fn add(&self, other: &FVector) -> Result<FVector> {
        self.inner(other)?;
        Ok(FVector {
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| *a + *b).collect(),
        })
    }
}
