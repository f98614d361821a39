use std::fmt::Debug;

use num_complex::Complex64;

use crate::arith::{int, ArithError, QExpr, Scalar};

/// Coefficient arithmetic used by the morphism operations.
pub trait Field: Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn conj(&self, a: &Self::Elem) -> Self::Elem;
    /// Structurally zero; used only to skip work.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_qexpr(&self, e: &QExpr) -> Result<Self::Elem, ArithError>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Symbolic coefficients; results are closed-form trees.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exact;

impl Field for Exact {
    type Elem = QExpr;

    fn zero(&self) -> QExpr {
        int(0)
    }

    fn one(&self) -> QExpr {
        int(1)
    }

    fn add(&self, a: &QExpr, b: &QExpr) -> QExpr {
        if a.is_zero_literal() {
            return b.clone();
        }
        if b.is_zero_literal() {
            return a.clone();
        }
        a.clone() + b.clone()
    }

    fn mul(&self, a: &QExpr, b: &QExpr) -> QExpr {
        if a.is_zero_literal() || b.is_zero_literal() {
            return int(0);
        }
        if *a == int(1) {
            return b.clone();
        }
        if *b == int(1) {
            return a.clone();
        }
        a.clone() * b.clone()
    }

    fn neg(&self, a: &QExpr) -> QExpr {
        -a.clone()
    }

    fn conj(&self, a: &QExpr) -> QExpr {
        match a {
            QExpr::Rat(_) | QExpr::QInt(_) => a.clone(),
            _ => a.clone().conj(),
        }
    }

    fn is_zero(&self, a: &QExpr) -> bool {
        a.is_zero_literal()
    }

    fn from_qexpr(&self, e: &QExpr) -> Result<QExpr, ArithError> {
        Ok(e.clone())
    }
}

/// Certified complex balls at a fixed precision.
#[derive(Clone, Copy, Debug)]
pub struct Balls {
    pub precision: u32,
}

impl Balls {
    pub fn new(precision: u32) -> Self {
        Balls { precision }
    }
}

impl Field for Balls {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        Scalar::zero(self.precision)
    }

    fn one(&self) -> Scalar {
        Scalar::one(self.precision)
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a.add(b)
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a.mul(b)
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        a.neg()
    }

    fn conj(&self, a: &Scalar) -> Scalar {
        a.conj()
    }

    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_exact_zero()
    }

    fn from_qexpr(&self, e: &QExpr) -> Result<Scalar, ArithError> {
        e.eval(self.precision)
    }
}

/// Double-precision complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Floats;

impl Field for Floats {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }

    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }

    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }

    fn conj(&self, a: &Complex64) -> Complex64 {
        a.conj()
    }

    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }

    fn from_qexpr(&self, e: &QExpr) -> Result<Complex64, ArithError> {
        let (re, im) = e.to_c64()?;
        Ok(Complex64::new(re, im))
    }
}
