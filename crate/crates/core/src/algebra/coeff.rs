use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Exact Gaussian rational, used to test algebraic identities without
/// roundoff.
pub type ExactComplex = Complex<BigRational>;

/// Scalar ring for polynomial coefficients.
pub trait Coefficient: Clone + Num + Neg<Output = Self> + PartialEq + Debug + Send + Sync {
    fn from_int(k: i64) -> Self;
    fn conjugate(&self) -> Self;
    /// Modulus as a double (approximate for exact types).
    fn magnitude(&self) -> f64;
}

impl Coefficient for Complex64 {
    #[inline]
    fn from_int(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    #[inline]
    fn conjugate(&self) -> Self {
        self.conj()
    }

    #[inline]
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for ExactComplex {
    fn from_int(k: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(k)), BigRational::zero())
    }

    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }
}

/// Gaussian rational `(re_num/re_den) + i (im_num/im_den)`.
pub fn exact(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> ExactComplex {
    Complex::new(
        BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
        BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
    )
}
