use std::fmt;
use std::ops::Add;

/// Exact non-negative dyadic rational `numerator / 2^exponent`, kept in
/// lowest terms (odd numerator, or `0/2^0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    numerator: u128,
    exponent: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational {
        numerator: 0,
        exponent: 0,
    };

    pub fn new(numerator: u128, exponent: u32) -> Self {
        DyadicRational {
            numerator,
            exponent,
        }
        .reduced()
    }

    /// `2^-exponent`.
    pub fn unit_fraction(exponent: u32) -> Self {
        DyadicRational {
            numerator: 1,
            exponent,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    /// Exponent of the reduced denominator.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let e = self.exponent.max(rhs.exponent);
        let a = self
            .numerator
            .checked_mul(1u128.checked_shl(e - self.exponent)?)?;
        let b = rhs
            .numerator
            .checked_mul(1u128.checked_shl(e - rhs.exponent)?)?;
        Some(DyadicRational::new(a.checked_add(b)?, e))
    }

    /// Least `n > 0` with `n * self` an integer.
    pub fn denominator(&self) -> Option<u64> {
        1u64.checked_shl(self.exponent)
    }

    fn reduced(self) -> Self {
        if self.numerator == 0 {
            return DyadicRational::ZERO;
        }
        let shift = self.numerator.trailing_zeros().min(self.exponent);
        DyadicRational {
            numerator: self.numerator >> shift,
            exponent: self.exponent - shift,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("dyadic overflow")
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // compare a with b * 2^d, where d >= 0 is the exponent gap
        fn against(a: u128, b: u128, d: u32) -> std::cmp::Ordering {
            if b != 0 && d >= b.leading_zeros() {
                std::cmp::Ordering::Less
            } else {
                a.cmp(&(b << d))
            }
        }
        if self.exponent >= other.exponent {
            against(
                self.numerator,
                other.numerator,
                self.exponent - other.exponent,
            )
        } else {
            against(
                other.numerator,
                self.numerator,
                other.exponent - self.exponent,
            )
            .reverse()
        }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
