//! Scalar time abstraction.
//!
//! Interval lists are generic over any primitive integer type. The engine
//! itself runs on [`crate::Tick`] (`i64`), which leaves room for window
//! boundaries that fall before the start of the stream.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::PrimInt;

/// Discrete, totally ordered time point.
///
/// Anything `PrimInt` qualifies. Dense time is not supported: the algebra
/// relies on `t + 1` being the immediate successor of `t`.
pub trait TimePoint: PrimInt + Hash + Debug + Display + Default + Send + Sync + 'static {
    /// Immediate successor, saturating at the type's maximum.
    #[inline]
    fn succ(self) -> Self {
        self.saturating_add(Self::one())
    }

    /// Immediate predecessor, saturating at the type's minimum.
    #[inline]
    fn pred(self) -> Self {
        self.saturating_sub(Self::one())
    }
}

impl<T> TimePoint for T where T: PrimInt + Hash + Debug + Display + Default + Send + Sync + 'static {}
