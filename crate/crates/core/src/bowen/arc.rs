//! Exact circle arcs with rational endpoints.
//!
//! For the doubling map with `eps < 1/4` every Bowen ball is an open arc,
//! the image of an arc under the map is again an arc of twice the length
//! (until it covers the circle), and all the set algebra needed by the
//! period and approximation operations reduces to exact comparisons of
//! rational endpoints.

use num_traits::{One, Signed, Zero};

use crate::rational::{fract_mod_one, Rat};

/// An open arc `(lo, lo + len)` on the circle `R / Z`, or the full circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleArc {
    lo: Rat,
    len: Rat,
}

impl CircleArc {
    /// Arc from a starting point and a length; lengths of one or more
    /// collapse to the full circle.
    pub fn new(lo: Rat, len: Rat) -> Self {
        assert!(!len.is_negative(), "arc length must be >= 0");
        if len >= Rat::one() {
            return Self::full();
        }
        Self { lo: fract_mod_one(&lo), len }
    }

    pub fn from_center_radius(center: &Rat, radius: &Rat) -> Self {
        assert!(radius.is_positive(), "radius must be > 0");
        Self::new(center - radius, radius + radius)
    }

    pub fn full() -> Self {
        Self { lo: Rat::zero(), len: Rat::one() }
    }

    pub fn is_full(&self) -> bool {
        self.len.is_one()
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    /// Upper endpoint, possibly beyond 1 (wrapping representative).
    pub fn hi(&self) -> Rat {
        &self.lo + &self.len
    }

    /// Arc length, which is also its Lebesgue measure.
    pub fn len(&self) -> &Rat {
        &self.len
    }

    /// Open-arc membership.
    pub fn contains(&self, x: &Rat) -> bool {
        if self.is_full() {
            return true;
        }
        let t = fract_mod_one(&(x - &self.lo));
        t.is_positive() && t < self.len
    }

    /// Image under the doubling map: an arc of twice the length (the map
    /// is a local homeomorphism, so the image of an arc is an arc),
    /// saturating at the full circle.
    pub fn double(&self) -> Self {
        let two = Rat::from_integer(2.into());
        Self::new(&self.lo * &two, &self.len * two)
    }

    /// Do the two open arcs share a point?
    pub fn intersects(&self, other: &Self) -> bool {
        if self.len.is_zero() || other.len.is_zero() {
            return false;
        }
        if self.is_full() || other.is_full() {
            return true;
        }
        let d1 = fract_mod_one(&(&other.lo - &self.lo));
        let d2 = fract_mod_one(&(&self.lo - &other.lo));
        d1 < self.len || d2 < other.len
    }
}
