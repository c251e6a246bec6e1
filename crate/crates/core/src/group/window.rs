use super::{Carrier, CarrierTag};
use crate::error::{Error, Result};

/// The integers `[-N, N]` with partial addition; element `i` is the integer `i - N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerWindow {
    halfwidth: usize,
}

impl IntegerWindow {
    pub fn new(halfwidth: usize) -> Result<Self> {
        if halfwidth == 0 {
            return Err(Error::InvalidParameter("window halfwidth must be positive".into()));
        }
        Ok(Self { halfwidth })
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn value(&self, x: usize) -> i64 {
        x as i64 - self.halfwidth as i64
    }

    pub fn element(&self, m: i64) -> Option<usize> {
        let n = self.halfwidth as i64;
        (-n..=n).contains(&m).then(|| (m + n) as usize)
    }

    /// Elements with `|m| <= r`.
    pub fn centered(&self, r: usize) -> Vec<usize> {
        let r = r.min(self.halfwidth) as i64;
        (-r..=r).filter_map(|m| self.element(m)).collect()
    }
}

impl Carrier for IntegerWindow {
    fn size(&self) -> usize {
        2 * self.halfwidth + 1
    }

    fn identity(&self) -> usize {
        self.halfwidth
    }

    fn inverse(&self, x: usize) -> usize {
        2 * self.halfwidth - x
    }

    fn product(&self, x: usize, y: usize) -> Option<usize> {
        self.element(self.value(x) + self.value(y))
    }

    fn is_total(&self) -> bool {
        false
    }

    fn tag(&self) -> CarrierTag {
        CarrierTag::Window {
            halfwidth: self.halfwidth,
        }
    }

    fn element_name(&self, x: usize) -> String {
        self.value(x).to_string()
    }

    fn parse_element(&self, s: &str) -> Option<usize> {
        s.trim().parse().ok().and_then(|m| self.element(m))
    }

    fn schur_index_set(&self) -> Vec<usize> {
        self.centered(self.halfwidth / 2)
    }

    fn tuple_index_set(&self, d: usize) -> Vec<usize> {
        self.centered(self.halfwidth / d.max(1))
    }

    fn length(&self, x: usize) -> Option<usize> {
        Some(self.value(x).unsigned_abs() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_addition() {
        let w = IntegerWindow::new(3).unwrap();
        let e = |m| w.element(m).unwrap();
        assert_eq!(w.product(e(1), e(2)), Some(e(3)));
        assert_eq!(w.product(e(2), e(2)), None);
        assert_eq!(w.product(e(-3), e(3)), Some(w.identity()));
        assert_eq!(w.inverse(e(2)), e(-2));
        for x in 0..w.size() {
            for y in 0..w.size() {
                assert_eq!(w.product(x, y), w.product(y, x));
            }
        }
    }
}
