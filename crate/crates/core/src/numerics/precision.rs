//! Decimal-denominated working precision.

/// Requested precision in decimal digits plus guard digits carried
/// internally to absorb rounding in long evaluation chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

/// log2(10), rounded up a hair so bit budgets never undershoot.
const LOG2_10: f64 = 3.321928094887363;

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 16;
    pub const DEFAULT_GUARD: u32 = 10;

    /// Context with the default guard. `digits` is clamped up to
    /// [`Self::MIN_DIGITS`].
    pub fn new(digits: u32) -> Self {
        Self::with_guard(digits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Self {
        PrecisionContext {
            digits: digits.max(Self::MIN_DIGITS),
            guard,
        }
    }

    /// Requested decimal digits (without guard).
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Total binary precision: `ceil((digits + guard) * log2(10))`.
    pub fn bits(&self) -> usize {
        let total = (self.digits + self.guard) as f64;
        (total * LOG2_10).ceil() as usize
    }

    /// Same guard, more digits; used for intermediate steps that need
    /// headroom beyond the caller's request.
    pub fn widened(&self, extra_digits: u32) -> Self {
        Self::with_guard(self.digits + extra_digits, self.guard)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enforces_digit_floor() {
        assert_eq!(PrecisionContext::new(4).digits(), 16);
        assert_eq!(PrecisionContext::new(50).digits(), 50);
    }

    #[test]
    fn bit_budget_covers_requested_digits() {
        let ctx = PrecisionContext::with_guard(100, 10);
        // 110 digits need ceil(110 * 3.3219...) = 366 bits
        assert_eq!(ctx.bits(), 366);
        assert!(PrecisionContext::new(16).bits() >= 87);
    }

    #[test]
    fn widening_adds_digits_keeps_guard() {
        let ctx = PrecisionContext::with_guard(40, 7).widened(20);
        assert_eq!(ctx.digits(), 60);
        assert_eq!(ctx.guard(), 7);
    }
}
