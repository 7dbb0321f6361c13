//! Runtime options: precision budget, zero-test threshold, truncation caps.

use crate::ratio::{qi, Q};
use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, Clone)]
pub struct Options {
    /// Working precision for approximate scalars, in bits.
    pub precision: u32,
    /// Hard cap for precision escalation.
    pub precision_cap: u32,
    /// Zero-test threshold; `None` means `2^(-precision/2)`.
    pub eps: Option<Q>,
    /// Maximum number of terms kept per Puiseux arc.
    pub max_terms: usize,
    /// Series window cap, as a multiple of the germ's total degree.
    pub window_factor: u32,
    /// Seed for the sampling oracle.
    pub seed: u64,
    /// Trials per grid point in the sampling oracle.
    pub trials: usize,
    /// Worker threads (`None` = library default). Ignored without the
    /// `parallel` feature.
    pub threads: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            precision: 256,
            precision_cap: 4096,
            eps: None,
            max_terms: 64,
            window_factor: 4,
            seed: 0x5eed_cafe,
            trials: 5,
            threads: None,
        }
    }
}

impl Options {
    /// Effective zero-test threshold: configured value or `2^(-precision/2)`.
    pub fn eps(&self) -> Q {
        match &self.eps {
            Some(e) => e.clone(),
            None => Q::new(BigInt::one(), BigInt::one() << (self.precision / 2) as usize),
        }
    }

    /// Relative tolerance for equivalence matching (same default as `eps`).
    pub fn tol(&self) -> Q {
        self.eps()
    }

    /// Double the working precision; `None` once the cap is hit.
    pub fn escalate(&self) -> Option<Options> {
        if self.precision >= self.precision_cap {
            return None;
        }
        let mut next = self.clone();
        next.precision = (self.precision * 2).min(self.precision_cap);
        Some(next)
    }

    /// Series window cap for a germ of the given total degree.
    pub fn window_cap(&self, total_degree: u32) -> Q {
        qi((self.window_factor.max(1) * total_degree.max(1)) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q;

    #[test]
    fn default_eps_is_half_precision() {
        let opts = Options::default();
        assert_eq!(opts.eps(), Q::new(BigInt::one(), BigInt::one() << 128));
    }

    #[test]
    fn escalation_stops_at_cap() {
        let mut opts = Options::default();
        let mut steps = 0;
        while let Some(next) = opts.escalate() {
            opts = next;
            steps += 1;
        }
        assert_eq!(opts.precision, 4096);
        assert_eq!(steps, 4);
    }

    #[test]
    fn window_cap_scales_with_degree() {
        let opts = Options::default();
        assert_eq!(opts.window_cap(12), q(48, 1));
    }
}
