use super::structure::GROUND_F;
use super::AtomicError;

const SUBLEVELS: usize = (2 * GROUND_F + 1) as usize;
const SUM_TOLERANCE: f64 = 1e-12;

/// Occupation probabilities of the nine Zeeman sublevels m_F = −4…+4.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationDistribution {
    p: [f64; SUBLEVELS],
}

impl PopulationDistribution {
    /// Probabilities ordered from m_F = −4 to +4. They must be non-negative
    /// and sum to one within 1e-12.
    pub fn new(p: [f64; SUBLEVELS]) -> Result<Self, AtomicError> {
        if let Some(k) = p.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(AtomicError::InvalidPopulation(format!(
                "p(m={}) = {} is not a non-negative number",
                k as i32 - GROUND_F,
                p[k]
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(AtomicError::InvalidPopulation(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { p })
    }

    pub fn from_slice(p: &[f64]) -> Result<Self, AtomicError> {
        let arr: [f64; SUBLEVELS] = p.try_into().map_err(|_| {
            AtomicError::InvalidPopulation(format!("expected {SUBLEVELS} probabilities, got {}", p.len()))
        })?;
        Self::new(arr)
    }

    /// Rescales non-negative weights to unit sum.
    pub fn normalized(weights: [f64; SUBLEVELS]) -> Result<Self, AtomicError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(AtomicError::InvalidPopulation("weights must be non-negative with a positive sum".into()));
        }
        let mut p = weights.map(|w| w / sum);
        // Absorb rounding into the largest entry so the sum is exact to 1 ulp.
        let k = (0..SUBLEVELS).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap_or(0);
        let rest: f64 = (0..SUBLEVELS).filter(|&i| i != k).map(|i| p[i]).sum();
        p[k] = 1.0 - rest;
        Self::new(p)
    }

    /// Everything in sublevel `m`.
    pub fn stretched(m: i32) -> Result<Self, AtomicError> {
        Self::pumped(m, 1.0)
    }

    pub fn uniform() -> Self {
        Self { p: [1.0 / SUBLEVELS as f64; SUBLEVELS] }
    }

    /// Optical pumping into `target` with the given fidelity; the remaining
    /// `1 − fidelity` is spread evenly over the other eight sublevels.
    pub fn pumped(target: i32, fidelity: f64) -> Result<Self, AtomicError> {
        if target.abs() > GROUND_F {
            return Err(AtomicError::InvalidPopulation(format!("target sublevel m = {target} outside F = {GROUND_F}")));
        }
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(AtomicError::InvalidPopulation(format!("pump fidelity {fidelity} outside [0, 1]")));
        }
        let leak = (1.0 - fidelity) / (SUBLEVELS - 1) as f64;
        let mut p = [leak; SUBLEVELS];
        p[(target + GROUND_F) as usize] = fidelity;
        Self::normalized(p)
    }

    /// Population rising linearly from m = −4 to m = +4 (p ∝ m + 5).
    pub fn linear_ramp() -> Self {
        let w = std::array::from_fn(|k| (k + 1) as f64);
        Self::normalized(w).expect("positive ramp weights")
    }

    /// `p(m) → p(−m)`.
    pub fn reflected(&self) -> Self {
        let mut p = self.p;
        p.reverse();
        Self { p }
    }

    pub fn get(&self, m: i32) -> f64 {
        if m.abs() > GROUND_F {
            0.0
        } else {
            self.p[(m + GROUND_F) as usize]
        }
    }

    pub fn probabilities(&self) -> &[f64; SUBLEVELS] {
        &self.p
    }

    /// Pairs `(m, p(m))` from m = −4 upward.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.p.iter().enumerate().map(|(k, &p)| (k as i32 - GROUND_F, p))
    }

    /// Mean spin projection ⟨S_z⟩ = Σ m p(m).
    pub fn mean_m(&self) -> f64 {
        self.iter().map(|(m, p)| m as f64 * p).sum()
    }
}
