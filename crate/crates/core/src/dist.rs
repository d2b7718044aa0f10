//! Parametric value and cost distributions.
//!
//! Every distribution here has a monotone hazard rate, so its virtual value
//! `φ(v) = v − (1 − F(v)) / f(v)` and virtual cost `θ(c) = c + F(c) / f(c)`
//! are nondecreasing. Those two maps are what the pricing strategies consume.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, composite_simpson, ROOT_MAX_ITER, ROOT_TOL};

/// Tail mass dropped when an unbounded support is truncated for grids and
/// quadrature.
pub const GRID_TAIL: f64 = 1e-9;

/// Number of grid points used by the construction-time monotonicity checks.
pub const MONOTONE_GRID_POINTS: usize = 1000;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Raw parameters in the configuration grammar.
///
/// `{"family": "exponential", "rate": 1.0}`,
/// `{"family": "uniform", "lo": 0.0, "hi": 1.0}`,
/// `{"family": "shifted-exponential", "rate": 2.0, "shift": 0.5}`,
/// `{"family": "truncated-normal", "mean": 1.0, "sigma": 0.5}`.
///
/// The truncated normal is cut at `lower` (zero unless the distribution was
/// produced by [`DistributionSpec::shift`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    Exponential {
        rate: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    ShiftedExponential {
        rate: f64,
        shift: f64,
    },
    TruncatedNormal {
        mean: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        lower: f64,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// A validated continuous MHR distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct DistributionSpec {
    family: Family,
}

impl TryFrom<Family> for DistributionSpec {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        match family {
            Family::Exponential { rate } => Self::exponential(rate),
            Family::Uniform { lo, hi } => Self::uniform(lo, hi),
            Family::ShiftedExponential { rate, shift } => Self::shifted_exponential(rate, shift),
            Family::TruncatedNormal { mean, sigma, lower } => Self::truncated_normal_at(mean, sigma, lower),
        }
    }
}

impl From<DistributionSpec> for Family {
    fn from(d: DistributionSpec) -> Family {
        d.family
    }
}

fn invalid(family: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        family,
        reason: reason.into(),
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(invalid("exponential", format!("rate must be positive, got {rate}")));
        }
        Ok(Self {
            family: Family::Exponential { rate },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("uniform", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self {
            family: Family::Uniform { lo, hi },
        })
    }

    pub fn shifted_exponential(rate: f64, shift: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(invalid("shifted-exponential", format!("rate must be positive, got {rate}")));
        }
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(invalid("shifted-exponential", format!("shift must be nonnegative, got {shift}")));
        }
        Ok(Self {
            family: Family::ShiftedExponential { rate, shift },
        })
    }

    /// Normal(`mean`, `sigma`) conditioned on being at least zero.
    pub fn truncated_normal(mean: f64, sigma: f64) -> Result<Self> {
        Self::truncated_normal_at(mean, sigma, 0.0)
    }

    fn truncated_normal_at(mean: f64, sigma: f64, lower: f64) -> Result<Self> {
        if !(mean.is_finite() && lower.is_finite()) {
            return Err(invalid("truncated-normal", "mean and lower bound must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("truncated-normal", format!("sigma must be positive, got {sigma}")));
        }
        let d = Self {
            family: Family::TruncatedNormal { mean, sigma, lower },
        };
        // The hazard rate is log-concave-monotone in exact arithmetic; the grid
        // check guards against parameter ranges where the floating point
        // evaluation stops being trustworthy.
        if let Some(worst) = d.hazard_violation(MONOTONE_GRID_POINTS) {
            return Err(invalid("truncated-normal", format!("hazard rate not monotone on grid (dip {worst:e})")));
        }
        if let Some(worst) = d.virtual_cost_violation(MONOTONE_GRID_POINTS) {
            return Err(invalid("truncated-normal", format!("virtual cost not monotone on grid (dip {worst:e})")));
        }
        Ok(d)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Short family name as used in the configuration grammar.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Exponential { .. } => "exponential",
            Family::Uniform { .. } => "uniform",
            Family::ShiftedExponential { .. } => "shifted-exponential",
            Family::TruncatedNormal { .. } => "truncated-normal",
        }
    }

    /// Lower end of the support.
    pub fn lo(&self) -> f64 {
        match self.family {
            Family::Exponential { .. } => 0.0,
            Family::Uniform { lo, .. } => lo,
            Family::ShiftedExponential { shift, .. } => shift,
            Family::TruncatedNormal { lower, .. } => lower,
        }
    }

    /// Upper end of the support, possibly infinite.
    pub fn hi(&self) -> f64 {
        match self.family {
            Family::Uniform { hi, .. } => hi,
            _ => f64::INFINITY,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo(), self.hi())
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.lo() && z <= self.hi()
    }

    /// Upper end used for grids and quadrature: the support's upper end when
    /// finite, otherwise the `1 − GRID_TAIL` quantile.
    pub fn grid_upper(&self) -> f64 {
        let hi = self.hi();
        if hi.is_finite() {
            hi
        } else {
            self.quantile(1.0 - GRID_TAIL)
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        if !self.contains(z) {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => rate * (-rate * z).exp(),
            Family::Uniform { lo, hi } => 1.0 / (hi - lo),
            Family::ShiftedExponential { rate, shift } => rate * (-rate * (z - shift)).exp(),
            Family::TruncatedNormal { mean, sigma, lower } => {
                let x = (z - mean) / sigma;
                let a = (lower - mean) / sigma;
                (ln_std_pdf(x) - ln_std_sf(a)).exp() / sigma
            }
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= self.lo() {
            return 0.0;
        }
        if z >= self.hi() {
            return 1.0;
        }
        match self.family {
            Family::Exponential { rate } => -(-rate * z).exp_m1(),
            Family::Uniform { lo, hi } => (z - lo) / (hi - lo),
            Family::ShiftedExponential { rate, shift } => -(-rate * (z - shift)).exp_m1(),
            Family::TruncatedNormal { .. } => -self.ln_survival(z).exp_m1(),
        }
    }

    /// `1 − F(z)`, computed without cancellation in the upper tail.
    pub fn survival(&self, z: f64) -> f64 {
        if z <= self.lo() {
            return 1.0;
        }
        if z >= self.hi() {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => (-rate * z).exp(),
            Family::Uniform { lo, hi } => (hi - z) / (hi - lo),
            Family::ShiftedExponential { rate, shift } => (-rate * (z - shift)).exp(),
            Family::TruncatedNormal { .. } => self.ln_survival(z).exp(),
        }
    }

    fn ln_survival(&self, z: f64) -> f64 {
        match self.family {
            Family::TruncatedNormal { mean, sigma, lower } => {
                let x = (z.max(lower) - mean) / sigma;
                let a = (lower - mean) / sigma;
                (ln_std_sf(x) - ln_std_sf(a)).min(0.0)
            }
            _ => self.survival(z).ln(),
        }
    }

    /// Inverse CDF. `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if u >= 1.0 {
            return self.hi();
        }
        match self.family {
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Uniform { lo, hi } => lo + u * (hi - lo),
            Family::ShiftedExponential { rate, shift } => shift - (-u).ln_1p() / rate,
            Family::TruncatedNormal { mean, sigma, lower } => {
                if u <= 0.0 {
                    return lower;
                }
                let a = (lower - mean) / sigma;
                let target = (-u).ln_1p() + ln_std_sf(a);
                // Newton on ln Φc(x) = target from a rational first guess;
                // the slope is −1 / Mills ratio.
                let q = target.exp();
                let mut x = if q > 0.0 { (-std_normal_quantile(q)).max(a) } else { a };
                for _ in 0..60 {
                    let ls = ln_std_sf(x);
                    let mills = if x < 5.0 { (ls - ln_std_pdf(x)).exp() } else { mills_cf(x) };
                    let step = (ls - target) * mills;
                    if !step.is_finite() {
                        break;
                    }
                    x += step;
                    if step.abs() <= 1e-13 * (1.0 + x.abs()) {
                        return mean + sigma * x.max(a);
                    }
                }
                // Fallback: bracket then bisect in standard units.
                let mut step = 1.0;
                let mut hi = a + step;
                while ln_std_sf(hi) > target {
                    step *= 2.0;
                    hi = a + step;
                }
                let x = bisect_increasing(|x| -ln_std_sf(x), -target, a, hi, ROOT_TOL / sigma, ROOT_MAX_ITER);
                mean + sigma * x
            }
        }
    }

    /// Hazard rate `f / (1 − F)` on the closed support; infinite at a finite
    /// upper end.
    pub fn hazard_rate(&self, z: f64) -> Result<f64> {
        self.check_support("z", z)?;
        Ok(self.hazard_unchecked(z))
    }

    fn hazard_unchecked(&self, z: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } | Family::ShiftedExponential { rate, .. } => rate,
            Family::Uniform { hi, .. } => {
                if z >= hi {
                    f64::INFINITY
                } else {
                    1.0 / (hi - z)
                }
            }
            Family::TruncatedNormal { mean, sigma, .. } => {
                let x = (z - mean) / sigma;
                (ln_std_pdf(x) - ln_std_sf(x)).exp() / sigma
            }
        }
    }

    /// Virtual value `φ(v) = v − 1 / hr(v)`.
    pub fn virtual_value(&self, v: f64) -> Result<f64> {
        self.check_support("v", v)?;
        Ok(self.phi(v))
    }

    /// Virtual cost `θ(c) = c + F(c) / f(c)`.
    pub fn virtual_cost(&self, c: f64) -> Result<f64> {
        self.check_support("c", c)?;
        Ok(self.theta(c))
    }

    pub(crate) fn phi(&self, v: f64) -> f64 {
        let v = v.clamp(self.lo(), self.hi());
        match self.family {
            Family::Exponential { rate } | Family::ShiftedExponential { rate, .. } => v - 1.0 / rate,
            Family::Uniform { hi, .. } => 2.0 * v - hi,
            Family::TruncatedNormal { mean, sigma, .. } => {
                let x = (v - mean) / sigma;
                v - sigma * mills_ratio(x)
            }
        }
    }

    pub(crate) fn theta(&self, c: f64) -> f64 {
        let c = c.clamp(self.lo(), self.hi());
        match self.family {
            Family::Exponential { rate } => c + (rate * c).exp_m1() / rate,
            Family::ShiftedExponential { rate, shift } => c + (rate * (c - shift)).exp_m1() / rate,
            Family::Uniform { lo, .. } => 2.0 * c - lo,
            Family::TruncatedNormal { .. } => {
                if c <= self.lo() {
                    return c;
                }
                c + self.cdf(c) / self.pdf(c)
            }
        }
    }

    /// Virtual-value and virtual-cost views that clamp their argument into
    /// the support instead of failing.
    pub fn virtual_maps(&self) -> VirtualMaps<'_> {
        VirtualMaps { owner: self }
    }

    /// The `v` with `φ(v) = r`; clamps to the support ends when `r` lies
    /// outside `[φ(lo), φ(hi)]`.
    pub fn inverse_virtual_value(&self, r: f64) -> f64 {
        let lo = self.lo();
        if r.is_nan() || r <= self.phi(lo) {
            return lo;
        }
        let hi = self.hi();
        if hi.is_finite() && r >= self.phi(hi) {
            return hi;
        }
        match self.family {
            Family::Exponential { rate } | Family::ShiftedExponential { rate, .. } => r + 1.0 / rate,
            Family::Uniform { hi, .. } => 0.5 * (r + hi),
            Family::TruncatedNormal { .. } => {
                // φ(v) ≥ v − 1/hr(lo) under MHR, which gives the upper bracket.
                let upper = r + 1.0 / self.hazard_unchecked(lo) + 1.0;
                bisect_increasing(|v| self.phi(v), r, lo, upper, ROOT_TOL, ROOT_MAX_ITER)
            }
        }
    }

    /// Translates the distribution right by `delta ≥ 0`.
    pub fn shift(&self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Domain(format!("shift must be finite and nonnegative, got {delta}")));
        }
        let family = match self.family {
            Family::Exponential { rate } => Family::ShiftedExponential { rate, shift: delta },
            Family::Uniform { lo, hi } => Family::Uniform {
                lo: lo + delta,
                hi: hi + delta,
            },
            Family::ShiftedExponential { rate, shift } => Family::ShiftedExponential {
                rate,
                shift: shift + delta,
            },
            Family::TruncatedNormal { mean, sigma, lower } => Family::TruncatedNormal {
                mean: mean + delta,
                sigma,
                lower: lower + delta,
            },
        };
        Ok(Self { family })
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// `∫_lo^z hr(x) dx` by composite Simpson with `panels` panels.
    pub fn integrated_hazard(&self, z: f64, panels: usize) -> f64 {
        let lo = self.lo();
        let z = z.min(self.hi());
        composite_simpson(|x| self.hazard_unchecked(x), lo, z, panels)
    }

    /// Largest dip of the hazard rate on an evenly spaced grid, if any dip
    /// exceeds `1e-9` (relative to the hazard's magnitude).
    pub fn hazard_violation(&self, points: usize) -> Option<f64> {
        worst_dip(self.grid(points).map(|z| self.hazard_unchecked(z)))
    }

    /// Largest dip of the virtual value on the grid, if any.
    pub fn virtual_value_violation(&self, points: usize) -> Option<f64> {
        worst_dip(self.grid(points).map(|z| self.phi(z)))
    }

    /// Largest dip of the virtual cost on the grid, if any.
    pub fn virtual_cost_violation(&self, points: usize) -> Option<f64> {
        worst_dip(self.grid(points).map(|z| self.theta(z)))
    }

    /// `points` evenly spaced points on `[lo, grid_upper]`.
    pub fn grid(&self, points: usize) -> impl Iterator<Item = f64> {
        let lo = self.lo();
        let hi = self.grid_upper();
        let steps = points.max(2) - 1;
        (0..=steps).map(move |k| {
            if k == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / steps as f64
            }
        })
    }

    fn check_support(&self, what: &'static str, z: f64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfSupport {
                what,
                value: z,
                lo: self.lo(),
                hi: self.hi(),
            })
        }
    }
}

fn worst_dip(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut prev: Option<f64> = None;
    let mut worst = 0.0_f64;
    for v in values {
        if let Some(p) = prev {
            if p.is_finite() {
                let dip = (p - v) / p.abs().max(1.0);
                worst = worst.max(dip);
            }
        }
        prev = Some(v);
    }
    (worst > 1e-9).then_some(worst)
}

/// Derived virtual-value and virtual-cost maps of a distribution.
#[derive(Debug, Clone, Copy)]
pub struct VirtualMaps<'a> {
    pub owner: &'a DistributionSpec,
}

impl VirtualMaps<'_> {
    pub fn phi(&self, v: f64) -> f64 {
        self.owner.phi(v)
    }

    pub fn theta(&self, c: f64) -> f64 {
        self.owner.theta(c)
    }

    pub fn phi_inverse(&self, r: f64) -> f64 {
        self.owner.inverse_virtual_value(r)
    }
}

fn ln_std_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `ln Φc(x)` for the standard normal.
fn ln_std_sf(x: f64) -> f64 {
    if x < 5.0 {
        (0.5 * libm::erfc(x / std::f64::consts::SQRT_2)).ln()
    } else {
        ln_std_pdf(x) + mills_cf(x).ln()
    }
}

/// Mills ratio `Φc(x) / φ(x)`.
fn mills_ratio(x: f64) -> f64 {
    if x < 5.0 {
        (ln_std_sf(x) - ln_std_pdf(x)).exp()
    } else {
        mills_cf(x)
    }
}

/// Standard normal quantile by Acklam's rational approximation, relative
/// error about 1e-9. Only used to start Newton iterations.
fn std_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (-p).ln_1p()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Continued fraction `1 / (x + 1/(x + 2/(x + 3/(x + …))))`, accurate for
/// `x ≥ 5`.
fn mills_cf(x: f64) -> f64 {
    let mut t = x;
    for k in (1..=80).rev() {
        t = x + k as f64 / t;
    }
    1.0 / t
}
