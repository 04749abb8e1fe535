//! Hybrid transforms of one-critical filtrations.
//!
//! With `K` a primitive of the kernel `κ` that vanishes at `+∞`, the
//! transform of a filtration is the finite sum
//! `HT(ξ) = −Σ_σ (−1)^dim σ · K(⟨ξ, t(σ)⟩)`, which equals
//! `∫ κ(s) · ECC_ξ(s) ds` where `ECC_ξ` is the Euler curve of the pushforward
//! along `ξ`. [`numeric_ht_oracle`] evaluates the integral form by quadrature
//! for cross-checking.
//!
//! The cosine kernel is not integrable; for it the finite sum is evaluated
//! formally and does not correspond to a convergent integral.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::MultiFiltration;
use crate::error::{Error, Result};
use crate::euler::{percentile, pooled_axis_values, pushforward, Axis, GridSpec, ProfileGrid};

pub type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A primitive kernel `K` together with the properties the transform needs.
#[derive(Clone)]
pub struct PrimitiveKernel {
    name: String,
    param: Option<f64>,
    eval: KernelFn,
    vanishes_at_infinity: bool,
    support: Option<f64>,
    accepts_negative: bool,
    /// `K(s)` is exactly zero (the exponential underflows) for all `s` past
    /// this point, so those terms can be skipped without changing any bit
    /// of the result.
    zero_from: Option<f64>,
}

/// `e^{−x}` is exactly `0.0` in `f64` for `x` beyond about 745.1.
const EXP_UNDERFLOW: f64 = 750.0;

impl fmt::Debug for PrimitiveKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimitiveKernel")
            .field("name", &self.name)
            .field("param", &self.param)
            .field("vanishes_at_infinity", &self.vanishes_at_infinity)
            .field("support", &self.support)
            .field("accepts_negative", &self.accepts_negative)
            .finish()
    }
}

/// Points at which kernels are probed for finiteness and decay.
const PROBES: [f64; 9] = [0.0, 1e-3, 0.1, 1.0, 10.0, 1e2, 1e3, 1e4, 1e6];

/// `s ↦ s^p`, using repeated multiplication for small integer exponents.
fn power(p: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    let int = (p.fract() == 0.0 && p <= 32.0).then_some(p as i32);
    move |s: f64| match int {
        Some(n) => s.powi(n),
        None => s.powf(p),
    }
}

fn check_exponent(p: f64) -> Result<f64> {
    if p.is_finite() && p > 0.0 {
        Ok(p)
    } else {
        Err(Error::InvalidArgument(format!(
            "kernel exponent must be positive, got {p}"
        )))
    }
}

impl PrimitiveKernel {
    /// `K(s) = −e^{−s}`.
    pub fn exp_neg() -> Self {
        PrimitiveKernel {
            name: "exp_neg".into(),
            param: None,
            eval: Arc::new(|s: f64| -(-s).exp()),
            vanishes_at_infinity: true,
            support: None,
            accepts_negative: false,
            zero_from: Some(EXP_UNDERFLOW),
        }
    }

    /// `K(s) = −e^{−s^p}`.
    pub fn exp_pow(p: f64) -> Result<Self> {
        let p = check_exponent(p)?;
        let pow = power(p);
        Ok(PrimitiveKernel {
            name: "exp_pow".into(),
            param: Some(p),
            eval: Arc::new(move |s: f64| -(-pow(s)).exp()),
            vanishes_at_infinity: true,
            support: None,
            accepts_negative: false,
            zero_from: Some(EXP_UNDERFLOW.powf(1.0 / p)),
        })
    }

    /// `K(s) = −s^p e^{−s^p}`.
    pub fn pow_exp_pow(p: f64) -> Result<Self> {
        let p = check_exponent(p)?;
        let pow = power(p);
        Ok(PrimitiveKernel {
            name: "pow_exp_pow".into(),
            param: Some(p),
            eval: Arc::new(move |s: f64| {
                let sp = pow(s);
                -sp * (-sp).exp()
            }),
            vanishes_at_infinity: true,
            support: None,
            accepts_negative: false,
            zero_from: Some(EXP_UNDERFLOW.powf(1.0 / p)),
        })
    }

    /// `K(s) = cos(s)`; does not vanish at infinity.
    pub fn cosine() -> Self {
        PrimitiveKernel {
            name: "cosine".into(),
            param: None,
            eval: Arc::new(f64::cos),
            vanishes_at_infinity: false,
            support: None,
            accepts_negative: false,
            zero_from: None,
        }
    }

    /// A user-supplied primitive. `support` is `Some(T)` when `κ` vanishes
    /// outside `[0, T]`. The kernel is probed for finiteness (and decay, if
    /// declared) before being accepted.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        vanishes_at_infinity: bool,
        support: Option<f64>,
        accepts_negative: bool,
    ) -> Result<Self> {
        let k = PrimitiveKernel {
            name: name.into(),
            param: None,
            eval: Arc::new(eval),
            vanishes_at_infinity,
            support,
            accepts_negative,
            zero_from: None,
        };
        k.check()?;
        Ok(k)
    }

    /// Finite on the probe set, and `|K(10^6)| < 1e-9` when declared vanishing.
    pub fn check(&self) -> Result<()> {
        for &s in &PROBES {
            let v = self.eval(s);
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "kernel {} is not finite at {s}: {v}",
                    self.spec_string()
                )));
            }
        }
        if self.vanishes_at_infinity && self.eval(1e6).abs() >= 1e-9 {
            return Err(Error::Numeric(format!(
                "kernel {} is declared to vanish at infinity but K(1e6) = {}",
                self.spec_string(),
                self.eval(1e6)
            )));
        }
        if let Some(t) = self.support {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "kernel support bound must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn param(&self) -> Option<f64> {
        self.param
    }

    pub fn vanishes_at_infinity(&self) -> bool {
        self.vanishes_at_infinity
    }

    pub fn support(&self) -> Option<f64> {
        self.support
    }

    pub fn accepts_negative(&self) -> bool {
        self.accepts_negative
    }

    /// `name` or `name:p`, the form accepted by [`FromStr`].
    pub fn spec_string(&self) -> String {
        match self.param {
            Some(p) => format!("{}:{}", self.name, p),
            None => self.name.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }
}

impl FromStr for PrimitiveKernel {
    type Err = Error;

    /// Parses `exp_neg`, `exp_pow:<p>`, `pow_exp_pow:<p>` or `cosine`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let exponent = || -> Result<f64> {
            let p = param.ok_or_else(|| {
                Error::InvalidArgument(format!("kernel `{name}` needs an exponent, e.g. `{name}:2`"))
            })?;
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad kernel exponent `{p}`")))
        };
        match name {
            "exp_neg" | "cosine" if param.is_some() => Err(Error::InvalidArgument(format!(
                "kernel `{name}` takes no parameter"
            ))),
            "exp_neg" => Ok(Self::exp_neg()),
            "cosine" => Ok(Self::cosine()),
            "exp_pow" => Self::exp_pow(exponent()?),
            "pow_exp_pow" => Self::pow_exp_pow(exponent()?),
            _ => Err(Error::UnknownKernel(s.to_string())),
        }
    }
}

/// Grid over the dual cone: like a [`GridSpec`] but with non-negative axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualGridSpec {
    grid: GridSpec,
}

impl DualGridSpec {
    pub fn new(grid: GridSpec) -> Result<Self> {
        if let Some(a) = grid.axes.iter().find(|a| !(a.min >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "dual grid axes must be non-negative, got lower bound {}",
                a.min
            )));
        }
        Ok(DualGridSpec { grid })
    }

    pub fn from_bounds(bounds: &[(f64, f64)], resolution: &[usize]) -> Result<Self> {
        Self::new(GridSpec::from_bounds(bounds, resolution)?)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn into_grid(self) -> GridSpec {
        self.grid
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }
}

fn check_arguments(filtration: &MultiFiltration, kernel: &PrimitiveKernel) -> Result<()> {
    if kernel.accepts_negative {
        return Ok(());
    }
    if let Some(&v) = filtration.raw_values().iter().find(|v| **v < 0.0) {
        return Err(Error::NegativeArgument {
            kernel: kernel.spec_string(),
            value: v,
        });
    }
    Ok(())
}

/// Simplices per block; blocks are summed in index order so results do not
/// depend on the thread count.
const BLOCK: usize = 4096;

/// Calls `f(flat, Σ_i per_axis[i][k_i])` for every grid index in row-major
/// order, reusing partial sums of the leading axes. When `last_nondecreasing`
/// holds, the rest of a row is skipped once the sum reaches `cutoff`.
fn for_each_dot(
    per_axis: &[Vec<f64>],
    cutoff: f64,
    last_nondecreasing: bool,
    mut f: impl FnMut(usize, f64),
) {
    let m = per_axis.len();
    let last = &per_axis[m - 1];
    let mut idx = vec![0usize; m - 1];
    let mut partial = vec![0.0; m]; // partial[i] = Σ_{j < i} per_axis[j][idx[j]]
    for i in 0..m - 1 {
        partial[i + 1] = partial[i] + per_axis[i][0];
    }
    let mut flat = 0;
    loop {
        let base = partial[m - 1];
        for (k, &x) in last.iter().enumerate() {
            let dot = base + x;
            if last_nondecreasing && dot >= cutoff {
                break;
            }
            f(flat + k, dot);
        }
        flat += last.len();
        // advance the odometer over the leading axes
        let mut ax = m - 1;
        loop {
            if ax == 0 {
                return;
            }
            ax -= 1;
            idx[ax] += 1;
            if idx[ax] < per_axis[ax].len() {
                break;
            }
            idx[ax] = 0;
        }
        for i in ax..m - 1 {
            partial[i + 1] = partial[i] + per_axis[i][idx[i]];
        }
    }
}

/// Evaluates the hybrid transform on every point of `spec`.
pub fn hybrid_transform(
    filtration: &MultiFiltration,
    kernel: &PrimitiveKernel,
    spec: &DualGridSpec,
) -> Result<ProfileGrid<f64>> {
    if spec.m() != filtration.m() {
        return Err(Error::DimensionMismatch {
            expected: filtration.m(),
            got: spec.m(),
        });
    }
    check_arguments(filtration, kernel)?;
    let grid = spec.grid();
    let xi: Vec<Vec<f64>> = grid.axes.iter().map(Axis::coordinates).collect();
    let size = grid.len();
    let m = filtration.m();
    let n = filtration.len();
    let cutoff = kernel.zero_from.unwrap_or(f64::INFINITY);

    let blocks: Vec<Vec<f64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; size];
            let mut per_axis: Vec<Vec<f64>> = xi.iter().map(|c| vec![0.0; c.len()]).collect();
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                let t = filtration.value(i);
                let sign = filtration.simplex(i).sign() as f64;
                for a in 0..m {
                    for (dst, &x) in per_axis[a].iter_mut().zip(&xi[a]) {
                        *dst = x * t[a];
                    }
                }
                // Grid axes are ascending, so a non-negative last coordinate
                // makes each row of dot products non-decreasing.
                let monotone = cutoff.is_finite() && t[m - 1] >= 0.0;
                for_each_dot(&per_axis, cutoff, monotone, |k, dot| {
                    acc[k] -= sign * kernel.eval(dot)
                });
            }
            acc
        })
        .collect();
    let mut data = vec![0.0; size];
    for block in blocks {
        for (d, x) in data.iter_mut().zip(block) {
            *d += x;
        }
    }
    ProfileGrid::new(grid.clone(), data)
}

/// The hybrid transform at a single direction.
pub fn ht_at(filtration: &MultiFiltration, kernel: &PrimitiveKernel, xi: &[f64]) -> Result<f64> {
    if xi.len() != filtration.m() {
        return Err(Error::DimensionMismatch {
            expected: filtration.m(),
            got: xi.len(),
        });
    }
    let axes = xi
        .iter()
        .map(|&x| Axis::single(x))
        .collect::<Result<Vec<_>>>()?;
    let spec = DualGridSpec::new(GridSpec::new(axes)?)?;
    Ok(hybrid_transform(filtration, kernel, &spec)?.data[0])
}

/// `λ ↦ HT(λ ξ)`, computed as the one-parameter transform of the pushforward
/// along `xi`.
pub fn restriction_curve(
    filtration: &MultiFiltration,
    kernel: &PrimitiveKernel,
    xi: &[f64],
    lambdas: &DualGridSpec,
) -> Result<ProfileGrid<f64>> {
    if lambdas.m() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: lambdas.m(),
        });
    }
    hybrid_transform(&pushforward(filtration, xi)?, kernel, lambdas)
}

/// Dual grid with axis `i` spanning `[0, alpha / v_i]`, where `v_i` is the
/// `p_i` percentile of the critical values on axis `i`.
pub fn ht_quantile_grid(
    filtration: &MultiFiltration,
    p: &[f64],
    alpha: f64,
    resolution: &[usize],
) -> Result<DualGridSpec> {
    ht_quantile_grid_pooled(&[filtration], p, alpha, resolution)
}

/// [`ht_quantile_grid`] with percentiles taken over several filtrations.
pub fn ht_quantile_grid_pooled(
    filtrations: &[&MultiFiltration],
    p: &[f64],
    alpha: f64,
    resolution: &[usize],
) -> Result<DualGridSpec> {
    let first = filtrations
        .first()
        .ok_or_else(|| Error::Empty("no filtrations".into()))?;
    let m = first.m();
    if filtrations.iter().any(|f| f.m() != m) {
        return Err(Error::InvalidArgument(
            "filtrations have different parameter counts".into(),
        ));
    }
    for got in [p.len(), resolution.len()] {
        if got != m {
            return Err(Error::DimensionMismatch { expected: m, got });
        }
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let mut axes = Vec::with_capacity(m);
    for i in 0..m {
        if !(0.0..=1.0).contains(&p[i]) {
            return Err(Error::InvalidArgument(format!(
                "quantile must lie in [0, 1], got {}",
                p[i]
            )));
        }
        let values = pooled_axis_values(filtrations, i);
        if values.is_empty() {
            return Err(Error::Empty("filtrations have no simplices".into()));
        }
        let v = percentile(&values, p[i]);
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "axis {i}: the {} quantile of the critical values is {v}; it must be positive",
                p[i]
            )));
        }
        axes.push(Axis::new(0.0, alpha / v, resolution[i])?);
    }
    DualGridSpec::new(GridSpec::new(axes)?)
}

/// Magnitude below which the kernel tail is treated as zero.
const TAIL_CUTOFF: f64 = 1e-10;
const DIFF_STEP: f64 = 1e-4;

/// Evaluates `∫ κ(s) · ECC_ξ(s) ds` by quadrature, with `κ` obtained from
/// `K` by central differences. The integral is split at the critical values
/// of the pushforward, where the Euler curve jumps, and each piece is
/// integrated with the composite midpoint rule of step at most `quad_step`.
///
/// Intended for verification only.
pub fn numeric_ht_oracle(
    filtration: &MultiFiltration,
    kernel: &PrimitiveKernel,
    xi: &[f64],
    quad_step: f64,
) -> Result<f64> {
    if !(quad_step > 0.0 && quad_step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "quadrature step must be positive, got {quad_step}"
        )));
    }
    if !kernel.vanishes_at_infinity && kernel.support.is_none() {
        return Err(Error::InvalidArgument(format!(
            "kernel {} neither vanishes at infinity nor has bounded support; \
             its integral does not converge",
            kernel.spec_string()
        )));
    }
    check_arguments(filtration, kernel)?;
    let pushed = pushforward(filtration, xi)?;
    let mut events: Vec<(f64, i64)> = pushed
        .iter()
        .map(|(s, t)| (t[0], s.sign()))
        .collect();
    if events.is_empty() {
        return Ok(0.0);
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let s_max = events.last().unwrap().0;
    let end = match kernel.support {
        Some(t) => s_max.max(t),
        None => {
            let mut tail = 1.0;
            while kernel.eval(s_max + tail).abs() >= TAIL_CUTOFF {
                tail *= 2.0;
                if tail > 1e12 {
                    return Err(Error::Numeric(format!(
                        "kernel {} does not decay below {TAIL_CUTOFF}",
                        kernel.spec_string()
                    )));
                }
            }
            s_max + tail
        }
    };

    let delta = DIFF_STEP.min(quad_step / 4.0);
    let kappa = |s: f64| (kernel.eval(s + delta) - kernel.eval(s - delta)) / (2.0 * delta);
    let integrate = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let pieces = ((b - a) / quad_step).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .map(|j| kappa(a + (j as f64 + 0.5) * h))
            .sum::<f64>()
            * h
    };

    let mut total = 0.0;
    let mut chi = 0i64;
    let mut i = 0;
    while i < events.len() {
        let s = events[i].0;
        while i < events.len() && events[i].0 == s {
            chi += events[i].1;
            i += 1;
        }
        let next = if i < events.len() { events[i].0 } else { end };
        if chi != 0 {
            total += chi as f64 * integrate(s, next);
        }
    }
    Ok(total)
}
