//! Special functions and scalar numerical routines.
//!
//! Everything here is a pure function of its inputs. The routines are small and
//! specialised for the smooth, sharply decaying integrands and monotone
//! residuals that show up in the outage formulas, so they stay dependency free.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::E;

use thiserror::Error;

/// `-1/e`, the branch point shared by both real branches of Lambert W.
pub const NEG_INV_E: f64 = -0.367_879_441_171_442_33;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{function}: argument {x} is outside the domain")]
    Domain { function: &'static str, x: f64 },
    #[error("{routine}: no convergence after {iterations} iterations (estimate {estimate}, error {error})")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
        estimate: f64,
        error: f64,
    },
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{routine}: non-finite function value at {at}")]
    NonFinite { routine: &'static str, at: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Convergence controls shared by the quadrature, root and maximisation routines.
///
/// `max_iterations` means subdivisions for quadrature, iterations for root
/// finding and the seed grid size for [`maximize_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    rel_tol: f64,
    abs_tol: f64,
    max_iterations: usize,
}

impl ToleranceSpec {
    /// Default for bracketing root finders.
    pub const ROOT: ToleranceSpec = ToleranceSpec {
        rel_tol: 1e-9,
        abs_tol: 0.0,
        max_iterations: 200,
    };

    /// Default for adaptive quadrature.
    pub const QUADRATURE: ToleranceSpec = ToleranceSpec {
        rel_tol: 1e-8,
        abs_tol: 0.0,
        max_iterations: 2000,
    };

    /// Unvalidated constructor for crate-internal constants.
    pub(crate) const fn fixed(rel_tol: f64, abs_tol: f64, max_iterations: usize) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_iterations,
        }
    }

    pub fn new(rel_tol: f64, abs_tol: f64, max_iterations: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return Err(NumericsError::InvalidTolerance(format!(
                "rel_tol must lie in (0, 1e-2], got {rel_tol}"
            )));
        }
        if !(abs_tol >= 0.0 && abs_tol.is_finite()) {
            return Err(NumericsError::InvalidTolerance(format!(
                "abs_tol must be finite and non-negative, got {abs_tol}"
            )));
        }
        if max_iterations < 10 {
            return Err(NumericsError::InvalidTolerance(format!(
                "max_iterations must be at least 10, got {max_iterations}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_iterations,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

// ---------------------------------------------------------------------------
// Lambert W
// ---------------------------------------------------------------------------

/// Arguments within this distance below `-1/e` are treated as the branch point.
const BRANCH_SLOP: f64 = 4.0 * f64::EPSILON * 0.367_879_441_171_442_33;

fn branch_point_series(p: f64) -> f64 {
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
}

fn halley(mut w: f64, x: f64) -> f64 {
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Principal branch `W0`, defined for `x >= -1/e`, with `W0(x) >= -1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < NEG_INV_E - BRANCH_SLOP {
        return Err(NumericsError::Domain {
            function: "lambert_w0",
            x,
        });
    }
    if x <= NEG_INV_E {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let guess = if x < -0.32 {
        branch_point_series((2.0 * (E * x + 1.0)).max(0.0).sqrt())
    } else {
        // Winitzki's global approximation, good to about 1e-2 everywhere.
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    Ok(halley(guess, x).max(-1.0))
}

/// Lower branch `W-1`, defined on `[-1/e, 0)`, with `W-1(x) <= -1`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    if !(NEG_INV_E - BRANCH_SLOP..0.0).contains(&x) {
        return Err(NumericsError::Domain {
            function: "lambert_wm1",
            x,
        });
    }
    if x <= NEG_INV_E {
        return Ok(-1.0);
    }
    let guess = if x > -0.25 {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    } else {
        branch_point_series(-(2.0 * (E * x + 1.0)).max(0.0).sqrt())
    };
    Ok(halley(guess, x).min(-1.0))
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Max-heap on error; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// 15-point Kronrod rule with the embedded 7-point Gauss rule as error estimate.
fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite {
                routine: "integrate_1d",
                at: x,
            })
        }
    };

    let fc = eval(centre)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    })
}

const INITIAL_PANELS: usize = 4;

/// Globally adaptive bisection driver; the integrand may fail.
pub(crate) fn integrate_1d_fallible<F>(mut f: F, a: f64, b: f64, tol: &ToleranceSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a.is_nan() || b.is_nan() || a > b {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::with_capacity(2 * INITIAL_PANELS);
    let width = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        heap.push(kronrod15(&mut f, lo, hi)?);
    }

    let mut subdivisions = 0;
    loop {
        let (total, error, abs_total) = heap.iter().fold((0.0, 0.0, 0.0), |acc, p| {
            (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_value)
        });
        let target = tol.abs_tol.max(tol.rel_tol * total.abs());
        if error <= target || error <= 50.0 * f64::EPSILON * abs_total {
            return Ok(total);
        }
        if subdivisions >= tol.max_iterations {
            return Err(NumericsError::NonConvergence {
                routine: "integrate_1d",
                iterations: subdivisions,
                estimate: total,
                error,
            });
        }
        let worst = heap.pop().expect("heap always holds the initial panels");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // The panel cannot be split further in floating point.
            return Err(NumericsError::NonConvergence {
                routine: "integrate_1d",
                iterations: subdivisions,
                estimate: total,
                error,
            });
        }
        heap.push(kronrod15(&mut f, worst.a, mid)?);
        heap.push(kronrod15(&mut f, mid, worst.b)?);
        subdivisions += 1;
    }
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Panels are bisected, worst error estimate first, until the summed estimate
/// drops below `max(abs_tol, rel_tol * |I|)` or reaches round-off level.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: &ToleranceSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_fallible(|x| Ok(f(x)), a, b, tol)
}

/// Integral of `f(y, z)` over the triangle `{y >= 0, z >= 0, y + z <= phi}`.
///
/// Computed as an iterated integral: the inner integral over `y in [0, phi - z]`
/// is evaluated adaptively for every node of the adaptive outer integral over
/// `z in [0, phi]`.
pub fn integrate_triangle<F>(f: F, phi: f64, tol: &ToleranceSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if phi.is_nan() || phi < 0.0 {
        return Err(NumericsError::InvalidInterval { a: 0.0, b: phi });
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    let inner_tol = ToleranceSpec {
        rel_tol: tol.rel_tol * 0.1,
        abs_tol: tol.abs_tol / phi.max(1.0),
        max_iterations: tol.max_iterations,
    };
    integrate_1d_fallible(
        |z| {
            let upper = (phi - z).max(0.0);
            integrate_1d_fallible(|y| Ok(f(y, z)), 0.0, upper, &inner_tol)
        },
        0.0,
        phi,
        tol,
    )
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Result of a bracketing root search.
///
/// `lo..=hi` still brackets a sign change when the search stops on width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Brent's method (bisection safeguarded inverse quadratic interpolation).
///
/// Stops when `|f(x)| <= abs_tol`, when `f(x) == 0`, or when the bracket is no
/// wider than `rel_tol * |x|` (plus a few ulps).
pub fn find_root_bracket<F>(f: F, lo: f64, hi: f64, tol: &ToleranceSpec) -> Result<RootBracket>
where
    F: Fn(f64) -> f64,
{
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_nan() {
            Err(NumericsError::NonFinite {
                routine: "find_root",
                at: x,
            })
        } else {
            Ok(v)
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(a)?;
    let mut fb = eval(b)?;
    if fa == 0.0 {
        return Ok(RootBracket {
            root: a,
            lo: a,
            hi: a,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(RootBracket {
            root: b,
            lo: b,
            hi: b,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iteration in 0..tol.max_iterations {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.rel_tol * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol.abs_tol {
            return Ok(RootBracket {
                root: b,
                lo: b.min(c),
                hi: b.max(c),
                iterations: iteration,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = eval(b)?;
    }
    Err(NumericsError::NonConvergence {
        routine: "find_root",
        iterations: tol.max_iterations,
        estimate: b,
        error: (c - b).abs(),
    })
}

/// Root of `f` in `[lo, hi]`, which must bracket a sign change.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: &ToleranceSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    find_root_bracket(f, lo, hi, tol).map(|r| r.root)
}

// ---------------------------------------------------------------------------
// Maximisation
// ---------------------------------------------------------------------------

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's parabolic/golden-section minimiser on `[a, b]`.
fn brent_minimize<F>(f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    let sqrt_eps = f64::EPSILON.sqrt();

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let r = e;
            e = d;
            if p.abs() < (0.5 * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(m - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = x + if d.abs() >= tol1 { d } else { tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Maximise `f` on `[lo, hi]`: a uniform seed grid of `max_iterations + 1`
/// points, then Brent refinement inside the two cells around the best node.
///
/// Returns `(argmax, max)`. The refined point only replaces the grid winner
/// when it is strictly better, so flat functions return `lo`.
pub fn maximize_1d<F>(f: F, lo: f64, hi: f64, tol: &ToleranceSpec) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return (lo, f(lo));
    }
    let n = tol.max_iterations;
    let step = (hi - lo) / n as f64;
    let node = |i: usize| if i == n { hi } else { lo + step * i as f64 };

    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = f(node(i));
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, grid_max) = best;
    if grid_max == f64::NEG_INFINITY {
        return (lo, f(lo));
    }
    let a = node(i.saturating_sub(1));
    let b = node((i + 1).min(n));
    let (x, neg) = brent_minimize(|x| -f(x), a, b, tol.rel_tol * (hi - lo), 200);
    if -neg > grid_max {
        (x, -neg)
    } else {
        (node(i), grid_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn w0_trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(lambert_w0(NEG_INV_E).unwrap(), -1.0);
    }

    #[test]
    fn w0_of_one_matches_bisection() {
        let oracle = bisect(|w| w * w.exp() - 1.0, 0.0, 1.0);
        assert!((oracle - 0.567143).abs() < 1e-6);
        assert!((lambert_w0(1.0).unwrap() - oracle).abs() < 1e-13);
    }

    #[test]
    fn wm1_matches_bisection() {
        for (x, expected) in [(-0.1, -3.577152), (-0.2, -2.542641)] {
            let oracle = bisect(|w| w * w.exp() - x, -10.0, -1.0);
            assert!((oracle - expected).abs() < 1e-6, "{oracle}");
            assert!((lambert_wm1(x).unwrap() - oracle).abs() < 1e-12);
        }
        assert_eq!(lambert_wm1(NEG_INV_E).unwrap(), -1.0);
    }

    #[test]
    fn lambert_domain_errors() {
        assert!(matches!(lambert_w0(-0.5), Err(NumericsError::Domain { .. })));
        assert!(lambert_wm1(0.0).is_err());
        assert!(lambert_wm1(0.1).is_err());
        assert!(lambert_wm1(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_large_and_tiny_arguments() {
        for x in [1e-300, 1e-20, 1e3, 1e10, 1e100, 1e300] {
            let w = lambert_w0(x).unwrap();
            let rel = (w.ln() + w - x.ln()).abs();
            assert!(rel < 1e-13, "x={x} w={w}");
        }
        for x in [-1e-300, -1e-100, -1e-10] {
            let w = lambert_wm1(x).unwrap();
            assert!(((-w).ln() + w - (-x).ln()).abs() < 1e-13, "x={x} w={w}");
        }
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceSpec::new(1e-9, 0.0, 10).is_ok());
        assert!(ToleranceSpec::new(0.0, 0.0, 10).is_err());
        assert!(ToleranceSpec::new(0.1, 0.0, 10).is_err());
        assert!(ToleranceSpec::new(1e-6, -1.0, 10).is_err());
        assert!(ToleranceSpec::new(1e-6, 0.0, 9).is_err());
    }

    #[test]
    fn integrate_examples() {
        let tol = ToleranceSpec::QUADRATURE;
        let v = integrate_1d(|y| (-y).exp(), 0.0, 1.0, &tol).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(integrate_1d(|_| 1.0, 2.5, 2.5, &tol).unwrap(), 0.0);
        let v = integrate_1d(|y| (-y).exp(), 0.0, 5.0, &tol).unwrap();
        assert!((v - (-(-5.0f64).exp_m1())).abs() < 1e-8);
        assert!((v - 0.993262).abs() < 1e-6);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        let tol = ToleranceSpec::QUADRATURE;
        assert!(matches!(
            integrate_1d(|y| y, 1.0, 0.0, &tol),
            Err(NumericsError::InvalidInterval { .. })
        ));
        assert!(matches!(
            integrate_1d(|y| 1.0 / y, -1.0, 1.0, &tol),
            Err(NumericsError::NonFinite { .. }) | Err(NumericsError::NonConvergence { .. })
        ));
        let tight = ToleranceSpec::new(1e-10, 0.0, 10).unwrap();
        assert!(matches!(
            integrate_1d(|y: f64| (1.0 / y).sin(), 1e-6, 1.0, &tight),
            Err(NumericsError::NonConvergence { .. })
        ));
    }

    #[test]
    fn integrate_sharp_peak() {
        let tol = ToleranceSpec::QUADRATURE;
        let v = integrate_1d(|x| (-(x - 3.0).powi(2) * 1e4).exp(), 0.0, 10.0, &tol).unwrap();
        let exact = (std::f64::consts::PI / 1e4).sqrt();
        assert!((v - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn triangle_examples() {
        let tol = ToleranceSpec::QUADRATURE;
        let v = integrate_triangle(|y, z| (-y - z).exp(), 1.0, &tol).unwrap();
        assert!((v - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-10);
        assert_eq!(integrate_triangle(|_, _| 7.0, 0.0, &tol).unwrap(), 0.0);
        let v = integrate_triangle(|_, _| 1.0, 2.0, &tol).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn root_examples() {
        let tol = ToleranceSpec::ROOT;
        assert!((find_root(|x| x - 0.5, 0.0, 1.0, &tol).unwrap() - 0.5).abs() < 1e-12);
        assert!(find_root(|x| x.exp() - 1.0, -1.0, 1.0, &tol).unwrap().abs() < 1e-12);
        let reduced = |r: f64| r * ((1.0 - r) / r * (-r).ln_1p()).exp() - 0.5;
        let root = find_root(reduced, 1e-9, 1.0 - 1e-9, &tol).unwrap();
        assert!((root - 0.773).abs() < 1e-3, "{root}");
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, &tol),
            Err(NumericsError::Bracket { .. })
        ));
    }

    #[test]
    fn root_bracket_keeps_sign_change() {
        let tol = ToleranceSpec::new(1e-6, 0.0, 100).unwrap();
        let f = |x: f64| x.powi(3) - 2.0;
        let r = find_root_bracket(f, 0.0, 2.0, &tol).unwrap();
        assert!(r.lo <= r.root && r.root <= r.hi);
        assert!(f(r.lo) * f(r.hi) <= 0.0);
        assert!(r.hi - r.lo <= 1e-6 * r.root + 1e-15);
    }

    #[test]
    fn maximize_examples() {
        let tol = ToleranceSpec::new(1e-6, 0.0, 50).unwrap();
        let (x, v) = maximize_1d(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, &tol);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v.abs() < 1e-12);
        let (x, v) = maximize_1d(|x| x, 0.0, 1.0, &tol);
        assert_eq!((x, v), (1.0, 1.0));
        let (x, _) = maximize_1d(|_| 2.0, -1.0, 1.0, &tol);
        assert_eq!(x, -1.0);
    }
}
