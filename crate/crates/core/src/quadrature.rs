//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule (embedding the 7-point Gauss rule) provides a
//! per-interval value and error estimate; a worst-first priority queue
//! bisects until the summed error estimate drops below the absolute
//! tolerance or a roundoff floor. Endpoints are never evaluated, so
//! integrable endpoint singularities are handled by bisection alone.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Abscissae of the 15-point Kronrod rule on [-1, 1]; index 7 is the center.
/// Odd indices are the embedded 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.000_000_000_000_000_000_000_000_000_000_00,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// Weights of the embedded 7-point Gauss rule (for odd `XGK` indices and the
/// center).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_97,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

/// Result of one quadrature call: the integral value and the accumulated
/// error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    error: f64,
    a: f64,
    b: f64,
    value: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 15-point Kronrod rule on [a, b].
/// Returns (value, error estimate, integral of |f|, integral of |f - mean|).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let half_abs = half.abs();

    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        resg += WG[j] * fsum;
        resk += WGK[jtw] * fsum;
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        if jtwm1 == 7 {
            continue;
        }
        let absc = half * XGK[jtwm1];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        let fsum = f1 + f2;
        resk += WGK[jtwm1] * fsum;
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half_abs;
    let resasc = resasc * half_abs;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    (value, error, resabs, resasc)
}

/// Integrates `f` over the interval spanned by `breakpoints`, refining
/// worst-error panels first.
///
/// `breakpoints` must be finite and strictly increasing with at least two
/// entries; interior entries seed the initial panel layout (callers place
/// one near a known shoulder or singularity). Converges when the summed
/// error estimate falls below `max(abs_tol, roundoff floor)`; gives up with
/// a `Numerical` error after `max_bisections` refinements or on a
/// non-finite integrand value.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    max_bisections: usize,
) -> Result<Quadrature> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain(
            "integrate requires at least two breakpoints".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|x| !x.is_finite())
    {
        return Err(Error::Domain(format!(
            "integrate breakpoints must be finite and strictly increasing, got {breakpoints:?}"
        )));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Domain(format!(
            "integrate requires abs_tol > 0, got {abs_tol}"
        )));
    }

    let mut heap = BinaryHeap::new();
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    let mut total_resabs = 0.0;
    let push = |heap: &mut BinaryHeap<Panel>,
                    tv: &mut f64,
                    te: &mut f64,
                    tr: &mut f64,
                    a: f64,
                    b: f64|
     -> Result<()> {
        let (value, error, resabs, _) = qk15(&f, a, b);
        if !value.is_finite() {
            return Err(Error::Numerical(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        *tv += value;
        *te += error;
        *tr += resabs;
        heap.push(Panel {
            error,
            a,
            b,
            value,
            resabs,
        });
        Ok(())
    };

    for w in breakpoints.windows(2) {
        push(
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut total_resabs,
            w[0],
            w[1],
        )?;
    }

    for _ in 0..max_bisections {
        // Per-panel estimates are floored at 50 eps * resabs, so the sum over
        // panels can sit marginally above that bound; stopping uses twice the
        // per-panel constant.
        let floor = 100.0 * f64::EPSILON * total_resabs;
        if total_error <= abs_tol.max(floor) {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        total_value -= worst.value;
        total_error -= worst.error;
        total_resabs -= worst.resabs;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel narrower than machine resolution: accept its value and
            // retire its error estimate, nothing finer is representable.
            total_value += worst.value;
            total_resabs += worst.resabs;
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        push(
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut total_resabs,
            worst.a,
            mid,
        )?;
        push(
            &mut heap,
            &mut total_value,
            &mut total_error,
            &mut total_resabs,
            mid,
            worst.b,
        )?;
    }

    let floor = 100.0 * f64::EPSILON * total_resabs;
    if total_error > abs_tol.max(floor) {
        return Err(Error::Numerical(format!(
            "quadrature did not reach abs_tol = {abs_tol} within {max_bisections} bisections \
             (error estimate {total_error})"
        )));
    }
    Ok(Quadrature {
        value: total_value,
        error: total_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // ── Exactness and convergence ────────────────────────────────────────

    #[test]
    fn polynomial_is_integrated_exactly() {
        // GK15 is exact through degree 22; one panel suffices.
        let q = integrate(|x| x * x, &[0.0, 1.0], 1e-12, 10).unwrap();
        assert!(
            (q.value - 1.0 / 3.0).abs() <= 1e-15,
            "got {} for the cubic area",
            q.value
        );
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let q = integrate(|x| (10.0 * x).sin(), &[0.0, 2.0], 1e-12, 200).unwrap();
        let want = (1.0 - (20.0_f64).cos()) / 10.0;
        assert!((q.value - want).abs() <= 1e-11, "got {}", q.value);
    }

    #[test]
    fn endpoint_singularity_is_resolved_by_bisection() {
        // (1-x)^(-1/4) on [0, 1] integrates to 4/3. Nodes never touch the
        // endpoint, so bisection toward x = 1 resolves the integrable
        // singularity; a single non-adaptive panel errs at the 1e-3 level.
        let q = integrate(
            |x| (1.0 - x).powf(-0.25),
            &[0.0, 0.875, 1.0],
            1e-10,
            500,
        )
        .unwrap();
        assert!(
            (q.value - 4.0 / 3.0).abs() <= 1e-9,
            "singular integral came out as {}",
            q.value
        );
    }

    #[test]
    fn interior_breakpoints_change_nothing_but_the_panel_layout() {
        let a = integrate(|x| (-x).exp(), &[0.0, 30.0], 1e-12, 400).unwrap();
        let b = integrate(|x| (-x).exp(), &[0.0, 5.0, 30.0], 1e-12, 400).unwrap();
        let want = 1.0 - (-30.0_f64).exp();
        assert!((a.value - want).abs() <= 1e-12);
        assert!((b.value - want).abs() <= 1e-12);
    }

    // ── Failure paths ────────────────────────────────────────────────────

    #[test]
    fn budget_exhaustion_is_a_numerical_error() {
        let err = integrate(|x| 1.0 / (1.0 - x).sqrt(), &[0.0, 1.0], 1e-13, 3).unwrap_err();
        assert!(
            matches!(err, Error::Numerical(_)),
            "want Numerical, got {err:?}"
        );
    }

    #[test]
    fn non_finite_integrand_is_a_numerical_error() {
        let err = integrate(
            |x| if x > 0.5 { f64::NAN } else { 1.0 },
            &[0.0, 1.0],
            1e-10,
            50,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::Numerical(_)),
            "want Numerical, got {err:?}"
        );
    }

    #[test]
    fn bad_breakpoints_are_domain_errors() {
        assert!(matches!(
            integrate(|x| x, &[1.0], 1e-10, 10).unwrap_err(),
            Error::Domain(_)
        ));
        assert!(matches!(
            integrate(|x| x, &[1.0, 0.0], 1e-10, 10).unwrap_err(),
            Error::Domain(_)
        ));
        assert!(matches!(
            integrate(|x| x, &[0.0, f64::INFINITY], 1e-10, 10).unwrap_err(),
            Error::Domain(_)
        ));
    }
}
