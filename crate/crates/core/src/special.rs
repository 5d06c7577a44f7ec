//! Scalar special functions: inverse normal CDF and a confluent
//! hypergeometric evaluation used by the exponential-claim moment identity.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Inverse of the standard normal CDF (the normal quantile function).
///
/// Rational minimax approximation in three regimes (central, intermediate
/// tail, far tail), accurate to full double precision. Monotone in `p`,
/// which downstream sampling relies on for common-random-number coupling.
///
/// Errors with `Domain` unless `0 < p < 1`.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "inverse_normal_cdf requires 0 < p < 1, got p = {p}"
        )));
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        // Central region, |q| <= 0.425.
        let r = 0.180625 - q * q;
        let num = horner(
            r,
            &[
                3.387_132_872_796_366_608,
                1.331_416_678_917_843_774_5e2,
                1.971_590_950_306_551_442_7e3,
                1.373_169_376_550_946_112_5e4,
                4.592_195_393_154_987_145_7e4,
                6.726_577_092_700_870_085_3e4,
                3.343_057_558_358_812_810_5e4,
                2.509_080_928_730_122_672_7e3,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                4.231_333_070_160_091_125_2e1,
                6.871_870_074_920_579_083e2,
                5.394_196_021_424_751_107_7e3,
                2.121_379_430_158_659_586_7e4,
                3.930_789_580_009_271_061e4,
                2.872_908_573_572_194_267_4e4,
                5.226_495_278_852_545_561e3,
            ],
        );
        return Ok(q * num / den);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let value = if r <= 5.0 {
        // Intermediate tail, 0.425 < |q|, r = sqrt(-ln(min(p, 1-p))) <= 5.
        r -= 1.6;
        let num = horner(
            r,
            &[
                1.423_437_110_749_683_577_34,
                4.630_337_846_156_545_295_9,
                5.769_497_221_460_691_405_5,
                3.647_848_324_763_204_605,
                1.270_458_252_452_368_382_58,
                2.417_807_251_774_506_117_7e-1,
                2.272_384_498_926_918_458_33e-2,
                7.745_450_142_783_414_076_4e-4,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                2.053_191_626_637_758_821_87,
                1.676_384_830_183_803_849_4,
                6.897_673_349_851_000_045_5e-1,
                1.481_039_764_274_800_745_9e-1,
                1.519_866_656_361_645_719_66e-2,
                5.475_938_084_995_344_946e-4,
                1.050_750_071_644_416_843_24e-9,
            ],
        );
        num / den
    } else {
        // Far tail, r > 5.
        r -= 5.0;
        let num = horner(
            r,
            &[
                6.657_904_643_501_103_777_2,
                5.463_784_911_164_114_369_9,
                1.784_826_539_917_291_335_8,
                2.965_605_718_285_048_912_3e-1,
                2.653_218_952_657_612_309_3e-2,
                1.242_660_947_388_078_438_6e-3,
                2.711_555_568_743_487_578_15e-5,
                2.010_334_399_292_288_132_65e-7,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                5.998_322_065_558_879_376_9e-1,
                1.369_298_809_227_358_053_1e-1,
                1.487_536_129_085_061_485_25e-2,
                7.868_691_311_456_132_591e-4,
                1.846_318_317_510_054_681_8e-5,
                1.421_511_758_316_445_888_7e-7,
                2.044_263_103_389_939_785_64e-15,
            ],
        );
        num / den
    };
    Ok(if q < 0.0 { -value } else { value })
}

#[inline]
fn horner(x: f64, ascending: &[f64]) -> f64 {
    ascending.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Kummer's confluent hypergeometric function 1F1(1, b, -z) for `b > 1` and
/// `z >= 0`.
///
/// Evaluated through the probabilistic identity
/// `1F1(1, b, -z) = E[(b-1) / (b-1 + N)]` with `N ~ Poisson(z)`: every term
/// is positive, so there is no cancellation at large `z`. Summation starts
/// at the Poisson mode (seeded through `ln_gamma` to avoid underflow) and
/// extends in both directions until terms stop contributing.
pub fn hyp1f1_one_negz(b: f64, z: f64) -> Result<f64> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "hyp1f1_one_negz requires b > 1, got b = {b}"
        )));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "hyp1f1_one_negz requires z >= 0, got z = {z}"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let c = b - 1.0;
    let k0 = z.floor();
    // Poisson weight at the mode, w = z^k0 e^-z / k0!.
    let w0 = (k0 * z.ln() - z - ln_gamma(k0 + 1.0)).exp();
    let mut sum = w0 * c / (c + k0);

    // Upward sweep from the mode: w_{k+1} = w_k z / (k+1).
    let mut w = w0;
    let mut k = k0;
    for _ in 0..1_000_000 {
        w *= z / (k + 1.0);
        k += 1.0;
        let term = w * c / (c + k);
        sum += term;
        if term < sum * 1e-18 && k > z {
            break;
        }
    }
    // Downward sweep: w_{k-1} = w_k k / z.
    let mut w = w0;
    let mut k = k0;
    while k > 0.0 {
        w *= k / z;
        k -= 1.0;
        let term = w * c / (c + k);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    if !sum.is_finite() {
        return Err(Error::Numerical(format!(
            "hyp1f1_one_negz diverged at b = {b}, z = {z}"
        )));
    }
    Ok(sum)
}
