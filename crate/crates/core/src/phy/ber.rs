//! Closed-form symbol error probabilities as a function of per-symbol SNR.

use super::PhyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BerModel {
    /// `0.5 exp(-snr / 2)`
    NoncoherentFsk,
    /// `Q(sqrt(2 snr))` per chip
    CoherentOqpskChip,
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn ber(model: BerModel, snr: f64) -> Result<f64, PhyError> {
    if snr.is_nan() || snr < 0.0 {
        return Err(PhyError::NegativeSnr(snr));
    }
    let p = match model {
        BerModel::NoncoherentFsk => 0.5 * (-snr / 2.0).exp(),
        BerModel::CoherentOqpskChip => q_function((2.0 * snr).sqrt()),
    };
    Ok(p.clamp(0.0, 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_snr_is_a_coin_flip() {
        assert_eq!(ber(BerModel::NoncoherentFsk, 0.0), Ok(0.5));
        assert_eq!(ber(BerModel::CoherentOqpskChip, 0.0), Ok(0.5));
    }

    #[test]
    fn fsk_closed_form() {
        let p = ber(BerModel::NoncoherentFsk, 2.0).unwrap();
        assert!((p - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((p - 0.1839).abs() < 1e-4);
    }

    #[test]
    fn q_function_reference_points() {
        // Q(1) and Q(3) from standard normal tables.
        assert!((q_function(1.0) - 0.158_655_253_931_457).abs() < 1e-12);
        assert!((q_function(3.0) - 0.001_349_898_031_630).abs() < 1e-12);
        let p = ber(BerModel::CoherentOqpskChip, 0.5).unwrap();
        assert!((p - q_function(1.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_snr_is_rejected() {
        assert!(ber(BerModel::NoncoherentFsk, -1e-9).is_err());
        assert!(ber(BerModel::CoherentOqpskChip, f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn monotone_non_increasing(a in 0.0f64..200.0, b in 0.0f64..200.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            for model in [BerModel::NoncoherentFsk, BerModel::CoherentOqpskChip] {
                proptest::prop_assert!(ber(model, lo).unwrap() >= ber(model, hi).unwrap());
            }
        }
    }
}
