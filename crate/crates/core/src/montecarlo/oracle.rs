use crate::error::{Error, Result};
use crate::trial::{Strategy, TrialSpec};

/// PSP by exhaustive enumeration of the `4N` atoms
/// (first-stage outcome) x (pointer in or out of `E_k`) x (success or failure),
/// summing the mass of every atom where the prediction is correct.
pub fn brute_force_psp(trial: &TrialSpec, strat: &Strategy) -> Result<f64> {
    if trial.len() != strat.len() {
        return Err(Error::LengthMismatch {
            trial: trial.len(),
            strategy: strat.len(),
        });
    }
    let mut correct = 0.0;
    for (outcome, &y) in trial.outcomes().iter().zip(strat.y()) {
        for in_region in [true, false] {
            let pointer_mass = if in_region { y } else { 1.0 - y };
            for success in [true, false] {
                let stage_mass = if success {
                    outcome.success_prob
                } else {
                    1.0 - outcome.success_prob
                };
                // Inside E_k predicts success.
                if in_region == success {
                    correct += outcome.weight * pointer_mass * stage_mass;
                }
            }
        }
    }
    Ok(correct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn reproduces_table() {
        let t = TrialSpec::new(&[(0.2, 0.3), (0.3, 0.5), (0.5, 0.7)]).unwrap();
        let y = Strategy::new(vec![0.1, 0.9, 0.7]).unwrap();
        assert!((brute_force_psp(&t, &y).unwrap() - 0.572).abs() < 1e-14);
    }

    #[test]
    fn fair_single_outcome() {
        let t = TrialSpec::new(&[(1.0, 0.5)]).unwrap();
        for y in [0.0, 0.25, 0.8, 1.0] {
            let psp = brute_force_psp(&t, &Strategy::new(vec![y]).unwrap()).unwrap();
            assert!((psp - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch() {
        let t = TrialSpec::new(&[(1.0, 0.5)]).unwrap();
        assert!(brute_force_psp(&t, &Strategy::new(vec![0.1, 0.2]).unwrap()).is_err());
    }
}
