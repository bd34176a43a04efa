//! Cost ledger: clinician validation effort versus LLM token spend.
//!
//! Prices are always configuration, never constants; every computed total is
//! reported alongside the price assumptions that produced it. Currency is an
//! abstract single-currency decimal rendered with four fractional digits.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("cost per rubric is undefined for zero rubrics")]
    ZeroRubrics,
    #[error("division by zero: llm cost per rubric must be positive")]
    DivisionByZero,
    #[error("{field} must be finite and {requirement}")]
    InvalidInput {
        field: &'static str,
        requirement: &'static str,
    },
}

/// Self-reported validation effort for one evaluator over one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicianEffort {
    pub evaluator_id: String,
    pub hours: f64,
    pub period_start: NaiveDate,
    pub period_end: NaiveDate,
}

/// Token counts and pricing assumptions for one generation model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenSpend {
    pub model_id: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// Currency per million input tokens.
    pub price_per_m_input: f64,
    /// Currency per million output tokens.
    pub price_per_m_output: f64,
    /// Multiplier applied to output tokens to account for unbilled-but-priced
    /// reasoning overhead. 1.0 means the recorded counts are already billed
    /// totals.
    pub reasoning_multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClinicianCost {
    pub minutes_per_rubric: f64,
    pub cost_per_rubric: f64,
}

/// Per-rubric effort and cost of clinician validation.
pub fn clinician_cost(
    total_hours: f64,
    accepted_rubrics: u64,
    hourly_rate: f64,
) -> Result<ClinicianCost, CostError> {
    if accepted_rubrics == 0 {
        return Err(CostError::ZeroRubrics);
    }
    if !total_hours.is_finite() || total_hours < 0.0 {
        return Err(CostError::InvalidInput {
            field: "total_hours",
            requirement: "non-negative",
        });
    }
    if !hourly_rate.is_finite() || hourly_rate < 0.0 {
        return Err(CostError::InvalidInput {
            field: "hourly_rate",
            requirement: "non-negative",
        });
    }
    let minutes_per_rubric = 60.0 * total_hours / accepted_rubrics as f64;
    Ok(ClinicianCost {
        minutes_per_rubric,
        cost_per_rubric: minutes_per_rubric * hourly_rate / 60.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlmCost {
    pub total_cost: f64,
    pub cost_per_rubric: f64,
}

/// Total and per-rubric LLM generation cost:
/// input/1e6 * price_in + output/1e6 * multiplier * price_out.
pub fn llm_cost(spend: &TokenSpend, rubric_count: u64) -> Result<LlmCost, CostError> {
    if rubric_count == 0 {
        return Err(CostError::ZeroRubrics);
    }
    if !(spend.price_per_m_input.is_finite() && spend.price_per_m_input > 0.0) {
        return Err(CostError::InvalidInput {
            field: "price_per_m_input",
            requirement: "strictly positive",
        });
    }
    if !(spend.price_per_m_output.is_finite() && spend.price_per_m_output > 0.0) {
        return Err(CostError::InvalidInput {
            field: "price_per_m_output",
            requirement: "strictly positive",
        });
    }
    if !(spend.reasoning_multiplier.is_finite() && spend.reasoning_multiplier >= 1.0) {
        return Err(CostError::InvalidInput {
            field: "reasoning_multiplier",
            requirement: "at least 1",
        });
    }
    let total_cost = spend.input_tokens as f64 / 1e6 * spend.price_per_m_input
        + spend.output_tokens as f64 / 1e6 * spend.reasoning_multiplier * spend.price_per_m_output;
    Ok(LlmCost {
        total_cost,
        cost_per_rubric: total_cost / rubric_count as f64,
    })
}

/// Clinician-to-LLM per-rubric cost ratio.
pub fn cost_ratio(
    clinician_cost_per_rubric: f64,
    llm_cost_per_rubric: f64,
) -> Result<f64, CostError> {
    if llm_cost_per_rubric <= 0.0 {
        return Err(CostError::DivisionByZero);
    }
    Ok(clinician_cost_per_rubric / llm_cost_per_rubric)
}

/// Render a currency amount with the fixed four fractional digits.
pub fn format_currency(amount: f64) -> String {
    format!("{amount:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clinician_cost_published_inputs() {
        let cost = clinician_cost(919.0, 3108, 100.0).unwrap();
        assert_abs_diff_eq!(cost.minutes_per_rubric, 17.7413, epsilon = 1e-3);
        assert_abs_diff_eq!(cost.cost_per_rubric, 29.5689, epsilon = 1e-3);
    }

    #[test]
    fn clinician_cost_unit_inputs() {
        let cost = clinician_cost(1.0, 1, 60.0).unwrap();
        assert_abs_diff_eq!(cost.minutes_per_rubric, 60.0);
        assert_abs_diff_eq!(cost.cost_per_rubric, 60.0);
    }

    #[test]
    fn clinician_cost_zero_rubrics() {
        assert_eq!(clinician_cost(10.0, 0, 100.0), Err(CostError::ZeroRubrics));
    }

    #[test]
    fn clinician_cost_conserves_totals() {
        for (hours, rubrics, rate) in [(919.0, 3108u64, 100.0), (10.0, 7, 85.5), (0.5, 2, 120.0)] {
            let cost = clinician_cost(hours, rubrics, rate).unwrap();
            assert_abs_diff_eq!(
                cost.cost_per_rubric * rubrics as f64,
                hours * rate,
                epsilon = 1e-9
            );
        }
    }

    fn spend(input: u64, output: u64, p_in: f64, p_out: f64, multiplier: f64) -> TokenSpend {
        TokenSpend {
            model_id: "m".into(),
            input_tokens: input,
            output_tokens: output,
            price_per_m_input: p_in,
            price_per_m_output: p_out,
            reasoning_multiplier: multiplier,
        }
    }

    #[test]
    fn llm_cost_unit_prices() {
        let cost = llm_cost(&spend(1_000_000, 1_000_000, 1.0, 1.0, 1.0), 1).unwrap();
        assert_abs_diff_eq!(cost.total_cost, 2.0);
    }

    #[test]
    fn llm_cost_zero_tokens() {
        let cost = llm_cost(&spend(0, 0, 1.0, 1.0, 1.0), 10).unwrap();
        assert_abs_diff_eq!(cost.total_cost, 0.0);
        assert_abs_diff_eq!(cost.cost_per_rubric, 0.0);
    }

    #[test]
    fn llm_cost_calibrated_price_fixture() {
        // The documented calibration pair used by the bundled price config.
        let cost = llm_cost(&spend(2_050_000, 1_230_000, 1.0, 1.95, 5.0), 823).unwrap();
        assert_abs_diff_eq!(cost.total_cost, 14.0425, epsilon = 1e-9);
        assert!((cost.cost_per_rubric - 0.02).abs() < 0.005);
    }

    #[test]
    fn llm_cost_rejects_bad_config() {
        assert_eq!(
            llm_cost(&spend(1, 1, 0.0, 1.0, 1.0), 1),
            Err(CostError::InvalidInput {
                field: "price_per_m_input",
                requirement: "strictly positive"
            })
        );
        assert_eq!(
            llm_cost(&spend(1, 1, 1.0, 1.0, 0.5), 1),
            Err(CostError::InvalidInput {
                field: "reasoning_multiplier",
                requirement: "at least 1"
            })
        );
        assert_eq!(
            llm_cost(&spend(1, 1, 1.0, 1.0, 1.0), 0),
            Err(CostError::ZeroRubrics)
        );
    }

    #[test]
    fn cost_ratio_examples() {
        assert_abs_diff_eq!(cost_ratio(29.50, 0.02).unwrap(), 1475.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cost_ratio(5.0, 5.0).unwrap(), 1.0);
        assert_abs_diff_eq!(cost_ratio(10.0, 0.01).unwrap(), 1000.0, epsilon = 1e-9);
        assert_eq!(cost_ratio(10.0, 0.0), Err(CostError::DivisionByZero));
    }

    #[test]
    fn costs_are_linear_in_rates() {
        let base = clinician_cost(7.0, 3, 50.0).unwrap();
        let doubled = clinician_cost(7.0, 3, 100.0).unwrap();
        assert_eq!(doubled.cost_per_rubric, base.cost_per_rubric * 2.0);

        let s = spend(123_456, 654_321, 0.7, 2.1, 3.0);
        let base = llm_cost(&s, 5).unwrap();
        let mut scaled = s.clone();
        scaled.price_per_m_input *= 2.0;
        scaled.price_per_m_output *= 2.0;
        let doubled = llm_cost(&scaled, 5).unwrap();
        assert_eq!(doubled.total_cost, base.total_cost * 2.0);
    }

    #[test]
    fn currency_renders_four_digits() {
        assert_eq!(format_currency(29.5), "29.5000");
        assert_eq!(format_currency(0.017063), "0.0171");
    }
}
