//! Scalar statistics: trade classes, inequality, dirty-card rate, Welch's test.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("trade quantities must be at least 1 (offered {offered}, requested {requested})")]
    ZeroQuantity { offered: u32, requested: u32 },
    #[error("values must be non-negative, got {0}")]
    Negative(f64),
    #[error("need at least {need} values, got {have}")]
    TooFew { need: usize, have: usize },
    #[error("claims ({claims}) exceed opportunities ({opportunities})")]
    ClaimsExceedOpportunities { claims: u32, opportunities: u32 },
    #[error("both samples have zero variance")]
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TradeClass {
    Fair,
    Generous,
    Selfish,
}

impl TradeClass {
    pub const ALL: [TradeClass; 3] = [TradeClass::Fair, TradeClass::Generous, TradeClass::Selfish];

    pub fn name(self) -> &'static str {
        match self {
            TradeClass::Fair => "fair",
            TradeClass::Generous => "generous",
            TradeClass::Selfish => "selfish",
        }
    }
}

/// Compare total offered against total requested units.
pub fn classify_trade(offered: u32, requested: u32) -> Result<TradeClass, StatsError> {
    if offered == 0 || requested == 0 {
        return Err(StatsError::ZeroQuantity { offered, requested });
    }
    Ok(match offered.cmp(&requested) {
        std::cmp::Ordering::Equal => TradeClass::Fair,
        std::cmp::Ordering::Greater => TradeClass::Generous,
        std::cmp::Ordering::Less => TradeClass::Selfish,
    })
}

/// Gini coefficient of non-negative values; 0 when every value is 0.
pub fn gini(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFew {
            need: 2,
            have: values.len(),
        });
    }
    if let Some(&v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(StatsError::Negative(v));
    }
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok(weighted / (n * total))
}

/// Percentage of dirty-card opportunities taken; `None` with no opportunities.
pub fn dirty_pct(claims: u32, opportunities: u32) -> Result<Option<f64>, StatsError> {
    if claims > opportunities {
        return Err(StatsError::ClaimsExceedOpportunities { claims, opportunities });
    }
    if opportunities == 0 {
        return Ok(None);
    }
    Ok(Some(100.0 * claims as f64 / opportunities as f64))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the mean: population sd over root n.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    let pop_var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    (pop_var / xs.len() as f64).sqrt()
}

/// Two-sided p-value of Welch's unequal-variance t-test.
pub fn welch_p(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFew { need: 2, have: s.len() });
        }
    }
    let (va, vb) = (variance(a) / a.len() as f64, variance(b) / b.len() as f64);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Err(StatsError::Degenerate);
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    let x = df / (df + t * t);
    Ok(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}
