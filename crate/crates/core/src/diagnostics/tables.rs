//! The two reference classification matrices, instantiated with fixed
//! canonical parameters (levels 0.05, rates 1, power 0.5, S-shaped exponents
//! (0.5, 0.7) and (0.7, 0.5) or (0.6, 0.5)).

use serde::{Deserialize, Serialize};

use super::classify::{classify_wellposedness, Classification};
use crate::risk::{LossFunction, RiskProfile, RiskSpec, ThresholdDistribution};
use crate::utility::{UtilityFunction, UtilitySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub risk: RiskSpec,
    pub cells: Vec<Classification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub utilities: Vec<UtilitySpec>,
    pub rows: Vec<TableRow>,
}

impl Table {
    fn build(
        title: &str,
        columns: Vec<(&str, UtilitySpec)>,
        rows: Vec<(String, RiskSpec)>,
    ) -> Table {
        let (labels, utilities): (Vec<String>, Vec<UtilitySpec>) =
            columns.into_iter().map(|(l, u)| (l.to_string(), u)).unzip();
        let rows = rows
            .into_iter()
            .map(|(label, risk)| {
                let cells = utilities
                    .iter()
                    .map(|u| classify_wellposedness(u, &risk))
                    .collect();
                TableRow { label, risk, cells }
            })
            .collect();
        Table {
            title: title.to_string(),
            columns: labels,
            utilities,
            rows,
        }
    }

    /// `true` for well-posed cells.
    pub fn marks(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| r.cells.iter().map(Classification::is_well_posed).collect())
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    /// Plain-text grid with ✓ / ✗ marks.
    pub fn render(&self) -> String {
        let label_width = self
            .rows
            .iter()
            .map(|r| r.label.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = format!("{}\n", self.title);
        out.push_str(&format!("{:label_width$}", ""));
        for c in &self.columns {
            out.push_str(&format!(" | {c}"));
        }
        out.push('\n');
        for (row, marks) in self.rows.iter().zip(self.marks()) {
            out.push_str(&format!("{:label_width$}", row.label));
            for (c, m) in self.columns.iter().zip(marks) {
                let w = c.chars().count();
                out.push_str(&format!(" | {:^w$}", if m { "✓" } else { "✗" }));
            }
            out.push('\n');
        }
        out
    }

    /// CSV with one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,column,well_posed\n");
        for row in &self.rows {
            for (c, cell) in self.columns.iter().zip(&row.cells) {
                out.push_str(&format!(
                    "\"{}\",\"{}\",{}\n",
                    row.label,
                    c,
                    cell.is_well_posed()
                ));
            }
        }
        out
    }
}

fn eu(u: UtilityFunction) -> UtilitySpec {
    UtilitySpec::expected(u)
}

/// Utility functionals against the zero, VaR, ES and entropic risks.
pub fn table1() -> Table {
    let columns = vec![
        ("Mean", UtilitySpec::Mean),
        (
            "S-shaped a>=b (0.6,0.5)",
            eu(UtilityFunction::s_shaped(0.6, 0.5).expect("valid")),
        ),
        (
            "S-shaped a<b (0.5,0.7)",
            eu(UtilityFunction::s_shaped(0.5, 0.7).expect("valid")),
        ),
        (
            "Power (0.5)",
            eu(UtilityFunction::power(0.5).expect("valid")),
        ),
        (
            "Exponential (1)",
            eu(UtilityFunction::exponential(1.0).expect("valid")),
        ),
    ];
    let rows = vec![
        ("No risk constraint".to_string(), RiskSpec::Zero),
        (
            "Value at Risk (0.05)".to_string(),
            RiskSpec::var(0.05).expect("valid"),
        ),
        (
            "Expected Shortfall (0.05)".to_string(),
            RiskSpec::es(0.05).expect("valid"),
        ),
        (
            "Entropic Risk (1)".to_string(),
            RiskSpec::entropic(1.0).expect("valid"),
        ),
    ];
    Table::build(
        "Market-independent well-posedness of utility-risk portfolio selection",
        columns,
        rows,
    )
}

/// Risk-functional conditions against expected utility with infinite and
/// finite loss-gain ratio.
pub fn table2() -> Table {
    let columns = vec![
        (
            "ALG(u) = -inf: S-shaped (0.5,0.7)",
            eu(UtilityFunction::s_shaped(0.5, 0.7).expect("valid")),
        ),
        (
            "ALG(u) > -inf: S-shaped (0.7,0.5)",
            eu(UtilityFunction::s_shaped(0.7, 0.5).expect("valid")),
        ),
    ];
    let expm1 = LossFunction::exp_minus_one(1.0).expect("valid");
    let lvar_sll = ThresholdDistribution::new(vec![-1.0, 0.0], vec![0.0, 0.05]).expect("valid");
    let lvar_flat = ThresholdDistribution::constant(0.05).expect("valid");
    let g_finite = RiskProfile::new(vec![0.05, 1.0], vec![0.0, 0.0], 1.0).expect("valid");
    let g_infinite = RiskProfile::expected_shortfall(0.05).expect("valid");
    let rows = vec![
        ("0: no risk constraint".to_string(), RiskSpec::Zero),
        (
            "LVaR: inf beta = 0 (beta = 0 below -1, 0.05 above)".to_string(),
            RiskSpec::LVaR { beta: lvar_sll },
        ),
        (
            "LVaR: inf beta > 0 (beta = 0.05)".to_string(),
            RiskSpec::LVaR { beta: lvar_flat },
        ),
        (
            "ES^g: g finite (g(0+) = 1, 0 from 0.05)".to_string(),
            RiskSpec::AdjustedEs { g: g_finite },
        ),
        (
            "ES^g: g not finite (ES at 0.05)".to_string(),
            RiskSpec::AdjustedEs { g: g_infinite },
        ),
        (
            "EW: ALG(l) = -inf (exp(y) - 1)".to_string(),
            RiskSpec::ExpectedWeightedLoss {
                loss: expm1.clone(),
            },
        ),
        (
            "EW: ALG(l) > -inf (identity)".to_string(),
            RiskSpec::ExpectedWeightedLoss {
                loss: LossFunction::Identity,
            },
        ),
        (
            "SR: ALG(l) = -inf (exp(y) - 1)".to_string(),
            RiskSpec::ShortfallRisk {
                loss: expm1.clone(),
            },
        ),
        (
            "SR: ALG(l) > -inf (identity)".to_string(),
            RiskSpec::ShortfallRisk {
                loss: LossFunction::Identity,
            },
        ),
        (
            "OCE: superlinear gains, flat left tail (exp(y) - 1)".to_string(),
            RiskSpec::oce(expm1).expect("valid"),
        ),
        (
            "OCE: linear gains (20 y+)".to_string(),
            RiskSpec::oce(LossFunction::positive_part(20.0).expect("valid")).expect("valid"),
        ),
    ];
    Table::build(
        "Market-independent well-posedness of (E_u, R)-portfolio selection",
        columns,
        rows,
    )
}

pub fn table_matrix() -> Vec<Table> {
    vec![table1(), table2()]
}
