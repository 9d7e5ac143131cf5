//! Designs and efficiencies for the two-term rational model
//! `sum_i a_i/(t - b_i) + a_{i+k}/(t - b_i)^2` on `[0, inf)` with
//! `b = (-1 - z, -1 + z)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::asympt::limiting_design;
use crate::cheb::RemezOptions;
use crate::design::{design_estar, Design};
use crate::error::Result;
use crate::model::{Interval, ModelSpec};
use crate::optimal::{efficiencies_against, unit_references, VerifyOptions};

/// The `z` columns of the published tables.
pub const TABLE_Z: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

/// `b = (-1 - z, -1 + z)` on `[0, inf)`.
pub fn table_model(z: f64) -> Result<ModelSpec> {
    ModelSpec::rational(0, vec![-1.0 - z, -1.0 + z], Interval::semi_infinite(0.0)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Named rows over a list of `z` columns; a failed column has `None`
/// entries and a message in `flags`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub z: Vec<f64>,
    pub rows: Vec<TableRow>,
    pub flags: Vec<Option<String>>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(crate) fn format_value(v: f64, round: bool) -> String {
    if round {
        format!("{v:.2}")
    } else {
        format!("{v:?}")
    }
}

impl Table {
    fn from_columns(z: &[f64], names: Vec<String>, columns: Vec<Result<Vec<f64>>>) -> Self {
        let mut rows: Vec<TableRow> = names
            .into_iter()
            .map(|name| TableRow {
                name,
                values: Vec::with_capacity(z.len()),
            })
            .collect();
        let mut flags = Vec::with_capacity(z.len());
        for col in columns {
            match col {
                Ok(values) => {
                    for (row, v) in rows.iter_mut().zip(values) {
                        row.values.push(Some(v));
                    }
                    flags.push(None);
                }
                Err(e) => {
                    for row in &mut rows {
                        row.values.push(None);
                    }
                    flags.push(Some(e.to_string()));
                }
            }
        }
        Self {
            z: z.to_vec(),
            rows,
            flags,
        }
    }

    pub fn row(&self, name: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// One column per `z`; the last row holds the column flags. An empty
    /// `z` list gives the header only.
    pub fn to_csv(&self, round: bool) -> String {
        let mut out = String::from("row");
        for z in &self.z {
            out.push(',');
            out.push_str(&format!("{z:?}"));
        }
        out.push('\n');
        if self.z.is_empty() {
            return out;
        }
        for row in &self.rows {
            out.push_str(&csv_field(&row.name));
            for v in &row.values {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&format_value(*v, round));
                }
            }
            out.push('\n');
        }
        out.push_str("status");
        for f in &self.flags {
            out.push(',');
            out.push_str(&csv_field(f.as_deref().unwrap_or("ok")));
        }
        out.push('\n');
        out
    }

    /// Values rounded to two decimals.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in row.values.iter_mut().flatten() {
                *v = (*v * 100.0).round() / 100.0;
            }
        }
        out
    }
}

/// Support points `t_2, ..., t_m` (`t_1 = 0`) and weights `w_1, ..., w_m` of
/// the E-optimal design.
pub fn table1(z: &[f64]) -> Table {
    let names = ["t2", "t3", "t4", "w1", "w2", "w3", "w4"]
        .map(String::from)
        .to_vec();
    let columns = z
        .par_iter()
        .map(|&z| {
            let model = table_model(z)?;
            let d = design_estar(&model, &RemezOptions::default())?;
            let mut col: Vec<f64> = d.chebyshev.points[1..].to_vec();
            col.extend(&d.weights);
            Ok(col)
        })
        .collect();
    Table::from_columns(z, names, columns)
}

/// Efficiencies `eff_i` of the E-optimal design and of the limiting design
/// for `x = -1`.
pub fn table2(z: &[f64]) -> Result<Table> {
    let limit = limiting_design(&table_model(0.5)?, -1.0, None)?.design;
    let mut names: Vec<String> = (1..=4).map(|i| format!("eff{i}")).collect();
    names.extend((1..=4).map(|i| format!("eff{i}_limit")));
    let columns = z.par_iter().map(|&z| table2_column(z, &limit)).collect();
    Ok(Table::from_columns(z, names, columns))
}

fn table2_column(z: f64, limit: &Design) -> Result<Vec<f64>> {
    let model = table_model(z)?;
    let d = design_estar(&model, &RemezOptions::default())?;
    let refs = unit_references(&model, &d.chebyshev, &VerifyOptions::default())?;
    let mut col = efficiencies_against(&model, &d.design, &refs)?;
    col.extend(efficiencies_against(&model, limit, &refs)?);
    Ok(col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_z_gives_header_only() {
        assert_eq!(table1(&[]).to_csv(false), "row\n");
    }

    #[test]
    fn failed_column_is_flagged() {
        let t = table1(&[0.5, 1.0]);
        assert!(t.flags[0].is_none());
        assert!(t.flags[1].is_some());
        assert!(t.rows[0].values[1].is_none());
        let csv = t.to_csv(true);
        assert!(csv.starts_with("row,0.5,1.0\nt2,0.15,\n"), "{csv}");
    }
}
