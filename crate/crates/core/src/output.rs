//! Rule and itemset files: JSON lines and CSV, items written as
//! `feature=category`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::data::{FeatureSchema, Item};
use crate::error::{Error, Result};
use crate::extract::{Itemset, Rule};

/// Separator between antecedent items in CSV output.
pub const CSV_ITEM_SEP: &str = " & ";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "jsonl",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: Vec<String>,
    pub consequent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antecedent_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consequent_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl RuleRecord {
    pub fn from_rule(schema: &FeatureSchema, rule: &Rule) -> Self {
        RuleRecord {
            antecedent: rule.antecedent.iter().map(|&i| schema.item_label(i)).collect(),
            consequent: schema.item_label(rule.consequent),
            antecedent_prob: rule.antecedent_prob,
            consequent_prob: rule.consequent_prob,
            support: rule.support,
            confidence: rule.confidence,
        }
    }

    pub fn to_rule(&self, schema: &FeatureSchema) -> Result<Rule> {
        let antecedent = self
            .antecedent
            .iter()
            .map(|l| schema.parse_item(l))
            .collect::<Result<Vec<Item>>>()?;
        let consequent = schema.parse_item(&self.consequent)?;
        let mut rule = Rule::new(antecedent, consequent);
        if rule.antecedent.windows(2).any(|w| w[0].feature == w[1].feature)
            || rule.antecedent.iter().any(|a| a.feature == consequent.feature)
        {
            return Err(Error::UnknownItem(format!(
                "rule repeats a feature: {:?} -> {}",
                self.antecedent, self.consequent
            )));
        }
        rule.antecedent_prob = self.antecedent_prob;
        rule.consequent_prob = self.consequent_prob;
        rule.support = self.support;
        rule.confidence = self.confidence;
        Ok(rule)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemsetRecord {
    pub items: Vec<String>,
    pub prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<f64>,
}

/// CSV row layout for rules.
#[derive(Serialize, Deserialize)]
struct RuleRow {
    antecedent: String,
    consequent: String,
    antecedent_prob: Option<f64>,
    consequent_prob: Option<f64>,
    support: Option<f64>,
    confidence: Option<f64>,
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stream>", e)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv {
        row: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}

pub fn write_rules<W: Write>(
    mut w: W,
    format: Format,
    schema: &FeatureSchema,
    rules: &[Rule],
) -> Result<()> {
    match format {
        Format::Json => {
            for r in rules {
                serde_json::to_writer(&mut w, &RuleRecord::from_rule(schema, r))?;
                w.write_all(b"\n").map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            for r in rules {
                let rec = RuleRecord::from_rule(schema, r);
                wtr.serialize(RuleRow {
                    antecedent: rec.antecedent.join(CSV_ITEM_SEP),
                    consequent: rec.consequent,
                    antecedent_prob: rec.antecedent_prob,
                    consequent_prob: rec.consequent_prob,
                    support: rec.support,
                    confidence: rec.confidence,
                })
                .map_err(csv_err)?;
            }
            wtr.flush().map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn read_rules<R: BufRead>(r: R, format: Format, schema: &FeatureSchema) -> Result<Vec<Rule>> {
    let records: Vec<RuleRecord> = match format {
        Format::Json => r
            .lines()
            .map(|l| l.map_err(io_err))
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect::<Result<_>>()?,
        Format::Csv => csv::Reader::from_reader(r)
            .deserialize::<RuleRow>()
            .map(|row| {
                let row = row.map_err(csv_err)?;
                Ok(RuleRecord {
                    antecedent: row
                        .antecedent
                        .split(CSV_ITEM_SEP)
                        .map(str::to_string)
                        .collect(),
                    consequent: row.consequent,
                    antecedent_prob: row.antecedent_prob,
                    consequent_prob: row.consequent_prob,
                    support: row.support,
                    confidence: row.confidence,
                })
            })
            .collect::<Result<_>>()?,
    };
    records.iter().map(|rec| rec.to_rule(schema)).collect()
}

pub fn write_itemsets<W: Write>(
    mut w: W,
    format: Format,
    schema: &FeatureSchema,
    itemsets: &[Itemset],
) -> Result<()> {
    let records = itemsets.iter().map(|s| ItemsetRecord {
        items: s.items.iter().map(|&i| schema.item_label(i)).collect(),
        prob: s.prob,
        support: s.support,
    });
    match format {
        Format::Json => {
            for rec in records {
                serde_json::to_writer(&mut w, &rec)?;
                w.write_all(b"\n").map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["items", "prob", "support"]).map_err(csv_err)?;
            for rec in records {
                wtr.write_record([
                    rec.items.join(CSV_ITEM_SEP),
                    rec.prob.to_string(),
                    rec.support.map_or_else(String::new, |s| s.to_string()),
                ])
                .map_err(csv_err)?;
            }
            wtr.flush().map_err(io_err)?;
        }
    }
    Ok(())
}
