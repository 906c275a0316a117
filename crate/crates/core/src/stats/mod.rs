//! Statistical analysis over joined colour/occurrence rows: hour
//! remapping, correlation tests, and grouped correlation runs.

mod corr;
mod special;

pub use corr::{average_ranks, pearson, spearman};
pub use special::{ln_gamma, regularized_incomplete_beta, t_cdf_two_sided};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::annot::BodyPart;
use crate::ingest::Sex;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("hour {0} outside 0..=23")]
    BadHour(u8),
    #[error("sample lengths differ: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples contain a non-finite value")]
    NonFiniteSample,
    #[error("{axis} values have zero variance")]
    ZeroVariance { axis: &'static str },
    #[error("degrees of freedom must be positive")]
    ZeroDf,
    #[error("t statistic is NaN")]
    NanT,
    #[error("incomplete beta parameters must be positive and finite, got a={a}, b={b}")]
    BadBetaParams { a: f64, b: f64 },
    #[error("incomplete beta x={0} outside [0, 1]")]
    BadBetaX(f64),
    #[error("incomplete beta did not converge for a={a}, b={b}, x={x}")]
    BetaNoConvergence { a: f64, b: f64, x: f64 },
}

/// Shifts the observation hour so the overnight activity window is
/// contiguous: hours 20-23 map to 0-3 and hours 0-19 map to 4-23.
/// The mapping is a bijection on `0..=23`.
pub fn remap_hour(hour: u8) -> Result<u8, StatsError> {
    if hour > 23 {
        return Err(StatsError::BadHour(hour));
    }
    Ok(if hour >= 20 { hour - 20 } else { hour + 4 })
}

/// One joined row: colour statistics for one body part of one record,
/// plus the occurrence covariates. Absent covariates stay absent; they
/// are never zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    pub record_id: String,
    pub part: BodyPart,
    pub sex: Sex,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub hour_remapped: Option<u8>,
    pub mean_h: f64,
    pub mean_s: f64,
    pub mean_v: f64,
}

pub const ANALYSIS_CSV_HEADER: &str =
    "record_id,part,sex,latitude,longitude,hour_remapped,mean_h,mean_s,mean_v";

/// Serializes joined rows; absent covariates become empty fields.
pub fn analysis_to_csv(rows: &[AnalysisRow]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer
        .write_record(ANALYSIS_CSV_HEADER.split(','))
        .expect("header");
    for row in rows {
        writer
            .write_record([
                row.record_id.as_str(),
                row.part.name(),
                row.sex.name(),
                &row.latitude.map(|v| v.to_string()).unwrap_or_default(),
                &row.longitude.map(|v| v.to_string()).unwrap_or_default(),
                &row.hour_remapped.map(|v| v.to_string()).unwrap_or_default(),
                &row.mean_h.to_string(),
                &row.mean_s.to_string(),
                &row.mean_v.to_string(),
            ])
            .expect("analysis row");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer"))
        .expect("CSV output is UTF-8")
}

/// Covariate correlated against mean value (brightness).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationVariable {
    Latitude,
    Hour,
}

impl CorrelationVariable {
    pub fn name(self) -> &'static str {
        match self {
            CorrelationVariable::Latitude => "latitude",
            CorrelationVariable::Hour => "hour",
        }
    }
}

/// Which keys to group rows by before correlating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupKeys {
    pub by_sex: bool,
    pub by_part: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub n: usize,
    pub pearson_r: f64,
    pub pearson_p: f64,
    pub spearman_rho: f64,
    pub spearman_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupOutcome {
    Computed(CorrelationResult),
    /// Fewer than three rows had the covariate present.
    Insufficient { n: usize },
    /// The group had enough rows but zero variance on an axis.
    Degenerate { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCorrelation {
    pub sex: Option<Sex>,
    pub part: Option<BodyPart>,
    pub variable: CorrelationVariable,
    pub outcome: GroupOutcome,
}

/// Groups rows by the requested keys and correlates the covariate
/// against mean value within each group. Rows whose covariate is
/// absent are excluded per group; groups with fewer than three
/// remaining rows are reported as insufficient rather than dropped.
/// Groups come back sorted by key.
pub fn group_and_correlate(
    rows: &[AnalysisRow],
    keys: GroupKeys,
    variable: CorrelationVariable,
) -> Vec<GroupCorrelation> {
    let mut groups: BTreeMap<(Option<Sex>, Option<BodyPart>), Vec<(f64, f64)>> =
        BTreeMap::new();
    for row in rows {
        let covariate = match variable {
            CorrelationVariable::Latitude => row.latitude,
            CorrelationVariable::Hour => row.hour_remapped.map(|h| h as f64),
        };
        let key = (
            keys.by_sex.then_some(row.sex),
            keys.by_part.then_some(row.part),
        );
        // Grouping must see every row so empty groups still report,
        // but rows without the covariate contribute no pair.
        let entry = groups.entry(key).or_default();
        if let Some(x) = covariate {
            entry.push((x, row.mean_v));
        }
    }
    groups
        .into_iter()
        .map(|((sex, part), pairs)| {
            let n = pairs.len();
            let outcome = if n < 3 {
                GroupOutcome::Insufficient { n }
            } else {
                let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                match (pearson(&x, &y), spearman(&x, &y)) {
                    (Ok((r, p)), Ok((rho, sp))) => GroupOutcome::Computed(CorrelationResult {
                        n,
                        pearson_r: r,
                        pearson_p: p,
                        spearman_rho: rho,
                        spearman_p: sp,
                    }),
                    _ => GroupOutcome::Degenerate { n },
                }
            };
            GroupCorrelation {
                sex,
                part,
                variable,
                outcome,
            }
        })
        .collect()
}

pub const CORRELATION_CSV_HEADER: &str =
    "group_sex,group_part,variable,n,pearson_r,pearson_p,spearman_rho,spearman_p";

/// Serializes grouped correlation results. Ungrouped keys and skipped
/// groups leave their fields empty.
pub fn correlations_to_csv(results: &[GroupCorrelation]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer
        .write_record(CORRELATION_CSV_HEADER.split(','))
        .expect("header");
    for result in results {
        let sex = result.sex.map(|s| s.name()).unwrap_or_default();
        let part = result.part.map(|p| p.name()).unwrap_or_default();
        let record = match &result.outcome {
            GroupOutcome::Computed(c) => [
                sex.to_string(),
                part.to_string(),
                result.variable.name().to_string(),
                c.n.to_string(),
                c.pearson_r.to_string(),
                c.pearson_p.to_string(),
                c.spearman_rho.to_string(),
                c.spearman_p.to_string(),
            ],
            GroupOutcome::Insufficient { n } | GroupOutcome::Degenerate { n } => [
                sex.to_string(),
                part.to_string(),
                result.variable.name().to_string(),
                n.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        writer.write_record(&record).expect("correlation row");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer"))
        .expect("CSV output is UTF-8")
}

/// Human-readable per-group summary naming the direction and p-value
/// of each correlation, or why a group was skipped.
pub fn correlation_summary(results: &[GroupCorrelation]) -> String {
    let mut out = String::new();
    for result in results {
        let mut label = String::new();
        if let Some(sex) = result.sex {
            label.push_str(&format!("sex={sex} "));
        }
        if let Some(part) = result.part {
            label.push_str(&format!("part={part} "));
        }
        label.push_str(&format!("vs {}", result.variable.name()));
        match &result.outcome {
            GroupOutcome::Computed(c) => {
                let direction = if c.pearson_r < 0.0 {
                    "negative"
                } else if c.pearson_r > 0.0 {
                    "positive"
                } else {
                    "flat"
                };
                out.push_str(&format!(
                    "{label}: n={} {direction} pearson r={:.5} (p={:.3e}), spearman rho={:.5} (p={:.3e})\n",
                    c.n, c.pearson_r, c.pearson_p, c.spearman_rho, c.spearman_p
                ));
            }
            GroupOutcome::Insufficient { n } => {
                out.push_str(&format!(
                    "{label}: skipped, only {n} usable rows (need 3)\n"
                ));
            }
            GroupOutcome::Degenerate { n } => {
                out.push_str(&format!(
                    "{label}: skipped, zero variance across {n} rows\n"
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(
        id: &str,
        part: BodyPart,
        sex: Sex,
        latitude: Option<f64>,
        hour: Option<u8>,
        mean_v: f64,
    ) -> AnalysisRow {
        AnalysisRow {
            record_id: id.to_string(),
            part,
            sex,
            latitude,
            longitude: latitude.map(|l| l / 2.0),
            hour_remapped: hour,
            mean_h: 10.0,
            mean_s: 0.5,
            mean_v,
        }
    }

    #[test]
    fn remap_hour_known_points() {
        assert_eq!(remap_hour(20).unwrap(), 0);
        assert_eq!(remap_hour(23).unwrap(), 3);
        assert_eq!(remap_hour(0).unwrap(), 4);
        assert_eq!(remap_hour(19).unwrap(), 23);
        assert!(matches!(remap_hour(24), Err(StatsError::BadHour(24))));
    }

    #[test]
    fn remap_hour_is_a_bijection() {
        let mut seen = [false; 24];
        for h in 0..24u8 {
            let m = remap_hour(h).unwrap();
            assert!(m <= 23);
            assert!(!seen[m as usize], "hour {h} collides");
            seen[m as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn grouping_excludes_absent_covariates_per_group() {
        let rows = vec![
            row("a", BodyPart::Head, Sex::Male, Some(50.0), None, 0.5),
            row("b", BodyPart::Head, Sex::Male, Some(52.0), None, 0.4),
            row("c", BodyPart::Head, Sex::Male, None, Some(10), 0.3),
            row("d", BodyPart::Head, Sex::Male, Some(54.0), None, 0.3),
        ];
        let keys = GroupKeys { by_sex: true, by_part: true };
        let results = group_and_correlate(&rows, keys, CorrelationVariable::Latitude);
        assert_eq!(results.len(), 1);
        match &results[0].outcome {
            GroupOutcome::Computed(c) => assert_eq!(c.n, 3),
            other => panic!("expected computed, got {other:?}"),
        }
        // Same rows, hour covariate: only one row has it.
        let results = group_and_correlate(&rows, keys, CorrelationVariable::Hour);
        assert!(matches!(
            results[0].outcome,
            GroupOutcome::Insufficient { n: 1 }
        ));
    }

    #[test]
    fn groups_are_sorted_and_keyed() {
        let rows = vec![
            row("a", BodyPart::Thorax, Sex::Unknown, Some(50.0), None, 0.5),
            row("b", BodyPart::Head, Sex::Male, Some(51.0), None, 0.4),
            row("c", BodyPart::Head, Sex::Female, Some(52.0), None, 0.3),
        ];
        let keys = GroupKeys { by_sex: true, by_part: true };
        let results = group_and_correlate(&rows, keys, CorrelationVariable::Latitude);
        let got: Vec<(Option<Sex>, Option<BodyPart>)> =
            results.iter().map(|r| (r.sex, r.part)).collect();
        assert_eq!(
            got,
            vec![
                (Some(Sex::Female), Some(BodyPart::Head)),
                (Some(Sex::Male), Some(BodyPart::Head)),
                (Some(Sex::Unknown), Some(BodyPart::Thorax)),
            ]
        );
    }

    #[test]
    fn pooled_run_uses_single_group() {
        let rows = vec![
            row("a", BodyPart::Head, Sex::Male, Some(50.0), None, 0.5),
            row("b", BodyPart::Thorax, Sex::Female, Some(51.0), None, 0.45),
            row("c", BodyPart::Abdomen, Sex::Unknown, Some(52.0), None, 0.4),
        ];
        let results =
            group_and_correlate(&rows, GroupKeys::default(), CorrelationVariable::Latitude);
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].sex, None);
        assert_eq!(results[0].part, None);
        match &results[0].outcome {
            GroupOutcome::Computed(c) => {
                assert_eq!(c.n, 3);
                assert!(c.pearson_r < 0.0);
            }
            other => panic!("expected computed, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_group_is_reported_not_dropped() {
        let rows = vec![
            row("a", BodyPart::Head, Sex::Male, Some(50.0), None, 0.5),
            row("b", BodyPart::Head, Sex::Male, Some(50.0), None, 0.4),
            row("c", BodyPart::Head, Sex::Male, Some(50.0), None, 0.3),
        ];
        let results =
            group_and_correlate(&rows, GroupKeys::default(), CorrelationVariable::Latitude);
        assert!(matches!(
            results[0].outcome,
            GroupOutcome::Degenerate { n: 3 }
        ));
    }

    #[test]
    fn csv_layout_matches_contract() {
        let rows = vec![
            row("a", BodyPart::Abdomen, Sex::Male, Some(50.0), None, 0.5),
            row("b", BodyPart::Abdomen, Sex::Male, Some(51.0), None, 0.4),
            row("c", BodyPart::Abdomen, Sex::Male, Some(52.0), None, 0.35),
        ];
        let keys = GroupKeys { by_sex: true, by_part: true };
        let results = group_and_correlate(&rows, keys, CorrelationVariable::Latitude);
        let csv = correlations_to_csv(&results);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CORRELATION_CSV_HEADER);
        assert!(lines[1].starts_with("male,abdomen,latitude,3,"));
        let summary = correlation_summary(&results);
        assert!(summary.contains("negative"));
    }

    #[test]
    fn analysis_csv_leaves_absent_fields_empty() {
        let rows = vec![row("a", BodyPart::Head, Sex::Unknown, None, None, 0.5)];
        let csv = analysis_to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], ANALYSIS_CSV_HEADER);
        assert_eq!(lines[1], "a,head,unknown,,,,10,0.5,0.5");
    }

    proptest! {
        #[test]
        fn remapped_hours_cover_full_range(hour in 0u8..24) {
            let m = remap_hour(hour).unwrap();
            prop_assert!(m <= 23);
            // 20..24 land in 0..4, everything else in 4..24.
            if hour >= 20 {
                prop_assert!(m < 4);
            } else {
                prop_assert!(m >= 4);
            }
        }
    }
}
