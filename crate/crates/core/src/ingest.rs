//! Occurrence-table ingestion and the join against colour statistics.
//!
//! Input tables are GBIF-style CSV/TSV exports. Parsing is strict
//! about identity (missing or duplicate record ids abort) and lenient
//! about optional biology columns: blank or unparseable values become
//! absent, never zero-filled.

use std::collections::{HashMap, HashSet};
use std::fmt;

use chrono::{DateTime, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colour::PartColourStats;
use crate::stats::{remap_hour, AnalysisRow};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("occurrence table is empty")]
    EmptyTable,
    #[error("occurrence table has no '{name}' column")]
    MissingColumn { name: String },
    #[error("line {line}: empty record id")]
    EmptyRecordId { line: u64 },
    #[error("duplicate record id '{id}' on lines {first_line} and {line}")]
    DuplicateRecordId {
        id: String,
        first_line: u64,
        line: u64,
    },
    #[error("region bounds are invalid: lat {min_lat}..{max_lat}, lon {min_lon}..{max_lon}")]
    BadRegion {
        min_lat: f64,
        max_lat: f64,
        min_lon: f64,
        max_lon: f64,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
    Unknown,
}

impl Sex {
    pub fn name(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
            Sex::Unknown => "unknown",
        }
    }

    /// Anything other than a recognizable male/female marker is
    /// `Unknown`, keeping the record rather than dropping it.
    pub fn parse(raw: &str) -> Sex {
        match raw.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Sex::Female,
            "male" | "m" => Sex::Male,
            _ => Sex::Unknown,
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum LifeStage {
    Imago,
    Larva,
    Other,
    Unknown,
}

impl LifeStage {
    pub fn name(self) -> &'static str {
        match self {
            LifeStage::Imago => "imago",
            LifeStage::Larva => "larva",
            LifeStage::Other => "other",
            LifeStage::Unknown => "unknown",
        }
    }

    pub fn parse(raw: &str) -> LifeStage {
        match raw.trim().to_ascii_lowercase().as_str() {
            "imago" | "adult" => LifeStage::Imago,
            "larva" | "larvae" | "nymph" => LifeStage::Larva,
            "" => LifeStage::Unknown,
            _ => LifeStage::Other,
        }
    }
}

impl fmt::Display for LifeStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One occurrence row after parsing. Optional fields are `None` when
/// the source value was blank, unparseable, or out of range.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceRecord {
    pub record_id: String,
    pub species: Option<String>,
    pub sex: Sex,
    pub life_stage: LifeStage,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub observed_at: Option<NaiveDateTime>,
    pub country: Option<String>,
}

/// Maps table roles to source column names. Only `record_id` must be
/// present in the header; mapped-but-missing optional columns are
/// treated as absent. Defaults follow GBIF Darwin Core exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub record_id: String,
    pub species: Option<String>,
    pub sex: Option<String>,
    pub life_stage: Option<String>,
    pub latitude: Option<String>,
    pub longitude: Option<String>,
    pub observed_at: Option<String>,
    pub country: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            record_id: "gbifID".to_string(),
            species: Some("species".to_string()),
            sex: Some("sex".to_string()),
            life_stage: Some("lifeStage".to_string()),
            latitude: Some("decimalLatitude".to_string()),
            longitude: Some("decimalLongitude".to_string()),
            observed_at: Some("eventDate".to_string()),
            country: Some("countryCode".to_string()),
        }
    }
}

/// Event timestamps come in several ISO-ish shapes; ranges keep their
/// start. Date-only values carry no hour and parse to `None`.
fn parse_datetime(raw: &str) -> Option<NaiveDateTime> {
    let first = raw.split('/').next().unwrap_or(raw).trim();
    if first.is_empty() {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(first) {
        // Keep the clock time as written, not shifted to UTC.
        return Some(dt.naive_local());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(first, fmt) {
            return Some(dt);
        }
    }
    None
}

fn parse_coordinate(raw: &str, half_range: f64) -> Option<f64> {
    let value: f64 = raw.trim().parse().ok()?;
    (value.is_finite() && value.abs() <= half_range).then_some(value)
}

fn non_empty(raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    (!trimmed.is_empty()).then(|| trimmed.to_string())
}

/// Parses a GBIF-style occurrence table. The delimiter is sniffed
/// from the header line (tab if present, comma otherwise). Record ids
/// must be non-empty and unique; everything else degrades to absent.
pub fn parse_occurrences(
    text: &str,
    map: &ColumnMap,
) -> Result<Vec<OccurrenceRecord>, IngestError> {
    let Some(header_line) = text.lines().next() else {
        return Err(IngestError::EmptyTable);
    };
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(text.as_bytes());

    let headers = reader.headers()?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let Some(id_idx) = position(&map.record_id) else {
        return Err(IngestError::MissingColumn {
            name: map.record_id.clone(),
        });
    };
    let optional = |name: &Option<String>| name.as_deref().and_then(position);
    let species_idx = optional(&map.species);
    let sex_idx = optional(&map.sex);
    let stage_idx = optional(&map.life_stage);
    let lat_idx = optional(&map.latitude);
    let lon_idx = optional(&map.longitude);
    let time_idx = optional(&map.observed_at);
    let country_idx = optional(&map.country);

    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |idx: Option<usize>| idx.and_then(|i| record.get(i)).unwrap_or("");
        let record_id = record.get(id_idx).unwrap_or("").trim().to_string();
        if record_id.is_empty() {
            return Err(IngestError::EmptyRecordId { line });
        }
        if let Some(&first_line) = seen.get(&record_id) {
            return Err(IngestError::DuplicateRecordId {
                id: record_id,
                first_line,
                line,
            });
        }
        seen.insert(record_id.clone(), line);
        out.push(OccurrenceRecord {
            record_id,
            species: non_empty(get(species_idx)),
            sex: Sex::parse(get(sex_idx)),
            life_stage: LifeStage::parse(get(stage_idx)),
            latitude: parse_coordinate(get(lat_idx), 90.0),
            longitude: parse_coordinate(get(lon_idx), 180.0),
            observed_at: parse_datetime(get(time_idx)),
            country: non_empty(get(country_idx)),
        });
    }
    Ok(out)
}

/// Inclusive latitude/longitude rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLonRect {
    min_lat: f64,
    max_lat: f64,
    min_lon: f64,
    max_lon: f64,
}

impl LatLonRect {
    pub fn new(
        min_lat: f64,
        max_lat: f64,
        min_lon: f64,
        max_lon: f64,
    ) -> Result<Self, IngestError> {
        let ok = min_lat <= max_lat
            && min_lon <= max_lon
            && min_lat >= -90.0
            && max_lat <= 90.0
            && min_lon >= -180.0
            && max_lon <= 180.0;
        if !ok {
            return Err(IngestError::BadRegion {
                min_lat,
                max_lat,
                min_lon,
                max_lon,
            });
        }
        Ok(Self {
            min_lat,
            max_lat,
            min_lon,
            max_lon,
        })
    }

    pub fn contains(&self, latitude: f64, longitude: f64) -> bool {
        latitude >= self.min_lat
            && latitude <= self.max_lat
            && longitude >= self.min_lon
            && longitude <= self.max_lon
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (self.min_lat, self.max_lat, self.min_lon, self.max_lon)
    }
}

/// Record filter; `None` fields match everything. A region filter
/// requires both coordinates to be present and inside the rectangle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterSpec {
    pub species: Option<String>,
    pub life_stage: Option<LifeStage>,
    pub region: Option<LatLonRect>,
}

pub fn filter_records(
    records: &[OccurrenceRecord],
    spec: &FilterSpec,
) -> Vec<OccurrenceRecord> {
    records
        .iter()
        .filter(|r| {
            if let Some(species) = &spec.species {
                match &r.species {
                    Some(s) if s.eq_ignore_ascii_case(species) => {}
                    _ => return false,
                }
            }
            if let Some(stage) = spec.life_stage {
                if r.life_stage != stage {
                    return false;
                }
            }
            if let Some(region) = &spec.region {
                match (r.latitude, r.longitude) {
                    (Some(lat), Some(lon)) if region.contains(lat, lon) => {}
                    _ => return false,
                }
            }
            true
        })
        .cloned()
        .collect()
}

/// Join bookkeeping: how many stats rows matched, and what fell out
/// on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JoinStats {
    /// Analysis rows produced.
    pub rows: usize,
    /// Stats rows whose record id had no occurrence record.
    pub stats_unmatched: usize,
    /// Occurrence records never referenced by any stats row.
    pub records_unmatched: usize,
}

/// Inner join of per-part colour statistics against occurrence
/// records on record id. Each stats row yields at most one analysis
/// row; occurrence hours are remapped. When `records` contains
/// duplicate ids (possible if the caller assembled them by hand) the
/// first occurrence wins.
pub fn join_metadata(
    stats: &[(String, PartColourStats)],
    records: &[OccurrenceRecord],
) -> (Vec<AnalysisRow>, JoinStats) {
    let mut by_id: HashMap<&str, &OccurrenceRecord> = HashMap::new();
    for record in records {
        by_id.entry(record.record_id.as_str()).or_insert(record);
    }
    let mut matched_ids: HashSet<&str> = HashSet::new();
    let mut rows = Vec::new();
    let mut stats_unmatched = 0usize;
    for (record_id, part_stats) in stats {
        let Some(record) = by_id.get(record_id.as_str()) else {
            stats_unmatched += 1;
            continue;
        };
        matched_ids.insert(record.record_id.as_str());
        rows.push(AnalysisRow {
            record_id: record_id.clone(),
            part: part_stats.part,
            sex: record.sex,
            latitude: record.latitude,
            longitude: record.longitude,
            hour_remapped: record.observed_at.map(|dt| {
                remap_hour(dt.hour() as u8).expect("chrono hours are 0..=23")
            }),
            mean_h: part_stats.mean_hsv.h,
            mean_s: part_stats.mean_hsv.s,
            mean_v: part_stats.mean_hsv.v,
        });
    }
    let records_unmatched = by_id
        .keys()
        .filter(|id| !matched_ids.contains(*id))
        .count();
    let stats_join = JoinStats {
        rows: rows.len(),
        stats_unmatched,
        records_unmatched,
    };
    (rows, stats_join)
}
