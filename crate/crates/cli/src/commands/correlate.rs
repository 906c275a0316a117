//! `odopal correlate` — join part statistics with occurrence
//! metadata, then correlate mean lightness against latitude and the
//! remapped capture hour within the requested groups.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;

use odopal_core::colour::read_stats_csv;
use odopal_core::ingest::{
    filter_records, join_metadata, parse_occurrences, FilterSpec, LatLonRect, LifeStage,
};
use odopal_core::stats::{
    analysis_to_csv, correlation_summary, correlations_to_csv, group_and_correlate,
    CorrelationVariable, GroupKeys, GroupOutcome,
};

use crate::config::{self, FileConfig, FilterConfig};
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// stats.csv produced by `odopal extract`.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Occurrence table (tab- or comma-separated, GBIF-style).
    #[arg(long)]
    occurrences: Option<PathBuf>,
    /// Output directory for analysis.csv, correlations.csv, correlations.txt.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grouping keys: "sex,part", "sex", "part", or "none".
    #[arg(long)]
    group_by: Option<String>,
    /// Covariates: "latitude,hour" or a subset.
    #[arg(long)]
    variables: Option<String>,
    /// Keep only this species (case-insensitive).
    #[arg(long)]
    filter_species: Option<String>,
    /// Keep only this life stage (imago, larva, other, unknown).
    #[arg(long)]
    filter_life_stage: Option<String>,
    /// Keep only records inside "min_lat,max_lat,min_lon,max_lon".
    #[arg(long)]
    filter_region: Option<String>,
    /// The stats file was written on the 8-bit HSV scale.
    #[arg(long)]
    hsv_8bit: bool,
}

fn parse_group_keys(raw: &str) -> Result<GroupKeys> {
    let mut keys = GroupKeys { by_sex: false, by_part: false };
    for token in raw.split(',').map(str::trim) {
        match token.to_ascii_lowercase().as_str() {
            "sex" => keys.by_sex = true,
            "part" => keys.by_part = true,
            "none" | "" => {}
            other => anyhow::bail!("unknown group key '{other}' (expected sex, part, or none)"),
        }
    }
    Ok(keys)
}

fn parse_variables(raw: &str) -> Result<Vec<CorrelationVariable>> {
    let mut out = Vec::new();
    for token in raw.split(',').map(str::trim) {
        let variable = match token.to_ascii_lowercase().as_str() {
            "latitude" => CorrelationVariable::Latitude,
            "hour" => CorrelationVariable::Hour,
            "" => continue,
            other => anyhow::bail!("unknown variable '{other}' (expected latitude or hour)"),
        };
        if !out.contains(&variable) {
            out.push(variable);
        }
    }
    if out.is_empty() {
        anyhow::bail!("no correlation variables selected");
    }
    Ok(out)
}

fn parse_region(raw: &str) -> Result<LatLonRect> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        anyhow::bail!("region must be 'min_lat,max_lat,min_lon,max_lon', got '{raw}'");
    }
    let mut values = [0.0f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .with_context(|| format!("bad region component '{part}'"))?;
    }
    Ok(LatLonRect::new(values[0], values[1], values[2], values[3])?)
}

fn build_filter(args: &Args, file: Option<&FilterConfig>) -> Result<FilterSpec> {
    let mut spec = FilterSpec::default();
    if let Some(config) = file {
        spec.species = config.species.clone();
        spec.life_stage = config.life_stage.as_deref().map(LifeStage::parse);
        if let Some([min_lat, max_lat, min_lon, max_lon]) = config.region {
            spec.region = Some(LatLonRect::new(min_lat, max_lat, min_lon, max_lon)?);
        }
    }
    if let Some(species) = &args.filter_species {
        spec.species = Some(species.clone());
    }
    if let Some(stage) = &args.filter_life_stage {
        spec.life_stage = Some(LifeStage::parse(stage));
    }
    if let Some(raw) = &args.filter_region {
        spec.region = Some(parse_region(raw)?);
    }
    Ok(spec)
}

pub fn run(args: Args, file: &FileConfig) -> Result<Outcome> {
    let stats_path = config::require(args.stats.clone(), file.stats.as_ref(), "stats CSV")?;
    let occurrences_path = config::require(
        args.occurrences.clone(),
        file.occurrences.as_ref(),
        "occurrence table",
    )?;
    let output = config::require(args.output.clone(), file.output.as_ref(), "output directory")?;
    let hsv_8bit = args.hsv_8bit || file.hsv_8bit.unwrap_or(false);
    let keys = parse_group_keys(&config::pick(
        args.group_by.clone(),
        file.group_by.as_ref(),
        "sex,part".to_string(),
    ))?;
    let variables = parse_variables(&config::pick(
        args.variables.clone(),
        file.variables.as_ref(),
        "latitude,hour".to_string(),
    ))?;
    let filter = build_filter(&args, file.filter.as_ref())?;
    let columns = file.columns.clone().unwrap_or_default();

    let stats_text = std::fs::read_to_string(&stats_path)
        .with_context(|| format!("reading {}", stats_path.display()))?;
    let stats = read_stats_csv(&stats_text, hsv_8bit)
        .with_context(|| format!("parsing {}", stats_path.display()))?;
    let occurrences_text = std::fs::read_to_string(&occurrences_path)
        .with_context(|| format!("reading {}", occurrences_path.display()))?;
    let records = parse_occurrences(&occurrences_text, &columns)
        .with_context(|| format!("parsing {}", occurrences_path.display()))?;
    let kept = filter_records(&records, &filter);
    log::info!(
        "{} of {} occurrence records pass the filters",
        kept.len(),
        records.len()
    );

    let (rows, join_stats) = join_metadata(&stats, &kept);
    if rows.is_empty() {
        anyhow::bail!(
            "no stats rows matched an occurrence record: {} stats rows unmatched, \
             {} records unmatched — check that record ids line up",
            join_stats.stats_unmatched,
            join_stats.records_unmatched
        );
    }
    log::info!(
        "joined {} rows ({} stats rows unmatched, {} records unmatched)",
        rows.len(),
        join_stats.stats_unmatched,
        join_stats.records_unmatched
    );

    let mut results = Vec::new();
    for &variable in &variables {
        results.extend(group_and_correlate(&rows, keys, variable));
    }
    let (mut computed, mut insufficient, mut degenerate) = (0usize, 0usize, 0usize);
    for result in &results {
        match result.outcome {
            GroupOutcome::Computed(_) => computed += 1,
            GroupOutcome::Insufficient { .. } => insufficient += 1,
            GroupOutcome::Degenerate { .. } => degenerate += 1,
        }
    }

    std::fs::create_dir_all(&output)
        .with_context(|| format!("creating {}", output.display()))?;
    let analysis_path = output.join("analysis.csv");
    std::fs::write(&analysis_path, analysis_to_csv(&rows))
        .with_context(|| format!("writing {}", analysis_path.display()))?;
    let csv_path = output.join("correlations.csv");
    std::fs::write(&csv_path, correlations_to_csv(&results))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let text_path = output.join("correlations.txt");
    std::fs::write(&text_path, correlation_summary(&results))
        .with_context(|| format!("writing {}", text_path.display()))?;
    log::info!(
        "{computed} group(s) correlated, {insufficient} insufficient, {degenerate} degenerate -> {}",
        output.display()
    );

    Ok(Outcome {
        ok: true,
        summary: json!({
            "command": "correlate",
            "rows": rows.len(),
            "stats_unmatched": join_stats.stats_unmatched,
            "records_unmatched": join_stats.records_unmatched,
            "groups_computed": computed,
            "groups_insufficient": insufficient,
            "groups_degenerate": degenerate,
            "outputs": [
                analysis_path.display().to_string(),
                csv_path.display().to_string(),
                text_path.display().to_string(),
            ],
        }),
    })
}
