//! Report emitters: a flat CSV and the grouped-bar data behind the
//! accuracy-per-representation figure.

use serde::Serialize;

use super::{QType, RunReport};
use crate::chunker::{ChunkLevel, Separator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    GroupedBars,
}

pub const CSV_COLUMNS: [&str; 12] = [
    "provider",
    "chunk_level",
    "separator",
    "repeat_header",
    "include_text",
    "k",
    "overall",
    "acc_E",
    "acc_M",
    "acc_A",
    "acc_I",
    "failed",
];

/// Panels in figure order: table/pipe, row/pipe, table/space, row/space.
const PANELS: [(ChunkLevel, Separator); 4] = [
    (ChunkLevel::Table, Separator::Pipe),
    (ChunkLevel::Row, Separator::Pipe),
    (ChunkLevel::Table, Separator::Space),
    (ChunkLevel::Row, Separator::Space),
];

/// Groups within a panel as (repeat_header, include_text).
const GROUPS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

pub fn emit_report(reports: &[RunReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(reports),
        ReportFormat::GroupedBars => emit_grouped_bars(reports),
    }
}

fn pct(v: f64) -> String {
    format!("{v:.1}")
}

fn emit_csv(reports: &[RunReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in reports {
        let failed = r.failed();
        let type_cell = |t: QType| match r.per_type_accuracy.get(&t) {
            Some(v) if !failed => pct(*v),
            _ => String::new(),
        };
        w.write_record([
            r.provider.name.clone(),
            r.config.chunk_level.to_string(),
            r.config.separator.to_string(),
            r.config.repeat_header.to_string(),
            r.config.include_text.to_string(),
            r.k.to_string(),
            if failed { String::new() } else { pct(r.overall_accuracy) },
            type_cell(QType::E),
            type_cell(QType::M),
            type_cell(QType::A),
            type_cell(QType::I),
            failed.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Serialize)]
struct Bars {
    panels: Vec<Panel>,
}

#[derive(Serialize)]
struct Panel {
    chunk_level: ChunkLevel,
    separator: Separator,
    groups: Vec<Group>,
}

#[derive(Serialize)]
struct Group {
    repeat_header: bool,
    include_text: bool,
    bars: Vec<Bar>,
}

#[derive(Serialize)]
struct Bar {
    provider: String,
    /// `null` for failed cells.
    accuracy: Option<f64>,
}

fn emit_grouped_bars(reports: &[RunReport]) -> String {
    let panels = PANELS
        .iter()
        .filter_map(|&(level, sep)| {
            let groups: Vec<Group> = GROUPS
                .iter()
                .filter_map(|&(rh, it)| {
                    let bars: Vec<Bar> = reports
                        .iter()
                        .filter(|r| {
                            r.config.chunk_level == level
                                && r.config.separator == sep
                                && r.config.repeat_header == rh
                                && r.config.include_text == it
                        })
                        .map(|r| Bar {
                            provider: r.provider.name.clone(),
                            accuracy: (!r.failed()).then_some(r.overall_accuracy),
                        })
                        .collect();
                    (!bars.is_empty()).then_some(Group {
                        repeat_header: rh,
                        include_text: it,
                        bars,
                    })
                })
                .collect();
            (!groups.is_empty()).then_some(Panel {
                chunk_level: level,
                separator: sep,
                groups,
            })
        })
        .collect();
    serde_json::to_string_pretty(&Bars { panels }).expect("report serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunker::ReprConfig;
    use crate::embed::ProviderDescriptor;
    use std::collections::BTreeMap;

    fn report(config: ReprConfig, per_type: &[(QType, f64)], error: Option<&str>) -> RunReport {
        RunReport {
            config,
            provider: ProviderDescriptor::local_hash(256).unwrap(),
            k: 5,
            overall_accuracy: 66.66666,
            per_type_accuracy: per_type.iter().copied().collect::<BTreeMap<_, _>>(),
            per_question: vec![],
            error: error.map(str::to_string),
        }
    }

    #[test]
    fn csv_rows_and_empty_type_cells() {
        let reports: Vec<_> = ReprConfig::grid()
            .iter()
            .map(|c| report(*c, &[(QType::E, 50.0), (QType::A, 100.0)], None))
            .collect();
        let csv = emit_report(&reports, ReportFormat::Csv);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(
            lines[0],
            "provider,chunk_level,separator,repeat_header,include_text,k,overall,acc_E,acc_M,acc_A,acc_I,failed"
        );
        assert_eq!(lines[1], "hash-256,table,pipe,false,false,5,66.7,50.0,,100.0,,false");
    }

    #[test]
    fn failed_cells_have_no_accuracy() {
        let r = report(ReprConfig::grid()[3], &[], Some("boom"));
        let csv = emit_report(&[r], ReportFormat::Csv);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "hash-256,table,pipe,true,true,5,,,,,,true"
        );
    }

    #[test]
    fn grouped_bars_layout() {
        let reports: Vec<_> = ReprConfig::grid()
            .iter()
            .map(|c| report(*c, &[], None))
            .collect();
        let v: serde_json::Value =
            serde_json::from_str(&emit_report(&reports, ReportFormat::GroupedBars)).unwrap();
        let panels = v["panels"].as_array().unwrap();
        assert_eq!(panels.len(), 4);
        assert_eq!(panels[1]["chunk_level"], "row");
        assert_eq!(panels[1]["separator"], "pipe");
        let groups = panels[0]["groups"].as_array().unwrap();
        let keys: Vec<_> = groups
            .iter()
            .map(|g| (g["repeat_header"].as_bool().unwrap(), g["include_text"].as_bool().unwrap()))
            .collect();
        assert_eq!(keys, vec![(false, false), (false, true), (true, false), (true, true)]);
        assert_eq!(groups[0]["bars"][0]["provider"], "hash-256");
    }
}
