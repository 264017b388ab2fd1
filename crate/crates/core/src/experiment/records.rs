use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ExperimentError, FlowConfig, RunRecord, Verdict};
use crate::puzzle::{is_solvable, Board};

pub const CSV_HEADER: &str = "board_id,width,cells,flow,solvable,result,generated,retained,given,moves,wall_ms";

#[derive(Serialize, Deserialize)]
struct Row {
    board_id: u32,
    width: usize,
    cells: String,
    flow: String,
    solvable: bool,
    result: String,
    generated: u64,
    retained: u64,
    given: u64,
    moves: Option<u64>,
    wall_ms: f64,
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<(), ExperimentError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER.split(',')).map_err(csv_io)?;
    for r in records {
        writer
            .serialize(Row {
                board_id: r.board_id,
                width: r.board.width(),
                cells: r.board.dashed(),
                flow: r.flow.name().to_string(),
                solvable: is_solvable(&r.board),
                result: r.result.name().to_string(),
                generated: r.generated,
                retained: r.retained,
                given: r.given,
                moves: r.moves,
                wall_ms: r.wall_ms,
            })
            .map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> ExperimentError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => ExperimentError::Io(io),
        other => ExperimentError::Csv { row: 0, message: format!("{other:?}") },
    }
}

/// Reads records back. Row numbers in errors count the header as row 1.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| ExperimentError::Csv { row: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(ExperimentError::Csv { row: 1, message: format!("expected header {CSV_HEADER:?}") });
    }
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let bad = |message: String| ExperimentError::Csv { row: line, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let board = Board::from_cells_text(row.width, &row.cells, '-').map_err(|e| bad(e.to_string()))?;
        let flow: FlowConfig = row.flow.parse().map_err(|e: ExperimentError| bad(e.to_string()))?;
        let result = Verdict::from_name(&row.result).ok_or_else(|| bad(format!("unknown result {:?}", row.result)))?;
        records.push(RunRecord {
            board_id: row.board_id,
            board,
            flow,
            result,
            generated: row.generated,
            retained: row.retained,
            given: row.given,
            moves: row.moves,
            wall_ms: row.wall_ms,
        });
    }
    Ok(records)
}
