use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::{Error, Result};

/// CSV writer that always emits `header`, even for an empty table.
pub fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(header)?;
    Ok(w)
}

pub fn finish(path: &Path, mut w: csv::Writer<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Open a CSV file and insist on an exact header.
pub fn csv_reader(path: &Path, header: &[&str]) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(BufReader::new(file));
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            expected: header.join(","),
            found: found.join(","),
        });
    }
    Ok(rdr)
}

/// Read a whole table of `T` rows.
pub fn read_table<T: serde::de::DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    csv_reader(path, header)?
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
