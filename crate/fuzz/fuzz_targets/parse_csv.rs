#![no_main]

use libfuzzer_sys::fuzz_target;
use lagmix::experiment::{read_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_csv(data) else { return };
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).expect("in-memory write");
    assert_eq!(read_csv(buf.as_slice()).expect("reparse").len(), rows.len());
});
