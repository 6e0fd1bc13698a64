#![no_main]

use libfuzzer_sys::fuzz_target;
use lagmix::experiment::parse_plot_data;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(plot) = parse_plot_data(text) else { return };
    for row in &plot.rows {
        assert_eq!(row.len(), plot.columns.len());
    }
});
