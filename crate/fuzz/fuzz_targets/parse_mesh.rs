#![no_main]

use libfuzzer_sys::fuzz_target;
use lagmix::mesh::{parse_mfem_mesh, write_mfem_mesh};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mesh) = parse_mfem_mesh(text) else { return };
    // Anything accepted must survive a write and re-read.
    let again = parse_mfem_mesh(&write_mfem_mesh(&mesh)).expect("reparse");
    assert_eq!(again.num_elements(), mesh.num_elements());
    assert_eq!(again.num_vertices(), mesh.num_vertices());
});
