use std::env;
use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("cbindgen.toml parses");
    match cbindgen::generate_with_config(&dir, config) {
        Ok(bindings) => {
            bindings.write_to_file(dir.join("include/hullmetry.h"));
        }
        // Keep building when the header cannot be regenerated (e.g. while the
        // source is mid-edit); the checked-in header stays as it was.
        Err(e) => println!("cargo:warning=cbindgen: {e}"),
    }
}
