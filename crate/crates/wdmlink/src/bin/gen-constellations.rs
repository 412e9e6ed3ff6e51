//! Regenerates the bundled shaped constellations.
//!
//! Each is a product of two geometrically shaped, Gray-labelled PAM axes
//! (see `wdmlink_core::shaping`): GS-1024 as 32x32 shaped at 19 dB and
//! GS-2048 as 64x32 shaped at 22 dB.
//!
//! Usage: gen-constellations [DIR]   (default: fixtures/data)

use std::path::PathBuf;
use std::process::ExitCode;

use wdmlink_core::shaping::shaped_product;

const ROUNDS: usize = 40;

fn main() -> ExitCode {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("fixtures/data"), PathBuf::from);
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("error: {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for (name, bits_i, bits_q, snr_db) in [("gs1024", 5, 5, 19.0), ("gs2048", 6, 5, 22.0)] {
        let c = match shaped_product(name, bits_i, bits_q, snr_db, ROUNDS) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {name}: {e}");
                return ExitCode::from(2);
            }
        };
        let path = dir.join(format!("{name}.txt"));
        let text = format!(
            "# {}x{} product of shaped PAM axes, design SNR {snr_db} dB\n{}",
            1 << bits_i,
            1 << bits_q,
            c.to_text()
        );
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
        println!("{}", path.display());
    }
    ExitCode::SUCCESS
}
