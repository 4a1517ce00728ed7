//! Rasterize the translation set of the unit backward shift and write both
//! the text grid and a P3 pixmap next to the target directory.
//!
//! ```bash
//! cargo run --release --example scan_translation_set
//! ```

use lyscan::classifier::Budget;
use lyscan::numkit::C64;
use lyscan::operators::{Operator, WeightRule};
use lyscan::scanner::{render, scan, ScanRegion};

fn main() {
    let op = Operator::backward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    let region = ScanRegion::auto(&op, 101);
    let result = scan(&op, region, &Budget::default());
    let (chaotic, not, undetermined) = result.counts();
    println!(
        "scan of {} over half-width {:.2}: C = {chaotic}, N = {not}, U = {undetermined}",
        result.operator, region.half_width
    );

    let dir = std::env::temp_dir().join("lyscan-example");
    std::fs::create_dir_all(&dir).unwrap();
    let text_path = dir.join("backward_shift.scan");
    let image_path = dir.join("backward_shift.ppm");
    std::fs::write(&text_path, result.to_text()).unwrap();
    std::fs::write(&image_path, render(&result, Some(op.spectrum()))).unwrap();
    println!("wrote {}", text_path.display());
    println!("wrote {} (annulus in red, unit circle overlay in white)", image_path.display());

    // Compact ASCII preview, one character per 4x4 block.
    println!("\npreview (C chaotic, . not, ? undetermined):");
    for row in (0..101).step_by(4) {
        let mut line = String::new();
        for col in (0..101).step_by(4) {
            line.push(match result.code_at(row, col) {
                'C' => 'C',
                'N' => '.',
                _ => '?',
            });
        }
        println!("  {line}");
    }
}
