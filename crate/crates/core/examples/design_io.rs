//! Designs as JSON and CSV.

use chebdesign::design::Design;

fn main() -> chebdesign::Result<()> {
    let d = Design::normalized(&[1.0, 0.0, 1.0], &[1.0, 2.0, 1.0])?;
    let json = d.to_json();
    let csv = d.to_csv();
    println!("{json}\n{csv}");
    assert_eq!(Design::from_json(&json)?, d);
    assert_eq!(Design::from_csv(&csv)?, d);
    Ok(())
}
