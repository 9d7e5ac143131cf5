//! Designs and efficiencies for `b = (-1 - z, -1 + z)`.

use chebdesign::cli::tables::{table1, table2};

fn main() -> chebdesign::Result<()> {
    let z = [0.1, 0.5, 0.9];
    print!("{}", table1(&z).to_csv(true));
    print!("{}", table2(&z)?.to_csv(true));
    Ok(())
}
