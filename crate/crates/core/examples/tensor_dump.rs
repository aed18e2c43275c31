//! Round trip of a feature map through the RADT dump format.

use radconv::numerics::{read_dump, write_dump, DUMP_MAGIC};
use radconv::FeatureMap;

fn main() -> radconv::Result<()> {
    let map = FeatureMap::from_fn(2, 3, 4, |c, y, x| (c * 100 + y * 10 + x) as f64 + 0.25)?;
    let mut bytes = Vec::new();
    write_dump(&mut bytes, &map)?;
    println!(
        "{} bytes, magic {:?}, header {:02x?}",
        bytes.len(),
        std::str::from_utf8(&DUMP_MAGIC).unwrap(),
        &bytes[..17]
    );
    let back = read_dump(bytes.as_slice())?;
    assert_eq!(back, map);
    println!("read back {:?}, x[1, 2, 3] = {}", back.shape(), back.get(1, 2, 3));
    Ok(())
}
