//! Print the canonical full feature pool in the versioned pool-file format.
//!
//!     cargo run -p vqfuse-core --example gen_pool > data/pool-v1.txt

use vqfuse_core::features::PoolSpec;

fn main() {
    print!("{}", PoolSpec::full().render());
}
