//! Seeded instances shared by the benchmarks.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toposkit::modules::FinRing;
use toposkit::presheaf::{ModPresheaf, SetPresheaf};
use toposkit::random;
use toposkit::site::GrothendieckTopology;
use toposkit::FinCategory;

pub struct Site {
    pub category: Arc<FinCategory>,
    pub topology: GrothendieckTopology,
    pub set: SetPresheaf,
    pub module: ModPresheaf,
}

/// A random site with one Set and one Z/2 presheaf on it.
pub fn site(seed: u64, max_value: usize) -> Site {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let category = Arc::new(random::category(&mut rng));
    let topology = random::topology(&mut rng, &category);
    let set = random::set_presheaf(&mut rng, &category, max_value);
    let ring = FinRing::cyclic(2).expect("Z/2");
    let module = random::mod_presheaf(&mut rng, &category, &ring, 1 << max_value);
    Site { category, topology, set, module }
}
