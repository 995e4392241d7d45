use lcc::arecibo::{load_arecibo_fixture, scan_hierarchy_config};
use lcc::hierarchy::lcc_continuous;
use lcc::hierarchy::DataTensor;
use rand::{Rng, SeedableRng};
use std::path::Path;

fn main() {
    let bits = load_arecibo_fixture(Path::new("crates/lcc/fixtures/arecibo.bits")).unwrap();
    let ones = bits.iter().filter(|&&b| b == 1).count() as f64 / bits.len() as f64;
    for (h, w) in [(73usize, 23usize), (77, 22), (42, 40), (100, 17)] {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut data: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
        while data.len() < h * w {
            data.push(if rng.gen_bool(ones) { 1.0 } else { 0.0 });
        }
        let t = DataTensor::new(vec![h, w], 1, data).unwrap();
        let enc = lcc_continuous(&t, &scan_hierarchy_config(0)).unwrap();
        println!("== {h}x{w}: lcc={:.0} total={:.0}", enc.breakdown.lcc_score, enc.breakdown.total());
        for l in &enc.levels {
            let x = l.partition.labels.iter().filter(|&&v| v == u32::MAX).count();
            println!(
                "   level {} patch {} K={} n={} x={} dim={} model={:.0} idx={:.0} resid={:.0}",
                l.index.level, l.patch, l.partition.components.len(),
                l.partition.labels.len(), x, l.embed_dim,
                l.costs.model_cost, l.costs.idx_cost, l.costs.residual_cost
            );
        }
    }
}
