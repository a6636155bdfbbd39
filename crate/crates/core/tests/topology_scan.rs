//! Class monotonicity over a dense scan of the street separation.

use vlab_core::lattice::StreetParams;
use vlab_core::topology::{topology_class, TopologyError};

#[test]
fn traced_class_is_a_unit_step_function_of_h() {
    let mut last = 0;
    let mut skipped = 0;
    for i in 0..200 {
        let h = 1.2 - 0.5 * i as f64 / 199.0;
        let p = StreetParams::unit(0.2805, h, 150).unwrap();
        match topology_class(&p) {
            Ok(c) => {
                assert!(c.k >= last && c.k <= last.max(1) + 1, "h = {h}: {last} -> {}", c.k);
                last = c.k;
            }
            Err(TopologyError::Degenerate { .. }) => skipped += 1,
            Err(e) => panic!("h = {h}: {e}"),
        }
    }
    assert!(skipped <= 2);
    assert!(last >= 4, "{last}");
}
