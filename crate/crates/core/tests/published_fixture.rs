use std::path::Path;

use oodselect_core::data_model::{read_performance_matrix, PerformanceMatrix};
use oodselect_core::registry::Registry;

#[test]
fn fixture_parses_in_registry_order() {
    let p = read_performance_matrix(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/published_auroc.csv"))
        .unwrap();
    assert_eq!((p.n_pairs(), p.n_models()), (12, 9));
    assert_eq!(p.model_ids(), Registry::detectors().ids());
    assert_eq!(p.value(p.pair_index("near_epic").unwrap(), 1), 0.6852);
    let again = PerformanceMatrix::from_csv(&p.to_csv(), "again").unwrap();
    assert_eq!(again, p);
}
