//! Own test binary: it sets `COVERT_LAB_THREADS`, which no other test reads.

use covert_lab::csv::render_csv;
use covert_lab::recipes::figure_recipe;
use covert_lab::sweep::{run_sweep, worker_count};

#[test]
fn row_order_ignores_worker_count() {
    let spec = figure_recipe("fig9_fri").unwrap();
    std::env::set_var("COVERT_LAB_THREADS", "1");
    assert_eq!(worker_count(), 1);
    let serial = render_csv(&spec, &run_sweep(&spec).unwrap()).unwrap();
    std::env::set_var("COVERT_LAB_THREADS", "4");
    assert_eq!(worker_count(), 4);
    let pooled = render_csv(&spec, &run_sweep(&spec).unwrap()).unwrap();
    assert_eq!(serial, pooled);
    std::env::set_var("COVERT_LAB_THREADS", "zero");
    assert!(worker_count() >= 1);
}
