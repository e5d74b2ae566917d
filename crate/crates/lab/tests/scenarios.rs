use taylorlab::figures::{reproduce_figure, FigureId};
use taylorlab::geometry::self_intersections;
use taylorlab::{presets, run_scenario, OutputFormat, RunOptions};
use taylorlab_core::field::LvParams;
use taylorlab_core::integrate::uniform_grid;
use taylorlab_core::series::generate_taylor_solution;
use taylorlab_core::ModelInstance;

#[test]
fn every_preset_passes() {
    for name in presets::names() {
        let config = presets::load(name).unwrap().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions {
            out_dir: dir.path().to_path_buf(),
            format: OutputFormat::Csv,
        };
        let outcome = run_scenario(&config, &opts).unwrap();
        assert!(!outcome.report.rows.is_empty(), "{name}: no rows");
        assert!(
            outcome.report.all_pass(),
            "{name}: {:?}",
            outcome.report.failures()
        );
    }
}

#[test]
fn every_figure_passes() {
    for id in FigureId::ALL {
        let dir = tempfile::tempdir().unwrap();
        let outcome = reproduce_figure(id, dir.path(), OutputFormat::Both).unwrap();
        assert!(
            outcome.report.all_pass(),
            "{id}: {:?}",
            outcome.report.failures()
        );
        assert!(outcome.files.len() >= 2, "{id}: {:?}", outcome.files);
    }
}

#[test]
fn case_v_series_crosses_itself_only_on_the_long_window() {
    let model = ModelInstance::lotka_volterra(LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), 3.0, 2.0)
        .unwrap();
    let curve = |order: usize, t_end: f64| -> Vec<(f64, f64)> {
        let series = generate_taylor_solution(&model, order).unwrap();
        uniform_grid(t_end, 601)
            .iter()
            .map(|&t| {
                let s = series.eval(t);
                (s[0], s[1])
            })
            .collect()
    };
    assert!(!self_intersections(&curve(5, 6.0)).is_empty());
    // well inside the radius the series traces an arc of the orbit
    assert!(self_intersections(&curve(5, 0.5)).is_empty());
}
