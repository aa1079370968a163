use opinion_migration::artifacts::{write_populations_csv, write_rates_csv};
use opinion_migration::metrics::{fluctuation_range, mean, windowed_rates, PopulationSeries};
use opinion_migration::opinion::{simulate_opinions, Exec, OpinionParams};
use opinion_migration::{list_presets, preset, run_compound, SimConfig};

#[test]
fn every_preset_validates_and_echoes() {
    assert_eq!(list_presets().len(), 20);
    for p in list_presets() {
        let c = p.config();
        c.validate().unwrap();
        assert_eq!(c.scenario, p.name);
        let back = SimConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
    let fig4 = preset("fig4b").unwrap();
    assert_eq!(fig4.n(), 500);
    let fig2 = preset("fig2b").unwrap();
    assert_eq!(fig2.opinion, fig4.opinion);
}

#[test]
fn smaller_confidence_fluctuates_less() {
    let range = |d: f64| {
        let run = simulate_opinions(50, &OpinionParams::new(d, 1.0, 1.0), None, 100, 8, Exec::Serial).unwrap();
        mean(&(0..50).map(|i| fluctuation_range(&run.agent_series(i), 0).unwrap()).collect::<Vec<_>>())
    };
    let (wide, narrow) = (range(1.0), range(0.1));
    assert!(wide > narrow, "range(d=1) {wide} vs range(d=0.1) {narrow}");
}

#[test]
fn rate_table_for_a_known_series() {
    let series = PopulationSeries { counts: vec![[25, 25], [30, 20], [30, 20], [20, 30]] };
    let rates = windowed_rates(&series, 1).unwrap();
    assert_eq!(rates.len(), 6);
    let mut buf = Vec::new();
    write_rates_csv(&mut buf, &rates).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "window_start,community_id,ngr,nmr");
    assert!(lines[1].starts_with("0,0,"));
    assert_eq!(lines[3], "1,0,0,0");
    let mut buf = Vec::new();
    write_populations_csv(&mut buf, &series).unwrap();
    assert!(String::from_utf8(buf).unwrap().lines().skip(1).all(|l| l.split(',').count() == 3));
}

#[test]
fn migration_scenarios_conserve_population() {
    for name in ["fig5a", "fig5b", "fig6", "fig7-phase-a"] {
        let c = preset(name).unwrap();
        let run = run_compound(&c).unwrap();
        assert!(run.trajectory.populations.is_conserved(c.n()), "{name}");
        assert_eq!(run.trajectory.populations.counts.len(), c.horizon + 1);
    }
}
