use proptest::prelude::*;

use coalesce_core::closed_form::x_of_t;
use coalesce_core::coalescent::ClusterMass;
use coalesce_core::experiments::*;
use coalesce_core::graph_mst::GraphSpec;

fn round_trip(t: &ResultTable) {
    t.check_schema().unwrap();
    let text = t.to_csv_string();
    let back = ResultTable::read_csv(text.as_bytes()).unwrap();
    assert_eq!(&back, t);
    assert_eq!(back.to_csv_string(), text);
}

#[test]
fn every_command_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let tables = vec![
        cmd_limits(&LimitsConfig {
            gammas: vec![0.25, 4.0],
            tol: 1e-9,
            max_diagonal: 5000,
        })
        .unwrap(),
        cmd_ode(&OdeConfig {
            system: OdeSystem::Bi {
                k1: 6,
                k2: 6,
                alpha: 1.0,
                beta: 2.0,
            },
            times: vec![0.0, 0.3],
            track: 2,
            rk4_step: Some(1e-3),
        })
        .unwrap(),
        cmd_simulate(&SimulateConfig {
            kernel: KernelChoice::Multiplicative,
            n: 100,
            times: vec![0.5, 1.5],
            max_mass: 3,
            replicates: 4,
            sampler: Sampler::GraphCoupled,
            seed: 1,
        })
        .unwrap(),
        cmd_hydro(&HydroConfig {
            kernel: KernelChoice::Cross {
                alpha: 1.0,
                beta: 1.0,
            },
            ns: vec![100],
            times: vec![0.0, 1.0],
            max_mass: 2,
            replicates: 3,
            seed: 2,
        })
        .unwrap(),
        cmd_mst(&MstConfig {
            graphs: vec![GraphSpec::Bipartite(1, 1), GraphSpec::Complete(10)],
            replicates: 5,
            tol: 1e-9,
            seed: 3,
        })
        .unwrap(),
        cmd_gelation(&GelationConfig {
            alphas: vec![1.0, 3.0],
            betas: vec![2.0],
        })
        .unwrap(),
        cmd_fluctuations(&FluctuationsConfig {
            kernel: KernelChoice::Multiplicative,
            ns: vec![50, 100],
            t: 0.5,
            mass: ClusterMass::mono(2),
            replicates: 6,
            seed: 4,
        })
        .unwrap(),
    ];
    for t in &tables {
        round_trip(t);
        let path = dir
            .path()
            .join(format!("{}.csv", t.meta("command").unwrap()));
        t.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let file = std::io::BufReader::new(std::fs::File::open(&path).unwrap());
        assert_eq!(&ResultTable::read_csv(file).unwrap(), t);
    }
}

#[test]
fn ode_matches_closed_form_and_mass() {
    let mono = cmd_ode(&OdeConfig {
        system: OdeSystem::Mono { truncation: 40 },
        times: vec![0.0, 0.5, 1.0],
        track: 3,
        rk4_step: None,
    })
    .unwrap();
    let worst = mono
        .column_f64("max_abs_delta")
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6);

    let late = cmd_ode(&OdeConfig {
        system: OdeSystem::Mono { truncation: 200 },
        times: vec![2.0],
        track: 1,
        rk4_step: None,
    })
    .unwrap();
    let mass = late.get_f64(0, "mass").unwrap();
    assert!((mass - x_of_t(2.0).unwrap() / 2.0).abs() < 2e-3);
}

#[test]
fn mst_reports_limits() {
    let t = cmd_mst(&MstConfig {
        graphs: vec![GraphSpec::Bipartite(40, 20), GraphSpec::Bipartite(1, 1)],
        replicates: 400,
        tol: 1e-9,
        seed: 8,
    })
    .unwrap();
    let limit = coalesce_core::closed_form::mst_limit_bipartite(2.0, 1e-9).unwrap();
    assert_eq!(t.get_f64(0, "limit"), Some(limit.value));
    let (mean, se) = (
        t.get_f64(1, "mean").unwrap(),
        t.get_f64(1, "std_error").unwrap(),
    );
    assert!((mean - 0.5).abs() <= 3.0 * se);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(cmd_limits(&LimitsConfig {
        gammas: vec![-1.0],
        tol: 1e-9,
        max_diagonal: 100,
    })
    .is_err());
    assert!(cmd_simulate(&SimulateConfig {
        kernel: KernelChoice::Multiplicative,
        n: 10,
        times: vec![1.0, 0.5],
        max_mass: 1,
        replicates: 2,
        sampler: Sampler::Gillespie,
        seed: 0,
    })
    .is_err());
    assert!(cmd_mst(&MstConfig {
        graphs: vec![GraphSpec::Complete(1)],
        replicates: 5,
        tol: 1e-9,
        seed: 0,
    })
    .is_err());
}

fn value_strategy(kind: ColumnKind) -> BoxedStrategy<Value> {
    match kind {
        ColumnKind::Int => any::<i64>().prop_map(Value::Int).boxed(),
        ColumnKind::Real => any::<f64>().prop_map(Value::Real).boxed(),
        ColumnKind::Text => "[ -~]{0,12}".prop_map(Value::Text).boxed(),
    }
}

fn table_strategy() -> impl Strategy<Value = ResultTable> {
    let kinds = prop::collection::vec(
        prop_oneof![
            Just(ColumnKind::Int),
            Just(ColumnKind::Real),
            Just(ColumnKind::Text)
        ],
        1..5,
    );
    kinds.prop_flat_map(|kinds| {
        let row = kinds.iter().map(|&k| value_strategy(k)).collect::<Vec<_>>();
        (
            Just(kinds),
            prop::collection::vec(row, 0..6),
            "[a-z_]{1,8}",
            "[ -~]{0,16}",
        )
            .prop_map(|(kinds, rows, key, value)| {
                let cols = kinds
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| Column::new(format!("c{i}"), k))
                    .collect();
                let mut t = ResultTable::new("prop", cols);
                if key != "schema" {
                    t.push_meta(key, value).unwrap();
                }
                for r in rows {
                    t.push_row(r).unwrap();
                }
                t
            })
    })
}

proptest! {
    #[test]
    fn arbitrary_tables_round_trip(t in table_strategy()) {
        let text = t.to_csv_string();
        let back = ResultTable::read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back, t);
    }
}
