use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polariton(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_polariton"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("POLARITON_THREADS", n),
        None => cmd.env_remove("POLARITON_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_ok(args: &[&str]) {
    let o = polariton(args, None);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
}

#[test]
fn presets_are_listed_and_printed() {
    let o = polariton(&["presets"], None);
    let names = String::from_utf8(o.stdout).unwrap();
    assert_eq!(names.lines().collect::<Vec<_>>(), ["fig1", "fig2", "fig3b", "fig3cde", "fig4"]);
    let o = polariton(&["presets", "fig2"], None);
    assert!(String::from_utf8(o.stdout).unwrap().contains("c_plus = 33.8"));
}

#[test]
fn fig1_spectrum_row_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    run_ok(&["spectrum", "--preset", "fig1", "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("0.00000000000e0,")).expect("row at zero detuning");
    let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    // 4κ₁κ₂/κ² / (1 + 2C)² with C = 50.
    assert!((v[1] / (1.0 / 101.0f64.powi(2)) - 1.0).abs() < 1e-9, "{row}");
    assert_eq!(v[2], 1.0);
    let manifest = fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert!(manifest.starts_with("file,bytes,sha256\nconfig.txt,"));
}

#[test]
fn overrides_and_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = polariton(
        &["run", "--preset", "fig3b", "--set", "delta_points=5", "--set", "c_plus=0", "--out", out.to_str().unwrap(), "--json"],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"input_hash\"") && text.contains("\"spectrum.csv\""), "{text}");
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    // Both branches are bare cavities now.
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.00000000000e0")), "{csv}");
}

#[test]
fn failures_report_a_category_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "scenario = spectrum\nkappa_mhz = -1\ngamma_mhz = 0\n").unwrap();
    let o = polariton(&["run", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[config]: ") && err.contains("kappa_mhz = -1") && err.contains("gamma_mhz = 0"), "{err}");

    let o = polariton(&["run", "--config", dir.path().join("missing.conf").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[io]: "));

    let o = polariton(&["run", "--preset", "fig9"], None);
    assert_eq!(o.status.code(), Some(3));

    let o = polariton(&["run", "--preset", "fig1", "--out", dir.path().to_str().unwrap()], Some("zero"));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("POLARITON_THREADS"));

    let o = polariton(&["run"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_recovers_a_generated_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    run_ok(&["spectrum", "--preset", "fig3b", "--set", "delta_points=121", "--out", gen.to_str().unwrap()]);
    let conf = dir.path().join("fit.conf");
    fs::write(
        &conf,
        "scenario = fit\nkappa_mhz = 3.7\ngamma_mhz = 2.6\nc_plus = 25\nc_minus = 0\ng0_mhz = 1.7\ninput_csv = gen/spectrum.csv\nfit_free = c_plus\n",
    )
    .unwrap();
    let out = dir.path().join("fit");
    run_ok(&["fit", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("fit.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("c_plus,")).unwrap();
    let c: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((c / 33.8 - 1.0).abs() < 1e-6, "{row}");

    fs::write(dir.path().join("gen/spectrum.csv"), "delta_mhz,t_plus,t_minus\n0,1\n").unwrap();
    let o = polariton(&["fit", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).starts_with("error[input]: ") && stderr(&o).contains("spectrum.csv:2:"), "{}", stderr(&o));
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let o = polariton(
            &["g2", "--preset", "fig4", "--set", "delta_points=9", "--set", "tau_points=21", "--out", out.to_str().unwrap()],
            Some(threads),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains(&format!("({threads} threads")));
        runs.push(snapshot(&out));
    }
    assert_eq!(runs[0], runs[1]);
}
