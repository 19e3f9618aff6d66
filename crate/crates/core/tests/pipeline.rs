use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use aviary_sense::aggregate::read_correlations_csv;
use aviary_sense::config::PipelineConfig;
use aviary_sense::pipeline::run_pipeline;
use aviary_sense::report::{render_svg, Figure};
use aviary_sense::synth::{generate_dataset, SynthConfig};

fn small_dataset(dir: &Path) -> PipelineConfig {
    let mut cfg = SynthConfig {
        seed: 77,
        first_week: 5,
        acoustic_clips_per_week: 3,
        flow_clips_per_week: 1,
        thermal_images_per_week: 3,
        rooms: 1,
        ..SynthConfig::default()
    };
    cfg.audio.clip_s = 0.5;
    cfg.video.before_s = 8.0;
    cfg.video.during_s = 4.0;
    cfg.video.after_s = 8.0;
    generate_dataset(&cfg, dir).unwrap();
    PipelineConfig::load(&dir.join("pipeline.json")).unwrap()
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .flatten()
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn end_to_end_outputs_are_stable_and_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let cfg = small_dataset(&data);
    let (out_a, out_b) = (tmp.path().join("a"), tmp.path().join("b"));
    let artifacts = run_pipeline(&data, &out_a, &cfg).unwrap();
    run_pipeline(&data, &out_b, &cfg).unwrap();
    // rerunning into a populated directory overwrites in place
    run_pipeline(&data, &out_b, &cfg).unwrap();
    let (a, b) = (read_dir(&out_a), read_dir(&out_b));
    assert_eq!(a, b);
    assert_eq!(artifacts.len(), a.len());

    for name in [
        "feature_table.csv",
        "correlations.csv",
        "contrast.json",
        "stats.json",
        "trajectories.svg",
    ] {
        assert!(a.contains_key(name), "{name} missing: {:?}", a.keys());
    }

    // every figure is a pure function of its sibling CSV
    let (w, h) = (cfg.report.width, cfg.report.height);
    for fig in Figure::ALL {
        let csv = &a[&format!("{}.csv", fig.stem())];
        let svg = &a[&format!("{}.svg", fig.stem())];
        assert_eq!(&render_svg(fig, csv, w, h).unwrap(), svg, "{}", fig.stem());
    }

    // heatmap marks agree with the correlation table
    let corr = read_correlations_csv(a["correlations.csv"].as_slice(), cfg.stats.q_threshold).unwrap();
    assert_eq!(corr.entries.len(), 45);
    let mut rdr = csv::Reader::from_reader(a["heatmap.csv"].as_slice());
    let mut marked = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let sig = &rec[4] == "true";
        if rec[0] != rec[1] {
            let e = corr.get(&rec[0], &rec[1]).unwrap();
            assert_eq!(sig, e.significant, "{} ~ {}", &rec[0], &rec[1]);
        }
        marked += usize::from(sig);
    }
    let svg = String::from_utf8(a["heatmap.svg"].clone()).unwrap();
    assert_eq!(svg.matches('*').count(), marked);
}

#[test]
fn missing_inputs_are_reported_by_path() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run_pipeline(
        &tmp.path().join("nowhere"),
        &tmp.path().join("out"),
        &PipelineConfig::default(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("nowhere"), "{err}");
}
