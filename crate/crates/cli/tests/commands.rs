use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nrlink::denoise::median_filter;
use nrlink::link::{read_manifest, MANIFEST_FILE};
use nrlink::synthetic::natural_image;
use nrlink::ImagePayload;

fn nrlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrlink"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("spawn nrlink")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_single_point_is_reproducible() {
    let input = tempfile::tempdir().unwrap();
    let out_a = tempfile::tempdir().unwrap();
    let out_b = tempfile::tempdir().unwrap();
    natural_image(32, 24, 5).write_png(input.path().join("img.png")).unwrap();
    fs::write(input.path().join("broken.png"), b"not a png").unwrap();
    let config = input.path().join("link.cfg");
    fs::write(&config, "# one point\nsnr_db = 4\ndoppler_hz = 300\nseed = 11\n").unwrap();

    let mut digests = Vec::new();
    for out in [&out_a, &out_b] {
        let o = nrlink(&[
            "generate",
            "--config",
            path(&config),
            "--in",
            path(input.path()),
            "--out",
            path(out.path()),
            "--workers",
            "1",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("broken.png"));
        digests.push(stdout(&o).trim().to_owned());
        let rows = read_manifest(&out.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].snr_db, rows[0].doppler_hz), (4.0, 300.0));
        let group = fs::read_dir(out.path().join("snr4_dop300")).unwrap().count();
        assert_eq!(group, 1);
        assert!(out.path().join("clean/img.png").is_file());
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0].len(), 64);
}

#[test]
fn generate_flags_override_config() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    natural_image(16, 16, 1).write_png(input.path().join("a.png")).unwrap();
    let o = nrlink(&[
        "generate",
        "--in",
        path(input.path()),
        "--out",
        path(out.path()),
        "--snr",
        "-2,20",
        "--doppler",
        "0",
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_manifest(&out.path().join(MANIFEST_FILE)).unwrap();
    let points: Vec<f64> = rows.iter().map(|r| r.snr_db).collect();
    assert_eq!(points, vec![-2.0, 20.0]);
    assert!(out.path().join("snr-2_dop0/a.png").is_file());
}

#[test]
fn generate_usage_errors() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let missing = input.path().join("nope.cfg");
    let o = nrlink(&["generate", "--config", path(&missing), "--in", path(input.path()), "--out", path(out.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.cfg"));

    let o = nrlink(&["generate", "--in", path(&input.path().join("absent")), "--out", path(out.path())]);
    assert_eq!(o.status.code(), Some(1));

    let o = nrlink(&["generate", "--in", path(input.path()), "--out", path(out.path()), "--snr", "x"]);
    assert_eq!(o.status.code(), Some(1));

    // A directory without readable images is a runtime failure.
    let o = nrlink(&["generate", "--in", path(input.path()), "--out", path(out.path()), "--snr", "1", "--doppler", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mean_on_constant_images_copies_bytes() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    fs::create_dir_all(input.path().join("snr1_dop100")).unwrap();
    for (i, v) in [0u8, 77, 255].into_iter().enumerate() {
        ImagePayload::filled(13, 9, 3, v)
            .write_png(input.path().join(format!("snr1_dop100/c{i}.png")))
            .unwrap();
    }
    let o = nrlink(&["denoise", "--method", "mean", "--in", path(input.path()), "--out", path(out.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    for i in 0..3 {
        let rel = format!("snr1_dop100/c{i}.png");
        let a = ImagePayload::read_png(input.path().join(&rel)).unwrap();
        let b = ImagePayload::read_png(out.path().join(&rel)).unwrap();
        assert_eq!(a.pixels, b.pixels);
    }
}

#[test]
fn median_matches_library() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let imgs: Vec<_> = (0..3).map(|s| natural_image(30, 22, s)).collect();
    for (i, img) in imgs.iter().enumerate() {
        img.write_png(input.path().join(format!("m{i}.png"))).unwrap();
    }
    let o = nrlink(&[
        "denoise",
        "--method",
        "median",
        "--window",
        "5",
        "--in",
        path(input.path()),
        "--out",
        path(out.path()),
        "--workers",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for (i, img) in imgs.iter().enumerate() {
        let got = ImagePayload::read_png(out.path().join(format!("m{i}.png"))).unwrap();
        assert_eq!(got, median_filter(img, 5).unwrap());
    }
}

#[test]
fn bm3d_without_sigma_logs_estimate() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    natural_image(32, 32, 9).write_png(input.path().join("n.png")).unwrap();
    let o = nrlink(&["denoise", "--method", "bm3d", "--in", path(input.path()), "--out", path(out.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("estimated sigma"), "{}", stderr(&o));
    assert!(out.path().join("n.png").is_file());
}

#[test]
fn unknown_method_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = nrlink(&["denoise", "--method", "wavelet", "--in", path(d.path()), "--out", path(d.path())]);
    assert_eq!(o.status.code(), Some(1));
    let o = nrlink(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = nrlink(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn evaluate_against_itself_is_perfect() {
    let d = tempfile::tempdir().unwrap();
    for s in 0..3 {
        natural_image(24, 20, s).write_png(d.path().join(format!("i{s}.png"))).unwrap();
    }
    let o = nrlink(&["evaluate", "--clean", path(d.path()), "--in", path(d.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,group,image_stem,snr_db,doppler_hz,count,psnr,ssim,iou,map50,map50_95"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r[6], "inf");
        assert_eq!(r[7], "1");
    }
}

#[test]
fn evaluate_group_rows_average_images() {
    let root = tempfile::tempdir().unwrap();
    let clean = root.path().join("clean");
    let test = root.path().join("data");
    fs::create_dir_all(&clean).unwrap();
    fs::create_dir_all(test.join("snr3_dop350")).unwrap();
    let mut expect = 0.0;
    for s in 0..4u64 {
        let c = natural_image(24, 24, s);
        let t = natural_image(24, 24, s + 10);
        expect += nrlink::metrics::psnr(&c, &t).unwrap() / 4.0;
        c.write_png(clean.join(format!("k{s}.png"))).unwrap();
        t.write_png(test.join(format!("snr3_dop350/k{s}.png"))).unwrap();
    }
    let report = root.path().join("report/eval.csv");
    let o = nrlink(&["evaluate", "--clean", path(&clean), "--in", path(&test), "--out", path(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    let group: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("group,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(&group[1..6], &["snr3_dop350", "", "3", "350", "4"]);
    let psnr: f64 = group[6].parse().unwrap();
    assert!((psnr - expect).abs() < 1e-9);
}
