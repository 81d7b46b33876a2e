//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strandctl::camera::{project_frame, project_point, CameraIntrinsics, ProjectedFrame};
use strandctl::hair::attach_to_scalp;
use strandctl::io::{parse_scenario, psnr, ssim};
use strandctl::physics::{simulate, HeadMotionScript, PhysicsParams, WindField};
use strandctl::raster::{
    compose_control, compute_hair_mask, rasterize_pose_map, rasterize_strand_map, ControlSequence, Dims, HairMask,
    RasterImage,
};
use strandctl::scenario::{
    build_subject, camera_trajectory, default_sweep, run_pipeline, simulate_scenario, Effect, ScenarioConfig, WigSource,
};
use strandctl::{CameraPose, GeometrySequence, HairModel, HumanRig, Strand, Vec3};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn with_strands(n: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    if let WigSource::Generate(spec) = &mut cfg.wig {
        spec.strand_count = n;
    }
    cfg
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn projected(cfg: &ScenarioConfig, seq: &GeometrySequence, keys: &[(usize, f64)]) -> Vec<ProjectedFrame> {
    let rig = HumanRig::canonical(cfg.rig.head_radius, cfg.rig.origin);
    let traj = camera_trajectory(cfg, keys, seq.len()).unwrap();
    seq.frames
        .iter()
        .zip(&traj.poses)
        .map(|(f, pose)| project_frame(&seq.offsets, f, &rig, pose, &traj.intrinsics))
        .collect()
}

fn dims_of(cfg: &ScenarioConfig) -> Dims {
    Dims::new(cfg.resolution[0], cfg.resolution[1])
}

// 1
fn minimal_file_defaults() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("minimal.json");
    std::fs::write(&path, "{}").map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cfg = parse_scenario(&path).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let p = &cfg.physics;
    let ok = p.mass == 0.1
        && p.stiffness == 6.0
        && p.damping == 9.0
        && cfg.wind.strength == 10.0
        && p.gravity_scale == 1.0
        && cfg.frames == 81
        && cfg.resolution == [832, 480]
        && took < Duration::from_secs(1);
    check(
        ok,
        format!(
            "mass={} stiffness={} damping={} wind={} gravity_scale={} frames={} resolution={}x{} in {:.3}s",
            p.mass,
            p.stiffness,
            p.damping,
            cfg.wind.strength,
            p.gravity_scale,
            cfg.frames,
            cfg.resolution[0],
            cfg.resolution[1],
            secs(took)
        ),
    )
}

// 2
fn equilibrium() -> Outcome {
    let mut cfg = with_strands(1000);
    cfg.physics.gravity_scale = 0.0;
    cfg.wind.strength = 0.0;
    cfg.wind.gust_amplitude = 0.0;
    let (_, model) = build_subject(&cfg).map_err(|e| e.to_string())?;
    let rest: Vec<Vec3> = model.strands.iter().flat_map(|s| s.vertices.iter().copied()).collect();
    let start = Instant::now();
    let seq = simulate_scenario(&cfg).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let drift =
        seq.frames.iter().flat_map(|f| f.positions.iter().zip(&rest).map(|(p, r)| p.distance(*r))).fold(0.0, f64::max);
    let ok = seq.len() == 81 && drift < 1e-6 && took < Duration::from_secs(5);
    check(ok, format!("max drift {drift:.3e} m over {} frames, {:.2}s", seq.len(), secs(took)))
}

// 3
fn inextensibility(cfg: &ScenarioConfig, seq: &GeometrySequence) -> Outcome {
    let (_, model) = build_subject(cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for frame in &seq.frames {
        for (i, strand) in model.strands.iter().enumerate() {
            let pts = seq.strand(frame, i);
            for (w, rest) in pts.windows(2).zip(&strand.rest_lengths) {
                worst = worst.max((w[0].distance(w[1]) - rest).abs() / rest);
            }
        }
    }
    check(
        worst < 1e-3,
        format!("max relative segment error {worst:.3e} ({} strands, {} frames)", seq.strand_count(), seq.len()),
    )
}

// 4
fn hanging_chain() -> Outcome {
    let rig = HumanRig::canonical(0.1, [0.0; 3]);
    let head = rig.head_sphere;
    let root = head.center + Vec3::new(head.radius, 0.0, 0.0);
    let segments = 8;
    let seg = 0.0125;
    let verts = (0..=segments).map(|i| root + Vec3::new(seg * i as f64, 0.0, 0.0)).collect();
    let model = HairModel { strands: vec![Strand::from_polyline(verts).unwrap()], scalp: head };
    let model = attach_to_scalp(&model, &rig).map_err(|e| e.to_string())?;
    let params = PhysicsParams { stiffness: 0.0, damping: 50.0, gravity_scale: 1.0, ..PhysicsParams::default() };
    let calm = WindField { strength: 0.0, gust_amplitude: 0.0, ..WindField::default() };
    let seq = simulate(&model, &rig, &params, &calm, &HeadMotionScript::default(), 81).map_err(|e| e.to_string())?;
    let last = &seq.frames[80].positions;
    // distance to the ray {root + s·(0, -1, 0) : s >= 0}
    let dist = last
        .iter()
        .map(|p| {
            let (dx, dy, dz) = (p.x - root.x, p.y - root.y, p.z - root.z);
            if dy <= 0.0 {
                (dx * dx + dz * dz).sqrt()
            } else {
                (dx * dx + dy * dy + dz * dz).sqrt()
            }
        })
        .fold(0.0, f64::max);
    check(dist < 1e-2, format!("max distance from vertical ray {dist:.3e} m at frame 81"))
}

fn coverage_centroid(pf: &ProjectedFrame, dims: Dims) -> Option<(f64, f64)> {
    let (_, depth) = rasterize_strand_map(pf, dims);
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for y in 0..dims.height {
        for x in 0..dims.width {
            if depth.at(x, y).is_finite() {
                sx += x as f64 + 0.5;
                sy += y as f64 + 0.5;
                n += 1;
            }
        }
    }
    (n > 0).then(|| (sx / n as f64, sy / n as f64))
}

// 5
fn wind_direction_in_image() -> Outcome {
    let mut cfg = with_strands(2000);
    // seen from above, 70° clockwise from the camera's forward (0, 0, -1)
    let a = 70f64.to_radians();
    cfg.wind.direction = [a.sin(), 0.0, -a.cos()];
    let seq = simulate_scenario(&cfg).map_err(|e| e.to_string())?;
    let keys = cfg.camera.azimuth_keyframes.clone();
    let frames = projected(&cfg, &seq, &keys);
    let dims = dims_of(&cfg);
    let first = coverage_centroid(&frames[0], dims).ok_or("no hair coverage in the first frame")?;
    let last = coverage_centroid(frames.last().unwrap(), dims).ok_or("no hair coverage in the last frame")?;
    // front camera: image x is world +x, image y is world -y
    let w = cfg.wind.direction;
    let img = (w[0], -w[1]);
    let shift = (last.0 - first.0, last.1 - first.1);
    let dot = shift.0 * img.0 + shift.1 * img.1;
    check(
        dot > 0.0,
        format!(
            "centroid moved ({:+.2}, {:+.2}) px, wind image direction ({:.3}, {:.3}), dot {dot:+.3}",
            shift.0, shift.1, img.0, img.1
        ),
    )
}

fn random_image(rng: &mut ChaCha8Rng, d: Dims) -> RasterImage {
    let mut px = vec![0u8; d.pixel_count() * 3];
    rng.fill(&mut px[..]);
    RasterImage::from_pixels(d.width, d.height, px).unwrap()
}

// 6
fn compose_matches_oracle() -> Outcome {
    let dims = Dims::new(832, 480);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatched = 0;
    let start = Instant::now();
    for k in 0..100 {
        let strand = random_image(&mut rng, dims);
        let pose = random_image(&mut rng, dims);
        let density: f64 = rng.random();
        let bits = (0..dims.pixel_count()).map(|_| rng.random::<f64>() < density).collect();
        let mask = HairMask { width: dims.width, height: dims.height, bits };
        let got = compose_control(&strand, &pose, &mask, k).map_err(|e| e.to_string())?;
        let mut expect = Vec::with_capacity(dims.pixel_count() * 3);
        for y in 0..dims.height {
            for x in 0..dims.width {
                let src = if mask.at(x, y) { &strand } else { &pose };
                expect.extend_from_slice(&src.pixel(x, y));
            }
        }
        if got.image.pixels != expect || got.frame_index != k {
            mismatched += 1;
        }
    }
    let took = start.elapsed();
    check(
        mismatched == 0 && took < Duration::from_secs(10),
        format!("{mismatched}/100 triples differ from the per-pixel oracle, {:.2}s", secs(took)),
    )
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

// 7
fn pinhole_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 1000 {
        let target = [rng.random_range(-0.5..0.5), rng.random_range(1.0..2.0), rng.random_range(-0.5..0.5)];
        let (az, el, r): (f64, f64, f64) =
            (rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(-0.6..0.6), rng.random_range(1.0..3.0));
        let eye = [target[0] + r * el.cos() * az.sin(), target[1] + r * el.sin(), target[2] + r * el.cos() * az.cos()];
        let intr = CameraIntrinsics {
            fx: rng.random_range(300.0..900.0),
            fy: rng.random_range(300.0..900.0),
            cx: rng.random_range(300.0..530.0),
            cy: rng.random_range(150.0..330.0),
            width: 832,
            height: 480,
        };
        let p = [
            target[0] + rng.random_range(-0.4..0.4),
            target[1] + rng.random_range(-0.4..0.4),
            target[2] + rng.random_range(-0.4..0.4),
        ];

        // camera axes: x right, y down, z toward the target
        let fwd = unit([target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]]);
        let right = unit(cross(fwd, [0.0, 1.0, 0.0]));
        let down = cross(fwd, right);
        let rel = [p[0] - eye[0], p[1] - eye[1], p[2] - eye[2]];
        let (xc, yc, zc) = (dot(rel, right), dot(rel, down), dot(rel, fwd));
        if zc < 0.1 {
            continue;
        }
        let u = intr.fx * xc / zc + intr.cx;
        let v = intr.fy * yc / zc + intr.cy;
        if !(-400.0..1200.0).contains(&u) || !(-400.0..900.0).contains(&v) {
            continue;
        }

        let pose = CameraPose::look_at(Vec3::from(eye), Vec3::from(target), Vec3::new(0.0, 1.0, 0.0));
        let got = project_point(&pose, &intr, Vec3::from(p));
        if got.behind_camera {
            return Err(format!("point {p:?} reported behind the camera"));
        }
        worst = worst.max((got.pixel[0] as f64 - u).abs()).max((got.pixel[1] as f64 - v).abs());
        tested += 1;
    }
    check(worst < 1e-4, format!("max pixel error {worst:.3e} px over {tested} points"))
}

fn azimuth_of(pose: &CameraPose, target: [f64; 3]) -> f64 {
    let p = pose.position();
    // azimuth 0 sits on +z, positive azimuth toward -x
    (-(p.x - target[0])).atan2(p.z - target[2]).to_degrees()
}

// 8
fn bullet_time_sweep() -> Outcome {
    let mut cfg = with_strands(2000);
    let (freeze, keys) = default_sweep(cfg.frames);
    cfg.effect = Effect::BulletTime { freeze_frame: freeze, azimuth_keyframes: keys.clone() };
    let (geometry, control) = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    if geometry.len() != cfg.frames || control.len() != cfg.frames {
        return Err(format!("{} geometry frames, {} control frames", geometry.len(), control.len()));
    }
    let frozen = geometry.frames[freeze].geometry_hash();
    let held = geometry.frames[freeze..].iter().all(|f| f.geometry_hash() == frozen);
    let moving = geometry.frames[freeze - 1].geometry_hash() != frozen;

    let traj = camera_trajectory(&cfg, &keys, cfg.frames).map_err(|e| e.to_string())?;
    let (turn, last) = (keys[keys.len() - 2].0, keys[keys.len() - 1].0);
    let at_turn = azimuth_of(&traj.poses[turn], cfg.camera.target);
    let at_end = azimuth_of(&traj.poses[last], cfg.camera.target);
    let at_freeze = azimuth_of(&traj.poses[freeze], cfg.camera.target);
    let ok = held && moving && (at_turn - 20.0).abs() < 1e-6 && (at_end + 20.0).abs() < 1e-6 && at_freeze.abs() < 1e-6;
    check(
        ok,
        format!(
            "freeze at frame {freeze}: {} held frames share hash {frozen:016x} (dynamic before: {moving}); azimuth {at_freeze:.7}° -> {at_turn:.7}° (frame {turn}) -> {at_end:.7}° (frame {last})",
            cfg.frames - freeze
        ),
    )
}

// 9
fn cinemagraph_loop_and_static_pose() -> Outcome {
    let mut cfg = with_strands(2000);
    cfg.motion = HeadMotionScript::default();
    cfg.effect = Effect::Cinemagraph;
    let (geometry, control): (GeometrySequence, ControlSequence) = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let t = geometry.len();
    let n = control.len();
    if n != 2 * t - 2 {
        return Err(format!("{n} loop frames from {t} input frames"));
    }
    let palindrome = (0..n).all(|k| control.frames[k].image == control.frames[(n - k) % n].image);

    let dims = dims_of(&cfg);
    let frames = projected(&cfg, &geometry, &cfg.camera.azimuth_keyframes);
    let pose0 = rasterize_pose_map(&frames[0], dims);
    let masks: Vec<HairMask> = frames
        .iter()
        .map(|pf| {
            let (_, depth) = rasterize_strand_map(pf, dims);
            compute_hair_mask(&depth, pf, dims)
        })
        .collect();
    let poses_static = frames.iter().all(|pf| rasterize_pose_map(pf, dims) == pose0);
    let mut differing = 0usize;
    let mut checked = 0usize;
    for (k, frame) in control.frames.iter().enumerate() {
        let src = if k < t { k } else { n - k };
        for y in 0..dims.height {
            for x in 0..dims.width {
                if !masks[src].at(x, y) {
                    checked += 1;
                    if frame.image.pixel(x, y) != pose0.pixel(x, y) {
                        differing += 1;
                    }
                }
            }
        }
    }
    let ok = n == 160 && palindrome && poses_static && differing == 0;
    check(
        ok,
        format!(
            "{t} -> {n} frames, palindrome {palindrome}, static pose map {poses_static}, {differing}/{checked} non-hair pixels differ"
        ),
    )
}

fn bundle_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

// 10
fn thread_count_invariance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenario = dir.path().join("scenario.json");
    std::fs::write(&scenario, r#"{ "wig": { "strand_count": 2000 } }"#).map_err(|e| e.to_string())?;
    let mut bundles = Vec::new();
    for threads in [1, 8] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_strandctl"))
            .arg("--threads")
            .arg(threads.to_string())
            .arg("pipeline")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("--threads {threads} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        bundles.push(bundle_files(&out));
    }
    let same = bundles[0] == bundles[1];
    let bytes: usize = bundles[0].iter().map(|f| f.1.len()).sum();
    check(same, format!("{} files, {bytes} bytes, identical across 1 and 8 threads: {same}", bundles[0].len()))
}

fn psnr_oracle(a: &RasterImage, b: &RasterImage) -> f64 {
    let n = a.pixels.len() as f64;
    let mse: f64 = a.pixels.iter().zip(&b.pixels).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum::<f64>() / n;
    if mse == 0.0 {
        return 99.0;
    }
    (10.0 * (255.0 * 255.0 / mse).log10()).min(99.0)
}

/// Mean SSIM over every full 11×11 window, each window evaluated directly
/// with 2D Gaussian weights.
fn ssim_oracle(a: &RasterImage, b: &RasterImage) -> f64 {
    let (w, h) = (a.width as usize, a.height as usize);
    let y = |img: &RasterImage, i: usize| {
        let p = &img.pixels[i * 3..i * 3 + 3];
        0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
    };
    let mut g = [[0.0; 11]; 11];
    let mut total = 0.0;
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let (c1, c2) = ((0.01 * 255.0f64).powi(2), (0.03 * 255.0f64).powi(2));
    let mut sum = 0.0;
    let mut count = 0;
    for oy in 0..=h - 11 {
        for ox in 0..=w - 11 {
            let (mut mx, mut my, mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (i, row) in g.iter().enumerate() {
                for (j, gv) in row.iter().enumerate() {
                    let k = gv / total;
                    let idx = (oy + i) * w + ox + j;
                    let (p, q) = (y(a, idx), y(b, idx));
                    mx += k * p;
                    my += k * q;
                    xx += k * p * p;
                    yy += k * q * q;
                    xy += k * p * q;
                }
            }
            let (vx, vy, cov) = (xx - mx * mx, yy - my * my, xy - mx * my);
            sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    sum / count as f64
}

// 11
fn metrics_sanity() -> Outcome {
    let d = Dims::new(64, 48);
    let black = RasterImage::black(d);
    let white = RasterImage::from_pixels(64, 48, vec![255; d.pixel_count() * 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = random_image(&mut rng, d);
    let fixed = [
        (psnr(&noise, &noise).map_err(|e| e.to_string())?, 99.0, 0.0),
        (psnr(&black, &white).map_err(|e| e.to_string())?, 0.0, 0.0),
        (ssim(&noise, &noise).map_err(|e| e.to_string())?, 1.0, 1e-9),
    ];
    let fixed_ok = fixed.iter().all(|(got, want, tol)| (got - want).abs() <= *tol);

    let mut worst = 0.0f64;
    for k in 0..10 {
        let d = Dims::new(rng.random_range(11..80), rng.random_range(11..60));
        let a = random_image(&mut rng, d);
        let spread: i32 = [4, 32, 255][k % 3];
        let b_px =
            a.pixels.iter().map(|&v| (v as i32 + rng.random_range(-spread..=spread)).clamp(0, 255) as u8).collect();
        let b = RasterImage::from_pixels(d.width, d.height, b_px).unwrap();
        let dp = (psnr(&a, &b).map_err(|e| e.to_string())? - psnr_oracle(&a, &b)).abs();
        let ds = (ssim(&a, &b).map_err(|e| e.to_string())? - ssim_oracle(&a, &b)).abs();
        worst = worst.max(dp).max(ds);
    }
    check(
        fixed_ok && worst < 1e-6,
        format!(
            "psnr(same)={} psnr(black,white)={} ssim(same)={:.12}; max oracle deviation {worst:.3e} over 10 pairs",
            fixed[0].0, fixed[1].0, fixed[2].0
        ),
    )
}

// 12
fn default_runtime(took: Duration, control: &ControlSequence) -> Outcome {
    check(
        took < Duration::from_secs(120) && control.len() == 81,
        format!(
            "10,000 strands x 16 segments, {} frames at {}x{}: {:.1}s on {} thread(s)",
            control.len(),
            control.resolution.width,
            control.resolution.height,
            secs(took),
            rayon::current_num_threads()
        ),
    )
}

fn main() -> ExitCode {
    let default_cfg = ScenarioConfig::default();
    let start = Instant::now();
    let default_run = run_pipeline(&default_cfg);
    let default_took = start.elapsed();
    let default_run = default_run.map_err(|e| e.to_string());

    let criteria: Vec<Criterion> = vec![
        ("minimal scenario file yields the default parameters", Box::new(minimal_file_defaults)),
        ("rest wig without forces stays put", Box::new(equilibrium)),
        (
            "segments keep their rest length under default wind",
            Box::new(|| {
                let (seq, _) = default_run.as_ref().map_err(Clone::clone)?;
                inextensibility(&default_cfg, seq)
            }),
        ),
        ("hanging chain settles on the vertical below its root", Box::new(hanging_chain)),
        ("hair coverage drifts along the projected wind at 70°", Box::new(wind_direction_in_image)),
        ("compose matches the per-pixel oracle on 100 triples", Box::new(compose_matches_oracle)),
        ("projection matches the scalar pinhole oracle", Box::new(pinhole_oracle)),
        ("bullet time holds geometry and sweeps +20° then -40°", Box::new(bullet_time_sweep)),
        ("cinemagraph loop is palindromic with a static pose region", Box::new(cinemagraph_loop_and_static_pose)),
        ("CLI bundles are byte-identical across thread counts", Box::new(thread_count_invariance)),
        ("PSNR and SSIM match scalar oracles", Box::new(metrics_sanity)),
        (
            "default scenario simulates and renders within budget",
            Box::new(|| {
                let (_, control) = default_run.as_ref().map_err(Clone::clone)?;
                default_runtime(default_took, control)
            }),
        ),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
