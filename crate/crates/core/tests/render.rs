use strandctl::camera::{orbit_trajectory, project_frame};
use strandctl::physics::freeze_geometry;
use strandctl::raster::{
    compose_control, compute_hair_mask, extract_control_sequence, rasterize_pose_map, rasterize_strand_map, Dims,
};
use strandctl::scenario::{intrinsics, simulate_scenario, ScenarioConfig, WigSource};
use strandctl::{CameraTrajectory, GeometrySequence, HumanRig, Vec3};

fn small_scenario(frames: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig { frames, resolution: [416, 240], ..ScenarioConfig::default() };
    if let WigSource::Generate(spec) = &mut cfg.wig {
        spec.strand_count = 400;
    }
    cfg
}

fn rig(cfg: &ScenarioConfig) -> HumanRig {
    HumanRig::canonical(cfg.rig.head_radius, cfg.rig.origin)
}

fn orbit(cfg: &ScenarioConfig, keys: &[(usize, f64)], frames: usize) -> CameraTrajectory {
    let c = &cfg.camera;
    orbit_trajectory(Vec3::from(c.target), c.radius, c.elevation, keys, frames, intrinsics(cfg)).unwrap()
}

fn simulated(cfg: &ScenarioConfig) -> GeometrySequence {
    simulate_scenario(cfg).unwrap()
}

#[test]
fn frozen_geometry_under_orbit_never_loses_the_hair() {
    let cfg = small_scenario(6);
    let frozen = freeze_geometry(&simulated(&cfg), 5, 25).unwrap();
    let traj = orbit(&cfg, &[(0, -60.0), (24, 60.0)], 25);
    let dims = Dims::new(416, 240);
    let counts: Vec<usize> = frozen
        .frames
        .iter()
        .zip(&traj.poses)
        .map(|(f, pose)| {
            let pf = project_frame(&frozen.offsets, f, &rig(&cfg), pose, &traj.intrinsics);
            let (_, depth) = rasterize_strand_map(&pf, dims);
            depth.depth.iter().filter(|z| z.is_finite()).count()
        })
        .collect();
    assert!(counts.iter().all(|&n| n > 0), "{counts:?}");
    for w in counts.windows(2) {
        let change = (w[1] as f64 - w[0] as f64).abs() / w[0] as f64;
        assert!(change < 0.2, "coverage jumps {} -> {}", w[0], w[1]);
    }
}

#[test]
fn frozen_geometry_with_fixed_camera_repeats_frames() {
    let cfg = small_scenario(3);
    let frozen = freeze_geometry(&simulated(&cfg), 2, 4).unwrap();
    let traj = orbit(&cfg, &[(0, 15.0)], 4);
    let seq = extract_control_sequence(&frozen, &rig(&cfg), &traj, 16.0).unwrap();
    assert!(seq.frames.iter().all(|f| f.image == seq.frames[0].image));
    assert_eq!(seq.frames.iter().map(|f| f.frame_index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn single_frame_equals_manual_passes() {
    let mut cfg = small_scenario(1);
    cfg.wind.strength = 0.0;
    let geom = simulated(&cfg);
    let traj = orbit(&cfg, &cfg.camera.azimuth_keyframes, 1);
    let seq = extract_control_sequence(&geom, &rig(&cfg), &traj, 16.0).unwrap();
    assert_eq!(seq.len(), 1);

    let dims = Dims::new(416, 240);
    let pf = project_frame(&geom.offsets, &geom.frames[0], &rig(&cfg), &traj.poses[0], &traj.intrinsics);
    let (strand, depth) = rasterize_strand_map(&pf, dims);
    let pose = rasterize_pose_map(&pf, dims);
    let mask = compute_hair_mask(&depth, &pf, dims);
    let manual = compose_control(&strand, &pose, &mask, 0).unwrap();
    assert_eq!(seq.frames[0], manual);
}

#[test]
fn mask_lies_inside_strand_coverage_and_colors_are_unit() {
    let cfg = small_scenario(8);
    let geom = simulated(&cfg);
    let traj = orbit(&cfg, &[(0, 0.0), (7, 35.0)], 8);
    let dims = Dims::new(416, 240);
    for (f, pose) in geom.frames.iter().zip(&traj.poses) {
        let pf = project_frame(&geom.offsets, f, &rig(&cfg), pose, &traj.intrinsics);
        let (strand, depth) = rasterize_strand_map(&pf, dims);
        let mask = compute_hair_mask(&depth, &pf, dims);
        assert!(mask.count() > 0);
        for (hair, px) in mask.bits.iter().zip(strand.pixels_rgb()) {
            if *hair {
                assert_ne!(px, [0, 0, 0]);
            }
            if px != [0, 0, 0] {
                assert_eq!(px[0], 255);
                let dx = px[1] as f64 / 255.0 * 2.0 - 1.0;
                let dy = px[2] as f64 / 255.0 * 2.0 - 1.0;
                assert!((dx.hypot(dy) - 1.0).abs() < 2.0 / 255.0, "{px:?}");
            }
        }
    }
}

#[test]
fn rendering_ignores_pool_size() {
    let cfg = small_scenario(4);
    let geom = simulated(&cfg);
    let traj = orbit(&cfg, &[(0, 0.0), (3, 30.0)], 4);
    let render = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| extract_control_sequence(&geom, &rig(&cfg), &traj, 16.0).unwrap())
    };
    assert_eq!(render(1), render(3));
}
