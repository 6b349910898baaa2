use std::collections::BTreeSet;

use floorloc::dataset::DetectionRecord;
use floorloc::pipeline::{parse_positions, run, Method, RunConfig, TrackMethod};
use floorloc::synthetic::{generate_corpus, Corpus, CorpusSpec, OcclusionPattern};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(n_cameras: usize, n_frames: usize, seed: u64) -> (Corpus, RunConfig) {
    let mut spec = CorpusSpec::s1(n_cameras, n_frames, seed);
    spec.proportions.ankle_ground_fraction = 0.0;
    let corpus = generate_corpus(&spec).unwrap();
    let mut cfg = RunConfig::new(corpus.cameras.iter().map(|c| c.scene.clone()).collect());
    cfg.skeleton.proportions = spec.proportions;
    (corpus, cfg)
}

fn pose(c: &Corpus) -> Vec<Vec<DetectionRecord>> {
    c.cameras.iter().map(|c| c.pose.clone()).collect()
}

#[test]
fn perfect_single_camera() {
    let (c, cfg) = corpus(1, 300, 11);
    let out = run(&pose(&c), &c.annotations, &cfg).unwrap();
    assert_eq!(out.report.missing_fraction, 0.0);
    assert!(out.report.errors.unwrap().mean < 1.0);
    assert!(out.fused.is_none());
}

#[test]
fn fused_track_round_trips_through_csv() {
    let (c, mut cfg) = corpus(2, 120, 3);
    cfg.fuse = true;
    let out = run(&pose(&c), &c.annotations, &cfg).unwrap();
    let csv = out.track().to_csv();
    let back = parse_positions(&csv).unwrap();
    assert_eq!(back.to_csv(), csv);
    assert_eq!(back.len(), 120);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fused_missing_is_frames_missing_everywhere(seed in any::<u64>(), mask in proptest::collection::vec(0u8..4, 60)) {
        let (c, mut cfg) = corpus(2, 60, seed);
        cfg.fuse = true;
        let mut dets = pose(&c);
        // bit 0 drops camera 1, bit 1 drops camera 2
        for (cam, bit) in [(0, 1u8), (1, 2u8)] {
            dets[cam].retain(|r| mask[r.frame_id as usize] & bit == 0);
        }
        let out = run(&dets, &c.annotations, &cfg).unwrap();
        let both = mask.iter().filter(|&&m| m == 3).count();
        let missing = |r: &floorloc::evaluation::EvalReport| r.n_frames - r.n_predicted;
        prop_assert_eq!(missing(&out.report), both);
        for r in &out.camera_reports {
            prop_assert!(missing(&out.report) <= missing(r));
        }
        let fused = out.fused.as_ref().unwrap();
        for row in fused.rows() {
            let m = mask[row.frame_id as usize];
            let expected = match m {
                0 => Some(TrackMethod::Fused),
                3 => None,
                _ => Some(TrackMethod::Feet(floorloc::feet::FeetMethod::Ankles)),
            };
            prop_assert_eq!(row.method, expected);
            prop_assert_eq!(row.cameras.len(), [2, 1, 1, 0][m as usize]);
        }
    }

    #[test]
    fn detection_order_and_workers_do_not_matter(seed in any::<u64>(), jobs in 1usize..6) {
        let (c, mut cfg) = corpus(2, 40, seed);
        cfg.fuse = true;
        let reference = run(&pose(&c), &c.annotations, &cfg).unwrap();
        let mut shuffled = pose(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for d in &mut shuffled {
            d.shuffle(&mut rng);
        }
        cfg.jobs = jobs;
        let other = run(&shuffled, &c.annotations, &cfg).unwrap();
        prop_assert_eq!(reference, other);
    }

    #[test]
    fn method_counts_cover_predictions(seed in any::<u64>(), method in prop_oneof![Just(Method::Pose), Just(Method::Bbox), Just(Method::BboxExtended)]) {
        let mut spec = CorpusSpec::s1(2, 50, seed);
        spec.occlusion = OcclusionPattern::Mixed;
        spec.dropout = vec![0.3, 0.3];
        let c = generate_corpus(&spec).unwrap();
        let mut cfg = RunConfig::new(c.cameras.iter().map(|c| c.scene.clone()).collect());
        cfg.method = method;
        cfg.fuse = true;
        let dets: Vec<_> = c
            .cameras
            .iter()
            .map(|c| if method == Method::Pose { c.pose.clone() } else { c.bbox.clone() })
            .collect();
        let out = run(&dets, &c.annotations, &cfg).unwrap();
        for track in out.camera_tracks.iter().chain(out.fused.iter()) {
            let counts = track.method_counts();
            let found = track.rows().iter().filter(|r| r.position.is_some()).count();
            prop_assert_eq!(counts.values().sum::<usize>(), found);
        }
        prop_assert_eq!(out.fused.unwrap().method_counts().values().sum::<usize>(), out.report.n_predicted);
        let frames: BTreeSet<u64> = out.camera_tracks[0].rows().iter().map(|r| r.frame_id).collect();
        prop_assert_eq!(frames.len(), 50);
    }
}
