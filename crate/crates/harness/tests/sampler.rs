use memtrack_harness::sampler::{
    diverse_clip, vanilla_clip, ClipSampler, Role, SamplerConfig, SamplerMode, TrainingItem, CONSECUTIVE, SCATTERED,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn diverse_clips_span_the_whole_video() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut lo, mut hi) = (usize::MAX, 0);
    for _ in 0..10_000 {
        let clip = diverse_clip(1000, &mut rng).unwrap();
        assert_eq!(clip.frames.len(), SCATTERED + CONSECUTIVE);
        assert_eq!(clip.frames[0].1, Role::Conditional);
        let long: Vec<usize> = clip.frames.iter().filter(|f| f.1 == Role::LongTerm).map(|f| f.0).collect();
        assert_eq!(long.len(), SCATTERED - 1);
        assert!(long.windows(2).all(|w| w[0] < w[1]));
        let run: Vec<usize> = clip.frames.iter().filter(|f| f.1 == Role::Consecutive).map(|f| f.0).collect();
        assert!(run.windows(2).all(|w| w[1] == w[0] + 1));
        let mut all: Vec<usize> = clip.frames.iter().map(|f| f.0).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 8, "frames repeat: {:?}", clip.frames);
        assert!(all.iter().all(|&f| f < 1000));
        for &(f, role) in &clip.frames {
            if role != Role::Consecutive {
                lo = lo.min(f);
                hi = hi.max(f);
            }
        }
    }
    assert!(lo < 100 && hi > 900, "scattered frames span {lo}..{hi}");
}

#[test]
fn vanilla_clips_are_consecutive() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..1000 {
        let clip = vanilla_clip(50, &mut rng).unwrap();
        assert!(!clip.diverse);
        assert!(clip.frames.windows(2).all(|w| w[1].0 == w[0].0 + 1));
        assert!(clip.frames.last().unwrap().0 < 50);
    }
}

#[test]
fn mixed_mode_alternates_evenly() {
    let cfg = SamplerConfig { mode: SamplerMode::Mixed11, ..Default::default() };
    let mut s = ClipSampler::new(cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let diverse = (0..1000).filter(|_| s.next_clip(200, &mut rng).unwrap().diverse).count();
    assert_eq!(diverse, 500);
}

#[test]
fn pure_modes_and_image_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for (mode, want) in [(SamplerMode::Divemem, true), (SamplerMode::Vanilla, false)] {
        let mut s = ClipSampler::new(SamplerConfig { mode, ..Default::default() }).unwrap();
        assert!((0..50).all(|_| s.next_clip(30, &mut rng).unwrap().diverse == want));
    }
    let mut s = ClipSampler::new(SamplerConfig::default()).unwrap();
    let images = (0..1000)
        .filter(|_| matches!(s.next_item(30, &mut rng).unwrap(), TrainingItem::Image(_)))
        .count();
    assert_eq!(images, 200);
}

#[test]
fn short_videos_and_bad_settings_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    assert!(diverse_clip(7, &mut rng).is_err());
    assert!(ClipSampler::new(SamplerConfig { frames_per_clip: 6, ..Default::default() }).is_err());
    assert!(ClipSampler::new(SamplerConfig { image_video_ratio: (0, 0), ..Default::default() }).is_err());
}
