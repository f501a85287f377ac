use bootleg::midi::{cluster_onsets, midi_events, parse_midi, parse_midi_file};
use bootleg::score::{deserialize, midi_bootleg, pitch_to_rows, serialize};
use bootleg::synth::{Piece, PieceParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn written_pieces_parse_back_to_their_events(seed in any::<u64>(), measures in 1usize..12) {
        let piece = Piece::random(&PieceParams { measures, ..PieceParams::default() }, seed);
        let bytes = piece.to_smf();
        let file = parse_midi_file(&bytes).unwrap();
        prop_assert_eq!(file.format, 0);
        let events = midi_events(&bytes, 0.05).unwrap();
        let drawn: Vec<_> = piece.events().collect();
        prop_assert_eq!(events.len(), drawn.len());
        for (e, d) in events.iter().zip(&drawn) {
            prop_assert!((e.time - piece.seconds(d.tick)).abs() < 1e-9);
            for n in &d.notes {
                prop_assert!(e.pitches.contains(&n.pitch));
                prop_assert!(pitch_to_rows(n.pitch).contains(&n.row));
            }
        }
        let score = midi_bootleg(&events).unwrap();
        prop_assert_eq!(score.len(), 3 * events.len());
        prop_assert_eq!(deserialize(&serialize(&score)).unwrap(), score);
    }

    #[test]
    fn tiny_tolerance_groups_only_simultaneous_onsets(seed in any::<u64>()) {
        let piece = Piece::random(&PieceParams { measures: 4, ..PieceParams::default() }, seed);
        let onsets = parse_midi(&piece.to_smf()).unwrap();
        let events = cluster_onsets(&onsets, 1e-6);
        prop_assert_eq!(events.len(), piece.events().count());
    }
}

#[test]
fn measure_map_matches_tempo() {
    let piece = Piece::random(&PieceParams::default(), 42);
    let map = piece.measure_map();
    let bar = 4.0 * piece.us_per_quarter as f64 / 1e6;
    for (i, m) in map.measures.iter().enumerate() {
        assert!((m.downbeat - i as f64 * bar).abs() < 1e-9);
    }
    assert!((map.end_time - map.len() as f64 * bar).abs() < 1e-9);
}
