use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stx_vote::vote::VoteState;
use stx_vote::{make_packet, verify_packet, BitVector, PacketId};

/// Bitwise majority written without vote counters: 1 iff strictly more ones
/// than zeros in the column.
fn majority(receptions: &[BitVector]) -> BitVector {
    let len = receptions[0].len();
    BitVector::from_bools((0..len).map(|i| {
        let ones = receptions.iter().filter(|r| r.get(i) == 1).count();
        2 * ones > receptions.len()
    }))
}

fn fold(receptions: &[BitVector]) -> VoteState {
    let mut state = VoteState::new(PacketId(1), receptions[0].len()).unwrap();
    for r in receptions {
        state.accumulate(r).unwrap();
    }
    state
}

fn multiset() -> impl Strategy<Value = Vec<BitVector>> {
    (24usize..=256, 1usize..=9).prop_flat_map(|(len, n)| {
        prop::collection::vec(
            prop::collection::vec(any::<bool>(), len).prop_map(BitVector::from_bools),
            n,
        )
    })
}

fn random_packet(rng: &mut ChaCha8Rng, max_bytes: usize) -> BitVector {
    let mut body = vec![0u8; rng.random_range(1..=max_bytes)];
    rng.fill(&mut body[..]);
    make_packet(PacketId(0), BitVector::from_bytes(&body))
        .unwrap()
        .on_air()
}

proptest! {
    #[test]
    fn reconstruct_is_bitwise_majority(rs in multiset()) {
        prop_assert_eq!(fold(&rs).reconstruct(), majority(&rs));
    }

    #[test]
    fn accumulation_order_does_not_matter(rs in multiset(), seed in any::<u64>()) {
        let mut shuffled = rs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (fold(&rs), fold(&shuffled));
        prop_assert_eq!(a.votes(), b.votes());
        prop_assert_eq!(a.num_accumulated(), b.num_accumulated());
    }

    #[test]
    fn vote_parity_and_magnitude(rs in multiset()) {
        let s = fold(&rs);
        let n = s.num_accumulated() as i32;
        for &v in s.votes() {
            prop_assert!(i32::from(v).abs() <= n);
            prop_assert_eq!((i32::from(v) + n).rem_euclid(2), 0);
        }
    }

    #[test]
    fn accepted_reconstructions_pass_the_crc(seed in any::<u64>(), n in 2usize..=9, rate in 0.0f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = random_packet(&mut rng, 32);
        let receptions: Vec<BitVector> = (0..n)
            .map(|_| {
                let mut r = sent.clone();
                for i in 0..r.len() {
                    if rng.random_bool(rate) {
                        r.flip(i);
                    }
                }
                r
            })
            .collect();
        if let Ok(packet) = fold(&receptions).try_correct() {
            prop_assert!(verify_packet(&packet.on_air()).unwrap());
        }
    }

    #[test]
    fn minority_errors_are_always_corrected(seed in any::<u64>(), half in 1usize..=4) {
        let n = 2 * half + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = random_packet(&mut rng, 48);
        let mut receptions = vec![sent.clone(); n];
        for i in 0..sent.len() {
            // Corrupt bit i in at most `half` of the copies.
            let k = rng.random_range(0..=half);
            for r in rand::seq::index::sample(&mut rng, n, k) {
                receptions[r].flip(i);
            }
        }
        let recovered = fold(&receptions).try_correct().unwrap();
        prop_assert_eq!(recovered.on_air(), sent);
    }
}

#[test]
fn false_accepts_stay_near_the_crc_floor() {
    const TRIALS: usize = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut accepted = 0usize;
    for _ in 0..TRIALS {
        let sent = random_packet(&mut rng, 32);
        // Two receptions sharing an error pattern: the majority keeps it, so
        // the state can never yield the transmitted packet.
        let mut wrong = sent.clone();
        let weight = rng.random_range(1..=64.min(sent.len()));
        for i in rand::seq::index::sample(&mut rng, sent.len(), weight) {
            wrong.flip(i);
        }
        let state = fold(&[wrong.clone(), wrong]);
        if let Ok(p) = state.try_correct() {
            assert_ne!(p.on_air(), sent);
            accepted += 1;
        }
    }
    let rate = accepted as f64 / TRIALS as f64;
    assert!(
        rate <= 3.0 / 65536.0,
        "{accepted} false accepts in {TRIALS}"
    );
}
