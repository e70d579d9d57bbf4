use stx_vote::sim::{run_experiment, run_rounds, RoundConfig};
use stx_vote::sweep::{preset, PRESET_NAMES};

/// A reduced grid from every preset: first and last offset, `packets` rounds.
fn configs(packets: usize) -> Vec<(String, RoundConfig, u64)> {
    let mut out = Vec::new();
    for name in PRESET_NAMES {
        let mut spec = preset(name).unwrap();
        spec.num_packets = packets;
        let n = spec.cfo_values_hz.len();
        spec.cfo_values_hz = vec![spec.cfo_values_hz[0], spec.cfo_values_hz[n - 1]];
        for cell in spec.cells() {
            let cfg = spec.round_config(&cell).unwrap();
            let label = format!(
                "{name} {} {} Hz voting={}",
                cell.phy, cell.cfo_hz, cell.voting
            );
            out.push((label, cfg, cell.seed));
        }
    }
    out
}

#[test]
fn voting_only_adds_deliveries() {
    for (label, cfg, seed) in configs(25) {
        if !cfg.voting_enabled {
            continue;
        }
        let on = run_rounds(&cfg, 25, seed).unwrap();
        let off = run_rounds(
            &RoundConfig {
                voting_enabled: false,
                ..cfg
            },
            25,
            seed,
        )
        .unwrap();
        for (a, b) in on.iter().zip(&off) {
            assert!(
                a.delivered || !b.delivered,
                "{label}: packet {}",
                a.packet_id
            );
            // Same channel draws up to the first correct slot.
            assert_eq!(a.per_slot_status, b.per_slot_status, "{label}");
        }
    }
}

#[test]
fn every_outcome_is_consistent() {
    for (label, cfg, seed) in configs(10) {
        for o in run_rounds(&cfg, 10, seed).unwrap() {
            assert_eq!(
                o.delivered,
                o.delivered_on_air() || o.recovered_by_voting,
                "{label}"
            );
            assert!(o.per_slot_status.len() <= cfg.slots_per_round);
            assert!(!(o.recovered_by_voting && o.delivered_on_air()));
            if !cfg.voting_enabled {
                assert_eq!(o.receptions_voted, 0);
            }
        }
    }
}

/// Without voting, extra slots only add reception chances, so each packet
/// delivered with `k` slots is delivered with `k + 1`.
#[test]
fn more_slots_never_lose_a_packet_without_voting() {
    for (label, cfg, seed) in configs(20) {
        if cfg.voting_enabled {
            continue;
        }
        let mut previous: Option<Vec<bool>> = None;
        for slots in 1..=8 {
            let cfg = RoundConfig {
                slots_per_round: slots,
                ..cfg.clone()
            };
            let now: Vec<bool> = run_rounds(&cfg, 20, seed)
                .unwrap()
                .iter()
                .map(|o| o.delivered)
                .collect();
            if let Some(prev) = &previous {
                for (i, (p, n)) in prev.iter().zip(&now).enumerate() {
                    assert!(*n || !*p, "{label}: packet {i} lost going to {slots} slots");
                }
            }
            previous = Some(now);
        }
    }
}

/// Correction only runs at round end and split votes go to 0, so a fourth
/// reception can tie bits that three receptions had right. PDR with voting
/// on is therefore not monotone in the slot count.
#[test]
fn even_slot_counts_can_lower_pdr_with_voting() {
    let mut spec = preset("sim-wide-strong").unwrap();
    spec.phys = vec![stx_vote::phy::PhyKind::Ble1M];
    spec.cfo_values_hz = vec![500.0];
    let cell = spec.cells().into_iter().find(|c| c.voting).unwrap();
    let cfg = spec.round_config(&cell).unwrap();
    let pdr = |slots| {
        run_experiment(
            &RoundConfig {
                slots_per_round: slots,
                ..cfg.clone()
            },
            100,
            cell.seed,
        )
        .unwrap()
        .pdr
    };
    let (three, four) = (pdr(3), pdr(4));
    assert!(four < three, "{four} vs {three}");
    // Voting still never does worse than no voting at the same slot count.
    let off = run_experiment(
        &RoundConfig {
            slots_per_round: 4,
            voting_enabled: false,
            ..cfg.clone()
        },
        100,
        cell.seed,
    )
    .unwrap();
    assert!(four >= off.pdr);
}

#[test]
fn weak_beating_leaves_coded_phys_alone() {
    for name in ["sim-wide-weak", "sim-narrow-weak"] {
        let mut spec = preset(name).unwrap();
        spec.phys.retain(|p| p.is_coded());
        spec.num_packets = 50;
        for cell in spec.cells().iter().filter(|c| c.voting) {
            let cfg = spec.round_config(cell).unwrap();
            let on = run_experiment(&cfg, 50, cell.seed).unwrap();
            let off = run_experiment(
                &RoundConfig {
                    voting_enabled: false,
                    ..cfg
                },
                50,
                cell.seed,
            )
            .unwrap();
            assert!(
                on.per - off.per <= 0.02,
                "{name} {} {} Hz",
                cell.phy,
                cell.cfo_hz
            );
        }
    }
}
