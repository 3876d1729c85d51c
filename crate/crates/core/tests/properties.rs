#[path = "support/properties.rs"]
#[allow(dead_code)]
mod properties;

const CASES: u32 = 1000;

macro_rules! suite {
    ($name:ident) => {
        #[test]
        fn $name() {
            if let Err(e) = properties::$name(CASES) {
                panic!("{e}");
            }
        }
    };
}

suite!(rotation_four_quarter_turns);
suite!(mirror_involution);
suite!(translate_inverse);
suite!(gravity_fixpoint_and_columns);
suite!(expansion_monotone_and_blocked);
suite!(sort_preserves_multiset);
suite!(planning_trail_matches_bfs);
suite!(reflection_bounce_count);
suite!(components_partition);
