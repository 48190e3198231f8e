// Expand the transition system of `G (a U b)` and print it as DOT, with
// accepting states double-circled.
//
//     cargo run --example transition_system_dot | dot -Tsvg > ts.svg

use ltlf_check::checker::is_accepting;
use ltlf_check::transition_system::TransitionSystem;
use ltlf_check::{parse, Formula};

pub fn run_example() -> String {
    let f = parse("G (a U b)").unwrap();
    let mut ts = TransitionSystem::new(f);
    ts.expand_all(1000);
    ts.export_dot(&|s: &Formula| is_accepting(s).is_some())
}

fn main() {
    print!("{}", run_example());
}
