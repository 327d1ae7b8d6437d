use liftcheck::suite::{run, Filter, Tier};

fn main() {
    let deep = std::env::args().any(|a| a == "--deep");
    let report = run(if deep { Tier::Deep } else { Tier::Default }, &Filter::all()).expect("suite runs");
    for item in &report.items {
        println!("{:32} {:?} {:>9.0} ms", item.id, item.verdict, item.timing_ms.unwrap_or(0.0));
    }
    println!("{}", report.verdict);
}
