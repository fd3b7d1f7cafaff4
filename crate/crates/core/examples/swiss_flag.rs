use pvspace::statespace::analyze;
use pvspace::syntax::swiss_flag;
fn main() {
    let a = analyze(&swiss_flag(), None).unwrap();
    println!("positions {}", a.graph.vertex_count());
    println!("invalid {}", a.graph.invalid_positions().count());
    println!("forbidden {}", a.forbidden.len());
    for i in &a.forbidden {
        println!("  {i}");
    }
    println!("fundamental {}", a.fundamental.len());
    for i in &a.fundamental {
        println!("  {i}");
    }
    for d in &a.deadlocks {
        println!("deadlock {d}");
    }
}
