//! Reads a machine in MAF form, builds elements from its states, and
//! writes canonical machines back out.

use agr::groups::GroupPresentation;
use agr::mealy::{MealyMachine, Word};
use agr::order_bounded;

const LAMPLIGHTER: &str = "\
mealy p=2 states=3
# lamplighter machine plus the identity
x | 2:x 1:y
y | 1:x 2:y
e | 1:e 2:e
";

fn main() {
    let m = MealyMachine::parse_maf(LAMPLIGHTER).unwrap();
    print!("parsed:\n{}", m.to_maf());
    let group = GroupPresentation::from_machine("example", m);
    let scope = group.scope();
    println!("order of x: {}", order_bounded(scope.get("x").unwrap(), 10_000));
    let g = scope.eval("x*y^-1").unwrap();
    println!("x*y^-1 has {} states, order {}", g.size(), order_bounded(&g, 10_000));
    let w: Word = "1121".parse().unwrap();
    println!("{w} -> {}", g.act(&w).unwrap());
    print!("canonical machine of x*y^-1:\n{}", g.to_maf());
    let back = MealyMachine::parse_maf(&g.to_maf()).unwrap();
    println!("round trip equal: {}", back == *g.machine());
}
