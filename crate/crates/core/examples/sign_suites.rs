use hrrl::signs::{run_all, SignHooks};

fn main() {
    for hooks in [SignHooks::default(), SignHooks::tampered()] {
        for r in run_all(0, &hooks) {
            println!(
                "{:<26} checked {:?}, violations {}  {}",
                r.case.name(),
                r.checked,
                r.violations,
                if r.passed() { "ok" } else { "FAILED" }
            );
        }
        println!();
    }
}
