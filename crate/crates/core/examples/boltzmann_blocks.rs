//! Boltzmann blocks of U and their agreement with the printed ones.
use cellforge::arith::int;
use cellforge::cells::{block, build_u, compare_block, load_w, printed_blocks};

fn main() {
    let c = load_w().unwrap();
    let u = build_u(&c);
    let b = block(&c.graph, &u, int(0), 1, 9).unwrap().eval(256).unwrap();
    print!("{b}");
    println!("trace {:.12}", b.trace().to_c64().0);
    for pb in printed_blocks() {
        print!("{}", block(&c.graph, &u, int(0), pb.v1, pb.v2).unwrap().eval(256).unwrap());
        let cmp = compare_block(&c.graph, &u, &pb, 256).unwrap();
        println!("  {} verbatim, {:?} via alternative reading, {} mismatched", cmp.verbatim, cmp.via_fix, cmp.mismatched.len());
    }
}
