//! A priori approximation factors over p for several N/s ratios.

use optdesign::bounds::{
    apportionment_factor, prior_factor_at_ratio, prior_factor_binary, sviridenko_factor,
};

fn main() {
    let ratios = [0.25, 0.5, 1.0, 2.0, 4.0];
    print!("{:>5}", "p");
    for x in ratios {
        print!("  N/s={x:<4}");
    }
    println!();
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        print!("{p:>5.1}");
        for x in ratios {
            let f = prior_factor_at_ratio(p, x);
            let mark = if f > sviridenko_factor() { '*' } else { ' ' };
            print!("  {f:.4}{mark}   ");
        }
        println!();
    }
    println!("* beats 1 - 1/e");
    println!(
        "top-N, N = 3, s = 12, p = 0.2: {:?}",
        prior_factor_binary(0.2, 3, 12)
    );
    println!(
        "apportionment, N = 20, s = 5, p = 0.5: {:?}",
        apportionment_factor(0.5, 20, 5)
    );
}
