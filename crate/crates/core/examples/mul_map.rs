//! Steady-state power of `mul` for every operand pair.

use wcec_lab::isa_sim::{hamming_weight, mul_map_range_ratio, mul_power_map, PowerModelParams};

fn main() {
    let params = PowerModelParams::default();
    let map = mul_power_map(&params);
    println!("range: {:.2}% of {} mW", 100.0 * mul_map_range_ratio(&map, &params), params.soc_power);

    // Mean power by operand Hamming weight.
    let mut sum = [[0.0f64; 9]; 9];
    let mut count = [[0u32; 9]; 9];
    for (a, row) in map.iter().enumerate() {
        for (b, e) in row.iter().enumerate() {
            let (i, j) = (hamming_weight(a as u16) as usize, hamming_weight(b as u16) as usize);
            sum[i][j] += params.cycle_power(*e);
            count[i][j] += 1;
        }
    }
    println!("HW(a)\\HW(b) {}", (0..9).map(|j| format!("{j:>6}")).collect::<String>());
    for i in 0..9 {
        let row: String = (0..9).map(|j| format!("{:6.2}", sum[i][j] / f64::from(count[i][j]))).collect();
        println!("{i:>11} {row}");
    }
}
