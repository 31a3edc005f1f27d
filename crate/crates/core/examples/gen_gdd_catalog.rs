//! Regenerates the bundled 4-GDD files under `data/gdd/`.
//!
//! Usage: `cargo run -p l1cwc --example gen_gdd_catalog [out_dir]`

use std::path::PathBuf;

use l1cwc::designs::{check_gdd, write_design, Design, Gdd};

/// Galois field GF(p^k) with elements as base-p digit vectors packed into u32.
#[derive(Clone)]
struct Field {
    p: u32,
    k: u32,
    /// Low coefficients of the monic modulus `x^k + ...`.
    modulus: Vec<u32>,
}

impl Field {
    fn size(&self) -> u32 {
        self.p.pow(self.k)
    }

    fn digits(&self, a: u32) -> Vec<u32> {
        (0..self.k).map(|i| a / self.p.pow(i) % self.p).collect()
    }

    fn pack(&self, d: &[u32]) -> u32 {
        d.iter().enumerate().map(|(i, &x)| x * self.p.pow(i as u32)).sum()
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        self.pack(&x.iter().zip(&y).map(|(s, t)| (s + t) % self.p).collect::<Vec<_>>())
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let k = self.k as usize;
        let mut prod = vec![0u32; 2 * k];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        for deg in (k..2 * k).rev() {
            let c = prod[deg];
            if c != 0 {
                prod[deg] = 0;
                for (i, &m) in self.modulus.iter().enumerate() {
                    let sub = c * m % self.p;
                    let idx = deg - k + i;
                    prod[idx] = (prod[idx] + self.p - sub) % self.p;
                }
            }
        }
        self.pack(&prod[..k])
    }
}

fn prime(p: u32) -> Field {
    Field { p, k: 1, modulus: vec![0] }
}

/// Transversal design TD(4, g) over a product of fields, as a 4-GDD of type g^4.
/// Blocks `{(0,i), (1,j), (2,i+j), (3,a*i+j)}` with `a` and `a-1` units.
fn td4(fields: &[(Field, u32)]) -> Gdd {
    let g: u32 = fields.iter().map(|(f, _)| f.size()).product();
    let split = |mut e: u32| -> Vec<u32> {
        fields
            .iter()
            .map(|(f, _)| {
                let d = e % f.size();
                e /= f.size();
                d
            })
            .collect()
    };
    let join = |parts: &[u32]| -> u32 {
        let mut e = 0;
        for (i, (f, _)) in fields.iter().enumerate().rev() {
            e = e * f.size() + parts[i];
        }
        e
    };
    let add = |a: u32, b: u32| {
        let (x, y) = (split(a), split(b));
        join(&fields.iter().enumerate().map(|(c, (f, _))| f.add(x[c], y[c])).collect::<Vec<_>>())
    };
    let alpha = |a: u32| {
        let x = split(a);
        join(&fields.iter().enumerate().map(|(c, (f, al))| f.mul(*al, x[c])).collect::<Vec<_>>())
    };
    let groups = (0..4).map(|r| (0..g).map(|e| r * g + e).collect()).collect();
    let mut blocks = Vec::new();
    for i in 0..g {
        for j in 0..g {
            blocks.push(vec![i, g + j, 2 * g + add(i, j), 3 * g + add(alpha(i), j)]);
        }
    }
    Gdd::new(4 * g, groups, blocks)
}

fn gdd_6_7() -> Gdd {
    let bases = [[0u32, 1, 3, 19], [0, 4, 10, 15], [0, 8, 17, 30]];
    let groups = (0..7).map(|r| (0..6).map(|k| r + 7 * k).collect()).collect();
    let mut blocks = Vec::new();
    for b in bases {
        for s in 0..42 {
            blocks.push(b.iter().map(|x| (x + s) % 42).collect());
        }
    }
    Gdd::new(42, groups, blocks)
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/gdd"));
    std::fs::create_dir_all(&out).unwrap();

    let f4 = Field { p: 2, k: 2, modulus: vec![1, 1] };
    let f8 = Field { p: 2, k: 3, modulus: vec![1, 1, 0] };
    let f9 = Field { p: 3, k: 2, modulus: vec![1, 0] };
    let f27 = Field { p: 3, k: 3, modulus: vec![1, 2, 0] };
    // In packed form x is 2 (p=2) or 3 (p=3).
    let td = |name: &str, fields: Vec<(Field, u32)>, how: &str| (name.to_string(), td4(&fields), how.to_string());

    let entries = vec![
        (
            "6-7".to_string(),
            gdd_6_7(),
            "development of base blocks {0,1,3,19} {0,4,10,15} {0,8,17,30} mod 42; groups are the residue classes mod 7"
                .to_string(),
        ),
        td("7-4", vec![(prime(7), 3)], "GF(7), multiplier 3"),
        td("9-4", vec![(f9.clone(), 3)], "GF(9) = GF(3)[x]/(x^2+1), multiplier x"),
        td("12-4", vec![(f4.clone(), 2), (prime(3), 2)], "GF(4) x GF(3), GF(4) = GF(2)[x]/(x^2+x+1), multiplier (x, 2)"),
        td("15-4", vec![(prime(3), 2), (prime(5), 2)], "GF(3) x GF(5), multiplier (2, 2)"),
        td("24-4", vec![(f8, 2), (prime(3), 2)], "GF(8) x GF(3), GF(8) = GF(2)[x]/(x^3+x+1), multiplier (x, 2)"),
        td("27-4", vec![(f27, 3)], "GF(27) = GF(3)[x]/(x^3+2x+1), multiplier x"),
        td("36-4", vec![(f4, 2), (f9, 3)], "GF(4) x GF(9), multiplier (x, x)"),
    ];
    for (file, g, how) in entries {
        check_gdd(&g, &[4]).unwrap_or_else(|e| panic!("{file}: {e}"));
        let mut text = format!("# 4-GDD of type {}\n", g.type_string());
        if file == "6-7" {
            text.push_str(&format!("# {how}\n"));
        } else {
            text.push_str("# transversal design: blocks {(0,i), (1,j), (2,i+j), (3,a*i+j)}, point (r,e) = r*g + e\n");
            text.push_str(&format!("# ring {how}\n"));
        }
        text.push_str(&write_design(&Design::Gdd(g)));
        std::fs::write(out.join(format!("{file}.txt")), text).unwrap();
        println!("wrote {file}.txt");
    }
}
