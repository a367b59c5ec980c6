use dimerlg::dimer::torus4;
use dimerlg::disks::PolygonCensus;
use dimerlg::mirror::Mirror;
use std::collections::BTreeMap;

fn main() {
    let m = Mirror::new(torus4().unwrap()).unwrap();
    let cap = 4;
    let census = PolygonCensus::enumerate(&m, cap).unwrap();
    // group by (class, cyclic word)
    let mut groups: BTreeMap<(String, Vec<String>), Vec<String>> = BTreeMap::new();
    for p in &census.polygons {
        let e = p.e_sequence();
        let names: Vec<String> = e.iter().map(|&a| m.base.arcs[a as usize].name.clone()).collect();
        // canonical rotation of the cyclic word
        let canon = (0..names.len())
            .map(|k| {
                let mut r = names.clone();
                r.rotate_left(k);
                r
            })
            .min()
            .unwrap();
        let punc = if p.punc.degree() == 0 { "1".into() } else { p.punc.display(&m.quiver.vars)[1..].to_string() };
        let segs: Vec<String> = p.segment_lengths.iter().map(|x| x.to_string()).collect();
        groups.entry((p.class.short().to_string(), canon)).or_default().push(format!(
            "punc {} segs ({}) sign {}",
            punc,
            segs.join(","),
            if p.sign_odd() { "-" } else { "+" }
        ));
    }
    for ((class, word), mut items) in groups {
        items.sort();
        // count marked rotations per (punc(segs)) signature
        println!("{} [{}]:", class, word.join(" "));
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for i in items {
            *counts.entry(i).or_default() += 1;
        }
        for (sig, n) in counts {
            println!("   {n} x {sig}");
        }
    }
    println!("total {}", census.polygons.len());
}
