//! Complete U from the entries whose magnitudes have closed forms.
use std::collections::BTreeMap;

use cellforge::cells::{build_u, load_w};
use cellforge::relations::RelationSet;
use cellforge::solver::{assemble_system, complete_linear, RecognitionDictionary};

fn main() {
    let c = load_w().unwrap();
    let u = build_u(&c);
    let dict = RecognitionDictionary::default();
    let floats = u.to_c64().unwrap();
    let partial: BTreeMap<_, _> = u
        .entries
        .iter()
        .filter(|(k, _)| dict.lookup(floats.entries[*k].norm(), 5e-6).is_some())
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    println!("{} of {} entries recognized", partial.len(), u.entries.len());
    let sys = assemble_system(&c.graph, &RelationSet::bundled()).unwrap();
    let done = complete_linear(&partial, &sys).unwrap();
    println!("{} solved linearly in {} rounds, {} phases pinned", done.solved.len(), done.rounds, done.pinned_phases.len());
    for k in &done.solved {
        let e = &done.u.entries[k];
        let (re, im) = e.to_c64().unwrap();
        let m = re.hypot(im);
        let guess = dict.lookup(m, 5e-6).map_or_else(|| "no closed form".to_string(), |g| g.text);
        println!("  U({}, {}) ~ {re:+.6}{im:+.6}i  |.| = {guess}  ({} chars exact)", c.graph.show_path(&k.0), c.graph.show_path(&k.1), e.to_string().len());
    }
}
