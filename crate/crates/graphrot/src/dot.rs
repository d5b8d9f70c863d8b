//! DOT rendering of labeled balls in the universal cover.
//!
//! The cover of a labeled graph is a tree whose vertices are deck-labeled
//! copies `γṼ` of the base vertices.  The ball of radius `r` around the
//! trivially labeled basepoint consists of every lifted vertex whose label
//! word has reduced length at most `r` — equivalently, everything reachable
//! by crossing at most `r` non-tree edge lifts, tree lifts being free.  The
//! rendered digraph contains one node per lifted vertex in the ball and one
//! arrow per lifted edge with both endpoints inside; since the cover is a
//! tree and the ball is connected, the arrow count is always one less than
//! the node count.

use std::collections::BTreeSet;

use crate::graph::{CoherentLabeling, EdgeId};
use crate::word::Word;

/// All reduced label words of length at most `radius`, breadth first.
fn ball_words(l: &CoherentLabeling, radius: u64) -> BTreeSet<Word> {
    let mut words = BTreeSet::from([Word::identity()]);
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for gen in l.generators() {
                let step = Word::generator(gen.id);
                for ext in [w.concat_reduce(&step), w.concat_reduce(&step.invert())] {
                    // Only genuine extensions: a cancellation would revisit
                    // a shorter word already in the ball.
                    if ext.len() > w.len() && words.insert(ext.clone()) {
                        next.push(ext);
                    }
                }
            }
        }
        frontier = next;
    }
    words
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the radius-`r` ball of the cover around the trivially labeled
/// root as a deterministic DOT digraph.  Node names are label word plus
/// vertex name, the identity label omitted; arrows follow edge direction
/// and are labeled with the base edge name.
pub fn cover_ball_dot(l: &CoherentLabeling, radius: u64) -> String {
    let g = l.graph();
    let words = ball_words(l, radius);
    let mut lines = Vec::new();
    lines.push("digraph cover_ball {".to_string());
    lines.push("  node [shape=ellipse];".to_string());
    for word in &words {
        for v in g.vertex_ids() {
            let name = if word.is_identity() {
                g.vertex_name(v).to_string()
            } else {
                format!("{word}{}", g.vertex_name(v))
            };
            lines.push(format!("  {};", quote(&name)));
        }
    }
    // Lifted edges γẼ run γṼ₁ → γθ(E)Ṽ₂; keep those with both ends inside.
    let mut arrows: BTreeSet<(Word, EdgeId)> = BTreeSet::new();
    for word in &words {
        for e in g.edge_ids() {
            let far = word.concat_reduce(&l.theta_word(e));
            if words.contains(&far) {
                arrows.insert((word.clone(), e));
            }
        }
    }
    for (word, e) in &arrows {
        let edge = g.edge(*e);
        let far = word.concat_reduce(&l.theta_word(*e));
        let tail = if word.is_identity() {
            g.vertex_name(edge.initial).to_string()
        } else {
            format!("{word}{}", g.vertex_name(edge.initial))
        };
        let head = if far.is_identity() {
            g.vertex_name(edge.terminal).to_string()
        } else {
            format!("{far}{}", g.vertex_name(edge.terminal))
        };
        lines.push(format!(
            "  {} -> {} [label={}];",
            quote(&tail),
            quote(&head),
            quote(&edge.name)
        ));
    }
    lines.push("}".to_string());
    lines.join("\n") + "\n"
}
