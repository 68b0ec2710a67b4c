//! Rebuild a tree from its Full-C labels, then show what lenient decoding
//! makes of a corrupted sequence.

use synsrl::const_codec::{decode_full_c, encode_full_c, normalize_unaries, skeleton, DecodeMode, FullCLabel};
use synsrl::treebank::{parse_ptb, write_ptb};

fn main() {
    let text = "(S (NP (DT the) (JJ old) (NN man)) (VP (VBD left) (PP (IN after) (NP (NN lunch)))))";
    let (sentence, tree) = parse_ptb(text).expect("valid tree").remove(0);
    let tree = normalize_unaries(&tree);
    let seq = encode_full_c(&tree);
    let back = decode_full_c(&seq, &sentence, DecodeMode::Strict).expect("own encoding decodes");
    println!("input     {}", write_ptb(&tree));
    println!("skeleton  {}", write_ptb(&skeleton(&tree)));
    println!("decoded   {}", write_ptb(&back));

    let mut broken = seq.clone();
    broken.labels[1] = FullCLabel::pair(-7, "");
    broken.labels[3] = FullCLabel::Pad;
    match decode_full_c(&broken, &sentence, DecodeMode::Strict) {
        Ok(t) => println!("strict    {}", write_ptb(&t)),
        Err(e) => println!("strict    error: {e}"),
    }
    let lenient = decode_full_c(&broken, &sentence, DecodeMode::Lenient).expect("lenient decoding is total");
    println!("lenient   {}", write_ptb(&lenient));
}
