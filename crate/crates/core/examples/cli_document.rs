// Driving the `ew` commands in-process and reading their JSON back.

use enriques_walls::cli::{self, Document};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let runs: [&[&str]; 4] = [
        &["ew", "classify", "--surface", "builtin:U", "--v", "[1,[0,0],\"-3/2\"]", "--w", "[0,[0,0],1]"],
        &["ew", "orbit", "--surface", "builtin:U", "--v", "[1,[2,3],\"1/2\"]", "--w", "[1,[0,0],\"1/2\"]"],
        &["ew", "decompose", "--surface", "builtin:U", "--v", "[1,[0,0],\"-5/2\"]", "--w", "[0,[0,0],1]"],
        &["ew", "walls", "--surface", "builtin:U", "--v", "[1,[0,0],\"-3/2\"]", "--ample", "[1,1]", "--bound", "4"],
    ];
    for args in runs {
        let (code, out, err) = cli::run(args.iter().copied());
        if code == 1 {
            return Err(err.into());
        }
        let doc = Document::from_json(&out).map_err(|f| format!("{f:?}"))?;
        assert_eq!(doc.to_json() + "\n", out);
        println!("{} -> exit {code}, {} bytes", args[1], out.len());
    }
    let (_, text, _) = cli::run(["ew", "walls", "--surface", "builtin:U", "--v", "[1,[0,0],\"-3/2\"]", "--ample", "[1,1]", "--bound", "3", "--format", "text"]);
    print!("{text}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
