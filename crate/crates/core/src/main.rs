use std::io::{self, BufReader};

fn main() {
    let stdin = io::stdin();
    let code = abduce::cli::run(std::env::args_os(), BufReader::new(stdin.lock()), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
