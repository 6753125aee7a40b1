fn main() {
    let out = gconvex::cli::run(std::env::args_os());
    if let Some(s) = out.stdout {
        println!("{s}");
    }
    if let Some(s) = out.stderr {
        eprintln!("{s}");
    }
    std::process::exit(out.code);
}
