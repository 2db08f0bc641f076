fn main() {
    let code = focal_cli::run(std::env::args_os());
    std::process::exit(code);
}
