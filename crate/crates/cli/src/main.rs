fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(critline_cli::main_with_args(&argv));
}
