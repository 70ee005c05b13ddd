fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(dado_cli::run::main_entry(&argv));
}
