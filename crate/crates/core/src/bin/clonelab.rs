use clap::Parser;

fn main() {
    let cli = clonelab::cli::Cli::parse();
    let code = clonelab::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
