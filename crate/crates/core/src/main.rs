use clap::Parser;

fn main() {
    let cli = linkloss::cli::Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let code = linkloss::cli::run(cli.command, &mut stdout);
    std::process::exit(code);
}
