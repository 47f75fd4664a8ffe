fn main() {
    // placeholder until the CLI module lands
    eprintln!("cqed: CLI not yet wired");
    std::process::exit(2);
}
