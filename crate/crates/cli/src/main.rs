fn main() {
    eprintln!("spinlab: not yet wired up");
    std::process::exit(2);
}
