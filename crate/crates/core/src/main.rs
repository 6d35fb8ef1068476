fn main() -> std::process::ExitCode {
    fockflow::cli::main()
}
