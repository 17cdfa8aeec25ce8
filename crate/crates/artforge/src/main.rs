fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ARTFORGE_LOG")).init();
    std::process::exit(artforge::cli::run(std::env::args_os()));
}
