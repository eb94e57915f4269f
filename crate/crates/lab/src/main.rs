fn main() {
    // the only environment knob: log verbosity
    env_logger::Builder::from_env(env_logger::Env::new().filter("CSFLAB_LOG")).init();
    std::process::exit(csflab::dispatch(std::env::args_os()));
}
