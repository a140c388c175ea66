fn main() {
    std::process::exit(voronoi_inverse::cli::run(std::env::args_os()));
}
