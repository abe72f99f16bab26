#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hypsing_cli.hpp"

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local analysis of hyperbolic metrics with conical and cusp singularities"};
    app.require_subcommand(1);

    hypsing::cli::Options opt;
    std::string out;
    app.add_option("--order", opt.order, "truncation order of power series")->capture_default_str();
    app.add_option("--tol", opt.tol, "tolerance for verification residuals")->capture_default_str();
    app.add_option("--out", out, "write the report here instead of stdout");

    std::string input;
    const std::pair<const char*, const char*> commands[] = {
        {"classify", "classify a developing germ (mode germ)"},
        {"normalize", "classify and normalize a developing germ (mode germ)"},
        {"analyze", "analyze Schwarzian data (mode schwarzian)"},
        {"grid", "sample density and curvature on a grid as CSV (mode metric-grid)"},
        {"admissible", "Gauss-Bonnet admissibility of a divisor (mode gauss-bonnet)"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->add_option("job", input, "job file (JSON)")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hypsing::cli::kParseError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::string text;
    try {
        text = read_file(input);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return hypsing::cli::kParseError;
    }

    const hypsing::cli::Outcome result = hypsing::cli::run(command, text, opt);

    if (out.empty()) {
        std::cout << result.text;
        return result.exit_code;
    }
    std::filesystem::path path(out);
    if (const char* dir = std::getenv("HYPSING_OUT_DIR"); dir != nullptr && path.is_relative()) {
        path = std::filesystem::path(dir) / path;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot write '" << path.string() << "'\n";
        return hypsing::cli::kParseError;
    }
    os << result.text;
    return result.exit_code;
}
