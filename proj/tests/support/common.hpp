#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace testsup {

inline std::filesystem::path data_dir() { return RISKATTR_DATA_DIR; }

inline std::filesystem::path tmp_dir() {
    const std::filesystem::path dir = RISKATTR_TMP_DIR;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI binary with the given argument string via the shell,
/// capturing stdout/stderr. Arguments are caller-controlled literals.
inline CliResult run_cli(const std::string& args, const std::string& tag) {
    const auto dir = tmp_dir();
    const auto out_path = dir / (tag + ".out");
    const auto err_path = dir / (tag + ".err");
    const std::string command = std::string(RISKATTR_CLI_PATH) + " " + args + " > \"" +
                                out_path.string() + "\" 2> \"" + err_path.string() + "\"";
    const int raw = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

} // namespace testsup
