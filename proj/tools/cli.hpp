#ifndef FRACQ_TOOLS_CLI_HPP
#define FRACQ_TOOLS_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracq::cli {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitUsage = 64;

enum class PlotKind { f_alpha, spectrum, ground_state, convergence, riesz };

/// Writes contents to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Writes a gnuplot script next to `table` (same stem, .gp) and returns its path.
/// Throws DomainError when the table does not exist.
std::filesystem::path emit_plot_script(const std::filesystem::path& table, PlotKind kind);

std::string usage();

/// Runs one command line (without the program name). Returns the process exit code.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracq::cli

#endif  // FRACQ_TOOLS_CLI_HPP
